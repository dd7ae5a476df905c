//! Strict-preference oracles and rotundity moduli.
//!
//! A `Preference` is a decidable strict comparison `x > y` (asymmetric,
//! negatively transitive for utility-backed instances) optionally carrying
//! a rotundity modulus eps -> delta. The modulus is what turns the
//! qualitative continuity theorems into checkable quantitative claims, so
//! two concrete sources are provided: an analytic one from strong
//! concavity data, and an empirical halving search.

use std::sync::Arc;

use crate::geometry::{dist, ConvexBody, Point};
use crate::rng::{ball_point, trial_rng};
use crate::GEOM_TOL;

type CompareFn = Arc<dyn Fn(&Point, &Point) -> bool + Send + Sync>;
type UtilityFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
type DeltaFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum PreferenceError {
    /// Neither disjunct of the strict-convexity clause held; the supplied
    /// oracle violates the hypothesis.
    #[error("oracle is not strictly convex at the probed points")]
    NotStrictlyConvex,
    #[error("invalid argument: {0}")]
    BadArgument(String),
}

/// Which side of the strict-convexity disjunction held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvexityWitness {
    /// The combination is preferred to the first point.
    FirstDisjunct,
    /// The combination is preferred to the second point.
    SecondDisjunct,
}

/// Scope of a rotundity modulus.
#[derive(Debug, Clone, PartialEq)]
pub enum ModulusKind {
    Uniform,
    Pointwise(Point),
}

/// Quantitative rotundity: for pairs at distance >= eps, every
/// perturbation of the midpoint by less than delta(eps) beats one
/// endpoint.
#[derive(Clone)]
pub struct RotundityModulus {
    pub kind: ModulusKind,
    delta: DeltaFn,
}

impl RotundityModulus {
    pub fn uniform(delta: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RotundityModulus {
            kind: ModulusKind::Uniform,
            delta: Arc::new(delta),
        }
    }

    pub fn pointwise(base: Point, delta: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RotundityModulus {
            kind: ModulusKind::Pointwise(base),
            delta: Arc::new(delta),
        }
    }

    pub fn delta_of_eps(&self, eps: f64) -> f64 {
        (self.delta)(eps)
    }

    /// Certified modulus from strong concavity data.
    pub fn from_strong_concavity(data: StrongConcavityData) -> Self {
        RotundityModulus::uniform(move |eps| rotundity_delta_from_strong_concavity(&data, eps))
    }
}

impl std::fmt::Debug for RotundityModulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RotundityModulus")
            .field("kind", &self.kind)
            .finish_non_exhaustive()
    }
}

/// Strong-concavity parameter alpha and Lipschitz bound of a utility on
/// its domain: u((x+y)/2) >= (u(x)+u(y))/2 + alpha |x-y|^2 / 8.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongConcavityData {
    pub alpha: f64,
    pub lipschitz: f64,
}

/// delta' = alpha eps^2 / (16 L).
///
/// The midpoint gains alpha eps^2 / 8 over the worse endpoint; spending
/// half that budget on the Lipschitz perturbation L delta' leaves a
/// strict margin of alpha eps^2 / 16.
pub fn rotundity_delta_from_strong_concavity(data: &StrongConcavityData, eps: f64) -> f64 {
    assert!(eps > 0.0, "eps must be positive");
    data.alpha * eps * eps / (16.0 * data.lipschitz)
}

/// Decidable strict-comparison oracle with optional rotundity data.
///
/// Comparisons are exact floating-point comparisons with no tolerance
/// band; a band would break asymmetry.
#[derive(Clone)]
pub struct Preference {
    dimension: usize,
    compare: CompareFn,
    utility: Option<UtilityFn>,
    rotundity: Option<RotundityModulus>,
}

impl Preference {
    /// General oracle constructor.
    pub fn from_compare(
        dimension: usize,
        compare: impl Fn(&Point, &Point) -> bool + Send + Sync + 'static,
    ) -> Self {
        Preference {
            dimension,
            compare: Arc::new(compare),
            utility: None,
            rotundity: None,
        }
    }

    /// Utility-backed oracle: x > y iff u(x) > u(y).
    pub fn from_utility(
        dimension: usize,
        u: impl Fn(&Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let u: UtilityFn = Arc::new(u);
        let cmp = {
            let u = u.clone();
            move |x: &Point, y: &Point| u(x) > u(y)
        };
        Preference {
            dimension,
            compare: Arc::new(cmp),
            utility: Some(u),
            rotundity: None,
        }
    }

    pub fn with_rotundity(mut self, rot: RotundityModulus) -> Self {
        self.rotundity = Some(rot);
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn rotundity(&self) -> Option<&RotundityModulus> {
        self.rotundity.as_ref()
    }

    /// Does the oracle strictly prefer `x` to `y`?
    pub fn prefers(&self, x: &Point, y: &Point) -> bool {
        (self.compare)(x, y)
    }

    /// Utility value when the oracle is utility-backed.
    pub fn utility(&self, x: &Point) -> Option<f64> {
        self.utility.as_ref().map(|u| u(x))
    }
}

impl std::fmt::Debug for Preference {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Preference")
            .field("dimension", &self.dimension)
            .field("has_utility", &self.utility.is_some())
            .field("rotundity", &self.rotundity)
            .finish()
    }
}

/// Evaluate the strict-convexity disjunction at `t x + (1-t) y`.
/// Ties break toward `FirstDisjunct`.
pub fn strict_convexity_witness(
    pref: &Preference,
    x: &Point,
    y: &Point,
    t: f64,
) -> Result<ConvexityWitness, PreferenceError> {
    if !(t > 0.0 && t < 1.0) {
        return Err(PreferenceError::BadArgument(format!(
            "t must lie in (0,1), got {t}"
        )));
    }
    if dist(x.coords(), y.coords()) <= GEOM_TOL {
        return Err(PreferenceError::BadArgument(
            "points must be distinct".into(),
        ));
    }
    let mix: Point = Point(
        x.coords()
            .iter()
            .zip(y.coords())
            .map(|(a, b)| t * a + (1.0 - t) * b)
            .collect(),
    );
    if pref.prefers(&mix, x) {
        Ok(ConvexityWitness::FirstDisjunct)
    } else if pref.prefers(&mix, y) {
        Ok(ConvexityWitness::SecondDisjunct)
    } else {
        Err(PreferenceError::NotStrictlyConvex)
    }
}

/// Empirical rotundity modulus by halving search over {eps/2, eps/4, ...}.
///
/// Per-trial generators are derived from (seed, level, trial), so the
/// trial sets nest: fewer trials can only pass at a larger delta, making
/// the result monotone in evidence. Returns 0 when every tested level
/// fails; the search floor is eps / 2^20.
pub fn estimate_rotundity_modulus(
    pref: &Preference,
    body: &ConvexBody,
    eps: f64,
    trials: u32,
    seed: u64,
) -> f64 {
    assert!(eps > 0.0, "eps must be positive");
    assert!(trials >= 1, "at least one trial required");
    const MAX_LEVELS: u32 = 20;
    for level in 1..=MAX_LEVELS {
        let delta = eps / f64::powi(2.0, level as i32);
        let mut all_held = true;
        for trial in 0..trials {
            let stream = (level as u64) << 32 | trial as u64;
            let mut rng = trial_rng(seed, stream);
            // Rejection-sample a pair at distance >= eps; give up quietly if
            // the body is too small to contain one (vacuous success).
            let mut pair = None;
            for _ in 0..1000 {
                let (Some(x), Some(y)) = (
                    body.sample_member(&mut rng, 100),
                    body.sample_member(&mut rng, 100),
                ) else {
                    break;
                };
                if x.distance(&y) >= eps {
                    pair = Some((x, y));
                    break;
                }
            }
            let Some((x, y)) = pair else { continue };
            let z = ball_point(&mut rng, &vec![0.0; x.dim()], delta);
            let mid_z = Point(
                x.coords()
                    .iter()
                    .zip(y.coords())
                    .zip(&z)
                    .map(|((a, b), zi)| 0.5 * (a + b) + zi)
                    .collect(),
            );
            if !(pref.prefers(&mid_z, &x) || pref.prefers(&mid_z, &y)) {
                all_held = false;
                break;
            }
        }
        if all_held {
            return delta;
        }
    }
    0.0
}
