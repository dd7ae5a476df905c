//! Budget sets, the demand function, and continuity of the argmax map.
//!
//! `budget_body` intersects a consumption set with the affordability
//! half-space `p . x <= w`; `demand` maximizes a preference over it. The
//! argmax-on-sets map `gamma` is the object the continuity theorems talk
//! about: with a uniform rotundity modulus delta'(eps), set pairs at
//! Hausdorff distance below min(eps, delta')/2 have maxima within eps,
//! and the harnesses in this module check that claim empirically.

use rand::Rng;
use serde::Serialize;

use crate::geometry::{dot, norm, ConvexBody, GeometryError, Halfspace, Point};
use crate::maximizer::{maximize_body, MaximizeError};
use crate::preference::{Preference, RotundityModulus};
use crate::rng::{trial_rng, unit_direction};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum DemandError {
    #[error("budget set is empty: {0}")]
    EmptyBudget(String),
    /// The shape grammar admits one half-space per body, so the ambient
    /// consumption set must be an uncut box, ball, or interval unless
    /// the budget constraint is slack.
    #[error("ambient body already carries a half-space cut")]
    AmbientAlreadyCut,
    #[error(transparent)]
    Maximize(#[from] MaximizeError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid argument: {0}")]
    BadArgument(String),
}

/// A price vector, a wealth level, and the ambient consumption set.
#[derive(Debug, Clone)]
pub struct BudgetSpec {
    pub prices: Vec<f64>,
    pub wealth: f64,
    pub ambient: ConvexBody,
}

fn extreme_price_values(body: &ConvexBody, p: &[f64]) -> (f64, f64) {
    match body {
        ConvexBody::Interval(iv) => {
            let (a, b) = (p[0] * iv.lo, p[0] * iv.hi);
            (a.min(b), a.max(b))
        }
        ConvexBody::Box { bounds, cut: _ } => {
            let lo: f64 = bounds
                .iter()
                .zip(p)
                .map(|(b, pi)| (pi * b.lo).min(pi * b.hi))
                .sum();
            let hi: f64 = bounds
                .iter()
                .zip(p)
                .map(|(b, pi)| (pi * b.lo).max(pi * b.hi))
                .sum();
            (lo, hi)
        }
        ConvexBody::Ball {
            center,
            radius,
            cut: _,
        } => {
            let c = dot(p, center.coords());
            let reach = norm(p) * radius;
            (c - reach, c + reach)
        }
    }
}

/// The budget set `{ x in ambient : p . x <= w }` as a convex body.
///
/// The stored half-space is normalized by max |p_i| so that scaling
/// (p, w) by a power of two reproduces the identical representation.
pub fn budget_body(spec: &BudgetSpec) -> Result<ConvexBody, DemandError> {
    let p = &spec.prices;
    let w = spec.wealth;
    if p.len() != spec.ambient.dimension() {
        return Err(DemandError::BadArgument(format!(
            "price dimension {} vs ambient dimension {}",
            p.len(),
            spec.ambient.dimension()
        )));
    }
    let (min_cost, max_cost) = extreme_price_values(&spec.ambient, p);
    if max_cost <= w {
        // Slack constraint: the budget set is the consumption set itself.
        return Ok(spec.ambient.clone());
    }
    if min_cost > w + crate::GEOM_TOL {
        return Err(DemandError::EmptyBudget(format!(
            "cheapest affordable bundle costs {min_cost}, wealth is {w}"
        )));
    }
    let scale = p.iter().fold(0.0f64, |m, pi| m.max(pi.abs()));
    let cut = Halfspace {
        normal: p.iter().map(|pi| pi / scale).collect(),
        offset: w / scale,
    };
    let built = match &spec.ambient {
        ConvexBody::Interval(iv) => ConvexBody::cut_box(vec![*iv], Some(cut)),
        ConvexBody::Box { bounds, cut: None } => ConvexBody::cut_box(bounds.clone(), Some(cut)),
        ConvexBody::Ball {
            center,
            radius,
            cut: None,
        } => ConvexBody::cut_ball(center.clone(), *radius, Some(cut)),
        _ => return Err(DemandError::AmbientAlreadyCut),
    };
    built.map_err(|e| DemandError::EmptyBudget(e.to_string()))
}

/// The demand function F(p, w): the unique maximal bundle of the budget set.
pub fn demand(pref: &Preference, spec: &BudgetSpec, tol: f64) -> Result<Point, DemandError> {
    let body = budget_body(spec)?;
    Ok(maximize_body(pref, &body, tol)?.xi)
}

/// The argmax-on-sets map: demand factors through it, and the continuity
/// theorems are stated for it over all inhabited compact convex bodies.
pub fn gamma(pref: &Preference, body: &ConvexBody, tol: f64) -> Result<Point, MaximizeError> {
    Ok(maximize_body(pref, body, tol)?.xi)
}

/// The continuity modulus for gamma: delta = min(eps, delta'(eps)) / 2.
pub fn gamma_modulus(rot: &RotundityModulus, eps: f64) -> f64 {
    assert!(eps > 0.0, "eps must be positive");
    eps.min(rot.delta_of_eps(eps)) / 2.0
}

/// Exact Hausdorff distance between two caps of the same ball cut by
/// parallel half-spaces `u . x <= a` and `u . x <= b` (`u` unit).
///
/// With levels measured from the center, the directed distance from the
/// wider cap is attained on its rim: it equals b - a while the rim's
/// plane projection stays inside the ball (a + b >= 0), and otherwise
/// picks up the rim-to-rim drop between the two cut circles.
pub fn cap_pair_hausdorff(center: &[f64], radius: f64, u: &[f64], a: f64, b: f64) -> f64 {
    let nu = norm(u);
    assert!(nu > 0.0, "direction must be nonzero");
    let base = dot(u, center) / nu;
    let mut lo = (a / nu - base).clamp(-radius, radius);
    let mut hi = (b / nu - base).clamp(-radius, radius);
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    if lo + hi >= 0.0 {
        hi - lo
    } else {
        let ra = (radius * radius - lo * lo).max(0.0).sqrt();
        let rb = (radius * radius - hi * hi).max(0.0).sqrt();
        let dv = hi - lo;
        let dr = rb - ra;
        (dv * dv + dr * dr).sqrt()
    }
}

/// Result of an empirical continuity sweep.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ModulusReport {
    pub eps: f64,
    pub delta: f64,
    /// Pairs that passed the Hausdorff filter and were evaluated.
    pub trials: u32,
    pub failures: u32,
    pub worst_pair: Option<WorstPair>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WorstPair {
    pub body_a: String,
    pub body_b: String,
    pub set_distance: f64,
    pub argmax_distance: f64,
}

/// Per-trial data for plotting; `argmax_distance` is None for pairs the
/// Hausdorff filter rejected.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialRecord {
    pub index: u32,
    pub set_distance: f64,
    pub argmax_distance: Option<f64>,
}

struct TrialOutcome {
    record: TrialRecord,
    failed: bool,
    pair: Option<(Halfspace, Halfspace, f64)>,
}

#[allow(clippy::too_many_arguments)]
fn gamma_trial(
    pref: &Preference,
    center: &[f64],
    radius: f64,
    eps: f64,
    delta_keep: f64,
    delta_gen: f64,
    tol: f64,
    seed: u64,
    index: u32,
) -> Result<TrialOutcome, DemandError> {
    let mut rng = trial_rng(seed, index as u64);
    let dim = center.len();
    let u = unit_direction(&mut rng, dim);
    let base = dot(&u, center);
    // Offsets keep the thinner cap at least 10 tol thick and inhabited.
    let lo_off = base - radius + 10.0 * tol;
    let hi_off = base + radius;
    let a: f64 = rng.random_range(lo_off..hi_off);
    let b: f64 = (a + rng.random_range(0.0..delta_gen)).min(hi_off);
    let rho = cap_pair_hausdorff(center, radius, &u, a, b);
    let mut outcome = TrialOutcome {
        record: TrialRecord {
            index,
            set_distance: rho,
            argmax_distance: None,
        },
        failed: false,
        pair: None,
    };
    if rho >= delta_keep {
        return Ok(outcome);
    }
    let cut_a = Halfspace {
        normal: u.clone(),
        offset: a,
    };
    let cut_b = Halfspace {
        normal: u.clone(),
        offset: b,
    };
    let body_a = ConvexBody::cut_ball(Point(center.to_vec()), radius, Some(cut_a.clone()))
        .map_err(DemandError::Geometry)?;
    let body_b = ConvexBody::cut_ball(Point(center.to_vec()), radius, Some(cut_b.clone()))
        .map_err(DemandError::Geometry)?;
    let xi_a = gamma(pref, &body_a, tol)?;
    let xi_b = gamma(pref, &body_b, tol)?;
    let dxi = xi_a.distance(&xi_b);
    outcome.record.argmax_distance = Some(dxi);
    outcome.failed = dxi > eps + 2.0 * tol;
    outcome.pair = Some((cut_a, cut_b, dxi));
    Ok(outcome)
}

/// Empirical check of the uniform-continuity claim for gamma.
///
/// Draws random parallel half-space pairs over a ball ambient, keeps the
/// pairs whose exact Hausdorff distance is below the modulus (minus a
/// measurement slack), and counts maxima farther apart than
/// `eps + 2 tol` as failures. Per-trial seeds derive from the trial
/// index, so results do not depend on the worker count.
pub fn verify_gamma_uniform_continuity(
    pref: &Preference,
    ambient: &ConvexBody,
    eps: f64,
    trials: u32,
    tol: f64,
    seed: u64,
    workers: usize,
) -> Result<(ModulusReport, Vec<TrialRecord>), DemandError> {
    let rot = pref
        .rotundity()
        .ok_or_else(|| DemandError::BadArgument("preference carries no rotundity modulus".into()))?
        .clone();
    if eps.is_nan() || eps <= 10.0 * tol {
        return Err(DemandError::BadArgument(format!(
            "eps {eps} must exceed 10 * tol = {}",
            10.0 * tol
        )));
    }
    let ConvexBody::Ball {
        center,
        radius,
        cut: None,
    } = ambient
    else {
        return Err(DemandError::BadArgument(
            "gamma sweep expects an uncut ball ambient".into(),
        ));
    };
    if *radius <= 20.0 * tol {
        return Err(DemandError::BadArgument(format!(
            "ambient radius {radius} leaves no room for 10*tol-thick slices"
        )));
    }
    let delta = gamma_modulus(&rot, eps);
    // Exact cap distances carry only rounding error; a nominal slack
    // keeps the filter sound.
    let delta_keep = delta - 1e-9;
    let center = center.coords().to_vec();
    let radius = *radius;
    let workers = workers.max(1);
    let mut outcomes: Vec<Option<TrialOutcome>> = Vec::with_capacity(trials as usize);
    outcomes.resize_with(trials as usize, || None);

    if workers == 1 {
        for (i, slot) in outcomes.iter_mut().enumerate() {
            *slot = Some(gamma_trial(
                pref, &center, radius, eps, delta_keep, delta, tol, seed, i as u32,
            )?);
        }
    } else {
        let results: Vec<Result<(usize, TrialOutcome), DemandError>> =
            std::thread::scope(|scope| {
                let mut handles = Vec::new();
                for worker in 0..workers {
                    let pref = pref.clone();
                    let center = center.clone();
                    handles.push(scope.spawn(move || {
                        let mut local = Vec::new();
                        let mut i = worker;
                        while i < trials as usize {
                            let out = gamma_trial(
                                &pref, &center, radius, eps, delta_keep, delta, tol, seed,
                                i as u32,
                            )
                            .map(|o| (i, o));
                            local.push(out);
                            i += workers;
                        }
                        local
                    }));
                }
                handles
                    .into_iter()
                    .flat_map(|h| h.join().expect("gamma worker panicked"))
                    .collect()
            });
        for res in results {
            let (i, out) = res?;
            outcomes[i] = Some(out);
        }
    }

    let mut report = ModulusReport {
        eps,
        delta,
        trials: 0,
        failures: 0,
        worst_pair: None,
    };
    let mut records = Vec::with_capacity(trials as usize);
    for out in outcomes.into_iter().flatten() {
        if out.record.argmax_distance.is_some() {
            report.trials += 1;
            if out.failed {
                report.failures += 1;
            }
            if let Some((ca, cb, dxi)) = &out.pair {
                let better = report
                    .worst_pair
                    .as_ref()
                    .is_none_or(|w| *dxi > w.argmax_distance);
                if better {
                    report.worst_pair = Some(WorstPair {
                        body_a: format!("ball cut {:?} <= {}", ca.normal, ca.offset),
                        body_b: format!("ball cut {:?} <= {}", cb.normal, cb.offset),
                        set_distance: out.record.set_distance,
                        argmax_distance: *dxi,
                    });
                }
            }
        }
        records.push(out.record);
    }
    Ok((report, records))
}

/// Pointwise variant: one body is held fixed and only its perturbations
/// are drawn, matching a rotundity modulus anchored at that maximum.
pub fn verify_gamma_pointwise(
    pref: &Preference,
    ambient: &ConvexBody,
    base_cut: &Halfspace,
    eps: f64,
    trials: u32,
    tol: f64,
    seed: u64,
) -> Result<ModulusReport, DemandError> {
    let rot = pref
        .rotundity()
        .ok_or_else(|| DemandError::BadArgument("preference carries no rotundity modulus".into()))?
        .clone();
    let ConvexBody::Ball {
        center,
        radius,
        cut: None,
    } = ambient
    else {
        return Err(DemandError::BadArgument(
            "pointwise sweep expects an uncut ball ambient".into(),
        ));
    };
    let nu = norm(&base_cut.normal);
    if nu <= 0.0 {
        return Err(DemandError::BadArgument(
            "base cut normal must be nonzero".into(),
        ));
    }
    let delta = gamma_modulus(&rot, eps);
    let delta_keep = delta - 1e-9;
    let base_body =
        ConvexBody::cut_ball(center.clone(), *radius, Some(base_cut.clone()))?;
    let xi_base = gamma(pref, &base_body, tol)?;
    let mut report = ModulusReport {
        eps,
        delta,
        trials: 0,
        failures: 0,
        worst_pair: None,
    };
    for i in 0..trials {
        let mut rng = trial_rng(seed, i as u64);
        let shift: f64 = rng.random_range(-delta * nu..delta * nu);
        let offset = base_cut.offset + shift;
        let rho =
            cap_pair_hausdorff(center.coords(), *radius, &base_cut.normal, base_cut.offset, offset);
        if rho >= delta_keep {
            continue;
        }
        let perturbed = match ConvexBody::cut_ball(
            center.clone(),
            *radius,
            Some(Halfspace {
                normal: base_cut.normal.clone(),
                offset,
            }),
        ) {
            Ok(b) => b,
            Err(_) => continue,
        };
        let xi = gamma(pref, &perturbed, tol)?;
        let dxi = xi_base.distance(&xi);
        report.trials += 1;
        if dxi > eps + 2.0 * tol {
            report.failures += 1;
        }
        let better = report
            .worst_pair
            .as_ref()
            .is_none_or(|w| dxi > w.argmax_distance);
        if better {
            report.worst_pair = Some(WorstPair {
                body_a: format!("base cut offset {}", base_cut.offset),
                body_b: format!("perturbed offset {offset}"),
                set_distance: rho,
                argmax_distance: dxi,
            });
        }
    }
    Ok(report)
}

/// The wealth-direction transfer: for fixed prices, wealth moves below
/// `delta_w = gamma_delta * |p|` keep the budget sets within the gamma
/// modulus, hence the maxima within eps.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TransferStatement {
    pub eps: f64,
    pub gamma_delta: f64,
    pub price_norm: f64,
    /// Wealth modulus: |w - w'| < delta_w implies the argmax claim.
    pub delta_w: f64,
    pub audit_pairs: u32,
    pub audit_violations: u32,
    /// Largest Hausdorff distance seen in the audit.
    pub worst_rho: f64,
}

/// Context for the wealth-direction audit.
#[derive(Debug, Clone)]
pub struct PriceContext {
    pub prices: Vec<f64>,
    pub ambient: ConvexBody,
    pub wealth_range: (f64, f64),
    pub pairs: u32,
    pub seed: u64,
}

/// Chain a passing gamma report with the parallel-cut geometry bound and
/// audit the claimed Hausdorff inequality on random wealth pairs.
pub fn f_continuity_transfer(
    report: &ModulusReport,
    ctx: &PriceContext,
) -> Result<TransferStatement, DemandError> {
    if report.failures > 0 {
        return Err(DemandError::BadArgument(
            "transfer requires a passing gamma report".into(),
        ));
    }
    let ConvexBody::Ball {
        center,
        radius,
        cut: None,
    } = &ctx.ambient
    else {
        return Err(DemandError::BadArgument(
            "wealth audit expects an uncut ball ambient".into(),
        ));
    };
    let pn = norm(&ctx.prices);
    if pn <= 0.0 {
        return Err(DemandError::BadArgument("prices must be nonzero".into()));
    }
    let delta_w = report.delta * pn;
    let (w_lo, w_hi) = ctx.wealth_range;
    let mut violations = 0u32;
    let mut worst_rho = 0.0f64;
    for i in 0..ctx.pairs {
        let mut rng = trial_rng(ctx.seed, i as u64);
        let w: f64 = rng.random_range(w_lo..w_hi);
        let dw: f64 = rng.random_range(-delta_w..delta_w);
        let w2 = (w + dw).clamp(w_lo, w_hi);
        let rho = cap_pair_hausdorff(center.coords(), *radius, &ctx.prices, w, w2);
        worst_rho = worst_rho.max(rho);
        if rho >= report.delta {
            violations += 1;
        }
    }
    Ok(TransferStatement {
        eps: report.eps,
        gamma_delta: report.delta,
        price_norm: pn,
        delta_w,
        audit_pairs: ctx.pairs,
        audit_violations: violations,
        worst_rho,
    })
}
