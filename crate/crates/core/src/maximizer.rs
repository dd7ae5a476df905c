//! Constructive argmax: quarter-point interval shrinking in 1-D and
//! dimension induction via induced preferences in n-D.
//!
//! Each 1-D step probes the quarter points of the bracket and discards
//! one outer quarter, so the bracket width shrinks by exactly 3/4 per
//! step. In n dimensions the first coordinate is maximized under the
//! induced preference "s beats t iff the best point of slice s beats the
//! best point of slice t", with slice maxima computed recursively and
//! memoized per probe coordinate.
//!
//! Failed quarter chains mean one of three things. Total indifference
//! across the probes answers with the midpoint (every point of an
//! indifferent bracket is maximal). Inside the recursion a failure can
//! only be comparison noise, so sub-level solves stop and return their
//! bracket; the failure pattern itself bounds the value error fed
//! upward. At the top level a failure beyond the noise floor is
//! reported as a strict-convexity violation, with the bracket in the
//! error; where an argmax hugs a steep boundary feature the induced
//! comparisons can degenerate below any fixed tolerance, and refusing
//! with the located bracket is the honest outcome.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::geometry::{ConvexBody, GeometryError, Interval, Point};
use crate::preference::Preference;
use crate::rng::trial_rng;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum MaximizeError {
    /// Both quarter chains failed on a bracket wide enough that solver
    /// noise cannot explain it: the oracle violates strict convexity.
    #[error("preference is not strictly convex on bracket [{lo}, {hi}]")]
    NotStrictlyConvex { lo: f64, hi: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("preference dimension {pref} does not match body dimension {body}")]
    DimensionMismatch { pref: usize, body: usize },
}

/// Which side the quarter-point decision discards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuarterDecision {
    /// Chain `mid > q1 > lo` held: discard the left quarter.
    KeepRight,
    /// Chain `mid > q3 > hi` held: discard the right quarter.
    KeepLeft,
}

/// Search bracket stored as (lo, width) so the shrink law is exact:
/// `apply` multiplies the width by 0.75, nothing else touches it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub width: f64,
}

impl Bracket {
    pub fn from_interval(iv: Interval) -> Self {
        Bracket {
            lo: iv.lo,
            width: iv.hi - iv.lo,
        }
    }

    pub fn hi(&self) -> f64 {
        self.lo + self.width
    }

    pub fn midpoint(&self) -> f64 {
        self.lo + 0.5 * self.width
    }

    /// (q1, mid, q3) = lo + (1/4, 1/2, 3/4) * width.
    pub fn quarter_points(&self) -> (f64, f64, f64) {
        (
            self.lo + 0.25 * self.width,
            self.lo + 0.5 * self.width,
            self.lo + 0.75 * self.width,
        )
    }

    pub fn apply(&mut self, decision: QuarterDecision) {
        if decision == QuarterDecision::KeepRight {
            self.lo += 0.25 * self.width;
        }
        self.width *= 0.75;
    }
}

/// Evaluate the two quarter chains with a fallible comparison, counting
/// oracle calls. `Ok(None)` means both chains failed.
fn quarter_chains<E>(
    cmp: &mut impl FnMut(f64, f64) -> Result<bool, E>,
    bracket: &Bracket,
    comparisons: &mut u64,
) -> Result<Option<QuarterDecision>, E> {
    let (q1, mid, q3) = bracket.quarter_points();
    *comparisons += 1;
    if cmp(mid, q1)? {
        *comparisons += 1;
        if cmp(q1, bracket.lo)? {
            return Ok(Some(QuarterDecision::KeepRight));
        }
    }
    *comparisons += 1;
    if cmp(mid, q3)? {
        *comparisons += 1;
        if cmp(q3, bracket.hi())? {
            return Ok(Some(QuarterDecision::KeepLeft));
        }
    }
    Ok(None)
}

/// One quarter-point decision on `iv`; ties break toward `KeepRight`
/// because chain A is evaluated first.
pub fn quarter_decision(
    mut cmp: impl FnMut(f64, f64) -> bool,
    iv: Interval,
) -> Result<QuarterDecision, MaximizeError> {
    assert!(iv.width() > 0.0, "quarter_decision needs a positive width");
    let bracket = Bracket::from_interval(iv);
    let mut count = 0;
    match quarter_chains::<std::convert::Infallible>(&mut |a, b| Ok(cmp(a, b)), &bracket, &mut count)
    {
        Ok(Some(d)) => Ok(d),
        Ok(None) => Err(MaximizeError::NotStrictlyConvex {
            lo: iv.lo,
            hi: iv.hi,
        }),
        Err(never) => match never {},
    }
}

/// Are all eight directed comparisons among the five probe points false?
/// That is total indifference on the bracket: every point is maximal and
/// the midpoint is a correct answer (flat utilities, e.g. a Cobb-Douglas
/// slice along a zero coordinate, land here).
fn probe_indifferent<E>(
    cmp: &mut impl FnMut(f64, f64) -> Result<bool, E>,
    bracket: &Bracket,
    comparisons: &mut u64,
) -> Result<bool, E> {
    let (q1, mid, q3) = bracket.quarter_points();
    let pairs = [
        (mid, q1),
        (q1, bracket.lo),
        (mid, q3),
        (q3, bracket.hi()),
    ];
    for (a, b) in pairs {
        *comparisons += 2;
        if cmp(a, b)? || cmp(b, a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Shrink until the width drops to `tol`. Chains failing on a bracket
/// no wider than `noise_floor` count as convergence (used by the n-D
/// recursion, where induced comparisons carry inner-solver noise), and
/// failing with total indifference on the probes counts as an answer;
/// any other failure is a strict-convexity violation.
fn shrink_bracket<E>(
    mut cmp: impl FnMut(f64, f64) -> Result<bool, E>,
    iv: Interval,
    tol: f64,
    noise_floor: f64,
) -> Result<(Bracket, u64), Result<MaximizeError, E>> {
    let mut bracket = Bracket::from_interval(iv);
    let mut comparisons = 0u64;
    while bracket.width > tol {
        match quarter_chains(&mut cmp, &bracket, &mut comparisons).map_err(Err)? {
            Some(d) => bracket.apply(d),
            None if bracket.width <= noise_floor => break,
            None => {
                if probe_indifferent(&mut cmp, &bracket, &mut comparisons).map_err(Err)? {
                    break;
                }
                return Err(Ok(MaximizeError::NotStrictlyConvex {
                    lo: bracket.lo,
                    hi: bracket.hi(),
                }));
            }
        }
    }
    Ok((bracket, comparisons))
}

/// Outcome of a maximization run.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximizeResult {
    /// The located maximal point.
    pub xi: Point,
    /// Final bracket width of the driving 1-D search (<= tolerance).
    pub bracket_width: f64,
    /// Number of oracle comparisons, including recursive levels.
    pub comparisons: u64,
    /// Set by callers that ran `check_dominance` against this result.
    pub dominance_checked: bool,
}

/// Maximize a 1-D comparison oracle on `iv` to within `tol`.
///
/// Intervals no wider than `tol` return their midpoint with zero
/// comparisons, which is the fixed-tolerance reading of the degenerate
/// interval case: at tolerance `tol` an interval of unknown positivity
/// collapses to a width test.
pub fn maximize_interval(
    cmp: impl FnMut(f64, f64) -> bool,
    iv: Interval,
    tol: f64,
) -> Result<MaximizeResult, MaximizeError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(MaximizeError::BadTolerance(tol));
    }
    let mut cmp = cmp;
    let (bracket, comparisons) = shrink_bracket::<std::convert::Infallible>(
        |a, b| Ok(cmp(a, b)),
        iv,
        tol,
        0.0,
    )
    .map_err(|e| match e {
        Ok(err) => err,
        Err(never) => match never {},
    })?;
    Ok(MaximizeResult {
        xi: Point(vec![bracket.midpoint()]),
        bracket_width: bracket.width,
        comparisons,
        dominance_checked: false,
    })
}

/// Internal 1-D drive that also exposes the final bracket.
pub(crate) fn maximize_interval_bracket(
    mut cmp: impl FnMut(f64, f64) -> bool,
    iv: Interval,
    tol: f64,
) -> Result<(Bracket, u64), MaximizeError> {
    shrink_bracket::<std::convert::Infallible>(|a, b| Ok(cmp(a, b)), iv, tol, 0.0).map_err(|e| {
        match e {
            Ok(err) => err,
            Err(never) => match never {},
        }
    })
}

fn prepend(t: f64, rest: &Point) -> Point {
    let mut coords = Vec::with_capacity(rest.dim() + 1);
    coords.push(t);
    coords.extend_from_slice(rest.coords());
    Point(coords)
}

/// Preference on slices at first coordinate `t`, delegating to `pref`.
fn slice_preference(pref: &Preference, t: f64) -> Preference {
    let parent = pref.clone();
    Preference::from_compare(pref.dimension() - 1, move |x: &Point, y: &Point| {
        parent.prefers(&prepend(t, x), &prepend(t, y))
    })
}

fn maximize_rec(
    pref: &Preference,
    body: &ConvexBody,
    tol: f64,
    snapped: bool,
) -> Result<(Point, f64), MaximizeError> {
    // Recursive solves (snapped) stop benignly on any failed chain: for
    // a strictly convex oracle the failure can only come from comparison
    // noise or from the induced utility losing curvature at its maximum
    // (a level set osculating the boundary), and stopping costs at most
    // the noise depth in the value fed upward. The top-level loop keeps
    // the strict error so violating oracles are refused.
    let benign_floor = if snapped { f64::INFINITY } else { 0.0 };
    let dim = body.dimension();
    if dim == 1 {
        let iv = body.project_first();
        let (bracket, _) = shrink_bracket::<std::convert::Infallible>(
            |s, t| Ok(pref.prefers(&Point(vec![s]), &Point(vec![t]))),
            iv,
            tol,
            benign_floor,
        )
        .map_err(|e| match e {
            Ok(err) => err,
            Err(never) => match never {},
        })?;
        let mut best = bracket.midpoint();
        if snapped {
            // Recursive slice maxima feed utility values upward. An
            // argmax pinned to a bracket endpoint would leave the
            // midpoint a first-order value error away, drowning the
            // outer comparisons in noise; snapping to the preferred
            // endpoint makes pinned maxima exact.
            for cand in [bracket.lo, bracket.hi()] {
                if pref.prefers(&Point(vec![cand]), &Point(vec![best])) {
                    best = cand;
                }
            }
        }
        return Ok((Point(vec![best]), bracket.width));
    }

    // Split the error budget across coordinates: the outer search and
    // every recursive slice maximum run at tol / (2 sqrt(n)).
    let tol_inner = tol / (2.0 * (dim as f64).sqrt());
    let outer = body.project_first();
    let quantum = tol_inner / 4.0;
    let memo: RefCell<HashMap<i64, Point>> = RefCell::new(HashMap::new());

    let slice_max = |t: f64| -> Result<Point, MaximizeError> {
        let key = (t / quantum).round() as i64;
        if let Some(hit) = memo.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let slice = body.slice_first(t)?;
        let sub_pref = slice_preference(pref, t);
        let (sub_xi, _) = maximize_rec(&sub_pref, &slice, tol_inner, true)?;
        let full = prepend(t, &sub_xi);
        memo.borrow_mut().insert(key, full.clone());
        Ok(full)
    };

    let induced = |s: f64, t: f64| -> Result<bool, MaximizeError> {
        let xs = slice_max(s)?;
        let xt = slice_max(t)?;
        Ok(pref.prefers(&xs, &xt))
    };

    // Induced comparisons are exact only down to the inner solver's
    // value noise; below 8x the outer tolerance a failed chain is
    // convergence, not a convexity violation.
    let floor = if snapped {
        f64::INFINITY
    } else {
        8.0 * tol_inner
    };
    let (bracket, _) = shrink_bracket(induced, outer, tol_inner, floor)
        .map_err(|e| e.unwrap_or_else(|inner| inner))?;
    let mut t_star = bracket.midpoint();
    if snapped {
        for cand in [bracket.lo, bracket.hi()] {
            if induced(cand, t_star)? {
                t_star = cand;
            }
        }
    }
    let xi = slice_max(t_star)?;
    Ok((xi, bracket.width))
}

/// Maximize `pref` over `body`: the located point is within `tol` of the
/// unique maximum for strictly convex oracles.
pub fn maximize_body(
    pref: &Preference,
    body: &ConvexBody,
    tol: f64,
) -> Result<MaximizeResult, MaximizeError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(MaximizeError::BadTolerance(tol));
    }
    if pref.dimension() != body.dimension() {
        return Err(MaximizeError::DimensionMismatch {
            pref: pref.dimension(),
            body: body.dimension(),
        });
    }
    let counter = Arc::new(AtomicU64::new(0));
    let counting = {
        let inner = pref.clone();
        let counter = counter.clone();
        Preference::from_compare(pref.dimension(), move |x: &Point, y: &Point| {
            counter.fetch_add(1, Ordering::Relaxed);
            inner.prefers(x, y)
        })
    };
    let (xi, bracket_width) = maximize_rec(&counting, body, tol, false)?;
    Ok(MaximizeResult {
        xi,
        bracket_width,
        comparisons: counter.load(Ordering::Relaxed),
        dominance_checked: false,
    })
}

/// Dominance audit report for a located maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    /// Sample points actually drawn (zero when eps exceeds the diameter).
    pub drawn: usize,
    pub passes: usize,
    pub failures: usize,
    /// Worst violator: the failing point farthest from xi.
    pub worst: Option<(Point, f64)>,
}

impl DominanceReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Draw random members at distance >= eps from `xi` and require that
/// `xi` strictly beats each one. Failures are reported, not thrown.
pub fn check_dominance(
    pref: &Preference,
    body: &ConvexBody,
    xi: &Point,
    samples: usize,
    eps: f64,
    seed: u64,
) -> DominanceReport {
    assert!(samples >= 1, "samples must be >= 1");
    assert!(eps > 0.0, "eps must be positive");
    if body.diameter_upper() < eps {
        return DominanceReport {
            drawn: 0,
            passes: 0,
            failures: 0,
            worst: None,
        };
    }
    let mut rng = trial_rng(seed, 0);
    let mut report = DominanceReport {
        drawn: 0,
        passes: 0,
        failures: 0,
        worst: None,
    };
    let mut attempts = 0usize;
    let max_attempts = samples.saturating_mul(200);
    while report.drawn < samples && attempts < max_attempts {
        attempts += 1;
        let Some(x) = body.sample_member(&mut rng, 100) else {
            break;
        };
        let d = x.distance(xi);
        if d < eps {
            continue;
        }
        report.drawn += 1;
        if pref.prefers(xi, &x) {
            report.passes += 1;
        } else {
            report.failures += 1;
            if report.worst.as_ref().is_none_or(|(_, wd)| d > *wd) {
                report.worst = Some((x, d));
            }
        }
    }
    report
}
