//! Approximate competitive equilibria: checker and naive price-grid search.
//!
//! An economy is a list of consumers (consumption set + preference, zero
//! wealth) and a finitely generated aggregate production cone
//! `Y = { sum_j s_j g_j - d : s >= 0, d >= 0 }`. A candidate passes when
//! every bundle is the consumer's demand (E1), markets clear (E3), and
//! either prices make production exactly profitless (E2) or profit is
//! within eps of zero (AE).

use serde::Serialize;

use crate::demand::{demand, BudgetSpec, DemandError};
use crate::geometry::{dist, dot, ConvexBody, Point};
use crate::preference::Preference;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum EquilibriumError {
    /// The cone meets the nonnegative orthant away from the origin.
    #[error("production cone contains the nonnegative direction {0:?}")]
    ConeViolation(Vec<f64>),
    #[error("dimension mismatch: {0}")]
    BadDimension(String),
    #[error("invalid economy: {0}")]
    BadEconomy(String),
}

/// One consumer: a compact consumption set and a strict preference.
#[derive(Debug, Clone)]
pub struct Consumer {
    pub body: ConvexBody,
    pub preference: Preference,
}

/// Consumers plus production-cone generators.
#[derive(Debug, Clone)]
pub struct Economy {
    pub consumers: Vec<Consumer>,
    pub generators: Vec<Point>,
    pub dimension: usize,
}

// ---------------------------------------------------------------------------
// Nonnegative least squares (Lawson-Hanson active set), desk scale.
// ---------------------------------------------------------------------------

/// Solve the normal equations of the passive-column least squares.
#[allow(clippy::needless_range_loop)]
fn solve_normal(columns: &[&Vec<f64>], y: &[f64]) -> Vec<f64> {
    let k = columns.len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = dot(columns[i], columns[j]);
        }
        a[i][i] += 1e-12; // keep degenerate generator sets solvable
        a[i][k] = dot(columns[i], y);
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        let p = a[col][col];
        if p.abs() < 1e-30 {
            continue;
        }
        for row in 0..k {
            if row == col {
                continue;
            }
            let f = a[row][col] / p;
            for c in col..=k {
                a[row][c] -= f * a[col][c];
            }
        }
    }
    (0..k)
        .map(|i| {
            if a[i][i].abs() < 1e-30 {
                0.0
            } else {
                a[i][k] / a[i][i]
            }
        })
        .collect()
}

/// min |A x - y| with x >= 0, columns of A given explicitly.
pub fn nnls(columns: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = columns.len();
    let m = y.len();
    let mut x = vec![0.0f64; n];
    let mut passive = vec![false; n];
    let grad_tol = 1e-12 * (1.0 + crate::geometry::norm(y));
    for _ in 0..(6 * n + 12) {
        let mut r = y.to_vec();
        for (j, col) in columns.iter().enumerate() {
            if x[j] != 0.0 {
                for i in 0..m {
                    r[i] -= x[j] * col[i];
                }
            }
        }
        let mut best = None;
        for (j, col) in columns.iter().enumerate() {
            if passive[j] {
                continue;
            }
            let w = dot(col, &r);
            if w > grad_tol && best.is_none_or(|(_, bw)| w > bw) {
                best = Some((j, w));
            }
        }
        let Some((enter, _)) = best else { break };
        passive[enter] = true;
        // Inner loop: restore feasibility of the passive solve.
        for _ in 0..(6 * n + 12) {
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let cols: Vec<&Vec<f64>> = idx.iter().map(|&j| &columns[j]).collect();
            let z = solve_normal(&cols, y);
            if z.iter().all(|&v| v > 0.0) {
                for (slot, &j) in idx.iter().enumerate() {
                    x[j] = z[slot];
                }
                break;
            }
            let mut alpha = 1.0f64;
            for (slot, &j) in idx.iter().enumerate() {
                if z[slot] <= 0.0 {
                    let denom = x[j] - z[slot];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    }
                }
            }
            for (slot, &j) in idx.iter().enumerate() {
                x[j] += alpha * (z[slot] - x[j]);
                if x[j] <= 1e-14 {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    x
}

/// Columns of the cone: the generators plus one disposal column per axis.
fn cone_columns(generators: &[Point], dim: usize) -> Vec<Vec<f64>> {
    let mut columns: Vec<Vec<f64>> = generators.iter().map(|g| g.0.clone()).collect();
    for axis in 0..dim {
        let mut e = vec![0.0; dim];
        e[axis] = -1.0;
        columns.push(e);
    }
    columns
}

/// Euclidean projection of `y` onto the cone; returns the point and the
/// residual distance.
pub fn cone_project(generators: &[Point], dim: usize, y: &[f64]) -> (Point, f64) {
    let columns = cone_columns(generators, dim);
    let x = nnls(&columns, y);
    let mut point = vec![0.0; dim];
    for (j, col) in columns.iter().enumerate() {
        for (pi, ci) in point.iter_mut().zip(col) {
            *pi += x[j] * ci;
        }
    }
    let residual = dist(&point, y);
    (Point(point), residual)
}

impl Economy {
    /// Validates dimensions and the cone condition: no nonnegative
    /// nonzero combination of generators survives disposal. The search
    /// sweeps a simplex grid of generator weights.
    pub fn new(consumers: Vec<Consumer>, generators: Vec<Point>) -> Result<Self, EquilibriumError> {
        let dimension = consumers
            .first()
            .map(|c| c.body.dimension())
            .ok_or_else(|| EquilibriumError::BadEconomy("need at least one consumer".into()))?;
        for c in &consumers {
            if c.body.dimension() != dimension || c.preference.dimension() != dimension {
                return Err(EquilibriumError::BadDimension(format!(
                    "consumer dimensions disagree with N = {dimension}"
                )));
            }
        }
        for g in &generators {
            if g.dim() != dimension {
                return Err(EquilibriumError::BadDimension(format!(
                    "generator {g:?} is not {dimension}-dimensional"
                )));
            }
        }
        if let Some(bad) = cone_positive_direction(&generators, dimension) {
            return Err(EquilibriumError::ConeViolation(bad));
        }
        Ok(Economy {
            consumers,
            generators,
            dimension,
        })
    }
}

/// Search the simplex of generator weights for a combination landing in
/// the nonnegative orthant with positive norm.
fn cone_positive_direction(generators: &[Point], dim: usize) -> Option<Vec<f64>> {
    if generators.is_empty() {
        return None;
    }
    let k = generators.len();
    const RESOLUTION: usize = 16;
    let mut weights = vec![0usize; k];
    fn sweep(
        generators: &[Point],
        dim: usize,
        weights: &mut Vec<usize>,
        slot: usize,
        remaining: usize,
    ) -> Option<Vec<f64>> {
        if slot + 1 == weights.len() {
            weights[slot] = remaining;
            let mut combo = vec![0.0; dim];
            for (w, g) in weights.iter().zip(generators) {
                for (ci, gi) in combo.iter_mut().zip(&g.0) {
                    *ci += *w as f64 * gi;
                }
            }
            let nrm = crate::geometry::norm(&combo);
            if nrm > 1e-9 && combo.iter().all(|&c| c >= -1e-9 * nrm) {
                return Some(combo.iter().map(|c| c / nrm).collect());
            }
            return None;
        }
        for w in 0..=remaining {
            weights[slot] = w;
            if let Some(bad) = sweep(generators, dim, weights, slot + 1, remaining - w) {
                return Some(bad);
            }
        }
        None
    }
    sweep(generators, dim, &mut weights, 0, RESOLUTION)
}

/// NNLS audit of the cone condition: the smallest residual of projecting
/// unit nonnegative probe directions onto the cone. A residual below
/// 1e-6 would witness a violation.
pub fn cone_condition_audit(econ: &Economy, probes_per_axis: usize) -> f64 {
    let dim = econ.dimension;
    let mut best = f64::INFINITY;
    let mut probe = |y: Vec<f64>| {
        let n = crate::geometry::norm(&y);
        if n < 1e-12 {
            return;
        }
        let unit: Vec<f64> = y.iter().map(|v| v / n).collect();
        let (_, residual) = cone_project(&econ.generators, dim, &unit);
        if residual < best {
            best = residual;
        }
    };
    for axis in 0..dim {
        let mut e = vec![0.0; dim];
        e[axis] = 1.0;
        probe(e);
    }
    // Simplex grid of nonnegative directions.
    let steps = probes_per_axis.max(1);
    let mut stack = vec![(vec![0usize; dim], 0usize, steps)];
    while let Some((mut w, slot, remaining)) = stack.pop() {
        if slot + 1 == dim {
            w[slot] = remaining;
            probe(w.iter().map(|&k| k as f64).collect());
            continue;
        }
        for v in 0..=remaining {
            let mut next = w.clone();
            next[slot] = v;
            stack.push((next, slot + 1, remaining - v));
        }
    }
    best
}

/// Prices, bundles, and aggregate production to be checked.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EquilibriumCandidate {
    pub prices: Vec<f64>,
    pub bundles: Vec<Point>,
    pub production: Point,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConsumerCheck {
    pub ok: bool,
    /// Distance from the candidate bundle to the demand oracle's bundle.
    pub deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EquilibriumReport {
    pub e1: Vec<ConsumerCheck>,
    pub e1_ok: bool,
    /// Strict zero-profit: p . g_j <= tol for every generator and
    /// |p . eta| <= tol.
    pub e2_strict: bool,
    /// Approximate condition: p . eta > -eps.
    pub ae: bool,
    pub e3_ok: bool,
    pub e3_deviation: f64,
    pub profit: f64,
    pub pass: bool,
}

/// Check E1, E2 (or AE), and E3 for a candidate at tolerance `tol`.
pub fn check_equilibrium(
    econ: &Economy,
    cand: &EquilibriumCandidate,
    eps: f64,
    tol: f64,
) -> EquilibriumReport {
    assert!(eps > 0.0, "eps must be positive");
    let p = &cand.prices;
    let mut e1 = Vec::with_capacity(econ.consumers.len());
    for (consumer, bundle) in econ.consumers.iter().zip(&cand.bundles) {
        let spec = BudgetSpec {
            prices: p.clone(),
            wealth: 0.0,
            ambient: consumer.body.clone(),
        };
        match demand(&consumer.preference, &spec, tol) {
            Ok(xi) => {
                let deviation = xi.distance(bundle);
                e1.push(ConsumerCheck {
                    ok: deviation <= 5.0 * tol,
                    deviation,
                    note: None,
                });
            }
            Err(err) => e1.push(ConsumerCheck {
                ok: false,
                deviation: f64::INFINITY,
                note: Some(err.to_string()),
            }),
        }
    }
    let e1_ok = e1.iter().all(|c| c.ok);
    let profit = dot(p, cand.production.coords());
    let generators_ok = econ
        .generators
        .iter()
        .all(|g| dot(p, g.coords()) <= tol);
    let e2_strict = generators_ok && profit.abs() <= tol;
    let ae = profit > -eps;
    let mut sum = vec![0.0; econ.dimension];
    for bundle in &cand.bundles {
        for (s, b) in sum.iter_mut().zip(bundle.coords()) {
            *s += b;
        }
    }
    let e3_deviation = dist(&sum, cand.production.coords());
    let e3_ok = e3_deviation <= 5.0 * tol;
    EquilibriumReport {
        e1_ok,
        e1,
        e2_strict,
        ae,
        e3_ok,
        e3_deviation,
        profit,
        pass: e1_ok && (e2_strict || ae) && e3_ok,
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PriceDiagnostic {
    pub prices: Vec<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchResult {
    pub candidate: Option<EquilibriumCandidate>,
    pub report: Option<EquilibriumReport>,
    pub scanned: usize,
    pub diagnostics: Vec<PriceDiagnostic>,
}

fn simplex_prices(dim: usize, resolution: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut weights = vec![0usize; dim];
    fn rec(
        dim: usize,
        slot: usize,
        remaining: usize,
        resolution: usize,
        weights: &mut Vec<usize>,
        out: &mut Vec<Vec<f64>>,
    ) {
        if slot + 1 == dim {
            weights[slot] = remaining;
            out.push(
                weights
                    .iter()
                    .map(|&k| k as f64 / resolution as f64)
                    .collect(),
            );
            return;
        }
        for w in 0..=remaining {
            weights[slot] = w;
            rec(dim, slot + 1, remaining - w, resolution, weights, out);
        }
    }
    rec(dim, 0, resolution, resolution, &mut weights, &mut out);
    out
}

/// Enumerate unit-simplex prices at resolution 2^-grid_depth, compute
/// zero-wealth demands, project the aggregate onto the production cone,
/// and return the best passing candidate.
///
/// Many prices pass under AE alone (any price whose demand the cone can
/// absorb has exactly zero profit), so passing candidates are ranked:
/// strict E2 first, then larger profit, then grid order. This keeps the
/// search pinned to the exact equilibrium ray when one exists on the grid.
pub fn search_equilibrium(
    econ: &Economy,
    eps: f64,
    grid_depth: u32,
    tol: f64,
) -> SearchResult {
    assert!(eps > 0.0 && grid_depth >= 1, "bad search parameters");
    let resolution = 1usize << grid_depth;
    let prices = simplex_prices(econ.dimension, resolution);
    let mut diagnostics = Vec::new();
    let mut best: Option<(EquilibriumCandidate, EquilibriumReport, usize)> = None;
    let mut scanned = 0usize;
    for (index, p) in prices.iter().enumerate() {
        scanned += 1;
        let mut bundles = Vec::with_capacity(econ.consumers.len());
        let mut failed: Option<DemandError> = None;
        for consumer in &econ.consumers {
            let spec = BudgetSpec {
                prices: p.clone(),
                wealth: 0.0,
                ambient: consumer.body.clone(),
            };
            match demand(&consumer.preference, &spec, tol) {
                Ok(xi) => bundles.push(xi),
                Err(err) => {
                    failed = Some(err);
                    break;
                }
            }
        }
        if let Some(err) = failed {
            diagnostics.push(PriceDiagnostic {
                prices: p.clone(),
                reason: err.to_string(),
            });
            continue;
        }
        let mut aggregate = vec![0.0; econ.dimension];
        for bundle in &bundles {
            for (s, b) in aggregate.iter_mut().zip(bundle.coords()) {
                *s += b;
            }
        }
        let (production, _residual) = cone_project(&econ.generators, econ.dimension, &aggregate);
        let cand = EquilibriumCandidate {
            prices: p.clone(),
            bundles,
            production,
        };
        let report = check_equilibrium(econ, &cand, eps, tol);
        if report.pass {
            let better = match &best {
                None => true,
                Some((_, current, cur_idx)) => {
                    (report.e2_strict, report.profit, std::cmp::Reverse(index))
                        > (current.e2_strict, current.profit, std::cmp::Reverse(*cur_idx))
                }
            };
            if better {
                best = Some((cand, report, index));
            }
        }
    }
    match best {
        Some((candidate, report, _)) => SearchResult {
            candidate: Some(candidate),
            report: Some(report),
            scanned,
            diagnostics,
        },
        None => SearchResult {
            candidate: None,
            report: None,
            scanned,
            diagnostics,
        },
    }
}

#[derive(serde::Deserialize)]
struct ConsumerJson {
    body: serde_json::Value,
    utility: String,
}

#[derive(serde::Deserialize)]
struct EconomyJson {
    consumers: Vec<ConsumerJson>,
    generators: Vec<Vec<f64>>,
}

impl Economy {
    /// Schema: `{ consumers: [{ body, utility }], generators: [[...]] }`
    /// with bodies in the geometry JSON schema and utilities as registry
    /// strings.
    pub fn from_json(text: &str) -> Result<Economy, EquilibriumError> {
        let parsed: EconomyJson = serde_json::from_str(text)
            .map_err(|e| EquilibriumError::BadEconomy(format!("bad economy JSON: {e}")))?;
        let mut consumers = Vec::with_capacity(parsed.consumers.len());
        for c in parsed.consumers {
            let body = ConvexBody::from_json(&c.body.to_string())
                .map_err(|e| EquilibriumError::BadEconomy(e.to_string()))?;
            let preference = crate::registry::parse_utility(&c.utility)
                .map_err(|e| EquilibriumError::BadEconomy(e.to_string()))?;
            consumers.push(Consumer { body, preference });
        }
        let generators = parsed.generators.into_iter().map(Point).collect();
        Economy::new(consumers, generators)
    }
}

/// The bundled labor economy: one consumer supplying labor (negative
/// first coordinate) and consuming output, with production turning one
/// unit of labor into one unit of goods.
pub fn labor_economy() -> Economy {
    let body = ConvexBody::cut_box(
        vec![
            crate::geometry::Interval { lo: -1.0, hi: 0.0 },
            crate::geometry::Interval { lo: 0.0, hi: 1.0 },
        ],
        None,
    )
    .unwrap();
    let pref = Preference::from_utility(2, |x: &Point| {
        ((1.0 + x.0[0]).max(0.0) * x.0[1].max(0.0)).sqrt()
    });
    Economy::new(
        vec![Consumer {
            body,
            preference: pref,
        }],
        vec![Point(vec![-1.0, 1.0])],
    )
    .unwrap()
}
