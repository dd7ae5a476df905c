//! Scenario schema and dispatch: every subcommand normalizes into a
//! `Scenario`, runs through `run`, and produces a JSON result envelope
//! plus optional CSV artifacts.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use prefmax::demand::{demand, verify_gamma_uniform_continuity, BudgetSpec, DemandError};
use prefmax::equilibrium::{search_equilibrium, Economy, EquilibriumError};
use prefmax::foundations::{
    bar_by_name, demonstrate_instability, find_uniform_bound, piecewise_counterexample,
    predicate_by_name, predicate_uniform_delta, CounterexampleParam, FoundationsError,
};
use prefmax::geometry::{hausdorff, ConvexBody, GeometryError, Point};
use prefmax::maximizer::{check_dominance, maximize_body, MaximizeError};
use prefmax::preference::{RotundityModulus, StrongConcavityData};
use prefmax::registry::parse_utility;

/// How a failed run maps to the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad inputs; no computation was performed. Exit 2.
    Validation,
    /// The computation hit a domain error (empty budget, convexity
    /// violation, cone violation). Exit 1.
    Domain,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub label: String,
    pub message: String,
}

impl CliError {
    pub fn validation(label: &str, message: impl ToString) -> Self {
        CliError {
            kind: ErrorKind::Validation,
            label: label.to_string(),
            message: message.to_string(),
        }
    }

    pub fn domain(label: &str, message: impl ToString) -> Self {
        CliError {
            kind: ErrorKind::Domain,
            label: label.to_string(),
            message: message.to_string(),
        }
    }
}

fn geometry_error(e: GeometryError) -> CliError {
    match &e {
        GeometryError::EmptyBody(_) => CliError::domain("EmptyBody", e),
        GeometryError::EmptySlice { .. } => CliError::domain("EmptySlice", e),
        _ => CliError::validation("BadGeometry", e),
    }
}

fn maximize_error(e: MaximizeError) -> CliError {
    match e {
        MaximizeError::NotStrictlyConvex { .. } => CliError::domain("NotStrictlyConvex", e),
        MaximizeError::Geometry(g) => geometry_error(g),
        _ => CliError::validation("BadMaximizeArgs", e),
    }
}

fn demand_error(e: DemandError) -> CliError {
    match e {
        DemandError::EmptyBudget(_) => CliError::domain("EmptyBudget", e),
        DemandError::Maximize(m) => maximize_error(m),
        DemandError::Geometry(g) => geometry_error(g),
        _ => CliError::validation("BadDemandArgs", e),
    }
}

fn equilibrium_error(e: EquilibriumError) -> CliError {
    match e {
        EquilibriumError::ConeViolation(_) => CliError::domain("ConeViolation", e),
        _ => CliError::validation("BadEconomy", e),
    }
}

fn foundations_error(e: FoundationsError) -> CliError {
    CliError::validation("BadFoundationsArgs", e)
}

/// A batch run: one command, its parameters, a seed for stochastic
/// commands, and an optional artifact directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub command: String,
    pub params: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(
        rename = "outputPath",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub output_path: Option<String>,
}

/// Result envelope; `timings` is excluded from determinism comparisons.
#[derive(Debug, Serialize)]
pub struct Envelope {
    pub command: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub result: Value,
    pub timings: Value,
}

/// Extra artifact files (CSV sweeps) keyed by file name.
pub type Artifacts = Vec<(String, String)>;

fn parse_params<T: for<'de> Deserialize<'de>>(command: &str, params: &Value) -> Result<T, CliError> {
    serde_json::from_value(params.clone())
        .map_err(|e| CliError::validation("BadParams", format!("{command}: {e}")))
}

fn body_from_value(v: &Value) -> Result<ConvexBody, CliError> {
    ConvexBody::from_json(&v.to_string()).map_err(geometry_error)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MaximizeParams {
    body: Value,
    utility: String,
    tol: f64,
    #[serde(rename = "checkDominance", default)]
    check_dominance: bool,
    #[serde(default)]
    samples: Option<usize>,
    #[serde(rename = "dominanceEps", default)]
    dominance_eps: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DemandParams {
    utility: String,
    ambient: Value,
    p: Vec<f64>,
    w: f64,
    tol: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyGammaParams {
    eps: f64,
    trials: u32,
    tol: f64,
    #[serde(default)]
    peak: Option<Vec<f64>>,
    #[serde(default)]
    radius: Option<f64>,
    #[serde(default)]
    alpha: Option<f64>,
    #[serde(default)]
    lipschitz: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EquilibriumParams {
    economy: Value,
    eps: f64,
    #[serde(rename = "gridDepth")]
    grid_depth: u32,
    tol: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CounterexampleParams {
    sweep: String,
    tol: f64,
    #[serde(rename = "piecewiseX", default)]
    piecewise_x: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FanParams {
    bar: String,
    limit: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PredicateParams {
    name: String,
    eps: f64,
    grid: f64,
    #[serde(rename = "deltaGrid", default)]
    delta_grid: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HausdorffParams {
    a: Value,
    b: Value,
    eps: f64,
}

fn run_maximize(params: &Value, seed: Option<u64>) -> Result<(Value, Artifacts), CliError> {
    let p: MaximizeParams = parse_params("maximize", params)?;
    let body = body_from_value(&p.body)?;
    let pref = parse_utility(&p.utility).map_err(|e| CliError::validation("BadUtility", e))?;
    let mut result = maximize_body(&pref, &body, p.tol).map_err(maximize_error)?;
    let mut dominance = None;
    if p.check_dominance {
        let seed = seed.ok_or_else(|| {
            CliError::validation("MissingSeed", "dominance checking is stochastic; pass a seed")
        })?;
        let samples = p.samples.unwrap_or(1000);
        let eps = p.dominance_eps.unwrap_or(1e-2);
        if samples == 0 || eps.is_nan() || eps <= 0.0 {
            return Err(CliError::validation(
                "BadParams",
                "dominance needs samples >= 1 and a positive eps",
            ));
        }
        let report = check_dominance(&pref, &body, &result.xi, samples, eps, seed);
        result.dominance_checked = true;
        dominance = Some(json!({
            "drawn": report.drawn,
            "passes": report.passes,
            "failures": report.failures,
            "worst": report.worst.as_ref().map(|(pt, d)| json!({
                "point": pt.coords(),
                "distance": d,
            })),
        }));
    }
    let mut value = json!({
        "xi": result.xi.coords(),
        "bracketWidth": result.bracket_width,
        "comparisons": result.comparisons,
        "dominanceChecked": result.dominance_checked,
    });
    if let Some(d) = dominance {
        value["dominance"] = d;
    }
    Ok((value, Vec::new()))
}

fn run_demand(params: &Value) -> Result<(Value, Artifacts), CliError> {
    let p: DemandParams = parse_params("demand", params)?;
    let ambient = body_from_value(&p.ambient)?;
    let pref = parse_utility(&p.utility).map_err(|e| CliError::validation("BadUtility", e))?;
    let spec = BudgetSpec {
        prices: p.p,
        wealth: p.w,
        ambient,
    };
    let xi = demand(&pref, &spec, p.tol).map_err(demand_error)?;
    Ok((json!({ "xi": xi.coords() }), Vec::new()))
}

fn run_verify_gamma(
    params: &Value,
    seed: Option<u64>,
    workers: usize,
) -> Result<(Value, Artifacts), CliError> {
    let p: VerifyGammaParams = parse_params("verify-gamma", params)?;
    let seed = seed.ok_or_else(|| {
        CliError::validation("MissingSeed", "verify-gamma is stochastic; pass a seed")
    })?;
    let peak = p.peak.unwrap_or_else(|| vec![0.3, 0.0]);
    let radius = p.radius.unwrap_or(1.0);
    let alpha = p.alpha.unwrap_or(2.0);
    let lipschitz = p.lipschitz.unwrap_or(2.6);
    if peak.len() != 2 {
        return Err(CliError::validation(
            "BadParams",
            "verify-gamma currently runs over a 2-D ball ambient",
        ));
    }
    if ![radius, alpha, lipschitz, p.tol]
        .iter()
        .all(|v| v.is_finite() && *v > 0.0)
    {
        return Err(CliError::validation(
            "BadParams",
            "radius, alpha, lipschitz, and tol must be positive",
        ));
    }
    let pk = peak.clone();
    let pref = prefmax::preference::Preference::from_utility(2, move |x: &Point| {
        -x.coords()
            .iter()
            .zip(&pk)
            .map(|(xi, ci)| (xi - ci) * (xi - ci))
            .sum::<f64>()
    })
    .with_rotundity(RotundityModulus::from_strong_concavity(StrongConcavityData {
        alpha,
        lipschitz,
    }));
    let ambient = ConvexBody::cut_ball(Point(vec![0.0, 0.0]), radius, None)
        .map_err(geometry_error)?;
    let (report, records) =
        verify_gamma_uniform_continuity(&pref, &ambient, p.eps, p.trials, p.tol, seed, workers)
            .map_err(demand_error)?;
    let mut csv = String::from("trial,rho_h,argmax_distance\n");
    for r in &records {
        match r.argmax_distance {
            Some(d) => csv.push_str(&format!("{},{},{}\n", r.index, r.set_distance, d)),
            None => csv.push_str(&format!("{},{},\n", r.index, r.set_distance)),
        }
    }
    let value = serde_json::to_value(&report)
        .map_err(|e| CliError::validation("Serialize", e))?;
    Ok((value, vec![("trials.csv".to_string(), csv)]))
}

fn run_equilibrium(params: &Value) -> Result<(Value, Artifacts), CliError> {
    let p: EquilibriumParams = parse_params("equilibrium", params)?;
    if p.eps.is_nan() || p.eps <= 0.0 || p.tol.is_nan() || p.tol <= 0.0 {
        return Err(CliError::validation(
            "BadParams",
            "eps and tol must be positive",
        ));
    }
    if !(1..=12).contains(&p.grid_depth) {
        return Err(CliError::validation(
            "BadParams",
            "gridDepth must be in 1..=12",
        ));
    }
    let econ = Economy::from_json(&p.economy.to_string()).map_err(equilibrium_error)?;
    let result = search_equilibrium(&econ, p.eps, p.grid_depth, p.tol);
    let value = serde_json::to_value(&result)
        .map_err(|e| CliError::validation("Serialize", e))?;
    Ok((value, Vec::new()))
}

fn parse_sweep(spec: &str) -> Result<Vec<f64>, CliError> {
    // "1e-1:1e-12" sweeps decades from the first to the second value.
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 2 {
        return Err(CliError::validation(
            "BadParams",
            format!("sweep must look like 1e-1:1e-12, got {spec:?}"),
        ));
    }
    let hi: f64 = parts[0]
        .parse()
        .map_err(|e| CliError::validation("BadParams", format!("sweep start: {e}")))?;
    let lo: f64 = parts[1]
        .parse()
        .map_err(|e| CliError::validation("BadParams", format!("sweep end: {e}")))?;
    if !(lo > 0.0 && hi > lo) {
        return Err(CliError::validation(
            "BadParams",
            "sweep must run from a larger to a smaller positive value",
        ));
    }
    let mut out = Vec::new();
    let mut v = hi;
    while v >= lo * 0.999 {
        out.push(v);
        v /= 10.0;
    }
    Ok(out)
}

fn run_counterexample(params: &Value) -> Result<(Value, Artifacts), CliError> {
    let p: CounterexampleParams = parse_params("counterexample", params)?;
    let sweep = parse_sweep(&p.sweep)?;
    let mut rows = Vec::new();
    let mut csv = String::from("delta_x,argmax_plus,argmax_minus,jump\n");
    for dx in sweep {
        let rep = demonstrate_instability(dx, p.tol).map_err(foundations_error)?;
        csv.push_str(&format!(
            "{},{},{},{}\n",
            rep.delta_x, rep.argmax_plus, rep.argmax_minus, rep.jump
        ));
        rows.push(serde_json::to_value(&rep).map_err(|e| CliError::validation("Serialize", e))?);
    }
    let mut value = json!({ "rows": rows });
    if let Some(x) = p.piecewise_x {
        let param = CounterexampleParam::new(x).map_err(foundations_error)?;
        let literal = piecewise_counterexample(param);
        let table: Vec<Value> = (0..=20)
            .map(|k| {
                let t = k as f64 / 20.0;
                json!({ "t": t, "f": literal(t) })
            })
            .collect();
        value["piecewise"] = json!({ "x": x, "values": table });
    }
    Ok((value, vec![("sweep.csv".to_string(), csv)]))
}

fn run_fan(params: &Value) -> Result<(Value, Artifacts), CliError> {
    let p: FanParams = parse_params("fan", params)?;
    let bar = bar_by_name(&p.bar)
        .ok_or_else(|| CliError::validation("UnknownBar", format!("no bar named {:?}", p.bar)))?;
    if !(1..=30).contains(&p.limit) {
        return Err(CliError::validation("BadParams", "limit must be in 1..=30"));
    }
    let outcome = find_uniform_bound(&bar, p.limit);
    let value =
        serde_json::to_value(outcome).map_err(|e| CliError::validation("Serialize", e))?;
    Ok((json!({ "outcome": value }), Vec::new()))
}

fn run_predicate(params: &Value) -> Result<(Value, Artifacts), CliError> {
    let p: PredicateParams = parse_params("predicate", params)?;
    let pred = predicate_by_name(&p.name).ok_or_else(|| {
        CliError::validation("UnknownPredicate", format!("no predicate named {:?}", p.name))
    })?;
    if !(p.eps > 0.0 && p.grid > 0.0) {
        return Err(CliError::validation(
            "BadParams",
            "eps and grid must be positive",
        ));
    }
    let deltas = p
        .delta_grid
        .unwrap_or_else(|| (1..=50).map(|k| k as f64 * 2e-3).collect());
    let found = predicate_uniform_delta(&pred, p.eps, p.grid, &deltas);
    Ok((json!({ "delta": found }), Vec::new()))
}

fn run_hausdorff(params: &Value) -> Result<(Value, Artifacts), CliError> {
    let p: HausdorffParams = parse_params("hausdorff", params)?;
    if p.eps.is_nan() || p.eps <= 0.0 {
        return Err(CliError::validation("BadParams", "eps must be positive"));
    }
    let a = body_from_value(&p.a)?;
    let b = body_from_value(&p.b)?;
    if a.dimension() != b.dimension() {
        return Err(CliError::validation(
            "BadParams",
            "bodies must share a dimension",
        ));
    }
    let net_a = a.eps_net(p.eps);
    let net_b = b.eps_net(p.eps);
    let d = hausdorff(&net_a, &net_b);
    Ok((json!({
        "distance": d,
        "netSlack": 2.0 * p.eps,
        "pointsA": net_a.points.len(),
        "pointsB": net_b.points.len(),
    }), Vec::new()))
}

/// Dispatch a scenario. Returns the envelope and artifact files.
pub fn run(scenario: &Scenario, workers: usize) -> Result<(Envelope, Artifacts), CliError> {
    let started = std::time::Instant::now();
    let (result, artifacts) = match scenario.command.as_str() {
        "maximize" => run_maximize(&scenario.params, scenario.seed)?,
        "demand" => run_demand(&scenario.params)?,
        "verify-gamma" => run_verify_gamma(&scenario.params, scenario.seed, workers)?,
        "equilibrium" => run_equilibrium(&scenario.params)?,
        "counterexample" => run_counterexample(&scenario.params)?,
        "fan" => run_fan(&scenario.params)?,
        "predicate" => run_predicate(&scenario.params)?,
        "hausdorff" => run_hausdorff(&scenario.params)?,
        other => {
            return Err(CliError::validation(
                "UnknownCommand",
                format!("unknown command {other:?}"),
            ))
        }
    };
    Ok((
        Envelope {
            command: scenario.command.clone(),
            params: scenario.params.clone(),
            seed: scenario.seed,
            result,
            timings: json!({ "totalMs": started.elapsed().as_secs_f64() * 1e3 }),
        },
        artifacts,
    ))
}

/// Error envelope, same shape as the success one with `error` in place
/// of `result`.
pub fn error_envelope(scenario: &Scenario, err: &CliError) -> Value {
    json!({
        "command": scenario.command,
        "params": scenario.params,
        "seed": scenario.seed,
        "error": { "kind": err.label, "message": err.message },
    })
}
