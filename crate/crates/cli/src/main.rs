//! Batch front-end: subcommands or a scenario file in, a JSON result
//! envelope on stdout (plus CSV artifacts under --out) and exit code
//! 0 / 1 (domain error) / 2 (validation error).

mod scenario;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use scenario::{error_envelope, run, CliError, ErrorKind, Scenario};

#[derive(Parser)]
#[command(name = "prefmax", version, about = "Preference maximization toolkit")]
struct Cli {
    /// Directory for result.json and CSV artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweep commands; output is seed-deterministic
    /// regardless of the count.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Seed for stochastic commands; overrides a scenario's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file: { command, params, seed, outputPath }.
    Run(RunArgs),
    /// Maximize a utility over a convex body.
    Maximize(MaximizeArgs),
    /// Demand at prices p and wealth w over an ambient consumption set.
    Demand(DemandArgs),
    /// Empirical uniform-continuity sweep for the argmax map.
    VerifyGamma(VerifyGammaArgs),
    /// Approximate-equilibrium grid search over an economy file.
    Equilibrium(EquilibriumArgs),
    /// Argmax instability sweep for the merely convex family.
    Counterexample(CounterexampleArgs),
    /// Finite-depth uniform-bound search for a named bar.
    Fan(FanArgs),
    /// Uniform delta search for a named continuous predicate.
    Predicate(PredicateArgs),
    /// Net-based Hausdorff distance between two bodies.
    Hausdorff(HausdorffArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
}

#[derive(Args)]
struct MaximizeArgs {
    /// Body JSON file.
    #[arg(long)]
    body: PathBuf,
    /// Utility spec, e.g. "cobb-douglas(0.5,0.5)".
    #[arg(long)]
    utility: String,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Audit the result against random members (requires --seed).
    #[arg(long, default_value_t = false)]
    check_dominance: bool,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    dominance_eps: Option<f64>,
}

#[derive(Args)]
struct DemandArgs {
    #[arg(long)]
    utility: String,
    /// Ambient body JSON file.
    #[arg(long)]
    ambient: PathBuf,
    /// Prices, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    p: String,
    #[arg(long, allow_negative_numbers = true)]
    w: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct VerifyGammaArgs {
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 500)]
    trials: u32,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Peak of the certified quadratic utility, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    peak: Option<String>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    lipschitz: Option<f64>,
}

#[derive(Args)]
struct EquilibriumArgs {
    /// Economy JSON file.
    #[arg(long)]
    economy: PathBuf,
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,
    #[arg(long, default_value_t = 7)]
    grid_depth: u32,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
}

#[derive(Args)]
struct CounterexampleArgs {
    /// Decade sweep "1e-1:1e-12".
    #[arg(long, default_value = "1e-1:1e-12")]
    sweep: String,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Also tabulate the piecewise variant at this parameter.
    #[arg(long, allow_negative_numbers = true)]
    piecewise_x: Option<f64>,
}

#[derive(Args)]
struct FanArgs {
    /// One of: depth3, contains-one, split.
    #[arg(long)]
    bar: String,
    #[arg(long, default_value_t = 20)]
    limit: u32,
}

#[derive(Args)]
struct PredicateArgs {
    /// One of: lipschitz-sq, always, fails-at-zero.
    #[arg(long)]
    name: String,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.01)]
    grid: f64,
    /// Candidate deltas, comma-separated; defaults to 0.002..0.1.
    #[arg(long)]
    delta_grid: Option<String>,
}

#[derive(Args)]
struct HausdorffArgs {
    /// First body JSON file.
    #[arg(long)]
    a: PathBuf,
    /// Second body JSON file.
    #[arg(long)]
    b: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
}

fn read_json_file(path: &PathBuf, what: &str) -> Result<Value, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation("ReadFile", format!("{what} {path:?}: {e}")))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::validation("BadJson", format!("{what} {path:?}: {e}")))
}

fn parse_numbers(spec: &str, what: &str) -> Result<Vec<f64>, CliError> {
    spec.split(',')
        .map(|tok| tok.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::validation("BadParams", format!("{what}: {e}")))
}

fn build_scenario(command: Command, seed: Option<u64>) -> Result<Scenario, CliError> {
    match command {
        Command::Run(args) => {
            let text = fs::read_to_string(&args.scenario).map_err(|e| {
                CliError::validation("ReadFile", format!("scenario {:?}: {e}", args.scenario))
            })?;
            let mut scenario: Scenario = serde_json::from_str(&text)
                .map_err(|e| CliError::validation("BadJson", format!("scenario: {e}")))?;
            if seed.is_some() {
                scenario.seed = seed;
            }
            Ok(scenario)
        }
        Command::Maximize(args) => {
            let body = read_json_file(&args.body, "body")?;
            let mut params = json!({
                "body": body,
                "utility": args.utility,
                "tol": args.tol,
                "checkDominance": args.check_dominance,
            });
            if let Some(s) = args.samples {
                params["samples"] = json!(s);
            }
            if let Some(e) = args.dominance_eps {
                params["dominanceEps"] = json!(e);
            }
            Ok(Scenario {
                command: "maximize".into(),
                params,
                seed,
                output_path: None,
            })
        }
        Command::Demand(args) => {
            let ambient = read_json_file(&args.ambient, "ambient body")?;
            let prices = parse_numbers(&args.p, "prices")?;
            Ok(Scenario {
                command: "demand".into(),
                params: json!({
                    "utility": args.utility,
                    "ambient": ambient,
                    "p": prices,
                    "w": args.w,
                    "tol": args.tol,
                }),
                seed: None,
                output_path: None,
            })
        }
        Command::VerifyGamma(args) => {
            let mut params = json!({
                "eps": args.eps,
                "trials": args.trials,
                "tol": args.tol,
            });
            if let Some(peak) = &args.peak {
                params["peak"] = json!(parse_numbers(peak, "peak")?);
            }
            if let Some(r) = args.radius {
                params["radius"] = json!(r);
            }
            if let Some(a) = args.alpha {
                params["alpha"] = json!(a);
            }
            if let Some(l) = args.lipschitz {
                params["lipschitz"] = json!(l);
            }
            Ok(Scenario {
                command: "verify-gamma".into(),
                params,
                seed,
                output_path: None,
            })
        }
        Command::Equilibrium(args) => {
            let economy = read_json_file(&args.economy, "economy")?;
            Ok(Scenario {
                command: "equilibrium".into(),
                params: json!({
                    "economy": economy,
                    "eps": args.eps,
                    "gridDepth": args.grid_depth,
                    "tol": args.tol,
                }),
                seed: None,
                output_path: None,
            })
        }
        Command::Counterexample(args) => {
            let mut params = json!({ "sweep": args.sweep, "tol": args.tol });
            if let Some(x) = args.piecewise_x {
                params["piecewiseX"] = json!(x);
            }
            Ok(Scenario {
                command: "counterexample".into(),
                params,
                seed: None,
                output_path: None,
            })
        }
        Command::Fan(args) => Ok(Scenario {
            command: "fan".into(),
            params: json!({ "bar": args.bar, "limit": args.limit }),
            seed: None,
            output_path: None,
        }),
        Command::Predicate(args) => {
            let mut params = json!({
                "name": args.name,
                "eps": args.eps,
                "grid": args.grid,
            });
            if let Some(dg) = &args.delta_grid {
                params["deltaGrid"] = json!(parse_numbers(dg, "delta grid")?);
            }
            Ok(Scenario {
                command: "predicate".into(),
                params,
                seed: None,
                output_path: None,
            })
        }
        Command::Hausdorff(args) => {
            let a = read_json_file(&args.a, "body a")?;
            let b = read_json_file(&args.b, "body b")?;
            Ok(Scenario {
                command: "hausdorff".into(),
                params: json!({ "a": a, "b": b, "eps": args.eps }),
                seed: None,
                output_path: None,
            })
        }
    }
}

fn write_artifacts(
    dir: &PathBuf,
    envelope_json: &str,
    artifacts: &[(String, String)],
) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::validation("WriteArtifacts", format!("{dir:?}: {e}")))?;
    let mut result_path = dir.clone();
    result_path.push("result.json");
    fs::write(&result_path, envelope_json)
        .map_err(|e| CliError::validation("WriteArtifacts", format!("{result_path:?}: {e}")))?;
    for (name, contents) in artifacts {
        let mut path = dir.clone();
        path.push(name);
        fs::write(&path, contents)
            .map_err(|e| CliError::validation("WriteArtifacts", format!("{path:?}: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_flag = cli.out.clone();
    let workers = cli.workers.max(1);

    let scenario = match build_scenario(cli.command, cli.seed) {
        Ok(s) => s,
        Err(err) => {
            let envelope = json!({
                "error": { "kind": err.label, "message": err.message },
            });
            println!("{envelope}");
            return ExitCode::from(2);
        }
    };

    let out_dir = out_flag.or_else(|| scenario.output_path.clone().map(PathBuf::from));

    match run(&scenario, workers) {
        Ok((envelope, artifacts)) => {
            let text = serde_json::to_string_pretty(&envelope).expect("envelope serializes");
            println!("{text}");
            if let Some(dir) = out_dir {
                if let Err(err) = write_artifacts(&dir, &text, &artifacts) {
                    eprintln!("failed to write artifacts: {}", err.message);
                    return ExitCode::from(2);
                }
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            let envelope = error_envelope(&scenario, &err);
            let text = serde_json::to_string_pretty(&envelope).expect("envelope serializes");
            println!("{text}");
            match err.kind {
                ErrorKind::Domain => ExitCode::from(1),
                ErrorKind::Validation => ExitCode::from(2),
            }
        }
    }
}
