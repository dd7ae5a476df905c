//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measured runtime. Timing budgets are asserted in release
//! builds; debug builds run the same workloads without the clock gate.

use std::time::Instant;

use prefmax::demand::{budget_body, demand, verify_gamma_uniform_continuity, BudgetSpec};
use prefmax::equilibrium::{check_equilibrium, labor_economy, search_equilibrium};
use prefmax::foundations::{
    bar_by_name, cantor_encode_exact, demonstrate_instability, find_uniform_bound,
    predicate_by_name, predicate_uniform_delta, BarSearchOutcome, BinaryWord,
};
use prefmax::geometry::{hausdorff, ConvexBody, EpsNet, Interval, Point};
use prefmax::maximizer::{
    check_dominance, maximize_body, maximize_interval, quarter_decision, Bracket,
};
use prefmax::preference::{Preference, RotundityModulus, StrongConcavityData};
use prefmax::rng::trial_rng;
use rand::Rng;

fn report(criterion: u32, name: &str, started: Instant, budget_s: Option<f64>) {
    let elapsed = started.elapsed().as_secs_f64();
    println!("criterion {criterion} ({name}): PASS in {elapsed:.2}s");
    if let Some(budget) = budget_s {
        if !cfg!(debug_assertions) {
            assert!(
                elapsed < budget,
                "criterion {criterion} exceeded its {budget}s budget: {elapsed:.2}s"
            );
        }
    }
}

fn grid_argmax(u: impl Fn(f64) -> f64, iv: Interval, spacing: f64) -> f64 {
    let n = (iv.width() / spacing).ceil() as usize;
    let mut best_t = iv.lo;
    let mut best_u = u(iv.lo);
    for k in 1..=n {
        let t = (iv.lo + k as f64 * spacing).min(iv.hi);
        let v = u(t);
        if v > best_u {
            best_u = v;
            best_t = t;
        }
    }
    best_t
}

#[test]
fn criterion_01_one_dimensional_maximizer_vs_brute_force() {
    let started = Instant::now();
    let tol = 1e-6;
    let mut rng = trial_rng(0xACCE01, 0);
    for case in 0..50 {
        let scale: f64 = rng.random_range(0.5..3.0);
        let lo: f64 = rng.random_range(-2.0..2.0);
        let len: f64 = rng.random_range(0.3..0.6);
        let iv = Interval { lo, hi: lo + len };
        // Peak anywhere in or near the interval keeps the family strict
        // quasi-concave on it.
        let peak: f64 = rng.random_range(lo - 0.2..lo + len + 0.2);
        let u = move |t: f64| -scale * (t - peak) * (t - peak);
        let res = maximize_interval(|a, b| u(a) > u(b), iv, tol).unwrap();
        let oracle = grid_argmax(u, iv, tol / 10.0);
        assert!(
            (res.xi.0[0] - oracle).abs() <= 2.0 * tol,
            "case {case}: xi {} vs grid {oracle}",
            res.xi.0[0]
        );
    }
    report(1, "1-D maximizer vs brute force", started, Some(5.0));
}

#[test]
fn criterion_02_bracket_width_law() {
    let started = Instant::now();
    let setups = [(0.0, 1.0, 0.37), (-1.5, 2.0, 0.9), (0.25, 0.75, 0.3)];
    for (lo, hi, peak) in setups {
        let u = move |t: f64| -(t - peak) * (t - peak);
        let mut cmp = |a: f64, b: f64| u(a) > u(b);
        let mut bracket = Bracket::from_interval(Interval { lo, hi });
        let w0 = bracket.width;
        let mut reconstructed = w0;
        for step in 1..=40 {
            let iv = Interval {
                lo: bracket.lo,
                hi: bracket.hi(),
            };
            let d = quarter_decision(&mut cmp, iv).unwrap();
            bracket.apply(d);
            reconstructed *= 0.75;
            assert_eq!(
                bracket.width, reconstructed,
                "width after {step} steps from {w0} is not the exact (3/4)^k fold"
            );
        }
    }
    report(2, "bracket width law (3/4)^k", started, None);
}

#[test]
fn criterion_03_demand_vs_kkt_oracle() {
    let started = Instant::now();
    let tol = 1e-4;
    let mut rng = trial_rng(0xACCE03, 0);
    let run_cases = |n: usize, count: usize, rng: &mut rand_chacha::ChaCha8Rng| {
        for case in 0..count {
            let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..0.8)).collect();
            let total: f64 = raw.iter().sum();
            let a: Vec<f64> = raw.iter().map(|v| v / total).collect();
            let p: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
            let w: f64 = rng.random_range(0.5..2.0);
            let analytic: Vec<f64> = a.iter().zip(&p).map(|(ai, pi)| ai * w / pi).collect();
            let side = 2.0 * analytic.iter().fold(0.0f64, |m, v| m.max(*v));
            let pref = {
                let a = a.clone();
                Preference::from_utility(n, move |x: &Point| {
                    x.coords()
                        .iter()
                        .zip(&a)
                        .map(|(xi, ai)| xi.max(0.0).powf(*ai))
                        .product()
                })
            };
            let spec = BudgetSpec {
                prices: p.clone(),
                wealth: w,
                ambient: ConvexBody::cut_box(
                    vec![Interval { lo: 0.0, hi: side }; n],
                    None,
                )
                .unwrap(),
            };
            let xi = demand(&pref, &spec, tol).unwrap();
            let err: f64 = xi
                .coords()
                .iter()
                .zip(&analytic)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            assert!(
                err <= 5.0 * tol,
                "n={n} case {case}: |F - analytic| = {err} (xi {xi:?}, want {analytic:?})"
            );
        }
    };
    run_cases(2, 100, &mut rng);
    run_cases(3, 20, &mut rng);
    report(3, "n-D demand vs KKT oracle", started, Some(60.0));
}

#[test]
fn criterion_04_dominance_of_located_maxima() {
    let started = Instant::now();
    let tol = 1e-4;
    let box2 = |side: f64| {
        ConvexBody::cut_box(vec![Interval { lo: 0.0, hi: side }; 2], None).unwrap()
    };
    let cases: Vec<(Preference, BudgetSpec)> = vec![
        (
            Preference::from_utility(2, |x: &Point| (x.0[0].max(0.0) * x.0[1].max(0.0)).sqrt()),
            BudgetSpec {
                prices: vec![1.0, 1.0],
                wealth: 1.0,
                ambient: box2(1.0),
            },
        ),
        (
            Preference::from_utility(2, |x: &Point| {
                x.0[0].max(0.0).powf(0.75) * x.0[1].max(0.0).powf(0.25)
            }),
            BudgetSpec {
                prices: vec![1.0, 2.0],
                wealth: 4.0,
                ambient: box2(4.0),
            },
        ),
        (
            Preference::from_utility(2, |x: &Point| {
                -(x.0[0] - 0.25) * (x.0[0] - 0.25) - (x.0[1] - 0.25) * (x.0[1] - 0.25)
            }),
            BudgetSpec {
                prices: vec![1.0, 1.0],
                wealth: 1.0,
                ambient: box2(1.0),
            },
        ),
        (
            Preference::from_utility(2, |x: &Point| {
                -(x.0[0] - 2.0) * (x.0[0] - 2.0) - (x.0[1] - 2.0) * (x.0[1] - 2.0)
            }),
            BudgetSpec {
                prices: vec![1.0, 1.0],
                wealth: 2.0,
                ambient: box2(2.0),
            },
        ),
        (
            prefmax::registry::parse_utility("shifted-cobb-douglas(0.5,0.5,1,0)").unwrap(),
            BudgetSpec {
                prices: vec![0.5, 0.5],
                wealth: 0.0,
                ambient: ConvexBody::cut_box(
                    vec![
                        Interval { lo: -1.0, hi: 0.0 },
                        Interval { lo: 0.0, hi: 1.0 },
                    ],
                    None,
                )
                .unwrap(),
            },
        ),
    ];
    for (idx, (pref, spec)) in cases.iter().enumerate() {
        let body = budget_body(spec).unwrap();
        let xi = maximize_body(pref, &body, tol).unwrap().xi;
        let rep = check_dominance(pref, &body, &xi, 1000, 1e-2, 0xD04 + idx as u64);
        assert_eq!(
            rep.failures, 0,
            "utility {idx}: {} dominance failures, worst {:?}",
            rep.failures, rep.worst
        );
    }
    report(4, "dominance of located maxima", started, None);
}

#[test]
fn criterion_05_demand_homogeneity_degree_zero() {
    let started = Instant::now();
    let tol = 1e-4;
    let mut rng = trial_rng(0xACCE05, 0);
    for case in 0..50 {
        let raw: [f64; 2] = [rng.random_range(0.2..0.8), rng.random_range(0.2..0.8)];
        let total = raw[0] + raw[1];
        let a = [raw[0] / total, raw[1] / total];
        let p = vec![rng.random_range(0.5..2.0), rng.random_range(0.5..2.0)];
        let w: f64 = rng.random_range(0.5..2.0);
        let side = 2.0 * (a[0] * w / p[0]).max(a[1] * w / p[1]);
        let ambient = ConvexBody::cut_box(vec![Interval { lo: 0.0, hi: side }; 2], None).unwrap();
        let pref = Preference::from_utility(2, move |x: &Point| {
            x.0[0].max(0.0).powf(a[0]) * x.0[1].max(0.0).powf(a[1])
        });
        let base = demand(
            &pref,
            &BudgetSpec {
                prices: p.clone(),
                wealth: w,
                ambient: ambient.clone(),
            },
            tol,
        )
        .unwrap();
        for lambda in [0.5, 2.0, 10.0] {
            let scaled = demand(
                &pref,
                &BudgetSpec {
                    prices: p.iter().map(|pi| lambda * pi).collect(),
                    wealth: lambda * w,
                    ambient: ambient.clone(),
                },
                tol,
            )
            .unwrap();
            assert!(
                base.distance(&scaled) <= 2.0 * tol,
                "case {case}, lambda {lambda}: {base:?} vs {scaled:?}"
            );
        }
    }
    report(5, "demand homogeneity of degree zero", started, None);
}

#[test]
fn criterion_06_gamma_uniform_continuity() {
    let started = Instant::now();
    let tol = 1e-4;
    let pref = Preference::from_utility(2, |x: &Point| {
        -((x.0[0] - 0.3) * (x.0[0] - 0.3) + x.0[1] * x.0[1])
    })
    .with_rotundity(RotundityModulus::from_strong_concavity(StrongConcavityData {
        alpha: 2.0,
        lipschitz: 2.6,
    }));
    let ambient = ConvexBody::cut_ball(Point(vec![0.0, 0.0]), 1.0, None).unwrap();
    // Generate until at least 500 pairs survive the rho_H < delta filter.
    let (rep, _records) =
        verify_gamma_uniform_continuity(&pref, &ambient, 0.1, 1500, tol, 42, 1).unwrap();
    assert!(
        rep.trials >= 500,
        "only {} pairs survived the Hausdorff filter",
        rep.trials
    );
    assert_eq!(
        rep.failures, 0,
        "{} of {} pairs moved farther than eps + 2 tol; worst {:?}",
        rep.failures, rep.trials, rep.worst_pair
    );
    report(6, "gamma uniform continuity", started, Some(120.0));
}

#[test]
fn criterion_07_counterexample_dichotomy() {
    let started = Instant::now();
    for exp in 1..=12 {
        let dx = 10f64.powi(-exp);
        let rep = demonstrate_instability(dx, 1e-6).unwrap();
        assert_eq!(rep.argmax_plus, 0.0, "argmax(f_+{dx}) must be exactly 0");
        assert_eq!(rep.argmax_minus, 1.0, "argmax(f_-{dx}) must be exactly 1");
        assert_eq!(rep.jump, 1.0, "jump must be exactly 1");
    }
    report(7, "counterexample dichotomy", started, None);
}

#[test]
fn criterion_08_labor_economy_equilibrium_search() {
    let started = Instant::now();
    let econ = labor_economy();
    let result = search_equilibrium(&econ, 1e-2, 7, 1e-4);
    let cand = result.candidate.expect("no passing candidate found");
    let rep = result.report.unwrap();
    assert!(rep.pass);
    let cell = 1.0 / 128.0;
    assert!(
        (cand.prices[0] - 0.5).abs() <= cell && (cand.prices[1] - 0.5).abs() <= cell,
        "prices {:?} more than one grid cell from the analytic ray",
        cand.prices
    );
    // The checker must agree with the searcher's own verdict.
    let recheck = check_equilibrium(&econ, &cand, 1e-2, 1e-4);
    assert!(recheck.pass);
    report(8, "labor economy equilibrium search", started, Some(30.0));
}

#[test]
fn criterion_09_fan_machinery() {
    let started = Instant::now();
    assert_eq!(
        find_uniform_bound(&bar_by_name("depth3").unwrap(), 20),
        BarSearchOutcome::UniformAt(3)
    );
    assert_eq!(
        find_uniform_bound(&bar_by_name("contains-one").unwrap(), 20),
        BarSearchOutcome::NotBarWithin(20)
    );
    // Depth-10 encoding intervals cover [0,1] exactly, checked in
    // integer arithmetic over the common denominator 3^10.
    let depth = 10u32;
    let mut intervals = Vec::new();
    for code in 0..(1u32 << depth) {
        let bits: Vec<u8> = (0..depth).map(|i| ((code >> i) & 1) as u8).collect();
        let iv = cantor_encode_exact(&BinaryWord(bits));
        intervals.push((iv.lo_num, iv.hi_num()));
    }
    intervals.sort_unstable();
    let den = 3i64.pow(depth);
    let mut covered = 0i64;
    for (lo, hi) in intervals {
        assert!(lo <= covered, "coverage gap before {lo}/{den}");
        covered = covered.max(hi);
    }
    assert!(covered >= den);
    // Lipschitz-square predicate: uniform delta within one grid step of
    // eps / 2.
    let eps = 0.1;
    let step = 2e-3;
    let deltas: Vec<f64> = (1..=50).map(|k| k as f64 * step).collect();
    let found =
        predicate_uniform_delta(&predicate_by_name("lipschitz-sq").unwrap(), eps, 0.01, &deltas)
            .expect("no uniform delta found");
    assert!(
        (found - eps / 2.0).abs() <= step + 1e-12,
        "found {found}, want within one step of {}",
        eps / 2.0
    );
    report(9, "fan machinery", started, None);
}

#[test]
fn criterion_10_hausdorff_metric_axioms() {
    let started = Instant::now();
    let mut rng = trial_rng(0xACCE10, 0);
    for _ in 0..1000 {
        let dim = rng.random_range(2..=3usize);
        let cloud = |rng: &mut rand_chacha::ChaCha8Rng| {
            let k = rng.random_range(1..=12usize);
            let pts = (0..k)
                .map(|_| Point((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()))
                .collect();
            EpsNet::from_points(pts, 0.0).unwrap()
        };
        let a = cloud(&mut rng);
        let b = cloud(&mut rng);
        let c = cloud(&mut rng);
        let ab = hausdorff(&a, &b);
        let ba = hausdorff(&b, &a);
        let ac = hausdorff(&a, &c);
        let bc = hausdorff(&b, &c);
        assert_eq!(ab, ba, "symmetry");
        assert_eq!(hausdorff(&a, &a), 0.0, "identity");
        assert!(ac <= ab + bc, "triangle: {ac} > {ab} + {bc}");
    }
    report(10, "hausdorff metric axioms", started, None);
}
