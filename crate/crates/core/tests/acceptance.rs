//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout. The
//! process fails if any criterion fails, except those listed in
//! `DOCUMENTED_FAILURES`, which print FAIL with the reason and do not change
//! the exit status.

use degmc::counting::{estimate_count, CountConfig, IntervalSampler};
use degmc::oracle::{count_interval, enumerate_graphs, Constraint};
use degmc::projection::{off_diagonal_ratio_range, DegreeSpace};
use degmc::verify::{run_suite, CheckRecord, Suite, SuiteOptions, SuiteReport};
use degmc::weights::WeightModel;
use degmc::{chains::seeded_rng, DegreeInterval};
use num_traits::ToPrimitive;
use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

/// Criteria expected to fail, with the reason printed next to the FAIL line.
const DOCUMENTED_FAILURES: &[(&str, &str)] = &[(
    "9b",
    "the bound is false for 11 <= n <= 100 on the stated parameter grid; \
     two-valued sequences exceed it (see worst case)",
)];

type Criterion = fn() -> Vec<Outcome>;

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn run(opts: Option<usize>, suite: Suite) -> SuiteReport {
    run_suite(
        suite,
        &SuiteOptions {
            max_n: opts,
            ..SuiteOptions::default()
        },
    )
    .unwrap_or_else(|e| panic!("{suite} suite errored: {e}"))
}

fn worst<'a>(recs: impl Iterator<Item = &'a CheckRecord>, by: impl Fn(&CheckRecord) -> f64) -> Option<&'a CheckRecord> {
    recs.max_by(|a, b| by(a).total_cmp(&by(b)))
}

fn suite_outcome(id: &'static str, title: &'static str, r: &SuiteReport, prefix: &str) -> Outcome {
    let checked: Vec<&CheckRecord> = r.filter(prefix).filter(|c| c.bound.is_some()).collect();
    let failed = checked.iter().filter(|c| !c.pass).count();
    let mut detail = format!("{} checks, {failed} failed", checked.len());
    if let Some(c) = checked.iter().find(|c| !c.pass) {
        detail += &format!(
            "; first failure {} {} = {:.6e} vs {:?}",
            c.instance, c.quantity, c.measured, c.bound
        );
    }
    Outcome {
        id,
        title,
        pass: !checked.is_empty() && failed == 0,
        detail,
    }
}

fn c1() -> Vec<Outcome> {
    let r = run(None, Suite::Stationarity);
    let mut out = Vec::new();
    for (id, label) in [("1a", "switch"), ("1b", "switch-hinge"), ("1c", "interval")] {
        let mut o = suite_outcome(id, "uniform stationarity, near-regular n <= 6", &r, label);
        let dev = worst(r.filter(label), |c| c.measured).map_or(0.0, |c| c.measured);
        o.detail = format!("{label}: {}; max deviation {dev:.2e} (tol 1e-10)", o.detail);
        out.push(o);
    }
    out
}

fn c2() -> Vec<Outcome> {
    let r = run(Some(7), Suite::Irreducibility);
    vec![suite_outcome("2", "interval chain connected, unit near-regular n <= 7", &r, "")]
}

fn c3() -> Vec<Outcome> {
    let r = run(Some(6), Suite::Logconcave);
    let mut o = suite_outcome("3", "log-concave |G_m(l,u)|, all unit boxes n <= 6", &r, "");
    let top = worst(r.records.iter(), |c| c.measured).map_or(0.0, |c| c.measured);
    o.detail += &format!("; max w_(m-1) w_(m+1)/w_m^2 = {top:.6}");
    vec![o]
}

fn c4() -> Vec<Outcome> {
    let r = run(Some(6), Suite::Congestion);
    let mut o = suite_outcome("4", "birth-death gap >= 1/(4|T|^3 max ratio)", &r, "");
    let slack = r
        .records
        .iter()
        .map(|c| c.measured / c.bound.unwrap_or(1.0))
        .fold(f64::INFINITY, f64::min);
    o.detail += &format!("; min gap/bound = {slack:.3}");
    vec![o]
}

fn c5() -> Vec<Outcome> {
    let r = run(Some(5), Suite::MartinRandall);
    let mut out = Vec::new();
    for (id, level) in [("5a", "level 1"), ("5b", "level 2")] {
        let mut o = suite_outcome(id, "decomposition gap bound, unit near-regular n <= 5", &r, level);
        let slack = r
            .filter(level)
            .map(|c| c.measured / c.bound.unwrap_or(1.0))
            .fold(f64::INFINITY, f64::min);
        o.detail = format!("{level}: {}; min gap/rhs = {slack:.3}", o.detail);
        out.push(o);
    }
    out
}

fn c6() -> Vec<Outcome> {
    // The named instance first, against directly computed weights.
    let iv = DegreeInterval::new(vec![1; 4], vec![2; 4]).unwrap();
    let mut named_ok = true;
    let mut named = Vec::new();
    for m in 2..=4 {
        let ws = DegreeSpace::new(&iv, m).unwrap().weighted(WeightModel::ExactCount).unwrap();
        let target = ws.distribution();
        let hinge = ws.hinge_projection_matrix();
        let load = ws.load_exchange_matrix();
        for p in [&hinge, &load] {
            let pi = degmc::oracle::stationary_distribution(p).unwrap();
            let dev = pi.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            named_ok &= dev <= 1e-10;
        }
        if let Some((lo, hi)) = off_diagonal_ratio_range(&hinge, &load) {
            named_ok &= hi.max(1.0 / lo) <= 64.0;
            named.push(format!("m={m} ratio in [{lo:.3}, {hi:.3}]"));
        }
    }
    let r = run(Some(6), Suite::Projection);
    let mut a = suite_outcome("6a", "projection chains stationary prop. to |G(d)|, n <= 6", &r, "hinge");
    let load = suite_outcome("6a", "", &r, "load");
    a.pass &= load.pass && named_ok;
    a.detail = format!(
        "hinge {}; load {}; (1,1,1,1)-(2,2,2,2): {}",
        a.detail,
        load.detail,
        named.join(", ")
    );
    let mut b = suite_outcome("6b", "hinge/load off-diagonal ratio within n^3", &r, "off-diagonal");
    let spread = worst(r.filter("off-diagonal"), |c| c.measured / c.bound.unwrap_or(1.0));
    if let Some(c) = spread {
        b.detail += &format!("; widest {} = {:.2} (cap {:?})", c.instance, c.measured, c.bound);
    }
    vec![a, b]
}

fn c7() -> Vec<Outcome> {
    let r = run(Some(6), Suite::Mconvex);
    let mut o = suite_outcome("7", "D_m(l,u) exchange property, n <= 6, all feasible m", &r, "exchange");
    let graphical = r.filter("graphical").filter(|c| c.measured > 0.0).count();
    o.detail += &format!("; graphical support alone fails on {graphical} (box, m) pairs (diagnostic)");
    vec![o]
}

fn c8() -> Vec<Outcome> {
    let r = run(Some(6), Suite::Stability);
    let mut a = suite_outcome("8a", "alternating repair paths <= 10, n <= 6", &r, "longest");
    let longest = r.filter("longest").map(|c| c.measured).fold(0.0, f64::max);
    a.detail += &format!("; longest shortest path {longest}");
    let mut b = suite_outcome("8b", "short transforms <= 12 for every attainable goal, n <= 6", &r, "largest");
    let largest = r.filter("largest").map(|c| c.measured).fold(0.0, f64::max);
    let unattainable: f64 = r.filter("unattainable").map(|c| c.measured).sum();
    b.detail += &format!("; largest {largest}; {unattainable} goals met by no graph in G(d) (diagnostic)");
    let near: Vec<f64> = [
        "near-regular: perturbed",
        "near-regular: transform budget",
        "near-regular: unattainable",
    ]
    .iter()
    .map(|p| r.filter(p).map(|c| c.measured).sum())
    .collect();
    let seqs = r.filter("near-regular: perturbed").count();
    b.detail += &format!(
        "; other near-regular sequences ({seqs}, diagnostic): {} perturbed graphs without a repair path, {} budget failures, {} unattainable goals",
        near[0], near[1], near[2]
    );
    vec![a, b]
}

fn c9() -> Vec<Outcome> {
    let r = run(Some(100), Suite::Sbound);
    let mut out = Vec::new();
    for (id, title, prefix) in [
        ("9a", "s(d) <= 8/(r rho (n-1)), exhaustive n <= 10", "max s(d), exhaustive"),
        ("9b", "s(d) <= 8/(r rho (n-1)), sampled 11 <= n <= 100", "max s(d), sampled"),
    ] {
        let mut o = suite_outcome(id, title, &r, prefix);
        if let Some(c) = worst(r.filter(prefix), |c| c.measured / c.bound.unwrap_or(1.0)) {
            o.detail += &format!("; worst {} s = {:.4} vs {:.4}", c.instance, c.measured, c.bound.unwrap_or(f64::NAN));
        }
        out.push(o);
    }
    out
}

fn c10() -> Vec<Outcome> {
    let r = run(Some(10), Suite::Lw);
    let mut o = suite_outcome("10", "LW value at (2,2,2,2) within 1e-3", &r, "|w");
    let ratios: Vec<String> = r
        .filter("w/|G(d)|")
        .map(|c| format!("{} {:.4}", c.instance.replace("d=", ""), c.measured))
        .collect();
    o.detail += &format!("; ratios w/|G(d)| (diagnostic): {}", ratios.join("; "));
    vec![o]
}

fn c11() -> Vec<Outcome> {
    let (eps, delta, reps) = (0.1, 0.05, 200u64);
    let instances = [
        DegreeInterval::new(vec![1, 1, 1, 2, 2], vec![2, 2, 2, 3, 3]).unwrap(),
        DegreeInterval::new(vec![1, 1, 2, 2, 2, 2], vec![2, 2, 3, 3, 3, 3]).unwrap(),
    ];
    let mut out = Vec::new();
    for (k, iv) in instances.iter().enumerate() {
        let exact = count_interval(iv).unwrap().to_f64().unwrap();
        let mut misses = 0;
        for rep in 0..reps {
            let cfg = CountConfig::new(eps, delta, 1000 * k as u64 + rep).unwrap();
            let est = estimate_count(iv, &cfg).unwrap().log_value.exp();
            if (est / exact - 1.0).abs() > eps {
                misses += 1;
            }
        }
        let frac = misses as f64 / reps as f64;
        out.push(Outcome {
            id: if k == 0 { "11a" } else { "11b" },
            title: "estimate_count calibration, eps 0.1 delta 0.05",
            pass: frac <= 0.07,
            detail: format!(
                "l={:?} u={:?} exact {exact}; {misses}/{reps} outside (1 +- eps) exact, fraction {frac:.3} (max 0.07)",
                iv.lower(),
                iv.upper()
            ),
        });
    }
    out
}

fn c12() -> Vec<Outcome> {
    let iv = DegreeInterval::new(vec![1, 1, 2, 2, 2], vec![2, 2, 3, 3, 3]).unwrap();
    let space = enumerate_graphs(&Constraint::Interval(iv.clone())).unwrap();
    let draws = 100_000u64;
    let mut sampler = IntervalSampler::new(&iv, 0.1, 0.05, 7).unwrap();
    let mut rng = seeded_rng(7, 0);
    let mut hist: HashMap<u64, u64> = HashMap::new();
    for _ in 0..draws {
        *hist.entry(sampler.sample(&mut rng).unwrap().code()).or_default() += 1;
    }
    let outside = hist.keys().filter(|c| space.index_of(**c).is_none()).count();
    let u = 1.0 / space.len() as f64;
    let tv = 0.5
        * space
            .codes()
            .iter()
            .map(|c| (hist.get(c).copied().unwrap_or(0) as f64 / draws as f64 - u).abs())
            .sum::<f64>();
    vec![Outcome {
        id: "12",
        title: "sample_interval uniformity, 1e5 draws",
        pass: tv <= 0.05 && outside == 0,
        detail: format!(
            "l={:?} u={:?} |G(l,u)| = {}; TV {tv:.4} (max 0.05); {outside} draws outside",
            iv.lower(),
            iv.upper(),
            space.len()
        ),
    }]
}

fn main() -> ExitCode {
    let criteria: [(u8, Criterion); 12] = [
        (1, c1),
        (2, c2),
        (3, c3),
        (4, c4),
        (5, c5),
        (6, c6),
        (7, c7),
        (8, c8),
        (9, c9),
        (10, c10),
        (11, c11),
        (12, c12),
    ];
    let filter: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = Vec::new();
    for (k, f) in criteria {
        if !filter.is_empty() && !filter.contains(&k) {
            continue;
        }
        let start = Instant::now();
        let outcomes = f();
        let secs = start.elapsed().as_secs_f64();
        for o in outcomes {
            let documented = DOCUMENTED_FAILURES.iter().find(|d| d.0 == o.id);
            let verdict = if o.pass { "PASS" } else { "FAIL" };
            println!("{verdict} criterion {:<3} {} [{secs:.1}s]: {}", o.id, o.title, o.detail);
            match (o.pass, documented) {
                (false, Some((_, why))) => println!("     documented failure: {why}"),
                (false, None) => unexpected.push(o.id),
                (true, Some(_)) => println!("     note: listed as a documented failure but passed"),
                (true, None) => {}
            }
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {}", unexpected.join(", "));
        ExitCode::FAILURE
    }
}
