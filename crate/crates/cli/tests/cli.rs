use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn degmc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degmc"))
        .args(args)
        .current_dir(dir)
        .env_remove("DEGMC_SEED")
        .env_remove("DEGMC_OUTPUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn intervals(dir: &Path, name: &str, bounds: &[(usize, usize)]) {
    let text: String = bounds.iter().enumerate().map(|(i, (l, u))| format!("{i} {l} {u}\n")).collect();
    fs::write(dir.join(name), text).unwrap();
}

/// Splits `sample` stdout into edge-list blocks, one per graph.
fn sampled_graphs(text: &str) -> Vec<Vec<(usize, usize)>> {
    let mut out: Vec<Vec<(usize, usize)>> = Vec::new();
    for line in text.lines() {
        if line.starts_with("# sample_") {
            out.push(Vec::new());
        } else if !line.starts_with('#') && !line.trim().is_empty() {
            let f: Vec<usize> = line.split_whitespace().map(|x| x.parse().unwrap()).collect();
            out.last_mut().unwrap().push((f[0], f[1]));
        }
    }
    out
}

fn degrees(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut d = vec![0; n];
    for &(a, b) in edges {
        d[a] += 1;
        d[b] += 1;
    }
    d
}

fn estimate(o: &Output) -> f64 {
    let v: serde_json::Value = serde_json::from_str(&stdout(o)).unwrap();
    v["log_value"].as_f64().unwrap().exp()
}

#[test]
fn ingest_triangle() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.txt"), "0 1\n1 2\n0 2\n").unwrap();
    fs::write(dir.path().join("miss.txt"), "0\n0\n0\n").unwrap();
    let o = degmc(dir.path(), &["ingest", "g.txt", "miss.txt"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0 2 2\n1 2 2\n2 2 2\n");
}

#[test]
fn malformed_line_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.txt"), "0 1\n1 x\n").unwrap();
    fs::write(dir.path().join("miss.txt"), "0\n0\n").unwrap();
    let o = degmc(dir.path(), &["ingest", "g.txt", "miss.txt"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn ingest_then_sample_stays_in_intervals() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.txt"), "# nodes: 6\n0 1\n1 2\n3 4\n").unwrap();
    fs::write(dir.path().join("miss.txt"), "1\n1\n2\n1\n1\n2\n").unwrap();
    assert!(degmc(dir.path(), &["ingest", "g.txt", "miss.txt", "--output", "iv.txt"])
        .status
        .success());
    let bounds: Vec<(usize, usize)> = fs::read_to_string(dir.path().join("iv.txt"))
        .unwrap()
        .lines()
        .map(|l| {
            let f: Vec<usize> = l.split_whitespace().map(|x| x.parse().unwrap()).collect();
            (f[1], f[2])
        })
        .collect();
    for chain in [None, Some("interval")] {
        let mut args = vec!["sample", "iv.txt", "--count", "20", "--seed", "4"];
        if let Some(c) = chain {
            args.extend(["--chain", c, "--steps", "500"]);
        }
        let o = degmc(dir.path(), &args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let graphs = sampled_graphs(&stdout(&o));
        assert_eq!(graphs.len(), 20);
        for g in graphs {
            for (d, (l, u)) in degrees(6, &g).into_iter().zip(&bounds) {
                assert!(*l <= d && d <= *u);
            }
        }
    }
}

#[test]
fn singleton_space_gives_the_triangle() {
    let dir = tempfile::tempdir().unwrap();
    intervals(dir.path(), "iv.txt", &[(2, 2); 3]);
    for chain in [None, Some("switch"), Some("switch-hinge"), Some("interval")] {
        let mut args = vec!["sample", "iv.txt", "--count", "5"];
        if let Some(c) = chain {
            args.extend(["--chain", c, "--steps", "50"]);
        }
        let o = degmc(dir.path(), &args);
        assert!(o.status.success());
        for g in sampled_graphs(&stdout(&o)) {
            assert_eq!(g, vec![(0, 1), (0, 2), (1, 2)]);
        }
    }
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    intervals(dir.path(), "iv.txt", &[(1, 2); 5]);
    for out in ["a", "b"] {
        let o = degmc(
            dir.path(),
            &[
                "sample",
                "iv.txt",
                "--count",
                "4",
                "--chain",
                "switch-hinge",
                "--m",
                "4",
                "--seed",
                "11",
                "--output",
                out,
            ],
        );
        assert!(o.status.success());
    }
    let names: Vec<_> = fs::read_dir(dir.path().join("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(names.len(), 5);
    for name in names {
        assert_eq!(
            fs::read(dir.path().join("a").join(&name)).unwrap(),
            fs::read(dir.path().join("b").join(&name)).unwrap()
        );
    }
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["chain"], "switch-hinge");
    assert_eq!(manifest["instance_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn environment_seed_yields_to_flag() {
    let dir = tempfile::tempdir().unwrap();
    intervals(dir.path(), "iv.txt", &[(1, 2); 4]);
    let run = |env_seed: Option<&str>, args: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_degmc"));
        c.args(args).current_dir(dir.path());
        if let Some(s) = env_seed {
            c.env("DEGMC_SEED", s);
        }
        stdout(&c.output().unwrap())
    };
    let base = ["sample", "iv.txt", "--count", "8"];
    let flag = run(None, &[&base[..], &["--seed", "3"]].concat());
    assert_eq!(run(Some("3"), &base), flag);
    assert_eq!(run(Some("99"), &[&base[..], &["--seed", "3"]].concat()), flag);
}

#[test]
fn interval_chain_is_uniform_on_unit_box() {
    let dir = tempfile::tempdir().unwrap();
    intervals(dir.path(), "iv.txt", &[(1, 2); 5]);
    let draws = 100_000;
    let o = degmc(
        dir.path(),
        &[
            "sample",
            "iv.txt",
            "--count",
            &draws.to_string(),
            "--chain",
            "interval",
            "--steps",
            "1500",
            "--seed",
            "2",
        ],
    );
    assert!(o.status.success());
    let mut hist: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    for g in sampled_graphs(&stdout(&o)) {
        *hist.entry(g).or_default() += 1;
    }
    // |G((1,...,1),(2,...,2))| on five nodes.
    let size = 112;
    assert_eq!(hist.len(), size);
    let u = 1.0 / size as f64;
    let tv = 0.5 * hist.values().map(|&c| (c as f64 / draws as f64 - u).abs()).sum::<f64>();
    assert!(tv <= 0.05, "tv = {tv}");
}

#[test]
fn count_unconstrained_triangle_box() {
    let dir = tempfile::tempdir().unwrap();
    intervals(dir.path(), "iv.txt", &[(0, 2); 3]);
    let o = degmc(dir.path(), &["count", "iv.txt", "--seed", "1"]);
    assert!(o.status.success());
    assert!((estimate(&o) / 8.0 - 1.0).abs() <= 0.1);
    let o = degmc(dir.path(), &["count", "iv.txt", "--m", "1", "--seed", "1"]);
    assert!((estimate(&o) / 3.0 - 1.0).abs() <= 0.1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in [
        "log_value",
        "value_if_small",
        "eps",
        "delta",
        "method",
        "samples_used",
        "ladder_length",
        "per_rung_ratios",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn count_small_box_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    intervals(dir.path(), "iv.txt", &[(1, 2), (1, 2), (2, 3), (2, 3), (2, 3), (2, 3)]);
    let o = degmc(dir.path(), &["count", "iv.txt", "--seed", "8"]);
    assert!(o.status.success());
    // Exhaustive count of this box.
    assert!((estimate(&o) / 1098.0 - 1.0).abs() <= 0.1);
}

#[test]
fn ladder_reports_odd_residue() {
    let dir = tempfile::tempdir().unwrap();
    intervals(dir.path(), "iv.txt", &[(1, 2); 5]);
    let o = degmc(dir.path(), &["ladder", "iv.txt"]);
    assert_eq!(o.status.code(), Some(2));
    let o = degmc(dir.path(), &["ladder", "iv.txt", "--m", "4"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let last: usize = v["rungs"]
        .as_array()
        .unwrap()
        .last()
        .unwrap()
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap() as usize)
        .sum();
    assert_eq!(last, 8);
}

#[test]
fn analyze_reports_uniform_stationarity() {
    let dir = tempfile::tempdir().unwrap();
    intervals(dir.path(), "iv.txt", &[(1, 2); 4]);
    let o = degmc(dir.path(), &["analyze", "iv.txt", "--chain", "interval", "--steps", "200"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["symmetric"], true);
    assert!(v["stationary_deviation"].as_f64().unwrap() < 1e-12);
    assert!(v["spectral_gap"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_suites_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = degmc(dir.path(), &["verify", "logconcave"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["failed"], 0);
    assert!(degmc(dir.path(), &["verify", "sbound", "--max-n", "10"]).status.success());
    assert_eq!(degmc(dir.path(), &["verify", "sbound", "--max-n", "20"]).status.code(), Some(1));
    assert_eq!(degmc(dir.path(), &["verify", "nope"]).status.code(), Some(3));
}

#[test]
fn infeasible_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    intervals(dir.path(), "iv.txt", &[(3, 3), (0, 0), (0, 0), (0, 0)]);
    assert_eq!(degmc(dir.path(), &["count", "iv.txt"]).status.code(), Some(2));
    assert_eq!(degmc(dir.path(), &["sample", "iv.txt"]).status.code(), Some(2));
    intervals(dir.path(), "box.txt", &[(1, 2); 4]);
    assert_eq!(
        degmc(dir.path(), &["sample", "box.txt", "--chain", "switch"]).status.code(),
        Some(3)
    );
    assert_eq!(degmc(dir.path(), &["count", "box.txt", "--eps", "2"]).status.code(), Some(3));
    assert_eq!(degmc(dir.path(), &["frobnicate"]).status.code(), Some(3));
}
