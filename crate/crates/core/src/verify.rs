//! Desk-scale verification suites.
//!
//! Each suite sweeps an instance family exhaustively (or by seeded sampling
//! where noted) and returns one [`CheckRecord`] per instance. A record with
//! `bound: None` is diagnostic and always passes.

use crate::chains::{seeded_rng, TransitionKernel, DEFAULT_SWITCH_Q};
use crate::error::{Error, Result};
use crate::family::{all_boxes, near_regular_boxes, near_regular_sequences, unit_boxes};
use crate::graph::{feasible_edge_counts, DegreeInterval, DegreeSequence, NearRegularParams};
use crate::oracle::theorems::{check_short_cycle_transforms, check_strong_stability, verify_log_concave, verify_martin_randall};
use crate::oracle::{
    build_count_matrix, count_realizations, enumerate_graphs, is_connected, satisfies_stability_inequality, spectral_gap,
    stationary_distribution, Constraint, DegreeCountTable, StateSpace, StochasticMatrix,
};
use crate::projection::{
    degree_space_is_m_convex, logconcave_gap_bound, off_diagonal_ratio_range, DegreeSpace, EdgeCountSpace, WeightedDegreeSpace,
};
use crate::weights::{ln_biguint, lw_log_weight, s_bound, sequence_stats};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

/// Tolerance on stationary vectors.
pub const STATIONARY_TOL: f64 = 1e-10;
/// Path-length bound for strong stability.
pub const STABILITY_K: usize = 10;
/// Symmetric-difference budget for short transforms.
pub const TRANSFORM_BUDGET: usize = 12;
/// Interval-width exponents of the s-bound grid.
pub const SBOUND_ALPHAS: [f64; 4] = [0.1, 0.25, 0.4, 0.49];
/// Largest `n` swept exhaustively by the s-bound suite.
pub const SBOUND_EXHAUSTIVE_MAX_N: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub instance: String,
    pub quantity: String,
    pub bound: Option<f64>,
    pub measured: f64,
    pub pass: bool,
}

impl CheckRecord {
    fn new(instance: String, quantity: impl Into<String>, bound: f64, measured: f64, pass: bool) -> Self {
        CheckRecord {
            instance,
            quantity: quantity.into(),
            bound: Some(bound),
            measured,
            pass,
        }
    }

    fn diagnostic(instance: String, quantity: impl Into<String>, measured: f64) -> Self {
        CheckRecord {
            instance,
            quantity: quantity.into(),
            bound: None,
            measured,
            pass: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: usize,
    pub failed: usize,
    pub records: Vec<CheckRecord>,
}

impl SuiteReport {
    fn new(suite: Suite, records: Vec<CheckRecord>) -> Self {
        SuiteReport {
            suite,
            checks: records.len(),
            failed: records.iter().filter(|r| !r.pass).count(),
            records,
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// Records whose quantity starts with `prefix`.
    pub fn filter<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a CheckRecord> + 'a {
        self.records.iter().filter(move |r| r.quantity.starts_with(prefix))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Symmetric matrices with uniform stationary vectors for all three chains.
    Stationarity,
    /// Connected state-space graphs of the interval chain.
    Irreducibility,
    /// `w_m = |G_m(l,u)|` is log-concave on unit boxes.
    Logconcave,
    /// Birth–death gap against `1/(4 |T|^3 max ratio)` for `|T| >= 2`.
    Congestion,
    /// Two-level decomposition bound on the interval chain.
    MartinRandall,
    /// Projection chains have stationary law proportional to `|G(d)|`.
    Projection,
    /// `D_m(l,u)` has the exchange property.
    Mconvex,
    /// Short alternating repair paths and short transforms.
    Stability,
    /// `s(d) <= 8/(r rho (n-1))` on near-regular sequences.
    Sbound,
    /// Liebenau–Wormald values against exact counts.
    Lw,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Stationarity,
        Suite::Irreducibility,
        Suite::Logconcave,
        Suite::Congestion,
        Suite::MartinRandall,
        Suite::Projection,
        Suite::Mconvex,
        Suite::Stability,
        Suite::Sbound,
        Suite::Lw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Stationarity => "stationarity",
            Suite::Irreducibility => "irreducibility",
            Suite::Logconcave => "logconcave",
            Suite::Congestion => "congestion",
            Suite::MartinRandall => "martin-randall",
            Suite::Projection => "projection",
            Suite::Mconvex => "mconvex",
            Suite::Stability => "stability",
            Suite::Sbound => "sbound",
            Suite::Lw => "lw",
        }
    }

    /// Largest `n` swept by default.
    pub fn default_max_n(self) -> usize {
        match self {
            Suite::Irreducibility => 7,
            Suite::MartinRandall => 5,
            Suite::Sbound => 100,
            Suite::Lw => 10,
            _ => 6,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    /// Overrides [`Suite::default_max_n`].
    pub max_n: Option<usize>,
    /// Seed for suites that sample.
    pub seed: u64,
    /// Sequences drawn per configuration by sampling suites.
    pub samples: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            max_n: None,
            seed: 0,
            samples: 16,
        }
    }
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteReport> {
    let max_n = opts.max_n.unwrap_or(suite.default_max_n());
    let records = match suite {
        Suite::Stationarity => stationarity(max_n)?,
        Suite::Irreducibility => irreducibility(max_n)?,
        Suite::Logconcave => logconcave(max_n)?,
        Suite::Congestion => congestion(max_n)?,
        Suite::MartinRandall => martin_randall(max_n)?,
        Suite::Projection => projection(max_n)?,
        Suite::Mconvex => mconvex(max_n)?,
        Suite::Stability => stability(max_n)?,
        Suite::Sbound => sbound(max_n, opts.seed, opts.samples)?,
        Suite::Lw => lw(max_n)?,
    };
    Ok(SuiteReport::new(suite, records))
}

fn box_name(iv: &DegreeInterval) -> String {
    format!("l={:?} u={:?}", iv.lower(), iv.upper())
}

fn seq_name(d: &DegreeSequence) -> String {
    format!("d={:?}", d.0)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn collect_records<T: Sync, F>(items: &[T], f: F) -> Result<Vec<CheckRecord>>
where
    F: Fn(&T) -> Result<Vec<CheckRecord>> + Sync + Send,
{
    let parts = items.par_iter().map(f).collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().flatten().collect())
}

fn uniform_record(instance: String, label: &str, kernel: &TransitionKernel, space: &StateSpace) -> Result<CheckRecord> {
    let quantity = format!("{label}: max |pi - uniform|");
    let counts = build_count_matrix(kernel, space)?;
    let p = counts.to_scalar::<f64>();
    if !counts.is_symmetric() || p.check_stochastic(1e-12).is_err() {
        return Ok(CheckRecord::new(instance, quantity, STATIONARY_TOL, f64::INFINITY, false));
    }
    let pi = stationary_distribution(&p)?;
    let uniform = vec![1.0 / space.len() as f64; space.len()];
    let dev = max_abs_diff(&pi, &uniform);
    Ok(CheckRecord::new(instance, quantity, STATIONARY_TOL, dev, dev <= STATIONARY_TOL))
}

fn stationarity(max_n: usize) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        let seqs: Vec<DegreeSequence> = near_regular_sequences(n).into_iter().filter(|d| d.is_graphical()).collect();
        out.extend(collect_records(&seqs, |d| {
            let space = enumerate_graphs(&Constraint::Degrees(d.clone()))?;
            let kernel = TransitionKernel::switch(d, DEFAULT_SWITCH_Q)?;
            Ok(vec![uniform_record(seq_name(d), "switch", &kernel, &space)?])
        })?);
        let boxes = near_regular_boxes(n, false);
        out.extend(collect_records(&boxes, |iv| {
            let mut recs = Vec::new();
            let space = enumerate_graphs(&Constraint::Interval(iv.clone()))?;
            if space.is_empty() {
                return Ok(recs);
            }
            let kernel = TransitionKernel::degree_interval(iv.clone());
            recs.push(uniform_record(box_name(iv), "interval", &kernel, &space)?);
            for m in feasible_edge_counts(iv) {
                let space = enumerate_graphs(&Constraint::IntervalEdges(iv.clone(), m))?;
                let kernel = TransitionKernel::switch_hinge(iv.clone(), Some(m));
                recs.push(uniform_record(format!("{} m={m}", box_name(iv)), "switch-hinge", &kernel, &space)?);
            }
            Ok(recs)
        })?);
    }
    Ok(out)
}

/// Reflection `d -> n-1-d` maps `G(l,u)` onto `G(n-1-u, n-1-l)` by taking
/// complements, and every move of the interval chain onto a move of the
/// same kind, so only one box per reflected pair is checked.
fn up_to_reflection(boxes: Vec<DegreeInterval>) -> Vec<DegreeInterval> {
    let mut seen = BTreeSet::new();
    boxes
        .into_iter()
        .filter(|iv| {
            let n = iv.n();
            let lower: Vec<usize> = iv.upper().iter().map(|&u| n - 1 - u).collect();
            let upper: Vec<usize> = iv.lower().iter().map(|&l| n - 1 - l).collect();
            let mirror = DegreeInterval::new(lower, upper).expect("reflection keeps bounds").canonical();
            let key = (iv.lower().to_vec(), iv.upper().to_vec());
            let mirror_key = (mirror.lower().to_vec(), mirror.upper().to_vec());
            let fresh = !seen.contains(&mirror_key);
            seen.insert(key);
            fresh
        })
        .collect()
}

fn irreducibility(max_n: usize) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        let boxes = up_to_reflection(near_regular_boxes(n, true));
        out.extend(collect_records(&boxes, |iv| {
            let space = enumerate_graphs(&Constraint::Interval(iv.clone()))?;
            if space.is_empty() {
                return Ok(Vec::new());
            }
            let ok = is_connected(&TransitionKernel::degree_interval(iv.clone()), &space)?;
            Ok(vec![CheckRecord::new(
                box_name(iv),
                "interval chain connected",
                1.0,
                f64::from(u8::from(ok)),
                ok,
            )])
        })?);
    }
    Ok(out)
}

/// A box with its `(m, |G_m(l,u)|)` table.
type BoxCounts = (DegreeInterval, Vec<(usize, u64)>);

/// `(m, |G_m(l,u)|)` for every unit box on `n` nodes.
fn unit_box_counts(n: usize) -> Result<Vec<BoxCounts>> {
    let table = DegreeCountTable::build(n)?;
    Ok(unit_boxes(n)
        .into_par_iter()
        .map(|iv| {
            let w = table.interval_counts(&iv);
            (iv, w)
        })
        .collect())
}

fn trimmed(w: &[(usize, u64)]) -> &[(usize, u64)] {
    let first = w.iter().position(|e| e.1 > 0).unwrap_or(w.len());
    let last = w.iter().rposition(|e| e.1 > 0).map_or(first, |i| i + 1);
    &w[first..last]
}

fn logconcave(max_n: usize) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for (iv, w) in unit_box_counts(n)? {
            let w: Vec<u128> = trimmed(&w).iter().map(|e| u128::from(e.1)).collect();
            if w.is_empty() {
                continue;
            }
            let violation = verify_log_concave(&w);
            // Worst ratio w_{m-1} w_{m+1} / w_m^2.
            let worst = (1..w.len().saturating_sub(1))
                .map(|m| (w[m - 1] * w[m + 1]) as f64 / (w[m] * w[m]) as f64)
                .fold(0.0, f64::max);
            out.push(CheckRecord::new(
                box_name(&iv),
                "max w_(m-1) w_(m+1) / w_m^2",
                1.0,
                worst,
                violation.is_none(),
            ));
        }
    }
    Ok(out)
}

fn congestion(max_n: usize) -> Result<Vec<CheckRecord>> {
    let mut seqs: BTreeMap<Vec<u64>, String> = BTreeMap::new();
    for n in 1..=max_n {
        for (iv, w) in unit_box_counts(n)? {
            let w = trimmed(&w);
            if w.len() < 2 || w.iter().any(|e| e.1 == 0) {
                continue;
            }
            let key: Vec<u64> = w.iter().map(|e| e.1).collect();
            if verify_log_concave(&key.iter().map(|&x| u128::from(x)).collect::<Vec<_>>()).is_none() {
                seqs.entry(key).or_insert_with(|| box_name(&iv));
            }
        }
    }
    let seqs: Vec<(Vec<u64>, String)> = seqs.into_iter().collect();
    collect_records(&seqs, |(w, name)| {
        let wf: Vec<f64> = w.iter().map(|&x| x as f64).collect();
        let ms: Vec<usize> = (0..w.len()).collect();
        let space = EdgeCountSpace::new(ms, wf.iter().map(|x| x.ln()).collect())?;
        let gap = spectral_gap(&space.matrix())?;
        let bound = logconcave_gap_bound(&wf)?;
        Ok(vec![CheckRecord::new(
            format!("{name} w={w:?}"),
            "birth-death spectral gap",
            bound,
            gap,
            gap >= bound,
        )])
    })
}

fn blocks_by<K: Ord>(len: usize, key: impl Fn(usize) -> K) -> Vec<Vec<usize>> {
    let mut map: BTreeMap<K, Vec<usize>> = BTreeMap::new();
    for i in 0..len {
        map.entry(key(i)).or_default().push(i);
    }
    map.into_values().collect()
}

fn martin_randall(max_n: usize) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        let boxes = near_regular_boxes(n, true);
        out.extend(collect_records(&boxes, |iv| {
            let mut recs = Vec::new();
            let space = enumerate_graphs(&Constraint::Interval(iv.clone()))?;
            if space.len() < 2 {
                return Ok(recs);
            }
            let kernel = TransitionKernel::degree_interval(iv.clone());
            let p = build_count_matrix(&kernel, &space)?.to_scalar::<f64>();
            let blocks = blocks_by(space.len(), |i| space.graph(i).edge_count());
            recs.push(mr_record(box_name(iv), "level 1 (edge counts)", &p, &blocks)?);
            for m in feasible_edge_counts(iv) {
                let space = enumerate_graphs(&Constraint::IntervalEdges(iv.clone(), m))?;
                if space.len() < 2 {
                    continue;
                }
                let kernel = TransitionKernel::switch_hinge(iv.clone(), Some(m));
                let p = build_count_matrix(&kernel, &space)?.to_scalar::<f64>();
                let blocks = blocks_by(space.len(), |i| space.graph(i).degrees().to_vec());
                recs.push(mr_record(
                    format!("{} m={m}", box_name(iv)),
                    "level 2 (degree sequences)",
                    &p,
                    &blocks,
                )?);
            }
            Ok(recs)
        })?);
    }
    Ok(out)
}

fn mr_record(instance: String, level: &str, p: &StochasticMatrix<f64>, blocks: &[Vec<usize>]) -> Result<CheckRecord> {
    let r = verify_martin_randall(p, blocks)?;
    Ok(CheckRecord::new(
        instance,
        format!("{level}: gap >= beta gamma gap_mh min gap_i"),
        r.rhs,
        r.gap,
        r.holds,
    ))
}

fn projection(max_n: usize) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        let table = DegreeCountTable::build(n)?;
        let boxes = near_regular_boxes(n, false);
        out.extend(collect_records(&boxes, |iv| {
            let mut recs = Vec::new();
            for m in feasible_edge_counts(iv) {
                let space = DegreeSpace::new(iv, m)?;
                let log_w: Vec<f64> = space.elements().iter().map(|d| (table.count(&d.0) as f64).ln()).collect();
                let ws = WeightedDegreeSpace::new(space, log_w)?;
                let target = ws.distribution();
                let name = format!("{} m={m}", box_name(iv));
                let hinge = ws.hinge_projection_matrix();
                let load = ws.load_exchange_matrix();
                for (label, p) in [("hinge projection", &hinge), ("load exchange", &load)] {
                    let dev = max_abs_diff(&stationary_distribution(p)?, &target);
                    recs.push(CheckRecord::new(
                        name.clone(),
                        format!("{label}: max |pi - w/|w||"),
                        STATIONARY_TOL,
                        dev,
                        dev <= STATIONARY_TOL,
                    ));
                }
                if ws.space().len() > 1 {
                    let cap = (n as f64).powi(3);
                    let spread = match off_diagonal_ratio_range(&hinge, &load) {
                        Some((lo, hi)) => hi.max(1.0 / lo),
                        None => f64::INFINITY,
                    };
                    recs.push(CheckRecord::new(name, "off-diagonal ratio hinge/load", cap, spread, spread <= cap));
                }
            }
            Ok(recs)
        })?);
    }
    Ok(out)
}

/// All boxes for `n <= 5`; unit and near-regular boxes at `n = 6`, where the
/// full family has 230230 members.
pub fn mconvex_boxes(max_n: usize) -> Vec<DegreeInterval> {
    let mut set = BTreeSet::new();
    for n in 1..=max_n {
        let boxes = if n <= 5 {
            all_boxes(n)
        } else {
            let mut b = unit_boxes(n);
            b.extend(near_regular_boxes(n, false));
            b
        };
        for iv in boxes {
            set.insert((iv.lower().to_vec(), iv.upper().to_vec()));
        }
    }
    set.into_iter()
        .map(|(l, u)| DegreeInterval::new(l, u).expect("family boxes are valid"))
        .collect()
}

fn mconvex(max_n: usize) -> Result<Vec<CheckRecord>> {
    let boxes = mconvex_boxes(max_n);
    collect_records(&boxes, |iv| {
        let mut recs = Vec::new();
        for m in feasible_edge_counts(iv) {
            let name = format!("{} m={m}", box_name(iv));
            let full = degree_space_is_m_convex(&DegreeSpace::full_box(iv, m)?)?;
            recs.push(CheckRecord::new(
                name.clone(),
                "exchange failures",
                0.0,
                f64::from(u8::from(full.is_some())),
                full.is_none(),
            ));
            let graphical = degree_space_is_m_convex(&DegreeSpace::new(iv, m)?)?;
            recs.push(CheckRecord::diagnostic(
                name,
                "graphical support exchange failures",
                f64::from(u8::from(graphical.is_some())),
            ));
        }
        Ok(recs)
    })
}

/// Sorted sequences on `n` nodes meeting the stability inequality.
pub fn stable_sequences(n: usize) -> Vec<DegreeSequence> {
    let mut out = Vec::new();
    let mut d = vec![0usize; n];
    fn go(d: &mut Vec<usize>, i: usize, min: usize, out: &mut Vec<DegreeSequence>) {
        let n = d.len();
        if i == n {
            if d.iter().sum::<usize>() % 2 == 0 && satisfies_stability_inequality(d) && crate::graph::is_graphical(d) {
                out.push(DegreeSequence(d.clone()));
            }
            return;
        }
        for v in min..n {
            d[i] = v;
            go(d, i + 1, v, out);
        }
    }
    if n > 0 {
        go(&mut d, 0, 0, &mut out);
    }
    out
}

/// Checks sequences meeting the stability inequality, and records the same
/// quantities for the remaining near-regular sequences as diagnostics.
fn stability(max_n: usize) -> Result<Vec<CheckRecord>> {
    let mut seqs: Vec<(DegreeSequence, bool)> = Vec::new();
    for n in 2..=max_n {
        let stable = stable_sequences(n);
        let extra: Vec<DegreeSequence> = near_regular_sequences(n)
            .into_iter()
            .filter(|d| d.is_graphical() && !stable.contains(d))
            .collect();
        seqs.extend(stable.into_iter().map(|d| (d, true)));
        seqs.extend(extra.into_iter().map(|d| (d, false)));
    }
    collect_records(&seqs, |(d, qualifying)| {
        let paths = check_strong_stability(d, STABILITY_K)?;
        let transforms = check_short_cycle_transforms(d, TRANSFORM_BUDGET)?;
        let name = seq_name(d);
        if !qualifying {
            return Ok(vec![
                CheckRecord::diagnostic(
                    name.clone(),
                    "near-regular: perturbed graphs without a repair path",
                    paths.failures.len() as f64,
                ),
                CheckRecord::diagnostic(
                    name.clone(),
                    "near-regular: transform budget failures",
                    transforms.failures.len() as f64,
                ),
                CheckRecord::diagnostic(
                    name,
                    "near-regular: unattainable transform goals",
                    transforms.unattainable.len() as f64,
                ),
            ]);
        }
        let longest = if paths.failures.is_empty() {
            paths.longest as f64
        } else {
            f64::INFINITY
        };
        let largest = if transforms.failures.is_empty() {
            transforms.largest as f64
        } else {
            f64::INFINITY
        };
        Ok(vec![
            CheckRecord::new(
                name.clone(),
                "longest repair path",
                STABILITY_K as f64,
                longest,
                paths.failures.is_empty(),
            ),
            CheckRecord::new(
                name.clone(),
                "largest transform",
                TRANSFORM_BUDGET as f64,
                largest,
                transforms.failures.is_empty(),
            ),
            CheckRecord::diagnostic(name, "unattainable transform goals", transforms.unattainable.len() as f64),
        ])
    })
}

/// Near-regular parameters on the s-bound grid that meet the side
/// conditions `r - r^alpha >= r/4` and `n^alpha <= rho n / 2`.
pub fn sbound_grid(n: usize) -> Vec<NearRegularParams> {
    let mut out = Vec::new();
    for alpha in SBOUND_ALPHAS {
        for k in 1..20 {
            let rho = k as f64 / 20.0;
            if (n as f64).powf(alpha) > rho * n as f64 / 2.0 {
                continue;
            }
            for r in 2..n {
                let Ok(p) = NearRegularParams::new(r, alpha, rho) else { continue };
                if p.fits(n) && r as f64 - (r as f64).powf(alpha) >= r as f64 / 4.0 && p.degree_range(n).is_some() {
                    out.push(p);
                }
            }
        }
    }
    out
}

fn params_name(p: &NearRegularParams, n: usize) -> String {
    format!("n={n} r={} alpha={} rho={}", p.r, p.alpha, p.rho)
}

fn s_value(d: &DegreeSequence) -> Option<f64> {
    let total = d.sum();
    let n = d.len();
    if total % 2 == 1 || total == 0 || total >= n * (n - 1) {
        return None;
    }
    sequence_stats::<f64>(d).ok().map(|st| st.s)
}

fn sbound(max_n: usize, seed: u64, samples: usize) -> Result<Vec<CheckRecord>> {
    let mut configs = Vec::new();
    for n in 2..=max_n {
        configs.extend(sbound_grid(n).into_iter().map(|p| (n, p)));
    }
    collect_records(&configs, |(n, p)| {
        let n = *n;
        let (lo, hi) = p.degree_range(n).expect("grid keeps nonempty ranges");
        let bound = s_bound(p, n);
        let mut worst: f64 = 0.0;
        let mut seen = 0usize;
        let mut visit = |d: &DegreeSequence| {
            if let Some(s) = s_value(d) {
                worst = worst.max(s);
                seen += 1;
            }
        };
        let quantity;
        if n <= SBOUND_EXHAUSTIVE_MAX_N {
            quantity = "max s(d), exhaustive";
            for_each_sorted(n, lo, hi, &mut |d| visit(&DegreeSequence(d.to_vec())));
        } else {
            quantity = "max s(d), sampled";
            // Two-valued sequences maximize the spread for a given sum.
            for k in 0..=n {
                let mut d = vec![lo; n];
                d[..k].fill(hi);
                visit(&DegreeSequence(d));
            }
            let mut rng = seeded_rng(seed, (n as u64) << 32 | p.r as u64);
            for _ in 0..samples {
                let d: Vec<usize> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
                visit(&DegreeSequence(d));
            }
        }
        if seen == 0 {
            return Ok(Vec::new());
        }
        let name = params_name(p, n);
        Ok(vec![CheckRecord::new(name, quantity, bound, worst, worst <= bound * (1.0 + 1e-12))])
    })
}

fn for_each_sorted(n: usize, lo: usize, hi: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(d: &mut Vec<usize>, i: usize, min: usize, hi: usize, f: &mut dyn FnMut(&[usize])) {
        if i == d.len() {
            f(d);
            return;
        }
        for v in min..=hi {
            d[i] = v;
            go(d, i + 1, v, hi, f);
        }
    }
    let mut d = vec![lo; n];
    go(&mut d, 0, lo, hi, f);
}

/// Records `ln w(d)` for `(2,2,2,2)` and the ratio `w(d)/|G(d)|` for every
/// regular sequence on an even number of nodes up to `max_n`, starting at 6.
fn lw(max_n: usize) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let square = DegreeSequence(vec![2; 4]);
    let exact = 2f64.sqrt() * 0.25f64.exp() * 16.0 / 9.0;
    let value = lw_log_weight::<f64>(&square)?.exp();
    out.push(CheckRecord::new(
        seq_name(&square),
        "|w - sqrt(2) e^(1/4) 16/9|",
        1e-3,
        (value - exact).abs(),
        (value - exact).abs() <= 1e-3,
    ));
    out.push(CheckRecord::diagnostic(seq_name(&square), "w/|G(d)|", value / 3.0));
    let regular: Vec<DegreeSequence> = (6..=max_n)
        .step_by(2)
        .flat_map(|n| (1..n - 1).map(move |r| DegreeSequence(vec![r; n])))
        .collect();
    out.extend(collect_records(&regular, |d| {
        let log_exact = ln_biguint(&count_realizations(d)?);
        let log_w = lw_log_weight::<f64>(d)?;
        Ok(vec![CheckRecord::diagnostic(seq_name(d), "w/|G(d)|", (log_w - log_exact).exp())])
    })?);
    Ok(out)
}
