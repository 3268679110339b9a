//! Approximate counting by telescoping products, and sampling by descent.
//!
//! `|G_m(l,u)|` is written as a product of ratios
//! `|G_m(a^i,u)| / |G_m(a^(i+1),u)|` along a ladder of raised lower bounds,
//! each estimated as the inverse hit rate of uniform samples from the larger
//! set landing in the smaller one, times a final factor that is counted
//! directly. Summing over `m` gives `|G(l,u)|`, and splitting the box one
//! coordinate at a time according to the counts of the two halves gives a
//! sampler for `G(l,u)`.

use crate::chains::{seeded_rng, TransitionKernel};
use crate::error::{Error, Result};
use crate::graph::{feasible_edge_counts, find_degree_sequence, realize, realize_in_interval, DegreeInterval, DegreeSequence, Graph};
use crate::oracle::{count_realizations, enumerate_graphs, Constraint, StateSpace};
use crate::weights::{ln_biguint, lw_log_weight};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Raised lower bounds `a^0 = l < a^1 < ... < a^p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ladder {
    pub upper: Vec<usize>,
    pub rungs: Vec<Vec<usize>>,
    /// Whether some rung raises a single coordinate.
    pub single_steps: bool,
}

impl Ladder {
    /// Number of ratios `p`.
    pub fn len(&self) -> usize {
        self.rungs.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn last(&self) -> &[usize] {
        self.rungs.last().expect("ladder has a first rung")
    }

    pub fn interval(&self, i: usize) -> DegreeInterval {
        DegreeInterval::new(self.rungs[i].clone(), self.upper.clone()).expect("rungs stay below the upper bound")
    }
}

/// The ladder from `l` to `u` that always raises the two lowest-indexed
/// coordinates still below their upper bound.
pub fn build_ladder(iv: &DegreeInterval) -> Result<Ladder> {
    let upper = iv.upper().to_vec();
    let mut a = iv.lower().to_vec();
    let mut rungs = vec![a.clone()];
    loop {
        let mut raisable = (0..a.len()).filter(|&i| a[i] < upper[i]);
        match (raisable.next(), raisable.next()) {
            (None, _) => break,
            (Some(_), None) => return Err(Error::OddResidue { step: rungs.len() - 1 }),
            (Some(v), Some(w)) => {
                a[v] += 1;
                a[w] += 1;
                rungs.push(a.clone());
            }
        }
    }
    Ok(Ladder {
        upper,
        rungs,
        single_steps: false,
    })
}

/// A ladder for `G_m(l,u)` that stops at degree sum `2m`, where the last set
/// is `G(a^p)`.
///
/// Each rung raises the two lowest-indexed coordinates whose raise keeps
/// `G_m(a,u)` nonempty. When no pair qualifies (one unit of slack left, or
/// all slack on one node) the lowest feasible single coordinate is raised
/// instead and the ladder is flagged.
pub fn build_ladder_for_m(iv: &DegreeInterval, m: usize) -> Result<Ladder> {
    if find_degree_sequence(iv, m).is_none() {
        return Err(Error::Infeasible(format!("no graph with {m} edges in the interval")));
    }
    let upper = iv.upper().to_vec();
    let n = upper.len();
    let mut a = iv.lower().to_vec();
    let mut rungs = vec![a.clone()];
    let mut single_steps = false;
    let feasible = |a: &[usize]| {
        DegreeInterval::new(a.to_vec(), upper.clone())
            .ok()
            .and_then(|iv| find_degree_sequence(&iv, m))
            .is_some()
    };
    while a.iter().sum::<usize>() < 2 * m {
        let slack = 2 * m - a.iter().sum::<usize>();
        let mut next = None;
        if slack >= 2 {
            'pairs: for v in 0..n {
                for w in v + 1..n {
                    if a[v] < upper[v] && a[w] < upper[w] {
                        let mut b = a.clone();
                        b[v] += 1;
                        b[w] += 1;
                        if feasible(&b) {
                            next = Some(b);
                            break 'pairs;
                        }
                    }
                }
            }
        }
        if next.is_none() {
            for v in (0..n).filter(|&v| a[v] < upper[v]) {
                let mut b = a.clone();
                b[v] += 1;
                if feasible(&b) {
                    single_steps = true;
                    next = Some(b);
                    break;
                }
            }
        }
        a = next.ok_or(Error::OddResidue { step: rungs.len() - 1 })?;
        rungs.push(a.clone());
    }
    Ok(Ladder {
        upper,
        rungs,
        single_steps,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    /// Counted exactly; no sampling.
    Exact,
    /// Sampled ratios times an exact final factor.
    Telescoping,
    /// Final factor from the asymptotic formula.
    Formula,
}

/// How ratio samples are drawn from `G_m(a^i,u)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplerChoice {
    /// Exact when the space can be enumerated, otherwise the chain.
    Auto,
    /// Uniform draws from the enumerated space.
    Exact,
    /// Switch–hinge-flip chain: `burn_in` steps, then one sample every
    /// `thinning` steps.
    Chain { burn_in: u64, thinning: u64 },
}

/// Largest `n` for which samplers enumerate the state space.
pub const EXACT_SAMPLER_MAX_N: usize = 7;
/// Largest `n` for which the final factor is counted exactly.
pub const EXACT_FINAL_MAX_N: usize = 10;
/// Default `c` in the sample-size rule.
pub const DEFAULT_SAMPLE_CONSTANT: f64 = 1.0;
/// Sample-size doublings after a rung sees no hits.
pub const ZERO_HIT_RETRIES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountConfig {
    pub eps: f64,
    pub delta: f64,
    pub seed: u64,
    /// `c` in `N = ceil(c p^2 q^2 ln(2p/delta) / eps^2)`.
    pub sample_constant: f64,
    /// Assumed bound `q` on every ratio; defaults to `n`.
    pub ratio_bound: Option<f64>,
    pub sampler: SamplerChoice,
}

impl CountConfig {
    pub fn new(eps: f64, delta: f64, seed: u64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0 && delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParams(format!("eps = {eps} and delta = {delta} must lie in (0, 1)")));
        }
        Ok(CountConfig {
            eps,
            delta,
            seed,
            sample_constant: DEFAULT_SAMPLE_CONSTANT,
            ratio_bound: None,
            sampler: SamplerChoice::Auto,
        })
    }

    fn ratio_bound_for(&self, n: usize) -> f64 {
        self.ratio_bound.unwrap_or(n as f64).max(1.0)
    }

    /// Samples per rung for a ladder of `p` ratios.
    pub fn samples_per_rung(&self, n: usize, p: usize) -> u64 {
        let p = p.max(1) as f64;
        let q = self.ratio_bound_for(n);
        let raw = self.sample_constant * p * p * q * q * (2.0 * p / self.delta).ln() / (self.eps * self.eps);
        raw.ceil().max(1.0) as u64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountEstimate {
    pub log_value: f64,
    pub value_if_small: Option<f64>,
    pub eps: f64,
    pub delta: f64,
    pub method: CountMethod,
    pub samples_used: u64,
    pub ladder_length: usize,
    pub per_rung_ratios: Vec<f64>,
    /// Ratio bound `q` used for sample sizing.
    pub ratio_bound: f64,
    /// Whether any estimated ratio exceeded `ratio_bound`.
    pub bound_exceeded: bool,
    /// Per-`m` estimates when this is a sum over edge counts.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub terms: Vec<TermEstimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermEstimate {
    pub m: usize,
    pub log_value: f64,
    pub method: CountMethod,
    pub ladder_length: usize,
    pub per_rung_ratios: Vec<f64>,
}

/// Values below this are reported directly as well as in log space.
const SMALL_LOG: f64 = 700.0;

fn small(log_value: f64) -> Option<f64> {
    (log_value < SMALL_LOG).then(|| log_value.exp())
}

/// `N / hits` for `N` draws, with `ZeroHits` when nothing lands in the subset.
pub fn estimate_ratio<F, M>(mut draw: F, member: M, samples: u64, rung: usize) -> Result<f64>
where
    F: FnMut() -> Graph,
    M: Fn(&Graph) -> bool,
{
    let hits = (0..samples).filter(|_| member(&draw())).count() as u64;
    if hits == 0 {
        return Err(Error::ZeroHits { rung });
    }
    Ok(samples as f64 / hits as f64)
}

enum Draw {
    Exact(StateSpace),
    Chain {
        kernel: TransitionKernel,
        state: Graph,
        thinning: u64,
    },
}

impl Draw {
    fn new(iv: &DegreeInterval, m: usize, choice: SamplerChoice, rng: &mut ChaCha8Rng) -> Result<Self> {
        let exact = match choice {
            SamplerChoice::Auto => iv.n() <= EXACT_SAMPLER_MAX_N,
            SamplerChoice::Exact => true,
            SamplerChoice::Chain { .. } => false,
        };
        if exact {
            return Ok(Draw::Exact(enumerate_graphs(&Constraint::IntervalEdges(iv.clone(), m))?));
        }
        let (burn_in, thinning) = match choice {
            SamplerChoice::Chain { burn_in, thinning } => (burn_in, thinning),
            _ => {
                let t = default_chain_steps(iv.n(), m);
                (t, t)
            }
        };
        let kernel = TransitionKernel::switch_hinge(iv.clone(), Some(m));
        let mut state = realize_in_interval(iv, m)?;
        for _ in 0..burn_in {
            kernel.step(&mut state, rng);
        }
        Ok(Draw::Chain { kernel, state, thinning })
    }

    fn next(&mut self, rng: &mut ChaCha8Rng) -> Graph {
        match self {
            Draw::Exact(space) => space.graph(rng.gen_range(0..space.len())),
            Draw::Chain { kernel, state, thinning } => {
                for _ in 0..*thinning {
                    kernel.step(state, rng);
                }
                state.clone()
            }
        }
    }
}

/// Chain steps between samples when none are configured: `50 n^2 (m + 1)`.
pub fn default_chain_steps(n: usize, m: usize) -> u64 {
    50 * (n * n) as u64 * (m as u64 + 1)
}

/// `ln |G(d)|` with the method used: exact for small `n`, otherwise the
/// asymptotic formula.
fn final_factor(d: &[usize]) -> Result<(f64, CountMethod)> {
    let d = DegreeSequence(d.to_vec());
    if d.len() <= EXACT_FINAL_MAX_N {
        let c = count_realizations(&d)?;
        if c == num_bigint::BigUint::ZERO {
            return Err(Error::NotGraphical);
        }
        return Ok((ln_biguint(&c), CountMethod::Exact));
    }
    Ok((lw_log_weight::<f64>(&d)?, CountMethod::Formula))
}

fn rung_stream(m: usize, rung: usize) -> u64 {
    ((m as u64) << 20) | rung as u64
}

/// Estimate of `|G_m(l,u)|`.
pub fn estimate_count_m(iv: &DegreeInterval, m: usize, cfg: &CountConfig) -> Result<CountEstimate> {
    let ladder = build_ladder_for_m(iv, m)?;
    let p = ladder.len();
    let n = iv.n();
    let samples = cfg.samples_per_rung(n, p);
    let results: Vec<Result<(f64, u64)>> = (0..p)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded_rng(cfg.seed, rung_stream(m, i));
            let mut draw = Draw::new(&ladder.interval(i), m, cfg.sampler, &mut rng)?;
            let next = &ladder.rungs[i + 1];
            let member = |g: &Graph| g.degrees().iter().zip(next).all(|(d, a)| d >= a);
            let mut size = samples;
            let mut used = 0;
            for attempt in 0..=ZERO_HIT_RETRIES {
                used += size;
                match estimate_ratio(|| draw.next(&mut rng), member, size, i) {
                    Ok(r) => return Ok((r, used)),
                    Err(e) if attempt == ZERO_HIT_RETRIES => return Err(e),
                    Err(_) => size *= 2,
                }
            }
            unreachable!("the final attempt returns")
        })
        .collect();
    let mut ratios = Vec::with_capacity(p);
    let mut used = 0;
    for r in results {
        let (ratio, s) = r?;
        ratios.push(ratio);
        used += s;
    }
    let (log_final, final_method) = final_factor(ladder.last())?;
    let log_value = log_final + ratios.iter().map(|r| r.ln()).sum::<f64>();
    let method = match (final_method, p) {
        (CountMethod::Formula, _) => CountMethod::Formula,
        (_, 0) => CountMethod::Exact,
        _ => CountMethod::Telescoping,
    };
    let q = cfg.ratio_bound_for(n);
    Ok(CountEstimate {
        log_value,
        value_if_small: small(log_value),
        eps: if method == CountMethod::Exact { 0.0 } else { cfg.eps },
        delta: if method == CountMethod::Exact { 0.0 } else { cfg.delta },
        method,
        samples_used: used,
        ladder_length: p,
        bound_exceeded: ratios.iter().any(|&r| r > q),
        per_rung_ratios: ratios,
        ratio_bound: q,
        terms: Vec::new(),
    })
}

/// Estimate of `|G(l,u)|` as the sum of per-`m` estimates, each run with
/// failure probability `delta / n^2`.
pub fn estimate_count(iv: &DegreeInterval, cfg: &CountConfig) -> Result<CountEstimate> {
    let ms = feasible_edge_counts(iv);
    if ms.is_empty() {
        return Err(Error::Infeasible("no graph satisfies the interval".into()));
    }
    let n = iv.n().max(2);
    let per_m = CountConfig {
        delta: cfg.delta / (n * n) as f64,
        ..*cfg
    };
    let mut terms = Vec::with_capacity(ms.len());
    let mut used = 0;
    let mut exceeded = false;
    let mut ratios = Vec::new();
    let mut ladder_length = 0;
    for &m in &ms {
        let e = estimate_count_m(iv, m, &per_m)?;
        used += e.samples_used;
        exceeded |= e.bound_exceeded;
        ladder_length = ladder_length.max(e.ladder_length);
        ratios.extend(&e.per_rung_ratios);
        terms.push(TermEstimate {
            m,
            log_value: e.log_value,
            method: e.method,
            ladder_length: e.ladder_length,
            per_rung_ratios: e.per_rung_ratios,
        });
    }
    let top = terms.iter().map(|t| t.log_value).fold(f64::NEG_INFINITY, f64::max);
    let log_value = top + terms.iter().map(|t| (t.log_value - top).exp()).sum::<f64>().ln();
    let method = if terms.iter().any(|t| t.method == CountMethod::Formula) {
        CountMethod::Formula
    } else if terms.iter().all(|t| t.method == CountMethod::Exact) {
        CountMethod::Exact
    } else {
        CountMethod::Telescoping
    };
    Ok(CountEstimate {
        log_value,
        value_if_small: small(log_value),
        eps: if method == CountMethod::Exact { 0.0 } else { cfg.eps },
        delta: if method == CountMethod::Exact { 0.0 } else { cfg.delta },
        method,
        samples_used: used,
        ladder_length,
        per_rung_ratios: ratios,
        ratio_bound: per_m.ratio_bound_for(iv.n()),
        bound_exceeded: exceeded,
        terms,
    })
}

/// How the descent sampler draws from `G(d)` once the box has shrunk to `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LeafSampler {
    Auto,
    Exact,
    /// Lazy switch chain run for this many steps from a fixed realization.
    Switch {
        steps: u64,
    },
}

/// Draws from `G(l,u)` by repeatedly splitting the box on the lowest
/// coordinate with `l_i < u_i` into `d_i = l_i` and `d_i >= l_i + 1`,
/// choosing a half with probability proportional to its size, and finally
/// sampling from `G(d)`.
///
/// Box sizes are counted exactly for `n <= 10` and estimated otherwise;
/// counts and leaf spaces are cached across draws.
pub struct IntervalSampler {
    iv: DegreeInterval,
    count_cfg: CountConfig,
    leaf: LeafSampler,
    counts: HashMap<(Vec<usize>, Vec<usize>), f64>,
    leaves: HashMap<Vec<usize>, StateSpace>,
}

impl IntervalSampler {
    pub fn new(iv: &DegreeInterval, eps: f64, delta: f64, seed: u64) -> Result<Self> {
        // Per-split accuracy so the errors over all splits stay within eps.
        let depth = iv.upper_sum() - iv.lower_sum();
        let splits = depth.max(1) as f64;
        let count_cfg = CountConfig::new(eps / (4.0 * splits), delta / (2.0 * splits), seed)?;
        let mut s = IntervalSampler {
            iv: iv.clone(),
            count_cfg,
            leaf: LeafSampler::Auto,
            counts: HashMap::new(),
            leaves: HashMap::new(),
        };
        if s.log_count(iv.lower(), iv.upper())?.is_infinite() {
            return Err(Error::Infeasible("no graph satisfies the interval".into()));
        }
        Ok(s)
    }

    pub fn with_leaf(mut self, leaf: LeafSampler) -> Self {
        self.leaf = leaf;
        self
    }

    /// `ln |G(l,u)|`, or `-inf` when empty.
    fn log_count(&mut self, lower: &[usize], upper: &[usize]) -> Result<f64> {
        let key = (lower.to_vec(), upper.to_vec());
        if let Some(&c) = self.counts.get(&key) {
            return Ok(c);
        }
        let iv = DegreeInterval::new(key.0.clone(), key.1.clone())?;
        let c = if iv.n() <= EXACT_FINAL_MAX_N {
            let total = crate::oracle::count_interval(&iv)?;
            if total == num_bigint::BigUint::ZERO {
                f64::NEG_INFINITY
            } else {
                ln_biguint(&total)
            }
        } else if feasible_edge_counts(&iv).is_empty() {
            f64::NEG_INFINITY
        } else {
            estimate_count(&iv, &self.count_cfg)?.log_value
        };
        self.counts.insert(key, c);
        Ok(c)
    }

    /// Probabilities of the halves `d_i = l_i` and `d_i >= l_i + 1`.
    pub fn split_probabilities(&mut self, lower: &[usize], upper: &[usize], i: usize) -> Result<(f64, f64)> {
        let mut low_upper = upper.to_vec();
        low_upper[i] = lower[i];
        let mut high_lower = lower.to_vec();
        high_lower[i] += 1;
        let a = self.log_count(lower, &low_upper)?;
        let b = self.log_count(&high_lower, upper)?;
        let top = a.max(b);
        let (wa, wb) = ((a - top).exp(), (b - top).exp());
        Ok((wa / (wa + wb), wb / (wa + wb)))
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Graph> {
        let mut lower = self.iv.lower().to_vec();
        let mut upper = self.iv.upper().to_vec();
        while let Some(i) = (0..lower.len()).find(|&i| lower[i] < upper[i]) {
            let (p_low, _) = self.split_probabilities(&lower, &upper, i)?;
            if rng.gen::<f64>() < p_low {
                upper[i] = lower[i];
            } else {
                lower[i] += 1;
            }
        }
        self.sample_leaf(&lower, rng)
    }

    fn sample_leaf<R: Rng + ?Sized>(&mut self, d: &[usize], rng: &mut R) -> Result<Graph> {
        let n = d.len();
        let exact = match self.leaf {
            LeafSampler::Auto => n <= EXACT_SAMPLER_MAX_N,
            LeafSampler::Exact => true,
            LeafSampler::Switch { .. } => false,
        };
        if exact {
            if !self.leaves.contains_key(d) {
                let space = enumerate_graphs(&Constraint::Degrees(DegreeSequence(d.to_vec())))?;
                self.leaves.insert(d.to_vec(), space);
            }
            let space = &self.leaves[d];
            return Ok(space.graph(rng.gen_range(0..space.len())));
        }
        let seq = DegreeSequence(d.to_vec());
        let steps = match self.leaf {
            LeafSampler::Switch { steps } => steps,
            _ => default_chain_steps(n, seq.sum() / 2),
        };
        let kernel = TransitionKernel::switch(&seq, crate::chains::DEFAULT_SWITCH_Q)?;
        let mut g = realize(&seq)?;
        for _ in 0..steps {
            kernel.step(&mut g, rng);
        }
        Ok(g)
    }
}

/// One draw from `G(l,u)`; see [`IntervalSampler`].
pub fn sample_interval(iv: &DegreeInterval, eps: f64, delta: f64, seed: u64) -> Result<Graph> {
    let mut rng = seeded_rng(seed, 0);
    IntervalSampler::new(iv, eps, delta, seed)?.sample(&mut rng)
}
