//! Chains on degree sequences and on edge counts.
//!
//! The graph chains are analysed by projecting onto coarser state spaces:
//! the set of degree sequences with a fixed degree sum, and the set of
//! feasible edge counts. This module builds those spaces and the three
//! projected chains, each reversible with respect to the weights it is
//! given.

use crate::error::{Error, Result};
use crate::graph::{feasible_edge_counts, is_graphical, DegreeInterval, DegreeSequence};
use crate::oracle::{for_each_in_box, interval_counts, StochasticMatrix};
use crate::weights::{ln_biguint, WeightModel};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

/// Largest box scanned when listing degree sequences.
pub const BOX_CAP: usize = 1 << 22;

/// Degree sequences `d` with `l <= d <= u` and `sum(d) = 2m`.
#[derive(Clone, Debug)]
pub struct DegreeSpace {
    interval: DegreeInterval,
    m: usize,
    elements: Vec<DegreeSequence>,
    index: HashMap<Vec<usize>, usize>,
}

fn box_size(iv: &DegreeInterval) -> usize {
    iv.lower()
        .iter()
        .zip(iv.upper())
        .try_fold(1usize, |acc, (l, u)| acc.checked_mul(u - l + 1))
        .unwrap_or(usize::MAX)
}

impl DegreeSpace {
    /// The graphical sequences in the box with degree sum `2m`, i.e. the
    /// support of `d -> |G(d)|`.
    pub fn new(iv: &DegreeInterval, m: usize) -> Result<Self> {
        Self::build(iv, m, true)
    }

    /// Every box vector with degree sum `2m`, graphical or not.
    pub fn full_box(iv: &DegreeInterval, m: usize) -> Result<Self> {
        Self::build(iv, m, false)
    }

    fn build(iv: &DegreeInterval, m: usize, graphical_only: bool) -> Result<Self> {
        let size = box_size(iv);
        if size > BOX_CAP {
            return Err(Error::TooLarge {
                what: "degree box",
                size,
                cap: BOX_CAP,
            });
        }
        let mut elements = Vec::new();
        for_each_in_box(iv, |d| {
            if d.iter().sum::<usize>() == 2 * m && (!graphical_only || is_graphical(d)) {
                elements.push(DegreeSequence(d.to_vec()));
            }
        });
        if elements.is_empty() {
            return Err(Error::Infeasible(format!("no degree sequence in the box sums to {}", 2 * m)));
        }
        elements.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let index = elements.iter().enumerate().map(|(i, d)| (d.0.clone(), i)).collect();
        Ok(DegreeSpace {
            interval: iv.clone(),
            m,
            elements,
            index,
        })
    }

    pub fn interval(&self) -> &DegreeInterval {
        &self.interval
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.interval.n()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[DegreeSequence] {
        &self.elements
    }

    pub fn index_of(&self, d: &[usize]) -> Option<usize> {
        self.index.get(d).copied()
    }

    pub fn contains(&self, d: &[usize]) -> bool {
        self.index.contains_key(d)
    }

    /// Indices of `d - e_i + e_j` in the space, for `i != j`, each paired
    /// with `(i, j)`.
    fn moves(&self, d: &[usize]) -> Vec<(usize, (usize, usize))> {
        let n = d.len();
        let mut out = Vec::new();
        let mut e = d.to_vec();
        for i in 0..n {
            if e[i] == 0 {
                continue;
            }
            e[i] -= 1;
            for j in 0..n {
                if j != i {
                    e[j] += 1;
                    if let Some(k) = self.index_of(&e) {
                        out.push((k, (i, j)));
                    }
                    e[j] -= 1;
                }
            }
            e[i] += 1;
        }
        out
    }

    /// Members at L1 distance 2 from `d`.
    pub fn neighbors(&self, d: &DegreeSequence) -> Vec<DegreeSequence> {
        let mut out: Vec<DegreeSequence> = self.moves(&d.0).into_iter().map(|(k, _)| self.elements[k].clone()).collect();
        out.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Natural-log weights of every member under `model`.
    pub fn log_weights(&self, model: WeightModel) -> Result<Vec<f64>> {
        self.elements.iter().map(|d| model.log_weight(d)).collect()
    }

    pub fn weighted(self, model: WeightModel) -> Result<WeightedDegreeSpace> {
        let log_w = self.log_weights(model)?;
        WeightedDegreeSpace::new(self, log_w)
    }
}

/// A degree space with a positive weight on every member.
#[derive(Clone, Debug)]
pub struct WeightedDegreeSpace {
    space: DegreeSpace,
    log_w: Vec<f64>,
}

fn require_finite(log_w: &[f64]) -> Result<()> {
    match log_w.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NotPositive { index }),
        None => Ok(()),
    }
}

impl WeightedDegreeSpace {
    pub fn new(space: DegreeSpace, log_w: Vec<f64>) -> Result<Self> {
        if log_w.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                got: log_w.len(),
            });
        }
        require_finite(&log_w)?;
        Ok(WeightedDegreeSpace { space, log_w })
    }

    pub fn space(&self) -> &DegreeSpace {
        &self.space
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_w
    }

    /// Weights normalised to a probability vector.
    pub fn distribution(&self) -> Vec<f64> {
        normalise(&self.log_w)
    }

    fn locate(&self, d: &DegreeSequence) -> Result<usize> {
        self.space
            .index_of(&d.0)
            .ok_or_else(|| Error::InvalidParams(format!("{:?} is not in the degree space", d.0)))
    }

    /// One Metropolis step: pick an ordered pair `(i, j)` uniformly, hold
    /// with probability 1/2, otherwise move to `d - e_i + e_j` when it is a
    /// member, accepting with probability `min(1, w(d')/w(d))`. Each
    /// neighbour is thus proposed with probability `1/(2n^2)`.
    pub fn hinge_projection_step<R: Rng + ?Sized>(&self, d: &DegreeSequence, rng: &mut R) -> Result<DegreeSequence> {
        let x = self.locate(d)?;
        let n = self.space.n();
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if rng.gen_bool(0.5) || i == j || d.0[i] == 0 {
            return Ok(d.clone());
        }
        let mut e = d.0.clone();
        e[i] -= 1;
        e[j] += 1;
        match self.space.index_of(&e) {
            Some(y) if rng.gen::<f64>() < (self.log_w[y] - self.log_w[x]).exp() => Ok(DegreeSequence(e)),
            _ => Ok(d.clone()),
        }
    }

    /// One load-exchange step: pick `i` uniformly, then move to one of the
    /// members `d - e_i + e_j` (including `d` itself, `j = i`) with
    /// probability proportional to its weight.
    pub fn load_exchange_step<R: Rng + ?Sized>(&self, d: &DegreeSequence, rng: &mut R) -> Result<DegreeSequence> {
        let x = self.locate(d)?;
        let i = rng.gen_range(0..self.space.n());
        let options = self.exchange_options(x, i);
        let probs = normalise(&options.iter().map(|&k| self.log_w[k]).collect::<Vec<_>>());
        let mut u: f64 = rng.gen();
        for (k, p) in options.iter().zip(&probs) {
            if u < *p {
                return Ok(self.space.elements[*k].clone());
            }
            u -= p;
        }
        Ok(self.space.elements[*options.last().expect("d itself is an option")].clone())
    }

    /// Members `d - e_i + e_j` for all `j`, starting with `d` itself.
    fn exchange_options(&self, x: usize, i: usize) -> Vec<usize> {
        let d = &self.space.elements[x].0;
        let mut out = vec![x];
        if d[i] == 0 {
            return out;
        }
        let mut e = d.clone();
        e[i] -= 1;
        for j in 0..d.len() {
            if j != i {
                e[j] += 1;
                if let Some(k) = self.space.index_of(&e) {
                    out.push(k);
                }
                e[j] -= 1;
            }
        }
        out
    }

    pub fn hinge_projection_matrix(&self) -> StochasticMatrix<f64> {
        let n = self.space.n() as f64;
        let rows = (0..self.space.len())
            .map(|x| {
                let mut row: Vec<(usize, f64)> = self
                    .space
                    .moves(&self.space.elements[x].0)
                    .into_iter()
                    .map(|(y, _)| (y, (self.log_w[y] - self.log_w[x]).exp().min(1.0) / (2.0 * n * n)))
                    .collect();
                let moved: f64 = row.iter().map(|e| e.1).sum();
                row.push((x, 1.0 - moved));
                row
            })
            .collect();
        StochasticMatrix::from_rows(rows)
    }

    pub fn load_exchange_matrix(&self) -> StochasticMatrix<f64> {
        let n = self.space.n();
        let rows = (0..self.space.len())
            .map(|x| {
                let mut acc: HashMap<usize, f64> = HashMap::new();
                for i in 0..n {
                    let options = self.exchange_options(x, i);
                    let probs = normalise(&options.iter().map(|&k| self.log_w[k]).collect::<Vec<_>>());
                    for (k, p) in options.into_iter().zip(probs) {
                        *acc.entry(k).or_insert(0.0) += p / n as f64;
                    }
                }
                // Recompute the diagonal so the row sums to one exactly.
                let moved: f64 = acc.iter().filter(|(k, _)| **k != x).map(|(_, p)| p).sum();
                acc.insert(x, 1.0 - moved);
                acc.into_iter().collect()
            })
            .collect();
        StochasticMatrix::from_rows(rows)
    }
}

fn normalise(log_w: &[f64]) -> Vec<f64> {
    let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|x| (x - top).exp()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Feasible edge counts `T = {m1, ..., m2}` with positive weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeCountSpace {
    pub ms: Vec<usize>,
    pub log_w: Vec<f64>,
}

impl EdgeCountSpace {
    pub fn new(ms: Vec<usize>, log_w: Vec<f64>) -> Result<Self> {
        if ms.is_empty() {
            return Err(Error::Infeasible("no feasible edge count".into()));
        }
        if ms.len() != log_w.len() {
            return Err(Error::LengthMismatch {
                expected: ms.len(),
                got: log_w.len(),
            });
        }
        require_finite(&log_w)?;
        Ok(EdgeCountSpace { ms, log_w })
    }

    /// `T` with exact weights `|G_m(l,u)|`.
    pub fn exact(iv: &DegreeInterval) -> Result<Self> {
        let (ms, log_w): (Vec<usize>, Vec<f64>) = interval_counts(iv)?
            .into_iter()
            .filter(|(_, c)| *c > num_bigint::BigUint::ZERO)
            .map(|(m, c)| (m, ln_biguint(&c)))
            .unzip();
        Self::new(ms, log_w)
    }

    /// `T` from the feasibility search, with caller-supplied weights.
    pub fn feasible(iv: &DegreeInterval, weight: impl Fn(usize) -> Result<f64>) -> Result<Self> {
        let ms = feasible_edge_counts(iv);
        let log_w = ms.iter().map(|&m| weight(m)).collect::<Result<Vec<_>>>()?;
        Self::new(ms, log_w)
    }

    pub fn len(&self) -> usize {
        self.ms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ms.is_empty()
    }

    fn position(&self, m: usize) -> Result<usize> {
        self.ms
            .iter()
            .position(|&x| x == m)
            .ok_or_else(|| Error::InvalidParams(format!("edge count {m} is not in T")))
    }

    fn up_prob(&self, i: usize, j: usize) -> f64 {
        0.25 * (self.log_w[j] - self.log_w[i]).exp().min(1.0)
    }

    /// Birth–death step moving to each neighbouring count with probability
    /// `min(1, w_j/w_i)/4`.
    pub fn step<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<usize> {
        let i = self.position(m)?;
        let u: f64 = rng.gen();
        let j = if u < 0.25 {
            i.checked_sub(1)
        } else if u < 0.5 {
            Some(i + 1).filter(|&j| j < self.len())
        } else {
            None
        };
        Ok(match j {
            Some(j) if rng.gen::<f64>() < (self.log_w[j] - self.log_w[i]).exp() => self.ms[j],
            _ => m,
        })
    }

    pub fn matrix(&self) -> StochasticMatrix<f64> {
        let k = self.len();
        let rows = (0..k)
            .map(|i| {
                let mut row = Vec::new();
                if i > 0 {
                    row.push((i - 1, self.up_prob(i, i - 1)));
                }
                if i + 1 < k {
                    row.push((i + 1, self.up_prob(i, i + 1)));
                }
                let moved: f64 = row.iter().map(|e: &(usize, f64)| e.1).sum();
                row.push((i, 1.0 - moved));
                row
            })
            .collect();
        StochasticMatrix::from_rows(rows)
    }

    pub fn distribution(&self) -> Vec<f64> {
        normalise(&self.log_w)
    }
}

/// A failed exchange: no `j` rescues `alpha - e_i + e_j` and
/// `beta + e_i - e_j` together.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeWitness {
    pub alpha: Vec<i64>,
    pub beta: Vec<i64>,
    pub i: usize,
}

/// Checks the symmetric exchange property: for all `alpha, beta` in `set`
/// and every `i` with `alpha_i > beta_i` there is `j` with
/// `alpha_j < beta_j` such that `alpha - e_i + e_j` and `beta + e_i - e_j`
/// are both in `set`. Returns the first failure.
pub fn check_m_convex(set: &[Vec<i64>]) -> Result<Option<ExchangeWitness>> {
    let Some(first) = set.first() else {
        return Ok(None);
    };
    let len = first.len();
    let sum: i64 = first.iter().sum();
    for v in set {
        if v.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                got: v.len(),
            });
        }
        if v.iter().sum::<i64>() != sum {
            return Err(Error::MixedSums);
        }
    }
    let members: HashSet<&[i64]> = set.iter().map(|v| v.as_slice()).collect();
    let mut a2 = vec![0; len];
    let mut b2 = vec![0; len];
    for alpha in set {
        for beta in set {
            for i in (0..len).filter(|&i| alpha[i] > beta[i]) {
                let ok = (0..len).filter(|&j| alpha[j] < beta[j]).any(|j| {
                    a2.copy_from_slice(alpha);
                    b2.copy_from_slice(beta);
                    a2[i] -= 1;
                    a2[j] += 1;
                    b2[i] += 1;
                    b2[j] -= 1;
                    members.contains(a2.as_slice()) && members.contains(b2.as_slice())
                });
                if !ok {
                    return Ok(Some(ExchangeWitness {
                        alpha: alpha.clone(),
                        beta: beta.clone(),
                        i,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Convenience wrapper over the members of a degree space.
pub fn degree_space_is_m_convex(space: &DegreeSpace) -> Result<Option<ExchangeWitness>> {
    let set: Vec<Vec<i64>> = space.elements().iter().map(|d| d.0.iter().map(|&x| x as i64).collect()).collect();
    check_m_convex(&set)
}

/// Lower bound `1/(4 |T|^3 max_{|i-j|=1} w_i/w_j)` on the spectral gap of
/// the birth–death chain with weights `w`; 1 for a single state.
pub fn logconcave_gap_bound(w: &[f64]) -> Result<f64> {
    if let Some(index) = w.iter().position(|&x| x.is_nan() || x <= 0.0) {
        return Err(Error::NotPositive { index });
    }
    if w.len() <= 1 {
        return Ok(1.0);
    }
    let ratio = w.windows(2).map(|p| (p[0] / p[1]).max(p[1] / p[0])).fold(1.0, f64::max);
    let size = w.len() as f64;
    Ok(1.0 / (4.0 * size.powi(3) * ratio))
}

/// Range of `a(x,y)/b(x,y)` over off-diagonal entries where either is
/// positive; `None` if the supports differ or there are no such entries.
pub fn off_diagonal_ratio_range(a: &StochasticMatrix<f64>, b: &StochasticMatrix<f64>) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for x in 0..a.len() {
        for &(y, p) in a.row(x) {
            if y != x {
                let q = b.get(x, y);
                if q <= 0.0 {
                    return None;
                }
                lo = lo.min(p / q);
                hi = hi.max(p / q);
            }
        }
        if b.row(x).iter().any(|&(y, q)| y != x && q > 0.0 && a.get(x, y) <= 0.0) {
            return None;
        }
    }
    (hi > 0.0).then_some((lo, hi))
}
