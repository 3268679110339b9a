//! Exhaustive checks of the structural statements behind the samplers.

use super::alternating::{find_alternating_path, short_cycle_transform, TransformGoal};
use super::enumerate::{enumerate_graphs, Constraint};
use super::matrix::StochasticMatrix;
use super::spectral::{spectral_gap, stationary_distribution};
use crate::error::Result;
use crate::graph::{DegreeSequence, Graph};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::ops::Mul;

/// First index `m` with `w[m-1] * w[m+1] > w[m]^2`, or `None` when the
/// sequence is log-concave.
pub fn verify_log_concave<T>(w: &[T]) -> Option<usize>
where
    T: Clone + PartialOrd,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    (1..w.len().saturating_sub(1)).find(|&m| &w[m - 1] * &w[m + 1] > &w[m] * &w[m])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MartinRandallReport {
    pub gap: f64,
    /// Smallest positive off-diagonal transition probability.
    pub beta: f64,
    /// Smallest boundary fraction `pi(d_i(O_j)) / pi(O_j)` over adjacent blocks.
    pub gamma: f64,
    pub gap_mh: f64,
    pub min_block_gap: f64,
    /// `beta * gamma * gap_mh * min_block_gap`.
    pub rhs: f64,
    pub holds: bool,
    /// Blocks whose restriction chain is reducible.
    pub disconnected: Vec<usize>,
}

/// Both sides of the decomposition inequality
/// `gap(P) >= beta * gamma * gap(P_MH) * min_i gap(P_i)` for the partition
/// `blocks` of the state space of `p`.
pub fn verify_martin_randall<S: Scalar>(p: &StochasticMatrix<S>, blocks: &[Vec<usize>]) -> Result<MartinRandallReport> {
    let pf = p.to_f64();
    let pi = stationary_distribution(&pf)?;
    let gap = spectral_gap(&pf)?;
    let beta = pf.min_positive_off_diagonal().unwrap_or(1.0);
    let q = blocks.len();
    let mut block_of = vec![usize::MAX; pf.len()];
    for (b, block) in blocks.iter().enumerate() {
        for &x in block {
            block_of[x] = b;
        }
    }
    let mass: Vec<f64> = blocks.iter().map(|b| b.iter().map(|&x| pi[x]).sum()).collect();

    // reached[i][j]: states of block j one step away from block i.
    let mut reached = vec![vec![Vec::new(); q]; q];
    for x in 0..pf.len() {
        for &(y, _) in pf.row(x) {
            let (i, j) = (block_of[x], block_of[y]);
            if i != j {
                reached[i][j].push(y);
            }
        }
    }
    let mut gamma: f64 = 1.0;
    let mut out_degree = vec![0usize; q];
    for i in 0..q {
        for j in 0..q {
            let r = &mut reached[i][j];
            if r.is_empty() {
                continue;
            }
            r.sort_unstable();
            r.dedup();
            out_degree[i] += 1;
            let boundary: f64 = r.iter().map(|&y| pi[y]).sum();
            gamma = gamma.min(boundary / mass[j]);
        }
    }
    let delta = out_degree.iter().copied().max().unwrap_or(0).max(1) as f64;
    let mh_rows = (0..q)
        .map(|i| {
            let mut row: Vec<(usize, f64)> = (0..q)
                .filter(|&j| !reached[i][j].is_empty())
                .map(|j| (j, (mass[j] / mass[i]).min(1.0) / (2.0 * delta)))
                .collect();
            let moved: f64 = row.iter().map(|e| e.1).sum();
            row.push((i, 1.0 - moved));
            row
        })
        .collect();
    let gap_mh = spectral_gap(&StochasticMatrix::from_rows(mh_rows))?;

    let mut min_block_gap = f64::INFINITY;
    let mut disconnected = Vec::new();
    for (b, block) in blocks.iter().enumerate() {
        let r = pf.restrict(block);
        if !r.is_irreducible() {
            disconnected.push(b);
        }
        min_block_gap = min_block_gap.min(spectral_gap(&r)?);
    }
    let rhs = beta * gamma * gap_mh * min_block_gap;
    Ok(MartinRandallReport {
        gap,
        beta,
        gamma,
        gap_mh,
        min_block_gap,
        rhs,
        holds: gap >= rhs * (1.0 - 1e-9),
        disconnected,
    })
}

/// A perturbed realization with no short repair path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityFailure {
    pub graph: Vec<(usize, usize)>,
    /// Node with one unit of excess degree.
    pub excess: usize,
    /// Node with one unit of missing degree.
    pub deficit: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub graphs_checked: usize,
    /// Longest shortest repair path seen.
    pub longest: usize,
    pub failures: Vec<StabilityFailure>,
}

/// Every graph whose degrees are `d + e_k - e_l` for some `k != l` must
/// contain an alternating `(k, l)`-path of at most `k_max` steps.
pub fn check_strong_stability(d: &DegreeSequence, k_max: usize) -> Result<StabilityReport> {
    let n = d.len();
    let mut report = StabilityReport::default();
    for kappa in 0..n {
        for lambda in 0..n {
            if kappa == lambda || d.0[lambda] == 0 || d.0[kappa] + 1 >= n {
                continue;
            }
            let mut dp = d.0.clone();
            dp[kappa] += 1;
            dp[lambda] -= 1;
            let space = enumerate_graphs(&Constraint::Degrees(DegreeSequence(dp)))?;
            for g in space.graphs() {
                report.graphs_checked += 1;
                match find_alternating_path(&g, kappa, lambda, k_max) {
                    Some(p) => report.longest = report.longest.max(p.len()),
                    None => report.failures.push(StabilityFailure {
                        graph: g.edges().collect(),
                        excess: kappa,
                        deficit: lambda,
                    }),
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformFailure {
    pub graph: Vec<(usize, usize)>,
    pub goal: TransformGoal,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformReport {
    pub graphs_checked: usize,
    pub goals_checked: usize,
    /// Largest minimal symmetric difference seen.
    pub largest: usize,
    /// Goals met by some graph in `G(d)` but by none within the budget.
    pub failures: Vec<TransformFailure>,
    /// Goals met by no graph in `G(d)` at all, such as removing an edge
    /// present in every realization.
    pub unattainable: Vec<TransformFailure>,
}

/// For every `G` in `G(d)`, every pair can be toggled and every edge at a
/// node can be removed while keeping another edge at that node, each within
/// symmetric difference `budget`. Goals that no member of `G(d)` satisfies
/// are reported apart from budget failures.
pub fn check_short_cycle_transforms(d: &DegreeSequence, budget: usize) -> Result<TransformReport> {
    let n = d.len();
    let space = enumerate_graphs(&Constraint::Degrees(d.clone()))?;
    let mut report = TransformReport::default();
    for g in space.graphs() {
        report.graphs_checked += 1;
        for goal in goals(&g, n) {
            report.goals_checked += 1;
            match short_cycle_transform(&g, goal, budget) {
                Ok(h) => report.largest = report.largest.max(h.symmetric_difference_size(&g)),
                Err(_) => {
                    let failure = TransformFailure {
                        graph: g.edges().collect(),
                        goal,
                    };
                    if space.graphs().any(|h| goal.satisfied_by(&h)) {
                        report.failures.push(failure);
                    } else {
                        report.unattainable.push(failure);
                    }
                }
            }
        }
    }
    Ok(report)
}

fn goals(g: &Graph, n: usize) -> Vec<TransformGoal> {
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            out.push(if g.has_edge(u, v) {
                TransformGoal::RemoveEdge(u, v)
            } else {
                TransformGoal::AddEdge(u, v)
            });
        }
    }
    for u in 0..n {
        for keep in g.neighbors(u) {
            for remove in g.neighbors(u) {
                if keep != remove {
                    out.push(TransformGoal::KeepRemove { u, keep, remove });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::TransitionKernel;
    use crate::graph::DegreeInterval;
    use crate::oracle::build_matrix;
    use num_bigint::BigUint;
    use num_rational::BigRational;

    #[test]
    fn log_concave_examples() {
        assert_eq!(verify_log_concave(&[1u64, 2, 3, 2, 1].map(BigUint::from)), None);
        assert_eq!(verify_log_concave(&[1u64, 1, 3].map(BigUint::from)), Some(1));
        assert_eq!(verify_log_concave(&[2.0f64]), None);
        assert_eq!(verify_log_concave::<f64>(&[]), None);
    }

    #[test]
    fn martin_randall_single_block() {
        let iv = DegreeInterval::new(vec![1; 4], vec![2; 4]).unwrap();
        let space = enumerate_graphs(&Constraint::Interval(iv.clone())).unwrap();
        let p = build_matrix::<BigRational>(&TransitionKernel::degree_interval(iv), &space).unwrap();
        let all: Vec<usize> = (0..space.len()).collect();
        let r = verify_martin_randall(&p, &[all]).unwrap();
        assert_eq!(r.gap_mh, 1.0);
        assert_eq!(r.gamma, 1.0);
        assert!((r.min_block_gap - r.gap).abs() < 1e-12);
        assert!(r.holds);
        assert!(r.disconnected.is_empty());
    }

    #[test]
    fn martin_randall_by_edge_count() {
        let iv = DegreeInterval::new(vec![1; 5], vec![2; 5]).unwrap();
        let space = enumerate_graphs(&Constraint::Interval(iv.clone())).unwrap();
        let p = build_matrix::<f64>(&TransitionKernel::degree_interval(iv), &space).unwrap();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut ms: Vec<usize> = (0..space.len()).map(|i| space.graph(i).edge_count()).collect();
        ms.sort_unstable();
        ms.dedup();
        for m in ms {
            blocks.push((0..space.len()).filter(|&i| space.graph(i).edge_count() == m).collect());
        }
        let r = verify_martin_randall(&p, &blocks).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(r.gamma > 0.0 && r.gamma <= 1.0);
        assert!(r.beta > 0.0 && r.rhs > 0.0);
    }

    #[test]
    fn regular_sequences_are_stable() {
        let r = check_strong_stability(&DegreeSequence(vec![2; 6]), 10).unwrap();
        assert!(r.graphs_checked > 0);
        assert!(r.failures.is_empty());
        assert!(r.longest <= 10);
    }

    #[test]
    fn triangle_cannot_toggle() {
        let r = check_short_cycle_transforms(&DegreeSequence(vec![2, 2, 2]), 12).unwrap();
        assert_eq!(r.graphs_checked, 1);
        assert!(r.failures.is_empty());
        assert_eq!(r.unattainable.len(), 3 + 6);
        // {2,3} lies in both realizations of (1,1,2,2).
        let r = check_short_cycle_transforms(&DegreeSequence(vec![1, 1, 2, 2]), 12).unwrap();
        assert!(r.failures.is_empty());
        assert!(r.unattainable.iter().any(|f| f.goal == TransformGoal::RemoveEdge(2, 3)));
        let r = check_short_cycle_transforms(&DegreeSequence(vec![2; 5]), 12).unwrap();
        assert!(r.failures.is_empty());
        assert!(r.largest <= 12);
    }
}
