use super::enumerate::StateSpace;
use crate::chains::TransitionKernel;
use crate::error::{Error, Result};
use crate::graph::pair_index;
use crate::scalar::Scalar;
use std::collections::VecDeque;

/// Row-stochastic matrix with sparse rows sorted by column.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix<S> {
    rows: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> StochasticMatrix<S> {
    /// Takes rows of `(column, value)`; zero entries are dropped and columns
    /// sorted.
    pub fn from_rows(rows: Vec<Vec<(usize, S)>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|mut r| {
                r.retain(|(_, p)| !p.is_zero());
                r.sort_by_key(|e| e.0);
                r
            })
            .collect();
        StochasticMatrix { rows }
    }

    pub fn identity(n: usize) -> Self {
        StochasticMatrix {
            rows: (0..n).map(|i| vec![(i, S::one())]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &[(usize, S)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        match self.rows[i].binary_search_by_key(&j, |e| e.0) {
            Ok(k) => self.rows[i][k].1.clone(),
            Err(_) => S::zero(),
        }
    }

    /// Errors with the first row whose sum is off by more than `tol`
    /// (exactly, for exact scalars) or that holds a negative entry.
    pub fn check_stochastic(&self, tol: f64) -> Result<()> {
        for (i, r) in self.rows.iter().enumerate() {
            let sum = r.iter().fold(S::zero(), |acc, (_, p)| acc + p.clone());
            if r.iter().any(|(_, p)| *p < S::zero()) || !sum.near(&S::one(), tol) {
                return Err(Error::NotStochastic { row: i, sum: sum.as_f64() });
            }
        }
        Ok(())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.iter().all(|(j, p)| p.near(&self.get(*j, i), tol)))
    }

    /// Smallest positive off-diagonal entry.
    pub fn min_positive_off_diagonal(&self) -> Option<S> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().filter(move |(j, _)| *j != i).map(|(_, p)| p.clone()))
            .fold(None, |best: Option<S>, p| match best {
                Some(b) if b <= p => Some(b),
                _ => Some(p),
            })
    }

    /// Chain restricted to `block`: transitions leaving the block are moved
    /// onto the diagonal. Indices follow the order of `block`.
    pub fn restrict(&self, block: &[usize]) -> StochasticMatrix<S> {
        let mut local = vec![usize::MAX; self.len()];
        for (k, &i) in block.iter().enumerate() {
            local[i] = k;
        }
        let rows = block
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                let mut out: Vec<(usize, S)> = self.rows[i]
                    .iter()
                    .filter(|(j, _)| *j != i && local[*j] != usize::MAX)
                    .map(|(j, p)| (local[*j], p.clone()))
                    .collect();
                let moved = out.iter().fold(S::zero(), |acc, (_, p)| acc + p.clone());
                out.push((k, S::one() - moved));
                out
            })
            .collect();
        StochasticMatrix::from_rows(rows)
    }

    pub fn to_f64(&self) -> StochasticMatrix<f64> {
        StochasticMatrix {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|(j, p)| (*j, p.as_f64())).collect())
                .collect(),
        }
    }

    /// `v P` for a row vector `v`.
    pub fn left_apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (i, r) in self.rows.iter().enumerate() {
            if v[i] != 0.0 {
                for (j, p) in r {
                    out[*j] += v[i] * p.as_f64();
                }
            }
        }
        out
    }

    /// Whether every state reaches every other along positive entries.
    pub fn is_irreducible(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return true;
        }
        let mut reverse = vec![Vec::new(); n];
        for (i, r) in self.rows.iter().enumerate() {
            for (j, _) in r {
                reverse[*j].push(i);
            }
        }
        let forward: Vec<Vec<usize>> = self.rows.iter().map(|r| r.iter().map(|e| e.0).collect()).collect();
        reaches_all(&forward) && reaches_all(&reverse)
    }
}

fn reaches_all(adj: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                count += 1;
                queue.push_back(y);
            }
        }
    }
    count == adj.len()
}

/// Transition matrix as integer numerators over one denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountMatrix {
    pub den: u64,
    pub rows: Vec<Vec<(usize, u64)>>,
}

impl CountMatrix {
    pub fn is_symmetric(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, r)| {
            r.iter().all(|&(j, c)| {
                let back = &self.rows[j];
                back.binary_search_by_key(&i, |e| e.0).is_ok_and(|k| back[k].1 == c)
            })
        })
    }

    pub fn to_scalar<S: Scalar>(&self) -> StochasticMatrix<S> {
        StochasticMatrix::from_rows(
            self.rows
                .iter()
                .map(|r| r.iter().map(|&(j, c)| (j, S::from_ratio(c, self.den))).collect())
                .collect(),
        )
    }
}

fn flip_mask(n: usize, pairs: &[(usize, usize)]) -> u64 {
    pairs.iter().fold(0, |m, &(a, b)| m ^ (1 << pair_index(n, a, b)))
}

/// Exact matrix of `kernel` over `space`, by enumerating every move tuple.
pub fn build_count_matrix(kernel: &TransitionKernel, space: &StateSpace) -> Result<CountMatrix> {
    let n = space.n();
    let den = kernel.denominator();
    let mut rows = Vec::with_capacity(space.len());
    let mut acc: Vec<(u64, u64)> = Vec::new();
    for i in 0..space.len() {
        let g = space.graph(i);
        if !kernel.contains(&g) {
            return Err(Error::Mismatch { state: i });
        }
        let code = space.code(i);
        acc.clear();
        kernel.for_each_transition(&g, |fl, num| acc.push((code ^ flip_mask(n, fl.pairs()), num)));
        acc.sort_unstable();
        let mut row: Vec<(usize, u64)> = Vec::new();
        let mut moved = 0;
        for &(target, num) in &acc {
            let j = space.index_of(target).ok_or(Error::Mismatch { state: i })?;
            moved += num;
            match row.last_mut() {
                Some((last, c)) if *last == j => *c += num,
                _ => row.push((j, num)),
            }
        }
        row.push((i, den - moved));
        row.sort_unstable_by_key(|e| e.0);
        rows.push(row);
    }
    Ok(CountMatrix { den, rows })
}

pub fn build_matrix<S: Scalar>(kernel: &TransitionKernel, space: &StateSpace) -> Result<StochasticMatrix<S>> {
    Ok(build_count_matrix(kernel, space)?.to_scalar())
}

/// Whether the kernel's state-space graph on `space` is connected.
///
/// Every move has an inverse move of the same kind, so it suffices that all
/// states are reachable from the first one. No matrix is stored.
pub fn is_connected(kernel: &TransitionKernel, space: &StateSpace) -> Result<bool> {
    if space.is_empty() {
        return Ok(true);
    }
    let n = space.n();
    let mut seen = vec![false; space.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = queue.pop_front() {
        let g = space.graph(i);
        let code = space.code(i);
        let mut err = None;
        kernel.for_each_transition(&g, |fl, _| match space.index_of(code ^ flip_mask(n, fl.pairs())) {
            Some(j) if !seen[j] => {
                seen[j] = true;
                count += 1;
                queue.push_back(j);
            }
            Some(_) => {}
            None => err = Some(Error::Mismatch { state: i }),
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(count == space.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DegreeInterval, DegreeSequence};
    use crate::oracle::{enumerate_graphs, Constraint};
    use num_rational::BigRational;

    #[test]
    fn switch_matrix_on_perfect_matchings() {
        let d = DegreeSequence(vec![1, 1, 1, 1]);
        let space = enumerate_graphs(&Constraint::Degrees(d.clone())).unwrap();
        let k = TransitionKernel::switch(&d, 6).unwrap();
        let p = build_matrix::<BigRational>(&k, &space).unwrap();
        p.check_stochastic(0.0).unwrap();
        assert!(p.is_symmetric(0.0));
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(p.get(i, j), BigRational::from_ratio(4, 6 * 256));
                }
            }
        }
    }

    #[test]
    fn mismatched_space_is_rejected() {
        let d = DegreeSequence(vec![1, 1, 1, 1]);
        let k = TransitionKernel::switch(&d, 6).unwrap();
        let other = enumerate_graphs(&Constraint::Degrees(DegreeSequence(vec![2, 2, 1, 1]))).unwrap();
        assert!(matches!(build_matrix::<f64>(&k, &other), Err(Error::Mismatch { state: 0 })));
        let partial = StateSpace::from_codes(4, vec![enumerate_graphs(&Constraint::Degrees(d)).unwrap().code(0)]);
        assert!(matches!(build_matrix::<f64>(&k, &partial), Err(Error::Mismatch { .. })));
    }

    #[test]
    fn restriction_moves_mass_to_diagonal() {
        let iv = DegreeInterval::new(vec![1; 4], vec![2; 4]).unwrap();
        let space = enumerate_graphs(&Constraint::Interval(iv.clone())).unwrap();
        let p = build_matrix::<BigRational>(&TransitionKernel::degree_interval(iv), &space).unwrap();
        let block: Vec<usize> = (0..space.len()).filter(|&i| space.graph(i).edge_count() == 3).collect();
        let r = p.restrict(&block);
        r.check_stochastic(0.0).unwrap();
        assert!(r.is_symmetric(0.0));
        assert_eq!(r.len(), block.len());
        assert!(p.is_irreducible());
    }

    #[test]
    fn interval_matrix_symmetric_and_stochastic() {
        let iv = DegreeInterval::new(vec![1, 1, 2, 1, 0], vec![2, 3, 3, 2, 1]).unwrap();
        let space = enumerate_graphs(&Constraint::Interval(iv.clone())).unwrap();
        let k = TransitionKernel::degree_interval(iv);
        let c = build_count_matrix(&k, &space).unwrap();
        assert!(c.is_symmetric());
        let p = c.to_scalar::<f64>();
        p.check_stochastic(1e-12).unwrap();
        assert!(is_connected(&k, &space).unwrap());
        assert_eq!(p.is_irreducible(), is_connected(&k, &space).unwrap());
    }
}
