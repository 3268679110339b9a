use super::matrix::StochasticMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Largest matrix handed to the dense eigensolver.
pub const DENSE_EIGEN_CAP: usize = 6000;

/// Relative tolerance for detailed-balance checks.
const BALANCE_TOL: f64 = 1e-9;

/// Stationary distribution of a reversible chain, solved from detailed
/// balance along a spanning forest of the state graph. Each communicating
/// class gets mass proportional to its size.
pub fn stationary_distribution<S: Scalar>(p: &StochasticMatrix<S>) -> Result<Vec<f64>> {
    let n = p.len();
    let pf = p.to_f64();
    let mut pi = vec![f64::NAN; n];
    for root in 0..n {
        if !pi[root].is_nan() {
            continue;
        }
        pi[root] = 1.0;
        let mut comp = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &(y, pxy) in pf.row(x) {
                if y == x || !pi[y].is_nan() {
                    continue;
                }
                let pyx = pf.get(y, x);
                if pyx <= 0.0 {
                    return Err(Error::NotReversible { from: x, to: y });
                }
                pi[y] = pi[x] * pxy / pyx;
                comp.push(y);
                queue.push_back(y);
            }
        }
        let total: f64 = comp.iter().map(|&i| pi[i]).sum();
        let scale = comp.len() as f64 / total;
        for &i in &comp {
            pi[i] *= scale;
        }
    }
    for (x, px) in pi.iter().enumerate() {
        for &(y, pxy) in pf.row(x) {
            let lhs = px * pxy;
            let rhs = pi[y] * pf.get(y, x);
            if (lhs - rhs).abs() > BALANCE_TOL * lhs.abs().max(rhs.abs()) {
                return Err(Error::NotReversible { from: x, to: y });
            }
        }
    }
    let total: f64 = pi.iter().sum();
    Ok(pi.into_iter().map(|x| x / total).collect())
}

/// `max_y |(pi P)(y) - pi(y)|`.
pub fn stationarity_residual<S: Scalar>(p: &StochasticMatrix<S>, pi: &[f64]) -> f64 {
    p.left_apply(pi).iter().zip(pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Eigenvalues of a reversible chain in descending order, from the
/// symmetrised matrix `D^(1/2) P D^(-1/2)` with `D = diag(pi)`.
pub fn eigenvalues<S: Scalar>(p: &StochasticMatrix<S>) -> Result<Vec<f64>> {
    let n = p.len();
    if n > DENSE_EIGEN_CAP {
        return Err(Error::TooLarge {
            what: "matrix for dense eigensolver",
            size: n,
            cap: DENSE_EIGEN_CAP,
        });
    }
    p.check_stochastic(1e-9)?;
    let pi = stationary_distribution(p)?;
    let root: Vec<f64> = pi.iter().map(|x| x.sqrt()).collect();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for x in 0..n {
        for (y, pxy) in p.row(x) {
            a[(x, *y)] = root[x] * pxy.as_f64() / root[*y];
        }
    }
    // Average out rounding asymmetry before the symmetric solver.
    let a = (&a + a.transpose()) * 0.5;
    let mut ev: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

/// `1 - lambda_1`, the gap below the top eigenvalue; 1 for a single state.
pub fn spectral_gap<S: Scalar>(p: &StochasticMatrix<S>) -> Result<f64> {
    let ev = eigenvalues(p)?;
    Ok(match ev.get(1) {
        None => 1.0,
        Some(l1) => {
            let gap = 1.0 - l1;
            if gap.abs() < 1e-12 {
                0.0
            } else {
                gap
            }
        }
    })
}

/// Total-variation distance from stationarity after `t = 0..=t_max` steps
/// from `x0`.
pub fn tv_curve<S: Scalar>(p: &StochasticMatrix<S>, x0: usize, t_max: usize) -> Result<Vec<f64>> {
    let pi = stationary_distribution(p)?;
    let mut v = vec![0.0; p.len()];
    v[x0] = 1.0;
    let mut out = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        out.push(0.5 * v.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum::<f64>());
        if t < t_max {
            v = p.left_apply(&v);
        }
    }
    Ok(out)
}

/// First `t` after which the curve stays at or below `eps`.
pub fn mixing_time(curve: &[f64], eps: f64) -> Option<usize> {
    let last_above = curve.iter().rposition(|&d| d > eps);
    match last_above {
        None => Some(0),
        Some(t) if t + 1 < curve.len() => Some(t + 1),
        Some(_) => None,
    }
}

/// `0.5/gap * (ln(1/pi_x) + 2 ln(0.5/eps))`.
pub fn mixing_time_bound(gap: f64, pi_x: f64, eps: f64) -> f64 {
    0.5 / gap * ((1.0 / pi_x).ln() + 2.0 * (0.5 / eps).ln())
}

/// Canonical-path congestion of a birth–death chain under the flow that
/// routes `pi(x) pi(y)` along the monotone path from `x` to `y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CongestionReport {
    /// Maximum edge load `f(e)/Q(e)`.
    pub sigma: f64,
    /// Longest flow-carrying path.
    pub length: usize,
    /// `sigma * length`, or 1 for a single state.
    pub bound: f64,
    pub gap: f64,
    /// `1/gap <= bound`.
    pub holds: bool,
}

pub fn congestion_check<S: Scalar>(p: &StochasticMatrix<S>) -> Result<CongestionReport> {
    let n = p.len();
    for x in 0..n {
        if let Some(&(y, _)) = p.row(x).iter().find(|(y, _)| x.abs_diff(*y) > 1) {
            return Err(Error::InvalidParams(format!("entry ({x},{y}) breaks the birth-death structure")));
        }
    }
    let gap = spectral_gap(p)?;
    if n == 1 {
        return Ok(CongestionReport {
            sigma: 0.0,
            length: 0,
            bound: 1.0,
            gap,
            holds: true,
        });
    }
    let pi = stationary_distribution(p)?;
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + pi[i];
    }
    let mut sigma: f64 = 0.0;
    for k in 0..n - 1 {
        // Pairs x <= k < y use edge (k, k+1) one way and (k+1, k) the other.
        let flow = prefix[k + 1] * (1.0 - prefix[k + 1]);
        let up = pi[k] * p.get(k, k + 1).as_f64();
        let down = pi[k + 1] * p.get(k + 1, k).as_f64();
        sigma = sigma.max(flow / up).max(flow / down);
    }
    let length = n - 1;
    let bound = sigma * length as f64;
    Ok(CongestionReport {
        sigma,
        length,
        bound,
        gap,
        holds: 1.0 / gap <= bound * (1.0 + 1e-9),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn walk(w: &[f64]) -> StochasticMatrix<f64> {
        let n = w.len();
        let rows = (0..n)
            .map(|i| {
                let mut r = Vec::new();
                let mut stay = 1.0;
                for j in [i.wrapping_sub(1), i + 1] {
                    if j < n {
                        let pij = 0.25 * (w[j] / w[i]).min(1.0);
                        stay -= pij;
                        r.push((j, pij));
                    }
                }
                r.push((i, stay));
                r
            })
            .collect();
        StochasticMatrix::from_rows(rows)
    }

    #[test]
    fn identity_has_zero_gap() {
        assert_eq!(spectral_gap(&StochasticMatrix::<f64>::identity(4)).unwrap(), 0.0);
        assert_eq!(spectral_gap(&StochasticMatrix::<f64>::identity(1)).unwrap(), 1.0);
    }

    #[test]
    fn two_state_quarter_walk() {
        let p = walk(&[1.0, 1.0]);
        assert!((spectral_gap(&p).unwrap() - 0.5).abs() < 1e-12);
        let exact = StochasticMatrix::from_rows(vec![
            vec![(0, BigRational::from_ratio(3, 4)), (1, BigRational::from_ratio(1, 4))],
            vec![(0, BigRational::from_ratio(1, 4)), (1, BigRational::from_ratio(3, 4))],
        ]);
        assert!((spectral_gap(&exact).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn geometric_weights_stationary_and_gap() {
        let w = [1.0, 2.0, 4.0];
        let p = walk(&w);
        let pi = stationary_distribution(&p).unwrap();
        for (a, b) in pi.iter().zip([1.0 / 7.0, 2.0 / 7.0, 4.0 / 7.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(stationarity_residual(&p, &pi) < 1e-15);
        // Closed form of the 3x3 tridiagonal spectrum.
        let ev = eigenvalues(&p).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-12);
        let trace: f64 = (0..3).map(|i| p.get(i, i)).sum();
        assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-12);
        let gap = spectral_gap(&p).unwrap();
        assert!((0.0..=1.0).contains(&gap));
        assert!(gap >= 1.0 / 216.0);
    }

    #[test]
    fn tv_curve_starts_at_one_minus_inverse_size() {
        let p = walk(&[1.0; 5]);
        let curve = tv_curve(&p, 0, 200).unwrap();
        assert!((curve[0] - 0.8).abs() < 1e-15);
        assert!(curve.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        let gap = spectral_gap(&p).unwrap();
        let t = mixing_time(&curve, 0.01).unwrap();
        assert!((t as f64) <= mixing_time_bound(gap, 0.2, 0.01));
        assert_eq!(mixing_time(&[0.5, 0.4], 0.1), None);
    }

    #[test]
    fn congestion_constant_weights() {
        let p = walk(&[1.0; 3]);
        let r = congestion_check(&p).unwrap();
        // Middle edges carry (1/3)(2/3); Q = (1/3)(1/4).
        assert!((r.sigma - 8.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.length, 2);
        assert!(r.holds);
        let single = congestion_check(&StochasticMatrix::<f64>::identity(1)).unwrap();
        assert!(single.holds);
    }

    #[test]
    fn irreversible_chain_rejected() {
        let p = StochasticMatrix::from_rows(vec![vec![(0, 0.5), (1, 0.5)], vec![(1, 0.5), (2, 0.5)], vec![(0, 0.5), (2, 0.5)]]);
        assert!(matches!(stationary_distribution(&p), Err(Error::NotReversible { .. })));
    }
}
