//! Log-space weights on degree sequences.
//!
//! For a sequence `d` of length `n` let `xi = sum(d)/n`, `mu = xi/(n-1)`,
//! `chi = sum((d_i - xi)^2)/(n-1)^2` and `s = chi/(2 mu (1-mu))`. The
//! Liebenau–Wormald approximation to `|G(d)|` is
//!
//! ```text
//! w(d) = sqrt(2) exp(1/4 - s^2) (mu^mu (1-mu)^(1-mu))^(n(n-1)/2) prod_i C(n-1, d_i)
//! ```
//!
//! and the simplified weight `z(d)` drops the `-s^2` term and fixes `mu` from
//! the edge count, which makes `ln z` an affine function of
//! `sum_i ln C(n-1, d_i)`.

use crate::error::{Error, Result};
use crate::graph::{DegreeSequence, NearRegularParams};
use crate::oracle::count_realizations;
use num_bigint::BigUint;
use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceStats<T> {
    pub xi: T,
    pub mu: T,
    pub chi: T,
    pub s: T,
}

fn cast<T: FromPrimitive>(x: usize) -> T {
    T::from_usize(x).expect("count representable in the scalar type")
}

/// `ln C(n, k)` as a sum of logarithms of exact ratios.
pub fn ln_binomial<T: Float + FromPrimitive>(n: usize, k: usize) -> T {
    if k > n {
        return T::neg_infinity();
    }
    let k = k.min(n - k);
    (1..=k).fold(T::zero(), |acc, i| acc + (cast::<T>(n - k + i) / cast::<T>(i)).ln())
}

pub fn sequence_stats<T: Float + FromPrimitive>(d: &DegreeSequence) -> Result<SequenceStats<T>> {
    let n = d.len();
    if n < 2 {
        return Err(Error::InvalidParams(format!("sequence of length {n} has no density")));
    }
    let total = d.sum();
    if total == 0 || total >= n * (n - 1) {
        return Err(Error::DegenerateDensity {
            mu: total as f64 / (n * (n - 1)) as f64,
        });
    }
    let nf = cast::<T>(n);
    let n1 = cast::<T>(n - 1);
    let xi = cast::<T>(total) / nf;
    let mu = xi / n1;
    let dev = d.as_slice().iter().fold(T::zero(), |acc, &x| {
        let e = cast::<T>(x) - xi;
        acc + e * e
    });
    let chi = dev / (n1 * n1);
    let two = cast::<T>(2);
    let s = chi / (two * mu * (T::one() - mu));
    Ok(SequenceStats { xi, mu, chi, s })
}

/// `ln(mu^mu (1-mu)^(1-mu))^(n(n-1)/2) + sum_i ln C(n-1, d_i)`, the part the
/// two formulas share.
fn shared_log_terms<T: Float + FromPrimitive>(d: &DegreeSequence, mu: T) -> T {
    let n = d.len();
    let pairs = cast::<T>(n * (n - 1) / 2);
    let entropy = mu * mu.ln() + (T::one() - mu) * (T::one() - mu).ln();
    let binoms = d.as_slice().iter().fold(T::zero(), |acc, &x| acc + ln_binomial::<T>(n - 1, x));
    pairs * entropy + binoms
}

fn ln_sqrt2_plus_quarter<T: Float + FromPrimitive>() -> T {
    cast::<T>(2).sqrt().ln() + T::from_f64(0.25).expect("representable")
}

/// `ln w(d)` for the Liebenau–Wormald approximation.
pub fn lw_log_weight<T: Float + FromPrimitive>(d: &DegreeSequence) -> Result<T> {
    if let Some(i) = d.as_slice().iter().position(|&x| x + 1 > d.len()) {
        return Err(Error::BoundExceeded {
            node: i,
            upper: d[i],
            max: d.len().saturating_sub(1),
        });
    }
    let st = sequence_stats::<T>(d)?;
    Ok(ln_sqrt2_plus_quarter::<T>() - st.s * st.s + shared_log_terms(d, st.mu))
}

/// `ln z(d)` with the density fixed by `(n, m)`.
pub fn slc_log_weight<T: Float + FromPrimitive>(d: &DegreeSequence, n: usize, m: usize) -> Result<T> {
    if d.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: d.len() });
    }
    if d.sum() != 2 * m {
        return Err(Error::SumMismatch {
            expected: 2 * m,
            got: d.sum(),
        });
    }
    if let Some(i) = d.as_slice().iter().position(|&x| x + 1 > n) {
        return Err(Error::BoundExceeded {
            node: i,
            upper: d[i],
            max: n.saturating_sub(1),
        });
    }
    if n < 2 || m == 0 || 2 * m >= n * (n - 1) {
        return Err(Error::DegenerateDensity {
            mu: if n < 2 { f64::NAN } else { (2 * m) as f64 / (n * (n - 1)) as f64 },
        });
    }
    let mu = cast::<T>(2 * m) / cast::<T>(n * (n - 1));
    Ok(ln_sqrt2_plus_quarter::<T>() + shared_log_terms(d, mu))
}

/// Natural log of a big integer; `-inf` for zero.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map_or(f64::INFINITY, f64::ln);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("fits in f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Weight backend over degree sequences. All weights are natural logs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeightModel {
    /// `ln |G(d)|` from the memoized exact counter.
    ExactCount,
    /// Liebenau–Wormald approximation.
    Lw,
    /// Simplified weight with the density fixed by `sum(d)/2` edges.
    Slc,
}

impl WeightModel {
    pub fn log_weight(&self, d: &DegreeSequence) -> Result<f64> {
        match self {
            WeightModel::ExactCount => {
                let c = count_realizations(d)?;
                if c == BigUint::ZERO {
                    Err(Error::NotGraphical)
                } else {
                    Ok(ln_biguint(&c))
                }
            }
            WeightModel::Lw => lw_log_weight::<f64>(d),
            WeightModel::Slc => {
                if d.sum() % 2 == 1 {
                    return Err(Error::NotGraphical);
                }
                slc_log_weight::<f64>(d, d.len(), d.sum() / 2)
            }
        }
    }
}

/// Upper bound `8/(r rho (n-1))` on `s(d)` for near-regular sequences.
pub fn s_bound(params: &NearRegularParams, n: usize) -> f64 {
    8.0 / (params.r as f64 * params.rho * (n as f64 - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Pow};

    fn ds(v: &[usize]) -> DegreeSequence {
        DegreeSequence(v.to_vec())
    }

    #[test]
    fn stats_examples() {
        let st = sequence_stats::<f64>(&ds(&[2, 2, 2, 2])).unwrap();
        assert_eq!((st.xi, st.chi, st.s), (2.0, 0.0, 0.0));
        assert!((st.mu - 2.0 / 3.0).abs() < 1e-15);

        let st = sequence_stats::<f64>(&ds(&[3, 2, 2, 1])).unwrap();
        assert!((st.xi - 2.0).abs() < 1e-15);
        assert!((st.mu - 2.0 / 3.0).abs() < 1e-15);
        assert!((st.chi - 2.0 / 9.0).abs() < 1e-15);
        assert!((st.s - 0.5).abs() < 1e-15);

        let st32 = sequence_stats::<f32>(&ds(&[3, 2, 2, 1])).unwrap();
        assert!((st32.s - 0.5).abs() < 1e-6);
    }

    #[test]
    fn degenerate_densities() {
        assert!(matches!(
            sequence_stats::<f64>(&ds(&[0, 0, 0])),
            Err(Error::DegenerateDensity { .. })
        ));
        assert!(matches!(
            sequence_stats::<f64>(&ds(&[2, 2, 2])),
            Err(Error::DegenerateDensity { .. })
        ));
        assert!(matches!(
            slc_log_weight::<f64>(&ds(&[1, 1, 0]), 3, 2),
            Err(Error::SumMismatch { .. })
        ));
    }

    #[test]
    fn lw_value_on_four_cycle_sequence() {
        let lw = lw_log_weight::<f64>(&ds(&[2, 2, 2, 2])).unwrap();
        assert!((lw - 1.171_938).abs() < 1e-6, "{lw}");
        assert!((lw.exp() - 3.228).abs() < 1e-3);
        assert!((lw.exp() / 3.0 - 1.076).abs() < 1e-3);
        let lw32 = lw_log_weight::<f32>(&ds(&[2, 2, 2, 2])).unwrap();
        assert!((lw32 as f64 - lw).abs() < 1e-5);
    }

    #[test]
    fn lw_and_slc_relation() {
        for d in [vec![2, 2, 2, 2], vec![3, 2, 2, 1], vec![1, 2, 3, 2, 2], vec![4, 1, 1, 1, 1]] {
            let d = ds(&d);
            let m = d.sum() / 2;
            let lw = lw_log_weight::<f64>(&d).unwrap();
            let z = slc_log_weight::<f64>(&d, d.len(), m).unwrap();
            let s = sequence_stats::<f64>(&d).unwrap().s;
            assert!((lw - (z - s * s)).abs() < 1e-12);
        }
    }

    #[test]
    fn slc_is_affine_in_binomial_logs() {
        let (n, m) = (6, 7);
        let shift: Option<f64> = None;
        let mut shift = shift;
        for d in [vec![3, 3, 2, 2, 2, 2], vec![4, 2, 2, 2, 2, 2], vec![3, 3, 3, 3, 1, 1]] {
            let d = ds(&d);
            let z = slc_log_weight::<f64>(&d, n, m).unwrap();
            let b: f64 = d.as_slice().iter().map(|&x| ln_binomial::<f64>(n - 1, x)).sum();
            match shift {
                None => shift = Some(z - b),
                Some(c) => assert!((z - b - c).abs() < 1e-12),
            }
        }
    }

    #[test]
    fn exact_count_backend() {
        let w = WeightModel::ExactCount.log_weight(&ds(&[2, 2, 2, 2])).unwrap();
        assert!((w - 3f64.ln()).abs() < 1e-15);
        assert_eq!(WeightModel::ExactCount.log_weight(&ds(&[3, 3, 1, 1])), Err(Error::NotGraphical));
        let d = ds(&[3, 3, 3, 3, 3, 3]);
        assert!((WeightModel::Slc.log_weight(&d).unwrap() - WeightModel::Lw.log_weight(&d).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn ln_binomial_small_values() {
        assert_eq!(ln_binomial::<f64>(5, 0), 0.0);
        assert!((ln_binomial::<f64>(5, 2) - 10f64.ln()).abs() < 1e-14);
        assert!((ln_binomial::<f64>(60, 30) - 118_264_581_564_861_424f64.ln()).abs() < 1e-10);
        assert_eq!(ln_binomial::<f64>(3, 4), f64::NEG_INFINITY);
    }

    #[test]
    fn ln_biguint_large() {
        let x = BigUint::from(3u32).pow(2000u32);
        assert!((ln_biguint(&x) - 2000.0 * 3f64.ln()).abs() < 1e-9);
        assert_eq!(ln_biguint(&BigUint::ZERO), f64::NEG_INFINITY);
    }

    /// The non-transcendental factor `mu^m (1-mu)^(N-m) prod C(n-1, d_i)`
    /// evaluated in exact rationals; `N = n(n-1)/2`.
    fn exact_rational_part(d: &DegreeSequence) -> BigRational {
        let n = d.len();
        let m = d.sum() / 2;
        let pairs = n * (n - 1) / 2;
        let mu = BigRational::new(BigInt::from(2 * m), BigInt::from(n * (n - 1)));
        let one_minus = BigRational::one() - &mu;
        let mut acc = Pow::pow(&mu, m as u32) * Pow::pow(&one_minus, (pairs - m) as u32);
        for &x in d.as_slice() {
            let c = crate::oracle::binomial(n - 1, x);
            acc *= BigRational::from_integer(BigInt::from(c));
        }
        acc
    }

    #[test]
    fn log_space_matches_exact_rationals() {
        for n in 3..=12usize {
            for lo in 1..n - 1 {
                for spread in 0..3usize {
                    let d: Vec<usize> = (0..n).map(|i| (lo + (i * 7 + spread) % (spread + 1)).min(n - 2)).collect();
                    let d = ds(&d);
                    if d.sum() % 2 == 1 {
                        continue;
                    }
                    let exact = exact_rational_part(&d);
                    let ln_exact = ln_biguint(exact.numer().magnitude()) - ln_biguint(exact.denom().magnitude());
                    let st = sequence_stats::<f64>(&d).unwrap();
                    let lw = lw_log_weight::<f64>(&d).unwrap();
                    let ln_formula = lw - (0.5 * 2f64.ln() + 0.25 - st.s * st.s);
                    assert!(
                        (ln_formula - ln_exact).abs() <= 1e-10 * ln_exact.abs().max(1.0),
                        "{d:?}: {ln_formula} vs {ln_exact}"
                    );
                }
            }
        }
    }
}
