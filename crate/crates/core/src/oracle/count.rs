use crate::error::{Error, Result};
use crate::graph::{DegreeInterval, DegreeSequence};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::collections::HashMap;

/// Memo size at which [`count_realizations`] gives up.
pub const COUNT_MEMO_CAP: usize = 2_000_000;

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `|G(d)|` exactly.
///
/// Removes a node of largest degree and sums over its neighbourhoods,
/// grouping the other nodes by residual degree so that each choice is a
/// product of binomials. Subproblems are keyed on the sorted residual
/// sequence with zeros dropped.
pub fn count_realizations(d: &DegreeSequence) -> Result<BigUint> {
    let n = d.len();
    if d.as_slice().iter().any(|&x| x + 1 > n.max(1) && x > 0) || d.sum() % 2 == 1 {
        return Ok(BigUint::zero());
    }
    let mut key: Vec<u8> = d.as_slice().iter().filter(|&&x| x > 0).map(|&x| x as u8).collect();
    key.sort_unstable_by(|a, b| b.cmp(a));
    let mut memo = HashMap::new();
    count_sorted(&key, &mut memo)
}

fn count_sorted(key: &[u8], memo: &mut HashMap<Vec<u8>, BigUint>) -> Result<BigUint> {
    if key.is_empty() {
        return Ok(BigUint::one());
    }
    if let Some(c) = memo.get(key) {
        return Ok(c.clone());
    }
    if memo.len() >= COUNT_MEMO_CAP {
        return Err(Error::TooLarge {
            what: "counting memo",
            size: memo.len(),
            cap: COUNT_MEMO_CAP,
        });
    }
    let k = key[0] as usize;
    let rest = &key[1..];
    let result = if k > rest.len() {
        BigUint::zero()
    } else {
        // Groups of equal residual degree, in descending order.
        let mut groups: Vec<(u8, usize)> = Vec::new();
        for &x in rest {
            match groups.last_mut() {
                Some((v, c)) if *v == x => *c += 1,
                _ => groups.push((x, 1)),
            }
        }
        let mut total = BigUint::zero();
        let mut take = vec![0usize; groups.len()];
        distribute(&groups, 0, k, &mut take, &mut |take| {
            let mut next = Vec::with_capacity(rest.len());
            let mut ways = BigUint::one();
            for (g, &(v, c)) in groups.iter().enumerate() {
                ways *= binomial(c, take[g]);
                next.extend(std::iter::repeat_n(v, c - take[g]));
                if v > 1 {
                    next.extend(std::iter::repeat_n(v - 1, take[g]));
                }
            }
            next.sort_unstable_by(|a, b| b.cmp(a));
            let sub = count_sorted(&next, memo)?;
            total += ways * sub;
            Ok(())
        })?;
        total
    };
    memo.insert(key.to_vec(), result.clone());
    Ok(result)
}

fn distribute<F>(groups: &[(u8, usize)], g: usize, left: usize, take: &mut Vec<usize>, f: &mut F) -> Result<()>
where
    F: FnMut(&[usize]) -> Result<()>,
{
    if g == groups.len() {
        return if left == 0 { f(take) } else { Ok(()) };
    }
    let capacity: usize = groups[g + 1..].iter().map(|x| x.1).sum();
    let lo = left.saturating_sub(capacity);
    for t in lo..=groups[g].1.min(left) {
        take[g] = t;
        distribute(groups, g + 1, left - t, take, f)?;
    }
    take[g] = 0;
    Ok(())
}

/// `|G(d)|` for every labeled degree sequence on `n` nodes, tallied by
/// visiting all `2^(n(n-1)/2)` graphs.
#[derive(Clone, Debug)]
pub struct DegreeCountTable {
    n: usize,
    counts: HashMap<Vec<u8>, u64>,
}

/// Largest `n` for [`DegreeCountTable`].
pub const TABLE_MAX_N: usize = 7;

impl DegreeCountTable {
    pub fn build(n: usize) -> Result<Self> {
        if n > TABLE_MAX_N {
            return Err(Error::TooLarge {
                what: "node count for the degree table",
                size: n,
                cap: TABLE_MAX_N,
            });
        }
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let mut counts = HashMap::new();
        let mut deg = vec![0u8; n];
        // Gray-code walk: one pair flips per step.
        *counts.entry(deg.clone()).or_insert(0) += 1;
        let mut code = 0u64;
        for i in 1u64..(1u64 << pairs.len()) {
            let bit = i.trailing_zeros() as usize;
            let (a, b) = pairs[bit];
            if code & (1 << bit) == 0 {
                deg[a] += 1;
                deg[b] += 1;
            } else {
                deg[a] -= 1;
                deg[b] -= 1;
            }
            code ^= 1 << bit;
            *counts.entry(deg.clone()).or_insert(0) += 1;
        }
        Ok(DegreeCountTable { n, counts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self, d: &[usize]) -> u64 {
        let key: Vec<u8> = d.iter().map(|&x| x as u8).collect();
        self.counts.get(&key).copied().unwrap_or(0)
    }

    /// `(m, |G_m(l,u)|)` for every `m` in the degree-sum range.
    pub fn interval_counts(&self, iv: &DegreeInterval) -> Vec<(usize, u64)> {
        let (lo, hi) = iv.edge_count_range();
        let mut by_m = vec![0u64; hi + 1];
        for_each_in_box(iv, |d| {
            let s: usize = d.iter().sum();
            if s.is_multiple_of(2) && s / 2 >= lo && s / 2 <= hi {
                by_m[s / 2] += self.count(d);
            }
        });
        (lo..=hi).map(|m| (m, by_m[m])).collect()
    }
}

/// Calls `f` on every integer vector in the box.
pub fn for_each_in_box<F: FnMut(&[usize])>(iv: &DegreeInterval, mut f: F) {
    let n = iv.n();
    let mut d = iv.lower().to_vec();
    loop {
        f(&d);
        let mut i = 0;
        while i < n && d[i] == iv.upper()[i] {
            d[i] = iv.lower()[i];
            i += 1;
        }
        if i == n {
            return;
        }
        d[i] += 1;
    }
}

/// `|G_m(l,u)|` for every `m` in the degree-sum range, via the memoized
/// counter.
pub fn interval_counts(iv: &DegreeInterval) -> Result<Vec<(usize, BigUint)>> {
    let (lo, hi) = iv.edge_count_range();
    let mut by_m = vec![BigUint::zero(); hi + 1];
    let mut cache: HashMap<Vec<usize>, BigUint> = HashMap::new();
    let mut err = None;
    for_each_in_box(iv, |d| {
        let s: usize = d.iter().sum();
        if err.is_some() || s % 2 == 1 || s / 2 < lo || s / 2 > hi {
            return;
        }
        let mut key = d.to_vec();
        key.sort_unstable();
        let c = match cache.get(&key) {
            Some(c) => c.clone(),
            None => match count_realizations(&DegreeSequence(key.clone())) {
                Ok(c) => {
                    cache.insert(key, c.clone());
                    c
                }
                Err(e) => {
                    err = Some(e);
                    return;
                }
            },
        };
        by_m[s / 2] += c;
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok((lo..=hi).map(|m| (m, by_m[m].clone())).collect())
}

/// `|G(l,u)|` exactly.
pub fn count_interval(iv: &DegreeInterval) -> Result<BigUint> {
    Ok(interval_counts(iv)?.into_iter().map(|(_, c)| c).sum())
}

/// `|G_m(l,u)|` exactly.
pub fn count_interval_m(iv: &DegreeInterval, m: usize) -> Result<BigUint> {
    Ok(interval_counts(iv)?
        .into_iter()
        .find(|&(k, _)| k == m)
        .map(|(_, c)| c)
        .unwrap_or_default())
}
