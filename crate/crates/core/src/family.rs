//! Small instance families used by the verification suites.
//!
//! Boxes and sequences are listed up to relabeling of nodes: every quantity
//! checked here is invariant under permuting nodes, so each family keeps one
//! representative with `(lower_i, upper_i)` sorted.

use crate::graph::{DegreeInterval, DegreeSequence, NearRegularParams};
use std::collections::BTreeSet;

/// Interval-width exponent of the desk-scale near-regular family.
pub const DESK_ALPHA: f64 = 0.4;
/// Slack constant of the desk-scale near-regular family.
pub const DESK_RHO: f64 = 0.3;

/// Near-regular parameters `(r, DESK_ALPHA, DESK_RHO)` for every admissible
/// target degree `r >= 2` on `n` nodes.
pub fn desk_params(n: usize) -> Vec<NearRegularParams> {
    (2..n)
        .filter_map(|r| NearRegularParams::new(r, DESK_ALPHA, DESK_RHO).ok())
        .filter(|p| p.fits(n) && p.degree_range(n).is_some())
        .collect()
}

/// Degree ranges `[r - r^a, r + r^a]` of the desk family, clipped to `[0, n-1]`.
pub fn desk_ranges(n: usize) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = desk_params(n).iter().filter_map(|p| p.degree_range(n)).collect();
    out.dedup();
    out
}

/// Sorted multisets of `size` items drawn from `kinds`.
fn multisets<T: Clone>(kinds: &[T], size: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn go<T: Clone>(kinds: &[T], start: usize, size: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for k in start..kinds.len() {
            cur.push(kinds[k].clone());
            go(kinds, k, size, cur, out);
            cur.pop();
        }
    }
    go(kinds, 0, size, &mut cur, &mut out);
    out
}

fn boxes_from_kinds(n: usize, kinds: &[(usize, usize)], into: &mut BTreeSet<(Vec<usize>, Vec<usize>)>) {
    for combo in multisets(kinds, n) {
        into.insert(combo.into_iter().unzip());
    }
}

fn collect(set: BTreeSet<(Vec<usize>, Vec<usize>)>) -> Vec<DegreeInterval> {
    set.into_iter()
        .map(|(l, u)| DegreeInterval::new(l, u).expect("kinds respect the bounds"))
        .collect()
}

/// Every box on `n` nodes with `u_i` in `{l_i, l_i + 1}`.
pub fn unit_boxes(n: usize) -> Vec<DegreeInterval> {
    if n == 0 {
        return Vec::new();
    }
    let kinds: Vec<(usize, usize)> = (0..n).flat_map(|l| [(l, l), (l, l + 1)]).filter(|&(_, u)| u < n).collect();
    let mut set = BTreeSet::new();
    boxes_from_kinds(n, &kinds, &mut set);
    collect(set)
}

/// Every box on `n` nodes.
pub fn all_boxes(n: usize) -> Vec<DegreeInterval> {
    if n == 0 {
        return Vec::new();
    }
    let kinds: Vec<(usize, usize)> = (0..n).flat_map(|l| (l..n).map(move |u| (l, u))).collect();
    let mut set = BTreeSet::new();
    boxes_from_kinds(n, &kinds, &mut set);
    collect(set)
}

/// Boxes whose every interval lies inside one desk range; with `unit_only`,
/// only widths 0 and 1.
pub fn near_regular_boxes(n: usize, unit_only: bool) -> Vec<DegreeInterval> {
    let mut set = BTreeSet::new();
    for (lo, hi) in desk_ranges(n) {
        let kinds: Vec<(usize, usize)> = (lo..=hi)
            .flat_map(|l| (l..=hi).map(move |u| (l, u)))
            .filter(|&(l, u)| !unit_only || u <= l + 1)
            .collect();
        boxes_from_kinds(n, &kinds, &mut set);
    }
    collect(set)
}

/// Sorted sequences with even sum and every entry inside one desk range.
pub fn near_regular_sequences(n: usize) -> Vec<DegreeSequence> {
    let mut set = BTreeSet::new();
    for (lo, hi) in desk_ranges(n) {
        let values: Vec<usize> = (lo..=hi).collect();
        for d in multisets(&values, n) {
            if d.iter().sum::<usize>() % 2 == 0 {
                set.insert(d);
            }
        }
    }
    set.into_iter().map(DegreeSequence).collect()
}
