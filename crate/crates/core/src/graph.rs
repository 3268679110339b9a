//! Labeled simple graphs, degree sequences and degree intervals.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Labeled simple undirected graph on nodes `0..n`.
///
/// Adjacency is a row-major bitset so membership tests are a shift and a
/// mask; degrees and the edge count are maintained incrementally.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
    degrees: Vec<usize>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Graph {
            n,
            words,
            adj: vec![0; n * words],
            degrees: vec![0; n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge iterator, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParams(format!("edge {{{u},{v}}} has an endpoint outside 0..{n}")));
            }
            if u == v {
                return Err(Error::InvalidParams(format!("self-loop at node {u}")));
            }
            if !g.add_edge(u, v) {
                return Err(Error::InvalidParams(format!("duplicate edge {{{u},{v}}}")));
            }
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn degree_sequence(&self) -> DegreeSequence {
        DegreeSequence(self.degrees.clone())
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        (self.adj[u * self.words + v / 64] >> (v % 64)) & 1 == 1
    }

    /// Inserts `{u,v}`; returns false if it was already present or is a loop.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v || self.has_edge(u, v) {
            return false;
        }
        self.adj[u * self.words + v / 64] |= 1 << (v % 64);
        self.adj[v * self.words + u / 64] |= 1 << (u % 64);
        self.degrees[u] += 1;
        self.degrees[v] += 1;
        self.edge_count += 1;
        true
    }

    /// Deletes `{u,v}`; returns false if it was absent.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v || !self.has_edge(u, v) {
            return false;
        }
        self.adj[u * self.words + v / 64] &= !(1 << (v % 64));
        self.adj[v * self.words + u / 64] &= !(1 << (u % 64));
        self.degrees[u] -= 1;
        self.degrees[v] -= 1;
        self.edge_count -= 1;
        true
    }

    pub fn toggle_edge(&mut self, u: usize, v: usize) {
        if !self.remove_edge(u, v) {
            self.add_edge(u, v);
        }
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.adj[v * self.words..(v + 1) * self.words];
        row.iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let t = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(w * 64 + t)
                }
            })
        })
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    /// Number of pairs in exactly one of the two edge sets.
    pub fn symmetric_difference_size(&self, other: &Graph) -> usize {
        assert_eq!(self.n, other.n);
        self.adj
            .iter()
            .zip(&other.adj)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Packs the edge set into a bitmask over node pairs in lexicographic
    /// order. Only defined for `n <= MAX_CODE_N`.
    pub fn code(&self) -> u64 {
        assert!(self.n <= MAX_CODE_N, "graph too large for a u64 code");
        let mut code = 0u64;
        let mut bit = 0;
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has_edge(u, v) {
                    code |= 1 << bit;
                }
                bit += 1;
            }
        }
        code
    }

    pub fn from_code(n: usize, code: u64) -> Graph {
        assert!(n <= MAX_CODE_N, "graph too large for a u64 code");
        let mut g = Graph::empty(n);
        let mut bit = 0;
        for u in 0..n {
            for v in u + 1..n {
                if (code >> bit) & 1 == 1 {
                    g.add_edge(u, v);
                }
                bit += 1;
            }
        }
        g
    }
}

/// Largest node count whose pair set fits in a `u64` code.
pub const MAX_CODE_N: usize = 11;

/// Index of pair `{u,v}` in the lexicographic pair order used by
/// [`Graph::code`].
#[inline]
pub fn pair_index(n: usize, u: usize, v: usize) -> usize {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges=[", self.n)?;
        for (i, (u, v)) in self.edges().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{u}{v}")?;
        }
        write!(f, "])")
    }
}

/// Intended node degrees.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DegreeSequence(pub Vec<usize>);

impl DegreeSequence {
    pub fn new(d: Vec<usize>) -> Self {
        DegreeSequence(d)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn min(&self) -> usize {
        self.0.iter().copied().min().unwrap_or(0)
    }

    pub fn max(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn is_graphical(&self) -> bool {
        is_graphical(&self.0)
    }

    /// Non-increasing rearrangement.
    pub fn sorted_desc(&self) -> DegreeSequence {
        let mut d = self.0.clone();
        d.sort_unstable_by(|a, b| b.cmp(a));
        DegreeSequence(d)
    }
}

impl From<Vec<usize>> for DegreeSequence {
    fn from(d: Vec<usize>) -> Self {
        DegreeSequence(d)
    }
}

impl std::ops::Index<usize> for DegreeSequence {
    type Output = usize;
    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

/// Per-node degree bounds `[lower_i, upper_i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DegreeInterval {
    lower: Vec<usize>,
    upper: Vec<usize>,
}

impl DegreeInterval {
    pub fn new(lower: Vec<usize>, upper: Vec<usize>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::LengthMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        let n = lower.len();
        for i in 0..n {
            if lower[i] > upper[i] {
                return Err(Error::InvalidParams(format!(
                    "node {i}: lower {} exceeds upper {}",
                    lower[i], upper[i]
                )));
            }
            if upper[i] + 1 > n.max(1) {
                return Err(Error::BoundExceeded {
                    node: i,
                    upper: upper[i],
                    max: n.saturating_sub(1),
                });
            }
        }
        Ok(DegreeInterval { lower, upper })
    }

    /// The degenerate interval `[d, d]`.
    pub fn exact(d: &DegreeSequence) -> Result<Self> {
        DegreeInterval::new(d.0.clone(), d.0.clone())
    }

    pub fn n(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[usize] {
        &self.lower
    }

    pub fn upper(&self) -> &[usize] {
        &self.upper
    }

    pub fn lower_sum(&self) -> usize {
        self.lower.iter().sum()
    }

    pub fn upper_sum(&self) -> usize {
        self.upper.iter().sum()
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// True when every interval has length at most one.
    pub fn is_unit(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(l, u)| u - l <= 1)
    }

    pub fn contains(&self, d: &[usize]) -> bool {
        d.len() == self.n() && d.iter().enumerate().all(|(i, &x)| self.lower[i] <= x && x <= self.upper[i])
    }

    pub fn contains_graph(&self, g: &Graph) -> bool {
        self.contains(g.degrees())
    }

    /// Smallest and largest edge counts allowed by the degree sums alone.
    pub fn edge_count_range(&self) -> (usize, usize) {
        (self.lower_sum().div_ceil(2), self.upper_sum() / 2)
    }

    /// Same bounds with node `i` given a new interval.
    pub fn with_node(&self, i: usize, lower: usize, upper: usize) -> Result<Self> {
        let mut l = self.lower.clone();
        let mut u = self.upper.clone();
        l[i] = lower;
        u[i] = upper;
        DegreeInterval::new(l, u)
    }

    /// Nodes relabeled so that `(lower, upper)` pairs are sorted.
    pub fn canonical(&self) -> DegreeInterval {
        let mut pairs: Vec<(usize, usize)> = self.lower.iter().copied().zip(self.upper.iter().copied()).collect();
        pairs.sort_unstable();
        DegreeInterval {
            lower: pairs.iter().map(|p| p.0).collect(),
            upper: pairs.iter().map(|p| p.1).collect(),
        }
    }
}

/// Parameters of the near-regular regime: every interval lies inside
/// `[r - r^alpha, r + r^alpha]` with `2 <= r <= (1 - rho) n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearRegularParams {
    pub r: usize,
    pub alpha: f64,
    pub rho: f64,
}

impl NearRegularParams {
    pub fn new(r: usize, alpha: f64, rho: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(Error::InvalidParams(format!("alpha = {alpha} not in (0, 1/2)")));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParams(format!("rho = {rho} not in (0, 1)")));
        }
        if r < 2 {
            return Err(Error::InvalidParams(format!("r = {r} below 2")));
        }
        Ok(NearRegularParams { r, alpha, rho })
    }

    /// Checks `2 <= r <= (1 - rho) n`.
    pub fn fits(&self, n: usize) -> bool {
        self.r >= 2 && (self.r as f64) <= (1.0 - self.rho) * n as f64 + 1e-12
    }

    /// Integer degrees inside `[r - r^alpha, r + r^alpha]`, clipped to `[0, n-1]`.
    pub fn degree_range(&self, n: usize) -> Option<(usize, usize)> {
        let spread = (self.r as f64).powf(self.alpha);
        let lo = ((self.r as f64 - spread) - 1e-12).ceil().max(0.0) as usize;
        let hi = ((self.r as f64 + spread) + 1e-12).floor() as usize;
        let hi = hi.min(n.saturating_sub(1));
        (lo <= hi).then_some((lo, hi))
    }

    pub fn admits(&self, iv: &DegreeInterval) -> bool {
        match self.degree_range(iv.n()) {
            Some((lo, hi)) => self.fits(iv.n()) && iv.lower().iter().all(|&l| l >= lo) && iv.upper().iter().all(|&u| u <= hi),
            None => false,
        }
    }
}

/// Erdős–Gallai test.
pub fn is_graphical(d: &[usize]) -> bool {
    let n = d.len();
    let total: usize = d.iter().sum();
    if total % 2 == 1 {
        return false;
    }
    if d.iter().any(|&x| x >= n.max(1) && x > 0) {
        return false;
    }
    let mut s = d.to_vec();
    s.sort_unstable_by(|a, b| b.cmp(a));
    let mut prefix = 0usize;
    for k in 1..=n {
        prefix += s[k - 1];
        let tail: usize = s[k..].iter().map(|&x| x.min(k)).sum();
        if prefix > k * (k - 1) + tail {
            return false;
        }
    }
    true
}

/// Havel–Hakimi construction. The highest residual degree (lowest index on
/// ties) is connected to the next highest residual degrees, ordered the same
/// way, so the output is deterministic.
pub fn realize(d: &DegreeSequence) -> Result<Graph> {
    if !d.is_graphical() {
        return Err(Error::NotGraphical);
    }
    let n = d.len();
    let mut g = Graph::empty(n);
    let mut residual = d.0.clone();
    let mut alive: Vec<bool> = vec![true; n];
    loop {
        let mut order: Vec<usize> = (0..n).filter(|&i| alive[i] && residual[i] > 0).collect();
        if order.is_empty() {
            break;
        }
        order.sort_by(|&a, &b| residual[b].cmp(&residual[a]).then(a.cmp(&b)));
        let head = order[0];
        let k = residual[head];
        if k > order.len() - 1 {
            return Err(Error::NotGraphical);
        }
        for &t in &order[1..=k] {
            g.add_edge(head, t);
            residual[t] -= 1;
        }
        residual[head] = 0;
        alive[head] = false;
    }
    Ok(g)
}

/// Exhaustive search cap for [`find_degree_sequence`].
pub const EXHAUSTIVE_FEASIBILITY_MAX_N: usize = 12;

/// A graphical `d` with `lower <= d <= upper` and `sum d = 2m`, if one is found.
///
/// Water-filling from the lower bounds comes first (near-regular sequences
/// are almost always graphical); if that fails, small instances are searched
/// exhaustively.
pub fn find_degree_sequence(iv: &DegreeInterval, m: usize) -> Option<DegreeSequence> {
    let target = 2 * m;
    if target < iv.lower_sum() || target > iv.upper_sum() {
        return None;
    }
    let n = iv.n();
    let mut d = iv.lower().to_vec();
    for _ in 0..target - iv.lower_sum() {
        let i = (0..n).filter(|&i| d[i] < iv.upper()[i]).min_by_key(|&i| (d[i], i))?;
        d[i] += 1;
    }
    if is_graphical(&d) {
        return Some(DegreeSequence(d));
    }
    if n > EXHAUSTIVE_FEASIBILITY_MAX_N {
        return None;
    }
    let mut cur = vec![0; n];
    search_box(iv, 0, target, &mut cur).map(DegreeSequence)
}

fn search_box(iv: &DegreeInterval, i: usize, remaining: usize, cur: &mut Vec<usize>) -> Option<Vec<usize>> {
    let n = iv.n();
    if i == n {
        return (remaining == 0 && is_graphical(cur)).then(|| cur.clone());
    }
    let rest_lo: usize = iv.lower()[i + 1..].iter().sum();
    let rest_hi: usize = iv.upper()[i + 1..].iter().sum();
    for x in iv.lower()[i]..=iv.upper()[i] {
        if x > remaining {
            break;
        }
        let left = remaining - x;
        if left < rest_lo || left > rest_hi {
            continue;
        }
        cur[i] = x;
        if let Some(found) = search_box(iv, i + 1, left, cur) {
            return Some(found);
        }
    }
    None
}

/// Some graph in `G_m(lower, upper)`.
pub fn realize_in_interval(iv: &DegreeInterval, m: usize) -> Result<Graph> {
    let d = find_degree_sequence(iv, m)
        .ok_or_else(|| Error::Infeasible(format!("no graphical degree sequence with {m} edges in the interval")))?;
    realize(&d)
}

/// Edge counts `m` for which `G_m(lower, upper)` is nonempty.
pub fn feasible_edge_counts(iv: &DegreeInterval) -> Vec<usize> {
    let (lo, hi) = iv.edge_count_range();
    (lo..=hi).filter(|&m| find_degree_sequence(iv, m).is_some()).collect()
}

/// Intervals of a partially observed network: the observed degree is the
/// lower bound and each unobserved pair may add one more.
pub fn intervals_from_observation(observed: &Graph, missing: &[usize]) -> Result<DegreeInterval> {
    let n = observed.n();
    if missing.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: missing.len(),
        });
    }
    let lower = observed.degrees().to_vec();
    let mut upper = Vec::with_capacity(n);
    for i in 0..n {
        let u = lower[i] + missing[i];
        if u + 1 > n {
            return Err(Error::BoundExceeded {
                node: i,
                upper: u,
                max: n.saturating_sub(1),
            });
        }
        upper.push(u);
    }
    DegreeInterval::new(lower, upper)
}
