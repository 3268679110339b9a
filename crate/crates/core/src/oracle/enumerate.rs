use crate::error::{Error, Result};
use crate::graph::{DegreeInterval, DegreeSequence, Graph};
use serde::{Deserialize, Serialize};

/// Largest node count accepted by [`enumerate_graphs`].
pub const ENUMERATION_MAX_N: usize = 8;

/// Which graphs to enumerate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constraint {
    /// `G(d)`.
    Degrees(DegreeSequence),
    /// `G(l,u)`.
    Interval(DegreeInterval),
    /// `G_m(l,u)`.
    IntervalEdges(DegreeInterval, usize),
}

impl Constraint {
    pub fn n(&self) -> usize {
        match self {
            Constraint::Degrees(d) => d.len(),
            Constraint::Interval(iv) | Constraint::IntervalEdges(iv, _) => iv.n(),
        }
    }

    fn bounds(&self) -> Result<(Vec<usize>, Vec<usize>, Option<usize>)> {
        Ok(match self {
            Constraint::Degrees(d) => {
                let n = d.len();
                if let Some(i) = d.as_slice().iter().position(|&x| x + 1 > n) {
                    return Err(Error::BoundExceeded {
                        node: i,
                        upper: d[i],
                        max: n.saturating_sub(1),
                    });
                }
                let m = (d.sum() % 2 == 0).then_some(d.sum() / 2);
                (d.0.clone(), d.0.clone(), Some(m.unwrap_or(usize::MAX)))
            }
            Constraint::Interval(iv) => (iv.lower().to_vec(), iv.upper().to_vec(), None),
            Constraint::IntervalEdges(iv, m) => (iv.lower().to_vec(), iv.upper().to_vec(), Some(*m)),
        })
    }
}

/// Explicit list of graphs, stored as sorted pair-bitmask codes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSpace {
    n: usize,
    codes: Vec<u64>,
}

impl StateSpace {
    /// Builds a space from arbitrary codes; duplicates are removed.
    pub fn from_codes(n: usize, mut codes: Vec<u64>) -> Self {
        codes.sort_unstable();
        codes.dedup();
        StateSpace { n, codes }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    pub fn code(&self, i: usize) -> u64 {
        self.codes[i]
    }

    pub fn graph(&self, i: usize) -> Graph {
        Graph::from_code(self.n, self.codes[i])
    }

    pub fn index_of(&self, code: u64) -> Option<usize> {
        self.codes.binary_search(&code).ok()
    }

    pub fn graphs(&self) -> impl Iterator<Item = Graph> + '_ {
        self.codes.iter().map(|&c| Graph::from_code(self.n, c))
    }
}

/// All graphs satisfying `c`, by depth-first search over node pairs in
/// lexicographic order with degree and edge-count pruning.
pub fn enumerate_graphs(c: &Constraint) -> Result<StateSpace> {
    let n = c.n();
    if n > ENUMERATION_MAX_N {
        return Err(Error::TooLarge {
            what: "node count for enumeration",
            size: n,
            cap: ENUMERATION_MAX_N,
        });
    }
    let (lower, upper, m) = c.bounds()?;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    // remaining[k][v]: pairs at index >= k that touch v.
    let mut remaining = vec![vec![0usize; n]; pairs.len() + 1];
    for k in (0..pairs.len()).rev() {
        remaining[k] = remaining[k + 1].clone();
        remaining[k][pairs[k].0] += 1;
        remaining[k][pairs[k].1] += 1;
    }
    let mut search = Search {
        pairs: &pairs,
        remaining: &remaining,
        lower: &lower,
        upper: &upper,
        m,
        degrees: vec![0; n],
        out: Vec::new(),
    };
    if (0..n).all(|v| remaining[0][v] >= lower[v]) {
        search.go(0, 0, 0);
    }
    Ok(StateSpace::from_codes(n, search.out))
}

struct Search<'a> {
    pairs: &'a [(usize, usize)],
    remaining: &'a [Vec<usize>],
    lower: &'a [usize],
    upper: &'a [usize],
    m: Option<usize>,
    degrees: Vec<usize>,
    out: Vec<u64>,
}

impl Search<'_> {
    fn go(&mut self, k: usize, code: u64, edges: usize) {
        if let Some(m) = self.m {
            if edges > m || edges + (self.pairs.len() - k) < m {
                return;
            }
        }
        if k == self.pairs.len() {
            self.out.push(code);
            return;
        }
        let (a, b) = self.pairs[k];
        let rest = &self.remaining[k + 1];
        if self.degrees[a] < self.upper[a] && self.degrees[b] < self.upper[b] {
            self.degrees[a] += 1;
            self.degrees[b] += 1;
            if self.degrees[a] + rest[a] >= self.lower[a] && self.degrees[b] + rest[b] >= self.lower[b] {
                self.go(k + 1, code | (1 << k), edges + 1);
            }
            self.degrees[a] -= 1;
            self.degrees[b] -= 1;
        }
        if self.degrees[a] + rest[a] >= self.lower[a] && self.degrees[b] + rest[b] >= self.lower[b] {
            self.go(k + 1, code, edges);
        }
    }
}
