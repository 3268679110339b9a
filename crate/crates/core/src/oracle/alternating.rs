use crate::error::{Error, Result};
use crate::graph::Graph;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Edge-disjoint walk in the complete graph whose steps alternate between
/// edges and non-edges of a host graph, starting with an edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternatingPath {
    pub nodes: Vec<usize>,
}

impl AlternatingPath {
    /// Number of steps.
    pub fn len(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pairs `(a, b, is_edge_step)` in walk order.
    pub fn steps(&self) -> impl Iterator<Item = (usize, usize, bool)> + '_ {
        self.nodes.windows(2).enumerate().map(|(k, w)| (w[0], w[1], k % 2 == 0))
    }

    /// Checks alternation against `g` and that no pair repeats.
    pub fn is_valid_in(&self, g: &Graph) -> bool {
        let mut used: Vec<(usize, usize)> = Vec::new();
        for (a, b, edge) in self.steps() {
            let key = (a.min(b), a.max(b));
            if a == b || g.has_edge(a, b) != edge || used.contains(&key) {
                return false;
            }
            used.push(key);
        }
        true
    }

    /// `g` with every pair on the walk flipped.
    pub fn flip(&self, g: &Graph) -> Graph {
        let mut h = g.clone();
        for (a, b, _) in self.steps() {
            h.toggle_edge(a, b);
        }
        h
    }
}

/// Search for a shortest alternating trail.
struct TrailSearch<'a> {
    g: &'a Graph,
    end: usize,
    /// Step `k` must be an edge iff `(k + offset)` is even.
    offset: usize,
    last_is_edge: bool,
    used: Vec<(usize, usize)>,
    forbidden: Vec<(usize, usize)>,
    /// `lb[x][t]`: fewest steps from `x` to a finish when the next step has
    /// type `t` (1 = edge), ignoring disjointness.
    lb: Vec<[usize; 2]>,
    nodes: Vec<usize>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl TrailSearch<'_> {
    fn step_is_edge(&self, k: usize) -> bool {
        (k + self.offset).is_multiple_of(2)
    }

    fn blocked(&self, a: usize, b: usize) -> bool {
        let k = key(a, b);
        self.used.contains(&k) || self.forbidden.contains(&k)
    }

    fn lower_bounds(&mut self) {
        let n = self.g.n();
        let mut lb = vec![[usize::MAX; 2]; n];
        let mut queue = VecDeque::new();
        // Arriving at `end` through a step of the final type finishes.
        for (x, slot) in lb.iter_mut().enumerate() {
            if x != self.end && self.g.has_edge(x, self.end) == self.last_is_edge && !self.forbidden.contains(&key(x, self.end)) {
                slot[self.last_is_edge as usize] = 1;
                queue.push_back((x, self.last_is_edge as usize));
            }
        }
        while let Some((y, t)) = queue.pop_front() {
            let d = lb[y][t];
            // A step of type 1-t into y from x precedes a step of type t.
            let prev = 1 - t;
            for (x, slot) in lb.iter_mut().enumerate() {
                if x != y && self.g.has_edge(x, y) == (prev == 1) && !self.forbidden.contains(&key(x, y)) && slot[prev] == usize::MAX {
                    slot[prev] = d + 1;
                    queue.push_back((x, prev));
                }
            }
        }
        self.lb = lb;
    }

    fn dfs(&mut self, at: usize, k: usize, left: usize) -> bool {
        let want_edge = self.step_is_edge(k);
        if self.lb[at][want_edge as usize] > left {
            return false;
        }
        for next in 0..self.g.n() {
            if next == at || self.g.has_edge(at, next) != want_edge || self.blocked(at, next) {
                continue;
            }
            self.used.push(key(at, next));
            self.nodes.push(next);
            if next == self.end && want_edge == self.last_is_edge {
                return true;
            }
            if left > 1 && self.dfs(next, k + 1, left - 1) {
                return true;
            }
            self.nodes.pop();
            self.used.pop();
        }
        false
    }
}

/// Shortest alternating trail from `start` to `end` with at most `k_max`
/// steps. `first_is_edge` and `last_is_edge` fix the step types at the ends;
/// pairs in `used` and `forbidden` may not be traversed.
#[allow(clippy::too_many_arguments)]
fn shortest_trail(
    g: &Graph,
    start: usize,
    end: usize,
    first_is_edge: bool,
    last_is_edge: bool,
    k_max: usize,
    used: Vec<(usize, usize)>,
    forbidden: Vec<(usize, usize)>,
) -> Option<Vec<usize>> {
    let mut s = TrailSearch {
        g,
        end,
        offset: if first_is_edge { 0 } else { 1 },
        last_is_edge,
        used,
        forbidden,
        lb: Vec::new(),
        nodes: vec![start],
    };
    s.lower_bounds();
    for depth in 1..=k_max {
        let base = s.used.len();
        s.nodes.truncate(1);
        if s.dfs(start, 0, depth) {
            return Some(s.nodes);
        }
        s.used.truncate(base);
    }
    None
}

/// Shortest alternating `(u,v)`-path of length at most `k_max`: it starts
/// with an edge at `u` and ends with a non-edge at `v`, so flipping it lowers
/// the degree of `u` and raises that of `v` by one.
pub fn find_alternating_path(g: &Graph, u: usize, v: usize, k_max: usize) -> Option<AlternatingPath> {
    if u == v {
        return None;
    }
    shortest_trail(g, u, v, true, false, k_max, Vec::new(), Vec::new()).map(|nodes| AlternatingPath { nodes })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransformGoal {
    /// End without the pair `{u,v}`.
    RemoveEdge(usize, usize),
    /// End with the pair `{u,v}`.
    AddEdge(usize, usize),
    /// End with `{u,w}` still present and `{u,v}` absent.
    KeepRemove { u: usize, keep: usize, remove: usize },
}

impl TransformGoal {
    pub fn satisfied_by(&self, g: &Graph) -> bool {
        match *self {
            TransformGoal::RemoveEdge(u, v) => !g.has_edge(u, v),
            TransformGoal::AddEdge(u, v) => g.has_edge(u, v),
            TransformGoal::KeepRemove { u, keep, remove } => g.has_edge(u, keep) && !g.has_edge(u, remove),
        }
    }
}

/// A graph with the same degrees as `g` that meets `goal`, at minimum
/// symmetric difference, provided that difference is at most `budget`.
///
/// Any such target differs from `g` by edge-disjoint closed alternating
/// trails, and flipping only the trail through the goal pair already meets
/// the goal, so the search runs over single closed trails.
pub fn short_cycle_transform(g: &Graph, goal: TransformGoal, budget: usize) -> Result<Graph> {
    if goal.satisfied_by(g) {
        return Ok(g.clone());
    }
    let (u, v, is_edge, forbidden) = match goal {
        TransformGoal::RemoveEdge(u, v) => (u, v, true, Vec::new()),
        TransformGoal::AddEdge(u, v) => (u, v, false, Vec::new()),
        TransformGoal::KeepRemove { u, keep, remove } => {
            if !g.has_edge(u, keep) {
                return Err(Error::NotFound { budget });
            }
            (u, remove, true, vec![key(u, keep)])
        }
    };
    if u == v || budget < 2 {
        return Err(Error::NotFound { budget });
    }
    // Closed trail u -> v -> ... -> u: after the goal pair the steps
    // alternate starting with the opposite type and end at u with it too.
    let rest = shortest_trail(g, v, u, !is_edge, !is_edge, budget - 1, vec![key(u, v)], forbidden).ok_or(Error::NotFound { budget })?;
    let mut h = g.clone();
    h.toggle_edge(u, v);
    for w in rest.windows(2) {
        h.toggle_edge(w[0], w[1]);
    }
    Ok(h)
}

/// `(d_max - d_min + 1)^2 <= 4 d_min (n - d_max - 1)`, the sufficient
/// condition for alternating paths of length at most 10.
pub fn satisfies_stability_inequality(d: &[usize]) -> bool {
    let n = d.len();
    let (lo, hi) = match (d.iter().min(), d.iter().max()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return false,
    };
    if hi + 1 > n {
        return false;
    }
    (hi - lo + 1).pow(2) <= 4 * lo * (n - hi - 1)
}
