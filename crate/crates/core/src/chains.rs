//! Local moves and the lazy Markov chains built from them.
//!
//! Three kernels share one implementation:
//!
//! * `Switch` on `G(d)`: with probability `1/q` try a switch.
//! * `SwitchHingeFlip` on `G_m(l,u)`: hold with probability 2/3, otherwise
//!   try a switch or a hinge flip with probability 1/6 each.
//! * `DegreeInterval` on `G(l,u)`: hold with probability 1/2, otherwise try
//!   a switch, a hinge flip or an edge toggle with probability 1/6 each.
//!
//! Move tuples are drawn uniformly from `[0,n)^k` with repeats allowed; a
//! tuple with a repeated node never passes the move test, so it just adds to
//! the holding probability.

use crate::error::{Error, Result};
use crate::graph::{DegreeInterval, DegreeSequence, Graph};
use crate::scalar::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Seeded generator for stream `stream` of run `seed`.
///
/// ChaCha is counter based, so distinct streams of one seed are independent
/// and parallel runs stay reproducible regardless of scheduling.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    /// `(v,w,x,y)`: replace `{w,v},{x,y}` by `{y,v},{x,w}`.
    Switch([usize; 4]),
    /// `(v,w,x)`: replace `{w,v}` by `{w,x}`.
    Hinge([usize; 3]),
    /// `(v,w)`: add or delete `{v,w}`.
    Toggle([usize; 2]),
}

/// Node pairs flipped by an applicable move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Flips {
    pairs: [(usize, usize); 4],
    len: usize,
}

impl Flips {
    fn new(list: &[(usize, usize)]) -> Self {
        let mut pairs = [(0, 0); 4];
        pairs[..list.len()].copy_from_slice(list);
        Flips { pairs, len: list.len() }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs[..self.len]
    }

    pub fn apply(&self, g: &mut Graph) {
        for &(a, b) in self.pairs() {
            g.toggle_edge(a, b);
        }
    }
}

fn distinct<const K: usize>(t: &[usize; K]) -> bool {
    (0..K).all(|i| (i + 1..K).all(|j| t[i] != t[j]))
}

/// Pairs flipped by the switch `(v,w,x,y)`, if it applies.
pub fn switch_flips(g: &Graph, [v, w, x, y]: [usize; 4]) -> Option<Flips> {
    let ok = distinct(&[v, w, x, y]) && g.has_edge(w, v) && g.has_edge(x, y) && !g.has_edge(y, v) && !g.has_edge(x, w);
    ok.then(|| Flips::new(&[(w, v), (x, y), (y, v), (x, w)]))
}

/// Pairs flipped by the hinge flip `(v,w,x)` under `iv`, if it applies.
pub fn hinge_flips(g: &Graph, [v, w, x]: [usize; 3], iv: &DegreeInterval) -> Option<Flips> {
    let ok = distinct(&[v, w, x]) && g.has_edge(w, v) && !g.has_edge(w, x) && g.degree(v) > iv.lower()[v] && g.degree(x) < iv.upper()[x];
    ok.then(|| Flips::new(&[(w, v), (w, x)]))
}

/// Pair flipped by toggling `{v,w}` under `iv`, if it applies.
pub fn toggle_flips(g: &Graph, [v, w]: [usize; 2], iv: &DegreeInterval) -> Option<Flips> {
    if v == w {
        return None;
    }
    let ok = if g.has_edge(v, w) {
        g.degree(v) > iv.lower()[v] && g.degree(w) > iv.lower()[w]
    } else {
        g.degree(v) < iv.upper()[v] && g.degree(w) < iv.upper()[w]
    };
    ok.then(|| Flips::new(&[(v, w)]))
}

/// Applies the switch in place; returns whether the graph changed.
pub fn switch_move(g: &mut Graph, quad: [usize; 4]) -> bool {
    switch_flips(g, quad).map(|f| f.apply(g)).is_some()
}

/// Applies the hinge flip in place; returns whether the graph changed.
pub fn hinge_flip_move(g: &mut Graph, triple: [usize; 3], iv: &DegreeInterval) -> bool {
    hinge_flips(g, triple, iv).map(|f| f.apply(g)).is_some()
}

/// Applies the edge toggle in place; returns whether the graph changed.
pub fn add_delete_move(g: &mut Graph, pair: [usize; 2], iv: &DegreeInterval) -> bool {
    toggle_flips(g, pair, iv).map(|f| f.apply(g)).is_some()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChainKind {
    Switch,
    SwitchHingeFlip,
    DegreeInterval,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub steps: u64,
    pub seed: u64,
}

/// Default inverse switch probability of the lazy switch chain.
pub const DEFAULT_SWITCH_Q: u64 = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionKernel {
    kind: ChainKind,
    interval: DegreeInterval,
    m: Option<usize>,
    switch_q: u64,
}

impl TransitionKernel {
    /// Lazy switch chain on `G(d)` that tries a switch with probability `1/q`.
    pub fn switch(d: &DegreeSequence, q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParams(format!("switch laziness q = {q} below 2")));
        }
        Ok(TransitionKernel {
            kind: ChainKind::Switch,
            interval: DegreeInterval::exact(d)?,
            m: Some(d.sum() / 2),
            switch_q: q,
        })
    }

    /// Switch–hinge-flip chain on `G_m(l,u)`; `m = None` leaves the edge
    /// count to the start state.
    pub fn switch_hinge(iv: DegreeInterval, m: Option<usize>) -> Self {
        TransitionKernel {
            kind: ChainKind::SwitchHingeFlip,
            interval: iv,
            m,
            switch_q: 6,
        }
    }

    pub fn degree_interval(iv: DegreeInterval) -> Self {
        TransitionKernel {
            kind: ChainKind::DegreeInterval,
            interval: iv,
            m: None,
            switch_q: 6,
        }
    }

    pub fn kind(&self) -> ChainKind {
        self.kind
    }

    pub fn interval(&self) -> &DegreeInterval {
        &self.interval
    }

    pub fn edge_count(&self) -> Option<usize> {
        self.m
    }

    pub fn n(&self) -> usize {
        self.interval.n()
    }

    /// Membership in the kernel's state space.
    pub fn contains(&self, g: &Graph) -> bool {
        g.n() == self.n() && self.interval.contains_graph(g) && self.m.is_none_or(|m| g.edge_count() == m)
    }

    /// Pairs flipped by `mv` when it is legal for this kernel.
    pub fn flips(&self, g: &Graph, mv: Move) -> Option<Flips> {
        match (self.kind, mv) {
            (_, Move::Switch(q)) => switch_flips(g, q),
            (ChainKind::Switch, _) => None,
            (_, Move::Hinge(t)) => hinge_flips(g, t, &self.interval),
            (ChainKind::DegreeInterval, Move::Toggle(p)) => toggle_flips(g, p, &self.interval),
            (_, Move::Toggle(_)) => None,
        }
    }

    /// Draws the move attempted by one step, or `None` for a hold.
    pub fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Move> {
        let n = self.n();
        if n == 0 {
            return None;
        }
        match self.kind {
            ChainKind::Switch => rng_hit(rng, self.switch_q).then(|| Move::Switch(tuple(rng, n))),
            ChainKind::SwitchHingeFlip => match rng.gen_range(0..6u8) {
                0 => Some(Move::Switch(tuple(rng, n))),
                1 => Some(Move::Hinge(tuple(rng, n))),
                _ => None,
            },
            ChainKind::DegreeInterval => match rng.gen_range(0..6u8) {
                0 => Some(Move::Switch(tuple(rng, n))),
                1 => Some(Move::Hinge(tuple(rng, n))),
                2 => Some(Move::Toggle(tuple(rng, n))),
                _ => None,
            },
        }
    }

    /// One lazy step in place; returns whether the state changed.
    pub fn step<R: Rng + ?Sized>(&self, g: &mut Graph, rng: &mut R) -> bool {
        match self.propose(rng).and_then(|mv| self.flips(g, mv)) {
            Some(f) => {
                f.apply(g);
                true
            }
            None => false,
        }
    }

    pub fn run(&self, g0: &Graph, cfg: RunConfig) -> Graph {
        self.run_stream(g0, cfg, 0)
    }

    /// Like [`run`](Self::run) on an independent RNG stream.
    pub fn run_stream(&self, g0: &Graph, cfg: RunConfig, stream: u64) -> Graph {
        let mut g = g0.clone();
        let mut rng = seeded_rng(cfg.seed, stream);
        for _ in 0..cfg.steps {
            self.step(&mut g, &mut rng);
        }
        g
    }

    /// Common denominator of all single-tuple probabilities.
    ///
    /// A switch tuple has probability `1/(c n^4)`, a hinge tuple `n/(c n^4)`
    /// and a toggle pair `n^2/(c n^4)`, with `c = q` for the switch chain and
    /// 6 otherwise.
    pub fn denominator(&self) -> u64 {
        let n = self.n() as u64;
        let c = match self.kind {
            ChainKind::Switch => self.switch_q,
            _ => 6,
        };
        c * n.pow(4)
    }

    /// Calls `f(flips, numerator)` for every tuple whose move applies at `g`.
    /// The numerator is over [`denominator`](Self::denominator).
    pub fn for_each_transition<F: FnMut(Flips, u64)>(&self, g: &Graph, mut f: F) {
        let n = self.n();
        let arcs: Vec<(usize, usize)> = g.edges().flat_map(|(a, b)| [(a, b), (b, a)]).collect();
        for &(w, v) in &arcs {
            for &(x, y) in &arcs {
                if let Some(fl) = switch_flips(g, [v, w, x, y]) {
                    f(fl, 1);
                }
            }
        }
        if self.kind == ChainKind::Switch {
            return;
        }
        for &(w, v) in &arcs {
            for x in 0..n {
                if let Some(fl) = hinge_flips(g, [v, w, x], &self.interval) {
                    f(fl, n as u64);
                }
            }
        }
        if self.kind == ChainKind::DegreeInterval {
            for v in 0..n {
                for w in 0..n {
                    if let Some(fl) = toggle_flips(g, [v, w], &self.interval) {
                        f(fl, (n * n) as u64);
                    }
                }
            }
        }
    }

    /// Exact one-step distribution from `g` as `(target, probability)` with
    /// the holding mass first.
    pub fn transition_row<S: Scalar>(&self, g: &Graph) -> Vec<(Graph, S)> {
        let mut targets: BTreeMap<Vec<(usize, usize)>, (Graph, u64)> = BTreeMap::new();
        self.for_each_transition(g, |fl, num| {
            let mut h = g.clone();
            fl.apply(&mut h);
            let key: Vec<(usize, usize)> = h.edges().collect();
            targets.entry(key).or_insert((h, 0)).1 += num;
        });
        let den = self.denominator();
        let moved: u64 = targets.values().map(|(_, c)| c).sum();
        let mut row = vec![(g.clone(), S::from_ratio(den - moved, den))];
        row.extend(targets.into_values().map(|(h, c)| (h, S::from_ratio(c, den))));
        row
    }
}

fn tuple<R: Rng + ?Sized, const K: usize>(rng: &mut R, n: usize) -> [usize; K] {
    std::array::from_fn(|_| rng.gen_range(0..n))
}

fn rng_hit<R: Rng + ?Sized>(rng: &mut R, q: u64) -> bool {
    rng.gen_range(0..q) == 0
}
