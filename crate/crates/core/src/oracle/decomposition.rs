use crate::graph::Graph;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComponentKind {
    /// Closed alternating trail.
    Cycle,
    /// Open trail with as many `G` edges as `G'` edges.
    EvenPath,
    /// Open trail with one more `G` edge.
    GPath,
    /// Open trail with one more `G'` edge.
    GPrimePath,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub kind: ComponentKind,
    /// Pairs in traversal order, each with `true` for an edge of `G`
    /// (blue) and `false` for an edge of `G'` (red).
    pub edges: Vec<((usize, usize), bool)>,
}

/// Splits `E(G) △ E(G')` into alternating cycles and paths.
///
/// Blue edges are `E(G) \ E(G')`, red edges `E(G') \ E(G)`. At every node the
/// blue and red edges are each sorted by `(min endpoint, max endpoint)` and
/// the i-th red edge is paired with the i-th blue edge; the pairings chain
/// edges into components. The result depends only on the two graphs.
pub fn canonical_decomposition(g: &Graph, h: &Graph) -> Vec<Component> {
    assert_eq!(g.n(), h.n(), "graphs on different node sets");
    let n = g.n();
    let mut edges: Vec<((usize, usize), bool)> = Vec::new();
    for (a, b) in g.edges() {
        if !h.has_edge(a, b) {
            edges.push(((a, b), true));
        }
    }
    for (a, b) in h.edges() {
        if !g.has_edge(a, b) {
            edges.push(((a, b), false));
        }
    }
    edges.sort_unstable();
    // link[e][side]: edge paired with e at endpoint `side` (0 = min, 1 = max).
    let mut link = vec![[usize::MAX; 2]; edges.len()];
    let mut at: Vec<(Vec<usize>, Vec<usize>)> = vec![(Vec::new(), Vec::new()); n];
    for (i, &((a, b), blue)) in edges.iter().enumerate() {
        for x in [a, b] {
            if blue {
                at[x].0.push(i);
            } else {
                at[x].1.push(i);
            }
        }
    }
    let side = |e: usize, x: usize| if edges[e].0 .0 == x { 0 } else { 1 };
    for (x, (blue, red)) in at.iter().enumerate() {
        for (&b, &r) in blue.iter().zip(red) {
            link[b][side(b, x)] = r;
            link[r][side(r, x)] = b;
        }
    }
    let mut seen = vec![false; edges.len()];
    let mut out = Vec::new();
    let walk = |start: usize, from_side: usize, seen: &mut Vec<bool>| {
        // Leave `start` through the endpoint opposite `from_side`.
        let mut trail = Vec::new();
        let mut e = start;
        let mut enter = from_side;
        loop {
            seen[e] = true;
            trail.push(edges[e]);
            let exit = 1 - enter;
            let node = if exit == 0 { edges[e].0 .0 } else { edges[e].0 .1 };
            let next = link[e][exit];
            if next == usize::MAX || seen[next] {
                break;
            }
            enter = side(next, node);
            e = next;
        }
        trail
    };
    // Open trails start at an edge with an unpaired endpoint.
    for e in 0..edges.len() {
        if seen[e] {
            continue;
        }
        if let Some(free) = (0..2).find(|&s| link[e][s] == usize::MAX) {
            let trail = walk(e, free, &mut seen);
            let blue = trail.iter().filter(|x| x.1).count();
            let red = trail.len() - blue;
            let kind = match blue.cmp(&red) {
                std::cmp::Ordering::Equal => ComponentKind::EvenPath,
                std::cmp::Ordering::Greater => ComponentKind::GPath,
                std::cmp::Ordering::Less => ComponentKind::GPrimePath,
            };
            out.push(Component { kind, edges: trail });
        }
    }
    for e in 0..edges.len() {
        if !seen[e] {
            let trail = walk(e, 0, &mut seen);
            out.push(Component {
                kind: ComponentKind::Cycle,
                edges: trail,
            });
        }
    }
    out
}

/// `#G-paths - #G'-paths`, which equals `|E(G)| - |E(G')|`.
pub fn path_balance(components: &[Component]) -> i64 {
    components
        .iter()
        .map(|c| match c.kind {
            ComponentKind::GPath => 1,
            ComponentKind::GPrimePath => -1,
            _ => 0,
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_graphs_give_nothing() {
        let g = Graph::complete(5);
        assert!(canonical_decomposition(&g, &g).is_empty());
    }

    #[test]
    fn single_alternating_cycle() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let h = Graph::from_edges(4, [(0, 3), (1, 2)]).unwrap();
        let c = canonical_decomposition(&g, &h);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].kind, ComponentKind::Cycle);
        assert_eq!(c[0].edges.len(), 4);
    }

    #[test]
    fn single_extra_edge_is_a_g_path() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let c = canonical_decomposition(&g, &Graph::empty(3));
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].kind, ComponentKind::GPath);
        let c = canonical_decomposition(&Graph::empty(3), &g);
        assert_eq!(c[0].kind, ComponentKind::GPrimePath);
    }

    #[test]
    fn hinge_flip_difference_is_even_path() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let h = Graph::from_edges(3, [(1, 2)]).unwrap();
        let c = canonical_decomposition(&g, &h);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].kind, ComponentKind::EvenPath);
    }

    fn check_partition(g: &Graph, h: &Graph, comps: &[Component]) -> std::result::Result<(), TestCaseError> {
        let mut all: Vec<(usize, usize)> = comps.iter().flat_map(|c| c.edges.iter().map(|e| e.0)).collect();
        all.sort_unstable();
        let mut want: Vec<(usize, usize)> = g
            .edges()
            .filter(|&(a, b)| !h.has_edge(a, b))
            .chain(h.edges().filter(|&(a, b)| !g.has_edge(a, b)))
            .collect();
        want.sort_unstable();
        prop_assert_eq!(all, want);
        for c in comps {
            // Consecutive edges share a node and alternate colour.
            for w in c.edges.windows(2) {
                let ((a, b), x) = w[0];
                let ((p, q), y) = w[1];
                prop_assert!(x != y);
                prop_assert!(a == p || a == q || b == p || b == q);
            }
            if c.kind == ComponentKind::Cycle {
                prop_assert!(c.edges.len() % 2 == 0);
            }
        }
        Ok(())
    }

    proptest! {
        #[test]
        fn decomposition_invariants(n in 2usize..8, a in any::<u64>(), b in any::<u64>()) {
            let mask = (1u64 << (n * (n - 1) / 2)) - 1;
            let g = Graph::from_code(n, a & mask);
            let h = Graph::from_code(n, b & mask);
            let comps = canonical_decomposition(&g, &h);
            check_partition(&g, &h, &comps)?;
            prop_assert_eq!(path_balance(&comps), g.edge_count() as i64 - h.edge_count() as i64);
            prop_assert_eq!(canonical_decomposition(&g, &h), comps);
        }

        #[test]
        fn two_extra_edges_give_two_extra_g_paths(n in 4usize..8, a in any::<u64>(), b in any::<u64>()) {
            let mask = (1u64 << (n * (n - 1) / 2)) - 1;
            let g = Graph::from_code(n, a & mask);
            prop_assume!(g.edge_count() >= 2);
            // Adjust b to exactly two fewer pairs than g.
            let target = g.edge_count() as u32 - 2;
            let mut b = b & mask;
            while b.count_ones() > target {
                b &= b - 1;
            }
            while b.count_ones() < target {
                b |= (b + 1) & !b;
            }
            let h = Graph::from_code(n, b);
            let comps = canonical_decomposition(&g, &h);
            let gp = comps.iter().filter(|c| c.kind == ComponentKind::GPath).count();
            let hp = comps.iter().filter(|c| c.kind == ComponentKind::GPrimePath).count();
            prop_assert_eq!(gp, hp + 2);
        }
    }
}
