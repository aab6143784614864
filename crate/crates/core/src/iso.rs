//! Graph isomorphism for small graphs by backtracking with degree pruning.

use crate::graph::{Multigraph, VertexId};

fn multiplicity(g: &Multigraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut m = vec![vec![0; n]; n];
    for (_, [u, v]) in g.edges() {
        m[u.0][v.0] += 1;
        if u != v {
            m[v.0][u.0] += 1;
        }
    }
    m
}

fn signature(g: &Multigraph, v: VertexId) -> (usize, Vec<usize>) {
    let mut nd: Vec<usize> = g.neighbors(v).map(|w| g.degree(w)).collect();
    nd.sort_unstable();
    (g.degree(v), nd)
}

/// A bijection `map[v in g] = w in h` preserving edge multiplicities.
pub fn find_isomorphism(g: &Multigraph, h: &Multigraph) -> Option<Vec<VertexId>> {
    let n = g.vertex_count();
    if n != h.vertex_count() || g.edge_count() != h.edge_count() {
        return None;
    }
    let sg: Vec<_> = g.vertices().map(|v| signature(g, v)).collect();
    let sh: Vec<_> = h.vertices().map(|v| signature(h, v)).collect();
    let mut a = sg.clone();
    let mut b = sh.clone();
    a.sort();
    b.sort();
    if a != b {
        return None;
    }
    let mg = multiplicity(g);
    let mh = multiplicity(h);
    // most constrained first: high degree, then connected to already placed
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (order.iter().filter(|&&u| mg[u][v] > 0).count(), sg[v].0, std::cmp::Reverse(v)))
            .unwrap();
        placed[next] = true;
        order.push(next);
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn go(
        i: usize,
        order: &[usize],
        map: &mut [usize],
        used: &mut [bool],
        mg: &[Vec<usize>],
        mh: &[Vec<usize>],
        sg: &[(usize, Vec<usize>)],
        sh: &[(usize, Vec<usize>)],
    ) -> bool {
        if i == order.len() {
            return true;
        }
        let v = order[i];
        for w in 0..mh.len() {
            if used[w] || sg[v] != sh[w] || mg[v][v] != mh[w][w] {
                continue;
            }
            if order[..i].iter().any(|&u| mg[u][v] != mh[map[u]][w]) {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if go(i + 1, order, map, used, mg, mh, sg, sh) {
                return true;
            }
            used[w] = false;
            map[v] = usize::MAX;
        }
        false
    }

    if go(0, &order, &mut map, &mut used, &mg, &mh, &sg, &sh) {
        Some(map.into_iter().map(VertexId).collect())
    } else {
        None
    }
}

pub fn is_isomorphic(g: &Multigraph, h: &Multigraph) -> bool {
    find_isomorphism(g, h).is_some()
}

/// Checks that `map` is an isomorphism, independent of how it was found.
pub fn verify_isomorphism(g: &Multigraph, h: &Multigraph, map: &[VertexId]) -> bool {
    if map.len() != g.vertex_count() || g.vertex_count() != h.vertex_count() {
        return false;
    }
    let mut seen = vec![false; h.vertex_count()];
    for w in map {
        if w.0 >= seen.len() || std::mem::replace(&mut seen[w.0], true) {
            return false;
        }
    }
    let mg = multiplicity(g);
    let mh = multiplicity(h);
    g.vertices().all(|u| g.vertices().all(|v| mg[u.0][v.0] == mh[map[u.0].0][map[v.0].0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(labels: &[&str]) -> Multigraph {
        let n = labels.len();
        let edges: Vec<(&str, &str)> = (0..n).map(|i| (labels[i], labels[(i + 1) % n])).collect();
        Multigraph::from_labels(labels, &edges).unwrap()
    }

    #[test]
    fn cycles() {
        let a = cycle(&["1", "2", "3", "4", "5", "6"]);
        let b = cycle(&["x", "z", "y", "u", "w", "v"]);
        let m = find_isomorphism(&a, &b).unwrap();
        assert!(verify_isomorphism(&a, &b, &m));
        let two_triangles = Multigraph::from_labels(
            &["a", "b", "c", "d", "e", "f"],
            &[("a", "b"), ("b", "c"), ("c", "a"), ("d", "e"), ("e", "f"), ("f", "d")],
        )
        .unwrap();
        assert!(!is_isomorphic(&a, &two_triangles));
    }

    #[test]
    fn multiplicity_matters() {
        let a = Multigraph::from_labels(&["p", "q", "r"], &[("p", "q"), ("p", "q"), ("q", "r"), ("r", "p")]).unwrap();
        let b = Multigraph::from_labels(&["p", "q", "r"], &[("p", "q"), ("q", "r"), ("q", "r"), ("r", "p")]).unwrap();
        assert!(is_isomorphic(&a, &b));
        let c = Multigraph::from_labels(&["p", "q", "r"], &[("p", "q"), ("q", "r"), ("r", "p"), ("p", "p")]).unwrap();
        assert!(!is_isomorphic(&a, &c));
    }

    #[test]
    fn bad_map_rejected() {
        let a = cycle(&["1", "2", "3", "4"]);
        let map = vec![VertexId(0), VertexId(2), VertexId(1), VertexId(3)];
        assert!(!verify_isomorphism(&a, &a, &map));
    }
}
