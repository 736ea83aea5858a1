use std::collections::VecDeque;

use rustc_hash::FxHashMap;

use super::{Edge, Graph, GraphError};

/// Whether the subgraph induced by the vertices within `radius` hops of
/// either endpoint of `e` contains a cycle.
///
/// The induced subgraph is connected (it contains the search tree), so it
/// has a cycle exactly when it has as many edges as vertices.
pub fn neighborhood_has_cycle(g: &Graph, e: Edge, radius: usize) -> Result<bool, GraphError> {
    if g.find_edge(e.u, e.v).is_none() {
        return Err(GraphError::MissingEdge(e.u, e.v));
    }
    let dist = neighborhood_distances(g, e, radius);
    let mut ends = 0usize;
    for &w in dist.keys() {
        ends += g.incident(w).iter().filter(|(x, _)| dist.contains_key(x)).count();
    }
    Ok(ends / 2 >= dist.len())
}

/// Hop distance from the nearer endpoint of `e` for every vertex within
/// `radius`.
pub(crate) fn neighborhood_distances(g: &Graph, e: Edge, radius: usize) -> FxHashMap<usize, usize> {
    let mut dist = FxHashMap::default();
    let mut queue = VecDeque::new();
    for w in [e.u, e.v] {
        dist.insert(w, 0);
        queue.push_back(w);
    }
    while let Some(w) = queue.pop_front() {
        let d = dist[&w];
        if d == radius {
            continue;
        }
        for &(x, _) in g.incident(w) {
            if let std::collections::hash_map::Entry::Vacant(slot) = dist.entry(x) {
                slot.insert(d + 1);
                queue.push_back(x);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let edges = (0..n).map(|i| Edge::new(i, (i + 1) % n)).collect();
        Graph::new(n, edges, 2).unwrap()
    }

    #[test]
    fn triangle_has_a_cycle_at_radius_one() {
        let g = cycle(3);
        for &e in g.edges() {
            assert!(neighborhood_has_cycle(&g, e, 1).unwrap());
        }
    }

    #[test]
    fn six_cycle_needs_radius_two() {
        // From edge (0,1): radius 1 reaches {5,0,1,2}, a path; radius 2
        // reaches all six vertices.
        let g = cycle(6);
        let e = Edge::new(0, 1);
        assert!(!neighborhood_has_cycle(&g, e, 0).unwrap());
        assert!(!neighborhood_has_cycle(&g, e, 1).unwrap());
        assert!(neighborhood_has_cycle(&g, e, 2).unwrap());
    }

    #[test]
    fn distant_cycle_counts_once_reached() {
        // path 0-1-2 with a triangle 2-3-4 hanging off vertex 2
        let edges = vec![
            Edge::new(0, 1),
            Edge::new(1, 2),
            Edge::new(2, 3),
            Edge::new(3, 4),
            Edge::new(4, 2),
        ];
        let g = Graph::new(5, edges, 3).unwrap();
        let e = Edge::new(0, 1);
        assert!(!neighborhood_has_cycle(&g, e, 1).unwrap());
        assert!(neighborhood_has_cycle(&g, e, 2).unwrap());
    }

    #[test]
    fn missing_edge_is_an_error() {
        let g = cycle(4);
        assert_eq!(
            neighborhood_has_cycle(&g, Edge::new(0, 2), 1),
            Err(GraphError::MissingEdge(0, 2))
        );
    }
}
