//! Random witness trees for tests and experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{TreeVertex, WitnessTree};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomTreeSpec {
    /// Edge budget, root included.
    pub max_edges: usize,
    pub max_children: usize,
    /// Vertices at distance `depth` from the root edge get boundary
    /// children only; boundary edges therefore sit at edge depth `depth + 1`.
    pub depth: usize,
    pub max_boundary: usize,
}

/// A random tree shape with a uniformly random arrival order among those
/// that bring every edge in before its parent edge.
pub fn random_witness_tree(spec: &RandomTreeSpec, seed: u64) -> WitnessTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // (parent, distance of the child vertex, boundary)
    let mut shape: Vec<(usize, usize, bool)> = Vec::new();
    let mut dist = vec![0usize, 0];
    let mut boundary_used = 0;
    let mut next = 0;
    while next < dist.len() {
        let x = next;
        next += 1;
        if x >= 2 && shape[x - 2].2 {
            continue;
        }
        let at_frontier = dist[x] == spec.depth;
        let want = rng.random_range(0..=spec.max_children);
        for _ in 0..want {
            if shape.len() + 1 >= spec.max_edges {
                break;
            }
            if at_frontier {
                if boundary_used == spec.max_boundary {
                    break;
                }
                boundary_used += 1;
            }
            shape.push((x, dist[x] + 1, at_frontier));
            dist.push(dist[x] + 1);
        }
    }

    let nv = shape.len() + 2;
    let mut pending = vec![0usize; nv];
    for &(p, _, _) in &shape {
        pending[p] += 1;
    }
    let mut ready: Vec<usize> = (2..nv).filter(|&v| pending[v] == 0).collect();
    let mut arrival = vec![0u64; nv];
    let mut t = 0;
    while !ready.is_empty() {
        let v = ready.swap_remove(rng.random_range(0..ready.len()));
        arrival[v] = t;
        t += 1;
        let p = shape[v - 2].0;
        pending[p] -= 1;
        if p >= 2 && pending[p] == 0 {
            ready.push(p);
        }
    }
    let vertices = shape
        .iter()
        .enumerate()
        .map(|(k, &(parent, _, boundary))| TreeVertex {
            parent,
            arrival: arrival[k + 2],
            boundary,
        })
        .collect();
    WitnessTree::new(vertices).expect("generated order is bottom-up")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn respects_the_spec() {
        let spec = RandomTreeSpec {
            max_edges: 15,
            max_children: 3,
            depth: 3,
            max_boundary: 6,
        };
        for seed in 0..200 {
            let t = random_witness_tree(&spec, seed);
            assert!(t.edge_count() <= 15);
            assert!(t.boundary_edges().len() <= 6);
            for &b in t.boundary_edges() {
                assert_eq!(t.edge_depth(b), 4);
            }
            for v in 0..t.vertex_count() {
                assert!(t.child_count(v) <= 3);
            }
        }
    }

    #[test]
    fn seeds_vary_the_tree() {
        let spec = RandomTreeSpec {
            max_edges: 12,
            max_children: 3,
            depth: 2,
            max_boundary: 4,
        };
        let a = random_witness_tree(&spec, 1);
        assert!((2..30).any(|s| random_witness_tree(&spec, s) != a));
    }
}
