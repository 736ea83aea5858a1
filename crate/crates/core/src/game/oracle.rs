//! Exact and sampled values of the edge matching game.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{BoundaryAssignment, GameError, WitnessTree};
use crate::graph::RandomSource;
use crate::matcher::accept_probability;

/// Largest tree (in edges) the enumeration oracle accepts.
pub const ENUMERATION_CAP: usize = 25;
/// Largest tree (in edges) the adaptive oracle accepts.
pub const ADAPTIVE_CAP: usize = 20;

#[derive(Debug, Clone, Copy)]
enum Step {
    Internal { bits: u64, p: f64 },
    Boundary { bits: u64, slot: usize },
}

/// The tree flattened into arrival order, with each internal edge's
/// acceptance probability and the root's last.
struct Script {
    steps: Vec<Step>,
    root_p: f64,
}

impl Script {
    fn new(tree: &WitnessTree, c: f64) -> Result<Self, GameError> {
        let mut steps = Vec::with_capacity(tree.edge_count());
        let mut slot = 0;
        for &v in tree.arrival_order() {
            let a = tree.vertex(v).parent;
            let bits = (1u64 << a) | (1u64 << v);
            if tree.is_boundary(v) {
                steps.push(Step::Boundary { bits, slot });
                slot += 1;
            } else {
                let p = accept_probability(c, tree.sibling_rank(v), tree.child_count(v))?;
                steps.push(Step::Internal { bits, p });
            }
        }
        let root_p = accept_probability(c, tree.child_count(0), tree.child_count(1))?;
        Ok(Script { steps, root_p })
    }

    fn finish(&self, mask: u64) -> f64 {
        if mask & 0b11 == 0 {
            self.root_p
        } else {
            0.0
        }
    }
}

fn check_cap(tree: &WitnessTree, cap: usize) -> Result<(), GameError> {
    if tree.edge_count() > cap || tree.vertex_count() > 63 {
        return Err(GameError::TooLarge {
            edges: tree.edge_count(),
            cap,
        });
    }
    Ok(())
}

fn fixed_decisions(tree: &WitnessTree, assignment: &BoundaryAssignment) -> Result<Vec<bool>, GameError> {
    let per_vertex = tree.decisions(assignment)?;
    Ok(tree.boundary_edges().iter().map(|&v| per_vertex[v]).collect())
}

/// Probability that the root edge is matched, by summing over every
/// accept/reject branch of the internal edges.
pub fn exact_match_probability(
    tree: &WitnessTree,
    assignment: &BoundaryAssignment,
    c: f64,
) -> Result<f64, GameError> {
    check_cap(tree, ENUMERATION_CAP)?;
    let script = Script::new(tree, c)?;
    let dec = fixed_decisions(tree, assignment)?;
    fn go(s: &Script, dec: &[bool], k: usize, mask: u64) -> f64 {
        let Some(&step) = s.steps.get(k) else {
            return s.finish(mask);
        };
        match step {
            Step::Boundary { bits, slot } => {
                let next = if dec[slot] { mask | bits } else { mask };
                go(s, dec, k + 1, next)
            }
            Step::Internal { bits, p } => {
                if mask & bits != 0 {
                    return go(s, dec, k + 1, mask);
                }
                let mut total = 0.0;
                if p > 0.0 {
                    total += p * go(s, dec, k + 1, mask | bits);
                }
                if p < 1.0 {
                    total += (1.0 - p) * go(s, dec, k + 1, mask);
                }
                total
            }
        }
    }
    Ok(go(&script, &dec, 0, 0))
}

/// Probability that the root edge is matched, from the bottom-up
/// recurrence `q_v = prod_i (1 - C/((C - i + 1)(C - c_{v_i})) q_{v_i})`
/// with matched boundary children contributing 0 and unmatched ones 1.
pub fn dp_match_probability(tree: &WitnessTree, assignment: &BoundaryAssignment, c: f64) -> Result<f64, GameError> {
    let dec = tree.decisions(assignment)?;
    let nv = tree.vertex_count();
    let mut q = vec![1.0; nv];
    for v in (0..nv).rev() {
        if tree.is_boundary(v) {
            continue;
        }
        let mut acc = 1.0;
        for (i, &w) in tree.children(v).iter().enumerate() {
            if tree.is_boundary(w) {
                if dec[w] {
                    acc = 0.0;
                }
                continue;
            }
            let cw = tree.child_count(w) as f64;
            if c <= i as f64 || c <= cw {
                return Err(GameError::BadC(c));
            }
            acc *= 1.0 - c / ((c - i as f64) * (c - cw)) * q[w];
        }
        q[v] = acc;
    }
    let (c0, c1) = (tree.child_count(0) as f64, tree.child_count(1) as f64);
    if c <= c0 || c <= c1 {
        return Err(GameError::BadC(c));
    }
    Ok(q[0] * q[1] * c / ((c - c0) * (c - c1)))
}

/// Value of the game when the adversary picks each boundary outcome on
/// arrival, seeing the whole history, to minimise the chance the root is
/// matched.
pub fn adaptive_min_probability(tree: &WitnessTree, c: f64) -> Result<f64, GameError> {
    check_cap(tree, ADAPTIVE_CAP)?;
    let script = Script::new(tree, c)?;
    fn go(s: &Script, memo: &mut HashMap<(usize, u64), f64>, k: usize, mask: u64) -> f64 {
        let Some(&step) = s.steps.get(k) else {
            return s.finish(mask);
        };
        if let Some(&v) = memo.get(&(k, mask)) {
            return v;
        }
        let v = match step {
            Step::Boundary { bits, .. } => {
                let matched = go(s, memo, k + 1, mask | bits);
                let unmatched = go(s, memo, k + 1, mask);
                matched.min(unmatched)
            }
            Step::Internal { bits, p } => {
                if mask & bits != 0 {
                    go(s, memo, k + 1, mask)
                } else {
                    p * go(s, memo, k + 1, mask | bits) + (1.0 - p) * go(s, memo, k + 1, mask)
                }
            }
        };
        memo.insert((k, mask), v);
        v
    }
    Ok(go(&script, &mut HashMap::new(), 0, 0))
}

/// Plays the game `runs` times with fixed boundary outcomes and returns how
/// often the root was matched. Run `t` draws edge `v`'s coin from
/// `src.uniform(t, v)`; the root uses address `0`.
pub fn simulate_game(
    tree: &WitnessTree,
    assignment: &BoundaryAssignment,
    c: f64,
    runs: u64,
    src: &RandomSource,
) -> Result<u64, GameError> {
    let nv = tree.vertex_count();
    let dec = tree.decisions(assignment)?;
    let mut steps = Vec::with_capacity(nv);
    for &v in tree.arrival_order() {
        let a = tree.vertex(v).parent;
        let p = if tree.is_boundary(v) {
            if dec[v] {
                1.0
            } else {
                -1.0
            }
        } else {
            accept_probability(c, tree.sibling_rank(v), tree.child_count(v))?
        };
        steps.push((a, v, tree.is_boundary(v), p));
    }
    let root_p = accept_probability(c, tree.child_count(0), tree.child_count(1))?;
    let hits = (0..runs)
        .into_par_iter()
        .map_init(
            || vec![false; nv],
            |matched, t| {
                matched.iter_mut().for_each(|m| *m = false);
                for &(a, v, boundary, p) in &steps {
                    if boundary {
                        if p > 0.0 {
                            matched[a] = true;
                        }
                    } else if !matched[a] && !matched[v] && src.uniform(t, v as u64) <= p {
                        matched[a] = true;
                        matched[v] = true;
                    }
                }
                u64::from(!matched[0] && !matched[1] && src.uniform(t, 0) <= root_p)
            },
        )
        .sum();
    Ok(hits)
}

/// Change in the dp value when boundary edge `index` (arrival order) flips
/// from unmatched to matched, all other outcomes as in `base`.
pub fn boundary_sensitivity(
    tree: &WitnessTree,
    base: &[bool],
    index: usize,
    c: f64,
) -> Result<f64, GameError> {
    let mut with = base.to_vec();
    with[index] = true;
    let mut without = base.to_vec();
    without[index] = false;
    Ok(dp_match_probability(tree, &BoundaryAssignment::Fixed(with), c)?
        - dp_match_probability(tree, &BoundaryAssignment::Fixed(without), c)?)
}
