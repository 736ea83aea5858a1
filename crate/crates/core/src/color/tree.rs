//! Tree-Coloring: `Δ` matching rounds with a slowly shrinking `C`.
//!
//! Round `i` runs the matcher with `C_i`, where `C_1 = Δ + Δ^(3/4)` and
//! `C_{i+1} = C_i - 1 + Δ^(-1/12)`. Edges are offered to the rounds in
//! order. A vertex retires from round `i` once `⌈C_i⌉` edges at it have been
//! processed there; later edges at it pass straight to round `i + 1`. An
//! edge no round matches is left uncolored for the caller.

use serde::{Deserialize, Serialize};

use super::{labels, ColorError, ColoringState, OnlineColorer, Slot};
use crate::graph::{Edge, RandomSource};
use crate::matcher::MatcherState;

/// `C_1, ..., C_Δ`.
pub fn c_schedule(delta: usize) -> Vec<f64> {
    let d = delta as f64;
    let step = 1.0 - d.powf(-1.0 / 12.0);
    (0..delta).map(|i| d + d.powf(0.75) - i as f64 * step).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeColoringConfig {
    pub delta: usize,
    pub c_schedule: Vec<f64>,
}

impl TreeColoringConfig {
    pub fn new(delta: usize) -> Self {
        TreeColoringConfig {
            delta,
            c_schedule: c_schedule(delta),
        }
    }
}

/// Online Tree-Coloring. Round colors are `color_base + i`.
#[derive(Debug, Clone)]
pub struct TreeColoring {
    cfg: TreeColoringConfig,
    n: usize,
    color_base: usize,
    label_base: u64,
    part: Option<usize>,
    rounds: Vec<Option<MatcherState>>,
    retire_at: Vec<usize>,
    record: bool,
    offered: Vec<Vec<usize>>,
}

impl TreeColoring {
    pub fn new(n: usize, cfg: TreeColoringConfig) -> Self {
        Self::with_offsets(n, cfg, 0, labels::TREE, None)
    }

    /// A copy using colors from `color_base`, random labels from
    /// `label_base`, and tagging rounds with `part` if given.
    pub fn with_offsets(
        n: usize,
        cfg: TreeColoringConfig,
        color_base: usize,
        label_base: u64,
        part: Option<usize>,
    ) -> Self {
        let rounds = cfg.c_schedule.len();
        TreeColoring {
            retire_at: cfg.c_schedule.iter().map(|c| c.ceil() as usize).collect(),
            cfg,
            n,
            color_base,
            label_base,
            part,
            rounds: vec![None; rounds],
            record: false,
            offered: Vec::new(),
        }
    }

    /// Keeps, per round, the edges that round's matcher processed.
    pub fn recording(mut self) -> Self {
        self.record = true;
        self.offered = vec![Vec::new(); self.rounds.len()];
        self
    }

    pub fn config(&self) -> &TreeColoringConfig {
        &self.cfg
    }

    pub fn rounds(&self) -> usize {
        self.rounds.len()
    }

    /// Edges processed by round `i`'s matcher, in arrival order (empty
    /// unless recording).
    pub fn offered(&self, i: usize) -> &[usize] {
        self.offered.get(i).map_or(&[], Vec::as_slice)
    }

    /// Offers the edge to every round in turn; `Some(i)` if round `i`
    /// matched it.
    pub fn process(&mut self, edge_index: usize, e: Edge, src: &RandomSource) -> Result<Option<usize>, ColorError> {
        for i in 0..self.rounds.len() {
            let c = self.cfg.c_schedule[i];
            let m = self.rounds[i].get_or_insert_with(|| MatcherState::new(self.n, c));
            let cap = self.retire_at[i];
            if m.degree(e.u) >= cap || m.degree(e.v) >= cap {
                continue;
            }
            let r = src.uniform(self.label_base + i as u64, edge_index as u64);
            if self.record {
                self.offered[i].push(edge_index);
            }
            if m.process_edge(edge_index, e, r)?.is_matched() {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }
}

impl OnlineColorer for TreeColoring {
    fn name(&self) -> &'static str {
        "tree-coloring"
    }

    fn color_edge(
        &mut self,
        state: &mut ColoringState,
        edge_index: usize,
        e: Edge,
        src: &RandomSource,
    ) -> Result<(), ColorError> {
        match self.process(edge_index, e, src)? {
            Some(i) => {
                let slot = match self.part {
                    Some(part) => Slot::PartRound { part, round: i },
                    None => Slot::Round(i),
                };
                state.assign(edge_index, e, self.color_base + i, slot)
            }
            None => state.leave(edge_index, Slot::Uncolored),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::{check_proper, run_coloring};
    use crate::graph::{generate, GeneratorSpec, GraphKind};

    #[test]
    fn schedule_at_4096() {
        let s = c_schedule(4096);
        assert_eq!(s.len(), 4096);
        assert!((s[0] - 4608.0).abs() < 1e-9);
        assert!((s[1] - 4607.5).abs() < 1e-9);
        assert!(s.iter().all(|&c| c > 0.0));
    }

    #[test]
    fn schedule_stays_positive() {
        for d in 1..300 {
            assert!(*c_schedule(d).last().unwrap() > 0.0);
        }
    }

    #[test]
    fn colors_trees_properly_and_leaves_the_rest() {
        let spec = GeneratorSpec::new(GraphKind::RandomTree { max_degree: Some(16) }, 400).shuffled();
        let s = generate(&spec, 8).unwrap();
        let mut tc = TreeColoring::new(400, TreeColoringConfig::new(16));
        let st = run_coloring(&s, &mut tc, &RandomSource::new(1)).unwrap();
        check_proper(s.graph(), &st).unwrap();
        let sum = st.summary();
        assert_eq!(sum.colored + sum.uncolored, s.len());
        assert!(st.max_color().unwrap() < 16);
    }

    #[test]
    fn retired_vertices_divert_edges() {
        // Star with more edges than ⌈C_1⌉ = 2 + ⌈2^(3/4)⌉: the excess skips round 0.
        let s = generate(&GeneratorSpec::new(GraphKind::Star, 8), 0).unwrap();
        let mut tc = TreeColoring::new(8, TreeColoringConfig::new(2)).recording();
        let _ = run_coloring(&s, &mut tc, &RandomSource::new(3)).unwrap();
        let cap = c_schedule(2)[0].ceil() as usize;
        assert!(tc.offered(0).len() <= cap);
    }
}
