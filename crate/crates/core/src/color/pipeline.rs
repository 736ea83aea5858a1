//! Coloring for uniformly random arrival orders.
//!
//! Edges are split online into `T = ⌈Δ/Δ′⌉` parts of degree at most
//! `Δ′ + 3 sqrt(Δ′ ln Δ′)`, each part runs Tree-Coloring on its own palette
//! of `Δ_part = Δ′ + ⌈3 sqrt(Δ′ ln Δ′)⌉` colors, and split rejects plus
//! edges left uncolored share one greedy reserve palette.

use serde::{Deserialize, Serialize};

use super::tree::{TreeColoring, TreeColoringConfig};
use super::{labels, ColorError, ColoringState, OnlineColorer, Slot};
use crate::graph::{Edge, RandomSource};
use crate::sparsify::{split_slack, SplitOutcome, SplitState};

/// `c · min(ln Δ / ln ln Δ, sqrt(Δ / ln n))`, at least 1.
pub fn default_delta_prime(delta: usize, n: usize, c: f64) -> usize {
    let d = delta as f64;
    let ln = d.ln();
    let a = if ln.ln() > 0.0 { ln / ln.ln() } else { 1.0 };
    let b = (d / (n.max(2) as f64).ln()).sqrt();
    ((c * a.min(b)).round() as usize).clamp(1, delta.max(1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub n: usize,
    pub delta: usize,
    pub delta_prime: usize,
}

impl PipelineConfig {
    pub fn new(n: usize, delta: usize, delta_prime: Option<usize>) -> Self {
        PipelineConfig {
            n,
            delta,
            delta_prime: delta_prime.unwrap_or_else(|| default_delta_prime(delta, n, 1.0)),
        }
    }

    /// Rounds, and colors, per part.
    pub fn part_palette(&self) -> usize {
        self.delta_prime + split_slack(self.delta_prime).ceil() as usize
    }
}

#[derive(Debug, Clone)]
pub struct RandomOrderPipeline {
    cfg: PipelineConfig,
    split: SplitState,
    parts: Vec<TreeColoring>,
    reserve_base: usize,
}

impl RandomOrderPipeline {
    pub fn new(cfg: PipelineConfig) -> Result<Self, ColorError> {
        let split = SplitState::new(cfg.n, cfg.delta, cfg.delta_prime)?;
        let width = cfg.part_palette();
        let parts = (0..split.parts())
            .map(|p| {
                TreeColoring::with_offsets(
                    cfg.n,
                    TreeColoringConfig::new(width),
                    p * width,
                    labels::PIPELINE_PARTS + ((p as u64) << 24),
                    Some(p),
                )
            })
            .collect::<Vec<_>>();
        Ok(RandomOrderPipeline {
            reserve_base: parts.len() * width,
            cfg,
            split,
            parts,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn parts(&self) -> usize {
        self.parts.len()
    }

    /// First reserve color, `T · Δ_part`.
    pub fn reserve_base(&self) -> usize {
        self.reserve_base
    }

    pub fn split_state(&self) -> &SplitState {
        &self.split
    }
}

impl OnlineColorer for RandomOrderPipeline {
    fn name(&self) -> &'static str {
        "random-order-pipeline"
    }

    fn color_edge(
        &mut self,
        state: &mut ColoringState,
        edge_index: usize,
        e: Edge,
        src: &RandomSource,
    ) -> Result<(), ColorError> {
        let r = src.uniform(labels::SPLIT, edge_index as u64);
        if let SplitOutcome::Part(p) = self.split.split_edge(edge_index, e, r) {
            let tc = &mut self.parts[p];
            if let Some(round) = tc.process(edge_index, e, src)? {
                let width = self.cfg.part_palette();
                return state.assign(edge_index, e, p * width + round, Slot::PartRound { part: p, round });
            }
        }
        let c = state.smallest_free(e, self.reserve_base);
        state.assign(edge_index, e, c, Slot::Reserve)
    }
}
