use super::{ColorError, ColoringState, OnlineColorer, Slot};
use crate::graph::{Edge, RandomSource};

/// Smallest color free at both endpoints. Never needs more than `2Δ - 1`
/// colors.
#[derive(Debug, Clone, Copy, Default)]
pub struct Greedy;

impl OnlineColorer for Greedy {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn color_edge(
        &mut self,
        state: &mut ColoringState,
        edge_index: usize,
        e: Edge,
        _src: &RandomSource,
    ) -> Result<(), ColorError> {
        let c = state.smallest_free(e, 0);
        state.assign(edge_index, e, c, Slot::Greedy)
    }
}
