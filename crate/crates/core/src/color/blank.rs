//! Exactly `Δ` colors, leaving edges blank: with probability `ε`, or when
//! no color is free at both endpoints. Otherwise a uniformly random free
//! color. Experimental; no guarantee attached.

use super::{labels, ColorError, ColoringState, OnlineColorer, Slot};
use crate::graph::{Edge, RandomSource};

#[derive(Debug, Clone)]
pub struct BlankEps {
    palette: usize,
    eps: f64,
}

impl BlankEps {
    pub fn new(palette: usize, eps: f64) -> Result<Self, ColorError> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(ColorError::BadConfig(format!("epsilon = {eps} must lie in [0, 1]")));
        }
        if palette == 0 {
            return Err(ColorError::BadConfig("palette must be non-empty".into()));
        }
        Ok(BlankEps { palette, eps })
    }

    /// Decision for one edge given its draw `r`. A single draw serves both
    /// choices: `r < ε` blanks, and `(r - ε)/(1 - ε)` picks the color.
    pub fn choose(&self, state: &ColoringState, e: Edge, r: f64) -> Option<usize> {
        if r < self.eps {
            return None;
        }
        let free: Vec<usize> = (0..self.palette).filter(|&c| state.is_free(e, c)).collect();
        if free.is_empty() {
            return None;
        }
        let r2 = (r - self.eps) / (1.0 - self.eps);
        Some(free[((r2 * free.len() as f64) as usize).min(free.len() - 1)])
    }
}

impl OnlineColorer for BlankEps {
    fn name(&self) -> &'static str {
        "blank-eps"
    }

    fn color_edge(
        &mut self,
        state: &mut ColoringState,
        edge_index: usize,
        e: Edge,
        src: &RandomSource,
    ) -> Result<(), ColorError> {
        let r = src.uniform(labels::BLANK, edge_index as u64);
        match self.choose(state, e, r) {
            Some(c) => state.assign(edge_index, e, c, Slot::Random),
            None => state.leave(edge_index, Slot::Blank),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::{check_proper, run_coloring};
    use crate::graph::{generate, GeneratorSpec, GraphKind};

    #[test]
    fn eps_one_blanks_everything() {
        let s = generate(&GeneratorSpec::new(GraphKind::RandomRegular { d: 4 }, 20), 1).unwrap();
        let mut b = BlankEps::new(4, 1.0).unwrap();
        let st = run_coloring(&s, &mut b, &RandomSource::new(0)).unwrap();
        assert_eq!(st.summary().blank, s.len());
    }

    #[test]
    fn first_edge_is_uniform_over_the_palette() {
        let b = BlankEps::new(5, 0.0).unwrap();
        let st = ColoringState::new(2, 1);
        let e = Edge::new(0, 1);
        let picks: Vec<_> = (0..5).map(|k| b.choose(&st, e, (k as f64 + 0.5) / 5.0)).collect();
        assert_eq!(picks, (0..5).map(Some).collect::<Vec<_>>());
    }

    #[test]
    fn blocked_palette_blanks() {
        let b = BlankEps::new(2, 0.0).unwrap();
        let mut st = ColoringState::new(4, 3);
        st.assign(0, Edge::new(0, 2), 0, Slot::Random).unwrap();
        st.assign(1, Edge::new(1, 3), 1, Slot::Random).unwrap();
        for r in [0.0, 0.5, 0.999] {
            assert_eq!(b.choose(&st, Edge::new(0, 1), r), None);
        }
    }

    #[test]
    fn stays_proper() {
        let spec = GeneratorSpec::new(GraphKind::RandomRegular { d: 6 }, 200).shuffled();
        let s = generate(&spec, 2).unwrap();
        let mut b = BlankEps::new(6, 0.1).unwrap();
        let st = run_coloring(&s, &mut b, &RandomSource::new(5)).unwrap();
        check_proper(s.graph(), &st).unwrap();
        assert!(st.max_color().unwrap() < 6);
    }
}
