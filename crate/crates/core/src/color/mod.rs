//! Online edge-coloring strategies.
//!
//! Every strategy implements [`OnlineColorer`] and writes into a shared
//! [`ColoringState`], which refuses improper or repeated assignments, so a
//! violation surfaces at the arrival that caused it.

mod blank;
mod cascade;
mod greedy;
mod pipeline;
mod tree;

pub use blank::BlankEps;
pub use cascade::{dhat_schedule, Cascade, CascadeConfig};
pub use greedy::Greedy;
pub use pipeline::{default_delta_prime, PipelineConfig, RandomOrderPipeline};
pub use tree::{c_schedule, TreeColoring, TreeColoringConfig};

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, EdgeStream, Graph, RandomSource};
use crate::matcher::MatchError;
use crate::sparsify::SparsifyError;

/// Instance-label bases; each strategy draws from its own range.
pub mod labels {
    pub const CASCADE: u64 = 1 << 40;
    pub const TREE: u64 = 2 << 40;
    pub const SPLIT: u64 = 3 << 40;
    pub const PIPELINE_PARTS: u64 = 4 << 40;
    pub const BLANK: u64 = 5 << 40;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ColorError {
    #[error("edge {edge}: color {color} already used at vertex {vertex}")]
    Improper { edge: usize, vertex: usize, color: usize },
    #[error("edge {0} was already decided")]
    Reassigned(usize),
    #[error("edge {0} was never decided")]
    Undecided(usize),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Sparsify(#[from] SparsifyError),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

/// Which part of a strategy decided an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    Greedy,
    /// Matched in a cascade or tree-coloring round (0-based).
    Round(usize),
    /// Matched in round `round` of part `part` (both 0-based).
    PartRound { part: usize, round: usize },
    /// Colored greedily from a strategy's reserve palette.
    Reserve,
    /// Uniform choice among free colors.
    Random,
    Blank,
    Uncolored,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Greedy => f.write_str("greedy"),
            Slot::Round(i) => write!(f, "r{i}"),
            Slot::PartRound { part, round } => write!(f, "p{part}r{round}"),
            Slot::Reserve => f.write_str("reserve"),
            Slot::Random => f.write_str("random"),
            Slot::Blank => f.write_str("blank"),
            Slot::Uncolored => f.write_str("uncolored"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub color: Option<usize>,
    pub slot: Slot,
}

/// Per-edge decisions plus the colors in use at each vertex.
#[derive(Debug, Clone)]
pub struct ColoringState {
    assignment: Vec<Option<Assignment>>,
    used: Vec<Vec<usize>>,
    palette: BTreeSet<usize>,
    reserve: BTreeSet<usize>,
}

impl ColoringState {
    pub fn new(n: usize, m: usize) -> Self {
        ColoringState {
            assignment: vec![None; m],
            used: vec![Vec::new(); n],
            palette: BTreeSet::new(),
            reserve: BTreeSet::new(),
        }
    }

    pub fn for_graph(g: &Graph) -> Self {
        Self::new(g.n(), g.m())
    }

    pub fn is_free(&self, e: Edge, color: usize) -> bool {
        !self.used[e.u].contains(&color) && !self.used[e.v].contains(&color)
    }

    pub fn used_at(&self, w: usize) -> &[usize] {
        &self.used[w]
    }

    /// Smallest color `>= base` free at both endpoints.
    pub fn smallest_free(&self, e: Edge, base: usize) -> usize {
        (base..)
            .find(|&c| self.is_free(e, c))
            .expect("finitely many colors are blocked")
    }

    /// Colors `e` irrevocably.
    pub fn assign(&mut self, edge: usize, e: Edge, color: usize, slot: Slot) -> Result<(), ColorError> {
        if self.assignment[edge].is_some() {
            return Err(ColorError::Reassigned(edge));
        }
        for w in [e.u, e.v] {
            if self.used[w].contains(&color) {
                return Err(ColorError::Improper { edge, vertex: w, color });
            }
        }
        self.used[e.u].push(color);
        self.used[e.v].push(color);
        self.palette.insert(color);
        if slot == Slot::Reserve {
            self.reserve.insert(color);
        }
        self.assignment[edge] = Some(Assignment {
            color: Some(color),
            slot,
        });
        Ok(())
    }

    /// Leaves `e` without a color, tagged `slot` (blank or uncolored).
    pub fn leave(&mut self, edge: usize, slot: Slot) -> Result<(), ColorError> {
        if self.assignment[edge].is_some() {
            return Err(ColorError::Reassigned(edge));
        }
        self.assignment[edge] = Some(Assignment { color: None, slot });
        Ok(())
    }

    pub fn assignment(&self, edge: usize) -> Option<Assignment> {
        self.assignment[edge]
    }

    pub fn color(&self, edge: usize) -> Option<usize> {
        self.assignment[edge].and_then(|a| a.color)
    }

    pub fn assignments(&self) -> &[Option<Assignment>] {
        &self.assignment
    }

    /// Number of distinct colors used.
    pub fn palette_size(&self) -> usize {
        self.palette.len()
    }

    pub fn reserve_size(&self) -> usize {
        self.reserve.len()
    }

    pub fn max_color(&self) -> Option<usize> {
        self.palette.iter().next_back().copied()
    }

    pub fn summary(&self) -> ColoringSummary {
        let mut s = ColoringSummary {
            edges: self.assignment.len(),
            colors_used: self.palette_size(),
            max_color: self.max_color(),
            reserve_colors: self.reserve_size(),
            colored: 0,
            uncolored: 0,
            blank: 0,
            reserve_edges: 0,
        };
        for a in self.assignment.iter().flatten() {
            match (a.color, a.slot) {
                (Some(_), Slot::Reserve) => {
                    s.colored += 1;
                    s.reserve_edges += 1;
                }
                (Some(_), _) => s.colored += 1,
                (None, Slot::Blank) => s.blank += 1,
                (None, _) => s.uncolored += 1,
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoringSummary {
    pub edges: usize,
    pub colors_used: usize,
    pub max_color: Option<usize>,
    pub reserve_colors: usize,
    pub colored: usize,
    pub uncolored: usize,
    pub blank: usize,
    pub reserve_edges: usize,
}

/// An online coloring strategy.
pub trait OnlineColorer {
    fn name(&self) -> &'static str;

    /// Decides edge `edge_index` on arrival; must call exactly one of
    /// [`ColoringState::assign`] or [`ColoringState::leave`].
    fn color_edge(
        &mut self,
        state: &mut ColoringState,
        edge_index: usize,
        e: Edge,
        src: &RandomSource,
    ) -> Result<(), ColorError>;
}

/// Feeds `stream` to `colorer` in arrival order, checking after each
/// arrival that the edge was decided. Properness is enforced by the state.
pub fn run_coloring<C: OnlineColorer + ?Sized>(
    stream: &EdgeStream,
    colorer: &mut C,
    src: &RandomSource,
) -> Result<ColoringState, ColorError> {
    let mut state = ColoringState::for_graph(stream.graph());
    for (idx, e) in stream.arrivals() {
        colorer.color_edge(&mut state, idx, e, src)?;
        if state.assignment(idx).is_none() {
            return Err(ColorError::Undecided(idx));
        }
    }
    Ok(state)
}

/// Independent properness check of a finished coloring.
pub fn check_proper(g: &Graph, state: &ColoringState) -> Result<(), ColorError> {
    let mut seen = std::collections::HashSet::new();
    for (idx, &e) in g.edges().iter().enumerate() {
        let Some(a) = state.assignment(idx) else {
            return Err(ColorError::Undecided(idx));
        };
        if let Some(c) = a.color {
            for w in [e.u, e.v] {
                if !seen.insert((w, c)) {
                    return Err(ColorError::Improper { edge: idx, vertex: w, color: c });
                }
            }
        }
    }
    Ok(())
}

/// Coloring CSV: `edge_index,u,v,color,strategy_round`, rows in arrival
/// order, empty color for blank and uncolored edges.
pub fn coloring_csv(stream: &EdgeStream, state: &ColoringState) -> String {
    let mut out = String::from("# schema=1\nedge_index,u,v,color,strategy_round\n");
    for (idx, e) in stream.arrivals() {
        let (color, slot) = match state.assignment(idx) {
            Some(a) => (a.color.map(|c| c.to_string()).unwrap_or_default(), a.slot),
            None => (String::new(), Slot::Uncolored),
        };
        let _ = writeln!(out, "{idx},{},{},{color},{slot}", e.u, e.v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_rejects_conflicts_and_reassignment() {
        let mut s = ColoringState::new(3, 2);
        s.assign(0, Edge::new(0, 1), 4, Slot::Greedy).unwrap();
        assert_eq!(
            s.assign(1, Edge::new(1, 2), 4, Slot::Greedy),
            Err(ColorError::Improper { edge: 1, vertex: 1, color: 4 })
        );
        assert_eq!(s.assign(0, Edge::new(0, 1), 5, Slot::Greedy), Err(ColorError::Reassigned(0)));
        s.leave(1, Slot::Blank).unwrap();
        assert_eq!(s.leave(1, Slot::Uncolored), Err(ColorError::Reassigned(1)));
        let sum = s.summary();
        assert_eq!((sum.colored, sum.blank, sum.colors_used), (1, 1, 1));
    }

    #[test]
    fn smallest_free_skips_blocked() {
        let mut s = ColoringState::new(4, 3);
        s.assign(0, Edge::new(0, 1), 0, Slot::Greedy).unwrap();
        s.assign(1, Edge::new(1, 2), 1, Slot::Greedy).unwrap();
        assert_eq!(s.smallest_free(Edge::new(1, 3), 0), 2);
        assert_eq!(s.smallest_free(Edge::new(2, 3), 0), 0);
        assert_eq!(s.smallest_free(Edge::new(2, 3), 1), 2);
    }

    #[test]
    fn slot_tags() {
        assert_eq!(Slot::Round(3).to_string(), "r3");
        assert_eq!(Slot::PartRound { part: 1, round: 2 }.to_string(), "p1r2");
        assert_eq!(Slot::Reserve.to_string(), "reserve");
    }

    #[test]
    fn csv_layout() {
        let g = Graph::new(3, vec![Edge::new(0, 1), Edge::new(1, 2)], 2).unwrap();
        let stream = EdgeStream::new(g, vec![1, 0]).unwrap();
        let mut s = ColoringState::for_graph(stream.graph());
        s.assign(1, Edge::new(1, 2), 0, Slot::Greedy).unwrap();
        s.leave(0, Slot::Uncolored).unwrap();
        assert_eq!(
            coloring_csv(&stream, &s),
            "# schema=1\nedge_index,u,v,color,strategy_round\n1,1,2,0,greedy\n0,0,1,,uncolored\n"
        );
    }
}
