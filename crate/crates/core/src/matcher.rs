//! Online matching on an edge stream.
//!
//! Each vertex keeps an arrival-degree counter, incremented on every arrival
//! whether or not the edge is matched, so the acceptance threshold of an edge
//! depends only on the arrival order. On a tree this matches every edge with
//! probability exactly `1/C`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, EdgeStream, RandomSource};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchError {
    #[error("sampling parameter C = {c} does not exceed degree {degree}")]
    DegenerateThreshold { c: f64, degree: usize },
    #[error("sampling parameter C = {c} must exceed delta + 2 sqrt(delta) = {bound} for delta = {delta}")]
    ParameterTooSmall { c: f64, delta: usize, bound: f64 },
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
}

/// `C / ((C - d_u)(C - d_v))`, clamped to `[0, 1]`.
pub fn accept_probability(c: f64, d_u: usize, d_v: usize) -> Result<f64, MatchError> {
    let top = d_u.max(d_v);
    if c <= top as f64 {
        return Err(MatchError::DegenerateThreshold { c, degree: top });
    }
    let p = c / ((c - d_u as f64) * (c - d_v as f64));
    Ok(p.clamp(0.0, 1.0))
}

/// Smallest sampling parameter the acceptance rule supports on a graph of
/// maximum degree `delta`: the rule needs `C > delta + 2 sqrt(delta)`.
pub fn min_sampling_parameter(delta: usize) -> f64 {
    delta as f64 + 2.0 * (delta as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchOutcome {
    Matched,
    SkippedNeighborMatched,
    RejectedByCoin,
}

impl MatchOutcome {
    pub fn is_matched(self) -> bool {
        self == MatchOutcome::Matched
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MatchOutcome::Matched => "matched",
            MatchOutcome::SkippedNeighborMatched => "skipped",
            MatchOutcome::RejectedByCoin => "rejected",
        }
    }
}

/// Per-vertex counters, matched flags and the matching built so far.
#[derive(Debug, Clone)]
pub struct MatcherState {
    c: f64,
    degree: Vec<usize>,
    matched: Vec<bool>,
    matching: Vec<usize>,
    arrivals: usize,
}

impl MatcherState {
    /// A matcher that validates `C` against each edge's degrees as it arrives.
    pub fn new(n: usize, c: f64) -> Self {
        MatcherState {
            c,
            degree: vec![0; n],
            matched: vec![false; n],
            matching: Vec::new(),
            arrivals: 0,
        }
    }

    /// A matcher for a graph of known maximum degree; rejects `C` at or below
    /// `delta + 2 sqrt(delta)`, where the acceptance rule would need clamping.
    pub fn with_declared_delta(n: usize, c: f64, delta: usize) -> Result<Self, MatchError> {
        let bound = min_sampling_parameter(delta);
        if c <= bound {
            return Err(MatchError::ParameterTooSmall { c, delta, bound });
        }
        Ok(Self::new(n, c))
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn degree(&self, w: usize) -> usize {
        self.degree[w]
    }

    pub fn is_matched(&self, w: usize) -> bool {
        self.matched[w]
    }

    /// Indices of matched edges in the order they were matched.
    pub fn matching(&self) -> &[usize] {
        &self.matching
    }

    pub fn arrivals(&self) -> usize {
        self.arrivals
    }

    /// Acceptance threshold the next edge `(u, v)` would face.
    pub fn threshold(&self, e: Edge) -> Result<f64, MatchError> {
        self.check(e)?;
        accept_probability(self.c, self.degree[e.u], self.degree[e.v])
    }

    fn check(&self, e: Edge) -> Result<(), MatchError> {
        let n = self.degree.len();
        for w in [e.u, e.v] {
            if w >= n {
                return Err(MatchError::VertexOutOfRange { vertex: w, n });
            }
        }
        Ok(())
    }

    /// Processes one arrival with uniform draw `r`.
    pub fn process_edge(
        &mut self,
        edge_index: usize,
        e: Edge,
        r: f64,
    ) -> Result<MatchOutcome, MatchError> {
        let p = self.threshold(e)?;
        let outcome = if self.matched[e.u] || self.matched[e.v] {
            MatchOutcome::SkippedNeighborMatched
        } else if r <= p {
            self.matched[e.u] = true;
            self.matched[e.v] = true;
            self.matching.push(edge_index);
            MatchOutcome::Matched
        } else {
            MatchOutcome::RejectedByCoin
        };
        self.degree[e.u] += 1;
        self.degree[e.v] += 1;
        self.arrivals += 1;
        Ok(outcome)
    }
}

/// Outcome of running the matcher over a whole stream.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchingRun {
    /// Outcome per edge index.
    pub outcomes: Vec<MatchOutcome>,
    /// Acceptance threshold each edge faced, per edge index.
    pub thresholds: Vec<f64>,
    /// Matched edge indices in arrival order.
    pub matching: Vec<usize>,
}

impl MatchingRun {
    pub fn matched_count(&self) -> usize {
        self.matching.len()
    }
}

/// Runs the matcher over `stream`, drawing edge `i`'s coin from
/// `src.uniform(instance, i)`.
pub fn run_matching(
    stream: &EdgeStream,
    c: f64,
    src: &RandomSource,
    instance: u64,
) -> Result<MatchingRun, MatchError> {
    let g = stream.graph();
    let mut state = MatcherState::new(g.n(), c);
    let mut outcomes = vec![MatchOutcome::RejectedByCoin; g.m()];
    let mut thresholds = vec![0.0; g.m()];
    for (idx, e) in stream.arrivals() {
        thresholds[idx] = state.threshold(e)?;
        outcomes[idx] = state.process_edge(idx, e, src.uniform(instance, idx as u64))?;
    }
    Ok(MatchingRun {
        outcomes,
        thresholds,
        matching: state.matching,
    })
}

/// Checks that `matching` is a matching of the stream's graph.
pub fn is_valid_matching(stream: &EdgeStream, matching: &[usize]) -> bool {
    let g = stream.graph();
    let mut used = vec![false; g.n()];
    for &idx in matching {
        let e = g.edge(idx);
        if used[e.u] || used[e.v] {
            return false;
        }
        used[e.u] = true;
        used[e.v] = true;
    }
    true
}
