//! Online degree reduction.
//!
//! [`SubsampleState`] keeps each edge with probability slightly below
//! `Δ′/Δ` and drops edges at vertices that already saw `Δ′` coin
//! successes. [`SplitState`] colors every edge with one of
//! `T = ⌈Δ/Δ′⌉` parts uniformly and rejects edges that would push a vertex
//! above `Δ′ + 3 sqrt(Δ′ ln Δ′)` edges of one part.
//!
//! All logarithms are natural.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, EdgeStream, Graph, RandomSource};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SparsifyError {
    #[error("target degree {delta_prime} exceeds the input degree {delta}")]
    TargetAboveDegree { delta_prime: usize, delta: usize },
    #[error("target degree {delta_prime} gives eta = {eta:.5}; eta < 1 needs a target degree of at least 31")]
    EtaOutOfRange { delta_prime: usize, eta: f64 },
    #[error("target degree must be at least 1")]
    ZeroTarget,
    #[error("keep probability {0} is outside [0, 1]")]
    BadProbability(f64),
}

/// `3 sqrt(ln Δ′ / Δ′)`.
pub fn eta(delta_prime: usize) -> f64 {
    let d = delta_prime as f64;
    3.0 * (d.ln() / d).sqrt()
}

/// Bounds on the probability that a fixed edge survives subsampling:
/// `(1 - eta - 2 exp(-eta^2 Δ′/3)) Δ′/Δ` and `(1 - eta) Δ′/Δ`.
pub fn subsample_band(delta: usize, delta_prime: usize) -> (f64, f64) {
    let (d, dp) = (delta as f64, delta_prime as f64);
    let e = eta(delta_prime);
    let lo = (1.0 - e - 2.0 * (-e * e * dp / 3.0).exp()) * dp / d;
    (lo.max(0.0), (1.0 - e) * dp / d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubsampleOutcome {
    Kept,
    DroppedByCoin,
    DroppedByDegreeCap,
}

/// State of the online subsampler.
#[derive(Debug, Clone)]
pub struct SubsampleState {
    delta: usize,
    delta_prime: usize,
    eta: f64,
    threshold: f64,
    /// Coin successes per vertex, kept or not.
    successes: Vec<usize>,
    kept: Vec<usize>,
}

impl SubsampleState {
    pub fn new(n: usize, delta: usize, delta_prime: usize) -> Result<Self, SparsifyError> {
        if delta_prime == 0 {
            return Err(SparsifyError::ZeroTarget);
        }
        if delta_prime > delta {
            return Err(SparsifyError::TargetAboveDegree { delta_prime, delta });
        }
        let eta = eta(delta_prime);
        if !(eta > 0.0 && eta < 1.0) {
            return Err(SparsifyError::EtaOutOfRange { delta_prime, eta });
        }
        Ok(SubsampleState {
            delta,
            delta_prime,
            eta,
            threshold: (1.0 - eta) * delta_prime as f64 / delta as f64,
            successes: vec![0; n],
            kept: Vec::new(),
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Coin threshold `(1 - eta) Δ′/Δ`.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn delta_prime(&self) -> usize {
        self.delta_prime
    }

    pub fn successes(&self, w: usize) -> usize {
        self.successes[w]
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn subsample_edge(&mut self, edge_index: usize, e: Edge, r: f64) -> SubsampleOutcome {
        if r > self.threshold {
            return SubsampleOutcome::DroppedByCoin;
        }
        let room = self.successes[e.u] < self.delta_prime && self.successes[e.v] < self.delta_prime;
        self.successes[e.u] += 1;
        self.successes[e.v] += 1;
        if room {
            self.kept.push(edge_index);
            SubsampleOutcome::Kept
        } else {
            SubsampleOutcome::DroppedByDegreeCap
        }
    }
}

/// Runs the subsampler over a stream. Returns per-edge outcomes and the kept
/// sub-stream (declared degree `Δ′`) with its map back to original indices.
pub fn subsample_stream(
    stream: &EdgeStream,
    delta_prime: usize,
    src: &RandomSource,
    instance: u64,
) -> Result<(Vec<SubsampleOutcome>, EdgeStream, Vec<usize>), SparsifyError> {
    let g = stream.graph();
    let mut state = SubsampleState::new(g.n(), g.delta(), delta_prime)?;
    let mut outcomes = vec![SubsampleOutcome::DroppedByCoin; g.m()];
    for (idx, e) in stream.arrivals() {
        outcomes[idx] = state.subsample_edge(idx, e, src.uniform(instance, idx as u64));
    }
    let keep: Vec<bool> = outcomes.iter().map(|&o| o == SubsampleOutcome::Kept).collect();
    let (kept, original) = restrict_with_delta(stream, &keep, delta_prime);
    Ok((outcomes, kept, original))
}

/// Keeps each edge independently with probability `p`; the sample the
/// locality bound for uniformly subsampled graphs talks about.
pub fn bernoulli_subsample(
    stream: &EdgeStream,
    p: f64,
    src: &RandomSource,
    instance: u64,
) -> Result<(EdgeStream, Vec<usize>), SparsifyError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SparsifyError::BadProbability(p));
    }
    let keep: Vec<bool> = (0..stream.len())
        .map(|idx| src.uniform(instance, idx as u64) < p)
        .collect();
    Ok(restrict_with_delta(stream, &keep, stream.graph().delta()))
}

fn restrict_with_delta(stream: &EdgeStream, keep: &[bool], delta: usize) -> (EdgeStream, Vec<usize>) {
    let mut original = Vec::new();
    let mut edges = Vec::new();
    for (idx, e) in stream.arrivals() {
        if keep[idx] {
            original.push(idx);
            edges.push(e);
        }
    }
    let graph = Graph::new(stream.graph().n(), edges, delta.max(1))
        .expect("kept edges respect the declared degree");
    (EdgeStream::in_index_order(graph), original)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitOutcome {
    /// Zero-based part index.
    Part(usize),
    Rejected,
}

/// `3 sqrt(Δ′ ln Δ′)`, the per-part slack above `Δ′`.
pub fn split_slack(delta_prime: usize) -> f64 {
    let d = delta_prime as f64;
    3.0 * (d * d.ln()).sqrt()
}

/// Largest per-vertex degree a part can have: `⌊Δ′ + slack⌋`.
pub fn split_part_cap(delta_prime: usize) -> usize {
    (delta_prime as f64 + split_slack(delta_prime)).floor() as usize
}

/// State of the online splitter.
#[derive(Debug, Clone)]
pub struct SplitState {
    parts: usize,
    delta_prime: usize,
    slack: f64,
    /// `marks[w * parts + i]`: edges at `w` marked with part `i`.
    marks: Vec<u32>,
    assigned: Vec<Vec<usize>>,
    rejected: Vec<usize>,
}

impl SplitState {
    pub fn new(n: usize, delta: usize, delta_prime: usize) -> Result<Self, SparsifyError> {
        if delta_prime == 0 {
            return Err(SparsifyError::ZeroTarget);
        }
        let parts = delta.div_ceil(delta_prime).max(1);
        Ok(SplitState {
            parts,
            delta_prime,
            slack: split_slack(delta_prime),
            marks: vec![0; n * parts],
            assigned: vec![Vec::new(); parts],
            rejected: Vec::new(),
        })
    }

    /// Number of parts `T`.
    pub fn parts(&self) -> usize {
        self.parts
    }

    pub fn slack(&self) -> f64 {
        self.slack
    }

    pub fn delta_prime(&self) -> usize {
        self.delta_prime
    }

    pub fn marks(&self, w: usize, part: usize) -> u32 {
        self.marks[w * self.parts + part]
    }

    /// Edge indices assigned to each part, in arrival order.
    pub fn assigned(&self) -> &[Vec<usize>] {
        &self.assigned
    }

    pub fn rejected(&self) -> &[usize] {
        &self.rejected
    }

    /// The part a draw `r` selects: `⌊r T⌋`.
    pub fn part_for(&self, r: f64) -> usize {
        ((r * self.parts as f64) as usize).min(self.parts - 1)
    }

    pub fn split_edge(&mut self, edge_index: usize, e: Edge, r: f64) -> SplitOutcome {
        let part = self.part_for(r);
        let cap = self.delta_prime as f64 + self.slack;
        let mu = &mut self.marks[e.u * self.parts + part];
        *mu += 1;
        let ok_u = *mu as f64 <= cap;
        let mv = &mut self.marks[e.v * self.parts + part];
        *mv += 1;
        let ok_v = *mv as f64 <= cap;
        if ok_u && ok_v {
            self.assigned[part].push(edge_index);
            SplitOutcome::Part(part)
        } else {
            self.rejected.push(edge_index);
            SplitOutcome::Rejected
        }
    }
}

/// Result of splitting a whole stream.
#[derive(Debug, Clone)]
pub struct SplitResult {
    pub outcomes: Vec<SplitOutcome>,
    /// Marked part per edge before the cap is applied.
    pub marked: Vec<usize>,
    pub state: SplitState,
}

impl SplitResult {
    /// Sub-stream of part `i` (declared degree the part cap) with its map to
    /// original edge indices.
    pub fn part_stream(&self, stream: &EdgeStream, part: usize) -> (EdgeStream, Vec<usize>) {
        let keep: Vec<bool> = self
            .outcomes
            .iter()
            .map(|&o| o == SplitOutcome::Part(part))
            .collect();
        restrict_with_delta(stream, &keep, split_part_cap(self.state.delta_prime))
    }

    pub fn rejected_stream(&self, stream: &EdgeStream) -> (EdgeStream, Vec<usize>) {
        let keep: Vec<bool> = self
            .outcomes
            .iter()
            .map(|&o| o == SplitOutcome::Rejected)
            .collect();
        restrict_with_delta(stream, &keep, stream.graph().delta())
    }
}

pub fn split_stream(
    stream: &EdgeStream,
    delta_prime: usize,
    src: &RandomSource,
    instance: u64,
) -> Result<SplitResult, SparsifyError> {
    let g = stream.graph();
    let mut state = SplitState::new(g.n(), g.delta(), delta_prime)?;
    let mut outcomes = vec![SplitOutcome::Rejected; g.m()];
    let mut marked = vec![0; g.m()];
    for (idx, e) in stream.arrivals() {
        let r = src.uniform(instance, idx as u64);
        marked[idx] = state.part_for(r);
        outcomes[idx] = state.split_edge(idx, e, r);
    }
    Ok(SplitResult {
        outcomes,
        marked,
        state,
    })
}
