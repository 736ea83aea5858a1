//! Coloring by a cascade of matchings.
//!
//! Round `i` owns color `i`. An arriving edge is offered to the rounds in
//! order; each round subsamples its residual graph from `Δ̂_i` down to `Δ′`
//! and runs the matcher with `C = (e/(e-1) + δ) Δ′` on what it keeps. The
//! first round that matches the edge colors it. Edges no round matches are
//! colored greedily from a reserve palette above all round colors.

use serde::{Deserialize, Serialize};

use super::{labels, ColorError, ColoringState, OnlineColorer, Slot};
use crate::graph::{Edge, RandomSource};
use crate::matcher::{min_sampling_parameter, MatcherState};
use crate::recurrence::CRITICAL_RATIO;
use crate::sparsify::{eta, SubsampleOutcome, SubsampleState};

/// `Δ̂_i = max(⌈Δ - (i-1)/α + β sqrt(Δ ln n)⌉, ⌈β sqrt(Δ ln n)⌉)` for every
/// round whose unclamped value is still above the floor.
pub fn dhat_schedule(delta: usize, alpha: f64, beta: f64, n: usize) -> Vec<usize> {
    let slack = beta * (delta as f64 * (n.max(2) as f64).ln()).sqrt();
    let floor = slack.ceil();
    let mut out = Vec::new();
    for i in 1.. {
        let raw = delta as f64 - (i - 1) as f64 / alpha + slack;
        if raw <= floor {
            break;
        }
        out.push(raw.ceil().max(floor).max(1.0) as usize);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeConfig {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub delta: usize,
    /// Target degree of each round's subsample.
    pub delta_prime: usize,
    /// Margin above the critical ratio in each round's `C`.
    pub margin: f64,
}

impl CascadeConfig {
    pub fn new(n: usize, delta: usize) -> Self {
        CascadeConfig {
            alpha: 1.0,
            beta: 4.0,
            n,
            delta,
            delta_prime: 32,
            margin: 0.05,
        }
    }

    pub fn schedule(&self) -> Vec<usize> {
        dhat_schedule(self.delta, self.alpha, self.beta, self.n)
    }

    /// `⌈β sqrt(Δ ln n)⌉`.
    pub fn fallback_threshold(&self) -> usize {
        (self.beta * (self.delta as f64 * (self.n.max(2) as f64).ln()).sqrt()).ceil() as usize
    }

    fn validate(&self) -> Result<(), ColorError> {
        if !(self.alpha >= 1.0) {
            return Err(ColorError::BadConfig(format!("alpha = {} must be >= 1", self.alpha)));
        }
        if !(self.beta >= 0.0) {
            return Err(ColorError::BadConfig(format!("beta = {} must be >= 0", self.beta)));
        }
        if self.delta_prime == 0 {
            return Err(ColorError::BadConfig("delta_prime must be positive".into()));
        }
        if !(self.margin > 0.0) {
            return Err(ColorError::BadConfig(format!("margin = {} must be > 0", self.margin)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Round {
    dhat: usize,
    /// Edges offered to this round at each vertex.
    residual: Vec<u32>,
    sampler: Option<SubsampleState>,
    matcher: MatcherState,
}

impl Round {
    fn new(n: usize, dhat: usize, cfg: &CascadeConfig) -> Result<Self, ColorError> {
        let dp = cfg.delta_prime;
        let (sampler, c) = if dp < dhat && eta(dp) < 1.0 {
            (
                Some(SubsampleState::new(n, dhat, dp)?),
                (CRITICAL_RATIO + cfg.margin) * dp as f64,
            )
        } else {
            let c = ((CRITICAL_RATIO + cfg.margin) * dhat as f64)
                .max(min_sampling_parameter(dhat) + 1e-9);
            (None, c)
        };
        Ok(Round {
            dhat,
            residual: vec![0; n],
            sampler,
            matcher: MatcherState::new(n, c),
        })
    }
}

/// The matching cascade with a greedy reserve.
#[derive(Debug, Clone)]
pub struct Cascade {
    cfg: CascadeConfig,
    schedule: Vec<usize>,
    n: usize,
    rounds: Vec<Option<Round>>,
    /// Instance label of each round's randomness.
    round_labels: Vec<u64>,
}

impl Cascade {
    pub fn new(cfg: CascadeConfig) -> Result<Self, ColorError> {
        cfg.validate()?;
        let schedule = cfg.schedule();
        Ok(Cascade {
            n: cfg.n,
            rounds: vec![None; schedule.len()],
            round_labels: (0..schedule.len() as u64).collect(),
            schedule,
            cfg,
        })
    }

    pub fn config(&self) -> &CascadeConfig {
        &self.cfg
    }

    pub fn schedule(&self) -> &[usize] {
        &self.schedule
    }

    /// Exchanges the random draws of rounds `i` and `j`.
    pub fn swap_round_labels(&mut self, i: usize, j: usize) {
        self.round_labels.swap(i, j);
    }

    /// Rounds that have been offered at least one edge.
    pub fn rounds_used(&self) -> usize {
        self.rounds.iter().filter(|r| r.is_some()).count()
    }

    /// First reserve color.
    pub fn reserve_base(&self) -> usize {
        self.schedule.len()
    }

    /// Sampling parameter of round `i`, if it has seen an edge.
    pub fn round_c(&self, i: usize) -> Option<f64> {
        self.rounds[i].as_ref().map(|r| r.matcher.c())
    }

    fn offer(&mut self, i: usize, edge_index: usize, e: Edge, src: &RandomSource) -> Result<bool, ColorError> {
        if self.rounds[i].is_none() {
            self.rounds[i] = Some(Round::new(self.n, self.schedule[i], &self.cfg)?);
        }
        let round = self.rounds[i].as_mut().expect("round initialised above");
        round.residual[e.u] += 1;
        round.residual[e.v] += 1;
        let cap = round.dhat as u32;
        if round.residual[e.u] > cap || round.residual[e.v] > cap {
            return Ok(false);
        }
        let base = labels::CASCADE + 2 * self.round_labels[i];
        if let Some(sampler) = round.sampler.as_mut() {
            let r = src.uniform(base, edge_index as u64);
            if sampler.subsample_edge(edge_index, e, r) != SubsampleOutcome::Kept {
                return Ok(false);
            }
        }
        let r = src.uniform(base + 1, edge_index as u64);
        Ok(round.matcher.process_edge(edge_index, e, r)?.is_matched())
    }
}

impl OnlineColorer for Cascade {
    fn name(&self) -> &'static str {
        "cascade"
    }

    fn color_edge(
        &mut self,
        state: &mut ColoringState,
        edge_index: usize,
        e: Edge,
        src: &RandomSource,
    ) -> Result<(), ColorError> {
        for i in 0..self.schedule.len() {
            if self.offer(i, edge_index, e, src)? {
                return state.assign(edge_index, e, i, Slot::Round(i));
            }
        }
        let c = state.smallest_free(e, self.reserve_base());
        state.assign(edge_index, e, c, Slot::Reserve)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::{check_proper, run_coloring};
    use crate::graph::{generate, GeneratorSpec, GraphKind};

    #[test]
    fn schedule_without_slack() {
        let s = dhat_schedule(100, 1.0, 0.0, 50);
        assert_eq!(s[0], 100);
        let s = dhat_schedule(100, 2.0, 0.0, 50);
        assert_eq!(s.len(), 200);
        for (k, &d) in s.iter().enumerate() {
            assert_eq!(d, 100 - k / 2);
        }
    }

    #[test]
    fn schedule_is_non_increasing_and_floored() {
        for &(d, a, b, n) in &[(50, 1.0, 4.0, 1000), (7, 3.5, 0.3, 10), (200, 1.7, 1.0, 5000)] {
            let s = dhat_schedule(d, a, b, n);
            let floor = (b * (d as f64 * (n as f64).ln()).sqrt()).ceil() as usize;
            assert!(s.windows(2).all(|w| w[0] >= w[1]));
            assert!(s.iter().all(|&x| x >= floor));
        }
    }

    fn regular(d: usize, n: usize, seed: u64) -> crate::EdgeStream {
        generate(&GeneratorSpec::new(GraphKind::RandomRegular { d }, n).shuffled(), seed).unwrap()
    }

    #[test]
    fn cascade_is_proper_and_reserve_is_disjoint() {
        let s = regular(40, 300, 3);
        let mut cfg = CascadeConfig::new(300, 40);
        cfg.beta = 0.0;
        let mut cas = Cascade::new(cfg).unwrap();
        let st = run_coloring(&s, &mut cas, &RandomSource::new(9)).unwrap();
        check_proper(s.graph(), &st).unwrap();
        let base = cas.reserve_base();
        assert_eq!(base, 40);
        for a in st.assignments().iter().flatten() {
            match a.slot {
                Slot::Round(i) => assert_eq!(a.color, Some(i)),
                Slot::Reserve => assert!(a.color.unwrap() >= base),
                other => panic!("unexpected slot {other:?}"),
            }
        }
        assert!(st.summary().reserve_edges < s.len());
    }

    #[test]
    fn subsampled_rounds_use_the_critical_ratio() {
        let s = regular(64, 200, 1);
        let mut cfg = CascadeConfig::new(200, 64);
        cfg.beta = 0.0;
        let mut cas = Cascade::new(cfg).unwrap();
        run_coloring(&s, &mut cas, &RandomSource::new(2)).unwrap();
        let c0 = cas.round_c(0).unwrap();
        assert!((c0 - (CRITICAL_RATIO + 0.05) * 32.0).abs() < 1e-12);
    }

    #[test]
    fn reruns_are_identical() {
        let s = regular(12, 100, 4);
        let run = || {
            let mut cas = Cascade::new(CascadeConfig::new(100, 12)).unwrap();
            let st = run_coloring(&s, &mut cas, &RandomSource::new(77)).unwrap();
            st.assignments().to_vec()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn swapped_round_labels_are_deterministic() {
        let s = regular(12, 100, 4);
        let src = RandomSource::new(77);
        let run = |swaps: &[(usize, usize)]| {
            let mut cfg = CascadeConfig::new(100, 12);
            cfg.alpha = 3.0;
            cfg.beta = 0.0;
            cfg.delta_prime = 1000;
            let mut cas = Cascade::new(cfg).unwrap();
            for &(i, j) in swaps {
                cas.swap_round_labels(i, j);
            }
            let st = run_coloring(&s, &mut cas, &src).unwrap();
            st.assignments().to_vec()
        };
        let base = run(&[]);
        assert_eq!(run(&[(0, 1)]), run(&[(0, 1)]));
        assert_ne!(run(&[(0, 1)]), base);
        assert_eq!(run(&[(0, 1), (0, 1)]), base);
    }

    #[test]
    fn bad_config_is_rejected() {
        let mut cfg = CascadeConfig::new(10, 3);
        cfg.alpha = 0.5;
        assert!(matches!(Cascade::new(cfg), Err(ColorError::BadConfig(_))));
    }
}
