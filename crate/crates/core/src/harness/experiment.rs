//! Seeded multi-trial experiments.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::MetricSummary;
use super::HarnessError;
use crate::color::{
    check_proper, run_coloring, BlankEps, Cascade, CascadeConfig, ColorError, ColoringState, Greedy,
    OnlineColorer, PipelineConfig, RandomOrderPipeline, Slot, TreeColoring, TreeColoringConfig,
};
use crate::graph::{generate, neighborhood_has_cycle, EdgeStream, GeneratorSpec, RandomSource};
use crate::matcher::{is_valid_matching, min_sampling_parameter, run_matching};
use crate::sparsify::bernoulli_subsample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "kebab-case")]
pub enum Strategy {
    Greedy,
    Cascade {
        alpha: f64,
        beta: f64,
        delta_prime: usize,
        margin: f64,
    },
    TreeColoring,
    RandomOrderPipeline {
        delta_prime: Option<usize>,
    },
    BlankEps {
        eps: f64,
    },
    /// The matcher alone; `c` defaults to `Δ + 2 sqrt(Δ) + 1`.
    MatcherOnly {
        c: Option<f64>,
    },
    /// Keeps each edge with probability `target / Δ` and measures how often
    /// a kept edge has a cycle within `radius` in the kept graph.
    Locality {
        target: usize,
        radius: usize,
    },
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Greedy => "greedy",
            Strategy::Cascade { .. } => "cascade",
            Strategy::TreeColoring => "tree-coloring",
            Strategy::RandomOrderPipeline { .. } => "random-order-pipeline",
            Strategy::BlankEps { .. } => "blank-eps",
            Strategy::MatcherOnly { .. } => "matcher-only",
            Strategy::Locality { .. } => "locality",
        }
    }

    pub fn is_coloring(&self) -> bool {
        !matches!(self, Strategy::MatcherOnly { .. } | Strategy::Locality { .. })
    }

    /// Builds the colorer for a graph with `n` vertices and degree `delta`.
    pub fn colorer(&self, n: usize, delta: usize) -> Result<Option<Box<dyn OnlineColorer>>, ColorError> {
        Ok(Some(match self {
            Strategy::Greedy => Box::new(Greedy),
            Strategy::Cascade {
                alpha,
                beta,
                delta_prime,
                margin,
            } => Box::new(Cascade::new(CascadeConfig {
                alpha: *alpha,
                beta: *beta,
                n,
                delta,
                delta_prime: *delta_prime,
                margin: *margin,
            })?),
            Strategy::TreeColoring => Box::new(TreeColoring::new(n, TreeColoringConfig::new(delta))),
            Strategy::RandomOrderPipeline { delta_prime } => {
                Box::new(RandomOrderPipeline::new(PipelineConfig::new(n, delta, *delta_prime))?)
            }
            Strategy::BlankEps { eps } => Box::new(BlankEps::new(delta, *eps)?),
            Strategy::MatcherOnly { .. } | Strategy::Locality { .. } => return Ok(None),
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub generator: GeneratorSpec,
    pub strategy: Strategy,
    pub trials: usize,
    pub seed: u64,
    /// Record wall-clock time per trial (makes reports non-reproducible).
    #[serde(default)]
    pub timing: bool,
}

/// Metrics of one trial, keyed by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub trial: usize,
    pub seed: u64,
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub config: ExperimentConfig,
    pub trials: Vec<TrialMetrics>,
    pub summary: Vec<MetricSummary>,
}

impl Report {
    pub fn summary_of(&self, metric: &str) -> Option<&MetricSummary> {
        self.summary.iter().find(|s| s.metric == metric)
    }
}

fn invariant(trial: usize, seed: u64, detail: impl Into<String>) -> HarnessError {
    HarnessError::Invariant {
        trial,
        seed,
        detail: detail.into(),
    }
}

/// Max degree of the edges a coloring put in its reserve palette.
fn leftover_max_degree(stream: &EdgeStream, state: &ColoringState) -> usize {
    let g = stream.graph();
    let mut deg = vec![0usize; g.n()];
    for (idx, a) in state.assignments().iter().enumerate() {
        if a.is_some_and(|a| a.slot == Slot::Reserve) {
            let e = g.edge(idx);
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
    }
    deg.into_iter().max().unwrap_or(0)
}

fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialMetrics, HarnessError> {
    let src = RandomSource::new(cfg.seed).replica(trial as u64);
    let start = cfg.timing.then(Instant::now);
    let stream = generate(&cfg.generator, src.seed)?;
    let g = stream.graph();
    let (n, m, delta) = (g.n(), g.m(), g.delta());
    let mut metrics = BTreeMap::new();
    metrics.insert("n".to_string(), n as f64);
    metrics.insert("m".to_string(), m as f64);
    metrics.insert("delta".to_string(), delta as f64);

    match &cfg.strategy {
        Strategy::MatcherOnly { c } => {
            let c = c.unwrap_or(min_sampling_parameter(delta) + 1.0);
            let run = run_matching(&stream, c, &src, 0)?;
            if !is_valid_matching(&stream, &run.matching) {
                return Err(invariant(trial, src.seed, "matching shares a vertex"));
            }
            metrics.insert("c".into(), c);
            metrics.insert("matched".into(), run.matched_count() as f64);
            metrics.insert("match_frequency".into(), run.matched_count() as f64 / m.max(1) as f64);
            metrics.insert("match_frequency_times_c".into(), c * run.matched_count() as f64 / m.max(1) as f64);
        }
        Strategy::Locality { target, radius } => {
            let p = *target as f64 / delta as f64;
            let (kept, _) = bernoulli_subsample(&stream, p, &src, 0)?;
            let kg = kept.graph();
            let cyclic = kg
                .edges()
                .par_iter()
                .map(|&e| neighborhood_has_cycle(kg, e, *radius).map(u64::from))
                .try_reduce(|| 0, |a, b| Ok(a + b))?;
            metrics.insert("kept_edges".into(), kg.m() as f64);
            metrics.insert("cycle_frequency".into(), cyclic as f64 / kg.m().max(1) as f64);
            metrics.insert(
                "cycle_bound".into(),
                3.0 * (*target as f64).powi(5 * *radius as i32) / delta as f64,
            );
        }
        strategy => {
            let mut colorer = strategy.colorer(n, delta)?.expect("coloring strategy");
            let state = run_coloring(&stream, colorer.as_mut(), &src).map_err(|e| match e {
                ColorError::Improper { edge, .. } | ColorError::Reassigned(edge) | ColorError::Undecided(edge) => {
                    invariant(trial, src.seed, format!("edge {edge}: {e}"))
                }
                other => other.into(),
            })?;
            check_proper(g, &state).map_err(|e| invariant(trial, src.seed, e.to_string()))?;
            let s = state.summary();
            if matches!(strategy, Strategy::Greedy) && s.colors_used > 2 * delta - 1 {
                return Err(invariant(trial, src.seed, format!("greedy used {} colors", s.colors_used)));
            }
            metrics.insert("colors_used".into(), s.colors_used as f64);
            metrics.insert("colors_over_delta".into(), s.colors_used as f64 / delta as f64);
            metrics.insert("uncolored_fraction".into(), s.uncolored as f64 / m.max(1) as f64);
            metrics.insert("blank_fraction".into(), s.blank as f64 / m.max(1) as f64);
            metrics.insert("reserve_edges".into(), s.reserve_edges as f64);
            metrics.insert("reserve_colors".into(), s.reserve_colors as f64);
            metrics.insert("leftover_max_degree".into(), leftover_max_degree(&stream, &state) as f64);
        }
    }
    if let Some(t) = start {
        metrics.insert("wall_ms".into(), t.elapsed().as_secs_f64() * 1e3);
    }
    Ok(TrialMetrics {
        trial,
        seed: src.seed,
        metrics,
    })
}

/// Runs every trial (in parallel), validating invariants inline, and
/// aggregates each metric with a 4-sigma band. The report depends only on
/// the configuration, not on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    if cfg.trials == 0 {
        return Err(HarnessError::BadConfig("trials must be at least 1".into()));
    }
    let trials: Vec<TrialMetrics> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t))
        .collect::<Result<_, _>>()?;
    let names: Vec<String> = trials[0].metrics.keys().cloned().collect();
    let summary = names
        .iter()
        .map(|name| MetricSummary::from_values(name, trials.iter().map(|t| t.metrics[name])))
        .collect();
    Ok(Report {
        schema: 1,
        config: cfg.clone(),
        trials,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphKind;

    fn cfg(strategy: Strategy, kind: GraphKind, n: usize, trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            generator: GeneratorSpec::new(kind, n).shuffled(),
            strategy,
            trials,
            seed: 11,
            timing: false,
        }
    }

    #[test]
    fn greedy_report() {
        let r = run_experiment(&cfg(Strategy::Greedy, GraphKind::RandomRegular { d: 16 }, 2000, 5)).unwrap();
        assert_eq!(r.trials.len(), 5);
        assert!(r.trials.iter().all(|t| t.metrics["colors_used"] <= 31.0));
        assert!(r.summary_of("colors_over_delta").unwrap().min >= 1.0);
    }

    #[test]
    fn reports_are_reproducible() {
        let c = cfg(Strategy::TreeColoring, GraphKind::RandomTree { max_degree: Some(6) }, 300, 4);
        assert_eq!(run_experiment(&c).unwrap(), run_experiment(&c).unwrap());
    }

    #[test]
    fn matcher_only_on_trees_is_near_one_over_c() {
        let c = cfg(
            Strategy::MatcherOnly { c: None },
            GraphKind::RandomTree { max_degree: Some(8) },
            200,
            400,
        );
        let r = run_experiment(&c).unwrap();
        let s = r.summary_of("match_frequency_times_c").unwrap();
        assert!(s.lo <= 1.0 && 1.0 <= s.hi, "{s:?}");
    }

    #[test]
    fn zero_trials_is_a_config_error() {
        let c = cfg(Strategy::Greedy, GraphKind::Path, 5, 0);
        assert!(matches!(run_experiment(&c), Err(HarnessError::BadConfig(_))));
    }

    #[test]
    fn locality_reports_cycle_frequency() {
        let c = cfg(
            Strategy::Locality { target: 2, radius: 1 },
            GraphKind::RandomRegular { d: 20 },
            400,
            2,
        );
        let r = run_experiment(&c).unwrap();
        assert!(r.trials.iter().all(|t| t.metrics["cycle_frequency"] <= 1.0));
    }
}
