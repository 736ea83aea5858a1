//! Acceptance criteria, one pass/fail line each.
//!
//! Run with `cargo test -p edgecolor --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use edgecolor::color::labels;
use edgecolor::game::{
    adaptive_min_probability, build_witness_tree, dp_match_probability, exact_match_probability,
    random_witness_tree, simulate_game, witness_equivalence_check, BoundaryAssignment, RandomTreeSpec,
    ENUMERATION_CAP,
};
use edgecolor::graph::{generate, neighborhood_has_cycle, GeneratorSpec, GraphKind};
use edgecolor::harness::stats::{Moments, Proportion, SIGMAS};
use edgecolor::harness::{run_experiment, ExperimentConfig, Strategy};
use edgecolor::matcher::{min_sampling_parameter, run_matching};
use edgecolor::recurrence::{
    critical_c, envelope_iterate, f_delta, induction_bound, lambda, period2_fixed_point, riemann_gap,
    two_step_bound, RecurrenceParams,
};
use edgecolor::sparsify::{split_part_cap, subsample_band, SplitState, SubsampleOutcome, SubsampleState};
use edgecolor::{EdgeStream, RandomSource};
use rayon::prelude::*;

const SEED: u64 = 0x5eed_2024;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

/// `z = (hits - sum p_i n_i) / sqrt(sum n_i p_i (1 - p_i))` for pooled
/// Bernoulli runs with known per-run probabilities.
#[derive(Default)]
struct Pooled {
    hits: f64,
    mean: f64,
    var: f64,
}

impl Pooled {
    fn add(&mut self, hits: u64, runs: u64, p: f64) {
        self.hits += hits as f64;
        self.mean += runs as f64 * p;
        self.var += runs as f64 * p * (1.0 - p);
    }

    fn z(&self) -> f64 {
        (self.hits - self.mean) / self.var.sqrt()
    }
}

fn c1_tree_exactness() -> Outcome {
    let delta = 8;
    let c = min_sampling_parameter(delta) + 1.0;
    let per_tree: Vec<(f64, usize, usize, u64, u64)> = (0..50u64)
        .into_par_iter()
        .map(|k| {
            let n = 20 + (k as usize * 37) % 181;
            let spec = GeneratorSpec::new(GraphKind::RandomTree { max_degree: Some(delta) }, n).shuffled();
            let stream = generate(&spec, SEED ^ k).unwrap();
            let mut worst: f64 = 0.0;
            let mut enumerated = 0;
            let mut hits = 0;
            let mut runs = 0;
            let m = stream.len();
            for e in 0..m {
                let t = build_witness_tree(&stream, e, usize::MAX / 2).unwrap().unwrap();
                let a = BoundaryAssignment::AllUnmatched;
                worst = worst.max((dp_match_probability(&t, &a, c).unwrap() - 1.0 / c).abs());
                if t.edge_count() <= ENUMERATION_CAP {
                    worst = worst.max((exact_match_probability(&t, &a, c).unwrap() - 1.0 / c).abs());
                    enumerated += 1;
                }
                // 10^6 runs spread evenly over the 50 trees.
                let share = 20_000 / m as u64 + u64::from((e as u64) < 20_000 % m as u64);
                let src = RandomSource::new(SEED).replica(k << 20 | e as u64);
                hits += simulate_game(&t, &a, c, share, &src).unwrap();
                runs += share;
            }
            (worst, enumerated, m, hits, runs)
        })
        .collect();
    let worst = per_tree.iter().map(|r| r.0).fold(0.0, f64::max);
    let enumerated: usize = per_tree.iter().map(|r| r.1).sum();
    let edges: usize = per_tree.iter().map(|r| r.2).sum();
    let pooled = Proportion::new(per_tree.iter().map(|r| r.3).sum(), per_tree.iter().map(|r| r.4).sum());
    let z = (pooled.estimate() - 1.0 / c) / pooled.sigma_at(1.0 / c);
    outcome(
        worst <= 1e-12 && z.abs() <= SIGMAS,
        format!(
            "max |P - 1/C| = {worst:.1e} over {edges} edges ({enumerated} also enumerated); MC {} runs, z = {z:+.2}",
            pooled.trials
        ),
    )
}

fn c2_oracle_triangle() -> Outcome {
    let c = min_sampling_parameter(4) + 1.0;
    let rows: Vec<(f64, u64, u64, f64)> = (0..500u64)
        .into_par_iter()
        .map(|k| {
            let spec = RandomTreeSpec {
                max_edges: 12,
                max_children: 4,
                depth: 1 + k as usize % 4,
                max_boundary: 5,
            };
            let t = random_witness_tree(&spec, SEED ^ (k << 4));
            let nb = t.boundary_edges().len();
            let s = RandomSource::new(SEED).replica(k);
            let a = BoundaryAssignment::Fixed((0..nb).map(|j| s.uniform(1, j as u64) < 0.5).collect());
            let dp = dp_match_probability(&t, &a, c).unwrap();
            let en = exact_match_probability(&t, &a, c).unwrap();
            let runs = 2_000;
            let hits = simulate_game(&t, &a, c, runs, &s).unwrap();
            ((dp - en).abs(), hits, runs, dp)
        })
        .collect();
    let worst = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let mut pooled = Pooled::default();
    for r in &rows {
        pooled.add(r.1, r.2, r.3);
    }
    let z = pooled.z();
    outcome(
        worst <= 1e-12 && z.abs() <= SIGMAS,
        format!("max |enum - dp| = {worst:.1e} on 500 trees; MC 10^6 runs, z = {z:+.2}"),
    )
}

fn c3_monotonicity() -> Outcome {
    let c = min_sampling_parameter(4) + 1.0;
    let rows: Vec<(bool, f64, usize)> = (0..200u64)
        .into_par_iter()
        .map(|k| {
            let spec = RandomTreeSpec {
                max_edges: 20,
                max_children: 3,
                depth: 1 + 2 * (k as usize % 3),
                max_boundary: 10,
            };
            let t = random_witness_tree(&spec, SEED ^ (k << 12));
            let nb = t.boundary_edges().len();
            let all_u = dp_match_probability(&t, &BoundaryAssignment::AllUnmatched, c).unwrap();
            let mut minimal = true;
            for mask in 0..(1u32 << nb) {
                let a = BoundaryAssignment::Fixed((0..nb).map(|j| mask >> j & 1 == 1).collect());
                minimal &= dp_match_probability(&t, &a, c).unwrap() >= all_u - 1e-12;
            }
            let adaptive = adaptive_min_probability(&t, c).unwrap();
            (minimal, (adaptive - all_u).abs(), nb)
        })
        .collect();
    let minimal = rows.iter().all(|r| r.0);
    let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let assignments: usize = rows.iter().map(|r| 1usize << r.2).sum();
    outcome(
        minimal && worst <= 1e-12,
        format!("all-unmatched minimal over {assignments} assignments; max |adaptive - all-unmatched| = {worst:.1e}"),
    )
}

fn c4_contraction() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..10 {
        let d = 0.05 * i as f64;
        for k in 0..=1000 {
            let e = k as f64 * 1e-3;
            worst = worst.max(f_delta(d, f_delta(d, e)) - (1.0 - d) * e);
        }
    }
    outcome(worst <= 1e-12, format!("max f(f(eps)) - (1 - delta) eps = {worst:.2e}"))
}

fn c5_threshold() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for k in 1..=60 {
        let l = 0.05 * k as f64;
        let root = period2_fixed_point(l);
        if k <= 20 {
            ok &= root.is_none();
        } else {
            match root {
                None => ok = false,
                Some(x) => {
                    let g = |y: f64| 1.0 - (l * y).exp();
                    worst = worst.max((g(g(x)) - x).abs());
                }
            }
        }
    }
    let cc = critical_c(100);
    outcome(
        ok && worst <= 1e-10 && (cc - 158.19767).abs() <= 1e-5,
        format!("lambda 0.05..3.00: max residual {worst:.1e}; critical C(100) = {cc:.6}"),
    )
}

fn c6_envelope() -> Outcome {
    let (d, g) = (25usize, 41usize);
    let params = RecurrenceParams::new(1.64 * d as f64, d, 0.05).unwrap();
    let prof = envelope_iterate(&params, g).unwrap();
    let mut ok = true;
    for l in (2..=g).step_by(2) {
        ok &= prof.eps_max[l] <= two_step_bound(&params, &prof, l).unwrap() + 1e-9;
        ok &= prof.eps_max[l] <= induction_bound(&params, l).unwrap() + 1e-9;
    }
    let top_even = g - g % 2;
    let top = prof.eps_max[top_even].abs();
    let closed = induction_bound(&params, top_even).unwrap();
    outcome(
        ok && top <= closed,
        format!(
            "lambda = {:.4}; |eps_max({top_even})| = {top:.4} <= closed form {closed:.4}",
            params.lambda
        ),
    )
}

fn c7_riemann() -> Outcome {
    let mut worst: f64 = 0.0;
    for &d in &[25usize, 100, 1000] {
        for &f in &[1.6, 2.0, 10.0] {
            let c = f * d as f64;
            worst = worst.max(riemann_gap(c, d).unwrap() * c / 5.0);
        }
    }
    outcome(worst <= 1.0, format!("max gap / (5/C) = {worst:.4}"))
}

/// Edges touching either endpoint of `watched`, in arrival order.
fn local_stream(stream: &EdgeStream, watched: usize) -> Vec<(usize, edgecolor::Edge)> {
    let w = stream.graph().edge(watched);
    stream
        .arrivals()
        .filter(|&(_, e)| e.touches(w.u) || e.touches(w.v))
        .collect()
}

fn c8_subsample() -> Outcome {
    let (delta, dp) = (200usize, 50usize);
    let n = 1000;
    let spec = GeneratorSpec::new(GraphKind::RandomRegular { d: delta }, n).shuffled();
    let stream = generate(&spec, SEED).unwrap();
    let watched = stream.order()[stream.len() / 2];
    let local = local_stream(&stream, watched);
    let trials = 100_000u64;
    let src = RandomSource::new(SEED);
    // Only coin successes at the two endpoints decide the watched edge.
    let kept = (0..trials)
        .into_par_iter()
        .map_init(
            || SubsampleState::new(n, delta, dp).unwrap(),
            |st, t| {
                *st = SubsampleState::new(n, delta, dp).unwrap();
                let s = src.replica(t);
                let mut hit = false;
                for &(idx, e) in &local {
                    let o = st.subsample_edge(idx, e, s.uniform(0, idx as u64));
                    if idx == watched {
                        hit = o == SubsampleOutcome::Kept;
                    }
                }
                u64::from(hit)
            },
        )
        .sum::<u64>();
    let capped = (0..20u64).into_par_iter().all(|t| {
        let s = src.replica(trials + t);
        let mut st = SubsampleState::new(n, delta, dp).unwrap();
        let mut deg = vec![0usize; n];
        for (idx, e) in stream.arrivals() {
            if st.subsample_edge(idx, e, s.uniform(0, idx as u64)) == SubsampleOutcome::Kept {
                deg[e.u] += 1;
                deg[e.v] += 1;
            }
        }
        deg.iter().all(|&d| d <= dp)
    });
    let p = Proportion::new(kept, trials);
    let (lo, hi) = subsample_band(delta, dp);
    outcome(
        p.within_band(lo, hi, SIGMAS) && capped,
        format!(
            "keep rate {:.5} (band [{lo:.5}, {hi:.5}], sigma {:.5}); degree cap held on 20 full streams",
            p.estimate(),
            p.sigma_at(hi)
        ),
    )
}

fn c9_split() -> Outcome {
    let (delta, dp) = (200usize, 10usize);
    let n = 400;
    let spec = GeneratorSpec::new(GraphKind::RandomRegular { d: delta }, n).shuffled();
    let stream = generate(&spec, SEED ^ 9).unwrap();
    let probe = SplitState::new(n, delta, dp).unwrap();
    let parts = probe.parts();
    let watched = stream.order()[0] as u64;
    let trials = 100_000u64;
    let src = RandomSource::new(SEED ^ 9);
    let mut counts = vec![0u64; parts];
    for t in 0..trials {
        counts[probe.part_for(src.replica(t).uniform(labels::SPLIT, watched))] += 1;
    }
    let uniform = counts
        .iter()
        .all(|&c| Proportion::new(c, trials).consistent_with(1.0 / parts as f64, SIGMAS));
    let cap = split_part_cap(dp);
    let capped = (0..20u64).into_par_iter().all(|t| {
        let s = src.replica(trials + t);
        let mut st = SplitState::new(n, delta, dp).unwrap();
        for (idx, e) in stream.arrivals() {
            st.split_edge(idx, e, s.uniform(labels::SPLIT, idx as u64));
        }
        st.assigned().iter().all(|part| {
            let mut deg = vec![0usize; n];
            for &f in part {
                let e = stream.graph().edge(f);
                deg[e.u] += 1;
                deg[e.v] += 1;
            }
            deg.iter().all(|&d| d <= cap)
        })
    });
    let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
    outcome(
        uniform && capped,
        format!(
            "T = {parts}, part counts in [{lo}, {hi}] (expected {}); per-part cap {cap} held on 20 full streams",
            trials / parts as u64
        ),
    )
}

fn c10_witness() -> Outcome {
    let failures: usize = (0..1000u64)
        .into_par_iter()
        .map(|k| {
            let d = 2 + (k as usize % 5);
            let spec = GeneratorSpec::new(GraphKind::RandomRegular { d }, 50).shuffled();
            let stream = generate(&spec, SEED ^ (k << 16)).unwrap();
            let src = RandomSource::new(SEED).replica(k);
            let e = (src.uniform(3, 0) * stream.len() as f64) as usize;
            let c = min_sampling_parameter(d) + 1.0;
            usize::from(!witness_equivalence_check(&stream, e, &src, c).unwrap().holds())
        })
        .sum();
    outcome(failures == 0, format!("{failures} of 1000 instances differ"))
}

fn c11_matching_lower_bound() -> Outcome {
    let (d, n, c) = (8usize, 100_000usize, 14.0);
    let radius = 2;
    let runs = 10u64;
    let freqs: Vec<(f64, usize)> = (0..runs)
        .map(|t| {
            let spec = GeneratorSpec::new(GraphKind::RandomRegular { d }, n).shuffled();
            let stream = generate(&spec, SEED ^ (t << 32)).unwrap();
            let g = stream.graph();
            // Every 8th edge index is classified; the rest are not pooled.
            let sampled: Vec<usize> = (0..g.m())
                .into_par_iter()
                .step_by(8)
                .filter(|&i| !neighborhood_has_cycle(g, g.edge(i), radius).unwrap())
                .collect();
            let run = run_matching(&stream, c, &RandomSource::new(SEED).replica(t), 0).unwrap();
            let hits = sampled.iter().filter(|&&i| run.outcomes[i].is_matched()).count();
            (hits as f64 / sampled.len() as f64, sampled.len())
        })
        .collect();
    let m = Moments::from_values(freqs.iter().map(|f| f.0));
    let stated = 0.85 / c;
    // Closed-form lower bound (1 - eps)^2 / C with eps the induction bound
    // at depth `radius` for the contraction margin solved from C.
    let margin = 1.0 - lambda(c, d);
    let derived = RecurrenceParams::new(c, d, margin)
        .ok()
        .and_then(|p| induction_bound(&p, 2 * (radius / 2)))
        .map(|eps| ((1.0 - eps.min(1.0)).powi(2) / c).max(0.0))
        .unwrap_or(0.0);
    let threshold = stated.max(derived);
    outcome(
        m.mean >= threshold - SIGMAS * m.std_error(),
        format!(
            "treelike-edge match frequency {:.5} +- {:.5} over {runs} graphs ({} sampled treelike edges in the first); \
             threshold {stated:.5} (formula gives {derived:.5})",
            m.mean,
            m.std_error(),
            freqs[0].1
        ),
    )
}

struct Pin {
    label: &'static str,
    strategy: Strategy,
    kind: GraphKind,
    n: usize,
    trials: usize,
    metric: &'static str,
    baseline: f64,
}

/// Baselines recorded on the first verified run (seed `SEED`). They are
/// measurements at desk scale, not targets; a run fails if a metric grows
/// by more than 10% over its pin.
fn pins() -> Vec<Pin> {
    vec![
        Pin {
            label: "greedy colors/Δ",
            strategy: Strategy::Greedy,
            kind: GraphKind::RandomRegular { d: 16 },
            n: 2000,
            trials: 5,
            metric: "colors_over_delta",
            baseline: 1.312500,
        },
        Pin {
            label: "cascade colors/Δ",
            strategy: Strategy::Cascade {
                alpha: 1.0,
                beta: 4.0,
                delta_prime: 32,
                margin: 0.05,
            },
            kind: GraphKind::RandomRegular { d: 64 },
            n: 2000,
            trials: 3,
            metric: "colors_over_delta",
            baseline: 2.104167,
        },
        Pin {
            label: "random-order colors/Δ",
            strategy: Strategy::RandomOrderPipeline { delta_prime: None },
            kind: GraphKind::RandomRegular { d: 64 },
            n: 2000,
            trials: 3,
            metric: "colors_over_delta",
            baseline: 3.791667,
        },
        Pin {
            label: "tree-coloring uncolored",
            strategy: Strategy::TreeColoring,
            kind: GraphKind::RandomTree { max_degree: Some(16) },
            n: 5000,
            trials: 5,
            metric: "uncolored_fraction",
            baseline: 0.487738,
        },
        Pin {
            label: "blank-eps(0.1) blank fraction",
            strategy: Strategy::BlankEps { eps: 0.1 },
            kind: GraphKind::RandomRegular { d: 16 },
            n: 2000,
            trials: 5,
            metric: "blank_fraction",
            baseline: 0.163862,
        },
    ]
}

fn c12_end_to_end() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for pin in pins() {
        let cfg = ExperimentConfig {
            generator: GeneratorSpec::new(pin.kind, pin.n).shuffled(),
            strategy: pin.strategy.clone(),
            trials: pin.trials,
            seed: SEED,
            timing: false,
        };
        // Properness, greedy's 2Δ - 1 and finite palettes are checked
        // inside every trial; any violation is an error here.
        match run_experiment(&cfg) {
            Err(e) => {
                ok = false;
                parts.push(format!("{}: {e}", pin.label));
            }
            Ok(r) => {
                let value = r.summary_of(pin.metric).unwrap().mean;
                let palette = r.summary_of("colors_used").unwrap().max;
                ok &= palette.is_finite();
                let held = value <= pin.baseline * 1.1 + 1e-12;
                ok &= held;
                parts.push(format!("{} {value:.6} (pin {:.6})", pin.label, pin.baseline));
            }
        }
    }
    outcome(ok, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("tree exactness", c1_tree_exactness),
        ("oracle triangle", c2_oracle_triangle),
        ("monotonicity", c3_monotonicity),
        ("contraction inequality", c4_contraction),
        ("threshold phase boundary", c5_threshold),
        ("envelope consistency", c6_envelope),
        ("riemann gap", c7_riemann),
        ("sparsifier marginals", c8_subsample),
        ("split uniformity", c9_split),
        ("witness equivalence", c10_witness),
        ("matching lower bound", c11_matching_lower_bound),
        ("end-to-end guarantees", c12_end_to_end),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let secs = start.elapsed().as_secs_f64();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] C{:<2} {name} ({secs:.1}s): {}", i + 1, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
