//! Fixed-seed verification suites.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{Proportion, SIGMAS};
use super::HarnessError;
use crate::game::{
    adaptive_min_probability, dp_match_probability, exact_match_probability, random_witness_tree,
    simulate_game, witness_equivalence_check, BoundaryAssignment, RandomTreeSpec, ENUMERATION_CAP,
};
use crate::graph::{generate, GeneratorSpec, GraphKind, RandomSource};
use crate::matcher::min_sampling_parameter;
use crate::recurrence::{
    critical_c, envelope_iterate, eps_from_q, eps_step, f_contraction_check, induction_bound,
    period2_fixed_point, q_step, riemann_gap, two_step_bound, RecurrenceParams,
};
use crate::sparsify::{split_part_cap, subsample_band, SplitState, SubsampleState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Recurrence,
    Game,
    Sparsifier,
    TreeExact,
    WitnessEquivalence,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Recurrence,
        Suite::Game,
        Suite::Sparsifier,
        Suite::TreeExact,
        Suite::WitnessEquivalence,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Recurrence => "recurrence",
            Suite::Game => "game",
            Suite::Sparsifier => "sparsifier",
            Suite::TreeExact => "tree-exact",
            Suite::WitnessEquivalence => "witness-equivalence",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| HarnessError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn verify_suite(suite: Suite, seed: u64) -> Result<SuiteReport, HarnessError> {
    let checks = match suite {
        Suite::Recurrence => recurrence_checks(seed)?,
        Suite::Game => game_checks(seed)?,
        Suite::Sparsifier => sparsifier_checks(seed)?,
        Suite::TreeExact => tree_exact_checks(seed)?,
        Suite::WitnessEquivalence => witness_checks(seed)?,
    };
    Ok(SuiteReport { suite, checks })
}

fn recurrence_checks(seed: u64) -> Result<Vec<Check>, HarnessError> {
    let mut out = Vec::new();

    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    for i in 0..10 {
        let d = 0.05 * i as f64;
        for k in 0..=1000 {
            let e = k as f64 * 1e-3;
            ok &= f_contraction_check(d, e);
            worst = worst.max(crate::recurrence::f_delta(d, crate::recurrence::f_delta(d, e)) - (1.0 - d) * e);
        }
    }
    out.push(Check::new("contraction-grid", ok, format!("max f(f(eps)) - (1-delta) eps = {worst:.3e}")));

    let mut worst_ratio: f64 = 0.0;
    for &d in &[25usize, 100, 1000] {
        for &f in &[1.6, 2.0, 10.0] {
            let c = f * d as f64;
            worst_ratio = worst_ratio.max(riemann_gap(c, d)? * c / 5.0);
        }
    }
    out.push(Check::new("riemann-gap", worst_ratio <= 1.0, format!("max gap / (5/C) = {worst_ratio:.4}")));

    let mut ok = true;
    for k in 1..=40 {
        let lambda = 0.05 * k as f64;
        match period2_fixed_point(lambda) {
            None => ok &= lambda <= 1.0 + 1e-12,
            Some(x) => {
                let g = |y: f64| 1.0 - (lambda * y).exp();
                ok &= lambda > 1.0 && (g(g(x)) - x).abs() <= 1e-10 && g(x) < 0.0 && x > 0.0;
            }
        }
    }
    out.push(Check::new("period-two-threshold", ok, "lambda grid 0.05..2.00"));
    let cc = critical_c(100);
    out.push(Check::new("critical-c", (cc - 158.19767).abs() < 1e-5, format!("critical_C(100) = {cc}")));

    let params = RecurrenceParams::new(1.64 * 25.0, 25, 0.05)?;
    let prof = envelope_iterate(&params, 41)?;
    let mut ok = true;
    for l in (2..=41).step_by(2) {
        ok &= prof.eps_max[l] <= two_step_bound(&params, &prof, l).unwrap() + 1e-9;
        ok &= prof.eps_max[l] <= induction_bound(&params, l).unwrap() + 1e-9;
    }
    out.push(Check::new("envelope-bounds", ok, "Δ = 25, C = 41, g = 41"));

    let mut worst: f64 = 0.0;
    for t in 0..10_000u64 {
        let s = RandomSource::new(seed).replica(t);
        let u = |k: u64| s.uniform(0, k);
        let c = 13.0 + 40.0 * u(0);
        let kids: Vec<(f64, usize)> = (0..(u(1) * 12.0) as u64)
            .map(|k| (u(10 + k), (u(100 + k) * 12.0) as usize))
            .collect();
        let q = q_step(c, 0, &kids)?;
        let eps: Vec<f64> = kids.iter().map(|&(q, ci)| eps_from_q(c, ci, q)).collect();
        worst = worst.max((eps_step(c, &eps)? - eps_from_q(c, kids.len(), q)).abs());
    }
    out.push(Check::new("q-eps-identity", worst <= 1e-12, format!("max deviation {worst:.2e}")));
    Ok(out)
}

fn game_checks(seed: u64) -> Result<Vec<Check>, HarnessError> {
    let results: Vec<(f64, bool, bool)> = (0..200u64)
        .into_par_iter()
        .map(|k| -> Result<(f64, bool, bool), HarnessError> {
            let depth = 1 + 2 * (k as usize % 2);
            let spec = RandomTreeSpec {
                max_edges: 14,
                max_children: 3,
                depth,
                max_boundary: 6,
            };
            let t = random_witness_tree(&spec, seed ^ k);
            let c = 4.0 + 2.0 * 4f64.sqrt() + 1.0;
            let nb = t.boundary_edges().len();
            let mut diff: f64 = 0.0;
            let mut min_fixed = f64::INFINITY;
            let mut min_is_all_unmatched = true;
            let all_u = dp_match_probability(&t, &BoundaryAssignment::AllUnmatched, c)?;
            for mask in 0..(1u32 << nb) {
                let a = BoundaryAssignment::Fixed((0..nb).map(|j| mask >> j & 1 == 1).collect());
                let dp = dp_match_probability(&t, &a, c)?;
                diff = diff.max((exact_match_probability(&t, &a, c)? - dp).abs());
                min_fixed = min_fixed.min(dp);
                min_is_all_unmatched &= dp >= all_u - 1e-12;
            }
            let adaptive = adaptive_min_probability(&t, c)?;
            let optimal = min_is_all_unmatched && (adaptive - all_u).abs() <= 1e-12;
            Ok((diff, optimal, adaptive <= min_fixed + 1e-12))
        })
        .collect::<Result<_, _>>()?;
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    Ok(vec![
        Check::new("enumeration-equals-dp", worst <= 1e-12, format!("max diff {worst:.2e}")),
        Check::new(
            "odd-depth-all-unmatched-is-optimal",
            results.iter().all(|r| r.1),
            "200 trees, all boundary assignments",
        ),
        Check::new("adaptive-below-fixed", results.iter().all(|r| r.2), "adaptive <= every fixed assignment"),
    ])
}

fn sparsifier_checks(seed: u64) -> Result<Vec<Check>, HarnessError> {
    let src = RandomSource::new(seed);
    let (delta, dp) = (200usize, 50usize);
    let trials = 10_000u64;
    // Only edges touching the watched edge's endpoints affect it: simulate
    // a star of 2(Δ - 1) + 1 edges around (0, 1) in random order.
    let kept = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let s = src.replica(t);
            let mut st = SubsampleState::new(2 * delta, delta, dp).expect("valid parameters");
            let m = 2 * (delta - 1) + 1;
            let mut order: Vec<usize> = (0..m).collect();
            for i in (1..m).rev() {
                let j = (s.uniform(1, i as u64) * (i + 1) as f64) as usize;
                order.swap(i, j);
            }
            let mut watched = false;
            for idx in order {
                let e = if idx == 0 {
                    crate::Edge::new(0, 1)
                } else if idx < delta {
                    crate::Edge::new(0, 1 + idx)
                } else {
                    crate::Edge::new(1, idx + 1)
                };
                let o = st.subsample_edge(idx, e, s.uniform(0, idx as u64));
                if idx == 0 {
                    watched = o == crate::sparsify::SubsampleOutcome::Kept;
                }
            }
            watched
        })
        .count() as u64;
    let p = Proportion::new(kept, trials);
    let (lo, ratio) = subsample_band(delta, dp);
    let in_band = p.within_band(lo, ratio, SIGMAS);
    let mut out = vec![Check::new(
        "subsample-marginal",
        in_band,
        format!("keep rate {:.5} vs band [{lo:.5}, {ratio:.5}]", p.estimate()),
    )];

    let stream = generate(&GeneratorSpec::new(GraphKind::RandomRegular { d: 40 }, 400).shuffled(), seed)?;
    let mut st = SplitState::new(400, 40, 4)?;
    let mut counts = vec![0u64; st.parts()];
    for (idx, e) in stream.arrivals() {
        let r = src.uniform(7, idx as u64);
        counts[st.part_for(r)] += 1;
        st.split_edge(idx, e, r);
    }
    let cap = split_part_cap(4);
    let mut capped = true;
    for part in st.assigned() {
        let mut deg = vec![0usize; 400];
        for &f in part {
            let e = stream.graph().edge(f);
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        capped &= deg.iter().all(|&d| d <= cap);
    }
    let m = stream.len() as u64;
    let uniform = counts
        .iter()
        .all(|&c| Proportion::new(c, m).consistent_with(1.0 / st.parts() as f64, SIGMAS));
    out.push(Check::new("split-cap", capped, format!("cap {cap}")));
    out.push(Check::new("split-uniform", uniform, format!("part counts {counts:?}")));
    Ok(out)
}

fn tree_exact_checks(seed: u64) -> Result<Vec<Check>, HarnessError> {
    let results: Vec<(f64, bool, u64, u64)> = (0..20u64)
        .into_par_iter()
        .map(|k| -> Result<(f64, bool, u64, u64), HarnessError> {
            let spec = GeneratorSpec::new(GraphKind::RandomTree { max_degree: Some(8) }, 60).shuffled();
            let stream = generate(&spec, seed ^ (k << 8))?;
            let c = min_sampling_parameter(8) + 1.0;
            let mut worst: f64 = 0.0;
            let mut hits = 0;
            let mut runs = 0;
            let mut enumerated = false;
            for e in 0..stream.graph().m() {
                let t = crate::game::build_witness_tree(&stream, e, usize::MAX / 2)?
                    .expect("trees have no cycles");
                let a = BoundaryAssignment::AllUnmatched;
                worst = worst.max((dp_match_probability(&t, &a, c)? - 1.0 / c).abs());
                if t.edge_count() <= ENUMERATION_CAP.min(14) {
                    worst = worst.max((exact_match_probability(&t, &a, c)? - 1.0 / c).abs());
                    enumerated = true;
                }
                if e % 10 == 0 {
                    hits += simulate_game(&t, &a, c, 2_000, &RandomSource::new(seed).replica(k * 1000 + e as u64))?;
                    runs += 2_000;
                }
            }
            Ok((worst, enumerated, hits, runs))
        })
        .collect::<Result<_, _>>()?;
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let c = min_sampling_parameter(8) + 1.0;
    let pooled = Proportion::new(results.iter().map(|r| r.2).sum(), results.iter().map(|r| r.3).sum());
    Ok(vec![
        Check::new("oracles-give-one-over-c", worst <= 1e-12, format!("max |P - 1/C| = {worst:.2e}")),
        Check::new("enumeration-ran", results.iter().any(|r| r.1), "at least one small witness tree"),
        Check::new(
            "monte-carlo-one-over-c",
            pooled.consistent_with(1.0 / c, SIGMAS),
            format!("{:.6} vs {:.6}", pooled.estimate(), 1.0 / c),
        ),
    ])
}

fn witness_checks(seed: u64) -> Result<Vec<Check>, HarnessError> {
    let failures: usize = (0..200u64)
        .into_par_iter()
        .map(|k| -> Result<usize, HarnessError> {
            let d = 2 + (k as usize % 5);
            let spec = GeneratorSpec::new(GraphKind::RandomRegular { d }, 50).shuffled();
            let stream = generate(&spec, seed ^ k)?;
            let e = (RandomSource::new(seed).uniform(3, k) * stream.len() as f64) as usize;
            let c = min_sampling_parameter(d) + 1.0;
            let rep = witness_equivalence_check(&stream, e, &RandomSource::new(seed ^ k), c)?;
            Ok(usize::from(!rep.holds()))
        })
        .sum::<Result<usize, _>>()?;
    Ok(vec![Check::new(
        "witness-substream-equivalence",
        failures == 0,
        format!("{failures} of 200 instances differ"),
    )])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("bogus".parse::<Suite>(), Err(HarnessError::UnknownSuite(_))));
    }

    #[test]
    fn all_suites_pass() {
        for s in Suite::ALL {
            let r = verify_suite(s, 2024).unwrap();
            assert!(r.passed(), "{r:#?}");
        }
    }
}
