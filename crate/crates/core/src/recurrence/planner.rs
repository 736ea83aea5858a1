//! Parameter planning for the adversarial-order coloring.
//!
//! Given `Δ`, pick `δ = A (ln ln Δ)^2 / ln Δ`, `Δ′ = 10^6 δ^-3`,
//! `g = (100/δ) ln(100/δ)` and `C = (e/(e-1) + δ) Δ′`, then check that
//!
//! ```text
//! 5 sqrt(ln Δ′ / Δ′),  3 Δ′^(5g) / Δ,  (1 - δ/4)^((g-1)/2),  10^4 / (δ C)
//! ```
//!
//! are all at most `δ/10`. The middle term is astronomically large for any
//! representable `Δ`, so every quantity is handled in log space and `Δ` is
//! passed around as `ln Δ`.

use serde::{Deserialize, Serialize};

use super::{RecurrenceError, CRITICAL_RATIO};

/// Upper end of the admissible `δ` range in strict mode.
pub const DELTA_LIMIT: f64 = 1.0 / 20.0;

/// Natural logs of the four bound terms and of the target `δ/10`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundTerms {
    pub ln_subsample: f64,
    pub ln_cycle: f64,
    pub ln_decay: f64,
    pub ln_tail: f64,
    pub ln_target: f64,
}

impl BoundTerms {
    fn all(&self) -> [(&'static str, f64); 4] {
        [
            ("subsample", self.ln_subsample),
            ("cycle", self.ln_cycle),
            ("decay", self.ln_decay),
            ("tail", self.ln_tail),
        ]
    }

    /// Largest `ln(term) - ln(δ/10)`; non-positive iff every bound holds.
    pub fn worst_margin(&self) -> f64 {
        self.all()
            .iter()
            .map(|&(_, t)| t - self.ln_target)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Names of the terms exceeding `δ/10`.
    pub fn failing(&self) -> Vec<&'static str> {
        self.all()
            .iter()
            .filter(|&&(_, t)| t > self.ln_target)
            .map(|&(name, _)| name)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerOutput {
    pub log10_delta_big: f64,
    pub n: Option<u64>,
    /// Constant in front of `(ln ln Δ)^2 / ln Δ`; `None` when `δ` was given.
    pub a: Option<f64>,
    pub delta: f64,
    pub delta_prime: f64,
    pub g: f64,
    pub c: f64,
    pub terms: BoundTerms,
    pub failing: Vec<String>,
    pub bounds_ok: bool,
}

fn ln_terms(delta: f64, ln_delta_big: f64) -> (f64, f64, f64, BoundTerms) {
    let delta_prime = 1e6 * delta.powi(-3);
    let g = 100.0 / delta * (100.0 / delta).ln();
    let c = (CRITICAL_RATIO + delta) * delta_prime;
    let ln_dp = delta_prime.ln();
    let terms = BoundTerms {
        ln_subsample: 5f64.ln() + 0.5 * (ln_dp.ln() - ln_dp),
        ln_cycle: 3f64.ln() + 5.0 * g * ln_dp - ln_delta_big,
        ln_decay: 0.5 * (g - 1.0) * (1.0 - delta / 4.0).ln(),
        ln_tail: 1e4f64.ln() - (delta * c).ln(),
        ln_target: (delta / 10.0).ln(),
    };
    (delta_prime, g, c, terms)
}

/// Plans with an explicit `δ`. Outside strict mode (`diagnostic = true`)
/// any `δ` in `(0, 1]` is accepted.
pub fn plan_for_delta(
    delta: f64,
    ln_delta_big: f64,
    diagnostic: bool,
) -> Result<PlannerOutput, RecurrenceError> {
    let upper = if diagnostic { 1.0 } else { DELTA_LIMIT };
    let ok = delta > 0.0 && (delta < upper || (diagnostic && delta == 1.0));
    if !ok {
        return Err(RecurrenceError::BadDelta(delta));
    }
    Ok(output(None, None, delta, ln_delta_big))
}

fn output(a: Option<f64>, n: Option<u64>, delta: f64, ln_delta_big: f64) -> PlannerOutput {
    let (delta_prime, g, c, terms) = ln_terms(delta, ln_delta_big);
    let failing: Vec<String> = terms.failing().into_iter().map(String::from).collect();
    PlannerOutput {
        log10_delta_big: ln_delta_big / std::f64::consts::LN_10,
        n,
        a,
        delta,
        delta_prime,
        g,
        c,
        terms,
        bounds_ok: failing.is_empty(),
        failing,
    }
}

/// Candidate values of `A`, log-spaced over `[10^-3, 10^3]`.
fn a_grid() -> impl Iterator<Item = f64> {
    (-120..=120).map(|k| 10f64.powf(k as f64 / 40.0))
}

/// Plans from `ln Δ` by scanning `A`: the smallest `A` meeting all bounds,
/// or, if none does, the one whose worst term is closest to `δ/10`.
pub fn plan_from_ln(ln_delta_big: f64, n: Option<u64>) -> PlannerOutput {
    let lnln = ln_delta_big.ln();
    let shape = lnln * lnln / ln_delta_big;
    let mut best: Option<PlannerOutput> = None;
    for a in a_grid() {
        let delta = a * shape;
        if !(delta > 0.0 && delta < DELTA_LIMIT) {
            continue;
        }
        let out = output(Some(a), n, delta, ln_delta_big);
        if out.bounds_ok {
            return out;
        }
        let better = best
            .as_ref()
            .is_none_or(|b| out.terms.worst_margin() < b.terms.worst_margin());
        if better {
            best = Some(out);
        }
    }
    // ln ln Δ <= 0 leaves no admissible δ; fall back to the largest one.
    best.unwrap_or_else(|| output(None, n, DELTA_LIMIT / 2.0, ln_delta_big))
}

/// [`plan_from_ln`] for an integer `Δ >= 3`.
pub fn plan_parameters(delta_big: u64, n: u64) -> PlannerOutput {
    plan_from_ln((delta_big.max(3) as f64).ln(), Some(n))
}

/// `log10 Δ` above which the planner first finds feasible parameters, by
/// bisection on `ln Δ`. `None` if still infeasible at `Δ = 10^(10^9)`.
pub fn feasibility_crossover_log10() -> Option<f64> {
    let feasible = |ln_d: f64| plan_from_ln(ln_d, None).bounds_ok;
    let mut lo = 10.0f64;
    let mut hi = 1e9 * std::f64::consts::LN_10;
    if !feasible(hi) {
        return None;
    }
    while hi / lo > 1.0 + 1e-6 {
        let mid = (lo * hi).sqrt();
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi / std::f64::consts::LN_10)
}
