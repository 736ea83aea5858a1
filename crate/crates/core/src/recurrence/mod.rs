//! Tree recurrences for the matcher and the contraction of their errors.
//!
//! For a vertex `v` with children `v_1, ..., v_k` in arrival order, the
//! probability that `v` is not matched from below is
//!
//! ```text
//! q_v = prod_i (1 - C / ((C - i + 1)(C - c_{v_i})) * q_{v_i})
//! ```
//!
//! and the error `eps_v = 1 - q_v C / (C - c_v)` satisfies
//! `eps_v = 1 - prod_i (1 + eps_{v_i} / (C - i))`. One level up the tree the
//! error flips sign and scales by roughly `lambda = ln(C / (C - Δ))`, so
//! errors contract exactly when `lambda < 1`, i.e. `C > e/(e-1) Δ`.

mod planner;

pub use planner::{
    feasibility_crossover_log10, plan_for_delta, plan_from_ln, plan_parameters, BoundTerms,
    PlannerOutput, DELTA_LIMIT,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecurrenceError {
    #[error("denominator {0} is not positive")]
    NonPositiveDenominator(f64),
    #[error("C = {c} must exceed the number of children {k}")]
    TooManyChildren { c: f64, k: usize },
    #[error("C = {c} must exceed the degree bound {delta} (plus one for the gap sum)")]
    CTooSmall { c: f64, delta: usize },
    #[error("envelope iteration needs C >= e/(e-1) * delta = {needed} (got {c})")]
    BelowCriticalThreshold { c: f64, needed: f64 },
    #[error("envelope iteration needs delta >= 25 (got {0})")]
    DegreeTooSmall(usize),
    #[error("delta = {0} must lie in (0, 1)")]
    BadDelta(f64),
}

/// `e / (e - 1)`.
pub const CRITICAL_RATIO: f64 = std::f64::consts::E / (std::f64::consts::E - 1.0);

/// One step of the `q` recurrence. Children are `(q_i, c_i)` in arrival
/// order; child `i` (1-based) meets the parent at degree `parent_offset + i - 1`.
pub fn q_step(c: f64, parent_offset: usize, children: &[(f64, usize)]) -> Result<f64, RecurrenceError> {
    let mut q = 1.0;
    for (k, &(q_child, c_child)) in children.iter().enumerate() {
        let parent_deg = (parent_offset + k) as f64;
        let a = c - parent_deg;
        let b = c - c_child as f64;
        if a <= 0.0 {
            return Err(RecurrenceError::NonPositiveDenominator(a));
        }
        if b <= 0.0 {
            return Err(RecurrenceError::NonPositiveDenominator(b));
        }
        q *= 1.0 - c / (a * b) * q_child;
    }
    Ok(q)
}

/// One step of the error recurrence: `1 - prod_{i=1..k} (1 + eps_i / (C - i))`.
pub fn eps_step(c: f64, children_eps: &[f64]) -> Result<f64, RecurrenceError> {
    let k = children_eps.len();
    if c <= k as f64 {
        return Err(RecurrenceError::TooManyChildren { c, k });
    }
    let prod: f64 = children_eps
        .iter()
        .enumerate()
        .map(|(i, &eps)| 1.0 + eps / (c - (i + 1) as f64))
        .product();
    Ok(1.0 - prod)
}

/// Error of a vertex with `children` children and escape probability `q`.
pub fn eps_from_q(c: f64, children: usize, q: f64) -> f64 {
    1.0 - q * c / (c - children as f64)
}

/// Inverse of [`eps_from_q`].
pub fn q_from_eps(c: f64, children: usize, eps: f64) -> f64 {
    (1.0 - eps) * (c - children as f64) / c
}

/// `1 - exp((1 - delta) x)`.
pub fn f_delta(delta: f64, x: f64) -> f64 {
    1.0 - ((1.0 - delta) * x).exp()
}

/// Whether `f_delta(f_delta(eps)) <= (1 - delta) eps` holds (to 1e-12).
pub fn f_contraction_check(delta: f64, eps: f64) -> bool {
    f_delta(delta, f_delta(delta, eps)) <= (1.0 - delta) * eps + 1e-12
}

/// `e/(e-1) Δ′`, the unique `C` with `ln(C / (C - Δ′)) = 1`.
pub fn critical_c(delta_prime: usize) -> f64 {
    CRITICAL_RATIO * delta_prime as f64
}

/// `ln(C / (C - Δ))`.
pub fn lambda(c: f64, delta_cap: usize) -> f64 {
    (c / (c - delta_cap as f64)).ln()
}

/// Smallest `C` with `ln(C/(C - Δ)) <= 1 - delta`.
pub fn c_for_contraction(delta: f64, delta_cap: usize) -> f64 {
    let a = (1.0 - delta).exp();
    a / (a - 1.0) * delta_cap as f64
}

/// Nonzero period-2 point of `x -> 1 - exp(lambda x)`, if one exists.
///
/// For `lambda <= 1` the origin is the only fixed point of the double map;
/// above it a pair `x* > 0 > g(x*)` appears. The root is found by bisection
/// on `[1e-6, 1]`, lowering the left end for `lambda` just above 1 where the
/// orbit sits close to the origin.
pub fn period2_fixed_point(lambda: f64) -> Option<f64> {
    if !(lambda > 1.0) {
        return None;
    }
    let g = |x: f64| 1.0 - (lambda * x).exp();
    let h = |x: f64| g(g(x)) - x;
    let mut lo = 1e-6;
    while h(lo) <= 0.0 {
        lo /= 10.0;
        if lo < 1e-15 {
            return None;
        }
    }
    // For large lambda, g(g(1)) rounds to 1: the orbit sits at 1 to
    // machine precision.
    let mut hi = 1.0;
    match h(hi) {
        r if r > 0.0 => return None,
        0.0 => return Some(1.0),
        _ => {}
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// `|sum_{i=1..Δ} 1/(C - i) - ln(C/(C - Δ))|`.
pub fn riemann_gap(c: f64, delta_cap: usize) -> Result<f64, RecurrenceError> {
    if c <= delta_cap as f64 + 1.0 {
        return Err(RecurrenceError::CTooSmall { c, delta: delta_cap });
    }
    let sum: f64 = (1..=delta_cap).map(|i| 1.0 / (c - i as f64)).sum();
    Ok((sum - lambda(c, delta_cap)).abs())
}

/// Parameters of the envelope iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceParams {
    pub c: f64,
    pub delta_cap: usize,
    /// Contraction margin in `(0, 1)`; the two-step bounds need
    /// `lambda <= 1 - delta`.
    pub delta: f64,
    pub lambda: f64,
}

impl RecurrenceParams {
    pub fn new(c: f64, delta_cap: usize, delta: f64) -> Result<Self, RecurrenceError> {
        if c <= delta_cap as f64 {
            return Err(RecurrenceError::CTooSmall { c, delta: delta_cap });
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(RecurrenceError::BadDelta(delta));
        }
        Ok(RecurrenceParams {
            c,
            delta_cap,
            delta,
            lambda: lambda(c, delta_cap),
        })
    }

    /// Whether `lambda <= 1 - delta`.
    pub fn contracts(&self) -> bool {
        self.lambda <= 1.0 - self.delta
    }
}

/// Per-level error envelopes, level 0 being the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorProfile {
    pub eps_min: Vec<f64>,
    pub eps_max: Vec<f64>,
    pub levels: usize,
}

/// Iterates the single-level bounds
///
/// ```text
/// eps_min[l+1] = 1 - (1 + 100/C) exp(lambda eps_max[l])
/// eps_max[l+1] = 1 - (1 - 100/C) exp(lambda eps_min[l])
/// ```
///
/// from `eps_max[0] = 1`, `eps_min[0] = -2`, clamping into `[-2, 0]` and
/// `[0, 1]`.
pub fn envelope_iterate(params: &RecurrenceParams, g: usize) -> Result<ErrorProfile, RecurrenceError> {
    let needed = critical_c(params.delta_cap);
    if params.c < needed {
        return Err(RecurrenceError::BelowCriticalThreshold { c: params.c, needed });
    }
    if params.delta_cap < 25 {
        return Err(RecurrenceError::DegreeTooSmall(params.delta_cap));
    }
    let slack = 100.0 / params.c;
    let mut eps_min = Vec::with_capacity(g + 1);
    let mut eps_max = Vec::with_capacity(g + 1);
    eps_min.push(-2.0);
    eps_max.push(1.0);
    for l in 0..g {
        let lo = 1.0 - (1.0 + slack) * (params.lambda * eps_max[l]).exp();
        let hi = 1.0 - (1.0 - slack) * (params.lambda * eps_min[l]).exp();
        eps_min.push(lo.clamp(-2.0, 0.0));
        eps_max.push(hi.clamp(0.0, 1.0));
    }
    Ok(ErrorProfile {
        eps_min,
        eps_max,
        levels: g,
    })
}

/// `f_delta(f_delta(eps_max[l - 2])) + 1000/C`, the two-step bound on
/// `eps_max[l]`; `None` for `l < 2`.
pub fn two_step_bound(params: &RecurrenceParams, profile: &ErrorProfile, level: usize) -> Option<f64> {
    (level >= 2).then(|| {
        f_delta(params.delta, f_delta(params.delta, profile.eps_max[level - 2])) + 1e3 / params.c
    })
}

/// `(1 - 1000/(delta C)) (1 - delta)^(l/2) + 1000/(delta C)` for even `l`.
pub fn induction_bound(params: &RecurrenceParams, level: usize) -> Option<f64> {
    level.is_multiple_of(2).then(|| {
        let tail = 1e3 / (params.delta * params.c);
        (1.0 - tail) * (1.0 - params.delta).powi((level / 2) as i32) + tail
    })
}

/// One row of the envelope report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRow {
    pub level: usize,
    pub eps_min: f64,
    pub eps_max: f64,
    pub two_step_bound: Option<f64>,
    pub induction_bound: Option<f64>,
}

pub fn envelope_report(params: &RecurrenceParams, g: usize) -> Result<Vec<EnvelopeRow>, RecurrenceError> {
    let profile = envelope_iterate(params, g)?;
    Ok((0..=g)
        .map(|level| EnvelopeRow {
            level,
            eps_min: profile.eps_min[level],
            eps_max: profile.eps_max[level],
            two_step_bound: two_step_bound(params, &profile, level),
            induction_bound: induction_bound(params, level),
        })
        .collect())
}

/// Exact per-level errors on the complete tree where every vertex has
/// `branching` children and the bottom vertices start at `boundary_eps`.
/// Entry `l` is the error `l` levels above the bottom.
///
/// All-unmatched boundaries start at `-branching / (C - branching)`;
/// all-matched ones at `1`.
pub fn complete_tree_errors(
    c: f64,
    branching: usize,
    levels: usize,
    boundary_eps: f64,
) -> Result<Vec<f64>, RecurrenceError> {
    let mut out = Vec::with_capacity(levels + 1);
    out.push(boundary_eps);
    let mut children = vec![boundary_eps; branching];
    for _ in 0..levels {
        let eps = eps_step(c, &children)?;
        out.push(eps);
        children.iter_mut().for_each(|x| *x = eps);
    }
    Ok(out)
}

/// Root edge match probability for two complete trees hanging off the edge
/// with top errors `eps_u`, `eps_v`: `(1 - eps_u)(1 - eps_v) / C`.
pub fn root_probability_from_errors(c: f64, eps_u: f64, eps_v: f64) -> f64 {
    (1.0 - eps_u) * (1.0 - eps_v) / c
}
