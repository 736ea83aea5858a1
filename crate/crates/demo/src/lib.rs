//! Browser bindings. Each export takes plain numbers and returns a JSON
//! string; `www/index.html` draws the results.

// `!(x > y)` is how NaN gets rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::Serialize;
use wasm_bindgen::prelude::*;

use edgecolor::color::{run_coloring, ColoringState};
use edgecolor::graph::{generate, GeneratorSpec, GraphKind};
use edgecolor::harness::Strategy;
use edgecolor::recurrence::{complete_tree_errors, period2_fixed_point, root_probability_from_errors};
use edgecolor::RandomSource;

#[derive(Debug, Serialize)]
pub struct Trajectories {
    pub c: f64,
    pub branching: usize,
    /// Error `l` levels above real leaves (no boundary).
    pub leaves: Vec<f64>,
    /// Error `l` levels above the boundary, boundary left unmatched.
    pub unmatched: Vec<f64>,
    /// Same with the boundary matched.
    pub matched: Vec<f64>,
    /// Root edge probability for the two boundaries, and `1/C`.
    pub root_unmatched: f64,
    pub root_matched: f64,
    pub one_over_c: f64,
}

/// Per-level errors on the complete tree of the given branching factor.
pub fn trajectories(c: f64, branching: usize, levels: usize) -> Result<Trajectories, String> {
    if !(c > branching as f64 + 1.0) {
        return Err(format!("C must exceed branching + 1 = {}", branching + 1));
    }
    if levels > 500 {
        return Err("at most 500 levels".into());
    }
    let b = branching as f64;
    let leaves = complete_tree_errors(c, branching, levels, 0.0).map_err(|e| e.to_string())?;
    let unmatched = complete_tree_errors(c, branching, levels, -b / (c - b)).map_err(|e| e.to_string())?;
    let matched = complete_tree_errors(c, branching, levels, 1.0).map_err(|e| e.to_string())?;
    let top = |v: &[f64]| *v.last().expect("levels + 1 entries");
    Ok(Trajectories {
        c,
        branching,
        root_unmatched: root_probability_from_errors(c, top(&unmatched), top(&unmatched)),
        root_matched: root_probability_from_errors(c, top(&matched), top(&matched)),
        one_over_c: 1.0 / c,
        leaves,
        unmatched,
        matched,
    })
}

#[derive(Debug, Serialize)]
pub struct CurvePoint {
    pub lambda: f64,
    /// Positive period-2 point of `x -> 1 - exp(lambda x)`, if any.
    pub root: Option<f64>,
    /// Its image under the map.
    pub partner: Option<f64>,
}

pub fn period2_curve(lo: f64, hi: f64, steps: usize) -> Result<Vec<CurvePoint>, String> {
    if !(lo > 0.0 && hi > lo) || !(2..=10_000).contains(&steps) {
        return Err("need 0 < lo < hi and 2 <= steps <= 10000".into());
    }
    Ok((0..steps)
        .map(|k| {
            let lambda = lo + (hi - lo) * k as f64 / (steps - 1) as f64;
            let root = period2_fixed_point(lambda);
            CurvePoint {
                lambda,
                root,
                partner: root.map(|x| 1.0 - (lambda * x).exp()),
            }
        })
        .collect())
}

#[derive(Debug, Serialize)]
pub struct ColoringView {
    pub strategy: String,
    pub n: usize,
    pub m: usize,
    pub delta: usize,
    pub colors_used: usize,
    pub uncolored: usize,
    pub reserve_edges: usize,
    /// Edges per color id.
    pub histogram: Vec<usize>,
}

fn strategy(name: &str) -> Result<Strategy, String> {
    Ok(match name {
        "greedy" => Strategy::Greedy,
        "cascade" => Strategy::Cascade {
            alpha: 1.0,
            beta: 4.0,
            delta_prime: 32,
            margin: 0.05,
        },
        "tree-coloring" => Strategy::TreeColoring,
        "random-order" => Strategy::RandomOrderPipeline { delta_prime: None },
        other => return Err(format!("unknown strategy {other:?}")),
    })
}

/// Colors a shuffled random `d`-regular graph on `n` vertices.
pub fn color_regular(name: &str, n: usize, d: usize, seed: u64) -> Result<ColoringView, String> {
    if n > 20_000 || d > 200 {
        return Err("keep n <= 20000 and d <= 200 in the browser".into());
    }
    let stream = generate(&GeneratorSpec::new(GraphKind::RandomRegular { d }, n).shuffled(), seed)
        .map_err(|e| e.to_string())?;
    let g = stream.graph();
    let s = strategy(name)?;
    let mut colorer = s
        .colorer(g.n(), g.delta())
        .map_err(|e| e.to_string())?
        .ok_or("not a coloring strategy")?;
    let state: ColoringState =
        run_coloring(&stream, colorer.as_mut(), &RandomSource::new(seed)).map_err(|e| e.to_string())?;
    let summary = state.summary();
    let mut histogram = vec![0; state.max_color().map_or(0, |c| c + 1)];
    for c in (0..g.m()).filter_map(|i| state.color(i)) {
        histogram[c] += 1;
    }
    Ok(ColoringView {
        strategy: s.name().to_string(),
        n: g.n(),
        m: g.m(),
        delta: g.delta(),
        colors_used: summary.colors_used,
        uncolored: summary.uncolored,
        reserve_edges: summary.reserve_edges,
        histogram,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.map(|v| serde_json::to_string(&v).expect("views serialize"))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = treeErrors)]
pub fn tree_errors_js(c: f64, branching: usize, levels: usize) -> Result<String, JsValue> {
    to_js(trajectories(c, branching, levels))
}

#[wasm_bindgen(js_name = period2Curve)]
pub fn period2_curve_js(lo: f64, hi: f64, steps: usize) -> Result<String, JsValue> {
    to_js(period2_curve(lo, hi, steps))
}

#[wasm_bindgen(js_name = colorRegular)]
pub fn color_regular_js(strategy: &str, n: usize, d: usize, seed: u32) -> Result<String, JsValue> {
    to_js(color_regular(strategy, n, d, seed as u64))
}
