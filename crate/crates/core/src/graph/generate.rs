use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Edge, EdgeStream, Graph, GraphError};

/// Graph family produced by [`generate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum GraphKind {
    /// Uniform-ish simple `d`-regular graph (pairing model with
    /// Steger–Wormald style incremental pairing).
    RandomRegular { d: usize },
    /// Random tree. Without a cap this is a uniform labeled tree (Prüfer
    /// decoding); with `max_degree` each new vertex attaches to a uniformly
    /// random vertex that still has room.
    RandomTree { max_degree: Option<usize> },
    /// Complete `d`-ary tree of the given depth; ignores `n`.
    CompleteTree { d: usize, depth: usize },
    Path,
    Star,
    ErdosRenyi { p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderMode {
    #[default]
    AsGenerated,
    UniformlyRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GraphKind,
    pub n: usize,
    #[serde(default)]
    pub order: OrderMode,
}

impl GeneratorSpec {
    pub fn new(kind: GraphKind, n: usize) -> Self {
        GeneratorSpec {
            kind,
            n,
            order: OrderMode::AsGenerated,
        }
    }

    pub fn shuffled(mut self) -> Self {
        self.order = OrderMode::UniformlyRandom;
        self
    }
}

const ORDER_STREAM: u64 = 0x006f_7264_6572;

/// Builds the graph described by `spec` and its arrival order.
pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<EdgeStream, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = match spec.kind {
        GraphKind::RandomRegular { d } => random_regular(spec.n, d, &mut rng)?,
        GraphKind::RandomTree { max_degree } => random_tree(spec.n, max_degree, &mut rng)?,
        GraphKind::CompleteTree { d, depth } => complete_tree(d, depth)?,
        GraphKind::Path => path(spec.n)?,
        GraphKind::Star => star(spec.n)?,
        GraphKind::ErdosRenyi { p } => erdos_renyi(spec.n, p, &mut rng)?,
    };
    let mut order: Vec<usize> = (0..graph.m()).collect();
    if spec.order == OrderMode::UniformlyRandom {
        let mut order_rng = ChaCha8Rng::seed_from_u64(seed);
        order_rng.set_stream(ORDER_STREAM);
        order.shuffle(&mut order_rng);
    }
    EdgeStream::new(graph, order)
}

fn infeasible(msg: impl Into<String>) -> GraphError {
    GraphError::Infeasible(msg.into())
}

fn random_regular(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<Graph, GraphError> {
    if d == 0 {
        return Err(infeasible("random-regular needs d >= 1"));
    }
    if d >= n {
        return Err(infeasible(format!(
            "random-regular needs d < n (got d={d}, n={n})"
        )));
    }
    if !(n * d).is_multiple_of(2) {
        return Err(infeasible(format!(
            "random-regular needs n*d even (got n={n}, d={d})"
        )));
    }
    const MAX_RESTARTS: usize = 1000;
    for _ in 0..MAX_RESTARTS {
        if let Some(edges) = try_pairing(n, d, rng) {
            return Graph::new(n, edges, d);
        }
    }
    Err(infeasible(format!(
        "random-regular pairing did not converge for n={n}, d={d}"
    )))
}

/// One attempt at pairing the `n*d` points into a simple graph. Random pairs
/// of open points are drawn and rejected if they would create a loop or a
/// parallel edge; the attempt is abandoned when no valid pair remains.
fn try_pairing(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Edge>> {
    let mut points: Vec<usize> = (0..n).flat_map(|w| std::iter::repeat_n(w, d)).collect();
    let mut adjacent: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
    let mut edges = Vec::with_capacity(n * d / 2);
    let mut failures = 0usize;
    while !points.is_empty() {
        let i = rng.random_range(0..points.len());
        let j = rng.random_range(0..points.len());
        let (a, b) = (points[i], points[j]);
        if i != j && a != b && !adjacent[a].contains(&b) {
            adjacent[a].push(b);
            adjacent[b].push(a);
            edges.push(Edge::new(a.min(b), a.max(b)));
            let (hi, lo) = if i > j { (i, j) } else { (j, i) };
            points.swap_remove(hi);
            points.swap_remove(lo);
            failures = 0;
            continue;
        }
        failures += 1;
        if failures > 64 + 4 * points.len() && !has_valid_pair(&points, &adjacent) {
            return None;
        }
    }
    Some(edges)
}

fn has_valid_pair(points: &[usize], adjacent: &[Vec<usize>]) -> bool {
    let mut open: Vec<usize> = points.to_vec();
    open.sort_unstable();
    open.dedup();
    open.iter().enumerate().any(|(k, &a)| {
        open[k + 1..]
            .iter()
            .any(|&b| !adjacent[a].contains(&b))
    })
}

fn random_tree(
    n: usize,
    max_degree: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(infeasible("random-tree needs n >= 2"));
    }
    let edges = match max_degree {
        None => prufer_tree(n, rng),
        Some(cap) => {
            if cap < 2 && n > 2 {
                return Err(infeasible("random-tree with n > 2 needs max_degree >= 2"));
            }
            capped_attachment_tree(n, cap.max(1), rng)
        }
    };
    Graph::with_observed_delta(n, edges)
}

fn prufer_tree(n: usize, rng: &mut ChaCha8Rng) -> Vec<Edge> {
    if n == 2 {
        return vec![Edge::new(0, 1)];
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> =
        (0..n).filter(|&w| degree[w] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in &code {
        let leaf = *leaves.iter().next().expect("a tree code always has a leaf");
        leaves.remove(&leaf);
        edges.push(Edge::new(leaf.min(c), leaf.max(c)));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.insert(c);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push(Edge::new(rest[0], rest[1]));
    edges
}

fn capped_attachment_tree(n: usize, cap: usize, rng: &mut ChaCha8Rng) -> Vec<Edge> {
    let mut degree = vec![0usize; n];
    let mut open: Vec<usize> = vec![0];
    let mut edges = Vec::with_capacity(n - 1);
    for w in 1..n {
        let k = rng.random_range(0..open.len());
        let parent = open[k];
        edges.push(Edge::new(parent, w));
        degree[parent] += 1;
        degree[w] = 1;
        if degree[parent] >= cap {
            open.swap_remove(k);
        }
        if cap > 1 {
            open.push(w);
        }
    }
    edges
}

fn complete_tree(d: usize, depth: usize) -> Result<Graph, GraphError> {
    if d == 0 {
        return Err(infeasible("complete tree needs d >= 1"));
    }
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    let mut next_id = 1usize;
    for _ in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * d);
        for &parent in &frontier {
            for _ in 0..d {
                edges.push(Edge::new(parent, next_id));
                next.push(next_id);
                next_id += 1;
            }
        }
        frontier = next;
    }
    let delta = if depth == 0 {
        1
    } else if depth == 1 {
        d
    } else {
        d + 1
    };
    Graph::new(next_id, edges, delta)
}

fn path(n: usize) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(infeasible("path needs n >= 2"));
    }
    let edges = (0..n - 1).map(|i| Edge::new(i, i + 1)).collect();
    Graph::new(n, edges, if n == 2 { 1 } else { 2 })
}

fn star(n: usize) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(infeasible("star needs n >= 2"));
    }
    let edges = (1..n).map(|i| Edge::new(0, i)).collect();
    Graph::new(n, edges, n - 1)
}

fn erdos_renyi(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(infeasible(format!("erdos-renyi needs p in [0,1] (got {p})")));
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random::<f64>() < p {
                edges.push(Edge::new(a, b));
            }
        }
    }
    Graph::with_observed_delta(n, edges)
}
