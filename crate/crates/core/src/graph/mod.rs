//! Graphs, arrival streams, generators and per-edge addressed randomness.
//!
//! Vertices are dense ids `0..n`. A [`Graph`] is immutable once built and
//! keeps an adjacency index so that per-vertex scans are cheap; an
//! [`EdgeStream`] pairs a graph with the order in which its edges arrive.

mod cycle;
mod generate;
mod io;
mod random;

use std::sync::Arc;

use thiserror::Error;

pub use cycle::neighborhood_has_cycle;
pub use generate::{generate, GeneratorSpec, GraphKind, OrderMode};
pub use io::{emit_stream, parse_stream, read_stream, write_stream};
pub use random::{uniform_draw, RandomSource};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("parallel edge between {0} and {1}")]
    ParallelEdge(usize, usize),
    #[error("vertex {vertex} has degree {degree}, above the declared maximum {delta}")]
    DegreeExceeded {
        vertex: usize,
        degree: usize,
        delta: usize,
    },
    #[error("declared maximum degree must be at least 1")]
    ZeroDelta,
    #[error("arrival order is not a permutation of 0..{0}")]
    BadOrder(usize),
    #[error("edge ({0}, {1}) is not in the graph")]
    MissingEdge(usize, usize),
    #[error("edge index {0} out of range")]
    EdgeIndexOutOfRange(usize),
    #[error("infeasible generator spec: {0}")]
    Infeasible(String),
    #[error("stream parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

/// An undirected edge between two distinct vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
}

impl Edge {
    pub fn new(u: usize, v: usize) -> Self {
        Edge { u, v }
    }

    /// Endpoints with the smaller id first.
    pub fn normalized(self) -> (usize, usize) {
        if self.u <= self.v {
            (self.u, self.v)
        } else {
            (self.v, self.u)
        }
    }

    pub fn touches(self, w: usize) -> bool {
        self.u == w || self.v == w
    }

    pub fn other(self, w: usize) -> usize {
        if self.u == w {
            self.v
        } else {
            self.u
        }
    }

    pub fn shares_vertex(self, other: Edge) -> bool {
        self.touches(other.u) || self.touches(other.v)
    }
}

impl From<(usize, usize)> for Edge {
    fn from((u, v): (usize, usize)) -> Self {
        Edge { u, v }
    }
}

/// A simple undirected graph with a declared maximum degree.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    delta: usize,
    /// `adj[w]` lists `(neighbor, edge index)` pairs in edge-index order.
    adj: Vec<Vec<(usize, usize)>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.delta == other.delta && self.edges == other.edges
    }
}

impl Graph {
    /// Builds a graph, rejecting loops, parallel edges and degree overflow.
    pub fn new(n: usize, edges: Vec<Edge>, delta: usize) -> Result<Self, GraphError> {
        Self::build(n, edges, delta, false)
    }

    /// Like [`Graph::new`] but tolerates parallel edges.
    pub fn new_multigraph(n: usize, edges: Vec<Edge>, delta: usize) -> Result<Self, GraphError> {
        Self::build(n, edges, delta, true)
    }

    /// Builds a graph whose declared maximum degree is its observed one
    /// (at least 1).
    pub fn with_observed_delta(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut degree = vec![0usize; n];
        for e in &edges {
            for w in [e.u, e.v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
                degree[w] += 1;
            }
        }
        let delta = degree.iter().copied().max().unwrap_or(0).max(1);
        Self::new(n, edges, delta)
    }

    fn build(
        n: usize,
        edges: Vec<Edge>,
        delta: usize,
        allow_parallel: bool,
    ) -> Result<Self, GraphError> {
        if delta == 0 {
            return Err(GraphError::ZeroDelta);
        }
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for (idx, e) in edges.iter().enumerate() {
            for w in [e.u, e.v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop(e.u));
            }
            if !allow_parallel && !seen.insert(e.normalized()) {
                let (a, b) = e.normalized();
                return Err(GraphError::ParallelEdge(a, b));
            }
            adj[e.u].push((e.v, idx));
            adj[e.v].push((e.u, idx));
        }
        for (vertex, list) in adj.iter().enumerate() {
            if list.len() > delta {
                return Err(GraphError::DegreeExceeded {
                    vertex,
                    degree: list.len(),
                    delta,
                });
            }
        }
        Ok(Graph {
            n,
            edges,
            delta,
            adj,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> Edge {
        self.edges[idx]
    }

    pub fn degree(&self, w: usize) -> usize {
        self.adj[w].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `(neighbor, edge index)` pairs incident to `w`.
    pub fn incident(&self, w: usize) -> &[(usize, usize)] {
        &self.adj[w]
    }

    /// Index of the edge joining `a` and `b`, if present.
    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        if a >= self.n || b >= self.n {
            return None;
        }
        let (scan, target) = if self.adj[a].len() <= self.adj[b].len() {
            (a, b)
        } else {
            (b, a)
        };
        self.adj[scan]
            .iter()
            .find(|&&(w, _)| w == target)
            .map(|&(_, idx)| idx)
    }
}

/// A graph together with the order in which its edges arrive.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeStream {
    graph: Arc<Graph>,
    order: Vec<usize>,
    rank: Vec<usize>,
}

impl EdgeStream {
    pub fn new(graph: Graph, order: Vec<usize>) -> Result<Self, GraphError> {
        Self::from_shared(Arc::new(graph), order)
    }

    pub fn from_shared(graph: Arc<Graph>, order: Vec<usize>) -> Result<Self, GraphError> {
        let m = graph.m();
        if order.len() != m {
            return Err(GraphError::BadOrder(m));
        }
        let mut rank = vec![usize::MAX; m];
        for (pos, &idx) in order.iter().enumerate() {
            if idx >= m || rank[idx] != usize::MAX {
                return Err(GraphError::BadOrder(m));
            }
            rank[idx] = pos;
        }
        Ok(EdgeStream { graph, order, rank })
    }

    /// Edges arrive in index order.
    pub fn in_index_order(graph: Graph) -> Self {
        let order: Vec<usize> = (0..graph.m()).collect();
        let rank = order.clone();
        EdgeStream {
            graph: Arc::new(graph),
            order,
            rank,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn shared_graph(&self) -> Arc<Graph> {
        Arc::clone(&self.graph)
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Arrival position of edge `idx` (0 for the first arrival).
    pub fn rank(&self, idx: usize) -> usize {
        self.rank[idx]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `(edge index, edge)` pairs in arrival order.
    pub fn arrivals(&self) -> impl ExactSizeIterator<Item = (usize, Edge)> + '_ {
        self.order.iter().map(move |&idx| (idx, self.graph.edge(idx)))
    }

    /// The edges in arrival order.
    pub fn arrival_edges(&self) -> Vec<Edge> {
        self.arrivals().map(|(_, e)| e).collect()
    }

    /// The sub-stream consisting of the given edges, keeping their relative
    /// order. Returned alongside the map from new to original edge index.
    pub fn restrict(&self, keep: &[bool]) -> (EdgeStream, Vec<usize>) {
        let mut original = Vec::new();
        let mut edges = Vec::new();
        for (idx, e) in self.arrivals() {
            if keep[idx] {
                original.push(idx);
                edges.push(e);
            }
        }
        let graph = Graph::new(self.graph.n(), edges, self.graph.delta())
            .expect("a subgraph of a valid graph is valid");
        (EdgeStream::in_index_order(graph), original)
    }
}
