//! Witness trees and the edge matching game.
//!
//! A witness tree is rooted at an edge `e = (0, 1)`. Every other vertex `v`
//! hangs off a parent by its parent edge, which is identified with `v`. Each
//! edge arrives before its parent edge, so the tree is processed from the
//! leaves upward. Boundary edges are leaves whose outcome is chosen by an
//! adversary; all other edges follow the matcher with tree-local degrees:
//! the `i`-th child edge of `a` meets `a` at degree `i - 1` and its child
//! vertex `b` at degree `c_b`, the number of children of `b`.

mod oracle;
mod random;
mod witness;

pub use oracle::{
    adaptive_min_probability, boundary_sensitivity, dp_match_probability, exact_match_probability,
    simulate_game, ADAPTIVE_CAP, ENUMERATION_CAP,
};
pub use random::{random_witness_tree, RandomTreeSpec};
pub use witness::{
    build_witness_tree, witness_equivalence_check, witness_set_random_order, EquivalenceReport,
};

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphError;
use crate::matcher::MatchError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("tree has {edges} edges; this oracle handles at most {cap} (use the dp oracle)")]
    TooLarge { edges: usize, cap: usize },
    #[error("invalid witness tree: {0}")]
    BadTree(String),
    #[error("boundary assignment has {got} decisions for {expected} boundary edges")]
    AssignmentSize { expected: usize, got: usize },
    #[error("C = {0} is too small for this tree")]
    BadC(f64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Color(#[from] crate::color::ColorError),
}

/// One non-root vertex of a witness tree, described by its parent edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeVertex {
    pub parent: usize,
    pub arrival: u64,
    pub boundary: bool,
}

/// A witness tree. Vertices `0` and `1` are the root edge's endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessTree {
    /// Entry `v - 2` describes vertex `v`.
    vertices: Vec<TreeVertex>,
    /// Children of every vertex, sorted by arrival.
    children: Vec<Vec<usize>>,
    /// Edge depth of each vertex's parent edge; root endpoints get 0.
    depth: Vec<usize>,
    /// Non-root vertices in arrival order of their parent edges.
    order: Vec<usize>,
    /// Boundary vertices in arrival order.
    boundary: Vec<usize>,
    /// Original graph edge of each parent edge, when built from a stream.
    source_edges: Option<Vec<usize>>,
    root_source_edge: Option<usize>,
}

/// Fixed outcomes for the boundary edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryAssignment {
    AllUnmatched,
    AllMatched,
    /// One decision per boundary edge, in arrival order; `true` = matched.
    Fixed(Vec<bool>),
}

impl WitnessTree {
    /// Builds a tree from the descriptions of vertices `2, 3, ...`. Parents
    /// must precede their children, arrivals must be distinct, every edge
    /// must arrive before its parent edge, and boundary vertices must be
    /// leaves. The root edge arrives after everything else.
    pub fn new(vertices: Vec<TreeVertex>) -> Result<Self, GameError> {
        let nv = vertices.len() + 2;
        let mut children = vec![Vec::new(); nv];
        let mut depth = vec![0; nv];
        for (k, tv) in vertices.iter().enumerate() {
            let v = k + 2;
            if tv.parent >= v {
                return Err(GameError::BadTree(format!(
                    "vertex {v} has parent {} (parents must have smaller ids)",
                    tv.parent
                )));
            }
            if tv.parent >= 2 {
                let p = &vertices[tv.parent - 2];
                if p.boundary {
                    return Err(GameError::BadTree(format!(
                        "boundary vertex {} has a child {v}",
                        tv.parent
                    )));
                }
                if tv.arrival >= p.arrival {
                    return Err(GameError::BadTree(format!(
                        "edge to {v} arrives at {} but its parent edge arrives at {}",
                        tv.arrival, p.arrival
                    )));
                }
            }
            children[tv.parent].push(v);
            depth[v] = depth[tv.parent] + 1;
        }
        let arrival = |v: usize| vertices[v - 2].arrival;
        for list in children.iter_mut() {
            list.sort_by_key(|&v| arrival(v));
        }
        let mut order: Vec<usize> = (2..nv).collect();
        order.sort_by_key(|&v| arrival(v));
        if order.windows(2).any(|w| arrival(w[0]) == arrival(w[1])) {
            return Err(GameError::BadTree("arrival ranks must be distinct".into()));
        }
        let boundary = order.iter().copied().filter(|&v| vertices[v - 2].boundary).collect();
        Ok(WitnessTree {
            vertices,
            children,
            depth,
            order,
            boundary,
            source_edges: None,
            root_source_edge: None,
        })
    }

    /// The single root edge.
    pub fn single_edge() -> Self {
        Self::new(Vec::new()).expect("empty tree is valid")
    }

    pub(crate) fn with_sources(mut self, root: usize, edges: Vec<usize>) -> Self {
        self.root_source_edge = Some(root);
        self.source_edges = Some(edges);
        self
    }

    /// Number of edges, root included.
    pub fn edge_count(&self) -> usize {
        self.vertices.len() + 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len() + 2
    }

    pub fn vertex(&self, v: usize) -> TreeVertex {
        self.vertices[v - 2]
    }

    pub fn vertices(&self) -> &[TreeVertex] {
        &self.vertices
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// `c_v`, the number of child edges of `v`.
    pub fn child_count(&self, v: usize) -> usize {
        self.children[v].len()
    }

    /// Depth of the edge above `v`: 1 for children of the root endpoints.
    pub fn edge_depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Non-root edges (by child vertex) in arrival order.
    pub fn arrival_order(&self) -> &[usize] {
        &self.order
    }

    /// Boundary edges (by child vertex) in arrival order.
    pub fn boundary_edges(&self) -> &[usize] {
        &self.boundary
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        v >= 2 && self.vertices[v - 2].boundary
    }

    /// Position of `v` among its siblings (0-based), i.e. the tree-local
    /// degree of its parent when its edge arrives.
    pub fn sibling_rank(&self, v: usize) -> usize {
        let p = self.vertices[v - 2].parent;
        self.children[p]
            .iter()
            .position(|&w| w == v)
            .expect("child is listed under its parent")
    }

    /// Maximum vertex degree, counting each vertex's edge upward.
    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count())
            .map(|v| self.child_count(v) + 1)
            .max()
            .unwrap_or(1)
    }

    /// Graph edge behind the root edge, when built from a stream.
    pub fn root_source_edge(&self) -> Option<usize> {
        self.root_source_edge
    }

    /// Graph edge behind the parent edge of `v`, when built from a stream.
    pub fn source_edge(&self, v: usize) -> Option<usize> {
        self.source_edges.as_ref().map(|s| s[v - 2])
    }

    /// Expands `assignment` to one decision per vertex (`false` off the
    /// boundary).
    pub fn decisions(&self, assignment: &BoundaryAssignment) -> Result<Vec<bool>, GameError> {
        let mut out = vec![false; self.vertex_count()];
        match assignment {
            BoundaryAssignment::AllUnmatched => {}
            BoundaryAssignment::AllMatched => {
                for &v in &self.boundary {
                    out[v] = true;
                }
            }
            BoundaryAssignment::Fixed(d) => {
                if d.len() != self.boundary.len() {
                    return Err(GameError::AssignmentSize {
                        expected: self.boundary.len(),
                        got: d.len(),
                    });
                }
                for (&v, &m) in self.boundary.iter().zip(d) {
                    out[v] = m;
                }
            }
        }
        Ok(out)
    }

    /// Renders the tree in the instance format read by [`parse_instance`].
    pub fn to_instance(&self, c: Option<f64>, assignment: &BoundaryAssignment) -> Result<String, GameError> {
        let dec = self.decisions(assignment)?;
        let mut out = String::new();
        if let Some(c) = c {
            let _ = writeln!(out, "c {c}");
        }
        for (k, tv) in self.vertices.iter().enumerate() {
            let v = k + 2;
            let kind = match (tv.boundary, dec[v]) {
                (false, _) => "-",
                (true, false) => "U",
                (true, true) => "M",
            };
            let _ = writeln!(out, "{v} {} {} {kind}", tv.parent, tv.arrival);
        }
        Ok(out)
    }
}

/// A game instance read from text.
#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance {
    pub tree: WitnessTree,
    pub c: Option<f64>,
    pub assignment: BoundaryAssignment,
}

/// Parses the instance format:
///
/// ```text
/// # comment
/// c 5.5                       (optional sampling parameter)
/// vertex parent arrival kind  (one line per vertex 2, 3, ...)
/// ```
///
/// `kind` is `-` for an internal edge, `U` or `M` for a boundary edge left
/// unmatched or matched. The root edge joins vertices 0 and 1.
pub fn parse_instance(text: &str) -> Result<GameInstance, GameError> {
    let mut c = None;
    let mut rows: Vec<(usize, TreeVertex, Option<bool>)> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |message: String| GameError::Parse { line: lineno, message };
        let f: Vec<&str> = body.split_whitespace().collect();
        if f[0] == "c" {
            if f.len() != 2 {
                return Err(err("expected `c <value>`".into()));
            }
            c = Some(f[1].parse::<f64>().map_err(|_| err(format!("bad C value {:?}", f[1])))?);
            continue;
        }
        if f.len() != 4 {
            return Err(err("expected `vertex parent arrival kind`".into()));
        }
        let num = |s: &str| s.parse::<u64>().map_err(|_| err(format!("expected an integer, found {s:?}")));
        let v = num(f[0])? as usize;
        let parent = num(f[1])? as usize;
        let arrival = num(f[2])?;
        let (boundary, decision) = match f[3] {
            "-" => (false, None),
            "U" | "u" => (true, Some(false)),
            "M" | "m" => (true, Some(true)),
            other => return Err(err(format!("kind must be -, U or M, found {other:?}"))),
        };
        rows.push((v, TreeVertex { parent, arrival, boundary }, decision));
    }
    rows.sort_by_key(|r| r.0);
    for (k, r) in rows.iter().enumerate() {
        if r.0 != k + 2 {
            return Err(GameError::Parse {
                line: 0,
                message: format!("vertices must be numbered 2..{} without gaps", rows.len() + 1),
            });
        }
    }
    let tree = WitnessTree::new(rows.iter().map(|r| r.1).collect())?;
    let decisions = tree
        .boundary_edges()
        .iter()
        .map(|&v| rows[v - 2].2.unwrap_or(false))
        .collect();
    Ok(GameInstance {
        tree,
        c,
        assignment: BoundaryAssignment::Fixed(decisions),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tv(parent: usize, arrival: u64, boundary: bool) -> TreeVertex {
        TreeVertex { parent, arrival, boundary }
    }

    #[test]
    fn structure_queries() {
        let t = WitnessTree::new(vec![tv(0, 5, false), tv(0, 2, false), tv(2, 1, true)]).unwrap();
        assert_eq!(t.edge_count(), 4);
        assert_eq!(t.children(0), &[3, 2]);
        assert_eq!(t.sibling_rank(2), 1);
        assert_eq!(t.edge_depth(4), 2);
        assert_eq!(t.arrival_order(), &[4, 3, 2]);
        assert_eq!(t.boundary_edges(), &[4]);
        assert_eq!(t.child_count(2), 1);
    }

    #[test]
    fn rejects_dead_edges_and_bad_boundaries() {
        assert!(WitnessTree::new(vec![tv(0, 1, false), tv(2, 3, false)]).is_err());
        assert!(WitnessTree::new(vec![tv(0, 5, true), tv(2, 3, false)]).is_err());
        assert!(WitnessTree::new(vec![tv(3, 1, false)]).is_err());
        assert!(WitnessTree::new(vec![tv(0, 1, false), tv(1, 1, false)]).is_err());
    }

    #[test]
    fn instance_round_trip() {
        let text = "# sample\nc 7.5\n2 0 4 -\n3 2 1 M\n4 1 2 U\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.c, Some(7.5));
        assert_eq!(inst.assignment, BoundaryAssignment::Fixed(vec![true, false]));
        let again = parse_instance(&inst.tree.to_instance(inst.c, &inst.assignment).unwrap()).unwrap();
        assert_eq!(again, inst);
    }

    #[test]
    fn instance_errors() {
        assert!(matches!(parse_instance("2 0 1 X\n"), Err(GameError::Parse { line: 1, .. })));
        assert!(matches!(parse_instance("3 0 1 -\n"), Err(GameError::Parse { .. })));
        assert!(matches!(parse_instance("c\n"), Err(GameError::Parse { .. })));
    }

    #[test]
    fn assignment_size_is_checked() {
        let t = WitnessTree::new(vec![tv(0, 1, true)]).unwrap();
        assert!(t.decisions(&BoundaryAssignment::Fixed(vec![])).is_err());
        assert_eq!(t.decisions(&BoundaryAssignment::AllMatched).unwrap(), vec![false, false, true]);
    }
}
