//! Witness trees and witness sets of edges in a stream.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{GameError, TreeVertex, WitnessTree};
use crate::color::{TreeColoring, TreeColoringConfig};
use crate::graph::{neighborhood_has_cycle, EdgeStream, GraphError, RandomSource};
use crate::matcher::{MatchOutcome, MatcherState};

/// Witness tree of edge `edge_index` within radius `g`, or `None` if the
/// `g`-neighborhood of the edge contains a cycle.
///
/// An edge is kept if it arrives before every edge above it and is joined
/// to the root through kept edges. Kept edges leaving a vertex at distance
/// `g` become boundary edges.
pub fn build_witness_tree(
    stream: &EdgeStream,
    edge_index: usize,
    g: usize,
) -> Result<Option<WitnessTree>, GameError> {
    let graph = stream.graph();
    if edge_index >= graph.m() {
        return Err(GraphError::EdgeIndexOutOfRange(edge_index).into());
    }
    let e = graph.edge(edge_index);
    if neighborhood_has_cycle(graph, e, g)? {
        return Ok(None);
    }
    let mut vertices = Vec::new();
    let mut sources = Vec::new();
    // (tree id, graph vertex, edge above, its rank, distance)
    let mut queue = VecDeque::new();
    let root_rank = stream.rank(edge_index);
    queue.push_back((0usize, e.u, edge_index, root_rank, 0usize));
    queue.push_back((1usize, e.v, edge_index, root_rank, 0usize));
    while let Some((id, x, above, above_rank, dist)) = queue.pop_front() {
        let mut kids: Vec<(usize, usize, usize)> = graph
            .incident(x)
            .iter()
            .filter(|&&(_, f)| f != above && stream.rank(f) < above_rank)
            .map(|&(y, f)| (stream.rank(f), y, f))
            .collect();
        kids.sort_unstable();
        for (rank, y, f) in kids {
            let child = vertices.len() + 2;
            let boundary = dist == g;
            vertices.push(TreeVertex {
                parent: id,
                arrival: rank as u64,
                boundary,
            });
            sources.push(f);
            if !boundary {
                queue.push_back((child, y, f, rank, dist + 1));
            }
        }
    }
    Ok(Some(WitnessTree::new(vertices)?.with_sources(edge_index, sources)))
}

/// Edges `f` joined to edge `edge_index` by a path whose arrival ranks
/// increase towards it, the edge itself included. Sorted by index.
pub fn witness_set_random_order(stream: &EdgeStream, edge_index: usize) -> Vec<usize> {
    let graph = stream.graph();
    let e = graph.edge(edge_index);
    let mut marked = std::collections::HashSet::from([e.u, e.v]);
    let mut out = vec![edge_index];
    for &f in stream.order()[..stream.rank(edge_index)].iter().rev() {
        let ef = graph.edge(f);
        if marked.contains(&ef.u) || marked.contains(&ef.v) {
            marked.insert(ef.u);
            marked.insert(ef.v);
            out.push(f);
        }
    }
    out.sort_unstable();
    out
}

/// Outcomes of one edge with and without its non-witness edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub edge: usize,
    pub witnesses: usize,
    pub matcher_full: MatchOutcome,
    pub matcher_witness: MatchOutcome,
    pub tree_full: Option<usize>,
    pub tree_witness: Option<usize>,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.matcher_full == self.matcher_witness && self.tree_full == self.tree_witness
    }
}

/// Runs the matcher (parameter `c`) and Tree-Coloring on the full stream
/// and on the witness edges of `edge_index` alone, every edge keeping its
/// own random address, and reports the edge's outcome in each.
pub fn witness_equivalence_check(
    stream: &EdgeStream,
    edge_index: usize,
    src: &RandomSource,
    c: f64,
) -> Result<EquivalenceReport, GameError> {
    let graph = stream.graph();
    let witnesses = witness_set_random_order(stream, edge_index);
    let mut keep = vec![false; graph.m()];
    for &w in &witnesses {
        keep[w] = true;
    }
    let cut = stream.rank(edge_index) + 1;
    let full: Vec<usize> = stream.order()[..cut].to_vec();
    let sub: Vec<usize> = full.iter().copied().filter(|&f| keep[f]).collect();

    let run = |order: &[usize]| -> Result<(MatchOutcome, Option<usize>), GameError> {
        let mut m = MatcherState::new(graph.n(), c);
        let mut tc = TreeColoring::new(graph.n(), TreeColoringConfig::new(graph.delta()));
        let mut outcome = MatchOutcome::RejectedByCoin;
        let mut round = None;
        for &f in order {
            let ef = graph.edge(f);
            let o = m.process_edge(f, ef, src.uniform(0, f as u64))?;
            let r = tc.process(f, ef, src)?;
            if f == edge_index {
                outcome = o;
                round = r;
            }
        }
        Ok((outcome, round))
    };
    let (matcher_full, tree_full) = run(&full)?;
    let (matcher_witness, tree_witness) = run(&sub)?;
    Ok(EquivalenceReport {
        edge: edge_index,
        witnesses: witnesses.len(),
        matcher_full,
        matcher_witness,
        tree_full,
        tree_witness,
    })
}
