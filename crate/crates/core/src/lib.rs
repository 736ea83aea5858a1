//! Online edge coloring by repeated online matching on subsampled, locally
//! treelike graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: graphs, arrival streams, generators, addressed randomness,
//!   neighborhood cycle detection and the text stream format.
//! * [`matcher`]: the online matching rule that accepts an arriving edge
//!   `(u, v)` with probability `C / ((C - d_u)(C - d_v))`.
//! * [`sparsify`]: online subsampling to a target degree and the
//!   random-order split into bounded-degree parts.
//! * [`color`]: greedy, the matching cascade, tree coloring, the
//!   random-order pipeline and the blank-with-probability strategy.
//! * [`recurrence`]: tree recurrences, error envelopes, the critical
//!   threshold and parameter planning.
//! * [`game`]: witness trees and exact oracles for the edge matching game.
//! * [`harness`]: experiments, statistics, verification suites and reports.

// `!(x > y)` is how NaN gets rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod color;
pub mod game;
pub mod graph;
pub mod harness;
pub mod matcher;
pub mod recurrence;
pub mod sparsify;

pub use graph::{Edge, EdgeStream, Graph, GraphError, RandomSource};
