//! Frontier exploration for graph SLAM, ranking candidate goals by the
//! D-optimality of the predicted weighted pose-graph.

// Negated comparisons are used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod control;
pub mod error;
pub mod frontend;
pub mod geometry;
pub mod graph;
pub mod graph_io;
pub mod grid;
pub mod hallucination;
pub mod info;
pub mod mapping;
pub mod optimality;
pub mod oracle;
pub mod planning;
pub mod world;
pub mod worlds;

pub use error::{Error, Result};
