//! Design-space exploration for superconducting (RQL) double-SHA-256 mining engines.
//!
//! Build gate-level netlists of pipeline stages, insert JTLs, cost them in JJs,
//! estimate timing/power/efficiency, simulate the pipeline bit-exactly and study
//! fault tolerance. See `examples/` for one runnable program per capability.

pub mod adders;
pub mod cell;
pub mod cost;
pub mod engine;
pub mod error;
pub mod fault;
pub mod jtl;
pub mod netlist;
pub mod report;
pub mod sha;
pub mod sim;

pub use error::{Error, Result};
