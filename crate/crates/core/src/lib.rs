//! Synthetic natural-logic NLI data with gold labels, systematicity probes
//! over jabberwocky blocks, and per-block accuracy scoring.

pub mod cli;
pub mod language;
pub mod probes;
pub mod relations;
pub mod sampler;
pub mod scoring;
pub mod semantics;
