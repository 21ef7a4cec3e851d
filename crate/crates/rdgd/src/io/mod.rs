//! File formats: experiment CSV/JSON outputs and the MNIST IDX reader.

pub mod csv;
pub mod idx;
pub mod json;
