//! File formats, the benchmark harness and the command line for
//! [`qcomb_core`].

pub mod bench;
pub mod combio;
pub mod qasm;
pub mod topo;

pub use qcomb_core as core;
