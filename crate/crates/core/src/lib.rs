//! Topology-constrained CNOT resynthesis for general circuits via quantum combs.
//!
//! Single-qubit gates are cut out of a circuit, leaving a CNOT-only *comb*
//! whose holes remember where the gates sat. The comb is resynthesised with a
//! comb-aware variant of RowCol ([`combsynth`]) that only ever combines
//! temporal qubits which exist at the same time, and the gates are plugged
//! back in afterwards. [`slicer`] carries the conventional slice-and-route
//! baseline for comparison.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the benchmark
//! harness and the command line live in the `qcomb` companion crate.
//!
//! ```
//! use qcomb_core::{circuit::Circuit, combsynth, topology::Topology};
//!
//! let mut c = Circuit::new(3);
//! c.push_cnot(0, 2).unwrap();
//! c.push_single("h", &[], 2).unwrap();
//! c.push_cnot(2, 1).unwrap();
//!
//! let line = Topology::line(3);
//! let routed = combsynth::route_circuit(&c, &line).unwrap();
//! assert!(routed.cnots().all(|(a, b)| line.has_edge(a, b)));
//! ```

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod circuit;
pub mod comb;
pub mod combsynth;
pub mod gf2;
pub mod random;
pub mod rowcol;
pub mod sim;
pub mod slicer;
pub mod topology;

#[cfg(test)]
mod testutil;

pub use circuit::{Circuit, Gate};
pub use comb::{Comb, PluggingMap};
pub use gf2::BitMatrix;
pub use topology::Topology;
