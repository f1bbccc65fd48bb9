//! Seeded random benchmark circuits and the CNOT-overhead metric.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::{Circuit, Gate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RandomError {
    #[error("need at least 2 qubits, got {0}")]
    TooFewQubits(usize),
    #[error("proportion must lie in [0, 1]")]
    BadProportion,
}

/// Number of single-qubit gates for a given CNOT count.
pub fn single_count(n_cnots: usize, proportion: f64) -> usize {
    // the epsilon keeps e.g. 0.15 * 20 from flooring to 2
    libm::floor(proportion * n_cnots as f64 + 1e-9) as usize
}

/// `n_cnots` CNOTs on uniformly random distinct (control, target) pairs, with
/// `floor(proportion * n_cnots)` opaque single-qubit gates `u0, u1, ...`
/// inserted at uniformly random positions on uniformly random qubits.
pub fn random_circuit(
    n_qubits: usize,
    n_cnots: usize,
    proportion: f64,
    seed: u64,
) -> Result<Circuit, RandomError> {
    if n_qubits < 2 {
        return Err(RandomError::TooFewQubits(n_qubits));
    }
    if !(0.0..=1.0).contains(&proportion) {
        return Err(RandomError::BadProportion);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gates: Vec<Gate> = (0..n_cnots)
        .map(|_| {
            let control = rng.gen_range(0..n_qubits);
            let mut target = rng.gen_range(0..n_qubits - 1);
            if target >= control {
                target += 1;
            }
            Gate::cnot(control, target)
        })
        .collect();
    for i in 0..single_count(n_cnots, proportion) {
        let at = rng.gen_range(0..=gates.len());
        let q = rng.gen_range(0..n_qubits);
        gates.insert(at, Gate::single(format!("u{i}"), &[], q));
    }
    Ok(Circuit::from_gates(n_qubits, gates).expect("indices are in range"))
}

/// `100 * (out - in) / in`; negative when routing shrinks the circuit.
pub fn overhead_percent(n_in: usize, n_out: usize) -> f64 {
    if n_in == 0 {
        return if n_out == 0 { 0.0 } else { f64::INFINITY };
    }
    100.0 * (n_out as f64 - n_in as f64) / n_in as f64
}
