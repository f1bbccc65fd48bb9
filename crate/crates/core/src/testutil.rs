//! Fixtures shared by the unit tests.

use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::Circuit;
use crate::comb::Hole;
use crate::gf2::BitMatrix;

/// Four-qubit example circuit with single-qubit gates u, v, w, h between
/// CNOT blocks.
pub fn example_circuit() -> Circuit {
    let mut c = Circuit::new(4);
    for (a, b) in [(0, 2), (0, 3), (3, 0), (1, 3)] {
        c.push_cnot(a, b).unwrap();
    }
    c.push_single("v", &[], 1).unwrap();
    c.push_single("u", &[], 2).unwrap();
    for (a, b) in [(0, 1), (2, 1), (1, 0), (3, 2)] {
        c.push_cnot(a, b).unwrap();
    }
    c.push_single("w", &[], 2).unwrap();
    for (a, b) in [(0, 2), (1, 0), (2, 0), (3, 1), (3, 2)] {
        c.push_cnot(a, b).unwrap();
    }
    c.push_single("h", &[], 1).unwrap();
    c
}

pub fn example_holes() -> Vec<Hole> {
    alloc::vec![(1, 4), (2, 6), (6, 7), (4, 5)]
}

pub fn example_matrix() -> BitMatrix {
    BitMatrix::from_rows(&[
        [0, 0, 0, 1, 1, 0, 1, 1],
        [0, 1, 0, 0, 0, 0, 0, 0],
        [1, 0, 1, 0, 0, 0, 0, 0],
        [1, 1, 0, 1, 0, 0, 0, 0],
        [1, 1, 0, 0, 1, 0, 1, 0],
        [0, 0, 0, 0, 0, 1, 0, 0],
        [1, 1, 0, 1, 0, 0, 1, 0],
        [1, 1, 0, 1, 1, 0, 1, 1],
    ])
    .unwrap()
}

/// `m` random CNOTs with `k` single-qubit gates at random positions.
pub fn random_mixed(n: usize, m: usize, k: usize, rng: &mut ChaCha8Rng) -> Circuit {
    let labels = ["a", "b", "c", "d"];
    let mut c = Circuit::new(n);
    let m = if n < 2 { 0 } else { m };
    let mut singles = k;
    let mut cnots = m;
    while singles + cnots > 0 {
        if rng.gen_range(0..singles + cnots) < singles {
            singles -= 1;
            let l = labels[rng.gen_range(0..labels.len())];
            c.push_single(l, &[], rng.gen_range(0..n)).unwrap();
        } else {
            cnots -= 1;
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n)) % n;
            c.push_cnot(a, b).unwrap();
        }
    }
    c
}
