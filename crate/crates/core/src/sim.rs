//! Dense unitary simulation for small circuits, used as an equivalence oracle.
//!
//! Basis states are little-endian: qubit 0 is the least significant bit of
//! the basis index.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::circuit::{Circuit, Gate};

pub const MAX_SIM_QUBITS: usize = 12;

const UNITARY_TOL: f64 = 1e-12;

/// Default acceptance threshold for [`equivalent_up_to_phase`].
pub const EQUIVALENCE_TOL: f64 = 1e-9;

pub type Mat2 = [[Complex64; 2]; 2];

/// Concrete matrices for gate labels. Entries here take precedence over the
/// builtin gate set.
pub type Bindings = BTreeMap<String, Mat2>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("no binding for gate label `{0}`")]
    MissingBinding(String),
    #[error("binding for `{0}` is not unitary")]
    NotUnitary(String),
    #[error("{0} qubits exceeds the simulator cap of {MAX_SIM_QUBITS}")]
    TooManyQubits(usize),
    #[error("circuits act on {0} and {1} qubits")]
    SizeMismatch(usize, usize),
}

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cis(theta: f64) -> Complex64 {
    c(libm::cos(theta), libm::sin(theta))
}

/// Matrix for a label from the builtin set `{h, x, z, s, t, rz, rx, u}`.
pub fn builtin_gate(label: &str, params: &[f64]) -> Option<Mat2> {
    let r = core::f64::consts::FRAC_1_SQRT_2;
    let m = match (label, params) {
        ("h", []) => [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]],
        ("x", []) => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        ("z", []) => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
        ("s", []) => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]],
        ("t", []) => [
            [c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), cis(core::f64::consts::FRAC_PI_4)],
        ],
        ("rz", [theta]) => [
            [cis(-theta / 2.0), c(0.0, 0.0)],
            [c(0.0, 0.0), cis(theta / 2.0)],
        ],
        ("rx", [theta]) => {
            let (co, si) = (libm::cos(theta / 2.0), libm::sin(theta / 2.0));
            [[c(co, 0.0), c(0.0, -si)], [c(0.0, -si), c(co, 0.0)]]
        }
        ("u", [theta, phi, lambda]) => {
            let (co, si) = (libm::cos(theta / 2.0), libm::sin(theta / 2.0));
            [
                [c(co, 0.0), -cis(*lambda) * si],
                [cis(*phi) * si, cis(phi + lambda) * co],
            ]
        }
        _ => return None,
    };
    Some(m)
}

pub fn is_unitary(m: &Mat2, tol: f64) -> bool {
    for i in 0..2 {
        for j in 0..2 {
            let dot: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
            let expected = if i == j { 1.0 } else { 0.0 };
            if (dot - c(expected, 0.0)).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// A random single-qubit unitary (random `u` angles times a random phase).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let tau = core::f64::consts::TAU;
    // arccos of a uniform variate gives Haar-distributed theta
    let theta = libm::acos(1.0 - 2.0 * rng.gen::<f64>());
    let phi = rng.gen::<f64>() * tau;
    let lambda = rng.gen::<f64>() * tau;
    let phase = cis(rng.gen::<f64>() * tau);
    let u = builtin_gate("u", &[theta, phi, lambda]).expect("u is builtin");
    [
        [phase * u[0][0], phase * u[0][1]],
        [phase * u[1][0], phase * u[1][1]],
    ]
}

/// A dense `2^n x 2^n` unitary, stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    n_qubits: usize,
    data: Vec<Complex64>,
}

impl Unitary {
    pub fn identity(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut data = vec![c(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = c(1.0, 0.0);
        }
        Unitary { n_qubits, data }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Amplitude `<row|U|col>`.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[col * self.dim() + row]
    }

    pub fn column(&self, col: usize) -> &[Complex64] {
        let d = self.dim();
        &self.data[col * d..(col + 1) * d]
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let d = self.dim();
        let (cm, tm) = (1usize << control, 1usize << target);
        for col in self.data.chunks_mut(d) {
            for i in 0..d {
                if i & cm != 0 && i & tm == 0 {
                    col.swap(i, i | tm);
                }
            }
        }
    }

    fn apply_single(&mut self, m: &Mat2, qubit: usize) {
        let d = self.dim();
        let qm = 1usize << qubit;
        for col in self.data.chunks_mut(d) {
            for i in 0..d {
                if i & qm == 0 {
                    let (a, b) = (col[i], col[i | qm]);
                    col[i] = m[0][0] * a + m[0][1] * b;
                    col[i | qm] = m[1][0] * a + m[1][1] * b;
                }
            }
        }
    }
}

/// Resolves every single-qubit gate of `c` to a matrix.
fn resolve(c: &Circuit, bindings: &Bindings) -> Result<Vec<Option<Mat2>>, SimError> {
    for (label, m) in bindings {
        if !is_unitary(m, UNITARY_TOL) {
            return Err(SimError::NotUnitary(label.clone()));
        }
    }
    c.gates()
        .iter()
        .map(|g| match g {
            Gate::Cnot { .. } => Ok(None),
            Gate::Single { label, params, .. } => bindings
                .get(label)
                .copied()
                .or_else(|| builtin_gate(label, params))
                .map(Some)
                .ok_or_else(|| SimError::MissingBinding(label.clone())),
        })
        .collect()
}

/// The full unitary of `c`.
pub fn simulate_unitary(c: &Circuit, bindings: &Bindings) -> Result<Unitary, SimError> {
    if c.n_qubits() > MAX_SIM_QUBITS {
        return Err(SimError::TooManyQubits(c.n_qubits()));
    }
    let mats = resolve(c, bindings)?;
    let mut u = Unitary::identity(c.n_qubits());
    for (g, m) in c.gates().iter().zip(mats) {
        match (g, m) {
            (Gate::Cnot { control, target }, _) => u.apply_cnot(*control, *target),
            (Gate::Single { qubit, .. }, Some(m)) => u.apply_single(&m, *qubit),
            (Gate::Single { .. }, None) => unreachable!("resolved above"),
        }
    }
    Ok(u)
}

/// `|tr(A^dagger B)| / 2^n`; equals 1 exactly when `A` and `B` agree up to a
/// global phase.
pub fn trace_overlap(a: &Unitary, b: &Unitary) -> Result<f64, SimError> {
    if a.n_qubits != b.n_qubits {
        return Err(SimError::SizeMismatch(a.n_qubits, b.n_qubits));
    }
    let tr: Complex64 = a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum();
    Ok(tr.norm() / a.dim() as f64)
}

/// Simulates both circuits and compares them up to global phase.
pub fn equivalent_up_to_phase(
    a: &Circuit,
    b: &Circuit,
    bindings: &Bindings,
    tol: f64,
) -> Result<bool, SimError> {
    if a.n_qubits() != b.n_qubits() {
        return Err(SimError::SizeMismatch(a.n_qubits(), b.n_qubits()));
    }
    let ua = simulate_unitary(a, bindings)?;
    let ub = simulate_unitary(b, bindings)?;
    Ok(trace_overlap(&ua, &ub)? >= 1.0 - tol)
}

/// Binds a fresh random unitary to every label in `c` that has no builtin
/// meaning (or every label, when `all` is set).
pub fn random_bindings<R: Rng + ?Sized>(c: &Circuit, all: bool, rng: &mut R) -> Bindings {
    let mut b = Bindings::new();
    for g in c.gates() {
        if let Gate::Single { label, params, .. } = g {
            if b.contains_key(label) || (!all && builtin_gate(label, params).is_some()) {
                continue;
            }
            b.insert(label.clone(), random_unitary(rng));
        }
    }
    b
}
