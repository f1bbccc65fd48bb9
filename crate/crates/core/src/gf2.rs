//! Dense linear algebra over F2.
//!
//! Rows are bit-packed into `u64` words; the public API is index based so the
//! packing never leaks. Row `t` of a parity matrix lists which input qubits
//! are summed into output qubit `t`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("row index {index} out of bounds for {n_rows} rows")]
    RowOutOfBounds { index: usize, n_rows: usize },
    #[error("row operation source and destination are both {0}")]
    SameRow(usize),
    #[error("matrix is {n_rows}x{n_cols}, expected a square matrix")]
    NotSquare { n_rows: usize, n_cols: usize },
    #[error("vector length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("target vector is not in the span of the given rows")]
    NoSolution,
}

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A packed vector over F2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0; words_for(len)],
            len,
        }
    }

    /// The unit vector with a single 1 at `index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        (self.words[index / WORD] >> (index % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        let mask = 1u64 << (index % WORD);
        if value {
            self.words[index / WORD] |= mask;
        } else {
            self.words[index / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Lowest set index, if any.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Dense `n_rows x n_cols` matrix over F2. Dimensions never change after
/// construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n_cols: usize,
    rows: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        BitMatrix {
            n_cols,
            rows: vec![BitVec::zeros(n_cols); n_rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix {
            n_cols: n,
            rows: (0..n).map(|i| BitVec::unit(n, i)).collect(),
        }
    }

    /// Builds a matrix from 0/1 rows. Every row must have the same length.
    ///
    /// ```
    /// use qcomb_core::gf2::BitMatrix;
    /// let m = BitMatrix::from_rows(&[[1, 0], [1, 1]]).unwrap();
    /// assert!(m.get(1, 0));
    /// ```
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, Gf2Error> {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut out = Vec::with_capacity(rows.len());
        for r in rows {
            let r = r.as_ref();
            if r.len() != n_cols {
                return Err(Gf2Error::LengthMismatch {
                    expected: n_cols,
                    got: r.len(),
                });
            }
            out.push(BitVec::from_bits(r.iter().map(|&b| b & 1 == 1)));
        }
        Ok(BitMatrix { n_cols, rows: out })
    }

    pub fn from_bitvecs(n_cols: usize, rows: Vec<BitVec>) -> Result<Self, Gf2Error> {
        if let Some(r) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Gf2Error::LengthMismatch {
                expected: n_cols,
                got: r.len(),
            });
        }
        Ok(BitMatrix { n_cols, rows })
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows() == self.n_cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row].get(col)
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.rows[row].set(col, value)
    }

    #[inline]
    pub fn row(&self, row: usize) -> &BitVec {
        &self.rows[row]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    /// Replaces a whole row; the length must match `n_cols`.
    pub fn set_row(&mut self, row: usize, value: BitVec) -> Result<(), Gf2Error> {
        self.check_row(row)?;
        if value.len() != self.n_cols {
            return Err(Gf2Error::LengthMismatch {
                expected: self.n_cols,
                got: value.len(),
            });
        }
        self.rows[row] = value;
        Ok(())
    }

    /// Column `col` as a vector over the rows.
    pub fn column(&self, col: usize) -> BitVec {
        BitVec::from_bits(self.rows.iter().map(|r| r.get(col)))
    }

    fn check_row(&self, index: usize) -> Result<(), Gf2Error> {
        if index >= self.n_rows() {
            Err(Gf2Error::RowOutOfBounds {
                index,
                n_rows: self.n_rows(),
            })
        } else {
            Ok(())
        }
    }

    /// `R(src, dst)`: row `dst` becomes the XOR of rows `src` and `dst`.
    /// Applying it twice is the identity.
    pub fn row_add(&mut self, src: usize, dst: usize) -> Result<(), Gf2Error> {
        self.check_row(src)?;
        self.check_row(dst)?;
        if src == dst {
            return Err(Gf2Error::SameRow(src));
        }
        let (s, d) = if src < dst {
            let (lo, hi) = self.rows.split_at_mut(dst);
            (&lo[src], &mut hi[0])
        } else {
            let (lo, hi) = self.rows.split_at_mut(src);
            (&hi[0], &mut lo[dst])
        };
        d.xor_assign(s);
        Ok(())
    }

    /// Whether Gauss-Jordan elimination reaches the identity.
    pub fn is_invertible(&self) -> Result<bool, Gf2Error> {
        if !self.is_square() {
            return Err(Gf2Error::NotSquare {
                n_rows: self.n_rows(),
                n_cols: self.n_cols,
            });
        }
        Ok(rank(&self.rows) == self.n_rows())
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.n_cols != rhs.n_rows() {
            return Err(Gf2Error::LengthMismatch {
                expected: self.n_cols,
                got: rhs.n_rows(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = BitVec::zeros(rhs.n_cols);
                for k in r.ones() {
                    acc.xor_assign(&rhs.rows[k]);
                }
                acc
            })
            .collect();
        Ok(BitMatrix {
            n_cols: rhs.n_cols,
            rows,
        })
    }

    /// Image of a column vector, `self * x`.
    pub fn apply(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.n_cols);
        BitVec::from_bits(self.rows.iter().map(|r| {
            r.words
                .iter()
                .zip(&x.words)
                .map(|(a, b)| (a & b).count_ones())
                .sum::<u32>()
                % 2
                == 1
        }))
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.n_rows(), self.n_cols)?;
        for r in &self.rows {
            writeln!(f, "  {r:?}")?;
        }
        f.write_str("]")
    }
}

fn rank(rows: &[BitVec]) -> usize {
    let mut basis: Vec<(usize, BitVec)> = Vec::new();
    for r in rows {
        let mut r = r.clone();
        for (pivot, b) in &basis {
            if r.get(*pivot) {
                r.xor_assign(b);
            }
        }
        if let Some(p) = r.first_one() {
            basis.push((p, r));
        }
    }
    basis.len()
}

/// Finds a set of row indices whose XOR equals `target`.
///
/// Rows are absorbed into an echelon basis in index order and each takes its
/// lowest surviving bit as pivot, so a row only joins the basis when it is
/// independent of all lower-indexed rows. The answer is a deterministic
/// function of the input, returned in ascending order.
pub fn solve_xor_subset(rows: &[BitVec], target: &BitVec) -> Result<Vec<usize>, Gf2Error> {
    let len = target.len();
    if let Some(r) = rows.iter().find(|r| r.len() != len) {
        return Err(Gf2Error::LengthMismatch {
            expected: len,
            got: r.len(),
        });
    }
    // each basis vector carries the set of original rows summed into it
    let mut basis: Vec<(usize, BitVec, BitVec)> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut v = r.clone();
        let mut combo = BitVec::unit(rows.len(), i);
        for (pivot, b, c) in &basis {
            if v.get(*pivot) {
                v.xor_assign(b);
                combo.xor_assign(c);
            }
        }
        if let Some(p) = v.first_one() {
            basis.push((p, v, combo));
        }
    }
    let mut rest = target.clone();
    let mut combo = BitVec::zeros(rows.len());
    for (pivot, b, c) in &basis {
        if rest.get(*pivot) {
            rest.xor_assign(b);
            combo.xor_assign(c);
        }
    }
    if rest.is_zero() {
        Ok(combo.ones().collect())
    } else {
        Err(Gf2Error::NoSolution)
    }
}

/// Whether `target` is in the span of `rows`.
pub fn in_span(rows: &[&BitVec], target: &BitVec) -> bool {
    let mut basis: Vec<(usize, BitVec)> = Vec::new();
    for r in rows {
        let mut v = (*r).clone();
        for (pivot, b) in &basis {
            if v.get(*pivot) {
                v.xor_assign(b);
            }
        }
        if let Some(p) = v.first_one() {
            basis.push((p, v));
        }
    }
    let mut rest = target.clone();
    for (pivot, b) in &basis {
        if rest.get(*pivot) {
            rest.xor_assign(b);
        }
    }
    rest.is_zero()
}
