//! Dense complex matrices and state vectors, used only as verification
//! oracles against the exact symplectic arithmetic.

use crate::pauli::PauliWord;
use crate::DEFAULT_DENSE_LIMIT;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DenseError {
    #[error("dense representation needs dimension {required}, limit is {limit}")]
    SizeLimitExceeded { required: usize, limit: usize },
}

/// `ω^k` for `ω = exp(2πi/d)`.
pub fn omega(d: u32, k: i64) -> Complex64 {
    let angle = 2.0 * std::f64::consts::PI * (k.rem_euclid(i64::from(d)) as f64) / f64::from(d);
    Complex64::from_polar(1.0, angle)
}

/// The shift matrix `X = Σ_i |i+1⟩⟨i|` (indices mod d).
pub fn shift_matrix(d: u32) -> CMatrix {
    let n = d as usize;
    CMatrix::from_fn(n, n, |r, c| {
        if r == (c + 1) % n {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// The clock matrix `Z = Σ_i ω^i |i⟩⟨i|`.
pub fn clock_matrix(d: u32) -> CMatrix {
    let n = d as usize;
    CMatrix::from_fn(n, n, |r, c| {
        if r == c {
            omega(d, r as i64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn checked_dim(d: u32, n: usize, limit: usize) -> Result<usize, DenseError> {
    let mut total = 1usize;
    for _ in 0..n {
        total = total.saturating_mul(d as usize);
        if total > limit {
            return Err(DenseError::SizeLimitExceeded {
                required: total,
                limit,
            });
        }
    }
    Ok(total)
}

/// Dense matrix of a Pauli word, as `ω^phase ⊗_i X^{x_i} Z^{z_i}`.
pub fn word_matrix(word: &PauliWord) -> Result<CMatrix, DenseError> {
    word_matrix_with_limit(word, DEFAULT_DENSE_LIMIT)
}

pub fn word_matrix_with_limit(word: &PauliWord, limit: usize) -> Result<CMatrix, DenseError> {
    let d = word.dimension();
    checked_dim(d, word.num_sites(), limit)?;
    let x = shift_matrix(d);
    let z = clock_matrix(d);
    let mut out = CMatrix::from_element(1, 1, omega(d, i64::from(word.phase())));
    for site in word.sites() {
        let mut factor = CMatrix::identity(d as usize, d as usize);
        for _ in 0..site.x {
            factor = &factor * &x;
        }
        for _ in 0..site.z {
            factor = &factor * &z;
        }
        out = out.kronecker(&factor);
    }
    Ok(out)
}

/// Applies a Pauli word to a state vector without materializing the matrix.
///
/// Basis states are indexed big-endian: site 0 is the most significant
/// digit, matching the tensor-product order of [`word_matrix`].
pub fn apply_word(word: &PauliWord, state: &CVector) -> CVector {
    let d = word.dimension();
    let n = word.num_sites();
    let dim = state.len();
    debug_assert_eq!(dim, (d as usize).pow(n as u32));
    let mut out = CVector::from_element(dim, Complex64::new(0.0, 0.0));
    let mut digits = vec![0u32; n];
    for k in 0..dim {
        // digits of k, big-endian
        let mut rest = k;
        for i in (0..n).rev() {
            digits[i] = (rest % d as usize) as u32;
            rest /= d as usize;
        }
        let mut phase = i64::from(word.phase());
        let mut target = 0usize;
        for (i, site) in word.sites().iter().enumerate() {
            phase += i64::from(site.z) * i64::from(digits[i]);
            let shifted = (digits[i] + site.x) % d;
            target = target * d as usize + shifted as usize;
        }
        out[target] += omega(d, phase) * state[k];
    }
    out
}

/// `⟨state| word |state⟩` via matrix-free application.
pub fn word_expectation(word: &PauliWord, state: &CVector) -> Complex64 {
    let applied = apply_word(word, state);
    state.dotc(&applied)
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut eig: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.partial_cmp(a).expect("eigenvalues are finite"));
    eig
}
