//! Stabilizer generators of a graph state and exact expectation values
//! of Pauli words on it.

use crate::dense::{self, CVector, DenseError};
use crate::graph::Multigraph;
use crate::modular;
use crate::pauli::{PauliError, PauliWord};
use crate::DEFAULT_DENSE_LIMIT;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StabilizerError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Dense(#[from] DenseError),
    #[error("constructed state fails the defining eigenvector check")]
    StateCheckFailed,
}

/// The graph-state generators `g_i = X_i ∏_{j ∈ N_i} Z_j^{Γ_{i,j}}`.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    words: Vec<PauliWord>,
}

impl GeneratorSet {
    pub fn words(&self) -> &[PauliWord] {
        &self.words
    }

    pub fn generator(&self, i: usize) -> &PauliWord {
        &self.words[i]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Builds the generator set of a multigraph. Every generator has X
/// exponent 1 at its own vertex, Z exponent `Γ_{i,j}` at vertex `j`,
/// and phase 0.
pub fn generators(graph: &Multigraph) -> GeneratorSet {
    let d = graph.dimension();
    let n = graph.vertex_count();
    let words = (0..n)
        .map(|i| {
            let mut w = PauliWord::identity(d, n).with_site_factor(i, 1, 0);
            for j in graph.neighborhood(i) {
                w = w.with_site_factor(j, 0, i64::from(graph.weight(i, j)));
            }
            w
        })
        .collect();
    GeneratorSet { words }
}

/// Outcome of the exact stabilizer-expectation solver.
///
/// The value of `⟨G| P |G⟩` is either 0 (unsigned part outside the
/// stabilizer group) or the root of unity `ω^k` recorded here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerVerdict {
    d: u32,
    /// `k` with value `ω^k`, when the unsigned part is in the group.
    pub phase_exponent: Option<u32>,
    /// Generator exponents `c` with `∏ g_i^{c_i}` matching the unsigned part.
    pub exponents: Option<Vec<u32>>,
}

impl StabilizerVerdict {
    pub fn in_group(&self) -> bool {
        self.phase_exponent.is_some()
    }

    /// True when the expectation is exactly 1.
    pub fn is_one(&self) -> bool {
        self.phase_exponent == Some(0)
    }

    pub fn value(&self) -> Complex64 {
        match self.phase_exponent {
            Some(k) => dense::omega(self.d, i64::from(k)),
            None => Complex64::new(0.0, 0.0),
        }
    }
}

/// Exact `⟨G| P |G⟩` via the symplectic structure of the generators.
///
/// Graph-state generators have identity X-block, so a word's generator
/// exponents are read off its own X exponents; the Z block and the
/// accumulated phase then decide membership and the value.
pub fn expectation(
    graph: &Multigraph,
    word: &PauliWord,
) -> Result<StabilizerVerdict, StabilizerError> {
    let d = graph.dimension();
    let n = graph.vertex_count();
    let gens = generators(graph);
    let probe = PauliWord::identity(d, n);
    probe.mul(word)?; // register compatibility check

    let coeffs: Vec<u32> = word.sites().iter().map(|s| s.x).collect();
    let mut product = PauliWord::identity(d, n);
    for (i, &c) in coeffs.iter().enumerate() {
        if c != 0 {
            product = product.mul(&gens.generator(i).pow(u64::from(c)))?;
        }
    }
    if product.same_sites(word) {
        let k = modular::sub(word.phase(), product.phase(), d);
        Ok(StabilizerVerdict {
            d,
            phase_exponent: Some(k),
            exponents: Some(coeffs),
        })
    } else {
        Ok(StabilizerVerdict {
            d,
            phase_exponent: None,
            exponents: None,
        })
    }
}

/// The unique unit vector fixed by every generator, built by applying
/// `CZ^{Γ_{i,j}}` pairs to the uniform superposition: the amplitude of
/// basis state `|k_1 … k_N⟩` is `d^{-N/2} ω^{Σ_{i<j} Γ_{i,j} k_i k_j}`.
pub fn dense_state(graph: &Multigraph) -> Result<CVector, StabilizerError> {
    dense_state_with_limit(graph, DEFAULT_DENSE_LIMIT)
}

pub fn dense_state_with_limit(
    graph: &Multigraph,
    limit: usize,
) -> Result<CVector, StabilizerError> {
    let d = graph.dimension();
    let n = graph.vertex_count();
    let mut dim = 1usize;
    for _ in 0..n {
        dim = dim.saturating_mul(d as usize);
        if dim > limit {
            return Err(DenseError::SizeLimitExceeded {
                required: dim,
                limit,
            }
            .into());
        }
    }
    let norm = (dim as f64).sqrt().recip();
    let mut digits = vec![0u32; n];
    let state = CVector::from_fn(dim, |k, _| {
        let mut rest = k;
        for i in (0..n).rev() {
            digits[i] = (rest % d as usize) as u32;
            rest /= d as usize;
        }
        let mut exp = 0i64;
        for (u, v, w) in graph.edges() {
            exp += i64::from(w) * i64::from(digits[u]) * i64::from(digits[v]);
        }
        dense::omega(d, exp) * norm
    });
    for g in generators(graph).words() {
        let applied = dense::apply_word(g, &state);
        if (&applied - &state).iter().any(|e| e.norm() > 1e-12) {
            return Err(StabilizerError::StateCheckFailed);
        }
    }
    Ok(state)
}

/// `⟨G| P |G⟩` by matrix-free application of the word to the dense state.
pub fn dense_expectation(
    graph: &Multigraph,
    word: &PauliWord,
) -> Result<Complex64, StabilizerError> {
    let state = dense_state(graph)?;
    Ok(dense::word_expectation(word, &state))
}
