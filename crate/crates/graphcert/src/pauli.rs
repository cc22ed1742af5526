//! Exact algebra of generalized Pauli words over a prime dimension.
//!
//! A word is kept in the canonical form `ω^s ⊗_i X^{x_i} Z^{z_i}` with
//! `ω = exp(2πi/d)` and all exponents reduced into `{0, …, d-1}`. The
//! phase group is restricted to powers of `ω`: the canonical X-before-Z
//! ordering is closed under multiplication with ω-phases alone, so no
//! other roots of unity ever appear (in particular no factors of `i`
//! at `d = 2`).

use crate::modular;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PauliError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u32, u32),
    #[error("site count mismatch: {0} vs {1}")]
    SiteCountMismatch(usize, usize),
}

/// X and Z exponents of one tensor factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SiteExponents {
    pub x: u32,
    pub z: u32,
}

impl SiteExponents {
    pub fn is_trivial(&self) -> bool {
        self.x == 0 && self.z == 0
    }
}

/// A generalized Pauli word `ω^phase ⊗_i X^{x_i} Z^{z_i}`.
///
/// ```
/// use graphcert::pauli::PauliWord;
///
/// // ZX = ω·XZ on a single qutrit site
/// let x = PauliWord::from_exponents(3, 0, &[(1, 0)]);
/// let z = PauliWord::from_exponents(3, 0, &[(0, 1)]);
/// let zx = z.mul(&x).unwrap();
/// assert_eq!(zx.phase(), 1);
/// assert_eq!(z.commutation_exponent(&x).unwrap(), 1);
/// assert!(x.pow(3).is_identity());
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliWord {
    d: u32,
    phase: u32,
    sites: Vec<SiteExponents>,
}

impl PauliWord {
    /// The identity word on `n` sites.
    pub fn identity(d: u32, n: usize) -> Self {
        assert!(modular::is_prime(d), "dimension {d} is not prime");
        PauliWord {
            d,
            phase: 0,
            sites: vec![SiteExponents::default(); n],
        }
    }

    /// Builds a word from per-site exponents, reducing everything mod `d`.
    pub fn from_exponents(d: u32, phase: i64, exponents: &[(i64, i64)]) -> Self {
        assert!(modular::is_prime(d), "dimension {d} is not prime");
        PauliWord {
            d,
            phase: modular::reduce(phase, d),
            sites: exponents
                .iter()
                .map(|&(x, z)| SiteExponents {
                    x: modular::reduce(x, d),
                    z: modular::reduce(z, d),
                })
                .collect(),
        }
    }

    /// Multiplies `X^x Z^z` onto site `i` from the right.
    pub fn with_site_factor(mut self, i: usize, x: i64, z: i64) -> Self {
        let d = self.d;
        let fx = modular::reduce(x, d);
        let fz = modular::reduce(z, d);
        // (X^a Z^b)(X^x Z^z) = ω^{b·x} X^{a+x} Z^{b+z}
        let site = &mut self.sites[i];
        self.phase = modular::add(self.phase, modular::mul(site.z, fx, d), d);
        site.x = modular::add(site.x, fx, d);
        site.z = modular::add(site.z, fz, d);
        self
    }

    pub fn with_phase(mut self, phase: i64) -> Self {
        self.phase = modular::add(self.phase, modular::reduce(phase, self.d), self.d);
        self
    }

    pub fn dimension(&self) -> u32 {
        self.d
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn phase(&self) -> u32 {
        self.phase
    }

    pub fn site(&self, i: usize) -> SiteExponents {
        self.sites[i]
    }

    pub fn sites(&self) -> &[SiteExponents] {
        &self.sites
    }

    /// Indices of sites with a nontrivial tensor factor.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.sites
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_trivial())
            .map(|(i, _)| i)
    }

    pub fn is_identity(&self) -> bool {
        self.phase == 0 && self.sites.iter().all(SiteExponents::is_trivial)
    }

    /// True when the unsigned parts agree, ignoring the global phase.
    pub fn same_sites(&self, other: &Self) -> bool {
        self.d == other.d && self.sites == other.sites
    }

    fn check_compatible(&self, other: &Self) -> Result<(), PauliError> {
        if self.d != other.d {
            return Err(PauliError::DimensionMismatch(self.d, other.d));
        }
        if self.sites.len() != other.sites.len() {
            return Err(PauliError::SiteCountMismatch(
                self.sites.len(),
                other.sites.len(),
            ));
        }
        Ok(())
    }

    /// Canonical form of the matrix product `self · other`.
    ///
    /// Per site, `(X^a Z^b)(X^{a'} Z^{b'}) = ω^{b·a'} X^{a+a'} Z^{b+b'}`,
    /// so the total phase picks up `Σ_i z_i · x'_i`.
    pub fn mul(&self, other: &Self) -> Result<Self, PauliError> {
        self.check_compatible(other)?;
        let d = self.d;
        let mut phase = modular::add(self.phase, other.phase, d);
        let sites = self
            .sites
            .iter()
            .zip(&other.sites)
            .map(|(a, b)| {
                phase = modular::add(phase, modular::mul(a.z, b.x, d), d);
                SiteExponents {
                    x: modular::add(a.x, b.x, d),
                    z: modular::add(a.z, b.z, d),
                }
            })
            .collect();
        Ok(PauliWord { d, phase, sites })
    }

    /// The exponent `c` with `self · other = ω^c · other · self`.
    pub fn commutation_exponent(&self, other: &Self) -> Result<u32, PauliError> {
        self.check_compatible(other)?;
        let d = self.d;
        let mut c = 0u32;
        for (a, b) in self.sites.iter().zip(&other.sites) {
            c = modular::add(c, modular::mul(a.z, b.x, d), d);
            c = modular::sub(c, modular::mul(a.x, b.z, d), d);
        }
        Ok(c)
    }

    /// Canonical form of `self^k`.
    ///
    /// Collecting the X factors of the k copies to the left of the Z
    /// factors produces `ω^{x_i z_i}` once for each of the k(k-1)/2
    /// ordered pairs of copies, per site.
    pub fn pow(&self, k: u64) -> Self {
        let d = self.d;
        let k_mod = (k % u64::from(d)) as u32;
        let pair_count = modular::reduce((k as i64) * ((k as i64) - 1) / 2, d);
        let mut phase = modular::mul(self.phase, k_mod, d);
        let sites = self
            .sites
            .iter()
            .map(|s| {
                let cross = modular::mul(s.x, s.z, d);
                phase = modular::add(phase, modular::mul(pair_count, cross, d), d);
                SiteExponents {
                    x: modular::mul(s.x, k_mod, d),
                    z: modular::mul(s.z, k_mod, d),
                }
            })
            .collect();
        PauliWord { d, phase, sites }
    }

    /// Canonical form of the inverse word.
    pub fn inverse(&self) -> Self {
        // self^d is a pure phase ω^t; self^{d-1} then differs from the
        // inverse by exactly that phase.
        let t = self.pow(u64::from(self.d)).phase;
        let mut inv = self.pow(u64::from(self.d) - 1);
        inv.phase = modular::sub(inv.phase, t, self.d);
        inv
    }
}

impl std::fmt::Display for PauliWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.phase != 0 {
            write!(f, "w^{} ", self.phase)?;
        }
        let mut any = false;
        for (i, s) in self.sites.iter().enumerate() {
            if s.is_trivial() {
                continue;
            }
            any = true;
            if s.x == 1 {
                write!(f, "X{}", i + 1)?;
            } else if s.x > 1 {
                write!(f, "X{}^{}", i + 1, s.x)?;
            }
            if s.z == 1 {
                write!(f, "Z{}", i + 1)?;
            } else if s.z > 1 {
                write!(f, "Z{}^{}", i + 1, s.z)?;
            }
            write!(f, " ")?;
        }
        if !any {
            write!(f, "I")?;
        }
        Ok(())
    }
}
