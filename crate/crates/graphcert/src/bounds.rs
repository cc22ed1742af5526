//! Closed-form thresholds and their numeric cross-checks: the `d + √d`
//! expectation ceiling, the vanishing root-of-unity sums behind the
//! operator binomial identity, and the fidelity radius within which
//! nearby states inherit non-preparability.

use crate::dense::{self, CMatrix};
use crate::modular;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("dimension {0} is not prime")]
    NonPrimeDimension(u32),
    #[error("exponent {q} must lie in 1..={max}")]
    ExponentOutOfRange { q: u32, max: u32 },
    #[error("q_overlap must be at least 1")]
    ZeroOverlap,
    #[error("arguments must satisfy 0 <= mu <= nu, got mu={mu}, nu={nu}")]
    UnorderedDeviations { mu: String, nu: String },
}

/// The expectation ceiling `d + √d` for two order-`d` unitaries with a
/// nonzero commutation phase.
pub fn expectation_ceiling(d: u32) -> f64 {
    f64::from(d) + f64::from(d).sqrt()
}

/// Rebuilds the ceiling numerically: with `A_1 = X`, `A_2 = Z^q`, the
/// matrix `M = Σ_k (A_1^k + A_2^k)` is `d` times a sum of two projectors
/// onto mutually unbiased states, and its top eigenvalue is `d + √d`.
pub fn expectation_ceiling_numeric(d: u32, comm_q: u32) -> Result<f64, BoundsError> {
    if !modular::is_prime(d) {
        return Err(BoundsError::NonPrimeDimension(d));
    }
    if comm_q == 0 || comm_q >= d {
        return Err(BoundsError::ExponentOutOfRange {
            q: comm_q,
            max: d - 1,
        });
    }
    let size = d as usize;
    let x = dense::shift_matrix(d);
    let mut zq = CMatrix::identity(size, size);
    let z = dense::clock_matrix(d);
    for _ in 0..comm_q {
        zq = &zq * &z;
    }
    let mut m = CMatrix::zeros(size, size);
    let mut xp = CMatrix::identity(size, size);
    let mut zp = CMatrix::identity(size, size);
    for _ in 0..d {
        m += &xp;
        m += &zp;
        xp = &xp * &x;
        zp = &zp * &zq;
    }
    let trace: Complex64 = m.trace();
    debug_assert!((trace.re - 2.0 * f64::from(d)).abs() < 1e-9);
    Ok(dense::hermitian_eigenvalues(&m)[0])
}

/// The same top eigenvalue from the rank-two structure: the two nonzero
/// eigenvalues of `d(P_1 + P_2)` are `d(1 ± |⟨ψ_1|ψ_2⟩|)` with overlap
/// `1/√d`.
pub fn expectation_ceiling_rank_two(d: u32) -> f64 {
    f64::from(d) * (1.0 + f64::from(d).sqrt().recip())
}

/// Direct enumeration of `Σ η^{i_1 + … + i_k}` over non-decreasing
/// tuples `0 ≤ i_1 ≤ … ≤ i_k ≤ d-k`, with `η = ω^{-q}`. Vanishes for
/// every `k` in `1..d` whenever `q` and `d` are coprime.
pub fn vieta_sum(d: u32, comm_q: u32, k: u32) -> Result<Complex64, BoundsError> {
    if !modular::is_prime(d) {
        return Err(BoundsError::NonPrimeDimension(d));
    }
    if comm_q == 0 || comm_q >= d || k == 0 || k >= d {
        return Err(BoundsError::ExponentOutOfRange {
            q: comm_q.max(k),
            max: d - 1,
        });
    }
    let eta = |e: i64| dense::omega(d, -i64::from(comm_q) * e);
    let top = i64::from(d) - i64::from(k);
    let mut total = Complex64::new(0.0, 0.0);
    // stack of (next index floor, remaining levels, partial exponent)
    let mut stack = vec![(0i64, k, 0i64)];
    while let Some((floor, remaining, partial)) = stack.pop() {
        if remaining == 0 {
            total += eta(partial);
            continue;
        }
        for i in floor..=top {
            stack.push((i, remaining - 1, partial + i));
        }
    }
    Ok(total)
}

/// Max-entry deviation of `(λ_1 X + λ_2 Z^q)^{n·d}` from
/// `(λ_1^d + λ_2^d)^n · I`.
pub fn operator_identity_check(
    d: u32,
    comm_q: u32,
    lambda1: f64,
    lambda2: f64,
    n_reps: u32,
) -> Result<f64, BoundsError> {
    if !modular::is_prime(d) {
        return Err(BoundsError::NonPrimeDimension(d));
    }
    if comm_q == 0 || comm_q >= d {
        return Err(BoundsError::ExponentOutOfRange {
            q: comm_q,
            max: d - 1,
        });
    }
    let size = d as usize;
    let x = dense::shift_matrix(d);
    let z = dense::clock_matrix(d);
    let mut zq = CMatrix::identity(size, size);
    for _ in 0..comm_q {
        zq = &zq * &z;
    }
    let base = x.map(|e| e * lambda1) + zq.map(|e| e * lambda2);
    let mut power = CMatrix::identity(size, size);
    for _ in 0..(u64::from(n_reps) * u64::from(d)) {
        power = &power * &base;
    }
    let scalar = (lambda1.powi(d as i32) + lambda2.powi(d as i32)).powi(n_reps as i32);
    let target = CMatrix::identity(size, size).map(|e| e * scalar);
    Ok((power - target)
        .iter()
        .map(|e| e.norm())
        .fold(0.0, f64::max))
}

/// Dimension parameter of a fidelity bound: a concrete prime or the
/// analytic `d → ∞` mode, where the slope constant is exactly 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DimensionParam {
    Prime(u32),
    #[serde(rename = "analytic_limit")]
    AnalyticLimit(AnalyticTag),
}

/// Serialization helper so the analytic mode reads as a string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnalyticTag {
    #[serde(rename = "analytic_limit")]
    Tag,
}

/// Fidelity radius: any state with fidelity above `f_min` to the graph
/// state is likewise not producible in the network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityBound {
    pub dimension: DimensionParam,
    pub q_overlap: u32,
    pub beta: f64,
    pub gamma: f64,
    pub delta_max: f64,
    pub f_min: f64,
}

fn fidelity_from_gamma(
    dimension: DimensionParam,
    q_overlap: u32,
    gamma: f64,
) -> Result<FidelityBound, BoundsError> {
    if q_overlap == 0 {
        return Err(BoundsError::ZeroOverlap);
    }
    let beta = 2.0 * f64::from(q_overlap) - 1.0;
    // largest δ with β√δ + 2δ < γ/2
    let delta_max = (beta * beta + 2.0 * gamma - beta * (beta * beta + 4.0 * gamma).sqrt()) / 8.0;
    Ok(FidelityBound {
        dimension,
        q_overlap,
        beta,
        gamma,
        delta_max,
        f_min: 1.0 - delta_max,
    })
}

/// Threshold for a concrete prime dimension.
///
/// ```
/// let b = graphcert::bounds::fidelity_threshold(3, 1).unwrap();
/// assert!(b.f_min > 0.9515 && b.f_min < 0.9520);
/// ```
pub fn fidelity_threshold(d: u32, q_overlap: u32) -> Result<FidelityBound, BoundsError> {
    if !modular::is_prime(d) {
        return Err(BoundsError::NonPrimeDimension(d));
    }
    let df = f64::from(d);
    let gamma = (df - df.sqrt()) / (df - 1.0);
    fidelity_from_gamma(DimensionParam::Prime(d), q_overlap, gamma)
}

/// Threshold in the large-dimension limit, `γ = 1` exactly.
pub fn fidelity_threshold_limit(q_overlap: u32) -> Result<FidelityBound, BoundsError> {
    fidelity_from_gamma(
        DimensionParam::AnalyticLimit(AnalyticTag::Tag),
        q_overlap,
        1.0,
    )
}

/// Bound `√(2μ) + ν` on the deviation of a product of two near-unit
/// expectations, given single-operator deviations `μ ≤ ν`.
pub fn error_propagation(mu: f64, nu: f64) -> Result<f64, BoundsError> {
    if !(0.0 <= mu && mu <= nu) {
        return Err(BoundsError::UnorderedDeviations {
            mu: format!("{mu}"),
            nu: format!("{nu}"),
        });
    }
    Ok((2.0 * mu).sqrt() + nu)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];

    #[test]
    fn bound_values() {
        assert!((expectation_ceiling(3) - 4.732_050_807_568_877).abs() < 1e-12);
        assert!((expectation_ceiling(2) - (2.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!((expectation_ceiling(5) - (5.0 + 5f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn numeric_ceiling_matches_closed_form() {
        for d in PRIMES {
            for q in 1..d {
                let numeric = expectation_ceiling_numeric(d, q).unwrap();
                assert!(
                    (numeric - expectation_ceiling(d)).abs() < 1e-9,
                    "d={d} q={q}: {numeric}"
                );
                assert!((numeric - expectation_ceiling_rank_two(d)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn numeric_ceiling_rejects_bad_arguments() {
        assert!(expectation_ceiling_numeric(4, 1).is_err());
        assert!(expectation_ceiling_numeric(3, 0).is_err());
        assert!(expectation_ceiling_numeric(3, 3).is_err());
    }

    #[test]
    fn root_of_unity_sums_vanish() {
        for d in [2u32, 3, 5, 7, 11] {
            for q in 1..d {
                for k in 1..d {
                    let s = vieta_sum(d, q, k).unwrap();
                    assert!(s.norm() < 1e-9, "d={d} q={q} k={k}: {s}");
                }
            }
        }
    }

    #[test]
    fn small_sums_by_hand() {
        // d=2, q=1, k=1: 1 + η = 0
        assert!(vieta_sum(2, 1, 1).unwrap().norm() < 1e-12);
        // d=3, q=1, k=1: 1 + η + η² = 0
        assert!(vieta_sum(3, 1, 1).unwrap().norm() < 1e-12);
        // d=5, q=2, k=3 by direct enumeration
        assert!(vieta_sum(5, 2, 3).unwrap().norm() < 1e-9);
    }

    #[test]
    fn binomial_identity_holds() {
        // (X + Z)² = 2·I at d = 2
        let dev = operator_identity_check(2, 1, 1.0, 1.0, 1).unwrap();
        assert!(dev < 1e-12, "deviation {dev}");
        for d in [3u32, 5, 7] {
            for q in 1..d {
                for (l1, l2) in [(0.5, 1.0), (1.0, 2.0), (2.0, 0.5)] {
                    for n in 1..=2u32 {
                        let dev = operator_identity_check(d, q, l1, l2, n).unwrap();
                        let scale = (l1 + l2).powi((n * d) as i32);
                        assert!(
                            dev <= 1e-8 * scale,
                            "d={d} q={q} λ=({l1},{l2}) n={n}: {dev}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn qutrit_fidelity_threshold() {
        let b = fidelity_threshold(3, 1).unwrap();
        assert!(b.f_min > 0.9515 && b.f_min < 0.9520, "f_min = {}", b.f_min);
        assert!(b.delta_max > 0.0484 && b.delta_max < 0.0485);
    }

    #[test]
    fn analytic_limit_threshold() {
        let b = fidelity_threshold_limit(1).unwrap();
        let expect = (3.0 - 5f64.sqrt()) / 8.0;
        assert!((b.delta_max - expect).abs() < 1e-12);
        assert!(b.f_min > 0.9044 && b.f_min < 0.9050);
    }

    #[test]
    fn radius_shrinks_with_overlap() {
        for d in PRIMES {
            let mut last = f64::INFINITY;
            for q in 1..=6u32 {
                let b = fidelity_threshold(d, q).unwrap();
                assert!(b.delta_max > 0.0);
                assert!(b.delta_max <= last + 1e-15, "d={d} q={q}");
                last = b.delta_max;
            }
        }
    }

    #[test]
    fn delta_solves_the_threshold_inequality() {
        // at δ_max the constraint β√δ + 2δ = γ/2 is tight
        for d in PRIMES {
            for q in 1..=4u32 {
                let b = fidelity_threshold(d, q).unwrap();
                let lhs = b.beta * b.delta_max.sqrt() + 2.0 * b.delta_max;
                assert!((lhs - b.gamma / 2.0).abs() < 1e-10, "d={d} q={q}");
            }
        }
    }

    #[test]
    fn propagation_bound() {
        assert_eq!(error_propagation(0.0, 0.0).unwrap(), 0.0);
        let v = error_propagation(0.02, 0.02).unwrap();
        assert!((v - 0.22).abs() < 1e-12);
        assert!(error_propagation(0.5, 0.1).is_err());
        assert!(error_propagation(-0.1, 0.1).is_err());
    }

    #[test]
    fn propagation_bound_validated_on_random_unitaries() {
        // random order-d diagonal unitaries + random states in C^4
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(97);
        for _ in 0..200 {
            let d = 4u32; // any order works for the inequality itself
            let random_unitary = |rng: &mut rand_chacha::ChaCha8Rng| {
                let phases: Vec<Complex64> = (0..4)
                    .map(|_| dense::omega(d, rng.gen_range(0..i64::from(d))))
                    .collect();
                CMatrix::from_fn(4, 4, |r, c| {
                    if r == c {
                        phases[r]
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            };
            let s1 = random_unitary(&mut rng);
            let s2 = random_unitary(&mut rng);
            let mut state = nalgebra::DVector::<Complex64>::from_fn(4, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            state /= Complex64::new(state.norm(), 0.0);
            let expval = |m: &CMatrix| -> Complex64 { state.dotc(&(m * &state)) };
            let one = Complex64::new(1.0, 0.0);
            let dev1 = (one - expval(&s1)).norm();
            let dev2 = (one - expval(&s2)).norm();
            let (mu, nu) = if dev1 <= dev2 {
                (dev1, dev2)
            } else {
                (dev2, dev1)
            };
            let measured = (one - expval(&(&s1 * &s2))).norm();
            let bound = error_propagation(mu, nu).unwrap();
            assert!(
                measured <= bound + 1e-9,
                "measured {measured} exceeds bound {bound}"
            );
        }
    }
}
