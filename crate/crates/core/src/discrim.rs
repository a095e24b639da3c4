//! Quantum state discrimination: the Helstrom minimum-error bound, POVM
//! error probabilities, the ambiguity-factor lower bound for almost-perfect
//! discrimination, pairwise state overlaps, and the necessary condition for
//! perfect discrimination with separable (product-diagonal) measurements.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{ComplexMatrix, LinalgError};
use crate::quantum::{random_unitary, DensityMatrix, Povm, PureState, QuantumError};

#[derive(Debug, Error)]
pub enum DiscrimError {
    #[error("priors must be nonnegative and sum to 1 (got sum {0})")]
    BadPriors(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("count mismatch: {0} states vs {1} measurement outcomes")]
    CountMismatch(usize, usize),
    #[error("recovery operators do not sum to identity: max |ΣR†R - I| = {0:.3e}")]
    IncompleteRecovery(f64),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A set of hypothesis states with prior probabilities.
#[derive(Debug, Clone)]
pub struct DiscriminationEnsemble {
    states: Vec<DensityMatrix>,
    priors: Vec<f64>,
}

impl DiscriminationEnsemble {
    pub fn new(states: Vec<DensityMatrix>, priors: Vec<f64>) -> Result<Self, DiscrimError> {
        if states.is_empty() || states.len() != priors.len() {
            return Err(DiscrimError::CountMismatch(states.len(), priors.len()));
        }
        let dim = states[0].dim();
        for s in &states {
            if s.dim() != dim {
                return Err(DiscrimError::DimensionMismatch(s.dim(), dim));
            }
        }
        let sum: f64 = priors.iter().sum();
        if priors.iter().any(|&p| p < 0.0 || !p.is_finite()) || (sum - 1.0).abs() > 1e-10 {
            return Err(DiscrimError::BadPriors(sum));
        }
        Ok(Self { states, priors })
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }
}

/// Minimum error probability for telling two pure states apart:
/// P_E = ½[1 − √(1 − 4η₁η₂|⟨ψ₁|ψ₂⟩|²)].
pub fn helstrom_pure(
    psi1: &PureState,
    psi2: &PureState,
    eta1: f64,
    eta2: f64,
) -> Result<f64, DiscrimError> {
    if psi1.dim() != psi2.dim() {
        return Err(DiscrimError::DimensionMismatch(psi1.dim(), psi2.dim()));
    }
    if eta1 < 0.0 || eta2 < 0.0 || (eta1 + eta2 - 1.0).abs() > 1e-10 {
        return Err(DiscrimError::BadPriors(eta1 + eta2));
    }
    let overlap_sq = psi1.inner(psi2).norm_sqr();
    let discr = (1.0 - 4.0 * eta1 * eta2 * overlap_sq).max(0.0);
    Ok(0.5 * (1.0 - discr.sqrt()))
}

/// Error probability of a concrete measurement on an ensemble, guessing
/// state k on outcome k: P = 1 − Σ η_k Tr(ρ_k Π_k).
pub fn povm_error(povm: &Povm, ensemble: &DiscriminationEnsemble) -> Result<f64, DiscrimError> {
    if povm.elements().len() != ensemble.len() {
        return Err(DiscrimError::CountMismatch(
            ensemble.len(),
            povm.elements().len(),
        ));
    }
    if povm.dim() != ensemble.dim() {
        return Err(DiscrimError::DimensionMismatch(povm.dim(), ensemble.dim()));
    }
    let success: f64 = ensemble
        .states()
        .iter()
        .zip(ensemble.priors())
        .zip(povm.elements())
        .map(|((rho, &eta), pi)| eta * pi.matmul(rho.matrix()).trace().re)
        .sum();
    Ok((1.0 - success).clamp(0.0, 1.0))
}

/// Minimum error probability for two arbitrary (possibly mixed) hypotheses:
/// ½(1 − ‖η₁ρ₁ − η₂ρ₂‖₁). Lower-bounds every achievable [`povm_error`].
pub fn helstrom_mixed(ensemble: &DiscriminationEnsemble) -> Result<f64, DiscrimError> {
    if ensemble.len() != 2 {
        return Err(DiscrimError::CountMismatch(ensemble.len(), 2));
    }
    let gap = ensemble.states()[0]
        .matrix()
        .scale(Complex64::new(ensemble.priors()[0], 0.0))
        .sub(
            &ensemble.states()[1]
                .matrix()
                .scale(Complex64::new(ensemble.priors()[1], 0.0)),
        );
    let norm = gap.trace_norm()?;
    Ok(0.5 * (1.0 - norm).clamp(0.0, 1.0))
}

// --- the ambiguity-factor bound ------------------------------------------------------

/// How much conclusive ambiguity two states with overlap c₁ force on any
/// almost-perfect discrimination: the smallest δ ∈ [0, 1] satisfying
/// (1+δ)c₁² − 2√(δ(1−δ))c₁ − δ ≤ 0, plus its small-overlap ratio δ/c₁²,
/// which approaches (1+√2)⁻² as c₁ → 0.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AmbiguityBoundResult {
    pub overlap: f64,
    pub delta_min: f64,
    pub asymptotic_ratio: f64,
}

/// The constraint polynomial g(δ) = (1+δ)c₁² − 2√(δ(1−δ))c₁ − δ; feasible
/// ambiguities are those with g(δ) ≤ 0.
pub fn ambiguity_constraint(c1: f64, delta: f64) -> f64 {
    (1.0 + delta) * c1 * c1 - 2.0 * (delta * (1.0 - delta)).max(0.0).sqrt() * c1 - delta
}

/// Smallest feasible ambiguity factor for overlap c₁ ∈ [0, 1], by bisection.
///
/// g(0) = c₁² ≥ 0 and g(½) = 1.5c₁² − c₁ − ½ ≤ 0 on the whole domain, so the
/// smallest root always lies in [0, ½] and that interval brackets the sign
/// change (the naive upper end δ = 1 does not: g(1) = 2c₁² − 1 turns positive
/// again for large overlaps).
pub fn ambiguity_delta_min(c1: f64) -> AmbiguityBoundResult {
    assert!((0.0..=1.0).contains(&c1), "overlap must be in [0, 1]");
    if ambiguity_constraint(c1, 0.0) <= 0.0 {
        // Orthogonal states: zero ambiguity is already feasible.
        return AmbiguityBoundResult {
            overlap: c1,
            delta_min: 0.0,
            asymptotic_ratio: 0.0,
        };
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ambiguity_constraint(c1, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let delta_min = hi; // certified feasible side
    AmbiguityBoundResult {
        overlap: c1,
        delta_min,
        asymptotic_ratio: delta_min / (c1 * c1),
    }
}

/// The small-overlap limit of δ_min/c₁².
pub fn ambiguity_asymptote() -> f64 {
    let s = 1.0 + std::f64::consts::SQRT_2;
    1.0 / (s * s)
}

/// Distance between the product of the reference prior pair
/// (0.78005, 0.21995) and the asymptotic ratio (1+√2)⁻² — the two published
/// constants describe the same quantity and must agree to rounding.
pub fn priors_consistency_check() -> f64 {
    (0.78005 * 0.21995 - ambiguity_asymptote()).abs()
}

// --- overlaps and separable discrimination --------------------------------------------

/// Pairwise overlaps O_jk = Tr(ρ_j ρ_k). The diagonal is each state's
/// purity; for pure states the off-diagonal is |⟨ψ_j|ψ_k⟩|².
pub fn overlap_matrix(states: &[DensityMatrix]) -> Result<Vec<Vec<f64>>, DiscrimError> {
    if states.is_empty() {
        return Ok(Vec::new());
    }
    let dim = states[0].dim();
    for s in states {
        if s.dim() != dim {
            return Err(DiscrimError::DimensionMismatch(s.dim(), dim));
        }
    }
    let n = states.len();
    let mut out = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in j..n {
            let o = states[j].matrix().matmul(states[k].matrix()).trace().re;
            out[j][k] = o;
            out[k][j] = o;
        }
    }
    Ok(out)
}

/// Verdict of the perfect-discrimination check for a measurement against a
/// state list: `perfect` iff Tr(Π_i ρ_j) = δ_ij within tolerance, and
/// `separable_certificate` iff every element is diagonal in the
/// computational product basis (a sufficient condition for separability).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LoccReport {
    pub perfect: bool,
    pub separable_certificate: bool,
    pub max_deviation: f64,
}

pub fn locc_necessary_check(
    povm: &Povm,
    states: &[DensityMatrix],
    tol: f64,
) -> Result<LoccReport, DiscrimError> {
    if povm.elements().len() != states.len() {
        return Err(DiscrimError::CountMismatch(
            states.len(),
            povm.elements().len(),
        ));
    }
    let mut max_deviation = 0.0_f64;
    for (i, pi) in povm.elements().iter().enumerate() {
        for (j, rho) in states.iter().enumerate() {
            if rho.dim() != povm.dim() {
                return Err(DiscrimError::DimensionMismatch(rho.dim(), povm.dim()));
            }
            let p = pi.matmul(rho.matrix()).trace().re;
            let expect = if i == j { 1.0 } else { 0.0 };
            max_deviation = max_deviation.max((p - expect).abs());
        }
    }
    let diagonal = povm.elements().iter().all(|pi| {
        let n = pi.rows();
        (0..n).all(|r| (0..n).all(|c| r == c || pi.get(r, c).norm() <= 1e-12))
    });
    Ok(LoccReport {
        perfect: max_deviation <= tol,
        separable_certificate: diagonal,
        max_deviation,
    })
}

/// The syndrome measurement induced by recovery operators: Π_k = R_k†R_k.
/// Requires Σ R†R = I within 1e-10.
pub fn recovery_povm(recovery: &[ComplexMatrix]) -> Result<Povm, DiscrimError> {
    let dim = match recovery.first() {
        Some(r) if r.is_square() => r.rows(),
        _ => return Err(DiscrimError::CountMismatch(0, 1)),
    };
    let mut sum = ComplexMatrix::zeros(dim, dim);
    let elements: Vec<ComplexMatrix> = recovery
        .iter()
        .map(|r| {
            let pi = r.adjoint().matmul(r);
            sum = sum.add(&pi);
            pi
        })
        .collect();
    let dev = crate::linalg::max_abs_diff(&sum, &ComplexMatrix::identity(dim));
    if dev > 1e-10 {
        return Err(DiscrimError::IncompleteRecovery(dev));
    }
    Ok(Povm::new(elements)?)
}

/// A random two-outcome measurement {Π, I−Π} with Π = U diag(u) U† for
/// uniform u ∈ [0,1]ⁿ and a random unitary U. Used to sweep the space of
/// binary measurements when probing optimality bounds.
pub fn random_binary_povm(dim: usize, rng: &mut impl Rng) -> Povm {
    let u = random_unitary(dim, rng);
    let mut pi = ComplexMatrix::zeros(dim, dim);
    for k in 0..dim {
        let weight: f64 = rng.gen();
        let col: Vec<Complex64> = (0..dim).map(|r| u.get(r, k)).collect();
        for r in 0..dim {
            for c in 0..dim {
                let add = col[r] * col[c].conj() * weight;
                pi.set(r, c, pi.get(r, c) + add);
            }
        }
    }
    let pi = pi.symmetrized();
    let complement = ComplexMatrix::identity(dim).sub(&pi).symmetrized();
    Povm::new(vec![pi, complement]).expect("spectral construction is a valid POVM")
}
