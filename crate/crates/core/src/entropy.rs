//! Entropy functionals: von Neumann and Shannon entropies, the entropy a
//! measuring instrument exchanges with its environment, and the erasure
//! entropy of a two-state measurement record.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::ComplexMatrix;
use crate::quantum::{DensityMatrix, KrausChannel, PureState, QuantumError};

/// Eigenvalues and probabilities at or below this contribute zero to entropy
/// sums — the continuous extension 0·log 0 := 0.
pub const LOG_FLOOR: f64 = 1e-15;

/// Logarithm base for entropy values: base 2 (bits) or base e (nats).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    Two,
    E,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            LogBase::Two => "bits",
            LogBase::E => "nats",
        }
    }

    /// Entropy of a fair coin in this base — the maximum of the binary
    /// entropy function and the natural scale for its inverse.
    pub fn coin(self) -> f64 {
        match self {
            LogBase::Two => 1.0,
            LogBase::E => std::f64::consts::LN_2,
        }
    }
}

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("not a probability distribution: {reason} ({value})")]
    NotADistribution { reason: &'static str, value: f64 },
    #[error("parameter {name} = {value} is outside its valid range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// Von Neumann entropy S(ρ) = −Σ λᵢ log λᵢ over the state's eigenvalues.
pub fn von_neumann(rho: &DensityMatrix, base: LogBase) -> f64 {
    rho.spectrum()
        .iter()
        .map(|&l| if l > LOG_FLOOR { -l * base.log(l) } else { 0.0 })
        .sum()
}

/// Shannon entropy H(p) = −Σ pₖ log pₖ. Entries may undershoot zero by at
/// most 1e-12 (they are clipped); the vector must sum to one within 1e-10.
pub fn shannon(p: &[f64], base: LogBase) -> Result<f64, EntropyError> {
    for &x in p {
        if x < -1e-12 || !x.is_finite() {
            return Err(EntropyError::NotADistribution {
                reason: "negative entry",
                value: x,
            });
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        return Err(EntropyError::NotADistribution {
            reason: "sum is not 1",
            value: sum,
        });
    }
    Ok(p.iter()
        .map(|&x| if x > LOG_FLOOR { -x * base.log(x) } else { 0.0 })
        .sum())
}

/// Binary entropy h(x) = −x log x − (1−x) log(1−x) for x ∈ [0, 1].
pub fn binary_entropy(x: f64, base: LogBase) -> Result<f64, EntropyError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(EntropyError::OutOfRange {
            name: "x",
            value: x,
        });
    }
    Ok([x, 1.0 - x]
        .iter()
        .map(|&p| if p > LOG_FLOOR { -p * base.log(p) } else { 0.0 })
        .sum())
}

// --- entropy exchange ---------------------------------------------------------

/// The K×K matrix W with W_ij = Tr(E_i ρ E_j†) built from a K-operator
/// instrument acting on ρ. Its diagonal holds the outcome probabilities; its
/// von Neumann entropy is the entropy the instrument hands to its
/// environment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WMatrix {
    pub matrix: ComplexMatrix,
    pub basis_labels: Vec<usize>,
}

/// Raw W_ij = Tr(E_i ρ E_j†) without normalisation or validation.
pub fn exchange_matrix(ops: &[ComplexMatrix], rho: &DensityMatrix) -> ComplexMatrix {
    let k = ops.len();
    // T_i = E_i ρ; then Tr(T_i E_j†) = Σ_ab T_i[a,b]·conj(E_j[a,b]).
    let images: Vec<ComplexMatrix> = ops.iter().map(|op| op.matmul(rho.matrix())).collect();
    ComplexMatrix::from_fn(k, k, |i, j| {
        images[i]
            .data()
            .iter()
            .zip(ops[j].data())
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
    })
}

/// Entropy exchange of an instrument on a state: returns W and S(W).
///
/// For a complete instrument W has unit trace and S(W) is its entropy
/// directly; a restricted instrument yields Tr W < 1 and the entropy is taken
/// of W normalised by its trace (the raw W is still returned).
pub fn entropy_exchange(
    instrument: &KrausChannel,
    rho: &DensityMatrix,
    base: LogBase,
) -> Result<(WMatrix, f64), EntropyError> {
    if instrument.dim() != rho.dim() {
        return Err(QuantumError::DimensionMismatch(instrument.dim(), rho.dim()).into());
    }
    let w = exchange_matrix(instrument.operators(), rho);
    let t = w.trace().re;
    if t <= 1e-14 {
        return Err(EntropyError::OutOfRange {
            name: "trace of W",
            value: t,
        });
    }
    let normalized = DensityMatrix::new(w.scale(Complex64::new(1.0 / t, 0.0)))?;
    let s = von_neumann(&normalized, base);
    Ok((
        WMatrix {
            matrix: w,
            basis_labels: (0..instrument.operators().len()).collect(),
        },
        s,
    ))
}

// --- measurement-record erasure --------------------------------------------------

/// The two apparatus pointer states |m₁⟩ = |0⟩ and
/// |m₂⟩ = ξ√δ |0⟩ + √(1−ξ²δ) |1⟩, whose overlap is ξ√δ.
pub fn apparatus_states(xi: f64, delta: f64) -> Result<(PureState, PureState), EntropyError> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(EntropyError::OutOfRange {
            name: "delta",
            value: delta,
        });
    }
    if xi < 0.0 || xi * xi * delta > 1.0 + 1e-15 || !xi.is_finite() {
        return Err(EntropyError::OutOfRange {
            name: "xi",
            value: xi,
        });
    }
    let c = xi * delta.sqrt();
    let m1 = PureState::basis(2, 0);
    let m2 = PureState::new(vec![
        Complex64::new(c, 0.0),
        Complex64::new((1.0 - c * c).max(0.0).sqrt(), 0.0),
    ])?;
    Ok((m1, m2))
}

/// Entropy of the equal mixture of two pure states with the given overlap:
/// the mixture's eigenvalues are (1 ± overlap)/2. This is the entropy erased
/// when a two-outcome measurement record is reset.
pub fn erasure_entropy(overlap: f64, base: LogBase) -> Result<f64, EntropyError> {
    if !(0.0..=1.0).contains(&overlap) {
        return Err(EntropyError::OutOfRange {
            name: "overlap",
            value: overlap,
        });
    }
    binary_entropy((1.0 + overlap) / 2.0, base)
}

/// Inverts the erasure entropy: finds the overlap a ∈ [0, 1] with
/// h((1+a)/2) = target, by bisection on the strictly decreasing map
/// a ↦ h((1+a)/2). The target must lie in [0, h(½)] for the chosen base.
pub fn solve_overlap_for_entropy(target: f64, base: LogBase) -> Result<f64, EntropyError> {
    if !(0.0..=base.coin()).contains(&target) {
        return Err(EntropyError::OutOfRange {
            name: "target",
            value: target,
        });
    }
    let h = |a: f64| binary_entropy((1.0 + a) / 2.0, base).expect("argument in range");
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64); // h(lo) = h(½) ≥ target ≥ 0 = h(hi)
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if h(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
