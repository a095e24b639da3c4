//! Error-correcting codes and their correctability analysis: the three-qubit
//! repetition code, the four-qubit Leung code, exact and approximate
//! Knill-Laflamme checks, detection-probability ranges, canonical recovery
//! construction, and the mixed states / subspaces an error family carves out
//! of the code.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{max_abs_diff, ComplexMatrix, LinalgError, MAX_DIM};
use crate::quantum::{sample_pure_state, DensityMatrix, PureState, QuantumError};

/// Singular values below this mark an error operator as rank-deficient on the
/// codespace (no isometric recovery exists for it).
pub const DEGENERACY_TOL: f64 = 1e-10;

/// The four bit-flip-family operators the repetition code corrects: identity
/// and the three single flips (indices into the eight-operator family).
pub const REPETITION3_CORRECTABLE: [usize; 4] = [0, 1, 2, 3];

/// The damping-family operators the Leung code handles: identity and the four
/// single-qubit damping products (indices into the sixteen-operator family,
/// lexicographic order).
pub const LEUNG4_CORRECTABLE: [usize; 5] = [0, 1, 2, 4, 8];

#[derive(Debug, Error)]
pub enum CodesError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("codewords are not orthonormal: max deviation {0:.3e}")]
    NotOrthonormal(f64),
    #[error("recovery operators do not sum to identity: max |ΣR†R - I| = {0:.3e}")]
    IncompleteRecovery(f64),
    #[error("error operator {error_index} is rank-deficient on the codespace (singular value {singular_value:.3e})")]
    DegenerateError {
        error_index: usize,
        singular_value: f64,
    },
    #[error("error image of the codespace has vanishing trace ({0:.3e})")]
    ZeroTrace(f64),
    #[error("polynomial fit failed: {0}")]
    FitFailure(&'static str),
    #[error("parameter {name} = {value} is outside its valid range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

// --- the code type ------------------------------------------------------------

/// An error-correcting code: orthonormal codewords spanning a subspace of an
/// n-qubit register, the projector onto that subspace, and (optionally) a
/// built-in list of recovery operators.
#[derive(Debug, Clone)]
pub struct QecCode {
    n_qubits: usize,
    codewords: Vec<PureState>,
    projector: ComplexMatrix,
    recovery: Option<Vec<ComplexMatrix>>,
}

impl QecCode {
    pub fn new(
        n_qubits: usize,
        codewords: Vec<PureState>,
        recovery: Option<Vec<ComplexMatrix>>,
    ) -> Result<Self, CodesError> {
        let dim = 1usize
            .checked_shl(n_qubits as u32)
            .filter(|&d| d <= MAX_DIM && n_qubits >= 1)
            .ok_or(CodesError::OutOfRange {
                name: "n_qubits",
                value: n_qubits as f64,
            })?;
        if codewords.is_empty() || codewords.len() > dim {
            return Err(CodesError::DimensionMismatch(codewords.len(), dim));
        }
        for w in &codewords {
            if w.dim() != dim {
                return Err(CodesError::DimensionMismatch(w.dim(), dim));
            }
        }
        let mut ortho_dev = 0.0_f64;
        for (i, a) in codewords.iter().enumerate() {
            for (j, b) in codewords.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                ortho_dev = ortho_dev.max((a.inner(b) - expect).norm());
            }
        }
        if ortho_dev > 1e-12 {
            return Err(CodesError::NotOrthonormal(ortho_dev));
        }
        let mut projector = ComplexMatrix::zeros(dim, dim);
        for w in &codewords {
            projector = projector.add(&w.outer(w));
        }
        if let Some(ops) = &recovery {
            let mut sum = ComplexMatrix::zeros(dim, dim);
            for op in ops {
                if op.rows() != dim || op.cols() != dim {
                    return Err(CodesError::DimensionMismatch(op.rows(), dim));
                }
                sum = sum.add(&op.adjoint().matmul(op));
            }
            let dev = max_abs_diff(&sum, &ComplexMatrix::identity(dim));
            if dev > 1e-10 {
                return Err(CodesError::IncompleteRecovery(dev));
            }
        }
        Ok(Self {
            n_qubits,
            codewords,
            projector,
            recovery,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Hilbert-space dimension 2ⁿ.
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Number of codewords (the logical dimension).
    pub fn logical_dim(&self) -> usize {
        self.codewords.len()
    }

    pub fn codewords(&self) -> &[PureState] {
        &self.codewords
    }

    pub fn projector(&self) -> &ComplexMatrix {
        &self.projector
    }

    pub fn recovery(&self) -> Option<&[ComplexMatrix]> {
        self.recovery.as_deref()
    }

    /// Encodes a logical state Σ cᵢ|i⟩ as Σ cᵢ|i_L⟩.
    pub fn encode(&self, logical: &PureState) -> Result<PureState, CodesError> {
        if logical.dim() != self.logical_dim() {
            return Err(CodesError::DimensionMismatch(
                logical.dim(),
                self.logical_dim(),
            ));
        }
        let terms: Vec<(Complex64, &PureState)> = logical
            .amplitudes()
            .iter()
            .zip(&self.codewords)
            .map(|(&c, w)| (c, w))
            .collect();
        Ok(PureState::normalized_sum(&terms)?)
    }

    /// Deterministic random code state: a Haar-random logical state, encoded.
    pub fn random_code_state(&self, seed: u64) -> PureState {
        let logical = sample_pure_state(self.logical_dim(), seed);
        self.encode(&logical).expect("logical dimension matches")
    }

    /// Whether ρ is supported on the codespace: ‖P ρ P − ρ‖_max ≤ tol.
    pub fn in_codespace(&self, rho: &DensityMatrix, tol: f64) -> bool {
        if rho.dim() != self.dim() {
            return false;
        }
        let proj = self.projector.matmul(rho.matrix()).matmul(&self.projector);
        max_abs_diff(&proj, rho.matrix()) <= tol
    }
}

// Wire format: {"n_qubits": n, "codewords": [...], "recovery": [...] | absent}.
#[derive(Serialize, Deserialize)]
struct CodeWire {
    n_qubits: usize,
    codewords: Vec<PureState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    recovery: Option<Vec<ComplexMatrix>>,
}

impl Serialize for QecCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CodeWire {
            n_qubits: self.n_qubits,
            codewords: self.codewords.clone(),
            recovery: self.recovery.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QecCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = CodeWire::deserialize(deserializer)?;
        QecCode::new(wire.n_qubits, wire.codewords, wire.recovery).map_err(D::Error::custom)
    }
}

// --- built-in codes --------------------------------------------------------------

/// Three-qubit repetition code |0_L⟩ = |000⟩, |1_L⟩ = |111⟩ with its four
/// standard recovery operators: R₀ = P_C and, per single flipped qubit, the
/// operator mapping the flipped pair of basis states back to the codewords.
pub fn repetition3() -> QecCode {
    let zero_l = PureState::from_bits(&[0, 0, 0]);
    let one_l = PureState::from_bits(&[1, 1, 1]);
    // R_k = |000⟩⟨e_k| + |111⟩⟨ē_k| where e_k is |000⟩ with qubit k flipped.
    let flips: [(&[u8; 3], &[u8; 3]); 3] = [
        (&[1, 0, 0], &[0, 1, 1]),
        (&[0, 1, 0], &[1, 0, 1]),
        (&[0, 0, 1], &[1, 1, 0]),
    ];
    let mut recovery = vec![zero_l.outer(&zero_l).add(&one_l.outer(&one_l))];
    for (e0, e1) in flips {
        let r = zero_l
            .outer(&PureState::from_bits(e0))
            .add(&one_l.outer(&PureState::from_bits(e1)));
        recovery.push(r);
    }
    QecCode::new(3, vec![zero_l, one_l], Some(recovery)).expect("valid built-in code")
}

/// Four-qubit code |0_L⟩ = (|0000⟩+|1111⟩)/√2, |1_L⟩ = (|0011⟩+|1100⟩)/√2,
/// tailored to single-qubit amplitude damping. No built-in recovery; use
/// [`canonical_recovery`].
pub fn leung4() -> QecCode {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let zero_l = PureState::normalized_sum(&[
        (h, &PureState::from_bits(&[0, 0, 0, 0])),
        (h, &PureState::from_bits(&[1, 1, 1, 1])),
    ])
    .expect("non-degenerate sum");
    let one_l = PureState::normalized_sum(&[
        (h, &PureState::from_bits(&[0, 0, 1, 1])),
        (h, &PureState::from_bits(&[1, 1, 0, 0])),
    ])
    .expect("non-degenerate sum");
    QecCode::new(4, vec![zero_l, one_l], None).expect("valid built-in code")
}

// --- codespace blocks -----------------------------------------------------------

/// The L×L block ⟨i_L| op |j_L⟩ of an operator between codewords.
pub fn codespace_block(code: &QecCode, op: &ComplexMatrix) -> Result<ComplexMatrix, CodesError> {
    if op.rows() != code.dim() || op.cols() != code.dim() {
        return Err(CodesError::DimensionMismatch(op.rows(), code.dim()));
    }
    let l = code.logical_dim();
    let images: Vec<Vec<Complex64>> = code.codewords().iter().map(|w| w.apply(op)).collect();
    Ok(ComplexMatrix::from_fn(l, l, |i, j| {
        code.codewords()[i]
            .amplitudes()
            .iter()
            .zip(&images[j])
            .map(|(a, b)| a.conj() * b)
            .sum()
    }))
}

/// Lifts an L×L codeword-basis block back into the full space:
/// Σ_ij B_ij |i_L⟩⟨j_L|.
pub fn lift_block(code: &QecCode, block: &ComplexMatrix) -> Result<ComplexMatrix, CodesError> {
    let l = code.logical_dim();
    if block.rows() != l || block.cols() != l {
        return Err(CodesError::DimensionMismatch(block.rows(), l));
    }
    let d = code.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for i in 0..l {
        for j in 0..l {
            let b = block.get(i, j);
            if b.norm_sqr() == 0.0 {
                continue;
            }
            let outer = code.codewords()[i].outer(&code.codewords()[j]);
            out = out.add(&outer.scale(b));
        }
    }
    Ok(out)
}

// --- exact Knill-Laflamme check ---------------------------------------------------

/// Result of the exact correctability check: the coefficient matrix α_km, the
/// worst violation of the block structure ⟨i_L|A_k†A_m|j_L⟩ = δ_ij α_km, and
/// whether that violation is within tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct KlReport {
    pub alpha: ComplexMatrix,
    pub residual: f64,
    pub exact: bool,
}

/// Checks whether an error list is exactly correctable on a code: every
/// codespace block of A_k†A_m must be a multiple of the identity, with the
/// same multiple α_km across codewords.
pub fn kl_check_exact(
    code: &QecCode,
    errors: &[ComplexMatrix],
    tol: f64,
) -> Result<KlReport, CodesError> {
    let k = errors.len();
    if k == 0 {
        return Err(CodesError::DimensionMismatch(0, 1));
    }
    let d = code.dim();
    let l = code.logical_dim();
    // Images w_k^(i) = A_k |i_L⟩; block_km[i][j] = ⟨w_k^(i), w_m^(j)⟩.
    let mut images = Vec::with_capacity(k);
    for a in errors {
        if a.rows() != d || a.cols() != d {
            return Err(CodesError::DimensionMismatch(a.rows(), d));
        }
        let per_codeword: Vec<Vec<Complex64>> =
            code.codewords().iter().map(|w| w.apply(a)).collect();
        images.push(per_codeword);
    }
    let dot = |x: &[Complex64], y: &[Complex64]| -> Complex64 {
        x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
    };
    let mut residual = 0.0_f64;
    let alpha = ComplexMatrix::from_fn(k, k, |ki, mi| {
        let mut diag = Vec::with_capacity(l);
        for i in 0..l {
            for j in 0..l {
                let entry = dot(&images[ki][i], &images[mi][j]);
                if i == j {
                    diag.push(entry);
                } else {
                    residual = residual.max(entry.norm());
                }
            }
        }
        // Codeword-independence: all diagonal entries must agree.
        for a in 1..l {
            residual = residual.max((diag[a] - diag[0]).norm());
        }
        diag.iter().sum::<Complex64>() / l as f64
    });
    Ok(KlReport {
        alpha,
        residual,
        exact: residual <= tol,
    })
}

// --- approximate Knill-Laflamme decomposition ---------------------------------------

/// Split of each codespace block P A_j†A_k P into a scalar part α_jk (the
/// low-order Taylor truncation of the block's normalized trace in the noise
/// parameter) and a residual matrix B̂_jk on the codespace.
#[derive(Debug, Clone)]
pub struct ApproxKlReport {
    /// α_jk as a K×K matrix.
    pub alpha: ComplexMatrix,
    /// Codeword-basis residual blocks B̂_jk = block_jk(γ) − α_jk·I, keyed by
    /// operator pair.
    pub b_hat: BTreeMap<(usize, usize), ComplexMatrix>,
    pub truncation_order: usize,
    /// Worst full-space deviation ‖P A_j†A_k P − α_jk P − lift(B̂_jk)‖_max —
    /// a consistency check of the decomposition, expected near zero.
    pub residual: f64,
}

/// Number of γ-samples used for the polynomial fit; resolves polynomial
/// families up to degree five exactly.
const FIT_SAMPLES: usize = 6;

/// Decomposes each block of an error family at noise strength γ: fits the
/// normalized block trace f_jk(γ') = Tr(block_jk)/L on the geometric sample
/// grid {γ/2⁵, …, γ/2, γ}, truncates the fitted polynomial at the given
/// order to obtain α_jk, and reports B̂_jk = block_jk(γ) − α_jk·I.
///
/// The family is any map γ' ↦ operator list that is polynomial (or smooth)
/// in γ'; families of degree above five are aliased and rejected only via
/// `order`, which must be ≤ 5.
pub fn kl_decompose_approx(
    code: &QecCode,
    family: &dyn Fn(f64) -> Result<Vec<ComplexMatrix>, QuantumError>,
    gamma: f64,
    order: usize,
) -> Result<ApproxKlReport, CodesError> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(CodesError::OutOfRange {
            name: "gamma",
            value: gamma,
        });
    }
    if order >= FIT_SAMPLES {
        return Err(CodesError::FitFailure(
            "truncation order exceeds what the sample grid resolves (max 5)",
        ));
    }
    let nodes: Vec<f64> = (0..FIT_SAMPLES)
        .map(|i| gamma / (1 << (FIT_SAMPLES - 1 - i)) as f64)
        .collect();

    let l = code.logical_dim();
    let d = code.dim();
    let block_of = |a: &ComplexMatrix, b: &ComplexMatrix| -> Result<ComplexMatrix, CodesError> {
        // block = ⟨i_L| A† B |j_L⟩ via images, avoiding d×d products.
        let ia: Vec<Vec<Complex64>> = code.codewords().iter().map(|w| w.apply(a)).collect();
        let ib: Vec<Vec<Complex64>> = code.codewords().iter().map(|w| w.apply(b)).collect();
        Ok(ComplexMatrix::from_fn(l, l, |i, j| {
            ia[i].iter().zip(&ib[j]).map(|(x, y)| x.conj() * y).sum()
        }))
    };

    // Evaluate the family across the grid; f[j][k][s] = Tr(block_jk(γ_s))/L.
    let mut k_count = 0usize;
    let mut traces: Vec<Vec<Vec<Complex64>>> = Vec::new();
    for (s, &g) in nodes.iter().enumerate() {
        let ops = family(g)?;
        if s == 0 {
            k_count = ops.len();
            if k_count == 0 {
                return Err(CodesError::FitFailure("family produced no operators"));
            }
            traces = vec![vec![vec![Complex64::new(0.0, 0.0); FIT_SAMPLES]; k_count]; k_count];
        } else if ops.len() != k_count {
            return Err(CodesError::FitFailure(
                "family changes operator count across the grid",
            ));
        }
        for op in &ops {
            if op.rows() != d || op.cols() != d {
                return Err(CodesError::DimensionMismatch(op.rows(), d));
            }
        }
        for j in 0..k_count {
            for k in 0..k_count {
                let block = block_of(&ops[j], &ops[k])?;
                traces[j][k][s] = block.trace() / l as f64;
            }
        }
    }

    // Final evaluation at γ itself (the last node).
    let ops_at_gamma = family(gamma)?;

    let mut alpha = ComplexMatrix::zeros(k_count, k_count);
    let mut b_hat = BTreeMap::new();
    let mut residual = 0.0_f64;
    for j in 0..k_count {
        for k in 0..k_count {
            let coeffs = monomial_fit(&nodes, &traces[j][k]);
            let a_jk: Complex64 = (0..=order)
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, i| acc * gamma + coeffs[i]);
            alpha.set(j, k, a_jk);
            let block = block_of(&ops_at_gamma[j], &ops_at_gamma[k])?;
            let mut b = block.clone();
            for i in 0..l {
                b.set(i, i, b.get(i, i) - a_jk);
            }
            // Consistency in the full space: P A†A' P vs α P + lift(B̂).
            let full = code
                .projector()
                .matmul(&ops_at_gamma[j].adjoint().matmul(&ops_at_gamma[k]))
                .matmul(code.projector());
            let rebuilt = code.projector().scale(a_jk).add(&lift_block(code, &b)?);
            residual = residual.max(max_abs_diff(&full, &rebuilt));
            b_hat.insert((j, k), b);
        }
    }
    Ok(ApproxKlReport {
        alpha,
        b_hat,
        truncation_order: order,
        residual,
    })
}

/// Monomial coefficients of the interpolating polynomial through
/// (nodes[i], values[i]), via Newton divided differences.
fn monomial_fit(nodes: &[f64], values: &[Complex64]) -> Vec<Complex64> {
    let n = nodes.len();
    let mut dd: Vec<Complex64> = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level]);
        }
    }
    // Expand Newton form Σ dd[j] Π_{m<j}(x − x_m) into monomials.
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for j in (0..n).rev() {
        // coeffs ← coeffs·(x − x_j) + dd[j]
        for i in (1..n).rev() {
            coeffs[i] = coeffs[i - 1] - coeffs[i] * nodes[j];
        }
        coeffs[0] = dd[j] - coeffs[0] * nodes[j];
    }
    coeffs
}

// --- detection range ---------------------------------------------------------------

/// Extreme eigenvalues (λ_min, λ_max) of the codespace block of A†A — the
/// range of the probability that the error is detected, over code states.
pub fn detection_range(
    code: &QecCode,
    error: &ComplexMatrix,
) -> Result<(f64, f64), CodesError> {
    if error.rows() != code.dim() || error.cols() != code.dim() {
        return Err(CodesError::DimensionMismatch(error.rows(), code.dim()));
    }
    let block = codespace_block(code, &error.adjoint().matmul(error))?;
    let eig = block.symmetrized().hermitian_eig(1e-13)?;
    let min = eig.eigenvalues[0];
    let max = eig.eigenvalues[eig.eigenvalues.len() - 1];
    Ok((min, max))
}

// --- canonical recovery --------------------------------------------------------------

/// Builds recovery operators for an error list by polar decomposition: each
/// A_k P_C = U_k H_k yields the isometry U_k from the codespace onto the
/// k-th error subspace, and R_k = U_k† maps that subspace back. Error
/// subspaces are orthogonalized sequentially against those already claimed;
/// a final projector onto the unclaimed complement (if any) completes the
/// set, so Σ R†R = I.
///
/// For a code that corrects the list exactly, composing noise restricted to
/// the list with this recovery is the identity on code states.
pub fn canonical_recovery(
    code: &QecCode,
    errors: &[ComplexMatrix],
) -> Result<Vec<ComplexMatrix>, CodesError> {
    let d = code.dim();
    let l = code.logical_dim();
    let mut claimed = ComplexMatrix::zeros(d, d); // Q = Σ U_k U_k†
    let mut recovery = Vec::with_capacity(errors.len() + 1);
    for (error_index, a) in errors.iter().enumerate() {
        if a.rows() != d || a.cols() != d {
            return Err(CodesError::DimensionMismatch(a.rows(), d));
        }
        let free = ComplexMatrix::identity(d).sub(&claimed);
        let m = free.matmul(a).matmul(code.projector());
        // Singular pairs of m via its Gram matrix m†m = V Σ² V†.
        let eig = m.adjoint().matmul(&m).symmetrized().hermitian_eig(1e-13)?;
        let mut u_cols: Vec<Vec<Complex64>> = Vec::with_capacity(l);
        let mut v_cols: Vec<Vec<Complex64>> = Vec::with_capacity(l);
        for rank in 0..l {
            let idx = d - 1 - rank; // eigenvalues ascend; take the top L
            let sigma = eig.eigenvalues[idx].max(0.0).sqrt();
            if sigma < DEGENERACY_TOL {
                return Err(CodesError::DegenerateError {
                    error_index,
                    singular_value: sigma,
                });
            }
            let v = eig.eigenvector(idx);
            let u: Vec<Complex64> = m.mul_vec(&v).into_iter().map(|x| x / sigma).collect();
            u_cols.push(u);
            v_cols.push(v);
        }
        // U = Σ u_i v_i†; R = U†.
        let u = ComplexMatrix::from_fn(d, d, |r, c| {
            (0..l).map(|i| u_cols[i][r] * v_cols[i][c].conj()).sum()
        });
        claimed = claimed.add(&u.matmul(&u.adjoint()));
        recovery.push(u.adjoint());
    }
    let leftover = ComplexMatrix::identity(d).sub(&claimed);
    if leftover.max_abs() > 1e-10 {
        recovery.push(leftover);
    }
    // The construction should complete the identity; verify rather than trust.
    let mut sum = ComplexMatrix::zeros(d, d);
    for r in &recovery {
        sum = sum.add(&r.adjoint().matmul(r));
    }
    let dev = max_abs_diff(&sum, &ComplexMatrix::identity(d));
    if dev > 1e-10 {
        return Err(CodesError::IncompleteRecovery(dev));
    }
    Ok(recovery)
}

// --- error images of the codespace -----------------------------------------------------

/// The normalized image of the codespace under one error operator:
/// A_j P_C A_j† / Tr(·) — the mixed state a syndrome measurement must
/// discriminate.
#[derive(Debug, Clone)]
pub struct StabilizerMixedState {
    pub error_index: usize,
    pub state: DensityMatrix,
}

pub fn stabilizer_mixed_states(
    code: &QecCode,
    errors: &[ComplexMatrix],
) -> Result<Vec<StabilizerMixedState>, CodesError> {
    let d = code.dim();
    errors
        .iter()
        .enumerate()
        .map(|(error_index, a)| {
            if a.rows() != d || a.cols() != d {
                return Err(CodesError::DimensionMismatch(a.rows(), d));
            }
            let image = a.matmul(code.projector()).matmul(&a.adjoint());
            let t = image.trace().re;
            if t <= 1e-14 {
                return Err(CodesError::ZeroTrace(t));
            }
            let state = DensityMatrix::new(image.scale(Complex64::new(1.0 / t, 0.0)))?;
            Ok(StabilizerMixedState { error_index, state })
        })
        .collect()
}

/// Orthonormal bases of the subspaces S_k = Span{A_k|i_L⟩}, one per error,
/// with the worst overlap between vectors of distinct subspaces. For an
/// exactly correctable list the subspaces are mutually orthogonal and the
/// cross-overlap vanishes.
#[derive(Debug, Clone)]
pub struct SubspaceDecomposition {
    pub bases: Vec<Vec<PureState>>,
    pub max_cross_overlap: f64,
}

pub fn subspace_decomposition(
    code: &QecCode,
    errors: &[ComplexMatrix],
) -> Result<SubspaceDecomposition, CodesError> {
    let d = code.dim();
    let mut bases: Vec<Vec<PureState>> = Vec::with_capacity(errors.len());
    for a in errors {
        if a.rows() != d || a.cols() != d {
            return Err(CodesError::DimensionMismatch(a.rows(), d));
        }
        let mut basis: Vec<Vec<Complex64>> = Vec::new();
        let mut total_mass = 0.0_f64;
        for w in code.codewords() {
            let mut v = w.apply(a);
            total_mass += v.iter().map(|x| x.norm_sqr()).sum::<f64>();
            // Gram-Schmidt against the basis so far (two passes for stability).
            for _ in 0..2 {
                for b in &basis {
                    let dot: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= dot * bi;
                    }
                }
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-10 {
                basis.push(v.into_iter().map(|x| x / norm).collect());
            }
        }
        if basis.is_empty() {
            return Err(CodesError::ZeroTrace(total_mass));
        }
        bases.push(
            basis
                .into_iter()
                .map(|v| PureState::new(v).expect("normalized by construction"))
                .collect(),
        );
    }
    let mut max_cross = 0.0_f64;
    for (k, bk) in bases.iter().enumerate() {
        for bm in bases.iter().skip(k + 1) {
            for x in bk {
                for y in bm {
                    max_cross = max_cross.max(x.inner(y).norm());
                }
            }
        }
    }
    Ok(SubspaceDecomposition {
        bases,
        max_cross_overlap: max_cross,
    })
}
