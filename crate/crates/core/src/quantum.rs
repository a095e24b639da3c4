//! States, Kraus channels and measurements.
//!
//! Channels are kept as explicit Kraus operator lists. A channel may be
//! `complete` (trace preserving, ΣA†A = I) or a restricted sub-channel that
//! keeps only some operators of a larger family — applying a restricted
//! channel renormalises the output and reports the discarded weight, which is
//! how the correctable part of a noise process is isolated.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{max_abs_diff, ComplexMatrix, LinalgError, HERMITICITY_TOL, MAX_DIM};

/// Eigenvalues of a density matrix may undershoot zero by at most this much;
/// anything in [-PSD_TOL, 0) is clipped to zero on construction.
pub const PSD_TOL: f64 = 1e-10;

/// Outcomes with probability below this have no meaningful posterior state.
pub const NULL_POSTERIOR_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("state vector norm is {0}, expected 1 within 1e-10")]
    NotNormalized(f64),
    #[error("matrix is not Hermitian: max |M - M†| = {0:.3e}")]
    NotHermitian(f64),
    #[error("density matrix trace is {0}, expected 1 within 1e-10")]
    NotUnitTrace(f64),
    #[error("matrix has eigenvalue {0:.3e} below the -1e-10 positivity floor")]
    NotPositive(f64),
    #[error("parameter {name} = {value} is outside its valid range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operator list is empty, non-square, or mixes dimensions")]
    MalformedOperators,
    #[error("complete channel is not trace preserving: max |ΣA†A - I| = {0:.3e}")]
    NotTracePreserving(f64),
    #[error("restricted channel overshoots the identity: min eig(I - ΣA†A) = {0:.3e}")]
    NotSubnormalized(f64),
    #[error("POVM does not resolve the identity: max |ΣΠ - I| = {0:.3e}")]
    IncompleteResolution(f64),
    #[error("restricted channel annihilates the state (output trace {0:.3e})")]
    ZeroTrace(f64),
    #[error("tensor power would have dimension {0}, above the {MAX_DIM} cap")]
    DimensionCap(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn validate_prob(name: &'static str, p: f64) -> Result<(), QuantumError> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(QuantumError::OutOfRange { name, value: p });
    }
    Ok(())
}

// --- pure states ------------------------------------------------------------

/// Normalised state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    /// Accepts a vector whose norm is within 1e-10 of one, then stores it
    /// exactly normalised.
    pub fn new(amps: Vec<Complex64>) -> Result<Self, QuantumError> {
        if amps.is_empty() || amps.len() > MAX_DIM {
            return Err(QuantumError::DimensionMismatch(amps.len(), MAX_DIM));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let norm_dev = (norm - 1.0).abs();
        if norm_dev.is_nan() || norm_dev > 1e-10 {
            return Err(QuantumError::NotNormalized(norm));
        }
        Ok(Self {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Computational basis state |k⟩ in the given dimension.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim && dim <= MAX_DIM);
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    /// Product basis state from qubit values, first qubit most significant:
    /// `from_bits(&[1, 0, 0])` is |100⟩, index 4 of an 8-dimensional space.
    pub fn from_bits(bits: &[u8]) -> Self {
        let dim = 1usize << bits.len();
        let idx = bits.iter().fold(0usize, |acc, &b| {
            debug_assert!(b <= 1);
            (acc << 1) | b as usize
        });
        Self::basis(dim, idx)
    }

    /// Normalised superposition Σ cᵢ |ψᵢ⟩. Fails if the sum cancels to
    /// (numerically) nothing.
    pub fn normalized_sum(terms: &[(Complex64, &PureState)]) -> Result<Self, QuantumError> {
        let dim = terms
            .first()
            .map(|(_, s)| s.dim())
            .ok_or(QuantumError::MalformedOperators)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        for (c, s) in terms {
            if s.dim() != dim {
                return Err(QuantumError::DimensionMismatch(s.dim(), dim));
            }
            for (a, b) in amps.iter_mut().zip(s.amplitudes()) {
                *a += c * b;
            }
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 1e-12 {
            return Err(QuantumError::NotNormalized(norm));
        }
        Ok(Self {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Inner product ⟨self|other⟩.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Outer product |self⟩⟨other|.
    pub fn outer(&self, other: &PureState) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), other.dim(), |i, j| {
            self.amps[i] * other.amps[j].conj()
        })
    }

    /// Density matrix |ψ⟩⟨ψ|.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::new(self.outer(self)).expect("projector of a normalised state")
    }

    /// Applies an operator, returning the (unnormalised) image vector.
    pub fn apply(&self, op: &ComplexMatrix) -> Vec<Complex64> {
        op.mul_vec(&self.amps)
    }
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(f64, f64)> = self.amps.iter().map(|a| (a.re, a.im)).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs = Vec::<(f64, f64)>::deserialize(deserializer)?;
        let amps = pairs
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        PureState::new(amps).map_err(D::Error::custom)
    }
}

// --- density matrices --------------------------------------------------------

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
///
/// The spectrum found during validation is cached; entropy routines read it
/// instead of re-diagonalising.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    m: ComplexMatrix,
    spectrum: Vec<f64>,
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self, QuantumError> {
        if !m.is_square() {
            return Err(QuantumError::DimensionMismatch(m.rows(), m.cols()));
        }
        let dev = m.hermiticity_deviation();
        if dev.is_nan() || dev > HERMITICITY_TOL {
            return Err(QuantumError::NotHermitian(dev));
        }
        let sym = m.symmetrized();
        let tr = sym.trace().re;
        let tr_dev = (tr - 1.0).abs();
        if tr_dev.is_nan() || tr_dev > 1e-10 {
            return Err(QuantumError::NotUnitTrace(tr));
        }
        let eig = sym.hermitian_eig(1e-13)?;
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(QuantumError::NotPositive(min));
        }
        if min < 0.0 {
            // Roundoff undershoot: clip to the PSD cone and keep the clipped
            // spectrum as the state's spectrum.
            let clipped = eig.apply_fn(|l| l.max(0.0));
            let spectrum = eig.eigenvalues.iter().map(|l| l.max(0.0)).collect();
            return Ok(Self {
                m: clipped,
                spectrum,
            });
        }
        Ok(Self {
            m: sym,
            spectrum: eig.eigenvalues,
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let m = ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0));
        Self::new(m).expect("maximally mixed state is valid")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    /// Eigenvalues ascending, as validated (clipped) at construction.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn purity(&self) -> f64 {
        self.spectrum.iter().map(|l| l * l).sum()
    }

    /// ⟨ψ|ρ|ψ⟩.
    pub fn expectation(&self, psi: &PureState) -> f64 {
        assert_eq!(self.dim(), psi.dim());
        let v = self.m.mul_vec(psi.amplitudes());
        psi.amplitudes()
            .iter()
            .zip(&v)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }
}

// Wire format: the matrix itself; validation re-runs on ingestion.
impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.m.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(deserializer)?;
        DensityMatrix::new(m).map_err(D::Error::custom)
    }
}

// --- Pauli building blocks ----------------------------------------------------

pub fn pauli_i() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn pauli_x() -> ComplexMatrix {
    let o = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    ComplexMatrix::new(2, 2, vec![z, o, o, z]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    let z = Complex64::new(0.0, 0.0);
    ComplexMatrix::new(2, 2, vec![z, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), z])
        .unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    let z = Complex64::new(0.0, 0.0);
    ComplexMatrix::new(2, 2, vec![Complex64::new(1.0, 0.0), z, z, Complex64::new(-1.0, 0.0)])
        .unwrap()
}

/// n-qubit operator with X on the listed qubit positions (0-based, first
/// qubit most significant) and identity elsewhere.
fn x_string(n: usize, xs: &[usize]) -> ComplexMatrix {
    let mut out = if xs.contains(&0) { pauli_x() } else { pauli_i() };
    for q in 1..n {
        let f = if xs.contains(&q) { pauli_x() } else { pauli_i() };
        out = out.kron(&f).expect("within dimension cap");
    }
    out
}

// --- channels ------------------------------------------------------------------

/// Result of pushing a state through a channel: the (re)normalised output and
/// the probability weight the channel discarded (zero for complete channels).
#[derive(Debug, Clone)]
pub struct ChannelOutput {
    pub state: DensityMatrix,
    pub leakage: f64,
}

/// A quantum operation given by Kraus operators.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    ops: Vec<ComplexMatrix>,
    complete: bool,
}

impl KrausChannel {
    /// Validates the operator sum: ΣA†A = I for a complete channel, and
    /// ΣA†A ≼ I for a restricted one.
    pub fn new(ops: Vec<ComplexMatrix>, complete: bool) -> Result<Self, QuantumError> {
        let dim = match ops.first() {
            Some(op) if op.is_square() => op.rows(),
            _ => return Err(QuantumError::MalformedOperators),
        };
        if ops.iter().any(|op| op.rows() != dim || op.cols() != dim) {
            return Err(QuantumError::MalformedOperators);
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for op in &ops {
            sum = sum.add(&op.adjoint().matmul(op));
        }
        let id = ComplexMatrix::identity(dim);
        if complete {
            let dev = max_abs_diff(&sum, &id);
            if dev.is_nan() || dev > 1e-10 {
                return Err(QuantumError::NotTracePreserving(dev));
            }
        } else {
            let slack = id.sub(&sum);
            let eig = slack.symmetrized().hermitian_eig(1e-12)?;
            let min = eig.eigenvalues[0];
            if min < -PSD_TOL {
                return Err(QuantumError::NotSubnormalized(min));
            }
        }
        Ok(Self { ops, complete })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            ops: vec![ComplexMatrix::identity(dim)],
            complete: true,
        }
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Single-qubit amplitude damping with decay probability γ:
    /// A₀ = diag(1, √(1-γ)), A₁ = √γ |0⟩⟨1|.
    pub fn amplitude_damping(gamma: f64) -> Result<Self, QuantumError> {
        validate_prob("gamma", gamma)?;
        let z = Complex64::new(0.0, 0.0);
        let a0 = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new(1.0, 0.0),
                z,
                z,
                Complex64::new((1.0 - gamma).sqrt(), 0.0),
            ],
        )
        .unwrap();
        let a1 = ComplexMatrix::new(2, 2, vec![z, Complex64::new(gamma.sqrt(), 0.0), z, z]).unwrap();
        Self::new(vec![a0, a1], true)
    }

    /// Single-qubit depolarizing channel
    /// {√(1-3p/4) I, √(p/4) X, √(p/4) Y, √(p/4) Z}.
    pub fn depolarizing(p: f64) -> Result<Self, QuantumError> {
        validate_prob("p", p)?;
        let w0 = Complex64::new((1.0 - 3.0 * p / 4.0).sqrt(), 0.0);
        let w = Complex64::new((p / 4.0).sqrt(), 0.0);
        Self::new(
            vec![
                pauli_i().scale(w0),
                pauli_x().scale(w),
                pauli_y().scale(w),
                pauli_z().scale(w),
            ],
            true,
        )
    }

    /// Single-qubit dephasing channel {√(1-p/2) I, √(p/2) Z}; off-diagonals
    /// shrink by the factor 1-p.
    pub fn dephasing(p: f64) -> Result<Self, QuantumError> {
        validate_prob("p", p)?;
        let w0 = Complex64::new((1.0 - p / 2.0).sqrt(), 0.0);
        let w1 = Complex64::new((p / 2.0).sqrt(), 0.0);
        Self::new(vec![pauli_i().scale(w0), pauli_z().scale(w1)], true)
    }

    /// Independent bit flips on three qubits, written as eight 8×8 operators
    /// ordered by flip pattern: identity; single flips on qubits 1, 2, 3;
    /// double flips on (1,2), (1,3), (2,3); triple flip. The squared weights
    /// are the binomial probabilities (1-p)³, p(1-p)², p²(1-p), p³.
    pub fn bit_flip_enlarged(p: f64) -> Result<Self, QuantumError> {
        validate_prob("p", p)?;
        let q = 1.0 - p;
        let patterns: [(&[usize], f64); 8] = [
            (&[], q * q * q),
            (&[0], p * q * q),
            (&[1], p * q * q),
            (&[2], p * q * q),
            (&[0, 1], p * p * q),
            (&[0, 2], p * p * q),
            (&[1, 2], p * p * q),
            (&[0, 1, 2], p * p * p),
        ];
        let ops = patterns
            .iter()
            .map(|(xs, w)| x_string(3, xs).scale(Complex64::new(w.sqrt(), 0.0)))
            .collect();
        Self::new(ops, true)
    }

    /// n-fold tensor power of the channel. Operator index order is
    /// lexicographic in the factor indices (first factor most significant),
    /// so for a two-operator channel the product operator at index k applies
    /// factor (k >> (n-1-i)) & 1 to qubit i.
    pub fn tensor_power(&self, n: usize) -> Result<Self, QuantumError> {
        if n == 0 {
            return Err(QuantumError::OutOfRange {
                name: "n",
                value: 0.0,
            });
        }
        let dim = self.dim().checked_pow(n as u32).unwrap_or(usize::MAX);
        if dim > MAX_DIM {
            return Err(QuantumError::DimensionCap(dim));
        }
        let k = self.ops.len();
        let count = k.pow(n as u32);
        let mut ops = Vec::with_capacity(count);
        for idx in 0..count {
            // Decode idx as n digits base k, most significant first.
            let mut digits = vec![0usize; n];
            let mut rem = idx;
            for d in (0..n).rev() {
                digits[d] = rem % k;
                rem /= k;
            }
            let mut op = self.ops[digits[0]].clone();
            for &digit in &digits[1..] {
                op = op.kron(&self.ops[digit])?;
            }
            ops.push(op);
        }
        Self::new(ops, self.complete)
    }

    /// Sub-channel keeping only the listed operators, flagged restricted.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self, QuantumError> {
        let ops = indices
            .iter()
            .map(|&i| {
                self.ops
                    .get(i)
                    .cloned()
                    .ok_or(QuantumError::DimensionMismatch(i, self.ops.len()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ops, false)
    }

    /// Applies the channel. A complete channel returns the output directly
    /// (leakage 0); a restricted channel renormalises by the output trace and
    /// reports the discarded weight as leakage.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<ChannelOutput, QuantumError> {
        if rho.dim() != self.dim() {
            return Err(QuantumError::DimensionMismatch(rho.dim(), self.dim()));
        }
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        for op in &self.ops {
            out = out.add(&op.matmul(rho.matrix()).matmul(&op.adjoint()));
        }
        if self.complete {
            Ok(ChannelOutput {
                state: DensityMatrix::new(out)?,
                leakage: 0.0,
            })
        } else {
            let t = out.trace().re;
            if t <= NULL_POSTERIOR_THRESHOLD {
                return Err(QuantumError::ZeroTrace(t));
            }
            let state = DensityMatrix::new(out.scale(Complex64::new(1.0 / t, 0.0)))?;
            Ok(ChannelOutput {
                state,
                leakage: (1.0 - t).max(0.0),
            })
        }
    }

    /// Treats the operators as a measurement instrument: outcome k occurs
    /// with probability Tr(M_k ρ M_k†) and leaves M_k ρ M_k† / p_k behind.
    /// Outcomes below the posterior threshold report no posterior.
    pub fn measure(&self, rho: &DensityMatrix) -> Result<Vec<MeasurementOutcome>, QuantumError> {
        if rho.dim() != self.dim() {
            return Err(QuantumError::DimensionMismatch(rho.dim(), self.dim()));
        }
        self.ops
            .iter()
            .enumerate()
            .map(|(index, op)| {
                let img = op.matmul(rho.matrix()).matmul(&op.adjoint());
                let p = img.trace().re.max(0.0);
                let posterior = if p > NULL_POSTERIOR_THRESHOLD {
                    Some(DensityMatrix::new(img.scale(Complex64::new(1.0 / p, 0.0)))?)
                } else {
                    None
                };
                Ok(MeasurementOutcome {
                    index,
                    probability: p,
                    posterior,
                })
            })
            .collect()
    }
}

// Wire format: {"dim": d, "operators": [matrix, ...], "complete": bool}.
#[derive(Serialize, Deserialize)]
struct ChannelWire {
    dim: usize,
    operators: Vec<ComplexMatrix>,
    complete: bool,
}

impl Serialize for KrausChannel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ChannelWire {
            dim: self.dim(),
            operators: self.ops.clone(),
            complete: self.complete,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for KrausChannel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = ChannelWire::deserialize(deserializer)?;
        if wire.operators.iter().any(|op| op.rows() != wire.dim) {
            return Err(D::Error::custom(format!(
                "declared dim {} does not match the operators",
                wire.dim
            )));
        }
        KrausChannel::new(wire.operators, wire.complete).map_err(D::Error::custom)
    }
}

// --- measurement ------------------------------------------------------------------

/// One branch of a measurement.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub index: usize,
    pub probability: f64,
    /// Post-measurement state; `None` when the branch probability is below
    /// [`NULL_POSTERIOR_THRESHOLD`].
    pub posterior: Option<DensityMatrix>,
}

/// Positive operator-valued measure: Hermitian PSD elements resolving the
/// identity.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self, QuantumError> {
        let dim = match elements.first() {
            Some(e) if e.is_square() => e.rows(),
            _ => return Err(QuantumError::MalformedOperators),
        };
        if elements.iter().any(|e| e.rows() != dim || e.cols() != dim) {
            return Err(QuantumError::MalformedOperators);
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for e in &elements {
            let dev = e.hermiticity_deviation();
            if dev.is_nan() || dev > HERMITICITY_TOL {
                return Err(QuantumError::NotHermitian(dev));
            }
            let eig = e.symmetrized().hermitian_eig(1e-12)?;
            if eig.eigenvalues[0] < -PSD_TOL {
                return Err(QuantumError::NotPositive(eig.eigenvalues[0]));
            }
            sum = sum.add(e);
        }
        let dev = max_abs_diff(&sum, &ComplexMatrix::identity(dim));
        if dev.is_nan() || dev > 1e-10 {
            return Err(QuantumError::IncompleteResolution(dev));
        }
        Ok(Self { elements })
    }

    /// Projectors onto the computational basis.
    pub fn computational(dim: usize) -> Self {
        let elements = (0..dim)
            .map(|k| {
                let s = PureState::basis(dim, k);
                s.outer(&s)
            })
            .collect();
        Self::new(elements).expect("basis projectors resolve the identity")
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    /// Measures the POVM: p_k = Tr(Π_k ρ), posterior √Π_k ρ √Π_k / p_k.
    pub fn measure(&self, rho: &DensityMatrix) -> Result<Vec<MeasurementOutcome>, QuantumError> {
        if rho.dim() != self.dim() {
            return Err(QuantumError::DimensionMismatch(rho.dim(), self.dim()));
        }
        self.elements
            .iter()
            .enumerate()
            .map(|(index, e)| {
                let p = e.matmul(rho.matrix()).trace().re.max(0.0);
                let posterior = if p > NULL_POSTERIOR_THRESHOLD {
                    let root = e.symmetrized().hermitian_eig(1e-12)?.apply_fn(|l| l.max(0.0).sqrt());
                    let img = root.matmul(rho.matrix()).matmul(&root);
                    Some(DensityMatrix::new(img.scale(Complex64::new(1.0 / p, 0.0)))?)
                } else {
                    None
                };
                Ok(MeasurementOutcome {
                    index,
                    probability: p,
                    posterior,
                })
            })
            .collect()
    }
}

// Wire format mirrors the channel: {"dim": d, "elements": [matrix, ...]}.
#[derive(Serialize, Deserialize)]
struct PovmWire {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl Serialize for Povm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PovmWire {
            dim: self.dim(),
            elements: self.elements.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Povm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = PovmWire::deserialize(deserializer)?;
        if wire.elements.iter().any(|e| e.rows() != wire.dim) {
            return Err(D::Error::custom(format!(
                "declared dim {} does not match the elements",
                wire.dim
            )));
        }
        Povm::new(wire.elements).map_err(D::Error::custom)
    }
}

// --- random states -------------------------------------------------------------

/// Haar-random pure state from a seeded generator: 2·dim standard normals,
/// packed into complex amplitudes and normalised. Deterministic per seed.
pub fn sample_pure_state(dim: usize, seed: u64) -> PureState {
    assert!((1..=MAX_DIM).contains(&dim));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_state(dim, &mut rng)
}

/// Same as [`sample_pure_state`] but drawing from a caller-owned generator.
pub fn haar_state(dim: usize, rng: &mut impl Rng) -> PureState {
    loop {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return PureState {
                amps: amps.into_iter().map(|a| a / norm).collect(),
            };
        }
    }
}

/// Random unitary built by Gram–Schmidt on a complex Gaussian matrix
/// (Haar-distributed up to column phases, which is all the sweeps here need).
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!((1..=MAX_DIM).contains(&dim));
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        // Two orthogonalisation passes keep the columns orthonormal to
        // machine precision even for nearly dependent draws.
        for _ in 0..2 {
            for u in &cols {
                let dot: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= dot * y;
                }
            }
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            cols.push(v);
        }
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}
