//! One full error-correction cycle with its entropy ledger.
//!
//! A cycle is: noise acts on an encoded state, a syndrome measurement
//! identifies what happened, a recovery operation undoes it, and the
//! syndrome record is erased. Every entropy flow in that story is a number
//! this module computes — the entropy the noise adds, the cost of erasing
//! the record, the exchange entropy of the instrument — together with the
//! inequalities the ledger must satisfy, each evaluated numerically at a
//! stated tolerance and reported as a named verdict, never assumed.
//!
//! The module also hosts the two supporting sweeps: the single-qubit
//! damping sweep that locates where noise stops raising entropy, and the
//! detection-probability classifier that splits an error family into
//! correctable and non-correctable members by their leading power law.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{detection_range, CodesError, QecCode};
use crate::entropy::{entropy_exchange, shannon, von_neumann, EntropyError, LogBase, WMatrix};
use crate::linalg::{max_abs_diff, ComplexMatrix, LinalgError};
use crate::quantum::{DensityMatrix, KrausChannel, PureState, QuantumError};

/// Largest tolerated deviation of the input from its codespace projection.
pub const CODESPACE_TOL: f64 = 1e-8;

/// Slack allowed when an inequality verdict is evaluated.
pub const VERDICT_TOL: f64 = 1e-10;

/// Largest entrywise deviation at which the recovered state still counts as
/// the input.
pub const RECOVERY_MATCH_TOL: f64 = 1e-8;

/// Detection probabilities below this floor are treated as exactly zero.
pub const DETECTION_FLOOR: f64 = 1e-14;

/// Largest allowed disagreement between the two fitted slopes of one error.
pub const SLOPE_CONSISTENCY: f64 = 0.2;

#[derive(Debug, Error)]
pub enum CycleError {
    #[error("input state deviates from its codespace projection by {0:.3e}")]
    NotInCodespace(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error(
        "error operator {error_index}: fitted slopes {first:.3} and {second:.3} \
         disagree; no stable power law"
    )]
    DegenerateFit {
        error_index: usize,
        first: f64,
        second: f64,
    },
    #[error("parameter {name} = {value} is outside its valid range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Codes(#[from] CodesError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

// --- the cycle ledger ----------------------------------------------------------

/// The entropy ledger of one error-correction cycle. All entropies are in
/// the units of `log_base`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleReport {
    /// Base every entropy in the ledger is expressed in.
    pub log_base: LogBase,
    /// Entropy of the input state.
    pub s_in: f64,
    /// Entropy of the state after the noise acted.
    pub s_noisy: f64,
    /// ΔS = s_in − s_noisy: the entropy the correction must remove again.
    pub delta_s: f64,
    /// Syndrome outcome probabilities p_k under the recovery instrument.
    pub syndrome_probs: Vec<f64>,
    /// H(p_k): the cost of erasing the syndrome record.
    pub erasure_cost: f64,
    /// ΔS + H(p_k): the net entropic cost of the whole cycle.
    pub delta_s_tot: f64,
    /// S(W): the entropy the instrument hands to its environment.
    pub s_exchange: f64,
    /// Uhlmann fidelity between the input and the recovered state.
    pub fidelity: f64,
    /// Probability weight a restricted noise channel discarded.
    pub leakage: f64,
    /// Exchange matrix W_ij = Tr(R_i ρ' R_j†) of the recovery instrument.
    pub w: WMatrix,
    /// Each named inequality, evaluated at its stated tolerance.
    pub verdicts: BTreeMap<String, bool>,
    /// State after the full noise–measure–recover cycle.
    pub recovered_state: DensityMatrix,
}

/// Runs one cycle — noise, syndrome measurement, recovery — and fills in the
/// ledger in the requested base.
///
/// The input must be supported on the codespace to within
/// [`CODESPACE_TOL`], and the recovery list must form a complete
/// instrument. `restricted` states the caller's claim that the noise was
/// restricted to the correctable errors; only under that claim is the net
/// cost ΔS_tot expected to be nonnegative, so the "ΔS_tot≥0" verdict is
/// emitted only then. Every verdict is computed from the ledger at its
/// stated tolerance, never inferred from the mode.
pub fn run_cycle_in_base(
    code: &QecCode,
    noise: &KrausChannel,
    recovery: &[ComplexMatrix],
    rho_in: &DensityMatrix,
    restricted: bool,
    base: LogBase,
) -> Result<CycleReport, CycleError> {
    if noise.dim() != code.dim() {
        return Err(CycleError::DimensionMismatch(noise.dim(), code.dim()));
    }
    if rho_in.dim() != code.dim() {
        return Err(CycleError::DimensionMismatch(rho_in.dim(), code.dim()));
    }
    let projected = code
        .projector()
        .matmul(rho_in.matrix())
        .matmul(code.projector());
    let deviation = max_abs_diff(&projected, rho_in.matrix());
    if deviation > CODESPACE_TOL {
        return Err(CycleError::NotInCodespace(deviation));
    }
    let instrument = KrausChannel::new(recovery.to_vec(), true)?;
    if instrument.dim() != code.dim() {
        return Err(CycleError::DimensionMismatch(instrument.dim(), code.dim()));
    }

    let s_in = von_neumann(rho_in, base);
    let noisy = noise.apply(rho_in)?;
    let s_noisy = von_neumann(&noisy.state, base);
    let delta_s = s_in - s_noisy;

    let outcomes = instrument.measure(&noisy.state)?;
    let syndrome_probs: Vec<f64> = outcomes.iter().map(|o| o.probability).collect();
    let erasure_cost = shannon(&syndrome_probs, base)?;
    let delta_s_tot = delta_s + erasure_cost;

    let (w, s_exchange) = entropy_exchange(&instrument, &noisy.state, base)?;
    let recovered = instrument.apply(&noisy.state)?.state;
    let fidelity = state_fidelity(rho_in, &recovered)?.clamp(0.0, 1.0);

    // The diagonal of W and the measured probabilities are computed through
    // different arithmetic, so comparing them is a genuine consistency check.
    let wkk_deviation = syndrome_probs
        .iter()
        .enumerate()
        .map(|(k, &p)| (w.matrix.get(k, k).re - p).abs())
        .fold(0.0, f64::max);

    let mut verdicts = BTreeMap::new();
    verdicts.insert("W_kk=p_k".to_string(), wkk_deviation <= VERDICT_TOL);
    verdicts.insert(
        "H≥S(W)".to_string(),
        erasure_cost - s_exchange >= -VERDICT_TOL,
    );
    verdicts.insert(
        "ΔS+S(W)≥0".to_string(),
        delta_s + s_exchange >= -VERDICT_TOL,
    );
    if restricted {
        verdicts.insert("ΔS_tot≥0".to_string(), delta_s_tot >= -VERDICT_TOL);
    }
    verdicts.insert(
        "perfect_recovery".to_string(),
        max_abs_diff(recovered.matrix(), rho_in.matrix()) <= RECOVERY_MATCH_TOL,
    );

    Ok(CycleReport {
        log_base: base,
        s_in,
        s_noisy,
        delta_s,
        syndrome_probs,
        erasure_cost,
        delta_s_tot,
        s_exchange,
        fidelity,
        leakage: noisy.leakage,
        w,
        verdicts,
        recovered_state: recovered,
    })
}

/// [`run_cycle_in_base`] with every entropy in bits.
pub fn run_cycle(
    code: &QecCode,
    noise: &KrausChannel,
    recovery: &[ComplexMatrix],
    rho_in: &DensityMatrix,
    restricted: bool,
) -> Result<CycleReport, CycleError> {
    run_cycle_in_base(code, noise, recovery, rho_in, restricted, LogBase::Two)
}

// --- fidelities ----------------------------------------------------------------

/// Fidelity of a mixed output against a pure target: F = ⟨ψ|ρ|ψ⟩.
pub fn fidelity(psi_in: &PureState, rho_out: &DensityMatrix) -> Result<f64, CycleError> {
    if psi_in.dim() != rho_out.dim() {
        return Err(CycleError::DimensionMismatch(psi_in.dim(), rho_out.dim()));
    }
    Ok(rho_out.expectation(psi_in).max(0.0))
}

/// Eigenvalues below this are rank-deficiency roundoff, not population:
/// square-rooting them would smuggle O(√ε) noise into a fidelity.
const SPECTRUM_FLOOR: f64 = 1e-12;

/// Uhlmann fidelity between two mixed states: F = (Tr √(√a · b · √a))².
///
/// Eigenvalues of the intermediate products below [`SPECTRUM_FLOOR`] are
/// treated as exact zeros before the square roots; a rank-deficient input
/// therefore cannot leak roundoff noise into the result, at the price of
/// ignoring genuine populations smaller than the floor.
pub fn state_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64, CycleError> {
    if a.dim() != b.dim() {
        return Err(CycleError::DimensionMismatch(a.dim(), b.dim()));
    }
    let floor = |l: f64| if l > SPECTRUM_FLOOR { l.sqrt() } else { 0.0 };
    let sqrt_a = a.matrix().hermitian_eig(1e-13)?.apply_fn(floor);
    let inner = sqrt_a.matmul(b.matrix()).matmul(&sqrt_a).symmetrized();
    let root_sum: f64 = inner
        .hermitian_eig(1e-13)?
        .eigenvalues
        .iter()
        .map(|&l| floor(l))
        .sum();
    Ok(root_sum * root_sum)
}

// --- damping entropy sweep -------------------------------------------------------

/// Per-point record of a damping sweep, plus the located thresholds where
/// the output entropy crosses the input entropy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    /// The damping parameter grid, strictly increasing.
    pub parameter: Vec<f64>,
    /// Output-state entropy at each grid point, in bits.
    pub entropy_bits: Vec<f64>,
    /// Output-state entropy at each grid point, in nats.
    pub entropy_nats: Vec<f64>,
    /// Uhlmann fidelity between input and output at each grid point.
    pub fidelity: Vec<f64>,
    /// Parameters where the output entropy crosses the input entropy
    /// downward, located by linear interpolation between grid points.
    pub thresholds: Vec<f64>,
}

impl SweepResult {
    /// CSV rendering: header row, then one row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("parameter,entropy_bits,entropy_nats,fidelity\n");
        for i in 0..self.parameter.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.parameter[i], self.entropy_bits[i], self.entropy_nats[i], self.fidelity[i]
            ));
        }
        out
    }
}

/// Sweeps single-qubit amplitude damping over a parameter grid, acting on
/// ρ = ½(I + a·X), and locates every damping strength where the output
/// entropy crosses the input entropy S(ρ) = h((1+a)/2).
///
/// Both entropy columns (bits and nats) are always filled; `base` selects
/// the column the threshold search reads, though the crossing points
/// themselves are base-independent. The grid must be strictly increasing
/// and lie in [0, 1].
pub fn ad_entropy_sweep(a: f64, gamma_grid: &[f64], base: LogBase) -> Result<SweepResult, CycleError> {
    if !(0.0..=1.0).contains(&a) {
        return Err(CycleError::OutOfRange { name: "a", value: a });
    }
    if gamma_grid.is_empty() {
        return Err(CycleError::OutOfRange {
            name: "grid length",
            value: 0.0,
        });
    }
    for pair in gamma_grid.windows(2) {
        if pair[1] <= pair[0] {
            return Err(CycleError::OutOfRange {
                name: "grid (must be strictly increasing)",
                value: pair[1],
            });
        }
    }
    let first = gamma_grid[0];
    let last = gamma_grid[gamma_grid.len() - 1];
    if !(0.0..=1.0).contains(&first) || !(0.0..=1.0).contains(&last) {
        return Err(CycleError::OutOfRange {
            name: "gamma",
            value: if first < 0.0 { first } else { last },
        });
    }

    let half = Complex64::new(0.5, 0.0);
    let coherence = Complex64::new(0.5 * a, 0.0);
    let rho = DensityMatrix::new(ComplexMatrix::from_fn(2, 2, |i, j| {
        if i == j {
            half
        } else {
            coherence
        }
    }))?;
    let s_ref = von_neumann(&rho, base);

    let n = gamma_grid.len();
    let mut entropy_bits = Vec::with_capacity(n);
    let mut entropy_nats = Vec::with_capacity(n);
    let mut fidelities = Vec::with_capacity(n);
    let mut excess = Vec::with_capacity(n);
    for &gamma in gamma_grid {
        let channel = KrausChannel::amplitude_damping(gamma)?;
        let out = channel.apply(&rho)?.state;
        entropy_bits.push(von_neumann(&out, LogBase::Two));
        entropy_nats.push(von_neumann(&out, LogBase::E));
        fidelities.push(state_fidelity(&rho, &out)?.clamp(0.0, 1.0));
        excess.push(von_neumann(&out, base) - s_ref);
    }

    // A threshold needs a clear sign on both sides of the step; tangencies
    // and zero plateaus (e.g. the γ = 0 endpoint, or a pure input whose
    // excess entropy returns to zero at γ = 1) are not crossings.
    let mut thresholds = Vec::new();
    for i in 0..n - 1 {
        let (f0, f1) = (excess[i], excess[i + 1]);
        let crosses = (f0 > 1e-12 && f1 < -1e-12) || (f0 < -1e-12 && f1 > 1e-12);
        if crosses {
            let t = f0 / (f0 - f1);
            thresholds.push(gamma_grid[i] + t * (gamma_grid[i + 1] - gamma_grid[i]));
        }
    }

    Ok(SweepResult {
        parameter: gamma_grid.to_vec(),
        entropy_bits,
        entropy_nats,
        fidelity: fidelities,
        thresholds,
    })
}

// --- error-family classification ----------------------------------------------------

/// Partition of an error family by the leading power of the detection
/// probability: errors whose worst-case detection probability λ_max scales
/// as γ^s with s at or below the threshold order are correctable; errors
/// that are never detected at all are reported separately.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorClassification {
    /// Indices with a fitted exponent at or below the threshold order.
    pub correctable: Vec<usize>,
    /// Indices with a fitted exponent above the threshold order.
    pub non_correctable: Vec<usize>,
    /// Indices whose detection probability vanishes at every sample.
    pub non_detectable: Vec<usize>,
    /// Fitted exponent per error; None for the non-detectable ones.
    pub exponents: Vec<Option<f64>>,
}

/// Classifies an error family against a code by fitting the power law of
/// each operator's worst-case detection probability over {γ, γ/2, γ/4}.
///
/// The two adjacent log–log slopes must agree to within
/// [`SLOPE_CONSISTENCY`]; a family whose detection probability follows no
/// stable power law at the chosen γ is rejected as a degenerate fit.
pub fn classify_errors(
    code: &QecCode,
    error_family: &dyn Fn(f64) -> Result<Vec<ComplexMatrix>, QuantumError>,
    gamma: f64,
    threshold_order: usize,
) -> Result<ErrorClassification, CycleError> {
    if !(gamma > 0.0 && gamma <= 0.5) {
        return Err(CycleError::OutOfRange {
            name: "gamma",
            value: gamma,
        });
    }
    let samples = [gamma, gamma / 2.0, gamma / 4.0];
    let mut lambda_max: Vec<Vec<f64>> = Vec::with_capacity(3);
    let mut family_len = None;
    for &g in &samples {
        let ops = error_family(g)?;
        if let Some(len) = family_len {
            if ops.len() != len {
                return Err(CycleError::DimensionMismatch(ops.len(), len));
            }
        } else {
            family_len = Some(ops.len());
        }
        let lams = ops
            .iter()
            .map(|op| detection_range(code, op).map(|(_, max)| max))
            .collect::<Result<Vec<_>, _>>()?;
        lambda_max.push(lams);
    }

    let count = family_len.unwrap_or(0);
    let mut classification = ErrorClassification {
        correctable: Vec::new(),
        non_correctable: Vec::new(),
        non_detectable: Vec::new(),
        exponents: Vec::with_capacity(count),
    };
    for (k, (&l0, (&l1, &l2))) in lambda_max[0]
        .iter()
        .zip(lambda_max[1].iter().zip(&lambda_max[2]))
        .enumerate()
        .take(count)
    {
        let l = [l0, l1, l2];
        if l.iter().all(|&x| x < DETECTION_FLOOR) {
            classification.non_detectable.push(k);
            classification.exponents.push(None);
            continue;
        }
        if l.iter().any(|&x| x < DETECTION_FLOOR) {
            // Detected at some scales but not others: no power law to fit.
            return Err(CycleError::DegenerateFit {
                error_index: k,
                first: f64::NAN,
                second: f64::NAN,
            });
        }
        // λ(γ) ∝ γ^s gives λ(γ)/λ(γ/2) = 2^s at both sample pairs.
        let first = (l[0] / l[1]).log2();
        let second = (l[1] / l[2]).log2();
        if (first - second).abs() >= SLOPE_CONSISTENCY {
            return Err(CycleError::DegenerateFit {
                error_index: k,
                first,
                second,
            });
        }
        let s = 0.5 * (first + second);
        classification.exponents.push(Some(s));
        if s <= threshold_order as f64 {
            classification.correctable.push(k);
        } else {
            classification.non_correctable.push(k);
        }
    }
    Ok(classification)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{
        canonical_recovery, leung4, repetition3, LEUNG4_CORRECTABLE, REPETITION3_CORRECTABLE,
    };
    use crate::linalg::off_diagonal_mass;
    use crate::quantum::sample_pure_state;

    fn repetition_setup(p: f64) -> (QecCode, KrausChannel, Vec<ComplexMatrix>) {
        let code = repetition3();
        let noise = KrausChannel::bit_flip_enlarged(p)
            .unwrap()
            .restrict(&REPETITION3_CORRECTABLE)
            .unwrap();
        let recovery = code.recovery().unwrap().to_vec();
        (code, noise, recovery)
    }

    #[test]
    fn restricted_cycle_balances_the_ledger_exactly() {
        let (code, noise, recovery) = repetition_setup(0.1);
        let rho = code.codewords()[0].density();
        let report = run_cycle(&code, &noise, &recovery, &rho, true).unwrap();

        // Pure input: S(ρ) = 0. The noisy state is an even mixture over the
        // four syndrome subspaces with the renormalized flip weights.
        let h = {
            let w0: f64 = 0.9f64.powi(3) + 3.0 * 0.1 * 0.9 * 0.9;
            let p0 = 0.9f64.powi(3) / w0;
            let p1 = (0.1 * 0.9 * 0.9) / w0;
            -(p0 * p0.log2() + 3.0 * p1 * p1.log2())
        };
        assert!(report.s_in.abs() < 1e-12);
        assert!((report.s_noisy - h).abs() < 1e-9);
        assert!((report.erasure_cost - h).abs() < 1e-9);
        assert!((report.erasure_cost - 1.2075187496).abs() < 1e-9);
        assert!(report.delta_s_tot.abs() < 1e-9);
        assert!((report.delta_s_tot - (report.delta_s + report.erasure_cost)).abs() < 1e-12);
        assert!((report.leakage - 0.028).abs() < 1e-12);
        assert!((report.fidelity - 1.0).abs() < 1e-9);

        // Orthogonal syndrome subspaces make W diagonal, so S(W) = H(p).
        assert!(off_diagonal_mass(&report.w.matrix) < 1e-12);
        assert!((report.s_exchange - report.erasure_cost).abs() < 1e-9);
        assert_eq!(report.verdicts.len(), 5);
        assert!(report.verdicts.values().all(|&v| v));
        assert!(report.verdicts.contains_key("ΔS_tot≥0"));
    }

    #[test]
    fn zero_noise_cycle_is_free() {
        let code = repetition3();
        let noise = KrausChannel::identity(code.dim());
        let recovery = code.recovery().unwrap().to_vec();
        let rho = code.codewords()[1].density();
        let report = run_cycle(&code, &noise, &recovery, &rho, true).unwrap();
        assert!(report.delta_s.abs() < 1e-12);
        assert!(report.erasure_cost.abs() < 1e-9);
        assert!(report.delta_s_tot.abs() < 1e-9);
        assert!((report.syndrome_probs[0] - 1.0).abs() < 1e-10);
        assert!(report.leakage.abs() < 1e-15);
        assert!(report.verdicts.values().all(|&v| v));
    }

    #[test]
    fn mixed_logical_input_still_recovers_perfectly() {
        let (code, noise, recovery) = repetition_setup(0.1);
        let half = Complex64::new(0.5, 0.0);
        let mix = code.codewords()[0]
            .outer(&code.codewords()[0])
            .scale(half)
            .add(&code.codewords()[1].outer(&code.codewords()[1]).scale(half));
        let rho = DensityMatrix::new(mix).unwrap();
        let report = run_cycle(&code, &noise, &recovery, &rho, true).unwrap();
        assert!((report.s_in - 1.0).abs() < 1e-10);
        assert!(report.delta_s_tot >= -1e-10);
        assert!(report.delta_s_tot.abs() < 1e-9);
        assert!(*report.verdicts.get("perfect_recovery").unwrap());
        assert!(*report.verdicts.get("ΔS_tot≥0").unwrap());
        assert!((report.fidelity - 1.0).abs() < 1e-9);
    }

    #[test]
    fn full_channel_cycle_reports_honest_verdicts() {
        let code = repetition3();
        let noise = KrausChannel::bit_flip_enlarged(0.1).unwrap();
        let recovery = code.recovery().unwrap().to_vec();
        let rho = code.codewords()[0].density();
        let report = run_cycle(&code, &noise, &recovery, &rho, false).unwrap();
        // Complete channel: nothing is discarded, and the claim-specific
        // net-cost verdict is not emitted.
        assert!(report.leakage.abs() < 1e-15);
        assert!(!report.verdicts.contains_key("ΔS_tot≥0"));
        assert_eq!(report.verdicts.len(), 4);
        // The weight-2/3 flips land outside what the recovery can undo.
        assert!(!*report.verdicts.get("perfect_recovery").unwrap());
        assert!(report.fidelity < 1.0 - 1e-3);
        // Consistency and majorization hold for any instrument.
        assert!(*report.verdicts.get("W_kk=p_k").unwrap());
        assert!(*report.verdicts.get("H≥S(W)").unwrap());
        assert!((report.delta_s_tot - (report.delta_s + report.erasure_cost)).abs() < 1e-12);
    }

    #[test]
    fn nats_ledger_is_the_bits_ledger_rescaled() {
        let (code, noise, recovery) = repetition_setup(0.2);
        let rho = code.random_code_state(7).density();
        let bits = run_cycle(&code, &noise, &recovery, &rho, true).unwrap();
        let nats =
            run_cycle_in_base(&code, &noise, &recovery, &rho, true, LogBase::E).unwrap();
        let ln2 = std::f64::consts::LN_2;
        assert!((nats.erasure_cost - bits.erasure_cost * ln2).abs() < 1e-10);
        assert!((nats.s_exchange - bits.s_exchange * ln2).abs() < 1e-10);
        assert!((nats.delta_s - bits.delta_s * ln2).abs() < 1e-10);
        assert_eq!(nats.log_base, LogBase::E);
    }

    #[test]
    fn cycle_rejects_bad_inputs() {
        let (code, noise, recovery) = repetition_setup(0.1);
        let outside = sample_pure_state(8, 3).density();
        match run_cycle(&code, &noise, &recovery, &outside, true) {
            Err(CycleError::NotInCodespace(dev)) => assert!(dev > 1e-3),
            other => panic!("expected NotInCodespace, got {other:?}"),
        }
        let wrong_dim = DensityMatrix::maximally_mixed(4);
        assert!(matches!(
            run_cycle(&code, &noise, &recovery, &wrong_dim, true),
            Err(CycleError::DimensionMismatch(4, 8))
        ));
        // A recovery list that is not a complete instrument is refused.
        let broken = vec![recovery[0].clone()];
        assert!(run_cycle(&code, &noise, &broken, &code_state_density(&code), true).is_err());
    }

    fn code_state_density(code: &QecCode) -> DensityMatrix {
        code.codewords()[0].density()
    }

    #[test]
    fn fidelity_matches_pure_state_overlaps() {
        let psi = PureState::basis(4, 1);
        let same = psi.density();
        let orth = PureState::basis(4, 2);
        let other = orth.density();
        assert!((fidelity(&psi, &same).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&psi, &other).unwrap() < 1e-12);

        // Uhlmann agrees with ⟨ψ|ρ|ψ⟩ when one side is pure.
        let mixed = DensityMatrix::maximally_mixed(4);
        let direct = fidelity(&psi, &mixed).unwrap();
        let uhlmann = state_fidelity(&same, &mixed).unwrap();
        assert!((direct - uhlmann).abs() < 1e-10);
        assert!((state_fidelity(&mixed, &mixed).unwrap() - 1.0).abs() < 1e-10);
        assert!(state_fidelity(&same, &mixed).unwrap() <= 1.0 + 1e-10);
    }

    #[test]
    fn damping_sweep_locates_the_entropy_crossing() {
        let grid: Vec<f64> = (0..=500).map(|i| i as f64 * 1e-3).collect();

        // Overlap chosen so S(ρ) = 0.56 nats; the crossing sits at a² exactly.
        let a = crate::entropy::solve_overlap_for_entropy(0.56, LogBase::E).unwrap();
        let sweep = ad_entropy_sweep(a, &grid, LogBase::E).unwrap();
        assert_eq!(sweep.thresholds.len(), 1);
        let found = sweep.thresholds[0];
        assert!((found - a * a).abs() < 2e-3, "found {found}, expected {}", a * a);
        assert!((0.2..=0.3).contains(&found));
        // Crossing location does not depend on the base the search reads.
        let sweep_bits = ad_entropy_sweep(a, &grid, LogBase::Two).unwrap();
        assert!((sweep_bits.thresholds[0] - found).abs() < 1e-12);

        // Same overlap read as 0.56 bits: the crossing moves past the band.
        let a_bits = crate::entropy::solve_overlap_for_entropy(0.56, LogBase::Two).unwrap();
        let wide: Vec<f64> = (0..=1000).map(|i| i as f64 * 1e-3).collect();
        let sweep_wide = ad_entropy_sweep(a_bits, &wide, LogBase::Two).unwrap();
        assert_eq!(sweep_wide.thresholds.len(), 1);
        assert!((sweep_wide.thresholds[0] - a_bits * a_bits).abs() < 2e-3);
        assert!(sweep_wide.thresholds[0] > 0.5);
    }

    #[test]
    fn damping_sweep_endpoints_behave() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.01).collect();

        // Pure input: damping only raises the entropy, until γ → 1 repurifies.
        // Output eigenvalues are (1 ± r)/2 with r = √(γ² + a²(1−γ)), so the
        // γ = ½ point is pinned by a closed form.
        let pure = ad_entropy_sweep(1.0, &grid, LogBase::Two).unwrap();
        let r = 0.75_f64.sqrt();
        let expected = crate::entropy::binary_entropy((1.0 - r) / 2.0, LogBase::Two).unwrap();
        assert!((pure.entropy_bits[50] - expected).abs() < 1e-12);
        assert!(pure.entropy_bits.iter().all(|&s| s >= -1e-12));
        // S(ρ) = 0, so every positive excursion returns to zero at γ = 1
        // without a strict sign change below zero.
        assert!(pure.thresholds.is_empty());

        // Maximally mixed input: entropy can only fall.
        let mixed = ad_entropy_sweep(0.0, &grid, LogBase::Two).unwrap();
        assert!((mixed.entropy_bits[0] - 1.0).abs() < 1e-12);
        assert!(mixed.entropy_bits.iter().all(|&s| s <= 1.0 + 1e-12));
        assert!(mixed.thresholds.is_empty());

        let csv = mixed.to_csv();
        assert!(csv.starts_with("parameter,entropy_bits,entropy_nats,fidelity\n"));
        assert_eq!(csv.lines().count(), grid.len() + 1);

        assert!(matches!(
            ad_entropy_sweep(1.5, &grid, LogBase::Two),
            Err(CycleError::OutOfRange { .. })
        ));
        assert!(matches!(
            ad_entropy_sweep(0.5, &[0.2, 0.1], LogBase::Two),
            Err(CycleError::OutOfRange { .. })
        ));
    }

    #[test]
    fn classifier_recovers_the_correctable_sets() {
        let repetition = repetition3();
        let flips = |p: f64| {
            KrausChannel::bit_flip_enlarged(p).map(|c| c.operators().to_vec())
        };
        let classified = classify_errors(&repetition, &flips, 0.1, 1).unwrap();
        assert_eq!(classified.correctable, REPETITION3_CORRECTABLE.to_vec());
        assert_eq!(classified.non_correctable, vec![4, 5, 6, 7]);
        assert!(classified.non_detectable.is_empty());
        // The triple flip is a clean cubic.
        assert!((classified.exponents[7].unwrap() - 3.0).abs() < 1e-6);

        let leung = leung4();
        let damping = |g: f64| {
            KrausChannel::amplitude_damping(g).and_then(|c| c.tensor_power(4)).map(|c| c.operators().to_vec())
        };
        let classified = classify_errors(&leung, &damping, 0.1, 1).unwrap();
        assert_eq!(classified.correctable, LEUNG4_CORRECTABLE.to_vec());
        assert_eq!(classified.non_correctable.len(), 11);
        assert!(classified.non_detectable.is_empty());
        // Weight-two damping products have a quadratic detection probability.
        assert!((classified.exponents[3].unwrap() - 2.0).abs() < 0.2);
    }

    #[test]
    fn classifier_edge_cases() {
        let code = repetition3();

        let identity_only = |_: f64| -> Result<Vec<ComplexMatrix>, QuantumError> {
            Ok(vec![ComplexMatrix::identity(8)])
        };
        let classified = classify_errors(&code, &identity_only, 0.1, 1).unwrap();
        assert_eq!(classified.correctable, vec![0]);

        // An operator that never touches the codespace is non-detectable.
        let mut off = ComplexMatrix::zeros(8, 8);
        off.set(1, 2, Complex64::new(1.0, 0.0));
        let undetected = move |g: f64| -> Result<Vec<ComplexMatrix>, QuantumError> {
            Ok(vec![off.scale(Complex64::new(g, 0.0))])
        };
        let classified = classify_errors(&code, &undetected, 0.1, 1).unwrap();
        assert_eq!(classified.non_detectable, vec![0]);
        assert!(classified.exponents[0].is_none());

        // Exponential decay is no power law: the two slopes disagree.
        let decaying = |g: f64| -> Result<Vec<ComplexMatrix>, QuantumError> {
            Ok(vec![ComplexMatrix::identity(8).scale(Complex64::new(1.0 - g, 0.0))])
        };
        match classify_errors(&code, &decaying, 0.5, 1) {
            Err(CycleError::DegenerateFit { error_index: 0, first, second }) => {
                assert!((first - second).abs() >= SLOPE_CONSISTENCY);
            }
            other => panic!("expected DegenerateFit, got {other:?}"),
        }

        assert!(matches!(
            classify_errors(&code, &identity_only, 0.7, 1),
            Err(CycleError::OutOfRange { .. })
        ));
    }

    #[test]
    fn canonical_recovery_runs_a_clean_cycle_too() {
        // Wire the classifier's output into a recovery built from scratch,
        // then run the cycle end to end on a random code state.
        let code = repetition3();
        let channel = KrausChannel::bit_flip_enlarged(0.05).unwrap();
        let correctable: Vec<ComplexMatrix> = REPETITION3_CORRECTABLE
            .iter()
            .map(|&k| channel.operators()[k].clone())
            .collect();
        let recovery = canonical_recovery(&code, &correctable).unwrap();
        let noise = channel.restrict(&REPETITION3_CORRECTABLE).unwrap();
        let rho = code.random_code_state(11).density();
        let report = run_cycle(&code, &noise, &recovery, &rho, true).unwrap();
        assert!(report.verdicts.values().all(|&v| v));
        assert!(report.delta_s_tot >= -1e-10);
        assert!((report.fidelity - 1.0).abs() < 1e-9);
    }

    #[test]
    fn report_serializes_with_named_verdicts() {
        let (code, noise, recovery) = repetition_setup(0.1);
        let rho = code_state_density(&code);
        let report = run_cycle(&code, &noise, &recovery, &rho, true).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"W_kk=p_k\":true"));
        assert!(json.contains("\"log_base\":\"two\""));
        let back: CycleReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.verdicts, report.verdicts);
        assert!((back.erasure_cost - report.erasure_cost).abs() < 1e-15);
    }

    #[test]
    fn second_law_holds_on_a_quick_random_sweep() {
        // The heavier 200-state sweep lives in the integration suite; this
        // is the smoke-test version.
        for p in [0.05, 0.2] {
            let (code, noise, recovery) = repetition_setup(p);
            for seed in 0..20 {
                let rho = code.random_code_state(seed).density();
                let report = run_cycle(&code, &noise, &recovery, &rho, true).unwrap();
                assert!(report.verdicts.values().all(|&v| v), "p={p} seed={seed}");
                assert!(report.delta_s_tot >= -1e-10);
                // Pure input through orthogonal-subspace noise: the cycle's
                // books balance to zero and W stays diagonal.
                assert!(report.delta_s_tot.abs() < 1e-9, "p={p} seed={seed}");
                assert!((report.s_exchange - report.erasure_cost).abs() < 1e-9);
            }
        }
    }
}
