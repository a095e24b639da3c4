//! The reproduction suite: every anchored quantity re-derived from scratch
//! and compared against its expected value at a named, overridable
//! tolerance. Each check pins its own log base and random seed usage, so
//! the suite is byte-deterministic for a fixed `--seed`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use entroqec::codes::{
    canonical_recovery, detection_range, kl_check_exact, kl_decompose_approx, leung4,
    repetition3, stabilizer_mixed_states, LEUNG4_CORRECTABLE, REPETITION3_CORRECTABLE,
};
use entroqec::cycle::{ad_entropy_sweep, fidelity, run_cycle};
use entroqec::discrim::{
    ambiguity_asymptote, ambiguity_constraint, ambiguity_delta_min, helstrom_pure,
    locc_necessary_check, overlap_matrix, povm_error, priors_consistency_check,
    random_binary_povm, recovery_povm, DiscriminationEnsemble,
};
use entroqec::entropy::{
    binary_entropy, erasure_entropy, solve_overlap_for_entropy, von_neumann, LogBase,
};
use entroqec::linalg::{max_abs_diff, ComplexMatrix};
use entroqec::quantum::{
    sample_pure_state, DensityMatrix, KrausChannel, Povm, PureState, QuantumError,
};

/// One reproduced quantity, its expectation, and the verdict.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub unit: &'static str,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Names accepted by `--tolerance NAME=VALUE`, in run order.
pub const CHECK_NAMES: [&str; 14] = [
    "helstrom",
    "ambiguity",
    "priors",
    "cycle",
    "exact_kl",
    "stabilizer_overlaps",
    "locc",
    "approx_kl",
    "detection",
    "fidelity_scaling",
    "ad_threshold",
    "erasure",
    "channel_entropy",
    "impossibility",
];

/// Runs the whole suite with per-check tolerance overrides.
pub fn run_all(seed: u64, overrides: &BTreeMap<String, f64>) -> Vec<CheckResult> {
    let tol = |name: &str, default: f64| overrides.get(name).copied().unwrap_or(default);
    vec![
        check_helstrom(tol("helstrom", 1e-12)),
        check_ambiguity(tol("ambiguity", 1e-2)),
        check_priors(tol("priors", 5e-5)),
        check_cycle(tol("cycle", 1e-10), seed),
        check_exact_kl(tol("exact_kl", 1e-10)),
        check_stabilizer_overlaps(tol("stabilizer_overlaps", 1e-12)),
        check_locc(tol("locc", 1e-12)),
        check_approx_kl(tol("approx_kl", 1e-6)),
        check_detection(tol("detection", 1e-10)),
        check_fidelity_scaling(tol("fidelity_scaling", 0.25)),
        check_ad_threshold(tol("ad_threshold", 0.05)),
        check_erasure(tol("erasure", 0.0)),
        check_channel_entropy(tol("channel_entropy", 1e-10), seed),
        check_impossibility(tol("impossibility", 1e-10), seed),
    ]
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The symmetric two-state pair with overlap √3/2, equal priors.
pub fn worked_example_pair() -> (PureState, PureState) {
    let r3h = 3.0_f64.sqrt() / 2.0;
    let psi1 = PureState::new(vec![re(0.5), re(r3h)]).expect("unit vector");
    let psi2 = PureState::new(vec![re(r3h), re(0.5)]).expect("unit vector");
    (psi1, psi2)
}

/// Optimal error 1/4 for the worked example, met exactly by the crosswise
/// computational projectors (guess state 1 on outcome |1⟩ and vice versa).
fn check_helstrom(tolerance: f64) -> CheckResult {
    let (psi1, psi2) = worked_example_pair();
    let bound = helstrom_pure(&psi1, &psi2, 0.5, 0.5).expect("valid pair");

    let e0 = PureState::basis(2, 0);
    let e1 = PureState::basis(2, 1);
    let detectors = Povm::new(vec![e1.outer(&e1), e0.outer(&e0)]).expect("projective pair");
    let ensemble = DiscriminationEnsemble::new(vec![psi1.density(), psi2.density()], vec![0.5, 0.5])
        .expect("two equal priors");
    let detector_error = povm_error(&detectors, &ensemble).expect("matching dims");

    let expected = 0.25;
    let pass =
        (bound - expected).abs() <= tolerance && (detector_error - expected).abs() <= tolerance;
    CheckResult {
        name: "helstrom",
        unit: "probability",
        expected,
        computed: bound,
        tolerance,
        pass,
    }
}

/// δ_min/c₁² at c₁ = 10⁻³ sits at the asymptote (1+√2)⁻² within 1% relative,
/// and the returned δ_min certifiably satisfies the constraint (g ≤ 0, with
/// at most 10⁻¹⁰ of slack from the bisection).
fn check_ambiguity(tolerance: f64) -> CheckResult {
    let c1 = 1e-3;
    let result = ambiguity_delta_min(c1);
    let certificate = ambiguity_constraint(c1, result.delta_min);
    let expected = ambiguity_asymptote();
    let pass = (result.asymptotic_ratio - expected).abs() <= tolerance * expected
        && (-1e-10..=0.0).contains(&certificate);
    CheckResult {
        name: "ambiguity",
        unit: "ratio",
        expected,
        computed: result.asymptotic_ratio,
        tolerance,
        pass,
    }
}

/// The reference prior pair and the asymptotic ratio describe the same
/// quantity: their product-vs-ratio discrepancy is rounding-sized.
fn check_priors(tolerance: f64) -> CheckResult {
    let computed = priors_consistency_check();
    CheckResult {
        name: "priors",
        unit: "ratio",
        expected: 0.0,
        computed,
        tolerance,
        pass: computed <= tolerance,
    }
}

/// 200 random code states through the restricted bit-flip cycle at p = 0.1:
/// the diagonal of W matches the measured syndrome distribution, every
/// ledger inequality holds, and recovery is exact.
fn check_cycle(tolerance: f64, seed: u64) -> CheckResult {
    let code = repetition3();
    let noise = KrausChannel::bit_flip_enlarged(0.1)
        .expect("valid p")
        .restrict(&REPETITION3_CORRECTABLE)
        .expect("correctable subset");
    let recovery = code.recovery().expect("built-in recovery").to_vec();

    let mut worst_wkk = 0.0_f64;
    let mut min_slack = f64::MAX;
    let mut worst_recovery = 0.0_f64;
    for i in 0..200 {
        let rho = code.random_code_state(seed + i).density();
        let report = run_cycle(&code, &noise, &recovery, &rho, true).expect("clean cycle");
        for (k, &p) in report.syndrome_probs.iter().enumerate() {
            worst_wkk = worst_wkk.max((report.w.matrix.get(k, k).re - p).abs());
        }
        min_slack = min_slack
            .min(report.erasure_cost - report.s_exchange)
            .min(report.delta_s + report.s_exchange)
            .min(report.delta_s_tot);
        worst_recovery = worst_recovery.max(max_abs_diff(
            report.recovered_state.matrix(),
            rho.matrix(),
        ));
    }

    let pass = worst_wkk <= tolerance && min_slack >= -tolerance && worst_recovery <= 1e-9;
    CheckResult {
        name: "cycle",
        unit: "probability",
        expected: 0.0,
        computed: worst_wkk,
        tolerance,
        pass,
    }
}

/// The correctable bit-flip subset satisfies the exact correctability
/// condition with α = diag((1−p)³, p(1−p)², p(1−p)², p(1−p)²) at each p,
/// while adjoining the triple flip breaks it.
fn check_exact_kl(tolerance: f64) -> CheckResult {
    let code = repetition3();
    let mut worst = 0.0_f64;
    let mut all_exact = true;
    for p in [0.01, 0.1, 0.3] {
        let channel = KrausChannel::bit_flip_enlarged(p).expect("valid p");
        let ops: Vec<ComplexMatrix> = REPETITION3_CORRECTABLE
            .iter()
            .map(|&k| channel.operators()[k].clone())
            .collect();
        let report = kl_check_exact(&code, &ops, 1e-12).expect("well-formed ops");
        all_exact &= report.exact;
        let q = 1.0 - p;
        let diag = [q * q * q, p * q * q, p * q * q, p * q * q];
        for (k, &dk) in diag.iter().enumerate() {
            for m in 0..4 {
                let want = if k == m { dk } else { 0.0 };
                worst = worst.max((report.alpha.get(k, m) - re(want)).norm());
            }
        }
    }

    let channel = KrausChannel::bit_flip_enlarged(0.1).expect("valid p");
    let with_triple = vec![
        channel.operators()[0].clone(),
        channel.operators()[7].clone(),
    ];
    let broken = kl_check_exact(&code, &with_triple, 1e-12).expect("well-formed ops");

    let pass = all_exact && !broken.exact && worst <= tolerance;
    CheckResult {
        name: "exact_kl",
        unit: "coefficient",
        expected: 0.0,
        computed: worst,
        tolerance,
        pass,
    }
}

/// The four correctable-syndrome mixed states are pairwise orthogonal with
/// purity 1/2 (overlap matrix ½·I₄), and complementary flip patterns
/// produce identical states.
fn check_stabilizer_overlaps(tolerance: f64) -> CheckResult {
    let code = repetition3();
    let channel = KrausChannel::bit_flip_enlarged(0.1).expect("valid p");
    let states = stabilizer_mixed_states(&code, channel.operators()).expect("full flip family");

    let four: Vec<DensityMatrix> = REPETITION3_CORRECTABLE
        .iter()
        .map(|&k| states[k].state.clone())
        .collect();
    let overlaps = overlap_matrix(&four).expect("matching dims");

    let mut worst = 0.0_f64;
    for (i, row) in overlaps.iter().enumerate() {
        for (j, &overlap) in row.iter().enumerate() {
            let want = if i == j { 0.5 } else { 0.0 };
            worst = worst.max((overlap - want).abs());
        }
    }
    for (a, b) in [(0, 7), (1, 6), (2, 5), (3, 4)] {
        worst = worst.max(max_abs_diff(
            states[a].state.matrix(),
            states[b].state.matrix(),
        ));
    }

    CheckResult {
        name: "stabilizer_overlaps",
        unit: "overlap",
        expected: 0.0,
        computed: worst,
        tolerance,
        pass: worst <= tolerance,
    }
}

/// The recovery-derived POVM discriminates the four syndrome states
/// perfectly, and every element passes the product-structure certificate a
/// measurement must satisfy to be locally implementable.
fn check_locc(tolerance: f64) -> CheckResult {
    let code = repetition3();
    let povm = recovery_povm(code.recovery().expect("built-in recovery")).expect("instrument");
    let channel = KrausChannel::bit_flip_enlarged(0.1).expect("valid p");
    let states = stabilizer_mixed_states(&code, channel.operators()).expect("full flip family");
    let four: Vec<DensityMatrix> = REPETITION3_CORRECTABLE
        .iter()
        .map(|&k| states[k].state.clone())
        .collect();

    let report = locc_necessary_check(&povm, &four, tolerance).expect("matching counts");
    let pass = report.perfect && report.separable_certificate && report.max_deviation <= tolerance;
    CheckResult {
        name: "locc",
        unit: "probability",
        expected: 0.0,
        computed: report.max_deviation,
        tolerance,
        pass,
    }
}

/// Order-1 decomposition of the damping family on the four-qubit code at
/// γ = 0.1: α₀₀ = 0.8 and B̂₀₀ = diag(0.02805, 0.01), with a tiny
/// reconstruction residual. On an exactly correctable family the residual
/// blocks vanish outright.
fn check_approx_kl(tolerance: f64) -> CheckResult {
    let leung = leung4();
    let family = |g: f64| -> Result<Vec<ComplexMatrix>, QuantumError> {
        Ok(KrausChannel::amplitude_damping(g)?
            .tensor_power(4)?
            .operators()
            .to_vec())
    };
    let report = kl_decompose_approx(&leung, &family, 0.1, 1).expect("smooth family");
    let a00 = report.alpha.get(0, 0);
    let b00 = report.b_hat.get(&(0, 0)).expect("block (0,0) present");
    let dev = (a00 - re(0.8))
        .norm()
        .max((b00.get(0, 0) - re(0.02805)).norm())
        .max((b00.get(1, 1) - re(0.01)).norm())
        .max(b00.get(0, 1).norm())
        .max(b00.get(1, 0).norm());

    let code = repetition3();
    let exact_family = |p: f64| -> Result<Vec<ComplexMatrix>, QuantumError> {
        let channel = KrausChannel::bit_flip_enlarged(p)?;
        Ok(REPETITION3_CORRECTABLE
            .iter()
            .map(|&k| channel.operators()[k].clone())
            .collect())
    };
    let exact_report = kl_decompose_approx(&code, &exact_family, 0.1, 3).expect("smooth family");
    let exact_b: f64 = exact_report
        .b_hat
        .values()
        .flat_map(|block| block.data().iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);

    let pass = dev <= tolerance && report.residual <= 1e-9 && exact_b <= 1e-10;
    CheckResult {
        name: "approx_kl",
        unit: "coefficient",
        expected: 0.8,
        computed: a00.re,
        tolerance,
        pass,
    }
}

/// Detection-probability spread of the no-damping operator on the
/// four-qubit code: ½γ²(2−γ)² — 0.01805 at γ = 0.1, ≈2γ² in the small-γ
/// regime — while on the exactly correctable code the spread is zero.
fn check_detection(tolerance: f64) -> CheckResult {
    let leung = leung4();
    let spread_at = |g: f64| {
        let channel = KrausChannel::amplitude_damping(g)
            .expect("valid g")
            .tensor_power(4)
            .expect("fits");
        let (lo, hi) = detection_range(&leung, &channel.operators()[0]).expect("valid op");
        hi - lo
    };

    let expected = 0.01805;
    let computed = spread_at(0.1);
    let mut pass = (computed - expected).abs() <= tolerance;
    for g in [1e-2, 1e-3] {
        let ratio = spread_at(g) / (g * g);
        pass &= (1.5..=2.5).contains(&ratio);
    }

    let rep_channel = KrausChannel::bit_flip_enlarged(0.1).expect("valid p");
    let (lo, hi) =
        detection_range(&repetition3(), &rep_channel.operators()[1]).expect("valid op");
    pass &= (hi - lo).abs() <= 1e-12;

    CheckResult {
        name: "detection",
        unit: "probability",
        expected,
        computed,
        tolerance,
        pass,
    }
}

/// Post-recovery infidelity of the four-qubit code scales as γ²: the
/// (1−F)/γ² ratios at γ ∈ {0.05, 0.02, 0.01} agree within 25%, and at
/// γ = 0.05 recovering beats not recovering.
fn check_fidelity_scaling(tolerance: f64) -> CheckResult {
    let code = leung4();
    let mut ratios = Vec::new();
    let mut recovered_at_005 = f64::MAX;
    let mut bare_at_005 = f64::MAX;

    for gamma in [0.05, 0.02, 0.01] {
        let channel = KrausChannel::amplitude_damping(gamma)
            .expect("valid g")
            .tensor_power(4)
            .expect("fits");
        let correctable: Vec<ComplexMatrix> = LEUNG4_CORRECTABLE
            .iter()
            .map(|&k| channel.operators()[k].clone())
            .collect();
        let recovery = KrausChannel::new(
            canonical_recovery(&code, &correctable).expect("correctable family"),
            true,
        )
        .expect("complete instrument");

        let mut worst = f64::MAX;
        for codeword in code.codewords() {
            let rho = codeword.density();
            let noisy = channel.apply(&rho).expect("complete channel").state;
            let recovered = recovery.apply(&noisy).expect("complete instrument").state;
            let f = fidelity(codeword, &recovered).expect("matching dims");
            worst = worst.min(f);
            if gamma == 0.05 {
                recovered_at_005 = recovered_at_005.min(f);
                bare_at_005 = bare_at_005.min(fidelity(codeword, &noisy).expect("matching dims"));
            }
        }
        ratios.push((1.0 - worst) / (gamma * gamma));
    }

    let mut computed = 0.0_f64;
    for i in 0..ratios.len() {
        for j in 0..ratios.len() {
            computed = computed.max(ratios[i] / ratios[j] - 1.0);
        }
    }
    let pass = computed <= tolerance && recovered_at_005 > bare_at_005;
    CheckResult {
        name: "fidelity_scaling",
        unit: "ratio",
        expected: 0.0,
        computed,
        tolerance,
        pass,
    }
}

/// The damping strength where the output entropy first crosses the input
/// entropy, for the input whose entropy is 0.56 nats: γ* ≈ 0.25, found as
/// the single downward crossing on a fine sweep. The bits-side overlap
/// solve is also certified to land on its target entropy.
fn check_ad_threshold(tolerance: f64) -> CheckResult {
    let a_bits = solve_overlap_for_entropy(0.56, LogBase::Two).expect("reachable target");
    let residual = (binary_entropy((1.0 + a_bits) / 2.0, LogBase::Two).expect("in range") - 0.56)
        .abs();

    let a_nats = solve_overlap_for_entropy(0.56, LogBase::E).expect("reachable target");
    let grid: Vec<f64> = (0..=500).map(|i| i as f64 * 1e-3).collect();
    let sweep = ad_entropy_sweep(a_nats, &grid, LogBase::E).expect("valid sweep");
    let computed = sweep.thresholds.first().copied().unwrap_or(f64::NAN);

    let expected = 0.25;
    let pass = residual <= 1e-9
        && sweep.thresholds.len() == 1
        && (computed - expected).abs() <= tolerance;
    CheckResult {
        name: "ad_threshold",
        unit: "parameter",
        expected,
        computed,
        tolerance,
        pass,
    }
}

/// The erasure cost is strictly decreasing in the overlap: every interior
/// central difference on a 50-point grid is negative.
fn check_erasure(tolerance: f64) -> CheckResult {
    let h = 1.0 / 102.0;
    let mut computed = f64::MIN;
    for i in 1..=50 {
        let x = i as f64 / 51.0;
        let hi = erasure_entropy(x + h, LogBase::Two).expect("in range");
        let lo = erasure_entropy(x - h, LogBase::Two).expect("in range");
        computed = computed.max(hi - lo);
    }
    CheckResult {
        name: "erasure",
        unit: "bits",
        expected: 0.0,
        computed,
        tolerance,
        pass: computed < tolerance,
    }
}

/// Unital qubit channels never decrease entropy (200 mixed states, three
/// strengths each of depolarizing and dephasing), while the damping channel
/// at γ = 0.9 crushes the maximally mixed state by more than half a bit —
/// the monotonicity is a property of the channel class, not of channels.
fn check_channel_entropy(tolerance: f64, seed: u64) -> CheckResult {
    let mut min_slack = f64::MAX;
    for i in 0..200 {
        let psi = sample_pure_state(2, seed + 1000 + i);
        let lambda = 0.9 * (i as f64 + 0.5) / 200.0;
        let blended = psi
            .density()
            .matrix()
            .scale(re(1.0 - lambda))
            .add(&ComplexMatrix::identity(2).scale(re(lambda / 2.0)));
        let rho = DensityMatrix::new(blended).expect("convex blend");
        let s_in = von_neumann(&rho, LogBase::Two);
        for p in [0.1, 0.5, 0.9] {
            for channel in [
                KrausChannel::depolarizing(p).expect("valid p"),
                KrausChannel::dephasing(p).expect("valid p"),
            ] {
                let out = channel.apply(&rho).expect("complete channel").state;
                min_slack = min_slack.min(von_neumann(&out, LogBase::Two) - s_in);
            }
        }
    }

    let mixed = DensityMatrix::maximally_mixed(2);
    let damped = KrausChannel::amplitude_damping(0.9)
        .expect("valid g")
        .apply(&mixed)
        .expect("complete channel")
        .state;
    let decrease = von_neumann(&mixed, LogBase::Two) - von_neumann(&damped, LogBase::Two);

    let pass = min_slack >= -tolerance && decrease > 0.5;
    CheckResult {
        name: "channel_entropy",
        unit: "bits",
        expected: 0.0,
        computed: min_slack,
        tolerance,
        pass,
    }
}

/// No measurement beats the optimal bound: 10⁴ random binary detectors on
/// an overlap-½ pair all err at least (2−√3)/4, while an orthogonal pair is
/// discriminated perfectly by the computational detectors.
fn check_impossibility(tolerance: f64, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let psi1 = PureState::basis(2, 0);
    let psi2 = PureState::new(vec![re(0.5), re(3.0_f64.sqrt() / 2.0)]).expect("unit vector");
    let ensemble = DiscriminationEnsemble::new(vec![psi1.density(), psi2.density()], vec![0.5, 0.5])
        .expect("two equal priors");
    let expected = (2.0 - 3.0_f64.sqrt()) / 4.0;
    debug_assert!(
        (helstrom_pure(&psi1, &psi2, 0.5, 0.5).expect("valid pair") - expected).abs() < 1e-14
    );

    let mut computed = f64::MAX;
    for _ in 0..10_000 {
        let povm = random_binary_povm(2, &mut rng);
        computed = computed.min(povm_error(&povm, &ensemble).expect("matching dims"));
    }

    let e1 = PureState::basis(2, 1);
    let orthogonal =
        DiscriminationEnsemble::new(vec![psi1.density(), e1.density()], vec![0.5, 0.5])
            .expect("two equal priors");
    let perfect = povm_error(&Povm::computational(2), &orthogonal).expect("matching dims");

    let pass = computed >= expected - tolerance && perfect <= 1e-12;
    CheckResult {
        name: "impossibility",
        unit: "probability",
        expected,
        computed,
        tolerance,
        pass,
    }
}
