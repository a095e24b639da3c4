//! Command-line front end: reproduction suite, single correction cycles,
//! correctability reports, discrimination bounds, and damping sweeps.
//!
//! Exit codes: 0 on success (and all checks passing), 1 when `reproduce`
//! finds a failing check, 2 for configuration or input errors.

mod checks;
mod inputs;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use entroqec::codes::{
    canonical_recovery, kl_check_exact, kl_decompose_approx, ApproxKlReport, CodesError, KlReport,
};
use entroqec::cycle::{
    ad_entropy_sweep, classify_errors, run_cycle_in_base, CycleError, CycleReport, SweepResult,
};
use entroqec::discrim::{
    ambiguity_asymptote, ambiguity_constraint, ambiguity_delta_min, helstrom_pure, povm_error,
    DiscrimError, DiscriminationEnsemble,
};
use entroqec::entropy::{binary_entropy, solve_overlap_for_entropy, EntropyError, LogBase};
use entroqec::linalg::{off_diagonal_mass, ComplexMatrix};
use entroqec::quantum::{Povm, PureState, QuantumError};

use checks::{CheckResult, CHECK_NAMES};
use inputs::InputError;

#[derive(Parser)]
#[command(
    name = "entroqec",
    version,
    about = "Entropy accounting for quantum error correction: cycles, correctability, discrimination bounds"
)]
struct Cli {
    /// Logarithm base for entropies: 2 (bits) or e (nats). The reproduce
    /// suite ignores this; each of its checks pins its own base.
    #[arg(long, global = true, default_value = "2")]
    base: BaseArg,

    /// Seed for every randomized sweep.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Output format.
    #[arg(long, global = true, default_value = "table")]
    format: Format,

    /// Write the output atomically to this path instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseArg {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
}

impl From<BaseArg> for LogBase {
    fn from(arg: BaseArg) -> Self {
        match arg {
            BaseArg::Two => LogBase::Two,
            BaseArg::E => LogBase::E,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Re-derive every anchored quantity and compare against expectations.
    Reproduce {
        /// Override a check tolerance, e.g. --tolerance helstrom=1e-9
        /// (repeatable; later overrides win).
        #[arg(long = "tolerance", value_name = "NAME=VALUE")]
        tolerance: Vec<String>,
    },
    /// Run one error-correction cycle and print its entropy ledger.
    Cycle {
        /// Built-in code (repetition3, leung4) or path to a code JSON file.
        #[arg(long, default_value = "repetition3")]
        code: String,
        /// Noise: bitflip:P, ad:G, depol:P, dephase:P, or a channel JSON path.
        #[arg(long, default_value = "bitflip:0.1")]
        noise: String,
        /// Restrict the noise to the code's correctable errors.
        #[arg(long)]
        restricted: bool,
    },
    /// Discrimination bounds: the worked two-state example, or the smallest
    /// ambiguity factor for a given overlap.
    #[command(group(ArgGroup::new("mode").required(true)))]
    Discriminate {
        /// Run the symmetric two-state worked example.
        #[arg(long, group = "mode")]
        helstrom_example: bool,
        /// Overlap c1 for the ambiguity-factor minimum.
        #[arg(long, group = "mode", value_name = "OVERLAP")]
        c1: Option<f64>,
    },
    /// Correctability report: exact check, or order-by-order decomposition
    /// with --order.
    Kl {
        /// Built-in code (repetition3, leung4) or path to a code JSON file.
        #[arg(long, default_value = "repetition3")]
        code: String,
        /// Channel: bitflip:P, ad:G, depol:P, dephase:P, or a JSON path.
        #[arg(long, default_value = "bitflip:0.1")]
        channel: String,
        /// Truncation order for the approximate decomposition (0–5).
        #[arg(long)]
        order: Option<usize>,
        /// Check only the channel's correctable subset.
        #[arg(long)]
        restricted: bool,
    },
    /// Damping sweep of output entropy and fidelity, with entropy-crossing
    /// thresholds.
    Sweep {
        /// Input coherence a of the state (|0>+a|1>-like mix); defaults to
        /// the overlap whose input entropy is 0.56 nats.
        #[arg(long)]
        overlap: Option<f64>,
        /// Damping grid START:END:STEP.
        #[arg(long, default_value = "0:0.5:0.001")]
        grid: String,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Codes(#[from] CodesError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(transparent)]
    Discrim(#[from] DiscrimError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error("rendering JSON: {0}")]
    Render(#[from] serde_json::Error),
    #[error("writing {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let base: LogBase = cli.base.into();
    let (text, exit) = match &cli.command {
        Command::Reproduce { tolerance } => cmd_reproduce(cli.seed, tolerance, cli.format)?,
        Command::Cycle {
            code,
            noise,
            restricted,
        } => (cmd_cycle(code, noise, *restricted, base, cli.format)?, 0),
        Command::Discriminate {
            helstrom_example,
            c1,
        } => (cmd_discriminate(*helstrom_example, *c1, cli.format)?, 0),
        Command::Kl {
            code,
            channel,
            order,
            restricted,
        } => (cmd_kl(code, channel, *order, *restricted, cli.format)?, 0),
        Command::Sweep { overlap, grid } => (cmd_sweep(*overlap, grid, base, cli.format)?, 0),
    };
    emit(cli.out.as_deref(), &text)?;
    Ok(exit)
}

// --- reproduce -------------------------------------------------------------------

fn cmd_reproduce(
    seed: u64,
    tolerance: &[String],
    format: Format,
) -> Result<(String, u8), CliError> {
    let overrides = parse_tolerances(tolerance)?;
    let results = checks::run_all(seed, &overrides);
    let all_pass = results.iter().all(|r| r.pass);

    let text = match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                seed: u64,
                all_pass: bool,
                checks: &'a [CheckResult],
            }
            to_json(&Doc {
                seed,
                all_pass,
                checks: &results,
            })?
        }
        Format::Csv => {
            let mut s = String::from("check,expected,computed,tolerance,unit,pass\n");
            for r in &results {
                s += &format!(
                    "{},{:?},{:?},{:?},{},{}\n",
                    r.name, r.expected, r.computed, r.tolerance, r.unit, r.pass
                );
            }
            s
        }
        Format::Table => {
            let mut s = format!(
                "{:<20} {:>13} {:>13} {:>10} {:<12} {}\n",
                "check", "expected", "computed", "tolerance", "unit", "result"
            );
            for r in &results {
                s += &format!(
                    "{:<20} {:>13} {:>13} {:>10} {:<12} {}\n",
                    r.name,
                    sig6(r.expected),
                    sig6(r.computed),
                    compact(r.tolerance),
                    r.unit,
                    if r.pass { "pass" } else { "FAIL" }
                );
            }
            let passed = results.iter().filter(|r| r.pass).count();
            s += &format!("\n{passed} of {} checks passed\n", results.len());
            s
        }
    };
    Ok((text, if all_pass { 0 } else { 1 }))
}

fn parse_tolerances(args: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
    let mut map = BTreeMap::new();
    for arg in args {
        let (name, value) = arg.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("--tolerance expects NAME=VALUE, got '{arg}'"))
        })?;
        if !CHECK_NAMES.contains(&name) {
            return Err(CliError::Usage(format!(
                "unknown check '{name}' in --tolerance (known: {})",
                CHECK_NAMES.join(", ")
            )));
        }
        let value: f64 = value.parse().map_err(|_| {
            CliError::Usage(format!("tolerance value in '{arg}' is not a number"))
        })?;
        if !value.is_finite() || value < 0.0 {
            return Err(CliError::Usage(format!(
                "tolerance must be a nonnegative number, got {value}"
            )));
        }
        map.insert(name.to_string(), value);
    }
    Ok(map)
}

// --- cycle -----------------------------------------------------------------------

fn cmd_cycle(
    code_spec: &str,
    noise_spec: &str,
    restricted: bool,
    base: LogBase,
    format: Format,
) -> Result<String, CliError> {
    let code = inputs::load_code(code_spec)?;
    let source = inputs::parse_noise(noise_spec)?;
    let full = source.channel(code.n_qubits())?;

    // The correctable subset is needed to restrict the noise and to build a
    // recovery when the code does not carry one. Classification probes the
    // family's small-noise scaling, so the probe strength is decoupled from
    // whatever strength this cycle runs at.
    let correctable: Option<Vec<usize>> = if restricted || code.recovery().is_none() {
        let (name, param) = source.named().ok_or(InputError::NeedNamedNoise)?;
        let probe = if param > 0.0 { param.min(0.25) } else { 0.1 };
        let n = code.n_qubits();
        let family =
            |g: f64| -> Result<Vec<ComplexMatrix>, QuantumError> { inputs::family_ops(name, n, g) };
        Some(classify_errors(&code, &family, probe, 1)?.correctable)
    } else {
        None
    };

    let noise = match (restricted, &correctable) {
        (true, Some(indices)) => full.restrict(indices)?,
        _ => full.clone(),
    };
    let recovery: Vec<ComplexMatrix> = match code.recovery() {
        Some(ops) => ops.to_vec(),
        None => {
            let indices = correctable.as_ref().expect("classified above");
            let ops: Vec<ComplexMatrix> = indices
                .iter()
                .map(|&k| full.operators()[k].clone())
                .collect();
            canonical_recovery(&code, &ops)?
        }
    };

    let rho_in = code.codewords()[0].density();
    let report = run_cycle_in_base(&code, &noise, &recovery, &rho_in, restricted, base)?;
    render_cycle(&report, format)
}

fn render_cycle(report: &CycleReport, format: Format) -> Result<String, CliError> {
    let unit = unit_name(&report.log_base);
    match format {
        Format::Json => to_json(report),
        Format::Csv => {
            let mut s = String::from("field,value,unit\n");
            for (label, v) in scalar_ledger(report) {
                s += &format!("{label},{v:?},{unit}\n");
            }
            s += &format!("fidelity,{:?},dimensionless\n", report.fidelity);
            s += &format!("leakage,{:?},probability\n", report.leakage);
            for (k, p) in report.syndrome_probs.iter().enumerate() {
                s += &format!("syndrome_p{k},{p:?},probability\n");
            }
            s += &format!(
                "w_off_diagonal_mass,{:?},dimensionless\n",
                off_diagonal_mass(&report.w.matrix)
            );
            for (name, ok) in &report.verdicts {
                s += &format!("verdict:{name},{ok},boolean\n");
            }
            Ok(s)
        }
        Format::Table => {
            let mut s = format!("cycle ledger ({unit})\n");
            for (label, v) in scalar_ledger(report) {
                s += &format!("  {label:<14} {:>12}\n", sig6(v));
            }
            s += &format!("  {:<14} {:>12}   (dimensionless)\n", "fidelity", sig6(report.fidelity));
            s += &format!("  {:<14} {:>12}   (probability)\n", "leakage", sig6(report.leakage));
            s += "syndrome probabilities\n ";
            for (k, p) in report.syndrome_probs.iter().enumerate() {
                s += &format!(" p{k}={}", sig6(*p));
            }
            s += "\n";
            s += &format!(
                "exchange matrix: {}x{}, off-diagonal mass {}\n",
                report.w.matrix.rows(),
                report.w.matrix.cols(),
                sig6(off_diagonal_mass(&report.w.matrix))
            );
            s += "verdicts\n";
            for (name, ok) in &report.verdicts {
                s += &format!("  {:<4} {name}\n", if *ok { "pass" } else { "FAIL" });
            }
            s += "(recovered state omitted from the table; use --format json)\n";
            Ok(s)
        }
    }
}

fn scalar_ledger(report: &CycleReport) -> [(&'static str, f64); 6] {
    [
        ("s_in", report.s_in),
        ("s_noisy", report.s_noisy),
        ("delta_s", report.delta_s),
        ("erasure_cost", report.erasure_cost),
        ("s_exchange", report.s_exchange),
        ("delta_s_tot", report.delta_s_tot),
    ]
}

// --- discriminate ----------------------------------------------------------------

fn cmd_discriminate(
    helstrom_example: bool,
    c1: Option<f64>,
    format: Format,
) -> Result<String, CliError> {
    if helstrom_example {
        let (psi1, psi2) = checks::worked_example_pair();
        let optimal_error = helstrom_pure(&psi1, &psi2, 0.5, 0.5)?;
        let e0 = PureState::basis(2, 0);
        let e1 = PureState::basis(2, 1);
        let detectors = Povm::new(vec![e1.outer(&e1), e0.outer(&e0)])?;
        let ensemble =
            DiscriminationEnsemble::new(vec![psi1.density(), psi2.density()], vec![0.5, 0.5])?;
        let detector_error = povm_error(&detectors, &ensemble)?;

        #[derive(Serialize)]
        struct Doc {
            unit: &'static str,
            overlap: f64,
            optimal_error: f64,
            detector_error: f64,
        }
        let doc = Doc {
            unit: "probability",
            overlap: psi1.inner(&psi2).norm(),
            optimal_error,
            detector_error,
        };
        match format {
            Format::Json => to_json(&doc),
            Format::Csv => Ok(format!(
                "field,value,unit\noverlap,{:?},dimensionless\noptimal_error,{:?},{}\ndetector_error,{:?},{}\n",
                doc.overlap, doc.optimal_error, doc.unit, doc.detector_error, doc.unit
            )),
            Format::Table => Ok(format!(
                "two-state discrimination, equal priors\n  overlap          {}\n  optimal_error    {}  ({})\n  detector_error   {}  ({})\n",
                sig6(doc.overlap),
                sig6(doc.optimal_error),
                doc.unit,
                sig6(doc.detector_error),
                doc.unit
            )),
        }
    } else {
        let c1 = c1.expect("clap guarantees one mode");
        if !(0.0..=1.0).contains(&c1) {
            return Err(CliError::Usage(format!(
                "--c1 must be an overlap in [0, 1], got {c1}"
            )));
        }
        let result = ambiguity_delta_min(c1);

        #[derive(Serialize)]
        struct Doc {
            unit: &'static str,
            overlap: f64,
            delta_min: f64,
            asymptotic_ratio: f64,
            asymptote: f64,
            constraint_at_min: f64,
        }
        let doc = Doc {
            unit: "probability",
            overlap: result.overlap,
            delta_min: result.delta_min,
            asymptotic_ratio: result.asymptotic_ratio,
            asymptote: ambiguity_asymptote(),
            constraint_at_min: ambiguity_constraint(c1, result.delta_min),
        };
        match format {
            Format::Json => to_json(&doc),
            Format::Csv => {
                let mut s = String::from("field,value,unit\n");
                s += &format!("overlap,{:?},dimensionless\n", doc.overlap);
                s += &format!("delta_min,{:?},{}\n", doc.delta_min, doc.unit);
                s += &format!("asymptotic_ratio,{:?},ratio\n", doc.asymptotic_ratio);
                s += &format!("asymptote,{:?},ratio\n", doc.asymptote);
                s += &format!("constraint_at_min,{:?},dimensionless\n", doc.constraint_at_min);
                Ok(s)
            }
            Format::Table => Ok(format!(
                "smallest ambiguity factor\n  overlap           {}\n  delta_min         {}  ({})\n  delta_min/c1^2    {}  (ratio; asymptote {})\n  constraint g      {}  (feasible iff <= 0)\n",
                sig6(doc.overlap),
                sig6(doc.delta_min),
                doc.unit,
                sig6(doc.asymptotic_ratio),
                sig6(doc.asymptote),
                sig6(doc.constraint_at_min)
            )),
        }
    }
}

// --- kl --------------------------------------------------------------------------

fn cmd_kl(
    code_spec: &str,
    channel_spec: &str,
    order: Option<usize>,
    restricted: bool,
    format: Format,
) -> Result<String, CliError> {
    let code = inputs::load_code(code_spec)?;
    let source = inputs::parse_noise(channel_spec)?;
    let n = code.n_qubits();

    let indices: Option<Vec<usize>> = if restricted {
        let (name, param) = source.named().ok_or(InputError::NeedNamedNoise)?;
        let probe = if param > 0.0 { param.min(0.25) } else { 0.1 };
        let family =
            |g: f64| -> Result<Vec<ComplexMatrix>, QuantumError> { inputs::family_ops(name, n, g) };
        Some(classify_errors(&code, &family, probe, 1)?.correctable)
    } else {
        None
    };

    match order {
        None => {
            let channel = source.channel(n)?;
            let ops: Vec<ComplexMatrix> = match &indices {
                Some(sel) => sel.iter().map(|&k| channel.operators()[k].clone()).collect(),
                None => channel.operators().to_vec(),
            };
            let report = kl_check_exact(&code, &ops, 1e-10)?;
            render_kl_exact(&report, format)
        }
        Some(order) => {
            let (name, param) = source.named().ok_or(InputError::NeedNamedNoise)?;
            let family = |g: f64| -> Result<Vec<ComplexMatrix>, QuantumError> {
                let ops = inputs::family_ops(name, n, g)?;
                Ok(match &indices {
                    Some(sel) => sel.iter().map(|&k| ops[k].clone()).collect(),
                    None => ops,
                })
            };
            let report = kl_decompose_approx(&code, &family, param, order)?;
            render_kl_approx(&report, format)
        }
    }
}

fn render_kl_exact(report: &KlReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => {
            let mut s = String::from("field,value,unit\n");
            s += &format!("exact,{},boolean\n", report.exact);
            s += &format!("residual,{:?},coefficient\n", report.residual);
            let k = report.alpha.rows();
            for j in 0..k {
                for m in 0..k {
                    s += &format!("alpha[{j}][{m}],{},coefficient\n", cstr(report.alpha.get(j, m)));
                }
            }
            Ok(s)
        }
        Format::Table => {
            let k = report.alpha.rows();
            let mut s = format!(
                "exact correctability: {}\nresidual: {} (coefficient)\nalpha ({k}x{k}, coefficients):\n",
                if report.exact { "yes" } else { "no" },
                sig6(report.residual)
            );
            s += &matrix_rows(&report.alpha);
            Ok(s)
        }
    }
}

fn render_kl_approx(report: &ApproxKlReport, format: Format) -> Result<String, CliError> {
    // The library report keys residual blocks by operator pair; flatten to
    // explicit (j, k) entries for serialization.
    #[derive(Serialize)]
    struct BlockEntry<'a> {
        j: usize,
        k: usize,
        block: &'a ComplexMatrix,
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        truncation_order: usize,
        residual: f64,
        alpha: &'a ComplexMatrix,
        b_hat: Vec<BlockEntry<'a>>,
    }
    let doc = Doc {
        truncation_order: report.truncation_order,
        residual: report.residual,
        alpha: &report.alpha,
        b_hat: report
            .b_hat
            .iter()
            .map(|(&(j, k), block)| BlockEntry { j, k, block })
            .collect(),
    };

    match format {
        Format::Json => to_json(&doc),
        Format::Csv => {
            let mut s = String::from("field,value,unit\n");
            s += &format!("truncation_order,{},order\n", doc.truncation_order);
            s += &format!("residual,{:?},coefficient\n", doc.residual);
            let k = report.alpha.rows();
            for j in 0..k {
                for m in 0..k {
                    s += &format!("alpha[{j}][{m}],{},coefficient\n", cstr(report.alpha.get(j, m)));
                }
            }
            for entry in &doc.b_hat {
                let block = entry.block;
                for r in 0..block.rows() {
                    for c in 0..block.cols() {
                        s += &format!(
                            "b_hat[{}][{}][{r}][{c}],{},coefficient\n",
                            entry.j,
                            entry.k,
                            cstr(block.get(r, c))
                        );
                    }
                }
            }
            Ok(s)
        }
        Format::Table => {
            let k = report.alpha.rows();
            let mut s = format!(
                "order-{} decomposition\nresidual: {} (coefficient)\n",
                doc.truncation_order,
                sig6(doc.residual)
            );
            if k <= 6 {
                s += &format!("alpha ({k}x{k}, coefficients):\n");
                s += &matrix_rows(&report.alpha);
            } else {
                s += &format!("alpha diagonal ({k} coefficients):\n ");
                for j in 0..k {
                    s += &format!(" {}", cstr(report.alpha.get(j, j)));
                }
                let mut max_off = 0.0_f64;
                for j in 0..k {
                    for m in 0..k {
                        if j != m {
                            max_off = max_off.max(report.alpha.get(j, m).norm());
                        }
                    }
                }
                s += &format!("\nlargest off-diagonal |alpha|: {}\n", sig6(max_off));
            }
            let mut shown = 0;
            let mut skipped = 0;
            s += "residual blocks b_hat with entries above 1e-9:\n";
            for entry in &doc.b_hat {
                let peak = entry
                    .block
                    .data()
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                if peak <= 1e-9 {
                    continue;
                }
                if shown >= 12 {
                    skipped += 1;
                    continue;
                }
                shown += 1;
                s += &format!("  b_hat[{}][{}]:\n", entry.j, entry.k);
                for line in matrix_rows(entry.block).lines() {
                    s += &format!("  {line}\n");
                }
            }
            if shown == 0 {
                s += "  (none)\n";
            }
            if skipped > 0 {
                s += &format!("  ... and {skipped} more (use --format json)\n");
            }
            Ok(s)
        }
    }
}

// --- sweep -----------------------------------------------------------------------

fn cmd_sweep(
    overlap: Option<f64>,
    grid_spec: &str,
    base: LogBase,
    format: Format,
) -> Result<String, CliError> {
    let a = match overlap {
        Some(a) => a,
        None => solve_overlap_for_entropy(0.56, LogBase::E)?,
    };
    let grid = inputs::parse_grid(grid_spec)?;
    let result = ad_entropy_sweep(a, &grid, base)?;

    match format {
        Format::Csv => Ok(result.to_csv()),
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                overlap: f64,
                result: &'a SweepResult,
            }
            to_json(&Doc {
                overlap: a,
                result: &result,
            })
        }
        Format::Table => {
            let unit = unit_name(&base);
            let s_in = binary_entropy((1.0 + a) / 2.0, base)?;
            let mut s = format!(
                "damping sweep: overlap a = {}, {} points on [{}, {}]\n",
                sig6(a),
                result.parameter.len(),
                compact(result.parameter[0]),
                compact(*result.parameter.last().expect("nonempty grid"))
            );
            s += &format!("input entropy: {} {unit}\n", sig6(s_in));
            if result.thresholds.is_empty() {
                s += "entropy crossings: none\n";
            } else {
                s += "entropy crossings (damping parameter):";
                for t in &result.thresholds {
                    s += &format!(" {}", sig6(*t));
                }
                s += "\n";
            }
            let last = result.parameter.len() - 1;
            let s_last = match base {
                LogBase::Two => result.entropy_bits[last],
                LogBase::E => result.entropy_nats[last],
            };
            s += &format!(
                "endpoint: S = {} {unit}, fidelity = {} at parameter {}\n",
                sig6(s_last),
                sig6(result.fidelity[last]),
                compact(result.parameter[last])
            );
            s += "(full columns: --format csv)\n";
            Ok(s)
        }
    }
}

// --- shared rendering helpers ------------------------------------------------------

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn unit_name(base: &LogBase) -> &'static str {
    match base {
        LogBase::Two => "bits",
        LogBase::E => "nats",
    }
}

/// Six significant digits, scientific when far from unity.
fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}

/// Shortest human form: plain when near unity, scientific otherwise.
fn compact(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if (1e-3..1e6).contains(&a) {
        let s = format!("{x:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{x:e}")
    }
}

fn cstr(z: Complex64) -> String {
    if z.im.abs() < 1e-12 {
        sig6(z.re)
    } else if z.im >= 0.0 {
        format!("{}+{}i", sig6(z.re), sig6(z.im))
    } else {
        format!("{}-{}i", sig6(z.re), sig6(-z.im))
    }
}

fn matrix_rows(m: &ComplexMatrix) -> String {
    let mut s = String::new();
    for r in 0..m.rows() {
        s += " ";
        for c in 0..m.cols() {
            s += &format!(" {:>12}", cstr(m.get(r, c)));
        }
        s += "\n";
    }
    s
}

// --- output ----------------------------------------------------------------------

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => atomic_write(path, text),
    }
}

/// Writes to a sibling temp file and renames into place, so a crash or a
/// concurrent reader never sees a half-written report.
fn atomic_write(path: &Path, text: &str) -> Result<(), CliError> {
    let file_name = path.file_name().ok_or_else(|| {
        CliError::Usage(format!("--out path '{}' has no file name", path.display()))
    })?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(".partial");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, text).map_err(|e| CliError::Io {
        path: tmp.display().to_string(),
        source: e,
    })?;
    fs::rename(&tmp, path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })
}
