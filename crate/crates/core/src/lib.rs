//! Desk-scale numerics for the entropy bookkeeping of quantum error
//! correction.
//!
//! The crate simulates full error-correction cycles (noise, syndrome
//! measurement, recovery) on density matrices of dimension ≤ 64, tracks the
//! entropy ledger of each step (state entropy, syndrome record cost, entropy
//! exchange), verifies Knill–Laflamme conditions exactly and order-by-order
//! for approximately correctable noise, and evaluates the state-discrimination
//! bounds that govern syndrome extraction.
//!
//! Modules, bottom up:
//!
//! * [`linalg`] — dense complex matrices and a Jacobi Hermitian eigensolver.
//! * [`quantum`] — states, Kraus channels, POVMs, measurement.
//! * [`entropy`] — von Neumann / Shannon entropies and entropy exchange.
//! * [`codes`] — the two reference codes, Knill–Laflamme checks, recoveries.
//! * [`discrim`] — Helstrom bounds, ambiguity factors, LOCC checks.
//! * [`cycle`] — the assembled correction cycle and its parameter sweeps.

pub mod codes;
pub mod cycle;
pub mod discrim;
pub mod entropy;
pub mod linalg;
pub mod quantum;

pub use codes::{kl_check_exact, kl_decompose_approx, QecCode};
pub use cycle::{ad_entropy_sweep, classify_errors, run_cycle, CycleReport, SweepResult};
pub use discrim::{ambiguity_delta_min, helstrom_mixed, helstrom_pure};
pub use entropy::{entropy_exchange, shannon, von_neumann, LogBase};
pub use linalg::{ComplexMatrix, EigenDecomposition, LinalgError};
pub use quantum::{DensityMatrix, KrausChannel, MeasurementOutcome, Povm, PureState};
