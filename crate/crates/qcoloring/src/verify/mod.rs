//! Executable verification suites: exact identity checks over the
//! coefficient sequences and the cylinder measure, plus an advisory
//! statistical suite for the sampler.
//!
//! Every exact suite enumerates a finite input space, compares both sides
//! of an identity by exact equality, and reports *all* failures — the
//! most likely implementation bug is an off-by-one in a coefficient
//! index, and a full failure list localizes it immediately. Suites are
//! deterministic given their parameters.

mod exec;
mod report;

pub mod checks;
mod sampler_check;

pub use checks::{
    check_coeff_identities, check_coeff_oracle, check_consistency, check_deletion_identities,
    check_golden, check_one_dependence, check_rationality_positivity, check_symmetries,
    check_uniform_rule_equivalence,
};
pub use exec::ExecMode;
pub use report::{Failure, SuiteReport};
pub use sampler_check::{check_sampler, CHI_SQUARE_SIGNIFICANCE};

use crate::chebyshev::{CoeffTable, Fault};
use crate::measure::{CylinderMeasure, MeasureError, MeasureOptions, DEFAULT_LENGTH_CAP};
use std::collections::BTreeMap;
use thiserror::Error;

/// Seed for the sampled color permutations in the measure suite.
pub const DEFAULT_SYMMETRY_SEED: u64 = 0x5eed_c01e;
/// Sampled permutations per word for q > 4 (q = 4 is exhaustive).
pub const DEFAULT_PERM_SAMPLES: usize = 20;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

fn params(entries: &[(&str, String)]) -> BTreeMap<String, String> {
    entries
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn table_for(q: u32, fault: Option<Fault>) -> Result<CoeffTable, VerifyError> {
    let t = match fault {
        Some(f) => CoeffTable::with_fault(q, f),
        None => CoeffTable::new(q),
    };
    Ok(t.map_err(MeasureError::from)?)
}

/// The coefficient identity suite over every q in `q_set`.
pub fn run_identity_suite(
    q_set: &[u32],
    mn_max: i64,
    jkl_max: i64,
    mode: ExecMode,
) -> Result<SuiteReport, VerifyError> {
    run_identity_suite_with_fault(q_set, mn_max, jkl_max, mode, None)
}

/// Identity suite with an optional planted coefficient fault; with a
/// fault in range the suite must fail, proving the checks bite.
pub fn run_identity_suite_with_fault(
    q_set: &[u32],
    mn_max: i64,
    jkl_max: i64,
    mode: ExecMode,
    fault: Option<Fault>,
) -> Result<SuiteReport, VerifyError> {
    let mut parts = Vec::new();
    for &q in q_set {
        let table = table_for(q, fault)?;
        parts.push(check_coeff_identities(&table, mn_max, jkl_max, mode));
    }
    Ok(SuiteReport::merged(
        "identities",
        q_set.to_vec(),
        params(&[
            ("mn_max", mn_max.to_string()),
            ("jkl_max", jkl_max.to_string()),
        ]),
        parts,
    ))
}

/// Recurrence-vs-binomial-sum oracle agreement over every q in `q_set`.
pub fn run_coeff_oracle_suite(
    q_set: &[u32],
    max_n: usize,
    mode: ExecMode,
) -> Result<SuiteReport, VerifyError> {
    run_coeff_oracle_suite_with_fault(q_set, max_n, mode, None)
}

pub fn run_coeff_oracle_suite_with_fault(
    q_set: &[u32],
    max_n: usize,
    mode: ExecMode,
    fault: Option<Fault>,
) -> Result<SuiteReport, VerifyError> {
    let mut parts = Vec::new();
    for &q in q_set {
        let table = table_for(q, fault)?;
        parts.push(check_coeff_oracle(&table, max_n, mode));
    }
    Ok(SuiteReport::merged(
        "coeff_oracle",
        q_set.to_vec(),
        params(&[("max_n", max_n.to_string())]),
        parts,
    ))
}

/// The six closed-form probabilities over every q in `q_set`.
pub fn run_golden_suite(q_set: &[u32], mode: ExecMode) -> Result<SuiteReport, VerifyError> {
    run_golden_suite_with_fault(q_set, mode, None)
}

pub fn run_golden_suite_with_fault(
    q_set: &[u32],
    mode: ExecMode,
    fault: Option<Fault>,
) -> Result<SuiteReport, VerifyError> {
    let mut parts = Vec::new();
    for &q in q_set {
        let m = CylinderMeasure::from_coeffs(table_for(q, fault)?, MeasureOptions::default());
        parts.push(check_golden(&m, mode));
    }
    Ok(SuiteReport::merged(
        "golden",
        q_set.to_vec(),
        BTreeMap::new(),
        parts,
    ))
}

/// The full measure suite: consistency, 1-dependence, the deletion-sum
/// identities, symmetries, rationality and positivity — and at q=4 the
/// uniform-rule equivalence — all to `max_len`.
///
/// Each q gets a fresh measure that is dropped before the next starts, so
/// peak memo memory is bounded by the largest single q.
pub fn run_measure_suite(
    q_set: &[u32],
    max_len: usize,
    mode: ExecMode,
) -> Result<SuiteReport, VerifyError> {
    run_measure_suite_with_fault(q_set, max_len, mode, None)
}

pub fn run_measure_suite_with_fault(
    q_set: &[u32],
    max_len: usize,
    mode: ExecMode,
    fault: Option<Fault>,
) -> Result<SuiteReport, VerifyError> {
    let mut parts = Vec::new();
    for &q in q_set {
        let m = CylinderMeasure::from_coeffs(
            table_for(q, fault)?,
            MeasureOptions {
                length_cap: DEFAULT_LENGTH_CAP.max(max_len + 2),
                ..MeasureOptions::default()
            },
        );
        parts.push(check_consistency(&m, max_len, mode));
        parts.push(check_one_dependence(&m, max_len, mode));
        parts.push(check_deletion_identities(&m, max_len, mode));
        parts.push(check_symmetries(
            &m,
            max_len,
            DEFAULT_PERM_SAMPLES,
            DEFAULT_SYMMETRY_SEED,
            mode,
        ));
        parts.push(check_rationality_positivity(&m, max_len, mode));
        if q == 4 {
            parts.push(check_uniform_rule_equivalence(&m, max_len, mode));
        }
    }
    Ok(SuiteReport::merged(
        "measure",
        q_set.to_vec(),
        params(&[("max_len", max_len.to_string())]),
        parts,
    ))
}

/// The advisory statistical suite for one q.
pub fn run_sampler_suite(
    q: u32,
    n_samples: usize,
    window_len: usize,
    seed: u64,
) -> Result<SuiteReport, VerifyError> {
    let m = CylinderMeasure::new(q)?;
    check_sampler(&m, n_samples, window_len, seed)
}
