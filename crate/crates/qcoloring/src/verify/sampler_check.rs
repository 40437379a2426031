//! Statistical validation of the sampler against exact cylinder
//! probabilities. This suite is advisory: it draws seeded random samples
//! and applies a chi-square test, unlike the exact suites, which are
//! authoritative.

use crate::measure::{proper_words, render_colors, Color, CylinderMeasure};
use crate::sampler::{ColoringStream, RNG_ID};
use crate::verify::report::{Failure, ReportBuilder, SuiteReport};
use crate::verify::VerifyError;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::collections::HashMap;

pub const CHI_SQUARE_SIGNIFICANCE: f64 = 1e-3;
const MIN_EXPECTED_CELL_COUNT: f64 = 5.0;

/// Draws `n_samples` independent windows of `window_len` colors by exact
/// conditional sampling (window cap disabled, so each window has exactly
/// the cylinder law) and checks:
///
/// - propriety of every sampled window,
/// - chi-square goodness of fit of window frequencies against the exact
///   probabilities, at significance 10^-3,
/// - for windows of length >= 3, that the (first, third) joint counts are
///   within 4 standard errors of the product of the empirical marginals —
///   the sites are separated by one position, so the exact law makes them
///   independent.
pub fn check_sampler(
    m: &CylinderMeasure,
    n_samples: usize,
    window_len: usize,
    seed: u64,
) -> Result<SuiteReport, VerifyError> {
    let q = m.q();
    if n_samples == 0 {
        return Err(VerifyError::Config("n_samples must be positive".into()));
    }
    if window_len == 0 {
        return Err(VerifyError::Config("window_len must be positive".into()));
    }
    if window_len > m.length_cap() {
        return Err(VerifyError::Config(format!(
            "window_len {window_len} exceeds the measure length cap {}",
            m.length_cap()
        )));
    }

    let windows = proper_words(q, window_len);
    let mut expected = Vec::with_capacity(windows.len());
    for w in &windows {
        let p = m.prob_slice(w)?;
        expected.push(n_samples as f64 * p.to_f64());
    }
    let min_expected = expected.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_expected < MIN_EXPECTED_CELL_COUNT {
        return Err(VerifyError::Config(format!(
            "insufficient samples: smallest expected cell count {min_expected:.2} < {MIN_EXPECTED_CELL_COUNT}"
        )));
    }

    let mut rb = ReportBuilder::new("sampler", vec![q]).advisory();
    rb.param("n_samples", n_samples);
    rb.param("window_len", window_len);
    rb.param("seed", seed);
    rb.param("rng", RNG_ID);
    rb.param("significance", CHI_SQUARE_SIGNIFICANCE);

    let index: HashMap<&[Color], usize> = windows
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_ref(), i))
        .collect();
    let mut counts = vec![0u64; windows.len()];
    let qn = q as usize;
    let mut first_third = vec![0u64; qn * qn];
    let mut first_marginal = vec![0u64; qn];
    let mut third_marginal = vec![0u64; qn];

    let mut stream = ColoringStream::with_window_cap(m, seed, None);
    rb.add_checks(n_samples as u64); // one propriety check per sample
    for _ in 0..n_samples {
        stream.reset_window();
        let w = stream.sample_n(window_len)?;
        match index.get(w.colors()) {
            Some(&i) => counts[i] += 1,
            None => {
                // only improper windows are missing from the index
                rb.extend_failures(vec![Failure {
                    check: "sampled_window_is_proper".into(),
                    q,
                    input: render_colors(w.colors()),
                    expected: "a proper window".into(),
                    actual: "improper".into(),
                }]);
            }
        }
        if window_len >= 3 {
            let a = (w.colors()[0] - 1) as usize;
            let c = (w.colors()[2] - 1) as usize;
            first_third[a * qn + c] += 1;
            first_marginal[a] += 1;
            third_marginal[c] += 1;
        }
    }

    // chi-square goodness of fit against the exact cylinder probabilities
    rb.add_checks(1);
    let stat: f64 = counts
        .iter()
        .zip(&expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    let df = (windows.len() - 1) as f64;
    let dist = ChiSquared::new(df).map_err(|e| VerifyError::Config(e.to_string()))?;
    let p_value = 1.0 - dist.cdf(stat);
    rb.param("chi_square_stat", format!("{stat:.4}"));
    rb.param("chi_square_df", df);
    rb.param("chi_square_p", format!("{p_value:.6}"));
    if p_value < CHI_SQUARE_SIGNIFICANCE {
        rb.extend_failures(vec![Failure {
            check: "chi_square_goodness_of_fit".into(),
            q,
            input: format!("n={n_samples} window_len={window_len} seed={seed}"),
            expected: format!("p >= {CHI_SQUARE_SIGNIFICANCE}"),
            actual: format!("p = {p_value:.6} (stat {stat:.3}, df {df})"),
        }]);
    }

    // sites at distance two: joint counts within 4 SE of the product of
    // the empirical marginals
    if window_len >= 3 {
        rb.add_checks((qn * qn) as u64);
        let n = n_samples as f64;
        for a in 0..qn {
            for c in 0..qn {
                let p_hat = (first_marginal[a] as f64 / n) * (third_marginal[c] as f64 / n);
                let expected_cell = n * p_hat;
                let observed = first_third[a * qn + c] as f64;
                let se = (expected_cell * (1.0 - p_hat)).sqrt();
                let deviation = (observed - expected_cell).abs();
                if deviation > 4.0 * se {
                    rb.extend_failures(vec![Failure {
                        check: "distance_two_sites_factorize".into(),
                        q,
                        input: format!("first={} third={}", a + 1, c + 1),
                        expected: format!("within 4se of {expected_cell:.1} (se {se:.2})"),
                        actual: format!("{observed}"),
                    }]);
                }
            }
        }
    }

    Ok(rb.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::CylinderMeasure;

    #[test]
    fn config_errors() {
        let m = CylinderMeasure::new(4).unwrap();
        assert!(matches!(
            check_sampler(&m, 0, 3, 1),
            Err(VerifyError::Config(_))
        ));
        assert!(matches!(
            check_sampler(&m, 100, 0, 1),
            Err(VerifyError::Config(_))
        ));
        // 50 samples over 36 cells: smallest expected count below 5
        assert!(matches!(
            check_sampler(&m, 50, 3, 1),
            Err(VerifyError::Config(_))
        ));
    }

    #[test]
    fn small_smoke_run_passes() {
        let m = CylinderMeasure::new(4).unwrap();
        let report = check_sampler(&m, 2000, 1, 99).unwrap();
        assert!(report.advisory);
        assert!(report.passed(), "{}", report.render_text(20));
    }

    #[test]
    fn chi_square_reference_value() {
        // cross-check the p-value machinery against a known case
        let dist = ChiSquared::new(3.0).unwrap();
        let p = 1.0 - dist.cdf(2.417_910_447_761_194);
        assert!((p - 0.490_309_306_965_388_3).abs() < 1e-12);
    }
}
