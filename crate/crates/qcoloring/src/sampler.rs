//! Seeded sequential sampler for the stationary 1-dependent coloring.
//!
//! Each step computes the exact conditional law of the next color given
//! the current window and selects a color by comparing one 64-bit uniform
//! draw against the exact cumulative fractions via cross-multiplication —
//! no floating point anywhere in the selection path.
//!
//! With the window cap disabled the finite-dimensional law of the first
//! `n` outputs is exactly the cylinder measure. Because the cost of an
//! exact conditional grows quickly with window length, long streams use a
//! sliding window: once the window reaches `window_cap` colors,
//! conditioning sees only the most recent `window_cap` of them. That
//! truncation is an approximation of the full process (propriety and the
//! single-site marginal remain exact by color symmetry, but longer
//! cylinders may deviate), so distribution-sensitive checks are run with
//! the cap disabled at lengths where that is affordable.

use crate::exactnum::Rational;
use crate::measure::{Color, CylinderMeasure, MeasureError, Word};
use num_bigint::BigInt;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

/// Identifier of the generator backing [`ColoringStream`]. Golden
/// sequences are portable across implementations only under the same
/// named generator.
pub const RNG_ID: &str = "chacha8";

/// Default sliding-window cap for streams built with [`ColoringStream::new`].
///
/// Per-step cost grows roughly like 1.75^cap fresh memo entries, so 8
/// keeps long streams (10^4+ colors) at milliseconds per step while
/// conditioning on a window that 1-dependence suggests is already far
/// beyond the correlation length.
pub const DEFAULT_WINDOW_CAP: usize = 8;

/// Header metadata identifying a sampled stream.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct StreamMetadata {
    pub q: u32,
    pub seed: u64,
    pub rng: &'static str,
    pub window_cap: Option<usize>,
}

/// Stateful generator of one coloring; single-threaded by design. Streams
/// with distinct seeds may run in parallel against a shared measure.
pub struct ColoringStream<'a> {
    measure: &'a CylinderMeasure,
    rng: ChaCha8Rng,
    seed: u64,
    window: Vec<Color>,
    window_cap: Option<usize>,
}

impl<'a> ColoringStream<'a> {
    /// A stream with the default sliding-window cap.
    pub fn new(measure: &'a CylinderMeasure, seed: u64) -> Self {
        Self::with_window_cap(measure, seed, Some(DEFAULT_WINDOW_CAP))
    }

    /// `window_cap: None` disables truncation: the emitted law is exactly
    /// the cylinder measure, and the stream errors once the window
    /// outgrows the measure's length cap. `Some(c)` requires `c >= 1`.
    pub fn with_window_cap(
        measure: &'a CylinderMeasure,
        seed: u64,
        window_cap: Option<usize>,
    ) -> Self {
        if let Some(c) = window_cap {
            assert!(c >= 1, "window cap must be at least 1");
        }
        ColoringStream {
            measure,
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            window: Vec::new(),
            window_cap,
        }
    }

    pub fn q(&self) -> u32 {
        self.measure.q()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn window_cap(&self) -> Option<usize> {
        self.window_cap
    }

    pub fn metadata(&self) -> StreamMetadata {
        StreamMetadata {
            q: self.q(),
            seed: self.seed,
            rng: RNG_ID,
            window_cap: self.window_cap,
        }
    }

    /// Clears the window while keeping the generator state, so one stream
    /// can emit many independent exact windows deterministically.
    pub fn reset_window(&mut self) {
        self.window.clear();
    }

    /// Draws the next color with exact conditional probability
    /// `P(window·a)/P(window)` and appends it to the window.
    pub fn next_color(&mut self) -> Result<Color, MeasureError> {
        let q = self.measure.q();
        let p_window = self.measure.prob_slice(&self.window)?;
        if p_window.is_zero() {
            // the window is proper by construction, so this cannot happen
            return Err(MeasureError::ConditionOnNull);
        }
        let u = self.rng.next_u64();

        // select a with u/2^64 < (Σ_{b<=a} P(window·b)) / P(window),
        // compared exactly by cross-multiplication
        let mut cumulative = Rational::zero();
        let mut chosen: Option<Color> = None;
        let mut extended = Vec::with_capacity(self.window.len() + 1);
        for a in 1..=q as Color {
            extended.clear();
            extended.extend_from_slice(&self.window);
            extended.push(a);
            let pa = self.measure.prob_slice(&extended)?;
            if pa.is_zero() {
                continue;
            }
            cumulative += &pa;
            if u_below_fraction(u, &cumulative, &p_window) {
                chosen = Some(a);
                break;
            }
        }
        // consistency makes the final cumulative equal P(window), so the
        // comparison must have selected something
        let a = chosen.expect("conditional masses must sum to the window probability");
        self.window.push(a);
        if let Some(cap) = self.window_cap {
            if self.window.len() > cap {
                let excess = self.window.len() - cap;
                self.window.drain(..excess);
            }
        }
        Ok(a)
    }

    /// Emits `n` successive colors.
    pub fn sample_n(&mut self, n: usize) -> Result<Word, MeasureError> {
        let mut colors = Vec::with_capacity(n);
        for _ in 0..n {
            colors.push(self.next_color()?);
        }
        Word::new(self.q(), colors)
    }
}

/// `u/2^64 < num/den` for positive rationals, exactly:
/// `u·den_n·num_d < num_n·den_d·2^64`.
fn u_below_fraction(u: u64, num: &Rational, den: &Rational) -> bool {
    let lhs = BigInt::from(u) * num.denom() * den.numer();
    let rhs = (num.numer() * den.denom()) << 64u32;
    lhs < rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{is_proper_slice, MeasureOptions, MemoMode};

    #[test]
    fn determinism_same_seed_same_sequence() {
        let m = CylinderMeasure::new(5).unwrap();
        let a = ColoringStream::new(&m, 42).sample_n(64).unwrap();
        let b = ColoringStream::new(&m, 42).sample_n(64).unwrap();
        assert_eq!(a, b);
        let c = ColoringStream::new(&m, 43).sample_n(64).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn golden_sequence_q4_seed1() {
        // pinned output of the chacha8 generator; a change here means the
        // sampling path changed behavior
        let m = CylinderMeasure::new(4).unwrap();
        let got = ColoringStream::new(&m, 1).sample_n(10).unwrap();
        assert_eq!(got.colors(), &[2, 1, 3, 1, 2, 4, 2, 1, 4, 3]);
    }

    #[test]
    fn emitted_sequences_are_proper() {
        for q in 4..=10u32 {
            let m = CylinderMeasure::new(q).unwrap();
            for (seed, cap, len) in [
                (7u64, Some(4), 500usize),
                (8, Some(1), 500),
                // exact mode is bounded by the measure's length cap
                (9, None, 16),
            ] {
                let mut s = ColoringStream::with_window_cap(&m, seed, cap);
                let w = s.sample_n(len).unwrap();
                assert!(is_proper_slice(w.colors()), "q={q} seed={seed} cap={cap:?}");
            }
        }
    }

    #[test]
    fn long_streams_stay_proper_at_every_q() {
        // 10^4 emitted colors per q; canonical memo keys keep the memo
        // bounded by pattern counts rather than (q-1)^cap
        for q in 4..=10u32 {
            let m = CylinderMeasure::with_options(
                q,
                MeasureOptions {
                    memo_mode: MemoMode::Canonical,
                    ..MeasureOptions::default()
                },
            )
            .unwrap();
            let mut s = ColoringStream::new(&m, 0xF00D + q as u64);
            let w = s.sample_n(10_000).unwrap();
            assert!(is_proper_slice(w.colors()), "q={q}");
        }
    }

    #[test]
    fn truncated_window_never_exceeds_cap() {
        let m = CylinderMeasure::new(4).unwrap();
        let mut s = ColoringStream::with_window_cap(&m, 3, Some(5));
        for _ in 0..50 {
            s.next_color().unwrap();
            assert!(s.window.len() <= 5);
        }
    }

    #[test]
    fn exact_mode_respects_measure_length_cap() {
        let m = CylinderMeasure::with_options(
            4,
            MeasureOptions {
                length_cap: 6,
                memo_mode: MemoMode::Exact,
            },
        )
        .unwrap();
        let mut s = ColoringStream::with_window_cap(&m, 1, None);
        // the 7th draw needs P of a 7-letter word
        let err = s.sample_n(10).unwrap_err();
        assert!(matches!(err, MeasureError::WordTooLong { .. }));
    }

    #[test]
    fn reset_window_keeps_rng_state() {
        let m = CylinderMeasure::new(4).unwrap();
        let mut s = ColoringStream::with_window_cap(&m, 11, None);
        let mut joined = Vec::new();
        for _ in 0..4 {
            s.reset_window();
            joined.extend_from_slice(s.sample_n(3).unwrap().colors());
        }
        // same rng stream, windows restarted: deterministic and generally
        // different from a single 12-draw window
        let mut s2 = ColoringStream::with_window_cap(&m, 11, None);
        let mut joined2 = Vec::new();
        for _ in 0..4 {
            s2.reset_window();
            joined2.extend_from_slice(s2.sample_n(3).unwrap().colors());
        }
        assert_eq!(joined, joined2);
    }

    #[test]
    fn metadata_reports_generator() {
        let m = CylinderMeasure::new(6).unwrap();
        let s = ColoringStream::with_window_cap(&m, 5, Some(8));
        let meta = s.metadata();
        assert_eq!(meta.rng, "chacha8");
        assert_eq!(meta.q, 6);
        assert_eq!(meta.seed, 5);
        assert_eq!(meta.window_cap, Some(8));
    }

    #[test]
    fn single_site_marginals_close_to_uniform() {
        // 10^4 emitted colors at q=5: each color within 4 standard errors
        // of n/5. The sliding window leaves the single-site marginal
        // exactly uniform by color symmetry.
        let m = CylinderMeasure::new(5).unwrap();
        let mut s = ColoringStream::with_window_cap(&m, 20240715, Some(8));
        let n = 10_000usize;
        let w = s.sample_n(n).unwrap();
        let mut counts = [0usize; 5];
        for &c in w.colors() {
            counts[(c - 1) as usize] += 1;
        }
        let expected = n as f64 / 5.0;
        let se = (n as f64 * 0.2 * 0.8).sqrt();
        for (i, &cnt) in counts.iter().enumerate() {
            let dev = (cnt as f64 - expected).abs();
            assert!(
                dev <= 4.0 * se,
                "color {} count {} deviates {:.1} > 4se={:.1}",
                i + 1,
                cnt,
                dev,
                4.0 * se
            );
        }
    }
}
