//! Exact arithmetic and verification for the stationary, color-symmetric,
//! 1-dependent q-colorings of the integers, `q >= 4`.
//!
//! The probability of seeing a finite color word `x = (x_1, …, x_n)` in a
//! window of the process is defined by a deletion recursion whose
//! coefficients are Chebyshev values at √q/2:
//!
//! ```text
//! P(x) = (1/D(n+1)) · Σ_{i=1..n} C(n-2i+1) · P(x̂_i)
//! C(n) = T_n(√q/2)          D(n) = √q · U_{n-1}(√q/2)
//! ```
//!
//! where `x̂_i` deletes the i-th entry, `P(∅) = 1`, and `P(x) = 0` for
//! words with two equal adjacent colors. Everything is computed in exact
//! rational arithmetic over Q[√q] — no floating point touches any
//! probability.
//!
//! The crate provides:
//!
//! - [`exactnum`]: arbitrary-precision rationals and the ring Q[√q];
//! - [`chebyshev`]: the coefficient sequences `C`, `D` with an
//!   independent binomial-sum oracle;
//! - [`measure`]: the cylinder measure `P`, conditionals, and the gap
//!   probability `P(x*y)`;
//! - [`sampler`]: a seeded stream emitting the coloring by exact
//!   conditional sampling;
//! - [`verify`]: suites that recheck consistency, 1-dependence, the
//!   symmetries, and the coefficient identities by exact equality, plus a
//!   chi-square suite for the sampler.
//!
//! With the default `parallel` feature the verification suites fan out
//! over rayon; disabling it leaves identical sequential behavior.

pub mod chebyshev;
pub mod exactnum;
pub mod measure;
pub mod sampler;
pub mod verify;

pub use chebyshev::{coeff_oracle, CoeffKind, CoeffTable, Fault};
pub use exactnum::{decimal_string, ExactError, QAdjoined, Rational};
pub use measure::{
    proper_words, Color, CylinderMeasure, MeasureError, MeasureOptions, MemoMode, Word,
};
pub use sampler::{ColoringStream, StreamMetadata, DEFAULT_WINDOW_CAP, RNG_ID};
pub use verify::{ExecMode, SuiteReport, VerifyError};
