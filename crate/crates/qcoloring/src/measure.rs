//! The cylinder measure: exact probabilities of finite color words under
//! the stationary 1-dependent q-coloring.
//!
//! For a proper word `x` of length `n` the probability is defined by the
//! deletion recursion
//!
//! ```text
//! P(x) = (1/D(n+1)) · Σ_{i=1..n} C(n-2i+1) · P(x with entry i deleted)
//! ```
//!
//! with `P(empty) = 1` and `P(x) = 0` for improper `x`. The sum is
//! accumulated in Q[√q]; the √q parts cancel exactly and the final value
//! is extracted as a [`Rational`]. A nonzero √q residue at extraction
//! would mean a coefficient bug, and surfaces as an error rather than a
//! silent approximation.
//!
//! Evaluation memoizes over sub-words. The worst case is exponential in
//! the word length (every proper sub-word can appear), so words are
//! capped at a configurable length, 24 by default.

use crate::chebyshev::CoeffTable;
use crate::exactnum::{ExactError, QAdjoined, Rational};
use dashmap::DashMap;
use std::fmt;
use thiserror::Error;

/// One color, in `1..=q`.
pub type Color = u16;

pub const DEFAULT_LENGTH_CAP: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error("q must be an integer >= 4, got {0}")]
    InvalidQ(u32),
    #[error("color {color} out of range 1..={q}")]
    ColorOutOfRange { color: Color, q: u32 },
    #[error("cannot parse {0:?} as a comma-separated color word")]
    WordParse(String),
    #[error("word uses q={got} but this measure has q={expected}")]
    QMismatch { expected: u32, got: u32 },
    #[error("deletion index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("word length {len} exceeds the configured cap {cap}")]
    WordTooLong { len: usize, cap: usize },
    #[error("cannot condition on a word of probability zero")]
    ConditionOnNull,
    #[error("operation requires a proper word")]
    ImproperWord,
    #[error("operation requires a nonempty word")]
    EmptyWord,
    #[error("sqrt(q) residue computing P({word}): {value} (internal invariant violation)")]
    SqrtResidue { word: String, value: String },
    #[error("the uniform deletion rule is defined only for q=4, got {0}")]
    UniformRuleRequiresQ4(u32),
    #[error("permutation must be a bijection of 1..={0}")]
    InvalidPermutation(u32),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// A finite color sequence over `{1, …, q}`.
///
/// Propriety (no two adjacent entries equal) is a derived predicate, not
/// an invariant: improper words are legal inputs with probability zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Word {
    q: u32,
    colors: Vec<Color>,
}

impl Word {
    pub fn new(q: u32, colors: Vec<Color>) -> Result<Self, MeasureError> {
        if q < 4 {
            return Err(MeasureError::InvalidQ(q));
        }
        for &c in &colors {
            if c < 1 || c as u32 > q {
                return Err(MeasureError::ColorOutOfRange { color: c, q });
            }
        }
        Ok(Word { q, colors })
    }

    pub fn empty(q: u32) -> Result<Self, MeasureError> {
        Self::new(q, Vec::new())
    }

    /// Parses a comma-separated color list such as `"1,2,3"`. An empty or
    /// all-whitespace string is the empty word.
    pub fn parse(q: u32, s: &str) -> Result<Self, MeasureError> {
        let t = s.trim();
        if t.is_empty() {
            return Self::empty(q);
        }
        let mut colors = Vec::new();
        for part in t.split(',') {
            let c: Color = part
                .trim()
                .parse()
                .map_err(|_| MeasureError::WordParse(s.to_string()))?;
            colors.push(c);
        }
        Self::new(q, colors)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// True iff no two adjacent entries are equal. Vacuously true for the
    /// empty word.
    pub fn is_proper(&self) -> bool {
        is_proper_slice(&self.colors)
    }

    /// The word with entry `i` removed, `i` 1-based in `1..=len`.
    pub fn delete_at(&self, i: usize) -> Result<Word, MeasureError> {
        if i < 1 || i > self.colors.len() {
            return Err(MeasureError::IndexOutOfRange {
                index: i,
                len: self.colors.len(),
            });
        }
        let mut colors = Vec::with_capacity(self.colors.len() - 1);
        colors.extend_from_slice(&self.colors[..i - 1]);
        colors.extend_from_slice(&self.colors[i..]);
        Ok(Word { q: self.q, colors })
    }

    /// This word with `a` appended.
    pub fn extended(&self, a: Color) -> Result<Word, MeasureError> {
        if a < 1 || a as u32 > self.q {
            return Err(MeasureError::ColorOutOfRange { color: a, q: self.q });
        }
        let mut colors = self.colors.clone();
        colors.push(a);
        Ok(Word { q: self.q, colors })
    }

    pub fn concat(&self, other: &Word) -> Result<Word, MeasureError> {
        if self.q != other.q {
            return Err(MeasureError::QMismatch {
                expected: self.q,
                got: other.q,
            });
        }
        let mut colors = self.colors.clone();
        colors.extend_from_slice(&other.colors);
        Ok(Word { q: self.q, colors })
    }

    pub fn reversed(&self) -> Word {
        let mut colors = self.colors.clone();
        colors.reverse();
        Word { q: self.q, colors }
    }

    /// Applies a color permutation given as `perm[c-1]` = image of `c`.
    pub fn permuted(&self, perm: &[Color]) -> Result<Word, MeasureError> {
        if perm.len() != self.q as usize {
            return Err(MeasureError::InvalidPermutation(self.q));
        }
        let mut seen = vec![false; self.q as usize];
        for &p in perm {
            if p < 1 || p as u32 > self.q || seen[(p - 1) as usize] {
                return Err(MeasureError::InvalidPermutation(self.q));
            }
            seen[(p - 1) as usize] = true;
        }
        let colors = self
            .colors
            .iter()
            .map(|&c| perm[(c - 1) as usize])
            .collect();
        Ok(Word { q: self.q, colors })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in &self.colors {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
            first = false;
        }
        Ok(())
    }
}

pub(crate) fn is_proper_slice(colors: &[Color]) -> bool {
    colors.windows(2).all(|w| w[0] != w[1])
}

/// Relabels colors by first occurrence: `(3,1,3,5) -> (1,2,1,3)`.
pub(crate) fn canonical_pattern(colors: &[Color]) -> Box<[Color]> {
    let mut assigned: Vec<Color> = Vec::new();
    colors
        .iter()
        .map(|&c| {
            if let Some(pos) = assigned.iter().position(|&a| a == c) {
                (pos + 1) as Color
            } else {
                assigned.push(c);
                assigned.len() as Color
            }
        })
        .collect()
}

/// Memo-key policy for [`CylinderMeasure`].
///
/// `Exact` keys by the literal color sequence — correctness straight from
/// the definition. `Canonical` keys by the first-occurrence relabeling,
/// exploiting permutation invariance to collapse the memo; that leans on
/// a property of the measure rather than its definition, so it stays
/// opt-in and is validated against the exact path in the test suite.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MemoMode {
    #[default]
    Exact,
    Canonical,
}

#[derive(Clone, Copy, Debug)]
pub struct MeasureOptions {
    pub length_cap: usize,
    pub memo_mode: MemoMode,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions {
            length_cap: DEFAULT_LENGTH_CAP,
            memo_mode: MemoMode::Exact,
        }
    }
}

/// Exact, memoizing evaluator of the cylinder measure for one `q`.
///
/// All public probability outputs are [`Rational`]. The memo is a
/// concurrent map, so one measure may serve many threads; entries are
/// inserted fully constructed and recomputation of a key always produces
/// the identical value.
pub struct CylinderMeasure {
    q: u32,
    coeffs: CoeffTable,
    memo: DashMap<Box<[Color]>, Rational>,
    uniform_memo: DashMap<Box<[Color]>, Rational>,
    options: MeasureOptions,
}

impl CylinderMeasure {
    pub fn new(q: u32) -> Result<Self, MeasureError> {
        Self::with_options(q, MeasureOptions::default())
    }

    pub fn with_options(q: u32, options: MeasureOptions) -> Result<Self, MeasureError> {
        let coeffs = CoeffTable::new(q)?;
        Ok(Self::from_coeffs(coeffs, options))
    }

    /// Builds a measure over an existing coefficient table (the fault
    /// injection entry point for the verification suites).
    pub fn from_coeffs(coeffs: CoeffTable, options: MeasureOptions) -> Self {
        CylinderMeasure {
            q: coeffs.q(),
            coeffs,
            memo: DashMap::new(),
            uniform_memo: DashMap::new(),
            options,
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn length_cap(&self) -> usize {
        self.options.length_cap
    }

    pub fn coeffs(&self) -> &CoeffTable {
        &self.coeffs
    }

    pub fn memo_entries(&self) -> usize {
        self.memo.len()
    }

    /// Drops every cached value. Recomputation yields identical results.
    pub fn clear_memo(&self) {
        self.memo.clear();
        self.uniform_memo.clear();
    }

    fn check_word(&self, x: &Word) -> Result<(), MeasureError> {
        if x.q() != self.q {
            return Err(MeasureError::QMismatch {
                expected: self.q,
                got: x.q(),
            });
        }
        Ok(())
    }

    /// `P(x)`: exact probability of observing the word `x` in a window.
    pub fn prob(&self, x: &Word) -> Result<Rational, MeasureError> {
        self.check_word(x)?;
        self.prob_slice(x.colors())
    }

    pub(crate) fn prob_slice(&self, colors: &[Color]) -> Result<Rational, MeasureError> {
        if colors.len() > self.options.length_cap {
            return Err(MeasureError::WordTooLong {
                len: colors.len(),
                cap: self.options.length_cap,
            });
        }
        if !is_proper_slice(colors) {
            return Ok(Rational::zero());
        }
        if colors.is_empty() {
            return Ok(Rational::one());
        }
        let key: Box<[Color]> = match self.options.memo_mode {
            MemoMode::Exact => colors.into(),
            MemoMode::Canonical => canonical_pattern(colors),
        };
        if let Some(v) = self.memo.get(key.as_ref()) {
            return Ok(v.clone());
        }
        let ring = self.deletion_sum_ring(&key)?;
        let p = ring.as_rational().map_err(|_| MeasureError::SqrtResidue {
            word: render_colors(&key),
            value: ring.to_string(),
        })?;
        self.memo.insert(key, p.clone());
        Ok(p)
    }

    /// The Q[√q] value of the deletion recursion for a proper word,
    /// before the rational extraction. This is the intermediate whose √q
    /// component must vanish; the verification suites assert that
    /// directly.
    pub(crate) fn deletion_sum_ring(&self, colors: &[Color]) -> Result<QAdjoined, MeasureError> {
        if colors.is_empty() {
            return Ok(QAdjoined::one(self.q));
        }
        if !is_proper_slice(colors) {
            return Ok(QAdjoined::zero(self.q));
        }
        let n = colors.len();
        let mut acc = QAdjoined::zero(self.q);
        let mut sub: Vec<Color> = Vec::with_capacity(n - 1);
        for i in 1..=n {
            sub.clear();
            sub.extend_from_slice(&colors[..i - 1]);
            sub.extend_from_slice(&colors[i..]);
            if !is_proper_slice(&sub) {
                continue;
            }
            let p = self.prob_slice(&sub)?;
            let coeff = self.coeffs.c(n as i64 - 2 * i as i64 + 1);
            acc += &coeff.scale(&p);
        }
        let d = self.coeffs.d(n as i64 + 1);
        Ok(acc.checked_div(&d)?)
    }

    /// Weighted deletion functional from the consistency argument: with
    /// `starred = false` the weights are `C(2i)`, with `starred = true`
    /// they are `C(2n-2i+2)`. Either way the exact value equals
    /// `P(x)·C(n+1)`, so for even-length words it is a pure √q multiple;
    /// the result is therefore returned as a ring element.
    pub fn q_functional(&self, x: &Word, starred: bool) -> Result<QAdjoined, MeasureError> {
        self.check_word(x)?;
        if x.is_empty() {
            return Err(MeasureError::EmptyWord);
        }
        if !x.is_proper() {
            return Err(MeasureError::ImproperWord);
        }
        let colors = x.colors();
        let n = colors.len();
        let mut acc = QAdjoined::zero(self.q);
        let mut sub: Vec<Color> = Vec::with_capacity(n - 1);
        for i in 1..=n {
            sub.clear();
            sub.extend_from_slice(&colors[..i - 1]);
            sub.extend_from_slice(&colors[i..]);
            if !is_proper_slice(&sub) {
                continue;
            }
            let p = self.prob_slice(&sub)?;
            let k = if starred {
                2 * (n as i64) - 2 * i as i64 + 2
            } else {
                2 * i as i64
            };
            acc += &self.coeffs.c(k).scale(&p);
        }
        let d = self.coeffs.d(n as i64 + 1);
        Ok(acc.checked_div(&d)?)
    }

    /// `P(xa)/P(x)`: the law of the next color after a window `x`.
    pub fn conditional(&self, x: &Word, a: Color) -> Result<Rational, MeasureError> {
        self.check_word(x)?;
        if a < 1 || a as u32 > self.q {
            return Err(MeasureError::ColorOutOfRange { color: a, q: self.q });
        }
        let px = self.prob_slice(x.colors())?;
        if px.is_zero() {
            return Err(MeasureError::ConditionOnNull);
        }
        let mut extended = Vec::with_capacity(x.len() + 1);
        extended.extend_from_slice(x.colors());
        extended.push(a);
        let pxa = self.prob_slice(&extended)?;
        Ok(pxa.checked_div(&px)?)
    }

    /// `P(x*y) = Σ_a P(xay)`: the probability of `x`, one unconstrained
    /// site, then `y`.
    pub fn gap_prob(&self, x: &Word, y: &Word) -> Result<Rational, MeasureError> {
        self.check_word(x)?;
        self.check_word(y)?;
        let mut acc = Rational::zero();
        let mut buf = Vec::with_capacity(x.len() + y.len() + 1);
        for a in 1..=self.q as Color {
            buf.clear();
            buf.extend_from_slice(x.colors());
            buf.push(a);
            buf.extend_from_slice(y.colors());
            acc += &self.prob_slice(&buf)?;
        }
        Ok(acc)
    }

    /// The uniform deletion rule `P(x) = (1/(2(n+1))) Σ_i P(x̂_i)`, the
    /// historical special case that the general recursion must reproduce
    /// at `q = 4`. Kept as a fully independent evaluation path.
    pub fn prob_uniform_rule(&self, x: &Word) -> Result<Rational, MeasureError> {
        if self.q != 4 {
            return Err(MeasureError::UniformRuleRequiresQ4(self.q));
        }
        self.check_word(x)?;
        self.uniform_rule_slice(x.colors())
    }

    fn uniform_rule_slice(&self, colors: &[Color]) -> Result<Rational, MeasureError> {
        if colors.len() > self.options.length_cap {
            return Err(MeasureError::WordTooLong {
                len: colors.len(),
                cap: self.options.length_cap,
            });
        }
        if !is_proper_slice(colors) {
            return Ok(Rational::zero());
        }
        if colors.is_empty() {
            return Ok(Rational::one());
        }
        let key: Box<[Color]> = colors.into();
        if let Some(v) = self.uniform_memo.get(key.as_ref()) {
            return Ok(v.clone());
        }
        let n = colors.len();
        let mut acc = Rational::zero();
        let mut sub: Vec<Color> = Vec::with_capacity(n - 1);
        for i in 1..=n {
            sub.clear();
            sub.extend_from_slice(&colors[..i - 1]);
            sub.extend_from_slice(&colors[i..]);
            acc += &self.uniform_rule_slice(&sub)?;
        }
        let p = acc.checked_div(&Rational::from_int(2 * (n as i64 + 1)))?;
        self.uniform_memo.insert(key, p.clone());
        Ok(p)
    }

    /// All proper words of exactly `len` together with their exact
    /// probabilities, in lexicographic order.
    pub fn marginal_table(&self, len: usize) -> Result<Vec<(Word, Rational)>, MeasureError> {
        let mut out = Vec::new();
        for colors in proper_words(self.q, len) {
            let p = self.prob_slice(&colors)?;
            out.push((
                Word {
                    q: self.q,
                    colors: colors.into_vec(),
                },
                p,
            ));
        }
        Ok(out)
    }
}

pub(crate) fn render_colors(colors: &[Color]) -> String {
    let strs: Vec<String> = colors.iter().map(|c| c.to_string()).collect();
    strs.join(",")
}

/// All proper words of exactly `len` over `1..=q`, lexicographic.
pub fn proper_words(q: u32, len: usize) -> Vec<Box<[Color]>> {
    if len == 0 {
        return vec![Vec::new().into_boxed_slice()];
    }
    let mut level: Vec<Box<[Color]>> = (1..=q as Color).map(|c| vec![c].into()).collect();
    for _ in 1..len {
        let mut next = Vec::with_capacity(level.len() * (q as usize - 1));
        for w in &level {
            let last = *w.last().expect("nonempty");
            for a in 1..=q as Color {
                if a != last {
                    let mut v = Vec::with_capacity(w.len() + 1);
                    v.extend_from_slice(w);
                    v.push(a);
                    next.push(v.into_boxed_slice());
                }
            }
        }
        level = next;
    }
    level
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn word(q: u32, colors: &[Color]) -> Word {
        Word::new(q, colors.to_vec()).unwrap()
    }

    #[test]
    fn propriety_predicate() {
        assert!(word(4, &[1, 2, 1, 2]).is_proper());
        assert!(!word(4, &[1, 2, 2]).is_proper());
        assert!(word(4, &[]).is_proper());
        assert!(word(4, &[3]).is_proper());
    }

    #[test]
    fn deletion_is_one_based() {
        let x = word(5, &[1, 2, 3]);
        assert_eq!(x.delete_at(2).unwrap(), word(5, &[1, 3]));
        assert_eq!(
            word(5, &[1, 2, 1]).delete_at(1).unwrap(),
            word(5, &[2, 1])
        );
        assert_eq!(word(5, &[5]).delete_at(1).unwrap(), word(5, &[]));
        assert!(matches!(
            x.delete_at(0),
            Err(MeasureError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            x.delete_at(4),
            Err(MeasureError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn word_validation() {
        assert!(matches!(
            Word::new(5, vec![1, 6]),
            Err(MeasureError::ColorOutOfRange { color: 6, q: 5 })
        ));
        assert!(matches!(Word::new(3, vec![1]), Err(MeasureError::InvalidQ(3))));
        assert!(matches!(
            Word::new(5, vec![0]),
            Err(MeasureError::ColorOutOfRange { color: 0, q: 5 })
        ));
    }

    #[test]
    fn word_parse_and_display() {
        let x = Word::parse(5, "1, 2,3").unwrap();
        assert_eq!(x, word(5, &[1, 2, 3]));
        assert_eq!(x.to_string(), "1,2,3");
        assert_eq!(Word::parse(5, "").unwrap(), word(5, &[]));
        assert!(Word::parse(5, "1,,2").is_err());
        assert!(Word::parse(5, "1,9").is_err());
    }

    #[test]
    fn base_cases() {
        let m = CylinderMeasure::new(5).unwrap();
        assert_eq!(m.prob(&word(5, &[])).unwrap(), Rational::one());
        assert_eq!(m.prob(&word(5, &[1, 1, 2])).unwrap(), Rational::zero());
        assert_eq!(m.prob(&word(5, &[3])).unwrap(), rat(1, 5));
    }

    #[test]
    fn known_probabilities() {
        let m5 = CylinderMeasure::new(5).unwrap();
        assert_eq!(m5.prob(&word(5, &[1, 2, 3])).unwrap(), rat(1, 75));
        // frozen from a one-off symbolic expansion of the recursion
        assert_eq!(m5.prob(&word(5, &[1, 2, 1, 2, 1])).unwrap(), rat(7, 22000));
        assert_eq!(m5.prob(&word(5, &[1, 2, 3, 2, 1])).unwrap(), rat(1, 1375));

        let m4 = CylinderMeasure::new(4).unwrap();
        assert_eq!(m4.prob(&word(4, &[1, 2, 1, 2])).unwrap(), rat(1, 240));
        assert_eq!(m4.prob(&word(4, &[1, 2, 3, 4])).unwrap(), rat(1, 80));
        assert_eq!(m4.prob(&word(4, &[1, 2, 1, 2, 1])).unwrap(), rat(1, 1440));

        let m7 = CylinderMeasure::new(7).unwrap();
        assert_eq!(m7.prob(&word(7, &[1, 2, 1])).unwrap(), rat(1, 294));

        let m6 = CylinderMeasure::new(6).unwrap();
        assert_eq!(
            m6.prob(&word(6, &[1, 2, 3, 4, 5])).unwrap(),
            rat(1, 3240)
        );
    }

    #[test]
    fn q_mismatch_is_rejected() {
        let m = CylinderMeasure::new(5).unwrap();
        assert!(matches!(
            m.prob(&word(6, &[1, 2])),
            Err(MeasureError::QMismatch { expected: 5, got: 6 })
        ));
    }

    #[test]
    fn length_cap_enforced() {
        let m = CylinderMeasure::with_options(
            4,
            MeasureOptions {
                length_cap: 5,
                memo_mode: MemoMode::Exact,
            },
        )
        .unwrap();
        let too_long = word(4, &[1, 2, 1, 2, 1, 2]);
        assert!(matches!(
            m.prob(&too_long),
            Err(MeasureError::WordTooLong { len: 6, cap: 5 })
        ));
    }

    #[test]
    fn q_functional_values() {
        let m5 = CylinderMeasure::new(5).unwrap();
        // odd length: the value is rational. Q((1)) = C(2)/D(2) = 3/10
        let q1 = m5.q_functional(&word(5, &[1]), false).unwrap();
        assert_eq!(q1.as_rational().unwrap(), rat(3, 10));
        // and equals P(1)·C(2) = (1/5)(3/2)
        assert_eq!(q1.as_rational().unwrap(), &rat(1, 5) * &rat(3, 2));

        // even length at square q: Q((1,2)) collapses to 1/12 at q=4
        let m4 = CylinderMeasure::new(4).unwrap();
        let q12 = m4.q_functional(&word(4, &[1, 2]), false).unwrap();
        assert_eq!(q12.collapse().unwrap(), rat(1, 12));

        // Q == Q* == P·C(n+1) for a sample of words and qs
        for q in 4..=8u32 {
            let m = CylinderMeasure::new(q).unwrap();
            for colors in [vec![1, 2], vec![1, 2, 3], vec![1, 2, 1, 2]] {
                let x = Word::new(q, colors).unwrap();
                let n = x.len() as i64;
                let plain = m.q_functional(&x, false).unwrap();
                let starred = m.q_functional(&x, true).unwrap();
                let rhs = m.coeffs().c(n + 1).scale(&m.prob(&x).unwrap());
                assert_eq!(plain, starred, "q={q}");
                assert_eq!(plain, rhs, "q={q}");
            }
        }

        assert!(matches!(
            m5.q_functional(&word(5, &[]), false),
            Err(MeasureError::EmptyWord)
        ));
        assert!(matches!(
            m5.q_functional(&word(5, &[1, 1]), false),
            Err(MeasureError::ImproperWord)
        ));
    }

    #[test]
    fn conditionals() {
        let m5 = CylinderMeasure::new(5).unwrap();
        // improper extension
        assert_eq!(m5.conditional(&word(5, &[1]), 1).unwrap(), Rational::zero());
        // first color is uniform
        assert_eq!(m5.conditional(&word(5, &[]), 3).unwrap(), rat(1, 5));

        let m4 = CylinderMeasure::new(4).unwrap();
        let x = word(4, &[1, 2]);
        assert_eq!(m4.conditional(&x, 1).unwrap(), rat(1, 4));
        let total: Rational = (1..=4)
            .map(|a| m4.conditional(&x, a).unwrap())
            .fold(Rational::zero(), |acc, p| &acc + &p);
        assert_eq!(total, Rational::one());

        // conditioning on a null word
        assert!(matches!(
            m4.conditional(&word(4, &[1, 1]), 2),
            Err(MeasureError::ConditionOnNull)
        ));
    }

    #[test]
    fn gap_probabilities() {
        let m5 = CylinderMeasure::new(5).unwrap();
        assert_eq!(
            m5.gap_prob(&word(5, &[1]), &word(5, &[2])).unwrap(),
            rat(1, 25)
        );
        assert_eq!(
            m5.gap_prob(&word(5, &[]), &word(5, &[2])).unwrap(),
            rat(1, 5)
        );
        let m4 = CylinderMeasure::new(4).unwrap();
        assert_eq!(
            m4.gap_prob(&word(4, &[1, 2]), &word(4, &[2, 1])).unwrap(),
            rat(1, 144)
        );
    }

    #[test]
    fn uniform_rule_matches_general_recursion_at_q4() {
        let m = CylinderMeasure::new(4).unwrap();
        for colors in proper_words(4, 5) {
            let x = Word::new(4, colors.to_vec()).unwrap();
            assert_eq!(m.prob(&x).unwrap(), m.prob_uniform_rule(&x).unwrap());
        }
        let m5 = CylinderMeasure::new(5).unwrap();
        assert!(matches!(
            m5.prob_uniform_rule(&word(5, &[1])),
            Err(MeasureError::UniformRuleRequiresQ4(5))
        ));
    }

    #[test]
    fn memo_integrity() {
        let m = CylinderMeasure::new(6).unwrap();
        let x = word(6, &[1, 2, 3, 1, 4]);
        let first = m.prob(&x).unwrap();
        assert!(m.memo_entries() > 0);
        m.clear_memo();
        assert_eq!(m.memo_entries(), 0);
        assert_eq!(m.prob(&x).unwrap(), first);
    }

    #[test]
    fn canonical_memo_agrees_with_exact() {
        for q in [4u32, 5, 6] {
            let exact = CylinderMeasure::new(q).unwrap();
            let canonical = CylinderMeasure::with_options(
                q,
                MeasureOptions {
                    length_cap: DEFAULT_LENGTH_CAP,
                    memo_mode: MemoMode::Canonical,
                },
            )
            .unwrap();
            for len in 0..=5usize {
                for colors in proper_words(q, len) {
                    let x = Word::new(q, colors.to_vec()).unwrap();
                    assert_eq!(
                        exact.prob(&x).unwrap(),
                        canonical.prob(&x).unwrap(),
                        "q={q} x={x}"
                    );
                }
            }
            // the canonical memo is strictly smaller at this scale
            assert!(canonical.memo_entries() < exact.memo_entries());
        }
    }

    #[test]
    fn canonical_pattern_examples() {
        assert_eq!(
            canonical_pattern(&[3, 1, 3, 5]).as_ref(),
            &[1, 2, 1, 3][..]
        );
        assert_eq!(canonical_pattern(&[]).as_ref(), &[] as &[Color]);
        assert_eq!(canonical_pattern(&[7, 7, 2]).as_ref(), &[1, 1, 2][..]);
    }

    #[test]
    fn proper_word_enumeration_counts() {
        // q·(q-1)^(n-1) proper words of length n
        assert_eq!(proper_words(4, 0).len(), 1);
        assert_eq!(proper_words(4, 1).len(), 4);
        assert_eq!(proper_words(4, 3).len(), 36);
        assert_eq!(proper_words(5, 4).len(), 5 * 4 * 4 * 4);
        assert!(proper_words(4, 3).iter().all(|w| is_proper_slice(w)));
    }

    #[test]
    fn marginal_tables() {
        let m4 = CylinderMeasure::new(4).unwrap();
        let t1 = m4.marginal_table(1).unwrap();
        assert_eq!(t1.len(), 4);
        assert!(t1.iter().all(|(_, p)| *p == rat(1, 4)));

        let m5 = CylinderMeasure::new(5).unwrap();
        let t2 = m5.marginal_table(2).unwrap();
        assert_eq!(t2.len(), 20);
        assert!(t2.iter().all(|(_, p)| *p == rat(1, 20)));
    }

    #[test]
    fn permutation_validation() {
        let x = word(4, &[1, 2, 3]);
        assert_eq!(
            x.permuted(&[4, 3, 2, 1]).unwrap(),
            word(4, &[4, 3, 2])
        );
        assert!(x.permuted(&[1, 1, 2, 3]).is_err());
        assert!(x.permuted(&[1, 2, 3]).is_err());
    }
}
