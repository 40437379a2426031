//! The coefficient sequences `C(n)` and `D(n)` that drive the cylinder
//! measure, evaluated exactly in Q[√q].
//!
//! `C(n)` is the first-kind Chebyshev value at √q/2 and `D(n)` is √q times
//! the second-kind value at the same point, extended to all integers with
//! `C` even and `D` odd. Evaluation goes through the three-term recurrence
//! (linear time); the explicit binomial-sum formula is kept as an
//! independent oracle so each path validates the other.

use crate::exactnum::{ExactError, QAdjoined, Rational};
use num_bigint::BigInt;
use num_integer::binomial;
use parking_lot::RwLock;

/// Which of the two coefficient sequences a [`Fault`] targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoeffKind {
    C,
    D,
}

/// Deliberate corruption of one cached coefficient, used to prove that the
/// verification suites are not vacuous. The perturbation adds 1 to the
/// stored value at fill time, so later entries computed from it inherit
/// the damage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fault {
    pub kind: CoeffKind,
    pub index: usize,
}

struct Caches {
    c: Vec<QAdjoined>,
    d: Vec<QAdjoined>,
}

/// Memoized table of `C(n)` and `D(n)` for one ring parameter `q`.
///
/// The cache grows amortized: requesting index `n` fills everything up to
/// `n`. Fills take a write lock and readers see only fully constructed
/// entries, so a table may be shared across threads.
pub struct CoeffTable {
    q: u32,
    cache: RwLock<Caches>,
    fault: Option<Fault>,
}

impl CoeffTable {
    pub fn new(q: u32) -> Result<Self, ExactError> {
        Self::build(q, None)
    }

    /// A table with one deliberately corrupted entry. Test scaffolding.
    pub fn with_fault(q: u32, fault: Fault) -> Result<Self, ExactError> {
        Self::build(q, Some(fault))
    }

    fn build(q: u32, fault: Option<Fault>) -> Result<Self, ExactError> {
        if q < 4 {
            return Err(ExactError::InvalidQ(q));
        }
        let half = Rational::new(1, 2).expect("nonzero denominator");
        // seeds: C(0)=1, C(1)=√q/2, D(0)=0, D(1)=√q
        let mut caches = Caches {
            c: vec![QAdjoined::one(q), QAdjoined::sqrt_q(q).scale(&half)],
            d: vec![QAdjoined::zero(q), QAdjoined::sqrt_q(q)],
        };
        if let Some(f) = fault {
            for i in 0..=1 {
                apply_fault(&f, i, q, &mut caches);
            }
        }
        Ok(CoeffTable {
            q,
            cache: RwLock::new(caches),
            fault,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// `C(n)` for any integer `n`; `C(-n) = C(n)`.
    pub fn c(&self, n: i64) -> QAdjoined {
        let k = n.unsigned_abs() as usize;
        self.ensure(k);
        self.cache.read().c[k].clone()
    }

    /// `D(n)` for any integer `n`; `D(-n) = -D(n)`.
    pub fn d(&self, n: i64) -> QAdjoined {
        let k = n.unsigned_abs() as usize;
        self.ensure(k);
        let v = self.cache.read().d[k].clone();
        if n < 0 {
            -v
        } else {
            v
        }
    }

    /// Pre-fills the cache up to index `n`, amortizing later reads.
    pub fn ensure(&self, n: usize) {
        {
            let g = self.cache.read();
            if g.c.len() > n {
                return;
            }
        }
        let sqrt_q = QAdjoined::sqrt_q(self.q);
        let mut g = self.cache.write();
        while g.c.len() <= n {
            let i = g.c.len();
            let next_c = &(&sqrt_q * &g.c[i - 1]) - &g.c[i - 2];
            let next_d = &(&sqrt_q * &g.d[i - 1]) - &g.d[i - 2];
            g.c.push(next_c);
            g.d.push(next_d);
            if let Some(f) = self.fault {
                apply_fault(&f, i, self.q, &mut g);
            }
        }
    }
}

fn apply_fault(f: &Fault, index: usize, q: u32, caches: &mut Caches) {
    if f.index != index {
        return;
    }
    let one = QAdjoined::one(q);
    match f.kind {
        CoeffKind::C => caches.c[index] += &one,
        CoeffKind::D => caches.d[index] += &one,
    }
}

/// Evaluates `C(n)` or `D(n)` (`n >= 0`) through the explicit binomial
/// sums for the Chebyshev polynomials at √q/2, entirely independent of the
/// recurrence path. Quadratic in `n`; oracle use only.
pub fn coeff_oracle(q: u32, n: usize, kind: CoeffKind) -> Result<QAdjoined, ExactError> {
    if q < 4 {
        return Err(ExactError::InvalidQ(q));
    }
    let u = QAdjoined::sqrt_q(q).scale(&Rational::new(1, 2)?);
    // u² - 1 = (q - 4)/4 is a rational scalar
    let u2m1 = Rational::new(q as i64 - 4, 4)?;
    match kind {
        CoeffKind::C => {
            // T_n(u) = Σ_k binom(n, 2k) u^(n-2k) (u²-1)^k
            let mut acc = QAdjoined::zero(q);
            for k in 0..=(n / 2) {
                let coeff = Rational::from_bigint(binomial(BigInt::from(n), BigInt::from(2 * k)));
                let term = qadj_pow(&u, n - 2 * k).scale(&(&coeff * &rat_pow(&u2m1, k)));
                acc += &term;
            }
            Ok(acc)
        }
        CoeffKind::D => {
            // D(n) = √q · U_(n-1)(u), with U_(n-1)(u) = Σ_k binom(n, 2k+1) u^(n-1-2k) (u²-1)^k
            if n == 0 {
                return Ok(QAdjoined::zero(q));
            }
            let mut acc = QAdjoined::zero(q);
            for k in 0..=((n - 1) / 2) {
                let coeff =
                    Rational::from_bigint(binomial(BigInt::from(n), BigInt::from(2 * k + 1)));
                let term = qadj_pow(&u, n - 1 - 2 * k).scale(&(&coeff * &rat_pow(&u2m1, k)));
                acc += &term;
            }
            Ok(acc.checked_mul(&QAdjoined::sqrt_q(q))?)
        }
    }
}

fn qadj_pow(x: &QAdjoined, e: usize) -> QAdjoined {
    let mut acc = QAdjoined::one(x.q());
    for _ in 0..e {
        acc = &acc * x;
    }
    acc
}

fn rat_pow(x: &Rational, e: usize) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc = &acc * x;
    }
    acc
}
