//! Property-based invariants: algebraic laws of the exact number types,
//! parity and oracle agreement for the coefficient sequences, and the
//! measure-level symmetries on randomized proper words.

use proptest::prelude::*;
use qcoloring::chebyshev::{coeff_oracle, CoeffKind, CoeffTable};
use qcoloring::exactnum::{QAdjoined, Rational};
use qcoloring::measure::{Color, CylinderMeasure, MeasureOptions, MemoMode, Word};
use qcoloring::sampler::ColoringStream;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn rational() -> impl Strategy<Value = Rational> {
    (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |r| !r.is_zero())
}

/// A proper word: first color free, each successor offset by 1..q-1.
fn proper_word(q: u32, max_len: usize) -> impl Strategy<Value = Word> {
    (
        1..=q as Color,
        proptest::collection::vec(1..q as Color, 0..max_len),
    )
        .prop_map(move |(first, offsets)| {
            let mut colors = vec![first];
            for off in offsets {
                let prev = *colors.last().unwrap() as u32;
                let next = ((prev - 1 + off as u32) % q) + 1;
                colors.push(next as Color);
            }
            Word::new(q, colors).unwrap()
        })
}

/// A proper word over a random q in `q_lo..q_hi`; the word carries its q.
fn any_proper_word(q_lo: u32, q_hi: u32, max_len: usize) -> impl Strategy<Value = Word> {
    (q_lo..q_hi).prop_flat_map(move |q| proper_word(q, max_len))
}

fn permutation(q: u32, seed: u64) -> Vec<Color> {
    let mut perm: Vec<Color> = (1..=q as Color).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..perm.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        perm.swap(i, j);
    }
    perm
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rational_field_laws(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Rational::zero());
    }

    #[test]
    fn rational_division_round_trip(a in rational(), b in nonzero_rational()) {
        prop_assert_eq!(&a.checked_div(&b).unwrap() * &b, a);
    }

    #[test]
    fn rational_canonical_form(n in -10_000i64..10_000, d in prop_oneof![-10_000i64..-1, 1i64..10_000]) {
        let r = Rational::new(n, d).unwrap();
        prop_assert!(r.denom().sign() != num_bigint::Sign::Minus);
        let g = num_integer::gcd(r.numer().clone(), r.denom().clone());
        prop_assert!(g == num_bigint::BigInt::from(1) || r.is_zero());
        // display round-trip
        prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r);
    }

    #[test]
    fn qadjoined_ring_laws(q in 4u32..12, seed in any::<u64>()) {
        // derive three elements from one strategy draw to keep q shared
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || {
            let n1 = (rng.next_u64() % 2001) as i64 - 1000;
            let n2 = (rng.next_u64() % 2001) as i64 - 1000;
            QAdjoined::new(
                q,
                Rational::new(n1, 7).unwrap(),
                Rational::new(n2, 5).unwrap(),
            )
            .unwrap()
        };
        let (x, y, z) = (draw(), draw(), draw());
        let xy = x.checked_mul(&y).unwrap();
        prop_assert_eq!(&xy, &y.checked_mul(&x).unwrap());
        prop_assert_eq!(
            xy.checked_mul(&z).unwrap(),
            x.checked_mul(&y.checked_mul(&z).unwrap()).unwrap()
        );
        let sum = y.checked_add(&z).unwrap();
        prop_assert_eq!(
            x.checked_mul(&sum).unwrap(),
            x.checked_mul(&y).unwrap().checked_add(&x.checked_mul(&z).unwrap()).unwrap()
        );
    }

    #[test]
    fn qadjoined_division_round_trip(q in 4u32..12, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || {
            let n1 = (rng.next_u64() % 2001) as i64 - 1000;
            let n2 = (rng.next_u64() % 2001) as i64 - 1000;
            QAdjoined::new(
                q,
                Rational::new(n1, 7).unwrap(),
                Rational::new(n2, 5).unwrap(),
            )
            .unwrap()
        };
        let x = draw();
        // divisor must have nonzero norm so the conjugate path is defined
        let mut y = draw();
        while y.is_zero() || y.norm().is_zero() {
            y = draw();
        }
        let product = x.checked_mul(&y).unwrap();
        prop_assert_eq!(product.checked_div(&y).unwrap(), x);
    }

    #[test]
    fn qadjoined_serialization_round_trip(q in 4u32..12, an in -99i64..99, bn in -99i64..99) {
        let x = QAdjoined::new(
            q,
            Rational::new(an, 13).unwrap(),
            Rational::new(bn, 11).unwrap(),
        ).unwrap();
        prop_assert_eq!(x.to_string().parse::<QAdjoined>().unwrap(), x);
    }

    #[test]
    fn coeff_parity_and_oracle(q in 4u32..12, n in 0i64..30) {
        let t = CoeffTable::new(q).unwrap();
        prop_assert_eq!(t.c(-n), t.c(n));
        prop_assert_eq!(t.d(-n), -t.d(n));
        prop_assert_eq!(t.c(n), coeff_oracle(q, n as usize, CoeffKind::C).unwrap());
        prop_assert_eq!(t.d(n), coeff_oracle(q, n as usize, CoeffKind::D).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn measure_consistency_on_random_words(w in any_proper_word(4, 8, 5)) {
        let q = w.q();
        let m = CylinderMeasure::new(q).unwrap();
        let px = m.prob(&w).unwrap();
        let mut total = Rational::zero();
        for a in 1..=q as Color {
            total += &m.prob(&w.extended(a).unwrap()).unwrap();
        }
        prop_assert_eq!(total, px);
    }

    #[test]
    fn measure_symmetries_on_random_words(w in any_proper_word(4, 8, 6), seed in any::<u64>()) {
        let q = w.q();
        let m = CylinderMeasure::new(q).unwrap();
        let p = m.prob(&w).unwrap();
        prop_assert!(p.is_positive());
        prop_assert_eq!(m.prob(&w.reversed()).unwrap(), p.clone());
        let perm = permutation(q, seed);
        prop_assert_eq!(m.prob(&w.permuted(&perm).unwrap()).unwrap(), p);
    }

    #[test]
    fn improper_words_have_probability_zero(w in any_proper_word(4, 8, 4), dup in 0usize..4) {
        prop_assume!(!w.is_empty());
        let q = w.q();
        // duplicate one entry to force adjacency
        let mut colors = w.colors().to_vec();
        let at = dup % colors.len();
        colors.insert(at, colors[at]);
        let improper = Word::new(q, colors).unwrap();
        prop_assert!(!improper.is_proper());
        let m = CylinderMeasure::new(q).unwrap();
        prop_assert_eq!(m.prob(&improper).unwrap(), Rational::zero());
    }

    #[test]
    fn canonical_memo_mode_matches_exact(w in any_proper_word(4, 8, 6)) {
        let q = w.q();
        let exact = CylinderMeasure::new(q).unwrap();
        let canonical = CylinderMeasure::with_options(
            q,
            MeasureOptions { memo_mode: MemoMode::Canonical, ..MeasureOptions::default() },
        ).unwrap();
        prop_assert_eq!(exact.prob(&w).unwrap(), canonical.prob(&w).unwrap());
    }

    #[test]
    fn conditional_masses_sum_to_one(w in any_proper_word(4, 8, 5)) {
        let q = w.q();
        let m = CylinderMeasure::new(q).unwrap();
        let mut total = Rational::zero();
        for a in 1..=q as Color {
            total += &m.conditional(&w, a).unwrap();
        }
        prop_assert_eq!(total, Rational::one());
    }

    #[test]
    fn sampler_is_deterministic_and_proper(q in 4u32..9, seed in any::<u64>()) {
        let m = CylinderMeasure::new(q).unwrap();
        let a = ColoringStream::new(&m, seed).sample_n(40).unwrap();
        let b = ColoringStream::new(&m, seed).sample_n(40).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.is_proper());
    }
}
