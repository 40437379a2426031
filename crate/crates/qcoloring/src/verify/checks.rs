//! The exact check families. Each function enumerates its input space,
//! verifies an identity by exact equality, and reports every violation.

use crate::chebyshev::{coeff_oracle, CoeffKind, CoeffTable};
use crate::exactnum::{QAdjoined, Rational};
use crate::measure::{proper_words, render_colors, Color, CylinderMeasure, Word};
use crate::verify::exec::{flat_map, indexed_flat_map, ExecMode};
use crate::verify::report::{Failure, ReportBuilder, SuiteReport};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn fail(check: &str, q: u32, input: String, expected: impl ToString, actual: impl ToString) -> Failure {
    Failure {
        check: check.to_string(),
        q,
        input,
        expected: expected.to_string(),
        actual: actual.to_string(),
    }
}

/// Computes `P` for every proper word up to `max_len`, level by level so
/// each evaluation only touches memoized children. Errors (possible under
/// fault injection) surface as failures.
fn prefill(m: &CylinderMeasure, max_len: usize, mode: ExecMode) -> Vec<Failure> {
    let mut failures = Vec::new();
    for len in 1..=max_len {
        let words = proper_words(m.q(), len);
        failures.extend(flat_map(mode, &words, |w| match m.prob_slice(w) {
            Ok(_) => Vec::new(),
            Err(e) => vec![fail(
                "prob_evaluates",
                m.q(),
                render_colors(w),
                "an exact rational",
                e,
            )],
        }));
    }
    failures
}

/// The six closed-form cylinder probabilities, instantiated at this
/// measure's q and compared with the recursion exactly.
pub fn check_golden(m: &CylinderMeasure, _mode: ExecMode) -> SuiteReport {
    let q = m.q();
    let mut rb = ReportBuilder::new("golden", vec![q]);
    let qv = Rational::from_int(q as i64);
    let one = Rational::one();
    let q2 = &qv * &qv;
    // q² - 3q + 1
    let kappa = &(&q2 - &(&Rational::from_int(3) * &qv)) + &one;
    let qm1 = &qv - &one;
    let qm2 = &qv - &Rational::from_int(2);
    let qm3 = &qv - &Rational::from_int(3);

    let cases: Vec<(&str, Vec<Color>, Rational)> = vec![
        ("P(1)", vec![1], one.checked_div(&qv).unwrap()),
        ("P(12)", vec![1, 2], one.checked_div(&(&qv * &qm1)).unwrap()),
        ("P(121)", vec![1, 2, 1], one.checked_div(&(&q2 * &qm1)).unwrap()),
        ("P(123)", vec![1, 2, 3], one.checked_div(&(&q2 * &qm2)).unwrap()),
        (
            "P(1212)",
            vec![1, 2, 1, 2],
            qm3.checked_div(&(&(&q2 * &qm1) * &kappa)).unwrap(),
        ),
        (
            "P(1234)",
            vec![1, 2, 3, 4],
            one.checked_div(&(&q2 * &kappa)).unwrap(),
        ),
    ];

    for (name, colors, expected) in cases {
        rb.add_checks(1);
        match m.prob_slice(&colors) {
            Ok(got) if got == expected => {}
            Ok(got) => rb.extend_failures(vec![fail(name, q, render_colors(&colors), expected, got)]),
            Err(e) => rb.extend_failures(vec![fail(name, q, render_colors(&colors), expected, e)]),
        }
    }
    rb.finish()
}

/// `Σ_a P(xa) = P(x)` for every proper word up to `max_len`.
pub fn check_consistency(m: &CylinderMeasure, max_len: usize, mode: ExecMode) -> SuiteReport {
    let q = m.q();
    let mut rb = ReportBuilder::new("consistency", vec![q]);
    rb.param("max_len", max_len);
    for len in 0..=max_len {
        let words = proper_words(q, len);
        rb.add_checks(words.len() as u64);
        let failures = flat_map(mode, &words, |w| {
            let check = "sum_over_extensions_equals_prob";
            let px = match m.prob_slice(w) {
                Ok(p) => p,
                Err(e) => return vec![fail(check, q, render_colors(w), "P(x)", e)],
            };
            let mut total = Rational::zero();
            let mut buf = Vec::with_capacity(w.len() + 1);
            for a in 1..=q as Color {
                buf.clear();
                buf.extend_from_slice(w);
                buf.push(a);
                match m.prob_slice(&buf) {
                    Ok(p) => total += &p,
                    Err(e) => return vec![fail(check, q, render_colors(w), "P(xa)", e)],
                }
            }
            if total == px {
                Vec::new()
            } else {
                vec![fail(check, q, render_colors(w), px, total)]
            }
        });
        rb.extend_failures(failures);
    }
    rb.finish()
}

/// `P(x*y) = P(x)·P(y)` for all proper pairs with `|x|+|y| <= max_sum`.
pub fn check_one_dependence(m: &CylinderMeasure, max_sum: usize, mode: ExecMode) -> SuiteReport {
    let q = m.q();
    let mut rb = ReportBuilder::new("one_dependence", vec![q]);
    rb.param("max_pair_sum", max_sum);
    rb.extend_failures(prefill(m, max_sum + 1, mode));

    let levels: Vec<Vec<Box<[Color]>>> = (0..=max_sum).map(|len| proper_words(q, len)).collect();
    for lx in 0..=max_sum {
        for ly in 0..=(max_sum - lx) {
            let xs = &levels[lx];
            let ys = &levels[ly];
            rb.add_checks((xs.len() * ys.len()) as u64);
            let failures = flat_map(mode, xs, |x| {
                let check = "gap_factorizes";
                let mut out = Vec::new();
                let px = match m.prob_slice(x) {
                    Ok(p) => p,
                    Err(e) => return vec![fail(check, q, render_colors(x), "P(x)", e)],
                };
                let mut buf = Vec::new();
                for y in ys {
                    let py = match m.prob_slice(y) {
                        Ok(p) => p,
                        Err(e) => {
                            out.push(fail(check, q, render_colors(y), "P(y)", e));
                            continue;
                        }
                    };
                    let mut gap = Rational::zero();
                    let mut err = None;
                    for a in 1..=q as Color {
                        buf.clear();
                        buf.extend_from_slice(x);
                        buf.push(a);
                        buf.extend_from_slice(y);
                        match m.prob_slice(&buf) {
                            Ok(p) => gap += &p,
                            Err(e) => {
                                err = Some(e);
                                break;
                            }
                        }
                    }
                    let input = format!("x={} y={}", render_colors(x), render_colors(y));
                    if let Some(e) = err {
                        out.push(fail(check, q, input, "P(x*y)", e));
                        continue;
                    }
                    let product = &px * &py;
                    if gap != product {
                        out.push(fail(check, q, input, product, gap));
                    }
                }
                out
            });
            rb.extend_failures(failures);
        }
    }
    rb.finish()
}

/// The two deletion-sum identities: the D-weighted deletion sum vanishes,
/// and both Q functionals equal `P(x)·C(n+1)`, exactly in Q[√q].
pub fn check_deletion_identities(m: &CylinderMeasure, max_len: usize, mode: ExecMode) -> SuiteReport {
    let q = m.q();
    let mut rb = ReportBuilder::new("deletion_identities", vec![q]);
    rb.param("max_len", max_len);
    for len in 1..=max_len {
        let words = proper_words(q, len);
        rb.add_checks(2 * words.len() as u64);
        let failures = flat_map(mode, &words, |w| {
            let mut out = Vec::new();
            let n = w.len() as i64;
            let input = render_colors(w);

            // Σ_i D(n-2i+1)·P(x̂_i) == 0
            let dsum_check = "d_weighted_deletion_sum_vanishes";
            let mut acc = QAdjoined::zero(q);
            let mut sub = Vec::with_capacity(w.len() - 1);
            let mut errored = false;
            for i in 1..=w.len() {
                sub.clear();
                sub.extend_from_slice(&w[..i - 1]);
                sub.extend_from_slice(&w[i..]);
                match m.prob_slice(&sub) {
                    Ok(p) => acc += &m.coeffs().d(n - 2 * i as i64 + 1).scale(&p),
                    Err(e) => {
                        out.push(fail(dsum_check, q, input.clone(), "0", e));
                        errored = true;
                        break;
                    }
                }
            }
            if !errored && !acc.is_zero() {
                out.push(fail(dsum_check, q, input.clone(), "0", acc));
            }

            // Q(x) == Q*(x) == P(x)·C(n+1)
            let qis_check = "q_functionals_equal_prob_times_c";
            let x = Word::new(q, w.to_vec()).expect("enumerated word is valid");
            match (
                m.q_functional(&x, false),
                m.q_functional(&x, true),
                m.prob_slice(w),
            ) {
                (Ok(plain), Ok(starred), Ok(p)) => {
                    let rhs = m.coeffs().c(n + 1).scale(&p);
                    if plain != rhs || starred != rhs {
                        out.push(fail(
                            qis_check,
                            q,
                            input,
                            rhs,
                            format!("Q={plain} Q*={starred}"),
                        ));
                    }
                }
                (a, b, c) => {
                    let err = [
                        a.err().map(|e| e.to_string()),
                        b.err().map(|e| e.to_string()),
                        c.err().map(|e| e.to_string()),
                    ]
                    .into_iter()
                    .flatten()
                    .next()
                    .unwrap_or_default();
                    out.push(fail(qis_check, q, input, "P(x)*C(n+1)", err));
                }
            }
            out
        });
        rb.extend_failures(failures);
    }
    rb.finish()
}

fn all_permutations(q: u32) -> Vec<Vec<Color>> {
    fn go(rest: &mut Vec<Color>, prefix: &mut Vec<Color>, out: &mut Vec<Vec<Color>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let c = rest.remove(i);
            prefix.push(c);
            go(rest, prefix, out);
            prefix.pop();
            rest.insert(i, c);
        }
    }
    let mut rest: Vec<Color> = (1..=q as Color).collect();
    let mut out = Vec::new();
    go(&mut rest, &mut Vec::new(), &mut out);
    out
}

fn sampled_permutation(rng: &mut ChaCha8Rng, q: u32) -> Vec<Color> {
    let mut perm: Vec<Color> = (1..=q as Color).collect();
    for i in (1..perm.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        perm.swap(i, j);
    }
    perm
}

/// Invariance of `P` under color permutations (exhaustive for q=4,
/// `perm_samples` seeded draws per word above) and under reversal.
pub fn check_symmetries(
    m: &CylinderMeasure,
    max_len: usize,
    perm_samples: usize,
    seed: u64,
    mode: ExecMode,
) -> SuiteReport {
    let q = m.q();
    let mut rb = ReportBuilder::new("symmetries", vec![q]);
    rb.param("max_len", max_len);
    rb.param("perm_samples", perm_samples);
    rb.param("seed", seed);
    rb.extend_failures(prefill(m, max_len, mode));

    let exhaustive = if q == 4 { Some(all_permutations(4)) } else { None };
    for len in 1..=max_len {
        let words = proper_words(q, len);
        let perms_per_word = exhaustive.as_ref().map(|p| p.len()).unwrap_or(perm_samples);
        rb.add_checks((words.len() * (perms_per_word + 1)) as u64);
        let failures = indexed_flat_map(mode, &words, |idx, w| {
            let mut out = Vec::new();
            let x = Word::new(q, w.to_vec()).expect("enumerated word is valid");
            let px = match m.prob_slice(w) {
                Ok(p) => p,
                Err(e) => {
                    return vec![fail("symmetry", q, render_colors(w), "P(x)", e)];
                }
            };

            let reversed = x.reversed();
            match m.prob_slice(reversed.colors()) {
                Ok(pr) if pr == px => {}
                Ok(pr) => out.push(fail(
                    "reflection_invariance",
                    q,
                    render_colors(w),
                    &px,
                    pr,
                )),
                Err(e) => out.push(fail("reflection_invariance", q, render_colors(w), &px, e)),
            }

            let mut check_perm = |perm: &[Color]| {
                let permuted = x.permuted(perm).expect("valid permutation");
                match m.prob_slice(permuted.colors()) {
                    Ok(pp) if pp == px => {}
                    Ok(pp) => out.push(fail(
                        "permutation_invariance",
                        q,
                        format!("x={} perm={}", render_colors(w), render_colors(perm)),
                        &px,
                        pp,
                    )),
                    Err(e) => out.push(fail(
                        "permutation_invariance",
                        q,
                        format!("x={} perm={}", render_colors(w), render_colors(perm)),
                        &px,
                        e,
                    )),
                }
            };
            match &exhaustive {
                Some(perms) => {
                    for p in perms {
                        check_perm(p);
                    }
                }
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(
                        seed ^ (idx as u64 ^ ((len as u64) << 32)).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                    );
                    for _ in 0..perm_samples {
                        let p = sampled_permutation(&mut rng, q);
                        check_perm(&p);
                    }
                }
            }
            out
        });
        rb.extend_failures(failures);
    }
    rb.finish()
}

/// The √q component of the recursion value vanishes and `0 < P <= 1` on
/// every proper word up to `max_len`.
pub fn check_rationality_positivity(
    m: &CylinderMeasure,
    max_len: usize,
    mode: ExecMode,
) -> SuiteReport {
    let q = m.q();
    let mut rb = ReportBuilder::new("rationality_positivity", vec![q]);
    rb.param("max_len", max_len);
    let one = Rational::one();
    for len in 1..=max_len {
        let words = proper_words(q, len);
        rb.add_checks(2 * words.len() as u64);
        let failures = flat_map(mode, &words, |w| {
            let mut out = Vec::new();
            let input = render_colors(w);
            // fill the memo first so the ring recomputation is shallow
            if let Err(e) = m.prob_slice(w) {
                return vec![fail("sqrt_component_zero", q, input, "rational P", e)];
            }
            match m.deletion_sum_ring(w) {
                Ok(ring) => {
                    if !ring.sqrt_coeff().is_zero() {
                        out.push(fail("sqrt_component_zero", q, input.clone(), "0", ring.sqrt_coeff()));
                    } else {
                        let p = ring.rational_part();
                        if !(p.is_positive() && *p <= one) {
                            out.push(fail(
                                "strictly_positive_at_most_one",
                                q,
                                input.clone(),
                                "0 < P <= 1",
                                p,
                            ));
                        }
                    }
                }
                Err(e) => out.push(fail("sqrt_component_zero", q, input, "0", e)),
            }
            out
        });
        rb.extend_failures(failures);
    }
    rb.finish()
}

/// At q=4 the general recursion must reproduce the uniform deletion rule
/// on every proper word up to `max_len`.
pub fn check_uniform_rule_equivalence(
    m: &CylinderMeasure,
    max_len: usize,
    mode: ExecMode,
) -> SuiteReport {
    let q = m.q();
    let mut rb = ReportBuilder::new("uniform_rule_equivalence", vec![q]);
    rb.param("max_len", max_len);
    for len in 1..=max_len {
        let words = proper_words(q, len);
        rb.add_checks(words.len() as u64);
        let failures = flat_map(mode, &words, |w| {
            let check = "general_recursion_matches_uniform_rule";
            let x = match Word::new(q, w.to_vec()) {
                Ok(x) => x,
                Err(e) => return vec![fail(check, q, render_colors(w), "valid word", e)],
            };
            let general = match m.prob(&x) {
                Ok(p) => p,
                Err(e) => return vec![fail(check, q, render_colors(w), "P(x)", e)],
            };
            match m.prob_uniform_rule(&x) {
                Ok(direct) if direct == general => Vec::new(),
                Ok(direct) => vec![fail(check, q, render_colors(w), general, direct)],
                Err(e) => vec![fail(check, q, render_colors(w), general, e)],
            }
        });
        rb.extend_failures(failures);
    }
    rb.finish()
}

/// The four coefficient identities over symmetric index grids, exact in
/// Q[√q]:
///   2·C(m)·C(n) == C(m+n) + C(n-m)
///   ((q-4)/2q)·D(m)·D(n) == C(m+n) - C(n-m)
///   2·C(m)·D(n) == D(m+n) + D(n-m)
///   C(j+k)·D(k+l) == C(k)·D(j+k+l) - C(l)·D(j)
pub fn check_coeff_identities(
    t: &CoeffTable,
    mn_max: i64,
    jkl_max: i64,
    mode: ExecMode,
) -> SuiteReport {
    let q = t.q();
    let mut rb = ReportBuilder::new("coeff_identities", vec![q]);
    rb.param("mn_max", mn_max);
    rb.param("jkl_max", jkl_max);
    t.ensure((2 * mn_max.unsigned_abs().max(3 * jkl_max.unsigned_abs()) + 2) as usize);

    let two = Rational::from_int(2);
    let dd_factor = Rational::new(q as i64 - 4, 2 * q as i64).expect("q >= 4");

    let mut pairs = Vec::with_capacity(((2 * mn_max + 1) * (2 * mn_max + 1)) as usize);
    for mm in -mn_max..=mn_max {
        for nn in -mn_max..=mn_max {
            pairs.push((mm, nn));
        }
    }
    rb.add_checks(3 * pairs.len() as u64);
    let failures = flat_map(mode, &pairs, |&(mm, nn)| {
        let mut out = Vec::new();
        let input = format!("m={mm} n={nn}");
        let cc = t.c(mm).checked_mul(&t.c(nn)).expect("same ring").scale(&two);
        let cc_rhs = &t.c(mm + nn) + &t.c(nn - mm);
        if cc != cc_rhs {
            out.push(fail("2*C(m)*C(n) == C(m+n)+C(n-m)", q, input.clone(), cc_rhs, cc));
        }
        let dd = t.d(mm).checked_mul(&t.d(nn)).expect("same ring").scale(&dd_factor);
        let dd_rhs = &t.c(mm + nn) - &t.c(nn - mm);
        if dd != dd_rhs {
            out.push(fail(
                "((q-4)/2q)*D(m)*D(n) == C(m+n)-C(n-m)",
                q,
                input.clone(),
                dd_rhs,
                dd,
            ));
        }
        let cd = t.c(mm).checked_mul(&t.d(nn)).expect("same ring").scale(&two);
        let cd_rhs = &t.d(mm + nn) + &t.d(nn - mm);
        if cd != cd_rhs {
            out.push(fail("2*C(m)*D(n) == D(m+n)+D(n-m)", q, input, cd_rhs, cd));
        }
        out
    });
    rb.extend_failures(failures);

    let mut triples = Vec::new();
    for j in -jkl_max..=jkl_max {
        for k in -jkl_max..=jkl_max {
            for l in -jkl_max..=jkl_max {
                triples.push((j, k, l));
            }
        }
    }
    rb.add_checks(triples.len() as u64);
    let failures = flat_map(mode, &triples, |&(j, k, l)| {
        let lhs = t.c(j + k).checked_mul(&t.d(k + l)).expect("same ring");
        let rhs = &t.c(k).checked_mul(&t.d(j + k + l)).expect("same ring")
            - &t.c(l).checked_mul(&t.d(j)).expect("same ring");
        if lhs == rhs {
            Vec::new()
        } else {
            vec![fail(
                "C(j+k)*D(k+l) == C(k)*D(j+k+l)-C(l)*D(j)",
                q,
                format!("j={j} k={k} l={l}"),
                rhs,
                lhs,
            )]
        }
    });
    rb.extend_failures(failures);
    rb.finish()
}

/// Recurrence evaluation equals the independent binomial-sum oracle for
/// `0 <= n <= max_n`.
pub fn check_coeff_oracle(t: &CoeffTable, max_n: usize, mode: ExecMode) -> SuiteReport {
    let q = t.q();
    let mut rb = ReportBuilder::new("coeff_oracle", vec![q]);
    rb.param("max_n", max_n);
    t.ensure(max_n);
    let ns: Vec<usize> = (0..=max_n).collect();
    rb.add_checks(2 * ns.len() as u64);
    let failures = flat_map(mode, &ns, |&n| {
        let mut out = Vec::new();
        let oc = coeff_oracle(q, n, CoeffKind::C).expect("q validated");
        if t.c(n as i64) != oc {
            out.push(fail("recurrence_matches_sum_C", q, format!("n={n}"), oc, t.c(n as i64)));
        }
        let od = coeff_oracle(q, n, CoeffKind::D).expect("q validated");
        if t.d(n as i64) != od {
            out.push(fail("recurrence_matches_sum_D", q, format!("n={n}"), od, t.d(n as i64)));
        }
        out
    });
    rb.extend_failures(failures);
    rb.finish()
}
