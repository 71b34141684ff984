//! Acceptance suite. Each test implements one gate criterion and prints a
//! PASS line with the measured quantities; run with `--nocapture` to see
//! them.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use expq_core::engine::{
    decide, decide_existential, decide_prespower, decide_sentence, SolveConfig,
};
use expq_core::eval::{
    eval_qf, relativized_eval, sample_equivalence, term_value, Assignment, SamplerSpec,
};
use expq_core::formula::Formula;
use expq_core::fragment::{formula_in_oct, Fragment};
use expq_core::gen;
use expq_core::limits::{Deadline, Limits};
use expq_core::metrics::metrics;
use expq_core::normal::normalize;
use expq_core::numtheory::{lambda, totient};
use expq_core::params;
use expq_core::parse::{parse_str, Dialect};
use expq_core::prenex::to_prenex;
use expq_core::qe::presburger::{candidate_pairs, pres_qe, radius, simplify};
use expq_core::qe::semenov::{
    designated_variable, linearise, linearise_variable, sem_cover, SemState,
};
use expq_core::term::{Term, Var};

fn v(n: &str) -> Var {
    Var::new(n)
}

fn pe(s: &str) -> Formula {
    normalize(&parse_str(s, Dialect::PresExp).unwrap())
}

fn defaults() -> (Limits, Deadline) {
    let l = Limits::default();
    let d = Deadline::new(&l);
    (l, d)
}

#[test]
fn criterion_1_linearise_reproduces_the_divisibility_remarks() {
    let l = Limits::default();
    // 20 | pow(x) - 2 rewrites to |x| = 1
    let f = pe("20 | pow(x) - 2");
    let got = linearise_variable(&f, &v("x"), &l).unwrap();
    let expected = normalize(&Formula::eq(&Term::abs(v("x")), &Term::int(1)));
    assert_eq!(got, expected, "|x| = 1 expected");
    // 6 | pow(x) - 3 rewrites to false
    let f = pe("6 | pow(x) - 3");
    let got = linearise_variable(&f, &v("x"), &l).unwrap();
    assert_eq!(got, Formula::False);
    println!("acceptance criterion 1: PASS (both divisibility rewrites exact)");
}

#[test]
fn criterion_2_congruence_rewrite_agrees_with_brute_force() {
    let l = Limits::default();
    let mut checked = 0u64;
    for q in 1i64..=128 {
        for r in 0..q {
            let atom = Formula::div(BigInt::from(q), Term::pow(v("x")).sub(&Term::int(r)));
            let rewritten = linearise_variable(&normalize(&atom), &v("x"), &l).unwrap();
            let mut p = BigInt::one().mod_floor(&BigInt::from(q));
            for x in 0..=(3 * q) {
                let direct = (&p - BigInt::from(r)).mod_floor(&BigInt::from(q)).is_zero();
                let mut nu = Assignment::new();
                nu.insert(v("x"), BigInt::from(x));
                let lin = eval_qf(&rewritten, &nu);
                assert_eq!(direct, lin, "q={q} r={r} x={x} rewritten={rewritten:?}");
                checked += 1;
                p = (p << 1u32).mod_floor(&BigInt::from(q));
            }
        }
    }
    println!("acceptance criterion 2: PASS ({checked} congruence points, zero disagreements)");
}

#[test]
fn criterion_3_number_theory_claims() {
    // lambda(b*x) <= 2^(x-3) whenever 2^x >= 64 b^2
    let mut guarded = 0;
    for b in 1i64..=64 {
        for x in 1i64..=64 {
            let pow_x = BigInt::one() << x as u64;
            if pow_x >= BigInt::from(64 * b * b) {
                guarded += 1;
                let lhs = lambda(&BigInt::from(b * x));
                let rhs = BigInt::one() << (x as u64 - 3);
                assert!(lhs <= rhs, "b={b} x={x}");
            }
        }
    }
    // solutions of r*(2^u - 1) = 0 (mod q) form {0} or a progression
    for q in 1i64..=64 {
        for r in 0..=q {
            let sols: Vec<i64> = (0..=(4 * q))
                .filter(|u| {
                    let p = BigInt::from(2).modpow(&BigInt::from(*u), &BigInt::from(q));
                    (BigInt::from(r) * (p - 1u8))
                        .mod_floor(&BigInt::from(q))
                        .is_zero()
                })
                .collect();
            assert!(!sols.is_empty() && sols[0] == 0, "q={q} r={r}");
            if sols.len() > 1 {
                let d = sols[1];
                let expected: Vec<i64> = (0..).map(|i| i * d).take_while(|u| *u <= 4 * q).collect();
                assert_eq!(sols, expected, "q={q} r={r}: not a progression");
            }
        }
    }
    // lcm(phi(a_i)) <= lcm(a_i), tuples up to three values of size <= 30
    let multisets: Vec<Vec<u64>> = {
        let mut out = Vec::new();
        for a in 1u64..=30 {
            out.push(vec![a]);
            for b in a..=30 {
                out.push(vec![a, b]);
                for c in b..=30 {
                    out.push(vec![a, b, c]);
                }
            }
        }
        out
    };
    let lcm_all = |xs: &[u64]| xs.iter().fold(1u64, |acc, x| acc.lcm(x));
    let mut pairs: BTreeSet<(u64, u64)> = BTreeSet::new();
    for ms in &multisets {
        let phis: Vec<u64> = ms.iter().map(|a| totient(*a)).collect();
        let lhs = lcm_all(&phis);
        let rhs = lcm_all(ms);
        assert!(lhs <= rhs, "tuple {ms:?}");
        pairs.insert((lhs, rhs));
    }
    // lcm(phi(a_i), b_j) <= lcm(a_i, b_j)^2 over the same tuple space
    let bs: BTreeSet<u64> = multisets.iter().map(|ms| lcm_all(ms)).collect();
    for (phi_lcm, a_lcm) in &pairs {
        for b in &bs {
            let lhs = phi_lcm.lcm(b);
            let rhs = a_lcm.lcm(b);
            assert!(
                BigInt::from(lhs) <= BigInt::from(rhs) * BigInt::from(rhs),
                "phi_lcm={phi_lcm} a_lcm={a_lcm} b={b}"
            );
        }
    }
    // the sandwich: for eta with coefficient a at 2^|x|, under the guards,
    // lambda(a * 2^|x0|) / 2 <= lambda(eta(x0) + c) <= lambda(a * 2^|x0|)
    let mut rng = gen::rng(31);
    for i in 0..500 {
        let a = loop {
            let a = rng.gen_range(-8i64..=8);
            if a != 0 {
                break a;
            }
        };
        let b = rng.gen_range(-8i64..=8);
        let others: Vec<(i64, i64, i64)> = (0..rng.gen_range(0..=2))
            .map(|_| {
                (
                    rng.gen_range(-8i64..=8),
                    rng.gen_range(-8i64..=8),
                    rng.gen_range(0i64..=6),
                )
            })
            .collect();
        let c = rng.gen_range(-8i64..=8);
        let norm1 = a.abs()
            + b.abs()
            + others
                .iter()
                .map(|(ai, bi, _)| ai.abs() + bi.abs())
                .sum::<i64>();
        let n = BigInt::from(norm1 + c.abs());
        let lam_n = lambda(&n);
        let two_g: BigInt = BigInt::from(128) * &lam_n * &lam_n;
        let g = (two_g.bits() - 1) as i64;
        let max_u = others.iter().map(|(_, _, u)| *u).max().unwrap_or(0);
        let x0 = g + max_u + 1 + rng.gen_range(0i64..=4);
        // guards: 2^x0 > 2^g and 2^x0 > 2^g * 2^u for every other variable
        let value = BigInt::from(a) * (BigInt::one() << x0 as u64)
            + BigInt::from(b) * BigInt::from(x0)
            + others
                .iter()
                .map(|(ai, bi, u)| {
                    BigInt::from(*ai) * (BigInt::one() << *u as u64) + BigInt::from(bi * u)
                })
                .sum::<BigInt>()
            + BigInt::from(c);
        let lhs = lambda(&(BigInt::from(a) * (BigInt::one() << x0 as u64)));
        let mid = lambda(&value);
        assert!(
            &lhs / 2 <= mid && mid <= lhs,
            "case {i}: a={a} b={b} others={others:?} c={c} x0={x0}"
        );
    }
    println!("acceptance criterion 3: PASS ({guarded} guarded pairs, progressions, lcm bounds, 500 sandwich instances)");
}

#[test]
fn criterion_4_cover_correctness_by_sampling() {
    let (l, d) = defaults();
    let mut rng = gen::rng(41);
    let cfg = gen::GenConfig {
        max_coeff: 2,
        max_constant: 4,
        max_atoms: 3,
        max_depth: 2,
        moduli: &[2, 3],
    };

    // residue split: inject non-simple divisibilities and compare the
    // disjunction of the cover with the input
    for i in 0..250 {
        let base = gen::qf_formula(&mut rng, &[v("p")], &[v("u"), v("z")], &cfg);
        let bad_div = {
            let mut t = Term::var(v("u")).scale(&BigInt::from(rng.gen_range(1i64..=2)));
            if rng.gen_bool(0.5) {
                t.add_power(v("p"), BigInt::from(rng.gen_range(1i64..=2)));
            } else {
                t.add_linear(v("z"), BigInt::from(rng.gen_range(1i64..=2)));
            }
            t.add_constant(&BigInt::from(rng.gen_range(0i64..=2)));
            Formula::div(BigInt::from([2i64, 3, 4][rng.gen_range(0..3)]), t)
        };
        let f = normalize(&Formula::and(base, bad_div));
        let cover = simplify(&f, Fragment::Qf, &l, &d).unwrap();
        let disj = Formula::or_all(cover.members.clone());
        let report = sample_equivalence(
            &f,
            &disj,
            SamplerSpec {
                seed: 4100 + i,
                samples: 220,
                small_box: 4,
                magnitude_bits: 24,
            },
        );
        assert!(report.agrees(), "case {i}: {f:?} -> {report:?}");
    }

    // linear elimination: the candidate-witness set decides exists x, and
    // the produced disjunction must agree with it on sampled assignments
    let mut checked_samples = 0u64;
    for i in 0..250 {
        let f = gen::linear_only_formula(&mut rng, &v("x"), &[v("y"), v("z")], &cfg);
        let outs = pres_qe(&v("x"), &[v("x")], &f, Fragment::Qf, &l, &d).unwrap();
        let disj = Formula::or_all(outs.into_iter().map(|(_, g)| g).collect());
        let pairs = candidate_pairs(&f, &v("x"));
        let product: BigInt = pairs.iter().map(|(a, _)| a.clone()).product();
        let fmod = metrics(&f).fmod;
        for s in 0..12 {
            let mut nu = Assignment::new();
            nu.insert(v("y"), BigInt::from(rng.gen_range(-8i64..=8)));
            nu.insert(v("z"), BigInt::from(rng.gen_range(-8i64..=8)));
            // candidate witnesses: (value(t) + k) / a for each pair, plus
            // plain residues when no inequality mentions x
            let mut witness = false;
            if pairs.is_empty() {
                let mut k = BigInt::zero();
                while k < fmod && !witness {
                    let mut nu2 = nu.clone();
                    nu2.insert(v("x"), k.clone());
                    witness = eval_qf(&f, &nu2);
                    k += 1;
                }
            } else {
                'outer: for (a, t) in &pairs {
                    let r = radius(&f, a, &product);
                    let base = term_value(t, &nu);
                    let mut k = -r.clone();
                    while k <= r {
                        let val = &base + &k;
                        if val.mod_floor(a).is_zero() {
                            let mut nu2 = nu.clone();
                            nu2.insert(v("x"), val.div_floor(a));
                            if eval_qf(&f, &nu2) {
                                witness = true;
                                break 'outer;
                            }
                        }
                        k += 1;
                    }
                }
            }
            let covered = eval_qf(&disj, &nu);
            assert_eq!(witness, covered, "case {i} sample {s}: {f:?}");
            checked_samples += 1;
        }
    }
    println!("acceptance criterion 4: PASS (250 residue splits, 250 eliminations, {checked_samples} witness samples)");
}

#[test]
fn criterion_5_cover_structure_and_definitional_quantifiers() {
    let (l, d) = defaults();
    let mut rng = gen::rng(51);
    let cfg = gen::GenConfig {
        max_coeff: 2,
        max_constant: 3,
        max_atoms: 2,
        max_depth: 2,
        moduli: &[2, 3],
    };
    let mut outputs_total = 0usize;
    for i in 0..200 {
        let n_block = rng.gen_range(1..=2);
        let block = gen::pool("b", n_block);
        let free = gen::pool("z", rng.gen_range(0..=2));
        let f = normalize(&gen::sem_formula(&mut rng, &block, &free, &cfg));
        if f == Formula::True || f == Formula::False {
            continue;
        }
        if block.iter().any(|x| !f.power_occurs(x)) {
            continue;
        }
        let h = metrics(&f).homterms_count();
        let mut state = SemState::new();
        let outs = sem_cover(&block, &f, &mut state, Fragment::Sem, &l, &d).unwrap();
        assert!(
            state.universals() <= h,
            "case {i}: {} universals for {h} homterms",
            state.universals()
        );
        for (_, m) in &outs {
            assert!(!m.has_lambdas(), "case {i}: lambda survived in {m:?}");
            assert!(
                designated_variable(&block, m).is_some(),
                "case {i}: no designated variable in {m:?}"
            );
            assert!(
                params::nonpc_block_homterms(m, &block) <= h.max(1),
                "case {i}: too many mixed homterms in {m:?}"
            );
        }
        outputs_total += outs.len();
    }
    println!(
        "acceptance criterion 5: PASS (200 cover runs, {outputs_total} outputs, zero violations)"
    );
}

#[test]
fn criterion_6_growth_tables_hold_on_random_corpus() {
    let (l, d) = defaults();
    let mut rng = gen::rng(61);
    let cfg = gen::GenConfig {
        max_coeff: 2,
        max_constant: 4,
        max_atoms: 3,
        max_depth: 2,
        moduli: &[2, 3],
    };

    // linear elimination table
    let mut rounds = 0;
    for i in 0..120 {
        let f = gen::linear_only_formula(&mut rng, &v("x"), &[v("y"), v("z")], &cfg);
        if !f.contains_var(&v("x")) {
            continue;
        }
        let outs = pres_qe(&v("x"), &[v("x")], &f, Fragment::Qf, &l, &d).unwrap();
        let bodies: Vec<Formula> = outs.into_iter().map(|(_, g)| g).collect();
        params::check_presburger_round(&f, &bodies).unwrap_or_else(|e| panic!("case {i}: {e}"));
        rounds += 1;
    }

    // cover and linearisation tables
    let mut sem_rounds = 0;
    for i in 0..120 {
        let n_block = rng.gen_range(1..=2);
        let block = gen::pool("b", n_block);
        let free = gen::pool("z", rng.gen_range(0..=1));
        let f = normalize(&gen::sem_formula(&mut rng, &block, &free, &cfg));
        if f == Formula::True || f == Formula::False {
            continue;
        }
        if block.iter().any(|x| !f.power_occurs(x)) {
            continue;
        }
        let mut state = SemState::new();
        let before = state.universals();
        let outs = sem_cover(&block, &f, &mut state, Fragment::Qf, &l, &d).unwrap();
        let bodies: Vec<Formula> = outs.iter().map(|(_, g)| g.clone()).collect();
        params::check_sem_round(&f, block.len(), &bodies, state.universals() - before)
            .unwrap_or_else(|e| panic!("case {i}: {e}"));
        let lin = linearise(outs.clone(), Fragment::Qf, &l, &d).unwrap();
        params::check_linearise_round(&outs, &lin).unwrap_or_else(|e| panic!("case {i}: {e}"));
        sem_rounds += 1;
    }

    // octagonal runs stay octagonal with unit norms
    let mut oct_runs = 0;
    for i in 0..60 {
        let f = oct_sentence(&mut rng);
        let pren = to_prenex(&f);
        if !formula_in_oct(&pren.matrix) {
            continue;
        }
        let cfg = SolveConfig {
            assert_oct: true,
            paranoid: true,
            ..SolveConfig::default()
        };
        let (got, _) = decide_sentence(&pren, &cfg).unwrap_or_else(|e| panic!("case {i}: {e}"));
        let want = relativized_eval(&pren, &BigInt::from(14));
        assert_eq!(got, want, "case {i}: {f:?}");
        oct_runs += 1;
    }
    println!(
        "acceptance criterion 6: PASS ({rounds} elimination rounds, {sem_rounds} cover rounds, {oct_runs} octagonal runs, zero violations)"
    );
}

/// Random octagonal sentence whose quantifiers are relativized to a small
/// box, so the finite-game reference is exact.
fn oct_sentence(rng: &mut gen::ChaCha8Rng) -> Formula {
    let vars = [v("x"), v("y")];
    let mut atoms: Vec<Formula> = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let a = &vars[rng.gen_range(0..2)];
        let b = &vars[rng.gen_range(0..2)];
        let mut t = Term::var(a.clone()).scale(&BigInt::from([-1i64, 1][rng.gen_range(0..2)]));
        if a != b && rng.gen_bool(0.7) {
            t.add_linear(b.clone(), BigInt::from([-1i64, 1][rng.gen_range(0..2)]));
        }
        t.add_constant(&BigInt::from(rng.gen_range(-4i64..=4)));
        atoms.push(Formula::less(t));
    }
    if rng.gen_bool(0.4) {
        let q = [2i64, 3, 4][rng.gen_range(0..3)];
        atoms.push(Formula::div(
            BigInt::from(q),
            Term::var(vars[rng.gen_range(0..2)].clone()).sub(&Term::int(rng.gen_range(0..q))),
        ));
    }
    let matrix = Formula::and_all(atoms);
    // inner quantifier bounded by |y| <= 6, outer by |x| <= 6
    let guard = |x: &Var| {
        Formula::and(
            Formula::lt(&Term::var(x.clone()), &Term::int(7)),
            Formula::lt(&Term::int(-7), &Term::var(x.clone())),
        )
    };
    let inner = if rng.gen_bool(0.5) {
        Formula::exists(v("y"), Formula::and(guard(&v("y")), matrix))
    } else {
        Formula::forall(v("y"), Formula::or(Formula::not(guard(&v("y"))), matrix))
    };
    if rng.gen_bool(0.5) {
        Formula::exists(v("x"), Formula::and(guard(&v("x")), inner))
    } else {
        Formula::forall(v("x"), Formula::or(Formula::not(guard(&v("x"))), inner))
    }
}

struct Case {
    text: &'static str,
    dialect: Dialect,
    expected: bool,
    // short justification of the expected verdict
    why: &'static str,
}

fn corpus() -> Vec<Case> {
    use Dialect::{PresExp as E, PresPower as P};
    vec![
        Case {
            text: "exists x. pow(x) = 8",
            dialect: E,
            expected: true,
            why: "witness x = 3",
        },
        Case {
            text: "exists x. pow(x) = 3",
            dialect: E,
            expected: false,
            why: "powers of two skip 3; bounded search complete by monotonicity",
        },
        Case {
            text: "exists x. pow(x) < 0",
            dialect: E,
            expected: false,
            why: "powers are positive",
        },
        Case {
            text: "exists x. exists y. 2*pow(x) - pow(y) = 0",
            dialect: E,
            expected: true,
            why: "y with |y| = |x| + 1",
        },
        Case {
            text: "exists x. exists y. pow(x) + pow(y) = 12",
            dialect: E,
            expected: true,
            why: "4 + 8",
        },
        Case {
            text: "exists x. exists y. pow(x) + pow(y) = 11",
            dialect: E,
            expected: false,
            why: "odd sum needs a 1; 10 is not a power",
        },
        Case {
            text: "exists x. pow(x) - x = 1",
            dialect: E,
            expected: true,
            why: "x = 0",
        },
        Case {
            text: "exists x. pow(x) + x = 0",
            dialect: E,
            expected: false,
            why: "2^y = y has no solution for y = -x >= 0",
        },
        Case {
            text: "exists x. 7 | pow(x) - 2 && x > 10",
            dialect: E,
            expected: true,
            why: "2^13 = 8192 = 7*1170 + 2",
        },
        Case {
            text: "exists x. 6 | pow(x) - 3",
            dialect: E,
            expected: false,
            why: "2^n mod 6 cycles 1,2,4",
        },
        Case {
            text: "exists x. 2*pow(x) < pow(x) + 1",
            dialect: E,
            expected: false,
            why: "2^|x| < 1 impossible",
        },
        Case {
            text: "exists x. exists y. pow(x) - pow(y) = 6",
            dialect: E,
            expected: true,
            why: "8 - 2",
        },
        Case {
            text: "exists x. exists y. pow(x) - pow(y) = 5",
            dialect: E,
            expected: false,
            why: "odd difference needs 2^a - 1 = 5",
        },
        Case {
            text: "exists x. x < 0 && pow(x) = 4",
            dialect: E,
            expected: true,
            why: "x = -2, absolute value in the exponent",
        },
        Case {
            text: "exists x. pow(x) = 1 && x = 0",
            dialect: E,
            expected: true,
            why: "2^0 = 1",
        },
        Case {
            text: "exists x. forall y. (y - x < 0 || x - y - 1 < 0)",
            dialect: E,
            expected: true,
            why: "every y is below x or at least x",
        },
        Case {
            text: "forall x. exists y. y > x",
            dialect: E,
            expected: true,
            why: "integers are unbounded",
        },
        Case {
            text: "forall x. exists y. y < x && 2 | y",
            dialect: E,
            expected: true,
            why: "even numbers are unbounded below",
        },
        Case {
            text: "exists x. forall y. y >= x",
            dialect: E,
            expected: false,
            why: "no least integer",
        },
        Case {
            text: "forall x. (2 | x || 2 | x + 1)",
            dialect: E,
            expected: true,
            why: "parity",
        },
        Case {
            text: "forall x. (3 | x || 3 | x + 1)",
            dialect: E,
            expected: false,
            why: "x = 1 fails",
        },
        Case {
            text: "exists x. 2 | x && 3 | x + 1 && 0 < x && x < 10",
            dialect: E,
            expected: true,
            why: "x = 2",
        },
        Case {
            text: "forall x. forall y. (x - y < 1 || y - x < 1)",
            dialect: E,
            expected: true,
            why: "one difference is nonpositive",
        },
        Case {
            text: "exists x. 4 | x - 1 && 6 | x - 3",
            dialect: E,
            expected: true,
            why: "x = 9 by CRT",
        },
        Case {
            text: "exists x. 4 | x && 6 | x - 3",
            dialect: E,
            expected: false,
            why: "even versus odd residues",
        },
        Case {
            text: "forall x. forall y. (x - y < 3 || y - x < 3)",
            dialect: E,
            expected: true,
            why: "octagonal tautology",
        },
        Case {
            text: "exists x. exists y. x - y < -5 && y - x < -5",
            dialect: E,
            expected: false,
            why: "the two differences sum to zero",
        },
        Case {
            text: "forall x. exists y. x - y < 1 && y - x < 1",
            dialect: E,
            expected: true,
            why: "y = x",
        },
        Case {
            text: "exists x. x < 5 && !(x < 4) && 2 | x",
            dialect: E,
            expected: true,
            why: "x = 4",
        },
        Case {
            text: "forall x. exists y. P(y) && y > x",
            dialect: P,
            expected: true,
            why: "powers of two are unbounded",
        },
        Case {
            text: "exists x. P(x) && P(x+1) && x > 1",
            dialect: P,
            expected: false,
            why: "consecutive powers above 2 differ by more than 1",
        },
        Case {
            text: "exists x. P(x) && 3 | x",
            dialect: P,
            expected: false,
            why: "2^n mod 3 is 1 or 2",
        },
        Case {
            text: "exists x. P(x) && 7 | x - 1",
            dialect: P,
            expected: true,
            why: "2^3 = 8 = 7 + 1",
        },
        Case {
            text: "P(8)",
            dialect: P,
            expected: true,
            why: "ground power",
        },
        Case {
            text: "P(6)",
            dialect: P,
            expected: false,
            why: "ground non-power",
        },
        Case {
            text: "exists x. P(x) && x > 5 && x < 9",
            dialect: P,
            expected: true,
            why: "x = 8",
        },
        Case {
            text: "forall x. (P(x) -> !(3 | x))",
            dialect: P,
            expected: true,
            why: "2^n mod 3 is never 0",
        },
        Case {
            text: "exists x. P(x) && P(x + 7)",
            dialect: P,
            expected: true,
            why: "1 and 8 are powers",
        },
    ]
}

#[test]
fn criterion_7_end_to_end_verdict_corpus() {
    let cfg = SolveConfig::default();
    let cases = corpus();
    assert!(cases.len() >= 30, "corpus too small: {}", cases.len());
    let mut existential_pairs = 0;
    for (i, case) in cases.iter().enumerate() {
        let f = parse_str(case.text, case.dialect).unwrap();
        let got = match case.dialect {
            Dialect::PresExp => decide(&f, &cfg).unwrap().0,
            Dialect::PresPower => decide_prespower(&f, &cfg).unwrap().verdict,
        };
        assert_eq!(
            got, case.expected,
            "case {i} `{}` ({})",
            case.text, case.why
        );
        // exhaustive and backtracking strategies agree on the existential
        // power-function subset
        if case.dialect == Dialect::PresExp {
            let pren = to_prenex(&f);
            if pren.is_existential() && pren.matrix.is_quantifier_free() {
                let bt = decide_existential(&pren, &cfg).unwrap();
                assert_eq!(
                    bt, case.expected,
                    "backtracking disagrees on `{}`",
                    case.text
                );
                existential_pairs += 1;
            }
        }
    }
    println!(
        "acceptance criterion 7: PASS ({} verdicts, {existential_pairs} strategy agreements)",
        cases.len()
    );
}

#[test]
fn criterion_8_pure_presburger_never_invokes_the_cover() {
    let mut rng = gen::rng(81);
    let mut sentences: Vec<(Formula, BigInt)> = Vec::new();
    // guarded sentences: every quantifier relativized to |v| <= 6, so the
    // finite game over [-7, 7] is exact
    while sentences.len() < 25 {
        let f = guarded_pa_sentence(&mut rng);
        sentences.push((f, BigInt::from(7)));
    }
    // divisibility-only sentences: truth depends on residues modulo the
    // lcm of the moduli (here at most 12), so the finite game over
    // [-12, 12] is exact
    while sentences.len() < 45 {
        let f = div_only_sentence(&mut rng);
        sentences.push((f, BigInt::from(12)));
    }
    // handwritten unbounded classics
    for (text, expected) in [
        ("forall x. exists y. y > x", true),
        ("exists x. forall y. y >= x", false),
        ("forall x. (2 | x || 2 | x + 1)", true),
        ("forall x. exists y. x - y < 1 && y - x < 1", true),
        ("exists x. forall y. (y - x < 0 || x - y - 1 < 0)", true),
    ] {
        let f = parse_str(text, Dialect::PresExp).unwrap();
        let cfg = SolveConfig::default();
        let (got, out) = decide_sentence(&to_prenex(&f), &cfg).unwrap();
        assert_eq!(got, expected, "{text}");
        assert_eq!(out.counters.sem_cover_calls, 0, "{text}");
    }
    let cfg = SolveConfig::default();
    for (i, (f, bound)) in sentences.iter().enumerate() {
        let pren = to_prenex(f);
        let want = relativized_eval(&pren, bound);
        let (got, out) = decide_sentence(&pren, &cfg).unwrap();
        assert_eq!(got, want, "case {i}: {f:?}");
        assert_eq!(out.counters.sem_cover_calls, 0, "case {i}: cover invoked");
    }
    println!(
        "acceptance criterion 8: PASS ({} sentences, cover counter always zero)",
        sentences.len() + 5
    );
}

fn guarded_pa_sentence(rng: &mut gen::ChaCha8Rng) -> Formula {
    let cfg = gen::GenConfig {
        max_coeff: 2,
        max_constant: 4,
        max_atoms: 2,
        max_depth: 1,
        moduli: &[2, 3],
    };
    let vars = [v("x"), v("y")];
    let matrix = gen::pa_formula(rng, &vars, &cfg);
    let guard = |x: &Var| {
        Formula::and(
            Formula::lt(&Term::var(x.clone()), &Term::int(7)),
            Formula::lt(&Term::int(-7), &Term::var(x.clone())),
        )
    };
    let mut f = matrix;
    for var in [v("y"), v("x")] {
        f = if rng.gen_bool(0.5) {
            Formula::exists(var.clone(), Formula::and(guard(&var), f))
        } else {
            Formula::forall(var.clone(), Formula::or(Formula::not(guard(&var)), f))
        };
    }
    f
}

fn div_only_sentence(rng: &mut gen::ChaCha8Rng) -> Formula {
    let vars = [v("x"), v("y")];
    let mut atoms = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let q = [2i64, 3, 4][rng.gen_range(0..3)];
        let mut t = Term::var(vars[rng.gen_range(0..2)].clone());
        if rng.gen_bool(0.4) {
            t.add_linear(vars[rng.gen_range(0..2)].clone(), BigInt::from(1));
        }
        t.add_constant(&BigInt::from(rng.gen_range(0..q)));
        atoms.push(Formula::div(BigInt::from(q), t));
    }
    let mut f = gen_bool_shape(rng, atoms);
    for var in [v("y"), v("x")] {
        f = if rng.gen_bool(0.5) {
            Formula::exists(var, f)
        } else {
            Formula::forall(var, f)
        };
    }
    f
}

fn gen_bool_shape(rng: &mut gen::ChaCha8Rng, mut atoms: Vec<Formula>) -> Formula {
    while atoms.len() > 1 {
        let b = atoms.pop().unwrap();
        let a = atoms.pop().unwrap();
        atoms.push(match rng.gen_range(0..3) {
            0 => Formula::and(a, b),
            1 => Formula::or(a, b),
            _ => Formula::and(Formula::not(a), b),
        });
    }
    atoms.pop().unwrap_or(Formula::True)
}

#[test]
fn criterion_9_prespower_pipeline_is_octagonal() {
    let cfg = SolveConfig::default();
    let mut stages = 0usize;
    for case in corpus().iter().filter(|c| c.dialect == Dialect::PresPower) {
        let f = parse_str(case.text, Dialect::PresPower).unwrap();
        // decide_prespower asserts octagonal shape on every disjunct that
        // reaches the second run, and the run itself checks maxvars <= 2
        // and unit homogeneous norms after every step
        let out = decide_prespower(&f, &cfg).unwrap();
        assert_eq!(out.verdict, case.expected, "`{}`", case.text);
        for psi in &out.octagonal {
            assert!(formula_in_oct(psi), "`{}`: {psi:?}", case.text);
            let m = metrics(psi);
            assert!(m.maxvars <= 2, "`{}`: maxvars {}", case.text, m.maxvars);
            assert!(
                m.norminf_homterms <= BigInt::one(),
                "`{}`: homterm norm {}",
                case.text,
                m.norminf_homterms
            );
        }
        stages += out.octagonal.len();
    }
    assert!(stages > 0, "no disjunct ever reached the octagonal stage");
    println!("acceptance criterion 9: PASS ({stages} octagonal stage entries verified)");
}
