//! The Semenov cover and the log-taking rewrite of power comparisons.
//!
//! `sem_cover` rewrites a block formula into a cover in which, member by
//! member, some block variable's power occurs only inside power-comparison
//! atoms. It works one block variable at a time: the member set produced for
//! `x` is guarded by "`2^|x|` is the largest power of the block", and within
//! that guess the inequalities mixing `2^|x|` with other material are
//! resolved by a case analysis on the position of `2^|x|` relative to a
//! threshold `2^g` and to the highest power of two below the free part of
//! the inequality. The latter comparisons introduce `lambda(sigma)` terms;
//! they are eliminated at the end in favor of universally quantified
//! variables `w_sigma` constrained by `2^|w| <= |sigma| < 2*2^|w|`.
//!
//! `linearise` then turns power comparisons on a variable into linear
//! constraints on `|x|` by taking exact logarithms, and rewrites simple
//! divisibility constraints on `2^|x|` through the congruence solver.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use crate::formula::{Atom, Formula};
use crate::fragment::{atom_in_pc, Fragment};
use crate::limits::{check_bits, check_count, Deadline, Limits, SolveError};
use crate::normal::normalize;
use crate::numtheory::{
    ceil_log2_ratio, floor_log2_ratio, lambda, solve_pow_congruence, CongruenceSolution,
};
use crate::subst::{lambda_to_power, lambda_to_zero, scaled_substitute, Target};
use crate::term::{Term, Var};

/// Threaded state of one quantifier block: the universally quantified
/// definitional variables introduced so far and the registry that maps each
/// homogeneous free term `sigma` to its variable `w_sigma`.
#[derive(Clone, Debug, Default)]
pub struct SemState {
    pi_prime: Vec<Var>,
    registry: BTreeMap<Term, Var>,
    counter: u64,
}

impl SemState {
    pub fn new() -> SemState {
        SemState::default()
    }

    /// The universal quantifiers accumulated so far, in introduction order.
    pub fn pi_prime(&self) -> &[Var] {
        &self.pi_prime
    }

    pub fn universals(&self) -> usize {
        self.pi_prime.len()
    }

    fn w_for(&mut self, sigma: &Term, taken: &BTreeSet<Var>) -> Var {
        if let Some(w) = self.registry.get(sigma) {
            return w.clone();
        }
        let w = loop {
            self.counter += 1;
            let cand = Var::new(format!("w{}", self.counter));
            if !taken.contains(&cand) && !self.pi_prime.contains(&cand) {
                break cand;
            }
        };
        self.registry.insert(sigma.clone(), w.clone());
        self.pi_prime.push(w.clone());
        w
    }
}

/// One inequality group: a shared block part `eta` and free part `sigma`,
/// with the constants of the atoms that share them.
struct Group {
    eta: Term,
    sigma: Term,
    constants: Vec<BigInt>,
}

/// Produces the cover described in the module docs. Returns the output
/// pairs; new universal quantifiers appear in `state`.
pub fn sem_cover(
    vars: &[Var],
    f: &Formula,
    state: &mut SemState,
    frag: Fragment,
    limits: &Limits,
    deadline: &Deadline,
) -> Result<Vec<(Vec<Var>, Formula)>, SolveError> {
    assert!(!vars.is_empty(), "the block variable vector is empty");
    assert!(!f.has_lambdas(), "input carries lambda terms");
    for x in vars {
        assert!(f.power_occurs(x), "2^|{x}| does not occur in the formula");
    }

    let mut tagged: Vec<(Var, Formula)> = Vec::new();
    for x in vars {
        deadline.check()?;
        let groups = group_inequalities(f, x, vars);
        let mut gamma: Vec<Formula> = vec![f.clone()];
        for g in &groups {
            gamma = expand_group(x, g, gamma, vars, limits, deadline)?;
        }
        // Guard every member with "2^|x| is the largest power of the block".
        let largest = Formula::and_all(
            vars.iter()
                .filter(|y| *y != x)
                .map(|y| Formula::not(Formula::lt(&Term::pow(x.clone()), &Term::pow(y.clone()))))
                .collect(),
        );
        for g in gamma {
            let guarded = normalize(&Formula::and(largest.clone(), g));
            if guarded != Formula::False {
                tagged.push((x.clone(), guarded));
            }
        }
    }

    // Replace lambda terms by definitional variables.
    let mut sigmas: BTreeSet<Term> = BTreeSet::new();
    for (_, g) in &tagged {
        g.for_each_atom(&mut |a| {
            for (s, _) in a.term().lambdas() {
                sigmas.insert(s.clone());
            }
        });
    }
    let sigmas: Vec<Term> = sigmas.into_iter().collect();
    let subset_count =
        BigInt::from(tagged.len()) * (BigInt::one() << sigmas.len()) + BigInt::from(sigmas.len());
    check_count(limits, &subset_count, "lambda elimination")?;

    let taken: BTreeSet<Var> = f
        .all_vars()
        .iter()
        .cloned()
        .chain(vars.iter().cloned())
        .collect();
    let ws: Vec<Var> = sigmas.iter().map(|s| state.w_for(s, &taken)).collect();

    let mut outputs: Vec<(Vec<Var>, Formula)> = Vec::new();
    // Escape members: the cover must stay true for the values of w_sigma that
    // fail to encode lambda(|sigma|).
    for (sigma, w) in sigmas.iter().zip(ws.iter()) {
        let esc = Formula::and(nonzero(sigma), Formula::not(lambda_window(sigma, w)));
        outputs.push((vars.to_vec(), normalize(&esc)));
    }
    // Every subset of sigmas may be the nonzero ones; enumerate by
    // cardinality for stable ordering.
    let mut masks: Vec<u32> = (0..(1u32 << sigmas.len())).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        for (_, g) in &tagged {
            deadline.check()?;
            let mut body = g.clone();
            let mut guards: Vec<Formula> = Vec::new();
            for (i, (sigma, w)) in sigmas.iter().zip(ws.iter()).enumerate() {
                if mask & (1 << i) != 0 {
                    guards.push(lambda_window(sigma, w));
                    body = lambda_to_power(&body, sigma, w);
                } else {
                    guards.push(Formula::eq(sigma, &Term::zero()));
                    body = lambda_to_zero(&body, sigma);
                }
            }
            let member = normalize(&Formula::and(Formula::and_all(guards), body));
            if member != Formula::False {
                debug_assert!(!member.has_lambdas());
                debug_assert!(
                    designated_variable(vars, &member).is_some(),
                    "no block variable has its power confined to power comparisons: {member:?}"
                );
                if frag == Fragment::Sem {
                    debug_assert!(
                        crate::fragment::in_fragment(&member, Fragment::Sem),
                        "output left the fragment: {member:?}"
                    );
                }
                outputs.push((vars.to_vec(), member));
            }
        }
    }
    Ok(outputs)
}

/// Finds a block variable whose power occurs only inside power-comparison
/// atoms of `f` (vacuously one that does not occur at all).
pub fn designated_variable(vars: &[Var], f: &Formula) -> Option<Var> {
    vars.iter()
        .find(|x| {
            let mut ok = true;
            f.for_each_atom(&mut |a| {
                if a.term().has_power_of(x) && !atom_in_pc(a) {
                    ok = false;
                }
            });
            ok
        })
        .cloned()
}

fn group_inequalities(f: &Formula, x: &Var, vars: &[Var]) -> Vec<Group> {
    let mut terms: BTreeSet<Term> = BTreeSet::new();
    f.for_each_atom(&mut |a| match a {
        Atom::Less(t) if t.has_power_of(x) && !atom_in_pc(a) => {
            terms.insert(t.clone());
        }
        Atom::Div(_, t) | Atom::Pow2(t) => {
            assert!(
                !t.has_power_of(x) || atom_in_pc(a),
                "non-simple constraint mentions 2^|{x}|: {a}"
            );
        }
        _ => {}
    });
    let mut groups: BTreeMap<(Term, Term), Vec<BigInt>> = BTreeMap::new();
    for t in terms {
        let (eta, sigma, c) = split_block_free(&t, vars);
        groups.entry((eta, sigma)).or_default().push(c);
    }
    groups
        .into_iter()
        .map(|((eta, sigma), constants)| Group {
            eta,
            sigma,
            constants,
        })
        .collect()
}

/// Splits `t` into the homogeneous part over the block variables, the
/// homogeneous part over everything else, and the constant.
fn split_block_free(t: &Term, vars: &[Var]) -> (Term, Term, BigInt) {
    let mut eta = Term::zero();
    let mut sigma = Term::zero();
    for (v, c) in t.powers() {
        if vars.contains(v) {
            eta.add_power(v.clone(), c.clone());
        } else {
            sigma.add_power(v.clone(), c.clone());
        }
    }
    for (v, c) in t.linears() {
        if vars.contains(v) {
            eta.add_linear(v.clone(), c.clone());
        } else {
            sigma.add_linear(v.clone(), c.clone());
        }
    }
    for (v, c) in t.abses() {
        if vars.contains(v) {
            eta.add_abs(v.clone(), c.clone());
        } else {
            sigma.add_abs(v.clone(), c.clone());
        }
    }
    assert!(!t.has_lambdas());
    (eta, sigma, t.constant().clone())
}

fn expand_group(
    x: &Var,
    group: &Group,
    gamma: Vec<Formula>,
    _vars: &[Var],
    limits: &Limits,
    deadline: &Deadline,
) -> Result<Vec<Formula>, SolveError> {
    let Group {
        eta,
        sigma,
        constants,
    } = group;
    let atoms: BTreeSet<Term> = constants
        .iter()
        .map(|c| eta.add(sigma).add(&Term::int(c.clone())))
        .collect();
    let max_c = constants.iter().map(|c| c.abs()).max().unwrap();
    let lam = lambda(&(eta.norm_one() + max_c));
    // 2^g = 2^7 * lambda(...)^2, a power of two by construction.
    let two_g: BigInt = BigInt::from(128) * &lam * &lam;
    check_bits(limits, &two_g, "the small-factor threshold")?;
    let g = (two_g.bits() - 1) as u64;
    let a = eta
        .power_coeff(x)
        .cloned()
        .expect("grouped inequality lost the power of the pivot variable");
    let v_set: Vec<Var> = eta.vars().into_iter().filter(|v| v != x).collect();

    let estimated = BigInt::from(gamma.len())
        * (BigInt::from(g + 1) * BigInt::from(1 + v_set.len()) + BigInt::from(6u8));
    check_count(limits, &estimated, "case families")?;

    let beta = {
        let mut parts = vec![Formula::lt(
            &Term::int(two_g.clone()),
            &Term::pow(x.clone()),
        )];
        for u in &v_set {
            parts.push(Formula::lt(
                &Term::pow(u.clone()).scale(&two_g),
                &Term::pow(x.clone()),
            ));
        }
        Formula::and_all(parts)
    };

    let replace_in = |f: &Formula, rewrite: &dyn Fn(&Term) -> Formula| -> Formula {
        f.map_atoms(&mut |atom| match atom {
            Atom::Less(t) if atoms.contains(t) => Some(rewrite(t)),
            _ => None,
        })
    };
    let subst_pow = |f: &Formula, rep: &Term| -> Formula {
        replace_in(f, &|t| {
            let coeff = t.power_coeff(x).expect("atom in the group lost its power");
            let mut rest = t.clone();
            rest.add_power(x.clone(), -coeff);
            Formula::less(rest.add(&rep.scale(coeff)))
        })
    };
    let scaled_subst = |f: &Formula, rep: &Term, n: &BigInt| -> Formula {
        replace_in(f, &|t| {
            scaled_substitute(&Formula::less(t.clone()), &Target::Power(x.clone()), rep, n)
        })
    };
    let to_const = |f: &Formula, value: bool| -> Formula {
        replace_in(f, &|_| if value { Formula::True } else { Formula::False })
    };

    let lam_a = lambda(&a);
    let lam_sigma = Term::lam(sigma.clone());
    let lhs = Term::pow(x.clone()).scale(&lam_a);

    let mut next: BTreeSet<Formula> = BTreeSet::new();
    for gam in &gamma {
        deadline.check()?;
        // Case 1: 2^|x| equals a small constant.
        for j in 0..=g {
            let c = BigInt::one() << j;
            let guard = Formula::eq(&Term::pow(x.clone()), &Term::int(c.clone()));
            let body = subst_pow(gam, &Term::int(c));
            next.insert(normalize(&Formula::and(guard, body)));
        }
        // Case 2: 2^|x| is a small multiple of another power of the group.
        for v in &v_set {
            for j in 0..=g {
                let rep = Term::pow(v.clone()).scale(&(BigInt::one() << j));
                let guard = Formula::and(
                    Formula::lt(&Term::int(two_g.clone()), &Term::pow(x.clone())),
                    Formula::eq(&Term::pow(x.clone()), &rep),
                );
                let body = subst_pow(gam, &rep);
                next.insert(normalize(&Formula::and(guard, body)));
            }
        }
        // Cases 3 and 4: the power part sits strictly below lambda(sigma);
        // the sign of sigma decides each atom of the group.
        let below = Formula::lt(&lhs, &lam_sigma);
        next.insert(normalize(&Formula::and_all(vec![
            beta.clone(),
            below.clone(),
            Formula::less(sigma.clone()),
            to_const(gam, true),
        ])));
        next.insert(normalize(&Formula::and_all(vec![
            beta.clone(),
            below,
            Formula::not(Formula::less(sigma.clone())),
            to_const(gam, false),
        ])));
        // Cases 5 and 6: lambda(a)*2^|x| equals lambda(sigma) or twice it.
        for factor in [1u8, 2u8] {
            let rhs = lam_sigma.scale(&BigInt::from(factor));
            let guard = Formula::eq(&lhs, &rhs);
            let body = scaled_subst(gam, &rhs, &lam_a);
            next.insert(normalize(&Formula::and_all(vec![
                beta.clone(),
                guard,
                body,
            ])));
        }
        // Cases 7 and 8: the power part dominates; the sign of its
        // coefficient decides each atom of the group.
        let above = Formula::lt(&lam_sigma.scale(&BigInt::from(2)), &lhs);
        let body = to_const(gam, a.is_negative());
        next.insert(normalize(&Formula::and_all(vec![
            beta.clone(),
            above,
            body,
        ])));
    }
    Ok(next.into_iter().filter(|f| *f != Formula::False).collect())
}

/// `2^|w| <= |sigma| < 2*2^|w|`, encoded without disjunction:
/// `!(|sigma| < 2^|w|) && |sigma| < 2*2^|w|` where `|t| < B` is
/// `t < B && -t < B`.
fn lambda_window(sigma: &Term, w: &Var) -> Formula {
    let p = Term::pow(w.clone());
    let twice = p.scale(&BigInt::from(2));
    Formula::and(Formula::not(abs_lt(sigma, &p)), abs_lt(sigma, &twice))
}

fn abs_lt(t: &Term, bound: &Term) -> Formula {
    Formula::and(Formula::lt(t, bound), Formula::lt(&t.neg(), bound))
}

fn nonzero(t: &Term) -> Formula {
    Formula::or(Formula::less(t.clone()), Formula::less(t.neg()))
}

/// Takes logarithms. For the quantifier-free target fragment, every block
/// variable whose power occurs only in power comparisons has those atoms
/// rewritten into linear constraints on `|x|`; for the Semenov target the
/// input passes through unchanged.
pub fn linearise(
    items: Vec<(Vec<Var>, Formula)>,
    frag: Fragment,
    limits: &Limits,
    deadline: &Deadline,
) -> Result<Vec<(Vec<Var>, Formula)>, SolveError> {
    if frag == Fragment::Sem {
        return Ok(items);
    }
    let mut out = Vec::with_capacity(items.len());
    for (vars, f) in items {
        deadline.check()?;
        let mut f = normalize(&f);
        let eligible: Vec<Var> = vars
            .iter()
            .filter(|x| power_only_in_pc(&f, x))
            .cloned()
            .collect();
        for x in &eligible {
            f = linearise_variable(&f, x, limits)?;
        }
        out.push((vars, normalize(&f)));
    }
    Ok(out)
}

fn power_only_in_pc(f: &Formula, x: &Var) -> bool {
    let mut ok = true;
    f.for_each_atom(&mut |a| {
        if a.term().has_power_of(x) && !atom_in_pc(a) {
            ok = false;
        }
    });
    ok
}

/// Rewrites all power comparisons on `x` in a formula where they are the
/// only occurrences of `2^|x|`.
pub fn linearise_variable(f: &Formula, x: &Var, limits: &Limits) -> Result<Formula, SolveError> {
    let mut err: Option<SolveError> = None;
    let g = f.map_atoms(&mut |a| {
        if err.is_some() || !a.term().has_power_of(x) {
            return None;
        }
        debug_assert!(atom_in_pc(a), "2^|{x}| survives outside power comparisons");
        match a {
            Atom::Less(t) => Some(linearise_less(t, x)),
            Atom::Div(q, t) => match linearise_div(q, t, x, limits) {
                Ok(f) => Some(f),
                Err(e) => {
                    err = Some(e);
                    None
                }
            },
            Atom::Pow2(_) => unreachable!("predicate atom in a power comparison"),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(normalize(&g)),
    }
}

fn linearise_less(t: &Term, x: &Var) -> Formula {
    let a = t.power_coeff(x).cloned().expect("pivot power missing");
    let others: Vec<(Var, BigInt)> = t
        .powers()
        .filter(|(v, _)| *v != x)
        .map(|(v, c)| (v.clone(), c.clone()))
        .collect();
    match others.as_slice() {
        [] => {
            // a * 2^|x| < b
            let b = -t.constant();
            if a.is_positive() && b.is_positive() {
                let e = ceil_log2_ratio(&b, &a);
                Formula::lt(&Term::abs(x.clone()), &Term::int(e))
            } else if a.is_negative() && b.is_negative() {
                let e = floor_log2_ratio(&b.abs(), &a.abs());
                Formula::lt(&Term::int(e), &Term::abs(x.clone()))
            } else if a.is_positive() {
                Formula::False
            } else {
                Formula::True
            }
        }
        [(y, minus_b)] => {
            // a * 2^|x| < b * 2^|y|
            let b = -minus_b.clone();
            if a.is_positive() && b.is_positive() {
                let e = ceil_log2_ratio(&b, &a);
                Formula::lt(
                    &Term::abs(x.clone()),
                    &Term::abs(y.clone()).add(&Term::int(e)),
                )
            } else if a.is_negative() && b.is_negative() {
                let e = floor_log2_ratio(&b.abs(), &a.abs());
                Formula::lt(
                    &Term::abs(y.clone()).add(&Term::int(e)),
                    &Term::abs(x.clone()),
                )
            } else if a.is_positive() {
                Formula::False
            } else {
                Formula::True
            }
        }
        _ => unreachable!("power comparison with more than two powers"),
    }
}

fn linearise_div(q: &BigInt, t: &Term, x: &Var, limits: &Limits) -> Result<Formula, SolveError> {
    // q | 2^|x| + c, i.e. 2^|x| = (q - c) mod q (mod q)
    debug_assert!(t.power_coeff(x).map(|c| c.is_one()).unwrap_or(false));
    if q > &BigInt::from(limits.max_disjuncts) {
        return Err(SolveError::exceeded(format!(
            "congruence search over modulus {q}"
        )));
    }
    let r = (-t.constant()).mod_floor(q);
    Ok(match solve_pow_congruence(q, &r) {
        CongruenceSolution::Unsat => Formula::False,
        CongruenceSolution::Single(s) => Formula::eq(&Term::abs(x.clone()), &Term::int(s)),
        CongruenceSolution::Progression { start, period } => {
            let rem = start.mod_floor(&period);
            let div = Formula::div(period.clone(), Term::abs(x.clone()).sub(&Term::int(rem)));
            if start < period {
                div
            } else {
                // The progression starts above the period; pin the minimum.
                let lower = Formula::less(Term::int(&start - 1u8).sub(&Term::abs(x.clone())));
                Formula::and(div, lower)
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{eval_qf, Assignment};
    use crate::parse::{parse_str, Dialect};

    fn pe(s: &str) -> Formula {
        normalize(&parse_str(s, Dialect::PresExp).unwrap())
    }

    fn v(n: &str) -> Var {
        Var::new(n)
    }

    fn defaults() -> (Limits, Deadline) {
        let l = Limits::default();
        let d = Deadline::new(&l);
        (l, d)
    }

    #[test]
    fn linearise_small_cases() {
        let l = Limits::default();
        // 3 * 2^|x| < 24  ->  |x| < 3
        let f = pe("3*pow(x) < 24");
        let got = linearise_variable(&f, &v("x"), &l).unwrap();
        assert_eq!(got, pe("abs(x) < 3"));
        // -2 * 2^|x| < -3 * 2^|y|  ->  |x| > |y| + 0
        let f = pe("-2*pow(x) < -3*pow(y)");
        let got = linearise_variable(&f, &v("x"), &l).unwrap();
        assert_eq!(got, pe("abs(x) > abs(y)"));
        // Sem target is a no-op
        let (lims, d) = defaults();
        let f = pe("3*pow(x) < 24");
        let out = linearise(vec![(vec![v("x")], f.clone())], Fragment::Sem, &lims, &d).unwrap();
        assert_eq!(out[0].1, f);
    }

    #[test]
    fn linearise_congruences() {
        let l = Limits::default();
        // 20 | pow(x) - 2  ->  |x| = 1
        let f = pe("20 | pow(x) - 2");
        let got = linearise_variable(&f, &v("x"), &l).unwrap();
        assert_eq!(got, normalize(&pe("abs(x) = 1")));
        // 6 | pow(x) - 3  ->  false
        let f = pe("6 | pow(x) - 3");
        let got = linearise_variable(&f, &v("x"), &l).unwrap();
        assert_eq!(got, Formula::False);
        // 7 | pow(x) - 2  ->  3 | |x| - 1
        let f = pe("7 | pow(x) - 2");
        let got = linearise_variable(&f, &v("x"), &l).unwrap();
        assert_eq!(got, normalize(&pe("3 | abs(x) - 1")));
    }

    #[test]
    fn linearise_congruence_with_offset_start() {
        let l = Limits::default();
        // 12 | pow(x) - 4: solutions |x| in {2, 4, 6, ...}, not 0
        let f = pe("12 | pow(x) - 4");
        let got = linearise_variable(&f, &v("x"), &l).unwrap();
        for xv in -12i64..=12 {
            let lhs = (1i64 << xv.unsigned_abs().min(40)) % 12 == 4 % 12;
            let mut nu = Assignment::new();
            nu.insert(v("x"), BigInt::from(xv));
            assert_eq!(lhs, eval_qf(&got, &nu), "x={xv} in {got:?}");
        }
    }

    #[test]
    fn sem_cover_single_power_versus_free_variable() {
        let (l, d) = defaults();
        // 2^|x| - z < 0, block = (x)
        let f = pe("pow(x) - z < 0");
        let mut st = SemState::new();
        let out = sem_cover(&[v("x")], &f, &mut st, Fragment::Qf, &l, &d).unwrap();
        assert!(!out.is_empty());
        // one definitional variable for sigma = -z
        assert_eq!(st.universals(), 1);
        // no lambda survives and each member designates x
        for (_, m) in &out {
            assert!(!m.has_lambdas());
            assert!(designated_variable(&[v("x")], m).is_some());
        }
    }

    #[test]
    fn sem_cover_running_example_branches() {
        let (l, d) = defaults();
        let f = pe("3*pow(x) - 5*pow(y) - z < 0");
        let mut st = SemState::new();
        let out = sem_cover(&[v("x"), v("y")], &f, &mut st, Fragment::Qf, &l, &d).unwrap();
        assert!(!out.is_empty());
        let mut designated = std::collections::BTreeSet::new();
        for (_, m) in &out {
            let d = designated_variable(&[v("x"), v("y")], m)
                .unwrap_or_else(|| panic!("undesignated member {m:?}"));
            designated.insert(d);
        }
        // the cover splits into an "x largest" and a "y largest" family
        assert!(designated.contains(&v("x")) && designated.contains(&v("y")));
    }
}
