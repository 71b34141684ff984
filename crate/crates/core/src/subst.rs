//! Substitution of terms for variables and power terms, the scaled variant
//! used by the Presburger elimination, and the expansion of absolute values
//! into sign-case guards.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::formula::{Atom, Formula};
use crate::normal::{normalize_atom, refold};
use crate::term::{Term, Var};

/// What gets replaced: a power term `2^|x|` or a variable occurring linearly.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Target {
    Power(Var),
    Linear(Var),
}

/// Replaces every occurrence of the target by `rep` and normalizes.
///
/// For a `Power(x)` target, linear occurrences of `x` are left untouched.
/// For a `Linear(x)` target the variable must occur only linearly; if `x`
/// appears under an absolute value, `rep` must be a constant or `±y` for a
/// single variable `y`, since `|rep|` has to stay inside the term language.
pub fn substitute(f: &Formula, target: &Target, rep: &Term) -> Formula {
    if let Target::Linear(x) = target {
        assert!(
            !f.power_occurs(x),
            "cannot substitute for {x}: it occurs under a power"
        );
    }
    let g = f.map_atoms(&mut |a| Some(normalize_atom(&subst_atom(a, target, rep))));
    refold(&g)
}

fn subst_atom(a: &Atom, target: &Target, rep: &Term) -> Atom {
    match a {
        Atom::Less(t) => Atom::Less(subst_term(t, target, rep)),
        Atom::Div(q, t) => Atom::Div(q.clone(), subst_term(t, target, rep)),
        Atom::Pow2(t) => Atom::Pow2(subst_term(t, target, rep)),
    }
}

fn subst_term(t: &Term, target: &Target, rep: &Term) -> Term {
    match target {
        Target::Power(x) => {
            let Some(a) = t.power_coeff(x).cloned() else {
                return subst_in_lambdas(t, target, rep);
            };
            let mut rest = t.clone();
            rest.add_power(x.clone(), -&a);
            subst_in_lambdas(&rest, target, rep).add(&rep.scale(&a))
        }
        Target::Linear(x) => {
            let mut out = subst_in_lambdas(t, target, rep);
            if let Some(b) = t.linear_coeff(x).cloned() {
                out.add_linear(x.clone(), -&b);
                out = out.add(&rep.scale(&b));
            }
            if let Some(d) = t.abs_coeff(x).cloned() {
                out.add_abs(x.clone(), -&d);
                out = out.add(&abs_of(rep).scale(&d));
            }
            out
        }
    }
}

/// `|rep|` for the few shapes that stay in the term language.
fn abs_of(rep: &Term) -> Term {
    if rep.is_ground() {
        return Term::int(rep.constant().abs());
    }
    let single_linear = rep.linears().count() == 1
        && rep.powers().count() == 0
        && rep.abses().count() == 0
        && !rep.has_lambdas()
        && rep.constant().is_zero();
    if single_linear {
        let (v, c) = rep.linears().next().unwrap();
        if c.abs().is_one() {
            return Term::abs(v.clone());
        }
    }
    panic!("cannot take |{rep}| inside the term language");
}

fn subst_in_lambdas(t: &Term, target: &Target, rep: &Term) -> Term {
    if !t.has_lambdas() {
        return t.clone();
    }
    let mut out = t.clone();
    let entries: Vec<(Term, BigInt)> = t.lambdas().map(|(s, c)| (s.clone(), c.clone())).collect();
    for (s, c) in entries {
        let s2 = subst_term(&s, target, rep);
        if s2 != s {
            out.add_lambda(s.clone(), -&c);
            out.add_lambda(s2, c);
        }
    }
    out
}

/// Scaled substitution: each inequality `a*t1 + t' < 0` becomes
/// `a*rep + n*t' < 0` and each constraint `q | a*t1 + t'` becomes
/// `n*q | a*rep + n*t'`, for atoms in which the target occurs; the rest of
/// the formula is untouched. `n = 1` is plain substitution.
pub fn scaled_substitute(f: &Formula, target: &Target, rep: &Term, n: &BigInt) -> Formula {
    assert!(n >= &BigInt::one(), "scale factor must be positive");
    if let Target::Linear(x) = target {
        assert!(
            !f.power_occurs(x),
            "cannot substitute for {x}: it occurs under a power"
        );
    }
    let g = f.map_atoms(&mut |a| {
        let coeff = target_coeff(a.term(), target);
        let Some(a_coeff) = coeff else {
            return None;
        };
        let rest = remove_target(a.term(), target, &a_coeff);
        Some(match a {
            Atom::Less(_) => normalize_atom(&Atom::Less(rep.scale(&a_coeff).add(&rest.scale(n)))),
            Atom::Div(q, _) => {
                normalize_atom(&Atom::Div(q * n, rep.scale(&a_coeff).add(&rest.scale(n))))
            }
            Atom::Pow2(_) => panic!("scaled substitution does not apply to predicate atoms"),
        })
    });
    refold(&g)
}

fn target_coeff(t: &Term, target: &Target) -> Option<BigInt> {
    match target {
        Target::Power(x) => t.power_coeff(x).cloned(),
        Target::Linear(x) => {
            assert!(
                t.abs_coeff(x).is_none(),
                "scaled substitution target {x} occurs under an absolute value"
            );
            t.linear_coeff(x).cloned()
        }
    }
}

fn remove_target(t: &Term, target: &Target, coeff: &BigInt) -> Term {
    let mut rest = t.clone();
    match target {
        Target::Power(x) => rest.add_power(x.clone(), -coeff),
        Target::Linear(x) => rest.add_linear(x.clone(), -coeff),
    }
    rest
}

/// Per-atom scaled substitution of a linearly occurring variable, used by
/// the elimination loop: `a*x + t' < 0` becomes `a*rep + n*t' < 0` and
/// `q | a*x + t'` becomes `n*q | a*rep + n*t'`, normalized.
pub(crate) fn scaled_atom_rewrite(a: &Atom, x: &Var, rep: &Term, n: &BigInt) -> Formula {
    let t = a.term();
    let Some(c) = t.linear_coeff(x).cloned() else {
        panic!("atom {a} marked for {x} but the variable is not linear in it");
    };
    let mut rest = t.clone();
    rest.add_linear(x.clone(), -&c);
    let new_term = rep.scale(&c).add(&rest.scale(n));
    match a {
        Atom::Less(_) => normalize_atom(&Atom::Less(new_term)),
        Atom::Div(q, _) => normalize_atom(&Atom::Div(q * n, new_term)),
        Atom::Pow2(_) => panic!("scaled substitution does not apply to predicate atoms"),
    }
}

/// Expands every atom in which `|x|` occurs into the two-case guard form:
/// the atom with `|x| -> x` under `x >= 0`, and with `|x| -> -x` under
/// `x < 0`. Other absolute values in the same atom are left as they are.
pub fn expand_abs_var(f: &Formula, x: &Var) -> Formula {
    let x_neg = Formula::less(Term::var(x.clone()));
    let g = f.map_atoms(&mut |a| {
        let d = a.term().abs_coeff(x).cloned()?;
        let pos = normalize_atom(&replace_abs(a, x, &d, false));
        let neg = normalize_atom(&replace_abs(a, x, &d, true));
        // (x < 0 or A+) and (not(x < 0) or A-)
        Some(Formula::and(
            Formula::or(x_neg.clone(), pos),
            Formula::or(Formula::not(x_neg.clone()), neg),
        ))
    });
    refold(&g)
}

fn replace_abs(a: &Atom, x: &Var, d: &BigInt, negative_branch: bool) -> Atom {
    let rewrite = |t: &Term| -> Term {
        let mut out = t.clone();
        out.add_abs(x.clone(), -d);
        let c = if negative_branch { -d } else { d.clone() };
        out.add_linear(x.clone(), c);
        out
    };
    match a {
        Atom::Less(t) => Atom::Less(rewrite(t)),
        Atom::Div(q, t) => Atom::Div(q.clone(), rewrite(t)),
        Atom::Pow2(t) => Atom::Pow2(rewrite(t)),
    }
}

/// Replaces `lambda(sigma)` by `2^|w|` throughout.
pub fn lambda_to_power(f: &Formula, sigma: &Term, w: &Var) -> Formula {
    lambda_replace(f, sigma, &Term::pow(w.clone()))
}

/// Replaces `lambda(sigma)` by `0` throughout.
pub fn lambda_to_zero(f: &Formula, sigma: &Term) -> Formula {
    lambda_replace(f, sigma, &Term::zero())
}

fn lambda_replace(f: &Formula, sigma: &Term, rep: &Term) -> Formula {
    f.map_atoms(&mut |a| {
        let t = a.term();
        let c = t
            .lambdas()
            .find(|(s, _)| *s == sigma)
            .map(|(_, c)| c.clone())?;
        let mut out = t.clone();
        out.add_lambda(sigma.clone(), -&c);
        let out = out.add(&rep.scale(&c));
        Some(match a {
            Atom::Less(_) => Formula::Atom(Atom::Less(out)),
            Atom::Div(q, _) => Formula::Atom(Atom::Div(q.clone(), out)),
            Atom::Pow2(_) => unreachable!("lambda inside predicate atom"),
        })
    })
}
