//! Prenex normal form.

use std::collections::BTreeSet;
use std::fmt;

use crate::formula::Formula;
use crate::term::Var;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Quant {
    Exists,
    Forall,
}

impl Quant {
    pub fn flip(self) -> Quant {
        match self {
            Quant::Exists => Quant::Forall,
            Quant::Forall => Quant::Exists,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PrenexFormula {
    pub prefix: Vec<(Quant, Var)>,
    pub matrix: Formula,
}

impl PrenexFormula {
    pub fn is_sentence(&self) -> bool {
        let bound: BTreeSet<Var> = self.prefix.iter().map(|(_, v)| v.clone()).collect();
        self.matrix.free_vars().is_subset(&bound)
    }

    pub fn is_existential(&self) -> bool {
        self.prefix.iter().all(|(q, _)| *q == Quant::Exists)
    }

    pub fn to_formula(&self) -> Formula {
        let mut f = self.matrix.clone();
        for (q, v) in self.prefix.iter().rev() {
            f = match q {
                Quant::Exists => Formula::exists(v.clone(), f),
                Quant::Forall => Formula::forall(v.clone(), f),
            };
        }
        f
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        self.to_formula().free_vars()
    }
}

impl fmt::Display for PrenexFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::render::render(&self.to_formula()))
    }
}

/// Standard left-to-right prenex transformation. Binders are renamed only
/// when their name collides with something already in scope, so an
/// already-prenex formula comes back unchanged.
pub fn to_prenex(f: &Formula) -> PrenexFormula {
    let f = f.rename_apart();
    let mut taken: BTreeSet<Var> = f.all_vars();
    let mut prefix = Vec::new();
    let matrix = pull(&f, false, &mut prefix, &mut taken);
    PrenexFormula { prefix, matrix }
}

fn pull(
    f: &Formula,
    negated: bool,
    prefix: &mut Vec<(Quant, Var)>,
    taken: &mut BTreeSet<Var>,
) -> Formula {
    match f {
        Formula::Atom(_) | Formula::True | Formula::False => {
            if negated {
                Formula::not(f.clone())
            } else {
                f.clone()
            }
        }
        Formula::Not(a) => pull(a, !negated, prefix, taken),
        Formula::And(a, b) | Formula::Or(a, b) => {
            let make_and = matches!(f, Formula::And(..)) != negated;
            let ga = pull(a, negated, prefix, taken);
            let gb = pull(b, negated, prefix, taken);
            if make_and {
                Formula::and(ga, gb)
            } else {
                Formula::or(ga, gb)
            }
        }
        Formula::Exists(v, a) | Formula::Forall(v, a) => {
            let mut q = if matches!(f, Formula::Exists(..)) {
                Quant::Exists
            } else {
                Quant::Forall
            };
            if negated {
                q = q.flip();
            }
            let already = prefix.iter().any(|(_, u)| u == v);
            let (v_fresh, body) = if already {
                let fresh = Var::fresh(v.name(), taken);
                (fresh.clone(), a.rename_free(v, &fresh))
            } else {
                (v.clone(), (**a).clone())
            };
            taken.insert(v_fresh.clone());
            prefix.push((q, v_fresh));
            pull(&body, negated, prefix, taken)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{eval_qf, Assignment};
    use crate::term::Term;
    use num_bigint::BigInt;

    fn v(n: &str) -> Var {
        Var::new(n)
    }

    #[test]
    fn already_prenex_unchanged() {
        let f = Formula::exists(
            v("x"),
            Formula::forall(
                v("y"),
                Formula::less(Term::var(v("x")).add(&Term::var(v("y")))),
            ),
        );
        let p = to_prenex(&f);
        assert_eq!(p.to_formula(), f);
    }

    #[test]
    fn negation_flips_quantifiers() {
        let f = Formula::not(Formula::exists(v("x"), Formula::less(Term::var(v("x")))));
        let p = to_prenex(&f);
        assert_eq!(p.prefix, vec![(Quant::Forall, v("x"))]);
        assert_eq!(p.matrix, Formula::not(Formula::less(Term::var(v("x")))));
    }

    #[test]
    fn conjunction_pulls_with_renaming() {
        // (exists x. x < y) && (x < 0): the free x on the right must survive.
        let left = Formula::exists(v("x"), Formula::lt(&Term::var(v("x")), &Term::var(v("y"))));
        let right = Formula::less(Term::var(v("x")));
        let f = Formula::and(left, right);
        let p = to_prenex(&f);
        assert_eq!(p.prefix.len(), 1);
        let bound = &p.prefix[0].1;
        assert_ne!(bound, &v("x"), "bound variable must be renamed apart");
        // spot-check equivalence on assignments to the free variables
        for (xv, yv) in [(0i64, 5i64), (3, -1), (-2, -2), (1, 2)] {
            let mut nu = Assignment::new();
            nu.insert(v("x"), BigInt::from(xv));
            nu.insert(v("y"), BigInt::from(yv));
            // exists witness in a small box
            let lhs = (-8..=8).any(|w| {
                let mut nu2 = nu.clone();
                nu2.insert(bound.clone(), BigInt::from(w));
                eval_qf(&p.matrix, &nu2)
            });
            let rhs = (-8..=8).any(|w| {
                let mut nu2 = nu.clone();
                nu2.insert(v("x"), BigInt::from(w));
                eval_qf(&Formula::lt(&Term::var(v("x")), &Term::var(v("y"))), &nu2)
            }) && eval_qf(&Formula::less(Term::var(v("x"))), &nu);
            assert_eq!(lhs, rhs, "x={xv} y={yv}");
        }
    }
}
