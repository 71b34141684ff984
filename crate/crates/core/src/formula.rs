//! Atoms, formulas and the traversals everything else is built on.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use crate::term::{Term, Var};

/// Atomic formulas. Inequalities are kept in the canonical `t < 0` form and
/// divisibility constraints as `q | t` with `q >= 1`.
///
/// `Pow2(t)` is the powers-of-two predicate of the predicate dialect; it is
/// eliminated by translation before any quantifier manipulation runs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Less(Term),
    Div(BigInt, Term),
    Pow2(Term),
}

impl Atom {
    pub fn term(&self) -> &Term {
        match self {
            Atom::Less(t) | Atom::Div(_, t) | Atom::Pow2(t) => t,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Less(t) => write!(f, "{t} < 0"),
            Atom::Div(q, t) => write!(f, "{q} | {t}"),
            Atom::Pow2(t) => write!(f, "P({t})"),
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    True,
    False,
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Exists(Var, Arc<Formula>),
    Forall(Var, Arc<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn less(t: Term) -> Formula {
        Formula::Atom(Atom::Less(t))
    }

    pub fn div(q: BigInt, t: Term) -> Formula {
        assert!(q >= BigInt::one(), "divisibility modulus must be positive");
        Formula::Atom(Atom::Div(q, t))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn exists(v: Var, f: Formula) -> Formula {
        Formula::Exists(v, Arc::new(f))
    }

    pub fn forall(v: Var, f: Formula) -> Formula {
        Formula::Forall(v, Arc::new(f))
    }

    /// Conjunction of a list; `true` when empty. Built as a balanced tree so
    /// recursion depth stays logarithmic in the number of conjuncts.
    pub fn and_all(fs: Vec<Formula>) -> Formula {
        balanced(fs, Formula::True, Formula::and)
    }

    /// Disjunction of a list; `false` when empty. Balanced like [`and_all`].
    ///
    /// [`and_all`]: Formula::and_all
    pub fn or_all(fs: Vec<Formula>) -> Formula {
        balanced(fs, Formula::False, Formula::or)
    }

    /// `t1 < t2` in canonical form.
    pub fn lt(t1: &Term, t2: &Term) -> Formula {
        Formula::less(t1.sub(t2))
    }

    /// `t1 <= t2`, encoded as the negation of the reversed strict inequality
    /// so that comparisons between power terms keep their shape.
    pub fn le(t1: &Term, t2: &Term) -> Formula {
        Formula::not(Formula::lt(t2, t1))
    }

    /// `t1 = t2` as `!(t1 < t2) && !(t2 < t1)`.
    pub fn eq(t1: &Term, t2: &Term) -> Formula {
        Formula::and(
            Formula::not(Formula::lt(t1, t2)),
            Formula::not(Formula::lt(t2, t1)),
        )
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::True | Formula::False => true,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    pub fn for_each_atom<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Formula::Atom(a) => f(a),
            Formula::True | Formula::False => {}
            Formula::Not(a) => a.for_each_atom(f),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
            Formula::Exists(_, a) | Formula::Forall(_, a) => a.for_each_atom(f),
        }
    }

    /// Rebuilds the formula with each atom optionally replaced by a formula.
    /// `None` keeps the atom unchanged. Untouched subtrees are shared with
    /// the input rather than copied.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Option<Formula>) -> Formula {
        fn go(node: &Arc<Formula>, f: &mut impl FnMut(&Atom) -> Option<Formula>) -> Arc<Formula> {
            match &**node {
                Formula::Atom(a) => match f(a) {
                    Some(new) => Arc::new(new),
                    None => node.clone(),
                },
                Formula::True | Formula::False => node.clone(),
                Formula::Not(a) => {
                    let na = go(a, f);
                    if Arc::ptr_eq(&na, a) {
                        node.clone()
                    } else {
                        Arc::new(Formula::Not(na))
                    }
                }
                Formula::And(a, b) | Formula::Or(a, b) => {
                    let na = go(a, f);
                    let nb = go(b, f);
                    if Arc::ptr_eq(&na, a) && Arc::ptr_eq(&nb, b) {
                        node.clone()
                    } else if matches!(&**node, Formula::And(..)) {
                        Arc::new(Formula::And(na, nb))
                    } else {
                        Arc::new(Formula::Or(na, nb))
                    }
                }
                Formula::Exists(v, a) | Formula::Forall(v, a) => {
                    let na = go(a, f);
                    if Arc::ptr_eq(&na, a) {
                        node.clone()
                    } else if matches!(&**node, Formula::Exists(..)) {
                        Arc::new(Formula::Exists(v.clone(), na))
                    } else {
                        Arc::new(Formula::Forall(v.clone(), na))
                    }
                }
            }
        }
        match self {
            Formula::Atom(a) => f(a).unwrap_or_else(|| self.clone()),
            Formula::True | Formula::False => self.clone(),
            Formula::Not(a) => {
                let na = go(a, f);
                if Arc::ptr_eq(&na, a) {
                    self.clone()
                } else {
                    Formula::Not(na)
                }
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                let na = go(a, f);
                let nb = go(b, f);
                if Arc::ptr_eq(&na, a) && Arc::ptr_eq(&nb, b) {
                    self.clone()
                } else if matches!(self, Formula::And(..)) {
                    Formula::And(na, nb)
                } else {
                    Formula::Or(na, nb)
                }
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                let na = go(a, f);
                if Arc::ptr_eq(&na, a) {
                    self.clone()
                } else if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(v.clone(), na)
                } else {
                    Formula::Forall(v.clone(), na)
                }
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        fn go(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
            match f {
                Formula::Atom(a) => {
                    for v in a.term().vars() {
                        if !bound.contains(&v) {
                            out.insert(v);
                        }
                    }
                }
                Formula::True | Formula::False => {}
                Formula::Not(a) => go(a, bound, out),
                Formula::And(a, b) | Formula::Or(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Exists(v, a) | Formula::Forall(v, a) => {
                    bound.push(v.clone());
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Every variable mentioned anywhere, free or bound.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.for_each_atom(&mut |a| out.extend(a.term().vars()));
        fn binders(f: &Formula, out: &mut BTreeSet<Var>) {
            match f {
                Formula::Not(a) => binders(a, out),
                Formula::And(a, b) | Formula::Or(a, b) => {
                    binders(a, out);
                    binders(b, out);
                }
                Formula::Exists(v, a) | Formula::Forall(v, a) => {
                    out.insert(v.clone());
                    binders(a, out);
                }
                _ => {}
            }
        }
        binders(self, &mut out);
        out
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        let mut found = false;
        self.for_each_atom(&mut |a| {
            if !found && a.term().contains_var(v) {
                found = true;
            }
        });
        found
    }

    /// True when `v` occurs somewhere under a power.
    pub fn power_occurs(&self, v: &Var) -> bool {
        let mut found = false;
        self.for_each_atom(&mut |a| {
            if !found && a.term().has_power_of(v) {
                found = true;
            }
        });
        found
    }

    /// True when `v` occurs and every occurrence is linear (plain or under an
    /// absolute value), never inside a power.
    pub fn occurs_only_linearly(&self, v: &Var) -> bool {
        self.contains_var(v) && !self.power_occurs(v)
    }

    pub fn has_pow2_atoms(&self) -> bool {
        let mut found = false;
        self.for_each_atom(&mut |a| {
            if matches!(a, Atom::Pow2(_)) {
                found = true;
            }
        });
        found
    }

    /// Renames free occurrences of `from` to `to`, leaving bound occurrences
    /// alone.
    pub fn rename_free(&self, from: &Var, to: &Var) -> Formula {
        match self {
            Formula::Atom(a) => {
                let a = match a {
                    Atom::Less(t) => Atom::Less(t.rename_var(from, to)),
                    Atom::Div(q, t) => Atom::Div(q.clone(), t.rename_var(from, to)),
                    Atom::Pow2(t) => Atom::Pow2(t.rename_var(from, to)),
                };
                Formula::Atom(a)
            }
            Formula::True | Formula::False => self.clone(),
            Formula::Not(a) => Formula::not(a.rename_free(from, to)),
            Formula::And(a, b) => Formula::and(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Or(a, b) => Formula::or(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Exists(v, a) if v == from => Formula::Exists(v.clone(), a.clone()),
            Formula::Forall(v, a) if v == from => Formula::Forall(v.clone(), a.clone()),
            Formula::Exists(v, a) => Formula::exists(v.clone(), a.rename_free(from, to)),
            Formula::Forall(v, a) => Formula::forall(v.clone(), a.rename_free(from, to)),
        }
    }

    /// Makes all binders pairwise distinct and distinct from free variables.
    pub fn rename_apart(&self) -> Formula {
        fn go(f: &Formula, taken: &mut BTreeSet<Var>) -> Formula {
            match f {
                Formula::Atom(_) | Formula::True | Formula::False => f.clone(),
                Formula::Not(a) => Formula::not(go(a, taken)),
                Formula::And(a, b) => {
                    let a = go(a, taken);
                    let b = go(b, taken);
                    Formula::and(a, b)
                }
                Formula::Or(a, b) => {
                    let a = go(a, taken);
                    let b = go(b, taken);
                    Formula::or(a, b)
                }
                Formula::Exists(v, a) | Formula::Forall(v, a) => {
                    let (v2, body) = if taken.contains(v) {
                        let v2 = Var::fresh(v.name(), taken);
                        (v2.clone(), a.rename_free(v, &v2))
                    } else {
                        (v.clone(), (**a).clone())
                    };
                    taken.insert(v2.clone());
                    let body = go(&body, taken);
                    if matches!(f, Formula::Exists(..)) {
                        Formula::exists(v2, body)
                    } else {
                        Formula::forall(v2, body)
                    }
                }
            }
        }
        let mut taken = self.free_vars();
        go(self, &mut taken)
    }

    /// True when some term in the formula still carries a lambda component.
    pub fn has_lambdas(&self) -> bool {
        let mut found = false;
        self.for_each_atom(&mut |a| {
            if a.term().has_lambdas() {
                found = true;
            }
        });
        found
    }
}

fn balanced(
    mut fs: Vec<Formula>,
    empty: Formula,
    join: fn(Formula, Formula) -> Formula,
) -> Formula {
    match fs.len() {
        0 => empty,
        1 => fs.pop().unwrap(),
        n => {
            let right = fs.split_off(n / 2);
            join(
                balanced(fs, empty.clone(), join),
                balanced(right, empty, join),
            )
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::render::render(self))
    }
}

/// How a variable shows up across a formula.
#[derive(Clone, Copy, Default, PartialEq, Eq, Debug)]
pub struct VarRoles {
    pub linear: bool,
    pub abs: bool,
    pub power: bool,
}

impl VarRoles {
    pub fn linear_side(&self) -> bool {
        self.linear || self.abs
    }
}

pub fn var_roles(f: &Formula) -> std::collections::BTreeMap<Var, VarRoles> {
    let mut out: std::collections::BTreeMap<Var, VarRoles> = Default::default();
    f.for_each_atom(&mut |a| {
        let t = a.term();
        for (v, _) in t.powers() {
            out.entry(v.clone()).or_default().power = true;
        }
        for (v, _) in t.linears() {
            out.entry(v.clone()).or_default().linear = true;
        }
        for (v, _) in t.abses() {
            out.entry(v.clone()).or_default().abs = true;
        }
        for (s, _) in t.lambdas() {
            for v in s.vars() {
                out.entry(v).or_default().linear = true;
            }
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Var {
        Var::new(n)
    }

    #[test]
    fn free_and_bound() {
        let f = Formula::exists(
            v("x"),
            Formula::less(Term::var(v("x")).add(&Term::var(v("y")))),
        );
        assert!(f.free_vars().contains(&v("y")));
        assert!(!f.free_vars().contains(&v("x")));
        assert!(f.all_vars().contains(&v("x")));
    }

    #[test]
    fn rename_apart_fixes_shadowing() {
        let inner = Formula::exists(v("x"), Formula::less(Term::var(v("x"))));
        let outer = Formula::exists(
            v("x"),
            Formula::and(Formula::less(Term::var(v("x"))), inner),
        );
        let fixed = outer.rename_apart();
        fn binder_names(f: &Formula, out: &mut Vec<String>) {
            match f {
                Formula::Exists(v, a) | Formula::Forall(v, a) => {
                    out.push(v.name().to_string());
                    binder_names(a, out);
                }
                Formula::Not(a) => binder_names(a, out),
                Formula::And(a, b) | Formula::Or(a, b) => {
                    binder_names(a, out);
                    binder_names(b, out);
                }
                _ => {}
            }
        }
        let mut names = Vec::new();
        binder_names(&fixed, &mut names);
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 2, "binders must be distinct: {names:?}");
    }

    #[test]
    fn roles_are_tracked() {
        let f = Formula::less(Term::pow(v("x")).add(&Term::var(v("y"))));
        let roles = var_roles(&f);
        assert!(roles[&v("x")].power && !roles[&v("x")].linear_side());
        assert!(roles[&v("y")].linear_side());
    }
}
