//! Formula normalization.
//!
//! The rewrites applied here, in order, per atom:
//!
//! * ground comparisons and divisibilities evaluate to `true`/`false`,
//!   including `1 | t` and `q | 0`;
//! * divisibility constraints reduce every coefficient and the constant
//!   modulo the divisor; a lone variable slot with coefficient `q - 1` is
//!   negated so the slot carries coefficient `1`;
//! * `a*x < b` with a single linear (or absolute-value) variable and
//!   `|a| >= 2` becomes `x <= floor((b-1)/a)` or `x >= ceil((b-1)/a)`;
//! * inequalities over power terms only, where all power coefficients share
//!   a sign and the constant agrees, evaluate to `true`/`false` since
//!   `2^|x| >= 1` always.
//!
//! Boolean constants are propagated and double negations removed. The whole
//! pass is idempotent.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::formula::{Atom, Formula};
use crate::term::Term;

pub fn normalize(f: &Formula) -> Formula {
    let root = Arc::new(f.clone());
    walk(&root, false, true).as_ref().clone()
}

/// Re-folds Boolean structure and re-checks conjunction ranges without
/// touching atoms. Callers guarantee every atom is already in normal form
/// (the output of [`normalize`] or [`normalize_atom`]).
pub fn refold(f: &Formula) -> Formula {
    let root = Arc::new(f.clone());
    walk(&root, false, false).as_ref().clone()
}

fn walk(node: &Arc<Formula>, under_and: bool, renorm_atoms: bool) -> Arc<Formula> {
    match &**node {
        Formula::Atom(a) => {
            if !renorm_atoms {
                return node.clone();
            }
            let g = normalize_atom(a);
            if g == **node {
                node.clone()
            } else {
                Arc::new(g)
            }
        }
        Formula::True | Formula::False => node.clone(),
        Formula::Not(a) => {
            let na = walk(a, false, renorm_atoms);
            match &*na {
                Formula::True => Arc::new(Formula::False),
                Formula::False => Arc::new(Formula::True),
                Formula::Not(inner) => inner.clone(),
                // Small negated disjunctions of plain bounds become
                // conjunctions of negations, where the range machinery can
                // see the bounds. Larger structures stay as they are.
                Formula::Or(p, q) if bounds_only(&na, 24) > 0 => {
                    let pushed = Formula::and(
                        Formula::not(p.as_ref().clone()),
                        Formula::not(q.as_ref().clone()),
                    );
                    walk(&Arc::new(pushed), under_and, false)
                }
                _ => {
                    if Arc::ptr_eq(&na, a) {
                        node.clone()
                    } else {
                        Arc::new(Formula::Not(na))
                    }
                }
            }
        }
        Formula::And(a, b) => {
            let na = walk(a, true, renorm_atoms);
            let nb = walk(b, true, renorm_atoms);
            let joined = match (&*na, &*nb) {
                (Formula::False, _) | (_, Formula::False) => Arc::new(Formula::False),
                (Formula::True, _) => nb.clone(),
                (_, Formula::True) => na.clone(),
                _ => {
                    if Arc::ptr_eq(&na, a) && Arc::ptr_eq(&nb, b) {
                        node.clone()
                    } else {
                        Arc::new(Formula::And(na, nb))
                    }
                }
            };
            // At the root of a maximal conjunction, collapse it when the
            // value ranges its atoms impose on some variable or power term
            // turn out empty, and drop bound atoms implied by tighter ones.
            if !under_and && matches!(&*joined, Formula::And(..)) {
                compress_conjunction(&joined).unwrap_or(joined)
            } else {
                joined
            }
        }
        Formula::Or(a, b) => {
            let na = walk(a, false, renorm_atoms);
            let nb = walk(b, false, renorm_atoms);
            match (&*na, &*nb) {
                (Formula::True, _) | (_, Formula::True) => Arc::new(Formula::True),
                (Formula::False, _) => nb.clone(),
                (_, Formula::False) => na.clone(),
                _ => {
                    if Arc::ptr_eq(&na, a) && Arc::ptr_eq(&nb, b) {
                        node.clone()
                    } else {
                        Arc::new(Formula::Or(na, nb))
                    }
                }
            }
        }
        Formula::Exists(v, a) | Formula::Forall(v, a) => {
            let na = walk(a, false, renorm_atoms);
            match &*na {
                Formula::True => Arc::new(Formula::True),
                Formula::False => Arc::new(Formula::False),
                _ => {
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
    }
}

/// Inclusive integer range with open ends.
#[derive(Clone, Default)]
struct Range {
    lo: Option<BigInt>,
    hi: Option<BigInt>,
}

impl Range {
    fn clamp_lo(&mut self, v: BigInt) {
        if self.lo.as_ref().map(|cur| v > *cur).unwrap_or(true) {
            self.lo = Some(v);
        }
    }

    fn clamp_hi(&mut self, v: BigInt) {
        if self.hi.as_ref().map(|cur| v < *cur).unwrap_or(true) {
            self.hi = Some(v);
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Subject {
    Power(crate::term::Var),
    Linear(crate::term::Var),
    Abs(crate::term::Var),
}

/// Value ranges a conjunction imposes on variables and power terms through
/// its single-slot inequalities.
#[derive(Clone, Default)]
pub struct ConjRanges {
    map: std::collections::BTreeMap<Subject, Range>,
}

impl ConjRanges {
    fn absorb(&mut self, f: &Formula) {
        self.absorb_filtered(f, &|_| false);
    }

    fn absorb_filtered(&mut self, f: &Formula, skip: &dyn Fn(&Atom) -> bool) {
        let mut stack = vec![f];
        while let Some(g) = stack.pop() {
            let (atom, negated) = match g {
                Formula::And(a, b) => {
                    stack.push(a);
                    stack.push(b);
                    continue;
                }
                Formula::Atom(a) => (a, false),
                Formula::Not(inner) => match &**inner {
                    Formula::Atom(a) => (a, true),
                    _ => continue,
                },
                _ => continue,
            };
            if skip(atom) {
                continue;
            }
            let Some((subject, is_lower, bound)) = slot_bound(atom, negated) else {
                continue;
            };
            let range = self.map.entry(subject).or_default();
            if is_lower {
                range.clamp_lo(bound);
            } else {
                range.clamp_hi(bound);
            }
        }
    }

    fn any_empty(&self) -> bool {
        self.map.iter().any(|(subject, range)| {
            let lo = match subject {
                Subject::Linear(_) => range.lo.clone(),
                Subject::Abs(_) => Some(range.lo.clone().unwrap_or_default().max(BigInt::zero())),
                Subject::Power(_) => Some(range.lo.clone().unwrap_or_default().max(BigInt::one())),
            };
            let (Some(lo), Some(hi)) = (lo, range.hi.clone()) else {
                return false;
            };
            if hi < lo {
                return true;
            }
            if let Subject::Power(_) = subject {
                // the range must contain a power of two
                let next_pow =
                    BigInt::one() << (lo.bits() - if lo.is_power_of_2() { 1 } else { 0 });
                return next_pow > hi;
            }
            false
        })
    }
}

/// Remaining budget when the subtree consists solely of single-slot bound
/// atoms under Boolean structure, or 0 when it does not (or is too large).
fn bounds_only(node: &Arc<Formula>, budget: usize) -> usize {
    if budget == 0 {
        return 0;
    }
    match &**node {
        Formula::Atom(a) => {
            if slot_bound(a, false).is_some() {
                budget - 1
            } else {
                0
            }
        }
        Formula::True | Formula::False => budget - 1,
        Formula::Not(a) => bounds_only(a, budget - 1),
        Formula::And(a, b) | Formula::Or(a, b) => {
            let left = bounds_only(a, budget - 1);
            if left == 0 {
                0
            } else {
                bounds_only(b, left)
            }
        }
        Formula::Exists(..) | Formula::Forall(..) => 0,
    }
}

/// The bound a single-slot inequality (or its negation) imposes: the
/// subject, whether it is a lower bound, and the inclusive bound value.
fn slot_bound(atom: &Atom, negated: bool) -> Option<(Subject, bool, BigInt)> {
    let Atom::Less(t) = atom else { return None };
    if t.has_lambdas() {
        return None;
    }
    let mut slots = t
        .powers()
        .map(|(v, c)| (Subject::Power(v.clone()), c))
        .chain(t.linears().map(|(v, c)| (Subject::Linear(v.clone()), c)))
        .chain(t.abses().map(|(v, c)| (Subject::Abs(v.clone()), c)));
    let (subject, a) = slots.next()?;
    if slots.next().is_some() {
        return None;
    }
    let a = a.clone();
    let b = -t.constant(); // a*s < b, or a*s >= b when negated
    Some(if !negated {
        if a.is_positive() {
            (subject, false, (&b - 1u8).div_floor(&a))
        } else {
            (subject, true, (&b - 1u8).div_ceil(&a))
        }
    } else if a.is_positive() {
        (subject, true, b.div_ceil(&a))
    } else {
        (subject, false, b.div_floor(&a))
    })
}

/// Precomputes the ranges of a conjunction so repeated contradiction checks
/// against varying extensions stay cheap.
pub fn conj_ranges(f: &Formula) -> ConjRanges {
    let mut r = ConjRanges::default();
    r.absorb(f);
    r
}

/// Like [`conj_ranges`], but ignores atoms that mention `x`. Used when the
/// conjunction is about to have `x` substituted away.
pub fn conj_ranges_without_var(f: &Formula, x: &crate::term::Var) -> ConjRanges {
    let mut r = ConjRanges::default();
    r.absorb_filtered(f, &|atom: &Atom| atom.term().contains_var(x));
    r
}

/// True when extending the base conjunction with `extra` empties some range.
pub fn ranges_contradictory(base: &ConjRanges, extra: &Formula) -> bool {
    let mut r = base.clone();
    r.absorb(extra);
    r.any_empty()
}

/// Rewrites a maximal conjunction: `false` when the value ranges its
/// single-slot inequalities impose turn out empty, otherwise with the bound
/// atoms that are implied by tighter siblings dropped. `None` means no
/// change.
fn compress_conjunction(node: &Arc<Formula>) -> Option<Arc<Formula>> {
    fn flat(n: &Arc<Formula>, out: &mut Vec<Arc<Formula>>) {
        match &**n {
            Formula::And(a, b) => {
                flat(a, out);
                flat(b, out);
            }
            _ => out.push(n.clone()),
        }
    }
    let mut leaves: Vec<Arc<Formula>> = Vec::new();
    flat(node, &mut leaves);
    let mut ranges = ConjRanges::default();
    for l in &leaves {
        ranges.absorb(l);
    }
    if ranges.any_empty() {
        return Some(Arc::new(Formula::False));
    }
    let mut kept: Vec<Arc<Formula>> = Vec::with_capacity(leaves.len());
    let mut covered: std::collections::BTreeSet<(Subject, bool)> = Default::default();
    for l in &leaves {
        let pair = match &**l {
            Formula::Atom(a) => Some((a, false)),
            Formula::Not(inner) => match &**inner {
                Formula::Atom(a) => Some((a, true)),
                _ => None,
            },
            _ => None,
        };
        let Some((atom, negated)) = pair else {
            kept.push(l.clone());
            continue;
        };
        let Some((subject, is_lower, bound)) = slot_bound(atom, negated) else {
            kept.push(l.clone());
            continue;
        };
        let range = &ranges.map[&subject];
        let tight = if is_lower {
            range.lo.as_ref() == Some(&bound)
        } else {
            range.hi.as_ref() == Some(&bound)
        };
        if tight && covered.insert((subject, is_lower)) {
            kept.push(l.clone());
        }
    }
    if kept.len() == leaves.len() {
        return None;
    }
    let forms: Vec<Formula> = kept.iter().map(|a| a.as_ref().clone()).collect();
    Some(Arc::new(Formula::and_all(forms)))
}

trait PowerOfTwo {
    fn is_power_of_2(&self) -> bool;
}

impl PowerOfTwo for BigInt {
    fn is_power_of_2(&self) -> bool {
        is_power_of_two(self)
    }
}

pub fn normalize_atom(a: &Atom) -> Formula {
    match a {
        Atom::Less(t) => normalize_less(t),
        Atom::Div(q, t) => normalize_div(q, t),
        Atom::Pow2(t) => {
            if t.is_ground() {
                let v = t.constant().clone();
                if v >= BigInt::one() && is_power_of_two(&v) {
                    Formula::True
                } else {
                    Formula::False
                }
            } else {
                Formula::Atom(a.clone())
            }
        }
    }
}

fn normalize_less(t: &Term) -> Formula {
    if t.is_ground() {
        return if t.constant().is_negative() {
            Formula::True
        } else {
            Formula::False
        };
    }
    if !t.has_lambdas() {
        let n_lin = t.linears().count();
        let n_abs = t.abses().count();
        let n_pow = t.powers().count();
        // Sign-trivial inequalities: powers are at least one and absolute
        // values at least zero, which often decides the atom outright.
        if n_lin == 0 && n_pow + n_abs > 0 {
            let pos = t.powers().chain(t.abses()).all(|(_, c)| c.is_positive());
            let neg = t.powers().chain(t.abses()).all(|(_, c)| c.is_negative());
            if pos && !t.constant().is_negative() {
                return Formula::False;
            }
            if neg && (t.constant().is_negative() || (!t.constant().is_positive() && n_pow > 0)) {
                return Formula::True;
            }
        }
        // Power comparisons tighten to unit coefficients and power-of-two
        // thresholds: since 2^|x| only takes power values,
        // a*2^|x| < b is 2^|x| < 2^ceil(log2(b/a)) for positive a, b, and
        // the mirrored rewrite applies when both are negative. The same
        // argument on the quotient of two powers handles a*2^|x| < b*2^|y|.
        if n_lin == 0 && n_abs == 0 && n_pow == 1 {
            let (x, a) = t.powers().next().unwrap();
            let b = -t.constant();
            if a.is_positive() && b.is_positive() {
                if !(a.is_one() && is_power_of_two(&b) && b > BigInt::one()) {
                    let e = crate::numtheory::ceil_log2_ratio(&b, a);
                    if e <= 0 {
                        return Formula::False;
                    }
                    let mut s = Term::pow(x.clone());
                    s.add_constant(&-(BigInt::one() << (e as u64)));
                    return Formula::less(s);
                }
            } else if a.is_negative() && b.is_negative() {
                let e = crate::numtheory::floor_log2_ratio(&b.abs(), &a.abs()) + 1;
                // 2^|x| > |b|/|a|  <=>  !(2^|x| < 2^e)
                let threshold = if e <= 0 {
                    BigInt::one()
                } else {
                    BigInt::one() << (e as u64)
                };
                let mut s = Term::pow(x.clone());
                s.add_constant(&-threshold);
                let inner = normalize_less(&s);
                return match inner {
                    Formula::True => Formula::False,
                    Formula::False => Formula::True,
                    g => Formula::not(g),
                };
            }
        }
        if n_lin == 0 && n_abs == 0 && n_pow == 2 && t.constant().is_zero() {
            let mut it = t.powers();
            let (u, cu) = it.next().unwrap();
            let (v, cv) = it.next().unwrap();
            // Mixed signs are guaranteed here; orient as a*2^|x| < b*2^|y|
            // with a, b positive.
            let (x, a, y, b) = if cu.is_positive() {
                (u.clone(), cu.clone(), v.clone(), -cv.clone())
            } else {
                (v.clone(), cv.clone(), u.clone(), -cu.clone())
            };
            debug_assert!(a.is_positive() && b.is_positive());
            if !(a.is_one() && is_power_of_two(&b)) {
                let e = crate::numtheory::ceil_log2_ratio(&b, &a);
                if e >= 0 {
                    let mut s = Term::pow(x);
                    s.add_power(y, -(BigInt::one() << (e as u64)));
                    return Formula::less(s);
                }
                // 2^|x| < 2^e * 2^|y| with e < 0: scale the left side instead
                let mut s = Term::pow(x).scale(&(BigInt::one() << ((-e) as u64)));
                s.add_power(y, BigInt::from(-1));
                return Formula::less(s);
            }
        }
        // a*x + c < 0 with |a| >= 2 tightens to a unit coefficient.
        if n_pow == 0 && n_lin + n_abs == 1 {
            let (slot, a) = if n_lin == 1 {
                let (v, a) = t.linears().next().unwrap();
                (Term::var(v.clone()), a.clone())
            } else {
                let (v, a) = t.abses().next().unwrap();
                (Term::abs(v.clone()), a.clone())
            };
            if a.abs() >= BigInt::from(2) {
                let b = -t.constant(); // a*x < b
                let shifted: BigInt = &b - 1u8;
                return if a.is_positive() {
                    // x <= floor((b-1)/a)
                    let k = shifted.div_floor(&a);
                    Formula::less(slot.sub(&Term::int(k + 1)))
                } else {
                    // x >= ceil((b-1)/a)
                    let k = shifted.div_ceil(&a);
                    Formula::less(Term::int(k - 1).sub(&slot))
                };
            }
        }
    }
    Formula::less(t.clone())
}

fn normalize_div(q: &BigInt, t: &Term) -> Formula {
    assert!(q.is_positive(), "divisibility modulus must be positive");
    if q.is_one() {
        return Formula::True;
    }
    // Reduce every coefficient and the constant into [0, q).
    let mut reduced = Term::int(t.constant().mod_floor(q));
    for (v, c) in t.powers() {
        reduced.add_power(v.clone(), c.mod_floor(q));
    }
    for (v, c) in t.linears() {
        reduced.add_linear(v.clone(), c.mod_floor(q));
    }
    for (v, c) in t.abses() {
        reduced.add_abs(v.clone(), c.mod_floor(q));
    }
    for (s, c) in t.lambdas() {
        reduced.add_lambda(s.clone(), c.mod_floor(q));
    }
    if reduced.is_ground() {
        return if reduced.constant().mod_floor(q).is_zero() {
            Formula::True
        } else {
            Formula::False
        };
    }
    // A single variable slot with coefficient q-1 is a negated unit slot;
    // multiplying the constraint by -1 turns it into the canonical
    // `q | slot - r` shape.
    let slots = reduced.powers().count() + reduced.linears().count() + reduced.abses().count();
    let lone_coeff = if slots == 1 && !reduced.has_lambdas() {
        reduced
            .powers()
            .chain(reduced.linears())
            .chain(reduced.abses())
            .next()
            .map(|(_, c)| c.clone())
    } else {
        None
    };
    if let Some(c) = lone_coeff {
        if c == q - 1 && c >= BigInt::from(2) {
            let negated = reduced.neg();
            return normalize_div(q, &negated);
        }
    }
    Formula::div(q.clone(), reduced)
}

/// Merges disjuncts that are pure interval constraints on one variable or
/// power term into their interval union, leaving all other members alone.
/// Returns `[true]` when some union covers the whole domain.
pub fn compress_interval_disjuncts(members: Vec<Formula>) -> Vec<Formula> {
    let mut rest: Vec<Formula> = Vec::new();
    let mut by_subject: std::collections::BTreeMap<Subject, Vec<Range>> = Default::default();
    for m in members {
        match pure_interval(&m) {
            Some((s, r)) => by_subject.entry(s).or_default().push(r),
            None => rest.push(m),
        }
    }
    for (subject, mut ranges) in by_subject {
        // Clamp to the subject's domain floor before merging.
        let floor = match &subject {
            Subject::Linear(_) => None,
            Subject::Abs(_) => Some(BigInt::zero()),
            Subject::Power(_) => Some(BigInt::one()),
        };
        for r in &mut ranges {
            if let Some(fl) = &floor {
                if r.lo.as_ref().map(|lo| lo < fl).unwrap_or(true) {
                    r.lo = Some(fl.clone());
                }
            }
        }
        ranges.sort_by(|a, b| match (&a.lo, &b.lo) {
            (None, None) => std::cmp::Ordering::Equal,
            (None, _) => std::cmp::Ordering::Less,
            (_, None) => std::cmp::Ordering::Greater,
            (Some(x), Some(y)) => x.cmp(y),
        });
        let mut merged: Vec<Range> = Vec::new();
        for r in ranges {
            if let Some(last) = merged.last_mut() {
                let touches = match (&last.hi, &r.lo) {
                    (None, _) => true,
                    (Some(hi), Some(lo)) => lo <= &(hi + 1u8),
                    (Some(_), None) => true,
                };
                if touches {
                    last.hi = match (&last.hi, &r.hi) {
                        (None, _) | (_, None) => None,
                        (Some(a), Some(b)) => Some(a.max(b).clone()),
                    };
                    continue;
                }
            }
            merged.push(r);
        }
        for r in merged {
            let term = match &subject {
                Subject::Linear(v) => Term::var(v.clone()),
                Subject::Abs(v) => Term::abs(v.clone()),
                Subject::Power(v) => Term::pow(v.clone()),
            };
            let mut parts: Vec<Formula> = Vec::new();
            if let Some(lo) = &r.lo {
                let skip = match &floor {
                    Some(fl) => lo <= fl,
                    None => false,
                };
                if !skip {
                    parts.push(Formula::not(normalize_atom(&Atom::Less(
                        term.sub(&Term::int(lo.clone())),
                    ))));
                }
            }
            if let Some(hi) = &r.hi {
                parts.push(normalize_atom(&Atom::Less(term.sub(&Term::int(hi + 1u8)))));
            }
            if parts.is_empty() {
                // the union covers the whole domain
                return vec![Formula::True];
            }
            rest.push(Formula::and_all(parts));
        }
    }
    rest
}

/// A member that is a conjunction of bounds on one subject.
fn pure_interval(f: &Formula) -> Option<(Subject, Range)> {
    let mut stack = vec![f];
    let mut subject: Option<Subject> = None;
    let mut range = Range::default();
    while let Some(g) = stack.pop() {
        let (atom, negated) = match g {
            Formula::And(a, b) => {
                stack.push(a);
                stack.push(b);
                continue;
            }
            Formula::Atom(a) => (a, false),
            Formula::Not(inner) => match &**inner {
                Formula::Atom(a) => (a, true),
                _ => return None,
            },
            _ => return None,
        };
        let (s, is_lower, bound) = slot_bound(atom, negated)?;
        match &subject {
            None => subject = Some(s),
            Some(cur) if *cur == s => {}
            _ => return None,
        }
        if is_lower {
            range.clamp_lo(bound);
        } else {
            range.clamp_hi(bound);
        }
    }
    subject.map(|s| (s, range))
}

/// `!f` with the negation pushed through top-level disjunction spines, so a
/// negated cover turns into a conjunction of negated members.
pub fn negate_to_conjuncts(f: &Formula) -> Formula {
    match f {
        Formula::Or(a, b) => Formula::and(negate_to_conjuncts(a), negate_to_conjuncts(b)),
        Formula::Not(inner) => inner.as_ref().clone(),
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        _ => Formula::not(f.clone()),
    }
}

pub fn is_power_of_two(v: &BigInt) -> bool {
    v.is_positive() && (v & (v - 1u8)).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Var;

    fn v(n: &str) -> Var {
        Var::new(n)
    }

    #[test]
    fn ground_comparison() {
        // 3 < 5
        let f = Formula::lt(&Term::int(3), &Term::int(5));
        assert_eq!(normalize(&f), Formula::True);
    }

    #[test]
    fn coefficient_tightening() {
        // 2*x < 7 becomes x <= 3, i.e. x - 4 < 0
        let t = Term::var(v("x")).scale(&BigInt::from(2)).sub(&Term::int(7));
        let expected = Formula::less(Term::var(v("x")).sub(&Term::int(4)));
        assert_eq!(normalize(&Formula::less(t)), expected);
        // -3*x < 5 becomes x >= ceil(4/-3) = -1, i.e. -2 - x < 0
        let t = Term::var(v("x"))
            .scale(&BigInt::from(-3))
            .sub(&Term::int(5));
        let expected = Formula::less(Term::int(-2).sub(&Term::var(v("x"))));
        assert_eq!(normalize(&Formula::less(t)), expected);
    }

    #[test]
    fn sign_trivial_powers() {
        // 2*pow(x) < -1
        let t = Term::pow(v("x")).scale(&BigInt::from(2)).add(&Term::int(1));
        assert_eq!(normalize(&Formula::less(t)), Formula::False);
        // -pow(x) < 3
        let t = Term::pow(v("x")).neg().sub(&Term::int(3));
        assert_eq!(normalize(&Formula::less(t)), Formula::True);
        // 3*pow(x) < 5 is not trivial
        let t = Term::pow(v("x")).scale(&BigInt::from(3)).sub(&Term::int(5));
        assert!(matches!(normalize(&Formula::less(t)), Formula::Atom(_)));
    }

    #[test]
    fn div_reduction_and_units() {
        // 5 | 7x + 12 -> 5 | 2x + 2
        let t = Term::var(v("x"))
            .scale(&BigInt::from(7))
            .add(&Term::int(12));
        let f = normalize(&Formula::div(BigInt::from(5), t));
        match f {
            Formula::Atom(Atom::Div(q, t)) => {
                assert_eq!(q, BigInt::from(5));
                assert_eq!(t.linear_coeff(&v("x")), Some(&BigInt::from(2)));
                assert_eq!(t.constant(), &BigInt::from(2));
            }
            other => panic!("unexpected {other:?}"),
        }
        // 1 | t and q | 0
        assert_eq!(
            normalize(&Formula::div(BigInt::one(), Term::var(v("x")))),
            Formula::True
        );
        assert_eq!(
            normalize(&Formula::div(BigInt::from(9), Term::int(18))),
            Formula::True
        );
        // 5 | -x - 2 -> 5 | x + 2 (unit slot restored)
        let t = Term::var(v("x")).neg().sub(&Term::int(2));
        let f = normalize(&Formula::div(BigInt::from(5), t));
        match f {
            Formula::Atom(Atom::Div(_, t)) => {
                assert_eq!(t.linear_coeff(&v("x")), Some(&BigInt::from(1)));
                assert_eq!(t.constant(), &BigInt::from(2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn boolean_propagation() {
        let f = Formula::and(
            Formula::True,
            Formula::not(Formula::not(Formula::less(Term::var(v("x"))))),
        );
        assert_eq!(normalize(&f), Formula::less(Term::var(v("x"))));
        let g = Formula::exists(v("x"), Formula::lt(&Term::int(0), &Term::int(1)));
        assert_eq!(normalize(&g), Formula::True);
    }

    #[test]
    fn idempotent_on_handpicked() {
        let cases = vec![
            Formula::less(Term::var(v("x")).scale(&BigInt::from(2)).sub(&Term::int(7))),
            Formula::div(
                BigInt::from(6),
                Term::pow(v("x"))
                    .scale(&BigInt::from(11))
                    .add(&Term::int(4)),
            ),
            Formula::eq(&Term::pow(v("x")), &Term::int(8)),
        ];
        for f in cases {
            let once = normalize(&f);
            assert_eq!(once, normalize(&once), "{f:?}");
        }
    }
}
