//! The residue-split cover for non-simple divisibility constraints and the
//! Presburger-style elimination of a linearly occurring variable.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::formula::{Atom, Formula};
use crate::fragment::{all_divs_simple, div_is_simple, Fragment};
use crate::limits::{check_count, Deadline, Limits, SolveError};
use crate::normal::{conj_ranges_without_var, normalize, ranges_contradictory, refold};
use crate::numtheory::lcm_big;
use crate::subst::{scaled_atom_rewrite, scaled_substitute, substitute, Target};
use crate::term::{Term, Var};

/// A finite set of formulas whose disjunction is equivalent to the formula it
/// was produced from.
#[derive(Clone, Debug)]
pub struct CoverSet {
    pub members: Vec<Formula>,
}

/// Variable and power slots a divisibility constraint can mention.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Slot {
    Power(Var),
    Linear(Var),
    Abs(Var),
}

impl Slot {
    fn term(&self) -> Term {
        match self {
            Slot::Power(v) => Term::pow(v.clone()),
            Slot::Linear(v) => Term::var(v.clone()),
            Slot::Abs(v) => Term::abs(v.clone()),
        }
    }
}

/// Splits a formula with non-simple divisibility constraints into a cover in
/// which every divisibility is simple.
///
/// Every assignment of residues modulo `d` (the lcm of the offending
/// divisors) to the variables and powers of the offending constraints yields
/// one member: the residues are asserted through simple constraints
/// `d | slot - r`, and each non-simple divisibility is evaluated to its
/// truth value under the residue map.
pub fn simplify(
    f: &Formula,
    _frag: Fragment,
    limits: &Limits,
    deadline: &Deadline,
) -> Result<CoverSet, SolveError> {
    let mut offending: BTreeSet<(BigInt, Term)> = BTreeSet::new();
    f.for_each_atom(&mut |a| {
        if let Atom::Div(q, t) = a {
            if !div_is_simple(a) {
                offending.insert((q.clone(), t.clone()));
            }
        }
    });
    if offending.is_empty() {
        return Ok(CoverSet {
            members: vec![f.clone()],
        });
    }

    let mut d = BigInt::one();
    let mut slots: BTreeSet<Slot> = BTreeSet::new();
    for (q, t) in &offending {
        assert!(!t.has_lambdas(), "divisibility over a lambda term");
        d = lcm_big(&d, q);
        for (v, _) in t.powers() {
            slots.insert(Slot::Power(v.clone()));
        }
        for (v, _) in t.linears() {
            slots.insert(Slot::Linear(v.clone()));
        }
        for (v, _) in t.abses() {
            slots.insert(Slot::Abs(v.clone()));
        }
    }
    let slots: Vec<Slot> = slots.into_iter().collect();
    let member_count = d.pow(slots.len() as u32);
    check_count(limits, &member_count, "residue split")?;

    let mut members = Vec::new();
    let mut residues: Vec<BigInt> = vec![BigInt::zero(); slots.len()];
    loop {
        deadline.check()?;
        let assignment: BTreeMap<Slot, BigInt> = slots
            .iter()
            .cloned()
            .zip(residues.iter().cloned())
            .collect();
        let mut guards: Vec<Formula> = Vec::new();
        for (slot, r) in &assignment {
            guards.push(Formula::div(
                d.clone(),
                slot.term().sub(&Term::int(r.clone())),
            ));
        }
        let body = f.map_atoms(&mut |a| match a {
            Atom::Div(q, t) if offending.contains(&(q.clone(), t.clone())) => {
                Some(eval_div_under(q, t, &assignment))
            }
            _ => None,
        });
        let member = Formula::and(Formula::and_all(guards), body);
        members.push(normalize(&member));

        // odometer over the residue vector
        let mut i = 0;
        loop {
            if i == residues.len() {
                break;
            }
            residues[i] += 1;
            if residues[i] < d {
                break;
            }
            residues[i] = BigInt::zero();
            i += 1;
        }
        if i == residues.len() {
            break;
        }
    }
    Ok(CoverSet { members })
}

fn eval_div_under(q: &BigInt, t: &Term, residues: &BTreeMap<Slot, BigInt>) -> Formula {
    let mut acc = t.constant().clone();
    for (v, c) in t.powers() {
        acc += c * &residues[&Slot::Power(v.clone())];
    }
    for (v, c) in t.linears() {
        acc += c * &residues[&Slot::Linear(v.clone())];
    }
    for (v, c) in t.abses() {
        acc += c * &residues[&Slot::Abs(v.clone())];
    }
    if acc.mod_floor(q).is_zero() {
        Formula::True
    } else {
        Formula::False
    }
}

/// The candidate substitutions for eliminating `x`: one pair `(a, t)` per
/// homogeneous inequality term `±a*x + ...` of the formula, oriented so that
/// `a` is positive.
pub fn candidate_pairs(f: &Formula, x: &Var) -> Vec<(BigInt, Term)> {
    let mut homterms: BTreeSet<Term> = BTreeSet::new();
    f.for_each_atom(&mut |a| {
        if let Atom::Less(t) = a {
            homterms.insert(t.homogeneous());
        }
    });
    let mut out: BTreeSet<(BigInt, Term)> = BTreeSet::new();
    for h in &homterms {
        let Some(a) = h.linear_coeff(x).cloned() else {
            continue;
        };
        let mut rest = h.clone();
        rest.add_linear(x.clone(), -&a);
        if a.is_positive() {
            out.insert((a, rest.neg()));
        } else {
            out.insert((-a, rest));
        }
    }
    out.into_iter().collect()
}

/// The substitution interval radius for a candidate coefficient `a`.
pub fn radius(f: &Formula, a: &BigInt, product_of_coeffs: &BigInt) -> BigInt {
    let m = crate::metrics::metrics(f);
    a * (BigInt::from(2) * &m.norminf_linterms + product_of_coeffs * &m.fmod)
}

/// Eliminates a variable that occurs only linearly.
///
/// Each candidate `(a, t)` and offset `k` in `[-r, r]` contributes the member
/// `f[(t+k)/a / x] && (a | t+k)`, realized through scaled substitution; the
/// members then pass through [`simplify`] so all divisibility constraints
/// come back simple. Members that normalize to `false` are dropped. When no
/// inequality mentions `x` (so no candidates exist), satisfaction depends on
/// the residue of `x` alone and the cover enumerates residues modulo the
/// formula's divisibility lcm instead.
///
/// The returned pairs keep the input variable vector; `x` simply no longer
/// occurs in the bodies.
pub fn pres_qe(
    x: &Var,
    vars: &[Var],
    f: &Formula,
    frag: Fragment,
    limits: &Limits,
    deadline: &Deadline,
) -> Result<Vec<(Vec<Var>, Formula)>, SolveError> {
    assert!(vars.contains(x), "{x} is not among the block variables");
    assert!(!f.power_occurs(x), "{x} occurs under a power");
    assert!(
        !has_abs_of(f, x),
        "{x} occurs under an absolute value; expand before eliminating"
    );
    assert!(
        all_divs_simple(f),
        "divisibility constraints must be simple"
    );

    assert!(
        !f.has_lambdas(),
        "lambda terms survive in the block formula"
    );

    let mut out: Vec<(Vec<Var>, Formula)> = Vec::new();

    // Solved form: a conjunct pair asserting a*x + t = 0 pins x, so the
    // single guarded substitution already covers the quantifier exactly.
    if let Some((a, t)) = equality_pin(f, x) {
        let guard = normalize(&Formula::div(a.clone(), t.clone()));
        if guard != Formula::False {
            let member = scaled_substitute(f, &Target::Linear(x.clone()), &t, &a);
            let gamma = refold(&Formula::and(member, guard));
            if gamma != Formula::False {
                for m in simplify(&gamma, frag, limits, deadline)?.members {
                    if m != Formula::False {
                        debug_assert!(!m.contains_var(x));
                        out.push((vars.to_vec(), m));
                    }
                }
            }
        }
        return Ok(out);
    }

    let pairs = candidate_pairs(f, x);

    if pairs.is_empty() {
        // x occurs only in simple divisibility constraints.
        let mut seen: BTreeSet<Formula> = BTreeSet::new();
        let fmod = crate::metrics::metrics(f).fmod;
        check_count(limits, &fmod, "residue enumeration")?;
        let mut k = BigInt::zero();
        while k < fmod {
            deadline.check()?;
            let member = substitute(f, &Target::Linear(x.clone()), &Term::int(k.clone()));
            if member != Formula::False && seen.insert(member.clone()) {
                out.push((vars.to_vec(), member));
            }
            k += 1;
        }
        return Ok(out);
    }

    let product: BigInt = pairs.iter().map(|(a, _)| a.clone()).product();
    let mut total = BigInt::zero();
    let radii: Vec<BigInt> = pairs.iter().map(|(a, _)| radius(f, a, &product)).collect();
    for r in &radii {
        total += BigInt::from(2) * r + 1;
    }
    check_count(limits, &total, "substitution candidates")?;

    // Candidates differ only in what they substitute into the atoms that
    // mention x; prepare the formula once and rewrite along those paths.
    let focused = Focused::new(f, x);
    let base_ranges = conj_ranges_without_var(f, x);
    // Two candidates that rewrite every atom identically produce identical
    // members; the rewritten-atom log is the dedup key.
    let mut seen_logs: BTreeSet<(Formula, Vec<Formula>)> = BTreeSet::new();

    for ((a, t), r) in pairs.iter().zip(radii.iter()) {
        let mut k = -r.clone();
        while k <= *r {
            deadline.check()?;
            let shifted = t.add(&Term::int(k.clone()));
            let guard = crate::normal::normalize_atom(&crate::formula::Atom::Div(
                a.clone(),
                shifted.clone(),
            ));
            k += 1;
            if guard == Formula::False {
                continue;
            }
            let mut log: Vec<Formula> = Vec::new();
            let member = focused.rewrite(&mut |atom| {
                let g = scaled_atom_rewrite(atom, x, &shifted, a);
                log.push(g.clone());
                g
            });
            if *member == Formula::False {
                continue;
            }
            if !seen_logs.insert((guard.clone(), log)) {
                continue;
            }
            let gamma = refold(&match (&*member, &guard) {
                (Formula::True, _) => guard.clone(),
                (_, Formula::True) => member.as_ref().clone(),
                _ => Formula::and(member.as_ref().clone(), guard.clone()),
            });
            if gamma == Formula::False || ranges_contradictory(&base_ranges, &gamma) {
                continue;
            }
            for m in simplify(&gamma, frag, limits, deadline)?.members {
                if m != Formula::False {
                    debug_assert!(!m.contains_var(x));
                    out.push((vars.to_vec(), m));
                }
            }
        }
    }
    Ok(out)
}

/// Looks for a top-level conjunct pair `!(u < 0) && !(-u < 0)` pinning
/// `a*x = t` with `a > 0` and `x` not in `t`. Returns `(a, t)` so the
/// quantifier can be resolved by the single substitution `x -> t/a`.
fn equality_pin(f: &Formula, x: &Var) -> Option<(BigInt, Term)> {
    let mut conjuncts: BTreeSet<Term> = BTreeSet::new();
    let mut stack = vec![f];
    while let Some(g) = stack.pop() {
        match g {
            Formula::And(a, b) => {
                stack.push(a);
                stack.push(b);
            }
            Formula::Not(inner) => {
                if let Formula::Atom(Atom::Less(t)) = &**inner {
                    conjuncts.insert(t.clone());
                }
            }
            _ => {}
        }
    }
    for t in &conjuncts {
        let Some(a) = t.linear_coeff(x) else { continue };
        if !conjuncts.contains(&t.neg()) {
            continue;
        }
        // a*x + rest = 0, i.e. |a|*x = -sign(a)*rest
        let mut rest = t.clone();
        rest.add_linear(x.clone(), -a);
        if rest.contains_var(x) {
            continue;
        }
        let (a, rhs) = if a.is_positive() {
            (a.clone(), rest.neg())
        } else {
            (-a.clone(), rest)
        };
        return Some((a, rhs));
    }
    None
}

/// A formula prepared for repeated substitution of one variable: the
/// subtrees that mention the variable are marked by pointer, so each
/// candidate rewrite walks only those paths and shares everything else.
pub(crate) struct Focused {
    root: Arc<Formula>,
    marked: std::collections::HashSet<*const Formula>,
}

impl Focused {
    pub(crate) fn new(f: &Formula, x: &Var) -> Focused {
        let root = Arc::new(f.clone());
        let mut marked = std::collections::HashSet::new();
        mark(&root, x, &mut marked);
        Focused { root, marked }
    }

    /// Applies `rw` to every atom mentioning the focus variable and folds
    /// constants bottom-up along the rewritten paths.
    pub(crate) fn rewrite(&self, rw: &mut dyn FnMut(&Atom) -> Formula) -> Arc<Formula> {
        rewrite_marked(&self.root, &self.marked, rw)
    }
}

fn mark(node: &Arc<Formula>, x: &Var, set: &mut std::collections::HashSet<*const Formula>) -> bool {
    let has = match &**node {
        Formula::Atom(a) => a.term().contains_var(x),
        Formula::True | Formula::False => false,
        Formula::Not(a) => mark(a, x, set),
        Formula::And(a, b) | Formula::Or(a, b) => {
            let l = mark(a, x, set);
            let r = mark(b, x, set);
            l || r
        }
        Formula::Exists(_, a) | Formula::Forall(_, a) => mark(a, x, set),
    };
    if has {
        set.insert(Arc::as_ptr(node));
    }
    has
}

fn rewrite_marked(
    node: &Arc<Formula>,
    set: &std::collections::HashSet<*const Formula>,
    rw: &mut dyn FnMut(&Atom) -> Formula,
) -> Arc<Formula> {
    if !set.contains(&Arc::as_ptr(node)) {
        return node.clone();
    }
    match &**node {
        Formula::Atom(a) => Arc::new(rw(a)),
        Formula::True | Formula::False => node.clone(),
        Formula::Not(a) => {
            let na = rewrite_marked(a, set, rw);
            Arc::new(match &*na {
                Formula::True => Formula::False,
                Formula::False => Formula::True,
                Formula::Not(inner) => inner.as_ref().clone(),
                _ => Formula::Not(na),
            })
        }
        Formula::And(a, b) => {
            let na = rewrite_marked(a, set, rw);
            let nb = rewrite_marked(b, set, rw);
            match (&*na, &*nb) {
                (Formula::False, _) | (_, Formula::False) => Arc::new(Formula::False),
                (Formula::True, _) => nb,
                (_, Formula::True) => na,
                _ => Arc::new(Formula::And(na, nb)),
            }
        }
        Formula::Or(a, b) => {
            let na = rewrite_marked(a, set, rw);
            let nb = rewrite_marked(b, set, rw);
            match (&*na, &*nb) {
                (Formula::True, _) | (_, Formula::True) => Arc::new(Formula::True),
                (Formula::False, _) => nb,
                (_, Formula::False) => na,
                _ => Arc::new(Formula::Or(na, nb)),
            }
        }
        Formula::Exists(v, a) | Formula::Forall(v, a) => {
            let na = rewrite_marked(a, set, rw);
            Arc::new(match &*na {
                Formula::True => Formula::True,
                Formula::False => Formula::False,
                _ if matches!(&**node, Formula::Exists(..)) => Formula::Exists(v.clone(), na),
                _ => Formula::Forall(v.clone(), na),
            })
        }
    }
}

fn has_abs_of(f: &Formula, x: &Var) -> bool {
    let mut found = false;
    f.for_each_atom(&mut |a| {
        if a.term().abs_coeff(x).is_some() {
            found = true;
        }
    });
    found
}
