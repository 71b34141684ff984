//! Variables and the restricted term language.
//!
//! A term is an integer-linear combination of power terms `pow(x)` (that is,
//! `2^|x|`), plain linear variables, absolute values `abs(x)` of linearly
//! occurring variables, and a constant. Coefficients and constants are
//! arbitrary-precision integers. A variable occurs at most once in each of
//! the four slots of a term; building a term folds repeated occurrences by
//! coefficient addition and drops zero coefficients.
//!
//! Terms additionally may carry `lambda` components: integer multiples of
//! `lambda(s)` where `s` is another (lambda-free) term and `lambda(n)` is the
//! largest power of two that is at most `|n|`. These only appear transiently
//! inside the Semenov cover; no public procedure returns them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::numtheory;

/// An interned variable name. Ordering is lexicographic on the name, which
/// keeps all map iteration (and hence rendering and traces) deterministic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: impl AsRef<str>) -> Self {
        Var(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// Picks a name starting from `base` that is not in `taken`, by appending
    /// a numeric suffix. Used wherever a fresh variable is needed.
    pub fn fresh(base: &str, taken: &BTreeSet<Var>) -> Var {
        let cand = Var::new(base);
        if !taken.contains(&cand) {
            return cand;
        }
        let mut i: u64 = 1;
        loop {
            let cand = Var::new(format!("{base}{i}"));
            if !taken.contains(&cand) {
                return cand;
            }
            i += 1;
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Term {
    /// Coefficients of `2^|x|`.
    powers: BTreeMap<Var, BigInt>,
    /// Coefficients of plain linear occurrences.
    linears: BTreeMap<Var, BigInt>,
    /// Coefficients of `|x|` where `x` occurs linearly.
    abses: BTreeMap<Var, BigInt>,
    /// Coefficients of `lambda(s)`; keys are lambda-free, non-constant terms.
    lambdas: BTreeMap<Term, BigInt>,
    constant: BigInt,
}

impl Term {
    pub fn zero() -> Term {
        Term::default()
    }

    pub fn int(c: impl Into<BigInt>) -> Term {
        Term {
            constant: c.into(),
            ..Term::default()
        }
    }

    pub fn var(v: Var) -> Term {
        let mut t = Term::default();
        t.add_linear(v, BigInt::one());
        t
    }

    pub fn pow(v: Var) -> Term {
        let mut t = Term::default();
        t.add_power(v, BigInt::one());
        t
    }

    pub fn abs(v: Var) -> Term {
        let mut t = Term::default();
        t.add_abs(v, BigInt::one());
        t
    }

    /// `lambda(inner)`. Folds immediately when `inner` is a constant, and
    /// canonicalizes the sign of the argument: `lambda(n) = lambda(-n)`, so
    /// arguments differing only by sign share one key.
    pub fn lam(inner: Term) -> Term {
        let mut t = Term::default();
        t.add_lambda(inner, BigInt::one());
        t
    }

    fn canonical_lambda_arg(inner: Term) -> Term {
        let leading_negative = inner
            .powers
            .values()
            .chain(inner.linears.values())
            .chain(inner.abses.values())
            .chain(std::iter::once(&inner.constant))
            .find(|c| !c.is_zero())
            .map(|c| c.is_negative())
            .unwrap_or(false);
        if leading_negative {
            inner.neg()
        } else {
            inner
        }
    }

    pub fn add_power(&mut self, v: Var, coeff: BigInt) {
        add_entry(&mut self.powers, v, coeff);
    }

    pub fn add_linear(&mut self, v: Var, coeff: BigInt) {
        add_entry(&mut self.linears, v, coeff);
    }

    pub fn add_abs(&mut self, v: Var, coeff: BigInt) {
        add_entry(&mut self.abses, v, coeff);
    }

    pub fn add_lambda(&mut self, inner: Term, coeff: BigInt) {
        assert!(inner.lambdas.is_empty(), "lambda terms do not nest");
        if inner.is_ground() {
            self.constant += coeff * numtheory::lambda(&inner.constant);
        } else {
            add_entry(&mut self.lambdas, Term::canonical_lambda_arg(inner), coeff);
        }
    }

    pub fn add_constant(&mut self, c: &BigInt) {
        self.constant += c;
    }

    pub fn constant(&self) -> &BigInt {
        &self.constant
    }

    pub fn powers(&self) -> impl Iterator<Item = (&Var, &BigInt)> {
        self.powers.iter()
    }

    pub fn linears(&self) -> impl Iterator<Item = (&Var, &BigInt)> {
        self.linears.iter()
    }

    pub fn abses(&self) -> impl Iterator<Item = (&Var, &BigInt)> {
        self.abses.iter()
    }

    pub fn lambdas(&self) -> impl Iterator<Item = (&Term, &BigInt)> {
        self.lambdas.iter()
    }

    pub fn power_coeff(&self, v: &Var) -> Option<&BigInt> {
        self.powers.get(v)
    }

    pub fn linear_coeff(&self, v: &Var) -> Option<&BigInt> {
        self.linears.get(v)
    }

    pub fn abs_coeff(&self, v: &Var) -> Option<&BigInt> {
        self.abses.get(v)
    }

    pub fn has_lambdas(&self) -> bool {
        !self.lambdas.is_empty()
    }

    /// True when the term is a bare constant.
    pub fn is_ground(&self) -> bool {
        self.powers.is_empty()
            && self.linears.is_empty()
            && self.abses.is_empty()
            && self.lambdas.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.is_ground() && self.constant.is_zero()
    }

    pub fn add(&self, other: &Term) -> Term {
        let mut out = self.clone();
        for (v, c) in &other.powers {
            out.add_power(v.clone(), c.clone());
        }
        for (v, c) in &other.linears {
            out.add_linear(v.clone(), c.clone());
        }
        for (v, c) in &other.abses {
            out.add_abs(v.clone(), c.clone());
        }
        for (s, c) in &other.lambdas {
            out.add_lambda(s.clone(), c.clone());
        }
        out.constant += &other.constant;
        out
    }

    pub fn sub(&self, other: &Term) -> Term {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Term {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, k: &BigInt) -> Term {
        if k.is_zero() {
            return Term::zero();
        }
        let scale_map = |m: &BTreeMap<Var, BigInt>| {
            m.iter()
                .map(|(v, c)| (v.clone(), c * k))
                .collect::<BTreeMap<_, _>>()
        };
        Term {
            powers: scale_map(&self.powers),
            linears: scale_map(&self.linears),
            abses: scale_map(&self.abses),
            lambdas: self
                .lambdas
                .iter()
                .map(|(s, c)| (s.clone(), c * k))
                .collect(),
            constant: &self.constant * k,
        }
    }

    /// The term with its constant set to zero.
    pub fn homogeneous(&self) -> Term {
        let mut t = self.clone();
        t.constant = BigInt::zero();
        t
    }

    /// All variables occurring in the term, including inside lambdas.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out: BTreeSet<Var> = BTreeSet::new();
        out.extend(self.powers.keys().cloned());
        out.extend(self.linears.keys().cloned());
        out.extend(self.abses.keys().cloned());
        for s in self.lambdas.keys() {
            out.extend(s.vars());
        }
        out
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        self.powers.contains_key(v)
            || self.linears.contains_key(v)
            || self.abses.contains_key(v)
            || self.lambdas.keys().any(|s| s.contains_var(v))
    }

    pub fn has_power_of(&self, v: &Var) -> bool {
        self.powers.contains_key(v)
    }

    /// Maximum absolute value over all coefficients and the constant.
    pub fn norm_inf(&self) -> BigInt {
        let mut best = self.constant.abs();
        for c in self
            .powers
            .values()
            .chain(self.linears.values())
            .chain(self.abses.values())
            .chain(self.lambdas.values())
        {
            let a = c.abs();
            if a > best {
                best = a;
            }
        }
        best
    }

    /// Sum of absolute values of all coefficients and the constant.
    pub fn norm_one(&self) -> BigInt {
        let mut sum = self.constant.abs();
        for c in self
            .powers
            .values()
            .chain(self.linears.values())
            .chain(self.abses.values())
            .chain(self.lambdas.values())
        {
            sum += c.abs();
        }
        sum
    }

    /// Renames every occurrence of `from` (in any slot) to `to`.
    pub fn rename_var(&self, from: &Var, to: &Var) -> Term {
        let rename_map = |m: &BTreeMap<Var, BigInt>| {
            let mut out: BTreeMap<Var, BigInt> = BTreeMap::new();
            for (v, c) in m {
                let v = if v == from { to.clone() } else { v.clone() };
                add_entry(&mut out, v, c.clone());
            }
            out
        };
        let mut t = Term {
            powers: rename_map(&self.powers),
            linears: rename_map(&self.linears),
            abses: rename_map(&self.abses),
            lambdas: BTreeMap::new(),
            constant: self.constant.clone(),
        };
        for (s, c) in &self.lambdas {
            t.add_lambda(s.rename_var(from, to), c.clone());
        }
        t
    }

    /// Exact value under an assignment of integers to variables.
    ///
    /// Panics if `lookup` cannot produce a value or an exponent is too large
    /// to materialize.
    pub fn value<F>(&self, lookup: &F) -> BigInt
    where
        F: Fn(&Var) -> BigInt,
    {
        let mut acc = self.constant.clone();
        for (v, c) in &self.powers {
            acc += c * pow2_abs(&lookup(v));
        }
        for (v, c) in &self.linears {
            acc += c * lookup(v);
        }
        for (v, c) in &self.abses {
            acc += c * lookup(v).abs();
        }
        for (s, c) in &self.lambdas {
            acc += c * numtheory::lambda(&s.value(lookup));
        }
        acc
    }
}

/// `2^|n|`, with a sanity cap on the exponent so tests fail loudly instead of
/// exhausting memory.
pub fn pow2_abs(n: &BigInt) -> BigInt {
    let e = n.abs();
    let e = u64::try_from(&e).expect("exponent out of range");
    assert!(e <= 1 << 22, "exponent {e} too large to materialize");
    BigInt::one() << e
}

fn add_entry<K: Ord>(map: &mut BTreeMap<K, BigInt>, key: K, coeff: BigInt) {
    if coeff.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(coeff);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += coeff;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces: Vec<(BigInt, String)> = Vec::new();
        for (v, c) in &self.powers {
            pieces.push((c.clone(), format!("pow({v})")));
        }
        for (v, c) in &self.abses {
            pieces.push((c.clone(), format!("abs({v})")));
        }
        for (v, c) in &self.linears {
            pieces.push((c.clone(), v.to_string()));
        }
        for (s, c) in &self.lambdas {
            pieces.push((c.clone(), format!("lam({s})")));
        }
        if !self.constant.is_zero() || pieces.is_empty() {
            pieces.push((self.constant.clone(), String::new()));
        }
        for (i, (coeff, body)) in pieces.iter().enumerate() {
            let mag = coeff.abs();
            if i == 0 {
                if coeff.is_negative() {
                    write!(f, "-")?;
                }
            } else if coeff.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if body.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{body}")?;
            } else {
                write!(f, "{mag}*{body}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Var {
        Var::new(n)
    }

    #[test]
    fn folding_and_zero_drop() {
        let mut t = Term::var(v("x"));
        t.add_linear(v("x"), BigInt::from(2));
        assert_eq!(t.linear_coeff(&v("x")), Some(&BigInt::from(3)));
        t.add_linear(v("x"), BigInt::from(-3));
        assert!(t.is_zero());
    }

    #[test]
    fn lambda_of_constant_folds() {
        let t = Term::lam(Term::int(12));
        assert_eq!(t, Term::int(8));
        assert_eq!(Term::lam(Term::int(0)), Term::int(0));
    }

    #[test]
    fn display_matches_grammar() {
        let mut t = Term::pow(v("x")).scale(&BigInt::from(3));
        t = t.add(&Term::pow(v("y")).scale(&BigInt::from(-5)));
        t = t.add(&Term::var(v("z")).neg());
        assert_eq!(t.to_string(), "3*pow(x) - 5*pow(y) - z");
        assert_eq!(Term::zero().to_string(), "0");
        assert_eq!(Term::int(-7).to_string(), "-7");
    }

    #[test]
    fn value_evaluates_all_slots() {
        let mut t = Term::pow(v("x")).scale(&BigInt::from(3));
        t.add_abs(v("y"), BigInt::from(2));
        t.add_constant(&BigInt::from(1));
        let val = t.value(&|var: &Var| {
            if var.name() == "x" {
                BigInt::from(-3)
            } else {
                BigInt::from(-4)
            }
        });
        // 3*2^3 + 2*4 + 1
        assert_eq!(val, BigInt::from(33));
    }
}
