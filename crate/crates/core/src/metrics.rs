//! The parameter functions used by the growth tables: linear terms,
//! homogeneous terms, heft, modulus, Boolean size and alternation rank.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;

use crate::formula::{Atom, Formula};
use crate::numtheory::lcm_big;
use crate::prenex::to_prenex;
use crate::term::Term;

#[derive(Clone, Debug)]
pub struct MetricsReport {
    /// Terms of inequalities `t < 0`, always containing the terms 0 and 2.
    pub linterms: BTreeSet<Term>,
    /// The linear terms with their constants dropped.
    pub homterms: BTreeSet<Term>,
    /// Maximum number of distinct variables in a single term.
    pub maxvars: usize,
    pub norminf_linterms: BigInt,
    pub norminf_homterms: BigInt,
    /// Largest 1-norm over the linear terms.
    pub normone_max: BigInt,
    /// Least common multiple of all divisibility moduli; 1 when there are
    /// none.
    pub fmod: BigInt,
    /// Number of negations and conjunctions, with disjunctions counted
    /// through their `!(!a && !b)` desugaring.
    pub boolnum: u64,
    /// Quantifier alternation rank (number of blocks in prenex form).
    pub alt: usize,
}

impl MetricsReport {
    pub fn linterms_count(&self) -> usize {
        self.linterms.len()
    }

    pub fn homterms_count(&self) -> usize {
        self.homterms.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "linterms_count": self.linterms.len(),
            "linterms": self.linterms.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "homterms": self.homterms.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "maxvars": self.maxvars,
            "norminf_linterms": self.norminf_linterms.to_string(),
            "norminf_homterms": self.norminf_homterms.to_string(),
            "normone_max": self.normone_max.to_string(),
            "fmod": self.fmod.to_string(),
            "boolnum": self.boolnum,
            "alt": self.alt,
        })
    }
}

pub fn metrics(f: &Formula) -> MetricsReport {
    let mut linterms: BTreeSet<Term> = BTreeSet::new();
    linterms.insert(Term::zero());
    linterms.insert(Term::int(2));
    let mut fmod = BigInt::one();
    let mut maxvars = 0usize;
    f.for_each_atom(&mut |a| {
        maxvars = maxvars.max(a.term().vars().len());
        match a {
            Atom::Less(t) => {
                linterms.insert(t.clone());
            }
            Atom::Div(q, _) => {
                fmod = lcm_big(&fmod, q);
            }
            Atom::Pow2(_) => {}
        }
    });
    let homterms: BTreeSet<Term> = linterms.iter().map(|t| t.homogeneous()).collect();
    let norminf = |set: &BTreeSet<Term>| {
        set.iter()
            .map(|t| t.norm_inf())
            .max()
            .unwrap_or_else(|| BigInt::from(0))
    };
    let normone_max = linterms
        .iter()
        .map(|t| t.norm_one())
        .max()
        .unwrap_or_else(|| BigInt::from(0));
    MetricsReport {
        norminf_linterms: norminf(&linterms),
        norminf_homterms: norminf(&homterms),
        normone_max,
        linterms,
        homterms,
        maxvars,
        fmod,
        boolnum: boolnum(f),
        alt: alt(f),
    }
}

/// Largest bit length over all coefficients, constants and moduli. A cheap
/// stand-in for the full report when only growth guards are needed.
pub fn coeff_bits(f: &Formula) -> u64 {
    let mut bits = 0u64;
    f.for_each_atom(&mut |a| {
        bits = bits.max(a.term().norm_inf().bits());
        if let Atom::Div(q, _) = a {
            bits = bits.max(q.bits());
        }
    });
    bits
}

/// Occurrences of `!` and `&&`, counting each `||` as its `!(!a && !b)`
/// expansion (three negations and one conjunction).
pub fn boolnum(f: &Formula) -> u64 {
    match f {
        Formula::Atom(_) | Formula::True | Formula::False => 0,
        Formula::Not(a) => 1 + boolnum(a),
        Formula::And(a, b) => 1 + boolnum(a) + boolnum(b),
        Formula::Or(a, b) => 4 + boolnum(a) + boolnum(b),
        Formula::Exists(_, a) | Formula::Forall(_, a) => boolnum(a),
    }
}

/// Number of quantifier blocks in prenex form.
pub fn alt(f: &Formula) -> usize {
    let prefix = if is_prenex(f) {
        prefix_of(f)
    } else {
        to_prenex(f).prefix
    };
    let mut blocks = 0;
    let mut last = None;
    for (q, _) in prefix {
        if Some(q) != last {
            blocks += 1;
            last = Some(q);
        }
    }
    blocks
}

fn is_prenex(f: &Formula) -> bool {
    match f {
        Formula::Exists(_, a) | Formula::Forall(_, a) => is_prenex(a),
        _ => f.is_quantifier_free(),
    }
}

fn prefix_of(f: &Formula) -> Vec<(crate::prenex::Quant, crate::term::Var)> {
    let mut out = Vec::new();
    let mut cur = f;
    loop {
        match cur {
            Formula::Exists(v, a) => {
                out.push((crate::prenex::Quant::Exists, v.clone()));
                cur = a;
            }
            Formula::Forall(v, a) => {
                out.push((crate::prenex::Quant::Forall, v.clone()));
                cur = a;
            }
            _ => return out,
        }
    }
}
