//! Ground and assignment-based evaluation, bounded witness search, and the
//! sampling equivalence harness the property tests are built on.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::formula::{Atom, Formula};
use crate::normal::is_power_of_two;
use crate::prenex::{PrenexFormula, Quant};
use crate::term::{pow2_abs, Term, Var};

pub type Assignment = BTreeMap<Var, BigInt>;

/// Evaluates a variable-free, quantifier-free formula exactly.
pub fn eval_ground(f: &Formula) -> bool {
    assert!(
        !f.has_lambdas(),
        "ground evaluation does not accept lambda terms"
    );
    eval_with(f, &|v| panic!("variable {v} survived in a ground formula"))
}

/// Evaluates a quantifier-free formula under an assignment covering its free
/// variables.
pub fn eval_qf(f: &Formula, nu: &Assignment) -> bool {
    eval_with(f, &|v| {
        nu.get(v)
            .cloned()
            .unwrap_or_else(|| panic!("assignment misses variable {v}"))
    })
}

fn eval_with(f: &Formula, lookup: &dyn Fn(&Var) -> BigInt) -> bool {
    match f {
        Formula::Atom(a) => eval_atom(a, &|v| lookup(v)),
        Formula::True => true,
        Formula::False => false,
        Formula::Not(a) => !eval_with(a, lookup),
        Formula::And(a, b) => eval_with(a, lookup) && eval_with(b, lookup),
        Formula::Or(a, b) => eval_with(a, lookup) || eval_with(b, lookup),
        Formula::Exists(..) | Formula::Forall(..) => {
            panic!("cannot evaluate a quantified formula pointwise")
        }
    }
}

fn eval_atom<F: Fn(&Var) -> BigInt>(a: &Atom, lookup: &F) -> bool {
    match a {
        Atom::Less(t) => t.value(lookup).is_negative(),
        Atom::Div(q, t) => (t.value(lookup) % q).is_zero(),
        Atom::Pow2(t) => is_power_of_two(&t.value(lookup)),
    }
}

/// Exhaustive witness search over the box `[-bound, bound]^k` for an
/// existential prenex formula. A returned witness proves the sentence true;
/// exhaustion proves nothing unless the caller supplies a completeness
/// argument for the bound.
pub fn bounded_witness_search(phi: &PrenexFormula, bound: u64) -> Option<Assignment> {
    assert!(
        phi.prefix.iter().all(|(q, _)| *q == Quant::Exists),
        "witness search expects a purely existential prefix"
    );
    let vars: Vec<Var> = phi.prefix.iter().map(|(_, v)| v.clone()).collect();
    let mut nu = Assignment::new();
    search(&phi.matrix, &vars, 0, bound as i64, &mut nu)
}

fn search(
    matrix: &Formula,
    vars: &[Var],
    i: usize,
    bound: i64,
    nu: &mut Assignment,
) -> Option<Assignment> {
    if i == vars.len() {
        return eval_qf(matrix, nu).then(|| nu.clone());
    }
    for val in -bound..=bound {
        nu.insert(vars[i].clone(), BigInt::from(val));
        if let Some(w) = search(matrix, vars, i + 1, bound, nu) {
            return Some(w);
        }
    }
    nu.remove(&vars[i]);
    None
}

/// Evaluates an arbitrary prenex formula as a finite game with every
/// quantifier relativized to `[-bound, bound]`. Exact only for sentences
/// whose quantifiers are effectively bounded by that box; callers document
/// the completeness argument case by case.
pub fn relativized_eval(phi: &PrenexFormula, bound: &BigInt) -> bool {
    fn go(prefix: &[(Quant, Var)], matrix: &Formula, bound: &BigInt, nu: &mut Assignment) -> bool {
        let Some(((q, v), rest)) = prefix.split_first() else {
            return eval_qf(matrix, nu);
        };
        let mut val = -bound.clone();
        loop {
            if val > *bound {
                break;
            }
            nu.insert(v.clone(), val.clone());
            let r = go(rest, matrix, bound, nu);
            nu.remove(v);
            match q {
                Quant::Exists if r => return true,
                Quant::Forall if !r => return false,
                _ => {}
            }
            val += 1;
        }
        *q == Quant::Forall
    }
    go(&phi.prefix, &phi.matrix, bound, &mut Assignment::new())
}

#[derive(Clone, Copy, Debug)]
pub struct SamplerSpec {
    pub seed: u64,
    pub samples: usize,
    /// Radius of the exhaustive small box.
    pub small_box: i64,
    /// Random magnitudes go up to `2^magnitude_bits`.
    pub magnitude_bits: u32,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        SamplerSpec {
            seed: 0xEC5B,
            samples: 400,
            small_box: 8,
            magnitude_bits: 64,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum Verdict {
    Agree,
    Disagree,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub samples_tried: usize,
    pub disagreements: Vec<BTreeMap<String, String>>,
    pub verdict: Verdict,
    pub seed: u64,
}

impl EquivalenceReport {
    pub fn agrees(&self) -> bool {
        self.verdict == Verdict::Agree
    }
}

/// Compares two quantifier-free formulas over the same free variables on a
/// deterministic mix of small-box and log-uniform random assignments.
pub fn sample_equivalence(f1: &Formula, f2: &Formula, spec: SamplerSpec) -> EquivalenceReport {
    let mut vars: Vec<Var> = f1.free_vars().union(&f2.free_vars()).cloned().collect();
    vars.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut disagreements = Vec::new();
    let mut tried = 0;

    let check = |nu: &Assignment, disagreements: &mut Vec<BTreeMap<String, String>>| {
        if eval_qf(f1, nu) != eval_qf(f2, nu) {
            disagreements.push(
                nu.iter()
                    .map(|(v, x)| (v.name().to_string(), x.to_string()))
                    .collect(),
            );
        }
    };

    // Exhaustive small box when it fits in half the budget.
    let width = 2 * spec.small_box as u128 + 1;
    let box_size = width.checked_pow(vars.len() as u32);
    if let Some(n) = box_size {
        if n <= (spec.samples / 2).max(1) as u128 {
            let mut idx = vec![-spec.small_box; vars.len()];
            loop {
                let nu: Assignment = vars
                    .iter()
                    .cloned()
                    .zip(idx.iter().map(|&i| BigInt::from(i)))
                    .collect();
                tried += 1;
                check(&nu, &mut disagreements);
                let mut k = 0;
                loop {
                    if k == idx.len() {
                        break;
                    }
                    idx[k] += 1;
                    if idx[k] <= spec.small_box {
                        break;
                    }
                    idx[k] = -spec.small_box;
                    k += 1;
                }
                if k == idx.len() {
                    break;
                }
                if idx.is_empty() {
                    break;
                }
            }
        }
    }

    // Random log-uniform magnitudes. Variables under a power are exponents;
    // they get small values so the power thresholds are actually crossed
    // and the materialized powers stay reasonable.
    let mut power_vars: BTreeSet<Var> = BTreeSet::new();
    for f in [f1, f2] {
        f.for_each_atom(&mut |a| {
            power_vars.extend(a.term().powers().map(|(v, _)| v.clone()));
        });
    }
    while tried < spec.samples {
        let mut nu = Assignment::new();
        for v in &vars {
            let max_bits = if power_vars.contains(v) {
                7
            } else {
                spec.magnitude_bits
            };
            let bits = rng.gen_range(0..=max_bits);
            let mag: u128 = if bits == 0 {
                rng.gen_range(0..=2)
            } else {
                let lo = 1u128 << (bits - 1).min(126);
                let hi = 1u128 << bits.min(127);
                rng.gen_range(lo..=hi)
            };
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            nu.insert(v.clone(), BigInt::from(mag) * sign);
        }
        tried += 1;
        check(&nu, &mut disagreements);
        if disagreements.len() > 4 {
            break;
        }
    }

    let verdict = if disagreements.is_empty() {
        Verdict::Agree
    } else {
        Verdict::Disagree
    };
    EquivalenceReport {
        samples_tried: tried,
        disagreements,
        verdict,
        seed: spec.seed,
    }
}

/// A second ground evaluator, written as an explicit worklist over a
/// three-valued stack machine rather than structural recursion, and with its
/// own term evaluation. Kept separate on purpose so the two implementations
/// can be compared.
pub fn eval_ground_reference(f: &Formula) -> bool {
    enum Frame<'a> {
        Visit(&'a Formula),
        ApplyNot,
        ApplyAnd,
        ApplyOr,
    }
    let mut stack = vec![Frame::Visit(f)];
    let mut values: Vec<bool> = Vec::new();
    while let Some(frame) = stack.pop() {
        match frame {
            Frame::Visit(g) => match g {
                Formula::True => values.push(true),
                Formula::False => values.push(false),
                Formula::Atom(a) => values.push(reference_atom(a)),
                Formula::Not(x) => {
                    stack.push(Frame::ApplyNot);
                    stack.push(Frame::Visit(x));
                }
                Formula::And(x, y) => {
                    stack.push(Frame::ApplyAnd);
                    stack.push(Frame::Visit(x));
                    stack.push(Frame::Visit(y));
                }
                Formula::Or(x, y) => {
                    stack.push(Frame::ApplyOr);
                    stack.push(Frame::Visit(x));
                    stack.push(Frame::Visit(y));
                }
                _ => panic!("quantifier in ground formula"),
            },
            Frame::ApplyNot => {
                let a = values.pop().unwrap();
                values.push(!a);
            }
            Frame::ApplyAnd => {
                let a = values.pop().unwrap();
                let b = values.pop().unwrap();
                values.push(a && b);
            }
            Frame::ApplyOr => {
                let a = values.pop().unwrap();
                let b = values.pop().unwrap();
                values.push(a || b);
            }
        }
    }
    assert_eq!(values.len(), 1);
    values[0]
}

fn reference_atom(a: &Atom) -> bool {
    let value = |t: &Term| -> BigInt {
        assert!(t.vars().is_empty(), "variable survived in ground formula");
        let mut acc = t.constant().clone();
        for (s, c) in t.lambdas() {
            acc += c * crate::numtheory::lambda(&value_inner(s));
        }
        acc
    };
    match a {
        Atom::Less(t) => value(t) < BigInt::zero(),
        Atom::Div(q, t) => value(t).mod_floor_ref(q).is_zero(),
        Atom::Pow2(t) => {
            let v = value(t);
            v.is_positive() && (&v & (&v - 1u8)).is_zero()
        }
    }
}

fn value_inner(t: &Term) -> BigInt {
    assert!(t.vars().is_empty());
    t.constant().clone()
}

trait ModFloorRef {
    fn mod_floor_ref(&self, m: &BigInt) -> BigInt;
}

impl ModFloorRef for BigInt {
    fn mod_floor_ref(&self, m: &BigInt) -> BigInt {
        use num_integer::Integer;
        self.mod_floor(m)
    }
}

/// Evaluation of a single term under an assignment. Convenience wrapper used
/// by the oracle tests.
pub fn term_value(t: &Term, nu: &Assignment) -> BigInt {
    t.value(&|v| {
        nu.get(v)
            .cloned()
            .unwrap_or_else(|| panic!("assignment misses variable {v}"))
    })
}

/// `2^|n|` exposed for oracle arithmetic.
pub fn pow2(n: &BigInt) -> BigInt {
    pow2_abs(n)
}
