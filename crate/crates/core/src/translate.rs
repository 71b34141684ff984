//! Translation from the powers-of-two predicate dialect into the power
//! function language: each `P(t)` becomes `exists y. t = pow(y)` and each
//! `q | t` becomes `exists z. t = q*z`; the result is brought to prenex
//! form. The output has no predicate atoms and no divisibility constraints,
//! and every variable appears either always linearly or always in a power.

use std::collections::BTreeSet;

use crate::formula::{var_roles, Atom, Formula};
use crate::prenex::{to_prenex, PrenexFormula};
use crate::term::{Term, Var};

pub fn translate_prespower(f: &Formula) -> PrenexFormula {
    let mut taken: BTreeSet<Var> = f.all_vars();
    let g = replace(f, &mut taken);
    to_prenex(&g)
}

fn replace(f: &Formula, taken: &mut BTreeSet<Var>) -> Formula {
    match f {
        Formula::Atom(Atom::Pow2(t)) => {
            let y = fresh(taken, "p");
            Formula::exists(y.clone(), Formula::eq(t, &Term::pow(y)))
        }
        Formula::Atom(Atom::Div(q, t)) => {
            let z = fresh(taken, "d");
            Formula::exists(z.clone(), Formula::eq(t, &Term::var(z).scale(q)))
        }
        Formula::Atom(Atom::Less(_)) | Formula::True | Formula::False => f.clone(),
        Formula::Not(a) => Formula::not(replace(a, taken)),
        Formula::And(a, b) => Formula::and(replace(a, taken), replace(b, taken)),
        Formula::Or(a, b) => Formula::or(replace(a, taken), replace(b, taken)),
        Formula::Exists(v, a) => Formula::exists(v.clone(), replace(a, taken)),
        Formula::Forall(v, a) => Formula::forall(v.clone(), replace(a, taken)),
    }
}

fn fresh(taken: &mut BTreeSet<Var>, base: &str) -> Var {
    let v = Var::fresh(base, taken);
    taken.insert(v.clone());
    v
}

/// Scanner for the translation postcondition: no predicate atoms, no
/// divisibilities, and the variables split into linear-only and power-only.
pub fn translation_shape_ok(phi: &PrenexFormula) -> bool {
    let f = phi.to_formula();
    if f.has_pow2_atoms() {
        return false;
    }
    let mut has_div = false;
    f.for_each_atom(&mut |a| {
        if matches!(a, Atom::Div(..)) {
            has_div = true;
        }
    });
    if has_div {
        return false;
    }
    var_roles(&f)
        .values()
        .all(|r| !(r.power && r.linear_side()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_str, Dialect};
    use crate::prenex::Quant;

    #[test]
    fn predicate_becomes_power_witness() {
        let f = parse_str("P(x)", Dialect::PresPower).unwrap();
        let phi = translate_prespower(&f);
        assert_eq!(phi.prefix.len(), 1);
        assert_eq!(phi.prefix[0].0, Quant::Exists);
        assert!(translation_shape_ok(&phi));
        // matrix is x = pow(y) for the fresh y
        let y = phi.prefix[0].1.clone();
        let want = Formula::eq(&Term::var(Var::new("x")), &Term::pow(y));
        assert_eq!(phi.matrix, want);
    }

    #[test]
    fn divisibility_becomes_multiple() {
        let f = parse_str("3 | x", Dialect::PresPower).unwrap();
        let phi = translate_prespower(&f);
        assert_eq!(phi.prefix.len(), 1);
        let z = phi.prefix[0].1.clone();
        let want = Formula::eq(
            &Term::var(Var::new("x")),
            &Term::var(z).scale(&num_bigint::BigInt::from(3)),
        );
        assert_eq!(phi.matrix, want);
        assert!(translation_shape_ok(&phi));
    }

    #[test]
    fn ground_predicate() {
        let f = parse_str("P(8)", Dialect::PresPower).unwrap();
        let phi = translate_prespower(&f);
        assert!(phi.is_sentence());
        assert!(translation_shape_ok(&phi));
    }

    #[test]
    fn alternating_sentence_keeps_shape() {
        let f = parse_str("forall x. exists y. P(y) && y > x", Dialect::PresPower).unwrap();
        let phi = translate_prespower(&f);
        assert!(phi.is_sentence());
        assert!(translation_shape_ok(&phi));
        assert_eq!(phi.prefix.len(), 3);
    }
}
