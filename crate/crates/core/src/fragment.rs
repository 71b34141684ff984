//! Syntactic fragment membership: power comparisons, integer octagons, the
//! Semenov fragment and plain quantifier-free formulas.

use num_bigint::BigInt;
use num_traits::One;

use crate::formula::{var_roles, Atom, Formula};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Fragment {
    /// Quantifier-free formulas.
    Qf,
    /// Each variable always linear or always in a power; bound variables only
    /// in power-comparison atoms; all divisibilities simple.
    Sem,
}

/// Power comparisons: `a*2^|x| < b`, `a*2^|x| < b*2^|y|` and
/// `q | 2^|x| - r`.
pub fn atom_in_pc(a: &Atom) -> bool {
    match a {
        Atom::Less(t) => {
            if t.linears().count() != 0 || t.abses().count() != 0 || t.has_lambdas() {
                return false;
            }
            match t.powers().count() {
                1 => true,
                2 => t.constant() == &BigInt::from(0),
                _ => false,
            }
        }
        Atom::Div(_, t) => div_term_is_simple(t) && t.powers().count() == 1,
        Atom::Pow2(_) => false,
    }
}

/// Simple divisibility: `q | 2^|x| - r`, `q | x - r` or `q | |x| - r`, i.e.
/// a single variable slot with unit coefficient (after normalization).
pub fn div_is_simple(a: &Atom) -> bool {
    match a {
        Atom::Div(_, t) => div_term_is_simple(t),
        _ => false,
    }
}

fn div_term_is_simple(t: &crate::term::Term) -> bool {
    if t.has_lambdas() {
        return false;
    }
    let slots: Vec<&BigInt> = t
        .powers()
        .map(|(_, c)| c)
        .chain(t.linears().map(|(_, c)| c))
        .chain(t.abses().map(|(_, c)| c))
        .collect();
    slots.len() == 1 && slots[0].is_one()
}

/// Integer octagon arithmetic: inequalities `±x ± y < c` and `±x < c`
/// (absolute-value slots count as unit occurrences), divisibilities simple
/// and on a linear slot, and no power terms anywhere.
pub fn formula_in_oct(f: &Formula) -> bool {
    let mut ok = true;
    f.for_each_atom(&mut |a| {
        if !ok {
            return;
        }
        ok = match a {
            Atom::Less(t) => {
                if t.powers().count() != 0 || t.has_lambdas() {
                    false
                } else {
                    let coeffs: Vec<&BigInt> = t
                        .linears()
                        .map(|(_, c)| c)
                        .chain(t.abses().map(|(_, c)| c))
                        .collect();
                    coeffs.len() <= 2 && coeffs.iter().all(|c| c.magnitude().is_one())
                }
            }
            Atom::Div(_, t) => div_term_is_simple(t) && t.powers().count() == 0,
            Atom::Pow2(_) => false,
        };
    });
    ok
}

/// All divisibility constraints of the formula are simple.
pub fn all_divs_simple(f: &Formula) -> bool {
    let mut ok = true;
    f.for_each_atom(&mut |a| {
        if matches!(a, Atom::Div(..)) && !div_is_simple(a) {
            ok = false;
        }
    });
    ok
}

pub fn in_fragment(f: &Formula, frag: Fragment) -> bool {
    match frag {
        Fragment::Qf => f.is_quantifier_free() && !f.has_pow2_atoms(),
        Fragment::Sem => in_sem(f),
    }
}

fn in_sem(f: &Formula) -> bool {
    if f.has_pow2_atoms() || !all_divs_simple(f) {
        return false;
    }
    // Each variable always linear or always in a power, formula-wide.
    for (_, roles) in var_roles(f) {
        if roles.power && roles.linear_side() {
            return false;
        }
    }
    // Bound variables may only appear in power-comparison atoms.
    bound_vars_only_in_pc(f, &mut Vec::new())
}

fn bound_vars_only_in_pc(f: &Formula, bound: &mut Vec<crate::term::Var>) -> bool {
    match f {
        Formula::Atom(a) => {
            let mentions_bound = bound.iter().any(|v| a.term().contains_var(v));
            !mentions_bound || atom_in_pc(a)
        }
        Formula::True | Formula::False => true,
        Formula::Not(a) => bound_vars_only_in_pc(a, bound),
        Formula::And(a, b) | Formula::Or(a, b) => {
            bound_vars_only_in_pc(a, bound) && bound_vars_only_in_pc(b, bound)
        }
        Formula::Exists(v, a) | Formula::Forall(v, a) => {
            bound.push(v.clone());
            let ok = bound_vars_only_in_pc(a, bound);
            bound.pop();
            ok
        }
    }
}
