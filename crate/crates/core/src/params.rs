//! Growth-table checks for the subroutines. Each check takes the measured
//! parameters of the input, applies the stated floors, and verifies the
//! bounds on every output. The engine runs them after each call when
//! configured to; the test suites call them directly.

use num_bigint::BigInt;
use num_traits::One;

use crate::formula::{Atom, Formula};
use crate::fragment::atom_in_pc;
use crate::metrics::{metrics, MetricsReport};
use crate::term::Var;

fn floor_big(v: BigInt, floor: u64) -> BigInt {
    v.max(BigInt::from(floor))
}

fn pow_big(base: &BigInt, exp: u64) -> BigInt {
    let mut acc = BigInt::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Bounds for one round of the linear-variable elimination. The input
/// formula must be the exact formula handed to `pres_qe`.
pub fn check_presburger_round(input: &Formula, outputs: &[Formula]) -> Result<(), String> {
    let m = metrics(input);
    let h = (m.homterms_count() as u64).max(2);
    let v = m.maxvars as u64;
    let a = floor_big(m.norminf_homterms.clone(), 2);
    let c = floor_big(m.norminf_linterms.clone(), 2);
    let fm = m.fmod.clone();
    let b = m.boolnum;

    let bound_norminf_lin = pow_big(&a, h + 2) * (&c + &fm);
    let bound_norminf_hom = BigInt::from(2) * &a * &a;
    let bound_fmod = &a * &fm;
    let bound_count = BigInt::from(h) * &c * pow_big(&fm, 2 * v + 1) * pow_big(&a, 2 * v + h + 4);

    if BigInt::from(outputs.len()) > bound_count {
        return Err(format!(
            "member count {} exceeds {bound_count}",
            outputs.len()
        ));
    }
    for (i, out) in outputs.iter().enumerate() {
        let mo = metrics(out);
        let checks: Vec<(&str, bool)> = vec![
            ("homterms", mo.homterms_count() as u64 <= h),
            ("maxvars", mo.maxvars as u64 <= 2 * v),
            (
                "norminf(homterms)",
                mo.norminf_homterms <= bound_norminf_hom,
            ),
            (
                "norminf(linterms)",
                mo.norminf_linterms <= bound_norminf_lin,
            ),
            ("fmod", mo.fmod <= bound_fmod),
            ("boolnum", mo.boolnum <= b + 2 * v + 1),
        ];
        for (what, ok) in checks {
            if !ok {
                return Err(format!(
                    "output {i}: {what} out of bounds\ninput {input:?}\noutput {out:?}"
                ));
            }
        }
    }
    Ok(())
}

/// Bounds for one cover construction round.
pub fn check_sem_round(
    input: &Formula,
    n_block_vars: usize,
    outputs: &[Formula],
    new_universals: usize,
) -> Result<(), String> {
    let m = metrics(input);
    let h = m.homterms_count() as u64;
    let v = (m.maxvars as u64).max(2);
    let c = floor_big(m.norminf_linterms.clone(), 2);
    let fm = m.fmod.clone();
    let b = m.boolnum;
    let n = n_block_vars as u64;

    if new_universals as u64 > h {
        return Err(format!(
            "{new_universals} universal quantifiers added, expected at most {h}"
        ));
    }
    let log_c = c.bits(); // ceil(log2(c+1)) >= log2(c)
    let bound_count =
        pow_big(&BigInt::from(v + 1), 8 * h) * pow_big(&BigInt::from(log_c), h) * BigInt::from(n);
    if BigInt::from(outputs.len()) > bound_count {
        return Err(format!(
            "member count {} exceeds {bound_count}",
            outputs.len()
        ));
    }
    let bound_norminf = BigInt::from(2048) * v * v * pow_big(&c, 4);
    for (i, out) in outputs.iter().enumerate() {
        let mo = metrics(out);
        let checks: Vec<(&str, bool)> = vec![
            ("homterms", (mo.homterms_count() as u64) <= h * (v + 10) + n),
            ("maxvars", mo.maxvars as u64 <= v),
            ("norminf(linterms)", mo.norminf_linterms <= bound_norminf),
            ("fmod", mo.fmod <= fm),
            ("boolnum", mo.boolnum <= b + h * (v + 11) + n),
        ];
        for (what, ok) in checks {
            if !ok {
                return Err(format!(
                    "output {i}: {what} out of bounds\ninput {input:?}\noutput {out:?}"
                ));
            }
        }
    }
    Ok(())
}

/// Counts homogeneous inequality terms that mention a block variable outside
/// power comparisons; the cover keeps this below the input's homterm count.
pub fn nonpc_block_homterms(f: &Formula, vars: &[Var]) -> usize {
    let mut set = std::collections::BTreeSet::new();
    f.for_each_atom(&mut |a| {
        if let Atom::Less(t) = a {
            if !atom_in_pc(a) && vars.iter().any(|x| t.contains_var(x)) {
                set.insert(t.homogeneous());
            }
        }
    });
    set.len()
}

/// Bounds for one linearisation round over a set of pairs.
pub fn check_linearise_round(
    inputs: &[(Vec<Var>, Formula)],
    outputs: &[(Vec<Var>, Formula)],
) -> Result<(), String> {
    if inputs.len() != outputs.len() {
        return Err("linearisation changed the number of pairs".into());
    }
    let r = inputs
        .iter()
        .map(|(_, f)| f.free_vars().len() + bound_var_count(f))
        .max()
        .unwrap_or(0) as u64;
    for (i, ((vars, fin), (_, fout))) in inputs.iter().zip(outputs.iter()).enumerate() {
        let mi = metrics(fin);
        let mo = metrics(fout);
        let n = vars.len() as u64;
        let b = mi.boolnum.max(1);
        let fm = floor_big(mi.fmod.clone(), 2);
        let checks: Vec<(&str, bool)> = vec![
            (
                "homterms",
                (mo.homterms_count() as u64) <= mi.homterms_count() as u64 + (6 * r + 2) * n,
            ),
            ("maxvars", mo.maxvars <= mi.maxvars),
            (
                "norminf(homterms)",
                mo.norminf_homterms <= floor_big(mi.norminf_homterms.clone(), 1),
            ),
            (
                "norminf(linterms)",
                mo.norminf_linterms <= floor_big(mi.norminf_linterms.clone(), 2),
            ),
            ("fmod", mo.fmod <= &fm * &fm),
            ("boolnum", mo.boolnum <= 22 * b),
        ];
        for (what, ok) in checks {
            if !ok {
                return Err(format!(
                    "pair {i}: {what} out of bounds\ninput {fin:?}\noutput {fout:?}"
                ));
            }
        }
    }
    Ok(())
}

fn bound_var_count(f: &Formula) -> usize {
    match f {
        Formula::Not(a) => bound_var_count(a),
        Formula::And(a, b) | Formula::Or(a, b) => bound_var_count(a) + bound_var_count(b),
        Formula::Exists(_, a) | Formula::Forall(_, a) => 1 + bound_var_count(a),
        _ => 0,
    }
}

/// Octagonal-run invariants: two variables per term at most, unit
/// homogeneous coefficients, and octagonal atom shapes throughout.
pub fn check_oct(f: &Formula) -> Result<(), String> {
    if !crate::fragment::formula_in_oct(f) {
        return Err(format!("formula left the octagon fragment: {f:?}"));
    }
    let m = metrics(f);
    if m.maxvars > 2 {
        return Err(format!("maxvars {} > 2 on an octagonal run", m.maxvars));
    }
    if m.norminf_homterms > BigInt::one() {
        return Err(format!(
            "norminf(homterms) {} > 1 on an octagonal run",
            m.norminf_homterms
        ));
    }
    Ok(())
}

/// Summary of a metrics report for trace events.
pub fn summarize(m: &MetricsReport) -> serde_json::Value {
    serde_json::json!({
        "homterms": m.homterms_count(),
        "maxvars": m.maxvars,
        "norminf_linterms_bits": m.norminf_linterms.bits(),
        "fmod_bits": m.fmod.bits(),
        "boolnum": m.boolnum,
    })
}
