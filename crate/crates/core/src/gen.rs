//! Seeded random formula generation for the differential harnesses.
//!
//! All generators are deterministic in the seed and tuned to desk scale:
//! coefficients stay small so the covers produced from these inputs stay
//! enumerable.

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

use crate::formula::Formula;
use crate::normal::normalize;
use crate::term::{Term, Var};

#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    pub max_coeff: i64,
    pub max_constant: i64,
    pub max_atoms: usize,
    pub max_depth: usize,
    pub moduli: &'static [u64],
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_coeff: 3,
            max_constant: 6,
            max_atoms: 3,
            max_depth: 3,
            moduli: &[2, 3, 4, 5],
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coeff(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> BigInt {
    let c = loop {
        let c = rng.gen_range(-cfg.max_coeff..=cfg.max_coeff);
        if c != 0 {
            break c;
        }
    };
    BigInt::from(c)
}

/// A linear term over the given variables (no powers).
pub fn linear_term(rng: &mut ChaCha8Rng, vars: &[Var], cfg: &GenConfig) -> Term {
    let mut t = Term::int(rng.gen_range(-cfg.max_constant..=cfg.max_constant));
    for v in vars {
        if rng.gen_bool(0.6) {
            t.add_linear(v.clone(), coeff(rng, cfg));
        }
    }
    t
}

/// A term mixing powers and linear occurrences.
pub fn mixed_term(
    rng: &mut ChaCha8Rng,
    power_vars: &[Var],
    linear_vars: &[Var],
    cfg: &GenConfig,
) -> Term {
    let mut t = Term::int(rng.gen_range(-cfg.max_constant..=cfg.max_constant));
    for v in power_vars {
        if rng.gen_bool(0.6) {
            t.add_power(v.clone(), coeff(rng, cfg));
        }
    }
    for v in linear_vars {
        if rng.gen_bool(0.6) {
            t.add_linear(v.clone(), coeff(rng, cfg));
        }
    }
    t
}

fn bool_shape(rng: &mut ChaCha8Rng, atoms: Vec<Formula>, depth: usize) -> Formula {
    let mut parts = atoms;
    while parts.len() > 1 {
        let b = parts.pop().unwrap();
        let a = parts.pop().unwrap();
        let joined = match rng.gen_range(0..if depth > 0 { 3 } else { 2 }) {
            0 => Formula::and(a, b),
            1 => Formula::or(a, b),
            _ => Formula::and(Formula::not(a), b),
        };
        parts.push(joined);
    }
    parts.pop().unwrap_or(Formula::True)
}

/// Quantifier-free Presburger formula (no powers) over `vars`.
pub fn pa_formula(rng: &mut ChaCha8Rng, vars: &[Var], cfg: &GenConfig) -> Formula {
    let n = rng.gen_range(1..=cfg.max_atoms);
    let atoms = (0..n)
        .map(|_| {
            if rng.gen_bool(0.25) {
                let q = cfg.moduli[rng.gen_range(0..cfg.moduli.len())];
                Formula::div(BigInt::from(q), linear_term(rng, vars, cfg))
            } else {
                Formula::less(linear_term(rng, vars, cfg))
            }
        })
        .collect();
    bool_shape(rng, atoms, cfg.max_depth)
}

/// Quantifier-free formula of the power-function language.
pub fn qf_formula(
    rng: &mut ChaCha8Rng,
    power_vars: &[Var],
    linear_vars: &[Var],
    cfg: &GenConfig,
) -> Formula {
    let n = rng.gen_range(1..=cfg.max_atoms);
    let atoms = (0..n)
        .map(|_| {
            if rng.gen_bool(0.2) {
                let q = cfg.moduli[rng.gen_range(0..cfg.moduli.len())];
                // simple divisibility on a variable or a power
                let t = if rng.gen_bool(0.5) && !power_vars.is_empty() {
                    let v = &power_vars[rng.gen_range(0..power_vars.len())];
                    Term::pow(v.clone())
                } else if !linear_vars.is_empty() {
                    let v = &linear_vars[rng.gen_range(0..linear_vars.len())];
                    Term::var(v.clone())
                } else {
                    Term::int(1)
                };
                Formula::div(
                    BigInt::from(q),
                    t.sub(&Term::int(rng.gen_range(0..q as i64))),
                )
            } else {
                Formula::less(mixed_term(rng, power_vars, linear_vars, cfg))
            }
        })
        .collect();
    bool_shape(rng, atoms, cfg.max_depth)
}

/// A formula of the Semenov shape: `block_vars` occur only in powers,
/// `free_vars` only linearly, and divisibility constraints are simple.
pub fn sem_formula(
    rng: &mut ChaCha8Rng,
    block_vars: &[Var],
    free_vars: &[Var],
    cfg: &GenConfig,
) -> Formula {
    let n = rng.gen_range(1..=cfg.max_atoms);
    let mut atoms: Vec<Formula> = (0..n)
        .map(|_| {
            match rng.gen_range(0..4) {
                0 => {
                    // power comparison between two block powers
                    let x = &block_vars[rng.gen_range(0..block_vars.len())];
                    let y = &block_vars[rng.gen_range(0..block_vars.len())];
                    let t = Term::pow(x.clone())
                        .scale(&coeff(rng, cfg))
                        .add(&Term::pow(y.clone()).scale(&coeff(rng, cfg)));
                    Formula::less(t)
                }
                1 => {
                    // simple divisibility on a power
                    let x = &block_vars[rng.gen_range(0..block_vars.len())];
                    let q = cfg.moduli[rng.gen_range(0..cfg.moduli.len())];
                    Formula::div(
                        BigInt::from(q),
                        Term::pow(x.clone()).sub(&Term::int(rng.gen_range(0..q as i64))),
                    )
                }
                _ => {
                    // mixed inequality: block powers plus free linear part
                    Formula::less(mixed_term(rng, block_vars, free_vars, cfg))
                }
            }
        })
        .collect();
    // make sure every block variable occurs in a power somewhere
    for x in block_vars {
        atoms.push(Formula::less(
            Term::pow(x.clone())
                .scale(&coeff(rng, cfg))
                .add(&linear_term(rng, free_vars, cfg)),
        ));
    }
    bool_shape(rng, atoms, cfg.max_depth)
}

/// A formula in which `x` occurs only linearly, with simple divisibilities,
/// suitable for driving the linear elimination directly.
pub fn linear_only_formula(
    rng: &mut ChaCha8Rng,
    x: &Var,
    others: &[Var],
    cfg: &GenConfig,
) -> Formula {
    let mut vars = vec![x.clone()];
    vars.extend(others.iter().cloned());
    let n = rng.gen_range(1..=cfg.max_atoms);
    let mut atoms: Vec<Formula> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.25) {
                let q = cfg.moduli[rng.gen_range(0..cfg.moduli.len())];
                let v = &vars[rng.gen_range(0..vars.len())];
                Formula::div(
                    BigInt::from(q),
                    Term::var(v.clone()).sub(&Term::int(rng.gen_range(0..q as i64))),
                )
            } else {
                Formula::less(linear_term(rng, &vars, cfg))
            }
        })
        .collect();
    // ensure x occurs
    atoms.push(Formula::less(
        linear_term(rng, &[x.clone()], cfg).add(&Term::var(x.clone())),
    ));
    normalize(&bool_shape(rng, atoms, cfg.max_depth))
}

/// Random variable pool `x1..xk`.
pub fn pool(prefix: &str, k: usize) -> Vec<Var> {
    (1..=k).map(|i| Var::new(format!("{prefix}{i}"))).collect()
}
