//! The block-by-block quantifier manipulation procedure and the top-level
//! decision pipelines built on it.
//!
//! One outer iteration peels the innermost quantifier block off the prefix
//! (universal blocks through a negation), then drives a worklist of pairs
//! `(block vars, formula)` to completion: variables that no longer occur are
//! dropped, quantifiers that stay inside the target fragment are absorbed,
//! linearly occurring variables are eliminated, and the remaining mixed
//! occurrences go through the Semenov cover followed by linearisation. The
//! finished disjuncts are reassembled under the outer prefix together with
//! the definitional universals introduced along the way, and the next block
//! is processed.

use num_bigint::BigInt;
use serde::Serialize;

use crate::eval::eval_ground;
use crate::formula::Formula;
use crate::fragment::{all_divs_simple, formula_in_oct, in_fragment, Fragment};
use crate::limits::{Deadline, Limits, SolveError};
use crate::metrics::metrics;
use crate::normal::{negate_to_conjuncts, normalize, refold};
use crate::params;
use crate::prenex::{to_prenex, PrenexFormula, Quant};
use crate::qe::presburger::{pres_qe, simplify};
use crate::qe::semenov::{linearise, sem_cover, SemState};
use crate::subst::expand_abs_var;
use crate::term::Var;
use crate::translate::{translate_prespower, translation_shape_ok};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Strategy {
    /// Materialize every cover member and process them all.
    Exhaustive,
    /// Depth-first search over the guess points; existential sentences only.
    Backtracking,
}

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub fragment: Fragment,
    pub strategy: Strategy,
    pub limits: Limits,
    /// Record trace events.
    pub trace: bool,
    /// Check the growth tables after every subroutine call.
    pub paranoid: bool,
    /// Assert octagonal shape throughout the run.
    pub assert_oct: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            fragment: Fragment::Qf,
            strategy: Strategy::Exhaustive,
            limits: Limits::default(),
            trace: false,
            paranoid: false,
            assert_oct: false,
        }
    }
}

/// One worklist entry: the remaining block variables and the formula they
/// quantify.
#[derive(Clone, Debug)]
pub struct WorkItem {
    pub vars: Vec<Var>,
    pub body: Formula,
    /// Pops since the variable vector last shrank; the termination measure
    /// keeps this at two or below.
    since_shrink: u8,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum TraceKind {
    BlockStart,
    Pop,
    SimplifyCall,
    PresQeCall,
    SemCoverCall,
    LineariseCall,
    BlockEnd,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceEvent {
    pub kind: TraceKind,
    pub block: u64,
    pub vars: usize,
    pub outputs: usize,
    pub metrics_before: Option<serde_json::Value>,
    pub metrics_after: Option<serde_json::Value>,
    pub wall_ms: u128,
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Counters {
    pub blocks: u64,
    pub pops: u64,
    pub simplify_calls: u64,
    pub pres_qe_calls: u64,
    pub sem_cover_calls: u64,
    pub linearise_calls: u64,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub formula: Formula,
    pub counters: Counters,
    pub trace: Vec<TraceEvent>,
}

struct Solver {
    cfg: SolveConfig,
    deadline: Deadline,
    counters: Counters,
    trace: Vec<TraceEvent>,
    started: std::time::Instant,
}

impl Solver {
    fn new(cfg: &SolveConfig) -> Solver {
        Solver {
            cfg: cfg.clone(),
            deadline: Deadline::new(&cfg.limits),
            counters: Counters::default(),
            trace: Vec::new(),
            started: std::time::Instant::now(),
        }
    }

    fn event(
        &mut self,
        kind: TraceKind,
        vars: usize,
        outputs: usize,
        before: Option<&Formula>,
        after: Option<&Formula>,
    ) {
        if !self.cfg.trace {
            return;
        }
        self.trace.push(TraceEvent {
            kind,
            block: self.counters.blocks,
            vars,
            outputs,
            metrics_before: before.map(|f| params::summarize(&metrics(f))),
            metrics_after: after.map(|f| params::summarize(&metrics(f))),
            wall_ms: self.started.elapsed().as_millis(),
        });
    }

    fn guard_growth(&self, f: &Formula) -> Result<(), SolveError> {
        let bits = crate::metrics::coeff_bits(f);
        if bits > self.cfg.limits.max_coeff_bits {
            return Err(SolveError::exceeded(format!(
                "a coefficient reached {bits} bits (cap {})",
                self.cfg.limits.max_coeff_bits
            )));
        }
        if self.cfg.assert_oct {
            if let Err(e) = params::check_oct(f) {
                panic!("octagonal invariant violated: {e}");
            }
        }
        Ok(())
    }

    /// Pops until the worklist drains, collecting finished disjuncts.
    fn run_block(
        &mut self,
        block_vars: Vec<Var>,
        psi: Formula,
        sem_state: &mut SemState,
    ) -> Result<Vec<Formula>, SolveError> {
        let mut queue: Vec<WorkItem> = Vec::new();
        let mut done: Vec<Formula> = Vec::new();
        // The block body must carry only simple divisibility constraints;
        // split it first when it does not.
        if all_divs_simple(&psi) {
            queue.push(WorkItem {
                vars: block_vars,
                body: psi,
                since_shrink: 0,
            });
        } else {
            self.counters.simplify_calls += 1;
            let cover = simplify(&psi, self.cfg.fragment, &self.cfg.limits, &self.deadline)?;
            self.event(
                TraceKind::SimplifyCall,
                block_vars.len(),
                cover.members.len(),
                Some(&psi),
                None,
            );
            for member in cover.members {
                if member != Formula::False {
                    queue.push(WorkItem {
                        vars: block_vars.clone(),
                        body: member,
                        since_shrink: 0,
                    });
                }
            }
        }

        while let Some(item) = queue.pop() {
            self.deadline.check()?;
            self.counters.pops += 1;
            self.event(TraceKind::Pop, item.vars.len(), queue.len(), None, None);
            if (queue.len() + done.len()) as u64 > self.cfg.limits.max_disjuncts {
                return Err(SolveError::exceeded("worklist size"));
            }
            let children = self.dispatch(item, sem_state, &mut done)?;
            // A finished disjunct that is literally true settles the whole
            // block's disjunction.
            if done.last() == Some(&Formula::True) {
                return Ok(vec![Formula::True]);
            }
            queue.extend(children);
        }
        Ok(done)
    }

    fn dispatch(
        &mut self,
        item: WorkItem,
        sem_state: &mut SemState,
        done: &mut Vec<Formula>,
    ) -> Result<Vec<WorkItem>, SolveError> {
        let WorkItem {
            vars,
            body,
            since_shrink,
        } = item;
        debug_assert!(since_shrink <= 2, "termination measure violated");
        if body == Formula::False {
            return Ok(Vec::new());
        }
        if body == Formula::True {
            done.push(body);
            return Ok(Vec::new());
        }
        // Disjunctions evolve as separate pairs, including the ones hiding
        // under a negated conjunction.
        if let Formula::Or(a, b) = &body {
            return Ok(vec![
                WorkItem {
                    vars: vars.clone(),
                    body: a.as_ref().clone(),
                    since_shrink,
                },
                WorkItem {
                    vars,
                    body: b.as_ref().clone(),
                    since_shrink,
                },
            ]);
        }
        if let Formula::Not(inner) = &body {
            if let Formula::And(a, b) = &**inner {
                return Ok(vec![
                    WorkItem {
                        vars: vars.clone(),
                        body: refold(&Formula::not(a.as_ref().clone())),
                        since_shrink,
                    },
                    WorkItem {
                        vars,
                        body: refold(&Formula::not(b.as_ref().clone())),
                        since_shrink,
                    },
                ]);
            }
        }
        if vars.is_empty() {
            self.guard_growth(&body)?;
            done.push(body);
            return Ok(Vec::new());
        }
        // Variables that no longer occur are dropped.
        let live: Vec<Var> = vars
            .iter()
            .filter(|x| body.contains_var(x))
            .cloned()
            .collect();
        if live.len() < vars.len() {
            return Ok(vec![WorkItem {
                vars: live,
                body,
                since_shrink: 0,
            }]);
        }
        // A quantifier that keeps the formula inside the fragment is
        // absorbed (only ever fires for the Semenov target).
        if self.cfg.fragment == Fragment::Sem {
            if let Some(i) = vars
                .iter()
                .position(|x| in_fragment(&Formula::exists(x.clone(), body.clone()), Fragment::Sem))
            {
                let x = vars[i].clone();
                let mut rest = vars.clone();
                rest.remove(i);
                return Ok(vec![WorkItem {
                    vars: rest,
                    body: Formula::exists(x, body),
                    since_shrink: 0,
                }]);
            }
        }
        // A variable occurring only linearly is eliminated.
        if let Some(x) = vars.iter().find(|x| body.occurs_only_linearly(x)).cloned() {
            let expanded = expand_abs_var(&body, &x);
            self.guard_growth(&expanded)?;
            self.counters.pres_qe_calls += 1;
            let outs = pres_qe(
                &x,
                &vars,
                &expanded,
                self.cfg.fragment,
                &self.cfg.limits,
                &self.deadline,
            )?;
            self.event(
                TraceKind::PresQeCall,
                vars.len(),
                outs.len(),
                Some(&expanded),
                outs.first().map(|(_, f)| f),
            );
            if self.cfg.paranoid {
                let bodies: Vec<Formula> = outs.iter().map(|(_, f)| f.clone()).collect();
                if let Err(e) = params::check_presburger_round(&expanded, &bodies) {
                    panic!("linear-elimination growth table violated: {e}");
                }
            }
            return outs
                .into_iter()
                .map(|(vs, f)| {
                    self.guard_growth(&f)?;
                    Ok(WorkItem {
                        vars: vs,
                        body: f,
                        since_shrink: since_shrink + 1,
                    })
                })
                .collect();
        }
        // Every remaining block variable occurs under a power somewhere.
        self.counters.sem_cover_calls += 1;
        let before_universals = sem_state.universals();
        let covered = sem_cover(
            &vars,
            &body,
            sem_state,
            self.cfg.fragment,
            &self.cfg.limits,
            &self.deadline,
        )?;
        self.event(
            TraceKind::SemCoverCall,
            vars.len(),
            covered.len(),
            Some(&body),
            covered.first().map(|(_, f)| f),
        );
        if self.cfg.paranoid {
            let bodies: Vec<Formula> = covered.iter().map(|(_, f)| f.clone()).collect();
            if let Err(e) = params::check_sem_round(
                &body,
                vars.len(),
                &bodies,
                sem_state.universals() - before_universals,
            ) {
                panic!("cover growth table violated: {e}");
            }
        }
        self.counters.linearise_calls += 1;
        let outs = linearise(
            covered.clone(),
            self.cfg.fragment,
            &self.cfg.limits,
            &self.deadline,
        )?;
        self.event(
            TraceKind::LineariseCall,
            vars.len(),
            outs.len(),
            None,
            outs.first().map(|(_, f)| f),
        );
        if self.cfg.paranoid {
            if let Err(e) = params::check_linearise_round(&covered, &outs) {
                panic!("linearisation growth table violated: {e}");
            }
        }
        outs.into_iter()
            .map(|(vs, f)| {
                self.guard_growth(&f)?;
                Ok(WorkItem {
                    vars: vs,
                    body: f,
                    since_shrink: since_shrink + 1,
                })
            })
            .collect()
    }
}

/// Splits off the innermost maximal block of like quantifiers.
fn split_innermost(prefix: &[(Quant, Var)]) -> (Vec<(Quant, Var)>, Option<Quant>, Vec<Var>) {
    let Some((kind, _)) = prefix.last() else {
        return (Vec::new(), None, Vec::new());
    };
    let mut i = prefix.len();
    while i > 0 && prefix[i - 1].0 == *kind {
        i -= 1;
    }
    let outer = prefix[..i].to_vec();
    let block = prefix[i..].iter().map(|(_, v)| v.clone()).collect();
    (outer, Some(*kind), block)
}

/// Runs the full procedure on a prenex formula, returning an equivalent
/// formula that is alternation-free modulo the target fragment. Sentences
/// come back variable-free.
pub fn master_procedure(
    phi: &PrenexFormula,
    cfg: &SolveConfig,
) -> Result<SolveOutcome, SolveError> {
    let mut solver = Solver::new(cfg);
    run_master(phi, cfg, &mut solver).map_err(|e| {
        let trace = solver
            .trace
            .iter()
            .map(|ev| serde_json::to_value(ev).unwrap_or_default())
            .collect();
        e.with_trace(trace)
    })
}

fn run_master(
    phi: &PrenexFormula,
    cfg: &SolveConfig,
    solver: &mut Solver,
) -> Result<SolveOutcome, SolveError> {
    let is_sentence = phi.is_sentence();
    let mut prefix = phi.prefix.clone();
    let mut matrix = normalize(&phi.matrix);
    assert!(
        in_fragment(&matrix, cfg.fragment)
            || (cfg.fragment == Fragment::Qf && matrix.is_quantifier_free()),
        "matrix is outside the target fragment"
    );
    let max_blocks = crate::metrics::alt(&phi.to_formula()).max(1);

    loop {
        let (outer, kind, block_vars) = split_innermost(&prefix);
        if block_vars.is_empty() {
            return Ok(SolveOutcome {
                formula: matrix,
                counters: solver.counters,
                trace: std::mem::take(&mut solver.trace),
            });
        }
        solver.counters.blocks += 1;
        assert!(
            solver.counters.blocks <= max_blocks as u64,
            "more outer iterations than quantifier blocks"
        );
        solver.event(
            TraceKind::BlockStart,
            block_vars.len(),
            0,
            Some(&matrix),
            None,
        );

        let negated = kind == Some(Quant::Forall);
        let psi = if negated {
            refold(&negate_to_conjuncts(&matrix))
        } else {
            matrix
        };
        let mut sem_state = SemState::new();
        let mut done = solver.run_block(block_vars, psi, &mut sem_state)?;
        let mut seen = std::collections::HashSet::new();
        done.retain(|f| seen.insert(f.clone()));
        let done = crate::normal::compress_interval_disjuncts(done);
        let disjunction = refold(&Formula::or_all(done));
        solver.event(TraceKind::BlockEnd, 0, 0, None, Some(&disjunction));

        if is_sentence && outer.is_empty() {
            assert!(
                sem_state.universals() == 0,
                "definitional quantifiers escaped from a sentence"
            );
        }
        let appended: Vec<(Quant, Var)> = sem_state
            .pi_prime()
            .iter()
            .map(|w| {
                let q = if negated {
                    Quant::Exists
                } else {
                    Quant::Forall
                };
                (q, w.clone())
            })
            .collect();
        prefix = outer;
        prefix.extend(appended);
        matrix = if negated {
            refold(&Formula::not(disjunction))
        } else {
            disjunction
        };
        let no_more_quantifiers = prefix.is_empty();
        if no_more_quantifiers {
            return Ok(SolveOutcome {
                formula: matrix,
                counters: solver.counters,
                trace: std::mem::take(&mut solver.trace),
            });
        }
        // Definitional universals attached to a still-pending prefix are
        // folded into the next block; nothing else to do here.
    }
}

/// Decides a sentence by running the procedure and evaluating the
/// variable-free result.
pub fn decide_sentence(
    phi: &PrenexFormula,
    cfg: &SolveConfig,
) -> Result<(bool, SolveOutcome), SolveError> {
    assert!(phi.is_sentence(), "decide_sentence needs a sentence");
    let out = master_procedure(phi, cfg)?;
    assert!(
        out.formula.free_vars().is_empty() && out.formula.is_quantifier_free(),
        "sentence did not reduce to a ground formula: {:?}",
        out.formula
    );
    let verdict = eval_ground(&out.formula);
    Ok((verdict, out))
}

/// Outcome of the three-stage pipeline for the powers-of-two predicate
/// theory.
#[derive(Clone, Debug)]
pub struct PrespowerOutcome {
    pub verdict: bool,
    /// Result of the first (Semenov-target) run.
    pub after_sem: Formula,
    /// The octagonal formulas entering the second run, one per disjunct of
    /// the first stage's result that had to be decided.
    pub octagonal: Vec<Formula>,
    pub counters_sem: Counters,
    pub counters_qf: Counters,
    pub trace: Vec<TraceEvent>,
}

/// Decides a sentence of the powers-of-two predicate theory: translate into
/// the power-function language, run the procedure with the Semenov target,
/// take logarithms, and finish with quantifier-free-target runs over the
/// resulting octagonal formulas.
///
/// The first stage returns a disjunction of closed formulas (possibly under
/// one negation). Each disjunct goes through the remaining stages on its
/// own, short-circuiting as soon as the overall truth value is settled.
pub fn decide_prespower(
    sentence: &Formula,
    cfg: &SolveConfig,
) -> Result<PrespowerOutcome, SolveError> {
    assert!(
        sentence.free_vars().is_empty(),
        "the predicate pipeline needs a sentence"
    );
    let phi = translate_prespower(sentence);
    assert!(translation_shape_ok(&phi), "translation left a bad shape");

    let mut sem_cfg = cfg.clone();
    sem_cfg.fragment = Fragment::Sem;
    sem_cfg.assert_oct = false;
    let stage1 = master_procedure(&phi, &sem_cfg)?;

    let (negated, disjuncts) = split_top_or(&stage1.formula);
    let mut trace = stage1.trace.clone();
    let mut counters_qf = Counters::default();
    let mut octagonal = Vec::new();
    let mut any = false;
    for d in disjuncts {
        let v = decide_pc_disjunct(&d, cfg, &mut octagonal, &mut counters_qf, &mut trace)?;
        if v {
            any = true;
            break;
        }
    }
    Ok(PrespowerOutcome {
        verdict: negated != any,
        after_sem: stage1.formula,
        octagonal,
        counters_sem: stage1.counters,
        counters_qf,
        trace,
    })
}

/// Splits a formula into its top-level disjuncts, through at most one
/// leading negation.
fn split_top_or(f: &Formula) -> (bool, Vec<Formula>) {
    fn flatten(f: &Formula, out: &mut Vec<Formula>) {
        match f {
            Formula::Or(a, b) => {
                flatten(a, out);
                flatten(b, out);
            }
            _ => out.push(f.clone()),
        }
    }
    let mut out = Vec::new();
    match f {
        Formula::Not(inner) => {
            flatten(inner, &mut out);
            (true, out)
        }
        _ => {
            flatten(f, &mut out);
            (false, out)
        }
    }
}

fn decide_pc_disjunct(
    d: &Formula,
    cfg: &SolveConfig,
    octagonal: &mut Vec<Formula>,
    counters_qf: &mut Counters,
    trace: &mut Vec<TraceEvent>,
) -> Result<bool, SolveError> {
    if d.is_quantifier_free() && d.free_vars().is_empty() {
        return Ok(eval_ground(d));
    }
    let pren = to_prenex(d);
    let vars: Vec<Var> = pren.prefix.iter().map(|(_, v)| v.clone()).collect();
    let deadline = Deadline::new(&cfg.limits);
    let linearised = linearise(
        vec![(vars, pren.matrix.clone())],
        Fragment::Qf,
        &cfg.limits,
        &deadline,
    )?;
    let psi3 = linearised.into_iter().next().unwrap().1;
    assert!(
        formula_in_oct(&psi3),
        "the linearised stage is not octagonal: {psi3:?}"
    );
    octagonal.push(psi3.clone());

    let mut qf_cfg = cfg.clone();
    qf_cfg.fragment = Fragment::Qf;
    qf_cfg.assert_oct = true;
    let stage2_input = PrenexFormula {
        prefix: pren.prefix,
        matrix: psi3,
    };
    let (verdict, stage2) = decide_sentence(&stage2_input, &qf_cfg)?;
    counters_qf.blocks += stage2.counters.blocks;
    counters_qf.pops += stage2.counters.pops;
    counters_qf.simplify_calls += stage2.counters.simplify_calls;
    counters_qf.pres_qe_calls += stage2.counters.pres_qe_calls;
    counters_qf.sem_cover_calls += stage2.counters.sem_cover_calls;
    counters_qf.linearise_calls += stage2.counters.linearise_calls;
    trace.extend(stage2.trace);
    Ok(verdict)
}

/// Depth-first decision of an existential sentence: instead of keeping every
/// cover member, each subroutine output is explored as a separate branch
/// until some branch reaches a true ground formula.
pub fn decide_existential(phi: &PrenexFormula, cfg: &SolveConfig) -> Result<bool, SolveError> {
    assert!(
        phi.is_sentence() && phi.is_existential(),
        "backtracking strategy needs an existential sentence"
    );
    assert!(phi.matrix.is_quantifier_free());
    let mut solver = Solver::new(cfg);
    solver.counters.blocks = 1;
    let vars: Vec<Var> = phi.prefix.iter().map(|(_, v)| v.clone()).collect();
    let matrix = normalize(&phi.matrix);
    // Preliminary residue split when needed; each member is a branch.
    let roots: Vec<Formula> = if all_divs_simple(&matrix) {
        vec![matrix]
    } else {
        solver.counters.simplify_calls += 1;
        simplify(&matrix, Fragment::Qf, &cfg.limits, &solver.deadline)?.members
    };
    let mut nodes: u64 = 0;
    for root in roots {
        if dfs(
            &mut solver,
            WorkItem {
                vars: vars.clone(),
                body: root,
                since_shrink: 0,
            },
            &mut nodes,
        )? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn dfs(solver: &mut Solver, item: WorkItem, nodes: &mut u64) -> Result<bool, SolveError> {
    solver.deadline.check()?;
    *nodes += 1;
    if *nodes > solver.cfg.limits.max_disjuncts {
        return Err(SolveError::exceeded("backtracking node budget"));
    }
    let mut done: Vec<Formula> = Vec::new();
    solver.counters.pops += 1;
    let mut state = SemState::new();
    let children = solver.dispatch(item, &mut state, &mut done)?;
    assert_eq!(
        state.universals(),
        0,
        "definitional quantifiers cannot arise while deciding an existential sentence"
    );
    for f in done {
        if eval_ground(&f) {
            return Ok(true);
        }
    }
    for child in children {
        if dfs(solver, child, nodes)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Runs the procedure on an arbitrary formula (any shape), returning the
/// simplified equivalent. Open formulas keep their free variables.
pub fn eliminate(f: &Formula, cfg: &SolveConfig) -> Result<SolveOutcome, SolveError> {
    master_procedure(&to_prenex(f), cfg)
}

/// Verdict plus outcome for any sentence of the power-function language,
/// honoring the configured strategy.
pub fn decide(f: &Formula, cfg: &SolveConfig) -> Result<(bool, Counters), SolveError> {
    let f = normalize(f);
    assert!(f.free_vars().is_empty(), "decide needs a sentence");
    let phi = to_prenex(&f);
    match cfg.strategy {
        Strategy::Backtracking if phi.is_existential() && phi.matrix.is_quantifier_free() => {
            let verdict = decide_existential(&phi, cfg)?;
            Ok((verdict, Counters::default()))
        }
        _ => {
            let (verdict, out) = decide_sentence(&phi, cfg)?;
            Ok((verdict, out.counters))
        }
    }
}

/// The arithmetic radius used by oracle tests to bound witness search for
/// covers produced by the linear elimination.
pub fn candidate_radius(f: &Formula, x: &Var) -> BigInt {
    let pairs = crate::qe::presburger::candidate_pairs(f, x);
    let product: BigInt = pairs.iter().map(|(a, _)| a.clone()).product();
    pairs
        .iter()
        .map(|(a, _)| crate::qe::presburger::radius(f, a, &product))
        .max()
        .unwrap_or_else(|| BigInt::from(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_str, Dialect};

    fn pe(s: &str) -> Formula {
        parse_str(s, Dialect::PresExp).unwrap()
    }

    fn cfg() -> SolveConfig {
        SolveConfig::default()
    }

    #[test]
    fn decides_power_equals_eight() {
        let (verdict, _) = decide(&pe("exists x. pow(x) = 8"), &cfg()).unwrap();
        assert!(verdict);
    }

    #[test]
    fn decides_power_equals_three() {
        let (verdict, _) = decide(&pe("exists x. pow(x) = 3"), &cfg()).unwrap();
        assert!(!verdict);
    }

    #[test]
    fn pure_pa_sentence_never_calls_the_cover() {
        // exists x. forall y. (y - x < 0 || x - y - 1 < 0)
        let phi = to_prenex(&pe("exists x. forall y. (y - x < 0 || x - y - 1 < 0)"));
        let (verdict, out) = decide_sentence(&phi, &cfg()).unwrap();
        assert!(verdict);
        assert_eq!(out.counters.sem_cover_calls, 0);
    }

    #[test]
    fn exhaustive_and_backtracking_agree_on_doubling() {
        let f = pe("exists x. exists y. 2*pow(x) - pow(y) = 0");
        let (v1, _) = decide(&f, &cfg()).unwrap();
        let mut bt = cfg();
        bt.strategy = Strategy::Backtracking;
        let (v2, _) = decide(&f, &bt).unwrap();
        assert!(v1 && v2);
    }

    #[test]
    fn trivially_false_power_sentence() {
        let f = pe("exists x. pow(x) < 0");
        let (v1, _) = decide(&f, &cfg()).unwrap();
        assert!(!v1);
        let mut bt = cfg();
        bt.strategy = Strategy::Backtracking;
        let (v2, _) = decide(&f, &bt).unwrap();
        assert!(!v2);
    }

    #[test]
    fn eliminates_open_formulas_equivalently() {
        use crate::eval::{eval_qf, Assignment};
        use num_bigint::BigInt;
        // exists x with y < x < z, true exactly when z - y >= 2
        let f = pe("exists x. y - x < 0 && x - z < 0");
        let out = eliminate(&f, &cfg()).unwrap();
        assert!(out.formula.is_quantifier_free());
        for y in -6i64..=6 {
            for z in -6i64..=6 {
                let mut nu = Assignment::new();
                nu.insert(crate::term::Var::new("y"), BigInt::from(y));
                nu.insert(crate::term::Var::new("z"), BigInt::from(z));
                assert_eq!(eval_qf(&out.formula, &nu), z - y >= 2, "y={y} z={z}");
            }
        }
    }

    #[test]
    fn ground_sentences_decide_directly() {
        assert!(decide(&pe("3 < 5"), &cfg()).unwrap().0);
        assert!(!decide(&pe("2*pow(x) < -1 || 5 < 3"), &cfg()).unwrap().0);
    }

    #[test]
    fn prespower_unbounded_powers() {
        let f = parse_str("forall x. exists y. P(y) && y > x", Dialect::PresPower).unwrap();
        let out = decide_prespower(&f, &cfg()).unwrap();
        assert!(out.verdict);
        assert!(out.octagonal.iter().all(formula_in_oct));
    }
}
