//! Decision procedure for MV and finite-δ (in)equations.
//!
//! Every core term denotes a continuous piecewise-affine map `[0,1]ⁿ → [0,1]`.
//! [`compile`] enumerates its pieces as `(guard, affine form)` pairs by case
//! splitting each `⊕` on whether the sum reaches `1`. An inequation
//! `l ≤ r` fails iff some pair of pieces admits a point with `a_l − a_r > 0`
//! inside both guards, which is an exact linear feasibility question answered
//! by Fourier–Motzkin elimination. Validity over `[0,1]` is validity in every
//! MV-algebra by Chang completeness.

pub mod fm;

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::UnitInterval;
use crate::arith::{Q01, Rat};
use crate::term::{evaluate, Equation, Relation, Term};

pub use fm::{AffineForm, Constraint};

/// Conjunction of affine rows; always includes the unit box of every variable
/// when used for a feasibility query.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Guard {
    pub constraints: Vec<Constraint>,
}

impl Guard {
    fn push(&mut self, c: Constraint) {
        if !self.constraints.contains(&c) {
            self.constraints.push(c);
        }
    }

    fn union(&self, other: &Guard) -> Guard {
        let mut g = self.clone();
        for c in &other.constraints {
            g.push(c.clone());
        }
        g
    }
}

/// One region of a compiled term: on `guard` the term equals `form`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub guard: Guard,
    pub form: AffineForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideConfig {
    /// Cap on pieces per term and on piece pairs per query.
    pub piece_budget: usize,
    /// Cap on rows produced by one Fourier–Motzkin step.
    pub row_limit: usize,
}

impl Default for DecideConfig {
    fn default() -> Self {
        DecideConfig { piece_budget: 1 << 16, row_limit: fm::DEFAULT_ROW_LIMIT }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetReport {
    pub what: &'static str,
    pub count: usize,
    pub limit: usize,
}

impl fmt::Display for BudgetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} count {} exceeds limit {}", self.what, self.count, self.limit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("term contains sugar nodes; expand it first")]
    NotCore,
    #[error("budget exceeded: {0}")]
    Budget(BudgetReport),
}

/// A point where the (in)equation fails, with both sides evaluated there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub assign: BTreeMap<String, Q01>,
    pub lhs: Q01,
    pub rhs: Q01,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let assign: Vec<String> = self.assign.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{} (lhs={}, rhs={})", assign.join(","), self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Counterexample(Counterexample),
    LimitExceeded(BudgetReport),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Counterexample(c) => Some(c),
            _ => None,
        }
    }

    /// Discriminant only, for symmetry checks.
    pub fn class(&self) -> &'static str {
        match self {
            Verdict::Valid => "valid",
            Verdict::Counterexample(_) => "counterexample",
            Verdict::LimitExceeded(_) => "limit",
        }
    }
}

struct Compiler<'a> {
    box_rows: &'a [Constraint],
    config: DecideConfig,
}

impl Compiler<'_> {
    fn feasible(&self, guard: &Guard) -> Result<bool, CompileError> {
        let mut rows = self.box_rows.to_vec();
        rows.extend(guard.constraints.iter().cloned());
        fm::is_feasible(&rows, self.config.row_limit).map_err(|e| {
            CompileError::Budget(BudgetReport { what: "elimination rows", count: e.rows, limit: e.limit })
        })
    }

    fn check_count(&self, n: usize) -> Result<(), CompileError> {
        if n > self.config.piece_budget {
            return Err(CompileError::Budget(BudgetReport {
                what: "pieces",
                count: n,
                limit: self.config.piece_budget,
            }));
        }
        Ok(())
    }

    fn compile(&self, t: &Term) -> Result<Vec<Piece>, CompileError> {
        match t {
            Term::Var(v) => Ok(vec![Piece { guard: Guard::default(), form: AffineForm::var(v) }]),
            Term::Const(q) => Ok(vec![Piece { guard: Guard::default(), form: AffineForm::constant(q.as_rat().clone()) }]),
            Term::Neg(t) => Ok(self
                .compile(t)?
                .into_iter()
                .map(|p| Piece { guard: p.guard, form: p.form.complement() })
                .collect()),
            Term::Oplus(l, r) => {
                let left = self.compile(l)?;
                let right = self.compile(r)?;
                self.check_count(left.len() * right.len())?;
                let one = AffineForm::constant(Rat::from_integer(1.into()));
                let mut out = Vec::new();
                for pl in &left {
                    for pr in &right {
                        let guard = pl.guard.union(&pr.guard);
                        let sum = pl.form.add(&pr.form);
                        let slack = one.sub(&sum);
                        if slack.is_constant() {
                            let form = if slack.constant >= Rat::from_integer(0.into()) { sum } else { one.clone() };
                            if self.feasible(&guard)? {
                                out.push(Piece { guard, form });
                            }
                            continue;
                        }
                        let mut below = guard.clone();
                        below.push(Constraint::nonneg(slack.clone()));
                        if self.feasible(&below)? {
                            out.push(Piece { guard: below, form: sum });
                        }
                        let mut above = guard;
                        above.push(Constraint::nonneg(slack.scale(&-Rat::from_integer(1.into()))));
                        if self.feasible(&above)? {
                            out.push(Piece { guard: above, form: one.clone() });
                        }
                        self.check_count(out.len())?;
                    }
                }
                Ok(out)
            }
            Term::Delta(seq) => {
                // Σ pᵢ/2ⁱ + c/2ᵏ needs no split: the sum never exceeds 1.
                let mut acc = vec![Piece { guard: Guard::default(), form: AffineForm::default() }];
                let mut weight = Rat::from_integer(1.into());
                let half = Rat::new(1.into(), 2.into());
                let parts = seq.prefix.iter().map(|p| (p, true)).chain(std::iter::once((&*seq.tail, false)));
                for (arg, halve) in parts {
                    if halve {
                        weight *= &half;
                    }
                    let pieces = self.compile(arg)?;
                    self.check_count(acc.len() * pieces.len())?;
                    let mut next = Vec::new();
                    for a in &acc {
                        for p in &pieces {
                            let guard = a.guard.union(&p.guard);
                            if p.guard.constraints.is_empty() || a.guard.constraints.is_empty() || self.feasible(&guard)? {
                                next.push(Piece { guard, form: a.form.add_scaled(&p.form, &weight) });
                            }
                        }
                    }
                    acc = next;
                }
                Ok(acc)
            }
            _ => Err(CompileError::NotCore),
        }
    }
}

fn box_rows(vars: impl IntoIterator<Item = String>) -> Vec<Constraint> {
    vars.into_iter().flat_map(|v| Constraint::unit_box(&v)).collect()
}

/// Pieces of a core term covering `[0,1]ⁿ`, where `n` ranges over its free
/// variables.
pub fn compile(t: &Term, config: DecideConfig) -> Result<Vec<Piece>, CompileError> {
    let rows = box_rows(t.free_vars());
    Compiler { box_rows: &rows, config }.compile(t)
}

fn replay(eq: &Equation, assign: &BTreeMap<String, Q01>) -> (Q01, Q01) {
    let lhs = evaluate(&eq.lhs, assign, &UnitInterval).expect("witness binds every variable");
    let rhs = evaluate(&eq.rhs, assign, &UnitInterval).expect("witness binds every variable");
    (lhs, rhs)
}

/// Search for a point where `lhs > rhs`.
fn find_excess(lhs: &Term, rhs: &Term, config: DecideConfig) -> Result<Option<BTreeMap<String, Q01>>, BudgetReport> {
    let mut vars = lhs.free_vars();
    vars.extend(rhs.free_vars());
    let rows = box_rows(vars.iter().cloned());
    let compiler = Compiler { box_rows: &rows, config };
    let as_budget = |e: CompileError| match e {
        CompileError::Budget(b) => b,
        CompileError::NotCore => unreachable!("terms are expanded before compiling"),
    };
    let left = compiler.compile(&lhs.expand()).map_err(as_budget)?;
    let right = compiler.compile(&rhs.expand()).map_err(as_budget)?;
    let pairs = left.len() * right.len();
    if pairs > config.piece_budget {
        return Err(BudgetReport { what: "piece pairs", count: pairs, limit: config.piece_budget });
    }
    let jobs: Vec<(&Piece, &Piece)> = left.iter().flat_map(|l| right.iter().map(move |r| (l, r))).collect();
    let found = jobs
        .par_iter()
        .map(|(l, r)| {
            let mut q = rows.clone();
            q.extend(l.guard.constraints.iter().cloned());
            q.extend(r.guard.constraints.iter().cloned());
            q.push(Constraint::positive(l.form.sub(&r.form)));
            fm::solve(&q, config.row_limit)
        })
        .find_map_first(|res| match res {
            Ok(Some(w)) => Some(Ok(w)),
            Ok(None) => None,
            Err(e) => Some(Err(e)),
        });
    match found {
        None => Ok(None),
        Some(Err(e)) => Err(BudgetReport { what: "elimination rows", count: e.rows, limit: e.limit }),
        Some(Ok(w)) => {
            let mut assign: BTreeMap<String, Q01> = w
                .into_iter()
                .map(|(k, v)| (k, Q01::try_from_rat(v).expect("witness inside the unit box")))
                .collect();
            for v in vars {
                assign.entry(v).or_insert_with(Q01::zero);
            }
            Ok(Some(assign))
        }
    }
}

/// Decide `lhs ≤ rhs` over all MV-algebras (δ-algebras for δ-terms).
pub fn decide_leq(lhs: &Term, rhs: &Term, config: DecideConfig) -> Verdict {
    decide(&Equation::leq(lhs.clone(), rhs.clone()), config)
}

/// Decide `lhs = rhs`, as the two inequations `lhs ≤ rhs` and `rhs ≤ lhs`.
pub fn decide_eq(lhs: &Term, rhs: &Term, config: DecideConfig) -> Verdict {
    decide(&Equation::eq(lhs.clone(), rhs.clone()), config)
}

pub fn decide(eq: &Equation, config: DecideConfig) -> Verdict {
    let mut directions = vec![(&eq.lhs, &eq.rhs)];
    if eq.rel == Relation::Eq {
        directions.push((&eq.rhs, &eq.lhs));
    }
    for (big, small) in directions {
        match find_excess(big, small, config) {
            Err(report) => return Verdict::LimitExceeded(report),
            Ok(None) => {}
            Ok(Some(assign)) => {
                let (lhs, rhs) = replay(eq, &assign);
                assert!(
                    !eq.holds_for(&UnitInterval, &lhs, &rhs),
                    "witness for `{eq}` does not replay: {assign:?}"
                );
                return Verdict::Counterexample(Counterexample { assign, lhs, rhs });
            }
        }
    }
    Verdict::Valid
}

/// Evaluate both sides at `trials` seeded dyadic points `k/2^depth` and
/// return the first failing assignment.
pub fn sample_falsify(eq: &Equation, trials: u64, seed: u64, depth: u32) -> Option<Counterexample> {
    assert!(trials >= 1, "trials must be positive");
    let vars: Vec<String> = eq.free_vars().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = 1u64 << depth;
    for _ in 0..trials {
        let assign: BTreeMap<String, Q01> =
            vars.iter().map(|v| (v.clone(), Q01::dyadic(rng.gen_range(0..=top), depth))).collect();
        let (lhs, rhs) = replay(eq, &assign);
        if !eq.holds_for(&UnitInterval, &lhs, &rhs) {
            return Some(Counterexample { assign, lhs, rhs });
        }
    }
    None
}
