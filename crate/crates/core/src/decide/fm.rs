//! Exact Fourier–Motzkin elimination over ℚ with strict and non-strict rows.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{format_rat, Rat};

/// `Σ cᵥ·v + constant`, with absent variables meaning a zero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AffineForm {
    pub coeffs: BTreeMap<String, Rat>,
    pub constant: Rat,
}

impl AffineForm {
    pub fn constant(c: Rat) -> Self {
        AffineForm { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn var(name: &str) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.to_string(), Rat::one());
        AffineForm { coeffs, constant: Rat::zero() }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, v: &str) -> Rat {
        self.coeffs.get(v).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add(&self, other: &AffineForm) -> AffineForm {
        self.add_scaled(other, &Rat::one())
    }

    pub fn sub(&self, other: &AffineForm) -> AffineForm {
        self.add_scaled(other, &-Rat::one())
    }

    /// `self + k·other`.
    pub fn add_scaled(&self, other: &AffineForm, k: &Rat) -> AffineForm {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            let entry = out.coeffs.entry(v.clone()).or_insert_with(Rat::zero);
            *entry += c * k;
            if entry.is_zero() {
                out.coeffs.remove(v);
            }
        }
        out.constant += &other.constant * k;
        out
    }

    pub fn scale(&self, k: &Rat) -> AffineForm {
        if k.is_zero() {
            return AffineForm::default();
        }
        AffineForm {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    /// `1 - self`.
    pub fn complement(&self) -> AffineForm {
        AffineForm::constant(Rat::one()).sub(self)
    }

    pub fn eval(&self, assign: &BTreeMap<String, Rat>) -> Rat {
        self.coeffs.iter().fold(self.constant.clone(), |acc, (v, c)| {
            acc + c * assign.get(v).cloned().unwrap_or_else(Rat::zero)
        })
    }

    /// Substitute known values, leaving the rest symbolic.
    pub fn partial_eval(&self, assign: &BTreeMap<String, Rat>) -> AffineForm {
        let mut out = AffineForm::constant(self.constant.clone());
        for (v, c) in &self.coeffs {
            match assign.get(v) {
                Some(val) => out.constant += c * val,
                None => {
                    out.coeffs.insert(v.clone(), c.clone());
                }
            }
        }
        out
    }

    pub fn vars(&self) -> impl Iterator<Item = &String> {
        self.coeffs.keys()
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag.is_one() {
                f.write_str(v)?;
            } else {
                write!(f, "{}*{}", format_rat(&mag), v)?;
            }
            first = false;
        }
        if first {
            return f.write_str(&format_rat(&self.constant));
        }
        if !self.constant.is_zero() {
            let sign = if self.constant.is_negative() { "-" } else { "+" };
            write!(f, " {sign} {}", format_rat(&self.constant.abs()))?;
        }
        Ok(())
    }
}

/// `form ≥ 0`, or `form > 0` when `strict`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub form: AffineForm,
    pub strict: bool,
}

impl Constraint {
    pub fn nonneg(form: AffineForm) -> Self {
        Constraint { form, strict: false }
    }

    pub fn positive(form: AffineForm) -> Self {
        Constraint { form, strict: true }
    }

    /// Rows for `0 ≤ v ≤ 1`.
    pub fn unit_box(v: &str) -> [Constraint; 2] {
        let x = AffineForm::var(v);
        [Constraint::nonneg(x.clone()), Constraint::nonneg(x.complement())]
    }

    pub fn holds(&self, assign: &BTreeMap<String, Rat>) -> bool {
        let v = self.form.eval(assign);
        if self.strict {
            v.is_positive()
        } else {
            !v.is_negative()
        }
    }

    /// Truth value of a variable-free row.
    fn constant_truth(&self) -> Option<bool> {
        if !self.form.is_constant() {
            return None;
        }
        let c = &self.form.constant;
        Some(if self.strict { c.is_positive() } else { !c.is_negative() })
    }

    /// Scale so the leading coefficient has magnitude one.
    fn normalized(&self) -> Constraint {
        match self.form.coeffs.values().next() {
            Some(lead) => Constraint { form: self.form.scale(&lead.abs().recip()), strict: self.strict },
            None => self.clone(),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} 0", self.form, if self.strict { ">" } else { ">=" })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowLimitExceeded {
    pub rows: usize,
    pub limit: usize,
}

/// Rows produced during a single elimination step beyond which we give up.
pub const DEFAULT_ROW_LIMIT: usize = 50_000;

/// Drop constant-true rows, detect constant-false ones, and keep only the
/// tightest row per coefficient vector. Returns `None` on a contradiction.
fn prune(rows: Vec<Constraint>) -> Option<Vec<Constraint>> {
    let mut best: HashMap<BTreeMap<String, Rat>, (Rat, bool)> = HashMap::new();
    let mut order: Vec<BTreeMap<String, Rat>> = Vec::new();
    for row in rows {
        if let Some(truth) = row.constant_truth() {
            if !truth {
                return None;
            }
            continue;
        }
        let row = row.normalized();
        let AffineForm { coeffs, constant } = row.form;
        match best.get_mut(&coeffs) {
            Some((c, strict)) => {
                if constant < *c || (constant == *c && row.strict) {
                    *c = constant;
                    *strict = row.strict;
                }
            }
            None => {
                order.push(coeffs.clone());
                best.insert(coeffs, (constant, row.strict));
            }
        }
    }
    Some(
        order
            .into_iter()
            .map(|coeffs| {
                let (constant, strict) = best.remove(&coeffs).expect("row recorded");
                Constraint { form: AffineForm { coeffs, constant }, strict }
            })
            .collect(),
    )
}

/// One elimination step on `v`.
fn eliminate(rows: &[Constraint], v: &str, limit: usize) -> Result<Option<Vec<Constraint>>, RowLimitExceeded> {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut rest = Vec::new();
    for r in rows {
        let c = r.form.coeff(v);
        if c.is_positive() {
            lower.push((r, c));
        } else if c.is_negative() {
            upper.push((r, -c));
        } else {
            rest.push(r.clone());
        }
    }
    let produced = lower.len() * upper.len();
    if produced + rest.len() > limit {
        return Err(RowLimitExceeded { rows: produced + rest.len(), limit });
    }
    for (lo, cl) in &lower {
        for (hi, ch) in &upper {
            let form = lo.form.scale(&cl.recip()).add(&hi.form.scale(&ch.recip()));
            rest.push(Constraint { form, strict: lo.strict || hi.strict });
        }
    }
    Ok(prune(rest))
}

fn variables(rows: &[Constraint]) -> Vec<String> {
    let vars: BTreeSet<&String> = rows.iter().flat_map(|r| r.form.vars()).collect();
    vars.into_iter().cloned().collect()
}

/// Decide whether the conjunction of `rows` has a rational solution.
pub fn is_feasible(rows: &[Constraint], limit: usize) -> Result<bool, RowLimitExceeded> {
    let Some(mut cur) = prune(rows.to_vec()) else {
        return Ok(false);
    };
    for v in variables(&cur) {
        match eliminate(&cur, &v, limit)? {
            Some(next) => cur = next,
            None => return Ok(false),
        }
    }
    Ok(true)
}

/// Find a rational solution, if one exists.
///
/// Variables are eliminated in lexicographic order and assigned in reverse
/// by back-substitution. Each variable receives the rational with the
/// smallest denominator inside its admissible interval.
pub fn solve(rows: &[Constraint], limit: usize) -> Result<Option<BTreeMap<String, Rat>>, RowLimitExceeded> {
    let Some(mut cur) = prune(rows.to_vec()) else {
        return Ok(None);
    };
    let vars = variables(&cur);
    let mut stages = Vec::with_capacity(vars.len());
    for v in &vars {
        stages.push(cur.clone());
        match eliminate(&cur, v, limit)? {
            Some(next) => cur = next,
            None => return Ok(None),
        }
    }
    let mut assign = BTreeMap::new();
    for (v, rows) in vars.iter().zip(stages.iter()).rev() {
        let value = pick_value(rows, v, &assign);
        assign.insert(v.clone(), value);
    }
    debug_assert!(rows.iter().all(|r| r.holds(&assign)));
    Ok(Some(assign))
}

#[derive(Clone)]
struct Bound {
    value: Rat,
    strict: bool,
}

fn pick_value(rows: &[Constraint], v: &str, known: &BTreeMap<String, Rat>) -> Rat {
    let mut lo: Option<Bound> = None;
    let mut hi: Option<Bound> = None;
    for r in rows {
        let c = r.form.coeff(v);
        if c.is_zero() {
            continue;
        }
        let rest = r.form.partial_eval(known);
        // only v should remain symbolic at this stage
        let rest_const = rest.constant.clone();
        let bound = Bound { value: -rest_const / &c, strict: r.strict };
        if c.is_positive() {
            if lo.as_ref().map_or(true, |b| bound.value > b.value || (bound.value == b.value && bound.strict)) {
                lo = Some(bound);
            }
        } else if hi.as_ref().map_or(true, |b| bound.value < b.value || (bound.value == b.value && bound.strict)) {
            hi = Some(bound);
        }
    }
    simplest_between(lo.as_ref(), hi.as_ref())
}

const SIMPLEST_DENOMINATOR_LIMIT: u32 = 1024;

/// Smallest-denominator rational in the interval (then smallest magnitude),
/// falling back to the midpoint when no denominator up to the search limit
/// fits.
fn simplest_between(lo: Option<&Bound>, hi: Option<&Bound>) -> Rat {
    match (lo, hi) {
        (None, None) => Rat::zero(),
        (Some(l), None) => {
            let f = l.value.floor();
            if !l.strict && l.value == f { f } else { f + Rat::one() }
        }
        (None, Some(h)) => {
            let c = h.value.ceil();
            if !h.strict && h.value == c { c } else { c - Rat::one() }
        }
        (Some(l), Some(h)) => {
            if l.value == h.value {
                return l.value.clone();
            }
            let inside = |x: &Rat| {
                (if l.strict { *x > l.value } else { *x >= l.value })
                    && (if h.strict { *x < h.value } else { *x <= h.value })
            };
            for q in 1..=SIMPLEST_DENOMINATOR_LIMIT {
                let qb = BigInt::from(q);
                // smallest p with p/q ≥ lo
                let scaled = &l.value * Rat::from_integer(qb.clone());
                let mut p = scaled.ceil().to_integer();
                let candidate = Rat::new(p.clone(), qb.clone());
                if !inside(&candidate) {
                    p += 1;
                }
                let candidate = Rat::new(p, qb);
                if inside(&candidate) {
                    return candidate;
                }
            }
            (&l.value + &h.value) / Rat::from_integer(2.into())
        }
    }
}
