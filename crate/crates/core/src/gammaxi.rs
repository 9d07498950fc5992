//! Good sequences, the enveloping group `Ξ(A)`, and the unit-interval
//! functor `Γ`, with finite round-trip checks.

use std::fmt;

use thiserror::Error;

use crate::algebra::{CarrierError, MvAlgebra};
use crate::carriers::{Carrier, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GammaXiError {
    #[error("not a good sequence: a_{index} ⊕ a_{next} ≠ a_{index}", next = index + 1)]
    NotGood { index: usize },
    #[error("carriers differ: `{left}` vs `{right}`")]
    CarrierMismatch { left: String, right: String },
    #[error(transparent)]
    Carrier(#[from] CarrierError),
}

/// First 1-based index `i` with `aᵢ ⊕ aᵢ₊₁ ≠ aᵢ`, if any.
pub fn first_bad_index(carrier: &Carrier, entries: &[Value]) -> Option<usize> {
    entries.windows(2).position(|w| carrier.oplus(&w[0], &w[1]) != w[0]).map(|i| i + 1)
}

/// Whether `entries` (followed by zeros) is a good sequence.
pub fn is_good(carrier: &Carrier, entries: &[Value]) -> Result<(), GammaXiError> {
    match first_bad_index(carrier, entries) {
        Some(index) => Err(GammaXiError::NotGood { index }),
        None => Ok(()),
    }
}

/// A good sequence with trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GoodSeq {
    carrier: Carrier,
    entries: Vec<Value>,
}

impl GoodSeq {
    pub fn new(carrier: &Carrier, mut entries: Vec<Value>) -> Result<Self, GammaXiError> {
        for e in &entries {
            carrier.check(e)?;
        }
        while entries.last().is_some_and(|e| carrier.is_zero(e)) {
            entries.pop();
        }
        is_good(carrier, &entries)?;
        Ok(GoodSeq { carrier: carrier.clone(), entries })
    }

    pub fn zero(carrier: &Carrier) -> Self {
        GoodSeq { carrier: carrier.clone(), entries: Vec::new() }
    }

    /// The one-term sequence `(a)`; always good.
    pub fn single(carrier: &Carrier, a: &Value) -> Self {
        GoodSeq::new(carrier, vec![a.clone()]).expect("one-term sequences are good")
    }

    /// The unit `(1)`.
    pub fn unit(carrier: &Carrier) -> Self {
        GoodSeq::single(carrier, &carrier.one())
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn entries(&self) -> &[Value] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `aᵢ` with 1-based index; zero past the end, one at index 0.
    fn at(&self, i: usize) -> Value {
        if i == 0 {
            self.carrier.one()
        } else {
            self.entries.get(i - 1).cloned().unwrap_or_else(|| self.carrier.zero())
        }
    }
}

impl fmt::Display for GoodSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| self.carrier.render(e)).collect();
        write!(f, "({})", parts.join(", "))
    }
}

fn same_carrier(a: &GoodSeq, b: &GoodSeq) -> Result<(), GammaXiError> {
    if a.carrier == b.carrier {
        Ok(())
    } else {
        Err(GammaXiError::CarrierMismatch { left: a.carrier.to_string(), right: b.carrier.to_string() })
    }
}

/// `cᵢ = aᵢ ⊕ (aᵢ₋₁ ⊙ b₁) ⊕ ⋯ ⊕ (a₁ ⊙ bᵢ₋₁) ⊕ bᵢ`.
pub fn gs_add(a: &GoodSeq, b: &GoodSeq) -> Result<GoodSeq, GammaXiError> {
    same_carrier(a, b)?;
    let c = &a.carrier;
    let entries = (1..=a.len() + b.len())
        .map(|i| (0..=i).fold(c.zero(), |acc, j| c.oplus(&acc, &c.odot(&a.at(i - j), &b.at(j)))))
        .collect();
    let sum = GoodSeq::new(c, entries);
    assert!(sum.is_ok(), "sum of good sequences is not good");
    sum
}

fn pointwise(a: &GoodSeq, b: &GoodSeq, op: impl Fn(&Value, &Value) -> Value) -> Result<GoodSeq, GammaXiError> {
    same_carrier(a, b)?;
    let n = a.len().max(b.len());
    let entries = (1..=n).map(|i| op(&a.at(i), &b.at(i))).collect();
    let out = GoodSeq::new(&a.carrier, entries);
    assert!(out.is_ok(), "pointwise lattice operation left the good sequences");
    out
}

/// Componentwise `≤` after zero padding.
pub fn gs_leq(a: &GoodSeq, b: &GoodSeq) -> Result<bool, GammaXiError> {
    same_carrier(a, b)?;
    let n = a.len().max(b.len());
    Ok((1..=n).all(|i| a.carrier.leq(&a.at(i), &b.at(i))))
}

pub fn gs_join(a: &GoodSeq, b: &GoodSeq) -> Result<GoodSeq, GammaXiError> {
    pointwise(a, b, |x, y| a.carrier.join(x, y))
}

pub fn gs_meet(a: &GoodSeq, b: &GoodSeq) -> Result<GoodSeq, GammaXiError> {
    pointwise(a, b, |x, y| a.carrier.meet(x, y))
}

/// A formal difference `pos − neg` in `Ξ(A)`. Equality is the cross-sum
/// test `pos + neg' = pos' + neg`.
#[derive(Debug, Clone)]
pub struct XiElem {
    pub pos: GoodSeq,
    pub neg: GoodSeq,
}

impl XiElem {
    pub fn new(pos: GoodSeq, neg: GoodSeq) -> Result<Self, GammaXiError> {
        same_carrier(&pos, &neg)?;
        Ok(XiElem { pos, neg })
    }

    pub fn zero(carrier: &Carrier) -> Self {
        XiElem { pos: GoodSeq::zero(carrier), neg: GoodSeq::zero(carrier) }
    }

    pub fn unit(carrier: &Carrier) -> Self {
        XiElem { pos: GoodSeq::unit(carrier), neg: GoodSeq::zero(carrier) }
    }

    /// The embedding `a ↦ ((a), ())`.
    pub fn embed(carrier: &Carrier, a: &Value) -> Self {
        XiElem { pos: GoodSeq::single(carrier, a), neg: GoodSeq::zero(carrier) }
    }

    pub fn carrier(&self) -> &Carrier {
        &self.pos.carrier
    }

    pub fn equiv(&self, other: &XiElem) -> Result<bool, GammaXiError> {
        Ok(gs_add(&self.pos, &other.neg)? == gs_add(&other.pos, &self.neg)?)
    }
}

impl PartialEq for XiElem {
    fn eq(&self, other: &Self) -> bool {
        self.equiv(other).unwrap_or(false)
    }
}

impl fmt::Display for XiElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} - {}", self.pos, self.neg)
    }
}

pub fn xi_add(x: &XiElem, y: &XiElem) -> Result<XiElem, GammaXiError> {
    XiElem::new(gs_add(&x.pos, &y.pos)?, gs_add(&x.neg, &y.neg)?)
}

pub fn xi_negate(x: &XiElem) -> XiElem {
    XiElem { pos: x.neg.clone(), neg: x.pos.clone() }
}

pub fn xi_sub(x: &XiElem, y: &XiElem) -> Result<XiElem, GammaXiError> {
    xi_add(x, &xi_negate(y))
}

/// `(a,b) ≤ (c,d)` iff `a + d ≤ c + b`.
pub fn xi_leq(x: &XiElem, y: &XiElem) -> Result<bool, GammaXiError> {
    gs_leq(&gs_add(&x.pos, &y.neg)?, &gs_add(&y.pos, &x.neg)?)
}

/// `(a,b) ∨ (c,d) = ((a+d) ∨ (c+b), b+d)`.
pub fn xi_join(x: &XiElem, y: &XiElem) -> Result<XiElem, GammaXiError> {
    let pos = gs_join(&gs_add(&x.pos, &y.neg)?, &gs_add(&y.pos, &x.neg)?)?;
    XiElem::new(pos, gs_add(&x.neg, &y.neg)?)
}

/// `(a,b) ∧ (c,d) = ((a+d) ∧ (c+b), b+d)`.
pub fn xi_meet(x: &XiElem, y: &XiElem) -> Result<XiElem, GammaXiError> {
    let pos = gs_meet(&gs_add(&x.pos, &y.neg)?, &gs_add(&y.pos, &x.neg)?)?;
    XiElem::new(pos, gs_add(&x.neg, &y.neg)?)
}

/// Every good sequence over a finite carrier with at most `max_len` nonzero
/// entries, by depth-first extension under the goodness test.
pub fn enumerate_good_sequences(carrier: &Carrier, max_len: usize) -> Result<Vec<GoodSeq>, GammaXiError> {
    let all = carrier.elements().ok_or_else(|| CarrierError::NotFinite(carrier.to_string()))?;
    let nonzero: Vec<Value> = all.into_iter().filter(|v| !carrier.is_zero(v)).collect();
    let mut out = Vec::new();
    let mut stack: Vec<Vec<Value>> = vec![Vec::new()];
    while let Some(prefix) = stack.pop() {
        if prefix.len() < max_len {
            for y in nonzero.iter().rev() {
                if prefix.last().is_none_or(|p| carrier.oplus(p, y) == *p) {
                    let mut next = prefix.clone();
                    next.push(y.clone());
                    stack.push(next);
                }
            }
        }
        out.push(GoodSeq { carrier: carrier.clone(), entries: prefix });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaReport {
    pub carrier: Carrier,
    /// Equivalence classes of `Ξ(A)` found in `[0, unit]`.
    pub gamma_size: usize,
    pub carrier_size: usize,
    /// Formal differences examined.
    pub candidates: usize,
    pub injective: bool,
    pub surjective: bool,
    pub preserves_oplus: bool,
    pub preserves_neg: bool,
}

impl GammaReport {
    pub fn ok(&self) -> bool {
        self.injective && self.surjective && self.preserves_oplus && self.preserves_neg
    }
}

/// `Γ(Ξ(A), (1))` computed from formal differences of good sequences with at
/// most `max_len` entries, compared with `A` along `a ↦ ((a), ())`.
pub fn gamma_of_xi(carrier: &Carrier, max_len: usize) -> Result<GammaReport, GammaXiError> {
    let all = carrier.elements().ok_or_else(|| CarrierError::NotFinite(carrier.to_string()))?;
    let seqs = enumerate_good_sequences(carrier, max_len)?;
    let zero = XiElem::zero(carrier);
    let unit = XiElem::unit(carrier);

    let mut classes: Vec<XiElem> = Vec::new();
    let mut candidates = 0;
    for p in &seqs {
        for n in &seqs {
            candidates += 1;
            let x = XiElem { pos: p.clone(), neg: n.clone() };
            if xi_leq(&zero, &x)? && xi_leq(&x, &unit)? && !classes.iter().any(|c| c == &x) {
                classes.push(x);
            }
        }
    }

    let image: Vec<XiElem> = all.iter().map(|a| XiElem::embed(carrier, a)).collect();
    let mut injective = true;
    for i in 0..image.len() {
        for j in i + 1..image.len() {
            if image[i] == image[j] {
                injective = false;
            }
        }
    }
    let surjective = classes.iter().all(|x| image.iter().any(|e| e == x));

    let mut preserves_oplus = true;
    let mut preserves_neg = true;
    for (a, ea) in all.iter().zip(&image) {
        let neg_image = xi_sub(&unit, ea)?;
        preserves_neg &= XiElem::embed(carrier, &carrier.neg(a)) == neg_image;
        for (b, eb) in all.iter().zip(&image) {
            let truncated = xi_meet(&xi_add(ea, eb)?, &unit)?;
            preserves_oplus &= XiElem::embed(carrier, &carrier.oplus(a, b)) == truncated;
        }
    }

    Ok(GammaReport {
        carrier: carrier.clone(),
        gamma_size: classes.len(),
        carrier_size: all.len(),
        candidates,
        injective,
        surjective,
        preserves_oplus,
        preserves_neg,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainIsoReport {
    pub n: u32,
    pub bound: u32,
    /// Good sequences with entry sum at most `bound`.
    pub sequences: usize,
    /// The depth-first enumeration agrees with the closed form
    /// `(1, …, 1, k/n)`.
    pub matches_closed_form: bool,
    /// Entry sum is a bijection onto `{0, 1/n, …, bound}`.
    pub bijective: bool,
    pub additive: bool,
    pub order_preserving: bool,
    /// The unit `(1)` has entry sum `1`, i.e. `n` steps.
    pub unit_maps_to_n: bool,
}

impl ChainIsoReport {
    pub fn ok(&self) -> bool {
        self.matches_closed_form && self.bijective && self.additive && self.order_preserving && self.unit_maps_to_n
    }
}

fn step_sum(seq: &GoodSeq) -> u64 {
    seq.entries
        .iter()
        .map(|e| match e {
            Value::Step(k) => u64::from(*k),
            other => panic!("chain sequence holds non-chain entry {other}"),
        })
        .sum()
}

/// Check that entry sum, measured in steps of `1/n`, is an ordered monoid
/// isomorphism from the good sequences of `Ł_n` onto `ℕ`, on every good
/// sequence whose entries sum to at most `bound`.
pub fn xi_chain_iso(n: u32, bound: u32) -> ChainIsoReport {
    assert!(n >= 1, "chain order must be positive");
    let carrier = Carrier::Chain(n);
    let limit = u64::from(n) * u64::from(bound);
    let mut seqs: Vec<GoodSeq> = enumerate_good_sequences(&carrier, limit as usize)
        .expect("chains are finite")
        .into_iter()
        .filter(|s| step_sum(s) <= limit)
        .collect();
    seqs.sort_by_key(step_sum);

    let closed_form: Vec<GoodSeq> = (0..=limit)
        .map(|s| {
            let mut entries = vec![Value::Step(n); (s / u64::from(n)) as usize];
            let rest = (s % u64::from(n)) as u32;
            if rest > 0 {
                entries.push(Value::Step(rest));
            }
            GoodSeq::new(&carrier, entries).expect("closed form is good")
        })
        .collect();
    let matches_closed_form = seqs == closed_form;

    let sums: Vec<u64> = seqs.iter().map(step_sum).collect();
    let bijective = sums == (0..=limit).collect::<Vec<_>>();

    let mut additive = true;
    let mut order_preserving = true;
    for a in &seqs {
        for b in &seqs {
            let (sa, sb) = (step_sum(a), step_sum(b));
            if sa + sb <= limit {
                additive &= step_sum(&gs_add(a, b).expect("same carrier")) == sa + sb;
            }
            order_preserving &= gs_leq(a, b).expect("same carrier") == (sa <= sb);
        }
    }
    let unit_maps_to_n = step_sum(&GoodSeq::unit(&carrier)) == u64::from(n);

    ChainIsoReport {
        n,
        bound,
        sequences: seqs.len(),
        matches_closed_form,
        bijective,
        additive,
        order_preserving,
        unit_maps_to_n,
    }
}
