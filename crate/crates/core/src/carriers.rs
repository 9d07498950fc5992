//! Concrete MV-algebras: finite Łukasiewicz chains, Chang's algebra,
//! finite products, and a runtime-selected [`Carrier`] wrapping all of them.
//!
//! Also hosts the ideal-theoretic computations: ideals of finite carriers,
//! the radical, infinitesimals, and the halving obstruction in Chang's
//! algebra.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::One;
use thiserror::Error;

use crate::algebra::{CarrierError, MvAlgebra, UnitInterval};
use crate::arith::{Q01, Rat};
use crate::plfunc::{PLFunc, PlCarrier};

/// The chain `Ł_n = {0, 1/n, …, 1}`, elements stored as numerators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FiniteChain {
    pub n: u32,
}

impl FiniteChain {
    pub fn new(n: u32) -> Self {
        assert!(n >= 1, "chain order must be positive");
        FiniteChain { n }
    }

    pub fn value(&self, k: u32) -> Q01 {
        Q01::try_from_rat(Rat::new(k.into(), self.n.into())).expect("chain element in range")
    }
}

impl MvAlgebra for FiniteChain {
    type Elem = u32;

    fn name(&self) -> String {
        format!("chain:{}", self.n)
    }

    fn zero(&self) -> u32 {
        0
    }

    fn oplus(&self, x: &u32, y: &u32) -> u32 {
        (x + y).min(self.n)
    }

    fn neg(&self, x: &u32) -> u32 {
        self.n - x
    }

    fn leq(&self, x: &u32, y: &u32) -> bool {
        x <= y
    }

    fn constant(&self, q: &Q01) -> Result<u32, CarrierError> {
        let scaled = q.as_rat() * Rat::from_integer(self.n.into());
        if scaled.is_integer() {
            Ok(u32::try_from(scaled.to_integer()).expect("at most n"))
        } else {
            Err(CarrierError::ConstantNotInCarrier { constant: q.to_string(), carrier: self.name() })
        }
    }

    fn elements(&self) -> Option<Vec<u32>> {
        Some((0..=self.n).collect())
    }
}

/// An element of Chang's algebra `Γ(ℤ ×_lex ℤ, (1,0))`.
///
/// `(0, k)` with `k ≥ 0` and `(1, -k)` with `k ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChangElem {
    level: u8,
    offset: i64,
}

impl ChangElem {
    pub fn new(level: u8, offset: i64) -> Option<Self> {
        match level {
            0 if offset >= 0 => Some(ChangElem { level, offset }),
            1 if offset <= 0 => Some(ChangElem { level, offset }),
            _ => None,
        }
    }

    pub fn level(&self) -> u8 {
        self.level
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn zero() -> Self {
        ChangElem { level: 0, offset: 0 }
    }

    pub fn unit() -> Self {
        ChangElem { level: 1, offset: 0 }
    }

    /// The `k`-th multiple of the infinitesimal generator, `(0, k)`.
    pub fn infinitesimal(k: i64) -> Self {
        ChangElem::new(0, k).expect("k >= 0")
    }

    /// Every element with `|offset| ≤ bound`, in lexicographic order.
    pub fn bounded(bound: i64) -> Vec<ChangElem> {
        let low = (0..=bound).map(|k| ChangElem { level: 0, offset: k });
        let high = (-bound..=0).map(|k| ChangElem { level: 1, offset: k });
        low.chain(high).collect()
    }
}

impl PartialOrd for ChangElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ChangElem {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.level, self.offset).cmp(&(other.level, other.offset))
    }
}

impl fmt::Display for ChangElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.level, self.offset)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed Chang element `{0}`, expected (0,k) with k>=0 or (1,k) with k<=0")]
pub struct ChangParseError(String);

impl FromStr for ChangElem {
    type Err = ChangParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ChangParseError(s.to_string());
        let inner = s.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(err)?;
        let (l, o) = inner.split_once(',').ok_or_else(err)?;
        let level: u8 = l.trim().parse().map_err(|_| err())?;
        let offset: i64 = o.trim().parse().map_err(|_| err())?;
        ChangElem::new(level, offset).ok_or_else(err)
    }
}

/// Chang's algebra: lexicographic `ℤ × ℤ` truncated at `(1,0)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChangAlgebra;

impl MvAlgebra for ChangAlgebra {
    type Elem = ChangElem;

    fn name(&self) -> String {
        "chang".into()
    }

    fn zero(&self) -> ChangElem {
        ChangElem::zero()
    }

    /// `(x + y) ∧ (1,0)` in the lexicographic group.
    fn oplus(&self, x: &ChangElem, y: &ChangElem) -> ChangElem {
        let level = x.level + y.level;
        let offset = x.offset + y.offset;
        if level >= 2 || (level == 1 && offset > 0) {
            ChangElem::unit()
        } else {
            ChangElem { level, offset }
        }
    }

    fn neg(&self, x: &ChangElem) -> ChangElem {
        ChangElem { level: 1 - x.level, offset: -x.offset }
    }

    fn leq(&self, x: &ChangElem, y: &ChangElem) -> bool {
        x <= y
    }

    fn constant(&self, q: &Q01) -> Result<ChangElem, CarrierError> {
        if q.is_zero() {
            Ok(ChangElem::zero())
        } else if q.is_one() {
            Ok(ChangElem::unit())
        } else {
            Err(CarrierError::ConstantNotInCarrier { constant: q.to_string(), carrier: self.name() })
        }
    }
}

/// `y` with `y ⊕ y = x` and `y ⊙ y = 0`, if Chang's algebra has one.
///
/// Candidates `(1, m)` always have `y ⊙ y = (1, 2m) ≠ 0`, so only the
/// infinitesimal family `(0, k)` can work, and there `y ⊕ y = (0, 2k)`.
pub fn halving_witness(x: &ChangElem) -> Option<ChangElem> {
    let a = ChangAlgebra;
    if x.level != 0 || x.offset % 2 != 0 {
        return None;
    }
    let y = ChangElem::infinitesimal(x.offset / 2);
    debug_assert_eq!(a.oplus(&y, &y), *x);
    debug_assert!(a.odot(&y, &y) == ChangElem::zero());
    Some(y)
}

// ---------------------------------------------------------------------------
// Runtime-selected carriers

/// A carrier chosen at runtime, e.g. from a CLI spec string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Carrier {
    /// The standard algebra `[0,1]`.
    Unit,
    Chain(u32),
    Chang,
    /// Finite direct product; the empty product is the trivial algebra.
    Product(Vec<Carrier>),
    /// Piecewise-linear functions `[0,1] → [0,1]`.
    Pl,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Rational(Q01),
    Step(u32),
    Chang(ChangElem),
    Tuple(Vec<Value>),
    Func(PLFunc),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Rational(q) => write!(f, "{q}"),
            Value::Step(k) => write!(f, "#{k}"),
            Value::Chang(c) => write!(f, "{c}"),
            Value::Tuple(vs) => {
                f.write_str("[")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            Value::Func(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("malformed carrier spec `{0}`")]
    Malformed(String),
    #[error("chain order must be a positive integer in `{0}`")]
    ChainOrder(String),
}

impl FromStr for Carrier {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "unit" => return Ok(Carrier::Unit),
            "chang" => return Ok(Carrier::Chang),
            "pl" => return Ok(Carrier::Pl),
            _ => {}
        }
        if let Some(n) = s.strip_prefix("chain:") {
            let n: u32 = n.trim().parse().map_err(|_| SpecError::ChainOrder(s.to_string()))?;
            if n == 0 {
                return Err(SpecError::ChainOrder(s.to_string()));
            }
            return Ok(Carrier::Chain(n));
        }
        if let Some(inner) = s.strip_prefix("prod(").and_then(|r| r.strip_suffix(')')) {
            return split_top_level(inner)
                .map_err(|_| SpecError::Malformed(s.to_string()))?
                .into_iter()
                .map(|part| part.parse())
                .collect::<Result<Vec<_>, _>>()
                .map(Carrier::Product);
        }
        Err(SpecError::Malformed(s.to_string()))
    }
}

/// Split on commas that are not nested inside brackets.
pub(crate) fn split_top_level(s: &str) -> Result<Vec<&str>, ()> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(());
                }
            }
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(());
    }
    parts.push(s[start..].trim());
    if parts.iter().any(|p| p.is_empty()) {
        return Err(());
    }
    Ok(parts)
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Carrier::Unit => f.write_str("unit"),
            Carrier::Chain(n) => write!(f, "chain:{n}"),
            Carrier::Chang => f.write_str("chang"),
            Carrier::Pl => f.write_str("pl"),
            Carrier::Product(fs) => {
                f.write_str("prod(")?;
                for (i, c) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl Carrier {
    pub fn trivial() -> Self {
        Carrier::Product(Vec::new())
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Carrier::Chain(_) => true,
            Carrier::Product(fs) => fs.iter().all(Carrier::is_finite),
            _ => false,
        }
    }

    pub fn supports_delta(&self) -> bool {
        match self {
            Carrier::Unit | Carrier::Pl => true,
            Carrier::Product(fs) => fs.iter().all(Carrier::supports_delta),
            Carrier::Chain(_) | Carrier::Chang => false,
        }
    }

    /// Membership test, used at API boundaries to reject foreign elements.
    pub fn check(&self, v: &Value) -> Result<(), CarrierError> {
        let ok = match (self, v) {
            (Carrier::Unit, Value::Rational(_)) => true,
            (Carrier::Chain(n), Value::Step(k)) => k <= n,
            (Carrier::Chang, Value::Chang(_)) => true,
            (Carrier::Pl, Value::Func(_)) => true,
            (Carrier::Product(fs), Value::Tuple(vs)) => {
                fs.len() == vs.len() && fs.iter().zip(vs).all(|(f, v)| f.check(v).is_ok())
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(CarrierError::Foreign { element: v.to_string(), carrier: self.to_string() })
        }
    }

    /// Human-readable rendering; chain elements are shown as `k/n`.
    pub fn render(&self, v: &Value) -> String {
        match (self, v) {
            (Carrier::Chain(n), Value::Step(k)) => FiniteChain::new(*n).value(*k).to_string(),
            (Carrier::Product(fs), Value::Tuple(vs)) => {
                let parts: Vec<String> = fs.iter().zip(vs).map(|(f, v)| f.render(v)).collect();
                format!("[{}]", parts.join(", "))
            }
            _ => v.to_string(),
        }
    }

    /// Parse an element literal: rationals for `unit`/chains/`pl` constants,
    /// `(l,o)` for Chang, `[a, b, …]` for products.
    pub fn parse_element(&self, s: &str) -> Result<Value, CarrierError> {
        let s = s.trim();
        let foreign = || CarrierError::Foreign { element: s.to_string(), carrier: self.to_string() };
        match self {
            Carrier::Unit | Carrier::Chain(_) | Carrier::Pl => {
                let q: Q01 = s.parse().map_err(|_| foreign())?;
                self.constant(&q)
            }
            Carrier::Chang => s.parse::<ChangElem>().map(Value::Chang).map_err(|_| foreign()),
            Carrier::Product(fs) => {
                let inner = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(foreign)?;
                let parts = split_top_level(inner).map_err(|_| foreign())?;
                if parts.len() != fs.len() {
                    return Err(foreign());
                }
                fs.iter().zip(parts).map(|(f, p)| f.parse_element(p)).collect::<Result<_, _>>().map(Value::Tuple)
            }
        }
    }

    /// Values in `[0,1]` when the carrier is a subalgebra of `[0,1]`.
    pub fn as_rational(&self, v: &Value) -> Option<Q01> {
        match (self, v) {
            (Carrier::Unit, Value::Rational(q)) => Some(q.clone()),
            (Carrier::Chain(n), Value::Step(k)) => Some(FiniteChain::new(*n).value(*k)),
            _ => None,
        }
    }

    pub fn size(&self) -> Option<usize> {
        match self {
            Carrier::Chain(n) => Some(*n as usize + 1),
            Carrier::Product(fs) => fs.iter().map(Carrier::size).product(),
            _ => None,
        }
    }
}

fn mismatch(c: &Carrier, vs: &[&Value]) -> ! {
    let shown: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
    panic!("elements {} do not belong to carrier `{c}`", shown.join(", "))
}

impl MvAlgebra for Carrier {
    type Elem = Value;

    fn name(&self) -> String {
        self.to_string()
    }

    fn zero(&self) -> Value {
        match self {
            Carrier::Unit => Value::Rational(Q01::zero()),
            Carrier::Chain(_) => Value::Step(0),
            Carrier::Chang => Value::Chang(ChangElem::zero()),
            Carrier::Product(fs) => Value::Tuple(fs.iter().map(Carrier::zero).collect()),
            Carrier::Pl => Value::Func(PLFunc::constant(Q01::zero())),
        }
    }

    fn oplus(&self, x: &Value, y: &Value) -> Value {
        match (self, x, y) {
            (Carrier::Unit, Value::Rational(a), Value::Rational(b)) => Value::Rational(a.oplus(b)),
            (Carrier::Chain(n), Value::Step(a), Value::Step(b)) => Value::Step(FiniteChain::new(*n).oplus(a, b)),
            (Carrier::Chang, Value::Chang(a), Value::Chang(b)) => Value::Chang(ChangAlgebra.oplus(a, b)),
            (Carrier::Pl, Value::Func(a), Value::Func(b)) => Value::Func(PlCarrier.oplus(a, b)),
            (Carrier::Product(fs), Value::Tuple(a), Value::Tuple(b)) if fs.len() == a.len() && a.len() == b.len() => {
                Value::Tuple(fs.iter().zip(a.iter().zip(b)).map(|(f, (a, b))| f.oplus(a, b)).collect())
            }
            _ => mismatch(self, &[x, y]),
        }
    }

    fn neg(&self, x: &Value) -> Value {
        match (self, x) {
            (Carrier::Unit, Value::Rational(a)) => Value::Rational(a.neg()),
            (Carrier::Chain(n), Value::Step(a)) => Value::Step(FiniteChain::new(*n).neg(a)),
            (Carrier::Chang, Value::Chang(a)) => Value::Chang(ChangAlgebra.neg(a)),
            (Carrier::Pl, Value::Func(a)) => Value::Func(PlCarrier.neg(a)),
            (Carrier::Product(fs), Value::Tuple(a)) if fs.len() == a.len() => {
                Value::Tuple(fs.iter().zip(a).map(|(f, a)| f.neg(a)).collect())
            }
            _ => mismatch(self, &[x]),
        }
    }

    fn leq(&self, x: &Value, y: &Value) -> bool {
        match (self, x, y) {
            (Carrier::Unit, Value::Rational(a), Value::Rational(b)) => a <= b,
            (Carrier::Chain(_), Value::Step(a), Value::Step(b)) => a <= b,
            (Carrier::Chang, Value::Chang(a), Value::Chang(b)) => a <= b,
            (Carrier::Pl, Value::Func(a), Value::Func(b)) => PlCarrier.leq(a, b),
            (Carrier::Product(fs), Value::Tuple(a), Value::Tuple(b)) if fs.len() == a.len() && a.len() == b.len() => {
                fs.iter().zip(a.iter().zip(b)).all(|(f, (a, b))| f.leq(a, b))
            }
            _ => mismatch(self, &[x, y]),
        }
    }

    fn constant(&self, q: &Q01) -> Result<Value, CarrierError> {
        match self {
            Carrier::Unit => UnitInterval.constant(q).map(Value::Rational),
            Carrier::Chain(n) => FiniteChain::new(*n).constant(q).map(Value::Step),
            Carrier::Chang => ChangAlgebra.constant(q).map(Value::Chang),
            Carrier::Pl => PlCarrier.constant(q).map(Value::Func),
            Carrier::Product(fs) => fs.iter().map(|f| f.constant(q)).collect::<Result<_, _>>().map(Value::Tuple),
        }
    }

    fn delta(&self, prefix: &[Value], tail: &Value) -> Result<Value, CarrierError> {
        match self {
            Carrier::Unit => {
                let p = prefix.iter().map(|v| self.as_rational(v).unwrap_or_else(|| mismatch(self, &[v]))).collect::<Vec<_>>();
                let t = self.as_rational(tail).unwrap_or_else(|| mismatch(self, &[tail]));
                Ok(Value::Rational(Q01::delta(&p, &t)))
            }
            Carrier::Pl => {
                let unwrap = |v: &Value| match v {
                    Value::Func(f) => f.clone(),
                    other => mismatch(self, &[other]),
                };
                let p: Vec<PLFunc> = prefix.iter().map(unwrap).collect();
                PlCarrier.delta(&p, &unwrap(tail)).map(Value::Func)
            }
            Carrier::Product(fs) => {
                let component = |v: &Value, i: usize| match v {
                    Value::Tuple(vs) if vs.len() == fs.len() => vs[i].clone(),
                    other => mismatch(self, &[other]),
                };
                fs.iter()
                    .enumerate()
                    .map(|(i, f)| {
                        let p: Vec<Value> = prefix.iter().map(|v| component(v, i)).collect();
                        f.delta(&p, &component(tail, i))
                    })
                    .collect::<Result<_, _>>()
                    .map(Value::Tuple)
            }
            Carrier::Chain(_) | Carrier::Chang => Err(CarrierError::DeltaUnsupported(self.name())),
        }
    }

    fn elements(&self) -> Option<Vec<Value>> {
        match self {
            Carrier::Chain(n) => Some((0..=*n).map(Value::Step).collect()),
            Carrier::Product(fs) => {
                let mut out = vec![Vec::new()];
                for f in fs {
                    let elems = f.elements()?;
                    out = out
                        .into_iter()
                        .flat_map(|prefix| {
                            elems.iter().map(move |e| {
                                let mut t = prefix.clone();
                                t.push(e.clone());
                                t
                            })
                        })
                        .collect();
                }
                Some(out.into_iter().map(Value::Tuple).collect())
            }
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Ideals and the radical

/// An ideal of a finite carrier, listed in the carrier's element order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ideal {
    pub members: Vec<Value>,
}

impl Ideal {
    pub fn contains(&self, v: &Value) -> bool {
        self.members.contains(v)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_subset(&self, other: &Ideal) -> bool {
        self.members.iter().all(|m| other.contains(m))
    }

    /// Check the defining properties directly: contains `0`, is a down-set,
    /// and is closed under `⊕`.
    pub fn verify<A: MvAlgebra<Elem = Value>>(&self, carrier: &A, all: &[Value]) -> bool {
        let set: BTreeSet<&Value> = self.members.iter().collect();
        set.contains(&carrier.zero())
            && self.members.iter().all(|m| all.iter().filter(|x| carrier.leq(x, m)).all(|x| set.contains(x)))
            && self.members.iter().all(|a| self.members.iter().all(|b| set.contains(&carrier.oplus(a, b))))
    }
}

fn finite_elements(carrier: &Carrier) -> Result<Vec<Value>, CarrierError> {
    carrier.elements().ok_or_else(|| CarrierError::NotFinite(carrier.to_string()))
}

/// `a ⊕ a ⊕ ⋯` until it stops growing; the largest element of `⟨a⟩`.
fn idempotent_closure(carrier: &Carrier, a: &Value) -> Value {
    let mut acc = a.clone();
    loop {
        let next = carrier.oplus(&acc, &acc);
        if next == acc {
            return acc;
        }
        acc = next;
    }
}

/// All ideals of a finite carrier, ordered by size and then by members.
///
/// Each ideal of a finite MV-algebra is generated by a single element `a`,
/// and `⟨a⟩ = ↓e` for the idempotent `e = a ⊕ a ⊕ ⋯`.
pub fn enumerate_ideals(carrier: &Carrier) -> Result<Vec<Ideal>, CarrierError> {
    let all = finite_elements(carrier)?;
    let generators: BTreeSet<Value> = all.iter().map(|a| idempotent_closure(carrier, a)).collect();
    let mut ideals: Vec<Ideal> = generators
        .iter()
        .map(|e| Ideal { members: all.iter().filter(|x| carrier.leq(x, e)).cloned().collect() })
        .collect();
    let index = |v: &Value| all.iter().position(|x| x == v).expect("member of carrier");
    ideals.sort_by(|a, b| {
        a.len().cmp(&b.len()).then_with(|| {
            let ia: Vec<usize> = a.members.iter().map(index).collect();
            let ib: Vec<usize> = b.members.iter().map(index).collect();
            ia.cmp(&ib)
        })
    });
    Ok(ideals)
}

/// Proper ideals not contained in any other proper ideal.
pub fn maximal_ideals(carrier: &Carrier) -> Result<Vec<Ideal>, CarrierError> {
    let ideals = enumerate_ideals(carrier)?;
    let one = carrier.one();
    let proper: Vec<&Ideal> = ideals.iter().filter(|i| !i.contains(&one)).collect();
    Ok(proper
        .iter()
        .filter(|i| !proper.iter().any(|j| j.len() > i.len() && i.is_subset(j)))
        .map(|i| (*i).clone())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Radical {
    /// Explicit members of a finite carrier's radical.
    Finite(Vec<Value>),
    /// Chang's algebra: `{(0,k) : k ≥ 0}`.
    ChangInfinitesimals,
    /// Semisimple infinite carriers (`[0,1]`, PL functions): `{0}`.
    Zero,
}

impl Radical {
    pub fn contains(&self, carrier: &Carrier, v: &Value) -> bool {
        match self {
            Radical::Finite(members) => members.contains(v),
            Radical::ChangInfinitesimals => matches!(v, Value::Chang(c) if c.level() == 0),
            Radical::Zero => carrier.is_zero(v),
        }
    }

    pub fn is_trivial(&self, carrier: &Carrier) -> bool {
        match self {
            Radical::Finite(members) => members.iter().all(|m| carrier.is_zero(m)),
            Radical::ChangInfinitesimals => false,
            Radical::Zero => true,
        }
    }

    pub fn describe(&self, carrier: &Carrier) -> String {
        match self {
            Radical::Finite(members) => {
                let parts: Vec<String> = members.iter().map(|m| carrier.render(m)).collect();
                format!("{{{}}}", parts.join(", "))
            }
            Radical::ChangInfinitesimals => "{(0,k) : k >= 0}".into(),
            Radical::Zero => "{0}".into(),
        }
    }
}

/// `{x : n·x ≤ ¬x for n = 1..=bound}` over the listed elements.
pub fn infinitesimal_test_set(carrier: &Carrier, all: &[Value], bound: u64) -> Vec<Value> {
    all.iter()
        .filter(|x| (1..=bound).all(|n| carrier.leq(&carrier.nfold(n, x), &carrier.neg(x))))
        .cloned()
        .collect()
}

/// The radical, as the intersection of the maximal ideals for finite
/// carriers (cross-checked against the `n·x ≤ ¬x` characterisation), or in
/// closed form for Chang's algebra and the semisimple infinite carriers.
pub fn radical(carrier: &Carrier) -> Result<Radical, CarrierError> {
    match carrier {
        Carrier::Chang => Ok(Radical::ChangInfinitesimals),
        Carrier::Unit | Carrier::Pl => Ok(Radical::Zero),
        _ if carrier.is_finite() => {
            let all = finite_elements(carrier)?;
            let max = maximal_ideals(carrier)?;
            let by_ideals: Vec<Value> =
                all.iter().filter(|x| max.iter().all(|m| m.contains(x))).cloned().collect();
            let by_test = infinitesimal_test_set(carrier, &all, all.len() as u64);
            assert_eq!(by_ideals, by_test, "radical characterisations disagree on `{carrier}`");
            Ok(Radical::Finite(by_ideals))
        }
        _ => Err(CarrierError::Unsupported(carrier.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// `x = 0`, which is in the radical but not an infinitesimal.
    Zero,
    /// Holds for every `n` by a closed-form argument.
    ClosedForm(&'static str),
    /// `n·x ≤ ¬x` fails at this `n`.
    FailsAt(u64),
    /// Verified for every `n` up to the bound past which `n·x` is constant.
    Exhausted(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfinitesimalReport {
    pub infinitesimal: bool,
    pub certificate: Certificate,
}

/// Whether `x ≠ 0` satisfies `n·x ≤ ¬x` for every `n`, with a certificate.
pub fn is_infinitesimal(carrier: &Carrier, x: &Value) -> Result<InfinitesimalReport, CarrierError> {
    carrier.check(x)?;
    if carrier.is_zero(x) {
        return Ok(InfinitesimalReport { infinitesimal: false, certificate: Certificate::Zero });
    }
    let fails = |n: u64| !carrier.leq(&carrier.nfold(n, x), &carrier.neg(x));
    match (carrier, x) {
        (Carrier::Chang, Value::Chang(c)) => {
            if c.level() == 0 {
                // n·(0,k) = (0,nk) < (1,-k) = ¬(0,k) for every n
                Ok(InfinitesimalReport {
                    infinitesimal: true,
                    certificate: Certificate::ClosedForm("n(0,k) = (0,nk) <lex (1,-k)"),
                })
            } else {
                debug_assert!(fails(1));
                Ok(InfinitesimalReport { infinitesimal: false, certificate: Certificate::FailsAt(1) })
            }
        }
        (Carrier::Unit, Value::Rational(q)) => {
            // n·q > 1 - q once n > (1 - q)/q
            let n = ((Rat::one() - q.as_rat()) / q.as_rat()).floor().to_integer() + 1;
            let n = u64::try_from(n).expect("certificate fits in u64");
            debug_assert!(fails(n) && (n == 1 || !fails(n - 1)));
            Ok(InfinitesimalReport { infinitesimal: false, certificate: Certificate::FailsAt(n) })
        }
        (Carrier::Pl, Value::Func(f)) => {
            let n = crate::plfunc::pl_archimedean_certificate(f).expect("nonzero function");
            Ok(InfinitesimalReport { infinitesimal: false, certificate: Certificate::FailsAt(n) })
        }
        _ => {
            let size = finite_elements(carrier)?.len() as u64;
            match (1..=size).find(|n| fails(*n)) {
                Some(n) => Ok(InfinitesimalReport { infinitesimal: false, certificate: Certificate::FailsAt(n) }),
                None => Ok(InfinitesimalReport { infinitesimal: true, certificate: Certificate::Exhausted(size) }),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chang(l: u8, o: i64) -> ChangElem {
        ChangElem::new(l, o).unwrap()
    }

    fn spec(s: &str) -> Carrier {
        s.parse().unwrap()
    }

    #[test]
    fn chang_operations() {
        let a = ChangAlgebra;
        assert_eq!(a.oplus(&chang(0, 2), &chang(0, 3)), chang(0, 5));
        assert_eq!(a.oplus(&chang(1, -2), &chang(0, 5)), ChangElem::unit());
        assert_eq!(a.oplus(&chang(1, -2), &chang(0, 2)), ChangElem::unit());
        assert_eq!(a.oplus(&chang(1, -2), &chang(0, 1)), chang(1, -1));
        for n in 0..10 {
            assert_eq!(a.neg(&chang(0, n)), chang(1, -n));
        }
        assert!(ChangElem::new(0, -1).is_none());
        assert!(ChangElem::new(1, 1).is_none());
        assert!(ChangElem::new(2, 0).is_none());
    }

    #[test]
    fn chain_operations() {
        let c = spec("chain:2");
        let half = c.parse_element("1/2").unwrap();
        assert_eq!(c.oplus(&half, &half), c.one());
        assert!(c.parse_element("1/3").is_err());
        assert_eq!(c.render(&half), "1/2");
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["chain:3", "chang", "pl", "unit", "prod(chain:2,chain:3)", "prod(chain:1,prod(chain:2,unit))", "prod()"] {
            assert_eq!(spec(s).to_string(), s);
        }
        assert!("chain:0".parse::<Carrier>().is_err());
        assert!("chain:x".parse::<Carrier>().is_err());
        assert!("prod(chain:2,".parse::<Carrier>().is_err());
        assert!("prod(chain:2,,chain:3)".parse::<Carrier>().is_err());
        assert!("boolean".parse::<Carrier>().is_err());
    }

    #[test]
    fn foreign_elements_rejected() {
        let c = spec("prod(chain:2,chain:3)");
        assert!(c.check(&Value::Step(1)).is_err());
        assert!(c.check(&Value::Tuple(vec![Value::Step(3), Value::Step(0)])).is_err());
        assert!(c.check(&c.parse_element("[1/2, 2/3]").unwrap()).is_ok());
        assert!(c.parse_element("[1/2]").is_err());
        assert!(spec("chang").parse_element("(0,-1)").is_err());
    }

    #[test]
    fn ideal_examples() {
        let l2 = spec("chain:2");
        let ideals = enumerate_ideals(&l2).unwrap();
        assert_eq!(
            ideals,
            vec![
                Ideal { members: vec![Value::Step(0)] },
                Ideal { members: vec![Value::Step(0), Value::Step(1), Value::Step(2)] }
            ]
        );
        assert_eq!(enumerate_ideals(&spec("chain:1")).unwrap().len(), 2);
        assert_eq!(enumerate_ideals(&spec("prod(chain:2,chain:1)")).unwrap().len(), 4);
        assert!(matches!(enumerate_ideals(&spec("chang")), Err(CarrierError::NotFinite(_))));
    }

    /// Brute force over all subsets, independent of the idempotent argument.
    fn ideals_by_subsets(c: &Carrier) -> BTreeSet<Vec<Value>> {
        let all = c.elements().unwrap();
        let mut out = BTreeSet::new();
        for mask in 0u32..(1 << all.len()) {
            let members: Vec<Value> =
                all.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, v)| v.clone()).collect();
            if (Ideal { members: members.clone() }).verify(c, &all) {
                out.insert(members);
            }
        }
        out
    }

    #[test]
    fn ideals_match_subset_search() {
        for s in ["chain:1", "chain:2", "chain:5", "prod(chain:2,chain:1)", "prod(chain:2,chain:3)", "prod(chain:1,chain:1,chain:1)", "prod()"] {
            let c = spec(s);
            let all = c.elements().unwrap();
            let fast = enumerate_ideals(&c).unwrap();
            assert!(fast.iter().all(|i| i.verify(&c, &all)), "{s}");
            let fast: BTreeSet<Vec<Value>> = fast.into_iter().map(|i| i.members).collect();
            assert_eq!(fast, ideals_by_subsets(&c), "{s}");
        }
    }

    #[test]
    fn every_nontrivial_finite_carrier_has_a_maximal_ideal() {
        for s in ["chain:1", "chain:4", "prod(chain:2,chain:3)", "prod(chain:1,chain:1)"] {
            assert!(!maximal_ideals(&spec(s)).unwrap().is_empty(), "{s}");
        }
        assert!(maximal_ideals(&Carrier::trivial()).unwrap().is_empty());
    }

    #[test]
    fn radical_examples() {
        assert_eq!(radical(&spec("chang")).unwrap(), Radical::ChangInfinitesimals);
        for n in 1..=8 {
            assert_eq!(radical(&Carrier::Chain(n)).unwrap(), Radical::Finite(vec![Value::Step(0)]));
        }
        let trivial = Carrier::trivial();
        assert_eq!(radical(&trivial).unwrap(), Radical::Finite(vec![Value::Tuple(vec![])]));
        assert!(radical(&trivial).unwrap().is_trivial(&trivial));
        assert!(radical(&spec("prod(chain:2,chain:3)")).unwrap().is_trivial(&spec("prod(chain:2,chain:3)")));
    }

    #[test]
    fn infinitesimal_examples() {
        let c = spec("chang");
        let r = is_infinitesimal(&c, &Value::Chang(chang(0, 1))).unwrap();
        assert!(r.infinitesimal);
        let r = is_infinitesimal(&c, &Value::Chang(chang(1, -5))).unwrap();
        assert_eq!(r, InfinitesimalReport { infinitesimal: false, certificate: Certificate::FailsAt(1) });
        let l2 = spec("chain:2");
        let r = is_infinitesimal(&l2, &l2.parse_element("1/2").unwrap()).unwrap();
        assert_eq!(r.certificate, Certificate::FailsAt(2));
        let u = spec("unit");
        let r = is_infinitesimal(&u, &u.parse_element("1/3").unwrap()).unwrap();
        assert_eq!(r.certificate, Certificate::FailsAt(3));
        assert_eq!(is_infinitesimal(&u, &u.zero()).unwrap().certificate, Certificate::Zero);
    }

    #[test]
    fn halving_examples() {
        assert_eq!(halving_witness(&chang(0, 2)), Some(chang(0, 1)));
        assert_eq!(halving_witness(&chang(0, 1)), None);
        assert_eq!(halving_witness(&ChangElem::zero()), Some(ChangElem::zero()));
        assert_eq!(halving_witness(&ChangElem::unit()), None);
    }

    #[test]
    fn halving_matches_exhaustive_search() {
        let a = ChangAlgebra;
        let elems = ChangElem::bounded(60);
        for x in ChangElem::bounded(50) {
            let brute = elems.iter().find(|y| a.oplus(y, y) == x && a.odot(y, y) == ChangElem::zero()).copied();
            assert_eq!(halving_witness(&x), brute, "{x}");
        }
    }

    #[test]
    fn doubling_then_halving_returns_infinitesimals() {
        let a = ChangAlgebra;
        for k in 0..=50 {
            let x = chang(0, k);
            assert_eq!(halving_witness(&a.oplus(&x, &x)), Some(x));
        }
    }

    #[test]
    fn mv5_on_chains_and_chang() {
        for n in 1..=8u32 {
            let c = FiniteChain::new(n);
            for x in 0..=n {
                for y in 0..=n {
                    if c.odot(&x, &x) == 0 && c.odot(&y, &y) == 0 {
                        assert_eq!(c.odot(&x, &y), 0);
                    }
                }
            }
        }
        let a = ChangAlgebra;
        let elems = ChangElem::bounded(50);
        for x in &elems {
            for y in &elems {
                if a.is_zero(&a.odot(x, x)) && a.is_zero(&a.odot(y, y)) {
                    assert!(a.is_zero(&a.odot(x, y)));
                }
            }
        }
    }
}
