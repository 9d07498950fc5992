//! Continuous piecewise-linear functions `[0,1] → [0,1]` with rational
//! breakpoints, as an exact δ-algebra with `δ(g⃗) = Σ gᵢ/2ⁱ`.
//!
//! This is the computable stand-in for `C([0,1])`: it is closed under the
//! pointwise MV operations and finite δ, and dense for the uniform norm.

use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{CarrierError, MvAlgebra};
use crate::arith::{format_rat, parse_rat, Q01, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlError {
    #[error("a PL function needs at least two breakpoints, got {0}")]
    TooFewPoints(usize),
    #[error("breakpoint {index}: first x must be 0")]
    FirstNotZero { index: usize },
    #[error("breakpoint {index}: last x must be 1")]
    LastNotOne { index: usize },
    #[error("breakpoint {index}: x values must strictly increase")]
    NotIncreasing { index: usize },
    #[error("breakpoint {index}: {message}")]
    BadValue { index: usize, message: String },
    #[error("malformed PL function JSON: {0}")]
    Json(String),
}

/// A continuous PL function, stored as its breakpoints in canonical form:
/// x strictly increasing from `0` to `1`, no three consecutive points
/// collinear. Structural equality is therefore function equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PLFunc {
    points: Vec<(Q01, Q01)>,
}

fn collinear(a: &(Rat, Rat), b: &(Rat, Rat), c: &(Rat, Rat)) -> bool {
    (&b.1 - &a.1) * (&c.0 - &b.0) == (&c.1 - &b.1) * (&b.0 - &a.0)
}

impl PLFunc {
    /// Validate breakpoints and canonicalise.
    pub fn new(points: Vec<(Q01, Q01)>) -> Result<Self, PlError> {
        if points.len() < 2 {
            return Err(PlError::TooFewPoints(points.len()));
        }
        if !points[0].0.is_zero() {
            return Err(PlError::FirstNotZero { index: 0 });
        }
        for i in 1..points.len() {
            if points[i].0 <= points[i - 1].0 {
                return Err(PlError::NotIncreasing { index: i });
            }
        }
        let last = points.len() - 1;
        if !points[last].0.is_one() {
            return Err(PlError::LastNotOne { index: last });
        }
        Ok(Self::from_rats(points.into_iter().map(|(x, y)| (x.into_rat(), y.into_rat())).collect()))
    }

    /// Canonicalise already-valid samples.
    fn from_rats(points: Vec<(Rat, Rat)>) -> Self {
        let mut out: Vec<(Rat, Rat)> = Vec::with_capacity(points.len());
        for p in points {
            while out.len() >= 2 && collinear(&out[out.len() - 2], &out[out.len() - 1], &p) {
                out.pop();
            }
            out.push(p);
        }
        PLFunc {
            points: out
                .into_iter()
                .map(|(x, y)| (Q01::try_from_rat(x).expect("x in [0,1]"), Q01::try_from_rat(y).expect("y in [0,1]")))
                .collect(),
        }
    }

    pub fn constant(c: Q01) -> Self {
        PLFunc { points: vec![(Q01::zero(), c.clone()), (Q01::one(), c)] }
    }

    pub fn identity() -> Self {
        PLFunc { points: vec![(Q01::zero(), Q01::zero()), (Q01::one(), Q01::one())] }
    }

    /// The tent map `1 - |2x - 1|`.
    pub fn tent() -> Self {
        PLFunc {
            points: vec![(Q01::zero(), Q01::zero()), (Q01::new(1, 2), Q01::one()), (Q01::one(), Q01::zero())],
        }
    }

    pub fn points(&self) -> &[(Q01, Q01)] {
        &self.points
    }

    pub fn is_zero(&self) -> bool {
        self.points.iter().all(|(_, y)| y.is_zero())
    }

    fn xs(&self) -> impl Iterator<Item = &Rat> {
        self.points.iter().map(|(x, _)| x.as_rat())
    }

    /// Exact value at `x ∈ [0,1]`.
    pub fn eval(&self, x: &Rat) -> Rat {
        let i = self.points.partition_point(|(px, _)| px.as_rat() < x);
        if i < self.points.len() && self.points[i].0.as_rat() == x {
            return self.points[i].1.as_rat().clone();
        }
        assert!(i > 0 && i < self.points.len(), "evaluation point outside [0,1]");
        let (x0, y0) = (&self.points[i - 1].0, &self.points[i - 1].1);
        let (x1, y1) = (&self.points[i].0, &self.points[i].1);
        let t = (x - x0.as_rat()) / (x1.as_rat() - x0.as_rat());
        y0.as_rat() + t * (y1.as_rat() - y0.as_rat())
    }

    pub fn eval_q(&self, x: &Q01) -> Q01 {
        Q01::try_from_rat(self.eval(x.as_rat())).expect("PL values lie in [0,1]")
    }

    /// Largest value, attained at a breakpoint.
    pub fn max_value(&self) -> Q01 {
        self.points.iter().map(|(_, y)| y.clone()).max().expect("nonempty")
    }

    pub fn from_json(text: &str) -> Result<Self, PlError> {
        let raw: Vec<Vec<String>> = serde_json::from_str(text).map_err(|e| PlError::Json(e.to_string()))?;
        let mut points = Vec::with_capacity(raw.len());
        for (index, pair) in raw.into_iter().enumerate() {
            if pair.len() != 2 {
                return Err(PlError::BadValue { index, message: format!("expected [x, y], got {} entries", pair.len()) });
            }
            let coord = |s: &str| -> Result<Q01, PlError> {
                let r = parse_rat(s).map_err(|e| PlError::BadValue { index, message: e.to_string() })?;
                Q01::try_from_rat(r).map_err(|e| PlError::BadValue { index, message: e.to_string() })
            };
            points.push((coord(&pair[0])?, coord(&pair[1])?));
        }
        PLFunc::new(points)
    }

    pub fn to_json(&self) -> String {
        let raw: Vec<[String; 2]> = self.points.iter().map(|(x, y)| [x.to_string(), y.to_string()]).collect();
        serde_json::to_string(&raw).expect("strings serialise")
    }
}

impl fmt::Display for PLFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

impl Serialize for PLFunc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<[String; 2]> = self.points.iter().map(|(x, y)| [x.to_string(), y.to_string()]).collect();
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PLFunc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = serde_json::Value::deserialize(d)?;
        PLFunc::from_json(&raw.to_string()).map_err(serde::de::Error::custom)
    }
}

/// Sorted union of the breakpoint abscissae of several functions.
fn merged_grid<'a>(fs: impl IntoIterator<Item = &'a PLFunc>) -> Vec<Rat> {
    let mut xs: Vec<Rat> = fs.into_iter().flat_map(|f| f.xs().cloned().collect::<Vec<_>>()).collect();
    xs.sort();
    xs.dedup();
    xs
}

/// Insert the points where `a·f + b·g + c` changes sign strictly inside a
/// grid cell. Between consecutive grid points both `f` and `g` are affine,
/// so the switch expression is affine there too.
fn refine_with_switches(f: &PLFunc, g: &PLFunc, grid: Vec<Rat>, switches: &[(Rat, Rat, Rat)]) -> Vec<Rat> {
    let mut out = Vec::with_capacity(grid.len() * 2);
    for w in grid.windows(2) {
        let (x0, x1) = (&w[0], &w[1]);
        out.push(x0.clone());
        let mut roots = Vec::new();
        for (a, b, c) in switches {
            let s0 = a * f.eval(x0) + b * g.eval(x0) + c;
            let s1 = a * f.eval(x1) + b * g.eval(x1) + c;
            if (s0.is_positive() && s1.is_negative()) || (s0.is_negative() && s1.is_positive()) {
                roots.push(x0 + (x1 - x0) * &s0 / (&s0 - &s1));
            }
        }
        roots.sort();
        roots.dedup();
        out.extend(roots);
    }
    out.push(grid.last().expect("grid has both endpoints").clone());
    out
}

fn combine(f: &PLFunc, g: &PLFunc, switches: &[(Rat, Rat, Rat)], op: impl Fn(&Q01, &Q01) -> Q01) -> PLFunc {
    let grid = refine_with_switches(f, g, merged_grid([f, g]), switches);
    PLFunc::from_rats(
        grid.into_iter()
            .map(|x| {
                let y = op(&f.eval_q(&Q01::try_from_rat(x.clone()).expect("grid in [0,1]")), &g.eval_q(&Q01::try_from_rat(x.clone()).expect("grid in [0,1]")));
                (x, y.into_rat())
            })
            .collect(),
    )
}

fn r(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Pointwise MV operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlOp {
    Oplus,
    Odot,
    Ominus,
    Dist,
    Join,
    Meet,
}

/// `op(f, g)` computed pointwise and exactly.
pub fn pl_op(op: PlOp, f: &PLFunc, g: &PLFunc) -> PLFunc {
    let sum_hits_one = [(r(1), r(1), r(-1))];
    let crossing = [(r(1), r(-1), r(0))];
    match op {
        PlOp::Oplus => combine(f, g, &sum_hits_one, Q01::oplus),
        PlOp::Odot => combine(f, g, &sum_hits_one, Q01::odot),
        PlOp::Ominus => combine(f, g, &crossing, Q01::ominus),
        PlOp::Dist => combine(f, g, &crossing, Q01::dist),
        PlOp::Join => combine(f, g, &crossing, Q01::join),
        PlOp::Meet => combine(f, g, &crossing, Q01::meet),
    }
}

pub fn pl_neg(f: &PLFunc) -> PLFunc {
    PLFunc { points: f.points.iter().map(|(x, y)| (x.clone(), y.neg())).collect() }
}

/// `min(n·f, 1)`.
pub fn pl_nfold(n: u64, f: &PLFunc) -> PLFunc {
    assert!(n >= 1, "nfold needs n >= 1");
    let zero = PLFunc::constant(Q01::zero());
    combine(f, &zero, &[(r(n as i64), r(0), r(-1))], |a, _| a.nfold(n))
}

/// Pointwise `f ≤ g`, checked on the merged breakpoints.
pub fn pl_leq(f: &PLFunc, g: &PLFunc) -> bool {
    merged_grid([f, g]).iter().all(|x| f.eval(x) <= g.eval(x))
}

/// An eventually-constant sequence of PL functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FnSeq {
    pub prefix: Vec<PLFunc>,
    pub tail: PLFunc,
}

/// `Σ_{i≤k} prefixᵢ/2ⁱ + tail/2ᵏ`; the sum stays in `[0,1]`.
pub fn pl_delta(s: &FnSeq) -> PLFunc {
    let grid = merged_grid(s.prefix.iter().chain(std::iter::once(&s.tail)));
    let half = Rat::new(1.into(), 2.into());
    PLFunc::from_rats(
        grid.into_iter()
            .map(|x| {
                let mut weight = Rat::one();
                let mut sum = Rat::zero();
                for p in &s.prefix {
                    weight *= &half;
                    sum += p.eval(&x) * &weight;
                }
                sum += s.tail.eval(&x) * &weight;
                (x, sum)
            })
            .collect(),
    )
}

/// Maximum of `|f − g|`, attained at a merged breakpoint.
pub fn uniform_dist(f: &PLFunc, g: &PLFunc) -> Q01 {
    let max = merged_grid([f, g])
        .iter()
        .map(|x| (f.eval(x) - g.eval(x)).abs())
        .max()
        .expect("grid nonempty");
    Q01::try_from_rat(max).expect("distance in [0,1]")
}

/// Exact pointwise `r·f`.
pub fn pl_scale(scalar: &Q01, f: &PLFunc) -> PLFunc {
    PLFunc::from_rats(f.points.iter().map(|(x, y)| (x.as_rat().clone(), scalar.scale(y).into_rat())).collect())
}

/// Binary digits of a dyadic rational in `[0,1)`, or `None` if not dyadic.
/// `1` itself has no finite expansion of this kind; it is `δ(;f)`.
pub fn dyadic_digits(scalar: &Q01) -> Option<Vec<bool>> {
    let den = scalar.as_rat().denom().clone();
    if !(den.clone() & (den.clone() - 1u32)).is_zero() {
        return None;
    }
    let mut digits = Vec::new();
    let mut rest = scalar.as_rat().clone();
    while !rest.is_zero() {
        rest *= r(2);
        if rest >= Rat::one() {
            digits.push(true);
            rest -= Rat::one();
        } else {
            digits.push(false);
        }
    }
    Some(digits)
}

/// `r·f` for dyadic `r` computed as `δ(f₁,…,f_d; 0)` with `fᵢ ∈ {0, f}`
/// following the binary expansion of `r`.
pub fn pl_scale_dyadic(scalar: &Q01, f: &PLFunc) -> Option<PLFunc> {
    if scalar.is_one() {
        return Some(pl_delta(&FnSeq { prefix: vec![], tail: f.clone() }));
    }
    let zero = PLFunc::constant(Q01::zero());
    let prefix = dyadic_digits(scalar)?.into_iter().map(|bit| if bit { f.clone() } else { zero.clone() }).collect();
    Some(pl_delta(&FnSeq { prefix, tail: zero }))
}

/// `f ∘ φ`.
pub fn pl_precompose(f: &PLFunc, phi: &PLFunc) -> PLFunc {
    let mut grid: Vec<Rat> = Vec::new();
    let fx: Vec<&Rat> = f.xs().collect();
    for w in phi.points.windows(2) {
        let (x0, y0) = (w[0].0.as_rat(), w[0].1.as_rat());
        let (x1, y1) = (w[1].0.as_rat(), w[1].1.as_rat());
        grid.push(x0.clone());
        let (lo, hi) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
        for c in fx.iter().filter(|c| **c > lo && **c < hi) {
            // φ(x) = c on this segment
            grid.push(x0 + (x1 - x0) * (*c - y0) / (y1 - y0));
        }
    }
    grid.push(Rat::one());
    grid.sort();
    grid.dedup();
    PLFunc::from_rats(grid.into_iter().map(|x| { let y = f.eval(&phi.eval(&x)); (x, y) }).collect())
}

/// For `f ≠ 0`: `n = ⌈1/m⌉ + 1` with `m = max f`, verified to satisfy
/// `n·f ≰ ¬f`. Returns `None` for the zero function.
pub fn pl_archimedean_certificate(f: &PLFunc) -> Option<u64> {
    let m = f.max_value();
    if m.is_zero() {
        return None;
    }
    let n = m.as_rat().recip().ceil().to_integer() + 1;
    let n = u64::try_from(n).expect("certificate fits in u64");
    assert!(!pl_leq(&pl_nfold(n, f), &pl_neg(f)), "certificate n={n} failed to verify");
    Some(n)
}

/// One step of the increasing approximation: `(target − shift)⁺`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxStep {
    pub shift: Q01,
    pub func: PLFunc,
}

/// `s_i = (target − 3/2^{i+2})⁺` for `i = 1..=depth`.
///
/// The shifted function `target − 3/2^{i+2}` lies within `1/2^{i+2}` of
/// itself, so the clamp gives an increasing sequence with
/// `‖s_i − target‖ ≤ 3/2^{i+2} < 1/2^i`.
pub fn increasing_approx(target: &PLFunc, depth: u32) -> Vec<ApproxStep> {
    assert!(depth >= 1, "depth must be positive");
    (1..=depth)
        .map(|i| {
            let shift = Q01::try_from_rat(Rat::new(3.into(), num_bigint::BigInt::one() << (i + 2))).expect("shift < 1");
            let func = pl_op(PlOp::Ominus, target, &PLFunc::constant(shift.clone()));
            ApproxStep { shift, func }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsbellError {
    #[error("need at least one approximant")]
    Empty,
    #[error("s_{index} is not above s_{prev}", prev = index - 1)]
    NotIncreasing { index: usize },
    #[error("||s_1|| = {norm} exceeds 1/2", norm = format_rat(norm))]
    FirstTooLarge { norm: Rat },
    #[error("||s_{index} - s_{prev}|| = {norm} exceeds 1/2^{index}", prev = index - 1, norm = format_rat(norm))]
    GapTooLarge { index: usize, norm: Rat },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsbellResult {
    /// The truncated series `δ(2s₁, 2²(s₂⊖s₁), …, 2ⁿ(sₙ⊖sₙ₋₁); 0)`.
    pub result: PLFunc,
    /// The increments fed to `δ`.
    pub increments: Vec<PLFunc>,
    /// Bound on the distance to the limit: the dropped terms sum to at
    /// most `Σ_{i>n} 1/2^i = 1/2^n`.
    pub error_bound: Q01,
}

/// Reconstruct from an increasing approximating sequence by Isbell's series,
/// truncated after `s.len()` terms. Indices in errors are 1-based.
pub fn isbell_reconstruct(s: &[PLFunc]) -> Result<IsbellResult, IsbellError> {
    if s.is_empty() {
        return Err(IsbellError::Empty);
    }
    let first_norm = s[0].max_value();
    if first_norm > Q01::new(1, 2) {
        return Err(IsbellError::FirstTooLarge { norm: first_norm.into_rat() });
    }
    for i in 1..s.len() {
        let index = i + 1;
        if !pl_leq(&s[i - 1], &s[i]) {
            return Err(IsbellError::NotIncreasing { index });
        }
        let gap = uniform_dist(&s[i], &s[i - 1]);
        let bound = Rat::new(1.into(), num_bigint::BigInt::one() << index);
        if gap.as_rat() > &bound {
            return Err(IsbellError::GapTooLarge { index, norm: gap.into_rat() });
        }
    }
    let zero = PLFunc::constant(Q01::zero());
    let increments: Vec<PLFunc> = s
        .iter()
        .enumerate()
        .map(|(i, si)| {
            let prev = if i == 0 { &zero } else { &s[i - 1] };
            pl_nfold(1u64 << (i + 1), &pl_op(PlOp::Ominus, si, prev))
        })
        .collect();
    let result = pl_delta(&FnSeq { prefix: increments.clone(), tail: zero });
    let error_bound = Q01::try_from_rat(Rat::new(1.into(), num_bigint::BigInt::one() << s.len())).expect("bound < 1");
    Ok(IsbellResult { result, increments, error_bound })
}

/// Reconstruct `target/2` from the halved increasing approximation of
/// `target` with `depth` terms.
pub fn reconstruct_half(target: &PLFunc, depth: u32) -> Result<IsbellResult, IsbellError> {
    let half = Q01::new(1, 2);
    let s: Vec<PLFunc> = increasing_approx(target, depth).iter().map(|st| pl_scale(&half, &st.func)).collect();
    isbell_reconstruct(&s)
}

/// Seeded random PL function with up to `max_interior` interior breakpoints
/// on the grid `k/x_den`, values on `k/y_den`.
pub fn random_plfunc<R: Rng>(rng: &mut R, max_interior: usize, x_den: u32, y_den: u32) -> PLFunc {
    let count = rng.gen_range(0..=max_interior.min(x_den as usize - 1));
    let mut xs: Vec<u32> = Vec::with_capacity(count + 2);
    while xs.len() < count {
        let k = rng.gen_range(1..x_den);
        if !xs.contains(&k) {
            xs.push(k);
        }
    }
    xs.sort_unstable();
    xs.insert(0, 0);
    xs.push(x_den);
    let points = xs
        .into_iter()
        .map(|k| {
            let x = Q01::try_from_rat(Rat::new(k.into(), x_den.into())).expect("grid point");
            let y = Q01::try_from_rat(Rat::new(rng.gen_range(0..=y_den).into(), y_den.into())).expect("grid value");
            (x, y)
        })
        .collect();
    PLFunc::new(points).expect("valid by construction")
}

/// The PL functions as an MV-algebra with finite δ.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PlCarrier;

impl MvAlgebra for PlCarrier {
    type Elem = PLFunc;

    fn name(&self) -> String {
        "pl".into()
    }

    fn zero(&self) -> PLFunc {
        PLFunc::constant(Q01::zero())
    }

    fn oplus(&self, x: &PLFunc, y: &PLFunc) -> PLFunc {
        pl_op(PlOp::Oplus, x, y)
    }

    fn neg(&self, x: &PLFunc) -> PLFunc {
        pl_neg(x)
    }

    fn constant(&self, q: &Q01) -> Result<PLFunc, CarrierError> {
        Ok(PLFunc::constant(q.clone()))
    }

    fn delta(&self, prefix: &[PLFunc], tail: &PLFunc) -> Result<PLFunc, CarrierError> {
        Ok(pl_delta(&FnSeq { prefix: prefix.to_vec(), tail: tail.clone() }))
    }

    fn leq(&self, x: &PLFunc, y: &PLFunc) -> bool {
        pl_leq(x, y)
    }

    fn odot(&self, x: &PLFunc, y: &PLFunc) -> PLFunc {
        pl_op(PlOp::Odot, x, y)
    }

    fn ominus(&self, x: &PLFunc, y: &PLFunc) -> PLFunc {
        pl_op(PlOp::Ominus, x, y)
    }

    fn dist(&self, x: &PLFunc, y: &PLFunc) -> PLFunc {
        pl_op(PlOp::Dist, x, y)
    }

    fn join(&self, x: &PLFunc, y: &PLFunc) -> PLFunc {
        pl_op(PlOp::Join, x, y)
    }

    fn meet(&self, x: &PLFunc, y: &PLFunc) -> PLFunc {
        pl_op(PlOp::Meet, x, y)
    }

    fn nfold(&self, n: u64, x: &PLFunc) -> PLFunc {
        pl_nfold(n, x)
    }
}
