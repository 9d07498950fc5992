//! Exact rationals on the unit interval and the standard MV operations.
//!
//! `Q01` is the carrier of the standard MV-algebra `[0,1]` with
//! `x ⊕ y = min(x + y, 1)` and `¬x = 1 - x`. Every other connective is
//! derived from these two. Nothing here touches floating point.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Signed exact rational. `BigRational` keeps itself reduced with a
/// positive denominator, which is the canonical form we rely on.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("value {0} lies outside [0,1]")]
    OutOfRange(String),
}

/// Parse `p/q` or `p` (ASCII, optional leading `-`, no whitespace).
pub fn parse_rat(text: &str) -> Result<Rat, ArithError> {
    let malformed = || ArithError::Malformed(text.to_string());
    let is_int = |s: &str| {
        let digits = s.strip_prefix('-').unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    if !is_int(num) || !is_int(den) || den.starts_with('-') {
        return Err(malformed());
    }
    let num: BigInt = num.parse().map_err(|_| malformed())?;
    let den: BigInt = den.parse().map_err(|_| malformed())?;
    if den.is_zero() {
        return Err(ArithError::ZeroDenominator(text.to_string()));
    }
    Ok(Rat::new(num, den))
}

/// Render a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// An exact rational in `[0,1]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Q01(Rat);

impl Q01 {
    pub fn zero() -> Self {
        Q01(Rat::zero())
    }

    pub fn one() -> Self {
        Q01(Rat::one())
    }

    /// `num/den`, panicking if the result is not in `[0,1]` or `den == 0`.
    /// Meant for literals in code; use [`Q01::try_from_rat`] for input data.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::try_from_rat(Rat::new(num.into(), den.into())).expect("literal outside [0,1]")
    }

    pub fn try_from_rat(r: Rat) -> Result<Self, ArithError> {
        if r.is_negative() || r > Rat::one() {
            return Err(ArithError::OutOfRange(format_rat(&r)));
        }
        Ok(Q01(r))
    }

    /// Dyadic `k / 2^depth`.
    pub fn dyadic(k: u64, depth: u32) -> Self {
        let den = BigInt::one() << depth;
        Self::try_from_rat(Rat::new(k.into(), den)).expect("dyadic outside [0,1]")
    }

    pub fn as_rat(&self) -> &Rat {
        &self.0
    }

    pub fn into_rat(self) -> Rat {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// Clamp an arbitrary rational into `[0,1]`.
    pub fn clamp(r: Rat) -> Self {
        if r.is_negative() {
            Self::zero()
        } else if r > Rat::one() {
            Self::one()
        } else {
            Q01(r)
        }
    }

    pub fn oplus(&self, other: &Q01) -> Q01 {
        Q01::clamp(&self.0 + &other.0)
    }

    pub fn neg(&self) -> Q01 {
        Q01(Rat::one() - &self.0)
    }

    pub fn odot(&self, other: &Q01) -> Q01 {
        self.neg().oplus(&other.neg()).neg()
    }

    pub fn ominus(&self, other: &Q01) -> Q01 {
        self.odot(&other.neg())
    }

    pub fn dist(&self, other: &Q01) -> Q01 {
        self.ominus(other).oplus(&other.ominus(self))
    }

    pub fn join(&self, other: &Q01) -> Q01 {
        self.neg().oplus(other).neg().oplus(other)
    }

    pub fn meet(&self, other: &Q01) -> Q01 {
        self.neg().join(&other.neg()).neg()
    }

    /// `n·x = x ⊕ ⋯ ⊕ x`, which on `[0,1]` is `min(n·x, 1)`.
    pub fn nfold(&self, n: u64) -> Q01 {
        assert!(n >= 1, "nfold needs n >= 1");
        Q01::clamp(&self.0 * Rat::from_integer(n.into()))
    }

    /// Exact product; total since both factors lie in `[0,1]`.
    pub fn scale(&self, x: &Q01) -> Q01 {
        Q01(&self.0 * &x.0)
    }

    /// Scale by a signed rational, rejecting scalars outside `[0,1]`.
    pub fn scale_by(r: &Rat, x: &Q01) -> Result<Q01, ArithError> {
        let r = Q01::try_from_rat(r.clone())?;
        Ok(r.scale(x))
    }

    /// The eventually-constant series `Σ_{i≤k} p_i/2^i + c/2^k`.
    ///
    /// For unit-interval arguments the sum is at most `1`, so no clamping
    /// happens.
    pub fn delta(prefix: &[Q01], tail: &Q01) -> Q01 {
        let mut sum = Rat::zero();
        let mut weight = Rat::one();
        let half = Rat::new(1.into(), 2.into());
        for p in prefix {
            weight *= &half;
            sum += &p.0 * &weight;
        }
        sum += &tail.0 * &weight;
        debug_assert!(sum <= Rat::one());
        Q01(sum)
    }
}

impl fmt::Display for Q01 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rat(&self.0))
    }
}

impl fmt::Debug for Q01 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q01({})", self)
    }
}

impl FromStr for Q01 {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Q01::try_from_rat(parse_rat(s)?)
    }
}

impl TryFrom<Rat> for Q01 {
    type Error = ArithError;

    fn try_from(r: Rat) -> Result<Self, Self::Error> {
        Q01::try_from_rat(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Q01 {
        s.parse().unwrap()
    }

    fn grid(depth: u32) -> Vec<Q01> {
        (0..=(1u64 << depth)).map(|k| Q01::dyadic(k, depth)).collect()
    }

    #[test]
    fn oplus_examples() {
        assert_eq!(q("1/3").oplus(&q("1/4")), q("7/12"));
        assert_eq!(q("1/2").oplus(&q("3/4")), Q01::one());
        for x in grid(4) {
            assert_eq!(x.oplus(&Q01::zero()), x);
        }
    }

    #[test]
    fn neg_examples() {
        assert_eq!(q("2/5").neg(), q("3/5"));
        assert_eq!(Q01::zero().neg(), Q01::one());
        for x in grid(4) {
            assert_eq!(x.neg().neg(), x);
        }
    }

    #[test]
    fn derived_examples() {
        assert_eq!(q("1/2").odot(&q("3/4")), q("1/4"));
        assert_eq!(q("1/3").dist(&q("3/4")), q("5/12"));
        for x in grid(4) {
            assert_eq!(x.join(&x), x);
            assert_eq!(x.meet(&Q01::one()), x);
        }
    }

    #[test]
    fn nfold_and_scale_examples() {
        assert_eq!(q("1/4").nfold(3), q("3/4"));
        assert_eq!(q("1/4").nfold(5), Q01::one());
        assert_eq!(q("5/7").nfold(1), q("5/7"));
        assert_eq!(q("1/2").scale(&q("2/3")), q("1/3"));
        assert_eq!(Q01::one().scale(&q("2/3")), q("2/3"));
        assert_eq!(Q01::zero().scale(&q("2/3")), Q01::zero());
    }

    #[test]
    fn nfold_matches_iterated_oplus() {
        for x in grid(3) {
            let mut acc = x.clone();
            for n in 1..=10u64 {
                assert_eq!(x.nfold(n), acc);
                acc = acc.oplus(&x);
            }
        }
    }

    #[test]
    fn scale_by_rejects_out_of_range() {
        assert!(Q01::scale_by(&parse_rat("3/2").unwrap(), &q("1/2")).is_err());
        assert!(Q01::scale_by(&parse_rat("-1/2").unwrap(), &q("1/2")).is_err());
        assert_eq!(
            Q01::scale_by(&parse_rat("1/2").unwrap(), &q("1/2")).unwrap(),
            q("1/4")
        );
    }

    #[test]
    fn literal_parsing() {
        assert_eq!(q("0"), Q01::zero());
        assert_eq!(q("1"), Q01::one());
        assert_eq!(q("2/4"), q("1/2"));
        assert!("3/2".parse::<Q01>().is_err());
        assert!("1 /2".parse::<Q01>().is_err());
        assert!("1/0".parse::<Q01>().is_err());
        assert!("1/-2".parse::<Q01>().is_err());
        assert!("".parse::<Q01>().is_err());
        assert_eq!(format_rat(&parse_rat("-6/4").unwrap()), "-3/2");
        assert_eq!(q("6/8").to_string(), "3/4");
    }

    #[test]
    fn mv_axioms_on_dyadic_grid() {
        let g = grid(3);
        let one = Q01::one();
        for x in &g {
            assert_eq!(x.oplus(&one), one);
            for y in &g {
                assert_eq!(x.oplus(y), y.oplus(x));
                // characteristic law
                assert_eq!(x.neg().oplus(y).neg().oplus(y), y.neg().oplus(x).neg().oplus(x));
                for z in &g {
                    assert_eq!(x.oplus(y).oplus(z), x.oplus(&y.oplus(z)));
                }
            }
        }
    }

    #[test]
    fn order_lemmas_on_dyadic_grid() {
        let g = grid(4);
        for x in &g {
            for y in &g {
                let c1 = x.neg().oplus(y).is_one();
                let c2 = x.ominus(y).is_zero();
                let c3 = *y == x.oplus(&y.ominus(x));
                let c4 = g.iter().any(|z| *y == x.oplus(z));
                assert!(c1 == c2 && c2 == c3 && c3 == c4, "{x} {y}");
                assert_eq!(c1, x <= y);
                if x <= y {
                    assert_eq!(*y, x.oplus(&x.dist(y)));
                }
                assert_eq!(x.oplus(y).oplus(&x.odot(y)), x.oplus(y));
                assert_eq!(x.ominus(y).oplus(&x.oplus(&y.neg()).odot(y)), *x);
            }
        }
    }

    #[test]
    fn monotonicity_and_cancellation() {
        let g = grid(2);
        for x in &g {
            for y in g.iter().filter(|y| x <= *y) {
                for w in &g {
                    for z in g.iter().filter(|z| w <= *z) {
                        assert!(x.odot(w) <= y.odot(z));
                        assert!(x.oplus(w) <= y.oplus(z));
                    }
                }
            }
        }
        for x in &g {
            for y in &g {
                for z in &g {
                    if x.oplus(z) == y.oplus(z) && x.odot(z).is_zero() && y.odot(z).is_zero() {
                        assert_eq!(x, y);
                    }
                }
            }
        }
    }

    #[test]
    fn delta_is_a_plain_sum() {
        assert_eq!(Q01::delta(&[Q01::one()], &Q01::zero()), q("1/2"));
        assert_eq!(Q01::delta(&[], &q("2/3")), q("2/3"));
        assert_eq!(Q01::delta(&[Q01::one(), Q01::one()], &Q01::one()), Q01::one());
    }
}
