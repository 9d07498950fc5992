//! The carrier interface shared by the term evaluator and the concrete algebras.

use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

use crate::arith::Q01;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CarrierError {
    #[error("carrier `{0}` does not support delta")]
    DeltaUnsupported(String),
    #[error("constant {constant} is not an element of `{carrier}`")]
    ConstantNotInCarrier { constant: String, carrier: String },
    #[error("element {element} does not belong to `{carrier}`")]
    Foreign { element: String, carrier: String },
    #[error("carrier `{0}` is not finite")]
    NotFinite(String),
    #[error("unsupported carrier `{0}` for this operation")]
    Unsupported(String),
}

/// An MV-algebra given by `⊕`, `¬` and `0`; everything else is derived.
///
/// Carriers that admit an eventually-constant `δ` override [`MvAlgebra::delta`].
pub trait MvAlgebra {
    type Elem: Clone + Eq + Hash + Debug;

    fn name(&self) -> String;

    fn zero(&self) -> Self::Elem;

    fn oplus(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;

    fn neg(&self, x: &Self::Elem) -> Self::Elem;

    /// Embed a rational constant, if the carrier contains it.
    fn constant(&self, q: &Q01) -> Result<Self::Elem, CarrierError>;

    /// `δ(p₁,…,p_k, c, c, …)`.
    fn delta(&self, _prefix: &[Self::Elem], _tail: &Self::Elem) -> Result<Self::Elem, CarrierError> {
        Err(CarrierError::DeltaUnsupported(self.name()))
    }

    /// All elements in a fixed order, for finite carriers.
    fn elements(&self) -> Option<Vec<Self::Elem>> {
        None
    }

    fn one(&self) -> Self::Elem {
        self.neg(&self.zero())
    }

    fn is_zero(&self, x: &Self::Elem) -> bool {
        *x == self.zero()
    }

    /// `x ≤ y` iff `¬x ⊕ y = 1`.
    fn leq(&self, x: &Self::Elem, y: &Self::Elem) -> bool {
        self.oplus(&self.neg(x), y) == self.one()
    }

    fn odot(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.neg(&self.oplus(&self.neg(x), &self.neg(y)))
    }

    fn ominus(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.odot(x, &self.neg(y))
    }

    fn dist(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.oplus(&self.ominus(x, y), &self.ominus(y, x))
    }

    fn join(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.oplus(&self.neg(&self.oplus(&self.neg(x), y)), y)
    }

    fn meet(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.neg(&self.join(&self.neg(x), &self.neg(y)))
    }

    fn nfold(&self, n: u64, x: &Self::Elem) -> Self::Elem {
        assert!(n >= 1, "nfold needs n >= 1");
        let mut acc = x.clone();
        for _ in 1..n {
            let next = self.oplus(&acc, x);
            if next == acc {
                break;
            }
            acc = next;
        }
        acc
    }

    /// `f_{1/2}(x) = δ(x, 0, 0, …)`.
    fn half(&self, x: &Self::Elem) -> Result<Self::Elem, CarrierError> {
        self.delta(std::slice::from_ref(x), &self.zero())
    }
}

/// The standard MV-algebra `[0,1]` with `δ(u⃗) = Σ uᵢ/2ⁱ`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UnitInterval;

impl MvAlgebra for UnitInterval {
    type Elem = Q01;

    fn name(&self) -> String {
        "unit".into()
    }

    fn zero(&self) -> Q01 {
        Q01::zero()
    }

    fn oplus(&self, x: &Q01, y: &Q01) -> Q01 {
        x.oplus(y)
    }

    fn neg(&self, x: &Q01) -> Q01 {
        x.neg()
    }

    fn constant(&self, q: &Q01) -> Result<Q01, CarrierError> {
        Ok(q.clone())
    }

    fn delta(&self, prefix: &[Q01], tail: &Q01) -> Result<Q01, CarrierError> {
        Ok(Q01::delta(prefix, tail))
    }

    fn leq(&self, x: &Q01, y: &Q01) -> bool {
        x <= y
    }

    fn nfold(&self, n: u64, x: &Q01) -> Q01 {
        x.nfold(n)
    }
}
