//! Exact MV-algebras and δ-algebras.
//!
//! - [`arith`]: exact rationals in `[0,1]` and the standard MV operations
//! - [`term`]: the term language, its parser and a carrier-generic evaluator
//! - [`decide`]: a complete decision procedure for MV and finite-δ (in)equations
//! - [`carriers`]: finite chains, products and Chang's algebra
//! - [`plfunc`]: piecewise-linear functions on `[0,1]` as a δ-algebra
//! - [`gammaxi`]: good sequences and the enveloping group Ξ(A)
//! - [`spectrum`]: maximal ideals, Hölder homomorphisms and the η/ε maps
//! - [`cli`]: the command-line front end

pub mod algebra;
pub mod arith;
pub mod carriers;
pub mod cli;
pub mod corpus;
pub mod decide;
pub mod gammaxi;
pub mod plfunc;
pub mod spectrum;
pub mod term;

pub use algebra::{CarrierError, MvAlgebra, UnitInterval};
pub use arith::{Q01, Rat};
pub use term::{evaluate, parse, parse_equation, Equation, EvSeq, Relation, Term};
