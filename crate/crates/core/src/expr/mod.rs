//! Canonical exact symbolic expressions.
//!
//! An [`Expr`] is a finite map from monomials over [`Atom`]s to nonzero
//! rationals. Everything the rest of the crate computes (prolongations,
//! on-shell substitutions, determining equations) lives in this one type, and
//! structural equality decides identical vanishing.

mod atom;
mod poly;
mod ratfn;
mod raw;

use thiserror::Error;

pub use atom::{Atom, Axis, BaseVar, Func, Jet, Partials, RhsFn, RhsPartials};
pub use poly::{Expr, Monomial, Var};
pub use ratfn::RationalFn;
pub use raw::{normalize, normalize_bounded, RawExpr, DEFAULT_EXPONENT_BOUND};

pub(crate) use poly::{fmt_rational, rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("exponent {exponent} exceeds the bound {bound}")]
    ExponentOverflow { exponent: u32, bound: u32 },
    #[error("jet order budget exhausted at {atom}")]
    OrderBudget { atom: String },
    #[error("unbound atom {0}")]
    UnboundAtom(String),
    #[error("cyclic bindings through {0}")]
    CyclicBindings(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("{0} cannot appear in a rational-function coefficient")]
    NotACoefficient(String),
}
