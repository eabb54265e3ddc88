use num_rational::BigRational;

use super::atom::Atom;
use super::poly::{Expr, Monomial};
use super::ExprError;

/// Default bound on exponents accepted by [`normalize`].
pub const DEFAULT_EXPONENT_BOUND: u32 = 64;

/// Unnormalized expression tree, as produced by the parser.
#[derive(Clone, Debug, PartialEq)]
pub enum RawExpr {
    Num(BigRational),
    Atom(Atom),
    Add(Vec<RawExpr>),
    Mul(Vec<RawExpr>),
    Neg(Box<RawExpr>),
    Pow(Box<RawExpr>, u32),
}

/// Expands a tree into canonical form with the default exponent bound.
pub fn normalize(raw: &RawExpr) -> Result<Expr, ExprError> {
    normalize_bounded(raw, DEFAULT_EXPONENT_BOUND)
}

pub fn normalize_bounded(raw: &RawExpr, bound: u32) -> Result<Expr, ExprError> {
    let e = expand(raw, bound)?;
    for (m, _) in e.terms() {
        if let Some((_, k)) = m.powers().iter().find(|(_, k)| *k > bound) {
            return Err(ExprError::ExponentOverflow { exponent: *k, bound });
        }
    }
    Ok(e)
}

fn expand(raw: &RawExpr, bound: u32) -> Result<Expr, ExprError> {
    Ok(match raw {
        RawExpr::Num(c) => Expr::constant(c.clone()),
        RawExpr::Atom(a) => Expr::atom(*a),
        RawExpr::Add(xs) => {
            let mut acc = Expr::zero();
            for x in xs {
                acc += &expand(x, bound)?;
            }
            acc
        }
        RawExpr::Mul(xs) => {
            let mut acc = Expr::one();
            for x in xs {
                acc = &acc * &expand(x, bound)?;
            }
            acc
        }
        RawExpr::Neg(x) => -expand(x, bound)?,
        RawExpr::Pow(x, k) => {
            if *k > bound {
                return Err(ExprError::ExponentOverflow { exponent: *k, bound });
            }
            expand(x, bound)?.pow(*k)
        }
    })
}

impl Expr {
    /// Tree form of a canonical expression (a sum of products).
    pub fn to_raw(&self) -> RawExpr {
        RawExpr::Add(
            self.terms()
                .map(|(m, c)| {
                    let mut factors = vec![RawExpr::Num(c.clone())];
                    factors.extend(monomial_factors(m));
                    RawExpr::Mul(factors)
                })
                .collect(),
        )
    }
}

fn monomial_factors(m: &Monomial) -> impl Iterator<Item = RawExpr> + '_ {
    m.powers().iter().map(|(a, k)| {
        if *k == 1 {
            RawExpr::Atom(*a)
        } else {
            RawExpr::Pow(Box::new(RawExpr::Atom(*a)), *k)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::poly::rat;

    #[test]
    fn exponent_bound_is_enforced() {
        let x = RawExpr::Atom(Atom::X);
        let big = RawExpr::Pow(Box::new(x.clone()), 65);
        assert!(matches!(
            normalize(&big),
            Err(ExprError::ExponentOverflow { exponent: 65, bound: 64 })
        ));
        let nested = RawExpr::Pow(Box::new(RawExpr::Pow(Box::new(x), 40)), 2);
        assert!(normalize(&nested).is_err());
    }

    #[test]
    fn cancellation() {
        // 2 phi_x + xi_y - xi_y
        let phi_x = RawExpr::Atom(Atom::Fn(
            crate::expr::Func::Phi,
            crate::expr::Partials::new(1, 0, 0),
        ));
        let xi_y = RawExpr::Atom(Atom::Fn(
            crate::expr::Func::Xi,
            crate::expr::Partials::new(0, 1, 0),
        ));
        let raw = RawExpr::Add(vec![
            RawExpr::Mul(vec![RawExpr::Num(rat(2)), phi_x]),
            xi_y.clone(),
            RawExpr::Neg(Box::new(xi_y)),
        ]);
        assert_eq!(normalize(&raw).unwrap().to_string(), "2*phi_x");
    }
}
