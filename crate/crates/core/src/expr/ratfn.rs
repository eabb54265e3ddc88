use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::atom::Atom;
use super::poly::Expr;
use super::ExprError;

/// Quotient of two kernel polynomials over base variables and right-hand-side
/// symbols. Not kept reduced; equality is by cross-multiplication.
#[derive(Clone, Debug)]
pub struct RationalFn {
    numer: Expr,
    denom: Expr,
}

impl RationalFn {
    pub fn new(numer: Expr, denom: Expr) -> Result<RationalFn, ExprError> {
        if denom.is_zero() {
            return Err(ExprError::ZeroDenominator);
        }
        if let Some(a) = numer
            .atoms()
            .into_iter()
            .chain(denom.atoms())
            .find(|a| a.is_jet() || a.is_fn())
        {
            return Err(ExprError::NotACoefficient(a.to_string()));
        }
        let mut r = RationalFn { numer, denom };
        r.tidy();
        Ok(r)
    }

    pub fn from_poly(numer: Expr) -> RationalFn {
        RationalFn {
            numer,
            denom: Expr::one(),
        }
    }

    pub fn numer(&self) -> &Expr {
        &self.numer
    }

    pub fn denom(&self) -> &Expr {
        &self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    /// Constant denominators are folded into the numerator and exact
    /// polynomial quotients are taken.
    fn tidy(&mut self) {
        if self.numer.is_zero() {
            self.denom = Expr::one();
            return;
        }
        if let Some(c) = self.denom.as_constant() {
            self.numer = self.numer.scale(&c.recip());
            self.denom = Expr::one();
            return;
        }
        if let Some(q) = self.numer.div_exact(&self.denom) {
            self.numer = q;
            self.denom = Expr::one();
            return;
        }
        // Make the denominator primitive so equal quotients print alike.
        let p = self.denom.primitive();
        if let Some(s) = p.scale_relative_to(&self.denom) {
            self.numer = self.numer.scale(&s);
            self.denom = p;
        }
    }

    pub fn eval(&self, point: &BTreeMap<Atom, BigRational>) -> Result<BigRational, ExprError> {
        let d = self.denom.eval(point)?;
        if d.is_zero() {
            return Err(ExprError::ZeroDenominator);
        }
        Ok(self.numer.eval(point)? / d)
    }
}

impl PartialEq for RationalFn {
    fn eq(&self, other: &Self) -> bool {
        &self.numer * &other.denom == &other.numer * &self.denom
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom.as_constant().is_some_and(|c| c.is_one()) {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "({})/({})", self.numer, self.denom)
        }
    }
}
