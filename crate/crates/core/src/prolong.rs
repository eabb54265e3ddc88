//! Prolongation of point vector fields to the third-order jet space.
//!
//! Coefficients are computed from the characteristic `Q = phi - xi*u1 - tau*u2`
//! as `phi^J = D_J Q + xi*u_{J+x} + tau*u_{J+y}`. For `|J| = 3` the total
//! derivative produces fourth-order jets that must cancel against the two
//! correction terms; a surviving one is a kernel defect.

use std::fmt;

use thiserror::Error;

use crate::expr::{Atom, Axis, BaseVar, Expr, ExprError, Func, Jet, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProlongError {
    #[error("prolongation order must be between 1 and 3, got {0}")]
    BadOrder(u32),
    #[error("fourth-order jet {0} survived the prolongation")]
    ResidualHighJet(String),
    #[error("vector field component {component} contains non-point symbol {atom}")]
    NotPointField { component: &'static str, atom: String },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    /// Components are the unknown functions `xi`, `tau`, `phi` themselves.
    Symbolic,
    /// Components are polynomials in `x`, `y`, `u`.
    Concrete,
}

/// `xi d/dx + tau d/dy + phi d/du`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    xi: Expr,
    tau: Expr,
    phi: Expr,
    kind: FieldKind,
}

impl VectorField {
    /// The generic field with unknown components.
    pub fn symbolic() -> VectorField {
        VectorField {
            xi: Expr::atom(Atom::func(Func::Xi)),
            tau: Expr::atom(Atom::func(Func::Tau)),
            phi: Expr::atom(Atom::func(Func::Phi)),
            kind: FieldKind::Symbolic,
        }
    }

    pub fn concrete(xi: Expr, tau: Expr, phi: Expr) -> Result<VectorField, ProlongError> {
        for (name, c) in [("xi", &xi), ("tau", &tau), ("phi", &phi)] {
            if let Some(a) = c.atoms().into_iter().find(|a| !a.is_base()) {
                return Err(ProlongError::NotPointField {
                    component: name,
                    atom: a.to_string(),
                });
            }
        }
        Ok(VectorField {
            xi,
            tau,
            phi,
            kind: FieldKind::Concrete,
        })
    }

    pub fn zero() -> VectorField {
        VectorField::concrete(Expr::zero(), Expr::zero(), Expr::zero()).unwrap()
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn xi(&self) -> &Expr {
        &self.xi
    }

    pub fn tau(&self) -> &Expr {
        &self.tau
    }

    pub fn phi(&self) -> &Expr {
        &self.phi
    }

    pub fn component(&self, f: Func) -> &Expr {
        match f {
            Func::Xi => &self.xi,
            Func::Tau => &self.tau,
            Func::Phi => &self.phi,
        }
    }

    pub fn components(&self) -> [&Expr; 3] {
        [&self.xi, &self.tau, &self.phi]
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|c| c.is_zero())
    }

    /// Componentwise `a*self + b*other`. Mixing in a symbolic field yields a
    /// symbolic one.
    pub fn combine(&self, a: &Expr, other: &VectorField, b: &Expr) -> VectorField {
        let kind = if self.kind == FieldKind::Concrete && other.kind == FieldKind::Concrete {
            FieldKind::Concrete
        } else {
            FieldKind::Symbolic
        };
        VectorField {
            xi: a * &self.xi + b * &other.xi,
            tau: a * &self.tau + b * &other.tau,
            phi: a * &self.phi + b * &other.phi,
            kind,
        }
    }

    /// Applies the field as a derivation `xi f_x + tau f_y + phi f_u`.
    pub fn apply(&self, f: &Expr) -> Expr {
        &self.xi * &f.pdiff(Var::X) + &self.tau * &f.pdiff(Var::Y) + &self.phi * &f.pdiff(Var::U)
    }

    /// Characteristic `phi - xi*u1 - tau*u2`.
    pub fn characteristic(&self) -> Expr {
        &self.phi - &(&self.xi * &Expr::atom(Atom::U1)) - &self.tau * &Expr::atom(Atom::U2)
    }
}

impl fmt::Display for VectorField {
    /// `.vf` form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "xi = {}", self.xi)?;
        writeln!(f, "tau = {}", self.tau)?;
        writeln!(f, "phi = {}", self.phi)
    }
}

fn jet_expr(j: Option<Jet>) -> Result<Expr, ProlongError> {
    match j {
        Some(j) => Ok(Expr::atom(Atom::Jet(j))),
        None => Err(ProlongError::BadOrder(Jet::MAX_ORDER + 1)),
    }
}

/// Prolongation coefficient `phi^J` for `1 <= |J| <= 3`.
pub fn prolong_coefficient(v: &VectorField, j: Jet) -> Result<Expr, ProlongError> {
    if j.order() > 3 {
        return Err(ProlongError::BadOrder(j.order()));
    }
    let mut d = v.characteristic();
    for _ in 0..j.nx() {
        d = d.total_derivative(Axis::X)?;
    }
    for _ in 0..j.ny() {
        d = d.total_derivative(Axis::Y)?;
    }
    d += &(v.xi() * &jet_expr(j.extend(Axis::X))?);
    d += &(v.tau() * &jet_expr(j.extend(Axis::Y))?);
    if let Some(a) = d
        .atoms()
        .into_iter()
        .find(|a| matches!(a, Atom::Jet(k) if k.order() > 3))
    {
        return Err(ProlongError::ResidualHighJet(a.to_string()));
    }
    Ok(d)
}

/// Third prolongation applied to an expression on the jet space.
pub fn apply_pr3(v: &VectorField, e: &Expr) -> Result<Expr, ProlongError> {
    if e.max_jet_order() > 3 {
        return Err(ProlongError::BadOrder(e.max_jet_order()));
    }
    let mut out = Expr::zero();
    for (b, c) in BaseVar::ALL.into_iter().zip(v.components()) {
        let d = e.pdiff(Var::Base(b));
        if !d.is_zero() {
            out += &(c * &d);
        }
    }
    for j in Jet::all_up_to(3) {
        let d = e.pdiff(Var::Jet(j));
        if !d.is_zero() {
            out += &(&prolong_coefficient(v, j)? * &d);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expr;

    #[test]
    fn first_order_coefficient() {
        let px = prolong_coefficient(&VectorField::symbolic(), Jet::U1).unwrap();
        let expected =
            parse_expr("phi_x + (phi_u - xi_x)*u1 - xi_u*u1^2 - tau_x*u2 - tau_u*u1*u2").unwrap();
        assert_eq!(px, expected);
    }

    #[test]
    fn third_order_coefficient_spot_terms() {
        let p = prolong_coefficient(&VectorField::symbolic(), Jet::U111).unwrap();
        let xi_u_u11sq = parse_expr("xi_u*u11^2").unwrap();
        let (m, _) = xi_u_u11sq.terms().next().unwrap();
        assert_eq!(p.coefficient(m), crate::expr::rat(-3));
        let phi_u_u111 = parse_expr("phi_u*u111").unwrap();
        let (m, _) = phi_u_u111.terms().next().unwrap();
        assert_eq!(p.coefficient(m), crate::expr::rat(1));
        assert_eq!(p.max_jet_order(), 3);
    }

    #[test]
    fn constant_field_has_no_prolongation() {
        let du = VectorField::concrete(Expr::zero(), Expr::zero(), Expr::one()).unwrap();
        for j in Jet::all_up_to(3) {
            assert!(prolong_coefficient(&du, j).unwrap().is_zero());
        }
    }

    #[test]
    fn translation_leaves_bare_jet_invariant() {
        let dx = VectorField::concrete(Expr::one(), Expr::zero(), Expr::zero()).unwrap();
        assert!(apply_pr3(&dx, &Expr::atom(Atom::U1)).unwrap().is_zero());
    }

    #[test]
    fn rejects_non_point_components() {
        assert!(VectorField::concrete(Expr::atom(Atom::U1), Expr::zero(), Expr::zero()).is_err());
        let j4 = Jet::new(4, 0).unwrap();
        assert!(prolong_coefficient(&VectorField::symbolic(), j4).is_err());
    }
}
