//! Brackets, structure constants and symmetry verdicts.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::detgen::{determining_equations, DetgenError, Equation, FieldSubstitution, PdeSystem};
use crate::expr::{fmt_rational, Expr};
use crate::linalg;
use crate::prolong::{FieldKind, VectorField};
use crate::solver::field_coordinates;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("brackets need concrete vector fields")]
    Symbolic,
    #[error("basis is linearly dependent (rank {rank} of {len})")]
    Dependent { rank: usize, len: usize },
    #[error("[e{i}, e{j}] is not in the span of the basis; bracket is\n{residual}")]
    NotClosed { i: usize, j: usize, residual: VectorField },
}

/// `[V, W]^i = V(W^i) - W(V^i)`.
pub fn bracket(v: &VectorField, w: &VectorField) -> Result<VectorField, LieError> {
    if v.kind() != FieldKind::Concrete || w.kind() != FieldKind::Concrete {
        return Err(LieError::Symbolic);
    }
    let c = |a: &Expr, b: &Expr| v.apply(a) - w.apply(b);
    let out = VectorField::concrete(c(w.xi(), v.xi()), c(w.tau(), v.tau()), c(w.phi(), v.phi()))
        .expect("brackets of point fields are point fields");
    Ok(out)
}

/// `c[i][j][k]` with `[e_i, e_j] = sum_k c[i][j][k] e_k`, stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureConstants {
    n: usize,
    c: BTreeMap<(usize, usize, usize), BigRational>,
}

impl StructureConstants {
    pub fn zero(n: usize) -> StructureConstants {
        StructureConstants {
            n,
            c: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> BigRational {
        self.c.get(&(i, j, k)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: BigRational) {
        if v.is_zero() {
            self.c.remove(&(i, j, k));
        } else {
            self.c.insert((i, j, k), v);
        }
    }

    /// Nonzero entries with `i < j`, in index order.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize), &BigRational)> {
        self.c.iter().filter(|((i, j, _), _)| i < j).map(|(k, v)| (*k, v))
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| (0..self.n).all(|k| self.get(i, j, k) == -self.get(j, i, k)))
        })
    }
}

impl fmt::Display for StructureConstants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((i, j, k), v) in self.entries() {
            writeln!(f, "{} {} {}: {}", i + 1, j + 1, k + 1, fmt_rational(v))?;
        }
        Ok(())
    }
}

/// Coordinates of `v` in `basis`, or `None` when `v` is outside the span.
pub fn coordinates(basis: &[VectorField], v: &VectorField) -> Option<Vec<BigRational>> {
    let mut all = basis.to_vec();
    all.push(v.clone());
    let (_, mut vecs) = field_coordinates(&all);
    let target = vecs.pop().unwrap();
    linalg::solve_combination(&vecs, &target)
}

pub fn structure_constants(basis: &[VectorField]) -> Result<StructureConstants, LieError> {
    let n = basis.len();
    let rank = crate::solver::span_rank(basis);
    if rank != n {
        return Err(LieError::Dependent { rank, len: n });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    type Column = (usize, usize, Vec<BigRational>);
    let results: Vec<Result<Column, LieError>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let b = bracket(&basis[i], &basis[j])?;
            match coordinates(basis, &b) {
                Some(c) => Ok((i, j, c)),
                None => Err(LieError::NotClosed { i, j, residual: b }),
            }
        })
        .collect();
    let mut sc = StructureConstants::zero(n);
    for r in results {
        let (i, j, coords) = r?;
        for (k, v) in coords.into_iter().enumerate() {
            sc.set(j, i, k, -v.clone());
            sc.set(i, j, k, v);
        }
    }
    Ok(sc)
}

/// `sum_m c[i][j][m] c[m][k][l] + cyclic = 0` for all `i < j < k` and `l`.
pub fn jacobi_check(sc: &StructureConstants) -> bool {
    let n = sc.dim();
    let term = |a: usize, b: usize, c: usize, l: usize| -> BigRational {
        (0..n).map(|m| sc.get(a, b, m) * sc.get(m, c, l)).sum()
    };
    (0..n).all(|i| {
        (i + 1..n).all(|j| {
            (j + 1..n).all(|k| {
                (0..n).all(|l| (term(i, j, k, l) + term(j, k, i, l) + term(k, i, j, l)).is_zero())
            })
        })
    })
}

#[derive(Clone, Debug)]
pub struct SymmetryVerdict {
    pub holds: bool,
    /// Determining equations that do not vanish, with their residuals.
    pub violated: Vec<(Equation, Expr)>,
}

/// Substitutes a concrete field into every determining equation.
pub fn is_symmetry(system: &PdeSystem, v: &VectorField) -> Result<SymmetryVerdict, DetgenError> {
    let det = determining_equations(system)?;
    let sub = FieldSubstitution::new(v);
    let violated: Vec<(Equation, Expr)> = det
        .equations()
        .iter()
        .filter_map(|e| {
            let r = sub.apply(&e.expr);
            (!r.is_zero()).then(|| (e.clone(), r))
        })
        .collect();
    Ok(SymmetryVerdict {
        holds: violated.is_empty(),
        violated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_vector_field;

    fn vf(s: &str) -> VectorField {
        parse_vector_field(s).unwrap()
    }

    #[test]
    fn translations_commute() {
        let dx = vf("xi = 1\ntau = 0\nphi = 0");
        let dy = vf("xi = 0\ntau = 1\nphi = 0");
        assert!(bracket(&dx, &dy).unwrap().is_zero());
    }

    #[test]
    fn spot_brackets() {
        let dx = vf("xi = 1\ntau = 0\nphi = 0");
        let du = vf("xi = 0\ntau = 0\nphi = 1");
        let w = vf("xi = -2*u\ntau = x\nphi = 0");
        assert_eq!(bracket(&dx, &w).unwrap(), vf("xi = 0\ntau = 1\nphi = 0"));
        assert_eq!(bracket(&du, &w).unwrap(), vf("xi = -2\ntau = 0\nphi = 0"));
    }

    #[test]
    fn not_closed_and_abelian() {
        let dx = vf("xi = 1\ntau = 0\nphi = 0");
        let xdy = vf("xi = 0\ntau = x\nphi = 0");
        assert!(matches!(
            structure_constants(&[dx.clone(), xdy]),
            Err(LieError::NotClosed { i: 0, j: 1, .. })
        ));
        let sc = structure_constants(&[dx]).unwrap();
        assert_eq!(sc.entries().count(), 0);
        assert!(jacobi_check(&sc));
    }

    #[test]
    fn corrupted_constants_fail_jacobi() {
        // sl2: [e1,e2] = e1, [e1,e3] = 2 e2, [e2,e3] = e3.
        let fields = [
            vf("xi = 1\ntau = 0\nphi = 0"),
            vf("xi = x\ntau = 0\nphi = 0"),
            vf("xi = x^2\ntau = 0\nphi = 0"),
        ];
        let mut sc = structure_constants(&fields).unwrap();
        assert!(sc.is_antisymmetric());
        assert!(jacobi_check(&sc));
        let (key, v) = sc.entries().next().map(|(k, v)| (k, v.clone())).unwrap();
        sc.set(key.0, key.1, key.2, -v.clone());
        sc.set(key.1, key.0, key.2, v);
        assert!(!jacobi_check(&sc));
    }

    #[test]
    fn verdicts() {
        let sys = PdeSystem::model();
        let g9 = vf("xi = 1/2*x*y\ntau = 1/2*y^2\nphi = -1/8*x^2");
        assert!(is_symmetry(&sys, &g9).unwrap().holds);
        let bad = vf("xi = 0\ntau = 0\nphi = y");
        let v = is_symmetry(&sys, &bad).unwrap();
        assert!(!v.holds);
        assert!(v.violated.iter().any(|(e, _)| e.expr.to_string() == "phi_y"));
        assert!(is_symmetry(&sys, &VectorField::zero()).unwrap().holds);
    }
}
