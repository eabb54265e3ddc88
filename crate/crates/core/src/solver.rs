//! Exact solution of the determining system under a polynomial ansatz.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::detgen::{determining_equations, DetgenError, DeterminingSystem, FieldSubstitution, PdeSystem};
use crate::expr::{Atom, BaseVar, Expr, Func, Monomial};
use crate::linalg::{self, Matrix};
use crate::prolong::VectorField;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("ansatz degree must be at least 1")]
    BadDegree,
    #[error("sweep range {dmin}..={dmax} is empty")]
    BadSweep { dmin: u32, dmax: u32 },
    #[error("the system has symbolic right-hand sides; a concrete system is required")]
    Symbolic,
    #[error("basis field {index} violates determining equation `{equation} = 0`")]
    Unsound { index: usize, equation: String },
    #[error(transparent)]
    Detgen(#[from] DetgenError),
}

/// One ansatz coefficient: `func` times `x^i y^j u^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColumnLabel {
    pub func: Func,
    pub exponents: [u32; 3],
}

impl ColumnLabel {
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn monomial(&self) -> Monomial {
        Monomial::from_powers(
            BaseVar::ALL
                .into_iter()
                .zip(self.exponents)
                .map(|(v, e)| (Atom::Base(v), e)),
        )
    }

    fn from_monomial(func: Func, m: &Monomial) -> ColumnLabel {
        let e = |v| m.exponent(&Atom::Base(v));
        ColumnLabel {
            func,
            exponents: [e(BaseVar::X), e(BaseVar::Y), e(BaseVar::U)],
        }
    }
}

impl fmt::Display for ColumnLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.func.name(), self.monomial())
    }
}

/// All `(func, monomial)` pairs of total degree at most `degree`, highest
/// degree first so that the low-degree coefficients end up as free columns.
pub fn ansatz_columns(degree: u32) -> Vec<ColumnLabel> {
    let mut out = Vec::new();
    for d in (0..=degree).rev() {
        for func in Func::ALL {
            for i in (0..=d).rev() {
                for j in (0..=d - i).rev() {
                    out.push(ColumnLabel {
                        func,
                        exponents: [i, j, d - i - j],
                    });
                }
            }
        }
    }
    out
}

/// Which determining equation and which `(x, y, u)` monomial a row encodes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RowLabel {
    pub equation: usize,
    pub monomial: Monomial,
}

#[derive(Clone, Debug)]
pub struct LinearSystem {
    degree: u32,
    columns: Vec<ColumnLabel>,
    row_labels: Vec<RowLabel>,
    matrix: Matrix,
}

impl LinearSystem {
    pub fn degree(&self) -> u32 {
        self.degree
    }
    pub fn columns(&self) -> &[ColumnLabel] {
        &self.columns
    }
    pub fn row_labels(&self) -> &[RowLabel] {
        &self.row_labels
    }
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

/// Substitutes the general polynomial ansatz of total degree `degree` into
/// every determining equation; one row per equation and monomial.
pub fn build_linear_system(
    det: &DeterminingSystem,
    system: &PdeSystem,
    degree: u32,
) -> Result<LinearSystem, SolverError> {
    if degree < 1 {
        return Err(SolverError::BadDegree);
    }
    if system.is_generic() {
        return Err(SolverError::Symbolic);
    }
    let columns = ansatz_columns(degree);
    // Equations are linear, so each column contributes independently.
    let per_column: Vec<Vec<Expr>> = columns
        .par_iter()
        .map(|c| {
            let m = Expr::term(BigRational::one(), c.monomial());
            let z = Expr::zero();
            let comps = Func::ALL.map(|f| if f == c.func { m.clone() } else { z.clone() });
            let [xi, tau, phi] = comps;
            let v = VectorField::concrete(xi, tau, phi).expect("ansatz monomials are point functions");
            det.residuals(&v)
        })
        .collect();

    let mut rows: BTreeMap<RowLabel, Vec<(usize, BigRational)>> = BTreeMap::new();
    for (col, residuals) in per_column.iter().enumerate() {
        for (equation, r) in residuals.iter().enumerate() {
            for (m, c) in r.terms() {
                rows.entry(RowLabel {
                    equation,
                    monomial: m.clone(),
                })
                .or_default()
                .push((col, c.clone()));
            }
        }
    }
    let mut matrix = Matrix::new(columns.len());
    let mut row_labels = Vec::with_capacity(rows.len());
    for (label, row) in rows {
        row_labels.push(label);
        matrix.push_row(row);
    }
    Ok(LinearSystem {
        degree,
        columns,
        row_labels,
        matrix,
    })
}

/// Exact kernel basis, one vector per free column.
pub fn nullspace(ls: &LinearSystem) -> Vec<Vec<BigRational>> {
    ls.matrix.nullspace()
}

pub fn field_from_vector(columns: &[ColumnLabel], v: &[BigRational]) -> VectorField {
    let mut comps = [Expr::zero(), Expr::zero(), Expr::zero()];
    for (c, k) in columns.iter().zip(v) {
        if !k.is_zero() {
            comps[c.func.index()].add_term(c.monomial(), k.clone());
        }
    }
    let [xi, tau, phi] = comps;
    VectorField::concrete(xi, tau, phi).expect("ansatz monomials are point functions")
}

#[derive(Clone, Debug)]
pub struct SymmetryBasis {
    pub degree: u32,
    pub columns: Vec<ColumnLabel>,
    pub vectors: Vec<Vec<BigRational>>,
    pub fields: Vec<VectorField>,
}

impl SymmetryBasis {
    pub fn dimension(&self) -> usize {
        self.fields.len()
    }
}

/// Basis of the polynomial symmetries of total degree at most `degree`.
/// Each field is re-substituted into the determining equations before it is
/// returned.
pub fn symmetry_basis(system: &PdeSystem, degree: u32) -> Result<SymmetryBasis, SolverError> {
    let det = determining_equations(system)?;
    basis_from(&det, system, degree)
}

fn basis_from(det: &DeterminingSystem, system: &PdeSystem, degree: u32) -> Result<SymmetryBasis, SolverError> {
    let ls = build_linear_system(det, system, degree)?;
    let vectors = nullspace(&ls);
    let fields: Vec<VectorField> = vectors
        .iter()
        .map(|v| field_from_vector(&ls.columns, v))
        .collect();
    for (index, f) in fields.iter().enumerate() {
        let sub = FieldSubstitution::new(f);
        if let Some(e) = det
            .equations()
            .iter()
            .find(|e| !sub.apply(&e.expr).is_zero())
        {
            return Err(SolverError::Unsound {
                index,
                equation: e.expr.to_string(),
            });
        }
    }
    Ok(SymmetryBasis {
        degree,
        columns: ls.columns,
        vectors,
        fields,
    })
}

/// Coefficient vectors of `fields` in a shared label space (the union of all
/// monomials that occur, in label order).
pub fn field_coordinates(fields: &[VectorField]) -> (Vec<ColumnLabel>, Vec<Vec<BigRational>>) {
    let mut labels = std::collections::BTreeSet::new();
    for v in fields {
        for f in Func::ALL {
            for (m, _) in v.component(f).terms() {
                labels.insert(ColumnLabel::from_monomial(f, m));
            }
        }
    }
    let labels: Vec<ColumnLabel> = labels.into_iter().collect();
    let vectors = fields
        .iter()
        .map(|v| {
            labels
                .iter()
                .map(|l| v.component(l.func).coefficient(&l.monomial()))
                .collect()
        })
        .collect();
    (labels, vectors)
}

/// Rank of a set of fields as vectors of polynomial coefficients.
pub fn span_rank(fields: &[VectorField]) -> usize {
    linalg::rank(&field_coordinates(fields).1)
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub bases: Vec<SymmetryBasis>,
    /// Rank of all bases stacked together.
    pub stacked_rank: usize,
}

impl SweepReport {
    pub fn dimensions(&self) -> Vec<(u32, usize)> {
        self.bases.iter().map(|b| (b.degree, b.dimension())).collect()
    }
}

pub fn sweep(system: &PdeSystem, dmin: u32, dmax: u32) -> Result<SweepReport, SolverError> {
    if dmin > dmax {
        return Err(SolverError::BadSweep { dmin, dmax });
    }
    if dmin < 1 {
        return Err(SolverError::BadDegree);
    }
    let det = determining_equations(system)?;
    let bases = (dmin..=dmax)
        .into_par_iter()
        .map(|d| basis_from(&det, system, d))
        .collect::<Result<Vec<_>, _>>()?;
    let all: Vec<VectorField> = bases.iter().flat_map(|b| b.fields.iter().cloned()).collect();
    Ok(SweepReport {
        stacked_rank: span_rank(&all),
        bases,
    })
}
