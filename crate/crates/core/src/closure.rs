//! Reduction of every derivative of `xi, tau, phi` up to order three to a
//! linear form over ten initial coefficients.
//!
//! The determining equations and their derivatives form a linear system over
//! `Q[x, y, u]` in the derivative symbols. Fraction-free elimination, always
//! removing the highest-ranked symbol first, leaves each non-initial symbol
//! expressed through lower ones; back-substitution then gives forms over the
//! initial coefficients. Every polynomial divided by is recorded as a pivot
//! obligation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::detgen::{determining_equations, Condition, DetgenError, DeterminingSystem, FieldSubstitution, Origin, PdeSystem};
use crate::expr::{fmt_rational, Atom, BaseVar, Expr, ExprError, Func, Monomial, Partials, RationalFn, Var};
use crate::prolong::VectorField;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error("pivot for {symbol} vanishes identically (coefficient {pivot})")]
    PivotVanishes { symbol: String, pivot: String },
    #[error("cannot solve for {symbol}: {remaining} still unreduced")]
    Stalled { symbol: String, remaining: String },
    #[error("could not express over the initial coefficients: {}", unreduced.join(", "))]
    Incomplete { unreduced: Vec<String> },
    #[error("pivot {pivot} vanishes at the requested point")]
    PivotAtPoint { pivot: String },
    #[error("the reduction table needs a concrete system")]
    Symbolic,
    #[error(transparent)]
    Detgen(#[from] DetgenError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// `(xi, tau, phi, xi_x, tau_x, phi_x, phi_u, xi_xx, tau_xx, phi_xx)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InitialCoefficients;

impl InitialCoefficients {
    pub const LEN: usize = 10;

    pub fn symbols() -> [Atom; 10] {
        let s = |f, x, u| Atom::Fn(f, Partials::new(x, 0, u));
        [
            s(Func::Xi, 0, 0),
            s(Func::Tau, 0, 0),
            s(Func::Phi, 0, 0),
            s(Func::Xi, 1, 0),
            s(Func::Tau, 1, 0),
            s(Func::Phi, 1, 0),
            s(Func::Phi, 0, 1),
            s(Func::Xi, 2, 0),
            s(Func::Tau, 2, 0),
            s(Func::Phi, 2, 0),
        ]
    }

    pub fn index_of(a: &Atom) -> Option<usize> {
        Self::symbols().iter().position(|s| s == a)
    }

    /// Values of the ten coefficients of a concrete field at a point.
    pub fn evaluate(v: &VectorField, point: &BTreeMap<Atom, BigRational>) -> Result<Vec<BigRational>, ExprError> {
        let sub = FieldSubstitution::new(v);
        Self::symbols()
            .iter()
            .map(|s| match *s {
                Atom::Fn(f, p) => sub.derivative(f, p).eval(point),
                _ => unreachable!(),
            })
            .collect()
    }
}

/// Every derivative symbol of `xi, tau, phi` of order at most `max_order`.
pub fn symbols_up_to(max_order: u32) -> Vec<Atom> {
    let mut out: Vec<Atom> = Func::ALL
        .into_iter()
        .flat_map(|f| Partials::up_to(max_order).into_iter().map(move |p| Atom::Fn(f, p)))
        .collect();
    out.sort_by_key(rank_key);
    out
}

/// Elimination rank: non-initial symbols above initial ones, then order,
/// number of `y`, number of `u`, function.
fn rank_key(a: &Atom) -> (bool, u32, u8, u8, usize) {
    match *a {
        Atom::Fn(f, p) => (
            InitialCoefficients::index_of(a).is_none(),
            p.order(),
            p.y,
            p.u,
            f.index(),
        ),
        _ => (false, 0, 0, 0, 0),
    }
}

/// `sum_i r_i C_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearForm {
    coeffs: BTreeMap<usize, RationalFn>,
}

impl LinearForm {
    pub fn zero() -> LinearForm {
        LinearForm {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn initial(i: usize) -> LinearForm {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(i, RationalFn::from_poly(Expr::one()));
        LinearForm { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Nonzero coefficients by initial-coefficient index.
    pub fn coeffs(&self) -> &BTreeMap<usize, RationalFn> {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Option<&RationalFn> {
        self.coeffs.get(&i)
    }

    /// Value at a point given the values of the initial coefficients there.
    pub fn eval(&self, point: &BTreeMap<Atom, BigRational>, c: &[BigRational]) -> Result<BigRational, ClosureError> {
        let mut total = BigRational::zero();
        for (i, r) in &self.coeffs {
            let v = r.eval(point).map_err(|e| match e {
                ExprError::ZeroDenominator => ClosureError::PivotAtPoint {
                    pivot: r.denom().to_string(),
                },
                e => e.into(),
            })?;
            total += v * &c[*i];
        }
        Ok(total)
    }

    /// Whether `derivative == sum r_i C_i` holds identically for a concrete
    /// field, clearing denominators.
    pub fn holds_for(&self, derivative: &Expr, initial: &[Expr]) -> bool {
        let mut num = Expr::zero();
        let mut den = Expr::one();
        for (i, r) in &self.coeffs {
            num = &(&num * r.denom()) + &(&(r.numer() * &initial[*i]) * &den);
            den = &den * r.denom();
        }
        num == derivative * &den
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let syms = InitialCoefficients::symbols();
        for (k, (i, r)) in self.coeffs.iter().enumerate() {
            let sym = &syms[*i];
            let constant = r.denom().as_constant().is_some_and(|d| d.is_one()) && r.numer().as_constant().is_some();
            if constant {
                let c = r.numer().as_constant().unwrap();
                let (neg, mag) = if c < BigRational::zero() { (true, -c) } else { (false, c) };
                match (k, neg) {
                    (0, true) => f.write_str("-")?,
                    (0, false) => {}
                    (_, true) => f.write_str(" - ")?,
                    (_, false) => f.write_str(" + ")?,
                }
                if mag.is_one() {
                    write!(f, "{sym}")?;
                } else {
                    write!(f, "{}*{sym}", fmt_rational(&mag))?;
                }
            } else {
                if k > 0 {
                    f.write_str(" + ")?;
                }
                if r.denom().as_constant().is_some() {
                    write!(f, "({})*{sym}", r.numer())?;
                } else {
                    write!(f, "({})/({})*{sym}", r.numer(), r.denom())?;
                }
            }
        }
        Ok(())
    }
}

/// Linear form with polynomial numerators over a shared denominator kept as
/// a product of pivot factors.
#[derive(Clone, Debug, Default)]
struct Form {
    numer: BTreeMap<usize, Expr>,
    denom: BTreeMap<Expr, u32>,
}

impl Form {
    fn initial(i: usize) -> Form {
        let mut numer = BTreeMap::new();
        numer.insert(i, Expr::one());
        Form {
            numer,
            denom: BTreeMap::new(),
        }
    }

    /// `-(1/pivot) * sum a_t * form_t`.
    fn solve(terms: &[(&Expr, &Form)], pivot: &Expr) -> Form {
        let mut denom: BTreeMap<Expr, u32> = BTreeMap::new();
        for (_, t) in terms {
            for (f, e) in &t.denom {
                let slot = denom.entry(f.clone()).or_insert(0);
                *slot = (*slot).max(*e);
            }
        }
        let mut numer: BTreeMap<usize, Expr> = BTreeMap::new();
        for (a, t) in terms {
            let mut scale = (*a).clone();
            for (f, e) in &denom {
                let have = t.denom.get(f).copied().unwrap_or(0);
                if *e > have {
                    scale = &scale * &f.pow(e - have);
                }
            }
            for (i, n) in &t.numer {
                let slot = numer.entry(*i).or_insert_with(Expr::zero);
                *slot += &(&scale * n);
            }
        }
        let p = pivot.primitive();
        let s = p.scale_relative_to(pivot).expect("primitive part is a rational multiple");
        let factor = -s;
        for n in numer.values_mut() {
            *n = n.scale(&factor);
        }
        if p.as_constant().is_none() {
            *denom.entry(p).or_insert(0) += 1;
        }
        numer.retain(|_, n| !n.is_zero());
        let mut form = Form { numer, denom };
        form.simplify();
        form
    }

    fn simplify(&mut self) {
        if self.numer.is_empty() {
            self.denom.clear();
            return;
        }
        let factors: Vec<Expr> = self.denom.keys().cloned().collect();
        for f in factors {
            loop {
                let e = self.denom[&f];
                if e == 0 {
                    break;
                }
                let q: Option<BTreeMap<usize, Expr>> = self
                    .numer
                    .iter()
                    .map(|(i, n)| n.div_exact(&f).map(|q| (*i, q)))
                    .collect();
                match q {
                    Some(q) => {
                        self.numer = q;
                        *self.denom.get_mut(&f).unwrap() -= 1;
                    }
                    None => break,
                }
            }
        }
        self.denom.retain(|_, e| *e > 0);
    }

    fn to_linear(&self) -> LinearForm {
        let den = self
            .denom
            .iter()
            .fold(Expr::one(), |acc, (f, e)| &acc * &f.pow(*e));
        LinearForm {
            coeffs: self
                .numer
                .iter()
                .map(|(i, n)| (*i, RationalFn::new(n.clone(), den.clone()).expect("pivot products are nonzero")))
                .collect(),
        }
    }
}

type Row = BTreeMap<Atom, Expr>;

/// Coefficients of an equation that is linear in the derivative symbols.
fn linear_coeffs(e: &Expr) -> Row {
    let mut row = Row::new();
    for (m, c) in e.terms() {
        let mut sym = None;
        let mut rest = Vec::new();
        for (a, k) in m.powers() {
            if a.is_fn() {
                debug_assert!(sym.is_none() && *k == 1, "determining equations are linear");
                sym = Some(*a);
            } else {
                rest.push((*a, *k));
            }
        }
        let sym = sym.expect("determining equations are homogeneous");
        row.entry(sym)
            .or_insert_with(Expr::zero)
            .add_term(Monomial::from_powers(rest), c.clone());
    }
    row.retain(|_, c| !c.is_zero());
    row
}

fn derivative_of_row(e: &Expr, p: Partials) -> Expr {
    let mut d = e.clone();
    for v in p.vars() {
        d = d.pdiff(Var::Base(v));
    }
    d
}

fn fn_order(e: &Expr) -> u32 {
    e.atoms()
        .iter()
        .filter_map(|a| match a {
            Atom::Fn(_, p) => Some(p.order()),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

const INITIAL_STEPS: [(Func, Partials, Condition, u32, u32); 5] = [
    (Func::Tau, Partials { x: 0, y: 0, u: 1 }, Condition::Second, 2, 1),
    (Func::Tau, Partials { x: 0, y: 1, u: 0 }, Condition::First, 0, 2),
    (Func::Xi, Partials { x: 0, y: 0, u: 1 }, Condition::Second, 2, 0),
    (Func::Xi, Partials { x: 0, y: 1, u: 0 }, Condition::First, 0, 1),
    (Func::Phi, Partials { x: 0, y: 1, u: 0 }, Condition::First, 0, 0),
];

fn initial_forms(det: &DeterminingSystem) -> Result<Vec<(Atom, Form)>, ClosureError> {
    let mut solved: Vec<(Atom, Form)> = Vec::new();
    for (f, p, condition, u11_power, u1_power) in INITIAL_STEPS {
        let symbol = Atom::Fn(f, p);
        let eq = det
            .coefficient(Origin {
                condition,
                u11_power,
                u1_power,
            })
            .cloned()
            .unwrap_or_else(Expr::zero);
        let row = linear_coeffs(&eq);
        let pivot = row.get(&symbol).cloned().unwrap_or_else(Expr::zero);
        if pivot.is_zero() {
            return Err(ClosureError::PivotVanishes {
                symbol: symbol.to_string(),
                pivot: "0".into(),
            });
        }
        let mut terms: Vec<(Expr, Form)> = Vec::new();
        let mut remaining = Vec::new();
        for (s, a) in &row {
            if *s == symbol {
                continue;
            }
            if let Some(i) = InitialCoefficients::index_of(s) {
                terms.push((a.clone(), Form::initial(i)));
            } else if let Some((_, form)) = solved.iter().find(|(t, _)| t == s) {
                terms.push((a.clone(), form.clone()));
            } else {
                remaining.push(s.to_string());
            }
        }
        if !remaining.is_empty() {
            return Err(ClosureError::Stalled {
                symbol: symbol.to_string(),
                remaining: remaining.join(", "),
            });
        }
        let refs: Vec<(&Expr, &Form)> = terms.iter().map(|(a, f)| (a, f)).collect();
        solved.push((symbol, Form::solve(&refs, &pivot)));
    }
    Ok(solved)
}

/// The first five relations, solved in a fixed order from single split
/// coefficients: `tau_u`, `tau_y`, `xi_u`, `xi_y`, `phi_y`.
pub fn initial_relations(system: &PdeSystem) -> Result<Vec<(Atom, LinearForm)>, ClosureError> {
    if system.is_generic() {
        return Err(ClosureError::Symbolic);
    }
    let det = determining_equations(system)?;
    Ok(initial_forms(&det)?
        .into_iter()
        .map(|(a, f)| (a, f.to_linear()))
        .collect())
}

#[derive(Clone, Debug)]
pub struct ReductionTable {
    entries: BTreeMap<Atom, LinearForm>,
    pivots: Vec<Expr>,
    constraints: Vec<Expr>,
    max_order: u32,
    pool_order: u32,
}

impl ReductionTable {
    /// Linear relations left among the initial coefficients themselves; each
    /// cuts the solution space below ten dimensions.
    pub fn constraints(&self) -> &[Expr] {
        &self.constraints
    }

    pub fn get(&self, symbol: &Atom) -> Option<&LinearForm> {
        self.entries.get(symbol)
    }

    /// All entries in elimination-rank order, initial coefficients first.
    pub fn entries(&self) -> Vec<(&Atom, &LinearForm)> {
        let mut v: Vec<_> = self.entries.iter().collect();
        v.sort_by_key(|(a, _)| rank_key(a));
        v
    }

    /// Entries for the non-initial symbols.
    pub fn reduced(&self) -> Vec<(&Atom, &LinearForm)> {
        self.entries()
            .into_iter()
            .filter(|(a, _)| InitialCoefficients::index_of(a).is_none())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Non-constant polynomials divided by during elimination; each is
    /// required to be nonzero where the table is used.
    pub fn pivots(&self) -> &[Expr] {
        &self.pivots
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    /// Highest derivative order of the equations fed to the elimination.
    pub fn pool_order(&self) -> u32 {
        self.pool_order
    }

    /// Compares every entry with direct differentiation of `v` at `point`.
    pub fn reconstruct_check(
        &self,
        v: &VectorField,
        point: [BigRational; 3],
    ) -> Result<ReconstructionReport, ClosureError> {
        let point: BTreeMap<Atom, BigRational> = BaseVar::ALL
            .into_iter()
            .map(Atom::Base)
            .zip(point)
            .collect();
        for p in &self.pivots {
            if p.eval(&point)?.is_zero() {
                return Err(ClosureError::PivotAtPoint { pivot: p.to_string() });
            }
        }
        let c = InitialCoefficients::evaluate(v, &point)?;
        let sub = FieldSubstitution::new(v);
        let mut rows = Vec::new();
        for (sym, form) in self.entries() {
            let Atom::Fn(f, p) = *sym else { unreachable!() };
            let direct = sub.derivative(f, p).eval(&point)?;
            let predicted = form.eval(&point, &c)?;
            rows.push(SymbolCheck {
                symbol: *sym,
                predicted,
                direct,
            });
        }
        Ok(ReconstructionReport { rows })
    }

    /// Symbols whose entry is not an identity in `(x, y, u)` for `v`.
    pub fn violations(&self, v: &VectorField) -> Vec<Atom> {
        let sub = FieldSubstitution::new(v);
        let initial: Vec<Expr> = InitialCoefficients::symbols()
            .iter()
            .map(|s| match *s {
                Atom::Fn(f, p) => sub.derivative(f, p),
                _ => unreachable!(),
            })
            .collect();
        self.entries
            .iter()
            .filter(|(sym, form)| {
                let Atom::Fn(f, p) = **sym else { unreachable!() };
                !form.holds_for(&sub.derivative(f, p), &initial)
            })
            .map(|(a, _)| *a)
            .collect()
    }
}

impl fmt::Display for ReductionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (sym, form) in self.reduced() {
            writeln!(f, "{sym} = {form}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SymbolCheck {
    pub symbol: Atom,
    pub predicted: BigRational,
    pub direct: BigRational,
}

impl SymbolCheck {
    pub fn equal(&self) -> bool {
        self.predicted == self.direct
    }
}

#[derive(Clone, Debug)]
pub struct ReconstructionReport {
    pub rows: Vec<SymbolCheck>,
}

impl ReconstructionReport {
    pub fn all_equal(&self) -> bool {
        self.rows.iter().all(SymbolCheck::equal)
    }

    pub fn equal_count(&self) -> usize {
        self.rows.iter().filter(|r| r.equal()).count()
    }
}

fn row_content(row: &Row) -> BigRational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for c in row.values() {
        for (_, k) in c.terms() {
            num = num.gcd(k.numer());
            den = den.lcm(k.denom());
        }
    }
    BigRational::new(num, den)
}

fn tidy_row(row: &mut Row, factors: &[Expr]) {
    row.retain(|_, c| !c.is_zero());
    if row.is_empty() {
        return;
    }
    let g = row_content(row);
    if !g.is_one() {
        let inv = g.recip();
        for c in row.values_mut() {
            *c = c.scale(&inv);
        }
    }
    for f in factors {
        loop {
            let q: Option<Row> = row
                .iter()
                .map(|(s, c)| c.div_exact(f).map(|q| (*s, q)))
                .collect();
            match q {
                Some(q) => *row = q,
                None => break,
            }
        }
    }
}

fn pivot_cost(c: &Expr) -> (bool, u32, usize) {
    let deg = c.terms().map(|(m, _)| m.degree()).max().unwrap_or(0);
    (c.as_constant().is_none(), deg, c.len())
}

struct Elimination {
    /// `(symbol, row)` in elimination order.
    pivot_rows: Vec<(Atom, Row)>,
    pivots: Vec<Expr>,
    /// Rows left over, involving only initial coefficients.
    rest: Vec<Row>,
}

fn eliminate(mut active: Vec<Row>, symbols: &[Atom]) -> Elimination {
    let mut pivot_rows = Vec::new();
    let mut pivots: Vec<Expr> = Vec::new();
    for s in symbols.iter().rev() {
        if InitialCoefficients::index_of(s).is_some() {
            continue;
        }
        let Some(best) = active
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.get(s).map(|c| (pivot_cost(c), i)))
            .min()
            .map(|(_, i)| i)
        else {
            continue;
        };
        let prow = active.remove(best);
        let p = prow[s].clone();
        if p.as_constant().is_none() {
            let pp = p.primitive();
            if !pivots.contains(&pp) {
                pivots.push(pp);
            }
        }
        for row in active.iter_mut() {
            let Some(a) = row.get(s).cloned() else { continue };
            if let Some(q) = a.div_exact(&p) {
                for (t, c) in &prow {
                    let slot = row.entry(*t).or_insert_with(Expr::zero);
                    *slot -= &(&q * c);
                }
            } else {
                for c in row.values_mut() {
                    *c = &p * &*c;
                }
                for (t, c) in &prow {
                    let slot = row.entry(*t).or_insert_with(Expr::zero);
                    *slot -= &(&a * c);
                }
            }
            tidy_row(row, &pivots);
        }
        active.retain(|r| !r.is_empty());
        pivot_rows.push((*s, prow));
    }
    Elimination {
        pivot_rows,
        pivots,
        rest: active,
    }
}

fn equation_pool(det: &DeterminingSystem, pool_order: u32) -> Vec<Row> {
    let mut seen = BTreeSet::new();
    let mut pool = Vec::new();
    for e in det.equations() {
        let ord = fn_order(&e.expr);
        if ord > pool_order {
            continue;
        }
        for p in Partials::up_to(pool_order - ord) {
            let d = derivative_of_row(&e.expr, p).primitive();
            if !d.is_zero() && seen.insert(d.clone()) {
                pool.push(linear_coeffs(&d));
            }
        }
    }
    pool
}

/// Builds the full reduction table for symbols of order `<= max_order`.
///
/// Derivatives of the determining equations up to `max_order` are used
/// first; if that leaves symbols unreduced, up to two further orders are
/// tried before reporting them.
pub fn complete_table(system: &PdeSystem, max_order: u32) -> Result<ReductionTable, ClosureError> {
    if system.is_generic() {
        return Err(ClosureError::Symbolic);
    }
    let det = determining_equations(system)?;
    initial_forms(&det)?;

    let mut unreduced = Vec::new();
    for pool_order in max_order..=max_order + 2 {
        let pool = equation_pool(&det, pool_order);
        let symbols = symbols_up_to(pool_order);
        let elim = eliminate(pool, &symbols);

        let targets = symbols_up_to(max_order);
        let mut forms: BTreeMap<Atom, Form> = BTreeMap::new();
        for (i, s) in InitialCoefficients::symbols().into_iter().enumerate() {
            forms.insert(s, Form::initial(i));
        }
        // Lowest-ranked pivots first, so every lower symbol is already known.
        unreduced.clear();
        for (s, row) in elim.pivot_rows.iter().rev() {
            if fn_order(&Expr::atom(*s)) > max_order {
                continue;
            }
            let mut terms = Vec::new();
            let mut missing = false;
            for (t, a) in row {
                if t == s {
                    continue;
                }
                match forms.get(t) {
                    Some(f) => terms.push((a, f.clone())),
                    None => missing = true,
                }
            }
            if missing {
                continue;
            }
            let refs: Vec<(&Expr, &Form)> = terms.iter().map(|(a, f)| (*a, f)).collect();
            forms.insert(*s, Form::solve(&refs, &row[s]));
        }
        for t in &targets {
            if !forms.contains_key(t) {
                unreduced.push(t.to_string());
            }
        }
        if unreduced.is_empty() {
            let entries = targets
                .iter()
                .map(|t| (*t, forms[t].to_linear()))
                .collect();
            let mut pivots = elim.pivots;
            pivots.sort();
            let constraints = elim
                .rest
                .iter()
                .map(|r| {
                    r.iter()
                        .fold(Expr::zero(), |acc, (s, c)| &acc + &(c * &Expr::atom(*s)))
                        .primitive()
                })
                .collect();
            return Ok(ReductionTable {
                entries,
                pivots,
                constraints,
                max_order,
                pool_order,
            });
        }
    }
    Err(ClosureError::Incomplete { unreduced })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_atom, parse_expr, parse_system, parse_vector_field};

    fn form_str(t: &ReductionTable, s: &str) -> String {
        t.get(&parse_atom(s).unwrap()).unwrap().to_string()
    }

    #[test]
    fn symbol_counts() {
        assert_eq!(symbols_up_to(3).len(), 60);
        let non_initial = symbols_up_to(3)
            .iter()
            .filter(|a| InitialCoefficients::index_of(a).is_none())
            .count();
        assert_eq!(non_initial, 50);
    }

    #[test]
    fn model_initial_relations() {
        let r = initial_relations(&PdeSystem::model()).unwrap();
        let shown: Vec<String> = r.iter().map(|(a, f)| format!("{a} = {f}")).collect();
        assert_eq!(
            shown,
            [
                "tau_u = 0",
                "tau_y = 2*xi_x - phi_u",
                "xi_u = -2*tau_x",
                "xi_y = -2*phi_x",
                "phi_y = 0"
            ]
        );
    }

    #[test]
    fn generic_initial_tau_u() {
        let sys = parse_system("F1 = 0\nF2 = x + 1\nF3 = y\nG = 0\n").unwrap();
        let r = initial_relations(&sys).unwrap();
        let (_, tau_u) = &r[0];
        let c = tau_u.coeff(4).unwrap();
        let expected = RationalFn::new(parse_expr("-3*y").unwrap(), parse_expr("2*x + 2").unwrap()).unwrap();
        assert_eq!(*c, expected);
    }

    #[test]
    fn model_table_is_complete_and_sound() {
        let t = complete_table(&PdeSystem::model(), 3).unwrap();
        assert_eq!(t.len(), 60);
        assert_eq!(t.reduced().len(), 50);
        assert!(t.pivots().is_empty());
        assert!(t.constraints().is_empty());
        assert_eq!(form_str(&t, "phi_xu"), "xi_xx");
        assert_eq!(form_str(&t, "tau_xxx"), "0");
        assert_eq!(form_str(&t, "phi_xxx"), "0");
        let g10 = parse_vector_field("xi = 1/2*x^2 - 2*y*u\ntau = x*y\nphi = x*u").unwrap();
        assert!(t.violations(&g10).is_empty());
        let one = BigRational::one();
        let rep = t.reconstruct_check(&g10, [one.clone(), one.clone(), one]).unwrap();
        assert!(rep.all_equal());
    }

    #[test]
    fn table_agrees_with_initial_relations() {
        let sys = parse_system("F1 = u\nF2 = 1\nF3 = 0\nG = u1\n").unwrap();
        let t = complete_table(&sys, 3).unwrap();
        for (a, f) in initial_relations(&sys).unwrap() {
            assert_eq!(t.get(&a).unwrap(), &f, "{a}");
        }
    }
}
