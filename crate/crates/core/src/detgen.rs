//! Determining equations of Lie point symmetries for
//! `u_2 = F1 u1 + F2 u1^2 + F3 u1^3`, `u_111 = G`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::expr::{Atom, Axis, Expr, ExprError, Func, Jet, Partials, RhsFn, Var};
use crate::prolong::{apply_pr3, ProlongError, VectorField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("degenerate system: F2 is identically zero")]
    Degenerate,
    #[error("`{atom}` is not allowed in {field}")]
    ForbiddenAtom { field: &'static str, atom: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetgenError {
    #[error("jet {jet} remains in a determining equation after on-shell substitution")]
    JetsRemain { jet: String },
    #[error("determining equation is not linear homogeneous in xi, tau, phi: {0}")]
    NotLinear(String),
    #[error(transparent)]
    Prolong(#[from] ProlongError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// The right-hand sides `(F1, F2, F3, G)` of the system.
///
/// Concrete systems hold polynomials (`F1`, `F2` over `x, y, u`; `F3`, `G`
/// may also use `u1`). The generic system holds the bare symbols instead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdeSystem {
    f1: Expr,
    f2: Expr,
    f3: Expr,
    g: Expr,
    u1_free_rhs: bool,
}

impl PdeSystem {
    pub fn new(f1: Expr, f2: Expr, f3: Expr, g: Expr) -> Result<PdeSystem, SystemError> {
        let point = |a: &Atom| a.is_base() || matches!(a, Atom::Rhs(_, p) if p.u1 == 0);
        let jet = |a: &Atom| point(a) || *a == Atom::U1 || a.is_rhs();
        for (field, e, ok) in [
            ("F1", &f1, &point as &dyn Fn(&Atom) -> bool),
            ("F2", &f2, &point),
            ("F3", &f3, &jet),
            ("G", &g, &jet),
        ] {
            if let Some(a) = e.atoms().into_iter().find(|a| !ok(a)) {
                return Err(SystemError::ForbiddenAtom {
                    field,
                    atom: a.to_string(),
                });
            }
        }
        if f2.is_zero() {
            return Err(SystemError::Degenerate);
        }
        Ok(PdeSystem {
            f1,
            f2,
            f3,
            g,
            u1_free_rhs: false,
        })
    }

    /// `F1, F2, F3, G` kept as opaque functions; `F3` and `G` depend on `u1`.
    pub fn generic() -> PdeSystem {
        let s = |f| Expr::atom(Atom::rhs(f));
        PdeSystem {
            f1: s(RhsFn::F1),
            f2: s(RhsFn::F2),
            f3: s(RhsFn::F3),
            g: s(RhsFn::G),
            u1_free_rhs: false,
        }
    }

    /// Generic system whose `F3` and `G` do not depend on `u1` (so `F3` plays
    /// the role of the constant term of its `u1` expansion).
    pub fn generic_u1_free() -> PdeSystem {
        PdeSystem {
            u1_free_rhs: true,
            ..PdeSystem::generic()
        }
    }

    /// `u_2 = u1^2`, `u_111 = 0`.
    pub fn model() -> PdeSystem {
        PdeSystem::new(Expr::zero(), Expr::one(), Expr::zero(), Expr::zero()).unwrap()
    }

    pub fn f1(&self) -> &Expr {
        &self.f1
    }
    pub fn f2(&self) -> &Expr {
        &self.f2
    }
    pub fn f3(&self) -> &Expr {
        &self.f3
    }
    pub fn g(&self) -> &Expr {
        &self.g
    }

    pub fn is_generic(&self) -> bool {
        [&self.f1, &self.f2, &self.f3, &self.g]
            .iter()
            .any(|e| e.any_atom(Atom::is_rhs))
    }

    pub fn is_model(&self) -> bool {
        *self == PdeSystem::model()
    }

    /// `F = F1 u1 + F2 u1^2 + F3 u1^3`.
    pub fn first_rhs(&self) -> Expr {
        let u1 = Expr::atom(Atom::U1);
        &self.f1 * &u1 + &self.f2 * &u1.pow(2) + &self.f3 * &u1.pow(3)
    }

    /// The two equations written as `lhs - rhs`.
    pub fn equations(&self) -> [Expr; 2] {
        [
            Expr::atom(Atom::U2) - self.first_rhs(),
            Expr::atom(Atom::U111) - &self.g,
        ]
    }

    fn specialize(&self, e: Expr) -> Expr {
        if self.u1_free_rhs {
            e.drop_u1_dependence()
        } else {
            e
        }
    }

    /// Rewrites an expression written with the generic symbols `F1 ... G`
    /// for this system: derivatives of the concrete right-hand sides are
    /// substituted in, symbolic ones are kept.
    pub fn instantiate(&self, e: &Expr) -> Expr {
        let out = e.substitute_with(|a| match *a {
            Atom::Rhs(f, p) => {
                let mut d = match f {
                    RhsFn::F1 => self.f1.clone(),
                    RhsFn::F2 => self.f2.clone(),
                    RhsFn::F3 => self.f3.clone(),
                    RhsFn::G => self.g.clone(),
                };
                if d == Expr::atom(Atom::rhs(f)) {
                    return None;
                }
                for v in p.base.vars() {
                    d = d.pdiff(Var::Base(v));
                }
                for _ in 0..p.u1 {
                    d = d.pdiff(Var::U1);
                }
                Some(d)
            }
            _ => None,
        });
        self.specialize(out)
    }
}

/// Ordered on-shell bindings, highest jet first: `u112`, `u111`, `u12`, `u2`.
///
/// Every value is free of the four bound jets.
pub fn on_shell(system: &PdeSystem) -> Result<Vec<(Jet, Expr)>, ExprError> {
    let f = system.first_rhs();
    let mut b = BTreeMap::new();
    b.insert(Atom::U2, f.clone());
    b.insert(Atom::U111, system.g.clone());
    let u12 = system.specialize(f.total_derivative(Axis::X)?.substitute(&b)?);
    b.insert(Atom::U12, u12.clone());
    let u112 = system.specialize(u12.total_derivative(Axis::X)?.substitute(&b)?);
    Ok(vec![
        (Jet::U112, u112),
        (Jet::U111, system.g.clone()),
        (Jet::U12, u12),
        (Jet::U2, f),
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// Invariance of `u_2 = F`.
    First,
    /// Invariance of `u_111 = G`.
    Second,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::First => "cond1",
            Condition::Second => "cond2",
        })
    }
}

/// Where a determining equation came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Origin {
    pub condition: Condition,
    pub u11_power: u32,
    pub u1_power: u32,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} : u11^{} u1^{}",
            self.condition, self.u11_power, self.u1_power
        )
    }
}

/// Coefficient of one power of `u11` in one invariance condition, before
/// splitting by powers of `u1`.
#[derive(Clone, Debug)]
pub struct Stratum {
    pub condition: Condition,
    pub u11_power: u32,
    pub expr: Expr,
}

#[derive(Clone, Debug)]
pub struct Equation {
    /// Primitive integer form.
    pub expr: Expr,
    pub origins: Vec<Origin>,
    /// Set when the equation is a pure derivative of another one.
    pub consequence_of: Option<(usize, Partials)>,
}

impl Equation {
    /// Highest derivative order among the unknown-function symbols.
    pub fn order(&self) -> u32 {
        fn_order(&self.expr)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = 0", self.expr)
    }
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

#[derive(Clone, Debug)]
pub struct DeterminingSystem {
    strata: Vec<Stratum>,
    raw: Vec<(Origin, Expr)>,
    equations: Vec<Equation>,
}

impl DeterminingSystem {
    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn stratum(&self, condition: Condition, u11_power: u32) -> Option<&Expr> {
        self.strata
            .iter()
            .find(|s| s.condition == condition && s.u11_power == u11_power)
            .map(|s| &s.expr)
    }

    /// Split coefficients in generation order, before deduplication.
    pub fn raw(&self) -> &[(Origin, Expr)] {
        &self.raw
    }

    pub fn coefficient(&self, origin: Origin) -> Option<&Expr> {
        self.raw.iter().find(|(o, _)| *o == origin).map(|(_, e)| e)
    }

    /// Distinct equations up to rational scale.
    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    /// Equations that are not pure derivatives of another one.
    pub fn independent(&self) -> impl Iterator<Item = &Equation> {
        self.equations.iter().filter(|e| e.consequence_of.is_none())
    }

    /// Each equation with a concrete field substituted; all zero iff the
    /// field is a symmetry.
    pub fn residuals(&self, v: &VectorField) -> Vec<Expr> {
        let sub = FieldSubstitution::new(v);
        self.equations.iter().map(|e| sub.apply(&e.expr)).collect()
    }
}

/// Replaces `f_S` by the actual partial derivative of a concrete component.
pub(crate) struct FieldSubstitution<'a> {
    field: &'a VectorField,
    cache: std::cell::RefCell<HashMap<(Func, Partials), Expr>>,
}

impl<'a> FieldSubstitution<'a> {
    pub(crate) fn new(field: &'a VectorField) -> Self {
        FieldSubstitution {
            field,
            cache: Default::default(),
        }
    }

    pub(crate) fn derivative(&self, f: Func, p: Partials) -> Expr {
        if let Some(e) = self.cache.borrow().get(&(f, p)) {
            return e.clone();
        }
        let mut d = self.field.component(f).clone();
        for v in p.vars() {
            d = d.pdiff(Var::Base(v));
        }
        self.cache.borrow_mut().insert((f, p), d.clone());
        d
    }

    pub(crate) fn apply(&self, e: &Expr) -> Expr {
        e.substitute_with(|a| match *a {
            Atom::Fn(f, p) => Some(self.derivative(f, p)),
            _ => None,
        })
    }
}

fn check_linear(e: &Expr) -> Result<(), DetgenError> {
    for (m, _) in e.terms() {
        let deg: u32 = m
            .powers()
            .iter()
            .filter(|(a, _)| a.is_fn())
            .map(|(_, k)| k)
            .sum();
        if deg != 1 {
            return Err(DetgenError::NotLinear(e.to_string()));
        }
    }
    Ok(())
}

fn no_jets(e: &Expr) -> Result<(), DetgenError> {
    match e.atoms().into_iter().find(Atom::is_jet) {
        Some(a) => Err(DetgenError::JetsRemain { jet: a.to_string() }),
        None => Ok(()),
    }
}

/// Invariance conditions after on-shell substitution, before any splitting.
pub fn invariance_conditions(system: &PdeSystem) -> Result<[Expr; 2], DetgenError> {
    let shell: BTreeMap<Atom, Expr> = on_shell(system)?
        .into_iter()
        .map(|(j, e)| (Atom::Jet(j), e))
        .collect();
    let v = VectorField::symbolic();
    let [d1, d2] = system.equations();
    let c1 = system.specialize(apply_pr3(&v, &d1)?.substitute(&shell)?);
    let c2 = system.specialize(apply_pr3(&v, &d2)?.substitute(&shell)?);
    Ok([c1, c2])
}

/// Generates, splits, deduplicates and classifies the determining equations.
pub fn determining_equations(system: &PdeSystem) -> Result<DeterminingSystem, DetgenError> {
    let [c1, c2] = invariance_conditions(system)?;

    let mut strata = Vec::new();
    for (condition, expr) in [(Condition::First, c1), (Condition::Second, c2)] {
        // Highest power of u11 first.
        for (exps, coeff) in expr.collect(&[Atom::U11]).into_iter().rev() {
            strata.push(Stratum {
                condition,
                u11_power: exps[0],
                expr: coeff,
            });
        }
    }

    let mut raw = Vec::new();
    for s in &strata {
        for (exps, coeff) in s.expr.collect(&[Atom::U1]) {
            no_jets(&coeff)?;
            check_linear(&coeff)?;
            raw.push((
                Origin {
                    condition: s.condition,
                    u11_power: s.u11_power,
                    u1_power: exps[0],
                },
                coeff,
            ));
        }
    }

    let mut equations: Vec<Equation> = Vec::new();
    let mut index: HashMap<Expr, usize> = HashMap::new();
    for (origin, coeff) in &raw {
        let p = coeff.primitive();
        match index.get(&p) {
            Some(&k) => equations[k].origins.push(*origin),
            None => {
                index.insert(p.clone(), equations.len());
                equations.push(Equation {
                    expr: p,
                    origins: vec![*origin],
                    consequence_of: None,
                });
            }
        }
    }
    mark_consequences(&mut equations);

    Ok(DeterminingSystem {
        strata,
        raw,
        equations,
    })
}

/// Flags equations equal (up to scale) to a pure derivative of another.
fn mark_consequences(equations: &mut [Equation]) {
    let max_order = equations.iter().map(Equation::order).max().unwrap_or(0);
    let mut by_order: Vec<usize> = (0..equations.len()).collect();
    by_order.sort_by_key(|&k| (equations[k].order(), k));

    let mut derived: HashMap<Expr, (usize, Partials)> = HashMap::new();
    for k in by_order {
        let e = &equations[k];
        if let Some(&hit) = derived.get(&e.expr) {
            equations[k].consequence_of = Some(hit);
            continue;
        }
        let room = max_order - e.order();
        for p in Partials::up_to(room).into_iter().filter(|p| p.order() > 0) {
            let mut d = e.expr.clone();
            for v in p.vars() {
                d = d.pdiff(Var::Base(v));
            }
            derived.entry(d.primitive()).or_insert((k, p));
        }
    }
}

/// Agreement of one generated expression with a reference transcription.
#[derive(Clone, Debug)]
pub struct StratumCheck {
    pub label: String,
    /// `generated = scale * reference` when they agree.
    pub scale: Option<BigRational>,
    pub agrees: bool,
    /// Terms of `generated - scale * reference`, tagged by which side has
    /// the monomial.
    pub differences: Vec<(String, String)>,
}

/// Set-level comparison of the split equations with a reference list.
#[derive(Clone, Debug, Default)]
pub struct EquationSetCheck {
    pub reference_only: Vec<Expr>,
    pub generated_only: Vec<Expr>,
}

#[derive(Clone, Debug)]
pub struct CrossCheckReport {
    pub strata: Vec<StratumCheck>,
    pub model: Option<EquationSetCheck>,
}

impl CrossCheckReport {
    pub fn mismatches(&self) -> usize {
        self.strata.iter().filter(|s| !s.agrees).count()
            + self
                .model
                .as_ref()
                .map_or(0, |m| m.reference_only.len().max(m.generated_only.len()))
    }
}

impl fmt::Display for CrossCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.strata {
            let verdict = if s.agrees { "agree" } else { "DIFFER" };
            match &s.scale {
                Some(c) => writeln!(
                    f,
                    "# {}: {} (scale {})",
                    s.label,
                    verdict,
                    crate::expr::fmt_rational(c)
                )?,
                None => writeln!(f, "# {}: {}", s.label, verdict)?,
            }
            for (side, term) in &s.differences {
                writeln!(f, "#   {side}: {term}")?;
            }
        }
        if let Some(m) = &self.model {
            if m.reference_only.is_empty() && m.generated_only.is_empty() {
                writeln!(f, "# model equation list: agree")?;
            } else {
                writeln!(f, "# model equation list: DIFFER")?;
                for e in &m.reference_only {
                    writeln!(f, "#   reference only: {e} = 0")?;
                }
                for e in &m.generated_only {
                    writeln!(f, "#   generated only: {e} = 0")?;
                }
            }
        }
        Ok(())
    }
}

mod reference {
    pub const FIRST: &str = include_str!("../data/reference/first_condition.txt");
    pub const SECOND_U11_2: &str = include_str!("../data/reference/second_u11_2.txt");
    pub const SECOND_U11_1: &str = include_str!("../data/reference/second_u11_1.txt");
    pub const SECOND_U11_0: &str = include_str!("../data/reference/second_u11_0.txt");
    pub const MODEL: &str = include_str!("../data/reference/model_equations.txt");
}

fn parse_reference(text: &str) -> Expr {
    let body: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n");
    crate::parser::parse_expr(&body).expect("reference transcription parses")
}

/// Compares `generated` with `reference` up to a rational factor.
pub fn compare_up_to_scale(label: &str, generated: &Expr, reference: &Expr) -> StratumCheck {
    // Most frequent coefficient ratio over shared monomials.
    let mut votes: BTreeMap<BigRational, usize> = BTreeMap::new();
    for (m, c) in generated.terms() {
        let r = reference.coefficient(m);
        if !r.is_zero() {
            *votes.entry(c / r).or_insert(0) += 1;
        }
    }
    let scale = votes
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
        .map(|(s, _)| s);
    let s = scale.clone().unwrap_or_else(|| crate::expr::rat(1));
    let diff = generated - &reference.scale(&s);
    let differences = diff
        .terms()
        .map(|(m, c)| {
            let in_gen = !generated.coefficient(m).is_zero();
            let in_ref = !reference.coefficient(m).is_zero();
            let side = match (in_gen, in_ref) {
                (true, true) => "coefficient differs",
                (true, false) => "generated only",
                _ => "reference only",
            };
            (side.to_string(), Expr::term(c.clone(), m.clone()).to_string())
        })
        .collect::<Vec<_>>();
    StratumCheck {
        label: label.to_string(),
        agrees: differences.is_empty() && scale.is_some() || generated.is_zero() && reference.is_zero(),
        scale,
        differences,
    }
}

/// Compares the generated strata with stored reference transcriptions of the
/// determining system (instantiated for `system`), and for the model system
/// also the reference split equation list.
pub fn cross_check(system: &PdeSystem) -> Result<CrossCheckReport, DetgenError> {
    let det = determining_equations(system)?;
    let refs = [
        (Condition::First, 0, "cond1", reference::FIRST),
        (Condition::Second, 2, "cond2 u11^2", reference::SECOND_U11_2),
        (Condition::Second, 1, "cond2 u11^1", reference::SECOND_U11_1),
        (Condition::Second, 0, "cond2 u11^0", reference::SECOND_U11_0),
    ];
    let strata = refs
        .iter()
        .map(|(cond, pow, label, text)| {
            let reference = system.instantiate(&parse_reference(text));
            let zero = Expr::zero();
            let generated = det.stratum(*cond, *pow).unwrap_or(&zero);
            compare_up_to_scale(label, generated, &reference)
        })
        .collect();
    let model = system.is_model().then(|| {
        let reference: Vec<Expr> = reference::MODEL
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| crate::parser::parse_expr(l).expect("reference equation").primitive())
            .collect();
        let generated: Vec<Expr> = det.independent().map(|e| e.expr.clone()).collect();
        let mut check = EquationSetCheck::default();
        for r in &reference {
            if !generated.contains(r) && !check.reference_only.contains(r) {
                check.reference_only.push(r.clone());
            }
        }
        for g in &generated {
            if !reference.contains(g) {
                check.generated_only.push(g.clone());
            }
        }
        check
    });
    Ok(CrossCheckReport { strata, model })
}
