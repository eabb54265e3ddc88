//! Strategies and property checks shared by the property tests and the
//! acceptance run.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use liesym::expr::{normalize, Atom, Axis, BaseVar, Expr, Jet, RawExpr, Var};
use liesym::liealg::bracket;
use liesym::parser::{format_system, parse_atom, parse_expr, parse_system, parse_vector_field};
use liesym::prolong::{prolong_coefficient, VectorField};

pub const CASES: u32 = 1000;

const NAMES: &[&str] = &[
    "x", "y", "u", "u1", "u2", "xi", "tau_x", "phi_u", "xi_xy", "F1", "F2_u", "F3", "G_u1",
];
const BASE: &[&str] = &["x", "y", "u"];

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn raw_atom(names: &'static [&'static str]) -> impl Strategy<Value = RawExpr> {
    prop_oneof![
        (-6i64..7, 1i64..4).prop_map(|(n, d)| RawExpr::Num(q(n, d))),
        proptest::sample::select(names).prop_map(|n| RawExpr::Atom(parse_atom(n).unwrap())),
    ]
}

fn raw_tree(names: &'static [&'static str]) -> impl Strategy<Value = RawExpr> {
    raw_atom(names).prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..4).prop_map(RawExpr::Add),
            prop::collection::vec(inner.clone(), 1..3).prop_map(RawExpr::Mul),
            inner.clone().prop_map(|e| RawExpr::Neg(Box::new(e))),
            (inner, 0u32..3).prop_map(|(e, k)| RawExpr::Pow(Box::new(e), k)),
        ]
    })
}

/// Expressions over base variables, low jets, unknown functions and
/// right-hand-side symbols.
pub fn expr() -> impl Strategy<Value = Expr> {
    raw_tree(NAMES).prop_map(|r| normalize(&r).unwrap())
}

pub fn raw() -> impl Strategy<Value = RawExpr> {
    raw_tree(NAMES)
}

/// Polynomials in `x, y, u`.
pub fn point_poly() -> impl Strategy<Value = Expr> {
    raw_tree(BASE).prop_map(|r| normalize(&r).unwrap())
}

pub fn field() -> impl Strategy<Value = VectorField> {
    (point_poly(), point_poly(), point_poly())
        .prop_map(|(a, b, c)| VectorField::concrete(a, b, c).unwrap())
}

pub fn var() -> impl Strategy<Value = Var> {
    proptest::sample::select(vec![Var::X, Var::Y, Var::U, Var::U1])
}

fn jet(nx: u8, ny: u8) -> Expr {
    Expr::atom(Atom::Jet(Jet::new(nx, ny).unwrap()))
}

type Check = Result<(), TestCaseError>;

pub fn normalize_idempotent(r: RawExpr) -> Check {
    let e = normalize(&r).unwrap();
    prop_assert_eq!(normalize(&e.to_raw()).unwrap(), e.clone());
    prop_assert_eq!(normalize(&RawExpr::Add(vec![r.clone(), RawExpr::Num(q(0, 1))])).unwrap(), e);
    Ok(())
}

pub fn normalize_matches_arithmetic((a, b): (Expr, Expr)) -> Check {
    let raw = RawExpr::Mul(vec![
        RawExpr::Add(vec![a.to_raw(), b.to_raw()]),
        RawExpr::Neg(Box::new(a.to_raw())),
    ]);
    prop_assert_eq!(normalize(&raw).unwrap(), -(&(&a + &b) * &a));
    Ok(())
}

pub fn partials_commute((e, v, w): (Expr, Var, Var)) -> Check {
    prop_assert_eq!(e.pdiff(v).pdiff(w), e.pdiff(w).pdiff(v));
    Ok(())
}

pub fn total_derivatives_commute(e: Expr) -> Check {
    let xy = e.total_derivative(Axis::X).unwrap().total_derivative(Axis::Y).unwrap();
    let yx = e.total_derivative(Axis::Y).unwrap().total_derivative(Axis::X).unwrap();
    prop_assert_eq!(xy, yx);
    Ok(())
}

pub fn leibniz((a, b, v): (Expr, Expr, Var)) -> Check {
    let ab = &a * &b;
    prop_assert_eq!(ab.pdiff(v), &a.pdiff(v) * &b + &a * &b.pdiff(v));
    for axis in [Axis::X, Axis::Y] {
        let d = |e: &Expr| e.total_derivative(axis).unwrap();
        prop_assert_eq!(d(&ab), &d(&a) * &b + &a * &d(&b));
    }
    Ok(())
}

pub fn substitution_then_eval((e, p, vals): (Expr, Expr, [i64; 3])) -> Check {
    let point: BTreeMap<Atom, BigRational> = BaseVar::ALL
        .into_iter()
        .map(Atom::Base)
        .zip(vals.map(|n| q(n, 1)))
        .collect();
    let u = Atom::Base(BaseVar::U);
    let sub = e.substitute_with(|a| (*a == u).then(|| p.clone()));
    let mut moved = point.clone();
    moved.insert(u, p.eval(&point).unwrap());
    prop_assert_eq!(sub.eval(&point).unwrap(), e.eval(&moved).unwrap());
    Ok(())
}

pub fn prolongation_linear((v, w, a, b, nx, ny): (VectorField, VectorField, i64, i64, u8, u8)) -> Check {
    let Some(j) = Jet::new(nx, ny).filter(|j| j.order() <= 3) else {
        return Ok(());
    };
    let (ea, eb) = (Expr::int(a), Expr::constant(q(1, b)));
    let lhs = prolong_coefficient(&v.combine(&ea, &w, &eb), j).unwrap();
    let rhs = &ea * &prolong_coefficient(&v, j).unwrap() + &eb * &prolong_coefficient(&w, j).unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// `phi^{J,i} = D_i phi^J - D_i xi * u_{J,x} - D_i tau * u_{J,y}`.
pub fn prolongation_recursion((v, nx, ny): (VectorField, u8, u8)) -> Check {
    if nx + ny > 2 {
        return Ok(());
    }
    let prev = match Jet::new(nx, ny) {
        Some(j) => prolong_coefficient(&v, j).unwrap(),
        None => v.phi().clone(),
    };
    let (ux, uy) = (jet(nx + 1, ny), jet(nx, ny + 1));
    for (axis, next) in [(Axis::X, (nx + 1, ny)), (Axis::Y, (nx, ny + 1))] {
        let got = prolong_coefficient(&v, Jet::new(next.0, next.1).unwrap()).unwrap();
        let dxi = v.xi().total_derivative(axis).unwrap();
        let dtau = v.tau().total_derivative(axis).unwrap();
        let want = prev.total_derivative(axis).unwrap() - &dxi * &ux - &dtau * &uy;
        prop_assert_eq!(got, want);
    }
    Ok(())
}

pub fn bracket_antisymmetric((v, w): (VectorField, VectorField)) -> Check {
    let one = Expr::one();
    let vw = bracket(&v, &w).unwrap();
    let wv = bracket(&w, &v).unwrap();
    prop_assert!(vw.combine(&one, &wv, &one).is_zero());
    prop_assert!(bracket(&v, &v).unwrap().is_zero());
    Ok(())
}

pub fn bracket_jacobi((a, b, c): (VectorField, VectorField, VectorField)) -> Check {
    let one = Expr::one();
    let t1 = bracket(&bracket(&a, &b).unwrap(), &c).unwrap();
    let t2 = bracket(&bracket(&b, &c).unwrap(), &a).unwrap();
    let t3 = bracket(&bracket(&c, &a).unwrap(), &b).unwrap();
    prop_assert!(t1.combine(&one, &t2, &one).combine(&one, &t3, &one).is_zero());
    Ok(())
}

pub fn expr_round_trip(e: Expr) -> Check {
    prop_assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
    Ok(())
}

pub fn field_round_trip(v: VectorField) -> Check {
    prop_assert_eq!(parse_vector_field(&v.to_string()).unwrap(), v);
    Ok(())
}

pub fn system_round_trip((f1, f3, g): (Expr, Expr, Expr)) -> Check {
    let f2 = &f1 + &Expr::one();
    if f2.is_zero() {
        return Ok(());
    }
    let text = format!("F1 = {f1}\nF2 = {f2}\nF3 = {f3}\nG = {g}\n");
    let sys = parse_system(&text).unwrap();
    prop_assert_eq!(format_system(&sys), text);
    Ok(())
}

pub fn error_spans_in_bounds((e, cut, junk): (Expr, usize, &'static str)) -> Check {
    let text = e.to_string();
    let n = text.chars().count() + 1;
    let at = text.char_indices().map(|(i, _)| i).nth(cut % n).unwrap_or(text.len());
    let broken = format!("{}{}{}", &text[..at], junk, &text[at..]);
    if let Err(err) = parse_expr(&broken) {
        prop_assert!(err.span.offset <= broken.len());
        prop_assert!(err.span.offset + err.span.len <= broken.len() + 1);
        prop_assert!(err.span.line == 1 && err.span.column >= 1);
    }
    Ok(())
}

pub fn junk() -> impl Strategy<Value = &'static str> {
    proptest::sample::select(vec!["$", "*", "^", ")", "+*", "/0"])
}

fn run<S: Strategy>(cases: u32, s: S, f: impl Fn(S::Value) -> Check) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&s, f).map_err(|e| e.to_string())
}

/// Every suite, as `(name, outcome)`.
pub fn run_suites(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    vec![
        ("normalize idempotence", run(cases, raw(), normalize_idempotent)),
        ("normalize vs arithmetic", run(cases, (expr(), expr()), normalize_matches_arithmetic)),
        ("pdiff commutation", run(cases, (expr(), var(), var()), partials_commute)),
        ("total derivative commutation", run(cases, expr(), total_derivatives_commute)),
        ("Leibniz rule", run(cases, (expr(), expr(), var()), leibniz)),
        (
            "substitute/eval",
            run(cases, (point_poly(), point_poly(), prop::array::uniform3(-5i64..6)), substitution_then_eval),
        ),
        (
            "prolongation linearity",
            run(cases, (field(), field(), -4i64..5, 1i64..4, 0u8..4, 0u8..4), prolongation_linear),
        ),
        ("prolongation recursion", run(cases, (field(), 0u8..3, 0u8..3), prolongation_recursion)),
        ("bracket antisymmetry", run(cases, (field(), field()), bracket_antisymmetric)),
        ("bracket Jacobi", run(cases, (field(), field(), field()), bracket_jacobi)),
        ("expression round trip", run(cases, expr(), expr_round_trip)),
        ("vector field round trip", run(cases, field(), field_round_trip)),
        ("system round trip", run(cases, (point_poly(), point_poly(), point_poly()), system_round_trip)),
        ("error spans", run(cases, (expr(), 0usize..64, junk()), error_spans_in_bounds)),
    ]
}
