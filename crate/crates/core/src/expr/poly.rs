use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::atom::{Atom, Axis, BaseVar, Jet, RhsFn};
use super::ExprError;

/// Product of atoms with positive exponents, sorted by atom.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom) -> Monomial {
        Monomial(vec![(a, 1)])
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (Atom, u32)>) -> Monomial {
        let mut map: BTreeMap<Atom, u32> = BTreeMap::new();
        for (a, e) in powers {
            if e > 0 {
                *map.entry(a).or_insert(0) += e;
            }
        }
        Monomial(map.into_iter().collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn powers(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, a: &Atom) -> u32 {
        self.0
            .binary_search_by(|(b, _)| b.cmp(a))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = self.0.clone();
        for (a, e) in &other.0 {
            let idx = out.binary_search_by(|(b, _)| b.cmp(a)).ok()?;
            if out[idx].1 < *e {
                return None;
            }
            out[idx].1 -= e;
            if out[idx].1 == 0 {
                out.remove(idx);
            }
        }
        Some(Monomial(out))
    }

    /// Graded lexicographic comparison (a true monomial order, unlike the
    /// derived serialization order).
    pub fn cmp_grlex(&self, other: &Monomial) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (a, b) = (&self.0, &other.0);
            for (pa, pb) in a.iter().zip(b.iter()) {
                if pa.0 != pb.0 {
                    // The monomial holding the smaller atom has the larger power of it.
                    return if pa.0 < pb.0 {
                        std::cmp::Ordering::Greater
                    } else {
                        std::cmp::Ordering::Less
                    };
                }
                if pa.1 != pb.1 {
                    return pa.1.cmp(&pb.1);
                }
            }
            a.len().cmp(&b.len())
        })
    }

    /// Splits off the powers of `vars`, returning (exponents, remainder).
    fn split(&self, vars: &[Atom]) -> (Vec<u32>, Monomial) {
        let mut exps = vec![0; vars.len()];
        let mut rest = Vec::new();
        for &(a, e) in &self.0 {
            match vars.iter().position(|v| *v == a) {
                Some(k) => exps[k] = e,
                None => rest.push((a, e)),
            }
        }
        (exps, Monomial(rest))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, (a, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Canonical polynomial over [`Atom`]s with exact rational coefficients.
///
/// No stored coefficient is zero, so two expressions are mathematically equal
/// exactly when they compare equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr {
    terms: BTreeMap<Monomial, BigRational>,
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::default()
    }

    pub fn one() -> Expr {
        Expr::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Expr {
        Expr::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(rat(n))
    }

    pub fn atom(a: Atom) -> Expr {
        Expr::term(BigRational::one(), Monomial::atom(a))
    }

    pub fn term(c: BigRational, m: Monomial) -> Expr {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Expr { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Expr {
        let mut e = Expr::zero();
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Returns the value if the expression is a constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Expr {
        Expr {
            terms: self.terms.iter().map(|(n, k)| (n.mul(m), k.clone())).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Expr {
        let mut acc = Expr::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(a, _)| *a))
            .collect()
    }

    pub fn any_atom(&self, pred: impl Fn(&Atom) -> bool) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|(a, _)| pred(a)))
    }

    /// Highest exponent of `a` in any term.
    pub fn degree_in(&self, a: &Atom) -> u32 {
        self.terms.keys().map(|m| m.exponent(a)).max().unwrap_or(0)
    }

    /// Highest jet order present, 0 if none.
    pub fn max_jet_order(&self) -> u32 {
        self.atoms()
            .iter()
            .filter_map(|a| match a {
                Atom::Jet(j) => Some(j.order()),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Leibniz rule with a per-atom derivative.
    fn derive_with(&self, mut d: impl FnMut(&Atom) -> Expr) -> Expr {
        let mut cache: HashMap<Atom, Expr> = HashMap::new();
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            for (i, &(a, e)) in m.0.iter().enumerate() {
                let da = cache.entry(a).or_insert_with(|| d(&a));
                if da.is_zero() {
                    continue;
                }
                let mut rest = m.0.clone();
                if e == 1 {
                    rest.remove(i);
                } else {
                    rest[i].1 -= 1;
                }
                let rest = Monomial(rest);
                let k = c * rat(e as i64);
                for (dm, dc) in &da.terms {
                    out.add_term(rest.mul(dm), &k * dc);
                }
            }
        }
        out
    }

    /// Formal partial derivative with respect to a base or jet variable.
    pub fn pdiff(&self, v: Var) -> Expr {
        self.derive_with(|a| match pdiff_atom(a, v) {
            Some(b) => b,
            None => Expr::zero(),
        })
    }

    /// Total derivative `D_x` or `D_y` on the jet space.
    pub fn total_derivative(&self, axis: Axis) -> Result<Expr, ExprError> {
        if let Some(a) = self
            .atoms()
            .into_iter()
            .find(|a| matches!(a, Atom::Jet(j) if j.order() >= Jet::MAX_ORDER))
        {
            return Err(ExprError::OrderBudget { atom: a.to_string() });
        }
        let (base, jet_u) = match axis {
            Axis::X => (BaseVar::X, Jet::U1),
            Axis::Y => (BaseVar::Y, Jet::U2),
        };
        let lift = match axis {
            Axis::X => Jet::U11,
            Axis::Y => Jet::U12,
        };
        Ok(self.derive_with(|a| match *a {
            Atom::Base(b) if b == base => Expr::one(),
            Atom::Base(BaseVar::U) => Expr::atom(Atom::Jet(jet_u)),
            Atom::Base(_) => Expr::zero(),
            Atom::Jet(j) => Expr::atom(Atom::Jet(j.extend(axis).expect("order checked"))),
            Atom::Fn(f, s) => {
                let mut e = Expr::atom(Atom::Fn(f, s.with(base)));
                e += &Expr::atom(Atom::Fn(f, s.with(BaseVar::U))).mul_monomial(&Monomial::atom(
                    Atom::Jet(jet_u),
                ));
                e
            }
            Atom::Rhs(f, s) => {
                let mut p = s;
                p.base = s.base.with(base);
                let mut e = Expr::atom(Atom::Rhs(f, p));
                let mut q = s;
                q.base = s.base.with(BaseVar::U);
                e += &Expr::atom(Atom::Rhs(f, q)).mul_monomial(&Monomial::atom(Atom::Jet(jet_u)));
                if f.depends_on_u1() {
                    let mut r = s;
                    r.u1 += 1;
                    e += &Expr::atom(Atom::Rhs(f, r))
                        .mul_monomial(&Monomial::atom(Atom::Jet(lift)));
                }
                e
            }
        }))
    }

    /// Simultaneous substitution of atoms by expressions.
    ///
    /// Bindings may refer to each other as long as there is no cycle; they are
    /// resolved first so the result contains no bound atom.
    pub fn substitute(&self, bindings: &BTreeMap<Atom, Expr>) -> Result<Expr, ExprError> {
        let resolved = resolve_bindings(bindings)?;
        Ok(self.substitute_resolved(&resolved))
    }

    /// Substitution with bindings already free of bound atoms.
    pub(crate) fn substitute_resolved(&self, bindings: &BTreeMap<Atom, Expr>) -> Expr {
        self.substitute_with(|a| bindings.get(a).cloned())
    }

    /// Replaces every atom for which `f` returns `Some`.
    pub fn substitute_with(&self, mut f: impl FnMut(&Atom) -> Option<Expr>) -> Expr {
        let mut atom_cache: HashMap<Atom, Option<Expr>> = HashMap::new();
        let mut pow_cache: HashMap<(Atom, u32), Expr> = HashMap::new();
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut factor = Expr::constant(c.clone());
            for &(a, e) in &m.0 {
                let image = atom_cache.entry(a).or_insert_with(|| f(&a));
                match image {
                    None => kept.push((a, e)),
                    Some(v) => {
                        let p = pow_cache.entry((a, e)).or_insert_with(|| v.pow(e));
                        factor = &factor * &*p;
                        if factor.is_zero() {
                            break;
                        }
                    }
                }
            }
            if factor.is_zero() {
                continue;
            }
            let kept = Monomial(kept);
            for (fm, fc) in factor.terms {
                out.add_term(fm.mul(&kept), fc);
            }
        }
        out
    }

    /// Groups terms by the exponents of `vars`; coefficients are free of `vars`.
    pub fn collect(&self, vars: &[Atom]) -> BTreeMap<Vec<u32>, Expr> {
        let mut out: BTreeMap<Vec<u32>, Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (exps, rest) = m.split(vars);
            out.entry(exps).or_default().add_term(rest, c.clone());
        }
        out.retain(|_, e| !e.is_zero());
        out
    }

    /// Exact value with every atom bound.
    pub fn eval(&self, point: &BTreeMap<Atom, BigRational>) -> Result<BigRational, ExprError> {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (a, e) in &m.0 {
                let x = point
                    .get(a)
                    .ok_or_else(|| ExprError::UnboundAtom(a.to_string()))?;
                v *= num_traits::pow(x.clone(), *e as usize);
            }
            total += v;
        }
        Ok(total)
    }

    /// Rescaled to integer coefficients with unit content and a positive
    /// first term. Zero stays zero.
    pub fn primitive(&self) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        let mut lcm = BigInt::one();
        for c in self.terms.values() {
            lcm = lcm.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            let n = c.numer() * (&lcm / c.denom());
            g = g.gcd(&n);
        }
        let first_negative = self.terms.values().next().is_some_and(|c| c.is_negative());
        let mut factor = BigRational::new(lcm, g);
        if first_negative {
            factor = -factor;
        }
        self.scale(&factor)
    }

    /// Rational `s` with `self == s * other`, if one exists.
    pub fn scale_relative_to(&self, other: &Expr) -> Option<BigRational> {
        if self.len() != other.len() || self.is_zero() {
            return None;
        }
        let (m0, c0) = self.terms.iter().next()?;
        let s = c0 / other.terms.get(m0)?;
        if &other.scale(&s) == self {
            Some(s)
        } else {
            None
        }
    }

    /// Leading term under graded lexicographic order.
    fn leading_grlex(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().max_by(|a, b| a.0.cmp_grlex(b.0))
    }

    /// Exact polynomial division; `None` unless the remainder is zero.
    pub fn div_exact(&self, divisor: &Expr) -> Option<Expr> {
        if divisor.is_zero() {
            return None;
        }
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (lead_m, lead_c) = divisor.leading_grlex()?;
        let mut rem = self.clone();
        let mut quot = Expr::zero();
        while let Some((m, c)) = rem.leading_grlex() {
            let qm = m.div(lead_m)?;
            let qc = c / lead_c;
            let step = divisor.mul_monomial(&qm).scale(&qc);
            quot.add_term(qm, qc);
            rem -= &step;
        }
        Some(quot)
    }

    /// Replaces every right-hand-side symbol that involves a `u1` derivative
    /// of `F3` or `G` by zero. Models right-hand sides free of `u1`.
    pub fn drop_u1_dependence(&self) -> Expr {
        self.substitute_with(|a| match a {
            Atom::Rhs(RhsFn::F3 | RhsFn::G, p) if p.u1 > 0 => Some(Expr::zero()),
            _ => None,
        })
    }
}

/// Variable for [`Expr::pdiff`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Base(BaseVar),
    Jet(Jet),
}

impl Var {
    pub const X: Var = Var::Base(BaseVar::X);
    pub const Y: Var = Var::Base(BaseVar::Y);
    pub const U: Var = Var::Base(BaseVar::U);
    pub const U1: Var = Var::Jet(Jet::U1);
}

fn pdiff_atom(a: &Atom, v: Var) -> Option<Expr> {
    match (*a, v) {
        (Atom::Base(b), Var::Base(w)) if b == w => Some(Expr::one()),
        (Atom::Jet(j), Var::Jet(k)) if j == k => Some(Expr::one()),
        (Atom::Fn(f, s), Var::Base(w)) => Some(Expr::atom(Atom::Fn(f, s.with(w)))),
        (Atom::Rhs(f, s), Var::Base(w)) => {
            let mut p = s;
            p.base = s.base.with(w);
            Some(Expr::atom(Atom::Rhs(f, p)))
        }
        (Atom::Rhs(f, s), Var::Jet(Jet::U1)) if f.depends_on_u1() => {
            let mut p = s;
            p.u1 += 1;
            Some(Expr::atom(Atom::Rhs(f, p)))
        }
        _ => None,
    }
}

/// Expands bindings so that no value mentions a bound atom.
pub(crate) fn resolve_bindings(
    bindings: &BTreeMap<Atom, Expr>,
) -> Result<BTreeMap<Atom, Expr>, ExprError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Visiting,
        Done,
    }
    fn visit(
        a: Atom,
        bindings: &BTreeMap<Atom, Expr>,
        marks: &mut HashMap<Atom, Mark>,
        order: &mut Vec<Atom>,
    ) -> Result<(), ExprError> {
        match marks.get(&a) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Visiting) => return Err(ExprError::CyclicBindings(a.to_string())),
            None => {}
        }
        marks.insert(a, Mark::Visiting);
        for b in bindings[&a].atoms() {
            if bindings.contains_key(&b) {
                visit(b, bindings, marks, order)?;
            }
        }
        marks.insert(a, Mark::Done);
        order.push(a);
        Ok(())
    }

    let mut marks = HashMap::new();
    let mut order = Vec::new();
    // Highest atoms first, so the reported cycle member is deterministic.
    for a in bindings.keys().rev() {
        visit(*a, bindings, &mut marks, &mut order)?;
    }
    let mut resolved: BTreeMap<Atom, Expr> = BTreeMap::new();
    for a in order {
        let v = bindings[&a].substitute_resolved(&resolved);
        resolved.insert(a, v);
    }
    Ok(resolved)
}

impl From<Atom> for Expr {
    fn from(a: Atom) -> Expr {
        Expr::atom(a)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<BigRational> for Expr {
    fn from(c: BigRational) -> Expr {
        Expr::constant(c)
    }
}

impl AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Expr> for Expr {
    fn sub_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add<&Expr> for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Expr> for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&Expr> for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                (&self).$method(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

pub(crate) fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                f.write_str(&fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&mag))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::atom::{Func, Partials};

    fn xi(p: Partials) -> Expr {
        Expr::atom(Atom::Fn(Func::Xi, p))
    }

    #[test]
    fn binomial_and_cancellation() {
        let u1 = Expr::atom(Atom::U1);
        let e = (&u1 + &Expr::one()).pow(2);
        assert_eq!(e.to_string(), "1 + 2*u1 + u1^2");
        let x = Expr::atom(Atom::X);
        assert!((&x * &u1 - &u1 * &x).is_zero());
    }

    #[test]
    fn pdiff_examples() {
        let u1 = Expr::atom(Atom::U1);
        let e = xi(Partials::new(1, 0, 0)) * u1.pow(2);
        assert_eq!(
            e.pdiff(Var::U),
            xi(Partials::new(1, 0, 1)) * u1.pow(2)
        );
        let f2 = Expr::atom(Atom::rhs(RhsFn::F2));
        let f3 = Expr::atom(Atom::rhs(RhsFn::F3));
        // F2 does not depend on u1
        assert_eq!((&f2 * &u1.pow(3)).pdiff(Var::U1), f2.scale(&rat(3)) * u1.pow(2));
        let d = (&f3 * &u1.pow(3)).pdiff(Var::U1);
        assert_eq!(d.to_string(), "3*u1^2*F3 + u1^3*F3_u1");
    }

    #[test]
    fn total_derivative_basics() {
        let u = Expr::atom(Atom::U);
        assert_eq!(u.total_derivative(Axis::X).unwrap(), Expr::atom(Atom::U1));
        let xy = Expr::atom(Atom::X) * Expr::atom(Atom::Y);
        let a = xy.total_derivative(Axis::X).unwrap().total_derivative(Axis::Y).unwrap();
        assert_eq!(a, Expr::one());
        let j4 = Expr::atom(Atom::Jet(Jet::new(4, 0).unwrap()));
        assert!(matches!(
            j4.total_derivative(Axis::X),
            Err(ExprError::OrderBudget { .. })
        ));
    }

    #[test]
    fn substitution_resolves_chains_and_rejects_cycles() {
        let mut b = BTreeMap::new();
        b.insert(Atom::U2, Expr::atom(Atom::U1).pow(2));
        let e = Expr::atom(Atom::U1) * Expr::atom(Atom::U2);
        assert_eq!(e.substitute(&b).unwrap(), Expr::atom(Atom::U1).pow(3));
        b.insert(Atom::U1, Expr::atom(Atom::U2));
        assert!(matches!(
            e.substitute(&b),
            Err(ExprError::CyclicBindings(_))
        ));
    }

    #[test]
    fn collect_splits_powers() {
        let u11 = Expr::atom(Atom::U11);
        let e = xi(Partials::new(0, 0, 1)) * u11.pow(2)
            + Expr::atom(Atom::Fn(Func::Phi, Partials::new(0, 0, 1))) * u11.clone();
        let c = e.collect(&[Atom::U11]);
        assert_eq!(c.len(), 2);
        assert_eq!(c[&vec![2]], xi(Partials::new(0, 0, 1)));
        assert!(Expr::zero().collect(&[Atom::U1]).is_empty());
    }

    #[test]
    fn primitive_and_exact_division() {
        let x = Expr::atom(Atom::X);
        let e = (x.scale(&BigRational::new(3.into(), 2.into())) - Expr::int(3)).primitive();
        assert_eq!(e.to_string(), "2 - x");
        let p = (&x + &Expr::one()) * (&x - &Expr::int(2));
        assert_eq!(p.div_exact(&(&x + &Expr::one())), Some(&x - &Expr::int(2)));
        assert_eq!(p.div_exact(&(&x + &Expr::int(5))), None);
    }
}
