//! Atomic symbols of the expression kernel.
//!
//! The derived `Ord` on [`Atom`] is the canonical atom ordering used for
//! monomials and serialization: base variables, then jet variables (by order,
//! then lexicographic index), then derivatives of the unknown functions
//! (`xi < tau < phi`, then multiset), then derivatives of the right-hand sides.

use std::cmp::{Ordering, Reverse};
use std::fmt;

/// Independent variables `x`, `y` and the dependent variable `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaseVar {
    X,
    Y,
    U,
}

impl BaseVar {
    pub const ALL: [BaseVar; 3] = [BaseVar::X, BaseVar::Y, BaseVar::U];

    pub fn name(self) -> &'static str {
        match self {
            BaseVar::X => "x",
            BaseVar::Y => "y",
            BaseVar::U => "u",
        }
    }
}

/// Independent direction used by total derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
}

/// Jet coordinate `u_J` where `J` is a multi-index over `{x, y}`.
///
/// Stored as counts, so `u_12` and `u_21` are the same value. Order zero is
/// not representable here; that is the base variable `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Jet {
    nx: u8,
    ny: u8,
}

impl Jet {
    pub const U1: Jet = Jet { nx: 1, ny: 0 };
    pub const U2: Jet = Jet { nx: 0, ny: 1 };
    pub const U11: Jet = Jet { nx: 2, ny: 0 };
    pub const U12: Jet = Jet { nx: 1, ny: 1 };
    pub const U111: Jet = Jet { nx: 3, ny: 0 };
    pub const U112: Jet = Jet { nx: 2, ny: 1 };

    /// Largest order the kernel will hold.
    pub const MAX_ORDER: u32 = 4;

    /// Returns `None` for order zero or for orders above [`Jet::MAX_ORDER`].
    pub fn new(nx: u8, ny: u8) -> Option<Jet> {
        let order = nx as u32 + ny as u32;
        if order == 0 || order > Self::MAX_ORDER {
            None
        } else {
            Some(Jet { nx, ny })
        }
    }

    pub fn nx(self) -> u8 {
        self.nx
    }

    pub fn ny(self) -> u8 {
        self.ny
    }

    pub fn order(self) -> u32 {
        self.nx as u32 + self.ny as u32
    }

    /// `J + axis`, or `None` past the order budget.
    pub fn extend(self, axis: Axis) -> Option<Jet> {
        match axis {
            Axis::X => Jet::new(self.nx + 1, self.ny),
            Axis::Y => Jet::new(self.nx, self.ny + 1),
        }
    }

    /// All multi-indices with `1 <= |J| <= max_order`, in atom order.
    pub fn all_up_to(max_order: u32) -> Vec<Jet> {
        let mut out = Vec::new();
        for order in 1..=max_order.min(Self::MAX_ORDER) {
            for nx in (0..=order).rev() {
                out.push(Jet {
                    nx: nx as u8,
                    ny: (order - nx) as u8,
                });
            }
        }
        out
    }

    fn key(self) -> (u32, Reverse<u8>) {
        (self.order(), Reverse(self.nx))
    }
}

impl Ord for Jet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Jet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("u")?;
        for _ in 0..self.nx {
            f.write_str("1")?;
        }
        for _ in 0..self.ny {
            f.write_str("2")?;
        }
        Ok(())
    }
}

/// Components of the infinitesimal generator `xi d/dx + tau d/dy + phi d/du`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Xi,
    Tau,
    Phi,
}

impl Func {
    pub const ALL: [Func; 3] = [Func::Xi, Func::Tau, Func::Phi];

    pub fn name(self) -> &'static str {
        match self {
            Func::Xi => "xi",
            Func::Tau => "tau",
            Func::Phi => "phi",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Multiset of partial derivatives over `{x, y, u}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Partials {
    pub x: u8,
    pub y: u8,
    pub u: u8,
}

impl Partials {
    pub const NONE: Partials = Partials { x: 0, y: 0, u: 0 };

    pub const fn new(x: u8, y: u8, u: u8) -> Partials {
        Partials { x, y, u }
    }

    pub fn order(self) -> u32 {
        self.x as u32 + self.y as u32 + self.u as u32
    }

    pub fn with(self, v: BaseVar) -> Partials {
        let mut p = self;
        match v {
            BaseVar::X => p.x += 1,
            BaseVar::Y => p.y += 1,
            BaseVar::U => p.u += 1,
        }
        p
    }

    pub fn count(self, v: BaseVar) -> u8 {
        match v {
            BaseVar::X => self.x,
            BaseVar::Y => self.y,
            BaseVar::U => self.u,
        }
    }

    /// Componentwise sum of two multisets.
    pub fn join(self, other: Partials) -> Partials {
        Partials {
            x: self.x + other.x,
            y: self.y + other.y,
            u: self.u + other.u,
        }
    }

    /// All multisets of size exactly `order`, in atom order.
    pub fn of_order(order: u32) -> Vec<Partials> {
        let mut out = Vec::new();
        for x in (0..=order).rev() {
            for y in (0..=order - x).rev() {
                out.push(Partials::new(x as u8, y as u8, (order - x - y) as u8));
            }
        }
        out
    }

    /// All multisets of size at most `max_order`, in atom order.
    pub fn up_to(max_order: u32) -> Vec<Partials> {
        (0..=max_order).flat_map(Partials::of_order).collect()
    }

    /// Variables in canonical order, with repetition.
    pub fn vars(self) -> impl Iterator<Item = BaseVar> {
        std::iter::repeat_n(BaseVar::X, self.x as usize)
            .chain(std::iter::repeat_n(BaseVar::Y, self.y as usize))
            .chain(std::iter::repeat_n(BaseVar::U, self.u as usize))
    }

    fn key(self) -> (u32, Reverse<u8>, Reverse<u8>) {
        (self.order(), Reverse(self.x), Reverse(self.y))
    }

    fn suffix(self) -> String {
        let mut s = String::new();
        for v in self.vars() {
            s.push_str(v.name());
        }
        s
    }
}

impl Ord for Partials {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Partials {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Right-hand-side functions of the system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RhsFn {
    F1,
    F2,
    F3,
    G,
}

impl RhsFn {
    pub const ALL: [RhsFn; 4] = [RhsFn::F1, RhsFn::F2, RhsFn::F3, RhsFn::G];

    pub fn name(self) -> &'static str {
        match self {
            RhsFn::F1 => "F1",
            RhsFn::F2 => "F2",
            RhsFn::F3 => "F3",
            RhsFn::G => "G",
        }
    }

    /// `F1` and `F2` are functions of `(x, y, u)` only.
    pub fn depends_on_u1(self) -> bool {
        matches!(self, RhsFn::F3 | RhsFn::G)
    }
}

/// Multiset of partial derivatives over `{x, y, u, u1}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct RhsPartials {
    pub base: Partials,
    pub u1: u8,
}

impl RhsPartials {
    pub const NONE: RhsPartials = RhsPartials {
        base: Partials::NONE,
        u1: 0,
    };

    pub fn order(self) -> u32 {
        self.base.order() + self.u1 as u32
    }

}

impl Ord for RhsPartials {
    fn cmp(&self, other: &Self) -> Ordering {
        // Same order: more x, then more y, then more u (fewer u1) first.
        let key = |p: &RhsPartials| {
            (
                p.order(),
                Reverse(p.base.x),
                Reverse(p.base.y),
                Reverse(p.base.u),
            )
        };
        key(self).cmp(&key(other))
    }
}

impl PartialOrd for RhsPartials {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A symbol of the kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Base(BaseVar),
    Jet(Jet),
    Fn(Func, Partials),
    Rhs(RhsFn, RhsPartials),
}

impl Atom {
    pub const X: Atom = Atom::Base(BaseVar::X);
    pub const Y: Atom = Atom::Base(BaseVar::Y);
    pub const U: Atom = Atom::Base(BaseVar::U);
    pub const U1: Atom = Atom::Jet(Jet::U1);
    pub const U2: Atom = Atom::Jet(Jet::U2);
    pub const U11: Atom = Atom::Jet(Jet::U11);
    pub const U12: Atom = Atom::Jet(Jet::U12);
    pub const U111: Atom = Atom::Jet(Jet::U111);
    pub const U112: Atom = Atom::Jet(Jet::U112);

    pub fn func(f: Func) -> Atom {
        Atom::Fn(f, Partials::NONE)
    }

    pub fn rhs(f: RhsFn) -> Atom {
        Atom::Rhs(f, RhsPartials::NONE)
    }

    pub fn is_base(&self) -> bool {
        matches!(self, Atom::Base(_))
    }

    pub fn is_jet(&self) -> bool {
        matches!(self, Atom::Jet(_))
    }

    pub fn is_fn(&self) -> bool {
        matches!(self, Atom::Fn(..))
    }

    pub fn is_rhs(&self) -> bool {
        matches!(self, Atom::Rhs(..))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Base(b) => f.write_str(b.name()),
            Atom::Jet(j) => write!(f, "{j}"),
            Atom::Fn(func, p) => {
                f.write_str(func.name())?;
                if p.order() > 0 {
                    write!(f, "_{}", p.suffix())?;
                }
                Ok(())
            }
            Atom::Rhs(func, p) => {
                f.write_str(func.name())?;
                if p.order() > 0 {
                    let mut s = p.base.suffix();
                    for _ in 0..p.u1 {
                        s.push_str("u1");
                    }
                    write!(f, "_{s}")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_atom_order() {
        let mut atoms = vec![
            Atom::rhs(RhsFn::F1),
            Atom::Fn(Func::Phi, Partials::new(0, 1, 0)),
            Atom::Fn(Func::Xi, Partials::new(0, 0, 1)),
            Atom::U111,
            Atom::U12,
            Atom::U11,
            Atom::U2,
            Atom::U1,
            Atom::U,
            Atom::X,
        ];
        atoms.sort();
        let names: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
        assert_eq!(
            names,
            ["x", "u", "u1", "u2", "u11", "u12", "u111", "xi_u", "phi_y", "F1"]
        );
    }

    #[test]
    fn jet_indices_are_order_insensitive() {
        assert_eq!(Jet::U1.extend(Axis::Y), Jet::U2.extend(Axis::X));
        assert_eq!(Jet::new(0, 0), None);
        assert_eq!(Jet::new(3, 2), None);
        assert_eq!(Jet::new(2, 2).unwrap().extend(Axis::X), None);
    }

    #[test]
    fn partial_multisets() {
        assert_eq!(Partials::up_to(3).len(), 20);
        let names: Vec<String> = Partials::of_order(2)
            .into_iter()
            .map(|p| Atom::Fn(Func::Xi, p).to_string())
            .collect();
        assert_eq!(names, ["xi_xx", "xi_xy", "xi_xu", "xi_yy", "xi_yu", "xi_uu"]);
        let f = Atom::Rhs(
            RhsFn::F3,
            RhsPartials {
                base: Partials::new(1, 0, 0),
                u1: 2,
            },
        );
        assert_eq!(f.to_string(), "F3_xu1u1");
    }
}
