"""Smoke test for the liesym_py extension.

Build and install first:  maturin develop -m crates/py/Cargo.toml
"""

from fractions import Fraction

import liesym_py as ls


def main():
    sm = ls.System("F1 = 0\nF2 = 1\nF3 = 0\nG = 0\n")
    assert not sm.is_generic

    eqs = ls.System.model().determining_equations()
    assert len(eqs) == 13, eqs
    assert any(expr == "phi_y" for _, expr in eqs)

    basis = sm.symmetry_basis(4)
    assert len(basis) == 10
    dims, stacked = sm.sweep(2, 4)
    assert [d for _, d in dims] == [10, 10, 10] and stacked == 10

    for v in basis:
        holds, violated = sm.is_symmetry(v)
        assert holds and not violated

    bad = ls.VectorField("xi = 0\ntau = 0\nphi = y")
    holds, violated = sm.is_symmetry(bad)
    assert not holds and "phi_y = 0" in violated

    dx = ls.VectorField("xi = 1\ntau = 0\nphi = 0")
    w = ls.VectorField("xi = -2*u\ntau = x\nphi = 0")
    assert dx.bracket(w) == ls.VectorField("xi = 0\ntau = 1\nphi = 0")
    assert dx.bracket(dx).is_zero()

    sc = ls.structure_constants(basis)
    assert all(i < j for i, j, _, _ in sc)
    assert all(Fraction(c) != 0 for *_, c in sc)
    assert ls.jacobi_holds(basis)

    table = sm.closure_table()
    assert len(table) == 60
    assert not table.pivots and not table.constraints
    assert table.violations(basis[0]) == []

    try:
        ls.System("F1 = 0\nF2 = 0\nF3 = 0\nG = 0\n")
    except ValueError:
        pass
    else:
        raise AssertionError("degenerate system accepted")

    print(f"ok: {len(eqs)} equations, dimension {len(basis)}, {len(sc)} structure constants")


if __name__ == "__main__":
    main()
