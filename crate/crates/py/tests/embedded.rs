use liesym_py::liesym_py;
use pyo3::prelude::*;

#[test]
fn module_runs_inside_an_embedded_interpreter() {
    pyo3::append_to_inittab!(liesym_py);
    Python::initialize();
    Python::attach(|py| {
        py.run(
            cr#"
import liesym_py as ls
sm = ls.System.model()
basis = sm.symmetry_basis(2)
assert len(basis) == 10
assert len(sm.determining_equations()) == 13
assert ls.jacobi_holds(basis)
bad = ls.VectorField("xi = 0\ntau = 0\nphi = y")
assert sm.is_symmetry(bad) == (False, ["phi_y = 0"])
assert len(sm.closure_table()) == 60
try:
    ls.System("F2 = 1 +* x")
    raise AssertionError("accepted")
except ValueError:
    pass
"#,
            None,
            None,
        )
    })
    .unwrap();
}
