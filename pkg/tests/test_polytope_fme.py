from fractions import Fraction

import numpy as np
import pytest
from oracles import vertex_feasibility

from iccregion.polytope_fme import (
    LinearInequality,
    LinearSystem,
    UnboundedRegionError,
    eliminate_variable,
    halfplane_polygon,
    polygon_from_system,
    project,
    remove_redundant,
    system_from_polygon,
)

leq = LinearInequality.leq
geq = LinearInequality.geq


def mac_with_split():
    """R1 = Ra + Rb with Ra <= 1, Rb <= 1, R2 <= 1.5, R1 + R2 <= 2.5, all non-negative."""
    return LinearSystem(("R1", "R2", "Ra", "Rb"), (
        leq({"R1": 1, "Ra": -1, "Rb": -1}, 0), geq({"R1": 1, "Ra": -1, "Rb": -1}, 0),
        leq({"Ra": 1}, 1), leq({"Rb": 1}, 1), leq({"R2": 1}, 1.5),
        leq({"Ra": 1, "Rb": 1, "R2": 1}, 2.5),
        geq({"Ra": 1}, 0), geq({"Rb": 1}, 0), geq({"R2": 1}, 0)))


def test_projection_example():
    proj = project(mac_with_split(), ["R1", "R2"])
    poly = polygon_from_system(proj)
    expected = np.array([[0, 0], [2, 0], [2, 0.5], [1, 1.5], [0, 1.5]])
    np.testing.assert_allclose(poly.vertices, expected, atol=1e-12)


def test_exact_fraction_coefficients():
    s = LinearSystem(("x", "y"), (leq({"x": 3, "y": 1}, 1), leq({"x": -2, "y": 1}, 0)))
    out = eliminate_variable(s, "x")
    coeffs = [i.coef("y") for i in out.ineqs]
    assert all(isinstance(c, Fraction) for c in coeffs)
    # 2*(3x + y) + 3*(-2x + y) = 5y <= 2
    assert any(i.coef("y") == 1 and i.rhs == pytest.approx(0.4) for i in out.ineqs)


def test_normalized_leading_coefficient():
    ineq = leq({"b": 4, "a": -2}, 6).normalized()
    assert ineq.coef("a") == -1 and ineq.coef("b") == 2 and ineq.rhs == 3


def test_redundancy_removal_keeps_region():
    s = LinearSystem(("x", "y"), (
        leq({"x": 1}, 1), leq({"x": 1}, 2), leq({"x": 1, "y": 1}, 5),
        leq({"y": 1}, 1), geq({"x": 1}, 0), geq({"y": 1}, 0)))
    r = remove_redundant(s)
    assert len(r) < len(s)
    assert polygon_from_system(r).allclose(polygon_from_system(s))


def test_idempotent_projection():
    proj = project(mac_with_split(), ["R1", "R2"])
    again = project(proj, ["R1", "R2"])
    assert polygon_from_system(again).allclose(polygon_from_system(proj))


def test_symbolic_rhs_matches_numeric():
    # rhs are weight vectors over (1, t); instantiate at t = 0.5 and compare.
    rows = [({"x": 1, "z": 1}, np.array([0.0, 1.0])), ({"z": -1}, np.array([0.0, 0.0])),
            ({"y": 1, "z": -1}, np.array([1.0, 0.0])), ({"x": -1}, np.zeros(2)),
            ({"y": -1}, np.zeros(2))]
    sym = LinearSystem(("x", "y", "z"), tuple(LinearInequality(c, r) for c, r in rows))
    num = LinearSystem(("x", "y", "z"), tuple(LinearInequality(c, float(r @ [1, 0.5]))
                                              for c, r in rows))
    a = polygon_from_system(project(sym, ["x", "y"]).evaluate_rhs(np.array([1.0, 0.5])))
    b = polygon_from_system(project(num, ["x", "y"]))
    assert a.allclose(b)


def test_infeasible_and_unbounded():
    bad = LinearSystem(("x", "y"), (leq({"x": 1}, -1), geq({"x": 1}, 0), leq({"y": 1}, 1),
                                    geq({"y": 1}, 0)))
    assert polygon_from_system(project(bad, ["x", "y"])).is_empty
    open_ = LinearSystem(("x", "y"), (geq({"x": 1}, 0), geq({"y": 1}, 0)))
    with pytest.raises(UnboundedRegionError):
        polygon_from_system(open_)
    with pytest.raises(UnboundedRegionError):
        halfplane_polygon([])


def test_validation():
    with pytest.raises(ValueError):
        leq({"x": 0}, 1)
    with pytest.raises(ValueError):
        LinearSystem(("x",), (leq({"y": 1}, 1),))
    with pytest.raises(ValueError):
        project(mac_with_split(), ["Q"])


def test_polygon_system_roundtrip():
    poly = polygon_from_system(project(mac_with_split(), ["R1", "R2"]))
    assert polygon_from_system(system_from_polygon(poly)).allclose(poly, tol=1e-9)


@pytest.mark.parametrize("seed", range(20))
def test_projection_against_vertex_oracle(seed):
    rng = np.random.default_rng(seed)
    n = 5
    A = rng.integers(-2, 3, (10, n))
    A[np.all(A == 0, axis=1), 0] = 1
    b = rng.integers(-1, 6, 10).astype(float)
    names = [f"x{j}" for j in range(n)]
    s = LinearSystem(names, [leq({v: int(c) for v, c in zip(names, row)}, r)
                             for row, r in zip(A, b)])
    keep = [0, 1]
    proj = project(s, ["x0", "x1"])
    pts = rng.uniform(-4, 4, (400, 2))
    got = [proj.is_feasible_at({"x0": x, "x1": y}) for x, y in pts]
    np.testing.assert_array_equal(got, vertex_feasibility(A, b, keep, pts))
