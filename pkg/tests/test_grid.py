import numpy as np
import pytest

from ternverify.catalog import build_irreducible, build_s_m
from ternverify.grid import (
    Bump, GridError, GridWavefunction, MomentumGrid, apply,
    convergence_study, inner_product, random_bump,
    relation_residual_numeric,
)
from ternverify.opalg import OperatorExpr, compose
from ternverify.ratfn import P0, P1
from ternverify.verify import lie_relation_table

S = OperatorExpr.scalar

BUMP = Bump(centers=(1.0, -1.0, 0.9), widths=(0.5, 0.5, 0.5),
            amplitude=1.0 - 0.5j)


def small_grid():
    return MomentumGrid(h=0.25)


def test_nodes_offset_and_reflection_symmetric():
    grid = small_grid()
    assert 0.0 not in grid.axis
    assert np.allclose(grid.axis, -grid.axis[::-1])
    assert grid.n == 16


def test_valid_mask_excludes_axis_and_origin():
    grid = small_grid()
    near_axis = grid.p1**2 + grid.p2**2 < grid.rho_axis**2
    assert not np.any(grid.valid & near_axis)
    assert grid.node_count() < grid.n**3


def test_refined_preserves_box():
    grid = small_grid()
    fine = grid.refined()
    assert fine.h == grid.h / 2
    assert (fine.lo, fine.hi) == (grid.lo, grid.hi)
    assert grid == small_grid() and grid != fine


def test_bad_spacing_rejected():
    with pytest.raises(GridError):
        MomentumGrid(h=0.3)


def test_parity_is_exact_index_reflection():
    grid = small_grid()
    psi = BUMP.evaluate(grid)
    flipped = apply(OperatorExpr.parity(), psi)
    direct = psi.values[0][::-1, ::-1, ::-1].copy()
    direct[~grid.valid] = 0.0
    assert np.array_equal(flipped.values[0], direct)
    twice = apply(OperatorExpr.parity(), flipped)
    masked = psi.values[0].copy()
    masked[~grid.valid] = 0.0
    assert np.array_equal(twice.values[0], masked)


def test_conjugation_and_multiplication():
    grid = small_grid()
    psi = BUMP.evaluate(grid)
    conj = apply(OperatorExpr.conj(), psi)
    assert np.allclose(conj.values[grid.valid[None]],
                       np.conj(psi.values)[grid.valid[None]])
    p1psi = apply(S(P1), psi)
    assert np.allclose(p1psi.values[0][grid.valid],
                       (grid.p1 * psi.values[0])[grid.valid])


def test_inner_product_conjugate_symmetry_and_positivity():
    grid = small_grid()
    rng = np.random.default_rng(7)
    phi = random_bump(rng).evaluate(grid)
    psi = random_bump(rng).evaluate(grid)
    assert inner_product(phi, psi) == pytest.approx(
        np.conj(inner_product(psi, phi)))
    assert inner_product(psi, psi).real > 0
    assert abs(inner_product(psi, psi).imag) < 1e-14


def test_multiplication_operator_is_symmetric_in_inner_product():
    grid = small_grid()
    rng = np.random.default_rng(11)
    phi = random_bump(rng).evaluate(grid)
    psi = random_bump(rng).evaluate(grid)
    op = S(P1 * P0)
    lhs = inner_product(apply(op, phi), psi)
    rhs = inner_product(phi, apply(op, psi))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_fiber_dimension_checked():
    grid = small_grid()
    psi = BUMP.evaluate(grid, dim=1)
    with pytest.raises(GridError):
        apply(OperatorExpr.parity(2), psi)


def test_dump_load_roundtrip(tmp_path):
    grid = small_grid()
    psi = Bump((0.9, 0.9, -1.0), (0.5, 0.5, 0.5), 0.3 + 1j,
               block=1).evaluate(grid, dim=2)
    path = tmp_path / "wave.tvgw"
    psi.dump(path)
    again = GridWavefunction.load(path)
    assert again.grid == grid
    assert np.array_equal(again.values, psi.values)
    with pytest.raises(GridError):
        (tmp_path / "junk").write_bytes(b"nope")
        GridWavefunction.load(tmp_path / "junk")


def test_derivative_orders_on_bump():
    # [d/dp1, p1] = Id holds exactly in the algebra; its discrete
    # residual is pure stencil error, of the scheme's nominal order.
    grid = small_grid()
    ident = OperatorExpr.identity()

    def residual(psi, scheme):
        return relation_residual_numeric(OperatorExpr.deriv(1), S(P1),
                                         1, ident, psi, scheme)

    for scheme, expected in (("fd2", 2.0), ("fd4", 4.0)):
        norms, orders = convergence_study(residual, BUMP, grid.refined(),
                                          levels=3, scheme=scheme)
        assert orders[-1] == pytest.approx(expected, abs=0.4)


def test_lie_relation_residual_converges_at_scheme_order():
    tern = build_s_m(2, 1)
    label, a, b, rhs = next(
        row for row in lie_relation_table(tern) if row[0] == "[J1,J2]=i*J3")
    bump = Bump((1.0, 0.95, -1.0), (0.5, 0.5, 0.5), 1.0, block=0)

    def residual(psi, scheme):
        return relation_residual_numeric(a, b, 1, rhs, psi, scheme)

    norms, orders = convergence_study(residual, bump,
                                      small_grid().refined(),
                                      levels=3, scheme="fd2", dim=2)
    assert norms[0] > norms[-1]
    assert orders[-1] == pytest.approx(2.0, abs=0.3)


def test_exact_relation_is_rounding_level():
    tern = build_irreducible("u", 0)
    rows = {row[0]: row for row in lie_relation_table(tern)}
    label, a, b, rhs = rows["[P1,P2]=0"]
    psi = BUMP.evaluate(small_grid())
    res = relation_residual_numeric(a, b, 1, rhs, psi, "fd2")
    assert res.norm() / psi.norm() < 1e-12
