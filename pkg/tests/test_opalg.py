import random

import pytest

from ternverify.ratfn import I, ONE, P0, P1, P2, P3, RationalFn
from ternverify.opalg import (
    FiberMismatch, KappaMismatch, OperatorExpr, anticommutator, commutator,
    compose, formal_adjoint, is_self_adjoint, relation_residual,
)

S = OperatorExpr.scalar
D1, D2, D3 = (OperatorExpr.deriv(j) for j in (1, 2, 3))
Id = OperatorExpr.identity()
Y = OperatorExpr.parity()
K = OperatorExpr.conj()


def orbital_rotation(j):
    k, l = [(2, 3), (3, 1), (1, 2)][j - 1]
    pk = (P1, P2, P3)[k - 1]
    pl = (P1, P2, P3)[l - 1]
    return (-I) * (compose(S(pk), OperatorExpr.deriv(l))
                   - compose(S(pl), OperatorExpr.deriv(k)))


def orbital_boost(j):
    return I * compose(S(P0), OperatorExpr.deriv(j))


def test_leibniz_composition():
    assert compose(D1, S(P1)) == compose(S(P1), D1) + Id
    got = compose(D1, compose(D1, S(P1 * P1)))
    want = (compose(S(P1 * P1), compose(D1, D1))
            + 4 * compose(S(P1), D1) + 2 * Id)
    assert got == want


def test_parity_rules():
    # two sign flips cancel: Y p1 d1 = p1 d1 Y
    assert compose(Y, compose(S(P1), D1)) == compose(compose(S(P1), D1), Y)
    assert compose(Y, Y) == Id
    assert compose(Y, S(P1)) == compose(S(-P1), Y)
    assert compose(Y, D2) == compose(-D2, Y)


def test_conjugation_rules():
    KY = compose(K, Y)
    assert compose(KY, KY) == Id
    assert compose(K, K) == Id
    assert compose(K, S(I * P1)) == compose(S(-I * P1), K)
    assert compose(K, D3) == compose(D3, K)
    assert compose(K, S(P0)).kappa == 1


def test_antilinear_matrix_transport():
    M = OperatorExpr.matrix([[0, I], [-I, 0]])
    K2 = OperatorExpr.conj(2)
    got = compose(K2, M)
    want = compose(OperatorExpr.matrix([[0, -I], [I, 0]]), K2)
    assert got == want


def test_kappa_mix_rejected():
    with pytest.raises(KappaMismatch):
        K + Id
    with pytest.raises(KappaMismatch):
        commutator(K, S(P1))


def test_fiber_mismatch_rejected():
    with pytest.raises(FiberMismatch):
        compose(Id, OperatorExpr.identity(2))


def test_rotation_boost_algebra():
    J = [orbital_rotation(j) for j in (1, 2, 3)]
    B = [orbital_boost(j) for j in (1, 2, 3)]
    assert commutator(J[0], J[1]) == I * J[2]
    assert commutator(B[0], B[1]) == (-I) * J[2]
    assert commutator(J[0], B[1]) == I * B[2]
    assert commutator(B[0], S(P1)) == S(I * P0)
    assert commutator(B[0], S(P0)) == S(I * P1)
    assert commutator(S(P1), S(P2)).is_zero()


def test_relation_residual_signs():
    # Y anticommutes with p1 and commutes with p0
    assert relation_residual(Y, S(P1), -1).is_zero()
    assert relation_residual(Y, S(P0), +1).is_zero()
    assert not relation_residual(Y, S(P1), +1).is_zero()
    assert anticommutator(Y, S(P1)).is_zero()


def test_adjoints():
    f1 = I * D1 + S(-(I / 2) * P1 / (P0 * P0))
    assert is_self_adjoint(f1)
    assert is_self_adjoint(orbital_rotation(3))
    assert is_self_adjoint(orbital_boost(2))
    assert formal_adjoint(S(I * P1)) == S(-I * P1)
    M = OperatorExpr.matrix([[0, I], [0, 0]])
    assert formal_adjoint(M) == OperatorExpr.matrix([[0, 0], [-I, 0]])
    with pytest.raises(KappaMismatch):
        formal_adjoint(K)


def _random_op(rng, dim=1):
    pool = [S(P1, dim), S(P0, dim), S(I * P2, dim),
            OperatorExpr.deriv(1, dim), OperatorExpr.deriv(3, dim),
            OperatorExpr.parity(dim), OperatorExpr.identity(dim)]
    a = pool[rng.randrange(len(pool))]
    b = pool[rng.randrange(len(pool))]
    return compose(a, b) + pool[rng.randrange(len(pool))] * rng.randint(-2, 2)


def test_associativity_property():
    rng = random.Random(31)
    for _ in range(12):
        a, b, c = (_random_op(rng) for _ in range(3))
        assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_jacobi_property():
    rng = random.Random(17)
    for _ in range(8):
        a, b, c = (_random_op(rng) for _ in range(3))
        total = (commutator(a, commutator(b, c))
                 + commutator(b, commutator(c, a))
                 + commutator(c, commutator(a, b)))
        assert total.is_zero()


def test_adjoint_involution_property():
    rng = random.Random(71)
    for _ in range(8):
        a = _random_op(rng)
        assert formal_adjoint(formal_adjoint(a)) == a


def test_block_diag_and_matrix():
    b = OperatorExpr.block_diag([S(P0), S(-P0)])
    assert b == OperatorExpr.matrix([[P0, 0], [0, -P0]])
    swap = OperatorExpr.matrix([[0, 1], [1, 0]])
    assert compose(swap, b) == compose(-b, swap)


def test_rendering_deterministic():
    expr = compose(S(P1), D1) + Id
    assert str(expr) == "1 + p1*d1"
    assert str(compose(K, Y)) == "Y*K"
    assert str(OperatorExpr.zero()) == "0"
