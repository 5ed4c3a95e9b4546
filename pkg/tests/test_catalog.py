from fractions import Fraction

import pytest

from ternverify.catalog import (
    Tern, TernSpec, build_paired_u, build_paired_d, build_quad,
    build_irreducible, build_s_m, build_s_zero, build_s_zero_generators,
    catalog, from_label, mutate,
)
from ternverify.opalg import OperatorExpr, compose
from ternverify.ratfn import P0, P1, P2, RationalFn


def test_catalog_census():
    terns = catalog()
    assert len(terns) == 2 + 6 + 12 + 3
    labels = [t.spec.label() for t in terns]
    assert len(set(labels)) == len(labels)
    assert "u:m=0" in labels
    assert "s:m=0:AA:-1" in labels
    assert "s:m=2:AA:+1" in labels
    assert "quad:m=2" in labels
    assert all(t.complete for t in terns)


def test_label_roundtrip():
    for tern in catalog():
        again = from_label(tern.spec.label())
        assert again.spec == tern.spec
        assert again.p0 == tern.p0
        assert again.j == tern.j
        assert again.pi == tern.pi


def test_generators_only_bundles():
    bundle = build_irreducible("u", 2)
    assert not bundle.complete
    assert bundle.spec.family == "generators-only"
    assert bundle.expected["helicity"] == (Fraction(1),)
    axis_sq = P1 * P1 + P2 * P2
    field = P1 * P0 / axis_sq
    j1 = bundle.j[0]
    assert j1.terms[(0, 0, (0, 0, 0), 0)] == field
    bare = build_s_zero_generators()
    assert not bare.complete and bare.dim == 2


def test_class_d_flips_energy_and_boost():
    u = build_irreducible("u", 0)
    d = build_irreducible("d", 0)
    assert d.p0 == -u.p0
    assert all(kd == -ku for kd, ku in zip(d.k, u.k))
    assert d.j == u.j


def test_s_m_rejects_zero():
    with pytest.raises(ValueError):
        build_s_m(0, 1)
    with pytest.raises(ValueError):
        from_label("s:m=3:UU:+1")


def test_bad_labels():
    for bad in ("q:m=0", "s:m=0", "u:m=x", "s:m=0:ZZ:+1"):
        with pytest.raises(ValueError):
            from_label(bad)


def test_discrete_characters():
    assert build_s_zero("UU", 1).pi.kappa == 0
    assert build_s_zero("AU", -1).pi.kappa == 1
    assert build_s_zero("AU", -1).tau.kappa == 0
    aa = build_s_zero("AA", 1)
    assert aa.pi.kappa == 1 and aa.tau.kappa == 1
    pu = build_paired_u()
    assert pu.pi.kappa == 0 and pu.tau.kappa == 1
    qd = build_quad()
    assert qd.pi.kappa == 1 and qd.tau.kappa == 0
    assert qd.dim == 4


def test_example_52_mirrors_51():
    pu = build_paired_u()
    pd = build_paired_d()
    assert pd.p0 == -pu.p0
    assert pd.pi == pu.pi and pd.tau == pu.tau


def test_mutate():
    tern = build_irreducible("u", 0)
    bad = mutate(tern, "J3+=p1")
    delta = OperatorExpr.scalar(P1)
    assert bad.j[2] == tern.j[2] + delta
    assert bad.j[0] == tern.j[0]
    assert bad.spec == tern.spec
    back = mutate(bad, "J3-=p1")
    assert back.j[2] == tern.j[2]
    with pytest.raises(ValueError):
        mutate(tern, "J9+=p1")
    with pytest.raises(ValueError):
        mutate(tern, "J1*p1")
