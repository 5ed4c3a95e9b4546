import json
from fractions import Fraction

import pytest
import sympy

from ternverify.catalog import (
    build_paired_u, build_quad, build_irreducible, build_s_m,
    build_s_zero, build_s_zero_generators, mutate,
)
from ternverify.opalg import OperatorExpr
from ternverify.verify import (
    check_casimirs, check_discrete_relations, check_helicity,
    check_irreducibility, check_lie_algebra, check_mirror,
    check_spectrum_sign, commutant_probe, extract_omega,
    helicity_operator, lie_relation_table, verify_tern,
)


def _all_pass(results):
    bad = [c.id for c in results if not c.passed]
    assert not bad, bad


def test_lie_table_covers_all_pairs():
    tern = build_irreducible("u", 0)
    rows = lie_relation_table(tern)
    assert len(rows) == 45
    assert len({label for label, *_ in rows}) == 45


def test_lie_algebra_scalar_terns():
    _all_pass(check_lie_algebra(build_irreducible("u", 0)))
    _all_pass(check_lie_algebra(build_irreducible("d", 0)))
    _all_pass(check_lie_algebra(build_irreducible("u", 2)))


def test_lie_algebra_s_class():
    _all_pass(check_lie_algebra(build_s_m(2, 1)))


def test_helicity_values():
    tern = build_s_m(2, 1)
    results, derived = check_helicity(tern)
    _all_pass(results)
    assert derived["helicity"] == ["1", "-1"]
    lone = build_irreducible("u", 1)
    results, derived = check_helicity(lone)
    _all_pass(results)
    assert lone.expected["helicity"] == (Fraction(1, 2),)


def test_discrete_relations_and_omega():
    tern = build_s_zero("UU", -1)
    results, derived = check_discrete_relations(tern)
    _all_pass(results)
    assert derived["omega"] == "-1"
    pu = build_paired_u()
    omega, resid = extract_omega(pu)
    assert omega == -1 and resid == "0"
    results, derived = check_discrete_relations(pu)
    _all_pass(results)
    assert derived["tau_square"] == "-1"


def test_generators_only_rejected_by_discrete_suite():
    with pytest.raises(ValueError):
        check_discrete_relations(build_irreducible("u", 2))


def test_mirror_relation():
    _all_pass(check_mirror(build_s_zero("AU", 1)))
    _all_pass(check_mirror(build_s_m(2, -1)))


def test_casimirs_vanish():
    for tern in (build_irreducible("u", 0), build_s_m(2, 1)):
        results, derived = check_casimirs(tern)
        _all_pass(results)
        assert derived == {"eta": "0", "varpi": "0"}


def test_spectrum_sign():
    _all_pass(check_spectrum_sign(build_irreducible("d", 0)))
    _all_pass(check_spectrum_sign(build_s_zero("UU", 1)))
    _all_pass(check_spectrum_sign(build_quad()))


def test_commutant_trivial_for_complete_terns():
    for tern in (build_irreducible("u", 0), build_paired_u(),
                 build_s_zero("AA", -1)):
        results, derived = check_irreducibility(tern)
        _all_pass(results)
        assert derived["commutant_dimension"] == 1


def test_commutant_larger_without_discrete_ops():
    bare = build_s_zero_generators()
    basis = commutant_probe(bare)
    assert len(basis) > 1


def test_helicity_operator_block_action():
    lam = helicity_operator(build_s_m(4, 1))
    want = OperatorExpr.block_diag([OperatorExpr.scalar(2),
                                    OperatorExpr.scalar(-2)])
    assert lam == want


def test_mutation_detected():
    tern = build_irreducible("u", 0)
    bad = mutate(tern, "J3+=p1")
    results = check_lie_algebra(bad)
    failing = [c.id for c in results if not c.passed]
    assert failing
    assert any("J3" in cid for cid in failing)


def test_report_shape():
    report = verify_tern(build_irreducible("u", 0))
    payload = json.loads(report.to_json())
    assert payload["schema"] == 1
    assert payload["subject"] == "u:m=0"
    assert payload["overall"] == "pass"
    assert {"id", "pass", "residual"} <= set(payload["checks"][0])
    assert payload["derived_constants"]["eta"] == "0"
    assert payload["derived_constants"]["varpi"] == "0"


def test_report_fails_on_mutation():
    bad = mutate(build_irreducible("u", 0), "K1+=p0")
    report = verify_tern(bad)
    assert not report.overall
    failing = [c.id for c in report.checks if not c.passed]
    assert any("K1" in cid for cid in failing)
