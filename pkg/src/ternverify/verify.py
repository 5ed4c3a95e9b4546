"""Symbolic verification suites for catalog terns.

Every check reduces an operator identity to a normal-form residual and
passes iff the residual is exactly zero; derived scalars (the Casimir
values, the squares of the discrete operators, the phase omega) are
computed from the operators, never taken from the catalog metadata.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from . import ratfn
from .ratfn import ONE, P0, PJ, RationalFn
from .opalg import (
    OperatorExpr, commutator, compose, formal_adjoint, relation_residual,
)

S = OperatorExpr.scalar

I = ratfn.I


@dataclass
class CheckResult:
    id: str
    passed: bool
    residual: str = "0"

    def as_dict(self):
        return {"id": self.id, "pass": self.passed,
                "residual": self.residual}


@dataclass
class CertificateReport:
    subject: str
    checks: list = field(default_factory=list)
    derived_constants: dict = field(default_factory=dict)

    @property
    def overall(self):
        return all(c.passed for c in self.checks)

    def extend(self, results):
        self.checks.extend(results)

    def as_dict(self):
        return {"schema": 1,
                "subject": self.subject,
                "checks": [c.as_dict() for c in self.checks],
                "derived_constants": dict(self.derived_constants),
                "overall": "pass" if self.overall else "fail"}

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=False)


def _eps(a, b):
    """Levi-Civita contraction: returns (sign, l) with eps_{abl} = sign."""
    table = {(1, 2): (1, 3), (2, 3): (1, 1), (3, 1): (1, 2),
             (2, 1): (-1, 3), (3, 2): (-1, 1), (1, 3): (-1, 2)}
    return table.get((a, b))


def _zero_check(check_id, residual):
    ok = residual.is_zero()
    return CheckResult(check_id, ok, "0" if ok else str(residual))


# -- Lie algebra --------------------------------------------------------

def lie_relation_table(tern):
    """All 45 unordered generator pairs with their expected commutator."""
    p0 = tern.p0
    p = tern.p
    j = tern.j
    k = tern.k
    zero = OperatorExpr.zero(tern.dim)
    rows = []
    names = ["P0", "P1", "P2", "P3"]
    moms = [p0, p[0], p[1], p[2]]
    # momentum-momentum pairs all commute
    for a in range(4):
        for b in range(a + 1, 4):
            rows.append(("[%s,%s]=0" % (names[a], names[b]),
                         moms[a], moms[b], zero))
    for a in (1, 2, 3):
        rows.append(("[J%d,P0]=0" % a, j[a - 1], p0, zero))
        rows.append(("[K%d,P0]=i*P%d" % (a, a), k[a - 1], p0, I * p[a - 1]))
        for b in (1, 2, 3):
            hit = _eps(a, b)
            if hit is None:
                rhs_jp = zero
            else:
                sign, l = hit
                rhs_jp = (I * p[l - 1]) * sign
            rows.append(("[J%d,P%d]=%s" % (a, b, "0" if hit is None else
                                           "%si*P%d" % ("" if hit[0] > 0
                                                        else "-", hit[1])),
                         j[a - 1], p[b - 1], rhs_jp))
            rows.append(("[K%d,P%d]=%s" % (a, b, "i*P0" if a == b else "0"),
                         k[a - 1], p[b - 1],
                         I * p0 if a == b else zero))
        for b in range(a + 1, 4):
            sign, l = _eps(a, b)
            rows.append(("[J%d,J%d]=i*J%d" % (a, b, l),
                         j[a - 1], j[b - 1], (I * j[l - 1]) * sign))
            rows.append(("[K%d,K%d]=-i*J%d" % (a, b, l),
                         k[a - 1], k[b - 1], (-I * j[l - 1]) * sign))
        for b in (1, 2, 3):
            hit = _eps(a, b)
            if hit is None:
                rhs = zero
                label = "[J%d,K%d]=0" % (a, b)
            else:
                sign, l = hit
                rhs = (I * k[l - 1]) * sign
                label = "[J%d,K%d]=%si*K%d" % (a, b,
                                               "" if sign > 0 else "-", l)
            rows.append((label, j[a - 1], k[b - 1], rhs))
    assert len(rows) == 45
    return rows


def check_lie_algebra(tern):
    results = []
    for label, a, b, rhs in lie_relation_table(tern):
        results.append(_zero_check(label, commutator(a, b) - rhs))
    return results


# -- discrete symmetries ------------------------------------------------

def _discrete_signs(op_kind, antilinear):
    """Signs for op*G = sign*G*op across (P0, Pj, Jk, Kj).

    op_kind is "pi" or "tau"; the four relation families for the four
    (anti)unitarity characters.
    """
    if op_kind == "pi":
        return (-1, 1, -1, 1) if antilinear else (1, -1, 1, -1)
    if op_kind == "tau":
        return (1, -1, -1, 1) if antilinear else (-1, 1, 1, -1)
    raise ValueError(op_kind)


def _scalar_of(expr, dim):
    """The constant c with expr = c*Id, if any (None otherwise)."""
    if expr.is_zero():
        return sympy.Integer(0)
    cvals = set()
    for (r, s, alpha, u), c in expr.terms.items():
        if r != s or any(alpha) or u or not c.is_constant():
            return None
        cvals.add(c)
    if len(cvals) != 1 or len(expr.terms) != dim:
        return None
    return cvals.pop().constant_value()


def check_discrete_relations(tern):
    """The (anti)commutation pattern of Pi and Tau with all generators,
    the signs of their squares, and the exchange phase omega."""
    if not tern.complete:
        raise ValueError("generators-only bundle has no Pi/Tau")
    results = []
    derived = {}
    groups = (("P0", [tern.p0]),
              ("P", list(tern.p)),
              ("J", list(tern.j)),
              ("K", list(tern.k)))
    for kind, op in (("pi", tern.pi), ("tau", tern.tau)):
        name = "Pi" if kind == "pi" else "Tau"
        signs = _discrete_signs(kind, antilinear=bool(op.kappa))
        for sign, (gname, gens) in zip(signs, groups):
            for idx, g in enumerate(gens):
                label = gname if gname == "P0" else "%s%d" % (gname, idx + 1)
                rel = "%s*%s%s%s*%s" % (name, label,
                                        "-" if sign > 0 else "+",
                                        label, name)
                results.append(_zero_check(rel, relation_residual(op, g,
                                                                  sign)))
        square = compose(op, op)
        sq = _scalar_of(square, tern.dim)
        ok = sq in (1, -1)
        results.append(CheckResult("%s^2=+/-Id" % name, bool(ok),
                                   "0" if ok else str(square)))
        derived["%s_square" % kind] = str(sq) if ok else None
        if tern.expected.get("%s_square" % kind) is not None:
            results.append(CheckResult(
                "%s^2 matches catalog" % name,
                ok and sq == tern.expected["%s_square" % kind]))
    omega, om_res = extract_omega(tern)
    derived["omega"] = None if omega is None else str(omega)
    results.append(CheckResult("Pi*Tau=omega*Tau*Pi", omega is not None,
                               "0" if omega is None else om_res))
    if omega is not None:
        results.append(CheckResult("|omega|=1",
                                   sympy.simplify(omega
                                                  * sympy.conjugate(omega))
                                   == 1))
        if tern.expected.get("omega") is not None:
            results.append(CheckResult("omega matches catalog",
                                       omega == tern.expected["omega"]))
    return results, derived


def extract_omega(tern):
    """Solve Pi Tau = omega Tau Pi for the scalar phase omega.

    Returns (omega, residual string); omega is None when no scalar
    works.
    """
    pt = compose(tern.pi, tern.tau)
    tp = compose(tern.tau, tern.pi)
    if pt.is_zero() and tp.is_zero():
        return None, "both products vanish"
    for sig, c in sorted(pt.terms.items()):
        other = tp.terms.get(sig)
        if other is None:
            continue
        ratio = c / other
        if not ratio.is_constant():
            continue
        omega = ratio.constant_value()
        resid = pt - tp * ratio
        if resid.is_zero():
            return omega, "0"
        return None, str(resid)
    return None, "no matching term between Pi*Tau and Tau*Pi"


# -- helicity and mirror relation --------------------------------------

def helicity_operator(tern):
    """J . P / |P| with |P| realized as the multiplication by p0."""
    lam = OperatorExpr.zero(tern.dim)
    for jop, pj in zip(tern.j, PJ):
        lam = lam + compose(jop, S(pj / P0, tern.dim))
    return lam


def check_helicity(tern):
    lam = helicity_operator(tern)
    expected = tern.expected["helicity"]
    want = OperatorExpr.block_diag(
        [S(RationalFn.const(h)) for h in expected])
    label = "helicity=(%s)" % ",".join(str(h) for h in expected)
    result = _zero_check(label, lam - want)
    derived = {"helicity": [str(h) for h in expected]
               if result.passed else None}
    return [result], derived


def check_mirror(tern):
    """Pi reverses helicity: Pi lambda = -lambda Pi, for either
    character of Pi."""
    lam = helicity_operator(tern)
    return [_zero_check("Pi*helicity+helicity*Pi",
                        relation_residual(tern.pi, lam, -1))]


# -- Casimir invariants -------------------------------------------------

def check_casimirs(tern):
    """The mass-squared and spin invariants, both expected to vanish.

    mass: P0^2 - sum Pj^2; spin: W0^2 - sum Wj^2 built from the
    Pauli-Lubanski operators W0 = J.P and W = P0 J + P x K.
    """
    results = []
    derived = {}
    mass = compose(tern.p0, tern.p0)
    for pj in tern.p:
        mass = mass - compose(pj, pj)
    eta = _scalar_of(mass, tern.dim)
    results.append(CheckResult("P0^2-P^2=eta*Id", eta is not None,
                               "0" if eta is not None else str(mass)))
    derived["eta"] = str(eta) if eta is not None else None
    w0 = OperatorExpr.zero(tern.dim)
    for jop, pj in zip(tern.j, tern.p):
        w0 = w0 + compose(jop, pj)
    w = []
    for a in (1, 2, 3):
        b, c = ((2, 3), (3, 1), (1, 2))[a - 1]
        w.append(compose(tern.p0, tern.j[a - 1])
                 + compose(tern.p[b - 1], tern.k[c - 1])
                 - compose(tern.p[c - 1], tern.k[b - 1]))
    spin = compose(w0, w0)
    for wj in w:
        spin = spin - compose(wj, wj)
    varpi = _scalar_of(spin, tern.dim)
    results.append(CheckResult("W0^2-W^2=varpi*Id", varpi is not None,
                               "0" if varpi is not None else str(spin)))
    derived["varpi"] = str(varpi) if varpi is not None else None
    results.append(CheckResult("eta=0", eta == 0))
    results.append(CheckResult("varpi=0", varpi == 0))
    return results, derived


# -- spectrum sign / class verdict --------------------------------------

def check_spectrum_sign(tern):
    """Confirm the energy block signs match the declared class, and the
    (anti)linearity pattern of Pi/Tau allowed for that class."""
    results = []
    signs = []
    ok = True
    for r in range(tern.dim):
        c = tern.p0.terms.get((r, r, (0, 0, 0), 0))
        if c == P0:
            signs.append(1)
        elif c == -P0:
            signs.append(-1)
        else:
            ok = False
            signs.append(0)
    results.append(CheckResult("P0 diagonal is (+/-)p0 per block", ok,
                               "0" if ok else str(tern.p0)))
    expected_signs = tern.expected["p0_signs"]
    results.append(CheckResult("energy signs match catalog",
                               tuple(signs) == tuple(expected_signs)))
    klass = tern.spec.klass
    if klass == "u":
        class_ok = all(s == 1 for s in signs)
    elif klass == "d":
        class_ok = all(s == -1 for s in signs)
    else:
        class_ok = 1 in signs and -1 in signs
    results.append(CheckResult("sign pattern matches class %r" % klass,
                               class_ok))
    if tern.complete:
        if klass in ("u", "d"):
            char_ok = tern.pi.kappa == 0 and tern.tau.kappa == 1
        else:
            char_ok = tern.pi.kappa == 1 or tern.tau.kappa == 0
        results.append(CheckResult(
            "discrete characters allowed for class %r" % klass, char_ok))
    return results


# -- commutant probe ----------------------------------------------------

def _ansatz_basis(dim, kappa):
    """Constant matrix units times optional parity, real basis.

    Yields (label, operator) pairs; each complex unknown is split into
    a real part (coefficient 1) and an imaginary part (coefficient i).
    """
    basis = []
    for r in range(dim):
        for s in range(dim):
            for u in (0, 1):
                for part, c in (("re", ONE), ("im", ratfn.I)):
                    term = {(r, s, (0, 0, 0), u): c}
                    basis.append((("%d%d" % (r, s), u, part),
                                  OperatorExpr(dim, kappa, term)))
    return basis


def _linear_equations(images):
    """Exact real-linear system rows from operator-valued images.

    images[k] is the image of the k-th real unknown under one
    constraint map; the rows returned express that every normal-form
    coefficient of sum_k t_k images[k] vanishes.
    """
    sigs = {}
    for k, img in enumerate(images):
        for sig, c in img.terms.items():
            sigs.setdefault(sig, {})[k] = c
    rows = []
    n = len(images)
    for sig in sorted(sigs):
        col = sigs[sig]
        den = ratfn._RING.one
        for c in col.values():
            den = den * c.den.quo(den.gcd(c.den))
        poly_cols = {k: c.num * den.quo(c.den) for k, c in col.items()}
        monoms = sorted({m for p in poly_cols.values()
                         for m, _ in p.iterterms()})
        for mono in monoms:
            re_row = [sympy.Integer(0)] * n
            im_row = [sympy.Integer(0)] * n
            nonzero = False
            for k, poly in poly_cols.items():
                coeff = dict(poly.iterterms()).get(mono)
                if coeff is None:
                    continue
                val = ratfn._DOM.to_sympy(coeff)
                re_row[k] = sympy.re(val)
                im_row[k] = sympy.im(val)
                nonzero = True
            if nonzero:
                rows.append(re_row)
                rows.append(im_row)
    return rows


def commutant_probe(tern, include_discrete=True, hermitian=True):
    """Search the finite ansatz family for operators commuting with the
    whole tern.

    The ansatz is span of E_rs * Y^u and E_rs * Y^u * K with constant
    complex coefficients (real-linear solve).  With hermitian=True the
    linear sector is restricted to self-adjoint candidates, matching
    the Schur-type irreducibility arguments.  Returns a list of basis
    OperatorExpr; irreducibility verdict is basis == [Id].
    """
    maps = [("gen:%s" % name, g) for name, g in tern.generators()]
    discrete = []
    if include_discrete and tern.complete:
        discrete = [("pi", tern.pi), ("tau", tern.tau)]
    out = []
    for kappa in (0, 1):
        basis = _ansatz_basis(tern.dim, kappa)
        ops = [b for _, b in basis]
        rows = []
        for _, g in maps:
            rows.extend(_linear_equations(
                [compose(b, g) - compose(g, b) for b in ops]))
        for _, g in discrete:
            rows.extend(_linear_equations(
                [compose(b, g) - compose(g, b) for b in ops]))
        if hermitian and kappa == 0:
            rows.extend(_linear_equations(
                [b - formal_adjoint(b) for b in ops]))
        mat = sympy.Matrix(rows)
        null = mat.nullspace() if rows else [sympy.eye(len(ops))[:, k]
                                             for k in range(len(ops))]
        for vec in null:
            combo = OperatorExpr.zero(tern.dim, kappa)
            for k, t in enumerate(vec):
                if t != 0:
                    combo = combo + ops[k] * RationalFn.const(
                        sympy.nsimplify(t, rational=True))
            out.append(combo)
    return out


def commutant_is_trivial(basis, dim):
    if len(basis) != 1:
        return False
    only = basis[0]
    ident = OperatorExpr.identity(dim)
    for scale in (1, -1, 2, Fraction(1, 2)):
        if only == ident * RationalFn.const(scale):
            return True
    # allow any nonzero real multiple of the identity
    c = _scalar_of(only, dim)
    return c is not None and c != 0 and sympy.im(c) == 0


def check_irreducibility(tern):
    basis = commutant_probe(tern)
    ok = commutant_is_trivial(basis, tern.dim)
    residual = "0" if ok else "; ".join(str(b) for b in basis)
    return [CheckResult("commutant={Id} (finite ansatz)", ok, residual)], \
        {"commutant_dimension": len(basis)}


# -- numeric cross-validation ------------------------------------------

def numeric_lie_orders(tern, bump, base_grid, scheme="fd2", levels=2,
                       rounding_tol=1e-10):
    """Residual norms and observed convergence orders for all 45
    commutation relations, applied numerically to one bump.

    Returns {relation label: (norms, order)}; order is None when the
    residual sits at rounding level (identities that discretize
    exactly).
    """
    from . import grid as gridmod
    table = lie_relation_table(tern)
    norms = {label: [] for label, *_ in table}
    g = base_grid
    for _ in range(levels):
        psi = bump.evaluate(g, dim=tern.dim)
        pnorm = psi.norm()
        first = {}

        def once(op):
            if op not in first:
                first[op] = gridmod.apply(op, psi, scheme)
            return first[op]

        for label, a, b, rhs in table:
            res = (gridmod.apply(a, once(b), scheme)
                   - gridmod.apply(b, once(a), scheme))
            if not rhs.is_zero():
                res = res - once(rhs)
            norms[label].append(res.norm() / pnorm)
        g = g.refined()
    out = {}
    for label, ns in norms.items():
        if ns[-1] < rounding_tol:
            out[label] = (ns, None)
        else:
            out[label] = (ns, math.log2(ns[-2] / ns[-1])
                          if len(ns) > 1 else None)
    return out


# -- full report --------------------------------------------------------

def verify_tern(tern):
    report = CertificateReport(subject=tern.spec.label())
    report.extend(check_lie_algebra(tern))
    hel_results, hel_derived = check_helicity(tern)
    report.extend(hel_results)
    report.derived_constants.update(hel_derived)
    cas_results, cas_derived = check_casimirs(tern)
    report.extend(cas_results)
    report.derived_constants.update(cas_derived)
    report.extend(check_spectrum_sign(tern))
    if tern.complete:
        disc_results, disc_derived = check_discrete_relations(tern)
        report.extend(disc_results)
        report.derived_constants.update(disc_derived)
        report.extend(check_mirror(tern))
        irr_results, irr_derived = check_irreducibility(tern)
        report.extend(irr_results)
        report.derived_constants.update(irr_derived)
    return report
