"""Position operators: the canonical candidate, the residual-operator
classification on the two-block zero-helicity terns, and numerical
no-solution certificates for the nonlocalizability and symmetry
obstructions.

The no-solution certificates discretize a linear first-order PDE system
on the momentum grid and solve the least-squares problem exactly; a
minimal normalized residual r* that stays bounded away from zero under
grid refinement is desk-scale evidence that the continuum system is
inconsistent.  The certified systems are assembled from symbolic
commutators wherever possible, so transcription slips in a hand-copied
equation list are detected rather than inherited (see
derive_angular_system and the transcribed_angular_system comparison in
position_residual_harness).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse
import scipy.sparse.linalg
import sympy

from . import ratfn
from .ratfn import I, ONE, P0, P1, P2, P3, PJ, RationalFn
from .opalg import OperatorExpr, commutator, compose, relation_residual
from .catalog import boost_field, orbital_rotation, rotation_field
from .grid import MomentumGrid, _derivative
from .verify import CheckResult, _eps, _linear_equations

S = OperatorExpr.scalar

_AXIS_SQ = P1 * P1 + P2 * P2


# -- canonical position operator ---------------------------------------

def newton_wigner(dim=1):
    """The three canonical position components i d_j - (i/2) p_j/p0^2."""
    out = []
    for j in (1, 2, 3):
        out.append(I * OperatorExpr.deriv(j, dim)
                   + S(-(I / 2) * PJ[j - 1] / (P0 * P0), dim))
    return tuple(out)


def check_position(tern, q=None):
    """Symbolic residuals for a candidate position three-operator.

    Checked relations: mutual commutation of the components; exchange
    with Tau and sign flip with Pi; canonical commutation with the
    momenta; vector transformation under rotations.
    """
    if q is None:
        q = newton_wigner(tern.dim)
    results = []
    ident = OperatorExpr.identity(tern.dim)
    for a in range(3):
        for b in range(a + 1, 3):
            results.append(_zero(
                "[Q%d,Q%d]=0" % (a + 1, b + 1), commutator(q[a], q[b])))
    for a in range(3):
        for b in range(3):
            want = I * ident if a == b else OperatorExpr.zero(tern.dim)
            results.append(_zero(
                "[Q%d,P%d]=%s" % (a + 1, b + 1,
                                  "i*Id" if a == b else "0"),
                commutator(q[a], tern.p[b]) - want))
    for a in range(3):
        for b in range(3):
            hit = _eps(a + 1, b + 1)
            if hit is None:
                want = OperatorExpr.zero(tern.dim)
                label = "[J%d,Q%d]=0" % (a + 1, b + 1)
            else:
                sign, l = hit
                want = (I * q[l - 1]) * sign
                label = "[J%d,Q%d]=%si*Q%d" % (a + 1, b + 1,
                                               "" if sign > 0 else "-", l)
            results.append(_zero(label, commutator(tern.j[a], q[b]) - want))
    if tern.complete:
        for b in range(3):
            results.append(_zero("Tau*Q%d-Q%d*Tau" % (b + 1, b + 1),
                                 relation_residual(tern.tau, q[b], 1)))
            results.append(_zero("Pi*Q%d+Q%d*Pi" % (b + 1, b + 1),
                                 relation_residual(tern.pi, q[b], -1)))
    return results


def _zero(check_id, residual):
    ok = residual.is_zero()
    return CheckResult(check_id, ok, "0" if ok else str(residual))


# -- residual-operator classification (two-block, zero helicity) --------

_HERMITIAN_BASIS = (
    sympy.Matrix([[1, 0], [0, 0]]),
    sympy.Matrix([[0, 0], [0, 1]]),
    sympy.Matrix([[0, 1], [1, 0]]),
    sympy.Matrix([[0, sympy.I], [-sympy.I, 0]]),
)


def classify_D(tern, radial_powers=(0, 1, 2)):
    """Admissible corrections D_j = dhat(p0) p_j on a zero-helicity
    two-block tern.

    dhat ranges over Hermitian 2x2 matrices of radial functions; the
    constraints are Pi D = -D Pi and [Tau, D] = 0.  The radial
    dependence drops out of the constraints, which is confirmed by
    solving at several sampled radial monomials p0^t; returns the
    solution-space dimension (free radial functions) and a Hermitian
    matrix basis of the admissible dhat pattern.
    """
    if tern.spec.klass != "s" or tern.spec.m != 0 or not tern.complete:
        raise ValueError("classification applies to the complete "
                         "zero-helicity two-block terns")
    solution = None
    for t in radial_powers:
        radial = S(P0 ** t * P1, 2)
        ops = []
        for H in _HERMITIAN_BASIS:
            mat = OperatorExpr.matrix([[H[0, 0], H[0, 1]],
                                       [H[1, 0], H[1, 1]]])
            ops.append(compose(radial, mat))
        rows = []
        rows.extend(_linear_equations(
            [relation_residual(tern.pi, d, -1) for d in ops]))
        rows.extend(_linear_equations(
            [relation_residual(tern.tau, d, 1) for d in ops]))
        if not rows:
            rows = [[0, 0, 0, 0]]
        null = sympy.Matrix(rows).nullspace()
        basis = []
        for vec in null:
            mat = sympy.zeros(2, 2)
            for k, c in enumerate(vec):
                mat += c * _HERMITIAN_BASIS[k]
            basis.append(mat)
        if solution is None:
            solution = basis
        elif len(basis) != len(solution):
            raise RuntimeError("radial power %d changed the solution "
                               "space; the radial ansatz is unsound" % t)
    return len(solution), solution


# -- PDE systems and least-squares certificates -------------------------

@dataclass
class ResidualSystem:
    """A linear first-order PDE system L(d) = rhs in grid unknowns.

    equations is a list of (terms, rhs): each term is a triple
    (unknown index, RationalFn coefficient, axis) with axis in
    {1, 2, 3} for a first derivative and axis = 0 for a zeroth-order
    coupling.  All coefficients and right-hand sides must be
    real-valued fields.
    """

    name: str
    m: int
    unknowns: tuple
    equations: list = field(default_factory=list)
    notes: tuple = ()


def _spin_field(j, m):
    return rotation_field(j, m)


def transcribed_angular_system(m, d8_corrected=False):
    """The nine-equation angular system as printed in the source
    derivation (hand-transcribed).

    The eighth equation as printed reads p1 dd1/dp2 - p1 dd1/dp1 = d2,
    breaking the pattern of the others; with d8_corrected=True it is
    replaced by p1 dd1/dp2 - p2 dd1/dp1 = -d2, which is what the
    symbolic derivation (derive_angular_system) produces.
    """
    half_m = RationalFn.const(sympy.Rational(m, 2))
    A = _AXIS_SQ
    s1 = half_m * P2 * P3 / (P0 * A)
    s39 = half_m * P3 * P1 / (P0 * A)
    s34 = half_m * (P0 * P1 * P2 / (A * A) - P1 * P2 / (P0 * A))
    s5 = half_m * (P0 * P1 * P1 / (A * A) - P0 / A - P1 * P1 / (P0 * A))
    s7 = half_m * (P0 * P2 * P2 / (A * A) - P0 / A - P2 * P2 / (P0 * A))
    eqs = [
        ([(2, P3, 1), (2, -P1, 3), (0, ONE, 0)], s1),
        ([(2, P1, 2), (2, -P2, 1)], ratfn.ZERO),
        ([(1, P2, 3), (1, -P3, 2), (2, ONE, 0)], -s34),
        ([(0, P3, 1), (0, -P1, 3), (2, -ONE, 0)], -s34),
        ([(0, P2, 3), (0, -P3, 2)], -s5),
        ([(1, P1, 2), (1, -P2, 1), (0, -ONE, 0)], ratfn.ZERO),
        ([(1, P3, 1), (1, -P1, 3)], -s7),
        ([(0, P1, 2), (0, -P2, 1), (1, ONE, 0)], ratfn.ZERO)
        if d8_corrected else
        ([(0, P1, 2), (0, -P1, 1), (1, -ONE, 0)], ratfn.ZERO),
        ([(2, P2, 3), (2, -P3, 2), (1, -ONE, 0)], s39),
    ]
    return ResidualSystem("angular-transcribed", m, ("d1", "d2", "d3"),
                          eqs, notes=("d8_corrected=%s" % d8_corrected,))


_ANGULAR_ORDER = ((2, 3), (3, 3), (1, 2), (2, 1), (1, 1),
                  (3, 2), (2, 2), (3, 1), (1, 3))


def derive_angular_system(m, curl_rows=False):
    """Assemble the rotation-transport equations for the deviation
    fields d_k from symbolic commutators, without hand-copying.

    For each pair (j, k) the identity [J_j^(0), d_k] =
    i eps_{jkl} d_l - [spin_j, F_k] becomes, after multiplying by i, a
    real first-order equation for the d fields; the source commutator
    [spin_j, F_k] is computed by the operator algebra.  With
    curl_rows=True the mutual-commutation requirement on Q = F + d
    adds the constraints dd_b/dp_a - dd_a/dp_b = 0.
    """
    f = newton_wigner(1)
    eqs = []
    for j, k in _ANGULAR_ORDER:
        terms = []
        for (_, _, alpha, _), c in orbital_rotation(j).terms.items():
            if not any(alpha):
                continue
            axis = next(i + 1 for i, a in enumerate(alpha) if a)
            terms.append((k - 1, I * c, axis))
        hit = _eps(j, k)
        if hit is not None:
            sign, l = hit
            terms.append((l - 1, RationalFn.const(sign), 0))
        source = commutator(S(_spin_field(j, m)), f[k - 1])
        src = _mult_field(source)
        if src is None:
            raise RuntimeError("spin-position commutator is not a "
                               "multiplication operator")
        eqs.append((terms, -(I * src)))
    if curl_rows:
        for a, b in ((1, 2), (2, 3), (3, 1)):
            eqs.append(([(b - 1, ONE, a), (a - 1, -ONE, b)], ratfn.ZERO))
    name = "angular-derived" + ("+curl" if curl_rows else "")
    return ResidualSystem(name, m, ("d1", "d2", "d3"), eqs)


def parity_obstruction_system(m):
    """Why no block-diagonal space inversion exists at m != 0.

    Writing the candidate as a diagonal of unitary multiplication
    operators S_n, coefficient matching forces both S_n = 0 and
    p0 d(Im S_1)/dp_j = -2 k_j, p0 d(Im S_2)/dp_j = +2 k_j for
    j = 1, 2 -- an inconsistent inhomogeneous system once m != 0
    (a unimodular S_n cannot vanish).
    """
    eqs = []
    for n, sign in ((0, -1), (1, 1)):
        eqs.append(([(n, ONE, 0)], ratfn.ZERO))
        for j in (1, 2):
            rhs = RationalFn.const(2 * sign) * boost_field(j, m)
            eqs.append(([(n, P0, j)], rhs))
    return ResidualSystem("parity-obstruction", m,
                          ("ImS1", "ImS2"), eqs)


def unitary_tau_obstruction_system(m):
    """Why time reversal cannot be unitary at m != 0.

    The off-diagonal entries of a unitary candidate are forced to be
    phase fields e^{i theta}; the boost relations prescribe the theta
    gradient while the third rotation relation forces its angular
    derivative to vanish, which is inconsistent (the combination
    reduces to m p3/p0 = 0).
    """
    A = _AXIS_SQ
    mm = RationalFn.const(m)
    eqs = [
        ([(0, ONE, 1)], -mm * P2 * P3 / (A * P0)),
        ([(0, ONE, 2)], mm * P1 * P3 / (A * P0)),
        ([(0, P2, 1), (0, -P1, 2)], ratfn.ZERO),
    ]
    return ResidualSystem("unitaryT-obstruction", m, ("theta",), eqs)


def _mult_field(expr):
    """The coefficient c with expr = c * Id on a one-dimensional fiber."""
    if expr.is_zero():
        return ratfn.ZERO
    if expr.kappa or len(expr.terms) != 1:
        return None
    ((r, s, alpha, u), c), = expr.terms.items()
    if r or s or any(alpha) or u:
        return None
    return c


def build_system(name, m):
    if name == "angular":
        return transcribed_angular_system(m)
    if name == "angular-derived":
        return derive_angular_system(m, curl_rows=True)
    if name == "parity-obstruction":
        return parity_obstruction_system(m)
    if name == "unitaryT-obstruction":
        return unitary_tau_obstruction_system(m)
    raise ValueError("unknown system %r" % (name,))


# -- discretization -----------------------------------------------------

def _safe_mask(grid, radius):
    safe = grid.valid.copy()
    n = grid.n
    for axis in range(3):
        sl = [slice(None)] * 3
        sl[axis] = slice(0, radius)
        safe[tuple(sl)] = False
        sl[axis] = slice(n - radius, n)
        safe[tuple(sl)] = False
        for off in range(1, radius + 1):
            shifted = np.roll(grid.valid, off, axis=axis)
            safe &= shifted
            shifted = np.roll(grid.valid, -off, axis=axis)
            safe &= shifted
    return safe


_STENCILS = {"fd2": ((1, 0.5), (-1, -0.5)),
             "fd4": ((2, -1.0 / 12), (1, 8.0 / 12),
                     (-1, -8.0 / 12), (-2, 1.0 / 12))}


def assemble(system, grid, scheme="fd2"):
    """Sparse least-squares matrix and right-hand side for a system.

    Unknowns live on all valid nodes; equations are written only on
    safe nodes (full stencil inside the valid set).  Returns
    (A, b, meta) with meta carrying the node bookkeeping.
    """
    stencil = _STENCILS[scheme]
    radius = max(abs(o) for o, _ in stencil)
    valid = grid.valid
    nvalid = int(valid.sum())
    index = -np.ones(grid.shape, dtype=np.int64)
    index[valid] = np.arange(nvalid)
    safe = _safe_mask(grid, radius)
    nsafe = int(safe.sum())
    srow = np.arange(nsafe)
    nuk = len(system.unknowns)
    rows, cols, vals = [], [], []
    bparts = []
    fields = (grid.p1, grid.p2, grid.p3, grid.p0)
    for eq_no, (terms, rhs) in enumerate(system.equations):
        base = eq_no * nsafe
        for u, coeff, axis in terms:
            cvals = np.real(coeff.evaluate(*fields)[safe])
            if axis == 0:
                rows.append(base + srow)
                cols.append(u * nvalid + index[safe])
                vals.append(cvals)
            else:
                ax = axis - 1
                for off, w in stencil:
                    neigh = np.roll(index, -off, axis=ax)
                    rows.append(base + srow)
                    cols.append(u * nvalid + neigh[safe])
                    vals.append(cvals * (w / grid.h))
        if rhs.is_zero():
            bparts.append(np.zeros(nsafe))
        else:
            bparts.append(np.real(rhs.evaluate(*fields)[safe]))
    a_mat = scipy.sparse.coo_matrix(
        (np.concatenate(vals),
         (np.concatenate(rows), np.concatenate(cols))),
        shape=(len(system.equations) * nsafe, nuk * nvalid)).tocsr()
    b = np.concatenate(bparts)
    meta = {"nvalid": nvalid, "nsafe": nsafe, "index": index,
            "safe": safe, "grid": grid}
    return a_mat, b, meta


def pack_fields(meta, arrays):
    """Stack nodewise unknown fields into a least-squares vector."""
    return np.concatenate([np.asarray(a)[meta["grid"].valid]
                           for a in arrays])


def system_residual(system, grid, arrays, scheme="fd2"):
    """Per-equation and total L2 residual norms for given fields."""
    a_mat, b, meta = assemble(system, grid, scheme)
    r = a_mat @ pack_fields(meta, arrays) - b
    nsafe = meta["nsafe"]
    scale = grid.h ** 1.5
    per_eq = [float(np.linalg.norm(r[k * nsafe:(k + 1) * nsafe]) * scale)
              for k in range(len(system.equations))]
    return per_eq, float(np.linalg.norm(r) * scale)


def certify_no_solution(system_or_name, m=None, grid=None, scheme="fd2",
                        refinements=1, zero_tol=1e-10,
                        stability_tol=0.20, iter_lim=None):
    """Least-squares no-solution certificate with grid refinement.

    Returns a dict with r* per grid, the refinement ratio and a
    verdict: "solvable" when r* is at rounding level, "inconsistent"
    when r* stays bounded away from zero and moves less than
    stability_tol under refinement, otherwise "inconclusive".
    """
    if isinstance(system_or_name, str):
        system = build_system(system_or_name, m)
    else:
        system = system_or_name
    if grid is None:
        grid = MomentumGrid(h=0.25)
    r_stars = []
    grids = []
    g = grid
    for _ in range(refinements + 1):
        a_mat, b, _ = assemble(system, g, scheme)
        bnorm = np.linalg.norm(b)
        if bnorm == 0.0:
            r_stars.append(0.0)
        else:
            # no atol/btol stopping: let the residual norm reach its
            # floor.  The iteration cap costs only ~1e-3 relative in
            # r* (the residual plateaus long before the normal-equation
            # criteria trigger) and keeps refined grids affordable.
            sol = scipy.sparse.linalg.lsqr(
                a_mat, b, atol=0, btol=0, conlim=0,
                iter_lim=iter_lim or 3000)
            r_stars.append(float(sol[3]) / float(bnorm))
        grids.append({"h": g.h, "rows": a_mat.shape[0],
                      "cols": a_mat.shape[1]})
        g = g.refined()
    ratio = (abs(r_stars[-1] - r_stars[0]) / r_stars[0]
             if r_stars[0] > 0 else 0.0)
    if r_stars[-1] <= zero_tol:
        verdict = "solvable"
    elif all(r > zero_tol for r in r_stars) and ratio < stability_tol:
        verdict = "inconsistent"
    else:
        verdict = "inconclusive"
    return {"schema": 1, "system": system.name, "m": system.m,
            "scheme": scheme, "grid": grids, "r_star": r_stars,
            "refinement_ratio": ratio, "verdict": verdict}


# -- radial reduction checks -------------------------------------------

def zeta_reduction(d_arrays, m, grid, scheme="fd2"):
    """Residuals of the three angular equations satisfied by
    zeta = p . d, the contraction used to reach the final
    contradiction m p0/(2 p1) = 0.
    """
    zeta = (grid.p1 * d_arrays[0] + grid.p2 * d_arrays[1]
            + grid.p3 * d_arrays[2])
    dz = [_derivative(zeta, ax, grid.h, scheme) for ax in range(3)]
    A = grid.p1 ** 2 + grid.p2 ** 2
    half_m = 0.5 * m
    res = [
        grid.p2 * dz[2] - grid.p3 * dz[1] - half_m * grid.p1 * grid.p0 / A,
        grid.p3 * dz[0] - grid.p1 * dz[2] - half_m * grid.p2 * grid.p0 / A,
        grid.p1 * dz[1] - grid.p2 * dz[0],
    ]
    radius = max(abs(o) for o, _ in _STENCILS[scheme])
    safe = _safe_mask(grid, radius)
    scale = grid.h ** 1.5
    return [float(np.linalg.norm(r[safe]) * scale) for r in res]


def position_residual_harness(m, grid=None, scheme="fd2", refinements=1):
    """End-to-end nonlocalizability verdict for helicity parameter m.

    Derives the angular system symbolically, compares it term-by-term
    with the hand-transcribed list (differences are reported, not
    silently adopted), appends the mutual-commutation curl rows, and
    runs the no-solution certificate.  m = 0 yields a homogeneous,
    solvable system.
    """
    derived = derive_angular_system(m, curl_rows=False)
    transcribed = transcribed_angular_system(m)
    corrected = transcribed_angular_system(m, d8_corrected=True)
    comparison = []
    for idx, ((dt, dr), (tt, tr), (ct, cr)) in enumerate(
            zip(derived.equations, transcribed.equations,
                corrected.equations)):
        hom_match = _terms_equal(dt, tt)
        hom_match_corr = _terms_equal(dt, ct)
        src_match = (dr - tr).is_zero()
        comparison.append({
            "equation": idx + 1,
            "homogeneous_matches_transcription": hom_match,
            "homogeneous_matches_corrected": hom_match_corr,
            "source_matches_transcription": src_match,
            "derived_source": str(dr),
            "transcribed_source": str(tr),
        })
    full = derive_angular_system(m, curl_rows=True)
    if grid is None:
        # this system needs one level more than the default certificate
        # grid before r* settles (refinement drift 8% versus 21%)
        grid = MomentumGrid(h=0.125)
    cert = certify_no_solution(full, grid=grid, scheme=scheme,
                               refinements=refinements)
    verdict = ("no position operator" if m != 0
               and cert["verdict"] == "inconsistent"
               else "localizable" if cert["verdict"] == "solvable"
               else "inconclusive")
    return {"schema": 1, "m": m, "comparison": comparison,
            "certificate": cert, "verdict": verdict}


def _terms_equal(terms_a, terms_b):
    def norm(terms):
        out = {}
        for u, c, ax in terms:
            key = (u, ax)
            out[key] = out.get(key, ratfn.ZERO) + c
        return {k: v for k, v in out.items() if not v.is_zero()}

    return norm(terms_a) == norm(terms_b)
