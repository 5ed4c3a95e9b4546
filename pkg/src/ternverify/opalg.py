"""Noncommutative algebra of (anti)linear operators on fiber-valued
momentum-space wavefunctions.

An operator is a finite sum of terms, each in the canonical factor order

    E_rs . c(p) . d1^a1 d2^a2 d3^a3 . Y^u . K^k

where E_rs is a fiber matrix unit, c a RationalFn coefficient, dj the
partial derivative along pj (with the on-shell chain rule), Y the parity
substitution (Yf)(p) = f(-p) and K pointwise complex conjugation.  The
conjugation flag k is homogeneous across an expression: every operator
here is either linear (kappa = 0) or antilinear (kappa = 1), mirroring
unitary versus antiunitary symmetries.

Composition normal-orders products with the rewrite rules

    dj . c = c . dj + (dj c)          (Leibniz)
    Y . c  = parity(c) . Y            Y . dj = -dj . Y
    K . c  = conj(c) . K              K . dj = dj . K
    Y^2 = K^2 = Id

Equality of operators is equality of normal forms, with the exact
RationalFn zero test at the leaves.
"""

from __future__ import annotations

from math import comb

from . import ratfn
from .ratfn import ONE, RationalFn

_ZERO_ALPHA = (0, 0, 0)


class KappaMismatch(ValueError):
    """Sum of a linear and an antilinear operator was requested."""


class FiberMismatch(ValueError):
    """Operands act on different fiber dimensions."""


def _coerce_fn(value):
    if isinstance(value, RationalFn):
        return value
    return RationalFn.const(value)


class OperatorExpr:
    """Immutable normal-form operator.

    terms maps a signature (row, col, deriv multi-index, upsilon flag)
    to its nonzero RationalFn coefficient.  Rows and columns are
    0-based; scalar operators live at fiber dimension 1.
    """

    __slots__ = ("dim", "kappa", "terms", "_hash")

    def __init__(self, dim, kappa, terms):
        self.dim = dim
        self.kappa = kappa & 1
        self.terms = {sig: c for sig, c in terms.items() if not c.is_zero()}
        self._hash = None

    # -- elementary constructors --------------------------------------

    @staticmethod
    def zero(dim=1, kappa=0):
        return OperatorExpr(dim, kappa, {})

    @staticmethod
    def identity(dim=1):
        return OperatorExpr(dim, 0, {(r, r, _ZERO_ALPHA, 0): ONE
                                     for r in range(dim)})

    @staticmethod
    def scalar(fn, dim=1):
        """Multiplication operator fn * Id."""
        fn = _coerce_fn(fn)
        return OperatorExpr(dim, 0, {(r, r, _ZERO_ALPHA, 0): fn
                                     for r in range(dim)})

    @staticmethod
    def deriv(j, dim=1):
        if j not in (1, 2, 3):
            raise ValueError("derivative axis must be 1, 2 or 3")
        alpha = tuple(1 if k == j else 0 for k in (1, 2, 3))
        return OperatorExpr(dim, 0, {(r, r, alpha, 0): ONE
                                     for r in range(dim)})

    @staticmethod
    def parity(dim=1):
        return OperatorExpr(dim, 0, {(r, r, _ZERO_ALPHA, 1): ONE
                                     for r in range(dim)})

    @staticmethod
    def conj(dim=1):
        return OperatorExpr(dim, 1, {(r, r, _ZERO_ALPHA, 0): ONE
                                     for r in range(dim)})

    @staticmethod
    def matrix(rows, kappa=0):
        """Constant fiber matrix; entries are exact scalars or RationalFn."""
        dim = len(rows)
        terms = {}
        for r, row in enumerate(rows):
            if len(row) != dim:
                raise ValueError("matrix must be square")
            for s, entry in enumerate(row):
                fn = _coerce_fn(entry)
                if not fn.is_zero():
                    terms[(r, s, _ZERO_ALPHA, 0)] = fn
        return OperatorExpr(dim, kappa, terms)

    @staticmethod
    def block_diag(blocks):
        """Assemble scalar (dim-1) operators into one diagonal operator."""
        kappas = {b.kappa for b in blocks}
        if len(kappas) > 1:
            raise KappaMismatch("blocks mix linear and antilinear parts")
        dim = len(blocks)
        terms = {}
        for r, block in enumerate(blocks):
            if block.dim != 1:
                raise FiberMismatch("block_diag expects scalar blocks")
            for (_, _, alpha, u), c in block.terms.items():
                terms[(r, r, alpha, u)] = c
        return OperatorExpr(dim, kappas.pop() if kappas else 0, terms)

    # -- linear structure ---------------------------------------------

    def __add__(self, other):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        if self.dim != other.dim:
            raise FiberMismatch("fiber dimensions %d and %d"
                                % (self.dim, other.dim))
        if self.terms and other.terms and self.kappa != other.kappa:
            raise KappaMismatch("cannot add linear and antilinear operators")
        kappa = self.kappa if self.terms else other.kappa
        terms = dict(self.terms)
        for sig, c in other.terms.items():
            acc = terms.get(sig)
            terms[sig] = c if acc is None else acc + c
        return OperatorExpr(self.dim, kappa, terms)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return OperatorExpr(self.dim, self.kappa,
                            {sig: -c for sig, c in self.terms.items()})

    def __mul__(self, factor):
        """Left multiplication by an exact scalar function."""
        if isinstance(factor, OperatorExpr):
            return NotImplemented
        fn = _coerce_fn(factor)
        return OperatorExpr(self.dim, self.kappa,
                            {sig: fn * c for sig, c in self.terms.items()})

    __rmul__ = __mul__

    # -- composition --------------------------------------------------

    def __matmul__(self, other):
        return compose(self, other)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        if self.dim != other.dim or self.terms != other.terms:
            return False
        return self.kappa == other.kappa or not self.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, self.kappa if self.terms else 0,
                               frozenset(self.terms.items())))
        return self._hash

    # -- rendering ----------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (r, s, alpha, u) in sorted(self.terms):
            c = self.terms[(r, s, alpha, u)]
            factors = []
            if self.dim > 1:
                factors.append("E%d%d" % (r + 1, s + 1))
            cs = str(c)
            if cs != "1" or not (any(alpha) or u or self.dim > 1):
                factors.append(cs if cs.isalnum() else "(%s)" % cs)
            for j, a in zip((1, 2, 3), alpha):
                if a == 1:
                    factors.append("d%d" % j)
                elif a > 1:
                    factors.append("d%d^%d" % (j, a))
            if u:
                factors.append("Y")
            parts.append("*".join(factors))
        out = " + ".join(parts)
        if self.kappa:
            out = "(%s)*K" % out if len(parts) > 1 else out + "*K"
        return out

    def __repr__(self):
        return "OperatorExpr<dim=%d>(%s)" % (self.dim, self)


def _diff_multi(fn, gamma):
    for j, g in zip((1, 2, 3), gamma):
        for _ in range(g):
            fn = fn.diff(j)
    return fn


def _leibniz(alpha, fn):
    """Normal-order d^alpha . fn as a list of (coeff, remaining deriv)."""
    out = [(fn, _ZERO_ALPHA)]
    for j, a in zip((1, 2, 3), alpha):
        if not a:
            continue
        nxt = []
        for c, beta in out:
            derivs = [c]
            for _ in range(a):
                derivs.append(derivs[-1].diff(j))
            for k in range(a + 1):
                rem = list(beta)
                rem[j - 1] += a - k
                coeff = derivs[k]
                if k:
                    coeff = coeff * comb(a, k)
                nxt.append((coeff, tuple(rem)))
        out = nxt
    return out


def compose(a, b):
    """Operator product a . b in normal form."""
    if a.dim != b.dim:
        raise FiberMismatch("fiber dimensions %d and %d" % (a.dim, b.dim))
    kappa = a.kappa ^ b.kappa
    terms = {}
    bterms = b.terms
    if a.kappa:
        bterms = {sig: c.conjugate() for sig, c in bterms.items()}
    for (r1, s1, alpha, u1), c1 in a.terms.items():
        for (r2, s2, beta, u2), c2 in bterms.items():
            if s1 != r2:
                continue
            if u1:
                c2 = c2.parity()
                if sum(beta) % 2:
                    c2 = -c2
            for dcoeff, rem in _leibniz(alpha, c2):
                if dcoeff.is_zero():
                    continue
                gamma = tuple(x + y for x, y in zip(rem, beta))
                sig = (r1, s2, gamma, u1 ^ u2)
                coeff = c1 * dcoeff
                acc = terms.get(sig)
                terms[sig] = coeff if acc is None else acc + coeff
    return OperatorExpr(a.dim, kappa, terms)


def commutator(a, b):
    """a b - b a for linear operators."""
    if a.kappa or b.kappa:
        raise KappaMismatch("commutator expects linear operators; "
                            "use relation_residual for antilinear factors")
    return compose(a, b) - compose(b, a)


def anticommutator(a, b):
    return compose(a, b) + compose(b, a)


def relation_residual(a, b, sign):
    """a b - sign * b a; zero iff the (anti)commutation relation holds."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    ab = compose(a, b)
    ba = compose(b, a)
    return ab - ba if sign == 1 else ab + ba


# Adjoint of dj under the invariant measure d^3p / p0
_DJ_ADJ_WEIGHT = tuple(pj / (ratfn.P0 ** 2) for pj in ratfn.PJ)


def formal_adjoint(a):
    """Formal adjoint under <phi, psi> = integral conj(phi) psi d^3p/p0.

    Rules: dj* = -dj + pj/p0^2, c* = conj(c), matrix* = conjugate
    transpose, Y* = Y.  Defined for linear operators only.
    """
    if a.kappa:
        raise KappaMismatch("formal adjoint of an antilinear operator "
                            "is not defined here")
    dim = a.dim
    out = OperatorExpr.zero(dim)
    for (r, s, alpha, u), c in a.terms.items():
        acc = OperatorExpr(dim, 0, {(s, r, _ZERO_ALPHA, 0): c.conjugate()})
        for j, power in zip((1, 2, 3), alpha):
            if power:
                dj_adj = (-OperatorExpr.deriv(j, dim)
                          + OperatorExpr.scalar(_DJ_ADJ_WEIGHT[j - 1], dim))
                for _ in range(power):
                    acc = compose(dj_adj, acc)
        if u:
            acc = compose(OperatorExpr.parity(dim), acc)
        out = out + acc
    return out


def is_self_adjoint(a):
    return formal_adjoint(a) == a
