"""Exact arithmetic for momentum-space coefficient functions.

A :class:`RationalFn` is a complex-rational function of the momentum
components (p1, p2, p3) and the energy symbol p0, where p0 is tied to the
momenta by the mass-shell relation

    p0**2 = p1**2 + p2**2 + p3**2        (p0 = |p| > 0)

All arithmetic is exact (Gaussian-rational coefficients, no floats).
Every value is kept in a normal form:

* numerator and denominator are polynomials reduced so their p0-degree
  is at most 1 (p0**2 is rewritten via the shell relation),
* the denominator is p0-free (a factor A + B*p0 is rationalized away by
  multiplying with its conjugate A - B*p0),
* numerator and denominator are coprime and the denominator is monic.

With these conventions the normal form is unique, so equality and
hashing are structural.  Zero-testing is sound on the open cone
p0 = |p| > 0: a reduced polynomial A(p) + B(p)*p0 vanishes there iff
A = B = 0, because p0 is irrational over the polynomial ring.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import sympy
from sympy import QQ_I
from sympy.polys.rings import ring

_RING, _p1, _p2, _p3, _p0 = ring("p1,p2,p3,p0", QQ_I)
_DOM = _RING.domain
_SHELL = _p1**2 + _p2**2 + _p3**2  # p0**2 reduces to this
_GENS = (_p1, _p2, _p3)

_VAR_NAMES = ("p1", "p2", "p3", "p0")


class DivisionByZeroFunction(ZeroDivisionError):
    """Raised when dividing by the identically-zero function."""


@lru_cache(maxsize=64)
def _shell_pow(k):
    return _SHELL**k


def _reduce(poly):
    """Rewrite p0**k with k >= 2 using the shell relation."""
    if poly.degree(_p0) <= 1:
        return poly
    out = _RING.zero
    for monom, coeff in poly.iterterms():
        e1, e2, e3, e0 = monom
        if e0 <= 1:
            out += _RING.from_dict({monom: coeff})
        else:
            base = _RING.from_dict({(e1, e2, e3, e0 % 2): coeff})
            out += base * _shell_pow(e0 // 2)
    return out


def _coeff_conj(c):
    """Conjugate of a QQ_I domain element."""
    return _DOM.new(c.x, -c.y)


def _poly_conj(poly):
    return _RING.from_dict({m: _coeff_conj(c) for m, c in poly.iterterms()})


def _poly_parity(poly):
    """Substitute pj -> -pj (j = 1, 2, 3); p0 = |p| is even."""
    out = {}
    for monom, coeff in poly.iterterms():
        e1, e2, e3, e0 = monom
        if (e1 + e2 + e3) % 2:
            coeff = -coeff
        out[monom] = coeff
    return _RING.from_dict(out)


def _split_p0(poly):
    """Write a reduced polynomial as (A, B) with poly = A + B*p0."""
    a, b = {}, {}
    for monom, coeff in poly.iterterms():
        e1, e2, e3, e0 = monom
        if e0 == 0:
            a[monom] = coeff
        else:
            b[(e1, e2, e3, 0)] = coeff
    return _RING.from_dict(a), _RING.from_dict(b)


def _to_domain(value):
    """Coerce a scalar (int, Fraction, sympy number, i-multiples) to QQ_I."""
    if isinstance(value, int):
        return _DOM.convert(value)
    if isinstance(value, Fraction):
        return _DOM.convert(sympy.Rational(value.numerator, value.denominator))
    if isinstance(value, complex):
        re = sympy.Rational(value.real)
        im = sympy.Rational(value.imag)
        return _DOM.convert(re + im * sympy.I)
    return _DOM.convert(sympy.sympify(value))


class RationalFn:
    """Immutable exact rational function on the mass shell."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, _normalized=False):
        if den is None:
            den = _RING.one
        if _normalized:
            self.num, self.den = num, den
        else:
            self.num, self.den = _normalize(num, den)
        self._hash = None

    # -- constructors -------------------------------------------------

    @staticmethod
    def const(value):
        """Constant function from an exact scalar (int, Fraction, a*i, ...)."""
        return RationalFn(_RING.from_dict({(0, 0, 0, 0): _to_domain(value)}))

    @staticmethod
    def from_sympy(expr):
        """Build from a sympy expression in p1, p2, p3, p0 and I."""
        expr = sympy.together(sympy.sympify(expr))
        num, den = expr.as_numer_denom()
        syms = [sympy.Symbol(n) for n in _VAR_NAMES]
        pn = sympy.Poly(num, *syms, domain=QQ_I)
        pd = sympy.Poly(den, *syms, domain=QQ_I)
        return RationalFn(_RING.from_dict(dict(pn.rep.to_dict())),
                          _RING.from_dict(dict(pd.rep.to_dict())))

    @staticmethod
    def from_string(text):
        """Parse e.g. '(1/2)*p1*p0/(p1**2 + p2**2)' or 'i*p3'."""
        expr = sympy.sympify(text.replace("i*", "I*").replace("^", "**"),
                             locals={"i": sympy.I})
        return RationalFn.from_sympy(expr)

    # -- predicates ---------------------------------------------------

    def is_zero(self):
        return not self.num

    def is_constant(self):
        return self.den == _RING.one and self.num.degree(_p1) <= 0 \
            and self.num.degree(_p2) <= 0 and self.num.degree(_p3) <= 0 \
            and self.num.degree(_p0) <= 0

    def constant_value(self):
        """The value as a sympy number; requires is_constant()."""
        if self.is_zero():
            return sympy.Integer(0)
        if not self.is_constant():
            raise ValueError("not a constant: %s" % self)
        coeff = dict(self.num.iterterms())[(0, 0, 0, 0)]
        return _DOM.to_sympy(coeff)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        num = _reduce(self.num * other.den + other.num * self.den)
        return RationalFn(num, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            return self + (-_coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        try:
            return _coerce(other) - self
        except TypeError:
            return NotImplemented

    def __neg__(self):
        return RationalFn(-self.num, self.den, _normalized=True)

    def __mul__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return RationalFn(_reduce(self.num * other.num), self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        if other.is_zero():
            raise DivisionByZeroFunction("division by the zero function")
        return self * other.inverse()

    def __rtruediv__(self, other):
        try:
            return _coerce(other) / self
        except TypeError:
            return NotImplemented

    def __pow__(self, exp):
        if not isinstance(exp, int):
            return NotImplemented
        if exp < 0:
            return self.inverse() ** (-exp)
        out = ONE
        for _ in range(exp):
            out = out * self
        return out

    def inverse(self):
        if self.is_zero():
            raise DivisionByZeroFunction("inverse of the zero function")
        a, b = _split_p0(self.num)
        if not b:
            return RationalFn(self.den, a)
        # 1/(A + B p0) = (A - B p0) / (A^2 - B^2 (p1^2+p2^2+p3^2))
        conj = a - b * _p0
        return RationalFn(self.den * conj, _reduce(a * a - b * b * _SHELL))

    def diff(self, j):
        """Partial derivative along pj with the chain rule dp0/dpj = pj/p0."""
        if j not in (1, 2, 3):
            raise ValueError("axis index must be 1, 2 or 3")
        dn, dd = _poly_diff(self.num, j)
        en, ed = _poly_diff(self.den, j)
        # (n/d)' = (n' d - n d') / d^2, with the chain-rule fractions folded in
        num = _reduce(dn * ed * self.den - self.num * en * dd)
        den = dd * ed * self.den * self.den
        return RationalFn(num, den)

    def parity(self):
        """Substitution pj -> -pj; p0 is fixed."""
        return RationalFn(_poly_parity(self.num), _poly_parity(self.den))

    def conjugate(self):
        """Complex-conjugate all coefficients; momentum symbols are fixed."""
        return RationalFn(_poly_conj(self.num), _poly_conj(self.den))

    # -- comparisons / hashing ---------------------------------------

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except (TypeError, ValueError, sympy.SympifyError):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(sorted(self.num.iterterms())),
                               tuple(sorted(self.den.iterterms()))))
        return self._hash

    # -- numerics -----------------------------------------------------

    def evaluate(self, P1, P2, P3, P0):
        """Evaluate on numpy arrays (or scalars) of momentum samples."""
        return (_poly_eval(self.num, P1, P2, P3, P0)
                / _poly_eval(self.den, P1, P2, P3, P0))

    # -- rendering ----------------------------------------------------

    def __str__(self):
        if self.is_zero():
            return "0"
        num = _poly_str(self.num)
        if self.den == _RING.one:
            return num
        return "(%s)/(%s)" % (num, _poly_str(self.den))

    def __repr__(self):
        return "RationalFn(%s)" % self


_SCALARS = (int, Fraction, complex, sympy.Basic)


def _coerce(value):
    if isinstance(value, RationalFn):
        return value
    if not isinstance(value, _SCALARS):
        raise TypeError("cannot treat %r as a scalar" % type(value))
    return RationalFn.const(value)


def _normalize(num, den):
    num = _reduce(num)
    den = _reduce(den)
    if not den:
        raise DivisionByZeroFunction("zero denominator")
    if not num:
        return _RING.zero, _RING.one
    a, b = _split_p0(den)
    if b:
        conj = a - b * _p0
        num = _reduce(num * conj)
        den = _reduce(a * a - b * b * _SHELL)
    g = num.gcd(den)
    if g != _RING.one:
        num = num.quo(g)
        den = den.quo(g)
    lc = den.LC
    if lc != _DOM.one:
        inv = _DOM.one / lc
        num = num.mul_ground(inv)
        den = den.mul_ground(inv)
    return num, den


def _poly_diff(poly, j):
    """d(poly)/dpj with chain rule, as a (numerator, denominator) pair.

    For poly = A + B*p0 the derivative is
    dA/dpj + (dB/dpj)*p0 + B*pj*p0/shell, returned over denominator shell
    (or 1 when no p0 term is present).
    """
    gen = _GENS[j - 1]
    a, b = _split_p0(poly)
    plain = a.diff(gen) + b.diff(gen) * _p0
    if not b:
        return plain, _RING.one
    return _reduce(plain * _SHELL + b * gen * _p0), _SHELL


def _poly_eval(poly, P1, P2, P3, P0):
    total = 0
    for (e1, e2, e3, e0), coeff in poly.iterterms():
        c = complex(Fraction(coeff.x.numerator, coeff.x.denominator)) \
            + 1j * complex(Fraction(coeff.y.numerator, coeff.y.denominator))
        total = total + c * P1**e1 * P2**e2 * P3**e3 * P0**e0
    return total


def _monom_key(item):
    (e1, e2, e3, e0), _ = item
    # graded lex in p1, p2, p3, then p0-degree; highest first
    return (-(e1 + e2 + e3), -e1, -e2, -e3, -e0)


def _coeff_str(coeff):
    return str(_DOM.to_sympy(coeff)).replace("I", "i").replace(" ", "")


def _poly_str(poly):
    parts = []
    for monom, coeff in sorted(poly.iterterms(), key=_monom_key):
        factors = []
        for name, exp in zip(_VAR_NAMES, monom):
            if exp == 1:
                factors.append(name)
            elif exp > 1:
                factors.append("%s^%d" % (name, exp))
        cs = _coeff_str(coeff)
        if factors:
            body = "*".join(factors)
            if cs == "1":
                term = body
            elif cs == "-1":
                term = "-" + body
            else:
                term = "(%s)*%s" % (cs, body) if ("+" in cs or "-" in cs[1:]) \
                    else "%s*%s" % (cs, body)
        else:
            term = cs if not ("+" in cs or "-" in cs[1:]) else "(%s)" % cs
        parts.append(term)
    out = parts[0]
    for term in parts[1:]:
        out += " - " + term[1:] if term.startswith("-") else " + " + term
    return out


# Shared atoms
ZERO = RationalFn(_RING.zero)
ONE = RationalFn(_RING.one)
I = RationalFn.const(sympy.I)
P0 = RationalFn(_p0)
P1 = RationalFn(_p1)
P2 = RationalFn(_p2)
P3 = RationalFn(_p3)
PJ = (P1, P2, P3)
SHELL = RationalFn(_SHELL)  # p1^2 + p2^2 + p3^2 == p0^2 on shell
