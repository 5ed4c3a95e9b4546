"""Catalog of massless-particle symmetry terns.

A tern bundles the ten Poincare generators (P0, P1..P3, J1..J3, K1..K3)
acting on fiber-valued wavefunctions over the light cone, together with
a space-inversion operator Pi and a time-reversal operator Tau, each of
which may be linear or antilinear.  Three spectral classes occur,
labelled by the sign pattern of the energy operator's diagonal blocks:

    u  --  all blocks +p0
    d  --  all blocks -p0
    s  --  both signs present

The helicity of a block is half the integer parameter m carried by the
momentum-dependent correction fields attached to J and K.  For u and d
classes a complete tern exists only at m = 0; nonzero m yields a
generators-only bundle (no admissible Pi, Tau), which is still useful
for obstruction certificates.  The s class carries six complete terns
at m = 0 and two (one per Pi-square sign) for every nonzero m, plus
three hand-picked reducible-U constructions kept as named examples.

Expected constants stored on each tern (helicity per block, the signs
of Pi^2 and Tau^2, the phase omega in Pi Tau = omega Tau Pi) were
derived by independent composition by hand; the verification suites
recompute all of them from the operators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import ratfn
from .ratfn import I, ONE, P0, P1, P2, P3, PJ, RationalFn
from .opalg import OperatorExpr, compose

S = OperatorExpr.scalar

_CATALOG_MS = (1, -1, 2, -2, 4, -4)
_COMBOS = ("UU", "AU", "AA")


# -- scalar generator fields --------------------------------------------

def orbital_rotation(j):
    """J_j without helicity corrections, -i (p_k d_l - p_l d_k)."""
    k, l = ((2, 3), (3, 1), (1, 2))[j - 1]
    return (-I) * (compose(S(PJ[k - 1]), OperatorExpr.deriv(l))
                   - compose(S(PJ[l - 1]), OperatorExpr.deriv(k)))


def orbital_boost(j):
    """K_j without helicity corrections, i p0 d_j."""
    return I * compose(S(P0), OperatorExpr.deriv(j))


def rotation_field(j, m):
    """The helicity-m correction to J_j (a multiplication operator)."""
    half_m = RationalFn.const(Fraction(m, 2))
    axis_sq = P1 * P1 + P2 * P2
    if j == 1:
        return half_m * P1 * P0 / axis_sq
    if j == 2:
        return half_m * P2 * P0 / axis_sq
    if j == 3:
        return ratfn.ZERO
    raise ValueError("axis index must be 1, 2 or 3")


def boost_field(j, m):
    """The helicity-m correction to K_j (a multiplication operator)."""
    half_m = RationalFn.const(Fraction(m, 2))
    axis_sq = P1 * P1 + P2 * P2
    if j == 1:
        return -half_m * P2 * P3 / axis_sq
    if j == 2:
        return half_m * P3 * P1 / axis_sq
    if j == 3:
        return ratfn.ZERO
    raise ValueError("axis index must be 1, 2 or 3")


def scalar_block(klass, m):
    """One irreducible block of generators on a single fiber component.

    Returns (p0, (p1, p2, p3), (j1, j2, j3), (k1, k2, k3)) as scalar
    operators; klass "u" has energy +p0, klass "d" has energy -p0 and
    the boost sign flipped.
    """
    if klass not in ("u", "d"):
        raise ValueError("block class must be 'u' or 'd'")
    sign = 1 if klass == "u" else -1
    p0 = S(P0) * sign
    ps = tuple(S(pj) for pj in PJ)
    js = tuple(orbital_rotation(j) + S(rotation_field(j, m))
               for j in (1, 2, 3))
    ks = tuple((orbital_boost(j) + S(boost_field(j, m))) * sign
               for j in (1, 2, 3))
    return p0, ps, js, ks


# -- tern records -------------------------------------------------------

@dataclass(frozen=True)
class TernSpec:
    """Identity of a catalog entry; renders as e.g. "s:m=2:AA:+1"."""

    klass: str                      # "u", "d" or "s"
    m: int
    combo: Optional[str] = None     # "UU", "AU", "AA" or None
    variant: Optional[int] = None   # sign selecting the Pi matrix
    family: str = "irreducible"

    def label(self):
        if self.family not in ("irreducible", "generators-only"):
            return self.family
        parts = ["%s:m=%d" % (self.klass, self.m)]
        if self.combo is not None:
            parts.append(self.combo)
            parts.append("%+d" % self.variant)
        if self.family == "generators-only":
            parts.append("generators-only")
        return ":".join(parts)

    def __str__(self):
        return self.label()


@dataclass(frozen=True)
class Tern:
    """A complete tern, or a generators-only bundle when pi/tau is None."""

    spec: TernSpec
    dim: int
    p0: OperatorExpr
    p: tuple
    j: tuple
    k: tuple
    pi: Optional[OperatorExpr]
    tau: Optional[OperatorExpr]
    expected: dict = field(default_factory=dict, compare=False)

    @property
    def complete(self):
        return self.pi is not None and self.tau is not None

    def generators(self):
        """The ten named generators in a fixed order."""
        named = [("P0", self.p0)]
        named += [("P%d" % (i + 1), g) for i, g in enumerate(self.p)]
        named += [("J%d" % (i + 1), g) for i, g in enumerate(self.j)]
        named += [("K%d" % (i + 1), g) for i, g in enumerate(self.k)]
        return named

    def generator(self, name):
        for n, g in self.generators():
            if n == name:
                return g
        raise KeyError(name)


def _assemble(blocks):
    """Stack scalar generator blocks into diagonal fiber operators."""
    p0 = OperatorExpr.block_diag([b[0] for b in blocks])
    ps = tuple(OperatorExpr.block_diag([b[1][i] for b in blocks])
               for i in range(3))
    js = tuple(OperatorExpr.block_diag([b[2][i] for b in blocks])
               for i in range(3))
    ks = tuple(OperatorExpr.block_diag([b[3][i] for b in blocks])
               for i in range(3))
    return p0, ps, js, ks


def _expected(helicity, pi_sq, tau_sq, omega, p0_signs):
    return {"helicity": tuple(Fraction(h) for h in helicity),
            "pi_square": pi_sq, "tau_square": tau_sq, "omega": omega,
            "p0_signs": tuple(p0_signs)}


# -- builders -----------------------------------------------------------

def build_irreducible(klass, m):
    """Single-block tern of class u or d.

    At m = 0 the result is complete, with Pi the parity substitution and
    Tau its composition with conjugation.  At m != 0 no space-inversion
    or time-reversal operator exists on one block; the bundle is
    returned generators-only.
    """
    p0, ps, js, ks = scalar_block(klass, m)
    sign = 1 if klass == "u" else -1
    if m == 0:
        pi = OperatorExpr.parity()
        tau = compose(OperatorExpr.conj(), OperatorExpr.parity())
        spec = TernSpec(klass, 0)
        exp = _expected((0,), 1, 1, 1, (sign,))
    else:
        pi = tau = None
        spec = TernSpec(klass, m, family="generators-only")
        exp = _expected((Fraction(m, 2),), None, None, None, (sign,))
    return Tern(spec, 1, p0, ps, js, ks, pi, tau, exp)


def build_s_zero(combo, variant):
    """Two-block zero-helicity tern of class s (energy signs +, -)."""
    if combo not in _COMBOS:
        raise ValueError("unknown combination %r" % (combo,))
    if variant not in (1, -1):
        raise ValueError("variant must be +1 or -1")
    blocks = [scalar_block("u", 0), scalar_block("d", 0)]
    p0, ps, js, ks = _assemble(blocks)
    swap = OperatorExpr.matrix([[0, 1], [1, 0]])
    if combo == "UU":
        pi = compose(OperatorExpr.parity(2),
                     OperatorExpr.matrix([[1, 0], [0, variant]]))
        tau = swap
        omega = variant
        pi_sq = 1
    elif combo == "AU":
        pi = compose(OperatorExpr.conj(2),
                     OperatorExpr.matrix([[0, 1], [variant, 0]]))
        tau = swap
        omega = variant
        pi_sq = variant
    else:  # AA
        pi = compose(OperatorExpr.conj(2),
                     OperatorExpr.matrix([[0, 1], [variant, 0]]))
        tau = compose(OperatorExpr.conj(2), OperatorExpr.parity(2))
        omega = 1
        pi_sq = variant
    spec = TernSpec("s", 0, combo, variant)
    exp = _expected((0, 0), pi_sq, 1, omega, (1, -1))
    return Tern(spec, 2, p0, ps, js, ks, pi, tau, exp)


def build_s_m(m, variant):
    """Two-block tern of class s with helicity (+m/2, -m/2), m != 0.

    Both discrete operators are antilinear; the second block carries the
    opposite field parameter so space inversion can exchange the blocks
    while flipping helicity.
    """
    if m == 0:
        raise ValueError("use build_s_zero for the zero-helicity terns")
    if variant not in (1, -1):
        raise ValueError("variant must be +1 or -1")
    blocks = [scalar_block("u", m), scalar_block("d", -m)]
    p0, ps, js, ks = _assemble(blocks)
    pi = compose(OperatorExpr.conj(2),
                 OperatorExpr.matrix([[0, 1], [variant, 0]]))
    tau = compose(OperatorExpr.conj(2), OperatorExpr.parity(2))
    spec = TernSpec("s", m, "AA", variant)
    exp = _expected((Fraction(m, 2), Fraction(-m, 2)),
                    variant, 1, 1, (1, -1))
    return Tern(spec, 2, p0, ps, js, ks, pi, tau, exp)


def build_paired_u():
    """Two identical positive-energy blocks with a block-swapping Pi.

    Pi is unitary (parity times the swap) and Tau antilinear with
    Tau^2 = -Id; the pair still closes with omega = -1.
    """
    blocks = [scalar_block("u", 0), scalar_block("u", 0)]
    p0, ps, js, ks = _assemble(blocks)
    pi = compose(OperatorExpr.parity(2),
                 OperatorExpr.matrix([[0, 1], [1, 0]]))
    tau = compose(compose(OperatorExpr.parity(2), OperatorExpr.conj(2)),
                  OperatorExpr.matrix([[0, 1], [-1, 0]]))
    spec = TernSpec("u", 0, family="paired-u")
    exp = _expected((0, 0), 1, -1, -1, (1, 1))
    return Tern(spec, 2, p0, ps, js, ks, pi, tau, exp)


def build_paired_d():
    """The negative-energy twin of the paired-u tern (both blocks class d)."""
    blocks = [scalar_block("d", 0), scalar_block("d", 0)]
    p0, ps, js, ks = _assemble(blocks)
    twin = build_paired_u()
    spec = TernSpec("d", 0, family="paired-d")
    exp = _expected((0, 0), 1, -1, -1, (-1, -1))
    return Tern(spec, 2, p0, ps, js, ks, twin.pi, twin.tau, exp)


def build_quad(m=2):
    """Four-block class-s tern with reducible positive-energy part.

    Blocks carry (class, field parameter) = (u, m), (d, m), (u, -m),
    (d, -m); Tau is unitary (swapping within each helicity pair) and Pi
    antilinear (exchanging opposite-helicity pairs) with Pi^2 = -Id.
    """
    if m == 0:
        raise ValueError("the four-block construction needs m != 0")
    blocks = [scalar_block("u", m), scalar_block("d", m),
              scalar_block("u", -m), scalar_block("d", -m)]
    p0, ps, js, ks = _assemble(blocks)
    tau = OperatorExpr.matrix([[0, 1, 0, 0], [1, 0, 0, 0],
                               [0, 0, 0, 1], [0, 0, 1, 0]])
    pi = compose(OperatorExpr.conj(4),
                 OperatorExpr.matrix([[0, 0, 0, 1], [0, 0, 1, 0],
                                      [0, -1, 0, 0], [-1, 0, 0, 0]]))
    spec = TernSpec("s", m, "AU", family="quad:m=%d" % m)
    half = Fraction(m, 2)
    exp = _expected((half, half, -half, -half), -1, 1, 1, (1, -1, 1, -1))
    return Tern(spec, 4, p0, ps, js, ks, pi, tau, exp)


def build_s_zero_generators():
    """The bare two-block m = 0 generators without Pi and Tau."""
    blocks = [scalar_block("u", 0), scalar_block("d", 0)]
    p0, ps, js, ks = _assemble(blocks)
    spec = TernSpec("s", 0, family="generators-only")
    exp = _expected((0, 0), None, None, None, (1, -1))
    return Tern(spec, 2, p0, ps, js, ks, None, None, exp)


def catalog():
    """All complete catalog terns, deterministically ordered."""
    terns = [build_irreducible("u", 0), build_irreducible("d", 0)]
    for combo in _COMBOS:
        for variant in (1, -1):
            terns.append(build_s_zero(combo, variant))
    for m in _CATALOG_MS:
        for variant in (1, -1):
            terns.append(build_s_m(m, variant))
    terns += [build_paired_u(), build_paired_d(), build_quad()]
    return terns


def from_label(label):
    """Inverse of TernSpec.label for CLI use."""
    text = label.strip()
    if text == "paired-u":
        return build_paired_u()
    if text == "paired-d":
        return build_paired_d()
    if text.startswith("quad:m="):
        try:
            return build_quad(int(text[len("quad:m="):]))
        except ValueError:
            raise ValueError("bad helicity parameter in %r" % (label,))
    parts = text.split(":")
    if len(parts) < 2 or not parts[1].startswith("m="):
        raise ValueError("bad tern label %r" % (label,))
    klass = parts[0]
    try:
        m = int(parts[1][2:])
    except ValueError:
        raise ValueError("bad helicity parameter in %r" % (label,))
    if klass in ("u", "d"):
        if len(parts) > 2 and parts[2] != "generators-only":
            raise ValueError("bad tern label %r" % (label,))
        return build_irreducible(klass, m)
    if klass == "s":
        if len(parts) == 3 and parts[2] == "generators-only" and m == 0:
            return build_s_zero_generators()
        if len(parts) != 4:
            raise ValueError("class s labels need combo and variant")
        combo = parts[2]
        try:
            variant = int(parts[3])
        except ValueError:
            raise ValueError("bad variant in %r" % (label,))
        if m == 0:
            return build_s_zero(combo, variant)
        if combo != "AA":
            raise ValueError("nonzero helicity admits only the AA combo")
        return build_s_m(m, variant)
    raise ValueError("unknown class %r" % (klass,))


# -- mutation hook (negative controls) ----------------------------------

def mutate(tern, directive):
    """Apply a corruption like "J3+=p1" and return the altered tern.

    The directive names a generator and adds (or subtracts) a scalar
    multiplication operator to it; expected metadata is kept untouched
    so the verification suites should now fail.
    """
    for op in ("+=", "-="):
        if op in directive:
            name, expr_text = directive.split(op, 1)
            break
    else:
        raise ValueError("directive must contain '+=' or '-='")
    name = name.strip()
    delta = S(RationalFn.from_string(expr_text), tern.dim)
    if op == "-=":
        delta = -delta
    replace = {}
    if name == "P0":
        replace["p0"] = tern.p0 + delta
    elif name in ("P1", "P2", "P3"):
        i = int(name[1]) - 1
        replace["p"] = tuple(g + delta if idx == i else g
                             for idx, g in enumerate(tern.p))
    elif name in ("J1", "J2", "J3"):
        i = int(name[1]) - 1
        replace["j"] = tuple(g + delta if idx == i else g
                             for idx, g in enumerate(tern.j))
    elif name in ("K1", "K2", "K3"):
        i = int(name[1]) - 1
        replace["k"] = tuple(g + delta if idx == i else g
                             for idx, g in enumerate(tern.k))
    else:
        raise ValueError("unknown generator %r" % (name,))
    kwargs = dict(spec=tern.spec, dim=tern.dim, p0=tern.p0, p=tern.p,
                  j=tern.j, k=tern.k, pi=tern.pi, tau=tern.tau,
                  expected=tern.expected)
    kwargs.update(replace)
    return Tern(**kwargs)
