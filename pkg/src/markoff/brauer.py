"""Local invariants of the quaternion classes on U_m and obstruction adeles.

For a strict point with x0 != 0 the classes are

    alpha_{i,-} = (x_i/x_0 - 2, m - 4)      alpha = (x_i^2/x_0^2 - 4, m - 4)

and inv_v = (1 - (a, b)_v)/4 in {0, 1/2}.  Finite-place points are
:class:`LocalPoint` representatives; a Hilbert symbol is only evaluated when
the representative determines the square class of its argument.  Real points
carry exact coordinates in Q(sqrt r).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import (
    INF,
    _require_prime,
    factorize,
    hensel_lift,
    hilbert,
    is_padic_square,
    is_rational_square,
    is_square,
    jacobi,
    sqrt_mod,
    split_prime,
    valuation,
)
from .orbifold import LocalPoint, Mode, OrbifoldPair, Weights, is_local_semiintegral, markoff_value

ZERO = Fraction(0)
HALF = Fraction(1, 2)


class PrecisionError(ArithmeticError):
    """A p-adic representative is too coarse to fix a square class."""


class IndeterminateRepresentative(ValueError):
    """x_i = 2 x_0 (or x_i^2 = 4 x_0^2): the chosen representative is singular here."""


class Element(enum.Enum):
    A1_MINUS = "a1-"
    A2_MINUS = "a2-"
    A3_MINUS = "a3-"
    ALPHA = "alpha"

    @property
    def index(self) -> int | None:
        return {"a1-": 1, "a2-": 2, "a3-": 3}.get(self.value)


@dataclass(frozen=True)
class InvariantProfile:
    element: Element
    inv: dict  # place (prime or INF) -> Fraction in {0, 1/2}

    def total(self) -> Fraction:
        return sum(self.inv.values(), ZERO) % 1


# -- exact real points ------------------------------------------------------


@dataclass(frozen=True)
class Surd:
    """a + b sqrt(r) with rational a, b and an integer r >= 0."""

    a: Fraction
    b: Fraction = ZERO
    r: int = 0

    def _coerce(self, other) -> "Surd":
        if isinstance(other, Surd):
            if other.b and self.b and other.r != self.r:
                raise ValueError("mixed radicands")
            return other
        return Surd(Fraction(other), ZERO, self.r)

    def _radicand(self, o: "Surd") -> int:
        return self.r if self.b else o.r

    def __add__(self, other):
        o = self._coerce(other)
        return Surd(self.a + o.a, self.b + o.b, self._radicand(o))

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.r)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        r = self._radicand(o)
        return Surd(self.a * o.a + self.b * o.b * r, self.a * o.b + self.b * o.a, r)

    __rmul__ = __mul__

    def sign(self) -> int:
        """Exact sign of a + b sqrt(r)."""
        a, b = self.a, self.b
        if b == 0 or self.r == 0:
            return (a > 0) - (a < 0)
        sb = 1 if b > 0 else -1
        if a == 0 or (a > 0) == (b > 0):
            return sb
        # opposite signs: compare a^2 with b^2 r
        d = a * a - b * b * self.r
        if d == 0:
            return 0
        return (1 if a > 0 else -1) if d > 0 else sb

    def is_rational(self) -> bool:
        return self.b == 0 or self.r == 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.r)


@dataclass(frozen=True)
class RealPoint:
    """Affine real point (u1, u2, u3) of U_m with exact surd coordinates."""

    u: tuple[Surd, Surd, Surd]

    def value(self) -> Surd:
        u1, u2, u3 = self.u
        return u1 * u1 + u2 * u2 + u3 * u3 - u1 * u2 * u3


def real_point_on(m: int, i: int = 1, negative: bool = False) -> RealPoint:
    """A real point with a controlled sign of u_i - 2.

    For m < 4: u_i = y, the next coordinate 2y and the last 4, where
    3y^2 = 16 - m; ``negative`` picks y < -2 instead of y > 2.
    For m > 4 the point (0, 0, sqrt m) is returned (all invariants vanish).
    """
    if m >= 4:
        if m == 4:
            raise ValueError("m = 4")
        s = Surd(ZERO, Fraction(1), m)
        return RealPoint((Surd(ZERO), Surd(ZERO), s))
    # y = sqrt((16 - m)/3) = sqrt(3(16 - m))/3
    y = Surd(ZERO, Fraction(-1 if negative else 1, 3), 3 * (16 - m))
    coords = [None, None, None]
    j, k = i % 3, (i + 1) % 3
    coords[i - 1], coords[j], coords[k] = y, y * 2, Surd(Fraction(4), ZERO, y.r)
    return RealPoint(tuple(coords))


# -- symbol evaluation -----------------------------------------------------


def _slack(p: int) -> int:
    return 3 if p == 2 else 1


def _padic_class(num: int, den: int, p: int, precision: int | None) -> Fraction:
    """num/den as a rational in the same Q_p square class, checking precision."""
    if num == 0 and precision is None:
        raise IndeterminateRepresentative("argument vanishes")
    if precision is not None:
        mod = p**precision
        num %= mod
        if num == 0:
            raise PrecisionError(f"argument vanishes modulo {p}^{precision}")
        for x in (num, den):
            if valuation(x, p) + _slack(p) > precision:
                raise PrecisionError(f"representative modulo {p}^{precision} is too coarse")
        # only the valuation and the leading digits matter
        e, u = split_prime(num, p)
        f, w = split_prime(den, p)
        k = p ** _slack(p)
        return Fraction(p**e * (u % k), p**f * (w % k))
    return Fraction(num, den)


def _symbol(P, m: int, place, num_den) -> int:
    """Hilbert symbol (num/den, m - 4) at ``place`` for a point P."""
    if m == 4:
        raise ValueError("m = 4")
    if place is INF:
        if not isinstance(P, RealPoint):
            x = tuple(getattr(P, "coords", P))
            if isinstance(P, LocalPoint):
                raise ValueError("a p-adic point has no archimedean invariant")
            num, den = num_den(x)
            if num == 0:
                raise IndeterminateRepresentative("argument vanishes")
            return hilbert(Fraction(num, den), m - 4, INF)
        s = num_den(P).sign()
        if s == 0:
            raise IndeterminateRepresentative("argument vanishes")
        return -1 if s < 0 and m < 4 else 1
    _require_prime(place)
    if isinstance(P, RealPoint):
        raise ValueError("a real point has no p-adic invariant")
    if isinstance(P, LocalPoint):
        if P.prime != place:
            raise ValueError(f"point is local at {P.prime}, not at {place}")
        num, den = num_den(P.coords)
        return hilbert(_padic_class(num, den, place, P.precision), m - 4, place)
    num, den = num_den(tuple(P))
    if num == 0:
        raise IndeterminateRepresentative("argument vanishes")
    return hilbert(Fraction(num, den), m - 4, place)


def _to_inv(h: int) -> Fraction:
    return ZERO if h == 1 else HALF


def inv_alpha_i(i: int, P, m: int, place) -> Fraction:
    """inv_v alpha_{i,-}(P) = (1 - (x_i/x_0 - 2, m - 4)_v)/4."""
    if i not in (1, 2, 3):
        raise ValueError("i must be 1, 2 or 3")

    def arg(x):
        if isinstance(x, RealPoint):
            return x.u[i - 1] - 2
        if x[0] == 0:
            raise ValueError("point is not strict (x0 = 0)")
        return x[i] - 2 * x[0], x[0]

    if isinstance(P, RealPoint):
        return _to_inv(_symbol(P, m, place, arg))
    return _to_inv(_symbol(P, m, place, lambda x: arg(x)))


def inv_alpha(P, m: int, place) -> Fraction:
    """inv_v alpha(P) through (x_i^2/x_0^2 - 4, m - 4), first usable i."""
    last = None
    for i in (1, 2, 3):

        def arg(x, i=i):
            if isinstance(x, RealPoint):
                return x.u[i - 1] * x.u[i - 1] - 4
            if x[0] == 0:
                raise ValueError("point is not strict (x0 = 0)")
            return x[i] ** 2 - 4 * x[0] ** 2, x[0] ** 2

        try:
            return _to_inv(_symbol(P, m, place, arg))
        except (IndeterminateRepresentative, PrecisionError) as exc:
            last = exc
    raise IndeterminateRepresentative(f"all three representatives of alpha fail: {last}")


def invariant(element: Element, P, m: int, place) -> Fraction:
    if element is Element.ALPHA:
        return inv_alpha(P, m, place)
    return inv_alpha_i(element.index, P, m, place)


# -- field-theoretic conditions -------------------------------------------------


@dataclass(frozen=True)
class FieldConditions:
    m: int
    m_square: bool
    m4_square: bool
    product_square: bool

    @property
    def degree4(self) -> bool:
        return not (self.m_square or self.m4_square or self.product_square)


def field_conditions(m: int) -> FieldConditions:
    if m in (0, 4):
        raise ValueError("m must differ from 0 and 4")
    return FieldConditions(m, is_rational_square(m), is_rational_square(m - 4), is_rational_square(m * (m - 4)))


def in_S_m(place, m: int) -> bool:
    """Whether m - 4 is a square in Q_v."""
    if m == 4:
        raise ValueError("m = 4")
    return is_padic_square(m - 4, place)


# -- local points with prescribed invariants ------------------------------------


def _finite_index(weights: Weights, i: int | None) -> tuple[int, int]:
    fin = weights.finite_indices()
    if not fin:
        raise ValueError("need a finite weight")
    if i is None:
        i = fin[0]
    if weights[i] is INF:
        raise ValueError(f"weight {i} is infinite")
    return i, weights[i]


def _place(i: int, x0: int, xi: int, v: int, w: int) -> tuple[int, int, int, int]:
    x = [x0, 0, 0, 0]
    others = [j for j in (1, 2, 3) if j != i]
    x[i], x[others[0]], x[others[1]] = xi, v, w
    return tuple(x)


def _shape_point(m: int, p: int, omega: int, i: int, v: int, w: int, seed: int, check) -> LocalPoint:
    """Lift u in (p^{2w}, u p^{2w} [* 2 if p = 2], v, w) and return a point whose
    invariants ``check`` can evaluate, raising the precision as needed."""
    e0 = 2 * omega
    if p == 2:
        # 2^{4w+2} u^2 - 2 v w u + v^2 + w^2 - m 2^{4w} = 0
        coeffs = [v * v + w * w - m * 2 ** (4 * omega), -2 * v * w, 2 ** (4 * omega + 2)]
        scale = 2 ** (e0 + 1)
    else:
        # p^{4w} u^2 - v w u + v^2 + w^2 - m p^{4w} = 0
        coeffs = [v * v + w * w - m * p ** (4 * omega), -v * w, p ** (4 * omega)]
        scale = p**e0
    n = 2 * omega + 10
    for _ in range(12):
        lift = hensel_lift(coeffs, seed, p, n)
        if lift is None:
            raise RuntimeError(f"Hensel lift failed at p = {p} from seed {seed}")
        pt = LocalPoint(_place(i, p**e0, lift.value * scale, v, w), p, n + valuation(scale, p))
        try:
            check(pt)
            return pt
        except PrecisionError:
            n *= 2
    raise RuntimeError("could not reach a precision fixing the invariants")


def construct_Mp(m: int, weights: Weights, p: int, i: int | None = None) -> LocalPoint:
    """Local strict point at p, not p-integral, with all alpha_{j,-} invariants 0.

    Shape (p^{2w}, u p^{2w}, 1, 1) for odd p, (2^{2w}, u 2^{2w+1}, 1, 1) for
    p = 2, with u lifted from 2 (odd p) or 1 (p = 2).
    """
    _require_prime(p)
    if m in (0, 4):
        raise ValueError("m must differ from 0 and 4")
    i, omega = _finite_index(weights, i)
    seed = 1 if p == 2 else 2

    def check(pt):
        for j in (1, 2, 3):
            inv_alpha_i(j, pt, m, p)

    pt = _shape_point(m, p, omega, i, 1, 1, seed, check)
    vals = [inv_alpha_i(j, pt, m, p) for j in (1, 2, 3)]
    if any(vals):
        raise RuntimeError(f"M_{p} has invariants {vals}")
    return pt


def _nonresidue_shape(q: int) -> tuple[int, int, int]:
    """(v, w, u mod q) with v, w units, v^2 + w^2 = u v w and u - 2 a nonsquare mod q."""
    if q % 4 == 3:
        return 1, q - 1, q - 2  # u = -2, u - 2 = -4
    if q % 8 == 5:
        return 1, sqrt_mod(q - 1, q)[0], 0  # u = 0, u - 2 = -2
    if q == 17:
        return 2, 3, 5  # 6u = 13, u - 2 = 3
    # q = 1 mod 8: take w = 1 and search u with u - 2 a nonsquare and u^2 - 4 a square
    for u in range(3, q):
        if jacobi(u - 2, q) == -1 and jacobi(u * u - 4, q) == 1:
            z = sqrt_mod(u * u - 4, q)[0]
            v = (u + z) * pow(2, -1, q) % q
            if v:
                return v, 1, u
    raise RuntimeError(f"no admissible u modulo {q}")


def construct_Np(m: int, weights: Weights, q: int, i: int | None = None) -> LocalPoint:
    """Local strict point at q with inv_q alpha_{i,-} = 1/2 (v_q(m - 4) odd)."""
    _require_prime(q)
    if m == 4 or valuation(m - 4, q) % 2 == 0:
        raise ValueError(f"v_{q}(m - 4) must be odd")
    i, omega = _finite_index(weights, i)

    def check(pt):
        inv_alpha_i(i, pt, m, q)

    if q != 2:
        v, w, u0 = _nonresidue_shape(q)
        pt = _shape_point(m, q, omega, i, v, w, u0, check)
        if inv_alpha_i(i, pt, m, q) != HALF:
            raise RuntimeError(f"N_{q} construction gave invariant 0")
        return pt
    # q = 2: (v, w) = (1, 5) first, then other odd pairs; each result is re-checked
    pairs = [(1, 5)] + [(v, w) for v in range(1, 16, 2) for w in range(1, 16, 2) if (v, w) != (1, 5)]
    for v, w in pairs:
        seed = 1 if v * w % 4 == 1 else 3
        # need v^2 + w^2 - 2 v w u = 0 mod 8 for the Hensel criterion
        if (v * v + w * w - 2 * v * w * seed) % 8:
            continue
        pt = _shape_point(m, 2, omega, i, v, w, seed, check)
        if inv_alpha_i(i, pt, m, 2) == HALF:
            return pt
    raise RuntimeError("no 2-adic point with invariant 1/2 found")


# -- obstructed adeles ---------------------------------------------------------


@dataclass(frozen=True)
class FiniteAdele:
    """An adelic point given by finitely many explicit entries.

    Primes not in ``entries`` carry the default local point ``construct_Mp``,
    whose invariants vanish.
    """

    m: int
    weights: Weights
    index: int  # which alpha_{i,-} the invariants refer to
    real: RealPoint
    entries: dict  # prime -> LocalPoint
    exceptional_place: object  # the place carrying 1/2
    default_recipe: str = "M_p"

    def local_invariants(self) -> dict:
        out = {INF: inv_alpha_i(self.index, self.real, self.m, INF)}
        for p, pt in sorted(self.entries.items()):
            out[p] = inv_alpha_i(self.index, pt, self.m, p)
        return out


def build_obstructed_adele(m: int, weights: Weights, i: int | None = None) -> tuple[FiniteAdele, Fraction]:
    """An adele whose invariants for alpha_{i,-} sum to 1/2.

    If m - 4 < 0 the real entry has u_i < -2; otherwise the smallest prime q
    with v_q(m - 4) odd gets a point N_q.  Every other listed prime (those
    dividing 2(m - 4), and 3) gets M_p.
    """
    if m in (0, 4):
        raise ValueError("m must differ from 0 and 4")
    if is_rational_square(m - 4):
        raise ValueError("m - 4 is a rational square: no obstruction")
    i, _ = _finite_index(weights, i)
    primes = sorted(set(factorize(2 * (m - 4))) | {2, 3})
    entries = {}
    if m - 4 < 0:
        real = real_point_on(m, i, negative=True)
        special = INF
    else:
        real = real_point_on(m, i)
        special = next(q for q, e in factorize(m - 4).items() if e % 2)
    for p in primes:
        if p == special:
            entries[p] = construct_Np(m, weights, p, i)
        else:
            entries[p] = construct_Mp(m, weights, p, i)
    adele = FiniteAdele(m, weights, i, real, entries, special)
    total = sum(adele.local_invariants().values(), ZERO) % 1
    return adele, total


def adele_entries_semiintegral(adele: FiniteAdele) -> bool:
    pair = OrbifoldPair(adele.m, adele.weights)
    return all(
        is_local_semiintegral(pt, pair, p, mode)
        for p, pt in adele.entries.items()
        for mode in (Mode.CAMPANA, Mode.DARMON)
    )


# -- the star condition ---------------------------------------------------------


@dataclass(frozen=True)
class Biquadratic:
    """a + b A + g B + h AB with A^2 = m, B^2 = m - 4 (coefficients rational)."""

    m: int
    coeffs: tuple[Fraction, Fraction, Fraction, Fraction]

    def __mul__(self, other: "Biquadratic") -> "Biquadratic":
        m, n = self.m, self.m - 4
        a, b, g, h = self.coeffs
        c, d, e, f = other.coeffs
        return Biquadratic(
            self.m,
            (
                a * c + m * b * d + n * g * e + m * n * h * f,
                a * d + b * c + n * (g * f + h * e),
                a * e + g * c + m * (b * f + h * d),
                a * f + h * c + b * e + g * d,
            ),
        )

    def __add__(self, other: "Biquadratic") -> "Biquadratic":
        return Biquadratic(self.m, tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    def conj(self, sa: int, sb: int) -> "Biquadratic":
        a, b, g, h = self.coeffs
        return Biquadratic(self.m, (a, sa * b, sb * g, sa * sb * h))

    @classmethod
    def of(cls, m: int, a=0, b=0, g=0, h=0) -> "Biquadratic":
        return cls(m, tuple(Fraction(x) for x in (a, b, g, h)))


class StarVerdict(enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"


@dataclass(frozen=True)
class StarReport:
    m: int
    c: int | None  # sqrt(4 - m) when it is rational
    verdict: StarVerdict
    witness: Biquadratic | None = None

    @property
    def theta(self) -> Biquadratic:
        return Biquadratic.of(self.m, 0, Fraction(1, 2), Fraction(1, 2), 0)

    def witness_ok(self) -> bool:
        return self.witness is not None and self.witness * self.witness == self.theta


def star_condition(m: int) -> StarReport:
    """Whether (sqrt m + sqrt(m - 4))/2 fails to be a square in Q(sqrt m, sqrt(m - 4))
    whenever 4 - m is a rational square.

    With c = sqrt(4 - m) > 0, theta = (i/4)(sqrt(c+2) + sqrt(c-2))^2 and theta is a
    square exactly when 2(c + 2) or 2|c - 2| is a rational square; the witness
    square root is built and checked exactly.
    """
    if m in (0, 4):
        raise ValueError("m must differ from 0 and 4")
    if 4 - m < 0 or not is_square(4 - m):
        return StarReport(m, None, StarVerdict.HOLDS)
    c = math.isqrt(4 - m)
    witness = None
    for t in (2 * abs(c - 2), 2 * (c + 2)):
        if t > 0 and is_square(t):
            witness = _star_witness(m, c, math.isqrt(t), t == 2 * (c - 2))
            break
    if witness is None:
        return StarReport(m, c, StarVerdict.HOLDS)
    return StarReport(m, c, StarVerdict.FAILS, witness)


def _star_witness(m: int, c: int, s: int, minus: bool) -> Biquadratic:
    # In C take B = sqrt(m - 4) = i c and A = sqrt m = i sqrt(c^2 - 4), so
    # i = B/c and sqrt(c^2 - 4) = -AB/c.  Then
    #   xi = ((1 + i)/2) (sqrt(2(c+2)) + sqrt(2(c-2))) / 2
    # and the radical not equal to s is 2 sqrt(c^2 - 4)/s.
    cf = Fraction(c)
    one_plus_i = Biquadratic.of(m, Fraction(1, 2), 0, Fraction(1, 2) / cf, 0)
    other = Biquadratic.of(m, 0, 0, 0, Fraction(-2) / (cf * s))
    total = other + Biquadratic.of(m, s)
    xi = one_plus_i * total * Biquadratic.of(m, Fraction(1, 2))
    theta = Biquadratic.of(m, 0, Fraction(1, 2), Fraction(1, 2), 0)
    for sa in (1, -1):
        for sb in (1, -1):
            cand = xi.conj(sa, sb)
            if cand * cand == theta:
                return cand
    raise RuntimeError(f"star witness for m = {m} did not verify")
