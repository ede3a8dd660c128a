"""Markoff surfaces and their orbifold pairs.

The affine surface U_m is u1^2 + u2^2 + u3^2 - u1 u2 u3 = m; its projective
closure X_m is x0 (x1^2 + x2^2 + x3^2) - x1 x2 x3 = m x0^3 with boundary
components D_i = {x0 = xi = 0}.  A weight vector attaches an integer >= 2 or
INF to each D_i.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .arith import INF, _require_prime, jacobi, prime_divisors, split_prime, valuation


class Mode(enum.Enum):
    CAMPANA = "campana"
    DARMON = "darmon"
    BOTH = "both"


@dataclass(frozen=True)
class Weights:
    w: tuple  # three entries, each an int >= 2 or INF

    def __post_init__(self):
        if len(self.w) != 3:
            raise ValueError("need exactly three weights")
        for x in self.w:
            if x is not INF and not (isinstance(x, int) and x >= 2):
                raise ValueError(f"weight {x!r} must be an integer >= 2 or inf")

    @classmethod
    def parse(cls, text: str) -> "Weights":
        out = []
        for tok in text.split(","):
            tok = tok.strip().lower()
            if tok in ("inf", "infinity", "oo"):
                out.append(INF)
            else:
                try:
                    out.append(int(tok))
                except ValueError:
                    raise ValueError(f"bad weight {tok!r}") from None
        return cls(tuple(out))

    @classmethod
    def of(cls, *ws) -> "Weights":
        return cls(tuple(INF if w in (None, "inf") or w is INF else w for w in ws))

    def __getitem__(self, i: int):
        """1-based access matching the boundary component index."""
        return self.w[i - 1]

    def finite_indices(self) -> list[int]:
        return [i for i in (1, 2, 3) if self[i] is not INF]

    def __str__(self):
        return ",".join(str(x) for x in self.w)


@dataclass(frozen=True)
class OrbifoldPair:
    m: int
    weights: Weights

    def __post_init__(self):
        if self.m in (0, 4):
            raise ValueError("m must differ from 0 and 4")


def markoff_value(u: Sequence[int]) -> int:
    u1, u2, u3 = u
    return u1 * u1 + u2 * u2 + u3 * u3 - u1 * u2 * u3


def surface_residual(x: Sequence[int], m: int) -> int:
    """x0(x1^2+x2^2+x3^2) - x1 x2 x3 - m x0^3; zero iff x lies on X_m."""
    x0, x1, x2, x3 = x
    return x0 * (x1 * x1 + x2 * x2 + x3 * x3) - x1 * x2 * x3 - m * x0**3


def on_surface(x: Sequence[int], m: int) -> bool:
    return surface_residual(x, m) == 0


def normalize(x: Sequence[int]) -> tuple[int, int, int, int]:
    """Primitive representative with positive first nonzero coordinate."""
    g = math.gcd(*x)
    if g == 0:
        raise ValueError("the zero vector is not a projective point")
    y = [c // g for c in x]
    if next(c for c in y if c) < 0:
        y = [-c for c in y]
    return tuple(y)


@dataclass(frozen=True)
class PrimitivePoint:
    coords: tuple[int, int, int, int]

    def __post_init__(self):
        if len(self.coords) != 4:
            raise ValueError("need four coordinates")
        if math.gcd(*self.coords) != 1:
            raise ValueError(f"{self.coords} is not primitive")

    @classmethod
    def from_coords(cls, x: Sequence[int]) -> "PrimitivePoint":
        return cls(normalize(x))

    def __getitem__(self, i: int) -> int:
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def valuation(self, i: int, p: int):
        return valuation(self.coords[i], p)

    @property
    def strict(self) -> bool:
        return self.coords[0] != 0


@dataclass(frozen=True)
class LocalPoint:
    """A Z_p-point of X_m known through an integer representative.

    ``coords`` satisfy the surface equation modulo ``prime**precision`` and
    are not all divisible by ``prime``.  Valuations below ``precision`` are
    exact for every p-adic point the representative approximates.
    """

    coords: tuple[int, int, int, int]
    prime: int
    precision: int

    def residual_ok(self, m: int) -> bool:
        return surface_residual(self.coords, m) % self.prime**self.precision == 0


def _coords(P) -> tuple[int, ...]:
    return tuple(getattr(P, "coords", P))


# -- intersection multiplicities -------------------------------------------


def intersection_multiplicity(P, i: int, p: int):
    """n_p(D_i, P) = min(v_p(x0), v_p(xi)); INF iff x0 = xi = 0."""
    x = _coords(P)
    if i not in (1, 2, 3):
        raise ValueError("i must be 1, 2 or 3")
    return min(valuation(x[0], p), valuation(x[i], p))


def admissible(n, w, mode: Mode) -> bool:
    """Whether the multiplicity ``n`` is allowed on a component of weight ``w``."""
    if w is INF:
        return n == 0
    if mode is Mode.CAMPANA:
        return n == 0 or n is INF or n >= w
    if mode is Mode.DARMON:
        return n is INF or n % w == 0
    if mode is Mode.BOTH:
        return admissible(n, w, Mode.CAMPANA) and admissible(n, w, Mode.DARMON)
    raise ValueError(mode)


@dataclass(frozen=True)
class LocalReport:
    prime: int
    multiplicities: tuple  # n_p(D_i) for i = 1, 2, 3
    verdicts: tuple[bool, bool, bool]

    @property
    def ok(self) -> bool:
        return all(self.verdicts)

    def reason(self, weights: Weights, mode: Mode) -> str:
        bad = [i for i in (1, 2, 3) if not self.verdicts[i - 1]]
        if not bad:
            return "admissible"
        i = bad[0]
        return (
            f"n_{self.prime}(D_{i}) = {self.multiplicities[i - 1]} not admissible "
            f"for weight {weights[i]} ({mode.value})"
        )


def local_report(P, weights: Weights, p: int, mode: Mode) -> LocalReport:
    x = _coords(P)
    if all(c % p == 0 for c in x):
        raise ValueError(f"point is not primitive at {p}")
    ns = tuple(intersection_multiplicity(x, i, p) for i in (1, 2, 3))
    return LocalReport(p, ns, tuple(admissible(n, weights[i], mode) for i, n in zip((1, 2, 3), ns)))


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str

    def __bool__(self):
        return self.ok


def is_local_semiintegral(P, pair: OrbifoldPair, p: int, mode: Mode) -> Verdict:
    rep = local_report(P, pair.weights, p, mode)
    return Verdict(rep.ok, rep.reason(pair.weights, mode))


# -- global classification -------------------------------------------------


class PointKind(enum.Enum):
    INTEGRAL = "integral"
    STRICT_SEMI_INTEGRAL = "strict_semi_integral"
    NON_STRICT_SEMI_INTEGRAL = "non_strict_semi_integral"
    NOT_SEMI_INTEGRAL = "not_semi_integral"


@dataclass(frozen=True)
class PointClass:
    kind: PointKind
    reports: tuple[LocalReport, ...]
    reason: str = ""

    @property
    def semi_integral(self) -> bool:
        return self.kind is not PointKind.NOT_SEMI_INTEGRAL

    @property
    def strict(self) -> bool:
        return self.kind in (PointKind.INTEGRAL, PointKind.STRICT_SEMI_INTEGRAL)


def check_primes(x: Sequence[int]) -> list[int]:
    """Primes at which some n_p(D_i) can be nonzero, together with 2 and 3."""
    ps = {2, 3}
    for i in (1, 2, 3):
        g = math.gcd(x[0], x[i])
        if g > 1:
            ps.update(prime_divisors(g))
    return sorted(ps)


def classify(P, pair: OrbifoldPair, mode: Mode) -> PointClass:
    x = normalize(_coords(P))
    if not on_surface(x, pair.m):
        raise ValueError(f"{x} does not lie on X_{pair.m}")
    reports = tuple(local_report(x, pair.weights, p, mode) for p in check_primes(x))
    for rep in reports:
        if not rep.ok:
            return PointClass(PointKind.NOT_SEMI_INTEGRAL, reports, rep.reason(pair.weights, mode))
    # the real place: P must avoid the infinite-weight components
    for i in (1, 2, 3):
        if pair.weights[i] is INF and x[0] == 0 and x[i] == 0:
            return PointClass(PointKind.NOT_SEMI_INTEGRAL, reports, f"lies on D_{i} of infinite weight")
    if x[0] == 0:
        return PointClass(PointKind.NON_STRICT_SEMI_INTEGRAL, reports, "on a finite-weight boundary component")
    if abs(x[0]) == 1:
        return PointClass(PointKind.INTEGRAL, reports, "x0 is a unit")
    return PointClass(PointKind.STRICT_SEMI_INTEGRAL, reports, "strict")


# -- local structure of strict points that are not integral --------------------


@dataclass(frozen=True)
class StructureVerdict:
    prime: int
    case: str  # "i" (p = 1 mod 4), "ii" (p = 3 mod 4), "iii" (p = 2)
    v0: int
    vi: int
    others_units: bool
    relation_holds: bool

    @property
    def holds(self) -> bool:
        return self.others_units and self.relation_holds


def check_prop32_structure(P, pair: OrbifoldPair, p: int) -> StructureVerdict:
    """Valuation pattern of a local strict point at p that is not p-integral.

    With exactly one finite weight w_i: the other two coordinates are units,
    and v(x0) <= v(xi) for p = 1 mod 4, v(x0) = v(xi) for p = 3 mod 4,
    v(x0) = v(xi) - 1 for p = 2.
    """
    _require_prime(p)
    fin = pair.weights.finite_indices()
    if len(fin) != 1:
        raise ValueError("need exactly one finite weight")
    x = _coords(P)
    if x[0] == 0 or x[0] % p:
        raise ValueError("point must be strict with p | x0")
    if not local_report(x, pair.weights, p, Mode.CAMPANA).ok:
        raise ValueError("point is not semi-integral at p")
    i = fin[0]
    j, k = [t for t in (1, 2, 3) if t != i]
    v0 = valuation(x[0], p)
    vi = valuation(x[i], p)
    units = x[j] % p != 0 and x[k] % p != 0
    if p == 2:
        case, rel = "iii", vi is not INF and v0 == vi - 1
    elif p % 4 == 1:
        case, rel = "i", v0 <= vi
    else:
        case, rel = "ii", v0 == vi
    return StructureVerdict(p, case, v0, vi, units, rel)


# -- local integral solubility ----------------------------------------------


def _disc(u1: int, u2: int, m: int) -> int:
    # u3 solves u3^2 - u1 u2 u3 + (u1^2 + u2^2 - m) = 0
    return (u1 * u2) ** 2 - 4 * (u1 * u1 + u2 * u2 - m)


def _class_status(d: int, p: int, level: int):
    """True/False if every value in the class is/isn't a p-adic square, else None."""
    if d == 0:
        return None
    e, u = split_prime(d, p)
    if e >= level:
        return None
    if e % 2:
        return False
    if p == 2:
        if level - e < 3:
            return None
        return u % 8 == 1
    return jacobi(u % p, p) == 1


def local_integral_soluble(m: int, p: int, max_level: int = 40) -> bool:
    """Whether U_m has a Z_p-point.

    A Z_p-point exists iff the discriminant of the quadratic in u3 is a p-adic
    square for some (u1, u2) in Z_p^2 (a monic quadratic with a root in Q_p has
    its roots in Z_p).  Residue classes of (u1, u2) mod p^L are refined until
    the square class of the discriminant is constant on them.
    """
    _require_prime(p)
    if m in (0, 4):
        raise ValueError("m must differ from 0 and 4")
    level = 1
    nodes = ((a, b) for a in range(p) for b in range(p))
    while True:
        pending = []
        for a, b in nodes:
            status = _class_status(_disc(a, b, m), p, level)
            if status:
                return True
            if status is None:
                pending.append((a, b))
        if not pending:
            return False
        if level >= max_level:
            raise RuntimeError(f"local solubility at {p} undecided after {max_level} levels")
        step = p**level
        nodes = [(a + step * s, b + step * t) for a, b in pending for s in range(p) for t in range(p)]
        level += 1


def real_soluble(m: int) -> bool:
    """U_m(R) is nonempty for every m: (0, 0, sqrt m) or (t, t, 4) with 2t^2 = 16 - m."""
    return True


def integral_adeles_empty(m: int) -> bool:
    """True iff U_m has no Z_2-, Z_3- or real point (p >= 5 never obstructs)."""
    return not (real_soluble(m) and local_integral_soluble(m, 2) and local_integral_soluble(m, 3))


# -- integral points -----------------------------------------------------------


def vieta_move(t: Sequence[int], i: int) -> tuple[int, int, int]:
    if i not in (1, 2, 3):
        raise ValueError("i must be 1, 2 or 3")
    u = list(t)
    j, k = [s for s in range(3) if s != i - 1]
    u[i - 1] = u[j] * u[k] - u[i - 1]
    return tuple(u)


@dataclass(frozen=True)
class IntegralSearch:
    m: int
    triple: tuple[int, int, int] | None
    complete: bool  # the reduced region was scanned in full
    region_bound: int  # largest |u_i| a reduced triple can have

    @property
    def found(self) -> bool:
        return self.triple is not None


def _reduced_triples_pos(m: int, cap: int):
    # reduced triples for m > 0: (0, b, c) with b^2 + c^2 = m, or (-a, b, c)
    # with a, b, c >= 1 and a^2 + b^2 + c^2 + abc = m
    r = math.isqrt(m)
    for b in range(0, min(r, cap) + 1):
        c2 = m - b * b
        c = math.isqrt(c2)
        if c * c == c2 and c >= b:
            yield (0, b, c)
    for a in range(1, min(r, cap) + 1):
        for b in range(a, min(r, cap) + 1):
            rest = m - a * a - b * b
            if rest < b * b + a * b * b:
                break
            # c^2 + ab c - rest = 0
            disc = (a * b) ** 2 + 4 * rest
            s = math.isqrt(disc)
            if s * s == disc and (s - a * b) % 2 == 0:
                c = (s - a * b) // 2
                if c >= b and c <= cap:
                    yield (-a, b, c)


def _reduced_triples_neg(m: int, cap: int):
    # reduced triples for m < 0: 3 <= a <= b <= c <= ab/2 (all positive)
    n = -m
    a = 3
    while a * a * (a - 3) <= n and a <= cap:
        bmax = math.isqrt((n + a * a) // (a - 2)) if a > 2 else 0
        for b in range(a, min(bmax, cap) + 1):
            # c^2 - ab c + (a^2 + b^2 - m) = 0
            disc = (a * b) ** 2 - 4 * (a * a + b * b - m)
            if disc < 0:
                continue
            s = math.isqrt(disc)
            if s * s != disc or (a * b + s) % 2:
                continue
            for c in sorted({(a * b - s) // 2, (a * b + s) // 2}):
                if b <= c and 2 * c <= a * b and c <= cap:
                    yield (a, b, c)
        a += 1


def _region_bound(m: int) -> int:
    if m > 0:
        return math.isqrt(m)
    n, best, a = -m, 0, 3
    while a * a * (a - 3) <= n:
        b = math.isqrt((n + a * a) // (a - 2))
        best = max(best, a * b // 2)
        a += 1
    return best


def integral_point_search(m: int, height_bound: int) -> IntegralSearch:
    """Search U_m(Z) through its finitely many reduced triples.

    Every integral solution is carried by Vieta moves, sign changes of two
    coordinates and permutations to a reduced triple; the reduced ones are
    listed with max |u_i| <= height_bound.  When that bound covers the whole
    reduced region a NOT_FOUND answer proves U_m(Z) is empty.
    """
    if m in (0, 4):
        raise ValueError("m must differ from 0 and 4")
    bound = _region_bound(m)
    gen = _reduced_triples_pos(m, height_bound) if m > 0 else _reduced_triples_neg(m, height_bound)
    found = min(gen, default=None)
    return IntegralSearch(m, found, bound <= height_bound, bound)
