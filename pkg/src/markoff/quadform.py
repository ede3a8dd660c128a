"""Integral binary quadratic forms ax^2 + bxy + cy^2.

Indefinite forms are reduced with the rho operator and compared by cycle
membership; definite forms use the classical Lagrange reduction (a negative
definite form is handled through its negative).  Representations of an
integer are found class-theoretically, so a ``None`` answer is a proof that
no primitive representation exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .arith import factorize, is_square, jacobi, sqrt_mod_composite
from .config import BudgetExceeded, current_budget


class UnsupportedDiscriminant(ValueError):
    pass


@dataclass(frozen=True)
class UnimodularMap:
    """Integer matrix [[r, s], [t, u]] with determinant +1 or -1."""

    r: int
    s: int
    t: int
    u: int

    def __post_init__(self):
        if self.det not in (1, -1):
            raise ValueError(f"determinant {self.det} is not a unit")

    @property
    def det(self) -> int:
        return self.r * self.u - self.s * self.t

    @property
    def proper(self) -> bool:
        return self.det == 1

    def __matmul__(self, other: "UnimodularMap") -> "UnimodularMap":
        return UnimodularMap(
            self.r * other.r + self.s * other.t,
            self.r * other.s + self.s * other.u,
            self.t * other.r + self.u * other.t,
            self.t * other.s + self.u * other.u,
        )

    def inverse(self) -> "UnimodularMap":
        d = self.det
        return UnimodularMap(d * self.u, -d * self.s, -d * self.t, d * self.r)

    def apply(self, x: int, y: int) -> tuple[int, int]:
        return self.r * x + self.s * y, self.t * x + self.u * y

    def __pow__(self, k: int) -> "UnimodularMap":
        base = self if k >= 0 else self.inverse()
        out = IDENTITY
        for _ in range(abs(k)):
            out = out @ base
        return out


IDENTITY = UnimodularMap(1, 0, 0, 1)


@dataclass(frozen=True)
class QuadForm:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a == self.b == self.c == 0:
            raise ValueError("zero form")

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def act(self, m: UnimodularMap) -> "QuadForm":
        """The form (x, y) -> f(m(x, y))."""
        a, b, c = self.a, self.b, self.c
        r, s, t, u = m.r, m.s, m.t, m.u
        return QuadForm(
            a * r * r + b * r * t + c * t * t,
            2 * a * r * s + b * (r * u + s * t) + 2 * c * t * u,
            a * s * s + b * s * u + c * u * u,
        )

    @property
    def content(self) -> int:
        return math.gcd(self.a, self.b, self.c)

    def is_primitive(self) -> bool:
        return self.content == 1

    def __neg__(self) -> "QuadForm":
        return QuadForm(-self.a, -self.b, -self.c)

    def key(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class Representation:
    x: int
    y: int
    value: int


def discriminant(f: QuadForm) -> int:
    return f.disc


def _check_disc(d: int) -> None:
    if d == 0 or is_square(d):
        raise UnsupportedDiscriminant(f"discriminant {d} is zero or a perfect square")
    if d % 4 not in (0, 1):
        raise ValueError(f"{d} is not a discriminant (must be 0 or 1 mod 4)")


# -- indefinite forms ------------------------------------------------------


def is_reduced(f: QuadForm) -> bool:
    d = f.disc
    if d < 0:
        a, b, c = (f.a, f.b, f.c) if f.a > 0 else (-f.a, -f.b, -f.c)
        return abs(b) <= a <= c and (b >= 0 or (abs(b) != a and a != c))
    s = math.isqrt(d)
    a2 = 2 * abs(f.a)
    # 0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b, with sqrt(D) irrational
    return 0 < f.b <= s and a2 + f.b > s and a2 - f.b <= s


def _rho(f: QuadForm, s: int) -> tuple[QuadForm, UnimodularMap]:
    a, b, c = f.a, f.b, f.c
    ac = abs(c)
    m = 2 * ac
    if ac > s:
        lo = -ac + 1
    else:
        lo = s + 1 - m
    # smallest b' >= lo with b' = -b (mod 2|c|)
    nb = lo + ((-b - lo) % m)
    t = (nb + b) // (2 * c)
    return QuadForm(c, nb, a - b * t + c * t * t), UnimodularMap(0, -1, 1, t)


def _reduce_definite(f: QuadForm) -> tuple[QuadForm, UnimodularMap]:
    neg = f.a < 0
    g = -f if neg else f
    m = IDENTITY
    while True:
        a, b, c = g.a, g.b, g.c
        if not -a < b <= a:
            k = (a - b) // (2 * a)
            step = UnimodularMap(1, k, 0, 1)
            g, m = g.act(step), m @ step
            continue
        if a > c or (a == c and b < 0):
            step = UnimodularMap(0, -1, 1, 0)
            g, m = g.act(step), m @ step
            continue
        break
    return (-g if neg else g), m


def reduce(f: QuadForm) -> tuple[QuadForm, UnimodularMap]:
    """Return ``(g, T)`` with ``g`` reduced and ``g == f.act(T)``, ``T`` proper."""
    d = f.disc
    _check_disc(d)
    if d < 0:
        return _reduce_definite(f)
    s = math.isqrt(d)
    g, m = f, IDENTITY
    while not is_reduced(g):
        g, step = _rho(g, s)
        m = m @ step
    return g, m


@lru_cache(maxsize=4096)
def _cycle(g: QuadForm) -> tuple[tuple[QuadForm, UnimodularMap], ...]:
    """Reduced cycle of the reduced indefinite form ``g``.

    Entry k is ``(h_k, C_k)`` with ``h_k == g.act(C_k)``; entry 0 is g itself.
    """
    s = math.isqrt(g.disc)
    out = [(g, IDENTITY)]
    h, m = _rho(g, s)
    acc = m
    while h != g:
        out.append((h, acc))
        h, m = _rho(h, s)
        acc = acc @ m
    return tuple(out)


def cycle(f: QuadForm) -> list[QuadForm]:
    """Reduced forms properly equivalent to ``f`` (indefinite), in rho order."""
    g, _ = reduce(f)
    if f.disc < 0:
        return [g]
    return [h for h, _ in _cycle(g)]


def _cycle_automorph(g: QuadForm) -> UnimodularMap:
    s = math.isqrt(g.disc)
    cyc = _cycle(g)
    h, last = cyc[-1]
    _, m = _rho(h, s)
    return last @ m


def find_equivalence(f: QuadForm, g: QuadForm) -> UnimodularMap | None:
    """A proper map ``M`` with ``f.act(M) == g``, or None if none exists."""
    if f.disc != g.disc:
        raise ValueError("forms have different discriminants")
    fr, tf = reduce(f)
    gr, tg = reduce(g)
    if f.disc < 0:
        return tf @ tg.inverse() if fr == gr else None
    for h, c in _cycle(fr):
        if h == gr:
            return tf @ c @ tg.inverse()
    return None


def properly_equivalent(f: QuadForm, g: QuadForm) -> bool:
    return find_equivalence(f, g) is not None


# -- class groups ----------------------------------------------------------


def reduced_forms(d: int) -> list[QuadForm]:
    """All primitive reduced forms of discriminant ``d`` (positive definite if d < 0)."""
    _check_disc(d)
    if abs(d) > current_budget().disc:
        raise BudgetExceeded(f"|D| = {abs(d)} exceeds the enumeration budget")
    out = []
    if d < 0:
        amax = math.isqrt(-d // 3)
        for a in range(1, amax + 1):
            for b in range(-a + 1, a + 1):
                if (b * b - d) % (4 * a):
                    continue
                c = (b * b - d) // (4 * a)
                f = QuadForm(a, b, c)
                if c >= a and is_reduced(f) and f.is_primitive():
                    out.append(f)
        return out
    s = math.isqrt(d)
    for b in range(1, s + 1):
        if (b - d) % 2:
            continue
        n = (b * b - d) // 4
        lo, hi = (s - b) // 2 + 1, (s + b) // 2
        for a in range(max(lo, 1), hi + 1):
            if n % a:
                continue
            for sa in (a, -a):
                f = QuadForm(sa, b, n // sa)
                if is_reduced(f) and f.is_primitive():
                    out.append(f)
    return out


@dataclass(frozen=True)
class FormClassGroup:
    discriminant: int
    narrow_classes: tuple[QuadForm, ...]
    genus_characters: tuple[str, ...]
    genera: tuple[tuple[int, ...], ...]  # character vector per class
    gl2_class_count: int

    @property
    def narrow_class_number(self) -> int:
        return len(self.narrow_classes)

    @property
    def genus_count(self) -> int:
        return len(set(self.genera))


def genus_character_labels(d: int) -> list:
    """Assigned characters for discriminant ``d``: odd primes, then 2-adic ones."""
    labels: list = [p for p in factorize(d) if p != 2]
    if d % 4 == 0:
        q = d // 4
        r4, r8 = q % 4, q % 8
        if r4 == 3 or r8 == 4:
            labels.append("delta")
        elif r8 == 2:
            labels.append("epsilon")
        elif r8 == 6:
            labels.append("delta*epsilon")
        elif r8 == 0:
            labels += ["delta", "epsilon"]
    return labels


def _char_value(label, n: int) -> int:
    if label == "delta":
        return -1 if n % 4 == 3 else 1
    if label == "epsilon":
        return -1 if n % 8 in (3, 5) else 1
    if label == "delta*epsilon":
        return _char_value("delta", n) * _char_value("epsilon", n)
    return jacobi(n, label)


def genus_of_value(n: int, d: int) -> tuple[int, ...]:
    """Values of the assigned characters of ``d`` at ``n`` (gcd(n, d) = 1)."""
    if n == 0 or math.gcd(n, d) != 1:
        raise ValueError(f"{n} is not coprime to the discriminant {d}")
    return tuple(_char_value(lab, n) for lab in genus_character_labels(d))


def _coprime_value(f: QuadForm) -> int:
    d = f.disc
    bound = 1
    while True:
        for x in range(-bound, bound + 1):
            for y in range(-bound, bound + 1):
                if math.gcd(x, y) != 1:
                    continue
                v = f(x, y)
                if v and math.gcd(v, d) == 1 and (d > 0 or v > 0):
                    return v
        bound *= 2


def genus_of_form(f: QuadForm) -> tuple[int, ...]:
    return genus_of_value(_coprime_value(f), f.disc)


def _class_rep(cls: list[QuadForm]) -> QuadForm:
    return min(cls, key=lambda f: (abs(f.a), f.a < 0, f.b, f.c))


@lru_cache(maxsize=256)
def narrow_class_group(d: int) -> FormClassGroup:
    """Proper equivalence classes of primitive forms of discriminant ``d``.

    For ``d < 0`` only positive definite forms are counted.
    """
    forms = reduced_forms(d)
    seen: dict[QuadForm, int] = {}
    classes: list[list[QuadForm]] = []
    for f in forms:
        if f in seen:
            continue
        cyc = cycle(f) if d > 0 else [f]
        for h in cyc:
            seen[h] = len(classes)
        classes.append(cyc)
    order = sorted(range(len(classes)), key=lambda i: _class_rep(classes[i]).key())
    reps = [_class_rep(classes[i]) for i in order]
    pos = {i: k for k, i in enumerate(order)}
    index = {f: pos[i] for f, i in seen.items()}

    # GL2 classes: merge each class with the class of its improper image
    parent = list(range(len(reps)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for k, r in enumerate(reps):
        img, _ = reduce(QuadForm(r.a, -r.b, r.c))
        j = index[img]
        parent[find(j)] = find(k)
    gl2 = len({find(k) for k in range(len(reps))})
    labels = tuple(str(lab) if not isinstance(lab, int) else f"({lab})" for lab in genus_character_labels(d))
    genera = tuple(genus_of_form(r) for r in reps)
    return FormClassGroup(d, tuple(reps), labels, genera, gl2)


def gl2_class_trivial(d: int) -> bool:
    """True iff every primitive form of discriminant ``d`` is GL2(Z)-equivalent to the principal one."""
    if d <= 0:
        raise ValueError("discriminant must be positive")
    return narrow_class_group(d).gl2_class_count == 1


def principal_form(d: int) -> QuadForm:
    _check_disc(d)
    return QuadForm(1, d % 2, (d % 2 - d) // 4)


# -- units and automorphs --------------------------------------------------


@lru_cache(maxsize=1024)
def fundamental_solution(d: int) -> tuple[int, int]:
    """Smallest ``(t, u)`` with ``t, u > 0`` and ``t^2 - d u^2 = 4``."""
    if d <= 0 or is_square(d):
        raise ValueError("need a positive nonsquare discriminant")
    g, _ = reduce(principal_form(d))
    m = _cycle_automorph(g)
    t = abs(m.r + m.u)
    u = abs(m.t // g.a)
    return t, u


def automorphs(d: int) -> tuple[int, int]:
    """Fundamental solution of the Pell equation t^2 - D u^2 = 4 behind every proper automorph."""
    return fundamental_solution(d)


def automorph(f: QuadForm) -> UnimodularMap:
    """Fundamental proper automorph of ``f`` (f.act(A) == f)."""
    t, u = fundamental_solution(f.disc)
    return UnimodularMap((t - f.b * u) // 2, -f.c * u, f.a * u, (t + f.b * u) // 2)


# -- representations -------------------------------------------------------


def _orbit_min(a: UnimodularMap, x: int, y: int) -> tuple[int, int]:
    """Representative of the automorph orbit of (x, y) with least |x|+|y|."""
    def norm(v):
        return abs(v[0]) + abs(v[1])

    best = (norm((x, y)), x, y)
    for m in (a, a.inverse()):
        v = (x, y)
        start = norm(v)
        for _ in range(10_000):
            v = m.apply(*v)
            nv = norm(v)
            best = min(best, (nv, v[0], v[1]))
            if nv > 1000 * max(best[0], 1) and nv > start:
                break
    return best[1], best[2]


def _candidate_maps(f: QuadForm, n: int):
    d = f.disc
    fr, tf = reduce(f)
    cyc = {h: c for h, c in _cycle(fr)}
    mod = 4 * abs(n)
    factors = factorize(mod)
    for b in sqrt_mod_composite(d, mod, factors):
        if b >= 2 * abs(n):
            continue
        g = QuadForm(n, b, (b * b - d) // (4 * n))
        gr, tg = reduce(g)
        c = cyc.get(gr)
        if c is not None:
            yield tf @ c @ tg.inverse()


def represent_all(f: QuadForm, n: int) -> list[Representation]:
    """One canonical proper primitive representation per automorph orbit (up to sign)."""
    if n == 0:
        raise ValueError("n must be nonzero")
    d = f.disc
    if d <= 0 or is_square(d):
        raise UnsupportedDiscriminant("represent_primitive needs a positive nonsquare discriminant")
    k = f.content
    if n % k:
        return []
    g = QuadForm(f.a // k, f.b // k, f.c // k)
    m = n // k
    aut = automorph(g)
    out = set()
    for mp in _candidate_maps(g, m):
        x, y = _orbit_min(aut, mp.r, mp.t)
        # -1 is always an automorph: pick the sign with first nonzero entry positive
        if x < 0 or (x == 0 and y < 0):
            x, y = -x, -y
        out.add((abs(x) + abs(y), x, y))
    return [Representation(x, y, n) for _, x, y in sorted(out)]


def represent_primitive(f: QuadForm, n: int) -> Representation | None:
    """A primitive ``(x, y)`` with ``f(x, y) == n``, or None if there is none.

    The answer is canonical: first nonzero coordinate positive, then least
    ``|x| + |y|`` over all orbits modulo the automorph group, ties broken by
    ``(x, y)``.
    """
    reps = represent_all(f, n)
    return reps[0] if reps else None
