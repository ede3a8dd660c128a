"""Explicit strict semi-integral points and self-checking certificates.

All constructions use the shape (t^w, u t^w, y, z) (the u t^w entry sits at
the first finite weight).  Substituting into the surface equation and
dividing by t^w leaves

    y^2 - u y z + z^2 = (m - u^2) t^{2w},

a representation problem for a form of discriminant u^2 - 4.  The point is
strict, primitive and semi-integral in both modes as soon as t does not
divide yz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import INF, factorize, is_prime, is_square, sqrt_mod_composite
from .orbifold import (
    Mode,
    OrbifoldPair,
    PointKind,
    Weights,
    classify,
    integral_adeles_empty,
    local_integral_soluble,
    surface_residual,
)
from .quadform import QuadForm, automorph, gl2_class_trivial, represent_all, represent_primitive

SCHEMA_VERSION = 1
SQUARES_MOD_13 = frozenset({1, 3, 4, 9, 10, 12})
ORBIT_STEPS = 64


class UnsupportedCase(ValueError):
    """The construction's class-group hypothesis does not hold."""


@dataclass(frozen=True)
class AdelicEvidence:
    prime: int
    modulus: int
    reason: str


@dataclass(frozen=True)
class WitnessCertificate:
    m: int
    weights: Weights
    mode: Mode
    point: tuple[int, int, int, int]
    family: str
    form: QuadForm
    target_n: int
    representation: tuple[int, int]
    adelic_emptiness: AdelicEvidence | None

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "m": self.m,
            "weights": [w if w is not INF else "inf" for w in self.weights.w],
            "mode": self.mode.value.upper(),
            "point": list(self.point),
            "family": self.family,
            "form": {"a": self.form.a, "b": self.form.b, "c": self.form.c},
            "target_n": self.target_n,
            "representation": list(self.representation),
            "adelic_emptiness": None
            if self.adelic_emptiness is None
            else {
                "prime": self.adelic_emptiness.prime,
                "modulus": self.adelic_emptiness.modulus,
                "reason": self.adelic_emptiness.reason,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WitnessCertificate":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {d.get('schema_version')!r}")
        ev = d["adelic_emptiness"]
        return cls(
            m=int(d["m"]),
            weights=Weights(tuple(INF if w == "inf" else int(w) for w in d["weights"])),
            mode=Mode(d["mode"].lower()),
            point=tuple(int(x) for x in d["point"]),
            family=d["family"],
            form=QuadForm(int(d["form"]["a"]), int(d["form"]["b"]), int(d["form"]["c"])),
            target_n=int(d["target_n"]),
            representation=tuple(int(x) for x in d["representation"]),
            adelic_emptiness=None
            if ev is None
            else AdelicEvidence(int(ev["prime"]), int(ev["modulus"]), ev["reason"]),
        )


# -- evidence that U_m(A_Z) is empty -------------------------------------------------


@lru_cache(maxsize=16)
def markoff_residues(p: int, k: int) -> frozenset:
    """Values of u1^2 + u2^2 + u3^2 - u1 u2 u3 modulo p^k."""
    q = p**k
    r = np.arange(q, dtype=np.int64)
    a = r[:, None, None]
    b = r[None, :, None]
    c = r[None, None, :]
    vals = (a * a + b * b + c * c - (a * b % q) * c) % q
    return frozenset(np.unique(vals).tolist())


def emptiness_evidence(m: int) -> AdelicEvidence | None:
    """Smallest p^k (p in {2, 3}) modulo which the Markoff equation has no solution."""
    for p, kmax in ((2, 4), (3, 3)):
        for k in range(1, kmax + 1):
            if m % p**k not in markoff_residues(p, k):
                return AdelicEvidence(
                    p, p**k, f"u1^2+u2^2+u3^2-u1*u2*u3 = {m} has no solution modulo {p**k}"
                )
    return None


# -- constructions -------------------------------------------------------------


def _first_finite(weights: Weights) -> tuple[int, int]:
    fin = weights.finite_indices()
    if not fin:
        raise ValueError("need at least one finite weight")
    return fin[0], weights[fin[0]]


def _point(i: int, x0: int, xi: int, y: int, z: int) -> tuple[int, int, int, int]:
    x = [x0, 0, 0, 0]
    j, k = [s for s in (1, 2, 3) if s != i]
    x[i], x[j], x[k] = xi, y, z
    return tuple(x)


def _orbit_walk(f: QuadForm, y: int, z: int, ok):
    """First (y, z) in the automorph orbit, searched outwards, passing ``ok``."""
    a = automorph(f)
    inv = a.inverse()
    fwd = bwd = (y, z)
    if ok(*fwd):
        return fwd
    for _ in range(ORBIT_STEPS):
        fwd = a.apply(*fwd)
        if ok(*fwd):
            return fwd
        bwd = inv.apply(*bwd)
        if ok(*bwd):
            return bwd
    return None


def _certificate(m, weights, point, family, form, n, rep) -> WitnessCertificate:
    ev = emptiness_evidence(m)
    cert = WitnessCertificate(m, weights, Mode.BOTH, point, family, form, n, rep, ev)
    report = verify_certificate(cert)
    if not report.ok:
        raise RuntimeError(f"constructed certificate failed check {report.failed!r}")
    return cert


def generic_shape_solve(m: int, weights: Weights, t: int, u: int, family: str | None = None):
    """Certificate for the point (t^w, u t^w, y, z), or None if no (y, z) with t not dividing yz exists."""
    if not is_prime(t):
        raise ValueError(f"t = {t} is not prime")
    if abs(u) < 3 or is_square(u * u - 4):
        raise ValueError("need |u| >= 3 so that u^2 - 4 is not a square")
    if m in (0, 4) or m == u * u:
        raise ValueError("need m not in {0, 4, u^2}")
    i, w = _first_finite(weights)
    f = QuadForm(1, -u, 1)
    n = (m - u * u) * t ** (2 * w)
    for rep in represent_all(f, n):
        found = _orbit_walk(f, rep.x, rep.y, lambda y, z: y % t != 0 and z % t != 0)
        if found is not None:
            y, z = found
            point = _point(i, t**w, u * t**w, y, z)
            return _certificate(m, weights, point, family or f"generic(t={t},u={u})", f, n, (y, z))
    return None


def prop41_hypotheses(d: int) -> str | None:
    """None if d qualifies, else the name of the failed hypothesis."""
    if d % 78 != 29:
        return "d = 29 mod 78"
    c = 6 * d - 121
    if c <= 0:
        return "6d - 121 > 0"
    bad = [p for p in factorize(c) if p % 13 not in SQUARES_MOD_13]
    if bad:
        return f"prime divisors of m - 121 are squares mod 13 (fails at {bad[0]})"
    return None


def prop41_witness(d: int, weights: Weights) -> WitnessCertificate:
    """m = 6d with the point (3^w, 11*3^w, y, z)."""
    failed = prop41_hypotheses(d)
    if failed:
        raise ValueError(f"hypothesis violated: {failed}")
    cert = generic_shape_solve(6 * d, weights, 3, 11, family="prop41")
    if cert is None:
        raise RuntimeError(f"no representation found for d = {d}")
    return cert


def thm43_witness(p: int, alpha: int, k: int, sign: int, weights: Weights) -> WitnessCertificate:
    """m = (2 + p^2)^2 + sign * p^alpha k^2 with the point (p^w, (2+p^2) p^w, kx, ky).

    x^2 - (2+p^2) x y + y^2 = sign p^{2w+alpha} is solved through
    h(t, z) = t^2 + p t z - z^2 = sign p^{2w+alpha-2}, x = -z, y = p t - z.
    """
    if not (isinstance(p, int) and p > 2 and is_prime(p)):
        raise ValueError("p must be an odd prime")
    if alpha < 0 or k < 1:
        raise ValueError("need alpha >= 0 and k >= 1")
    if k % p == 0:
        raise ValueError("p must not divide k")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if not gl2_class_trivial(p * p + 4):
        raise UnsupportedCase(f"Cl({p * p + 4}) is not trivial")
    u = 2 + p * p
    m = u * u + sign * p**alpha * k * k
    if m in (0, 4):
        raise ValueError(f"m = {m} is excluded")
    i, w = _first_finite(weights)
    h = QuadForm(1, p, -1)
    rep = represent_primitive(h, sign * p ** (2 * w + alpha - 2))
    if rep is None:
        raise RuntimeError("h does not represent the target")
    x, y = -rep.y, p * rep.x - rep.y
    f = QuadForm(1, -u, 1)
    n = sign * p ** (2 * w + alpha)
    point = _point(i, p**w, u * p**w, k * x, k * y)
    fam = f"thm43(p={p},alpha={alpha},k={k},sign={'+' if sign > 0 else '-'})"
    return _certificate(m, weights, point, fam, f, n, (x, y))


def thm44_hypotheses(l: int) -> str | None:
    if not is_prime(l):
        return "l prime"
    if l < 17:
        return "l >= 17"
    if not sqrt_mod_composite(-3, 84 + l * l):
        return "-3 is a square modulo 84 + l^2"
    return None


def thm44_witness(l: int, weights: Weights) -> WitnessCertificate:
    """m = 4 - 3 l^2 with the point (3^w, 16*3^w, x, y).

    x^2 - 16xy + y^2 = -3^{2w+1}(84 + l^2) becomes X'^2 - 7Y^2 = -3^{2w-1}(84 + l^2)
    under x = 3X' + 8Y, y = Y.
    """
    failed = thm44_hypotheses(l)
    if failed:
        raise ValueError(f"hypothesis violated: {failed}")
    i, w = _first_finite(weights)
    c = 84 + l * l
    rep = represent_primitive(QuadForm(1, 0, -7), -(3 ** (2 * w - 1)) * c)
    if rep is None:
        raise RuntimeError("x^2 - 7y^2 does not represent the target")
    x, y = 3 * rep.x + 8 * rep.y, rep.y
    f = QuadForm(1, -16, 1)
    n = -(3 ** (2 * w + 1)) * c
    point = _point(i, 3**w, 16 * 3**w, x, y)
    return _certificate(4 - 3 * l * l, weights, point, f"thm44(l={l})", f, n, (x, y))


def first_thm44_prime(start: int = 17) -> int:
    l = start
    while thm44_hypotheses(l):
        l += 1
    return l


# -- verification ---------------------------------------------------------------


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    failed: str | None
    checks: tuple[str, ...]


def verify_certificate(cert: WitnessCertificate) -> VerifyReport:
    """Recompute every claim of the certificate from scratch."""
    done = []

    def fail(name):
        return VerifyReport(False, name, tuple(done))

    x = tuple(cert.point)
    if len(x) != 4 or surface_residual(x, cert.m) != 0:
        return fail("on_surface")
    done.append("on_surface")
    if math.gcd(*x) != 1:
        return fail("primitive")
    done.append("primitive")
    try:
        pair = OrbifoldPair(cert.m, cert.weights)
    except ValueError:
        return fail("pair")
    modes = (Mode.CAMPANA, Mode.DARMON) if cert.mode is Mode.BOTH else (cert.mode,)
    for mode in modes:
        kind = classify(x, pair, mode).kind
        if kind is not PointKind.STRICT_SEMI_INTEGRAL:
            return fail(f"strict_{mode.value}")
        done.append(f"strict_{mode.value}")
    y, z = cert.representation
    if math.gcd(y, z) != 1 or cert.form(y, z) != cert.target_n:
        return fail("form_equation")
    # the two coordinates off the finite-weight slot are a multiple of (y, z)
    i = cert.weights.finite_indices()[0]
    j, k = [s for s in (1, 2, 3) if s != i]
    g = math.gcd(x[j], x[k])
    if g == 0 or (x[j] // g, x[k] // g) not in ((y, z), (-y, -z)):
        return fail("form_matches_point")
    done.append("form_equation")
    ev = cert.adelic_emptiness
    if ev is not None:
        p, q = ev.prime, ev.modulus
        e = round(math.log(q, p)) if q > 1 else 0
        if p not in (2, 3) or q < p or p**e != q:
            return fail("adelic_emptiness")
        if cert.m % q in markoff_residues(p, e):
            return fail("adelic_emptiness")
        if local_integral_soluble(cert.m, p) or not integral_adeles_empty(cert.m):
            return fail("adelic_emptiness")
        done.append("adelic_emptiness")
    return VerifyReport(True, None, tuple(done))
