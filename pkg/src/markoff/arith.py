"""Exact integer, rational and p-adic primitives.

Everything here is a pure function of its arguments.  Rationals are
:class:`fractions.Fraction`; the point at infinity (archimedean place,
infinite valuation, infinite weight) is the :data:`INF` tag.
"""

from __future__ import annotations

import bisect
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Sequence

from .config import BudgetExceeded, current_budget


@total_ordering
class _Infinity:
    """Tag for v(0), the real place and infinite weights.

    Compares greater than every integer so that ``min`` works on mixed
    valuation lists, but it is never equal to an integer.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("markoff.INF")

    def __lt__(self, other):
        if other is self:
            return False
        if isinstance(other, int):
            return False
        return NotImplemented

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _require_prime(p: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")


def valuation(n: int, p: int):
    """Exponent of ``p`` in ``n``; :data:`INF` for ``n == 0``."""
    _require_prime(p)
    if n == 0:
        return INF
    n = abs(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def _val(n: int, p: int) -> int:
    # unchecked variant for internal hot paths; n != 0
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def split_prime(n: int, p: int) -> tuple[int, int]:
    """Return ``(e, u)`` with ``n = p**e * u`` and ``p`` not dividing ``u``."""
    if n == 0:
        raise ValueError("zero has no unit part")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e, n


def rational_valuation(q, p: int):
    q = Fraction(q)
    if q == 0:
        return INF
    return _val(q.numerator, p) - _val(q.denominator, p)


def jacobi(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise ValueError("Jacobi symbol needs an odd positive modulus")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def legendre(a: int, p: int) -> int:
    if p == 2:
        raise ValueError("legendre needs an odd prime; use kronecker for p = 2")
    _require_prime(p)
    return jacobi(a, p)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for n != 0."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    e, n = split_prime(n, 2)
    if e:
        if a % 2 == 0:
            return 0
        if e % 2 and a % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * jacobi(a, n)


# -- square roots --------------------------------------------------------


def _tonelli(a: int, p: int) -> int | None:
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def _unit_roots(a: int, p: int, k: int) -> list[int]:
    """Square roots of a unit ``a`` modulo ``p**k``."""
    mod = p**k
    if p == 2:
        if k == 1:
            return [1]
        if k == 2:
            return [1, 3] if a % 4 == 1 else []
        if a % 8 != 1:
            return []
        roots = [1, 3, 5, 7]
        for j in range(4, k + 1):
            mj = 1 << j
            roots = sorted({r for s in roots for r in (s, s + (mj >> 1)) if (r * r - a) % mj == 0})
        return sorted(roots)
    r = _tonelli(a, p)
    if r is None:
        return []
    # Newton on r^2 - a; 2r is a unit
    pk = p
    for _ in range(1, k):
        pk *= p
        r = (r - (r * r - a) * pow(2 * r, -1, pk)) % pk
    r %= mod
    return sorted({r, (-r) % mod})


def sqrt_mod(a: int, p: int, k: int = 1) -> list[int]:
    """All residues ``r`` in ``[0, p**k)`` with ``r*r = a (mod p**k)``."""
    _require_prime(p)
    if k < 1:
        raise ValueError("k must be positive")
    mod = p**k
    a %= mod
    if a == 0:
        step = p ** ((k + 1) // 2)
        return list(range(0, mod, step))
    v, u = split_prime(a, p)
    if v % 2:
        return []
    h = v // 2
    base = _unit_roots(u, p, k - v)
    step = p ** (k - h)
    scale = p**h
    out = set()
    for s in base:
        for t in range(p**h):
            out.add((scale * s + step * t) % mod)
    return sorted(out)


def crt(residues: Sequence[int], moduli: Sequence[int]) -> tuple[int, int]:
    x, m = 0, 1
    for r, n in zip(residues, moduli):
        g = math.gcd(m, n)
        if (r - x) % g:
            raise ValueError("incompatible congruences")
        lcm = m // g * n
        t = ((r - x) // g) * pow(m // g, -1, n // g) % (n // g)
        x = (x + m * t) % lcm
        m = lcm
    return x, m


def sqrt_mod_composite(a: int, n: int, factors: dict[int, int] | None = None) -> list[int]:
    """All square roots of ``a`` modulo ``|n|`` via prime-power roots and CRT."""
    n = abs(n)
    if n == 1:
        return [0]
    factors = factors if factors is not None else factorize(n)
    per_prime = []
    for p, e in factors.items():
        roots = sqrt_mod(a, p, e)
        if not roots:
            return []
        per_prime.append((roots, p**e))
    out = [0]
    mod = 1
    for roots, pe in per_prime:
        out = [crt((x, r), (mod, pe))[0] for x in out for r in roots]
        mod *= pe
    return sorted(out)


# -- Hensel lifting -------------------------------------------------------


@dataclass(frozen=True)
class PAdicApprox:
    """An element of Z_p known modulo ``prime**precision``."""

    prime: int
    value: int
    precision: int

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        if not 0 <= self.value < self.prime**self.precision:
            raise ValueError("value out of range")

    @property
    def modulus(self) -> int:
        return self.prime**self.precision


def poly_eval(coeffs: Sequence[int], x):
    """Evaluate ``sum(c_i x**i)``; coefficients in increasing degree."""
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_deriv(coeffs: Sequence[int]) -> list[int]:
    return [i * c for i, c in enumerate(coeffs)][1:] or [0]


def hensel_lift(coeffs: Sequence[int], seed: int, p: int, precision: int) -> PAdicApprox | None:
    """Lift a root of ``f`` from ``seed`` to a root modulo ``p**precision``.

    Uses the general criterion ``f(seed) = 0 mod p**(2e+1)`` where
    ``e = v_p(f'(seed))``.  Returns ``None`` when the criterion fails so the
    caller can fall back to another seed or an exhaustive search.
    """
    _require_prime(p)
    df = poly_deriv(coeffs)
    d = poly_eval(df, seed)
    if d == 0:
        return None
    e = _val(d, p)
    fr = poly_eval(coeffs, seed)
    if fr != 0 and _val(fr, p) < 2 * e + 1:
        return None
    mod = p**precision
    work = p ** (precision + e + 1)
    r = seed
    while True:
        fr = poly_eval(coeffs, r)
        if fr % mod == 0:
            return PAdicApprox(p, r % mod, precision)
        d = poly_eval(df, r)
        # v_p(d) stays e along the Newton sequence
        step = (fr // p**e) * pow(d // p**e, -1, work) % work
        r = (r - step) % work


# -- Hilbert symbol ------------------------------------------------------


def _as_integer_class(q) -> int:
    """Integer in the same square class as the nonzero rational ``q``."""
    q = Fraction(q)
    if q == 0:
        raise ValueError("Hilbert symbol arguments must be nonzero")
    return q.numerator * q.denominator


def hilbert(a, b, place) -> int:
    """Hilbert symbol ``(a, b)_v`` for nonzero rationals; ``place`` is a prime or INF."""
    a = _as_integer_class(a)
    b = _as_integer_class(b)
    if place is INF:
        return -1 if a < 0 and b < 0 else 1
    p = place
    _require_prime(p)
    alpha, u = split_prime(a, p)
    beta, v = split_prime(b, p)
    if p == 2:
        eps_u = ((u - 1) // 2) % 2
        eps_v = ((v - 1) // 2) % 2
        om_u = ((u * u - 1) // 8) % 2
        om_v = ((v * v - 1) // 8) % 2
        e = eps_u * eps_v + alpha * om_v + beta * om_u
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    lu = jacobi(u, p) if beta % 2 else 1
    lv = jacobi(v, p) if alpha % 2 else 1
    return sign * lu * lv


def is_padic_square(q, p: int) -> bool:
    """Whether the nonzero rational ``q`` is a square in Q_p (``p`` may be INF)."""
    q = Fraction(q)
    if q == 0:
        raise ValueError("zero")
    if p is INF:
        return q > 0
    n = _as_integer_class(q)
    e, u = split_prime(n, p)
    if e % 2:
        return False
    if p == 2:
        return u % 8 == 1
    return jacobi(u, p) == 1


# -- factorization --------------------------------------------------------


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


_SMALL_PRIMES: list[int] = [2]


def small_primes(limit: int) -> list[int]:
    """Primes up to ``limit`` (cached table, grown on demand)."""
    global _SMALL_PRIMES
    if _SMALL_PRIMES[-1] < limit:
        cap = max(limit, 2 * _SMALL_PRIMES[-1], 1024)
        sieve = bytearray([1]) * (cap + 1)
        sieve[:2] = b"\x00\x00"
        for i in range(2, math.isqrt(cap) + 1):
            if sieve[i]:
                sieve[i * i :: i] = bytearray(len(range(i * i, cap + 1, i)))
        _SMALL_PRIMES = [i for i in range(cap + 1) if sieve[i]]
    return _SMALL_PRIMES[: bisect.bisect_right(_SMALL_PRIMES, limit)]


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of ``|n|`` as ``{prime: exponent}`` in increasing order.

    Trial division up to the budget's ``trial_limit``, then Pollard rho with
    Brent's cycle detection.  Raises :class:`BudgetExceeded` for composite
    cofactors wider than ``factor_bits``.
    """
    if n == 0:
        raise ValueError("cannot factor 0")
    budget = current_budget()
    n = abs(n)
    out: dict[int, int] = {}
    limit = budget.trial_limit
    for p in small_primes(min(limit, math.isqrt(n) + 1)):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        if n < limit * limit or is_prime(n):
            out[n] = out.get(n, 0) + 1
        else:
            if n.bit_length() > budget.factor_bits:
                raise BudgetExceeded(f"composite cofactor of {n.bit_length()} bits exceeds factor budget")
            rng = random.Random(n)
            stack = [n]
            while stack:
                c = stack.pop()
                if is_prime(c):
                    out[c] = out.get(c, 0) + 1
                    continue
                d = _pollard_brent(c, rng)
                stack += [d, c // d]
    return dict(sorted(out.items()))


def prime_divisors(n: int) -> list[int]:
    return list(factorize(n)) if n not in (0, 1, -1) else []


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def is_rational_square(q) -> bool:
    """True iff ``q`` is the square of a rational (0 included)."""
    q = Fraction(q)
    return q.numerator >= 0 and is_square(q.numerator) and is_square(q.denominator)


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel: ``n = squarefree_part(n) * k**2``."""
    if n == 0:
        raise ValueError("zero")
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in factorize(n).items():
        if e % 2:
            out *= p
    return sign * out
