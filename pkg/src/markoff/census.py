"""Counting m = 6d (d = 29 mod 78) whose surfaces fail the integral Hasse
principle yet carry strict semi-integral points, and a scan for the rare m
where the star condition fails.

For d = 29 + 78k the condition integer is N = 6d - 121 = 53 + 468k (default
variant) or N = d = 29 + 78k.  N qualifies when each of its prime factors is
a square mod 13.  The sieve strikes out, along the progression, the
multiples of every non-square prime up to sqrt(N_max); an unmarked N is then
a product of square-class primes times at most one prime above sqrt(N_max),
and since the squares form a subgroup that prime is a square class iff
N mod 13 is.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .arith import small_primes
from .brauer import StarVerdict, star_condition
from .config import BudgetExceeded, current_budget
from .orbifold import Weights, integral_adeles_empty
from .witness import SQUARES_MOD_13, generic_shape_solve, prop41_hypotheses, prop41_witness

_SQUARES = np.array(sorted(SQUARES_MOD_13))


class Variant(enum.Enum):
    COND_ON_M_MINUS_121 = "m-121"
    COND_ON_D = "d"


@dataclass(frozen=True)
class CensusConfig:
    bound: int
    variant: Variant = Variant.COND_ON_M_MINUS_121
    weights: Weights = field(default_factory=lambda: Weights.parse("2,inf,inf"))
    attempt_witnesses: bool = False
    shard_count: int = 1
    list_cap: int = 10_000

    def __post_init__(self):
        if self.bound < 78:
            raise ValueError("bound must be >= 78 (no admissible d below it)")
        if self.shard_count < 1:
            raise ValueError("shard_count must be >= 1")

    @property
    def progression(self) -> tuple[int, int]:
        """(a, s) with condition integer a + s k for d = 29 + 78 k."""
        if self.variant is Variant.COND_ON_M_MINUS_121:
            return 53, 468
        return 29, 78

    @property
    def k_count(self) -> int:
        return (self.bound - 29) // 78 + 1


def condition_integer(d: int, variant: Variant) -> int:
    return 6 * d - 121 if variant is Variant.COND_ON_M_MINUS_121 else d


def _sieve_block(a: int, s: int, k0: int, k1: int, primes) -> np.ndarray:
    """Indices k in [k0, k1) whose a + s k qualifies."""
    k = np.arange(k0, k1, dtype=np.int64)
    n = a + s * k
    ok = np.isin(n % 13, _SQUARES)
    for p in primes:
        if s % p == 0:
            # p divides a + s k for all k or for none
            if a % p == 0:
                ok[:] = False
            continue
        first = (-a * pow(s, -1, p) - k0) % p
        ok[first::p] = False
    return k[ok]


def _bad_primes(nmax: int) -> list[int]:
    return [p for p in small_primes(math.isqrt(nmax) + 1) if p % 13 not in SQUARES_MOD_13]


def _shard_bounds(total: int, shards: int) -> list[tuple[int, int]]:
    step = -(-total // shards)
    return [(i, min(i + step, total)) for i in range(0, total, step)] or [(0, 0)]


def sieve_candidates(config: CensusConfig) -> Iterator[int]:
    """All qualifying d <= bound in increasing order."""
    a, s = config.progression
    total = config.k_count
    block = current_budget().sieve_block
    primes = _bad_primes(a + s * (total - 1))
    for lo, hi in _shard_bounds(total, config.shard_count):
        for b0 in range(lo, hi, block):
            for k in _sieve_block(a, s, b0, min(b0 + block, hi), primes):
                yield 29 + 78 * int(k)


def naive_candidates(config: CensusConfig) -> list[int]:
    """Per-d trial-division filter (reference for the sieve)."""
    from .arith import factorize

    out = []
    for d in range(29, config.bound + 1, 78):
        n = condition_integer(d, config.variant)
        if all(p % 13 in SQUARES_MOD_13 for p in factorize(n)):
            out.append(d)
    return out


@dataclass
class CensusRow:
    d: int
    m: int
    cond_integer: int
    witness_found: bool | None
    y: int | None
    z: int | None
    omega1: int


@dataclass
class CensusResult:
    config: CensusConfig
    checkpoints: list[tuple[int, int]]
    qualifying: list[int]
    truncated: bool
    witness_successes: int = 0
    witness_failures: list[int] = field(default_factory=list)
    rows: list[CensusRow] = field(default_factory=list)

    @property
    def growth(self) -> list[tuple[int, float]]:
        """S(B) sqrt(ln B) / B at each checkpoint."""
        return [(b, s * math.sqrt(math.log(b)) / b) for b, s in self.checkpoints]

    @property
    def count(self) -> int:
        return self.checkpoints[-1][1]

    def summary(self) -> dict:
        return {
            "bound": self.config.bound,
            "variant": self.config.variant.value,
            "count": self.count,
            "checkpoints": [{"B": b, "S": s, "growth": f"{c:.6f}"} for (b, s), (_, c) in zip(self.checkpoints, self.growth)],
            "witness_successes": self.witness_successes,
            "witness_failures": self.witness_failures,
            "qualifying_listed": len(self.qualifying),
            "qualifying_truncated": self.truncated,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["d", "m", "cond_integer", "witness_found", "y", "z", "omega1"])
        for r in self.rows:
            found = "" if r.witness_found is None else str(r.witness_found).lower()
            w.writerow([r.d, r.m, r.cond_integer, found, "" if r.y is None else r.y, "" if r.z is None else r.z, r.omega1])
        return buf.getvalue()


def default_checkpoints(bound: int) -> list[int]:
    pts = [10**e for e in range(2, 20) if 10**e < bound]
    return [b for b in pts if b >= 78] + [bound]


def run_census(config: CensusConfig, checkpoints: list[int] | None = None) -> CensusResult:
    cps = sorted(set(checkpoints or default_checkpoints(config.bound)) | {config.bound})
    if cps[-1] > config.bound or cps[0] < 78:
        raise ValueError("checkpoints must lie in [78, bound]")
    counts = [0] * len(cps)
    listed: list[int] = []
    rows: list[CensusRow] = []
    successes, failures = 0, []
    fin = config.weights.finite_indices()
    if config.attempt_witnesses and not fin:
        raise ValueError("witnesses need a finite weight")
    omega1 = config.weights[fin[0]] if fin else 0
    ci = 0
    for d in sieve_candidates(config):
        while d > cps[ci]:
            ci += 1
            counts[ci] = counts[ci - 1]
        counts[ci] += 1
        if len(listed) < config.list_cap:
            listed.append(d)
        if config.attempt_witnesses:
            cert = _witness(d, config)
            if cert is None:
                failures.append(d)
                rows.append(CensusRow(d, 6 * d, condition_integer(d, config.variant), False, None, None, omega1))
            else:
                successes += 1
                y, z = cert.representation
                rows.append(CensusRow(d, 6 * d, condition_integer(d, config.variant), True, y, z, omega1))
        elif len(rows) < config.list_cap:
            rows.append(CensusRow(d, 6 * d, condition_integer(d, config.variant), None, None, None, omega1))
    for j in range(ci + 1, len(cps)):
        counts[j] = counts[j - 1]
    return CensusResult(
        config,
        list(zip(cps, counts)),
        listed,
        counts[-1] > len(listed),
        successes,
        failures,
        rows,
    )


def _witness(d: int, config: CensusConfig):
    if not integral_adeles_empty(6 * d):
        return None
    try:
        if prop41_hypotheses(d) is None:
            return prop41_witness(d, config.weights)
        # the divisor-of-d variant need not meet the m - 121 hypothesis
        return generic_shape_solve(6 * d, config.weights, 3, 11)
    except BudgetExceeded:
        return None


# -- star condition ---------------------------------------------------------------


@dataclass(frozen=True)
class StarScan:
    bound: int
    failures: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.failures)

    @property
    def quarter_power(self) -> float:
        return self.bound**0.25


def star_failure_scan(bound: int) -> StarScan:
    """All m with 0 < |m| <= bound, m != 4, at which the star condition fails.

    Only m = 4 - c^2 can fail (elsewhere the condition holds vacuously), so
    those are the values evaluated.
    """
    if bound > 10**6:
        raise ValueError("bound must be <= 10^6")
    out = []
    c = 1
    while c * c - 4 <= bound:
        m = 4 - c * c
        if m != 0 and abs(m) <= bound and star_condition(m).verdict is StarVerdict.FAILS:
            out.append(m)
        c += 1
    return StarScan(bound, tuple(sorted(out)))
