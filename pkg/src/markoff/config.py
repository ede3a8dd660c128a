"""Computation budgets shared by the arithmetic and form-enumeration layers.

The defaults can be overridden through the ``MARKOFF_BUDGET`` environment
variable, e.g. ``MARKOFF_BUDGET="factor_bits=80,disc=2000000"``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


class BudgetExceeded(RuntimeError):
    """A computation would exceed the configured budget."""


@dataclass(frozen=True)
class Budget:
    # composites left after trial division must fit in this many bits
    factor_bits: int = 64
    trial_limit: int = 10**6
    # |D| bound for reduced-form enumeration
    disc: int = 10**6
    # entries per census sieve block
    sieve_block: int = 2**22


_KEYS = {"factor_bits", "trial_limit", "disc", "sieve_block"}


def parse_budget(text: str, base: Budget | None = None) -> Budget:
    base = base or Budget()
    changes = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in _KEYS:
            raise ValueError(f"bad MARKOFF_BUDGET entry: {item!r}")
        changes[key] = int(float(value))
    return replace(base, **changes)


def current_budget() -> Budget:
    text = os.environ.get("MARKOFF_BUDGET", "")
    return parse_budget(text) if text else Budget()
