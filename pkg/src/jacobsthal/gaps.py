"""Longest runs of consecutive integers sharing a factor with n.

``g_of(n)`` is the classical Jacobsthal function: the least m such that any
m consecutive integers contain one coprime to n.  It depends only on the
radical of n, so the scan works over one period of rad(n).  ``g_exhaustive``
is a deliberately naive rescan kept as an independent oracle for tests.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import cover
from .arith import factorize
from .errors import BudgetExceeded

DEFAULT_SCAN_LIMIT = 20_000_000
DEFAULT_MAX_SUPPORT = 25
_RUN = re.compile(b"\x01+")


@dataclass(frozen=True)
class GapScanResult:
    """Value of g(n) plus the witness run of ``g - 1`` non-coprime integers.

    Both neighbors of the run (``witness_start - 1`` and
    ``witness_start + witness_length``) are coprime to n; for ``g == 1``
    the run is empty.
    """

    n: int
    g: int
    witness_start: int
    witness_length: int


def _shared_factor_flags(primes, limit: int) -> bytearray:
    """flags[i] == 1 iff some p in primes divides i, for 0 <= i <= limit."""
    flags = bytearray(limit + 1)
    for p in primes:
        flags[p::p] = b"\x01" * (limit // p)
    return flags


def g_of(n: int, *, scan_limit: int = DEFAULT_SCAN_LIMIT,
         max_support: int = DEFAULT_MAX_SUPPORT,
         budget: "cover.SearchBudget | None" = None) -> GapScanResult:
    """Compute g(n) with a maximal witness run.

    Small radicals are scanned directly, which also yields the run with the
    smallest positive start.  When rad(n) exceeds ``scan_limit`` but n has
    few distinct primes, the exact cover engine takes over; its witness is
    deterministic and verified but not necessarily the least one.
    """
    if n < 1:
        raise ValueError(f"g(n) is defined for n >= 1, got {n}")
    fac = factorize(n)
    rad = fac.radical()
    if rad == 1:
        return GapScanResult(n, 1, 1, 0)
    primes = fac.primes()
    if rad <= scan_limit:
        flags = _shared_factor_flags(primes, rad)
        best = None  # (length, start)
        for m in _RUN.finditer(bytes(flags)):
            length = m.end() - m.start()
            if best is None or length > best[0]:
                best = (length, m.start())
        length, start = best  # rad >= 2 always has the run ending at rad
        return GapScanResult(n, length + 1, start, length)
    if len(primes) > max_support:
        raise BudgetExceeded(
            f"rad(n) = {rad} exceeds the scan limit and n has {len(primes)} "
            f"distinct primes (engine handles at most {max_support})")
    length, assignment = cover.max_cover_length(primes, budget=budget)
    witness = cover.witness_integer(assignment)
    return GapScanResult(n, length + 1, witness.start, length)


def g_exhaustive(n: int, horizon: int | None = None, *,
                 limit: int = 50_000_000) -> int:
    """Oracle: directly scan ``1..horizon`` for the longest non-coprime run.

    ``horizon`` defaults to ``2 * rad(n)`` and must be at least that, so a
    full period plus slack is always inspected.
    """
    if n < 1:
        raise ValueError(f"g(n) is defined for n >= 1, got {n}")
    fac = factorize(n)
    rad = fac.radical()
    if rad == 1:
        return 1
    if horizon is None:
        horizon = 2 * rad
    if horizon < 2 * rad:
        raise ValueError(f"horizon {horizon} < 2*rad(n) = {2 * rad}")
    if horizon > limit:
        raise BudgetExceeded(f"horizon {horizon} exceeds the scan limit {limit}")
    flags = _shared_factor_flags(fac.primes(), horizon)
    longest = max(m.end() - m.start() for m in _RUN.finditer(bytes(flags)))
    return longest + 1
