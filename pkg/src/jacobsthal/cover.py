"""Exact residue covers of integer intervals by prime sets.

A length-L cover assigns each prime p an offset c_p so that every position
in ``[0, L)`` is ≡ c_p (mod p) for some p; equivalently, L consecutive
integers can each be divisible by one of the primes.  The largest coverable
L for the first k primes is exactly ``h(k) - 1``, where h is the primorial
Jacobsthal function.  The search below is exact: a ``None`` answer is a
proof of impossibility, and budget exhaustion raises instead of answering.
"""

from __future__ import annotations

import re
import threading
import time
from dataclasses import dataclass, field
from importlib import resources
from math import gcd, prod

from .arith import crt_solve, first_primes, is_prime, nth_prime
from .errors import (BudgetExceeded, TableParseError, TableValidationError,
                     Unavailable)

HSOURCE_PAPER = "paper"
HSOURCE_COMPUTED = "computed"
HSOURCE_INGESTED = "ingested"
H_SOURCES = frozenset({HSOURCE_PAPER, HSOURCE_COMPUTED, HSOURCE_INGESTED})

STRATEGY_POSITIONS = "positions"
STRATEGY_PRIME_ORDER = "prime-order"
STRATEGY_WHEEL = "wheel"
DEFAULT_STRATEGY = STRATEGY_WHEEL
STRATEGIES = (STRATEGY_WHEEL, STRATEGY_POSITIONS, STRATEGY_PRIME_ORDER)

# Largest product of small primes whose offsets the wheel strategy
# enumerates outright before falling back to the positions search.
WHEEL_PRODUCT_CAP = 30030

DEFAULT_MAX_COMPUTE_K = 12
LEAST_RUN_SIEVE_LIMIT = 20_000_000


@dataclass(frozen=True)
class CoverAssignment:
    """Offsets ``offsets[i]`` for ``primes[i]`` covering ``[0, length)``."""

    primes: tuple[int, ...]
    offsets: tuple[int, ...]
    length: int

    def offset_of(self, p: int) -> int:
        return self.offsets[self.primes.index(p)]

    def offset_map(self) -> dict[int, int]:
        return dict(zip(self.primes, self.offsets))

    def covers(self, position: int) -> bool:
        return any((position - c) % p == 0
                   for p, c in zip(self.primes, self.offsets))

    def is_valid(self) -> bool:
        return all(self.covers(i) for i in range(self.length))


@dataclass(frozen=True)
class CoverWitness:
    """``length`` consecutive integers from ``start``, each divisible by an
    assigned prime; equivalently a concrete non-coprime run."""

    start: int
    length: int
    assignment: CoverAssignment


@dataclass
class SearchBudget:
    """Optional limits for the exact search; hitting one raises
    :class:`BudgetExceeded` (never a fake negative)."""

    max_nodes: int | None = None
    max_seconds: float | None = None


@dataclass
class ComputePolicy:
    """Controls when missing h(k) values may be computed by the engine."""

    allow_compute: bool = True
    max_compute_k: int = DEFAULT_MAX_COMPUTE_K
    budget: SearchBudget | None = None
    strategy: str = DEFAULT_STRATEGY


def _validated_primes(primes) -> tuple[int, ...]:
    ps = tuple(sorted(primes))
    if not ps:
        raise ValueError("need at least one prime")
    if len(set(ps)) != len(ps):
        raise ValueError("primes must be distinct")
    for p in ps:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
    return ps


class _Search:
    """One exact cover search over a fixed interval length and prime set."""

    def __init__(self, length: int, primes: tuple[int, ...],
                 budget: SearchBudget | None):
        self.length = length
        self.primes = primes
        self.even = length % 2 == 0
        self.full = (1 << length) - 1
        masks = []
        for p in primes:
            base = 0
            for pos in range(0, length, p):
                base |= 1 << pos
            masks.append(tuple((base << c) & self.full for c in range(p)))
        self.masks = masks
        self.nodes = 0
        self.max_nodes = budget.max_nodes if budget else None
        self.deadline = (time.monotonic() + budget.max_seconds
                         if budget and budget.max_seconds is not None else None)

    def _tick(self) -> None:
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise BudgetExceeded(f"cover search passed {self.max_nodes} nodes")
        if (self.deadline is not None and self.nodes % 1024 == 0
                and time.monotonic() > self.deadline):
            raise BudgetExceeded("cover search passed its time budget")

    def _cap(self, i: int, uncov: int, known: int) -> int:
        """Max uncovered positions one offset of primes[i] can hit;
        ``known`` is a proven upper bound from an ancestor node."""
        p = self.primes[i]
        if p >= self.length:
            return 1
        if 2 * p >= self.length:  # residue classes hold at most two positions
            return 2 if (uncov & (uncov >> p)) else 1
        best = 1
        for mask in self.masks[i]:
            hits = (mask & uncov).bit_count()
            if hits > best:
                best = hits
                if best >= known:
                    return known
        return best

    def _capacity_prune(self, uncov: int, rem, caps: list[int], need: int) -> bool:
        """True when remaining primes provably cannot cover ``need`` positions.
        Tightens cached caps lazily and stops as soon as pruning is ruled out."""
        total = 0
        for i in rem:
            c = caps[i]
            if c > 1:
                c = caps[i] = self._cap(i, uncov, c)
            total += c
            if total >= need:
                return False
        return True

    def _finish(self, uncov: int, rem) -> dict[int, int]:
        # Any prime can take any single position, so |uncovered| <= |rem|
        # is immediately feasible: hand out one position per prime.
        offsets: dict[int, int] = {}
        rem = list(rem)
        j = 0
        while uncov:
            pos = (uncov & -uncov).bit_length() - 1
            uncov &= uncov - 1
            p = self.primes[rem[j]]
            offsets[p] = pos % p
            j += 1
        for i in rem[j:]:
            offsets[self.primes[i]] = 0
        return offsets

    # -- strategy "positions": branch on who covers the leftmost hole --------

    def search_positions(self) -> dict[int, int] | None:
        caps = [-(-self.length // p) for p in self.primes]
        return self._dfs_pos(self.full, tuple(range(len(self.primes))), caps)

    def _dfs_pos(self, uncov: int, rem: tuple[int, ...],
                 caps: list[int]) -> dict[int, int] | None:
        self._tick()
        need = uncov.bit_count()
        if need <= len(rem):
            return self._finish(uncov, rem)
        caps = caps[:]
        if self._capacity_prune(uncov, rem, caps, need):
            return None
        u0 = (uncov & -uncov).bit_length() - 1
        branches = []
        for i in rem:
            p = self.primes[i]
            if p == 2 and self.even and u0 & 1:
                # Reflection x -> length-1-x maps covers to covers and swaps
                # the two offsets of 2 when length is even, so offset 0 for
                # prime 2 loses no decisions.
                continue
            mask = self.masks[i][u0 % p]
            branches.append(((mask & uncov).bit_count(), -p, i, mask))
        branches.sort(reverse=True)  # biggest bite first, small prime on ties
        for _, _, i, mask in branches:
            rest = tuple(x for x in rem if x != i)
            sub = self._dfs_pos(uncov & ~mask, rest, caps)
            if sub is not None:
                p = self.primes[i]
                sub[p] = u0 % p
                return sub
        return None

    # -- strategy "wheel": enumerate small-prime offsets, then positions -----
    #
    # The capacity bound is nearly useless while the small primes are
    # unassigned (their caps dwarf the interval), but once they are fixed the
    # surviving positions are sparse and the bound on the remaining primes is
    # close to tight.  So enumerate the offset combinations of a prefix of
    # small primes directly and run the positions search on each survivor
    # set; most combinations die on the first capacity check.

    def search_wheel(self) -> dict[int, int] | None:
        width, product = 0, 1
        while (width < len(self.primes)
               and product * self.primes[width] <= WHEEL_PRODUCT_CAP
               and self.primes[width] <= self.length // 4):
            product *= self.primes[width]
            width += 1
        if width == 0:
            return self.search_positions()
        # Reflection x -> length-1-x maps covers to covers, acting on each
        # offset as c -> (length-1-c) mod p.  Keep one offset per orbit at
        # the first wheel prime the action moves (it fixes offsets of 2
        # exactly when the length is odd).
        cut = 0
        if self.primes[0] == 2 and self.length % 2 == 1:
            cut = 1 if width > 1 else -1
        rem = tuple(range(width, len(self.primes)))
        caps = [-(-self.length // p) for p in self.primes]
        return self._wheel_rec(0, width, cut, self.full, [0] * width, rem,
                               caps)

    def _wheel_rec(self, j: int, width: int, cut: int, uncov: int,
                   offsets: list[int], rem: tuple[int, ...],
                   caps: list[int]) -> dict[int, int] | None:
        if j == width:
            self._tick()
            sub = self._dfs_pos(uncov, rem, caps)
            if sub is None:
                return None
            for i in range(width):
                sub[self.primes[i]] = offsets[i]
            return sub
        p = self.primes[j]
        seen: set[int] = set()
        for c in range(p):
            if j == cut and c > (self.length - 1 - c) % p:
                continue
            left = uncov & ~self.masks[j][c]
            if left in seen:  # identical survivor set, identical subtree
                continue
            seen.add(left)
            offsets[j] = c
            found = self._wheel_rec(j + 1, width, cut, left, offsets, rem,
                                    caps)
            if found is not None:
                return found
        return None

    # -- strategy "prime-order": assign offsets to primes smallest-first -----

    def search_prime_order(self) -> dict[int, int] | None:
        caps = [-(-self.length // p) for p in self.primes]
        return self._dfs_po(self.full, 0, caps)

    def _dfs_po(self, uncov: int, idx: int,
                caps: list[int]) -> dict[int, int] | None:
        self._tick()
        need = uncov.bit_count()
        rem = range(idx, len(self.primes))
        if need <= len(rem):
            return self._finish(uncov, rem)
        caps = caps[:]
        if self._capacity_prune(uncov, rem, caps, need):
            return None
        p = self.primes[idx]
        seen: dict[int, int] = {}
        for c in range(p):
            if idx == 0 and c > (self.length - 1 - c) % p:
                continue  # keep one offset per reflection orbit at the root
            hit = self.masks[idx][c] & uncov
            if hit and hit not in seen:
                # Offsets hitting nothing new never help (coverage is
                # monotone), and equal hit sets give identical subproblems.
                seen[hit] = c
        for hit, c in sorted(seen.items(), key=lambda kv: -kv[0].bit_count()):
            sub = self._dfs_po(uncov & ~self.masks[idx][c], idx + 1, caps)
            if sub is not None:
                sub[p] = c
                return sub
        return None


def coverable(length: int, primes, budget: SearchBudget | None = None,
              strategy: str = DEFAULT_STRATEGY) -> CoverAssignment | None:
    """Exact decision: return a covering assignment for ``[0, length)`` or
    ``None`` when none exists.  Deterministic for fixed inputs."""
    ps = _validated_primes(primes)
    if length < 0:
        raise ValueError(f"length must be >= 0, got {length}")
    if length == 0:
        return CoverAssignment(ps, (0,) * len(ps), 0)
    search = _Search(length, ps, budget)
    if strategy == STRATEGY_WHEEL:
        found = search.search_wheel()
    elif strategy == STRATEGY_POSITIONS:
        found = search.search_positions()
    elif strategy == STRATEGY_PRIME_ORDER:
        found = search.search_prime_order()
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if found is None:
        return None
    assignment = CoverAssignment(ps, tuple(found[p] for p in ps), length)
    assert assignment.is_valid()
    return assignment


def _extended(assignment: CoverAssignment) -> CoverAssignment | None:
    """Reuse an assignment for length L as one for L+1 when it already
    happens to cover position L."""
    if assignment.covers(assignment.length):
        return CoverAssignment(assignment.primes, assignment.offsets,
                               assignment.length + 1)
    return None


def max_cover_length(primes, budget: SearchBudget | None = None,
                     strategy: str = DEFAULT_STRATEGY
                     ) -> tuple[int, CoverAssignment]:
    """Largest coverable length L* for this prime set, with a witness.

    Starts from the elementary lower bound ``2*p_{k-1} - 1`` when given the
    first k primes and walks upward; the final refusal at L*+1 is an
    exhaustive proof.  L* is deterministic; the witness is one valid choice.
    """
    ps = _validated_primes(primes)
    k = len(ps)
    start = 2 * ps[-2] - 1 if k >= 2 and ps == first_primes(k) else 1
    assignment = coverable(start, ps, budget=budget, strategy=strategy)
    if assignment is None:  # cannot happen: start is a proven lower bound
        raise AssertionError(f"lower bound {start} not coverable for {ps}")
    length = start
    while True:
        longer = _extended(assignment)
        if longer is None:
            longer = coverable(length + 1, ps, budget=budget, strategy=strategy)
        if longer is None:
            return length, assignment
        assignment = longer
        length += 1


def verify_cover(start: int, length: int, primes) -> bool:
    """Check that ``start .. start+length-1`` each share a factor with the
    product of ``primes``.  Empty runs are trivially valid."""
    ps = _validated_primes(primes)
    modulus = prod(ps)
    return all(gcd(x, modulus) > 1 for x in range(start, start + length))


def witness_integer(assignment: CoverAssignment) -> CoverWitness:
    """Concrete run realizing an assignment: the least positive start with
    ``start + i ≡ 0 (mod p)`` whenever position i is assigned to p."""
    congruences = [(-c % p, p) for p, c in
                   zip(assignment.primes, assignment.offsets)]
    start, modulus = crt_solve(congruences)
    if start == 0:
        start = modulus
    witness = CoverWitness(start, assignment.length, assignment)
    assert verify_cover(start, assignment.length, assignment.primes)
    return witness


def least_witness(length: int, primes,
                  sieve_limit: int = LEAST_RUN_SIEVE_LIMIT) -> CoverWitness | None:
    """The earliest positive run of ``length`` integers each divisible by one
    of ``primes``, found by direct sieve.  ``None`` when the period is too
    large to sieve or no such run exists in one period."""
    ps = _validated_primes(primes)
    if length == 0:
        return witness_integer(CoverAssignment(ps, (0,) * len(ps), 0))
    period = prod(ps)
    if period + length > sieve_limit:
        return None
    limit = period + length
    flags = bytearray(limit + 1)
    for p in ps:
        flags[p::p] = b"\x01" * (limit // p)
    match = re.search(b"\x01{%d}" % length, bytes(flags))
    if match is None or match.start() > period:
        return None
    start = match.start()
    offsets = tuple(-start % p for p in ps)
    return CoverWitness(start, length,
                        CoverAssignment(ps, offsets, length))


def elementary_lower_witness(n: int) -> CoverWitness:
    """A run of ``2*p_{n-1} - 1`` consecutive integers, each divisible by one
    of the first n primes, centered on a CRT-constructed integer.

    Construction: pick t ≡ 0 modulo every prime up to p_{n-2}, t ≡ 1 mod
    p_{n-1} and t ≡ -1 mod p_n.  Then t±1 are caught by the two largest
    primes and every other offset j has a prime factor <= p_{n-2} (there are
    no primes strictly between p_{n-2} and p_{n-1}).  Requires n >= 3.
    """
    if n < 3:
        raise ValueError(f"the construction needs n >= 3, got {n}")
    ps = first_primes(n)
    p_second = ps[-2]
    small_modulus = prod(ps[:-2])
    t, _ = crt_solve([(0, small_modulus), (1, p_second), (-1 % ps[-1], ps[-1])])
    length = 2 * p_second - 1
    start = t - (p_second - 1)
    offsets = tuple(-start % p for p in ps)
    assignment = CoverAssignment(ps, offsets, length)
    witness = CoverWitness(start, length, assignment)
    assert verify_cover(start, length, ps)
    return witness


# --- known-value table -------------------------------------------------------


@dataclass(frozen=True)
class HEntry:
    h: int
    source: str
    witness: CoverWitness | None = None


def _validate_h(k: int, h: int) -> None:
    if k < 1:
        raise TableValidationError(f"index k must be >= 1, got {k}")
    if h < 2:
        raise TableValidationError(f"h({k}) = {h} is impossible (h >= 2)")
    if k >= 2 and h < 2 * nth_prime(k - 1):
        raise TableValidationError(
            f"h({k}) = {h} violates the elementary bound 2*p_{k - 1} = "
            f"{2 * nth_prime(k - 1)}")


class KnownHTable:
    """Known values of the primorial Jacobsthal function h(k).

    Read-mostly; writes go through :meth:`set` under a lock, and entries
    computed by the engine carry their verified witness in memory (the text
    format only persists ``k,h,source``).
    """

    def __init__(self, entries: dict[int, HEntry] | None = None):
        self._entries: dict[int, HEntry] = dict(entries or {})
        self._lock = threading.Lock()
        for k, e in self._entries.items():
            _validate_h(k, e.h)

    def get(self, k: int) -> HEntry | None:
        return self._entries.get(k)

    def set(self, k: int, h: int, source: str,
            witness: CoverWitness | None = None) -> None:
        if source not in H_SOURCES:
            raise TableValidationError(f"unknown source {source!r}")
        _validate_h(k, h)
        if witness is not None and witness.length != h - 1:
            raise TableValidationError(
                f"witness length {witness.length} does not match h-1 = {h - 1}")
        with self._lock:
            self._entries[k] = HEntry(h, source, witness)

    def ks(self) -> list[int]:
        return sorted(self._entries)

    def rows(self) -> list[tuple[int, int, str]]:
        return [(k, self._entries[k].h, self._entries[k].source)
                for k in self.ks()]

    def __contains__(self, k: int) -> bool:
        return k in self._entries

    def __len__(self) -> int:
        return len(self._entries)


def _parse_h_table(lines) -> KnownHTable:
    table = KnownHTable()
    seen: set[int] = set()
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise TableParseError(f"expected 'k,h,source', got {line!r}", number)
        try:
            k, h = int(parts[0]), int(parts[1])
        except ValueError:
            raise TableParseError(f"k and h must be integers, got {line!r}",
                                  number) from None
        if parts[2] not in H_SOURCES:
            raise TableParseError(f"unknown source {parts[2]!r}", number)
        if k in seen:
            raise TableParseError(f"duplicate entry for k = {k}", number)
        seen.add(k)
        table.set(k, h, parts[2])
    return table


def load_h_table(path) -> KnownHTable:
    """Parse a ``k,h,source`` table file ('#' comments allowed)."""
    with open(path, "r", encoding="ascii") as fh:
        return _parse_h_table(fh)


def save_h_table(table: KnownHTable, path) -> None:
    """Write a table in the same ``k,h,source`` format ``load_h_table`` reads.

    In-memory witnesses are not part of the format and are dropped.
    """
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# k,h,source  where source is one of "
                 "paper|computed|ingested\n")
        for k, h, source in table.rows():
            fh.write(f"{k},{h},{source}\n")


def default_h_table() -> KnownHTable:
    """Fresh copy of the table shipped with the package."""
    text = resources.files("jacobsthal").joinpath("data/h_table.txt").read_text()
    return _parse_h_table(text.splitlines())


def h_of(k: int, table: KnownHTable | None = None,
         policy: ComputePolicy | None = None) -> tuple[int, str]:
    """Exact h(k): from the table when present, else computed by the engine
    (and inserted into the table with a verified witness)."""
    if k < 1:
        raise ValueError(f"h(k) is defined for k >= 1, got {k}")
    if table is None:
        table = default_h_table()
    if policy is None:
        policy = ComputePolicy()
    entry = table.get(k)
    if entry is not None:
        return entry.h, entry.source
    if not policy.allow_compute:
        raise Unavailable(f"h({k}) is not tabulated and computing is disabled")
    if k > policy.max_compute_k:
        raise Unavailable(
            f"h({k}) is not tabulated and k exceeds the compute cap "
            f"{policy.max_compute_k}")
    length, assignment = max_cover_length(first_primes(k),
                                          budget=policy.budget,
                                          strategy=policy.strategy)
    witness = witness_integer(assignment)
    table.set(k, length + 1, HSOURCE_COMPUTED, witness=witness)
    return length + 1, HSOURCE_COMPUTED
