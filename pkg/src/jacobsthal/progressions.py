"""Arithmetic progressions, lazy segments, and coprimality-preserving maps.

The map ``n -> c + d*n`` is an order isomorphism from the integers onto the
progression ``(c mod d) + dZ``.  When c is chosen so that every prime q in a
set S either divides d or divides c, the map also preserves coprimality to
the primes of S in both directions — coprime inputs land on coprime images.
That choice is a CRT computation, done in :func:`coprime_iso`.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, prod

from .arith import crt_solve, is_prime
from .errors import NotEligible, NotInProgression


@dataclass(frozen=True)
class EligibleAP:
    """Normalized progression a + dZ with ``0 <= a < d`` and ``gcd(a, d) = 1``.

    ``a == 0`` only occurs for d = 1 (the whole line).  Use
    :func:`make_eligible` to normalize arbitrary residues first.
    """

    a: int
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"modulus must be >= 1, got {self.d}")
        if not 0 <= self.a < self.d:
            raise ValueError(
                f"residue {self.a} not normalized for modulus {self.d}")
        if gcd(self.a, self.d) != 1:
            raise NotEligible(
                f"gcd({self.a}, {self.d}) > 1: the progression contains at "
                f"most one prime and is out of scope")

    def __contains__(self, x: int) -> bool:
        return x % self.d == self.a

    def __str__(self) -> str:
        return f"{self.a}+{self.d}Z"


def make_eligible(a: int, d: int) -> EligibleAP:
    """Normalize ``a`` modulo ``d`` and validate eligibility.

    >>> str(make_eligible(9, 7))
    '2+7Z'
    """
    if d < 1:
        raise ValueError(f"modulus must be >= 1, got {d}")
    return EligibleAP(a % d, d)


@dataclass(frozen=True)
class Segment:
    """Finite arithmetic slice ``first, first+step, ...`` of given length,
    never materialized."""

    first: int
    step: int
    length: int

    def __post_init__(self):
        if self.step < 1:
            raise ValueError(f"step must be >= 1, got {self.step}")
        if self.length < 0:
            raise ValueError(f"length must be >= 0, got {self.length}")

    @property
    def last(self) -> int:
        if self.length == 0:
            raise ValueError("empty segment has no last element")
        return self.first + (self.length - 1) * self.step

    def __len__(self) -> int:
        return self.length

    def __iter__(self):
        value = self.first
        for _ in range(self.length):
            yield value
            value += self.step

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self.length
        if not 0 <= i < self.length:
            raise IndexError(i)
        return self.first + i * self.step

    def __contains__(self, x: int) -> bool:
        offset = x - self.first
        return (self.length > 0 and offset % self.step == 0
                and 0 <= offset // self.step < self.length)


@dataclass(frozen=True)
class ApIso:
    """The affine map ``n -> c + d*n`` onto the progression (c mod d) + dZ.

    ``primes`` records the prime set whose coprimality the map is meant to
    preserve; :func:`coprime_iso` constructs instances that actually do.
    Nothing stops direct construction with an arbitrary c — that is how the
    window check below gets exercised with maps that do *not* preserve
    coprimality.
    """

    c: int
    d: int
    primes: tuple[int, ...] = ()

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"modulus must be >= 1, got {self.d}")

    @property
    def a(self) -> int:
        return self.c % self.d

    @property
    def target(self) -> EligibleAP:
        return EligibleAP(self.c % self.d, self.d)

    def apply(self, n: int) -> int:
        return self.c + self.d * n

    __call__ = apply

    def invert(self, x: int) -> int:
        offset = x - self.c
        if offset % self.d:
            raise NotInProgression(f"{x} is not in {self.a}+{self.d}Z")
        return offset // self.d


def coprime_iso(ap: EligibleAP, primes) -> ApIso:
    """Construct the canonical map onto ``ap`` preserving coprimality to
    ``primes``: c is the least nonnegative solution of ``c ≡ a (mod d)`` and
    ``c ≡ 0 (mod q)`` for every q in ``primes`` not dividing d.

    >>> coprime_iso(make_eligible(1, 3), (2, 3)).c
    4
    """
    ps = tuple(sorted(primes))
    if len(set(ps)) != len(ps):
        raise ValueError("primes must be distinct")
    for q in ps:
        if not is_prime(q):
            raise ValueError(f"{q} is not prime")
    congruences = [(ap.a, ap.d)]
    congruences += [(0, q) for q in ps if ap.d % q != 0]
    c, _ = crt_solve(congruences)
    return ApIso(c, ap.d, ps)


def preimage_segment(iso: ApIso, segment: Segment) -> Segment:
    """Pull a segment of the target progression back to consecutive integers.

    The segment must step by ``iso.d`` and lie inside the progression; the
    result has the same length and step 1.
    """
    if segment.length == 0:
        return Segment(0, 1, 0)
    if segment.step != iso.d:
        raise NotInProgression(
            f"segment steps by {segment.step}, the progression by {iso.d}")
    return Segment(iso.invert(segment.first), 1, segment.length)


def is_coprime_preserving_on_window(iso: ApIso, window: int) -> bool:
    """Check on ``|n| <= window`` that inputs coprime to all of ``iso.primes``
    map to images coprime to them as well.

    Coprimality to the (squarefree) product is periodic, so once the window
    covers a full period the scan drops to one period — same verdict, less
    work — and the verdict then holds for every integer.
    """
    if window < 0:
        raise ValueError(f"window must be >= 0, got {window}")
    modulus = prod(iso.primes)
    if modulus == 1:
        return True
    if window >= modulus - 1:
        candidates = range(modulus)
    else:
        candidates = range(-window, window + 1)
    apply, d, c = iso.apply, iso.d, iso.c
    for n in candidates:
        if gcd(n, modulus) == 1 and gcd(c + d * n, modulus) != 1:
            return False
    return True


def segment_of_ap_in_range(ap: EligibleAP, lo: int, hi: int) -> Segment:
    """Elements of the progression inside ``[lo, hi]`` as a segment
    (possibly empty).  Requires ``lo <= hi + 1``.
    """
    if lo > hi + 1:
        raise ValueError(f"empty range bounds out of order: [{lo}, {hi}]")
    first = lo + (ap.a - lo) % ap.d
    if first > hi:
        return Segment(first, ap.d, 0)
    return Segment(first, ap.d, (hi - first) // ap.d + 1)
