"""Exact integer arithmetic: extended gcd, CRT, primes, primorials, factoring.

Everything here works with arbitrary-precision integers and is deterministic.
Operations that could run away on absurd input take explicit caps and raise
:class:`~jacobsthal.errors.BudgetExceeded` instead of silently grinding.
"""

from __future__ import annotations

import math
import threading
from bisect import bisect_right
from dataclasses import dataclass
from functools import reduce

from .errors import BudgetExceeded, NonCoprimeModuli

# Deterministic Miller-Rabin witness set: the first 13 primes decide
# primality correctly for every n below this bound (Sorenson/Webster).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_LIMIT = 3_317_044_064_679_887_385_961_981

_SIEVE_CAP = 80_000_000  # largest bound primes_upto will sieve
_NTH_CAP = 4_000_000  # largest index nth_prime will serve


def ext_gcd(x: int, y: int) -> tuple[int, int, int]:
    """Return ``(g, u, v)`` with ``g = gcd(x, y) >= 0`` and ``u*x + v*y = g``.

    ``ext_gcd(0, 0)`` returns ``(0, 0, 0)``.
    """
    old_r, r = x, y
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    if old_r < 0:
        old_r, old_u, old_v = -old_r, -old_u, -old_v
    if old_r == 0:
        return 0, 0, 0
    return old_r, old_u, old_v


def crt_solve(congruences) -> tuple[int, int]:
    """Solve ``x ≡ r_i (mod m_i)`` for pairwise coprime moduli.

    Returns ``(c, M)`` where ``M`` is the product of the moduli and ``c`` is
    the least nonnegative solution.  An empty system yields ``(0, 1)``.
    Raises :class:`NonCoprimeModuli` when two moduli share a factor.
    """
    c, modulus = 0, 1
    for residue, m in congruences:
        if m < 1:
            raise ValueError(f"modulus must be positive, got {m}")
        g, inv, _ = ext_gcd(modulus % m, m)
        if g != 1:
            raise NonCoprimeModuli(f"moduli are not pairwise coprime (gcd {g})")
        # c' = c (mod modulus), c' = residue (mod m)
        t = ((residue - c) * inv) % m
        c = c + modulus * t
        modulus *= m
    return c % modulus, modulus


# --- prime generation -------------------------------------------------------

_prime_lock = threading.Lock()
_primes: list[int] = []
_sieved_to = 1


def _sieve(bound: int) -> list[int]:
    flags = bytearray([1]) * (bound + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(bound) + 1):
        if flags[p]:
            flags[p * p :: p] = b"\x00" * ((bound - p * p) // p + 1)
    return [i for i, f in enumerate(flags) if f]


def _ensure_sieved(bound: int) -> None:
    global _primes, _sieved_to
    if bound <= _sieved_to:
        return
    if bound > _SIEVE_CAP:
        raise BudgetExceeded(f"refusing to sieve beyond {_SIEVE_CAP}")
    with _prime_lock:
        if bound > _sieved_to:
            target = max(bound, min(2 * _sieved_to, _SIEVE_CAP), 1 << 16)
            # swap in a fresh list so concurrent readers see a consistent one
            _primes = _sieve(target)
            _sieved_to = target


def primes_upto(bound: int) -> list[int]:
    """All primes ``<= bound`` in ascending order."""
    if bound < 2:
        return []
    _ensure_sieved(bound)
    table = _primes
    return table[: bisect_right(table, bound)]


def nth_prime(k: int) -> int:
    """The k-th prime, 1-indexed: ``nth_prime(1) == 2``."""
    if k < 1:
        raise ValueError(f"prime index must be >= 1, got {k}")
    if k > _NTH_CAP:
        raise BudgetExceeded(f"prime index {k} beyond supported cap {_NTH_CAP}")
    if k <= len(_primes):
        return _primes[k - 1]
    # Rosser-style upper bound on p_k, padded for small k
    est = 100 if k < 6 else int(k * (math.log(k) + math.log(math.log(k)))) + 10
    _ensure_sieved(est)
    while k > len(_primes):  # estimate was short (should not happen)
        _ensure_sieved(_sieved_to * 2)
    return _primes[k - 1]


def first_primes(k: int) -> tuple[int, ...]:
    """The first ``k`` primes as a tuple."""
    if k < 0:
        raise ValueError(f"count must be >= 0, got {k}")
    if k == 0:
        return ()
    nth_prime(k)
    return tuple(_primes[:k])


def primorial(k: int) -> int:
    """Product of the first ``k`` primes (``primorial(0) == 1``)."""
    return reduce(lambda acc, p: acc * p, first_primes(k), 1)


def is_prime(n: int) -> bool:
    """Deterministic primality test, exact for ``n < 3.3e24``.

    Inputs past the proven witness range raise :class:`BudgetExceeded`
    rather than return a probabilistic answer.
    """
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    if n >= _MR_LIMIT:
        raise BudgetExceeded(f"{n} exceeds the deterministic primality range")
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in _MR_WITNESSES:
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


@dataclass(frozen=True)
class Factorization:
    """Prime factorization ``base = ∏ p**e`` with ascending distinct primes."""

    base: int
    factors: tuple[tuple[int, int], ...]

    def radical(self) -> int:
        r = 1
        for p, _ in self.factors:
            r *= p
        return r

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def product(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out


def _rho_brent(n: int, max_steps: int) -> int | None:
    # Brent's cycle variant of Pollard rho; deterministic seed ladder.
    for c in range(1, 20):
        y, m, g, r, q = 2, 128, 1, 1, 1
        steps = 0
        x = ys = y
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
            steps += r
            if steps > max_steps:
                return None
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    return None


def factorize(n: int, *, trial_bound: int = 100_000, rho_steps: int = 1_000_000) -> Factorization:
    """Factor ``n >= 1`` by trial division, then verified Pollard rho.

    Every reported prime is confirmed with the deterministic test and the
    product is checked against ``n``.  Hard leftovers (e.g. wide semiprimes)
    raise :class:`BudgetExceeded` rather than stall.
    """
    if n < 1:
        raise ValueError(f"can only factor positive integers, got {n}")
    if n == 1:
        return Factorization(1, ())
    counts: dict[int, int] = {}
    m = n
    for p in primes_upto(trial_bound):
        if p * p > m:
            break
        while m % p == 0:
            counts[p] = counts.get(p, 0) + 1
            m //= p
    pending = [m] if m > 1 else []
    while pending:
        v = pending.pop()
        if v == 1:
            continue
        if is_prime(v):
            counts[v] = counts.get(v, 0) + 1
            continue
        d = _rho_brent(v, rho_steps)
        if d is None or d == v:
            raise BudgetExceeded(f"failed to split composite {v} within budget")
        pending.extend((d, v // d))
    factors = tuple(sorted((p, e) for p, e in counts.items()))
    result = Factorization(n, factors)
    assert result.product() == n
    return result


def radical(n: int) -> int:
    """Product of the distinct primes dividing ``n`` (``radical(1) == 1``)."""
    return factorize(n).radical()
