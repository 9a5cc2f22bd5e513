"""Constructive certified primes in eligible arithmetic progressions.

The engine rests on two exact ingredients.  First, a primality criterion
by windowed coprimality: if ``2 <= x < p_{k+1}**2`` and x is coprime to the
product of the first k primes, then x is prime (any proper factorization
would need a prime below p_{k+1} twice over).  Second, runs of integers
sharing a factor with that product have length at most ``h(k) - 1``, so any
``h(k)`` consecutive integers contain one coprime to it.  Mapping integers
onto a progression with a coprimality-preserving affine map turns the run
bound into: whenever ``(p_{k+1}**2 - 2) / (h(k) + 1) >= d``, the progression
``a + dZ`` contains a certified prime below ``p_{k+1}**2``, found by a short
scan.  Everything a certificate claims is independently re-checkable.
"""

from __future__ import annotations

import json
import re as _re
from dataclasses import dataclass, replace
from decimal import ROUND_CEILING, Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .arith import first_primes, is_prime, nth_prime, primorial
from .cover import ComputePolicy, KnownHTable, default_h_table, h_of
from .errors import JacobsthalError, NotProvable, OutOfRange, Unavailable
from .progressions import EligibleAP, coprime_iso, segment_of_ap_in_range

MODE_UNCONDITIONAL = "unconditional"
MODE_CW = "cw"
MODES = (MODE_UNCONDITIONAL, MODE_CW)
HSOURCE_CW = "cw"

# Conditional quadratic bound on h(n), verified by computation for
# 50 <= n <= 10000 (natural logarithm).
CW_COEFFICIENT = Decimal("0.27749612254")
CW_MIN_K = 50
CW_MAX_K = 10000

CHECK_NAMES = (
    "eligible",
    "congruences",
    "equation",
    "range",
    "preimage-coprime",
    "image-coprime",
    "h-consistent",
    "bound",
    "primality",
)

_DECIMAL_INT = _re.compile(r"^-?[0-9]+$")


@dataclass(frozen=True)
class BoundRow:
    """One row of the provability table: with ``h_value`` consecutive
    integers always containing one coprime to the first k primes, every
    eligible progression with ``d <= value`` gets a certified prime."""

    k: int
    next_prime: int
    h_value: int
    h_source: str
    value: Fraction

    @property
    def text(self) -> str:
        return render_thousandths(self.value)


@dataclass(frozen=True)
class PrimeCertificate:
    """Self-contained proof that ``prime`` is prime and lies in a + dZ.

    The clauses: c solves the coprimality congruences for the first k
    primes, ``prime = c + d*m`` with m coprime to the k-primorial, and
    ``2 <= prime < p_{k+1}**2`` — so primality follows from the windowed
    criterion alone.  ``h_value``/``h_source``/``mode`` document why the
    scan window had to contain such an element.
    """

    a: int
    d: int
    k: int
    c: int
    m: int
    prime: int
    h_value: int
    h_source: str
    mode: str
    checks: tuple[str, ...] = ()


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    failures: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def render_thousandths(value: Fraction) -> str:
    """Exact 3-decimal rendering, rounding halves away from zero."""
    sign = "-" if value < 0 else ""
    n, den = abs(value.numerator), value.denominator
    scaled = (2000 * n + den) // (2 * den)
    return f"{sign}{scaled // 1000}.{scaled % 1000:03d}"


@lru_cache(maxsize=None)
def cw_upper(n: int) -> int:
    """Integer upper bound on h(n) from the conditional quadratic formula,
    valid only for ``50 <= n <= 10000``."""
    if not CW_MIN_K <= n <= CW_MAX_K:
        raise OutOfRange(
            f"the conditional bound holds for {CW_MIN_K} <= n <= {CW_MAX_K}, "
            f"got {n}")
    with localcontext() as ctx:
        ctx.prec = 60
        value = CW_COEFFICIENT * n * n * Decimal(n).ln()
        return int(value.to_integral_value(ROUND_CEILING))


def bound(k: int, table: KnownHTable | None = None, *,
          mode: str = MODE_UNCONDITIONAL,
          policy: ComputePolicy | None = None) -> BoundRow:
    """The exact rational ``(p_{k+1}**2 - 2) / (h + 1)`` for index k, using
    the exact h(k) in unconditional mode or the conditional formula in cw
    mode."""
    if k < 1:
        raise ValueError(f"index must be >= 1, got {k}")
    if mode == MODE_UNCONDITIONAL:
        h_value, h_source = h_of(k, table, policy)
    elif mode == MODE_CW:
        h_value, h_source = cw_upper(k), HSOURCE_CW
    else:
        raise ValueError(f"unknown mode {mode!r}")
    p_next = nth_prime(k + 1)
    return BoundRow(k, p_next, h_value, h_source,
                    Fraction(p_next * p_next - 2, h_value + 1))


def bound_table(ks, table: KnownHTable | None = None, *,
                mode: str = MODE_UNCONDITIONAL,
                policy: ComputePolicy | None = None) -> list[BoundRow]:
    if table is None:
        table = default_h_table()
    return [bound(k, table, mode=mode, policy=policy) for k in ks]


def _candidate_ks(table: KnownHTable, policy: ComputePolicy):
    computable = range(1, policy.max_compute_k + 1) if policy.allow_compute else ()
    return sorted(set(table.ks()) | set(computable))


def min_k_for(d: int, table: KnownHTable | None = None, *,
              mode: str = MODE_UNCONDITIONAL,
              policy: ComputePolicy | None = None) -> int:
    """Smallest k whose available bound certifies modulus d, scanning k
    ascending over tabulated/computable values (unconditional) or the
    conditional validity range (cw)."""
    if d < 1:
        raise ValueError(f"modulus must be >= 1, got {d}")
    if table is None:
        table = default_h_table()
    if policy is None:
        policy = ComputePolicy()
    best = 0
    if mode == MODE_UNCONDITIONAL:
        ks = _candidate_ks(table, policy)
    elif mode == MODE_CW:
        ks = range(CW_MIN_K, CW_MAX_K + 1)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    for k in ks:
        row = bound(k, table, mode=mode, policy=policy)
        if row.value >= d:
            return k
        best = max(best, int(row.value))
    raise NotProvable(
        f"no available bound reaches d = {d} (largest provable: {best})",
        max_provable_d=best)


def prime_by_coprimality(n: int, k: int) -> bool:
    """Windowed primality criterion: true iff ``2 <= n < p_{k+1}**2`` and n
    is coprime to the first k primes.  True implies n is prime; false says
    nothing."""
    if k < 1:
        raise ValueError(f"index must be >= 1, got {k}")
    p_next = nth_prime(k + 1)
    return 2 <= n < p_next * p_next and gcd(n, primorial(k)) == 1


def find_prime(ap: EligibleAP, table: KnownHTable | None = None, *,
               mode: str = MODE_UNCONDITIONAL,
               policy: ComputePolicy | None = None) -> PrimeCertificate:
    """Produce a verified prime certificate for an eligible progression.

    Deterministic: picks the minimal usable k, builds the canonical
    coprimality-preserving map, and scans the progression's elements in
    ``[2, p_{k+1}**2 - 1]`` upward for the first one whose preimage is
    coprime to the k-primorial.
    """
    if table is None:
        table = default_h_table()
    if policy is None:
        policy = ComputePolicy()
    k = min_k_for(ap.d, table, mode=mode, policy=policy)
    if mode == MODE_UNCONDITIONAL:
        h_value, h_source = h_of(k, table, policy)
    else:
        h_value, h_source = cw_upper(k), HSOURCE_CW
    iso = coprime_iso(ap, first_primes(k))
    p_next = nth_prime(k + 1)
    window = segment_of_ap_in_range(ap, 2, p_next * p_next - 1)
    modulus = primorial(k)
    for x in window:
        m = iso.invert(x)
        if gcd(m, modulus) == 1:
            cert = PrimeCertificate(ap.a, ap.d, k, iso.c, m, x,
                                    h_value, h_source, mode)
            check = verify_certificate(cert, table, policy=policy)
            if not check.ok:  # engine bug or poisoned table — never emit
                raise JacobsthalError(
                    f"internal: produced certificate failed verification: "
                    f"{check.failures}")
            return replace(cert, checks=CHECK_NAMES)
    raise JacobsthalError(
        f"internal: scan window for {ap} exhausted; h({k}) = {h_value} "
        f"({h_source}) must be wrong")


def verify_certificate(cert: PrimeCertificate,
                       table: KnownHTable | None = None, *,
                       policy: ComputePolicy | None = None) -> CertificateCheck:
    """Re-check every clause of a certificate from scratch.

    Returns the failures instead of raising, so hostile or corrupted
    certificates are reported, not crashed on.  The stored ``checks`` field
    is informational and deliberately ignored here.
    """
    if table is None:
        table = default_h_table()
    if policy is None:
        policy = ComputePolicy()
    failures: list[str] = []
    if cert.mode not in MODES:
        return CertificateCheck(False, (f"unknown mode {cert.mode!r}",))
    if cert.k < 1 or cert.k > 100_000:
        return CertificateCheck(False, (f"index k = {cert.k} out of range",))
    if cert.d < 1 or not 0 <= cert.a < cert.d or gcd(cert.a, cert.d) != 1:
        return CertificateCheck(
            False, ("eligible: a + dZ is not an eligible progression",))
    qs = first_primes(cert.k)
    if cert.c % cert.d != cert.a:
        failures.append("congruences: c does not lie in a + dZ")
    for q in qs:
        if cert.d % q != 0 and cert.c % q != 0:
            failures.append(f"congruences: c not divisible by {q}")
            break
    if cert.prime != cert.c + cert.d * cert.m:
        failures.append("equation: prime != c + d*m")
    p_next = nth_prime(cert.k + 1)
    if not 2 <= cert.prime < p_next * p_next:
        failures.append("range: prime outside [2, p_{k+1}^2 - 1]")
    modulus = primorial(cert.k)
    if gcd(cert.m, modulus) != 1:
        failures.append("preimage-coprime: gcd(m, k-primorial) > 1")
    if gcd(cert.prime, modulus) != 1:
        failures.append("image-coprime: gcd(prime, k-primorial) > 1")
    failures.extend(_h_consistency(cert, table, policy))
    if Fraction(p_next * p_next - 2, cert.h_value + 1) < cert.d:
        failures.append("bound: (p_{k+1}^2 - 2)/(h + 1) < d")
    if not is_prime(cert.prime):
        failures.append("primality: independent test rejects prime")
    return CertificateCheck(not failures, tuple(failures))


def _h_consistency(cert: PrimeCertificate, table: KnownHTable,
                   policy: ComputePolicy) -> list[str]:
    if cert.h_value < 1:
        return [f"h-consistent: impossible h_value {cert.h_value}"]
    if cert.mode == MODE_CW:
        if cert.h_source != HSOURCE_CW:
            return ["h-consistent: cw mode requires the cw source"]
        try:
            expected = cw_upper(cert.k)
        except OutOfRange:
            return [f"h-consistent: k = {cert.k} outside the conditional range"]
        if expected != cert.h_value:
            return [f"h-consistent: conditional bound for k = {cert.k} is "
                    f"{expected}, certificate says {cert.h_value}"]
        return []
    if cert.h_source == HSOURCE_CW:
        return ["h-consistent: unconditional mode with conditional source"]
    try:
        expected, _ = h_of(cert.k, table, policy)
    except (Unavailable, JacobsthalError) as exc:
        return [f"h-consistent: cannot confirm h({cert.k}) here ({exc})"]
    if expected != cert.h_value:
        return [f"h-consistent: h({cert.k}) = {expected}, certificate says "
                f"{cert.h_value}"]
    return []


def _refined(ap: EligibleAP, prime: int) -> EligibleAP:
    """Shrink a progression to an eligible sub-progression excluding a prime
    already found in it.

    Even d: split modulo 2d; both halves stay eligible (a must be odd) and
    exactly one contains the prime.  Odd d: of the four residues mod 4d that
    reduce to a, exactly the two odd ones are eligible, and the (odd) prime
    sits in at most one of them.
    """
    d = ap.d
    if d % 2 == 0:
        candidates = [ap.a, ap.a + d]
        new_d = 2 * d
    else:
        candidates = sorted((ap.a + j * d) % (4 * d) for j in range(4))
        new_d = 4 * d
    for residue in candidates:
        if gcd(residue, new_d) != 1:
            continue
        if prime % new_d != residue % new_d:
            return EligibleAP(residue % new_d, new_d)
    raise AssertionError(f"no eligible refinement of {ap} avoiding {prime}")


def prime_stream(ap: EligibleAP, count: int,
                 table: KnownHTable | None = None, *,
                 mode: str = MODE_UNCONDITIONAL,
                 policy: ComputePolicy | None = None) -> list[PrimeCertificate]:
    """Certify ``count`` distinct primes in the progression by repeatedly
    refining it away from the primes already emitted.

    If a refinement outgrows every available bound, :class:`NotProvable`
    is raised carrying the certificates emitted so far.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if table is None:
        table = default_h_table()
    certificates: list[PrimeCertificate] = []
    current = ap
    while len(certificates) < count:
        try:
            cert = find_prime(current, table, mode=mode, policy=policy)
        except NotProvable as exc:
            raise NotProvable(
                f"stream stopped after {len(certificates)} of {count}: {exc}",
                max_provable_d=exc.max_provable_d,
                certificates=certificates) from exc
        certificates.append(cert)
        if len(certificates) < count:
            current = _refined(current, cert.prime)
    return certificates


def max_provable_d(table: KnownHTable | None = None, *,
                   mode: str = MODE_UNCONDITIONAL) -> tuple[int, int | None]:
    """Largest modulus any available bound certifies, with the index used.

    Unconditional mode scans the table as-is; cw mode scans the whole
    conditional validity range.  Returns ``(0, None)`` for an empty table.
    """
    if table is None:
        table = default_h_table()
    best, best_k = 0, None
    if mode == MODE_UNCONDITIONAL:
        rows = ((k, entry.h) for k, entry in
                ((k, table.get(k)) for k in table.ks()))
        for k, h_value in rows:
            p_next = nth_prime(k + 1)
            d = (p_next * p_next - 2) // (h_value + 1)
            if d > best:
                best, best_k = d, k
    elif mode == MODE_CW:
        for k in range(CW_MIN_K, CW_MAX_K + 1):
            p_next = nth_prime(k + 1)
            d = (p_next * p_next - 2) // (cw_upper(k) + 1)
            if d > best:
                best, best_k = d, k
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return best, best_k


# --- serialization -----------------------------------------------------------

_INT_FIELDS = ("a", "d", "k", "c", "m", "prime", "h_value")
_STR_FIELDS = ("h_source", "mode")


def certificate_to_json(cert: PrimeCertificate) -> str:
    """Canonical JSON form: integers as decimal strings (c routinely
    exceeds machine width), keys sorted, newline-terminated."""
    payload = {name: str(getattr(cert, name)) for name in _INT_FIELDS}
    payload.update({name: getattr(cert, name) for name in _STR_FIELDS})
    payload["checks"] = list(cert.checks)
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def certificate_from_json(text: str) -> PrimeCertificate:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise JacobsthalError(f"certificate is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise JacobsthalError("certificate must be a JSON object")
    expected = set(_INT_FIELDS) | set(_STR_FIELDS) | {"checks"}
    if set(data) != expected:
        raise JacobsthalError(
            f"certificate fields must be exactly {sorted(expected)}")
    values: dict[str, object] = {}
    for name in _INT_FIELDS:
        raw = data[name]
        if not isinstance(raw, str) or not _DECIMAL_INT.match(raw):
            raise JacobsthalError(f"field {name!r} must be a decimal string")
        values[name] = int(raw)
    for name in _STR_FIELDS:
        if not isinstance(data[name], str):
            raise JacobsthalError(f"field {name!r} must be a string")
        values[name] = data[name]
    checks = data["checks"]
    if (not isinstance(checks, list)
            or any(not isinstance(c, str) for c in checks)):
        raise JacobsthalError("field 'checks' must be a list of strings")
    values["checks"] = tuple(checks)
    return PrimeCertificate(**values)  # type: ignore[arg-type]
