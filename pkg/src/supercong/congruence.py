"""One checker per congruence statement, plus a parallel prime sweep.

Every check reduces to "does ``lhs - rhs`` have p-adic valuation at least
``required``?".  Required valuations and prime hypotheses live in the static
:data:`REGISTRY`, so reports are self-describing.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

from . import series
from .combinat import binomial, factorial, harmonic, rising
from .errors import DomainError, PrecisionExhausted
from .exact import INF, PadicScaled, padic_encode, vp
from .hypdsl import SeriesBlock, eval_exact, eval_padic, sum_series

EXACT_BACKEND_MAX_P = 200
DEFAULT_GUARD_DIGITS = 10
DIGEST_LIMIT = 64
TRUNCATION_MARK = "…truncated"

Value = Union[Fraction, PadicScaled]


@dataclass
class CheckReport:
    check: str
    p: int
    r: int
    required_valuation: int | float | None
    achieved_valuation: int | float | None
    passed: bool
    status: str = "pass"  # pass | fail | skipped | precision-exhausted | error
    lhs_digest: str = ""
    rhs_digest: str = ""
    elapsed_ms: float = 0.0
    message: str = ""
    lower_bound: bool = False  # achieved is only a lower bound (p-adic zero)

    @property
    def sort_key(self) -> tuple[int, str]:
        return self.p, self.check


def digest(value: Value | int | str) -> str:
    text = value.digest() if isinstance(value, PadicScaled) else str(value)
    if len(text) > DIGEST_LIMIT:
        return text[:DIGEST_LIMIT] + TRUNCATION_MARK
    return text


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


# ------------------------------------------------------------ primes


def primes_in_range(lo: int, hi: int) -> list[int]:
    """All primes in ``[lo, hi]`` by a sieve of Eratosthenes."""
    if hi < 2 or hi < lo:
        return []
    sieve = bytearray([1]) * (hi + 1)
    sieve[0:2] = b"\x00\x00"
    for q in range(2, math.isqrt(hi) + 1):
        if sieve[q]:
            sieve[q * q :: q] = bytes(len(range(q * q, hi + 1, q)))
    return [q for q in range(max(lo, 2), hi + 1) if sieve[q]]


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % q for q in range(2, math.isqrt(n) + 1))


# ------------------------------------------------------ backends


def _use_exact(backend: str, p: int, r: int = 1, exact_max_p: int = EXACT_BACKEND_MAX_P) -> bool:
    if backend == "exact":
        return True
    if backend == "padic":
        return False
    if backend != "auto":
        raise ValueError(f"unknown backend {backend!r}")
    return p**r <= exact_max_p


def _truncation(p: int, r: int) -> int:
    return (p**r - 1) // 2


@dataclass(frozen=True)
class Comparison:
    lhs: Value
    rhs: Value


def _k2_family(s_exact, s_padic, leading: int, pexp: int):
    # S(N_r) vs  p^pexp (-1)^((p-1)/2) S(N_{r-1}); S(0) == leading
    def compute(p: int, r: int, required: int, backend: str, guard: int, exact_max_p: int):
        factor = p**pexp * _sign((p - 1) // 2)
        if _use_exact(backend, p, r, exact_max_p):
            prev = s_exact(_truncation(p, r - 1)) if r > 1 else Fraction(leading)
            return Comparison(s_exact(_truncation(p, r)), factor * prev)
        prec = required + guard
        prev = (
            s_padic(_truncation(p, r - 1), p, prec)
            if r > 1
            else padic_encode(leading, p, prec)
        )
        return Comparison(s_padic(_truncation(p, r), p, prec), padic_encode(factor, p, prec) * prev)

    return compute


def _exact(fn: Callable[[int], tuple[Fraction, Fraction]]):
    def compute(p, r, required, backend, guard, exact_max_p):
        lhs, rhs = fn(p)
        return Comparison(Fraction(lhs), Fraction(rhs))

    return compute


def _k2_compute(p, r, required, backend, guard, exact_max_p):
    # the base congruence is the r = 1 level regardless of the requested r
    return _k2_family(series.s_k2, series.s_k2_padic, 5, 1)(p, 1, required, backend, guard, exact_max_p)


def _fclaim(p: int):
    return series.wz_F((p - 1) // 2, p), 6 * p * _sign((p - 1) // 2)


def _gclaim(p: int):
    h = (p + 1) // 2
    return sum((series.wz_G(h, k) for k in range(1, p + 1)), Fraction(0)), p * _sign(h)


def _gstep2(p: int):
    h = (p + 1) // 2
    return series.wz_G(h, 1), p * _sign(h)


def _morley(p: int):
    h = (p - 1) // 2
    return binomial(p - 1, h), _sign(h) * 2 ** (2 * p - 2)


def _p2(p: int):
    h = (p - 1) // 2
    lhs = rising(series.HALF, h) / factorial(h) ** 2
    rhs = binomial(p - 1, h) / (2 ** (p - 2) * (p - 1) * factorial((p - 3) // 2))
    return lhs, rhs


def _h2_compute(p, r, required, backend, guard, exact_max_p):
    # both harmonic sums must vanish mod p; report the weaker of the two
    a = harmonic(p - 1, 2)
    b = harmonic((p - 1) // 2, 2)
    worse = a if vp(a, p) <= vp(b, p) else b
    return Comparison(worse, Fraction(0))


@dataclass(frozen=True)
class Check:
    name: str
    compute: Callable[..., Comparison]
    required: Callable[[int, int], int | float]
    min_prime: int  # smallest prime satisfying the hypothesis
    description: str


REGISTRY: dict[str, Check] = {
    c.name: c
    for c in (
        Check("k2", _k2_compute, lambda p, r: 4, 3,
              "S((p-1)/2) == 5p(-1)^((p-1)/2) mod p^4"),
        Check("swisher", _k2_family(series.s_k2, series.s_k2_padic, 5, 1),
              lambda p, r: 4 * r, 3,
              "S((p^r-1)/2) == p(-1)^((p-1)/2) S((p^(r-1)-1)/2) mod p^(4r)"),
        Check("g7", _k2_family(series.s_g7, series.s_g7_padic, 1, 3),
              lambda p, r: 8 * r - 1 if p == 5 else 8 * r, 3,
              "~S((p^r-1)/2) == p^3(-1)^((p-1)/2) ~S((p^(r-1)-1)/2) mod p^(8r)"),
        Check("key1", _exact(series.key1_sides), lambda p, r: 3, 5,
              "prod (p+2k) == (-1)^((p-1)/2) prod (2k-1)^2 mod p^3"),
        Check("key2", _exact(lambda p: (series.key2_sum(p), 0)), lambda p, r: 3, 3,
              "key-lemma alternating sum == 0 mod p^3"),
        Check("easier", _exact(lambda p: (series.easier_sum(p), 0)), lambda p, r: 2, 5,
              "reduced sum == 0 mod p^2"),
        Check("fclaim", _exact(_fclaim), lambda p, r: 4, 3,
              "F((p-1)/2, p) == 6p(-1)^((p-1)/2) mod p^4"),
        Check("gclaim", _exact(_gclaim), lambda p, r: 4, 3,
              "sum_k G((p+1)/2, k) == p(-1)^((p+1)/2) mod p^4"),
        Check("gstep2", _exact(_gstep2), lambda p, r: 4, 3,
              "G((p+1)/2, 1) == p(-1)^((p+1)/2) mod p^4"),
        Check("morley", _exact(_morley), lambda p, r: 3, 5,
              "binom(p-1,(p-1)/2) == (-1)^((p-1)/2) 4^(p-1) mod p^3"),
        Check("wolstenholme", _exact(lambda p: (harmonic(p - 1, 1), 0)), lambda p, r: 2, 5,
              "H_(p-1) == 0 mod p^2"),
        Check("h2", _h2_compute, lambda p, r: 1, 5,
              "H_(p-1)^(2) == H_((p-1)/2)^(2) == 0 mod p"),
        Check("p2", _exact(_p2), lambda p, r: INF, 3,
              "(1/2)_h / h!^2 == binom(p-1,h) / (2^(p-2)(p-1)((p-3)/2)!), exact"),
    )
}

CHECK_NAMES = tuple(REGISTRY)


def hypothesis_met(check: Check | SeriesBlock, p: int) -> bool:
    min_prime = check.min_prime if isinstance(check, Check) else 3
    return p >= min_prime and p % 2 == 1 and _is_prime(p)


# ------------------------------------------------------------ running


def _compare(cmp: Comparison, p: int, required) -> tuple[bool, int | float, bool]:
    if isinstance(cmp.lhs, PadicScaled) or isinstance(cmp.rhs, PadicScaled):
        lhs, rhs = cmp.lhs, cmp.rhs
        if not isinstance(lhs, PadicScaled):
            lhs = padic_encode(lhs, p, rhs.N)
        if not isinstance(rhs, PadicScaled):
            rhs = padic_encode(rhs, p, lhs.N)
        return (lhs - rhs).valuation_at_least(required)
    achieved = vp(cmp.lhs - cmp.rhs, p)
    return achieved >= required, achieved, True


def _run(
    name: str,
    p: int,
    r: int,
    required,
    compute: Callable[[], Comparison],
) -> CheckReport:
    start = time.perf_counter()
    cmp = compute()
    ok, achieved, exact = _compare(cmp, p, required)
    return CheckReport(
        check=name,
        p=p,
        r=r,
        required_valuation=required,
        achieved_valuation=achieved,
        passed=ok,
        status="pass" if ok else "fail",
        lhs_digest=digest(cmp.lhs),
        rhs_digest=digest(cmp.rhs),
        elapsed_ms=(time.perf_counter() - start) * 1000.0,
        lower_bound=not exact,
    )


def run_check(
    name: str,
    p: int,
    r: int = 1,
    *,
    backend: str = "auto",
    guard_digits: int = DEFAULT_GUARD_DIGITS,
    exact_max_p: int = EXACT_BACKEND_MAX_P,
) -> CheckReport:
    """Run a registered check; raises :class:`DomainError` outside its hypothesis."""
    try:
        check = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown check {name!r}; known: {', '.join(CHECK_NAMES)}") from None
    if r < 1:
        raise DomainError("extension level r must be >= 1")
    if not hypothesis_met(check, p):
        raise DomainError(f"check {name!r} requires an odd prime p >= {check.min_prime}, got {p}")
    required = check.required(p, r)
    return _run(
        name, p, r, required,
        lambda: check.compute(p, r, required, backend, guard_digits, exact_max_p),
    )


def check_series(
    block: SeriesBlock,
    p: int,
    r: int = 1,
    *,
    backend: str = "exact",
    guard_digits: int = DEFAULT_GUARD_DIGITS,
) -> CheckReport:
    """Generic congruence for a user-defined series block."""
    if not hypothesis_met(block, p):
        raise DomainError(f"series {block.name!r} requires an odd prime, got {p}")
    env = {"p": p, "r": r}
    required = eval_exact(block.modexp, env)
    if required.denominator != 1:
        raise DomainError(f"modulus exponent {required} is not an integer")
    required = int(required)

    def terms(level: int) -> int:
        value = eval_exact(block.terms, {"p": p, "r": level})
        if value.denominator != 1 or value < 0:
            raise DomainError(f"truncation bound {value} is not a non-negative integer")
        return int(value)

    def compute() -> Comparison:
        if backend == "padic":
            prec = required + guard_digits
            lhs = sum_series(block.summand, "n", terms(r), p=p, prec=prec)
            rhs_env = dict(env)
            if block.uses_prev:
                rhs_env["prev"] = sum_series(block.summand, "n", terms(r - 1), p=p, prec=prec)
            return Comparison(lhs, eval_padic(block.rhs, rhs_env, p, prec))
        lhs = sum_series(block.summand, "n", terms(r))
        rhs_env = dict(env)
        if block.uses_prev:
            rhs_env["prev"] = sum_series(block.summand, "n", terms(r - 1))
        return Comparison(lhs, eval_exact(block.rhs, rhs_env))

    return _run(block.name, p, r, required, compute)


def _named(name: str):
    def check(p: int, r: int = 1, **kwargs) -> CheckReport:
        return run_check(name, p, r, **kwargs)

    check.__name__ = f"check_{name}"
    check.__doc__ = REGISTRY[name].description
    return check


check_k2 = _named("k2")
check_swisher = _named("swisher")
check_g7 = _named("g7")
check_lemma_key1 = _named("key1")
check_lemma_key2 = _named("key2")
check_easier = _named("easier")
check_fclaim = _named("fclaim")
check_gclaim = _named("gclaim")
check_gstep2 = _named("gstep2")
check_morley = _named("morley")
check_wolstenholme = _named("wolstenholme")
check_h2 = _named("h2")
check_p2 = _named("p2")


# ------------------------------------------------------------ sweeping

CheckSpec = Union[str, SeriesBlock]


def _label(check: CheckSpec) -> str:
    return check.name if isinstance(check, SeriesBlock) else check


def _task(args: tuple) -> CheckReport:
    check, p, r, backend, guard = args
    start = time.perf_counter()
    try:
        if isinstance(check, SeriesBlock):
            return check_series(check, p, r, backend=backend, guard_digits=guard)
        return run_check(check, p, r, backend=backend, guard_digits=guard)
    except PrecisionExhausted as exc:
        status, message = "precision-exhausted", str(exc)
    except Exception as exc:  # noqa: BLE001 - one bad check must not abort a sweep
        status, message = "error", f"{type(exc).__name__}: {exc}"
    return CheckReport(
        check=_label(check), p=p, r=r, required_valuation=None, achieved_valuation=None,
        passed=False, status=status, message=message,
        elapsed_ms=(time.perf_counter() - start) * 1000.0,
    )


def _skipped(check: CheckSpec, p: int, r: int) -> CheckReport:
    return CheckReport(
        check=_label(check), p=p, r=r, required_valuation=None, achieved_valuation=None,
        passed=False, status="skipped", message="hypothesis not met",
    )


def sweep(
    checks: Sequence[CheckSpec],
    p_lo: int,
    p_hi: int,
    r: int = 1,
    workers: int = 1,
    *,
    backend: str = "auto",
    guard_digits: int = DEFAULT_GUARD_DIGITS,
) -> list[CheckReport]:
    """Run each check at every prime in ``[p_lo, p_hi]``.

    Primes failing a check's hypothesis (p odd, or p > 3) get a ``skipped``
    report; p = 2 is never swept.  Output is sorted by ``(p, check)``.
    """
    if p_lo > p_hi:
        raise ValueError("p_lo must not exceed p_hi")
    if workers < 1:
        raise ValueError("workers must be positive")
    for check in checks:
        if isinstance(check, str) and check not in REGISTRY:
            raise KeyError(f"unknown check {check!r}")
    tasks, reports = [], []
    for p in primes_in_range(max(p_lo, 3), p_hi):
        for check in checks:
            spec = REGISTRY[check] if isinstance(check, str) else check
            if hypothesis_met(spec, p):
                tasks.append((check, p, r, backend, guard_digits))
            else:
                reports.append(_skipped(check, p, r))
    if workers == 1 or len(tasks) <= 1:
        reports.extend(map(_task, tasks))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(tasks) // (4 * workers))
            reports.extend(pool.map(_task, tasks, chunksize=chunk))
    reports.sort(key=lambda rep: rep.sort_key)
    return reports


def sweep_checks(names: Iterable[str]) -> list[str]:
    """Validate and de-duplicate check names, preserving order."""
    seen: list[str] = []
    for name in names:
        if name not in REGISTRY:
            raise KeyError(f"unknown check {name!r}; known: {', '.join(CHECK_NAMES)}")
        if name not in seen:
            seen.append(name)
    return seen
