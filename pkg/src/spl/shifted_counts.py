"""Counters for primes whose shifts carry a large prime factor.

Single-prime counters threshold P+(p-1) against p^theta or x^theta; the
k-tuple counter tallies ordered prime tuples (repeats allowed) whose
shifted gcd has a large prime factor. Two routes are provided for the
tuple count: a brute-force enumeration over all tuples, and a fast
enumeration keyed on the large prime r of the gcd. Every qualifying tuple
is found at exactly one r (the largest prime factor of its gcd is unique),
so the two routes must agree exactly.

All thresholds are decided by exact integer power comparison; theta enters
only as a reduced fraction so boundary cases are unambiguous.
"""

from __future__ import annotations

import math
import re
import weakref
from dataclasses import dataclass

import numpy as np

from ._parallel import parallel_map_shared
from .errors import ArgumentError, BudgetError

__all__ = [
    "Theta",
    "TupleCount",
    "threshold_test",
    "large_factor_count",
    "large_factor_count_fixed",
    "smooth_shift_count",
    "tuple_count_oracle",
    "tuple_count_fast",
    "count_tuples",
    "oracle_qualifying_products",
    "fast_qualifying_products",
]

_THETA_RE = re.compile(r"\s*(\d+)\s*/\s*(\d+)\s*\Z")


@dataclass(frozen=True)
class Theta:
    """A rational exponent theta = num/den with 0 < theta < 1, kept reduced."""

    num: int
    den: int

    def __post_init__(self):
        if self.den < 1 or self.num < 1:
            raise ArgumentError(
                f"theta needs a positive numerator and denominator, got {self.num}/{self.den}"
            )
        g = math.gcd(self.num, self.den)
        object.__setattr__(self, "num", self.num // g)
        object.__setattr__(self, "den", self.den // g)
        if self.num >= self.den:
            raise ArgumentError(f"theta must lie in (0, 1), got {self.num}/{self.den}")

    @property
    def as_real(self) -> float:
        return self.num / self.den

    @classmethod
    def parse(cls, text: str) -> "Theta":
        m = _THETA_RE.match(text)
        if not m:
            raise ArgumentError(f"theta must be given as 'a/b', got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"


def threshold_test(r: int, n: int, theta: Theta) -> bool:
    """True iff r >= n**theta, decided exactly as r**den >= n**num."""
    return r ** theta.den >= n ** theta.num


# ---------------------------------------------------------------------------
# Greatest-prime-factor table, memoized per sieve cache.
# ---------------------------------------------------------------------------

_GPF_MEMO: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _gpf_upto(cache, n: int) -> np.ndarray:
    """gpf[m] = largest prime factor of m for 2 <= m <= n; gpf[1] = 1.

    Built by ascending vectorized strides (the last prime to touch m wins).
    """
    cache._check(n)
    hit = _GPF_MEMO.get(cache)
    if hit is not None and len(hit) > n:
        return hit
    size = n + 1
    gpf = np.zeros(size, dtype=np.int32)
    gpf[1] = 1
    primes = cache.primes
    for p in primes[: np.searchsorted(primes, n, side="right")].tolist():
        gpf[p::p] = p
    _GPF_MEMO[cache] = gpf
    return gpf


def _count_threshold(rs: np.ndarray, ns, theta: Theta, op: str) -> int:
    """Count entries with rs >= ns**theta ("ge") or rs <= ns**theta ("le").

    A log comparison settles all pairs far from the boundary; near-boundary
    pairs fall back to the exact integer power test, so the result matches
    testing every pair exactly. The boundary margin scales with the log
    magnitudes (float error does too), with ~100x headroom over worst-case
    rounding.
    """
    if len(rs) == 0:
        return 0
    left = theta.den * np.log(rs.astype(np.float64))
    scalar_n = np.isscalar(ns) or np.ndim(ns) == 0
    if scalar_n:
        right = theta.num * math.log(ns)
    else:
        right = theta.num * np.log(np.asarray(ns, dtype=np.float64))
    t = left - right
    margin = 1e-13 * (np.abs(left) + np.abs(right)) + 1e-12
    if op == "ge":
        count = int(np.count_nonzero(t > margin))
    else:
        count = int(np.count_nonzero(t < -margin))
    for i in np.flatnonzero(np.abs(t) <= margin):
        lhs = int(rs[i]) ** theta.den
        rhs = (int(ns) if scalar_n else int(ns[i])) ** theta.num
        ok = lhs >= rhs if op == "ge" else lhs <= rhs
        if ok:
            count += 1
    return count


def _shift_gpfs(cache, x):
    """(primes <= x, P+(p-1) for each) as aligned arrays."""
    cache._check(x)
    ps = cache.primes[: np.searchsorted(cache.primes, x, side="right")]
    if len(ps) == 0:
        return ps, ps
    gpf = _gpf_upto(cache, int(ps[-1]) - 1)
    return ps, gpf[ps - 1]


def large_factor_count(cache, x: int, theta: Theta) -> int:
    """#{p <= x : P+(p-1) >= p**theta}."""
    ps, rs = _shift_gpfs(cache, x)
    return _count_threshold(rs, ps, theta, "ge")


def large_factor_count_fixed(cache, x: int, theta: Theta) -> int:
    """#{p <= x : P+(p-1) >= x**theta} (threshold fixed at x)."""
    ps, rs = _shift_gpfs(cache, x)
    return _count_threshold(rs, int(x), theta, "ge")


def smooth_shift_count(cache, x: int, theta: Theta) -> int:
    """#{p <= x : P+(p-1) <= p**theta} (smooth shifted primes)."""
    ps, rs = _shift_gpfs(cache, x)
    return _count_threshold(rs, ps, theta, "le")


# ---------------------------------------------------------------------------
# k-tuple counters.
# ---------------------------------------------------------------------------


def _check_tuple_args(cache, x: int, k: int) -> None:
    if k < 2:
        raise ArgumentError(f"tuple counters need k >= 2, got {k}")
    cache._check(x)


def oracle_qualifying_products(
    cache,
    x: int,
    k: int,
    theta: Theta,
    *,
    ordered: bool = True,
    node_budget: int = 10**9,
) -> list:
    """Products of all qualifying tuples, one entry per tuple.

    Brute-force reference: enumerate every prime tuple with product <= x
    (depth-first with product pruning) and apply the threshold test to
    P+(gcd of the shifted entries). Intended for modest x; the node budget
    makes runaway enumerations fail loudly instead of hanging.
    """
    _check_tuple_args(cache, x, k)
    min_rest = 2 ** (k - 1)
    if x < 2 * min_rest:
        return []
    primes = cache.primes
    ps = primes[: np.searchsorted(primes, x // min_rest, side="right")].tolist()
    gpf = _gpf_upto(cache, max(x // min_rest, 2))
    out = []
    budget = node_budget

    def visit(start: int, prod: int, g: int, depth: int):
        nonlocal budget
        rest = 2 ** (k - depth - 1)
        for i in range(start, len(ps)):
            p = ps[i]
            prod_p = prod * p
            if prod_p * rest > x:
                break
            budget -= 1
            if budget < 0:
                raise BudgetError("tuple enumeration exceeded the node budget")
            g_p = math.gcd(g, p - 1)
            if depth + 1 == k:
                if threshold_test(int(gpf[g_p]), prod_p, theta):
                    out.append(prod_p)
            else:
                visit(0 if ordered else i, prod_p, g_p, depth + 1)

    visit(0, 1, 0, 0)
    return out


def tuple_count_oracle(
    cache,
    x: int,
    k: int,
    theta: Theta,
    *,
    ordered: bool = True,
    node_budget: int = 10**9,
) -> int:
    """Brute-force count of qualifying k-tuples (ordered, repeats allowed)."""
    return len(
        oracle_qualifying_products(
            cache, x, k, theta, ordered=ordered, node_budget=node_budget
        )
    )


def _floor_power_bound(r: int, theta: Theta, x: int) -> int:
    """Largest n <= x with n**num <= r**den, found exactly."""
    rp = r ** theta.den
    if rp >= x ** theta.num:
        return x
    n = max(int(math.exp(theta.den / theta.num * math.log(r))), 1)
    while (n + 1) ** theta.num <= rp:
        n += 1
    while n ** theta.num > rp:
        n -= 1
    return n


def _fast_products_for_r(shared, r: int) -> list:
    cache, x, k, theta, ordered = shared
    n_cap = _floor_power_bound(r, theta, x)
    if n_cap < (r + 1) ** k:
        return []
    primes = cache.primes
    qs_all = primes[: np.searchsorted(primes, n_cap, side="right")]
    qs = qs_all[qs_all % r == 1].tolist()
    if not qs:
        return []
    gpf = _gpf_upto(cache, int(qs[-1]) - 1)
    q0 = qs[0]
    out = []

    def visit(start: int, prod: int, g: int, depth: int):
        rest = q0 ** (k - depth - 1)
        for i in range(start, len(qs)):
            q = qs[i]
            prod_q = prod * q
            if prod_q * rest > n_cap:
                break
            g_q = math.gcd(g, q - 1)
            if depth + 1 == k:
                if gpf[g_q] == r:
                    out.append(prod_q)
            else:
                visit(0 if ordered else i, prod_q, g_q, depth + 1)

    visit(0, 1, 0, 0)
    return out


def _fast_count_for_r(shared, r: int) -> int:
    return len(_fast_products_for_r(shared, r))


def _fast_r_values(cache, x: int, k: int) -> list:
    primes = cache.primes
    cand = primes[: np.searchsorted(primes, math.isqrt(x), side="right")]
    return [int(r) for r in cand.tolist() if r**k <= x]


def fast_qualifying_products(
    cache, x: int, k: int, theta: Theta, *, ordered: bool = True, workers: int = 1
) -> list:
    """Products of qualifying tuples via enumeration keyed on r = P+(gcd).

    For each prime r <= x**(1/k), tuples are drawn from primes q = 1 (mod r)
    with product capped at the largest n passing the threshold at r; a tuple
    is kept only when r is exactly the largest prime factor of the shifted
    gcd, so each qualifying tuple is produced exactly once.
    """
    _check_tuple_args(cache, x, k)
    _gpf_upto(cache, max(x - 1, 2))  # built once here, inherited by workers
    rs = _fast_r_values(cache, x, k)
    chunks = parallel_map_shared(
        _fast_products_for_r, (cache, x, k, theta, ordered), rs, workers=workers
    )
    out = []
    for chunk in chunks:
        out.extend(chunk)
    return out


def tuple_count_fast(
    cache, x: int, k: int, theta: Theta, *, ordered: bool = True, workers: int = 1
) -> int:
    """Same count as tuple_count_oracle, via the r-keyed enumeration.

    Partial counts per r are integers combined in a fixed order, so the
    result is deterministic for any worker count.
    """
    _check_tuple_args(cache, x, k)
    _gpf_upto(cache, max(x - 1, 2))
    rs = _fast_r_values(cache, x, k)
    counts = parallel_map_shared(
        _fast_count_for_r, (cache, x, k, theta, ordered), rs, workers=workers
    )
    return sum(counts)


@dataclass(frozen=True)
class TupleCount:
    """A tuple-counter result tagged with the route that produced it.

    Either route degenerates at k = 1 to the single-prime self-relative
    counter, so k = 1 is rejected rather than special-cased.
    """

    x: int
    k: int
    theta: Theta
    ordered_count: int
    method: str


def count_tuples(cache, x: int, k: int, theta: Theta, *, method: str = "fast", workers: int = 1) -> TupleCount:
    if method == "oracle":
        n = tuple_count_oracle(cache, x, k, theta)
    elif method == "fast":
        n = tuple_count_fast(cache, x, k, theta, workers=workers)
    else:
        raise ArgumentError(f"method must be 'oracle' or 'fast', got {method!r}")
    return TupleCount(x=x, k=k, theta=theta, ordered_count=n, method=method)
