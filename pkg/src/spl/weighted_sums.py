"""Weighted sums over increasing tuples with local factors (1 + 1/p)^ell.

The central object is the sum over 1 < h_1 < ... < h_g < z of
1/(h_1...h_g) times the product of (1 + 1/p)^ell over the distinct primes
p dividing E = h_1...h_g * prod_{i<j}(h_j - h_i). Alongside it live the
moment sums that bound it through the Hoelder inequality, and the exact
Mobius-expansion identity used to sum the single-variable weights.

Per-integer tables make each tuple cheap: R[h] is the squarefree kernel of
h and F[h] = prod_{p|h}(1 + 1/p). The factor for a union of prime sets is
assembled multiplicatively from gcds of kernels, never by refactoring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import List

import numpy as np

from .core_primes import kahan_sum
from .errors import ArgumentError, BudgetError, VerificationError

__all__ = [
    "HolderDiagnostics",
    "weighted_tuple_sum",
    "weighted_tuple_sum_grid",
    "single_weighted_sum",
    "mobius_expansion_check",
    "coordinate_moment",
    "difference_moment",
    "holder_verify",
    "holder_grid",
    "tuple_budget",
]

TUPLE_BUDGET = 10**9


def tuple_budget(g: int, z: int) -> int:
    """Number of increasing g-tuples drawn from 1 < h < z."""
    return comb(max(z - 2, 0), g)


def _check_budget(g: int, z: int) -> None:
    if tuple_budget(g, z) > TUPLE_BUDGET:
        raise BudgetError(
            f"(g={g}, z={z}) needs {tuple_budget(g, z):.3g} tuple visits; budget {TUPLE_BUDGET:.0e}"
        )


def _weight_tables(z: int):
    """(R, F) for 0 <= h < z: squarefree kernel and prod_{p|h}(1+1/p)."""
    size = max(z, 2)
    flags = np.ones(size, dtype=bool)
    flags[:2] = False
    for p in range(2, int(size**0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    rad = np.ones(size, dtype=np.int64)
    f = np.ones(size)
    for p in np.flatnonzero(flags).tolist():
        rad[p::p] *= p
        f[p::p] *= 1.0 + 1.0 / p
    return rad, f


def _union_combine(rad_acc, f_acc, rad_new, f_new, rad_table, f_table):
    """Fold one more prime set into (kernel, factor) accumulators.

    F(lcm(a, b)) = F(a) * F(b) / F(gcd(a, b)) for squarefree kernels a, b.
    Works elementwise on arrays and on scalars.
    """
    g = np.gcd(rad_acc, rad_new)
    f_acc = f_acc * f_new / f_table[g]
    rad_acc = rad_acc * rad_new // g
    return rad_acc, f_acc


def _validate(g: int, ell: int, z: int) -> None:
    if g < 1 or ell < 1:
        raise ArgumentError(f"need g >= 1 and ell >= 1, got g={g}, ell={ell}")
    if z < 2:
        raise ArgumentError(f"need z >= 2, got z={z}")
    _check_budget(g, z)


def _scan_grid(g: int, ell: int, z_max: int, *, moments: bool = True):
    """One enumeration of all tuples with h_g < z_max, binned by h_g.

    Returns (w_bins, aj_bins, ars_bins): each bins[h] sums the contributions
    of tuples whose largest coordinate is h, so cumulative sums over h < z
    recover every quantity on the full z grid at once. aj_bins has g rows;
    ars_bins has one row per pair (r, s) with s < r, in lexicographic
    (s, r) order. Moment weights use the exponent ell * G with
    G = comb(g + 1, 2). With moments=False the moment bins stay zero.
    """
    rad, f = _weight_tables(z_max)
    G = comb(g + 1, 2)
    f_ell = f**ell
    f_ellg = f ** (ell * G)
    w_bins = np.zeros(z_max)
    aj_bins = np.zeros((g, z_max))
    pairs = [(s, r) for s in range(g) for r in range(s + 1, g)]
    ars_bins = np.zeros((len(pairs), z_max))

    if g == 1:
        hs = np.arange(2, z_max)
        if len(hs):
            w_bins[2:] = f_ell[hs] / hs
            if moments:
                aj_bins[0, 2:] = f_ellg[hs] / hs
        return w_bins, aj_bins, ars_bins

    if g == 2:
        for h1 in range(2, z_max - 1):
            h2 = np.arange(h1 + 1, z_max)
            inv = 1.0 / (h1 * h2.astype(np.float64))
            rad_u, f_u = _union_combine(rad[h1], f[h1], rad[h2], f[h2], rad, f)
            _, f_u = _union_combine(rad_u, f_u, rad[h2 - h1], f[h2 - h1], rad, f)
            w_bins[h1 + 1 :] += f_u**ell * inv
            if moments:
                aj_bins[0, h1 + 1 :] += f_ellg[h1] * inv
                aj_bins[1, h1 + 1 :] += f_ellg[h2] * inv
                ars_bins[0, h1 + 1 :] += f_ellg[h2 - h1] * inv
        return w_bins, aj_bins, ars_bins

    if g == 3:
        for h1 in range(2, z_max - 2):
            for h2 in range(h1 + 1, z_max - 1):
                h3 = np.arange(h2 + 1, z_max)
                inv = 1.0 / (h1 * h2 * h3.astype(np.float64))
                rad_u, f_u = _union_combine(rad[h1], f[h1], rad[h2], f[h2], rad, f)
                rad_u, f_u = _union_combine(rad_u, f_u, rad[h2 - h1], f[h2 - h1], rad, f)
                rad_u, f_u = _union_combine(rad_u, f_u, rad[h3], f[h3], rad, f)
                rad_u, f_u = _union_combine(rad_u, f_u, rad[h3 - h1], f[h3 - h1], rad, f)
                _, f_u = _union_combine(rad_u, f_u, rad[h3 - h2], f[h3 - h2], rad, f)
                sl = slice(h2 + 1, None)
                w_bins[sl] += f_u**ell * inv
                if moments:
                    aj_bins[0, sl] += f_ellg[h1] * inv
                    aj_bins[1, sl] += f_ellg[h2] * inv
                    aj_bins[2, sl] += f_ellg[h3] * inv
                    ars_bins[0, sl] += f_ellg[h2 - h1] * inv
                    ars_bins[1, sl] += f_ellg[h3 - h1] * inv
                    ars_bins[2, sl] += f_ellg[h3 - h2] * inv
        return w_bins, aj_bins, ars_bins

    # generic fallback for g >= 4; budget-gated. Kernel products may exceed
    # int64 here, so accumulate them as Python ints.
    for tup in combinations(range(2, z_max), g):
        inv = 1.0
        for h in tup:
            inv /= h
        rad_u, f_u = 1, 1.0
        elements = list(tup) + [tup[r] - tup[s] for s, r in pairs]
        for e in elements:
            gg = math.gcd(rad_u, int(rad[e]))
            f_u = f_u * f[e] / f[gg]
            rad_u = rad_u * int(rad[e]) // gg
        top = tup[-1]
        w_bins[top] += float(f_u) ** ell * inv
        for j in range(g):
            aj_bins[j, top] += f_ellg[tup[j]] * inv
        for idx, (s, r) in enumerate(pairs):
            ars_bins[idx, top] += f_ellg[tup[r] - tup[s]] * inv
    return w_bins, aj_bins, ars_bins


def weighted_tuple_sum(g: int, ell: int, z: int) -> float:
    """Sum over 1 < h_1 < ... < h_g < z of (h_1...h_g)^-1 prod_{p|E}(1+1/p)^ell."""
    _validate(g, ell, z)
    w_bins, _, _ = _scan_grid(g, ell, z, moments=False)
    return kahan_sum(w_bins.tolist())


def weighted_tuple_sum_grid(g: int, ell: int, z_max: int) -> np.ndarray:
    """weighted_tuple_sum(g, ell, z) for every z in 0..z_max from one enumeration.

    Entry z holds the sum over tuples with h_g < z (entries 0..2 are 0).
    """
    _validate(g, ell, z_max)
    w_bins, _, _ = _scan_grid(g, ell, z_max, moments=False)
    return np.concatenate([[0.0], np.cumsum(w_bins)[: z_max]])


def single_weighted_sum(z: int, e: int) -> float:
    """Sum over 1 < h < z of (1/h) prod_{p|h}(1+1/p)^e, compensated, ascending."""
    if z < 2:
        raise ArgumentError(f"need z >= 2, got {z}")
    if e < 1:
        raise ArgumentError(f"need e >= 1, got {e}")
    _, f = _weight_tables(z)
    return kahan_sum((f[h] ** e) / h for h in range(2, z))


def mobius_expansion_check(h: int, l_param: int):
    """Both sides of prod_{p|h}(1 + L/p) = sum_{d|h} mu^2(d) L^omega(d) / d.

    Returned as exact rationals; integers are arbitrary precision so no
    overflow is possible. Both sides share the denominator rad(h).
    """
    if h < 2:
        raise ArgumentError(f"need h >= 2, got {h}")
    ps = []
    m = h
    d = 2
    while d * d <= m:
        if m % d == 0:
            ps.append(d)
            while m % d == 0:
                m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        ps.append(m)

    rad = 1
    lhs_num = 1
    for p in ps:
        rad *= p
        lhs_num *= p + l_param
    rhs_num = 0
    for size in range(len(ps) + 1):
        for subset in combinations(ps, size):
            prod = 1
            for p in subset:
                prod *= p
            rhs_num += l_param**size * (rad // prod)
    return Fraction(lhs_num, rad), Fraction(rhs_num, rad)


def coordinate_moment(g: int, ell: int, z: int, j: int) -> float:
    """Moment sum with weight A_j^G, A_j = prod_{p|h_j}(1+1/p)^ell."""
    _validate(g, ell, z)
    if not 1 <= j <= g:
        raise ArgumentError(f"need 1 <= j <= g, got j={j}")
    _, aj_bins, _ = _scan_grid(g, ell, z)
    return kahan_sum(aj_bins[j - 1].tolist())


def difference_moment(g: int, ell: int, z: int, r: int, s: int) -> float:
    """Moment sum with weight A_{r,s}^G, A_{r,s} = prod_{p|(h_r-h_s)}(1+1/p)^ell."""
    _validate(g, ell, z)
    if not 1 <= s < r <= g:
        raise ArgumentError(f"need 1 <= s < r <= g, got r={r}, s={s}")
    _, _, ars_bins = _scan_grid(g, ell, z)
    pairs = [(s_, r_) for s_ in range(g) for r_ in range(s_ + 1, g)]
    idx = pairs.index((s - 1, r - 1))
    return kahan_sum(ars_bins[idx].tolist())


@dataclass(frozen=True)
class HolderDiagnostics:
    """One Hoelder split: the sum, its moment factors, and their bound."""

    g: int
    ell: int
    G: int
    L: int
    z: int
    w_value: float
    aj_moments: List[float]
    ars_moments: List[float]
    holder_bound: float

    def __post_init__(self):
        if self.w_value > self.holder_bound * (1.0 + 1e-9):
            raise VerificationError(
                f"Hoelder inequality violated at g={self.g}, ell={self.ell}, "
                f"z={self.z}: w={self.w_value!r} > bound={self.holder_bound!r}"
            )


def _diag_from_values(g, ell, z, w_val, aj_vals, ars_vals) -> HolderDiagnostics:
    G = comb(g + 1, 2)
    bound = 1.0
    for mval in list(aj_vals) + list(ars_vals):
        bound *= mval ** (1.0 / G)
    return HolderDiagnostics(
        g=g,
        ell=ell,
        G=G,
        L=2 ** (G * ell),
        z=z,
        w_value=w_val,
        aj_moments=list(aj_vals),
        ars_moments=list(ars_vals),
        holder_bound=bound,
    )


def holder_verify(g: int, ell: int, z: int) -> HolderDiagnostics:
    """Evaluate the sum and every moment at z and check the Hoelder bound."""
    _validate(g, ell, z)
    w_bins, aj_bins, ars_bins = _scan_grid(g, ell, z)
    return _diag_from_values(
        g,
        ell,
        z,
        kahan_sum(w_bins.tolist()),
        [kahan_sum(row.tolist()) for row in aj_bins],
        [kahan_sum(row.tolist()) for row in ars_bins],
    )


def holder_grid(g: int, ell: int, z_max: int) -> List[HolderDiagnostics]:
    """Diagnostics for every z in 2..z_max from a single enumeration.

    Tuples are binned by their largest coordinate, so prefix sums of one
    scan give the whole z grid; values match per-z evaluation to rounding.
    """
    _validate(g, ell, z_max)
    w_bins, aj_bins, ars_bins = _scan_grid(g, ell, z_max)
    w_cum = np.cumsum(w_bins)
    aj_cum = np.cumsum(aj_bins, axis=1)
    ars_cum = np.cumsum(ars_bins, axis=1)
    out = []
    for z in range(2, z_max + 1):
        out.append(
            _diag_from_values(
                g,
                ell,
                z,
                float(w_cum[z - 1]),
                aj_cum[:, z - 1].tolist(),
                ars_cum[:, z - 1].tolist(),
            )
        )
    return out
