"""Nonlinear integer optimization for the normalized minimum time T = t/(2pi).

Candidates are integer quadruples (k, s2 = 2s, l, r) with s >= 0 and s2 of
the same parity as k.  Writing phi = alpha_hat + l and psi = beta_hat + r
(phi the larger of the two), a candidate is admissible when the cubic

    C(v) = (v + k/3)(v - k/6 - s)(v - k/6 + s)

is strictly negative at phi and strictly positive at psi; the objective is

    T^2 = k^2/12 + s^2 - (phi^2 + psi^2 + phi psi).

Phases supplied as ``fractions.Fraction`` are processed in exact rational
arithmetic (strict inequalities with zero tolerance); floats use a 1e-12
margin on the constraint products.  The exhaustive solver reduces rational
phases to a common denominator and enumerates in scaled integer arithmetic,
vectorized with int64 and falling back to unbounded Python integers when the
scaled products could overflow.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np

Num = Union[int, float, Fraction]

FLOAT_MARGIN = 1e-12

__all__ = [
    "FLOAT_MARGIN",
    "PhiPsiOrder",
    "WrongRegion",
    "RequiresAntisymmetricPhases",
    "PhaseOutOfRange",
    "Infeasible",
    "Region",
    "TargetPhases",
    "IntegerTuple",
    "BoxBounds",
    "SearchBounds",
    "ClosedFormSolution",
    "SearchResult",
    "si",
    "li",
    "t_squared",
    "f_value",
    "admissible",
    "region_of",
    "map_region",
    "negate_k",
    "box_bounds",
    "corner_max_F",
    "solve_closed_form",
    "solve_brute_force",
    "oracle_workers",
]


class PhiPsiOrder(ValueError):
    """phi_l = alpha_hat + l must exceed psi_r = beta_hat + r."""


class WrongRegion(ValueError):
    """(k, s) does not lie in the region the operation requires."""


class RequiresAntisymmetricPhases(ValueError):
    """Operation assumes beta_hat = -alpha_hat."""


class PhaseOutOfRange(ValueError):
    """alpha_hat outside the supported range."""


class Infeasible(ValueError):
    """No admissible candidate within the search bounds."""


def si(x: Num) -> int:
    """Smallest integer strictly greater than x."""
    return math.floor(x) + 1


def li(x: Num) -> int:
    """Largest integer strictly smaller than x."""
    return math.ceil(x) - 1


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


@dataclass(frozen=True)
class TargetPhases:
    """Normalized eigenphases alpha_hat, beta_hat in (-1/2, 1/2], both nonzero."""

    alpha_hat: Num
    beta_hat: Num

    def __post_init__(self):
        for name, v in (("alpha_hat", self.alpha_hat), ("beta_hat", self.beta_hat)):
            if not (-Fraction(1, 2) < v <= Fraction(1, 2)):
                raise PhaseOutOfRange(f"{name} = {v} outside (-1/2, 1/2]")
            if v == 0:
                raise PhaseOutOfRange(f"{name} must be nonzero")

    @property
    def exact(self) -> bool:
        return _is_exact(self.alpha_hat) and _is_exact(self.beta_hat)

    @property
    def antisymmetric(self) -> bool:
        if self.exact:
            return self.alpha_hat == -self.beta_hat
        return abs(float(self.alpha_hat) + float(self.beta_hat)) <= FLOAT_MARGIN


@dataclass(frozen=True, order=True)
class IntegerTuple:
    """Candidate (k, s2, l, r); s = s2/2 >= 0 carries the parity of k."""

    k: int
    s2: int
    l: int
    r: int

    def __post_init__(self):
        if self.s2 < 0:
            raise ValueError(f"s2 = {self.s2} must be >= 0")
        if (self.s2 - self.k) % 2 != 0:
            raise ValueError(f"s2 = {self.s2} must have the parity of k = {self.k}")

    @property
    def s(self) -> Fraction:
        return Fraction(self.s2, 2)

    @property
    def m(self) -> int:
        return (self.s2 - self.k) // 2


class Region(Enum):
    A = "A"
    B = "B"
    C = "C"
    NONE = "none"


def _phi_psi(tup: IntegerTuple, phases: TargetPhases):
    return phases.alpha_hat + tup.l, phases.beta_hat + tup.r


def f_value(tup: IntegerTuple, phases: TargetPhases) -> Num:
    """F(l, r) = phi^2 + psi^2 + phi psi, the part of T^2 to maximize."""
    phi, psi = _phi_psi(tup, phases)
    return phi * phi + psi * psi + phi * psi


def t_squared(tup: IntegerTuple, phases: TargetPhases) -> Num:
    """T^2 = k^2/12 + s^2 - F(l, r); may be negative for inadmissible tuples."""
    if phases.exact:
        ks = Fraction(tup.k * tup.k, 12) + Fraction(tup.s2, 2) ** 2
    else:
        ks = tup.k * tup.k / 12.0 + (tup.s2 / 2.0) ** 2
    return ks - f_value(tup, phases)


def _cubic(v: Num, k: int, s2: int, exact: bool) -> Num:
    if exact:
        k3, k6, s = Fraction(k, 3), Fraction(k, 6), Fraction(s2, 2)
    else:
        k3, k6, s = k / 3.0, k / 6.0, s2 / 2.0
    return (v + k3) * (v - k6 - s) * (v - k6 + s)


def admissible(tup: IntegerTuple, phases: TargetPhases) -> bool:
    """Strict admissibility of (k, s2, l, r): C(phi) < 0 and C(psi) > 0.

    Requires phi_l > psi_r (the caller assigns the larger phase to the
    alpha/l pair); raises PhiPsiOrder otherwise, equality included.
    """
    phi, psi = _phi_psi(tup, phases)
    if not phi > psi:
        raise PhiPsiOrder(f"need phi_l > psi_r, got phi_l = {phi}, psi_r = {psi}")
    if phases.exact:
        return (
            _cubic(phi, tup.k, tup.s2, True) < 0
            and _cubic(psi, tup.k, tup.s2, True) > 0
        )
    return (
        _cubic(float(phi), tup.k, tup.s2, False) < -FLOAT_MARGIN
        and _cubic(float(psi), tup.k, tup.s2, False) > FLOAT_MARGIN
    )


def region_of(k: int, s2: int) -> Region:
    """Region of the (k, s) half-plane: A (0<s<-k/2), B (0<s<k/2), C (s>|k|/2)."""
    if (s2 - k) % 2 != 0 or s2 < 0:
        raise ValueError("s2 must be >= 0 with the parity of k")
    if s2 > abs(k):
        return Region.C
    if 0 < s2 < -k:
        return Region.A
    if 0 < s2 < k:
        return Region.B
    return Region.NONE


_REGION_MAPS = {
    # (k', s2') as integer linear images of (k, s2); both maps are involutory
    "AtoC": (lambda k, s2: (-(k + 3 * s2) // 2, (s2 - k) // 2), {Region.A, Region.C}),
    "BtoC": (lambda k, s2: ((3 * s2 - k) // 2, (s2 + k) // 2), {Region.B, Region.C}),
}


def map_region(tup: IntegerTuple, which: str) -> IntegerTuple:
    """Apply the involutory region symmetry ('AtoC' or 'BtoC') to (k, s).

    (l, r) are unchanged; admissibility and T^2 are preserved.  The source
    (k, s) must lie in one of the two regions the map exchanges.
    """
    try:
        fn, allowed = _REGION_MAPS[which]
    except KeyError:
        raise ValueError(f"unknown region map {which!r}") from None
    if region_of(tup.k, tup.s2) not in allowed:
        raise WrongRegion(
            f"(k, s2) = ({tup.k}, {tup.s2}) lies in {region_of(tup.k, tup.s2).value}, "
            f"not in the regions exchanged by {which}"
        )
    k2, s22 = fn(tup.k, tup.s2)
    return IntegerTuple(k=k2, s2=s22, l=tup.l, r=tup.r)


def negate_k(tup: IntegerTuple, phases: TargetPhases) -> IntegerTuple:
    """(k, s, l, r) -> (-k, s, -r, -l); valid when beta_hat = -alpha_hat."""
    if not phases.antisymmetric:
        raise RequiresAntisymmetricPhases(
            f"beta_hat = {phases.beta_hat} is not -alpha_hat = {-phases.alpha_hat}"
        )
    return IntegerTuple(k=-tup.k, s2=tup.s2, l=-tup.r, r=-tup.l)


@dataclass(frozen=True)
class BoxBounds:
    """Admissible (l, r) box in region C: l in [a_hat, b_hat], r in [c_hat, d_hat]."""

    a_hat: int
    b_hat: int
    c_hat: int
    d_hat: int

    @property
    def l_values(self) -> range:
        return range(self.a_hat, self.b_hat + 1)

    @property
    def r_values(self) -> range:
        return range(self.c_hat, self.d_hat + 1)

    @property
    def nonempty(self) -> bool:
        return self.b_hat >= self.a_hat and self.d_hat >= self.c_hat


def box_bounds(k: int, s2: int, phases: TargetPhases) -> BoxBounds:
    """Region-C box: a_hat = SI(-k/3 - alpha), b_hat = LI(k/6 + s - alpha),
    c_hat = SI(k/6 - s - beta), d_hat = LI(-k/3 - beta)."""
    if region_of(k, s2) is not Region.C:
        raise WrongRegion(f"(k, s2) = ({k}, {s2}) is not in region C")
    if phases.exact:
        k3, k6, s = Fraction(k, 3), Fraction(k, 6), Fraction(s2, 2)
    else:
        k3, k6, s = k / 3.0, k / 6.0, s2 / 2.0
    return BoxBounds(
        a_hat=si(-k3 - phases.alpha_hat),
        b_hat=li(k6 + s - phases.alpha_hat),
        c_hat=si(k6 - s - phases.beta_hat),
        d_hat=li(-k3 - phases.beta_hat),
    )


def corner_max_F(k: int, s2: int, alpha_hat: Num):
    """Maximizing corner of F over the region-C box when beta_hat = -alpha_hat.

    Requires 0 < |alpha_hat| < 1/3 and k >= 0.  With h = k mod 6 the maximum
    sits at (b_hat, c_hat) for alpha_hat > 0 in all cases, and for
    alpha_hat < 0 at (b_hat, c_hat) if h in {0, 3}, (b_hat, d_hat) if
    h in {2, 5}, (a_hat, c_hat) if h in {1, 4}.  Returns (l, r, F(l, r)).
    """
    third = Fraction(1, 3) if _is_exact(alpha_hat) else 1.0 / 3.0
    if not 0 < abs(alpha_hat) < third:
        raise PhaseOutOfRange(f"|alpha_hat| = {abs(alpha_hat)} outside (0, 1/3)")
    if k < 0:
        raise WrongRegion("corner_max_F requires k >= 0")
    phases = TargetPhases(alpha_hat, -alpha_hat)
    box = box_bounds(k, s2, phases)
    h = k % 6
    if alpha_hat > 0 or h in (0, 3):
        l, r = box.b_hat, box.c_hat
    elif h in (2, 5):
        l, r = box.b_hat, box.d_hat
    else:  # h in (1, 4), alpha_hat < 0
        l, r = box.a_hat, box.c_hat
    return l, r, f_value(IntegerTuple(k=k, s2=s2, l=l, r=r), phases)


@dataclass(frozen=True)
class ClosedFormSolution:
    """Optimal sign of alpha_hat, candidate tuple, and T^2 for SU(2) targets."""

    alpha_sign: int
    tuple: IntegerTuple
    t_squared: Num


def solve_closed_form(alpha_hat_abs: Num) -> ClosedFormSolution:
    """Minimum T^2 over both signs of alpha_hat for beta_hat = -alpha_hat.

    |alpha_hat| <= 4/15: T^2 = 2|alpha_hat| - alpha_hat^2 at the negative
    sign with (k, s, l, r) = (0, 1, 1, -1); |alpha_hat| >= 4/15:
    T^2 = 4/3 - 3|alpha_hat| - alpha_hat^2 at the positive sign with
    (2, 2, 2, -1).  At exactly 4/15 both agree (104/225) and the k = 0
    branch is returned.
    """
    a = alpha_hat_abs
    exact = _is_exact(a)
    third = Fraction(1, 3) if exact else 1.0 / 3.0
    if not 0 < a < third:
        raise PhaseOutOfRange(f"|alpha_hat| = {a} outside (0, 1/3)")
    threshold = Fraction(4, 15) if exact else 4.0 / 15.0
    if a <= threshold:
        return ClosedFormSolution(
            alpha_sign=-1,
            tuple=IntegerTuple(k=0, s2=2, l=1, r=-1),
            t_squared=2 * a - a * a,
        )
    base = Fraction(4, 3) if exact else 4.0 / 3.0
    return ClosedFormSolution(
        alpha_sign=1,
        tuple=IntegerTuple(k=2, s2=4, l=2, r=-1),
        t_squared=base - 3 * a - a * a,
    )


@dataclass(frozen=True)
class SearchBounds:
    """Enumeration box |k| <= k_max, s <= s_max, |l| <= l_max, |r| <= r_max.

    The defaults dominate the closed-form regime with margin: any candidate
    beating T^2 < 4/3 must keep k^2/12 + s^2 - 3 max(phi, psi)^2 below 4/3.
    """

    k_max: int = 12
    s_max: int = 12
    l_max: int = 8
    r_max: int = 8

    def __post_init__(self):
        if min(self.k_max, self.s_max, self.l_max, self.r_max) < 0:
            raise ValueError("search bounds must be nonnegative")


@dataclass(frozen=True)
class SearchResult:
    tuple: IntegerTuple
    t_squared: Num
    method: str = "brute_force"


def oracle_workers(default: Optional[int] = None) -> int:
    """Worker count for the exhaustive search, capped by LAMBDAOPT_THREADS."""
    cap = os.environ.get("LAMBDAOPT_THREADS")
    n = default if default is not None else min(4, os.cpu_count() or 1)
    if cap is not None:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, n)


def _best_for_k_exact(k, s2_list, pa, pb, q, la, ra, obj, ordgt, ordlt, ks_filter):
    """Minimal key (12 q^2 T^2, |k|, s2, l, r) over one k slice, int64 path."""
    va = 6 * (pa + la * q)
    vb = 6 * (pb + ra * q)
    best = None
    for s2 in s2_list:
        if ks_filter is not None and not ks_filter(k, s2):
            continue
        kq, sq = k * q, 3 * s2 * q
        fa = (va + 2 * kq) * (va - kq - sq) * (va - kq + sq)
        fb = (vb + 2 * kq) * (vb - kq - sq) * (vb - kq + sq)
        mask = (ordgt & (fa < 0)[:, None] & (fb > 0)[None, :]) | (
            ordlt & (fb < 0)[None, :] & (fa > 0)[:, None]
        )
        if not mask.any():
            continue
        masked = np.where(mask, obj, -1)
        top = int(masked.max())
        li_, ri_ = np.unravel_index(int(np.argmax(masked == top)), masked.shape)
        t2s = q * q * k * k + 3 * q * q * s2 * s2 - 12 * top
        key = (t2s, abs(k), s2, int(la[li_]), int(ra[ri_]), k)
        if best is None or key < best:
            best = key
    return best


def _best_for_k_pyint(k, s2_list, pa, pb, q, ls, rs, ks_filter):
    """Overflow-safe pure-Python version of the exact slice search."""
    pvals = [pa + l * q for l in ls]
    qvals = [pb + r * q for r in rs]
    best = None
    for s2 in s2_list:
        if ks_filter is not None and not ks_filter(k, s2):
            continue
        kq, sq = k * q, 3 * s2 * q
        fa = [(6 * p + 2 * kq) * (6 * p - kq - sq) * (6 * p - kq + sq) for p in pvals]
        fb = [(6 * w + 2 * kq) * (6 * w - kq - sq) * (6 * w - kq + sq) for w in qvals]
        for i, (l, p) in enumerate(zip(ls, pvals)):
            for j, (r, w) in enumerate(zip(rs, qvals)):
                if p > w:
                    ok = fa[i] < 0 and fb[j] > 0
                elif w > p:
                    ok = fb[j] < 0 and fa[i] > 0
                else:
                    continue
                if not ok:
                    continue
                t2s = q * q * k * k + 3 * q * q * s2 * s2 - 12 * (p * p + p * w + w * w)
                key = (t2s, abs(k), s2, l, r)
                if best is None or key < best:
                    best = key
    return best


def _best_for_k_float(k, s2_list, af, bf, la, ra, obj, ordgt, ordlt, ks_filter):
    """Float-path slice search with the 1e-12 strictness margin."""
    phi = af + la
    psi = bf + ra
    best = None
    for s2 in s2_list:
        if ks_filter is not None and not ks_filter(k, s2):
            continue
        k3, k6, s = k / 3.0, k / 6.0, s2 / 2.0
        fa = (phi + k3) * (phi - k6 - s) * (phi - k6 + s)
        fb = (psi + k3) * (psi - k6 - s) * (psi - k6 + s)
        nega, posa = fa < -FLOAT_MARGIN, fa > FLOAT_MARGIN
        negb, posb = fb < -FLOAT_MARGIN, fb > FLOAT_MARGIN
        mask = (ordgt & nega[:, None] & posb[None, :]) | (
            ordlt & negb[None, :] & posa[:, None]
        )
        if not mask.any():
            continue
        masked = np.where(mask, obj, -np.inf)
        top = masked.max()
        li_, ri_ = np.unravel_index(int(np.argmax(masked == top)), masked.shape)
        t2 = k * k / 12.0 + (s2 / 2.0) ** 2 - float(top)
        key = (t2, abs(k), s2, int(la[li_]), int(ra[ri_]))
        if best is None or key < best:
            best = key
    return best


def solve_brute_force(
    phases: TargetPhases,
    bounds: Optional[SearchBounds] = None,
    *,
    ks_filter: Optional[Callable[[int, int], bool]] = None,
    max_workers: Optional[int] = None,
) -> SearchResult:
    """Exhaustively minimize T^2 over the bounded candidate box.

    Enumerates every (k, s2, l, r) with |k| <= k_max, 0 <= s2 <= 2 s_max of
    matching parity, |l| <= l_max, |r| <= r_max; keeps admissible candidates
    (roles of (alpha, l) and (beta, r) swapped when beta_hat + r is the
    larger phase) and returns the minimizer, ties broken lexicographically
    on (T^2, |k|, s2, l, r).  Deterministic for any worker partition.

    ``ks_filter(k, s2) -> bool`` optionally restricts the (k, s2) slice, for
    region- or residue-restricted searches.
    """
    bounds = bounds or SearchBounds()
    ls = list(range(-bounds.l_max, bounds.l_max + 1))
    rs = list(range(-bounds.r_max, bounds.r_max + 1))
    ks = list(range(-bounds.k_max, bounds.k_max + 1))

    exact = phases.exact
    if exact:
        a, b = Fraction(phases.alpha_hat), Fraction(phases.beta_hat)
        q = math.lcm(a.denominator, b.denominator)
        pa, pb = int(a * q), int(b * q)
        pmax = max(abs(pa), abs(pb)) + max(bounds.l_max, bounds.r_max) * q
        fmax = 6 * pmax + (2 * bounds.k_max + 6 * bounds.s_max) * q
        use_int64 = fmax**3 < 2**62 and 12 * 3 * pmax**2 < 2**62
        la = np.array(ls, dtype=np.int64)
        ra = np.array(rs, dtype=np.int64)
        if use_int64:
            p = pa + la * q
            w = pb + ra * q
            obj = p[:, None] ** 2 + p[:, None] * w[None, :] + w[None, :] ** 2
            ordgt = p[:, None] > w[None, :]
            ordlt = p[:, None] < w[None, :]

            def slice_fn(k, s2_list):
                return _best_for_k_exact(
                    k, s2_list, pa, pb, q, la, ra, obj, ordgt, ordlt, ks_filter
                )

        else:

            def slice_fn(k, s2_list):
                return _best_for_k_pyint(k, s2_list, pa, pb, q, ls, rs, ks_filter)

    else:
        af = float(phases.alpha_hat)
        bf = float(phases.beta_hat)
        la = np.array(ls, dtype=float)
        ra = np.array(rs, dtype=float)
        phi = af + la
        psi = bf + ra
        obj = phi[:, None] ** 2 + phi[:, None] * psi[None, :] + psi[None, :] ** 2
        ordgt = phi[:, None] > psi[None, :]
        ordlt = phi[:, None] < psi[None, :]

        def slice_fn(k, s2_list):
            return _best_for_k_float(
                k, s2_list, af, bf, la, ra, obj, ordgt, ordlt, ks_filter
            )

    def s2_values(k):
        return list(range(abs(k) % 2, 2 * bounds.s_max + 1, 2))

    workers = oracle_workers(max_workers)
    if workers <= 1 or len(ks) <= 1:
        results = [slice_fn(k, s2_values(k)) for k in ks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda k: slice_fn(k, s2_values(k)), ks))

    keys = [r for r in results if r is not None]
    if not keys:
        raise Infeasible("no admissible candidate within the search bounds")
    t2_key, _, s2, l, r = min(keys)
    k = min(k for k, res in zip(ks, results) if res is not None and res == min(keys))
    tup = IntegerTuple(k=k, s2=s2, l=l, r=r)
    t2 = Fraction(t2_key, 12 * q * q) if exact else t2_key
    return SearchResult(tuple=tup, t_squared=t2, method="brute_force")
