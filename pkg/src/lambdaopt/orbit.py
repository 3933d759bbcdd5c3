"""Coordinates on the conjugation orbit space SU(3)/S(U(2) x U(1)).

A class is determined by x = X11 (invariant under subgroup conjugation) and,
on the regular stratum |x| < 1, by the closed-disc coordinate z1 of the
peeled SU(2) block.  On the singular stratum |x| = 1 the matrix is block
diagonal diag(e^{i phi'}, Y) and the class lives on a Moebius band
coordinatized by (phi, s) with phi = -phi' mod 2pi and
s = Re(e^{-i phi/2} Tr(Y) / 2) in [-1, 1].

The Moebius identification glues s at the 0/2pi seam with a sign flip
(s_{2pi} = -s_0); phi is normalized to [0, 2pi) and s is computed on that
branch, so crossing the seam flips the sign of s.  Comparisons across the
seam should use |s|.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .linalg import as_matrix, expm_skew_hermitian, max_abs

TOL_STRATUM = 1e-7

__all__ = [
    "TOL_STRATUM",
    "StratumBoundaryAmbiguous",
    "OutOfDisc",
    "RegularClass",
    "FiberClass",
    "OrbitClass",
    "QuotientSample",
    "orbit_class",
    "psi_regular",
    "psi_fiber",
    "project_trajectory",
]


class StratumBoundaryAmbiguous(ValueError):
    """|X11| sits in the boundary band but X is not block diagonal."""


class OutOfDisc(ValueError):
    """Regular-chart coordinate x must satisfy |x| < 1."""


@dataclass(frozen=True)
class RegularClass:
    """Regular-stratum point: x in the open unit disc, z1 in the closed disc."""

    x: complex
    z1: complex
    stratum = "regular"


@dataclass(frozen=True)
class FiberClass:
    """Singular-stratum point on the Moebius band: phi in [0, 2pi), s in [-1, 1]."""

    phi: float
    s: float
    stratum = "fiber"


OrbitClass = Union[RegularClass, FiberClass]


@dataclass(frozen=True)
class QuotientSample:
    """Orbit class of a trajectory point at time t >= 0."""

    t: float
    cls: OrbitClass


def _w_block(x: complex) -> np.ndarray:
    """First factor of the regular-stratum representative W(x) diag(1, Z)."""
    s = math.sqrt(max(0.0, 1.0 - abs(x) ** 2))
    return np.array(
        [[x, s, 0.0], [-s, x.conjugate(), 0.0], [0.0, 0.0, 1.0]], dtype=complex
    )


def _fiber_coords(x11: complex, y: np.ndarray) -> FiberClass:
    phi = (-cmath.phase(x11)) % (2.0 * math.pi)
    s = (cmath.exp(-0.5j * phi) * np.trace(y) / 2.0).real
    return FiberClass(phi=phi, s=float(s))


def orbit_class(x_mat, tol_stratum: float = TOL_STRATUM) -> OrbitClass:
    """Class of X in SU(3) under conjugation by S(U(2) x U(1)).

    Regular stratum (|X11| < 1 - tol_stratum): rotate the lower first-column
    entries to (-sqrt(1-|x|^2), 0) with a subgroup element, peel off W(x),
    and read z1 from the remaining SU(2) block.  Otherwise X must be block
    diagonal up to tolerance and the Moebius coordinates (phi, s) are
    returned.
    """
    xm = as_matrix(x_mat)
    if xm.shape[0] != 3:
        raise ValueError("orbit_class is implemented for SU(3) only")
    x = complex(xm[0, 0])
    ax = abs(x)
    if 1.0 - ax >= tol_stratum:
        w = xm[1:, 0]
        nw = np.linalg.norm(w)
        # v0 in SU(2) sends w to (||w||, 0); K = diag(1, -v0) then sends the
        # lower first column to (-||w||, 0), matching W(x)'s first column.
        v0 = np.array(
            [[w[0].conjugate(), w[1].conjugate()], [-w[1], w[0]]], dtype=complex
        ) / nw
        k = np.eye(3, dtype=complex)
        k[1:, 1:] = -v0
        rotated = k @ xm @ k.conj().T
        z = (_w_block(x).conj().T @ rotated)[1:, 1:]
        return RegularClass(x=x, z1=complex(z[0, 0]))

    off = max(max_abs(xm[0, 1:]), max_abs(xm[1:, 0]))
    # a unitary with |x11| >= 1 - tol has off entries <= sqrt(2 tol); anything
    # larger means the input is not close enough to the singular stratum
    if off > 1.5 * math.sqrt(2.0 * tol_stratum):
        raise StratumBoundaryAmbiguous(
            f"|X11| = {ax:.12f} is within {tol_stratum:.1e} of the boundary but "
            f"the off-block residual {off:.3e} is too large to classify"
        )
    return _fiber_coords(x, xm[1:, 1:])


def psi_regular(x: complex, z) -> np.ndarray:
    """Regular-stratum representative W(x) . diag(1, Z), Z in SU(2), |x| < 1."""
    x = complex(x)
    if abs(x) >= 1.0:
        raise OutOfDisc(f"|x| = {abs(x):.12f} is not < 1")
    zm = as_matrix(z)
    if zm.shape[0] != 2:
        raise ValueError("Z must be 2x2")
    rep = np.eye(3, dtype=complex)
    rep[1:, 1:] = zm
    return _w_block(x) @ rep


def psi_fiber(phi: float, z) -> np.ndarray:
    """Singular-stratum representative diag(e^{-i phi}, e^{i phi}, 1) diag(1, Z)."""
    zm = as_matrix(z)
    if zm.shape[0] != 2:
        raise ValueError("Z must be 2x2")
    rep = np.eye(3, dtype=complex)
    rep[1:, 1:] = zm
    f = np.diag([cmath.exp(-1j * phi), cmath.exp(1j * phi), 1.0])
    return f @ rep


def project_trajectory(
    a_part,
    p_part,
    t_grid: Sequence[float],
    tol_stratum: float = TOL_STRATUM,
) -> list[QuotientSample]:
    """Orbit classes of the geodesic U(t) = e^{At} e^{(-A+P)t} on a time grid.

    The grid must be ascending and start at 0; the first sample is the class
    of the identity, FiberClass(phi=0, s=1).  StratumBoundaryAmbiguous is
    re-raised with the offending time attached.
    """
    ts = np.asarray(t_grid, dtype=float)
    if ts.ndim != 1 or ts.size == 0 or ts[0] != 0.0 or np.any(np.diff(ts) < 0):
        raise ValueError("t_grid must be ascending and start at t = 0")
    a = as_matrix(a_part)
    p = as_matrix(p_part)
    out = []
    for t in ts:
        u = expm_skew_hermitian(a, t) @ expm_skew_hermitian(-a + p, t)
        try:
            cls = orbit_class(u, tol_stratum=tol_stratum)
        except StratumBoundaryAmbiguous as exc:
            raise StratumBoundaryAmbiguous(f"t = {t!r}: {exc}") from exc
        out.append(QuotientSample(t=float(t), cls=cls))
    return out
