"""K-P decomposition machinery for su(n) split into block-diagonal (K) and
anti-block (P) parts with blocks of sizes 1 and n-1.

Provides the Lambda-system control basis, the subgroup tridiagonalization of
-A+P, the scalar-exponential test, the AIII Cartan factorization X = K1 M K2,
and the extraction / frame transformation of the control components
v_k(t) = <e^{At} P e^{-At}, B_k>.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import (
    DimensionMismatch,
    NonSkewHermitian,
    as_matrix,
    expm_skew_hermitian,
    max_abs,
    trace_inner,
)

__all__ = [
    "BadPShape",
    "NonDiagonalDrift",
    "KPSplit",
    "ControlBasis",
    "CartanFactors",
    "ScalarCheck",
    "kp_split",
    "tridiagonalize",
    "is_scalar_exponential",
    "cartan_aiii",
    "control_components",
    "lab_frame_controls",
]


class BadPShape(ValueError):
    """P has nonzero entries outside positions (1,2)/(2,1)."""


class NonDiagonalDrift(ValueError):
    """Drift matrix is not diagonal traceless skew-Hermitian."""


@dataclass(frozen=True)
class KPSplit:
    """M = k_part + p_part with k_part block-diagonal (sizes 1, n-1) and
    p_part supported on the first row/column off-diagonal."""

    k_part: np.ndarray
    p_part: np.ndarray
    n: int


def kp_split(m, tol: float = 1e-9) -> KPSplit:
    """Split a traceless skew-Hermitian matrix into its K and P components."""
    a = as_matrix(m)
    if max_abs(a + a.conj().T) >= tol or abs(np.trace(a)) >= tol:
        raise NonSkewHermitian("kp_split requires a traceless skew-Hermitian matrix")
    p = np.zeros_like(a)
    p[0, 1:] = a[0, 1:]
    p[1:, 0] = a[1:, 0]
    return KPSplit(k_part=a - p, p_part=p, n=a.shape[0])


@dataclass(frozen=True)
class ControlBasis:
    """Orthonormal basis B_1..B_{2(n-1)} of the controlled directions.

    Element 2j-1 couples level 1 to level j+1 with real amplitude
    (entries +-1/sqrt(2)); element 2j with imaginary amplitude i/sqrt(2).
    """

    n: int
    elements: tuple

    @classmethod
    def for_levels(cls, n: int) -> "ControlBasis":
        if n < 2:
            raise DimensionMismatch("a control basis needs n >= 2 levels")
        s = 1.0 / math.sqrt(2.0)
        els = []
        for j in range(1, n):
            re = np.zeros((n, n), dtype=complex)
            re[0, j] = s
            re[j, 0] = -s
            im = np.zeros((n, n), dtype=complex)
            im[0, j] = 1j * s
            im[j, 0] = 1j * s
            els.extend([re, im])
        return cls(n=n, elements=tuple(els))

    def __len__(self) -> int:
        return len(self.elements)


def _su_rotation_to(w: np.ndarray, mu: complex) -> np.ndarray:
    """Special unitary S with S w = (mu/|mu|)||w|| e1, deterministic gauge.

    Householder reflection onto e1 followed by a unit phase on the first row
    to land on the direction of mu, with the determinant folded into the last
    row.  Requires w != 0 and a block size of at least 2 (SU(1) is trivial).
    """
    k = w.shape[0]
    nw = np.linalg.norm(w)
    alpha = cmath.exp(1j * np.angle(w[0])) if w[0] != 0 else 1.0 + 0j
    u = w.astype(complex).copy()
    u[0] += alpha * nw
    h = np.eye(k, dtype=complex) - 2.0 * np.outer(u, u.conj()) / np.vdot(u, u)
    # h maps w to -alpha*||w||*e1; rotate the first-row phase onto mu
    h[0, :] *= (mu / abs(mu)) / (-alpha)
    h[-1, :] /= np.linalg.det(h)
    return h


def tridiagonalize(a_part, p_part, tol: float = 1e-12):
    """Tridiagonalize -A+P by a special unitary with identity 2x2 corner.

    A must be in K (block diagonal, sizes 1 and n-1) and P supported only on
    the (1,2)/(2,1) entries, both nonzero.  Returns (T, K) with
    T = K(-A+P)K^dag tridiagonal and K in S(U(n-1) x U(1)) whose upper-left
    2x2 block is the identity.  Every rotated subdiagonal entry is purely
    imaginary (i * norm of the eliminated subcolumn), so -iT is real
    symmetric whenever P's (1,2) entry is purely imaginary.
    """
    a = as_matrix(a_part)
    p = as_matrix(p_part)
    n = a.shape[0]
    if p.shape != a.shape:
        raise DimensionMismatch("A and P must have equal shape")
    mask = np.ones_like(p, dtype=bool)
    mask[0, 1] = mask[1, 0] = False
    if max_abs(p[mask]) >= tol:
        raise BadPShape("P must vanish outside entries (1,2)/(2,1)")
    if abs(p[0, 1]) < tol or abs(p[1, 0]) < tol:
        raise BadPShape("P entries (1,2)/(2,1) must be nonzero")
    if max_abs(a[0, 1:]) >= tol or max_abs(a[1:, 0]) >= tol:
        raise NonSkewHermitian("A must be block diagonal (first row/column zero)")

    t = (-a + p).astype(complex)
    k_total = np.eye(n, dtype=complex)
    for j in range(1, n - 2):
        w = t[j + 1 :, j].copy()
        nw = np.linalg.norm(w)
        if nw < tol:
            continue
        s = _su_rotation_to(w, 1j * nw)
        k = np.eye(n, dtype=complex)
        k[j + 1 :, j + 1 :] = s
        t = k @ t @ k.conj().T
        k_total = k @ k_total
    return t, k_total


@dataclass(frozen=True)
class ScalarCheck:
    """Outcome of the scalar-matrix test for e^{(-A+P)t}."""

    is_scalar: bool
    phase: Optional[float]
    offending: Optional[tuple]  # ((row, col), deviation) when not scalar


def is_scalar_exponential(a_part, p_part, t: float, tol: float = 1e-9) -> ScalarCheck:
    """Test whether e^{(-A+P)t} is a scalar matrix e^{i phi} 1 within tol.

    Returns the phase phi when true, otherwise the worst offending entry of
    E - e^{i phi} 1 with phi estimated from E[0, 0].
    """
    a = as_matrix(a_part)
    p = as_matrix(p_part)
    e = expm_skew_hermitian(-a + p, t)
    phi = float(np.angle(e[0, 0]))
    dev = np.abs(e - cmath.exp(1j * phi) * np.eye(e.shape[0]))
    idx = np.unravel_index(int(np.argmax(dev)), dev.shape)
    worst = float(dev[idx])
    if worst < tol:
        return ScalarCheck(True, phi, None)
    return ScalarCheck(False, None, ((int(idx[0]), int(idx[1])), worst))


@dataclass(frozen=True)
class CartanFactors:
    """AIII Cartan factorization X = k1 . M(theta) . k2 with sin(theta) >= 0.

    k1, k2 have the block form diag(e^{i eta}, e^{-i eta/(n-1)} V), V in
    SU(n-1); M(theta) is the Givens block of the first two coordinates.
    """

    k1: np.ndarray
    theta: float
    k2: np.ndarray

    def middle(self) -> np.ndarray:
        return _givens_block(self.k1.shape[0], self.theta)

    def reconstruct(self) -> np.ndarray:
        return self.k1 @ self.middle() @ self.k2


def _givens_block(n: int, theta: float) -> np.ndarray:
    m = np.eye(n, dtype=complex)
    c, s = math.cos(theta), math.sin(theta)
    m[0, 0] = c
    m[0, 1] = s
    m[1, 0] = -s
    m[1, 1] = c
    return m


def cartan_aiii(x, tol_degenerate: float = 1e-14) -> CartanFactors:
    """Cartan AIII factorization of X in SU(n).

    cos(theta) = |X11| clamped to [0, 1] fixes theta in [0, pi/2], so
    sin(theta) >= 0.  Gauge: eta2 = 0 (K2 = diag(1, V2)), eta1 = arg(X11),
    and K1 = X K2^dag M^dag, which is block diagonal by construction.  When
    |X11| = 1 (X block diagonal up to roundoff) theta = 0 and all phases fold
    into K1 with K2 = 1.
    """
    xm = as_matrix(x)
    n = xm.shape[0]
    x11 = xm[0, 0]
    c = min(1.0, abs(x11))
    theta = math.acos(c)
    s = math.sin(theta)

    u = xm[0, 1:]
    if s < tol_degenerate or np.linalg.norm(u) == 0.0:
        k1 = xm.copy()
        k1[0, 1:] = 0.0
        k1[1:, 0] = 0.0
        k1[0, 0] = x11 / abs(x11)
        return CartanFactors(k1=k1, theta=0.0, k2=np.eye(n, dtype=complex))

    eta1 = float(np.angle(x11)) if c > 0 else 0.0
    k2 = np.eye(n, dtype=complex)
    if n == 2:
        # SU(1) block is trivial; split the phase between eta1 and eta2
        eta2 = 0.5 * (np.angle(x11) - np.angle(u[0])) if c > 0 else 0.0
        k2[0, 0] = cmath.exp(1j * eta2)
        k2[1, 1] = cmath.exp(-1j * eta2)
    else:
        # V2 in SU(n-1) rotating the conjugated first-row tail onto e1 so
        # that (X K2^dag) has first row (x11, s e^{i eta1}, 0, ...).
        c0 = s * cmath.exp(1j * eta1)
        k2[1:, 1:] = _su_rotation_to(u.conj(), complex(c0.conjugate()))

    k1 = xm @ k2.conj().T @ _givens_block(n, theta).conj().T
    # clean the forced zero pattern of k1 (exact up to roundoff)
    k1[0, 1:] = 0.0
    k1[1:, 0] = 0.0
    return CartanFactors(k1=k1, theta=theta, k2=k2)


def control_components(a_part, p_part, t: float, basis: ControlBasis) -> np.ndarray:
    """Optimal-control components v_k(t) = <e^{At} P e^{-At}, B_k> (real)."""
    a = as_matrix(a_part)
    p = as_matrix(p_part)
    if a.shape[0] != basis.n or p.shape[0] != basis.n:
        raise DimensionMismatch("matrix dimension does not match the basis")
    eat = expm_skew_hermitian(a, t)
    conj = eat @ p @ eat.conj().T
    v = np.array([trace_inner(conj, b) for b in basis.elements])
    return v.real


def _mixing_matrix(drift: np.ndarray, t: float, basis: ControlBasis) -> np.ndarray:
    """a_{j,k}(t) with e^{-drift t} B_j e^{drift t} = sum_k a_{j,k}(t) B_k."""
    edt = expm_skew_hermitian(drift, t)
    m = len(basis)
    a = np.empty((m, m))
    for j, bj in enumerate(basis.elements):
        rot = edt.conj().T @ bj @ edt
        for k, bk in enumerate(basis.elements):
            a[j, k] = trace_inner(rot, bk).real
    return a


def lab_frame_controls(v, drift, t, tol: float = 1e-9) -> np.ndarray:
    """Map interaction-picture controls v(t) to lab-frame controls u(t).

    With e^{-drift t} B_j e^{drift t} = sum_k a_{j,k}(t) B_k, the controls
    satisfy v = a(t)^T u; a(t) is orthogonal (conjugation preserves the trace
    inner product), hence u = a(t) v and ||u|| = ||v||.

    v may be a single sample of shape (2(n-1),) or a stack (N, 2(n-1)) with t
    an array of N times.
    """
    d = as_matrix(drift)
    n = d.shape[0]
    off = d - np.diag(np.diag(d))
    if max_abs(off) >= tol or abs(np.trace(d)) >= tol or max_abs(d + d.conj().T) >= tol:
        raise NonDiagonalDrift("drift must be diagonal traceless skew-Hermitian")
    basis = ControlBasis.for_levels(n)
    v = np.asarray(v, dtype=float)
    if v.ndim == 1:
        if v.shape[0] != len(basis):
            raise DimensionMismatch(f"expected {len(basis)} control components")
        return _mixing_matrix(d, float(t), basis) @ v
    ts = np.asarray(t, dtype=float)
    if v.shape != (ts.shape[0], len(basis)):
        raise DimensionMismatch("v rows must match the time grid")
    return np.stack([_mixing_matrix(d, float(tk), basis) @ vk for tk, vk in zip(ts, v)])
