"""Dense complex matrix kernel: unitarity/skew-Hermiticity checks, matrix
exponentials through Hermitian eigendecomposition, tridiagonal spectra, and
the trace inner product used everywhere else in the package.

Everything here operates on small (n <= 8) dense ``numpy`` arrays.  The
exponential of a skew-Hermitian M is computed by diagonalizing the Hermitian
matrix -iM (LAPACK ``eigh``) and exponentiating the phases; the same
eigendecomposition path serves the spectrum checks in :mod:`lambdaopt.synthesis`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

TOL_UNITARY = 1e-9
TOL_EIG = 1e-10

__all__ = [
    "TOL_UNITARY",
    "TOL_EIG",
    "DimensionMismatch",
    "NonSkewHermitian",
    "NonUnitary",
    "NotSymmetric",
    "SpecialUnitary",
    "SkewHermitian",
    "as_matrix",
    "expm_skew_hermitian",
    "eig_real_symmetric",
    "trace_inner",
    "max_abs",
    "matrix_to_json",
    "matrix_from_json",
    "load_matrix",
    "dump_matrix",
    "random_special_unitary",
]


class DimensionMismatch(ValueError):
    """Operands have incompatible shapes."""


class NonSkewHermitian(ValueError):
    """Matrix fails M + M^dag = 0 within tolerance."""


class NonUnitary(ValueError):
    """Matrix fails U^dag U = 1 or det U = 1 within tolerance."""


class NotSymmetric(ValueError):
    """Real matrix fails M = M^T within tolerance."""


def as_matrix(m) -> np.ndarray:
    """Coerce a wrapper or array-like to a square complex ndarray."""
    a = np.asarray(getattr(m, "mat", m), dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return a


def max_abs(m) -> float:
    """Entrywise max-norm ||M||_max."""
    return float(np.max(np.abs(m))) if np.asarray(m).size else 0.0


@dataclass(frozen=True)
class SpecialUnitary:
    """A validated member of SU(n): U^dag U = 1 and det U = 1 within tol."""

    mat: np.ndarray
    tol: float = field(default=TOL_UNITARY, compare=False)

    def __post_init__(self):
        m = as_matrix(self.mat)
        object.__setattr__(self, "mat", m)
        r = max_abs(m.conj().T @ m - np.eye(m.shape[0]))
        if r >= self.tol:
            raise NonUnitary(f"unitarity residual {r:.3e} >= {self.tol:.1e}")
        d = abs(np.linalg.det(m) - 1.0)
        if d >= self.tol:
            raise NonUnitary(f"|det - 1| = {d:.3e} >= {self.tol:.1e}")

    @property
    def n(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True)
class SkewHermitian:
    """A validated skew-Hermitian matrix: ||M + M^dag||_max < tol."""

    mat: np.ndarray
    tol: float = field(default=TOL_UNITARY, compare=False)

    def __post_init__(self):
        m = as_matrix(self.mat)
        object.__setattr__(self, "mat", m)
        r = max_abs(m + m.conj().T)
        if r >= self.tol:
            raise NonSkewHermitian(f"skew-Hermitian residual {r:.3e} >= {self.tol:.1e}")

    @property
    def n(self) -> int:
        return self.mat.shape[0]


def _check_skew(m: np.ndarray, tol: float) -> None:
    r = max_abs(m + m.conj().T)
    if r >= tol:
        raise NonSkewHermitian(f"skew-Hermitian residual {r:.3e} >= {tol:.1e}")


def expm_skew_hermitian(m, t: float = 1.0, tol: float = TOL_UNITARY) -> np.ndarray:
    """exp(M t) for skew-Hermitian M, via eigendecomposition of -iM.

    -iM is Hermitian with real eigenvalues lam_j and unitary eigenvectors V;
    the result is V diag(e^{i lam_j t}) V^dag, unitary by construction.
    """
    m = as_matrix(m)
    _check_skew(m, tol)
    lam, v = np.linalg.eigh(-1j * m)
    return (v * np.exp(1j * lam * t)) @ v.conj().T


def eig_real_symmetric(m, tol: float = 1e-12) -> np.ndarray:
    """Ascending eigenvalues of a real symmetric matrix.

    Raises NotSymmetric if the (real part of the) input is not symmetric
    within ``tol`` or carries a nonzero imaginary part.
    """
    a = np.asarray(m)
    if np.iscomplexobj(a) and max_abs(a.imag) >= tol:
        raise NotSymmetric("matrix has a nonzero imaginary part")
    a = a.real.astype(float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if max_abs(a - a.T) >= tol:
        raise NotSymmetric(f"asymmetry {max_abs(a - a.T):.3e} >= {tol:.1e}")
    return np.linalg.eigvalsh(a)


def trace_inner(c, d) -> complex:
    """Inner product <C, D> = Tr(C D^dag) on matrices of equal dimension."""
    c = as_matrix(c)
    d = as_matrix(d)
    if c.shape != d.shape:
        raise DimensionMismatch(f"shapes {c.shape} and {d.shape} differ")
    return complex(np.trace(c @ d.conj().T))


# -- matrix JSON interchange -------------------------------------------------
#
# {"n": int, "re": [[...]], "im": [[...]]}, row-major, floats serialized with
# repr (up to 17 significant digits, round-trip exact).


def matrix_to_json(m) -> dict:
    a = as_matrix(m)
    return {
        "n": int(a.shape[0]),
        "re": [[float(x) for x in row] for row in a.real],
        "im": [[float(x) for x in row] for row in a.imag],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    n = int(obj["n"])
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj["im"], dtype=float)
    if re.shape != (n, n) or im.shape != (n, n):
        raise DimensionMismatch(
            f"matrix JSON declares n={n} but carries shapes {re.shape}, {im.shape}"
        )
    return re + 1j * im


def dump_matrix(m, path) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_json(m), fh)
        fh.write("\n")


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_json(json.load(fh))


def random_special_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random SU(n) sample: QR of a complex Gaussian, det fixed to 1."""
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    det = np.linalg.det(q)
    return q * np.exp(-1j * np.angle(det) / n)
