"""Dense complex Hermitian linear algebra.

Vectors are 1-D complex128 ndarrays, Hermitian matrices 2-D complex128
ndarrays (validated against a relative symmetry tolerance). Eigenproblems go
through LAPACK; everything here is pure/read-only after construction.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from cglab.errors import (
    DimensionMismatchError,
    HermitianContractError,
    NotPositiveDefiniteError,
    NumericalError,
)

# max_ij |M_ij - conj(M_ji)| <= tol * (1 + max_ij |M_ij|); forgives rounding
# accumulated when forming products like X X*.
HERMITIAN_RTOL = 1e-10


@dataclass
class Spectrum:
    """Sorted eigenvalues of a Hermitian matrix, optionally with the unitary.

    eigenvalues are ascending; when `unitary` is present, M = U diag(eig) U*.
    """

    eigenvalues: np.ndarray
    unitary: np.ndarray | None = None

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=np.float64)
        if self.eigenvalues.ndim != 1:
            raise DimensionMismatchError("eigenvalues must be a 1-D array")
        if np.any(np.diff(self.eigenvalues) < 0):
            raise NumericalError("eigenvalues not in ascending order")

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def kappa(self) -> float:
        """Condition number lambda_max / lambda_min (inf for singular)."""
        if self.lambda_min <= 0.0:
            return np.inf
        return self.lambda_max / self.lambda_min


def as_vector(u) -> np.ndarray:
    v = np.asarray(u, dtype=np.complex128)
    if v.ndim != 1:
        raise DimensionMismatchError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v.view(np.float64))):
        raise NumericalError("vector has non-finite entries")
    return v


def inner(u, v) -> complex:
    """l2 inner product sum_i u_i * conj(v_i) (conjugate-linear in v)."""
    u = as_vector(u)
    v = as_vector(v)
    if u.shape != v.shape:
        raise DimensionMismatchError(f"length mismatch: {u.shape[0]} vs {v.shape[0]}")
    return complex(np.sum(u * np.conj(v)))


def check_hermitian(m) -> np.ndarray:
    """Validate Hermitian symmetry within HERMITIAN_RTOL; returns complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    scale = 1.0 + float(np.max(np.abs(a))) if a.size else 1.0
    dev = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if dev > HERMITIAN_RTOL * scale:
        raise HermitianContractError(
            f"matrix is not Hermitian: max |M - M*| = {dev:.3e} "
            f"(allowed {HERMITIAN_RTOL * scale:.3e})"
        )
    return a


def weighted_norms(m, u) -> tuple[float, float]:
    """(||u||_w, ||u||_{w^-1}) for a strictly positive definite weight.

    `m` may be a dense Hermitian matrix or a Spectrum. For a Spectrum without
    a unitary the weight is the diagonal matrix of its eigenvalues.
    """
    u = as_vector(u)
    if isinstance(m, Spectrum):
        lam = m.eigenvalues
        if lam.shape[0] != u.shape[0]:
            raise DimensionMismatchError("vector length does not match spectrum size")
        if m.lambda_min <= 0.0:
            raise NotPositiveDefiniteError(f"lambda_min = {m.lambda_min} <= 0")
        x = m.unitary.conj().T @ u if m.unitary is not None else u
        sq = np.abs(x) ** 2
        return float(np.sqrt(np.sum(sq * lam))), float(np.sqrt(np.sum(sq / lam)))

    a = check_hermitian(m)
    if a.shape[0] != u.shape[0]:
        raise DimensionMismatchError("vector length does not match matrix size")
    try:
        cho = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc
    w2 = np.real(np.sum(u.conj() * (a @ u)))
    winv2 = np.real(np.sum(u.conj() * scipy.linalg.cho_solve(cho, u, check_finite=False)))
    return float(np.sqrt(max(w2, 0.0))), float(np.sqrt(max(winv2, 0.0)))


def kron_sum_laplacian(m: int, k: int) -> np.ndarray:
    """Negated 2-D discrete Laplacian on an m x k grid (positive definite).

    Built as -(I_m kron D_k + D_m kron I_k) where D_n is the n x n symmetric
    tridiagonal matrix with -2 on the diagonal and 1 off it.
    """
    if m < 1 or k < 1:
        raise DimensionMismatchError("grid sides must be >= 1")

    def d2(n):
        d = -2.0 * np.eye(n)
        idx = np.arange(n - 1)
        d[idx, idx + 1] = 1.0
        d[idx + 1, idx] = 1.0
        return d

    lap = np.kron(np.eye(m), d2(k)) + np.kron(d2(m), np.eye(k))
    return -lap


def laplacian_eigenvalues(m: int, k: int) -> np.ndarray:
    """Ascending eigenvalues of -Laplacian: (2 - 2cos(i pi/(m+1))) + (2 - 2cos(j pi/(k+1)))."""
    mu = 2.0 - 2.0 * np.cos(np.arange(1, m + 1) * np.pi / (m + 1))
    eta = 2.0 - 2.0 * np.cos(np.arange(1, k + 1) * np.pi / (k + 1))
    return np.sort(np.add.outer(mu, eta).ravel())


def hermitian_eigen(m, want_vectors: bool = False) -> Spectrum:
    """Full eigendecomposition of a Hermitian matrix, ascending eigenvalues.

    Checks the Hermitian contract on input and trace preservation on output.
    """
    a = check_hermitian(m)
    try:
        if want_vectors:
            lam, vec = np.linalg.eigh(a)
        else:
            lam, vec = np.linalg.eigvalsh(a), None
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed for shape {a.shape}: {exc}") from exc
    tr = float(np.real(np.trace(a)))
    drift = abs(float(np.sum(lam)) - tr)
    if drift > 1e-10 * (1.0 + abs(tr)):
        raise NumericalError(
            f"eigenvalue sum drifted from trace by {drift:.3e} (trace {tr:.6e})"
        )
    return Spectrum(eigenvalues=lam, unitary=vec)


def real_representation(m) -> np.ndarray:
    """Real symmetric 2N x 2N image [[Re M, -Im M], [Im M, Re M]] of Hermitian M.

    The complex system M x = b and its real image share CG residual norms, so
    the real double-double kernels cover the complex case.
    """
    a = np.asarray(m, dtype=np.complex128)
    return np.block([[a.real, -a.imag], [a.imag, a.real]])


def real_vector(u) -> np.ndarray:
    """[Re u; Im u] companion of real_representation."""
    v = as_vector(u)
    return np.concatenate([v.real, v.imag])
