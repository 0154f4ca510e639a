"""Conjugate gradient with dual-norm residual instrumentation.

Two runners share one contract: `cg_run` applies CG to a dense Hermitian
positive definite matrix, `cg_run_diagonal` to a diagonal system of
eigenvalues (the round-off-safe protocol: O(N) per iteration instead of
O(N^2), and in extended precision the iterate sequence is effectively exact).

Extended precision means double-double arithmetic (~31 significant decimal
digits), dispatched to the compiled kernel when available. Complex systems
are run through their real symmetric representation, which has identical CG
scalars and residual norms.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from cglab import ddcore, linalg
from cglab.errors import (
    DimensionMismatchError,
    NotConvergedError,
    NotPositiveDefiniteError,
)

STANDARD = "standard64"
EXTENDED = "extended"


@dataclass(frozen=True)
class CgConfig:
    """Runner configuration: threshold, iteration cap, scalar mode.

    max_iters=None means 10*N, chosen at run time.
    """

    epsilon: float = 1e-4
    max_iters: int | None = None
    precision: str = EXTENDED

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.precision not in (STANDARD, EXTENDED):
            raise ValueError(f"unknown precision mode {self.precision!r}")

    def cap(self, n: int) -> int:
        return self.max_iters if self.max_iters is not None else 10 * n


@dataclass
class CgTrace:
    """Per-iteration residual norms; index k is the k-th iterate, k=0 the start."""

    residuals_l2: np.ndarray
    residuals_w: np.ndarray
    iterations_run: int
    converged: bool


@dataclass(frozen=True)
class HaltingTimes:
    tau_l2: int
    tau_w: int


def _trace(res_l2, res_w, converged) -> CgTrace:
    return CgTrace(
        residuals_l2=np.asarray(res_l2, dtype=np.float64),
        residuals_w=np.asarray(res_w, dtype=np.float64),
        iterations_run=len(res_l2) - 1,
        converged=bool(converged),
    )


def _is_real(*arrays) -> bool:
    return all(np.all(a.imag == 0.0) for a in arrays)


def cg_run(m, b, cfg: CgConfig = CgConfig()) -> CgTrace:
    """Run CG on the dense Hermitian positive definite system m x = b, x0 = 0.

    Records ||r_k||_{l2} and ||r_k||_{w^-1} at every iteration and stops once
    both relative residuals fall to cfg.epsilon (or at the iteration cap,
    with converged=False).
    """
    a = linalg.check_hermitian(m)
    bb = linalg.as_vector(b)
    if a.shape[0] != bb.shape[0]:
        raise DimensionMismatchError("matrix and right-hand side sizes differ")
    n = bb.shape[0]
    cap = cfg.cap(n)

    if cfg.precision == EXTENDED:
        if _is_real(a, bb):
            mr, br = a.real.copy(), bb.real.copy()
        else:
            mr, br = linalg.real_representation(a), linalg.real_vector(bb)
        try:
            res_l2, res_w, ok = ddcore.cg_dense(
                np.ascontiguousarray(mr), np.ascontiguousarray(br), cfg.epsilon, cap
            )
        except ArithmeticError as exc:
            raise NotPositiveDefiniteError(str(exc)) from exc
        return _trace(res_l2, res_w, ok)

    # standard64: complex numpy iteration, Cholesky solves for the w^-1 norm
    try:
        cho = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc

    def winv_norm(r):
        return float(
            np.sqrt(
                max(np.real(np.sum(r.conj() * scipy.linalg.cho_solve(cho, r, check_finite=False))), 0.0)
            )
        )

    r = bb.copy()
    p = r.copy()
    rr = float(np.real(np.sum(r.conj() * r)))
    res_l2 = [float(np.sqrt(rr))]
    res_w = [winv_norm(r)]
    if res_l2[0] == 0.0:
        return _trace(res_l2, res_w, True)
    tol_l2, tol_w = cfg.epsilon * res_l2[0], cfg.epsilon * res_w[0]
    converged = False
    for _ in range(cap):
        z = a @ p
        pap = float(np.real(np.sum(p.conj() * z)))
        if pap <= 1e-300:
            raise NotPositiveDefiniteError("search-direction curvature <= 0")
        ak = rr / pap
        r = r - ak * z
        rr2 = float(np.real(np.sum(r.conj() * r)))
        res_l2.append(float(np.sqrt(rr2)))
        res_w.append(winv_norm(r))
        if res_l2[-1] <= tol_l2 and res_w[-1] <= tol_w:
            converged = True
            break
        if rr2 == 0.0:
            converged = True
            break
        p = r + (rr2 / rr) * p
        rr = rr2
    return _trace(res_l2, res_w, converged)


def cg_run_diagonal(spectrum, b, cfg: CgConfig = CgConfig()) -> CgTrace:
    """Run CG on diag(lambda) y = b; identical contract to cg_run.

    `spectrum` is a linalg.Spectrum or a 1-D array of eigenvalues, all > 0.
    Each iteration costs O(N).
    """
    lam = spectrum.eigenvalues if isinstance(spectrum, linalg.Spectrum) else np.asarray(spectrum, dtype=np.float64)
    bb = linalg.as_vector(b)
    if lam.shape[0] != bb.shape[0]:
        raise DimensionMismatchError("eigenvalue list and right-hand side sizes differ")
    if np.min(lam) <= 0.0:
        raise NotPositiveDefiniteError(f"lambda_min = {np.min(lam)} <= 0")
    n = bb.shape[0]
    cap = cfg.cap(n)

    if _is_real(bb):
        lam_r, b_r = lam, bb.real.copy()
    else:
        # complex diagonal system == real system of doubled size
        lam_r = np.concatenate([lam, lam])
        b_r = linalg.real_vector(bb)

    if cfg.precision == EXTENDED:
        try:
            res_l2, res_w, ok = ddcore.cg_diagonal(
                np.ascontiguousarray(lam_r), np.ascontiguousarray(b_r), cfg.epsilon, cap
            )
        except ArithmeticError as exc:
            raise NotPositiveDefiniteError(str(exc)) from exc
        return _trace(res_l2, res_w, ok)

    r = b_r.copy()
    p = r.copy()
    rr = float(np.dot(r, r))
    res_l2 = [float(np.sqrt(rr))]
    res_w = [float(np.sqrt(np.dot(r * r, 1.0 / lam_r)))]
    if res_l2[0] == 0.0:
        return _trace(res_l2, res_w, True)
    tol_l2, tol_w = cfg.epsilon * res_l2[0], cfg.epsilon * res_w[0]
    converged = False
    for _ in range(cap):
        z = lam_r * p
        pap = float(np.dot(p, z))
        if pap <= 1e-300:
            raise NotPositiveDefiniteError("search-direction curvature <= 0")
        ak = rr / pap
        r = r - ak * z
        rr2 = float(np.dot(r, r))
        res_l2.append(float(np.sqrt(rr2)))
        res_w.append(float(np.sqrt(np.dot(r * r, 1.0 / lam_r))))
        if res_l2[-1] <= tol_l2 and res_w[-1] <= tol_w:
            converged = True
            break
        if rr2 == 0.0:
            converged = True
            break
        p = r + (rr2 / rr) * p
        rr = rr2
    return _trace(res_l2, res_w, converged)


def _first_crossing(res: np.ndarray, epsilon: float, label: str) -> int:
    if res[0] == 0.0:
        return 0
    ratios = res / res[0]
    below = np.nonzero(ratios[1:] <= epsilon)[0]
    if below.size == 0:
        raise NotConvergedError(
            f"{label} residual never reached epsilon={epsilon:g} "
            f"(final ratio {ratios[-1]:.3e} after {len(res) - 1} iterations)",
            final_ratio=float(ratios[-1]),
        )
    return int(below[0])


def halting_times(trace: CgTrace, epsilon: float) -> HaltingTimes:
    """min{k : ||r_{k+1}|| / ||r_0|| <= epsilon} in each norm (ties count)."""
    return HaltingTimes(
        tau_l2=_first_crossing(trace.residuals_l2, epsilon, "l2"),
        tau_w=_first_crossing(trace.residuals_w, epsilon, "w^-1"),
    )
