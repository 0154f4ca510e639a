"""Matrix and vector families: LUE perturbations in the critical scaling,
unit-sphere right-hand sides, discrete Laplacians, Marchenko-Pastur
eigenvalue clusters.

Sampling is reproducible by construction: every draw is a pure function of a
(master_seed, stream_id) pair, so parallel schedules cannot change results.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from cglab import linalg, quadrature
from cglab.errors import InvalidSpecError
from cglab.linalg import Spectrum

GAUSSIAN_SPHERE = "gaussian_sphere"
UNIFORM_BOX = "uniform_box"


@dataclass(frozen=True)
class SeededRng:
    """Counter-based substream handle: (master_seed, stream_id) -> Philox stream.

    Identical pairs reproduce identical draws regardless of scheduling. The
    substream derivation is spawn_key=(stream_id,) on the master seed
    sequence.
    """

    master_seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(seq))

    def substream(self, stream_id: int) -> "SeededRng":
        return SeededRng(self.master_seed, stream_id)


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, SeededRng):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected SeededRng or numpy Generator, got {type(rng)!r}")


def alpha_of(N: int, gamma, c) -> int:
    """floor(sqrt(4c) * N^gamma), evaluated in high precision.

    gamma may be a Fraction for exactness at rational exponents. Values
    within 1e-25 of an integer are snapped before the floor, so exact-integer
    cases (e.g. gamma=1/2 with square N) do not round down spuriously.
    """
    if N < 1:
        raise InvalidSpecError(f"N must be >= 1, got {N}")
    if not 0 < float(gamma) <= 1:
        raise InvalidSpecError(f"gamma must be in (0, 1], got {gamma}")
    if not float(c) > 0:
        raise InvalidSpecError(f"c must be > 0, got {c}")
    with mpmath.workdps(50):
        if isinstance(gamma, Fraction):
            g = mpmath.mpf(gamma.numerator) / gamma.denominator
        else:
            g = mpmath.mpf(gamma)
        v = mpmath.sqrt(4 * mpmath.mpf(c)) * mpmath.power(N, g)
        nearest = mpmath.nint(v)
        if abs(v - nearest) < mpmath.mpf("1e-25"):
            v = nearest
        return int(mpmath.floor(v))


@dataclass(frozen=True)
class EnsembleSpec:
    """(N, gamma, c, sigma) with the derived scaling quantities.

    sigma = math.inf encodes the noise-dominated case (identical in law to
    A = 0, sigma = 1).
    """

    N: int
    gamma: float | Fraction = 0.5
    c: float = 1.0
    sigma: float = math.inf

    def __post_init__(self):
        if self.N < 1:
            raise InvalidSpecError(f"N must be >= 1, got {self.N}")
        if not 0 < float(self.gamma) <= 1:
            raise InvalidSpecError(f"gamma must be in (0, 1], got {self.gamma}")
        if not self.c > 0:
            raise InvalidSpecError(f"c must be > 0, got {self.c}")
        if not self.sigma > 0:
            raise InvalidSpecError(f"sigma must be in (0, inf], got {self.sigma}")

    @property
    def alpha(self) -> int:
        return alpha_of(self.N, self.gamma, self.c)

    @property
    def nu(self) -> int:
        return 4 * self.N + 2 * self.alpha + 2

    @property
    def m_half(self) -> float:
        """Soft-edge scale N + (alpha+1)/2."""
        return self.N + 0.5 * (self.alpha + 1)

    @property
    def conjectural(self) -> bool:
        """True where the tail estimates are conjectural (gamma > 1/2)."""
        return float(self.gamma) > 0.5


def standard_complex_normal(rng, shape) -> np.ndarray:
    """iid Z = X + iY with X, Y real normal, mean 0, variance 1/2 each."""
    gen = _as_generator(rng)
    scale = 1.0 / np.sqrt(2.0)
    return scale * (gen.standard_normal(shape) + 1j * gen.standard_normal(shape))


def sample_lue(spec: EnsembleSpec, rng) -> np.ndarray:
    """H = X X* / nu with X an N x (N+alpha) iid standard complex normal matrix.

    Strictly positive definite almost surely (alpha >= 0); nu sits at the
    soft edge, so lambda_max(H) ~ 1.
    """
    if spec.alpha < 0:
        raise InvalidSpecError("alpha must be >= 0 for the strictly PD regime")
    x = standard_complex_normal(rng, (spec.N, spec.N + spec.alpha))
    h = x @ x.conj().T / spec.nu
    return 0.5 * (h + h.conj().T)


def sample_unit_b(N: int, law: str, rng) -> np.ndarray:
    """Unit-norm right-hand side: gaussian_sphere (complex, rotation
    invariant) or uniform_box (real iid uniform on [-1,1], normalized)."""
    if N < 1:
        raise InvalidSpecError(f"N must be >= 1, got {N}")
    gen = _as_generator(rng)
    if law == GAUSSIAN_SPHERE:
        b = standard_complex_normal(gen, N)
    elif law == UNIFORM_BOX:
        b = gen.uniform(-1.0, 1.0, N).astype(np.complex128)
    else:
        raise InvalidSpecError(f"unknown right-hand-side law {law!r}")
    norm = np.linalg.norm(b)
    if norm == 0.0:  # pragma: no cover - probability zero
        return sample_unit_b(N, law, gen)
    return b / norm


# ---------------------------------------------------------------------------
# Marchenko-Pastur quantiles and eigenvalue clusters
# ---------------------------------------------------------------------------

def mp_cdf(t: float, tol: float = 1e-13) -> float:
    """CDF of the Marchenko-Pastur(1) law ((1/2pi) sqrt((4-x)/x) on [0,4]).

    The integrable 1/sqrt(x) endpoint is removed by x = u^2, leaving
    (1/pi) * integral_0^sqrt(t) sqrt(4 - u^2) du, handled by adaptive
    Gauss-Legendre panels.
    """
    if t <= 0.0:
        return 0.0
    if t >= 4.0:
        return 1.0
    val = quadrature.integrate(lambda u: np.sqrt(4.0 - u * u), 0.0, math.sqrt(t), tol=tol) / math.pi
    return min(val, 1.0)


def mp_quantiles(k: int, tol: float = 1e-12) -> np.ndarray:
    """zeta_j = min{0 <= t <= 4 : MP-CDF(t) = j/k} for j = 1..k (zeta_k = 4).

    Bisection down to float resolution; CDF(zeta_j) matches j/k to ~1e-13.
    """
    if k < 1:
        raise InvalidSpecError(f"k must be >= 1, got {k}")
    if tol <= 0:
        raise InvalidSpecError("tol must be > 0")
    out = np.empty(k)
    out[-1] = 4.0
    for j in range(1, k):
        target = j / k
        lo, hi = 0.0, 4.0
        while True:
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if mp_cdf(mid, tol=min(tol, 1e-13)) < target:
                lo = mid
            else:
                hi = mid
        out[j - 1] = 0.5 * (lo + hi)
    return out


@dataclass(frozen=True)
class ClusterSpec:
    """Diagonal matrix of Marchenko-Pastur quantile clusters.

    mk eigenvalues: with zero_rows=True (the adopted index convention
    j = 0..k-1), the j = 0 row contributes m exact zeros and each j >= 1 row
    spreads m values around zeta_j with total width `spread`
    (default 1/(10 k^2), small enough to keep everything nonnegative).
    With zero_rows=False, j runs 1..k and no zeros are inserted.
    """

    m: int
    k: int
    spread: float | None = None
    zero_rows: bool = True

    def __post_init__(self):
        if self.m < 1 or self.k < 1:
            raise InvalidSpecError("m and k must be >= 1")
        if self.spread is not None and self.spread < 0:
            raise InvalidSpecError("spread must be >= 0")

    @property
    def spread_value(self) -> float:
        return self.spread if self.spread is not None else 1.0 / (10.0 * self.k**2)


def cluster_matrix(spec: ClusterSpec, quantiles: np.ndarray | None = None) -> Spectrum:
    """Eigenvalues zeta_j + ((l - floor(m/2))/m) * spread, plus the zero row.

    Returns the ascending Spectrum of the mk x mk diagonal matrix. Raises
    InvalidSpecError if the spread pushes any eigenvalue negative.
    """
    m, k = spec.m, spec.k
    zeta = mp_quantiles(k) if quantiles is None else np.asarray(quantiles, dtype=np.float64)
    offsets = (np.arange(1, m + 1) - (m // 2)) / m * spec.spread_value
    if spec.zero_rows:
        js = zeta[: k - 1]  # j = 1..k-1; j = 0 contributes the zeros
        values = np.concatenate([np.zeros(m), np.add.outer(js, offsets).ravel()])
    else:
        values = np.add.outer(zeta, offsets).ravel()
    if np.min(values) < 0.0:
        raise InvalidSpecError(
            f"spread {spec.spread_value:g} produces a negative eigenvalue "
            f"({np.min(values):.3e}); reduce it below ~zeta_1"
        )
    return Spectrum(eigenvalues=np.sort(values))


def perturbed_system(
    a, spec: EnsembleSpec, rng, normalize: bool = False, noise_scale: float = 1.0
) -> Spectrum:
    """Ascending eigenvalues of A + sigma^2 * noise_scale * H, H a fresh LUE draw.

    `a` may be None (A = 0), a dense Hermitian array, or a Spectrum (treated
    as the diagonal matrix of its eigenvalues). sigma = inf drops A and
    returns eig(H). normalize=True divides A by its spectral norm first
    (the ||A|| <= 1 setting of the moment bounds). noise_scale rescales the
    perturbation; nu/N turns H = W/nu into the order-one-norm W/N.
    """
    if not spec.sigma > 0:
        raise InvalidSpecError("perturbed_system needs sigma in (0, inf]")
    h = sample_lue(spec, rng)
    if a is None or math.isinf(spec.sigma):
        m = h if math.isinf(spec.sigma) else spec.sigma**2 * noise_scale * h
        return linalg.hermitian_eigen(m)
    if isinstance(a, Spectrum):
        a_dense = np.diag(a.eigenvalues.astype(np.complex128))
    else:
        a_dense = linalg.check_hermitian(a)
    if a_dense.shape[0] != spec.N:
        raise InvalidSpecError(
            f"A has dimension {a_dense.shape[0]} but the ensemble spec has N={spec.N}"
        )
    if normalize:
        norm = float(np.max(np.abs(np.linalg.eigvalsh(a_dense))))
        if norm > 0:
            a_dense = a_dense / norm
    return linalg.hermitian_eigen(a_dense + spec.sigma**2 * noise_scale * h)
