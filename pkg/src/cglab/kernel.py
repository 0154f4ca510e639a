"""Finite-N Laguerre correlation-kernel machinery.

psi_j(x) = (j!/Gamma(j+alpha+1))^{1/2} e^{-x/2} x^{alpha/2} L_j^{(alpha)}(x)
form an orthonormal system on (0, inf). The kernel K_N(x,y) = sum_{j<N}
psi_j(x) psi_j(y) is evaluated either as the direct sum or through its
two-term Christoffel-Darboux form; the scaled kernel nu K_N(nu x, nu y)
drives trace-based tail bounds on the extreme eigenvalues of W/nu.

The three-term recurrence is carried on psi_j directly, which keeps
magnitudes O(1) across the oscillatory region. Where psi_0 = e^{-x/2}
x^{alpha/2}/sqrt(Gamma(alpha+1)) underflows (large x), the sweep runs in a
(value, log-scale) representation and rescales as the values grow back, so
high-degree psi_j at large x come out correct instead of flushing to zero.
"""

import math
from dataclasses import dataclass

import numpy as np

from cglab import quadrature
from cglab.errors import DomainError, InvalidSpecError

UNSCALED = "unscaled"
SCALED = "scaled"

# rescale band for the (value, log-scale) sweep
_BIG = 1e150
_SMALL = 1e-150
_LOG_BIG = math.log(_BIG)


@dataclass(frozen=True)
class LaguerreBasis:
    """Evaluator for the orthonormal Laguerre functions of one alpha."""

    alpha: int
    max_degree: int

    def __post_init__(self):
        if self.alpha < 0:
            raise InvalidSpecError(f"alpha must be >= 0, got {self.alpha}")
        if self.max_degree < 0:
            raise InvalidSpecError("max_degree must be >= 0")

    def psi_row(self, x: float) -> np.ndarray:
        """psi_0(x) .. psi_max_degree(x) in one recurrence sweep."""
        return self.psi_row_with_deriv(x)[0]

    def psi_row_with_deriv(self, x: float) -> tuple[np.ndarray, np.ndarray]:
        """(psi_j(x), psi_j'(x)) rows; the derivative uses
        psi_j' = (alpha/(2x) - 1/2 + j/x) psi_j - sqrt(j(j+alpha))/x psi_{j-1}."""
        if x <= 0.0:
            raise DomainError(f"x must be > 0, got {x}")
        a = float(self.alpha)
        n = self.max_degree
        out = np.zeros(n + 1)
        dout = np.zeros(n + 1)

        # scaled representation: psi_j = v_j * exp(logscale)
        logscale = -0.5 * x + 0.5 * a * math.log(x) - 0.5 * math.lgamma(a + 1.0)
        v_prev = 0.0  # psi_{-1}
        v = 1.0  # psi_0 / exp(logscale)

        def emit(j, vj, vjm1):
            if logscale > -_LOG_BIG:
                s = math.exp(logscale)
                out[j] = vj * s
                dout[j] = ((0.5 * a + j) / x - 0.5) * vj * s - (
                    math.sqrt(j * (j + a)) / x
                ) * vjm1 * s

        emit(0, v, v_prev)
        for j in range(n):
            v_next = ((2 * j + a + 1 - x) * v - math.sqrt(j * (j + a)) * v_prev) / math.sqrt(
                (j + 1) * (j + 1 + a)
            )
            v_prev, v = v, v_next
            mag = max(abs(v), abs(v_prev))
            if mag > _BIG:
                v /= _BIG
                v_prev /= _BIG
                logscale += _LOG_BIG
            elif 0.0 < mag < _SMALL:
                v *= _BIG
                v_prev *= _BIG
                logscale -= _LOG_BIG
            emit(j + 1, v, v_prev)
        return out, dout


def psi(j: int, x: float, alpha: int) -> float:
    """Single orthonormal Laguerre function value."""
    if j < 0:
        raise DomainError(f"degree must be >= 0, got {j}")
    return float(LaguerreBasis(alpha=alpha, max_degree=j).psi_row(x)[j])


@dataclass(frozen=True)
class KernelEval:
    """Correlation-kernel evaluator for one (N, alpha), unscaled or scaled.

    Scaled mode evaluates nu K_N(nu x, nu y), the kernel of the eigenvalues
    of W/nu; nu defaults to 4N + 2 alpha + 2.
    """

    N: int
    alpha: int
    mode: str = UNSCALED
    nu: float | None = None

    def __post_init__(self):
        if self.N < 1:
            raise InvalidSpecError("N must be >= 1")
        if self.mode not in (UNSCALED, SCALED):
            raise InvalidSpecError(f"unknown kernel mode {self.mode!r}")

    @property
    def nu_value(self) -> float:
        return self.nu if self.nu is not None else 4.0 * self.N + 2.0 * self.alpha + 2.0

    def _basis(self) -> LaguerreBasis:
        return LaguerreBasis(alpha=self.alpha, max_degree=self.N)


def _cd_prefactor(n: int, alpha: int) -> float:
    # ratio of leading coefficients of the orthonormal functions
    return math.sqrt(n * (n + alpha))


def kernel_diag(ke: KernelEval, x: float) -> float:
    """K(x, x) via the Christoffel-Darboux diagonal limit.

    The x = y limit sqrt(N(N+alpha)) (psi_N psi'_{N-1} - psi_{N-1} psi'_N)
    avoids the 0/0 cancellation of the two-point form; kernel_sum_diag is the
    direct-sum cross-check.
    """
    n = ke.N
    u = ke.nu_value * x if ke.mode == SCALED else x
    row, drow = ke._basis().psi_row_with_deriv(u)
    val = _cd_prefactor(n, ke.alpha) * (row[n] * drow[n - 1] - row[n - 1] * drow[n])
    if ke.mode == SCALED:
        val *= ke.nu_value
    return float(val)


def kernel_sum_diag(ke: KernelEval, x: float) -> float:
    """K(x, x) as the direct sum of squares (manifestly nonnegative)."""
    u = ke.nu_value * x if ke.mode == SCALED else x
    row = ke._basis().psi_row(u)
    val = float(np.sum(row[: ke.N] ** 2))
    if ke.mode == SCALED:
        val *= ke.nu_value
    return val


def kernel_cd(ke: KernelEval, x: float, y: float) -> float:
    """Two-point kernel via Christoffel-Darboux; diagonal limit at x = y."""
    if x == y:
        return kernel_diag(ke, x)
    n = ke.N
    scale = ke.nu_value if ke.mode == SCALED else 1.0
    u, v = scale * x, scale * y
    b = ke._basis()
    ru = b.psi_row(u)
    rv = b.psi_row(v)
    val = _cd_prefactor(n, ke.alpha) * (ru[n - 1] * rv[n] - ru[n] * rv[n - 1]) / (u - v)
    return float(val * scale)


def kernel_sum(ke: KernelEval, x: float, y: float) -> float:
    """Two-point kernel as the direct sum (cross-check path)."""
    n = ke.N
    scale = ke.nu_value if ke.mode == SCALED else 1.0
    b = ke._basis()
    ru = b.psi_row(scale * x)
    rv = b.psi_row(scale * y)
    return float(np.dot(ru[:n], rv[:n]) * scale)


LAMBDA_MAX = "lambda_max"
LAMBDA_MIN = "lambda_min"


def _diag_vectorized(ke: KernelEval, xs: np.ndarray) -> np.ndarray:
    return np.array([kernel_diag(ke, float(x)) for x in xs])


def _truncation_point(ke: KernelEval, t: float) -> float:
    # scan right until the diagonal falls below 1e-18 of the largest value
    # seen; beyond the soft edge the decay is superexponential.
    step = 0.05 if ke.mode == SCALED else 0.05 * ke.nu_value
    x = t
    peak = 0.0
    while True:
        val = abs(kernel_diag(ke, x + step))
        peak = max(peak, val)
        x += step
        if peak > 0.0 and val < 1e-18 * peak:
            return x
        if val == 0.0 and x > t + 3.0 * step:
            return x


def tail_bound_from_kernel(ke: KernelEval, t: float, branch: str) -> float:
    """Trace bound I exp(1 + I) on the extreme-eigenvalue tails of W/nu.

    branch=lambda_max integrates the scaled diagonal over [t, inf) and bounds
    P(lambda_max(W)/nu > t); branch=lambda_min integrates over [0, t] and
    bounds P(lambda_min(W)/nu < t). The integrand behaves like x^alpha at 0
    (handled by the x = u^2 substitution) and decays like exp(-nu x) at the
    far end (handled by truncation where it falls below 1e-18 of peak).
    """
    if t <= 0.0:
        raise DomainError(f"t must be > 0, got {t}")
    scaled = ke if ke.mode == SCALED else KernelEval(N=ke.N, alpha=ke.alpha, mode=SCALED, nu=ke.nu)

    if branch == LAMBDA_MAX:
        hi = _truncation_point(scaled, t)
        integral = quadrature.integrate(
            lambda xs: _diag_vectorized(scaled, xs), t, hi, tol=1e-12
        )
    elif branch == LAMBDA_MIN:
        root = math.sqrt(t)
        integral = quadrature.integrate(
            lambda us: _diag_vectorized(scaled, us * us) * 2.0 * us, 0.0, root, tol=1e-12
        )
    else:
        raise InvalidSpecError(f"unknown branch {branch!r}")
    integral = abs(integral)
    return integral * math.exp(1.0 + integral)


def trace_integral(ke: KernelEval) -> float:
    """integral of K(x,x) dx over (0, inf); equals N for either mode."""
    if ke.mode == SCALED:
        upper = _truncation_point(ke, 1.0)
        lo_split = 0.25
    else:
        upper = _truncation_point(ke, ke.nu_value)
        lo_split = 0.25 * ke.nu_value
    # x = u^2 near the origin tames the x^alpha edge for quadrature
    lower = quadrature.integrate(
        lambda us: _diag_vectorized(ke, us * us) * 2.0 * us,
        0.0,
        math.sqrt(lo_split),
        tol=1e-10,
    )
    rest = quadrature.integrate(
        lambda xs: _diag_vectorized(ke, xs), lo_split, upper, tol=1e-10
    )
    return lower + rest
