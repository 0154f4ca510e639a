"""Closed-form halting-time and condition-number bounds.

Everything here is a leading-order evaluator: o(1)/O(.) error terms of the
asymptotic statements are dropped, and unspecified absolute constants
(C, C1, C2) are explicit parameters defaulting to 1. Logarithms are natural
throughout; the iteration-count ratios are base-invariant anyway.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

from cglab.ensembles import EnsembleSpec
from cglab.errors import DomainError, InvalidSpecError

L2 = "l2"
WEIGHTED = "weighted"
RESID = "resid"
_PARTS = (L2, WEIGHTED, RESID)


def theta(kappa: float) -> float:
    """Worst-case CG contraction factor (sqrt(k)-1)/(sqrt(k)+1), in [0, 1)."""
    if kappa < 1.0:
        raise DomainError(f"condition number must be >= 1, got {kappa}")
    s = math.sqrt(kappa)
    return (s - 1.0) / (s + 1.0)


def k_eps(kappa: float, eps: float) -> float:
    """Iteration count K with theta(kappa)^K = eps/2; upper bound for tau_w."""
    if kappa < 1.0:
        raise DomainError(f"condition number must be >= 1, got {kappa}")
    if eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    if kappa == 1.0 or eps >= 2.0:
        return 0.0
    return math.log(eps / 2.0) / math.log(theta(kappa))


def _log_contraction(s: float) -> float:
    # log((sqrt(s)+1)/(sqrt(s)-1)) = -log(theta(s)), +inf at s = 1
    r = math.sqrt(s)
    if r == 1.0:
        return math.inf
    return math.log((r + 1.0) / (r - 1.0))


def g_l2(s: float, eps: float) -> float:
    """Per-run bound on tau_eps in l2: log(sqrt(s)*2/eps) / log((sqrt(s)+1)/(sqrt(s)-1))."""
    if s < 1.0:
        raise DomainError(f"s must be >= 1, got {s}")
    if s == 1.0:
        return 0.0
    return math.log(math.sqrt(s) * 2.0 / eps) / _log_contraction(s)


def g_w(s: float, eps: float) -> float:
    """Per-run bound on tau_{w,eps}: log(2/eps) / log((sqrt(s)+1)/(sqrt(s)-1))."""
    if s < 1.0:
        raise DomainError(f"s must be >= 1, got {s}")
    if s == 1.0:
        return 0.0
    return math.log(2.0 / eps) / _log_contraction(s)


def g_resid(s: float) -> float:
    """Per-run bound on successive residual ratios; equals theta(s) <= 1."""
    return theta(s)


def rho_sigma(c: float, sigma: float) -> float:
    """2 sqrt((1 + 1/sigma^2)/c); sigma = inf gives 2/sqrt(c)."""
    if c <= 0:
        raise DomainError(f"c must be > 0, got {c}")
    if not sigma > 0:
        raise DomainError(f"sigma must be in (0, inf], got {sigma}")
    inv = 0.0 if math.isinf(sigma) else sigma**-2
    return 2.0 * math.sqrt((1.0 + inv) / c)


def theorem1_bound(part: str, j: int, N: int, gamma, c: float, sigma: float, eps: float) -> float:
    """Leading-order moment bounds on the halting times of A + sigma^2 H.

    part=l2:       (1/2^j) N^{j(1-g)} rho^j log(N^{1-g} rho 2/eps)^j
    part=weighted: (1/2^j) N^{j(1-g)} rho^j log(2/eps)^j
    part=resid:    (1 - 2/(rho N^{1-g} + 1))^j
    """
    if part not in _PARTS:
        raise InvalidSpecError(f"unknown part {part!r}")
    if j < 1:
        raise DomainError(f"moment order j must be >= 1, got {j}")
    rho = rho_sigma(c, sigma)
    scale = rho * float(N) ** (1.0 - float(gamma))
    if part == RESID:
        return (1.0 - 2.0 / (scale + 1.0)) ** j
    if part == L2:
        lg = math.log(scale * 2.0 / eps)
    else:
        lg = math.log(2.0 / eps)
    return (0.5 * scale * lg) ** j


def remark1_markov(j: int, N: int, gamma, lambda_exp: float, sigma: float, eps: float) -> float:
    """Markov tail on P(tau_eps >= N^{1-lambda}); assumes the c = 2 scaling.

    May exceed 1; callers clamp for display.
    """
    if j < 1:
        raise DomainError(f"moment order j must be >= 1, got {j}")
    g = float(gamma)
    if not 0.0 <= lambda_exp < g:
        raise DomainError(f"need 0 <= lambda < gamma, got lambda={lambda_exp}, gamma={g}")
    inv = 0.0 if math.isinf(sigma) else sigma**-2
    lg = math.log(4.0 * float(N) ** (1.0 - g) * math.sqrt(1.0 + inv) / eps)
    return 2.0 ** (2 - j) * (1.0 + inv) ** (j / 2.0) * float(N) ** (-j * (g - lambda_exp)) * lg**j


def lemma5_f(alpha: int, nu: float, d: float) -> float:
    """Hard-edge scale f(N) = [d^-1 alpha^{-1/3}]^{2/(d alpha)} [nu^2/alpha^2]^{1 + 2/(d alpha)}."""
    if alpha < 1:
        raise DomainError(f"alpha must be >= 1, got {alpha}")
    if not 0.0 < d <= 1.0:
        raise DomainError(f"d must be in (0, 1], got {d}")
    da = d * alpha
    base = (nu / alpha) ** 2
    return (alpha ** (-1.0 / 3.0) / d) ** (2.0 / da) * base ** (1.0 + 2.0 / da)


@dataclass(frozen=True)
class BoundParams:
    """Constants of the condition-number tail machinery.

    alpha is the tail exponent parameter (the ensemble's alpha, tempered by d
    only where the caller decides); a = 1 + 1/sigma^2 shifts the soft edge;
    c1 = 4/3 is the soft-edge exponential rate; C, C1, C2 are the
    paper-unspecified prefactors (default 1); ell_d defaults to the heuristic
    1 - d^{2/3}, and delta to ell_d^{-2} - 1.
    """

    N: int
    gamma: float
    alpha: int
    a: float = 1.0
    c1: float = 4.0 / 3.0
    C: float = 1.0
    C1: float = 1.0
    C2: float = 1.0
    d: float = 1.0
    ell_d: float | None = None
    delta: float | None = None

    def __post_init__(self):
        if self.a < 1.0:
            raise InvalidSpecError(f"a must be >= 1, got {self.a}")
        if not 0.0 < self.d <= 1.0:
            raise InvalidSpecError(f"d must be in (0, 1], got {self.d}")
        if self.ell_d is not None and not 0.0 < self.ell_d < 1.0:
            raise InvalidSpecError("ell_d must be in (0, 1)")
        if self.delta is not None and self.delta <= 0.0:
            raise InvalidSpecError("delta must be > 0")

    @classmethod
    def from_ensemble(cls, spec: EnsembleSpec, d: float = 1.0, **kwargs) -> "BoundParams":
        inv = 0.0 if math.isinf(spec.sigma) else spec.sigma**-2
        return cls(N=spec.N, gamma=float(spec.gamma), alpha=spec.alpha, a=1.0 + inv, d=d, **kwargs)

    @property
    def ell(self) -> float:
        """ell(d); only its d -> 0 asymptotics are known, so this is heuristic."""
        if self.ell_d is not None:
            return self.ell_d
        return 1.0 - self.d ** (2.0 / 3.0)

    @property
    def delta_value(self) -> float:
        if self.delta is not None:
            return self.delta
        ell = self.ell
        if ell <= 0.0:
            raise InvalidSpecError(
                f"ell(d) = {ell:g} <= 0 at d = {self.d:g}; pass delta explicitly"
            )
        return ell**-2 - 1.0

    @property
    def e_N(self) -> float:
        """(1/2) alpha^2 / (2 a c1 N + alpha)."""
        return 0.5 * self.alpha**2 / (2.0 * self.a * self.c1 * self.N + self.alpha)

    @property
    def delta_N(self) -> float:
        """(1+delta)(1 + C(N^-1 + delta N^{gamma-1})) - 1."""
        delta = self.delta_value
        n = float(self.N)
        return (1.0 + delta) * (1.0 + self.C * (1.0 / n + delta * n ** (self.gamma - 1.0))) - 1.0

    @property
    def nu(self) -> int:
        return 4 * self.N + 2 * self.alpha + 2

    @property
    def f_N(self) -> float:
        return lemma5_f(self.alpha, self.nu, self.d)

    @property
    def b_N(self) -> float:
        """a f(N) (1 + delta_N), the condition-number scale of the moment bounds."""
        return self.a * self.f_N * (1.0 + self.delta_N)


def condition1_tails(params: BoundParams, t: float) -> tuple[float, float]:
    """(T~_max(t), T~_min(t)): the assumed exponential / power tails.

    Outside each branch's validity range the trivial bound 1 is returned.
    """
    if t >= 1.0:
        tmax = params.C1 * math.exp(-params.c1 * params.N * (t - params.a))
    else:
        tmax = 1.0
    f = params.f_N
    if t >= (1.0 + params.delta_value) * f:
        tmin = params.C2 * (t / f) ** (-params.alpha / 2.0)
    else:
        tmin = 1.0
    return min(tmax, params.C1), min(tmin, params.C2)


def lemma2_kappa_tail(params: BoundParams, t: float) -> float:
    """P(kappa(H) > t) <= C [t/(a f(N))]^{-alpha/2 + e_N}, t >= a(1+delta_N)f(N).

    Below the validity threshold returns the trivial bound 1.
    """
    threshold = params.a * (1.0 + params.delta_N) * params.f_N
    if t < threshold:
        return 1.0
    return params.C * (t / (params.a * params.f_N)) ** (-params.alpha / 2.0 + params.e_N)


class LueTails(NamedTuple):
    t_max: float
    t_min: float
    min_valid: bool
    conjectural: bool


def lue_tail_bounds(spec: EnsembleSpec, d: float, t: float, C: float = 1.0) -> LueTails:
    """Extreme-eigenvalue tails of H = W/nu.

    t_max bounds P(lambda_max(H) > t) by C exp(-4/3 M (t-1)); t_min bounds
    P(1/lambda_min(H) > t) by C [f(N)/t]^{d alpha / 2}, valid for
    t >= ell(d)^-2 nu^2/alpha^2 (min_valid False and trivial bound 1 below).
    Rigorous for gamma <= 1/2; flagged conjectural beyond.
    """
    if not 0.0 < d <= 1.0:
        raise DomainError(f"d must be in (0, 1], got {d}")
    alpha, nu = spec.alpha, spec.nu
    t_max = min(C * math.exp(-4.0 / 3.0 * spec.m_half * (t - 1.0)), C)
    f = lemma5_f(alpha, nu, d)
    ell = 1.0 - d ** (2.0 / 3.0)
    hard_scale = (nu / alpha) ** 2
    threshold = hard_scale / ell**2 if ell > 0.0 else math.inf
    if t >= threshold:
        t_min = min(C * (f / t) ** (d * alpha / 2.0), C)
        valid = True
    else:
        t_min = 1.0
        valid = False
    return LueTails(t_max=t_max, t_min=t_min, min_valid=valid, conjectural=spec.conjectural)


def theorem2_bounds(part: str, j: int, b_n: float, eps: float) -> float:
    """Moment bounds parameterized by the condition-number scale b_N.

    part=l2:       (1/2^j) b_N^{j/2} log(b_N^{1/2}/eps)^j
    part=weighted: (1/2^j) b_N^{j/2} log(1/eps)^j
    part=resid:    (1 - 2/(sqrt(b_N)+1))^j
    The logarithm placement follows the generalized statement literally; it
    differs from theorem1_bound by eps -> eps/2 in the log arguments.
    """
    if part not in _PARTS:
        raise InvalidSpecError(f"unknown part {part!r}")
    if j < 1:
        raise DomainError(f"moment order j must be >= 1, got {j}")
    if b_n <= 1.0:
        raise DomainError(f"b_N must be > 1, got {b_n}")
    root = math.sqrt(b_n)
    if part == RESID:
        return (1.0 - 2.0 / (root + 1.0)) ** j
    if part == L2:
        return (0.5 * root * math.log(root / eps)) ** j
    return (0.5 * root * math.log(1.0 / eps)) ** j


def b_n_leading(N: int, gamma, c: float, sigma: float) -> float:
    """Leading-order b_N = 4 c^-1 (1 + sigma^-2) N^{2-2gamma}; equals
    (rho_sigma N^{1-gamma})^2."""
    return (rho_sigma(c, sigma) * float(N) ** (1.0 - float(gamma))) ** 2
