"""Monte Carlo harness: parameter sweeps, halting-time sampling via the
diagonalized extended-precision protocol, sample-mean curves, nonnegative
two-parameter growth fits, and CSV/JSON persistence.

Sampling pipeline per record: build the family matrix A, draw H and form the
spectrum of A + sigma^2 H, draw b, run diagonal CG in double-double
arithmetic, extract both halting times. Every record is a pure function of
(master_seed, stream_id) with stream_id = grid_index * samples_per_N +
sample_id, so output is byte-identical across runs and worker counts.
"""

import concurrent.futures
import hashlib
import json
import logging
import math
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from cglab import cg, ensembles, linalg
from cglab.errors import CgLabError, FitError, InvalidSpecError, PlanParseError
from cglab.errors import DomainError

logger = logging.getLogger(__name__)

NOISE_ONLY = "noise_only"
LAPLACIAN = "laplacian"
MP_CLUSTERS = "mp_clusters"
_FAMILIES = (NOISE_ONLY, LAPLACIAN, MP_CLUSTERS)

RECORD_COLUMNS = (
    "N", "gamma", "c", "sigma", "eps", "sample_id", "stream_id",
    "tau_l2", "tau_w", "kappa", "lambda_min", "lambda_max",
)
CURVE_COLUMNS = ("N", "field", "mean", "stderr", "count")


@dataclass(frozen=True)
class ExperimentPlan:
    family: str
    N_grid: tuple[int, ...]
    gamma: float | Fraction = Fraction(1, 2)
    c: float = 1.0
    sigma: float = math.inf
    eps: float = 1e-4
    samples_per_N: int = 100
    master_seed: int = 0
    b_law: str = ensembles.UNIFORM_BOX

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise InvalidSpecError(f"unknown family {self.family!r}")
        if not self.N_grid:
            raise InvalidSpecError("N_grid must be nonempty")
        if self.samples_per_N < 1:
            raise InvalidSpecError("samples_per_N must be >= 1")
        if not 0.0 < self.eps < 1.0:
            raise InvalidSpecError("eps must be in (0, 1)")
        if self.family == MP_CLUSTERS and self.sigma == 0.0:
            raise InvalidSpecError("mp_clusters with sigma = 0 is singular")
        if self.sigma < 0.0:
            raise InvalidSpecError("sigma must be >= 0")
        object.__setattr__(self, "N_grid", tuple(int(n) for n in self.N_grid))
        for n in self.N_grid:
            if self.family in (LAPLACIAN, MP_CLUSTERS) and int(math.isqrt(n)) < 2:
                raise InvalidSpecError(f"grid value {n} too small for m = k = isqrt(N)")

    def digest(self) -> str:
        return hashlib.sha256(write_plan_text(self).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class SampleRecord:
    N: int
    gamma: float
    c: float
    sigma: float
    eps: float
    sample_id: int
    stream_id: int
    tau_l2: int
    tau_w: int
    kappa: float
    lambda_min: float
    lambda_max: float


@dataclass(frozen=True)
class CurvePoint:
    N: int
    field: str
    mean: float
    stderr: float
    count: int


@dataclass(frozen=True)
class FitResult:
    p: float
    a: float
    b: float
    residual_norm: float
    plan_digest: str = ""


def _family_eigenvalues(plan: ExperimentPlan, n_nominal: int, gen, cluster_cache) -> np.ndarray:
    """Spectrum of the per-sample system matrix; consumes gen for H."""
    if plan.family == NOISE_ONLY:
        # sigma is ignored-as-infinity here: noise_only == (A = 0, sigma = 1)
        spec = ensembles.EnsembleSpec(N=n_nominal, gamma=plan.gamma, c=plan.c, sigma=math.inf)
        return ensembles.perturbed_system(None, spec, gen).eigenvalues

    side = math.isqrt(n_nominal)
    dim = side * side
    if plan.sigma == 0.0:
        # deterministic matrix, no perturbation to sample
        return linalg.laplacian_eigenvalues(side, side)
    spec = ensembles.EnsembleSpec(N=dim, gamma=plan.gamma, c=plan.c, sigma=plan.sigma)
    if math.isinf(plan.sigma):
        return ensembles.perturbed_system(None, spec, gen).eigenvalues
    if plan.family == LAPLACIAN:
        a = linalg.kron_sum_laplacian(side, side)
    else:
        if side not in cluster_cache:
            cluster_cache[side] = ensembles.cluster_matrix(
                ensembles.ClusterSpec(m=side, k=side)
            )
        a = cluster_cache[side]
    # Structured families run in the moment-bound setting ||A|| <= 1 with an
    # order-one-norm perturbation sigma^2 W/N (noise_scale nu/N); this is
    # what reproduces the observed N^{1/4} noise acceleration.
    return ensembles.perturbed_system(
        a, spec, gen, normalize=True, noise_scale=spec.nu / spec.N
    ).eigenvalues


def _run_sample_traced(plan: ExperimentPlan, grid_index: int, sample_id: int, cluster_cache=None):
    n_nominal = plan.N_grid[grid_index]
    stream_id = grid_index * plan.samples_per_N + sample_id
    gen = ensembles.SeededRng(plan.master_seed, stream_id).generator()
    lam = _family_eigenvalues(plan, n_nominal, gen, cluster_cache if cluster_cache is not None else {})
    dim = lam.shape[0]
    b = ensembles.sample_unit_b(dim, plan.b_law, gen)
    trace = cg.cg_run_diagonal(lam, b, cg.CgConfig(epsilon=plan.eps, precision=cg.EXTENDED))
    taus = cg.halting_times(trace, plan.eps)
    record = SampleRecord(
        N=dim,
        gamma=float(plan.gamma),
        c=plan.c,
        sigma=plan.sigma,
        eps=plan.eps,
        sample_id=sample_id,
        stream_id=stream_id,
        tau_l2=taus.tau_l2,
        tau_w=taus.tau_w,
        kappa=float(lam[-1] / lam[0]),
        lambda_min=float(lam[0]),
        lambda_max=float(lam[-1]),
    )
    return record, trace


def _run_sample(plan: ExperimentPlan, grid_index: int, sample_id: int, cluster_cache=None) -> SampleRecord:
    return _run_sample_traced(plan, grid_index, sample_id, cluster_cache)[0]


def iter_samples(plan: ExperimentPlan):
    """Sequential generator of (SampleRecord, CgTrace) pairs in reduction order.

    Same stream derivation as run_plan; for callers that want the residual
    histories (per-run bound checks) and not just the halting times.
    """
    cache = {}
    for gi in range(len(plan.N_grid)):
        for sid in range(plan.samples_per_N):
            yield _run_sample_traced(plan, gi, sid, cache)


def _run_chunk(plan: ExperimentPlan, tasks) -> list:
    cache = {}
    out = []
    for grid_index, sample_id in tasks:
        try:
            out.append((grid_index, sample_id, _run_sample(plan, grid_index, sample_id, cache)))
        except CgLabError as exc:
            logger.warning(
                "sample (N=%s, sample_id=%s) failed: %s",
                plan.N_grid[grid_index], sample_id, exc,
            )
            out.append((grid_index, sample_id, None))
    return out


def run_plan(plan: ExperimentPlan, workers: int = 1) -> list[SampleRecord]:
    """Produce |N_grid| * samples_per_N records (minus any per-sample
    failures, which are logged and skipped rather than aborting the sweep)."""
    tasks = [
        (gi, sid)
        for gi in range(len(plan.N_grid))
        for sid in range(plan.samples_per_N)
    ]
    if workers <= 1:
        results = _run_chunk(plan, tasks)
    else:
        chunks = [tasks[i::workers] for i in range(workers)]
        results = []
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_run_chunk, [plan] * len(chunks), chunks):
                results.extend(part)
    results.sort(key=lambda item: (item[0], item[1]))  # reduction order fixed
    return [rec for _, _, rec in results if rec is not None]


def sample_mean_curve(records, field: str) -> list[CurvePoint]:
    """Group records by dimension and average the requested halting time."""
    if field not in ("tau_l2", "tau_w"):
        raise InvalidSpecError(f"unknown field {field!r}")
    groups: dict[int, list[float]] = {}
    for rec in records:
        groups.setdefault(rec.N, []).append(float(getattr(rec, field)))
    curve = []
    for n in sorted(groups):
        vals = np.asarray(groups[n])
        if vals.size == 0:  # pragma: no cover - defensive
            logger.warning("empty group at N=%s skipped", n)
            continue
        stderr = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
        curve.append(CurvePoint(N=n, field=field, mean=float(vals.mean()), stderr=stderr, count=int(vals.size)))
    return curve


def fit_growth(curve, p: float, plan_digest: str = "") -> FitResult:
    """Nonnegative least squares of mean ~ a N^p log N + b N^p.

    Unconstrained 2x2 normal equations first; a negative coefficient is
    clamped to zero and the remaining one-parameter problem re-solved.
    """
    ns = np.asarray([pt.N for pt in curve], dtype=np.float64)
    ys = np.asarray([pt.mean for pt in curve], dtype=np.float64)
    if np.unique(ns).size < 2:
        raise FitError("need at least 2 distinct N values to fit")
    f1 = ns**p * np.log(ns)
    f2 = ns**p
    design = np.column_stack([f1, f2])
    coef, *_ = np.linalg.lstsq(design, ys, rcond=None)
    a, b = float(coef[0]), float(coef[1])

    def one_param(col):
        denom = float(col @ col)
        return max(float(col @ ys) / denom, 0.0) if denom > 0 else 0.0

    if a < 0.0 and b < 0.0:
        a = b = 0.0
    elif a < 0.0:
        a, b = 0.0, one_param(f2)
    elif b < 0.0:
        a, b = one_param(f1), 0.0
    resid = float(np.linalg.norm(a * f1 + b * f2 - ys))
    return FitResult(p=p, a=a, b=b, residual_norm=resid, plan_digest=plan_digest)


def loglog_slope(curve) -> float:
    """OLS slope of log(mean) against log(N); needs >= 3 positive means."""
    pts = list(curve)
    if len(pts) < 3:
        raise FitError("need at least 3 points for a log-log slope")
    means = np.asarray([pt.mean for pt in pts])
    if np.any(means <= 0.0):
        raise DomainError("log-log slope needs strictly positive means")
    x = np.log([pt.N for pt in pts])
    y = np.log(means)
    x = x - x.mean()
    return float((x @ (y - y.mean())) / (x @ x))


# ---------------------------------------------------------------------------
# persistence: records.csv / curves.csv / fits.json / plan files
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def save_records(records, path) -> None:
    lines = [",".join(RECORD_COLUMNS)]
    for rec in records:
        lines.append(",".join(_fmt(getattr(rec, col)) for col in RECORD_COLUMNS))
    Path(path).write_text("\n".join(lines) + "\n")


def load_records(path) -> list[SampleRecord]:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise PlanParseError("empty records file", line=1)
    header = tuple(lines[0].split(","))
    if header != RECORD_COLUMNS:
        raise PlanParseError(f"bad header {lines[0]!r}", line=1)
    out = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(RECORD_COLUMNS):
            raise PlanParseError(f"expected {len(RECORD_COLUMNS)} columns, got {len(parts)}", line=i)
        try:
            out.append(SampleRecord(
                N=int(parts[0]), gamma=float(parts[1]), c=float(parts[2]),
                sigma=float(parts[3]), eps=float(parts[4]), sample_id=int(parts[5]),
                stream_id=int(parts[6]), tau_l2=int(parts[7]), tau_w=int(parts[8]),
                kappa=float(parts[9]), lambda_min=float(parts[10]), lambda_max=float(parts[11]),
            ))
        except ValueError as exc:
            raise PlanParseError(str(exc), line=i) from exc
    return out


def save_curves(curves, path) -> None:
    lines = [",".join(CURVE_COLUMNS)]
    for pt in curves:
        lines.append(",".join([
            _fmt(pt.N), pt.field, _fmt(pt.mean), _fmt(pt.stderr), _fmt(pt.count),
        ]))
    Path(path).write_text("\n".join(lines) + "\n")


def load_curves(path) -> list[CurvePoint]:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise PlanParseError("empty curves file", line=1)
    if tuple(lines[0].split(",")) != CURVE_COLUMNS:
        raise PlanParseError(f"bad header {lines[0]!r}", line=1)
    out = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(CURVE_COLUMNS):
            raise PlanParseError(f"expected {len(CURVE_COLUMNS)} columns, got {len(parts)}", line=i)
        try:
            out.append(CurvePoint(
                N=int(parts[0]), field=parts[1], mean=float(parts[2]),
                stderr=float(parts[3]), count=int(parts[4]),
            ))
        except ValueError as exc:
            raise PlanParseError(str(exc), line=i) from exc
    return out


def save_fit(fit: FitResult, path) -> None:
    payload = {
        "p": fit.p, "a": fit.a, "b": fit.b,
        "residual_norm": fit.residual_norm, "plan_digest": fit.plan_digest,
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_fit(path) -> FitResult:
    data = json.loads(Path(path).read_text())
    return FitResult(
        p=float(data["p"]), a=float(data["a"]), b=float(data["b"]),
        residual_norm=float(data["residual_norm"]),
        plan_digest=str(data.get("plan_digest", "")),
    )


def write_plan_text(plan: ExperimentPlan) -> str:
    """Canonical flat key=value form; also the digest input."""
    lines = []
    for f in fields(plan):
        val = getattr(plan, f.name)
        if f.name == "N_grid":
            val = ",".join(str(n) for n in val)
        elif f.name == "gamma":
            val = str(val) if isinstance(val, Fraction) else _fmt(val)
        elif isinstance(val, float):
            val = _fmt(val)
        lines.append(f"{f.name} = {val}")
    return "\n".join(lines) + "\n"


def save_plan(plan: ExperimentPlan, path) -> None:
    Path(path).write_text(write_plan_text(plan))


def _parse_gamma(text: str):
    return Fraction(text) if "/" in text else float(text)


def load_plan(path) -> ExperimentPlan:
    kwargs = {}
    valid = {f.name for f in fields(ExperimentPlan)}
    for i, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PlanParseError(f"expected 'key = value', got {raw!r}", line=i)
        key, _, value = (s.strip() for s in line.partition("="))
        if key not in valid:
            raise PlanParseError(f"unknown plan key {key!r}", line=i)
        try:
            if key == "N_grid":
                kwargs[key] = tuple(int(tok) for tok in value.replace(",", " ").split())
            elif key == "gamma":
                kwargs[key] = _parse_gamma(value)
            elif key in ("c", "sigma", "eps"):
                kwargs[key] = float(value)
            elif key in ("samples_per_N", "master_seed"):
                kwargs[key] = int(value)
            else:
                kwargs[key] = value
        except ValueError as exc:
            raise PlanParseError(f"bad value for {key}: {exc}", line=i) from exc
    try:
        return ExperimentPlan(**kwargs)
    except (TypeError, InvalidSpecError) as exc:
        raise PlanParseError(str(exc), line=1) from exc


def rethreshold(plan: ExperimentPlan, eps: float) -> ExperimentPlan:
    """Same plan at a different threshold (same seeds, same traces upstream)."""
    return replace(plan, eps=eps)
