"""Inertial-coefficient estimation from weekly displacement samples.

The fitting protocol:

  1. collect the sample's displacement ratios x_w and take |x_w|,
  2. thresholds are the distinct nonzero |x_w| (ties collapse; zero
     displacements carry no threshold but still count in frequencies),
  3. empirical relative frequency at threshold X is the mean of the 0/1
     coding of |x_w| >= X over the whole sample,
  4. m_hat is the grid candidate whose theoretical tail curve
     Pr(|x| >= X) = erfc(X sqrt(m/(2t)))^2 best matches the empirical
     frequencies, scored by the squared Pearson correlation r^2.

The default grid is log-spaced with 2000 candidates and brackets the
analytic per-week inversions m_w = 2t (erfc_inv(sqrt(rho))/|x_w|)^2 by a
factor of 4 on each side, followed by one golden-section refinement around
the best candidate (all refinement evaluations are kept in the trace).
Ties resolve to the smallest candidate, so a fit is deterministic for
fixed inputs.

r^2 is Pearson by default; a regression-against-the-identity-line variant
is available via method="identity" (it may be negative when the theoretical
curve fits worse than a constant).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Optional, Sequence

import numpy as np

from .errors import DataError, DomainError
from .ingest import DisplacementSeries
from .specfun import _erfc_core, erfc_inv

__all__ = [
    "ThresholdRow",
    "GridSpec",
    "EstimationResult",
    "relative_frequency",
    "m_week",
    "r_squared",
    "fit_m_hat",
    "format_report",
    "write_grid_csv",
    "write_table_csv",
    "as_record",
]

DEFAULT_GRID_POINTS = 2000
BRACKET_FACTOR = 4.0
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class GridSpec:
    """Search grid for m. lo/hi of None auto-bracket from the sample."""

    lo: Optional[float] = None
    hi: Optional[float] = None
    n: int = DEFAULT_GRID_POINTS

    def __post_init__(self):
        if (self.lo is None) != (self.hi is None):
            raise DataError("grid bounds must be given together or not at all")
        if self.lo is not None:
            if not (0.0 < self.lo < self.hi):
                raise DataError(
                    f"grid bounds must satisfy 0 < lo < hi, "
                    f"got [{self.lo}, {self.hi}]"
                )
        if self.n < 2:
            raise DataError(f"grid needs at least 2 candidates, got {self.n}")


@dataclass(frozen=True)
class ThresholdRow:
    """One threshold X with its empirical rho and theoretical pr."""

    x: float
    rho: float
    pr: float

    def __post_init__(self):
        if self.x < 0.0:
            raise DomainError(f"threshold must be >= 0, got {self.x}")
        if not 0.0 <= self.rho <= 1.0:
            raise DomainError(f"rho must lie in [0, 1], got {self.rho}")
        if not 0.0 < self.pr <= 1.0:
            raise DomainError(f"pr must lie in (0, 1], got {self.pr}")


@dataclass(frozen=True)
class EstimationResult:
    m_hat: float
    r2: float
    table: tuple[ThresholdRow, ...]
    grid: tuple[tuple[float, float], ...]
    sample_size: int

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(self.table))
        object.__setattr__(self, "grid", tuple(self.grid))
        if not self.m_hat > 0.0:
            raise DomainError(f"m_hat must be > 0, got {self.m_hat}")
        best = max(r for _, r in self.grid)
        if self.r2 != best:
            raise DomainError("r2 must equal the best r2 in the grid trace")
        xs = [row.x for row in self.table]
        if xs != sorted(xs):
            raise DomainError("threshold table must be sorted ascending by X")


def relative_frequency(sample: DisplacementSeries, x_min: float) -> float:
    """Fraction of sample weeks with |x| >= x_min (mean of 0/1 coding)."""
    if x_min < 0.0 or not math.isfinite(x_min):
        raise DomainError(f"threshold must be finite and >= 0, got {x_min}")
    n = len(sample.entries)
    hits = sum(1 for e in sample.entries if abs(e.ratio) >= x_min)
    return hits / n


def m_week(rho: float, x_w: float, t: float = 1.0) -> float:
    """Per-week inversion of the tail law: m_w = 2t (erfc_inv(sqrt(rho))/|x_w|)^2.

    rho = 0 would demand an infinite coefficient and is rejected, as is a
    zero displacement (the inversion divides by |x_w|).
    """
    if t <= 0.0:
        raise DomainError(f"elapsed time t must be > 0, got {t}")
    if rho == 0.0:
        raise DomainError("rho = 0 implies an infinite inertial coefficient")
    if not 0.0 < rho <= 1.0:
        raise DomainError(f"rho must lie in (0, 1], got {rho}")
    if x_w == 0.0:
        raise DomainError("zero displacement cannot be inverted")
    z = erfc_inv(math.sqrt(rho)) / abs(x_w)
    return 2.0 * t * z * z


def r_squared(predicted: Sequence[float], observed: Sequence[float],
              method: str = "pearson") -> float:
    """Coefficient of determination between two value lists.

    method="pearson" (default): squared Pearson correlation, symmetric and
    affine-invariant. method="identity": 1 - SS_res/SS_tot with predicted
    taken as-is (no refit), which penalizes miscalibration and may be
    negative.
    """
    p = np.asarray(predicted, dtype=np.float64)
    o = np.asarray(observed, dtype=np.float64)
    if p.shape != o.shape or p.ndim != 1:
        raise DataError(
            f"predicted and observed must be equal-length vectors, "
            f"got {p.shape} and {o.shape}"
        )
    if p.size < 3:
        raise DataError(f"need at least 3 points, got {p.size}")
    oc = o - o.mean()
    ss_o = float(oc @ oc)
    if ss_o == 0.0:
        raise DataError("observed values are all identical")
    if method == "pearson":
        pc = p - p.mean()
        ss_p = float(pc @ pc)
        if ss_p == 0.0:
            raise DataError("predicted values are all identical")
        r = float(pc @ oc) / math.sqrt(ss_p * ss_o)
        return min(r * r, 1.0)
    if method == "identity":
        resid = o - p
        return 1.0 - float(resid @ resid) / ss_o
    raise DataError(f"unknown r_squared method {method!r}")


def _tail_matrix(m_values: np.ndarray, thresholds: np.ndarray,
                 t: float) -> np.ndarray:
    """Pr(|x| >= X) for each (m, X) pair; shape (len(m), len(X)).

    Arguments are guaranteed finite and non-negative here, so this goes
    straight to the erfc core branch evaluation.
    """
    z = np.sqrt(m_values / (2.0 * t))[:, None] * thresholds[None, :]
    e = _erfc_core(z)
    return e * e


def _score_rows(pr: np.ndarray, rho: np.ndarray, method: str) -> np.ndarray:
    """Per-row r^2 of theoretical curves against the empirical curve.

    Rows whose curve is flat at float resolution (candidate m far outside
    the data's scale) score 0 rather than raising: they are legitimate
    grid members, just hopeless ones.
    """
    oc = rho - rho.mean()
    ss_o = float(oc @ oc)
    pc = pr - pr.mean(axis=1, keepdims=True)
    ss_p = np.einsum("ij,ij->i", pc, pc)
    if method == "pearson":
        num = pc @ oc
        with np.errstate(invalid="ignore", divide="ignore"):
            r2 = np.where(ss_p > 0.0, (num * num) / (ss_p * ss_o), 0.0)
        return np.minimum(r2, 1.0)
    resid = pr - rho[None, :]
    return 1.0 - np.einsum("ij,ij->i", resid, resid) / ss_o


def fit_m_hat(sample: DisplacementSeries, t: float = 1.0,
              grid_spec: Optional[GridSpec] = None,
              method: str = "pearson") -> EstimationResult:
    """Fit the inertial coefficient by maximal r^2 over a log-spaced grid.

    Requires at least 10 sample weeks with at least 3 distinct nonzero
    |x| values. Returns the full evaluation trace (grid plus refinement
    points, sorted by candidate) alongside the threshold table evaluated
    at the winning m_hat.
    """
    if t <= 0.0 or not math.isfinite(t):
        raise DomainError(f"elapsed time t must be > 0, got {t}")
    if method not in ("pearson", "identity"):
        raise DataError(f"unknown r_squared method {method!r}")
    if grid_spec is None:
        grid_spec = GridSpec()
    ratios = np.asarray(sample.ratios(), dtype=np.float64)
    n = ratios.size
    if n < 10:
        raise DataError(f"need at least 10 sample weeks, got {n}")
    abs_x = np.abs(ratios)
    thresholds = np.unique(abs_x[abs_x > 0.0])
    if thresholds.size < 3:
        raise DataError(
            f"degenerate sample: need at least 3 distinct nonzero |x| "
            f"values, got {thresholds.size}"
        )
    abs_sorted = np.sort(abs_x)
    # integer count first so rho is bit-identical to relative_frequency
    rho = (n - np.searchsorted(abs_sorted, thresholds, side="left")) / n

    if grid_spec.lo is not None:
        lo, hi = grid_spec.lo, grid_spec.hi
    else:
        keep = rho < 1.0
        z = erfc_inv(np.sqrt(rho[keep])) / thresholds[keep]
        m_w = 2.0 * t * z * z
        lo = float(m_w.min()) / BRACKET_FACTOR
        hi = float(m_w.max()) * BRACKET_FACTOR

    candidates = np.geomspace(lo, hi, grid_spec.n)
    scores = _score_rows(_tail_matrix(candidates, thresholds, t), rho, method)

    best = int(np.argmax(scores))  # first max = smallest m on a tie

    def evaluate(m: float) -> float:
        row = _tail_matrix(np.array([m]), thresholds, t)
        return float(_score_rows(row, rho, method)[0])

    # one golden-section pass around the winning candidate, in log space
    extra: list[tuple[float, float]] = []
    a = math.log(candidates[max(best - 1, 0)])
    b = math.log(candidates[min(best + 1, grid_spec.n - 1)])
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = evaluate(math.exp(c)), evaluate(math.exp(d))
    extra.append((math.exp(c), fc))
    extra.append((math.exp(d), fd))
    while b - a > 1e-9:
        if fc >= fd:  # keep the left interval on ties: smaller m wins
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = evaluate(math.exp(c))
            extra.append((math.exp(c), fc))
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = evaluate(math.exp(d))
            extra.append((math.exp(d), fd))

    trace = list(zip(candidates.tolist(), scores.tolist())) + extra
    trace.sort(key=lambda pair: pair[0])
    best_r2 = max(r for _, r in trace)
    m_hat = min(m for m, r in trace if r == best_r2)

    pr_hat = _tail_matrix(np.array([m_hat]), thresholds, t)[0]
    table = tuple(
        ThresholdRow(x=float(x), rho=float(f), pr=float(p))
        for x, f, p in zip(thresholds, rho, pr_hat)
    )
    return EstimationResult(m_hat=m_hat, r2=best_r2, table=table,
                            grid=tuple(trace), sample_size=n)


def format_report(result: EstimationResult) -> str:
    """Human-readable fit report with the threshold table."""
    lines = [
        f"m_hat: {result.m_hat:.4f}",
        f"r2: {result.r2:.6f}",
        f"sample_size: {result.sample_size}",
        f"thresholds: {len(result.table)}",
        f"grid_evaluations: {len(result.grid)}",
        "",
        f"{'X':>12}  {'rho':>10}  {'pr':>12}",
    ]
    for row in result.table:
        lines.append(f"{row.x:>12.6f}  {row.rho:>10.6f}  {row.pr:>12.6e}")
    return "\n".join(lines) + "\n"


def write_grid_csv(result: EstimationResult, fh: IO[str]) -> None:
    fh.write("m_candidate,r2\n")
    for m, r in result.grid:
        fh.write(f"{m!r},{r!r}\n")


def write_table_csv(result: EstimationResult, fh: IO[str]) -> None:
    fh.write("X,rho,pr\n")
    for row in result.table:
        fh.write(f"{row.x!r},{row.rho!r},{row.pr!r}\n")


def as_record(result: EstimationResult) -> dict:
    """JSON-ready dictionary form of a fit result."""
    return {
        "m_hat": result.m_hat,
        "r2": result.r2,
        "sample_size": result.sample_size,
        "table": [{"X": r.x, "rho": r.rho, "pr": r.pr} for r in result.table],
        "grid": [{"m_candidate": m, "r2": r} for m, r in result.grid],
    }
