"""Parameter sweeps and curve landmarks (threshold crossings, minima)."""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import optimize

from . import fock
from .analytic import NoClosedForm, analytic_moments, pacs_mean
from .core import DEFAULT_NMAX, DEFAULT_STEP, InputConfig, MomentSet
from .specfun import check_order

__all__ = ["AXES", "Axis", "CrossingReport", "SweepResult", "SweepSpec",
           "find_landmarks", "invert_nb", "landmarks_for", "run_sweep", "worker_count"]

AXES = ("phi", "alpha_a", "alpha_b", "abs2_a", "abs2_b", "n_total")
PATHS = ("auto", "analytic", "oracle")
ROOT_TOL = 1e-6
TOUCH_TOL = 1e-10
INFEASIBLE = "infeasible"


def worker_count():
    """Worker threads allowed by PACSMZI_THREADS (default 1)."""
    raw = os.environ.get("PACSMZI_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"PACSMZI_THREADS must be an integer >= 1, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"PACSMZI_THREADS must be an integer >= 1, got {raw!r}")
    return n


def invert_nb(target_nb, m):
    """|alpha_b|^2 at which the PACS of order m has mean photon number ``target_nb``."""
    m = check_order(m)
    floor = pacs_mean(0.0, m)
    if target_nb < floor - 1e-12:
        raise ValueError(f"target mean {target_nb} lies below the Fock floor {floor} for m = {m}")
    if target_nb <= floor:
        return 0.0

    def gap(x):
        return pacs_mean(math.sqrt(x), m) - target_nb

    hi = max(1.0, target_nb)
    while gap(hi) < 0:
        hi *= 2
    return optimize.bisect(gap, 0.0, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=400)


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.name not in AXES:
            raise ValueError(f"unknown axis {self.name!r}; choose from {AXES}")
        if self.points < 2:
            raise ValueError("an axis needs at least 2 points")

    @property
    def values(self):
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class SweepSpec:
    """Grid of up to two axes over an InputConfig template at fixed phase ``phi``.

    Amplitude axes replace the template amplitude by a real value;
    ``n_total`` fixes mode a and solves for |alpha_b|^2.
    """

    axes: tuple
    template: InputConfig = field(default_factory=InputConfig)
    phi: float = 0.0
    path: str = "auto"
    n_max: int = DEFAULT_NMAX
    h: float = DEFAULT_STEP
    verbatim_variance: bool = False

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("a sweep has one or two axes")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ValueError("axis names must be distinct")
        if self.path not in PATHS:
            raise ValueError(f"path must be one of {PATHS}")
        needs_oracle = not self.template.is_vacuum_a and self.template.m >= 2
        if any(n in ("alpha_a", "abs2_a") for n in names) and self.template.m >= 2:
            needs_oracle = True
        if self.path == "analytic" and needs_oracle:
            raise ValueError("coherent mode a with m >= 2 has no closed form; use the oracle path")
        if self.template.mode_a == "vacuum" and any(n in ("alpha_a", "abs2_a") for n in names):
            raise ValueError("cannot sweep alpha_a with a vacuum mode a")

    @property
    def names(self):
        return tuple(a.name for a in self.axes)

    def grid(self):
        if len(self.axes) == 1:
            return [(v,) for v in self.axes[0].values]
        return [(u, v) for u in self.axes[0].values for v in self.axes[1].values]

    def config_at(self, coords):
        """(InputConfig, phi) for a grid point, or None if the point is infeasible."""
        cfg, phi = self.template, self.phi
        values = dict(zip(self.names, coords))
        changes = {}
        if "alpha_a" in values:
            changes["alpha_a"] = values["alpha_a"]
        if "abs2_a" in values:
            changes["alpha_a"] = math.sqrt(max(values["abs2_a"], 0.0))
        if "alpha_b" in values:
            changes["alpha_b"] = values["alpha_b"]
        if "abs2_b" in values:
            changes["alpha_b"] = math.sqrt(max(values["abs2_b"], 0.0))
        cfg = cfg.with_(**changes) if changes else cfg
        if "n_total" in values:
            target = values["n_total"] - abs(cfg.alpha_a) ** 2
            if target < pacs_mean(0.0, cfg.m) - 1e-12:
                return None
            cfg = cfg.with_(alpha_b=math.sqrt(invert_nb(target, cfg.m)))
        phi = values.get("phi", phi)
        return cfg, phi

    def evaluate(self, coords):
        point = self.config_at(coords)
        if point is None:
            return MomentSet(math.nan, math.nan, status=INFEASIBLE, path="none")
        cfg, phi = point
        if self.path != "oracle":
            try:
                return analytic_moments(cfg, phi, self.verbatim_variance)
            except NoClosedForm:
                if self.path == "analytic":
                    raise
        return fock.oracle_moments(_cached_input(cfg, self.n_max), phi, self.h)


@lru_cache(maxsize=256)
def _cached_input(cfg, n_max):
    return fock.input_state(cfg, n_max)


@dataclass(frozen=True, eq=False)
class SweepResult:
    spec: SweepSpec
    coords: tuple
    rows: tuple

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        if name in self.spec.names:
            return np.array([c[self.spec.names.index(name)] for c in self.coords])
        return np.array([getattr(r, name) for r in self.rows])

    def ok_mask(self):
        return np.array([r.status == "ok" for r in self.rows])

    def s_sql(self):
        return self.column("s_sql")


def run_sweep(spec: SweepSpec, workers=None):
    """Evaluate every grid point; row order follows the grid, not the scheduling."""
    coords = spec.grid()
    workers = worker_count() if workers is None else workers
    if workers == 1:
        rows = [spec.evaluate(c) for c in coords]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(spec.evaluate, coords))
    return SweepResult(spec, tuple(coords), tuple(rows))


@dataclass(frozen=True)
class CrossingReport:
    crossings: tuple = ()
    bracket_status: tuple = ()
    min_location: float = math.nan
    min_value: float = math.nan
    min_status: str = "none"
    status: str = "ok"

    def as_dict(self):
        return {"crossings": list(self.crossings), "bracket_status": list(self.bracket_status),
                "min_location": self.min_location, "min_value": self.min_value,
                "min_status": self.min_status, "status": self.status}


def find_landmarks(xs, ys, target=1.0, func=None, tol=ROOT_TOL):
    """Crossings of ``ys == target`` and the minimum of a sampled curve.

    Brackets come from sign changes of ``ys - target`` between adjacent
    finite samples. With ``func`` (x -> y) crossings are refined by bisection
    and an interior minimum by golden-section search; otherwise crossings
    are linearly interpolated and the minimum is the best sample.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    good = np.isfinite(ys)
    xs, ys = xs[good], ys[good]
    if xs.size < 2:
        return CrossingReport(status="no-data")
    if np.ptp(ys) < 1e-12:
        return CrossingReport(min_location=float(xs[0]), min_value=float(ys[0]),
                              min_status="degenerate", status="no-bracket")
    g = ys - target
    # a dead band keeps rounding noise at a tangent point from reading as a crossing
    sign = np.where(np.abs(g) <= TOUCH_TOL * max(1.0, abs(target)), 0, np.sign(g))
    crossings, status = [], []
    live = np.flatnonzero(sign)
    for i, k in zip(live[:-1], live[1:]):
        if sign[i] == sign[k]:
            continue
        if k > i + 1:
            crossings.append(float(xs[(i + k) // 2]))
            status.append("exact")
        elif func is None:
            t = g[i] / (g[i] - g[k])
            crossings.append(float(xs[i] + t * (xs[k] - xs[i])))
            status.append("interpolated")
        else:
            root = optimize.bisect(lambda x: func(x) - target, xs[i], xs[k], xtol=tol / 10)
            crossings.append(float(root))
            status.append("bisection")
    i = int(np.argmin(ys))
    if 0 < i < xs.size - 1 and func is not None:
        res = optimize.minimize_scalar(func, bracket=(xs[i - 1], xs[i], xs[i + 1]),
                                       method="golden", options={"xtol": tol / 10 / max(abs(xs[i]), 1.0)})
        min_loc, min_val, min_status = float(res.x), float(res.fun), "golden"
    else:
        min_loc, min_val = float(xs[i]), float(ys[i])
        min_status = "sampled" if 0 < i < xs.size - 1 else "boundary"
    return CrossingReport(tuple(crossings), tuple(status), min_loc, min_val, min_status,
                          "ok" if crossings else "no-bracket")


def landmarks_for(result: SweepResult, target=1.0, tol=ROOT_TOL):
    """Landmarks of a one-axis sweep, refined against the sweep's own evaluator."""
    if len(result.spec.axes) != 1:
        raise ValueError("landmarks need a one-axis sweep")

    def func(x):
        row = result.spec.evaluate((x,))
        return row.s_sql if row.status == "ok" else math.inf

    xs = result.column(result.spec.names[0])
    ys = np.where(result.ok_mask(), result.s_sql(), np.nan)
    return find_landmarks(xs, ys, target, func, tol)
