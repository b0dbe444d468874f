"""Value types shared by the analytic and Fock-space paths."""

import math
from dataclasses import dataclass, field, replace

from .specfun import check_order

__all__ = ["DEFAULT_NMAX", "DEFAULT_STEP", "SLOPE_FLOOR", "TRUNCATION_RATIO",
           "InputConfig", "MomentSet", "TruncationError", "finish_moments", "s_sql"]

DEFAULT_NMAX = 60
DEFAULT_STEP = 1e-5
SLOPE_FLOOR = 1e-12
# |alpha|^2 (+ m) may not exceed this fraction of n_max.
TRUNCATION_RATIO = 0.4

OK = "ok"
DIVERGENT = "divergent"


class TruncationError(ArithmeticError):
    """The Fock cutoff is too small for the requested state or operation.

    ``deficit`` carries the achieved (or estimated) norm deficit.
    """

    def __init__(self, message, deficit=math.nan):
        super().__init__(message)
        self.deficit = deficit


@dataclass(frozen=True)
class InputConfig:
    """Interferometer inputs: mode a (vacuum or coherent) and a PACS in mode b.

    ``m = 0`` puts a plain coherent state in mode b.
    """

    alpha_a: complex = 0j
    alpha_b: complex = 0j
    m: int = 1
    mode_a: str = "coherent"

    def __post_init__(self):
        if self.mode_a not in ("vacuum", "coherent"):
            raise ValueError(f"mode_a must be 'vacuum' or 'coherent', got {self.mode_a!r}")
        object.__setattr__(self, "alpha_a", complex(self.alpha_a))
        object.__setattr__(self, "alpha_b", complex(self.alpha_b))
        object.__setattr__(self, "m", check_order(self.m))
        if self.mode_a == "vacuum" and self.alpha_a != 0:
            raise ValueError("vacuum mode a requires alpha_a = 0")

    @classmethod
    def vacuum_pacs(cls, alpha_b, m=1):
        return cls(0j, alpha_b, m, "vacuum")

    @property
    def is_vacuum_a(self):
        return self.mode_a == "vacuum" or self.alpha_a == 0

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class MomentSet:
    """Photon-number-difference statistics at one parameter point.

    Fields not yet computed (e.g. the slope of a bare Fock-space moment
    evaluation) are NaN. ``status`` is ``"divergent"`` when the slope
    vanishes; ``delta_phi`` and ``s_sql`` are then +inf.
    """

    mean_nd: float
    var_nd: float
    slope: float = math.nan
    delta_phi: float = math.nan
    n_total: float = math.nan
    s_sql: float = math.nan
    status: str = OK
    path: str = "analytic"
    norm_deficit: float = 0.0
    extras: dict = field(default_factory=dict, compare=False)

    @property
    def divergent(self):
        return self.status == DIVERGENT

    def as_dict(self):
        return {
            "mean_nd": self.mean_nd,
            "var_nd": self.var_nd,
            "slope": self.slope,
            "delta_phi": self.delta_phi,
            "n_total": self.n_total,
            "s_sql": self.s_sql,
            "status": self.status,
            "path": self.path,
            "norm_deficit": self.norm_deficit,
        }


def s_sql(delta_phi, n_total):
    """Phase uncertainty relative to the shot-noise limit 1/sqrt(<n>)."""
    if not n_total > 0:
        raise ValueError(f"total photon number must be positive, got {n_total}")
    return delta_phi * math.sqrt(n_total)


def finish_moments(mean_nd, var_nd, slope, n_total, path, norm_deficit=0.0):
    """Complete a MomentSet from mean, variance, slope and total photon number."""
    var_nd = max(var_nd, 0.0) if var_nd > -1e-12 else var_nd
    if abs(slope) < SLOPE_FLOOR:
        return MomentSet(mean_nd, var_nd, slope, math.inf, n_total, math.inf,
                         DIVERGENT, path, norm_deficit)
    delta_phi = math.sqrt(var_nd) / abs(slope)
    return MomentSet(mean_nd, var_nd, slope, delta_phi, n_total,
                     s_sql(delta_phi, n_total), OK, path, norm_deficit)
