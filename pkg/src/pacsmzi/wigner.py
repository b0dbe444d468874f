"""Wigner functions of single-mode states and interferometer outputs.

Phase-space convention: alpha = x + i p and W integrates to one over
dx dp, so the vacuum is W(alpha) = (2/pi) exp(-2|alpha|^2).

Values come from the displaced-parity identity
W(alpha) = (2/pi) Tr[rho D(alpha) Pi D(alpha)^dag] = (2/pi) Tr[rho D(2 alpha) Pi],
with displacement matrix elements written through associated Laguerre
polynomials. No phase-space integral is discretized.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import fock
from .core import DEFAULT_NMAX, TRUNCATION_RATIO, InputConfig, TruncationError
from .specfun import laguerre, laguerre_assoc_table

__all__ = ["GridSpec", "NegativityReport", "WignerGrid", "closed_form_output_wigner",
           "negativity", "output_mode_wigner", "output_wigner_product",
           "two_mode_wigner", "wigner_evaluator", "wigner_of_state"]

NEGATIVITY_TOL = 1e-6
_TAIL_TOL = 1e-20
_CHUNK = 1024


@dataclass(frozen=True)
class GridSpec:
    """Square phase-space grid symmetric about the origin.

    ``half_width=None`` picks |centroid| + 4 for the state being evaluated.
    """

    resolution: int = 128
    half_width: float = None

    def __post_init__(self):
        if self.resolution < 16:
            raise ValueError("grid resolution must be at least 16")
        if self.half_width is not None and not self.half_width > 0:
            raise ValueError("half_width must be positive")

    def axes(self, centroid=0j):
        h = self.half_width if self.half_width is not None else abs(centroid) + 4.0
        axis = np.linspace(-h, h, self.resolution)
        return axis, axis.copy()


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """W sampled on a rectangular grid; ``values[i, j]`` sits at x[i] + i p[j]."""

    x: np.ndarray
    p: np.ndarray
    values: np.ndarray

    @property
    def resolution(self):
        return self.values.shape[0]

    @property
    def min_value(self):
        return float(self.values.min())

    @property
    def min_location(self):
        i, j = np.unravel_index(np.argmin(self.values), self.values.shape)
        return float(self.x[i]), float(self.p[j])

    def integral(self, values=None):
        v = self.values if values is None else values
        return float(np.trapezoid(np.trapezoid(v, self.p, axis=1), self.x))

    def value_at_origin(self):
        i = np.nonzero(self.x == 0)[0]
        j = np.nonzero(self.p == 0)[0]
        if not (i.size and j.size):
            raise ValueError("the origin is not a grid node; use an odd resolution")
        return float(self.values[i[0], j[0]])


@dataclass(frozen=True)
class NegativityReport:
    min_value: float
    min_location: tuple
    negative_volume: float
    is_nonclassical: bool

    def as_dict(self):
        return {"min_value": self.min_value, "min_location": list(self.min_location),
                "negative_volume": self.negative_volume,
                "is_nonclassical": self.is_nonclassical}


def _trim(rho):
    # Drop levels whose remaining population is negligible; the kernel is bounded by 1.
    diag = np.clip(np.diag(rho).real, 0.0, None)
    tail = np.cumsum(diag[::-1])[::-1]
    keep = np.nonzero(tail > _TAIL_TOL)[0]
    n = int(keep[-1]) + 1 if keep.size else 1
    return rho[:max(n, 1), :max(n, 1)]


def _kernel_lower(dim, alphas):
    """(-1)^j <k|D(2 alpha)|j> for k >= j, one row per (k, j) pair.

    D(2 alpha) Pi is Hermitian, so the upper triangle is the conjugate.
    """
    beta = 2.0 * np.asarray(alphas, dtype=complex).reshape(-1)
    x = np.abs(beta) ** 2
    lag = laguerre_assoc_table(dim - 1, x)  # lag[n, k] = L_n^k(x)
    logfact = gammaln(np.arange(dim) + 1.0)
    k, j = np.tril_indices(dim)
    d = (k - j)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        logabs = np.where(x > 0, np.log(np.abs(beta)), 0.0)
        expo = (0.5 * (logfact[j] - logfact[k]))[:, None] + d * logabs - x / 2 \
            + 1j * d * np.angle(beta)
    vals = np.exp(expo) * lag[j, k - j]
    vals[(d[:, 0] > 0)[:, None] & (x == 0)[None, :]] = 0.0
    vals[j % 2 == 1] *= -1.0
    return k, j, vals


def _parity_kernel(dim, alphas):
    """K[k, j, g] = (-1)^j <k|D(2 alpha_g)|j> for k, j < dim."""
    k, j, vals = _kernel_lower(dim, alphas)
    kernel = np.empty((dim, dim, vals.shape[1]), dtype=complex)
    kernel[k, j] = vals
    kernel[j, k] = vals.conj()
    return kernel


def _density_array(rho):
    return np.asarray(rho.entries if isinstance(rho, fock.DensityMatrix) else rho, dtype=complex)


def _check_support(rho, n_max):
    mean_n = float(np.arange(rho.shape[0]) @ np.diag(rho).real)
    if mean_n > TRUNCATION_RATIO * n_max:
        raise TruncationError(
            f"state with <n> = {mean_n:.3g} is not contained by n_max = {n_max}",
            deficit=float(np.diag(rho).real[-3:].sum()))


def wigner_evaluator(rho):
    """Return a vectorized callable alpha -> W(alpha) for a single-mode state."""
    rho = _density_array(rho)
    _check_support(rho, rho.shape[0] - 1)
    rho = _trim(rho)
    dim = rho.shape[0]
    k, j = np.tril_indices(dim)
    weights = np.where(k == j, 1.0, 2.0) * rho[j, k]

    def evaluate(alpha):
        alpha = np.asarray(alpha, dtype=complex)
        flat = alpha.reshape(-1)
        out = np.empty(flat.size)
        for start in range(0, flat.size, _CHUNK):
            vals = _kernel_lower(dim, flat[start:start + _CHUNK])[2]
            # accumulate pair by pair: the per-point result must not depend on chunking
            acc = np.zeros(vals.shape[1])
            for w, row in zip(weights, vals):
                acc += (w * row).real
            out[start:start + _CHUNK] = (2 / np.pi) * acc
        return out.reshape(alpha.shape) if alpha.ndim else float(out[0])

    return evaluate


def wigner_of_state(rho, grid=None):
    """Evaluate the Wigner function of ``rho`` (DensityMatrix or array) on a grid."""
    grid = grid or GridSpec()
    arr = _density_array(rho)
    n = arr.shape[0]
    lower = np.sqrt(np.arange(1, n))
    centroid = complex(np.sum(np.diag(arr, -1) * lower)) if n > 1 else 0j
    x, p = grid.axes(centroid)
    points = x[:, None] + 1j * p[None, :]
    return WignerGrid(x, p, wigner_evaluator(arr)(points))


def negativity(grid: WignerGrid, tol=NEGATIVITY_TOL):
    neg = np.where(grid.values < 0, -grid.values, 0.0)
    return NegativityReport(grid.min_value, grid.min_location, grid.integral(neg),
                            grid.min_value < -tol)


def _mzi_coefficients(phi):
    return math.cos(phi / 2), math.sin(phi / 2)


def output_wigner_product(phi, w_a, w_b, point):
    """Two-mode output Wigner value for product inputs.

    ``point = (alpha_f, alpha_e)`` are output phase-space coordinates;
    ``w_a`` and ``w_b`` evaluate the input single-mode Wigner functions.
    """
    amp, bmp = _mzi_coefficients(phi)
    alpha_f, alpha_e = (np.asarray(z, dtype=complex) for z in point)
    return w_a(alpha_e * np.conj(amp) - alpha_f * np.conj(bmp)) * \
        w_b(alpha_f * np.conj(amp) + alpha_e * np.conj(bmp))


def two_mode_wigner(state: fock.TwoModeState, alpha_f, alpha_e):
    """Two-mode Wigner value of a pure state at (alpha_f, alpha_e)."""
    c = np.asarray(state.amplitudes)
    k1 = _parity_kernel(c.shape[0], [alpha_f])[:, :, 0]
    k2 = _parity_kernel(c.shape[0], [alpha_e])[:, :, 0]
    # W = (2/pi)^2 sum c*_{k1 k2} K1[k1, j1] K2[k2, j2] c_{j1 j2}
    return float(((2 / np.pi) ** 2 * np.vdot(c, k1 @ c @ k2.T)).real)


def output_mode_wigner(config: InputConfig, phi, which="f", grid=None, n_max=DEFAULT_NMAX):
    """Wigner function and negativity of one interferometer output port."""
    out = fock.apply_mzi(fock.input_state(config, n_max), phi)
    wgrid = wigner_of_state(fock.reduce_mode(out, which), grid)
    return wgrid, negativity(wgrid)


def closed_form_output_wigner(alpha_f, alpha_e, m, n=0, center_f=0j, center_e=0j, norm=None):
    """Product-of-Laguerre closed form for the output Wigner function.

    The normalization ``norm`` and the centers are free parameters of this
    form; ``norm=None`` uses 1/sqrt(m!). It is a cross-check only and is not
    used for any reported negativity.
    """
    norm = 1 / math.sqrt(math.factorial(m)) if norm is None else norm
    r_f = np.abs(np.asarray(alpha_f) - center_f) ** 2
    r_e = np.abs(np.asarray(alpha_e) - center_e) ** 2
    return (4 * norm**2 * (-1) ** (m + n) * math.factorial(m) / np.pi**2
            * np.exp(-2 * (r_f + r_e)) * laguerre(m, 2 * r_f) * laguerre(n, 2 * r_e))
