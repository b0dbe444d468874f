"""Truncated Fock-space oracle.

States and operators are built numerically in a basis |0>, ..., |n_max>
per mode. Two-mode vectors are stored as coefficient matrices ``c[j, k]``
(mode a index ``j``, mode b index ``k``) and flattened row-major when an
operator acts on them.

Interferometer outputs keep the same two slots: slot 0 holds output port f
and slot 1 holds port e, so the photon-number difference is
``n_e - n_f = n_slot1 - n_slot0``.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.stats import poisson

from .core import (DEFAULT_NMAX, DEFAULT_STEP, TRUNCATION_RATIO, InputConfig,
                   MomentSet, TruncationError, finish_moments)
from .specfun import check_order, laguerre

__all__ = ["DensityMatrix", "FockVector", "TwoModeOperator", "TwoModeState",
           "apply_mzi", "coherent_state", "delta_phi_numeric", "fidelity",
           "input_state", "moments", "nd_operator", "number_difference_operator",
           "oracle_moments", "pacs_state", "reduce_mode", "tunneling_operator"]

NORM_TOL = 1e-12
LEAK_TOL = 1e-9
MODE_SLOTS = {"a": 0, "f": 0, 0: 0, "b": 1, "e": 1, 1: 1}


def _frozen(arr):
    arr = np.array(arr, dtype=complex)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class FockVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _frozen(self.amplitudes))
        if self.amplitudes.ndim != 1 or self.n_max < 1:
            raise ValueError("a FockVector needs a 1-d amplitude array with n_max >= 1")

    @property
    def n_max(self):
        return self.amplitudes.size - 1

    @property
    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    @property
    def norm_deficit(self):
        return 1.0 - float(self.probabilities.sum())

    def mean_n(self):
        return float(np.arange(self.n_max + 1) @ self.probabilities)

    def var_n(self):
        n = np.arange(self.n_max + 1)
        p = self.probabilities
        return float((n**2) @ p - (n @ p) ** 2)

    def expect_lowering(self, power=1):
        """<b^power> for this single-mode state."""
        c = self.amplitudes
        n = np.arange(power, self.n_max + 1)
        ladder = np.ones(n.size)
        for i in range(power):
            ladder *= np.sqrt(n - i)
        return complex(np.vdot(c[:-power], ladder * c[power:]))

    def density(self):
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class TwoModeState:
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _frozen(self.amplitudes))
        c = self.amplitudes
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("two-mode amplitudes must form a square matrix")

    @classmethod
    def product(cls, a, b):
        if a.n_max != b.n_max:
            raise ValueError("both modes must share n_max")
        return cls(np.outer(a.amplitudes, b.amplitudes))

    @property
    def n_max(self):
        return self.amplitudes.shape[0] - 1

    @property
    def vector(self):
        return self.amplitudes.reshape(-1)

    @property
    def norm_deficit(self):
        return 1.0 - float(np.sum(np.abs(self.amplitudes) ** 2))

    def mode_means(self):
        p = np.abs(self.amplitudes) ** 2
        n = np.arange(self.n_max + 1)
        return float(n @ p.sum(axis=1)), float(n @ p.sum(axis=0))

    def expect(self, op):
        v = self.vector
        return complex(np.vdot(v, op.matrix @ v))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        rho = _frozen(self.entries)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("density matrix must be square")
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        object.__setattr__(self, "entries", rho)

    @property
    def n_max(self):
        return self.entries.shape[0] - 1

    @property
    def trace(self):
        return float(np.trace(self.entries).real)

    @property
    def purity(self):
        return float(np.trace(self.entries @ self.entries).real)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.entries)

    def mean_n(self):
        return float(np.arange(self.n_max + 1) @ np.diag(self.entries).real)


@dataclass(frozen=True, eq=False)
class TwoModeOperator:
    matrix: sp.csr_matrix
    hermitian: bool = True


def _check_cutoff(excitation, n_max, what):
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if excitation > TRUNCATION_RATIO * n_max:
        raise TruncationError(
            f"{what} needs n_max >= {excitation / TRUNCATION_RATIO:.1f}, got {n_max}",
            deficit=_poisson_tail(excitation, n_max))


def _poisson_tail(x, n_max):
    # Poisson mass above n_max: a cheap estimate of the norm the cutoff loses.
    return float(poisson.sf(n_max, x))


def _coherent_amplitudes(alpha, n_max):
    c = np.empty(n_max + 1, dtype=complex)
    c[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, n_max + 1):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return c


def coherent_state(alpha, n_max=DEFAULT_NMAX):
    """Truncated coherent state |alpha>."""
    alpha = complex(alpha)
    _check_cutoff(abs(alpha) ** 2, n_max, "coherent state")
    vec = FockVector(_coherent_amplitudes(alpha, n_max))
    if vec.norm_deficit > NORM_TOL:
        raise TruncationError(f"coherent state norm deficit {vec.norm_deficit:.3g}", vec.norm_deficit)
    return vec


def pacs_state(alpha, m, n_max=DEFAULT_NMAX):
    """Photon-added coherent state b^{dag m}|alpha>, normalized."""
    alpha = complex(alpha)
    m = check_order(m)
    x = abs(alpha) ** 2
    _check_cutoff(x + m, n_max, "photon-added coherent state")
    c = np.zeros(n_max + 1, dtype=complex)
    c[: n_max + 1 - m] = _coherent_amplitudes(alpha, n_max - m)
    for _ in range(m):
        c[1:] = c[:-1] * np.sqrt(np.arange(1, n_max + 1))
        c[0] = 0.0
    norm2 = float(np.sum(np.abs(c) ** 2))
    expected = math.factorial(m) * laguerre(m, -x)
    if abs(norm2 - expected) > 1e-10 * expected:
        raise TruncationError(
            f"photon addition lost norm: {norm2!r} vs {expected!r}", 1.0 - norm2 / expected)
    return FockVector(c / math.sqrt(norm2))


def input_state(config: InputConfig, n_max=DEFAULT_NMAX):
    a = coherent_state(config.alpha_a, n_max)
    b = pacs_state(config.alpha_b, config.m, n_max)
    return TwoModeState.product(a, b)


@lru_cache(maxsize=8)
def _single_mode_ops(n_max):
    lower = sp.diags(np.sqrt(np.arange(1, n_max + 1)), 1, format="csr")
    return lower, sp.identity(n_max + 1, format="csr")


@lru_cache(maxsize=8)
def number_difference_operator(n_max):
    """u = a^dag a - b^dag b."""
    lower, eye = _single_mode_ops(n_max)
    num = (lower.T @ lower).tocsr()
    return TwoModeOperator((sp.kron(num, eye) - sp.kron(eye, num)).tocsr())


@lru_cache(maxsize=8)
def tunneling_operator(n_max):
    """w = a^dag b + b^dag a."""
    lower, _ = _single_mode_ops(n_max)
    hop = sp.kron(lower.T, lower)
    return TwoModeOperator((hop + hop.T).tocsr())


def nd_operator(phi, n_max=DEFAULT_NMAX):
    """Heisenberg-picture output difference n_e - n_f = cos(phi) u + sin(phi) w."""
    u = number_difference_operator(n_max).matrix
    w = tunneling_operator(n_max).matrix
    c, s = math.cos(phi), math.sin(phi)
    # cos(pi/2) evaluates to 6e-17; snap such residues so the limits are exact
    c = 0.0 if abs(c) < 1e-15 else c
    s = 0.0 if abs(s) < 1e-15 else s
    if s == 0.0:
        return TwoModeOperator((c * u).tocsr())
    if c == 0.0:
        return TwoModeOperator((s * w).tocsr())
    return TwoModeOperator((c * u + s * w).tocsr())


def _expect_pair(state, phi):
    op = nd_operator(phi, state.n_max).matrix
    v = state.vector
    ov = op @ v
    mean = float(np.vdot(v, ov).real)
    second = float(np.vdot(ov, ov).real)
    return mean, second - mean**2


def moments(state: TwoModeState, phi):
    """Mean and variance of n_d(phi); slope and sensitivity are left as NaN."""
    deficit = state.norm_deficit
    if abs(deficit) > LEAK_TOL:
        raise TruncationError(f"state norm deficit {deficit:.3g} exceeds {LEAK_TOL}", deficit)
    mean, var = _expect_pair(state, phi)
    return MomentSet(mean, var, n_total=sum(state.mode_means()), path="oracle",
                     norm_deficit=deficit)


def oracle_moments(state: TwoModeState, phi, h=DEFAULT_STEP):
    """Full MomentSet for a prepared input state, slope by central differences."""
    if not 1e-8 <= h <= 1e-3:
        raise ValueError(f"finite-difference step must lie in [1e-8, 1e-3], got {h}")
    base = moments(state, phi)
    # Only the mean is needed at the offset phases.
    v = state.vector
    plus = float(np.vdot(v, nd_operator(phi + h, state.n_max).matrix @ v).real)
    minus = float(np.vdot(v, nd_operator(phi - h, state.n_max).matrix @ v).real)
    slope = (plus - minus) / (2 * h)
    return finish_moments(base.mean_nd, base.var_nd, slope, base.n_total, "oracle",
                          base.norm_deficit)


def delta_phi_numeric(config: InputConfig, phi, h=DEFAULT_STEP, n_max=DEFAULT_NMAX):
    """Error-propagation phase uncertainty from the Fock-space oracle."""
    return oracle_moments(input_state(config, n_max), phi, h)


@lru_cache(maxsize=32)
def _mzi_blocks(phi, n_total_max):
    """Fixed-photon-number blocks of the interferometer map.

    Block ``N`` has rows indexed by the input mode-a count ``j`` (mode b holds
    ``N - j``) and columns by the output slot-0 count ``s``. The blocks are
    built by applying one transformed creation operator at a time, so no
    alternating binomial sums appear.
    """
    amp, bmp = math.cos(phi / 2), math.sin(phi / 2)
    blocks = [np.ones((1, 1))]
    for n in range(1, n_total_max + 1):
        prev = blocks[-1]
        s_prev = np.arange(n)
        up0 = np.sqrt(s_prev + 1.0)          # slot-0 creation on |s, n-1-s>
        up1 = np.sqrt(n - s_prev, dtype=float)  # slot-1 creation on |s, n-1-s>

        def raise0(rows):
            out = np.zeros((rows.shape[0], n + 1))
            out[:, 1:] = rows * up0
            return out

        def raise1(rows):
            out = np.zeros((rows.shape[0], n + 1))
            out[:, :-1] = rows * up1
            return out

        block = np.empty((n + 1, n + 1))
        # a^dag -> -B c0^dag + A c1^dag, applied to rows j-1 of the previous block
        j = np.arange(1, n + 1)
        block[1:] = (-bmp * raise0(prev) + amp * raise1(prev)) / np.sqrt(j)[:, None]
        # b^dag -> A c0^dag + B c1^dag, applied to the j = 0 row
        block[0] = (amp * raise0(prev[:1]) + bmp * raise1(prev[:1]))[0] / math.sqrt(n)
        blocks.append(block)
    return tuple(blocks)


def apply_mzi(state: TwoModeState, phi):
    """Propagate a two-mode input through the interferometer (global phase dropped).

    With A = cos(phi/2), B = sin(phi/2), the input creation operators map as
    a^dag -> -B f^dag + A e^dag and b^dag -> A f^dag + B e^dag, so coherent
    amplitudes go to (A alpha_b - B alpha_a) in slot f and (A alpha_a + B alpha_b)
    in slot e.
    """
    n_max = state.n_max
    c = np.asarray(state.amplitudes)
    out = np.zeros_like(c)
    blocks = _mzi_blocks(float(phi), 2 * n_max)
    for n in range(2 * n_max + 1):
        j = np.arange(max(0, n - n_max), min(n, n_max) + 1)
        coeffs = c[j, n - j]
        if not np.any(coeffs):
            continue
        s = np.arange(max(0, n - n_max), min(n, n_max) + 1)
        out[s, n - s] += coeffs @ blocks[n][np.ix_(j, s)]
    leak = float(np.sum(np.abs(c) ** 2) - np.sum(np.abs(out) ** 2))
    if leak > LEAK_TOL:
        raise TruncationError(f"interferometer pushed {leak:.3g} of the norm past n_max", leak)
    return TwoModeState(out)


def reduce_mode(state: TwoModeState, which="f"):
    """Reduced density matrix of one slot ('a'/'f'/0 or 'b'/'e'/1)."""
    try:
        slot = MODE_SLOTS[which]
    except KeyError:
        raise ValueError(f"unknown mode selector {which!r}") from None
    c = np.asarray(state.amplitudes)
    rho = c @ c.conj().T if slot == 0 else c.T @ c.conj()
    return DensityMatrix((rho + rho.conj().T) / 2)


def fidelity(a, b):
    """|<a|b>|^2 for pure single- or two-mode states."""
    va = a.amplitudes.reshape(-1)
    vb = b.amplitudes.reshape(-1)
    return float(abs(np.vdot(va, vb)) ** 2)
