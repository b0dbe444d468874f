"""Special-function kernels: Laguerre polynomials and Poisson raw moments.

Every scalar routine also accepts numpy arrays for ``x`` and evaluates
elementwise.
"""

import numpy as np

__all__ = ["MAX_ORDER", "MAX_POISSON_MOMENT", "check_order", "laguerre",
           "laguerre_assoc", "laguerre_assoc_table", "poisson_moment"]

MAX_ORDER = 16
MAX_POISSON_MOMENT = 6

# Touchard polynomials: <n^j> = sum_k S(j, k) x^k, S = Stirling numbers of the 2nd kind.
_STIRLING2 = (
    (1,),
    (0, 1),
    (0, 1, 1),
    (0, 1, 3, 1),
    (0, 1, 7, 6, 1),
    (0, 1, 15, 25, 10, 1),
    (0, 1, 31, 90, 65, 15, 1),
)


def check_order(m):
    """Validate a polynomial order / photon-addition count and return it as int."""
    if isinstance(m, bool) or int(m) != m:
        raise ValueError(f"order must be an integer, got {m!r}")
    m = int(m)
    if m < 0 or m > MAX_ORDER:
        raise ValueError(f"order must lie in [0, {MAX_ORDER}], got {m}")
    return m


def _finite(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("argument must be finite")
    return x


def _scalar_or_array(value, like):
    return float(value) if np.ndim(like) == 0 else value


def laguerre(m, x):
    """Laguerre polynomial L_m(x) by upward three-term recurrence."""
    m = check_order(m)
    x = _finite(x)
    prev = np.ones_like(x)
    if m == 0:
        return _scalar_or_array(prev, x)
    cur = 1.0 - x
    for k in range(1, m):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return _scalar_or_array(cur, x)


def laguerre_assoc(n, k, x):
    """Associated Laguerre polynomial L_n^k(x).

    Uses (j+1) L_{j+1}^k = (2j+1+k-x) L_j^k - (j+k) L_{j-1}^k.
    """
    if n < 0 or k < 0:
        raise ValueError(f"n and k must be non-negative, got n={n}, k={k}")
    x = _finite(x)
    prev = np.ones_like(x)
    if n == 0:
        return _scalar_or_array(prev, x)
    cur = 1.0 + k - x
    for j in range(1, n):
        prev, cur = cur, ((2 * j + 1 + k - x) * cur - (j + k) * prev) / (j + 1)
    return _scalar_or_array(cur, x)


def laguerre_assoc_table(n_max, x):
    """All L_n^k(x) for n + k <= n_max, shape ``(n_max+1, n_max+1) + x.shape``.

    Entry ``[n, k]`` holds L_n^k(x); entries with n + k > n_max are zero.
    """
    x = _finite(x)
    out = np.zeros((n_max + 1, n_max + 1) + x.shape)
    for k in range(n_max + 1):
        out[0, k] = 1.0
        if n_max - k >= 1:
            out[1, k] = 1.0 + k - x
        for j in range(1, n_max - k):
            out[j + 1, k] = ((2 * j + 1 + k - x) * out[j, k] - (j + k) * out[j - 1, k]) / (j + 1)
    return out


def poisson_moment(j, x):
    """Raw moment <n^j> of a Poisson distribution with mean ``x``."""
    if isinstance(j, bool) or int(j) != j or not 0 <= j <= MAX_POISSON_MOMENT:
        raise ValueError(f"moment order must be an integer in [0, {MAX_POISSON_MOMENT}], got {j!r}")
    x = _finite(x)
    if np.any(x < 0):
        raise ValueError("Poisson mean must be non-negative")
    total = np.zeros_like(x)
    for coeff in reversed(_STIRLING2[int(j)]):
        total = total * x + coeff
    return _scalar_or_array(total, x)
