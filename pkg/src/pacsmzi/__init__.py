"""Phase sensitivity of a Mach-Zehnder interferometer fed with photon-added coherent states.

Closed forms live in :mod:`pacsmzi.analytic`; :mod:`pacsmzi.fock` is the
truncated Fock-space oracle they are checked against.
"""

__version__ = "0.1.0"

from .core import InputConfig, MomentSet, TruncationError  # noqa: E402

__all__ = ["InputConfig", "MomentSet", "TruncationError", "__version__"]
