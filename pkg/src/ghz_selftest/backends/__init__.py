"""Kernel backend selection.

The hot inner loops of this package are Kronecker products and Hermitian
eigendecompositions of small (dim <= 128) complex matrices. Two
implementations of these kernels exist:

* ``_core`` -- a compiled Cython extension calling LAPACK directly,
* ``python`` -- a pure-NumPy fallback.

One is selected at import time. Set ``GHZ_SELFTEST_BACKEND`` to ``compiled``
or ``python`` to force a choice (default ``auto``: compiled if available).
``benchmarks/bench_backends.py`` compares the two.
"""

import os

from . import python as _python_impl

_choice = os.environ.get("GHZ_SELFTEST_BACKEND", "auto")
if _choice not in ("auto", "compiled", "python"):
    raise ValueError(
        f"GHZ_SELFTEST_BACKEND must be 'auto', 'compiled' or 'python', got {_choice!r}"
    )

_impl = None
if _choice in ("auto", "compiled"):
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = None
if _impl is None:
    _impl = _python_impl

BACKEND = _impl.NAME

kron = _impl.kron
kron_chain = _impl.kron_chain
eigh = _impl.eigh
eigvalsh = _impl.eigvalsh

__all__ = ["BACKEND", "kron", "kron_chain", "eigh", "eigvalsh"]
