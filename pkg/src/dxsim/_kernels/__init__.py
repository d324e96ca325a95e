"""Scoring kernel selection.

Prefers the compiled Cython kernel and falls back to the numpy one when the
extension was not built. Set DXSIM_KERNEL=numpy to force the fallback (used
by the benchmark and by tests comparing both paths).
"""

from __future__ import annotations

import os

from dxsim._kernels import _score_py

if os.environ.get("DXSIM_KERNEL") == "numpy":
    _impl = _score_py
    KERNEL_BACKEND = "numpy"
else:
    try:
        from dxsim._kernels import _score_cy as _impl

        KERNEL_BACKEND = "cython"
    except ImportError:
        _impl = _score_py
        KERNEL_BACKEND = "numpy"

score_block = _impl.score_block
score_rows = _impl.score_rows
pairwise_block = _impl.pairwise_block

__all__ = ["score_block", "score_rows", "pairwise_block", "KERNEL_BACKEND"]
