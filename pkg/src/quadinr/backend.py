"""Kernel backend selection.

The compiled extension is preferred when present; the numpy module is the
drop-in fallback. Both expose the same functions with identical numerical
semantics (see benchmarks/bench_backends.py for the speed comparison).
Set QUADINR_BACKEND=numpy or =cython to force a choice at import time.
"""

from __future__ import annotations

import os

from . import _kernels_np as numpy_kernels

_forced = os.environ.get("QUADINR_BACKEND", "").strip().lower()

compiled_kernels = None
if _forced != "numpy":
    try:
        from . import _kernels as compiled_kernels  # type: ignore[no-redef]
    except ImportError:
        compiled_kernels = None
        if _forced == "cython":
            raise ImportError(
                "QUADINR_BACKEND=cython but the compiled extension is not built"
            )

kernels = compiled_kernels if compiled_kernels is not None else numpy_kernels
compiled_available = compiled_kernels is not None


def backend_name() -> str:
    return kernels.BACKEND_NAME
