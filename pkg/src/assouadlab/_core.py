"""Kernel backend selection.

The compiled extension is preferred; set ASSOUADLAB_PURE=1 to force the
pure-Python fallback (used by the parity tests and the benchmark).
"""

import os

from . import _kernels_py

if os.environ.get("ASSOUADLAB_PURE") == "1":
    kernels = _kernels_py
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _kernels_py

BACKEND = kernels.BACKEND

mix64 = kernels.mix64
cube_hash = kernels.cube_hash
expand_level = kernels.expand_level
survives_to_depth = kernels.survives_to_depth


def thread_cap() -> int:
    """Parallelism cap from ASSOUADLAB_THREADS; computation is deterministic
    regardless (per-cube keyed hashing makes evaluation order irrelevant)."""
    try:
        return max(1, int(os.environ.get("ASSOUADLAB_THREADS", "1")))
    except ValueError:
        return 1
