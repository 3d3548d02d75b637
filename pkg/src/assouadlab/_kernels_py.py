"""Pure-Python reference kernels.

Bit-for-bit identical to the Cython extension in ``_kernels.pyx``; selected
at import time by ``_core`` when the extension is missing or disabled via
ASSOUADLAB_PURE=1.  All arithmetic is carried out mod 2**64 so the two
implementations agree exactly.
"""

import numpy as np

BACKEND = "python"

_MASK = (1 << 64) - 1


def mix64(x: int) -> int:
    """splitmix64 finaliser (avalanche step, no stream increment)."""
    z = x & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def cube_hash(seed: int, level: int, coord) -> int:
    """Order-independent per-cube hash: chain seed, level, then each axis."""
    h = mix64(seed)
    h = mix64(h ^ (level & _MASK))
    for c in coord:
        h = mix64(h ^ (int(c) & _MASK))
    return h


def _keep(h: int, p_num: int, p_den: int) -> bool:
    # keep with probability exactly p_num/p_den: h/2^64 < p
    return h * p_den < (p_num << 64)


def expand_level(seed, level, coords, n, p_num, p_den):
    """Surviving children (at `level`) of the given parent cubes.

    coords is an (N, d) int64 array of parent coordinates at level-1; children
    are enumerated per parent in lexicographic offset order.
    """
    coords = np.asarray(coords, dtype=np.int64)
    npar, d = coords.shape
    out = []
    offsets = _offsets(n, d)
    for row in coords:
        base = [int(c) * n for c in row]
        for off in offsets:
            child = tuple(base[a] + off[a] for a in range(d))
            if _keep(cube_hash(seed, level, child), p_num, p_den):
                out.append(child)
    return np.array(out, dtype=np.int64).reshape(len(out), d)


def _offsets(n, d):
    offs = [()]
    for _ in range(d):
        offs = [o + (k,) for o in offs for k in range(n)]
    return offs


def survives_to_depth(seed, n, d, p_num, p_den, depth) -> bool:
    """True iff the percolation tree has at least one surviving level-`depth` cube.

    Depth-first with early exit, so typical cost is far below full expansion.
    """
    if depth <= 0:
        return True
    offsets = _offsets(n, d)

    def rec(level, coord):
        base = [c * n for c in coord]
        for off in offsets:
            child = tuple(base[a] + off[a] for a in range(d))
            if _keep(cube_hash(seed, level, child), p_num, p_den):
                if level == depth or rec(level + 1, child):
                    return True
        return False

    return rec(1, (0,) * d)
