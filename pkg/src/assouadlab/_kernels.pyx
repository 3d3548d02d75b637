# cython: boundscheck=False, wraparound=False, overflowcheck=False, cdivision=True
"""Compiled percolation kernels.

Must stay bit-for-bit identical to the pure-Python reference in
``_kernels_py.py``: same hash chain, same exact rational keep-test, same
child enumeration order.
"""

import numpy as np

from libc.stdint cimport uint64_t, int64_t

cdef extern from *:
    ctypedef unsigned long long uint128_t "unsigned __int128"

BACKEND = "cython"


cdef inline uint64_t _mix64(uint64_t x) nogil:
    cdef uint64_t z = x
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline uint64_t _cube_hash(uint64_t seed, uint64_t level,
                                int64_t* coord, int d) nogil:
    cdef uint64_t h = _mix64(seed)
    cdef int a
    h = _mix64(h ^ level)
    for a in range(d):
        h = _mix64(h ^ <uint64_t>coord[a])
    return h


cdef inline bint _keep(uint64_t h, uint64_t p_num, uint64_t p_den) nogil:
    # keep with probability exactly p_num/p_den: h/2^64 < p
    return (<uint128_t>h) * p_den < (<uint128_t>p_num) << 64


def mix64(x):
    """splitmix64 finaliser (avalanche step, no stream increment)."""
    return int(_mix64(<uint64_t>(x & 0xFFFFFFFFFFFFFFFF)))


def cube_hash(seed, level, coord):
    """Order-independent per-cube hash: chain seed, level, then each axis."""
    cdef int64_t buf[16]
    cdef int d = len(coord)
    cdef int a
    if d > 16:
        raise ValueError("ambient dimension too large for compiled kernel")
    for a in range(d):
        buf[a] = coord[a]
    return int(_cube_hash(<uint64_t>(seed & 0xFFFFFFFFFFFFFFFF),
                          <uint64_t>(level & 0xFFFFFFFFFFFFFFFF), buf, d))


def expand_level(seed, level, coords, n, p_num, p_den):
    """Surviving children (at `level`) of the given parent cubes."""
    coords_arr = np.ascontiguousarray(coords, dtype=np.int64)
    cdef int64_t[:, ::1] par = coords_arr
    cdef Py_ssize_t npar = par.shape[0]
    cdef int d = par.shape[1]
    cdef int nn = n
    cdef uint64_t sd = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t lv = <uint64_t>level
    cdef uint64_t pn = <uint64_t>p_num
    cdef uint64_t pd = <uint64_t>p_den
    cdef Py_ssize_t nchild = 1
    cdef int a
    for a in range(d):
        nchild *= nn
    out_arr = np.empty((npar * nchild, d), dtype=np.int64)
    cdef int64_t[:, ::1] out = out_arr
    cdef int64_t child[16]
    cdef Py_ssize_t i, idx, m = 0
    cdef int64_t q
    if d > 16:
        raise ValueError("ambient dimension too large for compiled kernel")
    with nogil:
        for i in range(npar):
            for idx in range(nchild):
                q = idx
                for a in range(d - 1, -1, -1):
                    child[a] = par[i, a] * nn + q % nn
                    q //= nn
                if _keep(_cube_hash(sd, lv, child, d), pn, pd):
                    for a in range(d):
                        out[m, a] = child[a]
                    m += 1
    return out_arr[:m].copy()


cdef bint _survives(uint64_t seed, int n, int d, uint64_t p_num,
                    uint64_t p_den, int depth, int level,
                    int64_t* coord, int64_t* scratch) nogil:
    # scratch holds one child coordinate per recursion level: d slots each
    cdef Py_ssize_t nchild = 1
    cdef int a
    cdef Py_ssize_t idx, q
    cdef int64_t* child = scratch + (level - 1) * d
    for a in range(d):
        nchild *= n
    for idx in range(nchild):
        q = idx
        for a in range(d - 1, -1, -1):
            child[a] = coord[a] * n + q % n
            q //= n
        if _keep(_cube_hash(seed, <uint64_t>level, child, d), p_num, p_den):
            if level == depth:
                return True
            if _survives(seed, n, d, p_num, p_den, depth, level + 1,
                         child, scratch):
                return True
    return False


def survives_to_depth(seed, n, d, p_num, p_den, depth):
    """True iff the percolation tree has a surviving level-`depth` cube."""
    if depth <= 0:
        return True
    root_arr = np.zeros(d, dtype=np.int64)
    scratch_arr = np.zeros(depth * d, dtype=np.int64)
    cdef int64_t[::1] root = root_arr
    cdef int64_t[::1] scratch = scratch_arr
    cdef uint64_t sd = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t pn = <uint64_t>p_num
    cdef uint64_t pd = <uint64_t>p_den
    cdef int cn = n
    cdef int cd = d
    cdef int cdepth = depth
    cdef bint res
    with nogil:
        res = _survives(sd, cn, cd, pn, pd, cdepth, 1,
                        &root[0], &scratch[0])
    return bool(res)
