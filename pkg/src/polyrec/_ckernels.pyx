# cython: boundscheck=False, wraparound=False, cdivision=True
"""C implementations of the string-distance kernels.

Same contracts as ``polyrec._pykernels``; selected by ``polyrec.kernels``
when the extension compiled.
"""

from cpython.mem cimport PyMem_Free, PyMem_Malloc


def levenshtein(str a, str b):
    """Edit distance (insert/delete/substitute, all cost 1)."""
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    if la < lb:
        a, b = b, a
        la, lb = lb, la

    cdef Py_ssize_t *row = <Py_ssize_t *> PyMem_Malloc((lb + 1) * sizeof(Py_ssize_t))
    if row == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j, prev, cur, cost
    cdef Py_UCS4 ca
    try:
        for j in range(lb + 1):
            row[j] = j
        for i in range(1, la + 1):
            ca = a[i - 1]
            prev = row[0]
            row[0] = i
            for j in range(1, lb + 1):
                cost = 0 if ca == <Py_UCS4> b[j - 1] else 1
                cur = prev + cost
                if row[j] + 1 < cur:
                    cur = row[j] + 1
                if row[j - 1] + 1 < cur:
                    cur = row[j - 1] + 1
                prev = row[j]
                row[j] = cur
        return row[lb]
    finally:
        PyMem_Free(row)


def within_distance(str a, str b, Py_ssize_t k):
    """True iff levenshtein(a, b) <= k, with early exits."""
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la > lb:
        a, b = b, a
        la, lb = lb, la
    if lb - la > k:
        return False
    if k == 0:
        return a == b

    # Narrow-band DP: only cells |i - j| <= k can stay within k.
    cdef Py_ssize_t width = 2 * k + 1
    cdef Py_ssize_t *row = <Py_ssize_t *> PyMem_Malloc(width * sizeof(Py_ssize_t))
    cdef Py_ssize_t *nxt = <Py_ssize_t *> PyMem_Malloc(width * sizeof(Py_ssize_t))
    if row == NULL or nxt == NULL:
        PyMem_Free(row)
        PyMem_Free(nxt)
        raise MemoryError()
    cdef Py_ssize_t INF = la + lb + 1
    cdef Py_ssize_t i, j, d, lo, hi, best, val, cost
    cdef Py_ssize_t *tmp
    cdef Py_UCS4 ca
    try:
        # row[d] holds D[i][i + d - k] for offset d in [0, 2k].
        for d in range(width):
            j = d - k
            row[d] = j if 0 <= j <= lb else INF
        for i in range(1, la + 1):
            ca = a[i - 1]
            best = INF
            for d in range(width):
                j = i + d - k
                if j < 0 or j > lb:
                    nxt[d] = INF
                    continue
                if j == 0:
                    nxt[d] = i
                    best = i if i < best else best
                    continue
                cost = 0 if ca == <Py_UCS4> b[j - 1] else 1
                val = row[d] + cost                      # diagonal
                if d + 1 < width and row[d + 1] + 1 < val:
                    val = row[d + 1] + 1                 # deletion from a
                if d > 0 and nxt[d - 1] + 1 < val:
                    val = nxt[d - 1] + 1                 # insertion into a
                nxt[d] = val
                if val < best:
                    best = val
            if best > k:
                return False
            tmp = row
            row = nxt
            nxt = tmp
        return row[lb - la + k] <= k
    finally:
        PyMem_Free(row)
        PyMem_Free(nxt)
