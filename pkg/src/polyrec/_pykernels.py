"""Pure-Python string-distance kernels.

Fallback used when the compiled extension is unavailable; behavior must
match ``polyrec._ckernels`` exactly (tests cross-check the two).
"""

from __future__ import annotations


def levenshtein(a: str, b: str) -> int:
    """Edit distance (insert/delete/substitute, all cost 1)."""
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    if la < lb:
        a, b = b, a
        la, lb = lb, la

    row = list(range(lb + 1))
    for i in range(1, la + 1):
        ca = a[i - 1]
        prev = row[0]
        row[0] = i
        for j in range(1, lb + 1):
            cur = prev if ca == b[j - 1] else prev + 1
            if row[j] + 1 < cur:
                cur = row[j] + 1
            if row[j - 1] + 1 < cur:
                cur = row[j - 1] + 1
            prev = row[j]
            row[j] = cur
    return row[lb]


def within_distance(a: str, b: str, k: int) -> bool:
    """True iff levenshtein(a, b) <= k, with early exits."""
    la, lb = len(a), len(b)
    if la > lb:
        a, b, la, lb = b, a, lb, la
    if lb - la > k:
        return False
    if k == 0:
        return a == b

    width = 2 * k + 1
    inf = la + lb + 1
    # row[d] holds D[i][i + d - k] for offset d in [0, 2k].
    row = [j if 0 <= (j := d - k) <= lb else inf for d in range(width)]
    for i in range(1, la + 1):
        ca = a[i - 1]
        nxt = [inf] * width
        best = inf
        for d in range(width):
            j = i + d - k
            if j < 0 or j > lb:
                continue
            if j == 0:
                nxt[d] = i
            else:
                val = row[d] + (0 if ca == b[j - 1] else 1)
                if d + 1 < width and row[d + 1] + 1 < val:
                    val = row[d + 1] + 1
                if d > 0 and nxt[d - 1] + 1 < val:
                    val = nxt[d - 1] + 1
                nxt[d] = val
            if nxt[d] < best:
                best = nxt[d]
        if best > k:
            return False
        row = nxt
    return row[lb - la + k] <= k
