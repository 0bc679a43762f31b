"""Numba kernels for the all-pairs similarity join and base profile construction.

Both kernels work in correlation space: for windows of length ``m`` with
precomputed ``a[i] = 1/(sigma_i * sqrt(m))`` and ``b[i] = mu_i / sigma_i``,
the Pearson correlation of windows i and j is ``qt * a[i]*a[j] - b[i]*b[j]``
where ``qt`` is their raw sliding dot product. Distances are recovered
outside as ``sqrt(2m(1-q))``; maximizing q is minimizing distance.

Degenerate (constant) windows must be given ``a = b = 0`` by the caller; their
pairs then surface as q == 0 and the caller fixes the affected rows on a slow
path that applies the constant-window conventions.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True, fastmath=True)
def diag_join(x, m, a, b, g_start, g_end, best_q, best_j):
    """Self-join over diagonals [g_start, g_end); updates best_q/best_j in place.

    Tie handling yields, per row, the largest q with the smallest candidate
    offset: upper-triangle updates use strict >, lower-triangle >= (any
    incumbent at diagonal g' < g has a larger offset than the new lower
    candidate, and a smaller one than the new upper candidate).
    """
    w = x.shape[0] - m + 1
    for g in range(g_start, g_end):
        L = w - g
        s = 0.0
        for t in range(m):
            s += x[t] * x[t + g]
        qt = s
        q = qt * a[0] * a[g] - b[0] * b[g]
        if q > best_q[0]:
            best_q[0] = q
            best_j[0] = g
        if q >= best_q[g]:
            best_q[g] = q
            best_j[g] = 0
        for i in range(1, L):
            qt = qt - x[i - 1] * x[i - 1 + g] + x[i + m - 1] * x[i + m - 1 + g]
            q = qt * a[i] * a[i + g] - b[i] * b[i + g]
            if q > best_q[i]:
                best_q[i] = q
                best_j[i] = i + g
            if q >= best_q[i + g]:
                best_q[i + g] = q
                best_j[i + g] = i
    return


@njit(cache=True, nogil=True, fastmath=True)
def base_rows(x, m, a, b, ok, radius, row_start, row_end, p, qt_start, qt_col0):
    """Per-row nearest neighbour plus the top-p candidates by |q| (pruning seeds).

    Returns, for each row in [row_start, row_end): the best candidate by q
    (smallest offset on ties), up to p candidates ordered by the
    extension-bound rank (max(q,0)^2 desc, offset asc) together with their q
    and raw dot product, and the count of admissible candidates. ``ok`` masks
    offsets that may serve as candidates; masked offsets never win or get
    selected. ``qt_start`` holds the dot products of window row_start against
    all windows; ``qt_col0`` those of window 0 (source for column 0 updates).
    """
    w = x.shape[0] - m + 1
    rows = row_end - row_start
    best_q = np.full(rows, -np.inf)
    best_j = np.full(rows, -1, dtype=np.int64)
    sel_j = np.full((rows, p), -1, dtype=np.int64)
    sel_q = np.zeros((rows, p))
    sel_qt = np.zeros((rows, p))
    sel_n = np.zeros(rows, dtype=np.int64)
    avail = np.zeros(rows, dtype=np.int64)

    qt = qt_start.copy()
    qtn = np.empty(w)
    qbuf = np.empty(w)
    key = np.empty(p + 1)
    kj = np.empty(p + 1, dtype=np.int64)

    for i in range(row_start, row_end):
        ai = a[i]
        bi = b[i]
        if i > row_start:
            xa = x[i - 1]
            xb = x[i + m - 1]
            for j in range(1, w):
                v = qt[j - 1] - xa * x[j - 1] + xb * x[j + m - 1]
                qtn[j] = v
                qbuf[j] = v * ai * a[j] - bi * b[j]
            qtn[0] = qt_col0[i]
            qbuf[0] = qtn[0] * ai * a[0] - bi * b[0]
            tmp = qt
            qt = qtn
            qtn = tmp
        else:
            for j in range(w):
                qbuf[j] = qt[j] * ai * a[j] - bi * b[j]

        lo = i - radius
        hi = i + radius
        r = i - row_start
        count = 0
        seen = 0
        bq = -np.inf
        bj = -1
        for j in range(w):
            if lo < j < hi or not ok[j]:
                continue
            seen += 1
            q = qbuf[j]
            if q > bq:
                bq = q
                bj = j
            k2 = q * q if q > 0.0 else 0.0
            if count < p or k2 > key[count - 1]:
                # insert into the (q^2 desc, offset asc) order; ascending j scan
                # means equal keys keep the incumbent
                pos = count
                while pos > 0 and key[pos - 1] < k2:
                    key[pos] = key[pos - 1]
                    kj[pos] = kj[pos - 1]
                    pos -= 1
                key[pos] = k2
                kj[pos] = j
                if count < p:
                    count += 1
        best_q[r] = bq
        best_j[r] = bj
        sel_n[r] = count
        avail[r] = seen
        for s in range(count):
            j = kj[s]
            sel_j[r, s] = j
            sel_q[r, s] = qbuf[j]
            sel_qt[r, s] = qt[j]
    return best_q, best_j, sel_j, sel_q, sel_qt, sel_n, avail


@njit(cache=True, nogil=True)
def kahan_cumsums(x):
    """Compensated cumulative sums of x and x*x (one pass, leading zero)."""
    n = x.shape[0]
    csum = np.empty(n + 1)
    csum2 = np.empty(n + 1)
    csum[0] = 0.0
    csum2[0] = 0.0
    s1 = 0.0
    c1 = 0.0
    s2 = 0.0
    c2 = 0.0
    for k in range(n):
        y = x[k] - c1
        t = s1 + y
        c1 = (t - s1) - y
        s1 = t
        csum[k + 1] = s1
        v = x[k] * x[k] - c2
        t2 = s2 + v
        c2 = (t2 - s2) - v
        s2 = t2
        csum2[k + 1] = s2
    return csum, csum2


def warmup():
    """Trigger jit compilation on tiny inputs (first call in a process)."""
    x = np.arange(32, dtype=np.float64) % 5.0
    m = 4
    w = x.size - m + 1
    a = np.ones(w)
    b = np.zeros(w)
    diag_join(x, m, a, b, 2, 5, np.full(w, -np.inf), np.full(w, -1, dtype=np.int64))
    qt = np.correlate(x, x[:m])
    base_rows(x, m, a, b, np.ones(w, dtype=np.bool_), 2, 0, 2, 3, qt, qt)
    kahan_cumsums(x)
