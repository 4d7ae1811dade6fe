# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tree kernel. Mirror of _pure.py — keep the two in sync.

Bit identity with the pure kernel relies on: same splitmix64 constants, same
float expressions in the same order (IEEE doubles in both runtimes), same
preorder traversal with the left child built first.
"""

from libc.stdlib cimport free, malloc

cimport numpy as cnp

name = "compiled"

ctypedef unsigned long long u64
ctypedef cnp.int64_t i64

cdef u64 _GOLDEN = 0x9E3779B97F4A7C15ULL
cdef u64 _MIX1 = 0xBF58476D1CE4E5B9ULL
cdef u64 _MIX2 = 0x94D049BB133111EBULL

cdef int MAX_FEATURES = 64


cdef struct Split:
    int found
    int feature
    double threshold
    double decrease


cdef Split _scan_best(double* xflat, i64* y, i64* counts, int nf,
                      i64** by_feature, i64 n_ids, i64 total,
                      i64 c0, i64 c1, int* cand, int n_cand,
                      double best_dec) nogil:
    cdef Split best
    cdef i64* ids
    cdef i64 rid, c, l0, l1, nl, nr, r0, r1, pos
    cdef int ci, f
    cdef double pn0, pn1, parent, v, vnext, pl0, pl1, gl, pr0, pr1, gr, w, dec
    best.found = 0
    best.feature = -1
    best.threshold = 0.0
    best.decrease = 0.0
    pn0 = (<double>c0) / (<double>total)
    pn1 = (<double>c1) / (<double>total)
    parent = 1.0 - pn0 * pn0 - pn1 * pn1
    for ci in range(n_cand):
        f = cand[ci]
        ids = by_feature[f]
        l0 = 0
        l1 = 0
        for pos in range(n_ids - 1):
            rid = ids[pos]
            c = counts[rid]
            if y[rid] == 0:
                l0 += c
            else:
                l1 += c
            v = xflat[rid * nf + f]
            vnext = xflat[ids[pos + 1] * nf + f]
            if vnext > v:
                nl = l0 + l1
                nr = total - nl
                pl0 = (<double>l0) / (<double>nl)
                pl1 = (<double>l1) / (<double>nl)
                gl = 1.0 - pl0 * pl0 - pl1 * pl1
                r0 = c0 - l0
                r1 = c1 - l1
                pr0 = (<double>r0) / (<double>nr)
                pr1 = (<double>r1) / (<double>nr)
                gr = 1.0 - pr0 * pr0 - pr1 * pr1
                w = ((<double>nl) * gl + (<double>nr) * gr) / (<double>total)
                dec = parent - w
                if dec > best_dec:
                    best_dec = dec
                    best.found = 1
                    best.feature = f
                    best.threshold = (v + vnext) / 2.0
                    best.decrease = dec
    return best


cdef class _Builder:
    cdef double[::1] xflat
    cdef i64[::1] y
    cdef i64[::1] counts
    cdef int nf, m_try, max_depth
    cdef i64 min_node_size
    cdef u64 state
    cdef list feat, thr, left, right, leaf, c0s, c1s

    def __init__(self, double[::1] xflat, i64[::1] y, i64[::1] counts,
                 int nf, int m_try, i64 min_node_size, int max_depth,
                 u64 rng_state):
        self.xflat = xflat
        self.y = y
        self.counts = counts
        self.nf = nf
        self.m_try = m_try
        self.min_node_size = min_node_size
        self.max_depth = max_depth
        self.state = rng_state
        self.feat = []
        self.thr = []
        self.left = []
        self.right = []
        self.leaf = []
        self.c0s = []
        self.c1s = []

    cdef u64 _below(self, u64 n):
        cdef u64 z
        self.state = self.state + _GOLDEN
        z = self.state
        z = (z ^ (z >> 30)) * _MIX1
        z = (z ^ (z >> 27)) * _MIX2
        z = z ^ (z >> 31)
        return z % n

    cdef int _draw_candidates(self, int* cand):
        # Partial Fisher-Yates; always consumes exactly m_try draws.
        cdef int pool[64]
        cdef int i, j, tmp, k
        for i in range(self.nf):
            pool[i] = i
        for i in range(self.m_try):
            j = i + <int>self._below(<u64>(self.nf - i))
            tmp = pool[i]
            pool[i] = pool[j]
            pool[j] = tmp
        for i in range(self.m_try):
            cand[i] = pool[i]
        # insertion sort -> ascending candidate order (tie rule)
        for i in range(1, self.m_try):
            tmp = cand[i]
            k = i - 1
            while k >= 0 and cand[k] > tmp:
                cand[k + 1] = cand[k]
                k -= 1
            cand[k + 1] = tmp
        return self.m_try

    cdef int build(self, i64** by_feature, i64 n_ids, i64 total, int depth) except -1:
        cdef int idx = len(self.feat)
        cdef i64 c0 = 0, c1 = 0, rid, pos, n_left, ltotal, li, ri
        cdef int g, f, n_cand
        cdef int cand[64]
        cdef Split best
        cdef double thr
        cdef bint terminal
        cdef i64** left_lists
        cdef i64** right_lists
        cdef i64* block

        self.feat.append(-1)
        self.thr.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.leaf.append(0)
        self.c0s.append(0)
        self.c1s.append(0)

        for pos in range(n_ids):
            rid = by_feature[0][pos]
            if self.y[rid] == 0:
                c0 += self.counts[rid]
            else:
                c1 += self.counts[rid]
        self.c0s[idx] = c0
        self.c1s[idx] = c1

        best.found = 0
        terminal = (
            (self.max_depth >= 0 and depth >= self.max_depth)
            or total <= self.min_node_size
            or c0 == 0
            or c1 == 0
        )
        if not terminal:
            n_cand = self._draw_candidates(cand)
            best = _scan_best(&self.xflat[0], &self.y[0], &self.counts[0],
                              self.nf, by_feature, n_ids, total, c0, c1,
                              cand, n_cand, 0.0)
            if not best.found:
                terminal = True
        if terminal:
            self.leaf[idx] = 0 if c0 >= c1 else 1
            return idx

        f = best.feature
        thr = best.threshold

        n_left = 0
        for pos in range(n_ids):
            if self.xflat[by_feature[0][pos] * self.nf + f] < thr:
                n_left += 1

        left_lists = <i64**>malloc(self.nf * sizeof(i64*))
        right_lists = <i64**>malloc(self.nf * sizeof(i64*))
        block = <i64*>malloc(self.nf * n_ids * sizeof(i64))
        if left_lists == NULL or right_lists == NULL or block == NULL:
            free(left_lists)
            free(right_lists)
            free(block)
            raise MemoryError()
        ltotal = 0
        for g in range(self.nf):
            left_lists[g] = block + g * n_ids
            right_lists[g] = block + g * n_ids + n_left
            li = 0
            ri = 0
            for pos in range(n_ids):
                rid = by_feature[g][pos]
                if self.xflat[rid * self.nf + f] < thr:
                    left_lists[g][li] = rid
                    li += 1
                else:
                    right_lists[g][ri] = rid
                    ri += 1
        for pos in range(n_left):
            ltotal += self.counts[left_lists[0][pos]]

        self.feat[idx] = f
        self.thr[idx] = thr
        try:
            self.left[idx] = self.build(left_lists, n_left, ltotal, depth + 1)
            self.right[idx] = self.build(right_lists, n_ids - n_left,
                                         total - ltotal, depth + 1)
        finally:
            free(block)
            free(left_lists)
            free(right_lists)
        return idx


cdef i64** _root_lists(i64[::1] sorted_all, i64[::1] counts, i64 n_rows,
                       int nf, i64* n_unique_out) except NULL:
    cdef i64 n_unique = 0, pos, rid
    cdef int f
    cdef i64** by_feature
    cdef i64* block
    for pos in range(n_rows):
        if counts[pos] > 0:
            n_unique += 1
    by_feature = <i64**>malloc(nf * sizeof(i64*))
    block = <i64*>malloc(nf * n_unique * sizeof(i64)) if n_unique > 0 else <i64*>malloc(sizeof(i64))
    if by_feature == NULL or block == NULL:
        free(by_feature)
        free(block)
        raise MemoryError()
    cdef i64 k
    for f in range(nf):
        by_feature[f] = block + f * n_unique
        k = 0
        for pos in range(n_rows):
            rid = sorted_all[f * n_rows + pos]
            if counts[rid] > 0:
                by_feature[f][k] = rid
                k += 1
    n_unique_out[0] = n_unique
    return by_feature


def build_tree(double[::1] xflat, i64[::1] y, int n_features,
               i64[::1] sorted_all, i64[::1] counts, long long total,
               int m_try, long long min_node_size, int max_depth,
               unsigned long long rng_state):
    """Grow one tree; returns parallel node lists in preorder.

    max_depth < 0 means unlimited. Same contract as _pure.build_tree.
    """
    if n_features > MAX_FEATURES:
        raise ValueError(f"at most {MAX_FEATURES} features supported")
    cdef i64 n_rows = y.shape[0]
    cdef i64 n_unique = 0
    cdef i64** by_feature = _root_lists(sorted_all, counts, n_rows,
                                        n_features, &n_unique)
    cdef _Builder b = _Builder(xflat, y, counts, n_features, m_try,
                               min_node_size, max_depth, rng_state)
    try:
        b.build(by_feature, n_unique, total, 0)
    finally:
        free(by_feature[0])
        free(by_feature)
    return {
        "feature": b.feat,
        "threshold": b.thr,
        "left": b.left,
        "right": b.right,
        "leaf_class": b.leaf,
        "count0": b.c0s,
        "count1": b.c1s,
    }


def best_split(double[::1] xflat, i64[::1] y, int n_features,
               i64[::1] sorted_all, i64[::1] counts, long long total,
               candidates):
    """Split search over explicit candidate features (ascending order)."""
    if n_features > MAX_FEATURES:
        raise ValueError(f"at most {MAX_FEATURES} features supported")
    cdef i64 n_rows = y.shape[0]
    cdef i64 n_unique = 0
    cdef i64 c0 = 0, c1 = 0, pos, rid
    cdef int cand[64]
    cdef int n_cand = len(candidates)
    cdef int i
    cdef Split best
    for i in range(n_cand):
        cand[i] = candidates[i]
    cdef i64** by_feature = _root_lists(sorted_all, counts, n_rows,
                                        n_features, &n_unique)
    try:
        for pos in range(n_unique):
            rid = by_feature[0][pos]
            if y[rid] == 0:
                c0 += counts[rid]
            else:
                c1 += counts[rid]
        if c0 == 0 or c1 == 0:
            return None
        best = _scan_best(&xflat[0], &y[0], &counts[0], n_features,
                          by_feature, n_unique, total, c0, c1, cand,
                          n_cand, 0.0)
    finally:
        free(by_feature[0])
        free(by_feature)
    if not best.found:
        return None
    return (best.feature, best.threshold, best.decrease)


def predict_rows(i64[::1] feature, double[::1] threshold, i64[::1] left,
                 i64[::1] right, i64[::1] leaf_class, double[::1] xflat,
                 long long n_rows, int n_features):
    """Route each row through one tree; returns a list of leaf classes."""
    cdef list out = []
    cdef i64 r, i, base
    for r in range(n_rows):
        base = r * n_features
        i = 0
        while feature[i] >= 0:
            if xflat[base + feature[i]] < threshold[i]:
                i = left[i]
            else:
                i = right[i]
        out.append(leaf_class[i])
    return out
