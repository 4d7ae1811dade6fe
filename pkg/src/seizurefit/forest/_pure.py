"""Pure-Python tree kernel. Fallback mirror of _speedups.pyx.

Both kernels must emit bit-identical trees for the same inputs: identical RNG
constants, identical float expressions (no `**`, no re-associations), identical
traversal order (preorder, left child first). Any change here must be copied
into the Cython source and vice versa.

Data layout shared by both kernels:
  xflat      row-major feature matrix, length n_rows * n_features
  y          class per original row, values in {0, 1}
  sorted_all n_features blocks of n_rows row ids, block f sorted by feature f
  counts     bootstrap multiplicity per original row (0 = out of bag)
  total      sum of counts (the bootstrap sample size)
"""

from __future__ import annotations

_M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

name = "pure"


def _tolist(seq):
    return seq.tolist() if hasattr(seq, "tolist") else list(seq)


def _scan_best(xflat, y, counts, n_features, by_feature, total, c0, c1,
               candidates, best_dec):
    """Best Gini split over `candidates`, beating `best_dec` strictly.

    Candidates must be in ascending order: with strict improvement the first
    optimum wins, which realizes the (lower feature, lower threshold) tie rule.
    Returns (feature, threshold, decrease) or None.
    """
    n = total
    pn0 = c0 / n
    pn1 = c1 / n
    parent = 1.0 - pn0 * pn0 - pn1 * pn1
    best = None
    for f in candidates:
        ids = by_feature[f]
        l0 = 0
        l1 = 0
        for pos in range(len(ids) - 1):
            rid = ids[pos]
            c = counts[rid]
            if y[rid] == 0:
                l0 += c
            else:
                l1 += c
            v = xflat[rid * n_features + f]
            vnext = xflat[ids[pos + 1] * n_features + f]
            if vnext > v:
                nl = l0 + l1
                nr = n - nl
                pl0 = l0 / nl
                pl1 = l1 / nl
                gl = 1.0 - pl0 * pl0 - pl1 * pl1
                r0 = c0 - l0
                r1 = c1 - l1
                pr0 = r0 / nr
                pr1 = r1 / nr
                gr = 1.0 - pr0 * pr0 - pr1 * pr1
                w = (nl * gl + nr * gr) / n
                dec = parent - w
                if dec > best_dec:
                    best_dec = dec
                    best = (f, (v + vnext) / 2.0, dec)
    return best


class _Builder:
    def __init__(self, xflat, y, counts, n_features, m_try, min_node_size,
                 max_depth, rng_state):
        self.xflat = xflat
        self.y = y
        self.counts = counts
        self.nf = n_features
        self.m_try = m_try
        self.min_node_size = min_node_size
        self.max_depth = max_depth
        self.state = rng_state & _M64
        self.feat = []
        self.thr = []
        self.left = []
        self.right = []
        self.leaf = []
        self.c0 = []
        self.c1 = []

    def _below(self, n):
        self.state = (self.state + _GOLDEN) & _M64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _M64
        z = ((z ^ (z >> 27)) * _MIX2) & _M64
        z = z ^ (z >> 31)
        return z % n

    def _draw_candidates(self):
        # Partial Fisher-Yates; always consumes exactly m_try draws.
        pool = list(range(self.nf))
        for i in range(self.m_try):
            j = i + self._below(self.nf - i)
            pool[i], pool[j] = pool[j], pool[i]
        return sorted(pool[:self.m_try])

    def build(self, by_feature, total, depth):
        idx = len(self.feat)
        self.feat.append(-1)
        self.thr.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.leaf.append(0)
        self.c0.append(0)
        self.c1.append(0)

        counts = self.counts
        y = self.y
        c0 = 0
        c1 = 0
        for rid in by_feature[0]:
            if y[rid] == 0:
                c0 += counts[rid]
            else:
                c1 += counts[rid]
        self.c0[idx] = c0
        self.c1[idx] = c1

        best = None
        terminal = (
            (self.max_depth >= 0 and depth >= self.max_depth)
            or total <= self.min_node_size
            or c0 == 0
            or c1 == 0
        )
        if not terminal:
            cand = self._draw_candidates()
            best = _scan_best(self.xflat, y, counts, self.nf, by_feature,
                              total, c0, c1, cand, 0.0)
            if best is None:
                terminal = True
        if terminal:
            self.leaf[idx] = 0 if c0 >= c1 else 1
            return idx

        f, thr, _dec = best
        xflat = self.xflat
        nf = self.nf
        left_lists = []
        right_lists = []
        for g in range(nf):
            lg = []
            rg = []
            for rid in by_feature[g]:
                if xflat[rid * nf + f] < thr:
                    lg.append(rid)
                else:
                    rg.append(rid)
            left_lists.append(lg)
            right_lists.append(rg)
        ltotal = 0
        for rid in left_lists[0]:
            ltotal += counts[rid]

        self.feat[idx] = f
        self.thr[idx] = thr
        self.left[idx] = self.build(left_lists, ltotal, depth + 1)
        self.right[idx] = self.build(right_lists, total - ltotal, depth + 1)
        return idx


def _root_lists(sorted_all, counts, n_rows, n_features):
    by_feature = []
    for f in range(n_features):
        base = f * n_rows
        by_feature.append([rid for rid in sorted_all[base:base + n_rows]
                           if counts[rid] > 0])
    return by_feature


def build_tree(xflat, y, n_features, sorted_all, counts, total, m_try,
               min_node_size, max_depth, rng_state):
    """Grow one tree; returns parallel node lists in preorder.

    max_depth < 0 means unlimited. Returns a dict with keys feature,
    threshold, left, right, leaf_class, count0, count1.
    """
    xflat = _tolist(xflat)
    y = _tolist(y)
    sorted_all = _tolist(sorted_all)
    counts = _tolist(counts)
    n_rows = len(y)
    b = _Builder(xflat, y, counts, n_features, m_try, min_node_size,
                 max_depth, rng_state)
    b.build(_root_lists(sorted_all, counts, n_rows, n_features), total, 0)
    return {
        "feature": b.feat,
        "threshold": b.thr,
        "left": b.left,
        "right": b.right,
        "leaf_class": b.leaf,
        "count0": b.c0,
        "count1": b.c1,
    }


def best_split(xflat, y, n_features, sorted_all, counts, total, candidates):
    """Split search over explicit candidate features (ascending order)."""
    xflat = _tolist(xflat)
    y = _tolist(y)
    sorted_all = _tolist(sorted_all)
    counts = _tolist(counts)
    n_rows = len(y)
    by_feature = _root_lists(sorted_all, counts, n_rows, n_features)
    c0 = 0
    c1 = 0
    for rid in by_feature[0]:
        if y[rid] == 0:
            c0 += counts[rid]
        else:
            c1 += counts[rid]
    if c0 == 0 or c1 == 0:
        return None
    return _scan_best(xflat, y, counts, n_features, by_feature, total, c0, c1,
                      list(candidates), 0.0)


def predict_rows(feature, threshold, left, right, leaf_class, xflat, n_rows,
                 n_features):
    """Route each row through one tree; returns a list of leaf classes."""
    feature = _tolist(feature)
    threshold = _tolist(threshold)
    left = _tolist(left)
    right = _tolist(right)
    leaf_class = _tolist(leaf_class)
    xflat = _tolist(xflat)
    out = []
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
