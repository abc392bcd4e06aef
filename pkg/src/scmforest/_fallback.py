"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np


def best_rule(order, slot_feature, slot_pos, neg, pos, p_penalty):
    if len(slot_feature) == 0:
        return -1, 0.0, 0
    neg = np.asarray(neg, dtype=np.int64)
    pos = np.asarray(pos, dtype=np.int64)
    tn, tp = neg.sum(), pos.sum()
    cn = np.cumsum(neg[order], axis=1)[slot_feature, slot_pos]
    cp = np.cumsum(pos[order], axis=1)[slot_feature, slot_pos]
    covered = np.empty(2 * len(cn), dtype=np.int64)
    sacrificed = np.empty_like(covered)
    covered[0::2], covered[1::2] = tn - cn, cn
    sacrificed[0::2], sacrificed[1::2] = tp - cp, cp
    score = covered.astype(np.float64) - float(p_penalty) * sacrificed.astype(np.float64)
    best = score.max()
    cand = np.flatnonzero(score == best)
    cand = cand[covered[cand] == covered[cand].max()]
    r = int(cand[0])
    return r, float(score[r]), int(covered[r])


def best_split(values, labels, min_leaf):
    values = np.asarray(values, dtype=np.float64)
    n_feat, m = values.shape
    if m < 2:
        return -1, -1, 0.0
    lab = np.asarray(labels, dtype=np.float64)
    pl = np.cumsum(lab, axis=1)[:, :-1]
    nl = np.arange(1, m, dtype=np.float64)
    nr = m - nl
    ql = nl - pl
    pr = lab.sum(axis=1, keepdims=True) - pl
    qr = nr - pr
    imp = (nl - (pl * pl + ql * ql) / nl) + (nr - (pr * pr + qr * qr) / nr)
    valid = values[:, :-1] < values[:, 1:]
    valid &= (nl >= min_leaf) & (nr >= min_leaf)
    if not valid.any():
        return -1, -1, 0.0
    imp = np.where(valid, imp, np.inf)
    flat = int(np.argmin(imp))  # first minimum in (feature, position) order
    f, k = divmod(flat, m - 1)
    return f, k, float(imp[f, k])
