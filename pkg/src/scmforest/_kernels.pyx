# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Arithmetic mirrors _fallback exactly so both
backends pick the same argmax under floating-point ties."""

from libc.stdlib cimport malloc, free


def best_rule(const Py_ssize_t[:, ::1] order,
              const Py_ssize_t[::1] slot_feature,
              const Py_ssize_t[::1] slot_pos,
              const unsigned char[::1] neg,
              const unsigned char[::1] pos,
              double p_penalty):
    cdef Py_ssize_t n = order.shape[1]
    cdef Py_ssize_t n_slots = slot_feature.shape[0]
    cdef Py_ssize_t q, k, i, f, cur_f = -1
    cdef Py_ssize_t tn = 0, tp = 0, a, b, c, s
    cdef Py_ssize_t best_r = -1, best_cov = 0
    cdef double score, best_score = 0.0
    cdef Py_ssize_t *cn
    cdef Py_ssize_t *cp

    for i in range(n):
        tn += neg[i]
        tp += pos[i]
    cn = <Py_ssize_t *> malloc(n * sizeof(Py_ssize_t))
    cp = <Py_ssize_t *> malloc(n * sizeof(Py_ssize_t))
    if cn == NULL or cp == NULL:
        free(cn)
        free(cp)
        raise MemoryError()
    with nogil:
        for q in range(n_slots):
            f = slot_feature[q]
            if f != cur_f:
                a = 0
                b = 0
                for k in range(n):
                    i = order[f, k]
                    a = a + neg[i]
                    b = b + pos[i]
                    cn[k] = a
                    cp[k] = b
                cur_f = f
            k = slot_pos[q]
            # LE outputs 0 on sorted positions > k
            c = tn - cn[k]
            s = tp - cp[k]
            score = <double> c - p_penalty * <double> s
            if best_r < 0 or score > best_score or (score == best_score and c > best_cov):
                best_r = 2 * q
                best_score = score
                best_cov = c
            # GT outputs 0 on sorted positions <= k
            c = cn[k]
            s = cp[k]
            score = <double> c - p_penalty * <double> s
            if score > best_score or (score == best_score and c > best_cov):
                best_r = 2 * q + 1
                best_score = score
                best_cov = c
    free(cn)
    free(cp)
    return best_r, best_score, best_cov


def best_split(const double[:, ::1] values,
               const unsigned char[:, ::1] labels,
               Py_ssize_t min_leaf):
    cdef Py_ssize_t n_feat = values.shape[0]
    cdef Py_ssize_t m = values.shape[1]
    cdef Py_ssize_t f, k
    cdef Py_ssize_t best_f = -1, best_k = -1
    cdef double total_pos, pl, ql, pr, qr, nl, nr, imp, best_imp = 0.0
    with nogil:
        for f in range(n_feat):
            total_pos = 0.0
            for k in range(m):
                total_pos = total_pos + labels[f, k]
            pl = 0.0
            for k in range(m - 1):
                pl = pl + labels[f, k]
                if not values[f, k] < values[f, k + 1]:
                    continue
                nl = <double> (k + 1)
                nr = <double> (m - k - 1)
                if k + 1 < min_leaf or m - k - 1 < min_leaf:
                    continue
                ql = nl - pl
                pr = total_pos - pl
                qr = nr - pr
                imp = (nl - (pl * pl + ql * ql) / nl) + (nr - (pr * pr + qr * qr) / nr)
                if best_f < 0 or imp < best_imp:
                    best_f = f
                    best_k = k
                    best_imp = imp
    return best_f, best_k, best_imp
