# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled entropy-scan kernel.

chids.kernels._pure is the reference twin; the two must stay
operation-for-operation identical so cut choices match bit-for-bit.
"""

from libc.math cimport log2
from libc.stdint cimport int64_t
from libc.stdlib cimport free, malloc


def best_group_cut(int64_t[:, ::1] counts, int min_each_side):
    """See chids.kernels._pure.best_group_cut for the contract."""
    cdef Py_ssize_t g = counts.shape[0]
    cdef int c_dim = <int> counts.shape[1]
    cdef Py_ssize_t b
    cdef int c
    cdef int64_t v, w, n_total = 0, n_left = 0, n_right
    cdef int64_t *total
    cdef int64_t *left
    cdef double p, q, h_parent, h_left, h_right, gain
    cdef double best_gain = -1.0
    cdef double best_hl = 0.0, best_hr = 0.0
    cdef Py_ssize_t best_pos = -1
    cdef int64_t best_nl = 0

    if g < 2 or c_dim == 0:
        return None
    total = <int64_t *> malloc(c_dim * sizeof(int64_t))
    left = <int64_t *> malloc(c_dim * sizeof(int64_t))
    if total == NULL or left == NULL:
        free(total)
        free(left)
        raise MemoryError()
    try:
        for c in range(c_dim):
            total[c] = 0
            left[c] = 0
        for b in range(g):
            for c in range(c_dim):
                total[c] += counts[b, c]
        for c in range(c_dim):
            n_total += total[c]
        if n_total == 0:
            return None

        h_parent = 0.0
        for c in range(c_dim):
            v = total[c]
            if v > 0:
                p = (<double> v) / (<double> n_total)
                h_parent -= p * log2(p)

        for b in range(1, g):
            for c in range(c_dim):
                left[c] += counts[b - 1, c]
                n_left += counts[b - 1, c]
            if _same_class(counts, b - 1, b, c_dim):
                continue
            n_right = n_total - n_left
            if n_left < min_each_side or n_right < min_each_side:
                continue
            h_left = 0.0
            h_right = 0.0
            for c in range(c_dim):
                v = left[c]
                if v > 0:
                    p = (<double> v) / (<double> n_left)
                    h_left -= p * log2(p)
                w = total[c] - v
                if w > 0:
                    q = (<double> w) / (<double> n_right)
                    h_right -= q * log2(q)
            gain = (
                h_parent
                - ((<double> n_left) / (<double> n_total)) * h_left
                - ((<double> n_right) / (<double> n_total)) * h_right
            )
            if gain > best_gain:
                best_gain = gain
                best_pos = b
                best_nl = n_left
                best_hl = h_left
                best_hr = h_right
    finally:
        free(total)
        free(left)

    if best_pos < 0:
        return None
    return (int(best_pos), best_gain, int(best_nl), h_parent, best_hl, best_hr)


cdef inline bint _same_class(int64_t[:, ::1] counts, Py_ssize_t a, Py_ssize_t b, int c_dim):
    cdef int c
    cdef int cls_a = -1, cls_b = -1
    for c in range(c_dim):
        if counts[a, c] > 0:
            if cls_a >= 0:
                return False
            cls_a = c
    for c in range(c_dim):
        if counts[b, c] > 0:
            if cls_b >= 0:
                return False
            cls_b = c
    return cls_a == cls_b
