# cython: boundscheck=False, wraparound=False, cdivision=True
"""Gray-code subset enumeration for the exhaustive weak-Lp set suprema.

One call evaluates max over non-empty atom subsets A of

    (sum_{i in A} w_i)^a * (sum_{i in A} s_i)^b

visiting the 2^n - 1 subsets in Gray order so each step updates the two
running sums in O(1).
"""

from libc.math cimport pow


def subset_sup_pow(double[::1] w, double[::1] s, double a, double b):
    """Return (best value, bitmask of an attaining subset).

    Entries of w must be > 0 and entries of s >= 0; a subset with zero
    s-sum contributes 0.  Running sums are refreshed from scratch every
    2^16 steps to keep cancellation drift negligible.
    """
    cdef Py_ssize_t n = w.shape[0]
    if n == 0:
        return 0.0, 0
    if n > 62:
        raise ValueError("subset enumeration capped at 62 atoms")
    cdef unsigned long long total = (<unsigned long long> 1) << n
    cdef unsigned long long i, gray, diff, bit
    cdef unsigned long long prev_gray = 0, best_mask = 0
    cdef double W = 0.0, S = 0.0, val, best = -1.0
    cdef Py_ssize_t j
    for i in range(1, total):
        gray = i ^ (i >> 1)
        diff = gray ^ prev_gray
        j = 0
        while not (diff & 1):
            diff >>= 1
            j += 1
        bit = (<unsigned long long> 1) << j
        if gray & bit:
            W += w[j]
            S += s[j]
        else:
            W -= w[j]
            S -= s[j]
        prev_gray = gray
        if (i & 0xFFFF) == 0:
            W = 0.0
            S = 0.0
            for j in range(n):
                if gray & ((<unsigned long long> 1) << j):
                    W += w[j]
                    S += s[j]
        if S <= 0.0:
            val = 0.0
        else:
            val = pow(W, a) * pow(S, b)
        if val > best:
            best = val
            best_mask = gray
    return best, best_mask
