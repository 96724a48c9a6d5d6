"""Pure-numpy fallback for the subset supremum kernel.

All 2^n subset sums are built by table doubling (additions only, so no
cancellation drift); for n > 16 the index is split in half and the low
table is reused across the high masks.
"""

import numpy as np

_HALF_BITS = 16


def _subset_sums(vec):
    """Array of length 2^len(vec); entry m is the sum of vec over the bits of m."""
    n = vec.shape[0]
    out = np.zeros(1 << n, dtype=np.float64)
    for j in range(n):
        half = 1 << j
        out[half:2 * half] = out[:half] + vec[j]
    return out


def subset_sup_pow(w, s, a, b):
    """Return (best value, bitmask of an attaining subset).

    Same contract as the compiled kernel: max over non-empty subsets A of
    (sum_A w)^a * (sum_A s)^b with w > 0, s >= 0.
    """
    w = np.ascontiguousarray(w, dtype=np.float64)
    s = np.ascontiguousarray(s, dtype=np.float64)
    n = w.shape[0]
    if n == 0:
        return 0.0, 0
    if n > 62:
        raise ValueError("subset enumeration capped at 62 atoms")

    n_lo = min(n, _HALF_BITS)
    w_lo, s_lo = _subset_sums(w[:n_lo]), _subset_sums(s[:n_lo])

    best = -1.0
    best_mask = 0
    n_hi = n - n_lo
    w_hi = _subset_sums(w[n_lo:]) if n_hi else np.zeros(1)
    s_hi = _subset_sums(s[n_lo:]) if n_hi else np.zeros(1)
    with np.errstate(divide="ignore", invalid="ignore"):
        for h in range(w_hi.shape[0]):
            W = w_lo + w_hi[h]
            S = s_lo + s_hi[h]
            val = np.where(S > 0.0, W ** a * S ** b, 0.0)
            if h == 0:
                val[0] = -1.0  # exclude the empty subset
            m = int(np.argmax(val))
            if val[m] > best:
                best = float(val[m])
                best_mask = (h << n_lo) | m
    return best, best_mask
