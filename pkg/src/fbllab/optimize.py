"""Derivative-free coordinatewise ascent with step decay.

The objectives in this package (witness values, constraint suprema,
operator norms) are continuous, positively homogeneous, and full of
max/abs kinks, so the workhorse is a steepest coordinate perturbation
scheme over batched candidate evaluations.  All randomness comes from
the caller's seeded generators; the ascent itself is deterministic.
"""

import numpy as np


def coordinate_ascent(batch_objective, x0, step0=0.5, decay=0.5, min_step=1e-9,
                      max_rounds=200, normalize=None):
    """Maximize batch_objective over R^dim starting from x0.

    batch_objective maps an (m, dim) array to m values; -inf marks an
    invalid candidate.  Each round evaluates all +-step coordinate moves,
    takes the best strict improvement, and halves the step after a round
    with no improvement.  Returns (x, value).
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    value = float(batch_objective(x[None, :])[0])
    step = float(step0)
    dim = x.shape[0]
    rounds = 0
    while step >= min_step and rounds < max_rounds:
        rounds += 1
        cands = np.repeat(x[None, :], 2 * dim, axis=0)
        idx = np.arange(dim)
        cands[2 * idx, idx] += step
        cands[2 * idx + 1, idx] -= step
        vals = batch_objective(cands)
        best = int(np.argmax(vals))
        if vals[best] > value:
            x = cands[best]
            value = float(vals[best])
            if normalize is not None:
                x = normalize(x)
        else:
            step *= decay
    return x, value


def ratio_ascent_on_sphere(batch_fun, norm_fun, dim, rng, restarts=8,
                           max_rounds=80, step0=0.5):
    """Heuristic max of a 1-homogeneous batch_fun over the unit ball of norm_fun.

    Maximizes the scale-invariant ratio batch_fun(x)/norm_fun(x) from seeded
    random starts; the result is a certified lower bound of the supremum
    (the returned point is feasible after normalization), never an upper one.
    """
    def objective(X):
        norms = norm_fun(X)
        vals = batch_fun(X)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(norms > 1e-300, vals / norms, -np.inf)
        return out

    best_val = -np.inf
    best_x = None
    for _ in range(restarts):
        x0 = rng.standard_normal(dim)
        x, val = coordinate_ascent(objective, x0, step0=step0,
                                   max_rounds=max_rounds)
        if val > best_val:
            best_val = val
            best_x = x
    n = norm_fun(best_x[None, :])[0]
    return best_x / n, float(best_val)
