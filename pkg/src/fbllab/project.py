"""Positive projections onto disjoint lp-basis systems, and the Schreier
family computations behind the non-complementation example.

The projection pipeline: a disjoint positive system (x_n) in the sup-sum
of lp blocks, with lower lp-equivalence constant c, yields the block-mass
matrix S[gamma, n] = |x_n restricted to block gamma|_p^p.  Any simplex
weight vector alpha with S^T alpha >= c^p coordinatewise assembles
functionals

    z_n(x) = sum_gamma alpha_gamma <x(gamma), x_n(gamma)^(p-1)>

with z_n(x_l) = 0 for l != n and z_n(x_n) >= c^p, and the rank-m operator
P x = sum_n (z_n(x)/z_n(x_n)) x_n is a positive projection onto the span
with norm at most c^(-p).
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateFunctional, DimensionMismatch, DimensionTooLarge,
                     SupportOutOfRange)
from .optimize import coordinate_ascent
from .rng import DEFAULT_SEED, rng_for
from .seqnorm import NormTag, PExponent, WeightedFunction, weak_L1_norm
from .simplex import max_min_slack

SCHREIER_CAP = 24
INEQ_TOL = 1e-9


@dataclass(frozen=True)
class LpSumSpace:
    """(+_{gamma < blocks} lp(k))_inf: elements are (blocks, k) arrays."""

    blocks: int
    k: int
    p: float

    def __post_init__(self):
        if self.blocks < 1 or self.k < 1:
            raise ValueError("need at least one block and one coordinate")
        PExponent(self.p)

    def norm(self, x):
        x = self._as_element(x)
        return float(np.max(np.sum(np.abs(x) ** self.p, axis=1) ** (1.0 / self.p)))

    def _as_element(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.blocks, self.k):
            raise DimensionMismatch(f"expected shape {(self.blocks, self.k)}, got {x.shape}")
        return x


@dataclass(frozen=True)
class DisjointSystem:
    """Pairwise disjoint non-negative vectors with lower lp constant c.

    The claimed c is re-certified by seeded sampling at construction; a c
    that sampling refutes is rejected outright.
    """

    space: LpSumSpace
    vectors: tuple            # of (blocks, k) nested tuples
    c: float

    def __post_init__(self):
        vecs = tuple(tuple(tuple(float(v) for v in row) for row in vec)
                     for vec in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        arr = self.as_array()
        if arr.shape[1:] != (self.space.blocks, self.space.k):
            raise DimensionMismatch("vectors do not live in the sum space")
        if np.any(arr < 0):
            raise ValueError("system vectors must be non-negative")
        support = arr > 0
        if np.any(support.sum(axis=0) > 1):
            raise ValueError("system vectors must be pairwise disjoint")
        if not (0.0 < self.c <= 1.0):
            raise ValueError("equivalence constant must lie in (0, 1]")
        refuted = self._sampling_refutes()
        if refuted is not None:
            raise ValueError(f"claimed c = {self.c} refuted by sampling: {refuted}")

    @property
    def m(self):
        return len(self.vectors)

    def as_array(self):
        return np.asarray(self.vectors, dtype=np.float64)

    def _sampling_refutes(self, samples=1000, seed=DEFAULT_SEED):
        arr = self.as_array()
        p = self.space.p
        rng = rng_for(seed, "system-certify")
        for _ in range(samples):
            a = np.abs(rng.standard_normal(self.m)) + 1e-12
            lhs = self.space.norm(np.tensordot(a, arr, axes=1))
            na = float(np.sum(a ** p) ** (1.0 / p))
            if lhs <= self.c * na - INEQ_TOL:
                return f"|sum a_n x_n| = {lhs:.6g} < c|a|_p = {self.c * na:.6g}"
            if lhs > na + INEQ_TOL:
                return f"|sum a_n x_n| = {lhs:.6g} > |a|_p = {na:.6g}"
        return None

    def exact_lower_constant(self):
        return exact_lower_constant(self.as_array(), self.space.p)


def exact_lower_constant(vectors, p):
    """The best lower lp-equivalence constant of a disjoint system.

    For disjoint non-negative vectors the norm of sum a_n x_n is
    max_gamma (sum_n a_n^p S[gamma, n])^(1/p), so the optimal constant is
    (min over the simplex of the max block load)^(1/p) -- a tiny minimax.
    """
    arr = np.asarray(vectors, dtype=np.float64)
    S = np.sum(np.abs(arr) ** p, axis=2).T
    res = max_min_slack(-S, np.zeros(S.shape[0]))
    return float((-res.value) ** (1.0 / p))


def build_S_matrix(sys):
    """Matrix with entry (gamma, n) = |block gamma of x_n|_p^p."""
    arr = sys.as_array()
    return np.sum(np.abs(arr) ** sys.space.p, axis=2).T.copy()


@dataclass(frozen=True)
class AlphaResult:
    feasible: bool
    alpha: tuple
    witness: tuple            # on infeasibility: y >= 0 with |Sy|_inf < c^p |y|_1
    slack: float


def find_alpha(S, c, p):
    """Simplex weights alpha with S^T alpha >= c^p coordinatewise.

    Infeasibility returns the separating direction y (a distribution over
    the columns) along which the claimed constant is refuted.
    """
    S = np.asarray(S, dtype=np.float64)
    target = float(c) ** PExponent(p).p
    res = max_min_slack(S.T, np.full(S.shape[1], target))
    if res.feasible:
        return AlphaResult(True, tuple(res.d), (), float(res.value))
    return AlphaResult(False, (), tuple(res.y), float(res.value))


@dataclass(frozen=True)
class Projection:
    """P x = sum_n (z_n(x)/z_n(x_n)) x_n with positive functionals z_n."""

    system: DisjointSystem
    alpha: tuple
    functionals: tuple        # z_n as (blocks, k) arrays, flattened tuples
    diagonal: tuple           # z_n(x_n)

    def z_values(self, x):
        x = self.system.space._as_element(x)
        Z = np.asarray(self.functionals)
        return Z.reshape(len(self.diagonal), -1) @ x.ravel()

    def apply(self, x):
        coeff = self.z_values(x) / np.asarray(self.diagonal)
        return np.tensordot(coeff, self.system.as_array(), axes=1)


def build_projection(sys, alpha):
    """Assemble the functionals z_n and the rank-m projection from alpha."""
    arr = sys.as_array()
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (sys.space.blocks,):
        raise DimensionMismatch("alpha must weight the blocks")
    p = sys.space.p
    # z_n(x) = sum_gamma alpha_gamma <x(gamma), x_n(gamma)^(p-1)>
    Z = alpha[None, :, None] * arr ** (p - 1.0)
    diag = np.einsum("ngk,ngk->n", Z, arr)
    if np.any(diag <= 0):
        raise DegenerateFunctional("some z_n vanishes on its own vector")
    return Projection(sys, tuple(alpha), tuple(map(tuple, Z.reshape(sys.m, -1))),
                      tuple(diag))


@dataclass(frozen=True)
class ProjectionReport:
    positive: bool
    idempotent: bool
    fixes: bool
    norm_estimate: float
    norm_bound: float
    norm_ok: bool

    @property
    def all_ok(self):
        return self.positive and self.idempotent and self.fixes and self.norm_ok


def verify_projection(P, sys, samples=1000, seed=DEFAULT_SEED, ascent_rounds=60):
    """Positivity, idempotence, fixing, and the c^(-p) norm bound.

    The operator norm is estimated from below by sampling plus coordinate
    ascent on |Px|/|x|; the bound check allows the spec's 1e-6 headroom.
    """
    space = sys.space
    arr = sys.as_array()
    rng = rng_for(seed, "verify-projection")
    positive = True
    idempotent = True
    shape = (space.blocks, space.k)
    for _ in range(samples):
        x = np.abs(rng.standard_normal(shape))
        Px = P.apply(x)
        if np.min(Px) < -INEQ_TOL:
            positive = False
        y = rng.standard_normal(shape)
        Py = P.apply(y)
        if np.max(np.abs(P.apply(Py) - Py)) > INEQ_TOL * max(1.0, np.max(np.abs(Py))):
            idempotent = False
    fixes = all(np.max(np.abs(P.apply(arr[n]) - arr[n])) <= INEQ_TOL for n in range(sys.m))

    def ratio(X):
        out = np.empty(X.shape[0])
        for i, row in enumerate(X):
            x = row.reshape(shape)
            nx = space.norm(x)
            out[i] = space.norm(P.apply(x)) / nx if nx > 1e-300 else -np.inf
        return out

    best = 0.0
    for trial in range(8):
        x0 = rng.standard_normal(space.blocks * space.k)
        x, val = coordinate_ascent(ratio, x0, step0=0.5, max_rounds=ascent_rounds)
        best = max(best, val)
    bound = sys.c ** (-space.p)
    return ProjectionReport(positive, idempotent, fixes, best, bound,
                            best <= bound * (1.0 + 1e-6))


@dataclass(frozen=True)
class SchreierTruncation:
    n_max: int
    sets: tuple               # of ascending index tuples (1-based), lexicographic

    @property
    def count(self):
        return len(self.sets)


def schreier_sets(n_max):
    """All non-empty S subset of {1..n_max} with |S| <= min S, lexicographic."""
    if not (1 <= n_max <= SCHREIER_CAP):
        raise DimensionTooLarge(f"need 1 <= n_max <= {SCHREIER_CAP}")
    sets = []
    for first in range(1, n_max + 1):
        rest = range(first + 1, n_max + 1)
        for extra in range(0, first):
            for tail in itertools.combinations(rest, extra):
                sets.append((first,) + tail)
    sets.sort()
    return SchreierTruncation(n_max, tuple(sets))


@dataclass(frozen=True)
class SchreierCheckReport:
    upper_ok: bool
    lower_ok: bool
    ratio: float              # max_j |a chi_Sj| / |a|
    lower_value: float
    lower_threshold: float
    level_set: tuple          # the L found by the scan (empty if none)
    witness_set: tuple        # the Schreier subset used for the lower bound


def schreier_embedding_check(a, trunc, p):
    """Verify both halves of the Schreier-embedding norm estimates.

    upper: restriction to any Schreier set never beats the weak norm of a.
    lower: after rescaling a to weak norm just above one, a level-set scan
    finds L with |a_i| >= 1/(p' |L|^(1/p)) on L; the largest ceil(|L|/2)
    indices of L form a Schreier set (membership asserted, not assumed),
    and the best restriction must reach 1/(p' 2^(1/p')).
    """
    p = PExponent(p)
    a = np.asarray(a, dtype=np.float64)
    if a.shape[0] > trunc.n_max and np.any(a[trunc.n_max:] != 0):
        raise SupportOutOfRange("vector support exceeds the truncation")
    a = np.pad(a[:trunc.n_max], (0, max(0, trunc.n_max - a.shape[0])))
    tag = NormTag("weak-l1", p=p.p)
    na = float(tag.evaluate_counting(np.abs(a))) if np.any(a) else 0.0
    if na == 0.0:
        return SchreierCheckReport(True, False, 0.0, 0.0,
                                   1.0 / (p.conjugate * 2.0 ** (1.0 / p.conjugate)),
                                   (), ())

    # restriction norms over the whole truncation, grouped by set size
    vals = np.abs(a)
    restr = _restriction_norms(vals, trunc, p.p)
    ratio = float(np.max(restr)) / na

    # lower half on the rescaled vector
    scaled = vals * (1.0 + 1e-9) / na
    order = np.argsort(-scaled, kind="stable")
    v = scaled[order]
    threshold = 1.0 / (p.conjugate * 2.0 ** (1.0 / p.conjugate))
    best_val, best_L, best_S = -np.inf, (), ()
    for k in range(1, v.shape[0] + 1):
        if v[k - 1] < 1.0 / (p.conjugate * k ** (1.0 / p.p)):
            continue
        L = np.sort(order[:k] + 1)           # 1-based indices
        take = int(np.ceil(k / 2))
        S = tuple(int(i) for i in np.sort(L[-take:]))
        assert len(S) <= S[0], "constructed set left the Schreier family"
        val = float(tag.evaluate_counting(scaled[[i - 1 for i in S]]))
        if val > best_val:
            best_val, best_L, best_S = val, tuple(int(i) for i in L), S
    global_best = float(np.max(restr)) * (1.0 + 1e-9) / na
    lower_value = max(best_val, global_best)
    lower_ok = bool(best_L) and lower_value >= threshold - 1e-9
    return SchreierCheckReport(ratio <= 1.0 + 1e-9, lower_ok, ratio,
                               lower_value, threshold, best_L, best_S)


def _restriction_norms(vals, trunc, p):
    """Weak norms of a restricted to every set of the truncation (batched by size)."""
    by_size = {}
    for S in trunc.sets:
        by_size.setdefault(len(S), []).append(S)
    out = np.empty(trunc.count)
    tag = NormTag("weak-l1", p=p)
    pos = 0
    for size in sorted(by_size):
        idx = np.asarray(by_size[size], dtype=np.int64) - 1
        rows = vals[idx]
        out[pos:pos + idx.shape[0]] = tag.evaluate_rows(rows)
        pos += idx.shape[0]
    return out
