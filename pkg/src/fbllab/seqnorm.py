"""Norms on finite atomic measure spaces.

The family in play: plain lp norms, the weak-Lp quasinorm
sup_t t*mu(|h|>t)^(1/p), the integral weak norms

    sup_A mu(A)^(1/p-1/r) * (int_A |h|^r dmu)^(1/r),   1 <= r < p,

and the Lorentz l^(q,1) norm on counting atoms.  Every supremum is
evaluated exactly: by the top-k prefix formula when atom weights are
uniform (optimal there, since for fixed cardinality the largest values
maximize the integral), by exhaustive subset enumeration otherwise,
capped at 22 atoms.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionTooLarge, InvalidExponent, NonCountingMeasure
from .kernels import subset_sup_pow

ENUMERATION_CAP = 22

IDENTITY_TOL = 1e-12
INEQ_TOL = 1e-9


@dataclass(frozen=True)
class AtomicSpace:
    """A finite measure space given by strictly positive atom masses."""

    weights: tuple

    def __post_init__(self):
        ws = tuple(float(w) for w in self.weights)
        if not ws:
            raise ValueError("atomic space needs at least one atom")
        for w in ws:
            if not (w > 0.0 and math.isfinite(w)):
                raise ValueError(f"atom weights must be positive and finite, got {w}")
        object.__setattr__(self, "weights", ws)

    @classmethod
    def counting(cls, n):
        return cls((1.0,) * n)

    @property
    def n_atoms(self):
        return len(self.weights)

    @property
    def uniform(self):
        return all(w == self.weights[0] for w in self.weights)

    @property
    def counting_measure(self):
        return all(w == 1.0 for w in self.weights)

    def as_array(self):
        return np.asarray(self.weights, dtype=np.float64)


@dataclass(frozen=True)
class WeightedFunction:
    """A real vector paired with the atomic space it lives on."""

    values: tuple
    space: AtomicSpace

    def __post_init__(self):
        vs = tuple(float(v) for v in self.values)
        if len(vs) != self.space.n_atoms:
            raise ValueError("values and atom weights must have equal length")
        object.__setattr__(self, "values", vs)

    @classmethod
    def on_counting(cls, values):
        values = tuple(values)
        return cls(values, AtomicSpace.counting(len(values)))

    def as_array(self):
        return np.asarray(self.values, dtype=np.float64)


@dataclass(frozen=True)
class PExponent:
    """An exponent p in (1, inf) together with its conjugate."""

    p: float

    def __post_init__(self):
        p = self.p.p if isinstance(self.p, PExponent) else float(self.p)
        if not (1.0 < p < math.inf):
            raise InvalidExponent(f"p must lie in (1, inf), got {p}")
        object.__setattr__(self, "p", p)

    @property
    def conjugate(self):
        return self.p / (self.p - 1.0)


def decreasing_rearrangement(h):
    """(value, weight) pairs sorted by |value| descending; ties keep input order."""
    v = np.abs(h.as_array())
    w = h.space.as_array()
    order = np.argsort(-v, kind="stable")
    return [(float(v[i]), float(w[i])) for i in order]


def lp_norm(h, p):
    if p < 1.0:
        raise InvalidExponent(f"lp norm needs p >= 1, got {p}")
    v = np.abs(h.as_array())
    if not v.any():
        return 0.0
    w = h.space.as_array()
    return float(np.sum(v ** p * w) ** (1.0 / p))


def weak_quasinorm(h, p):
    """sup_{t>0} t * mu(|h| > t)^(1/p), evaluated on the rearrangement.

    On atoms the supremum equals max_k v_k * W_k^(1/p) with v the decreasing
    rearrangement and W_k the cumulative weight.
    """
    v = np.abs(h.as_array())
    if not v.any():
        return 0.0
    w = h.space.as_array()
    order = np.argsort(-v, kind="stable")
    cum = np.cumsum(w[order])
    return float(np.max(v[order] * cum ** (1.0 / p.p)))


def weak_Lr_norm(h, p, r):
    """Exact sup_A mu(A)^(1/p-1/r) (int_A |h|^r dmu)^(1/r) over atom subsets."""
    value, _ = weak_Lr_argmax(h, p, r)
    return value


def weak_Lr_argmax(h, p, r):
    """The weak-Lr supremum together with a subset of atom indices attaining it."""
    r = float(r)
    if not (1.0 <= r < p.p):
        raise InvalidExponent(f"need 1 <= r < p, got r={r}, p={p.p}")
    v = np.abs(h.as_array())
    if not v.any():
        return 0.0, ()
    w = h.space.as_array()
    a = 1.0 / p.p - 1.0 / r
    if h.space.uniform:
        order = np.argsort(-v, kind="stable")
        k = np.arange(1, v.shape[0] + 1, dtype=np.float64)
        wt = w[0]
        vals = (k * wt) ** a * (np.cumsum(v[order] ** r) * wt) ** (1.0 / r)
        best = int(np.argmax(vals))
        return float(vals[best]), tuple(int(i) for i in order[: best + 1])
    if v.shape[0] > ENUMERATION_CAP:
        raise DimensionTooLarge(
            f"non-uniform weights with {v.shape[0]} atoms exceed the cap of {ENUMERATION_CAP}")
    value, mask = subset_sup_pow(w, v ** r * w, a, 1.0 / r)
    idx = tuple(i for i in range(v.shape[0]) if mask >> i & 1)
    return float(value), idx


def weak_L1_norm(h, p):
    """sup mu(E)^(1/p-1) int_E |h| dmu; the r = 1 member of the weak family."""
    return weak_Lr_norm(h, p, 1.0)


@dataclass(frozen=True)
class SandwichReport:
    lhs: float
    mid: float
    rhs: float
    ok: bool


def sandwich_check(h, p, r):
    """Verify quasinorm <= weak-Lr norm <= (p/(p-r))^(1/r) * quasinorm."""
    lhs = weak_quasinorm(h, p)
    mid = weak_Lr_norm(h, p, r)
    rhs = (p.p / (p.p - r)) ** (1.0 / r) * lhs
    ok = lhs <= mid + INEQ_TOL and mid <= rhs + INEQ_TOL
    return SandwichReport(lhs, mid, rhs, ok)


def lorentz_q1_norm(h, q):
    """sum_k v_k (k^(1/q) - (k-1)^(1/q)) on counting atoms, v the rearrangement."""
    if q <= 1.0:
        raise InvalidExponent(f"lorentz q1 norm needs q > 1, got {q}")
    if not h.space.counting_measure:
        raise NonCountingMeasure("lorentz q1 norm is defined on counting atoms only")
    v = np.abs(h.as_array())
    if not v.any():
        return 0.0
    v = -np.sort(-v)
    k = np.arange(1, v.shape[0] + 1, dtype=np.float64)
    coeff = k ** (1.0 / q) - (k - 1.0) ** (1.0 / q)
    return float(v @ coeff)


@dataclass(frozen=True)
class NormTag:
    """Which norm of the family to apply, with its exponents.

    variant is one of "lp", "weak-quasi", "weak-l1", "weak-lr", "lorentz-q1".
    """

    variant: str
    p: float = None
    r: float = None
    q: float = None

    def __post_init__(self):
        if self.variant in ("weak-quasi", "weak-l1", "weak-lr"):
            if self.p is None:
                raise InvalidExponent(f"{self.variant} needs p")
            PExponent(self.p)
            if self.variant == "weak-lr":
                if self.r is None or not (1.0 <= self.r < self.p):
                    raise InvalidExponent("weak-lr needs 1 <= r < p")
        elif self.variant == "lp":
            if self.p is None or self.p < 1.0:
                raise InvalidExponent("lp needs p >= 1")
        elif self.variant == "lorentz-q1":
            if self.q is None or self.q <= 1.0:
                raise InvalidExponent("lorentz-q1 needs q > 1")
        else:
            raise InvalidExponent(f"unknown norm variant {self.variant!r}")

    def evaluate(self, h):
        if self.variant == "lp":
            return lp_norm(h, self.p)
        if self.variant == "weak-quasi":
            return weak_quasinorm(h, PExponent(self.p))
        if self.variant == "weak-l1":
            return weak_L1_norm(h, PExponent(self.p))
        if self.variant == "weak-lr":
            return weak_Lr_norm(h, PExponent(self.p), self.r)
        return lorentz_q1_norm(h, self.q)

    def evaluate_counting(self, values):
        """The tag norm of a plain vector over counting atoms."""
        return self.evaluate_rows(np.asarray(values, dtype=np.float64)[None, :])[0]

    def evaluate_rows(self, rows):
        """Vectorized tag norms of the rows of a 2-d array, counting measure.

        Counting atoms make every variant a closed prefix formula, so the
        whole batch is a handful of array operations.
        """
        rows = np.abs(np.asarray(rows, dtype=np.float64))
        if rows.ndim != 2:
            raise ValueError("expected a 2-d array of row vectors")
        n = rows.shape[1]
        v = -np.sort(-rows, axis=1)
        k = np.arange(1, n + 1, dtype=np.float64)
        if self.variant == "lp":
            return (rows ** self.p).sum(axis=1) ** (1.0 / self.p)
        if self.variant == "weak-quasi":
            return np.max(v * k ** (1.0 / self.p), axis=1)
        if self.variant in ("weak-l1", "weak-lr"):
            r = 1.0 if self.variant == "weak-l1" else self.r
            a = 1.0 / self.p - 1.0 / r
            return np.max(k ** a * np.cumsum(v ** r, axis=1) ** (1.0 / r), axis=1)
        coeff = k ** (1.0 / self.q) - (k - 1.0) ** (1.0 / self.q)
        return v @ coeff

    def evaluate_rows_on(self, rows, space):
        """Row-wise tag norms over an arbitrary atomic space.

        Uniform weights keep the closed prefix formulas (with the common
        mass folded in); non-uniform weights fall back to one exhaustive
        evaluation per row.
        """
        rows = np.abs(np.asarray(rows, dtype=np.float64))
        w = space.as_array()
        if space.uniform:
            wt = w[0]
            n = rows.shape[1]
            v = -np.sort(-rows, axis=1)
            k = np.arange(1, n + 1, dtype=np.float64)
            if self.variant == "lp":
                return ((rows ** self.p) @ w) ** (1.0 / self.p)
            if self.variant == "weak-quasi":
                return np.max(v * (k * wt) ** (1.0 / self.p), axis=1)
            if self.variant in ("weak-l1", "weak-lr"):
                r = 1.0 if self.variant == "weak-l1" else self.r
                a = 1.0 / self.p - 1.0 / r
                return np.max((k * wt) ** a * (wt * np.cumsum(v ** r, axis=1)) ** (1.0 / r),
                              axis=1)
            if not space.counting_measure:
                raise NonCountingMeasure("lorentz q1 norm is defined on counting atoms only")
            coeff = k ** (1.0 / self.q) - (k - 1.0) ** (1.0 / self.q)
            return v @ coeff
        return np.array([self.evaluate(WeightedFunction(tuple(row), space))
                         for row in rows])
