"""Renorming embeddings: the concave gauge, its supergradient, and the
contraction from the weak-Lr norm into the weak-L1 norm on reweighted atoms.

Given a positive simple function sum a_i chi_{U_i} with

    C = (sum mu(U_i))^(1/p - 1/r) * |sum a_i chi_{U_i}|_{L^r} <= 1,

set s = p'(1/r - 1/p), b_i = mu(U_i)/M, beta_i = M^(r/p-1) mu(U_i) a_i^r
and let alpha(x) = (beta.x)^(1-s) (b.x)^s.  Any vector d with
alpha(e) <= |d|_1 <= 1 and alpha(x) <= x.d makes

    S f = M^(r/p) sum_i (a_i^(r-1) b_i / d_i) f chi_{U_i}

a contraction into the weak-L1 norm over atoms of mass d_i that still sees
the simple function at size C^r.  We take d to be the supergradient of
alpha at e (closed form), for which the domination is automatic by
concavity and the Euler identity gives |d|_1 = alpha(e).
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGauge, NegativeInput, ScaleViolation
from .rng import DEFAULT_SEED, rng_for
from .seqnorm import (AtomicSpace, PExponent, WeightedFunction, weak_L1_norm,
                      weak_Lr_argmax, weak_Lr_norm)

IDENTITY_TOL = 1e-12
INEQ_TOL = 1e-9


@dataclass(frozen=True)
class AlphaGauge:
    beta: tuple
    b: tuple
    s: float

    def __post_init__(self):
        beta = tuple(float(v) for v in self.beta)
        b = tuple(float(v) for v in self.b)
        if len(beta) != len(b):
            raise ValueError("beta and b must share a length")
        if any(v < 0 for v in beta) or any(v < 0 for v in b):
            raise NegativeInput("gauge weights must be non-negative")
        if sum(beta) > 1.0 + IDENTITY_TOL or sum(b) > 1.0 + IDENTITY_TOL:
            raise ValueError("gauge weights must have l1 mass at most one")
        if not (0.0 < self.s < 1.0):
            raise ValueError("s must lie in (0, 1)")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "s", float(self.s))


def alpha(gauge, x):
    """(beta.x)^(1-s) * (b.x)^s for x >= 0; zero when either factor vanishes."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise NegativeInput("alpha is defined on the non-negative cone")
    u = float(np.dot(gauge.beta, x))
    v = float(np.dot(gauge.b, x))
    if u <= 0.0 or v <= 0.0:
        return 0.0
    return u ** (1.0 - gauge.s) * v ** gauge.s


def compute_d(gauge):
    """Supergradient of alpha at e: non-negative, |d|_1 = alpha(e), alpha <= <., d>."""
    beta = np.asarray(gauge.beta)
    b = np.asarray(gauge.b)
    s = gauge.s
    u = float(beta.sum())
    v = float(b.sum())
    if u <= 0.0 or v <= 0.0:
        raise DegenerateGauge("alpha vanishes at e; no supergradient there")
    return (1.0 - s) * u ** (-s) * v ** s * beta + s * u ** (1.0 - s) * v ** (s - 1.0) * b


def recursion_feasibility_check(gauge, d, max_entry=2):
    """Worst margin of the inductive feasibility inequalities for d.

    For every index i and all integer data x, y (supported below i, entries
    <= max_entry), scalars m <= max_entry, with z = e_i + m*e + y - x >= 0,
    the chosen d must satisfy

        sum x_j d_j + alpha(z) - m - sum y_j d_j  <=  d_i         (lower side)
        d_i  <=  m' + sum y'_j d_j - sum x'_j d_j - alpha(z')     (upper side)

    where the primed side uses e_i + x' + z' = m'*e + y'.  A non-negative
    return value means every inequality holds.
    """
    d = np.asarray(d, dtype=np.float64)
    n = d.shape[0]
    e = np.ones(n)
    worst = np.inf
    entries = range(max_entry + 1)
    for i in range(n):
        for m in entries:
            for x_tail in itertools.product(entries, repeat=i):
                x = np.zeros(n)
                x[:i] = x_tail
                for y_tail in itertools.product(entries, repeat=i):
                    y = np.zeros(n)
                    y[:i] = y_tail
                    z = np.eye(n)[i] + m * e + y - x
                    if np.all(z >= 0):
                        lower = float(x @ d) + alpha(gauge, z) - m - float(y @ d)
                        worst = min(worst, d[i] - lower)
                    zp = m * e + y - np.eye(n)[i] - x
                    if np.all(zp >= 0):
                        upper = m + float(y @ d) - float(x @ d) - alpha(gauge, zp)
                        worst = min(worst, upper - d[i])
    return worst


@dataclass(frozen=True)
class SimpleFunction:
    """Strictly positive coefficients on disjoint atoms of positive mass."""

    coefficients: tuple
    weights: tuple

    def __post_init__(self):
        a = tuple(float(v) for v in self.coefficients)
        w = tuple(float(v) for v in self.weights)
        if len(a) != len(w) or not a:
            raise ValueError("need matching non-empty coefficients and weights")
        if any(v <= 0 for v in a) or any(v <= 0 for v in w):
            raise ValueError("simple function data must be strictly positive")
        object.__setattr__(self, "coefficients", a)
        object.__setattr__(self, "weights", w)

    def as_weighted(self):
        return WeightedFunction(self.coefficients, AtomicSpace(self.weights))


@dataclass(frozen=True)
class RenormEmbedding:
    multipliers: tuple        # diagonal of S on the original atoms
    nu: AtomicSpace           # target atom masses (= d)
    C: float
    p: float
    r: float
    gauge: AlphaGauge
    source: SimpleFunction

    def apply(self, values):
        values = np.asarray(values, dtype=np.float64)
        return WeightedFunction(tuple(values * np.asarray(self.multipliers)), self.nu)

    def image_norm(self, values):
        return weak_L1_norm(self.apply(values), PExponent(self.p))

    def contraction_margin(self):
        """min over atom subsets A of nu(A) - alpha(chi_A).

        Non-negative means the per-set bound chain holds on every A, which
        certifies |S| <= 1 for all inputs, not just sampled ones.
        """
        d = self.nu.as_array()
        n = d.shape[0]
        worst = np.inf
        for mask in range(1, 1 << n):
            chi = np.array([(mask >> i) & 1 for i in range(n)], dtype=np.float64)
            worst = min(worst, float(chi @ d) - alpha(self.gauge, chi))
        return worst


def build_renorm_embedding(f, p, r):
    """Construct the contraction for a simple function with C <= 1."""
    p = PExponent(p)
    r = float(r)
    if not (1.0 < r < p.p):
        raise ValueError(f"need 1 < r < p, got r={r}, p={p.p}")
    a = np.asarray(f.coefficients)
    mu = np.asarray(f.weights)
    M = float(mu.sum())
    C = M ** (1.0 / p.p - 1.0 / r) * float((a ** r @ mu)) ** (1.0 / r)
    if C > 1.0 + IDENTITY_TOL:
        raise ScaleViolation(f"simple function has C = {C:.6f} > 1; rescale first")
    s = p.conjugate * (1.0 / r - 1.0 / p.p)
    b = mu / M
    beta = M ** (r / p.p - 1.0) * mu * a ** r
    gauge = AlphaGauge(tuple(beta), tuple(b), s)
    d = compute_d(gauge)
    mult = M ** (r / p.p) * a ** (r - 1.0) * b / d
    return RenormEmbedding(tuple(mult), AtomicSpace(tuple(d)), C, p.p, r, gauge, f)


@dataclass(frozen=True)
class FamilyTestReport:
    lower: float
    upper: float
    norm: float
    ok: bool


def isometric_family_test(g, p, r, epsilon=0.01, budget=32, seed=DEFAULT_SEED):
    """Check both halves of the isometric-embedding argument on one vector.

    upper: no constructed contraction may exceed the weak-Lr norm of g.
    lower: the witness built from the subset attaining that norm recovers at
    least (1 - epsilon)^r of it.
    """
    p = PExponent(p)
    values = np.abs(g.as_array())
    mu = g.space.as_array()
    ng = weak_Lr_norm(g, p, r)
    if ng == 0.0:
        return FamilyTestReport(0.0, 0.0, 0.0, True)
    gnorm = values / ng

    def witness_embedding(idx):
        sf = SimpleFunction(tuple(gnorm[list(idx)]), tuple(mu[list(idx)]))
        emb = build_renorm_embedding(sf, p, r)
        restricted = gnorm[list(idx)]
        return emb, float(emb.image_norm(restricted))

    _, star_idx = weak_Lr_argmax(WeightedFunction(tuple(gnorm), g.space), p, r)
    emb, lower = witness_embedding(star_idx)

    upper = lower
    rng = rng_for(seed, "family-test")
    n = values.shape[0]
    pos = [i for i in range(n) if gnorm[i] > 0]
    for _ in range(budget):
        k = int(rng.integers(1, len(pos) + 1))
        idx = tuple(sorted(rng.choice(pos, size=k, replace=False).tolist()))
        _, val = witness_embedding(idx)
        upper = max(upper, val)

    ok = (upper <= 1.0 + INEQ_TOL) and (lower >= (1.0 - epsilon) ** r - INEQ_TOL)
    return FamilyTestReport(lower * ng, upper * ng, ng, ok)
