"""Registry of finite-dimensional 1-unconditional lattices.

Each entry provides a primal norm oracle, a dual norm oracle (batched for
subset enumeration), an exact or best-effort norming functional, dual-ball
vertices when the dual ball is polyhedral, and a FiniteSpace realization.
All oracles are normalized: N(e_i) = 1.

Registered families:

* lp(p, n)      -- the lp(n) lattice, dual lq closed forms.
* weaklp(p, n)  -- weak-lp(n) under the integral norm
                   max_E |E|^(1/p-1) sum_E |x|; its unit ball is the
                   polytope spanned by the signed permutations of
                   alpha_k = k^(1/p') - (k-1)^(1/p'), and its dual norm is
                   the Lorentz l^(p',1) norm.
* X3(p)         -- R^3 normed so that the dual norm is
                   max (|b_i|^p' + (|b_j|+|b_k|)^p')^(1/p'); the canonical
                   witness that embedding constants can exceed 1.
* polytope      -- a lattice given by non-negative dual-ball vertices w_j
                   with max_j w_j[i] = 1; primal norm max_j <|x|, w_j>.
"""

import itertools
import math

import numpy as np

from .errors import DimensionMismatch
from .seqnorm import NormTag, PExponent
from .simplex import polytope_gauge
from .spaces import FiniteSpace, OracleBall


class UnconditionalLattice:
    """Base class: n, registry_id, p (natural upper-estimate exponent)."""

    def __init__(self, n, p, registry_id):
        self.n = n
        self.p = PExponent(p)
        self.registry_id = registry_id

    def norm(self, x):
        raise NotImplementedError

    def dual_norm(self, b):
        return float(self.dual_norm_rows(np.asarray(b, dtype=np.float64)[None, :])[0])

    def dual_norm_rows(self, B):
        raise NotImplementedError

    def norming_functional(self, a):
        """b >= 0 with dual norm 1 and <a, b> = norm(a), for a >= 0."""
        raise NotImplementedError

    def dual_vertices(self):
        """Vertices of the dual ball if it is polyhedral, else None."""
        return None

    def finite_space(self):
        return FiniteSpace(self.n, OracleBall(self.norm, self.registry_id))

    def __repr__(self):
        return f"<lattice {self.registry_id}>"


class LpLattice(UnconditionalLattice):
    def __init__(self, p, n):
        super().__init__(n, p, f"lp:p={p},n={n}")

    def norm(self, x):
        x = np.abs(np.asarray(x, dtype=np.float64))
        return float(np.sum(x ** self.p.p) ** (1.0 / self.p.p))

    def dual_norm_rows(self, B):
        q = self.p.conjugate
        B = np.abs(np.atleast_2d(np.asarray(B, dtype=np.float64)))
        return np.sum(B ** q, axis=1) ** (1.0 / q)

    def norming_functional(self, a):
        a = np.abs(np.asarray(a, dtype=np.float64))
        na = self.norm(a)
        if na == 0.0:
            raise ValueError("cannot norm the zero vector")
        return (a / na) ** (self.p.p - 1.0)

    def finite_space(self):
        return FiniteSpace.lq(self.p.p, self.n)


class WeakLpLattice(UnconditionalLattice):
    def __init__(self, p, n):
        super().__init__(n, p, f"weaklp:p={p},n={n}")
        self._tag = NormTag("weak-l1", p=self.p.p)

    def norm(self, x):
        return float(self._tag.evaluate_counting(np.asarray(x, dtype=np.float64)))

    def dual_norm_rows(self, B):
        # dual of the weak norm on counting atoms is the Lorentz l^(p',1) norm
        B = np.abs(np.atleast_2d(np.asarray(B, dtype=np.float64)))
        v = -np.sort(-B, axis=1)
        k = np.arange(1, B.shape[1] + 1, dtype=np.float64)
        q = self.p.conjugate
        coeff = k ** (1.0 / q) - (k - 1.0) ** (1.0 / q)
        return v @ coeff

    def norming_functional(self, a):
        a = np.abs(np.asarray(a, dtype=np.float64))
        order = np.argsort(-a, kind="stable")
        cum = np.cumsum(a[order])
        k = np.arange(1, a.shape[0] + 1, dtype=np.float64)
        vals = k ** (1.0 / self.p.p - 1.0) * cum
        kbest = int(np.argmax(vals)) + 1
        b = np.zeros_like(a)
        b[order[:kbest]] = kbest ** (1.0 / self.p.p - 1.0)
        return b

    def dual_vertices(self):
        """All functionals |E|^(1/p-1) * sign pattern on E (3^n - 1 of them)."""
        if self.n > 12:
            return None
        verts = []
        for mask in range(1, 1 << self.n):
            idx = [i for i in range(self.n) if mask >> i & 1]
            scale = len(idx) ** (1.0 / self.p.p - 1.0)
            for signs in itertools.product((-1.0, 1.0), repeat=len(idx)):
                v = np.zeros(self.n)
                for i, s in zip(idx, signs):
                    v[i] = s * scale
                verts.append(tuple(v))
        return np.asarray(verts)

    def primal_vertices(self):
        """Signed permutations of (k^(1/p') - (k-1)^(1/p'))_k span the unit ball."""
        k = np.arange(1, self.n + 1, dtype=np.float64)
        alpha = k ** (1.0 / self.p.conjugate) - (k - 1.0) ** (1.0 / self.p.conjugate)
        verts = set()
        for perm in itertools.permutations(range(self.n)):
            base = tuple(alpha[list(perm)])
            for signs in itertools.product((-1.0, 1.0), repeat=self.n):
                verts.add(tuple(s * v for s, v in zip(signs, base)))
        return np.asarray(sorted(verts))

    def finite_space(self):
        if self.n <= 5:
            return FiniteSpace.polytope(self.primal_vertices())
        return super().finite_space()


_X3_PAIRINGS = ((0, 1, 2), (1, 0, 2), (2, 0, 1))


class X3Lattice(UnconditionalLattice):
    """R^3 whose dual norm is max over i of (|b_i|^p' + (|b_j|+|b_k|)^p')^(1/p')."""

    def __init__(self, p):
        super().__init__(3, p, f"X3:p={p}")

    def dual_norm_rows(self, B):
        B = np.abs(np.atleast_2d(np.asarray(B, dtype=np.float64)))
        q = self.p.conjugate
        vals = [
            (B[:, i] ** q + (B[:, j] + B[:, k]) ** q) ** (1.0 / q)
            for (i, j, k) in _X3_PAIRINGS
        ]
        return np.max(vals, axis=0)

    def norm(self, x):
        return self._support(np.abs(np.asarray(x, dtype=np.float64)))[0]

    def norming_functional(self, a):
        return self._support(np.abs(np.asarray(a, dtype=np.float64)))[1]

    def _support(self, x):
        """max <x, b> over the dual ball, b >= 0, via SLSQP from several starts.

        The returned b is renormalized to the dual sphere, so the value is a
        feasible (lower-bound) evaluation; with the smooth three-constraint
        geometry SLSQP lands within ~1e-10 of the optimum.
        """
        from scipy.optimize import minimize

        q = self.p.conjugate
        cons = [
            {"type": "ineq",
             "fun": (lambda b, i=i, j=j, k=k:
                     1.0 - (b[i] ** q + (b[j] + b[k]) ** q))}
            for (i, j, k) in _X3_PAIRINGS
        ]
        starts = [np.full(3, (1.0 + 2.0 ** q) ** (-1.0 / q))]
        starts.extend(np.eye(3))
        for (i, j, k) in _X3_PAIRINGS:
            # per-pairing Hoelder candidate: all paired mass on the larger slot
            cand = np.zeros(3)
            big = j if x[j] >= x[k] else k
            denom = (x[i] ** self.p.p + x[big] ** self.p.p) ** (1.0 / self.p.p)
            if denom > 0:
                cand[i] = (x[i] / denom) ** (self.p.p - 1.0)
                cand[big] = (x[big] / denom) ** (self.p.p - 1.0)
                starts.append(cand)
        best_val, best_b = -np.inf, None
        for s in starts:
            res = minimize(lambda b: -float(x @ b), s, method="SLSQP",
                           bounds=[(0.0, None)] * 3, constraints=cons,
                           options={"maxiter": 200, "ftol": 1e-14})
            b = np.clip(res.x, 0.0, None)
            nb = self.dual_norm(b)
            if nb > 0:
                b = b / nb
            val = float(x @ b)
            if val > best_val:
                best_val, best_b = val, b
        return best_val, best_b


class PolytopeLattice(UnconditionalLattice):
    """Lattice given by non-negative dual-ball vertices with max_j w_j[i] = 1."""

    def __init__(self, dual_vectors, p):
        W = np.asarray(dual_vectors, dtype=np.float64)
        if W.ndim != 2:
            raise DimensionMismatch("dual vectors must form a matrix")
        if np.any(W < 0):
            raise ValueError("dual vectors must be non-negative")
        if not np.allclose(W.max(axis=0), 1.0, atol=1e-12):
            raise ValueError("basis not normalized: need max_j w_j[i] = 1")
        super().__init__(W.shape[1], p, f"polytope:n={W.shape[1]},m={W.shape[0]}")
        self._W = W
        signed = np.vstack([W, -W])
        # drop duplicates for the gauge LP
        self._signed = np.unique(signed, axis=0)

    def norm(self, x):
        x = np.abs(np.asarray(x, dtype=np.float64))
        return float(np.max(self._W @ x))

    def dual_norm_rows(self, B):
        B = np.atleast_2d(np.asarray(B, dtype=np.float64))
        return np.array([polytope_gauge(self._signed, b) for b in B])

    def norming_functional(self, a):
        a = np.abs(np.asarray(a, dtype=np.float64))
        return self._W[int(np.argmax(self._W @ a))].copy()

    def dual_vertices(self):
        return self._signed.copy()


def make_lattice(name, **params):
    name = name.lower()
    if name == "lp":
        return LpLattice(params["p"], int(params["n"]))
    if name == "weaklp":
        return WeakLpLattice(params["p"], int(params["n"]))
    if name == "x3":
        return X3Lattice(params["p"])
    raise ValueError(f"unknown lattice family {name!r}")


def parse_lattice(spec):
    """Registry ids like 'X3:p=2', 'lp:p=2,n=3', 'weaklp:p=1.5,n=4'."""
    if ":" not in spec:
        raise ValueError(f"lattice spec needs 'family:key=value,...', got {spec!r}")
    family, _, rest = spec.partition(":")
    params = {}
    for item in rest.split(","):
        key, _, value = item.partition("=")
        if not key or not value:
            raise ValueError(f"bad lattice parameter {item!r}")
        params[key.strip()] = float(value)
    return make_lattice(family.strip(), **params)


def random_upper_p_polytope(rng, n, p, extra=3):
    """A random n-dim polytope lattice with upper p-estimate constant one.

    Dual vertices are drawn inside the positive part of the dual lq ball and
    the coordinate functionals are always included, which pins N(e_i) = 1 and
    keeps the norm below the lp norm (so disjoint sums obey the p-sum bound).
    """
    q = PExponent(p).conjugate
    rows = [np.eye(n)[i] for i in range(n)]
    for _ in range(extra):
        w = np.abs(rng.standard_normal(n))
        nw = float(np.sum(w ** q) ** (1.0 / q))
        scale = rng.uniform(0.3, 1.0)
        rows.append(w / nw * scale)
    return PolytopeLattice(np.asarray(rows), p)
