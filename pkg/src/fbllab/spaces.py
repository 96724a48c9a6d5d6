"""Finite-dimensional normed spaces given by their unit balls.

Three ball descriptions are supported:

* PolytopeBall -- a symmetric vertex list; support functions and convex
  maxima over the ball are exact (attained at vertices).
* LqBall -- the lq(d) ball, 1 <= q <= inf; support functions are exact
  (Hoelder), but maxima of general convex functions are heuristic.
* OracleBall -- an arbitrary norm oracle; everything is heuristic.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch


@dataclass(frozen=True)
class PolytopeBall:
    vertices: tuple  # of d-tuples, closed under negation, spanning R^d

    def __post_init__(self):
        verts = tuple(tuple(float(x) for x in v) for v in self.vertices)
        if not verts:
            raise ValueError("polytope ball needs vertices")
        object.__setattr__(self, "vertices", verts)
        V = np.asarray(verts)
        d = V.shape[1]
        for v in verts:
            neg = tuple(-x for x in v)
            if neg not in verts:
                raise ValueError("vertex list must be closed under negation")
        if np.linalg.matrix_rank(V) < d:
            raise ValueError("vertices must span the space")

    def as_array(self):
        return np.asarray(self.vertices, dtype=np.float64)


@dataclass(frozen=True)
class LqBall:
    q: float

    def __post_init__(self):
        if not (1.0 <= self.q):
            raise ValueError("lq ball needs q >= 1")
        object.__setattr__(self, "q", float(self.q))


@dataclass(frozen=True)
class OracleBall:
    """Unit ball of an arbitrary norm; `norm` maps a vector to its norm."""

    norm: object
    name: str = "oracle"


@dataclass(frozen=True)
class FiniteSpace:
    dimension: int
    ball: object = field(default=None)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if isinstance(self.ball, PolytopeBall):
            if len(self.ball.vertices[0]) != self.dimension:
                raise DimensionMismatch("vertex dimension mismatch")

    # -- constructors ---------------------------------------------------

    @classmethod
    def lq(cls, q, d):
        return cls(d, LqBall(q))

    @classmethod
    def cross_polytope(cls, d):
        """The l1(d) ball as a polytope (vertices +-e_i)."""
        eye = np.eye(d)
        verts = [tuple(row) for row in eye] + [tuple(-row) for row in eye]
        return cls(d, PolytopeBall(tuple(verts)))

    @classmethod
    def hypercube(cls, d):
        """The linf(d) ball as a polytope (all sign patterns)."""
        verts = []
        for mask in range(1 << d):
            verts.append(tuple(1.0 if mask >> i & 1 else -1.0 for i in range(d)))
        return cls(d, PolytopeBall(tuple(verts)))

    @classmethod
    def polytope(cls, vertices, symmetrize=False):
        verts = [tuple(float(x) for x in v) for v in vertices]
        if symmetrize:
            verts = verts + [tuple(-x for x in v) for v in verts]
        seen = []
        for v in verts:
            if v not in seen:
                seen.append(v)
        return cls(len(seen[0]), PolytopeBall(tuple(seen)))

    # -- geometry --------------------------------------------------------

    @property
    def exact(self):
        """Whether convex maxima over the ball are computed exactly."""
        return isinstance(self.ball, PolytopeBall)

    def norm(self, x):
        """The norm whose unit ball this is."""
        x = np.asarray(x, dtype=np.float64)
        if isinstance(self.ball, LqBall):
            q = self.ball.q
            if q == math.inf:
                return float(np.max(np.abs(x)))
            return float(np.sum(np.abs(x) ** q) ** (1.0 / q))
        if isinstance(self.ball, OracleBall):
            return float(self.ball.norm(x))
        # gauge of a polytope: smallest sum of barycentric weights; equals
        # the dual of the support function, computed by a tiny LP
        from .simplex import polytope_gauge
        return polytope_gauge(self.ball.as_array(), x)

    def support(self, y):
        """sup over the unit ball of <y, x> (the dual norm of y)."""
        y = np.asarray(y, dtype=np.float64)
        if isinstance(self.ball, PolytopeBall):
            return float(np.max(self.ball.as_array() @ y))
        if isinstance(self.ball, LqBall):
            q = self.ball.q
            if q == 1.0:
                return float(np.max(np.abs(y)))
            if q == math.inf:
                return float(np.sum(np.abs(y)))
            qc = q / (q - 1.0)
            return float(np.sum(np.abs(y) ** qc) ** (1.0 / qc))
        raise NotImplementedError("support over an oracle ball is heuristic; "
                                  "use fblnorm.ball_convex_max")

    def norm_rows(self, X):
        """Row-wise norms of a 2-d array (vectorized for lq balls)."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if isinstance(self.ball, LqBall):
            q = self.ball.q
            if q == math.inf:
                return np.max(np.abs(X), axis=1)
            return np.sum(np.abs(X) ** q, axis=1) ** (1.0 / q)
        return np.array([self.norm(x) for x in X])

    def boundary_cloud(self, count=128):
        """A fixed set of unit-sphere points for heuristic ball maxima.

        Deterministic per (ball, dimension, count): the signed basis plus
        seeded random directions normalized to the sphere.  Maxima over the
        cloud are certified lower bounds for maxima over the ball.
        """
        key = (repr(self.ball), self.dimension, count)
        cached = _CLOUD_CACHE.get(key)
        if cached is not None:
            return cached
        from .rng import rng_for
        rng = rng_for(0xC10DD, self.dimension, count)
        dirs = rng.standard_normal((count, self.dimension))
        eye = np.eye(self.dimension)
        dirs = np.vstack([eye, -eye, dirs])
        norms = self.norm_rows(dirs)
        cloud = dirs / norms[:, None]
        _CLOUD_CACHE[key] = cloud
        return cloud


_CLOUD_CACHE = {}
