"""Certified lower bounds for the free-lattice norms of finite expressions.

The norm of an expression f over a space E is the supremum of the tagged
sequence norm of (f(y_1), ..., f(y_n)) over all functional tuples whose
evaluation operator has constraint at most one on the unit ball.  The
supremum ranges over an unbounded family, so this module reports certified
lower bounds: every returned value is the recomputed value of an explicit
witness tuple.  For a single generator the bound is two-sided (the search
attains the vector norm and no witness can exceed it).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import latexpr
from .errors import DegenerateWitness, DimensionMismatch, InvalidExponent, ZeroOperator
from .optimize import coordinate_ascent, ratio_ascent_on_sphere
from .rng import DEFAULT_SEED, rng_for
from .seqnorm import NormTag, PExponent, WeightedFunction
from .spaces import FiniteSpace, LqBall, OracleBall, PolytopeBall

CONSTRAINT_FLOOR = 1e-14


def gamma_p(p):
    """Pisier's factorization constant (1 - 1/p)^(1/p - 1)."""
    if isinstance(p, PExponent):
        p = p.p
    if not (1.0 < p < math.inf):
        raise InvalidExponent(f"gamma_p needs p in (1, inf), got {p}")
    return (1.0 - 1.0 / p) ** (1.0 / p - 1.0)


@dataclass(frozen=True)
class WitnessTuple:
    """Functionals y_1..y_n plus the sequence-norm tag they are measured in."""

    functionals: tuple  # of d-tuples
    tag: NormTag

    def __post_init__(self):
        fs = tuple(tuple(float(v) for v in row) for row in self.functionals)
        if not fs:
            raise ValueError("witness tuple needs at least one functional")
        d = len(fs[0])
        if any(len(row) != d for row in fs):
            raise DimensionMismatch("witness functionals must share a dimension")
        object.__setattr__(self, "functionals", fs)

    @property
    def size(self):
        return len(self.functionals)

    @property
    def dimension(self):
        return len(self.functionals[0])

    def as_array(self):
        return np.asarray(self.functionals, dtype=np.float64)


@dataclass(frozen=True)
class SearchConfig:
    n_max: int = 6
    restarts: int = 64
    iterations: int = 80
    step0: float = 0.5
    decay: float = 0.5
    min_step: float = 1e-9
    seed: int = DEFAULT_SEED
    constraint_restarts: int = 4      # inner budget for non-polytope balls
    constraint_iterations: int = 60

    def __post_init__(self):
        if min(self.n_max, self.restarts, self.iterations) < 1:
            raise ValueError("search budgets must be positive")
        if not (0 < self.decay < 1 and 0 < self.min_step < self.step0):
            raise ValueError("bad step schedule")


@dataclass(frozen=True)
class RhoEstimate:
    """A certified lower bound: value equals the recomputed witness value."""

    value: float
    witness: WitnessTuple
    trace: tuple
    heuristic: bool


def _ball_point_max(Y_batch, E, tag, points):
    """max over the point set of the tagged norm of the evaluation vector."""
    m, n, _ = Y_batch.shape
    Z = np.abs(np.einsum("mnd,vd->mvn", Y_batch, points))
    return tag.evaluate_rows(Z.reshape(m * points.shape[0], n)).reshape(m, -1).max(axis=1)


def _constraint_rows(Y_batch, E, tag):
    """Constraint values for a batch of witness tuples (m, n, d).

    Exact (vertex maximum) for polytope balls and for single functionals
    over lq balls; otherwise the maximum over a fixed boundary cloud,
    which is a deterministic lower bound (refined later on the winner).
    """
    m, n, d = Y_batch.shape
    if isinstance(E.ball, PolytopeBall):
        return _ball_point_max(Y_batch, E, tag, E.ball.as_array())
    if n == 1 and isinstance(E.ball, LqBall):
        # a single functional's constraint is exactly its dual norm
        return np.array([E.support(Y_batch[i, 0]) for i in range(m)])
    return _ball_point_max(Y_batch, E, tag, E.boundary_cloud())


def constraint_value(W, E, cfg=None):
    """sup over the unit ball of the tagged norm of (y_1(x), ..., y_n(x)).

    Polytope balls (and single functionals over lq balls) are exact; other
    balls get the better of the boundary-cloud maximum and a seeded ascent,
    still a lower bound of the true supremum.
    """
    if W.dimension != E.dimension:
        raise DimensionMismatch("witness dimension does not match the space")
    tag = W.tag
    Yb = W.as_array()[None, :, :]
    base = float(_constraint_rows(Yb, E, tag)[0])
    if isinstance(E.ball, PolytopeBall) or (W.size == 1 and isinstance(E.ball, LqBall)):
        return base
    cfg = cfg or SearchConfig()
    Y = W.as_array()

    def fun(X):
        return tag.evaluate_rows(np.abs(X @ Y.T))

    rng = rng_for(cfg.seed, "constraint-refine")
    _, val = ratio_ascent_on_sphere(fun, E.norm_rows, E.dimension, rng,
                                    restarts=cfg.constraint_restarts,
                                    max_rounds=cfg.constraint_iterations)
    return max(base, float(val))


def witness_value(f, gens, W, E, cfg=None, _constraint=None):
    """Tagged norm of (f(y_k))_k divided by the tuple's constraint.

    By positive homogeneity this is the value of the rescaled feasible
    witness, hence always a valid lower bound for the free-lattice norm.
    """
    den = constraint_value(W, E, cfg=cfg) if _constraint is None else _constraint
    if den <= CONSTRAINT_FLOOR:
        raise DegenerateWitness("all functionals vanish on the unit ball")
    evals = latexpr.evaluate_many(f, gens, W.as_array())
    num = float(W.tag.evaluate_rows(np.abs(evals)[None, :])[0])
    return num / den


def rho_estimate(f, gens, E, tag, cfg=None):
    """Maximize the witness value over tuples of size 1..n_max.

    Seeded random restarts plus coordinatewise ascent; deterministic given
    the seed, and monotone under enlarging n_max or restarts since each
    (size, restart) pair draws its own derived stream and results merge by
    maximum.
    """
    cfg = cfg or SearchConfig()
    d = E.dimension
    heuristic = not (isinstance(E.ball, PolytopeBall))
    best_value = 0.0
    best_Y = None
    trace = []

    for size in range(1, cfg.n_max + 1):
        for restart in range(cfg.restarts):
            rng = rng_for(cfg.seed, "rho", size, restart)
            Y0 = rng.standard_normal((size, d))

            def objective(cands):
                Yb = cands.reshape(-1, size, d)
                dens = _constraint_rows(Yb, E, tag)
                evs = latexpr.evaluate_many(f, gens, Yb.reshape(-1, d))
                nums = tag.evaluate_rows(np.abs(evs).reshape(-1, size))
                with np.errstate(divide="ignore", invalid="ignore"):
                    return np.where(dens > CONSTRAINT_FLOOR, nums / dens, -np.inf)

            x, val = coordinate_ascent(objective, Y0.ravel(), step0=cfg.step0,
                                       decay=cfg.decay, min_step=cfg.min_step,
                                       max_rounds=cfg.iterations)
            if not np.isfinite(val):
                continue  # degenerate start: every candidate vanished
            if val > best_value:
                best_value = val
                best_Y = x.reshape(size, d)
                trace.append({"size": size, "restart": restart, "value": val})

    if best_Y is None:
        best_Y = np.zeros((1, d))
        best_Y[0, 0] = 1.0  # canonical witness for the zero expression
    W = WitnessTuple(tuple(map(tuple, best_Y)), tag)
    den = constraint_value(W, E, cfg=cfg)
    if den > CONSTRAINT_FLOOR:
        W = WitnessTuple(tuple(map(tuple, best_Y / den)), tag)
    value = witness_value(f, gens, W, E, cfg=cfg)
    return RhoEstimate(value, W, tuple(trace), heuristic)


def lower_bound_via_operator(f, gens, T, target_tag, target_space, E, cfg=None):
    """The norm of the expression's image under T, over the operator norm.

    The lattice-homomorphism extension of a contraction cannot expand the
    free-lattice norm, so |T^f| / |T| is a certified lower bound whenever
    the operator norm is computed exactly (polytope domain) and a heuristic
    one otherwise.
    """
    T = np.asarray(T, dtype=np.float64)
    G = gens.as_array()
    if T.shape[1] != G.shape[1]:
        raise DimensionMismatch("operator domain does not match the generators")
    if T.shape[0] != target_space.n_atoms:
        raise DimensionMismatch("operator range does not match the atom count")
    images = [T @ G[k] for k in range(G.shape[0])]
    Tf = latexpr.evaluate_image(f, images)
    num = target_tag.evaluate(WeightedFunction(tuple(Tf), target_space))

    def fun(X):
        return target_tag.evaluate_rows_on(X @ T.T, target_space)

    if isinstance(E.ball, PolytopeBall):
        op_norm = float(np.max(fun(E.ball.as_array())))
    else:
        cfg = cfg or SearchConfig()
        base = float(np.max(fun(E.boundary_cloud())))
        rng = rng_for(cfg.seed, "opnorm")
        _, refined = ratio_ascent_on_sphere(fun, E.norm_rows, E.dimension, rng,
                                            restarts=cfg.constraint_restarts,
                                            max_rounds=cfg.constraint_iterations)
        op_norm = max(base, refined)
    if op_norm <= CONSTRAINT_FLOOR:
        raise ZeroOperator("operator vanishes on the unit ball")
    return num / op_norm
