"""Certificates and obstructions for lattice embeddings into weak-Lp sums.

A certificate (a, b, d, C) witnesses that the vector a is handled by a
single coordinate map into weak-Lp with constant C: d is a probability
vector and every subset I obeys

    dual_norm(b restricted to I)^p' <= C^p' * sum_{i in I} d_i.

certificate_verify checks this exhaustively; lp_feasibility_d finds d (or
an aggregated violated constraint) by linear programming over the
2^n - 1 subset constraints; cover_obstruction turns an exact constant-
multiplicity cover into a lower bound on every admissible C; build_S makes
the certificate concrete as a diagonal operator and re-checks it by
sampling the unit ball.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from . import latexpr
from .errors import (CertificateInvalid, CoverInvalid, DimensionTooLarge,
                     PositivityViolation)
from .fblnorm import SearchConfig, lower_bound_via_operator, rho_estimate
from .rng import DEFAULT_SEED, rng_for
from .seqnorm import AtomicSpace, NormTag, PExponent, WeightedFunction, weak_L1_norm
from .simplex import max_min_slack

VERIFY_CAP = 20
LP_CAP = 15
SUBSET_TOL = 1e-9
SIMPLEX_TOL = 1e-12


def _mask_matrix(n):
    masks = np.arange(1, 1 << n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(np.float64), masks


def _subset_scan(X, b, n, d=None):
    """dual_norm(b * chi_I) for every non-empty I in mask order, chunked;
    optionally also the subset sums of d."""
    masks = np.arange(1, 1 << n, dtype=np.int64)
    duals = np.empty(masks.shape[0])
    loads = np.empty(masks.shape[0]) if d is not None else None
    cols = np.arange(n)
    chunk = 1 << 14
    for lo in range(0, masks.shape[0], chunk):
        mc = masks[lo:lo + chunk]
        Mc = ((mc[:, None] >> cols) & 1).astype(np.float64)
        duals[lo:lo + chunk] = X.dual_norm_rows(Mc * b[None, :])
        if d is not None:
            loads[lo:lo + chunk] = Mc @ d
    return masks, duals, loads


@dataclass(frozen=True)
class EmbeddingCertificate:
    a: tuple
    b: tuple
    d: tuple
    C: float
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        object.__setattr__(self, "d", tuple(float(v) for v in self.d))


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    violations: tuple          # tags like "SimplexViolation"
    worst_subset: tuple        # indices of the worst subset constraint
    worst_margin: float        # min over subsets of C^p'*sum d_I - dual^p'
    pairing: float             # <a, b>


def certificate_verify(X, cert, p=None):
    """Exhaustive check of all certificate invariants (n <= 20)."""
    n = X.n
    if n > VERIFY_CAP:
        raise DimensionTooLarge(f"verification enumerates 2^{n} subsets; cap is {VERIFY_CAP}")
    p = PExponent(p) if p is not None else X.p
    pc = p.conjugate
    a = np.asarray(cert.a, dtype=np.float64)
    b = np.asarray(cert.b, dtype=np.float64)
    d = np.asarray(cert.d, dtype=np.float64)
    violations = []
    if a.shape != (n,) or b.shape != (n,) or d.shape != (n,):
        raise DimensionTooLarge("certificate vectors must match the lattice dimension")
    if np.any(a < 0) or np.any(b < 0):
        violations.append("NegativeEntries")
    if abs(X.norm(a) - 1.0) > 1e-6:
        violations.append("NormalizationViolation")
    if np.any(d < -SIMPLEX_TOL) or abs(d.sum() - 1.0) > SIMPLEX_TOL:
        violations.append("SimplexViolation")
    pairing = float(a @ b)
    if not pairing > 1.0 - cert.epsilon:
        violations.append("PairingViolation")
    masks, duals, loads = _subset_scan(X, b, n, d)
    margins = cert.C ** pc * loads - duals ** pc
    worst = int(np.argmin(margins))
    if margins[worst] < -SUBSET_TOL:
        violations.append("SubsetViolation")
    worst_subset = tuple(i for i in range(n) if masks[worst] >> i & 1)
    return VerifyReport(not violations, tuple(violations), worst_subset,
                        float(margins[worst]), pairing)


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """Weights y over subsets with sum_I y_I chi_I <= lam * e coordinatewise
    but sum_I y_I g(I) > lam: no probability d can satisfy the system."""

    subset_weights: tuple      # ((indices, weight), ...) for the active subsets
    lam: float
    excess: float              # sum y_I g(I) - lam, strictly positive


@dataclass(frozen=True)
class LpResult:
    feasible: bool
    d: tuple
    certificate: object
    slack: float


def lp_feasibility_d(X, b, C, p=None):
    """Find d >= 0, sum d = 1 with sum_{i in I} d_i >= (dual(b chi_I)/C)^p' for all I.

    Solved exactly as max_{d in simplex} min_I (sum_I d_i - g(I)) through the
    shared simplex core; infeasibility comes back as an aggregated violated
    constraint in the style of the cover obstructions.
    """
    n = X.n
    if n > LP_CAP:
        raise DimensionTooLarge(f"the LP materializes 2^{n}-1 rows; cap is {LP_CAP}")
    p = PExponent(p) if p is not None else X.p
    pc = p.conjugate
    b = np.abs(np.asarray(b, dtype=np.float64))
    M, masks = _mask_matrix(n)
    duals = X.dual_norm_rows(M * b[None, :])
    g = (duals / float(C)) ** pc
    res = max_min_slack(M, g)
    if res.feasible:
        d = res.d
        worst = float(np.min(M @ d - g))
        if worst < -SUBSET_TOL:
            # the simplex certified feasibility but the witness drifted
            raise CertificateInvalid(f"LP witness violates a subset constraint by {-worst:.2e}")
        return LpResult(True, tuple(d), None, worst)
    active = [(tuple(i for i in range(n) if masks[j] >> i & 1), float(res.y[j]))
              for j in np.flatnonzero(res.y > 1e-12)]
    loads = M.T @ res.y
    lam = float(np.max(loads))
    excess = float(res.y @ g - lam)
    return LpResult(False, (), InfeasibilityCertificate(tuple(active), lam, excess),
                    float(res.value))


def certificate_search(X, a, C, epsilon=0.01, p=None, budget=8, seed=DEFAULT_SEED):
    """Norming functional plus the d-LP; perturbed retries on failure.

    Returns an EmbeddingCertificate or None when the budget is exhausted.
    """
    p = PExponent(p) if p is not None else X.p
    a = np.abs(np.asarray(a, dtype=np.float64))
    na = X.norm(a)
    if na <= 0:
        raise ValueError("a must be a non-zero non-negative vector")
    a = a / na
    verts = X.dual_vertices()
    if verts is not None:
        b0 = verts[int(np.argmax(verts @ a))]
    else:
        b0 = X.norming_functional(a)
    b0 = np.abs(b0)
    rng = rng_for(seed, "certificate-search", X.registry_id)
    for attempt in range(budget):
        b = b0 if attempt == 0 else np.abs(b0 + 0.05 * attempt * rng.standard_normal(X.n))
        nb = X.dual_norm(b)
        if nb <= 0:
            continue
        b = b / nb
        if not (a @ b > 1.0 - epsilon):
            continue
        result = lp_feasibility_d(X, b, C, p)
        if result.feasible:
            cert = EmbeddingCertificate(tuple(a), tuple(b), result.d, float(C), epsilon)
            if certificate_verify(X, cert, p).ok:
                return cert
    return None


@dataclass(frozen=True)
class DiagonalOperator:
    """c |-> (c_i * b_i / d_i) chi_i on the atoms of mass d_i (zero atoms dropped)."""

    kept: tuple                # original indices of the surviving atoms
    multipliers: tuple         # b_i / d_i on the kept atoms
    space: AtomicSpace
    p: float

    def apply(self, c):
        c = np.asarray(c, dtype=np.float64)
        vals = tuple(c[list(self.kept)] * np.asarray(self.multipliers))
        return WeightedFunction(vals, self.space)

    def image_norm(self, c):
        return weak_L1_norm(self.apply(c), PExponent(self.p))


@dataclass(frozen=True)
class BuildReport:
    operator: DiagonalOperator
    norm_at_a: float
    max_ball_norm: float
    samples: int
    ok: bool


def build_S(X, cert, p=None, samples=1000, seed=DEFAULT_SEED):
    """Materialize the certificate as a diagonal operator into weak-Lp.

    Verifies |S a| > 1 - eps and |S c| <= C (+tol) on seeded boundary
    samples of the unit ball; membership is tested with the primal oracle.
    """
    p = PExponent(p) if p is not None else X.p
    report = certificate_verify(X, cert, p)
    if not report.ok:
        raise CertificateInvalid(f"certificate fails verification: {report.violations}")
    a = np.asarray(cert.a)
    b = np.asarray(cert.b)
    d = np.asarray(cert.d)
    kept = tuple(int(i) for i in np.flatnonzero(d > 0))
    dropped = [i for i in range(X.n) if i not in kept]
    if any(b[i] > 0 for i in dropped):
        raise PositivityViolation("b_i > 0 on an atom with d_i = 0")
    S = DiagonalOperator(kept,
                         tuple(b[list(kept)] / d[list(kept)]),
                         AtomicSpace(tuple(d[list(kept)])), p.p)
    norm_at_a = S.image_norm(a)
    rng = rng_for(seed, "build-S", X.registry_id)
    worst = 0.0
    for _ in range(samples):
        c = rng.standard_normal(X.n)
        nc = X.norm(c)
        if nc <= 0:
            continue
        worst = max(worst, S.image_norm(c / nc))
    ok = norm_at_a > 1.0 - cert.epsilon - SUBSET_TOL and worst <= cert.C + SUBSET_TOL
    return BuildReport(S, norm_at_a, worst, samples, ok)


@dataclass(frozen=True)
class CoverObstruction:
    b: tuple
    sets: tuple
    multiplicity: int
    value: float               # lower bound on any admissible embedding constant


def cover_obstruction(X, b, covers, p=None):
    """Lower bound (sum_j dual(b chi_Ij)^p' / (l * dual(b)^p'))^(1/p').

    covers is an iterable of index collections whose indicator sum must be a
    constant multiple of the full indicator.
    """
    p = PExponent(p) if p is not None else X.p
    pc = p.conjugate
    b = np.abs(np.asarray(b, dtype=np.float64))
    sets = tuple(tuple(sorted(int(i) for i in I)) for I in covers)
    counts = np.zeros(X.n, dtype=np.int64)
    for I in sets:
        if not I or any(i < 0 or i >= X.n for i in I) or len(set(I)) != len(I):
            raise CoverInvalid(f"bad subset {I}")
        for i in I:
            counts[i] += 1
    l = int(counts[0])
    if l == 0 or np.any(counts != l):
        raise CoverInvalid(f"indicator sum {counts.tolist()} is not constant")
    nb = X.dual_norm(b)
    if nb <= 0:
        raise ValueError("b must be non-zero")
    total = 0.0
    for I in sets:
        masked = np.zeros(X.n)
        masked[list(I)] = b[list(I)]
        total += X.dual_norm(masked) ** pc
    return CoverObstruction(tuple(b), sets, l, float((total / (l * nb ** pc)) ** (1.0 / pc)))


def enumerate_covers(n, m_max=6, l_max=3):
    """All multisets of <= m_max non-empty subsets of {0..n-1} whose
    indicator sum is constant (= l <= l_max).  Exhaustive; n <= 8."""
    if n > 8:
        raise DimensionTooLarge("full cover enumeration is capped at n = 8")
    subsets = [tuple(i for i in range(n) if mask >> i & 1)
               for mask in range(1, 1 << n)]
    results = []

    def extend(start, chosen, counts, l):
        used = len(chosen)
        deficit = l - min(counts) if counts else l
        if all(c == l for c in counts):
            results.append(tuple(chosen))
            # further sets would overshoot multiplicity l
            return
        if used >= m_max or deficit > m_max - used:
            return
        for j in range(start, len(subsets)):
            I = subsets[j]
            if any(counts[i] + 1 > l for i in I):
                continue
            for i in I:
                counts[i] += 1
            chosen.append(I)
            extend(j, chosen, counts, l)
            chosen.pop()
            for i in I:
                counts[i] -= 1

    for l in range(1, l_max + 1):
        extend(0, [], [0] * n, l)
    return results


@dataclass(frozen=True)
class ObstructionSearchResult:
    best: CoverObstruction
    n_covers: int
    n_samples: int


def obstruction_search(X, p=None, samples=64, m_max=6, l_max=3, seed=DEFAULT_SEED,
                       refine_rounds=60):
    """Best cover obstruction over seeded dual-sphere samples and all covers.

    Canonical directions (uniform vector and basis vectors) are always
    included; the winning b is polished by coordinate ascent on its cover.
    """
    p = PExponent(p) if p is not None else X.p
    pc = p.conjugate
    n = X.n
    covers = enumerate_covers(n, m_max=m_max, l_max=l_max)
    cover_masks = [tuple(sum(1 << i for i in I) for I in cov) for cov in covers]
    rng = rng_for(seed, "obstruction", X.registry_id)
    cands = [np.ones(n)] + [np.eye(n)[i] for i in range(n)]
    cands += [np.abs(rng.standard_normal(n)) for _ in range(samples)]

    def value_table(b):
        _, duals, _ = _subset_scan(X, b, n)
        nb = X.dual_norm(b)
        if nb <= 0:
            return None
        gpow = duals ** pc
        return gpow, nb ** pc

    best_val, best_cov, best_b = -np.inf, None, None
    for b in cands:
        table = value_table(b)
        if table is None:
            continue
        gpow, nbp = table
        for cov, masks in zip(covers, cover_masks):
            l = sum(len(I) for I in cov) // n
            val = (sum(gpow[m - 1] for m in masks) / (l * nbp)) ** (1.0 / pc)
            if val > best_val:
                best_val, best_cov, best_b = val, cov, b

    if best_cov is not None and refine_rounds > 0:
        from .optimize import coordinate_ascent
        masks = [np.array(I) for I in best_cov]
        l = sum(len(I) for I in best_cov) // n

        def objective(B):
            B = np.abs(B)
            out = np.empty(B.shape[0])
            for i, row in enumerate(B):
                nb = X.dual_norm(row)
                if nb <= 0:
                    out[i] = -np.inf
                    continue
                tot = 0.0
                for I in masks:
                    masked = np.zeros(n)
                    masked[I] = row[I]
                    tot += X.dual_norm(masked) ** pc
                out[i] = (tot / (l * nb ** pc)) ** (1.0 / pc)
            return out

        x, val = coordinate_ascent(objective, best_b.astype(float), step0=0.25,
                                   max_rounds=refine_rounds, min_step=1e-7)
        if val > best_val:
            best_val, best_b = val, np.abs(x)

    best = cover_obstruction(X, best_b, best_cov, p)
    return ObstructionSearchResult(best, len(covers), len(cands))


@dataclass(frozen=True)
class ProbeReport:
    ratios: tuple
    max_ratio: float
    heuristic: bool            # always: both sides are lower bounds


def extension_norm_probe(X, expressions, p=None, cfg=None):
    """Ratio of the identity-extension bound to the searched free norm.

    Numerator: the tagged-X norm of (f at the coordinate functionals), i.e.
    the image of f under the extension of the identity.  Denominator: the
    searched lower bound with the weak tag.  Both sides are lower bounds,
    so the ratio is reported, not asserted.
    """
    p = PExponent(p) if p is not None else X.p
    cfg = cfg or SearchConfig(n_max=3, restarts=12, iterations=50)
    E = X.finite_space()
    gens = latexpr.GeneratorAssignment(tuple(map(tuple, np.eye(X.n))))
    tag = NormTag("weak-l1", p=p.p)
    ratios = []
    for f in expressions:
        image = latexpr.evaluate_image(f, list(np.eye(X.n)))
        num = X.norm(image)
        den = rho_estimate(f, gens, E, tag, cfg).value
        if den > 0:
            ratios.append(float(num / den))
    return ProbeReport(tuple(ratios), max(ratios) if ratios else 0.0, True)
