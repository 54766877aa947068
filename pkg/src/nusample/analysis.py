"""Admissibility analysis of sampling sequences.

Builds the alpha vector and the fundamental-solution matrix, decides joint
n-reachability / n-observability from its determinant, quantifies the degree
of orthogonality of the sampled mode vectors, verifies the determinant
factorization identities, and provides brute-force state-space matrices as
independent rank oracles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from nusample.errors import DegenerateSamplingError, NonMinimalError
from nusample.lti import (
    EigenStructure,
    Realization,
    SystemSpec,
    check_minimality,
    evaluate_fundamental_basis,
    exp_jordan,
    real_jordan,
)

DEFAULT_ADMISSIBILITY_FACTOR = 1e-9  # |det| > factor * prod(row norms)
RANK_REL_TOL = 1e-8                  # sigma_min / sigma_max threshold for numerical rank


# ---------------------------------------------------------------------------
# sampling sequences

@dataclass(frozen=True)
class SamplingSequence:
    """Strictly increasing sampling instants, plus an optional final instant
    (needed only by the controllability-side simulation)."""

    instants: tuple[float, ...]
    final_instant: float | None = None

    def __post_init__(self):
        inst = tuple(float(t) for t in self.instants)
        object.__setattr__(self, "instants", inst)
        if not inst:
            raise DegenerateSamplingError("need at least one sampling instant")
        if not all(math.isfinite(t) for t in inst):
            raise DegenerateSamplingError("sampling instants must be finite")
        for a, b in zip(inst, inst[1:]):
            if not b > a:
                raise DegenerateSamplingError(f"instants must be strictly increasing "
                                              f"({a} !< {b})")
        if self.final_instant is not None:
            tf = float(self.final_instant)
            object.__setattr__(self, "final_instant", tf)
            if not tf > inst[-1]:
                raise DegenerateSamplingError("final instant must exceed the last "
                                              "sampling instant")

    def shifted(self, dt: float) -> "SamplingSequence":
        tf = None if self.final_instant is None else self.final_instant + dt
        return SamplingSequence(tuple(t + dt for t in self.instants), tf)


@dataclass(frozen=True)
class AlphaVector:
    alphas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if self.alphas[0] != 0.0:
            raise ValueError("alpha_0 must be zero")

    @property
    def n(self) -> int:
        return len(self.alphas)


def alphas(seq: SamplingSequence) -> AlphaVector:
    """alpha_m = t_{n-1} - t_{n-m-1}: instants enter only through differences."""
    t = seq.instants
    return AlphaVector(tuple(t[-1] - ti for ti in reversed(t)))


# ---------------------------------------------------------------------------
# fundamental matrix and joint test

@dataclass(frozen=True, eq=False)
class FundamentalMatrix:
    M: np.ndarray
    es: EigenStructure

    def __post_init__(self):
        M = np.array(self.M, dtype=float)
        M.setflags(write=False)
        object.__setattr__(self, "M", M)


def fundamental_matrix(es: EigenStructure, av: AlphaVector) -> FundamentalMatrix:
    if av.n != es.n:
        raise ValueError(f"alpha vector has {av.n} entries, system order is {es.n}")
    M = np.vstack([evaluate_fundamental_basis(es, a) for a in av.alphas])
    return FundamentalMatrix(M, es)


@dataclass(frozen=True)
class DegreeMetrics:
    normalized_gram_det: float
    min_principal_angle: float
    condition_number: float


@dataclass(frozen=True, eq=False)
class FactorizationCheck:
    lhs_ctrl: float
    rhs_ctrl: float
    lhs_obs: float
    rhs_obs: float
    N1: float
    N2: float
    M1: float
    M2: float
    det_phi: float
    ratio_ctrl: float
    ratio_obs: float


@dataclass(frozen=True, eq=False)
class AnalysisReport:
    determinant: float
    is_admissible: bool
    sigma_min: float
    condition_number: float
    threshold: float
    degree: DegreeMetrics | None = None
    factors: FactorizationCheck | None = None


def joint_test(fm: FundamentalMatrix,
               tol_factor: float = DEFAULT_ADMISSIBILITY_FACTOR) -> AnalysisReport:
    """Joint n-reachability and n-observability verdict from det[phi_i(alpha_m)].

    The admissibility threshold is Hadamard-scaled: |det| must exceed
    tol_factor times the product of the row norms.
    """
    M = fm.M
    det = float(np.linalg.det(M))
    svals = np.linalg.svd(M, compute_uv=False)
    smin, smax = float(svals[-1]), float(svals[0])
    cond = math.inf if smin == 0.0 else smax / smin
    threshold = tol_factor * float(np.prod(np.linalg.norm(M, axis=1)))
    return AnalysisReport(det, abs(det) > threshold, smin, cond, threshold)


# ---------------------------------------------------------------------------
# degree of orthogonality

def sampled_mode_vectors(spec: SystemSpec, av: AlphaVector) -> np.ndarray:
    """Columns Y_i = exp(J alpha_i) y0 in the real Jordan frame, where y0 is
    the real-basis modal coefficient vector."""
    d = spec.real_mode_vector
    return np.column_stack([exp_jordan(spec.eigen, a) @ d for a in av.alphas])


def degree_metrics_from_vectors(Y: np.ndarray) -> DegreeMetrics:
    norms = np.linalg.norm(Y, axis=0)
    if np.any(norms == 0.0):
        raise ArithmeticError("zero-norm mode vector (internal error)")
    Yn = Y / norms
    G = Yn.T @ Yn
    gram = float(np.clip(np.linalg.det(G), 0.0, 1.0))
    k = Y.shape[1]
    if k < 2:
        min_angle = math.pi / 2  # single vector: orthogonality is vacuous
    else:
        min_angle = min(math.acos(min(1.0, abs(G[i, j])))
                        for i in range(k) for j in range(i + 1, k))
    svals = np.linalg.svd(Yn, compute_uv=False)
    cond = math.inf if svals[-1] == 0.0 else float(svals[0] / svals[-1])
    return DegreeMetrics(gram, min_angle, cond)


def degree_metrics(spec: SystemSpec, av: AlphaVector) -> DegreeMetrics:
    report = check_minimality(spec)
    if not report.minimal:
        raise NonMinimalError(f"degree metrics need a minimal system; "
                              f"offending blocks {report.offending_blocks}")
    return degree_metrics_from_vectors(sampled_mode_vectors(spec, av))


# ---------------------------------------------------------------------------
# brute-force state-space oracles

def bruteforce_controllability_matrix(real: Realization,
                                      seq: SamplingSequence) -> np.ndarray:
    """[G_{n-1}, ..., G_0] with G_i = exp(A (t_n - t_i)) b."""
    if seq.final_instant is None:
        raise ValueError("the controllability matrix needs the final instant t_n")
    if real.spec is None:
        raise ValueError("realization must carry its system spec")
    n = real.n
    if len(seq.instants) != n:
        raise ValueError(f"need {n} sampling instants, got {len(seq.instants)}")
    jf = real_jordan(real.spec, real)
    cols = [jf.expA(seq.final_instant - ti) @ real.b for ti in seq.instants]
    return np.column_stack(cols[::-1])


def bruteforce_observability_matrix(real: Realization, av: AlphaVector) -> np.ndarray:
    """Rows c exp(A alpha_m)."""
    if real.spec is None:
        raise ValueError("realization must carry its system spec")
    jf = real_jordan(real.spec, real)
    return np.vstack([real.c @ jf.expA(a) for a in av.alphas])


def numerical_rank(M: np.ndarray, rel_tol: float = RANK_REL_TOL) -> int:
    svals = np.linalg.svd(M, compute_uv=False)
    if svals[0] == 0.0:
        return 0
    return int(np.sum(svals > rel_tol * svals[0]))


# ---------------------------------------------------------------------------
# factorization identities

def _factorial_factor(es: EigenStructure) -> float:
    f = 1.0
    for rt in es.roots:
        for k in range(rt.multiplicity):
            f /= math.factorial(k)
    return f


def _block_hankel_det(coeffs) -> complex:
    """Determinant of the anti-triangular Hankel matrix with first row
    (C_1, ..., C_m) and zeros below the anti-diagonal."""
    m = len(coeffs)
    H = np.zeros((m, m), dtype=complex)
    for i in range(m):
        for k in range(m):
            if i + k < m:
                H[i, k] = coeffs[i + k]
    return complex(np.linalg.det(H))


def verify_factorizations(spec: SystemSpec, av: AlphaVector) -> FactorizationCheck:
    """Check the two determinant factorizations in the real Jordan frame.

    Because the artifact works in the real fundamental basis, each identity
    holds up to a fixed nonzero constant depending only on the system;
    ratio_ctrl and ratio_obs report those constants, and they must be
    independent of the alpha vector.
    """
    report = check_minimality(spec)
    if not report.minimal:
        raise NonMinimalError("factorization identities are vacuous for "
                              f"non-minimal systems (blocks {report.offending_blocks})")
    es = spec.eigen
    Y = sampled_mode_vectors(spec, av)
    lhs_ctrl = float(np.linalg.det(Y))

    s_row = np.zeros(es.n)
    for blk in es.blocks:
        s_row[blk.offset] = 1.0
    O = np.vstack([s_row @ exp_jordan(es, a) for a in av.alphas])
    lhs_obs = float(np.linalg.det(O))

    N1 = _factorial_factor(es)
    n2 = 1.0 + 0j
    c = np.asarray(spec.modes.coeffs)
    for i in range(es.r):
        sl = es.root_slices[i]
        n2 *= _block_hankel_det(c[sl])
    if abs(n2.imag) > 1e-9 * max(1.0, abs(n2)):
        raise ArithmeticError("N2 is not real (broken conjugate structure)")
    N2 = float(n2.real)
    M1 = N1
    M2 = float(np.linalg.det(np.eye(es.n)))  # product of identity blocks

    det_phi = float(np.linalg.det(fundamental_matrix(es, av).M))
    rhs_ctrl = N1 * N2 * det_phi
    rhs_obs = M1 * M2 * det_phi
    ratio_ctrl = lhs_ctrl / rhs_ctrl if rhs_ctrl != 0.0 else math.inf
    ratio_obs = lhs_obs / rhs_obs if rhs_obs != 0.0 else math.inf
    return FactorizationCheck(lhs_ctrl, rhs_ctrl, lhs_obs, rhs_obs,
                              N1, N2, M1, M2, det_phi, ratio_ctrl, ratio_obs)


# ---------------------------------------------------------------------------
# one-call analysis

def analyze(spec: SystemSpec, seq: SamplingSequence,
            tol_factor: float = DEFAULT_ADMISSIBILITY_FACTOR,
            with_factors: bool = True) -> AnalysisReport:
    """Full analysis: joint test plus degree metrics and, when the system is
    minimal, the factorization factors."""
    av = alphas(seq)
    base = joint_test(fundamental_matrix(spec.eigen, av), tol_factor)
    degree = None
    factors = None
    if check_minimality(spec).minimal:
        degree = degree_metrics(spec, av)
        if base.is_admissible:
            factors = verify_factorizations(spec, av)
    return AnalysisReport(base.determinant, base.is_admissible, base.sigma_min,
                          base.condition_number, base.threshold, degree, factors)
