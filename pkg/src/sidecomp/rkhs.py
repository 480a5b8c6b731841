"""Truncated multishift models of diagonal-kernel function spaces.

A diagonal kernel on the unit ball is determined by a positive coefficient
rule ``fhat`` on multi-indices; the associated multiplication tuple acts on
the orthonormal monomial basis as a weighted raising operator with weights
``w_i(alpha) = sqrt(fhat(alpha) / fhat(alpha + e_i))``, and its adjoint is the
weighted lowering (backward) multishift. Truncation compresses onto the span
of basis vectors of degree at most ``dmax``: forward shifts lose top-degree
mass, adjoints are exact on the grid, so identity checks are stated on the
interior (degrees below ``dmax``) where compression is invisible.

Presets: the ball kernel with coefficients ``|alpha|!/alpha!`` (the universal
row-contraction model), the weighted Bergman-type kernels
``1/(1 - <z,w>)^k`` with coefficients ``Gamma(k+|alpha|)/(alpha! Gamma(k))``,
and the flat (Hardy-like) rule ``fhat = 1``. Coefficients are evaluated
through log-gamma so large degree caps do not overflow.

Convention: mode="adjoint" is the backward multishift (the lowering tuple).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from ._linalg import frob, min_eig_hermitian, nullspace
from .policy import DEFAULT_POLICY, NumericPolicy
from .tuples import OperatorTuple, joint_kernel

MultiIndex = tuple[int, ...]


@dataclass(frozen=True)
class TruncationGrid:
    """Graded enumeration of all multi-indices with |alpha| <= dmax."""

    m: int
    dmax: int
    indices: tuple[MultiIndex, ...]
    index_of: dict[MultiIndex, int] = field(repr=False)

    @classmethod
    def build(cls, m: int, dmax: int, order: str = "grlex") -> "TruncationGrid":
        """``order``: "grlex" (lexicographic within a grade) or "grevlex"
        (reversed-tuple lexicographic within a grade)."""
        if m < 1 or dmax < 0:
            raise ValueError("need m >= 1 and dmax >= 0")
        alphas = [a for a in product(range(dmax + 1), repeat=m) if sum(a) <= dmax]
        if order == "grlex":
            alphas.sort(key=lambda a: (sum(a), a))
        elif order == "grevlex":
            alphas.sort(key=lambda a: (sum(a), tuple(reversed(a))))
        else:
            raise ValueError(f"unknown enumeration order {order!r}")
        idx = {a: i for i, a in enumerate(alphas)}
        return cls(m, dmax, tuple(alphas), idx)

    @property
    def size(self) -> int:
        return len(self.indices)

    def degrees(self) -> np.ndarray:
        return np.array([sum(a) for a in self.indices])

    def interior(self) -> np.ndarray:
        """Boolean mask of basis labels of degree < dmax."""
        return self.degrees() < self.dmax


@dataclass(frozen=True)
class DiagonalKernelSpec:
    """Positive coefficient rule alpha -> fhat(alpha) defining the kernel."""

    m: int
    preset: str                                   # drury_arveson | bergman_k | hardy_like | custom
    k: float | None = None
    table: dict[MultiIndex, float] | None = None

    @classmethod
    def drury_arveson(cls, m: int) -> "DiagonalKernelSpec":
        return cls(m, "drury_arveson")

    @classmethod
    def bergman(cls, m: int, k: float) -> "DiagonalKernelSpec":
        if k <= 0:
            raise ValueError("kernel exponent must be positive")
        return cls(m, "bergman_k", k=float(k))

    @classmethod
    def hardy(cls, m: int) -> "DiagonalKernelSpec":
        return cls(m, "hardy_like")

    @classmethod
    def custom(cls, m: int, table: dict[MultiIndex, float]) -> "DiagonalKernelSpec":
        for a, v in table.items():
            if len(a) != m:
                raise ValueError(f"index {a} has wrong length")
            if not v > 0:
                raise ValueError(f"coefficient at {a} is not positive")
        return cls(m, "custom", table=dict(table))

    def log_fhat(self, alpha: MultiIndex) -> float:
        if len(alpha) != self.m or any(a < 0 for a in alpha):
            raise ValueError(f"bad multi-index {alpha}")
        n = sum(alpha)
        if self.preset == "drury_arveson":
            return math.lgamma(n + 1) - sum(math.lgamma(a + 1) for a in alpha)
        if self.preset == "bergman_k":
            return (math.lgamma(self.k + n) - math.lgamma(self.k)
                    - sum(math.lgamma(a + 1) for a in alpha))
        if self.preset == "hardy_like":
            return 0.0
        if self.preset == "custom":
            v = self.table.get(tuple(alpha))
            if v is None:
                raise ValueError(f"coefficient rule has no entry for {alpha}")
            return math.log(v)
        raise ValueError(f"unknown preset {self.preset!r}")

    def fhat(self, alpha: MultiIndex) -> float:
        return math.exp(self.log_fhat(alpha))


def multishift_weights(spec: DiagonalKernelSpec, grid: TruncationGrid) -> np.ndarray:
    """Per-direction weights w_i(alpha) = sqrt(fhat(alpha)/fhat(alpha+e_i)),
    shaped (m, grid.size). The raising action is e_alpha -> w_i(alpha)
    e_{alpha+e_i}; equivalently the lowering action takes e_{alpha+e_i} to
    w_i(alpha) e_alpha."""
    if spec.m != grid.m:
        raise ValueError("spec and grid arity disagree")
    W = np.empty((grid.m, grid.size))
    for j, a in enumerate(grid.indices):
        lf = spec.log_fhat(a)
        for i in range(grid.m):
            up = list(a)
            up[i] += 1
            W[i, j] = math.exp(0.5 * (lf - spec.log_fhat(tuple(up))))
    return W


def truncated_tuple(spec: DiagonalKernelSpec, grid: TruncationGrid,
                    mode: str = "adjoint") -> OperatorTuple:
    """Compression of the multishift tuple onto the grid.

    mode="forward": weighted raising operators, entries that would exceed the
    degree cap are dropped. mode="adjoint": exact matrix adjoint of the
    forward compression — the backward multishift, which commutes without
    boundary loss (asserted).
    """
    if mode not in ("forward", "adjoint"):
        raise ValueError(f"unknown mode {mode!r}")
    W = multishift_weights(spec, grid)
    n = grid.size
    mats = np.zeros((grid.m, n, n), dtype=complex)
    for j, a in enumerate(grid.indices):
        for i in range(grid.m):
            up = list(a)
            up[i] += 1
            tgt = grid.index_of.get(tuple(up))
            if tgt is not None:
                mats[i, tgt, j] = W[i, j]
    if mode == "adjoint":
        mats = np.conj(np.transpose(mats, (0, 2, 1)))
        worst = 0.0
        for i in range(grid.m):
            for j in range(i + 1, grid.m):
                worst = max(worst, frob(mats[i] @ mats[j] - mats[j] @ mats[i]))
        if worst > 1e-13 * max(1.0, max(frob(M) for M in mats)):
            raise AssertionError(
                f"lowering operators failed to commute exactly ({worst:.3e})"
            )
    return OperatorTuple(mats)


def joint_eigenvector(spec: DiagonalKernelSpec, grid: TruncationGrid, w,
                      tuple_adjoint: OperatorTuple | None = None):
    """Coefficients a_alpha = sqrt(fhat(alpha)) w^alpha of the joint
    eigenvector of the backward multishift at an interior point w.

    Returns (vector, relative residual of (T - w) v); the residual is purely a
    top-degree truncation effect and shrinks as dmax grows.
    """
    w = np.asarray(w, dtype=complex).reshape(-1)
    if w.shape != (grid.m,):
        raise ValueError(f"point must have {grid.m} coordinates")
    v = np.empty(grid.size, dtype=complex)
    for j, a in enumerate(grid.indices):
        mono = np.prod(np.power(w, a)) if sum(a) else 1.0 + 0j
        v[j] = math.exp(0.5 * spec.log_fhat(a)) * mono
    T = tuple_adjoint if tuple_adjoint is not None else truncated_tuple(spec, grid, "adjoint")
    resid = np.sqrt(sum(
        float(np.linalg.norm(T[i] @ v - w[i] * v) ** 2) for i in range(grid.m)
    ))
    return v, resid / float(np.linalg.norm(v))


@dataclass(frozen=True)
class DefectReport:
    defect: np.ndarray
    projection_residual: float       # || D^2 - D ||_F
    rank_one_residual: float         # || D - e0 e0* ||_F
    vacuum_index: int


def defect_operator(T: OperatorTuple, grid: TruncationGrid,
                    vacuum: MultiIndex | None = None) -> DefectReport:
    """Defect I - sum_i T_i* T_i of a backward multishift tuple.

    For the ball-kernel preset the defect equals the rank-one projection onto
    the vacuum basis vector exactly on the whole grid, because lowering then
    raising never escapes the truncation.
    """
    d = T.d
    S = sum(T[i].conj().T @ T[i] for i in range(T.m))
    D = np.eye(d) - S
    vac = grid.index_of[vacuum if vacuum is not None else (0,) * grid.m]
    E = np.zeros((d, d), dtype=complex)
    E[vac, vac] = 1.0
    return DefectReport(D, frob(D @ D - D), frob(D - E), vac)


@dataclass(frozen=True)
class PSequenceReport:
    operators: list[np.ndarray]          # P_0 ... P_nmax
    min_eigs: list[float]
    step_min_eigs: list[float]           # min eig of P_n - P_{n+1}
    vanish_max_abs: list[float]          # max |P_n e_alpha| over |alpha| < n
    psd_ok: bool
    monotone_ok: bool
    vanish_exact: bool


def p_sequence(T: OperatorTuple, grid: TruncationGrid, n_max: int,
               policy: NumericPolicy = DEFAULT_POLICY) -> PSequenceReport:
    """The positive-operator chain P_0 = I, P_{n+1} = sum_i T_i* P_n T_i.

    For a backward multishift: each P_n is PSD, the chain is nonincreasing,
    and P_n annihilates every basis vector of degree below n — exactly, by
    sparsity of the recursion.
    """
    if n_max > grid.dmax:
        raise ValueError(f"n_max {n_max} exceeds the grid degree cap {grid.dmax}")
    d = T.d
    degs = grid.degrees()
    ops = [np.eye(d, dtype=complex)]
    for _ in range(n_max):
        P = ops[-1]
        ops.append(sum(T[i].conj().T @ P @ T[i] for i in range(T.m)))
    min_eigs = [min_eig_hermitian(P) for P in ops]
    steps = [min_eig_hermitian(ops[n] - ops[n + 1]) for n in range(n_max)]
    vanish = []
    for n, P in enumerate(ops):
        cols = np.where(degs < n)[0]
        vanish.append(float(np.abs(P[:, cols]).max()) if cols.size else 0.0)
    return PSequenceReport(
        ops, min_eigs, steps, vanish,
        psd_ok=all(e >= -policy.psd_tol for e in min_eigs),
        monotone_ok=all(e >= -policy.psd_tol for e in steps),
        vanish_exact=all(v == 0.0 for v in vanish),
    )


def p_sequence_closed_form(T: OperatorTuple, grid: TruncationGrid, n: int) -> np.ndarray:
    """Independent evaluation P_n = sum_{|beta|=n} (n choose beta) (T^beta)* T^beta
    with exact integer multinomials (cross-check for the recursion)."""
    d = T.d
    out = np.zeros((d, d), dtype=complex)
    for beta in product(range(n + 1), repeat=T.m):
        if sum(beta) != n:
            continue
        coef = math.factorial(n)
        for b in beta:
            coef //= math.factorial(b)
        word = np.eye(d, dtype=complex)
        for i, b in enumerate(beta):
            for _ in range(b):
                word = T[i] @ word
        out += coef * (word.conj().T @ word)
    return out


def spherical_shift(grid: TruncationGrid) -> OperatorTuple:
    """The raising tuple V_i e_alpha = sqrt((alpha_i+1)/(|alpha|+m)) e_{alpha+e_i},
    compressed onto the grid. On interior labels sum_i V_i* V_i acts as the
    identity (the defining isometry identity); top-degree rows are boundary
    and the identity is not asserted there."""
    m, n = grid.m, grid.size
    mats = np.zeros((m, n, n), dtype=complex)
    for j, a in enumerate(grid.indices):
        na = sum(a)
        for i in range(m):
            up = list(a)
            up[i] += 1
            tgt = grid.index_of.get(tuple(up))
            if tgt is not None:
                mats[i, tgt, j] = math.sqrt((a[i] + 1) / (na + m))
    return OperatorTuple(mats)


@dataclass(frozen=True)
class SphereReport:
    row_contraction: bool
    spherical_isometry: bool
    spherical_unitary: bool
    hypercontraction: dict[int, bool]
    isometry_residual: float
    normality_residual: float
    defect_min_eig: float


def check_sphere_conditions(T: OperatorTuple, policy: NumericPolicy = DEFAULT_POLICY,
                            n_hyper: int = 2,
                            mask: np.ndarray | None = None) -> SphereReport:
    """Evaluate the sphere-geometry predicates for a tuple.

    row contraction: sum T_i T_i* <= I; spherical isometry: sum T_i* T_i = I;
    spherical unitary: isometry with every component normal;
    n-hypercontraction: (I - sum T_i* T_i)^k PSD for k = 1..n_hyper.
    ``mask`` restricts the isometry test to a subspace (e.g. interior labels
    of a truncation, where compression is invisible).
    """
    d = T.d
    S = sum(A.conj().T @ A for A in T)
    R = sum(A @ A.conj().T for A in T)
    if mask is not None:
        idx = np.where(mask)[0]
        iso_res = frob(S[np.ix_(idx, idx)] - np.eye(idx.size)) \
            + frob(S[np.ix_(np.setdiff1d(np.arange(d), idx), idx)])
    else:
        iso_res = frob(S - np.eye(d))
    norm_res = max(frob(A @ A.conj().T - A.conj().T @ A) for A in T)
    defect = np.eye(d) - S
    hyper = {}
    power = np.eye(d, dtype=complex)
    for k in range(1, n_hyper + 1):
        power = power @ defect
        hyper[k] = min_eig_hermitian(power) >= -policy.psd_tol
    iso_ok = iso_res <= policy.commute_tol * max(1.0, math.sqrt(d))
    return SphereReport(
        row_contraction=min_eig_hermitian(np.eye(d) - R) >= -policy.psd_tol,
        spherical_isometry=iso_ok,
        spherical_unitary=iso_ok and norm_res <= policy.commute_tol * max(1.0, math.sqrt(d)),
        hypercontraction=hyper,
        isometry_residual=float(iso_res),
        normality_residual=float(norm_res),
        defect_min_eig=min_eig_hermitian(defect),
    )


@dataclass(frozen=True)
class ModelHypothesesReport:
    projection_residual: float
    projection_ok: bool
    compatibility_dim: int
    solve_max_residual: float
    solvability_ok: bool
    model_consistent: bool
    batch: int


def check_model_hypotheses(T: OperatorTuple, policy: NumericPolicy = DEFAULT_POLICY,
                           seed: int | None = None, batch: int = 32,
                           coordinate_mask: np.ndarray | None = None) -> ModelHypothesesReport:
    """Check the two dilation-model hypotheses on concrete data.

    (1) sum_i T_i* T_i is a projection (residual of S^2 - S at 1e-10);
    (2) every compatible family (x_1, ..., x_m) with T_i x_j = T_j x_i is of
    the form x_i = T_i x: probed with a seeded batch of random tuples drawn
    from the compatibility subspace, solved in least squares; the worst
    relative residual is reported and must stay below 1e-8.

    ``coordinate_mask`` (boolean, per ambient coordinate) restricts the
    compatible data to the marked coordinates in every component — for
    truncations, restricting to interior labels removes pure boundary
    artifacts that no in-grid solution can reach.
    """
    d, m = T.d, T.m
    S = sum(A.conj().T @ A for A in T)
    proj_res = frob(S @ S - S)
    proj_ok = proj_res <= 1e-10 * max(1.0, frob(S))

    rows = []
    for i in range(m):
        for j in range(i + 1, m):
            row = np.zeros((d, m * d), dtype=complex)
            row[:, j * d:(j + 1) * d] = T[i]
            row[:, i * d:(i + 1) * d] -= T[j]
            rows.append(row)
    if coordinate_mask is not None:
        off = np.where(~np.asarray(coordinate_mask, dtype=bool))[0]
        sel = np.zeros((off.size * m, m * d), dtype=complex)
        for c in range(m):
            for a, o in enumerate(off):
                sel[c * off.size + a, c * d + o] = 1.0
        rows.append(sel)
    if rows:
        compat = nullspace(np.vstack(rows), policy.rank_rtol, strict=False,
                           scale=max(1.0, max(frob(A) for A in T)))
    else:
        compat = np.eye(m * d, dtype=complex)
    K = compat.shape[1]

    rng = np.random.default_rng(policy.seed if seed is None else seed)
    A_stack = np.vstack([T[i] for i in range(m)])
    worst = 0.0
    for _ in range(batch if K else 0):
        c = rng.standard_normal(K) + 1j * rng.standard_normal(K)
        b = compat @ c
        nb = float(np.linalg.norm(b))
        if nb == 0.0:
            continue
        x, *_ = np.linalg.lstsq(A_stack, b, rcond=None)
        worst = max(worst, float(np.linalg.norm(A_stack @ x - b)) / nb)
    solv_ok = worst <= 1e-8
    return ModelHypothesesReport(
        float(proj_res), bool(proj_ok), int(K), float(worst), bool(solv_ok),
        bool(proj_ok and solv_ok), batch,
    )


@dataclass(frozen=True)
class GammaSample:
    point: np.ndarray
    symbol: np.ndarray               # kernel_dim x kernel_dim, scalar when 1x1
    kernel_dim: int
    invariance_residual: float


@dataclass(frozen=True)
class GammaTransformReport:
    samples: list[GammaSample]
    skipped: list[np.ndarray]        # points with empty joint kernel
    contraction_ok: bool
    operator_norm: float


def gamma_transform(T: OperatorTuple, A: np.ndarray, points,
                    policy: NumericPolicy = DEFAULT_POLICY) -> GammaTransformReport:
    """Sample the symbol of a commutant element on joint kernels.

    For each point w the action of A on ker(T - w) is expressed in an
    orthonormal kernel basis; A must commute with the tuple (checked), which
    makes the kernel invariant. The compression never exceeds the operator
    norm of A, which is verified per sample.
    """
    A = np.asarray(A, dtype=complex)
    for i in range(T.m):
        if frob(A @ T[i] - T[i] @ A) > policy.commute_tol * max(1.0, frob(A) * frob(T[i])):
            raise ValueError("symbol source does not commute with the tuple")
    nA = float(np.linalg.norm(A, 2))
    samples, skipped = [], []
    ok = True
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    for w in pts:
        kb = joint_kernel(T, w, policy)
        if kb.dimension == 0:
            skipped.append(w)
            continue
        V = kb.basis
        sym = V.conj().T @ A @ V
        inv_res = float(np.linalg.norm(A @ V - V @ sym))
        ok = ok and (np.linalg.norm(sym, 2) <= nA + 1e-8)
        samples.append(GammaSample(w, sym, kb.dimension, inv_res))
    return GammaTransformReport(samples, skipped, bool(ok), nA)
