"""Joint commutant algebras of commuting matrix tuples and their structure.

The joint commutant ``A'(T)`` of a tuple ``T`` is the unital algebra of all
matrices commuting with every component. This module computes a
trace-orthonormal basis of ``A'(T)`` (as the common nullspace of the stacked
Sylvester maps ``X -> X T_i - T_i X``), the Jacobson radical of such an
algebra via the trace bilinear form, and the simple-block structure of the
semisimple quotient ``A/rad(A) = M_{n_1} (+) ... (+) M_{n_k}`` with lifted
block idempotents. Intertwiner spaces between two tuples and a randomized
search for invertible elements of a matrix span round out the toolkit.

Randomized steps take an explicit seed and are deterministic given
(inputs, seed); structural outputs (k and the sorted block sizes) do not
depend on the seed, which is cross-checked by re-running the splitting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._linalg import (
    cluster_eigenvalues,
    frob,
    newton_polish_idempotent,
    nullspace,
    orthonormal_range,
    rank_cut,
    spectral_projector,
    svd_robust,
    svdvals_robust,
)
from .policy import DEFAULT_POLICY, NumericPolicy, NumericalDegeneracyError
from .tuples import OperatorTuple, inflate


@dataclass(frozen=True)
class CommutantBasis:
    """Trace-orthonormal basis of a joint commutant algebra inside M_d(C)."""

    basis: np.ndarray        # (N, d, d)
    d: int
    algebra_dim: int

    def coords(self, M: np.ndarray) -> np.ndarray:
        """Coefficients of M against the basis (exact for members of the span)."""
        M = np.asarray(M, dtype=complex)
        return self.basis.conj().reshape(self.algebra_dim, -1) @ M.reshape(-1)

    def project(self, M: np.ndarray) -> np.ndarray:
        return np.tensordot(self.coords(M), self.basis, axes=(0, 0))

    def contains(self, M: np.ndarray, tol: float = 1e-8) -> bool:
        M = np.asarray(M, dtype=complex)
        return frob(M - self.project(M)) <= tol * max(1.0, frob(M))

    def element(self, coeffs: np.ndarray) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs, dtype=complex), self.basis, axes=(0, 0))


def _sylvester_stack(T: OperatorTuple, S: OperatorTuple) -> np.ndarray:
    """Matrix of (X -> stacked X T_i - S_i X) on row-major vec(X), X: dS x dT."""
    dT, dS = T.d, S.d
    blocks = []
    for i in range(T.m):
        blocks.append(np.kron(np.eye(dS), T[i].T) - np.kron(S[i], np.eye(dT)))
    return np.vstack(blocks)


def joint_commutant(T: OperatorTuple, policy: NumericPolicy = DEFAULT_POLICY) -> CommutantBasis:
    """Trace-orthonormal basis of A'(T) = {X : X T_i = T_i X for all i}.

    Always contains the identity; this is asserted after the nullspace
    computation as a cheap sanity check on the rank decision.
    """
    d = T.d
    L = _sylvester_stack(T, T)
    scale = max(1.0, max(frob(A) for A in T))
    # severely oblique tuples squeeze genuinely nonzero singular values toward
    # the default threshold; if the identity fails to land in the computed
    # span, retry with tightened thresholds (true zeros sit at ~1e-13 rel)
    for rtol in (policy.rank_rtol, policy.rank_rtol * 1e-2, policy.rank_rtol * 1e-3):
        ns = nullspace(L, rtol, strict=False, scale=scale, rank_dim=d)
        basis = ns.T.reshape(-1, d, d)
        cb = CommutantBasis(np.ascontiguousarray(basis), d, basis.shape[0])
        if cb.contains(np.eye(d), tol=1e-8):
            return cb
    raise NumericalDegeneracyError(
        "identity not contained in the computed commutant span; "
        "rank threshold is unreliable for this input"
    )


def intertwiner_space(T: OperatorTuple, S: OperatorTuple,
                      policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Orthonormal basis (K, dS, dT) of {X : X T_i = S_i X for all i}.

    Rectangular spaces are allowed; an empty first axis means the only
    intertwiner is zero.
    """
    if T.m != S.m:
        raise ValueError(f"arity mismatch: {T.m} vs {S.m}")
    scale = max(1.0, max(frob(A) for A in T), max(frob(B) for B in S))
    ns = nullspace(_sylvester_stack(T, S), policy.rank_rtol, strict=False,
                   scale=scale, rank_dim=max(T.d, S.d))
    return np.ascontiguousarray(ns.T.reshape(-1, S.d, T.d))


@dataclass(frozen=True)
class InvertibleSearch:
    element: np.ndarray | None
    trials_used: int
    max_rank: int
    generic_rank: int
    size: int

    @property
    def found(self) -> bool:
        return self.element is not None

    @property
    def rank_deficient(self) -> bool:
        """True when generic combinations are singular: a certificate that the
        span contains no invertible element."""
        return self.generic_rank < self.size


def contains_invertible(space: np.ndarray, policy: NumericPolicy = DEFAULT_POLICY,
                        seed: int | None = None, trials: int = 64) -> InvertibleSearch:
    """Search a matrix span for an invertible element by seeded random combos.

    Accepts the first trial whose sigma_min exceeds inv_tol * sigma_max. On
    failure the maximum achieved rank is reported together with the rank of
    generic combinations (8 extra draws); a deficient generic rank certifies
    that no invertible element exists in the span.
    """
    space = np.asarray(space, dtype=complex)
    if space.ndim == 2:
        space = space[None]
    K = space.shape[0]
    if K == 0 or space.shape[1] != space.shape[2]:
        n = space.shape[2] if space.size else 0
        return InvertibleSearch(None, 0, 0, 0, n)
    n = space.shape[1]
    rng = np.random.default_rng(policy.seed if seed is None else seed)
    max_rank = 0
    element = None
    used = 0
    for t in range(trials):
        c = rng.standard_normal(K) + 1j * rng.standard_normal(K)
        M = np.tensordot(c, space, axes=(0, 0))
        s = svdvals_robust(M)
        used = t + 1
        r = int(np.sum(s > max(n * policy.rank_rtol, 1e-12) * s[0])) if s[0] > 0 else 0
        max_rank = max(max_rank, r)
        if s[0] > 0 and s[-1] > policy.inv_tol * s[0]:
            element = M
            break
    generic = 0
    for _ in range(8):
        c = rng.standard_normal(K) + 1j * rng.standard_normal(K)
        M = np.tensordot(c, space, axes=(0, 0))
        s = svdvals_robust(M)
        r = int(np.sum(s > max(n * policy.rank_rtol, 1e-12) * s[0])) if s[0] > 0 else 0
        generic = max(generic, r)
    max_rank = max(max_rank, generic)
    return InvertibleSearch(element, used, max_rank, generic, n)


@dataclass(frozen=True)
class InflationCheck:
    base_dim: int
    inflated_dim: int
    copies: int
    passed: bool


def inflation_commutant_check(T: OperatorTuple, n: int,
                              policy: NumericPolicy = DEFAULT_POLICY,
                              size_cap: int = 96) -> InflationCheck:
    """Verify dim A'(T^(n)) = n^2 dim A'(T) (matrix-algebra inflation identity)."""
    if n < 1:
        raise ValueError("need n >= 1")
    if n * T.d > size_cap:
        raise ValueError(f"inflated dimension {n * T.d} exceeds size cap {size_cap}")
    base = joint_commutant(T, policy).algebra_dim
    big = joint_commutant(inflate(T, n), policy).algebra_dim
    return InflationCheck(base, big, n, big == n * n * base)


# ---------------------------------------------------------------------------
# Structure analysis: radical and simple-block decomposition of the quotient
# ---------------------------------------------------------------------------

def _orthonormalize_mats(mats: np.ndarray, rtol: float) -> np.ndarray:
    """Trace-orthonormal basis of the span of the given matrices."""
    mats = np.asarray(mats, dtype=complex)
    K, r = mats.shape[0], mats.shape[1]
    if K == 0:
        return mats.reshape(0, r, r)
    V = mats.reshape(K, r * r)
    _, s, Vh = svd_robust(V, full_matrices=False)
    cut = int(np.sum(s > max(V.shape) * max(rtol, 1e-12) * s[0])) if s.size and s[0] > 0 else 0
    return np.ascontiguousarray(Vh[:cut].reshape(cut, r, r))


def _radical_coords(basis: np.ndarray, policy: NumericPolicy,
                    strict: bool = False) -> np.ndarray:
    """Coefficient vectors (K, nrad) of the radical of the spanned algebra.

    Uses the characteristic-zero criterion rad(A) = {x : tr(xy) = 0 for all y}:
    the radical is the nullspace of the trace bilinear Gram form. The cut sits
    at 1e-8 relative: corner bases reached through oblique lifted idempotents
    carry impurities well above roundoff. ``strict`` additionally raises when
    singular values straddle the threshold (used for caller-facing decisions
    on clean commutant bases; internal corner decisions tolerate straddle and
    rely on the integer accounting checks downstream).
    """
    K = basis.shape[0]
    if K == 0:
        return np.zeros((0, 0), dtype=complex)
    r = basis.shape[1]
    F = basis.reshape(K, r * r)
    FT = np.transpose(basis, (0, 2, 1)).reshape(K, r * r)
    G = F @ FT.T                       # G[a,b] = tr(B_a B_b)
    _, s, Vh = svd_robust(G)
    rtol = max(policy.rank_rtol, 1e-8)
    if strict:
        rank = rank_cut(s, K, rtol, scale=1.0)
    else:
        tau = K * rtol * max(float(s.max()) if s.size else 0.0, 1.0)
        rank = int(np.sum(s > tau))
    return np.ascontiguousarray(Vh[rank:].conj().T)


def radical(A: CommutantBasis, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Trace-orthonormal basis (nrad, d, d) of rad(A); elements verified nilpotent.

    Raises when the trace-form rank decision is ambiguous (singular values
    within a factor 10 of the threshold); callers may tighten the policy.
    """
    coords = _radical_coords(A.basis, policy, strict=True)
    rad = np.tensordot(coords.T, A.basis, axes=(1, 0))
    for R in rad:
        power = np.linalg.matrix_power(R, A.d)
        if frob(power) > 1e-8 * max(1.0, frob(R) ** A.d):
            raise NumericalDegeneracyError(
                "radical candidate is not nilpotent; trace-form rank decision "
                "is unreliable for this input"
            )
    return rad


def _perp_complement(coords: np.ndarray, K: int) -> np.ndarray:
    """Orthonormal basis of the orthocomplement of span(coords) in C^K."""
    if coords.size == 0:
        return np.eye(K, dtype=complex)
    U, s, _ = np.linalg.svd(coords, full_matrices=True)
    r = int(np.sum(s > max(coords.shape) * 1e-12 * s[0])) if s.size and s[0] > 0 else 0
    return np.ascontiguousarray(U[:, r:])


def _center_candidates(basis: np.ndarray, rad_coords: np.ndarray,
                       policy: NumericPolicy, rng: np.random.Generator) -> np.ndarray:
    """Coefficient vectors spanning a complement of rad inside the preimage of
    the center of A/rad(A).

    Starts from the centralizer-mod-radical of two random elements (generators
    of an ideal-closed condition, so commuting mod rad with generators implies
    commuting mod rad with products), then verifies against every basis
    element and augments the constraint set until verified.
    """
    K, r = basis.shape[0], basis.shape[1]
    Vc = basis.conj().reshape(K, r * r)

    def perp_coords(comm: np.ndarray) -> np.ndarray:
        """Quotient coordinates (radical projected out) of a stack of
        commutators, as a (K coords x stack) matrix."""
        C = Vc @ comm.reshape(-1, r * r).T
        if rad_coords.size:
            C -= rad_coords @ (rad_coords.conj().T @ C)
        return C

    def constraint_rows(g: np.ndarray) -> np.ndarray:
        comm = basis @ g - np.matmul(g[None, :, :], basis)
        return perp_coords(comm)

    def random_element() -> np.ndarray:
        c = rng.standard_normal(K) + 1j * rng.standard_normal(K)
        c /= np.linalg.norm(c)
        return np.tensordot(c, basis, axes=(0, 0))

    gens = [random_element(), random_element()]
    rows = [constraint_rows(g) for g in gens]
    for _ in range(K + 2):
        # the centrality bar is 1e-7 relative, matching the verification
        # threshold below: the radical itself is only resolved to ~1e-8 for
        # very oblique inputs, so commutator content below this level is
        # mod-radical noise, while genuine quotient commutators sit orders of
        # magnitude above it
        S = nullspace(np.vstack(rows), 1e-7, strict=False, scale=1.0, rank_dim=1)
        # verify each candidate against every basis element directly
        violated = None
        for col in range(S.shape[1]):
            z = np.tensordot(S[:, col], basis, axes=(0, 0))
            comm = np.matmul(z[None, :, :], basis) - basis @ z
            resid = np.linalg.norm(perp_coords(comm), axis=0)
            bad = np.where(resid > 1e-7)[0]
            if bad.size:
                violated = constraint_rows(basis[bad[0]])
                break
        if violated is None:
            break
        rows.append(violated)
    else:
        raise NumericalDegeneracyError("center computation did not stabilize")
    # complement of the radical inside the candidate space; directions whose
    # radical-orthogonal content sits at the mod-radical noise level are
    # alignment artifacts, so the cut matches the centrality bar
    if rad_coords.size:
        S = S - rad_coords @ (rad_coords.conj().T @ S)
    return _orthonormal_cols(S, rel_cut=1e-6)


def _orthonormal_cols(S: np.ndarray, rel_cut: float | None = None) -> np.ndarray:
    """Orthonormal basis of the column span, cut at ``rel_cut * s_max``
    (default: max(shape) * 1e-10)."""
    if S.size == 0:
        return S.reshape(S.shape[0], 0)
    if rel_cut is None:
        rel_cut = max(S.shape) * 1e-10
    U, s, _ = svd_robust(S, full_matrices=False)
    r = int(np.sum(s > rel_cut * s[0])) if s[0] > 0 else 0
    return np.ascontiguousarray(U[:, :r])


def _spectral_split(z: np.ndarray, policy: NumericPolicy) -> list[np.ndarray] | None:
    """Riesz projectors of ``z`` onto its eigenvalue clusters, self-validated.

    Eigenvalues of elements with nilpotent parts of order s scatter like
    eps^(1/s) under roundoff, so a fixed clustering gap can cut through a
    single defective cloud. The gap therefore escalates from the policy value
    until every projector of the split is numerically idempotent; cutting a
    cloud produces wildly ill-conditioned projectors, which this rejects.
    Returns None when no validated split with >= 2 parts exists.
    """
    eigs = np.linalg.eigvals(z)
    gaps = sorted({policy.eig_gap_rtol, 1e-4, 1e-3, 1e-2, 5e-2})
    for gap in gaps:
        if gap < policy.eig_gap_rtol:
            continue
        groups = cluster_eigenvalues(eigs, gap)
        if len(groups) < 2:
            break  # larger gaps only merge further
        projs = []
        for g in groups:
            P = spectral_projector(z, eigs[g])
            # genuine cluster projectors have moderate norm; cutting through a
            # defective cloud blows the norm up and wrecks idempotency
            if frob(P) > 1e4 or frob(P @ P - P) > 1e-9 * (1.0 + frob(P)):
                projs = None
                break
            projs.append(P)
        if projs is not None:
            return projs
    return None


def _split_by_random_element(sample, policy: NumericPolicy,
                             rng: np.random.Generator, attempts: int = 16,
                             good_norm: float = 300.0) -> list[np.ndarray] | None:
    """Split a corner by the best of several random elements' Riesz projectors.

    ``sample(rng)`` draws an element of the corner algebra. Splits whose worst
    projector norm is at most ``good_norm`` are accepted immediately;
    otherwise the best-conditioned split over all attempts is polished. All
    validated splits are correct (they are partitions by invariant subspaces
    of an algebra element); conditioning only affects downstream roundoff.
    """
    best: list[np.ndarray] | None = None
    best_quality = np.inf
    for _ in range(attempts):
        projs = _spectral_split(sample(rng), policy)
        if projs is None:
            continue
        quality = max(frob(P) for P in projs)
        if quality <= good_norm:
            best, best_quality = projs, quality
            break
        if quality < best_quality:
            best, best_quality = projs, quality
    if best is None:
        return None
    return [newton_polish_idempotent(P, tol=1e-13, max_iter=60) for P in best]


@dataclass(frozen=True)
class AlgebraStructure:
    """Simple-block data of A/rad(A) with block idempotents lifted into A."""

    algebra_dim: int
    radical_dim: int
    block_dims: tuple[int, ...]              # n_1 >= ... >= n_k
    central_idempotents: np.ndarray          # (k, d, d), mutually annihilating

    @property
    def k(self) -> int:
        return len(self.block_dims)


def _corner_basis(basis: np.ndarray, P: np.ndarray, U: np.ndarray) -> np.ndarray:
    """Trace-orthonormal basis of the compressed corner P A P.

    The products P B_l P are re-projected onto span(basis) before compression:
    they lie in the algebra exactly, so the projection strips the
    out-of-algebra part of the product roundoff, which otherwise corrupts the
    corner's trace-Gram rank decisions when P is very oblique.
    """
    K, r = basis.shape[0], basis.shape[1]
    prods = np.matmul(P[None, :, :], basis) @ P
    Vc = basis.conj().reshape(K, r * r)
    coords = Vc @ prods.reshape(K, r * r).T              # (K coords, K elements)
    cleaned = np.tensordot(coords.T, basis, axes=(1, 0))
    compressed = np.matmul(U.conj().T[None, :, :], cleaned) @ U
    return _orthonormalize_mats(compressed, 1e-8)


def _corner_algebra(A: CommutantBasis, tuple_ref, E: np.ndarray, U: np.ndarray,
                    policy: NumericPolicy, top: bool) -> np.ndarray:
    """Trace-orthonormal basis of the corner E A E in the compressed frame.

    With the originating tuple available the corner is recomputed as the
    commutant of the compressed restriction (an orthonormal compression, so
    the basis is as clean as a fresh nullspace); for very oblique lifted
    idempotents this avoids the eps*||E||^2 noise of forming E B E products,
    which otherwise blurs the corner's rank decisions. Without a tuple the
    corner is built from re-projected products of the parent basis.
    """
    if top:
        return A.basis
    if tuple_ref is not None:
        comp = np.stack([U.conj().T @ Ti @ U for Ti in tuple_ref])
        from .tuples import OperatorTuple
        return joint_commutant(OperatorTuple(comp), policy).basis
    return _corner_basis(A.basis, E, U)


def _split_ambient(A: CommutantBasis, tuple_ref, E: np.ndarray,
                   policy: NumericPolicy, rng: np.random.Generator,
                   depth: int = 0) -> list[tuple[np.ndarray, int]]:
    """Recursively split the corner E A E into its simple-quotient blocks.

    Returns (ambient idempotent, n) pairs, one per simple block of the
    corner's quotient, where n^2 is the block's quotient dimension.
    """
    if depth > 64:
        raise NumericalDegeneracyError("block splitting recursion exceeded depth cap")
    d = A.d
    U = np.eye(d, dtype=complex) if depth == 0 else orthonormal_range(E, policy.rank_rtol)
    W = U.conj().T @ E
    cb = _corner_algebra(A, tuple_ref, E, U, policy, top=(depth == 0))
    K = cb.shape[0]
    rad_coords = _radical_coords(cb, policy)
    q = K - rad_coords.shape[1]
    cen = _center_candidates(cb, rad_coords, policy, rng)
    kappa = cen.shape[1]
    if kappa <= 1:
        n = math.isqrt(q)
        if n * n != q:
            raise NumericalDegeneracyError(
                f"quotient of an indecomposable corner has dimension {q}, not a square"
            )
        return [(E, n)]

    def sample_central(r: np.random.Generator) -> np.ndarray:
        c = r.standard_normal(kappa) + 1j * r.standard_normal(kappa)
        c /= np.linalg.norm(c)
        return np.tensordot(cen @ c, cb, axes=(0, 0))

    projs = _split_by_random_element(sample_central, policy, rng)
    if projs is None:
        raise NumericalDegeneracyError(
            "failed to separate central spectra after 16 random draws"
        )
    out: list[tuple[np.ndarray, int]] = []
    for P in projs:
        child = newton_polish_idempotent(U @ P @ W, tol=1e-13, max_iter=60)
        out.extend(_split_ambient(A, tuple_ref, child, policy, rng, depth + 1))
    return out


def _structure_once(A: CommutantBasis, policy: NumericPolicy, seed: int,
                    tuple_ref=None) -> AlgebraStructure:
    rng = np.random.default_rng(seed)
    rad_dim = _radical_coords(A.basis, policy).shape[1]
    blocks = _split_ambient(A, tuple_ref, np.eye(A.d, dtype=complex), policy, rng)
    if sum(n * n for _, n in blocks) + rad_dim != A.algebra_dim:
        raise NumericalDegeneracyError(
            "block dimensions and radical do not account for the algebra "
            f"dimension: {[n for _, n in blocks]} + rad {rad_dim} != {A.algebra_dim}"
        )
    blocks.sort(key=lambda bn: (-bn[1], -float(np.trace(bn[0]).real)))
    idems = np.stack([newton_polish_idempotent(E, tol=1e-13, max_iter=60)
                      for E, _ in blocks])
    dims = tuple(n for _, n in blocks)
    total = np.sum(idems, axis=0)
    if frob(total - np.eye(A.d)) > 1e-8 * A.d:
        raise NumericalDegeneracyError("lifted block idempotents do not sum to the identity")
    return AlgebraStructure(A.algebra_dim, rad_dim, dims, idems)


def semisimple_structure(A: CommutantBasis, policy: NumericPolicy = DEFAULT_POLICY,
                         seed: int | None = None, check_seeds: int = 3,
                         tuple_ref=None) -> AlgebraStructure:
    """Simple-block decomposition of A/rad(A) with lifted block idempotents.

    Randomized splitting is seeded; (k, block sizes) are intrinsic and are
    cross-checked by re-running with ``check_seeds`` consecutive seeds. A
    re-run that hits an ill-conditioned random draw is retried with the next
    seed (deterministically), so a single unlucky draw does not fail the call;
    disagreeing successful runs still do. When ``A`` is the commutant of a
    known tuple, pass it as ``tuple_ref``: corner algebras are then recomputed
    from compressed restrictions, which is substantially more robust for very
    oblique inputs.
    """
    base = policy.seed if seed is None else seed
    wanted = max(1, check_seeds)
    results: list[AlgebraStructure] = []
    last_error: NumericalDegeneracyError | None = None
    attempt = 0
    while len(results) < wanted and attempt < wanted + 4:
        try:
            results.append(_structure_once(A, policy, base + attempt, tuple_ref))
        except NumericalDegeneracyError as exc:
            last_error = exc
        attempt += 1
    if not results:
        raise last_error if last_error is not None else NumericalDegeneracyError(
            "structure analysis failed")
    dims = {r.block_dims for r in results}
    if len(dims) != 1:
        raise NumericalDegeneracyError(
            f"block structure depends on the seed: {sorted(dims)}; "
            "input is numerically degenerate"
        )
    return results[0]
