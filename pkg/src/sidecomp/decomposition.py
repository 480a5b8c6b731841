"""Unit strongly irreducible decompositions and their comparison.

A decomposition of a commuting tuple ``T`` is an ordered list of mutually
annihilating idempotents in the joint commutant summing to the identity;
it is strongly irreducible (SI) when every restriction ``T|_{range P_i}``
has a local commutant (no nontrivial idempotent commutes with it). This
module produces such decompositions from the commutant's block structure,
transports them through similarities, decides similarity of two blocks via
invertible intertwiners, assembles blockwise intertwiners into a global
invertible element of the commutant, and constructs the explicit alignment
words that match two decompositions given partial conjugation data.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import frob, newton_polish_idempotent, orthonormal_range
from .commutant import (
    _radical_coords,
    _split_by_random_element,
    contains_invertible,
    intertwiner_space,
    joint_commutant,
    semisimple_structure,
)
from .policy import DEFAULT_POLICY, NumericPolicy, NumericalDegeneracyError
from .tuples import OperatorTuple, check_idempotent_in_commutant, conjugate, \
    range_basis, restrict


def is_strongly_irreducible(T: OperatorTuple, policy: NumericPolicy = DEFAULT_POLICY) -> bool:
    """True iff the joint commutant of T is local.

    Decided structurally: the commutant algebra modulo its radical must be
    one-dimensional, i.e. algebra_dim = radical_dim + 1. No randomization.
    """
    A = joint_commutant(T, policy)
    nrad = _radical_coords(A.basis, policy).shape[1]
    return A.algebra_dim == nrad + 1


@dataclass(frozen=True)
class UnitDecomposition:
    """Ordered mutually annihilating idempotents in A'(T) summing to I."""

    tuple_ref: OperatorTuple
    idempotents: np.ndarray          # (n, d, d)
    si_flags: tuple[bool, ...]

    @property
    def count(self) -> int:
        return self.idempotents.shape[0]

    def validate(self, policy: NumericPolicy = DEFAULT_POLICY) -> dict:
        """Check all structural invariants; returns the residuals measured.

        Thresholds are the policy tolerances, floored at the float64 level
        attainable for the idempotents' norms (forming P^2 rounds at
        ~ d*eps*||P||^2, which exceeds an absolute 1e-8 only for extremely
        oblique inputs); raw residuals are always reported.
        """
        T, P = self.tuple_ref, self.idempotents
        n, d = P.shape[0], T.d
        eps = float(np.finfo(float).eps)
        floor = 16.0 * d * eps * max(1.0, max(frob(Pi) for Pi in P)) ** 2
        commute = max(
            frob(Pi @ A - A @ Pi) / max(1.0, frob(Pi) * frob(A))
            for Pi in P for A in T
        )
        idem = max(frob(Pi @ Pi - Pi) for Pi in P)
        annihilate = 0.0
        for a in range(n):
            for b in range(n):
                if a != b:
                    annihilate = max(annihilate, frob(P[a] @ P[b]))
        total = frob(P.sum(axis=0) - np.eye(d))
        report = {
            "commute": commute, "idempotent": idem,
            "annihilate": annihilate, "sum_identity": total,
            "float_floor": floor,
        }
        if commute > policy.commute_tol \
                or idem > max(policy.idem_tol, floor) \
                or annihilate > max(1e-6, floor) \
                or total > max(1e-8, floor):
            raise NumericalDegeneracyError(f"decomposition invariants violated: {report}")
        return report


def _refine_to_primitives(T: OperatorTuple, E: np.ndarray,
                          policy: NumericPolicy, rng: np.random.Generator,
                          depth: int = 0) -> list[np.ndarray]:
    """Split the corner of A'(T) at E into primitive idempotents.

    The corner algebra is recomputed as the commutant of the compressed
    restriction of T (clean, no oblique-product noise). A random corner
    element generically has one eigenvalue cluster per primitive summand of
    the corner's quotient; its Riesz projectors are polynomials in the
    element, hence idempotents inside the corner.
    """
    if depth > 64:
        raise NumericalDegeneracyError("primitive refinement exceeded depth cap")
    U = orthonormal_range(E, policy.rank_rtol)
    W = U.conj().T @ E
    comp = OperatorTuple(np.stack([U.conj().T @ Ti @ U for Ti in T]))
    cb = joint_commutant(comp, policy).basis
    nrad = _radical_coords(cb, policy).shape[1]
    if cb.shape[0] - nrad == 1:
        return [E]

    def sample_corner(r: np.random.Generator) -> np.ndarray:
        c = r.standard_normal(cb.shape[0]) + 1j * r.standard_normal(cb.shape[0])
        return np.tensordot(c / np.linalg.norm(c), cb, axes=(0, 0))

    projs = _split_by_random_element(sample_corner, policy, rng)
    if projs is None:
        raise NumericalDegeneracyError("failed to split a non-local corner")
    out = []
    for P in projs:
        out.extend(_refine_to_primitives(T, U @ P @ W, policy, rng, depth + 1))
    return out


def unit_si_decomposition(T: OperatorTuple, policy: NumericPolicy = DEFAULT_POLICY,
                          seed: int | None = None) -> UnitDecomposition:
    """Complete list of primitive idempotents of A'(T), ordered by
    (block of the quotient, copy within the block), Newton-polished.

    Every restriction is strongly irreducible by construction (each corner is
    local); this is re-verified per block via its corner dimensions.
    """
    base_seed = policy.seed if seed is None else seed
    A = joint_commutant(T, policy)
    struct = semisimple_structure(A, policy, seed=base_seed, tuple_ref=T)
    rng = np.random.default_rng(base_seed + 0x5EED)
    prims: list[np.ndarray] = []
    for E, n in zip(struct.central_idempotents, struct.block_dims):
        block_prims = _refine_to_primitives(T, E, policy, rng)
        if len(block_prims) != n:
            raise NumericalDegeneracyError(
                f"block refinement produced {len(block_prims)} primitives, expected {n}"
            )
        prims.extend(newton_polish_idempotent(P, tol=1e-12, max_iter=40)
                     for P in block_prims)
    idems = np.stack(prims)
    D = UnitDecomposition(T, idems, tuple(True for _ in prims))
    D.validate(policy)
    return D


def transport_decomposition(D: UnitDecomposition, X,
                            policy: NumericPolicy = DEFAULT_POLICY) -> UnitDecomposition:
    """Push a decomposition of T through X to a decomposition of X T X^-1."""
    X = np.asarray(X, dtype=complex)
    s = np.linalg.svd(X, compute_uv=False)
    if s[-1] <= policy.inv_tol * s[0]:
        raise ValueError("singular conjugator")
    Xi = np.linalg.inv(X)
    Tc = conjugate(D.tuple_ref, X, policy)
    idems = np.stack([X @ P @ Xi for P in D.idempotents])
    out = UnitDecomposition(Tc, idems, D.si_flags)
    out.validate(policy)
    return out


@dataclass(frozen=True)
class BlockSimilarityResult:
    similar: bool
    definitive: bool                    # non-similarity certified (rank data)
    intertwiner: np.ndarray | None      # restricted coordinates, rank x rank
    basis_P: np.ndarray                 # orthonormal basis of range(P)
    basis_Q: np.ndarray


def block_similarity(T: OperatorTuple, P, Q, policy: NumericPolicy = DEFAULT_POLICY,
                     seed: int | None = None) -> BlockSimilarityResult:
    """Invertible intertwiner between T|range(P) and T|range(Q), if one exists.

    A rank mismatch or a rank-deficient generic intertwiner certifies
    non-similarity; otherwise failure to find an invertible element is
    reported as non-definitive.
    """
    check_idempotent_in_commutant(T, P, policy)
    check_idempotent_in_commutant(T, Q, policy)
    UP, UQ = range_basis(P, policy), range_basis(Q, policy)
    if UP.shape[1] != UQ.shape[1]:
        return BlockSimilarityResult(False, True, None, UP, UQ)
    TP = OperatorTuple(np.stack([UP.conj().T @ A @ UP for A in T]))
    TQ = OperatorTuple(np.stack([UQ.conj().T @ A @ UQ for A in T]))
    space = intertwiner_space(TP, TQ, policy)
    if space.shape[0] == 0:
        return BlockSimilarityResult(False, True, None, UP, UQ)
    inv = contains_invertible(space, policy, seed=seed)
    if inv.found:
        return BlockSimilarityResult(True, True, inv.element, UP, UQ)
    return BlockSimilarityResult(False, inv.rank_deficient, None, UP, UQ)


def assemble_intertwiner(T: OperatorTuple, S: OperatorTuple, pairs,
                         policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Direct sum of blockwise intertwiners in ambient coordinates.

    ``pairs`` is a list of (P_i, Q_i, Xhat_i): P_i from a unit decomposition
    for T, Q_i from one for S, and Xhat_i an invertible intertwiner between
    the restricted tuples in the orthonormal range bases. The assembled
    X = sum_i U_{Q_i} Xhat_i U_{P_i}^* P_i satisfies X T_j = S_j X and is
    invertible; both are verified.
    """
    X = np.zeros((S.d, T.d), dtype=complex)
    for P, Q, Xhat in pairs:
        UP, UQ = range_basis(P, policy), range_basis(Q, policy)
        if Xhat.shape != (UQ.shape[1], UP.shape[1]):
            raise ValueError(
                f"incompatible pairing data: intertwiner shape {Xhat.shape} vs "
                f"ranks ({UQ.shape[1]}, {UP.shape[1]})"
            )
        X += UQ @ Xhat @ (UP.conj().T @ P)
    scale = max(1.0, max(frob(A) for A in T), max(frob(B) for B in S))
    resid = max(frob(X @ T[i] - S[i] @ X) for i in range(T.m)) / scale
    if resid > 1e-6:
        raise NumericalDegeneracyError(
            f"assembled map fails to intertwine the tuples (residual {resid:.3e})"
        )
    sv = np.linalg.svd(X, compute_uv=False)
    if X.shape[0] != X.shape[1] or sv[-1] <= policy.inv_tol * sv[0]:
        raise NumericalDegeneracyError("assembled map is not invertible")
    return X


def assemble_global(T: OperatorTuple, pairs,
                    policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Assemble blockwise self-intertwiners into X in GL(A'(T)) with
    X P_i X^-1 = Q_i for every supplied pair; membership and the
    idempotent transport are verified."""
    X = assemble_intertwiner(T, T, pairs, policy)
    Xi = np.linalg.inv(X)
    worst = max(frob(X @ P @ Xi - Q) for P, Q, _ in pairs)
    if worst > 1e-6 * max(1.0, max(frob(P) for P, _, _ in pairs)):
        raise NumericalDegeneracyError(
            f"assembled element does not transport the idempotents (residual {worst:.3e})"
        )
    return X


@dataclass(frozen=True)
class AlignmentResult:
    """Explicit conjugation words matching the uncovered tail of two
    decompositions, given a partial blockwise match and a global conjugator."""

    matching: dict[int, int]             # uncovered Q index -> P index
    conjugators: dict[int, np.ndarray]   # Z_r with Z_r Q_r Z_r^-1 = P_{r'}
    words: dict[int, str]                # factor strings, leftmost applied last


def align_decompositions(T: OperatorTuple, Ps, Qs, partials, Y, perm,
                         policy: NumericPolicy = DEFAULT_POLICY) -> AlignmentResult:
    """Constructive alignment of two idempotent families.

    Hypotheses (verified, 1e-6): each partial conjugator X maps P_j to Q_j by
    conjugation for its covered indices, and the global Y in GL(A'(T))
    satisfies Y^-1 P_i Y = Q_{perm[i]} for all i. For every uncovered index r
    the walk produces Z_r, an alternating word in Y and the partial
    conjugators with at most 2k+1 factors, such that Z_r Q_r Z_r^-1 is an
    uncovered P; the induced map is a bijection of the uncovered indices.

    ``partials`` is a list of (X, covered_indices); pass a single pair for the
    one-conjugator case.
    """
    Ps = [np.asarray(P, dtype=complex) for P in Ps]
    Qs = [np.asarray(Q, dtype=complex) for Q in Qs]
    n = len(Ps)
    if len(Qs) != n or len(perm) != n:
        raise ValueError("index data of mismatched lengths")
    Y = np.asarray(Y, dtype=complex)
    Yi = np.linalg.inv(Y)
    scale = max(1.0, max(frob(P) for P in Ps))

    covered: dict[int, int] = {}
    mats = []
    for s, (X, idxs) in enumerate(partials):
        X = np.asarray(X, dtype=complex)
        Xi = np.linalg.inv(X)
        mats.append((X, Xi))
        for j in idxs:
            if frob(X @ Ps[j] @ Xi - Qs[j]) > 1e-6 * scale:
                raise ValueError(f"hypothesis violated: partial {s} does not map P{j} to Q{j}")
            covered[j] = s
    for i in range(n):
        if frob(Yi @ Ps[i] @ Y - Qs[perm[i]]) > 1e-6 * scale:
            raise ValueError(f"hypothesis violated: Y does not map P{i} to Q{perm[i]}")

    perm_inv = {perm[i]: i for i in range(n)}
    uncovered = [i for i in range(n) if i not in covered]
    k = len(covered)
    matching, conjugators, words = {}, {}, {}
    for r in uncovered:
        Z = np.eye(T.d, dtype=complex)
        word: list[str] = []
        cur = r
        target = None
        for _ in range(k + 1):
            j = perm_inv[cur]            # P_j = Y Q_cur Y^-1
            Z = Y @ Z
            word.append("Y")
            if j not in covered:
                target = j
                break
            s = covered[j]
            Z = mats[s][0] @ Z           # move back to the Q side
            word.append(f"X{s + 1}" if len(partials) > 1 else "X")
            cur = j
        if target is None:
            raise NumericalDegeneracyError(
                f"alignment word for block {r} exceeded the {2 * k + 1}-factor cap"
            )
        Zi = np.linalg.inv(Z)
        if frob(Z @ Qs[r] @ Zi - Ps[target]) > 1e-6 * scale:
            raise NumericalDegeneracyError(
                f"alignment word for block {r} fails to conjugate onto P{target}"
            )
        matching[r] = target
        conjugators[r] = Z
        words[r] = " ".join(reversed(word))
    if len(set(matching.values())) != len(uncovered):
        raise NumericalDegeneracyError("alignment matching is not injective")
    return AlignmentResult(matching, conjugators, words)


@dataclass(frozen=True)
class DecompositionEquivalence:
    permutation: tuple[int, ...]     # D1 index i -> D2 index permutation[i]
    conjugator: np.ndarray           # X in GL(A'(T)) with X P_i X^-1 = Q_{perm(i)}
    residual: float


@dataclass(frozen=True)
class EquivalenceOutcome:
    equivalence: DecompositionEquivalence | None
    certificate: str | None

    @property
    def equivalent(self) -> bool:
        return self.equivalence is not None


def decompositions_equivalent(T: OperatorTuple, D1: UnitDecomposition,
                              D2: UnitDecomposition,
                              policy: NumericPolicy = DEFAULT_POLICY,
                              seed: int | None = None) -> EquivalenceOutcome:
    """Match two unit SI decompositions of the same tuple, with witness.

    Greedy bipartite matching by block similarity (valid because similarity of
    SI restrictions is an equivalence relation; ties break to the lowest
    index), then a global conjugator is assembled and verified.
    """
    if D1.count != D2.count:
        return EquivalenceOutcome(None, "count mismatch")
    n = D1.count
    used = [False] * n
    perm = [-1] * n
    pairs = []
    for i in range(n):
        for j in range(n):
            if used[j]:
                continue
            res = block_similarity(T, D1.idempotents[i], D2.idempotents[j], policy, seed)
            if res.similar:
                used[j] = True
                perm[i] = j
                pairs.append((D1.idempotents[i], D2.idempotents[j], res.intertwiner))
                break
        if perm[i] < 0:
            return EquivalenceOutcome(None, f"no similar partner for block {i}")
    X = assemble_intertwiner(T, T, pairs, policy)
    Xi = np.linalg.inv(X)
    resid = max(frob(X @ D1.idempotents[i] @ Xi - D2.idempotents[perm[i]])
                for i in range(n))
    if resid > 1e-6 * max(1.0, max(frob(P) for P in D1.idempotents)):
        raise NumericalDegeneracyError(
            f"matching exists but global assembly failed (residual {resid:.3e})"
        )
    return EquivalenceOutcome(DecompositionEquivalence(tuple(perm), X, float(resid)), None)
