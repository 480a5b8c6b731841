"""Similarity invariants of commuting tuples and the similarity decision.

The headline invariant of a tuple ``T`` is the pair ``(k; n_1 >= ... >= n_k)``:
``k`` similarity classes of strongly irreducible blocks in a unit SI
decomposition, with class multiplicities ``n_i``. The idempotent semigroup of
the commutant is then free abelian on ``k`` generators with the identity at
``(n_1, ..., n_k)``, and its Grothendieck group has rank ``k``. Two tuples are
similar exactly when their class/multiplicity data match under blockwise
similarity of representatives; an explicit invertible intertwiner witness can
be assembled on demand.

Scope note: statements about genuinely infinite-dimensional multiplier
algebras are outside what finite truncations can certify; this module makes
no claim beyond the finite matrices it is given.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import frob
from .commutant import contains_invertible, intertwiner_space
from .decomposition import (
    UnitDecomposition,
    assemble_intertwiner,
    block_similarity,
    unit_si_decomposition,
)
from .policy import DEFAULT_POLICY, NumericPolicy, NumericalDegeneracyError
from .tuples import OperatorTuple, restrict


def _spectrum_key(T: OperatorTuple, digits: int = 6) -> tuple:
    eigs = np.linalg.eigvals(T[0])
    return tuple(sorted((round(float(z.real), digits), round(float(z.imag), digits))
                        for z in eigs))


@dataclass(frozen=True)
class SimilarityInvariant:
    """(k; n_1 >= ... >= n_k) with one restricted representative per class."""

    k: int
    multiplicities: tuple[int, ...]
    class_representatives: tuple[OperatorTuple, ...]
    class_blocks: tuple[tuple[int, ...], ...]    # indices into `decomposition`
    decomposition: UnitDecomposition

    def summary(self) -> dict:
        return {
            "k": self.k,
            "multiplicities": list(self.multiplicities),
            "class_dims": [rep.d for rep in self.class_representatives],
        }


@dataclass(frozen=True)
class K0Descriptor:
    rank: int
    order_unit: tuple[int, ...]


def _tuples_similar(A: OperatorTuple, B: OperatorTuple,
                    policy: NumericPolicy, seed: int | None):
    """Invertible intertwiner between two (small) tuples, or None."""
    if A.d != B.d or A.m != B.m:
        return None
    space = intertwiner_space(A, B, policy)
    if space.shape[0] == 0:
        return None
    res = contains_invertible(space, policy, seed=seed)
    return res.element if res.found else None


def v_semigroup_invariant(T: OperatorTuple, policy: NumericPolicy = DEFAULT_POLICY,
                          seed: int | None = None) -> SimilarityInvariant:
    """Similarity classes and multiplicities of the SI blocks of T.

    Runs the unit SI decomposition, then groups blocks into classes by
    searching for invertible intertwiners between restrictions. Classes are
    sorted by descending multiplicity, ties broken by representative
    dimension and then by the spectrum of the first component.
    """
    D = unit_si_decomposition(T, policy, seed)
    restrictions = [restrict(T, P, policy) for P in D.idempotents]
    classes: list[list[int]] = []
    reps: list[OperatorTuple] = []
    for idx, R in enumerate(restrictions):
        for c, rep in enumerate(reps):
            if _tuples_similar(rep, R, policy, seed) is not None:
                classes[c].append(idx)
                break
        else:
            classes.append([idx])
            reps.append(R)
    order = sorted(range(len(classes)),
                   key=lambda c: (-len(classes[c]), reps[c].d, _spectrum_key(reps[c])))
    classes = [classes[c] for c in order]
    reps = [reps[c] for c in order]
    total = sum(len(cls) * reps[i].d for i, cls in enumerate(classes))
    if total != T.d:
        raise NumericalDegeneracyError(
            f"class dimensions do not add up to the ambient dimension "
            f"({total} != {T.d})"
        )
    return SimilarityInvariant(
        k=len(classes),
        multiplicities=tuple(len(c) for c in classes),
        class_representatives=tuple(reps),
        class_blocks=tuple(tuple(c) for c in classes),
        decomposition=D,
    )


def k0_descriptor(T: OperatorTuple, policy: NumericPolicy = DEFAULT_POLICY,
                  seed: int | None = None,
                  invariant: SimilarityInvariant | None = None) -> K0Descriptor:
    """Grothendieck-group data of the idempotent semigroup of A'(T):
    free abelian of rank k, order unit at the multiplicity vector."""
    inv = invariant if invariant is not None else v_semigroup_invariant(T, policy, seed)
    return K0Descriptor(rank=inv.k, order_unit=inv.multiplicities)


def idempotent_classes_equal(T: OperatorTuple, P, Q,
                             policy: NumericPolicy = DEFAULT_POLICY,
                             seed: int | None = None) -> bool:
    """True iff P and Q define the same idempotent class over A'(T),
    decided through similarity of the restricted tuples."""
    return block_similarity(T, P, Q, policy, seed).similar


@dataclass(frozen=True)
class SimilarityVerdict:
    similar: bool
    reason: str
    invariant_lhs: SimilarityInvariant
    invariant_rhs: SimilarityInvariant
    witness: np.ndarray | None
    residual: float | None

    def summary(self) -> dict:
        return {
            "similar": self.similar,
            "reason": self.reason,
            "invariant_lhs": self.invariant_lhs.summary(),
            "invariant_rhs": self.invariant_rhs.summary(),
            "residual": self.residual,
        }


def similar(T: OperatorTuple, S: OperatorTuple, policy: NumericPolicy = DEFAULT_POLICY,
            seed: int | None = None, want_witness: bool = False) -> SimilarityVerdict:
    """Decide similarity of two commuting tuples, optionally with witness.

    The invariants of both sides are computed and their classes matched by
    blockwise similarity of representatives; the tuples are similar exactly
    when the matching is a multiplicity-preserving bijection. With
    ``want_witness`` an invertible X with X T_i X^-1 = S_i is assembled from
    blockwise intertwiners and verified (max residual reported).
    """
    if T.m != S.m:
        raise ValueError(f"arity mismatch: {T.m} vs {S.m}")
    invT = v_semigroup_invariant(T, policy, seed)
    invS = v_semigroup_invariant(S, policy, seed)
    if T.d != S.d:
        return SimilarityVerdict(False, "dimension", invT, invS, None, None)

    used = [False] * invS.k
    match: list[int] = []
    for a, repT in enumerate(invT.class_representatives):
        found = -1
        for b, repS in enumerate(invS.class_representatives):
            if used[b]:
                continue
            if _tuples_similar(repT, repS, policy, seed) is not None:
                found = b
                break
        if found < 0:
            return SimilarityVerdict(False, f"class {a} of lhs unmatched",
                                     invT, invS, None, None)
        if invT.multiplicities[a] != invS.multiplicities[found]:
            return SimilarityVerdict(
                False,
                f"multiplicity mismatch on matched class ({invT.multiplicities[a]} "
                f"vs {invS.multiplicities[found]})",
                invT, invS, None, None)
        used[found] = True
        match.append(found)
    if invT.k != invS.k:
        return SimilarityVerdict(False, "class count mismatch", invT, invS, None, None)

    witness = None
    residual = None
    if want_witness:
        pairs = []
        for a, b in enumerate(match):
            blocksT = invT.class_blocks[a]
            blocksS = invS.class_blocks[b]
            for iT, iS in zip(blocksT, blocksS):
                P = invT.decomposition.idempotents[iT]
                Q = invS.decomposition.idempotents[iS]
                RT = restrict(T, P, policy)
                RS = restrict(S, Q, policy)
                Xhat = _tuples_similar(RT, RS, policy, seed)
                if Xhat is None:
                    raise NumericalDegeneracyError(
                        "matched blocks lost their intertwiner during assembly"
                    )
                pairs.append((P, Q, Xhat))
        witness = assemble_intertwiner(T, S, pairs, policy)
        Xi = np.linalg.inv(witness)
        residual = float(max(frob(witness @ T[i] @ Xi - S[i]) for i in range(T.m)))
    return SimilarityVerdict(True, "invariants match", invT, invS, witness, residual)
