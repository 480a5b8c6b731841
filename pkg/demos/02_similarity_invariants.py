"""Similarity invariants and the similarity decision with witnesses.

The invariant of a commuting tuple is (k; n_1 >= ... >= n_k): similarity
classes of its strongly irreducible blocks with multiplicities. The
idempotent classes of the commutant form a free abelian semigroup on k
generators (identity at the multiplicity vector), so the associated group
has rank k. Two tuples are similar exactly when the class data matches.
"""
import numpy as np
import scipy.linalg as sla

from sidecomp import (
    conjugate,
    direct_sum,
    idempotent_classes_equal,
    inflate,
    k0_descriptor,
    operator_tuple,
    similar,
    unit_si_decomposition,
    v_semigroup_invariant,
)
from sidecomp._linalg import conditioned_invertible
from sidecomp.planted import jordan_polynomial_tuple


def jordan(r, lam=0.0):
    return (np.diag(np.ones(r - 1), 1) + lam * np.eye(r)).astype(complex)


print("=" * 72)
print("1. The invariant (k; n_1, ..., n_k) on small examples")
print("=" * 72)
for name, T in [
    ("I_3", operator_tuple([np.eye(3)])),
    ("J_2(0) (+) J_2(1)", operator_tuple([sla.block_diag(jordan(2), jordan(2, 1.0)).astype(complex)])),
    ("J_2(0) (+) J_2(0)", inflate(operator_tuple([jordan(2)]), 2)),
    ("J_2(0) (+) J_2(0), split by a companion",
     operator_tuple([sla.block_diag(jordan(2), jordan(2)).astype(complex),
                     sla.block_diag(0 * np.eye(2), np.eye(2)).astype(complex)])),
]:
    inv = v_semigroup_invariant(T)
    k0 = k0_descriptor(T, invariant=inv)
    print(f"  {name:44s} k = {inv.k}, multiplicities {inv.multiplicities}, "
          f"group rank {k0.rank}")
print("  note the last example: the first coordinates alone are two equal")
print("  Jordan blocks (one class), but the companion matrix separates the")
print("  copies into two classes -- the invariant sees the whole tuple.")

print()
print("=" * 72)
print("2. Similarity with an explicit witness")
print("=" * 72)
rng = np.random.default_rng(11)
T = jordan_polynomial_tuple(3, 0.5, rng, m=2)
X = conditioned_invertible(3, 60.0, rng)
S = conjugate(T, X)
v = similar(T, S, want_witness=True)
print(f"  T vs X T X^-1 (cond(X) ~ 60): similar = {v.similar}")
print(f"  witness residual max_i ||W T_i W^-1 - S_i|| = {v.residual:.2e}")

v2 = similar(operator_tuple([jordan(2)]), operator_tuple([jordan(2, 1.0)]))
print(f"  J_2(0) vs J_2(1): similar = {v2.similar} ({v2.reason})")

v3 = similar(operator_tuple([jordan(2)]), operator_tuple([jordan(3)]))
print(f"  J_2(0) vs J_3(0): similar = {v3.similar} ({v3.reason})")

print()
print("=" * 72)
print("3. The direct-sum criterion for strongly irreducible tuples")
print("=" * 72)
A = jordan_polynomial_tuple(2, 0.0, rng, m=2)
B = conjugate(A, conditioned_invertible(2, 10.0, rng))
C = jordan_polynomial_tuple(2, 1.6, rng, m=2)
for name, lhs, rhs in [("similar pair", A, B), ("dissimilar pair", A, C)]:
    rank = k0_descriptor(direct_sum(lhs, rhs)).rank
    print(f"  {name}: group rank of A'(T (+) S) = {rank} "
          f"-> {'similar' if rank == 1 else 'not similar'}")
print("  (rank 1 exactly when the two SI tuples fuse into a single class)")

print()
print("=" * 72)
print("4. Idempotent classes inside one commutant")
print("=" * 72)
T = operator_tuple([sla.block_diag(jordan(2), jordan(2, 1.0)).astype(complex)])
D = unit_si_decomposition(T)
P, Q = D.idempotents
print(f"  spectral idempotents of J_2(0) (+) J_2(1):")
print(f"  [P] == [P]: {idempotent_classes_equal(T, P, P)}")
print(f"  [P] == [Q]: {idempotent_classes_equal(T, P, Q)} "
      f"(restrictions have disjoint spectra)")
T2 = operator_tuple([np.eye(2)])
print(f"  in A'(I_2), any two rank-1 idempotents: "
      f"{idempotent_classes_equal(T2, np.diag([1.0, 0j]), np.diag([0j, 1.0]))}")
