import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import bd, jordan
from sidecomp import (
    conjugate,
    contains_invertible,
    inflate,
    inflation_commutant_check,
    intertwiner_space,
    joint_commutant,
    operator_tuple,
    radical,
    semisimple_structure,
)
from sidecomp._linalg import conditioned_invertible


class TestJointCommutant:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_identity_tuple_full_algebra(self, n):
        assert joint_commutant(operator_tuple([np.eye(n)])).algebra_dim == n * n

    def test_single_jordan_block(self):
        A = joint_commutant(operator_tuple([jordan(2)]))
        assert A.algebra_dim == 2
        assert A.contains(np.eye(2)) and A.contains(jordan(2))

    def test_distinct_diagonal(self):
        A = joint_commutant(operator_tuple([np.diag([1.0, 2.0])]))
        assert A.algebra_dim == 2
        assert A.contains(np.diag([1.0, 0.0]))
        assert not A.contains(jordan(2))

    def test_gram_orthonormal_and_unital(self):
        A = joint_commutant(operator_tuple([bd(jordan(2), jordan(3, 1.0))]))
        V = A.basis.reshape(A.algebra_dim, -1)
        G = V.conj() @ V.T
        assert np.allclose(G, np.eye(A.algebra_dim), atol=1e-10)
        assert A.contains(np.eye(A.d))

    def test_closed_under_multiplication(self, rng):
        A = joint_commutant(operator_tuple([bd(jordan(2), jordan(2))]))
        for _ in range(8):
            c1 = rng.standard_normal(A.algebra_dim) + 1j * rng.standard_normal(A.algebra_dim)
            c2 = rng.standard_normal(A.algebra_dim) + 1j * rng.standard_normal(A.algebra_dim)
            prod = A.element(c1) @ A.element(c2)
            resid = np.linalg.norm(prod - A.project(prod))
            assert resid <= 1e-8 * max(1.0, np.linalg.norm(prod))

    @settings(max_examples=8, deadline=None)
    @given(st.integers(0, 10**6))
    def test_conjugation_transport(self, seed):
        r = np.random.default_rng(seed)
        T = operator_tuple([bd(jordan(2), jordan(2, 1.0))])
        X = conditioned_invertible(T.d, float(r.uniform(1.0, 50.0)), r)
        Xi = np.linalg.inv(X)
        A = joint_commutant(T)
        B = joint_commutant(conjugate(T, X))
        assert A.algebra_dim == B.algebra_dim
        for M in A.basis:
            moved = X @ M @ Xi
            assert np.linalg.norm(moved - B.project(moved)) <= 1e-8 * max(
                1.0, np.linalg.norm(moved))


class TestInflationIdentity:
    @pytest.mark.parametrize("mats,n,dims", [
        ([jordan(2)], 2, (2, 8)),
        ([np.eye(1)], 3, (1, 9)),
        ([np.diag([1.0, 2.0])], 2, (2, 8)),
    ])
    def test_examples(self, mats, n, dims):
        chk = inflation_commutant_check(operator_tuple(mats), n)
        assert (chk.base_dim, chk.inflated_dim) == dims and chk.passed

    def test_size_cap(self):
        with pytest.raises(ValueError, match="cap"):
            inflation_commutant_check(operator_tuple([np.eye(40)]), 3)


class TestRadical:
    def test_full_matrix_algebra_semisimple(self):
        A = joint_commutant(operator_tuple([np.eye(3)]))
        assert radical(A).shape[0] == 0

    def test_jordan_block_radical_is_nilpotent_line(self):
        A = joint_commutant(operator_tuple([jordan(2)]))
        rad = radical(A)
        assert rad.shape[0] == 1
        R = rad[0]
        # the radical of span{I, N} is the line through N
        assert abs(R[1, 0]) < 1e-12 and abs(R[0, 0]) < 1e-12 and abs(R[1, 1]) < 1e-12
        assert abs(abs(R[0, 1]) - 1.0) < 1e-12

    def test_commutative_semisimple(self):
        A = joint_commutant(operator_tuple([np.diag([1.0, 2.0])]))
        assert radical(A).shape[0] == 0


class TestSemisimpleStructure:
    @pytest.mark.parametrize("mats,dims,rad_dim", [
        ([np.eye(3)], (3,), 0),
        ([bd(jordan(2), jordan(2))], (2,), 4),
        ([bd(jordan(2), jordan(2, 1.0))], (1, 1), 2),
    ])
    def test_examples(self, mats, dims, rad_dim):
        A = joint_commutant(operator_tuple(mats))
        S = semisimple_structure(A)
        assert S.block_dims == dims
        assert S.radical_dim == rad_dim
        assert sum(n * n for n in S.block_dims) + S.radical_dim == S.algebra_dim

    def test_idempotent_family_properties(self):
        A = joint_commutant(operator_tuple([bd(jordan(2), jordan(3, 1.0), np.eye(2))]))
        S = semisimple_structure(A)
        E = S.central_idempotents
        d = A.d
        assert np.linalg.norm(E.sum(axis=0) - np.eye(d)) <= 1e-8
        for a in range(len(E)):
            for b in range(len(E)):
                target = E[a] if a == b else np.zeros((d, d))
                assert np.linalg.norm(E[a] @ E[b] - target) <= 1e-8

    def test_output_independent_of_seed(self):
        A = joint_commutant(operator_tuple([bd(jordan(2), jordan(2), jordan(3, 1.0))]))
        results = {semisimple_structure(A, seed=s, check_seeds=1).block_dims
                   for s in (11, 22, 33)}
        assert len(results) == 1


class TestIntertwiners:
    def test_self_intertwiners_equal_commutant(self):
        T = operator_tuple([jordan(2)])
        assert intertwiner_space(T, T).shape[0] == 2

    def test_disjoint_spectra_no_intertwiner(self):
        sp = intertwiner_space(operator_tuple([jordan(2)]),
                               operator_tuple([jordan(2, 1.0)]))
        assert sp.shape[0] == 0

    def test_scalar_zero_tuples(self):
        sp = intertwiner_space(operator_tuple([np.zeros((1, 1))]),
                               operator_tuple([np.zeros((1, 1))]))
        assert sp.shape[0] == 1

    def test_rectangular_space(self):
        # maps J_2(0) -> J_3(0): polynomial-embedding intertwiners exist
        sp = intertwiner_space(operator_tuple([jordan(2)]), operator_tuple([jordan(3)]))
        assert sp.shape[0] == 2 and sp.shape[1:] == (3, 2)


class TestContainsInvertible:
    def test_identity_span(self):
        res = contains_invertible(np.eye(2)[None])
        assert res.found and res.generic_rank == 2

    def test_nilpotent_span_certified_deficient(self):
        E12 = np.zeros((2, 2), dtype=complex)
        E12[0, 1] = 1.0
        res = contains_invertible(E12[None])
        assert not res.found and res.max_rank == 1 and res.rank_deficient

    def test_jordan_span(self):
        res = contains_invertible(np.stack([np.eye(2, dtype=complex), jordan(2)]))
        assert res.found

    def test_self_intertwiners_always_contain_invertible(self):
        T = operator_tuple([bd(jordan(2), jordan(3, 1.0))])
        res = contains_invertible(intertwiner_space(T, T))
        assert res.found

    def test_empty_space(self):
        res = contains_invertible(np.zeros((0, 2, 2), dtype=complex))
        assert not res.found
