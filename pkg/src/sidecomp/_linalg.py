"""Low-level dense linear algebra shared across the package.

Conventions: matrices are numpy complex arrays; ``vec`` is row-major
(C-order) flattening, so ``vec(AXB) = (A . kron . B^T) vec(X)``.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from .policy import NumericalDegeneracyError

_SQRT_EPS = float(np.sqrt(np.finfo(float).eps))


def frob(a) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def svd_robust(M: np.ndarray, full_matrices: bool = True):
    """SVD with a gesvd fallback for the occasional gesdd nonconvergence."""
    try:
        return np.linalg.svd(M, full_matrices=full_matrices)
    except np.linalg.LinAlgError:
        return sla.svd(M, full_matrices=full_matrices, lapack_driver="gesvd")


def svdvals_robust(M: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.svd(M, compute_uv=False)
    except np.linalg.LinAlgError:
        return sla.svd(M, compute_uv=False, lapack_driver="gesvd")


def vec(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).reshape(-1)


def unvec(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    return np.asarray(v).reshape(rows, cols)


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def rank_cut(s: np.ndarray, dim: int, rtol: float, floor: float = 0.0,
             scale: float = 0.0) -> int:
    """Number of singular values above ``max(dim*rtol, floor) * max(s_max, scale)``.

    ``scale`` is the natural magnitude of the input data; supplying it keeps
    the threshold meaningful when the matrix itself is numerically zero.
    Raises if any singular value sits within a factor 10 of the threshold,
    i.e. when the rank decision is ambiguous.
    """
    s = np.asarray(s, dtype=float)
    if s.size == 0:
        return 0
    smax = max(float(s.max()), scale)
    if smax == 0.0:
        return 0
    tau = max(dim * rtol, floor) * smax
    straddle = (s > tau / 10.0) & (s < tau * 10.0)
    if np.any(straddle):
        raise NumericalDegeneracyError(
            f"rank decision ambiguous: singular values {s[straddle]} straddle "
            f"threshold {tau:.3e} (within a factor 10)"
        )
    return int(np.sum(s > tau))


def nullspace(M: np.ndarray, rtol: float, use_gram: bool = False,
              strict: bool = True, scale: float = 0.0,
              rank_dim: int | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the right nullspace of ``M``.

    The default path is a (possibly tall) SVD, which resolves true zeros down
    to ~1e-13 relative and leaves many decades of margin to the threshold
    ``rank_dim * rtol * sigma_max``. ``use_gram=True`` solves the Hermitian
    eigenproblem of ``M* M`` instead; cheaper for very tall stacks, but
    singular values below ``sqrt(eps)*sigma_max`` become unresolvable and the
    threshold floors there — do not use it when the genuinely nonzero
    singular values can approach that floor.

    ``rank_dim`` is the multiplier in the threshold (defaults to
    ``max(rows, cols)``); ``scale`` floors sigma_max (see :func:`rank_cut`);
    ``strict=False`` skips the straddle check and just cuts at the threshold.
    """
    M = np.asarray(M)
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return np.eye(cols, dtype=complex)
    if use_gram:
        G = M.conj().T @ M
        w, V = np.linalg.eigh(G)
        s = np.sqrt(np.clip(w, 0.0, None))[::-1]       # descending
        V = V[:, ::-1]
        floor = 8.0 * _SQRT_EPS
    else:
        _, sv, Vh = svd_robust(M, full_matrices=(rows < cols))
        s = np.concatenate([sv, np.zeros(cols - sv.size)])
        V = Vh.conj().T
        floor = 0.0
    dim = max(rows, cols) if rank_dim is None else rank_dim
    if strict:
        r = rank_cut(s, dim, rtol, floor=floor, scale=scale)
    else:
        smax = max(float(s.max()), scale) if s.size else scale
        tau = max(dim * rtol, floor) * smax
        r = int(np.sum(s > tau))
    return np.ascontiguousarray(V[:, r:])


def orthonormal_range(P: np.ndarray, rtol: float) -> np.ndarray:
    """Orthonormal columns spanning range(P), rank decided by SVD."""
    P = np.asarray(P, dtype=complex)
    U, s, _ = svd_robust(P)
    r = rank_cut(s, max(P.shape), rtol)
    return np.ascontiguousarray(U[:, :r])


def cluster_eigenvalues(eigs: np.ndarray, gap_rtol: float) -> list[np.ndarray]:
    """Group eigenvalues into connected clusters at the relative gap threshold.

    Returns index arrays, one per cluster, ordered by cluster mean
    (lexicographic on (real, imag)).
    """
    eigs = np.asarray(eigs)
    n = eigs.size
    if n == 0:
        return []
    scale = max(1.0, float(np.abs(eigs).max()))
    tol = gap_rtol * scale
    # single linkage over the complete graph; n is small everywhere we call this
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(eigs[i] - eigs[j]) <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = [np.array(g) for g in groups.values()]
    out.sort(key=lambda g: (float(np.mean(eigs[g]).real), float(np.mean(eigs[g]).imag)))
    return out


def spectral_projector(M: np.ndarray, selected: np.ndarray) -> np.ndarray:
    """Riesz projector of ``M`` onto the invariant subspace of ``selected`` eigenvalues.

    ``selected`` is a set/array of eigenvalue locations; an eigenvalue of ``M``
    belongs to the selected spectral set when it is closer to ``selected`` than
    to the rest of the spectrum. Computed from a reordered complex Schur form
    plus one Sylvester solve; the result is an exact idempotent commuting with
    ``M`` (up to roundoff) and is a polynomial in ``M``, hence lies in any
    algebra containing ``M``.
    """
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    selected = np.atleast_1d(np.asarray(selected, dtype=complex))
    all_eigs = np.linalg.eigvals(M)
    others = []
    for lam in all_eigs:
        if np.min(np.abs(selected - lam)) > 0:
            others.append(lam)
    others = np.asarray(others, dtype=complex)

    def want(lam):
        dsel = np.min(np.abs(selected - lam))
        doth = np.min(np.abs(others - lam)) if others.size else np.inf
        return bool(dsel <= doth)

    T, Z, sdim = sla.schur(M, output="complex", sort=want)
    if sdim == 0:
        return np.zeros((n, n), dtype=complex)
    if sdim == n:
        return np.eye(n, dtype=complex)
    T11, T12, T22 = T[:sdim, :sdim], T[:sdim, sdim:], T[sdim:, sdim:]
    R = sla.solve_sylvester(T11, -T22, T12)
    P_T = np.zeros((n, n), dtype=complex)
    P_T[:sdim, :sdim] = np.eye(sdim)
    P_T[:sdim, sdim:] = R
    return Z @ P_T @ Z.conj().T


def newton_polish_idempotent(E: np.ndarray, tol: float = 1e-12,
                             max_iter: int = 40) -> np.ndarray:
    """Polish a near-idempotent with e <- 3e^2 - 2e^3.

    Converges when ``||e^2 - e||_F`` drops below ``tol * max(1, ||e||_F)``,
    floored at the roundoff level of forming e^2 (~ d*eps*||e||^2), which is
    the best any polishing can achieve for oblique idempotents of large norm.
    """
    E = np.asarray(E, dtype=complex)
    d = E.shape[0]
    eps = float(np.finfo(float).eps)

    def threshold(M):
        nm = frob(M)
        return max(tol * max(1.0, nm), 8.0 * d * eps * max(1.0, nm * nm))

    best, best_res = E, np.inf
    for _ in range(max_iter):
        E2 = E @ E
        res = frob(E2 - E)
        if res < best_res:
            best, best_res = E, res
        if res <= threshold(E):
            return E
        E = 3.0 * E2 - 2.0 * (E2 @ E)
    E2 = E @ E
    res = frob(E2 - E)
    if res < best_res:
        best, best_res = E, res
    if best_res <= 10.0 * threshold(best):
        return best
    raise NumericalDegeneracyError(
        f"idempotent polishing failed to converge after {max_iter} iterations "
        f"(residual {best_res:.3e})"
    )


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Q, R = np.linalg.qr(A)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def conditioned_invertible(d: int, cond: float, rng: np.random.Generator) -> np.ndarray:
    """Random complex invertible matrix with condition number ~ ``cond``."""
    if d == 1:
        return np.array([[1.0 + 0j]])
    U = random_unitary(d, rng)
    V = random_unitary(d, rng)
    s = np.exp(np.linspace(0.0, np.log(cond), d))
    s /= np.sqrt(s[0] * s[-1])  # geometric centering keeps norms O(1)
    return (U * s) @ V.conj().T


def min_eig_hermitian(M: np.ndarray) -> float:
    H = 0.5 * (M + M.conj().T)
    return float(np.linalg.eigvalsh(H).min())
