"""Numeric policy record and shared error types.

Every tolerance-sensitive operation takes an explicit :class:`NumericPolicy`
so runs are reproducible. The defaults match the documented contracts:
commutation / idempotency / kernel / invertibility decisions at 1e-8,
rank decisions at ``n * sigma_max * 1e-10``, eigenvalue clustering at a
relative gap of 1e-6, and PSD checks allowing a minimum eigenvalue of
-1e-10.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

DEFAULT_SEED = 0xC0FFEE


@dataclass(frozen=True)
class NumericPolicy:
    commute_tol: float = 1e-8
    idem_tol: float = 1e-8
    kernel_tol: float = 1e-8
    inv_tol: float = 1e-8
    rank_rtol: float = 1e-10
    eig_gap_rtol: float = 1e-6
    psd_tol: float = 1e-10
    seed: int = DEFAULT_SEED

    def with_(self, **kw) -> "NumericPolicy":
        return replace(self, **kw)

    def tolerances(self) -> dict:
        """Tolerance fields as a plain dict (for report headers)."""
        return {
            "commute_tol": self.commute_tol,
            "idem_tol": self.idem_tol,
            "kernel_tol": self.kernel_tol,
            "inv_tol": self.inv_tol,
            "rank_rtol": self.rank_rtol,
            "eig_gap_rtol": self.eig_gap_rtol,
            "psd_tol": self.psd_tol,
        }


DEFAULT_POLICY = NumericPolicy()


class NumericalDegeneracyError(RuntimeError):
    """A rank / clustering / lifting decision could not be made reliably.

    Raised when singular values straddle a rank threshold, when idempotent
    polishing fails to converge, or when a structural integer identity that
    must hold exactly comes out wrong. Callers may retry with a tightened
    (or loosened) policy.
    """


class PropertyViolationError(RuntimeError):
    """A verified mathematical property failed on concrete data."""
