"""Left inverses of convolution systems: pseudo-inverse, full family, square inverse.

A left inverse in the transfer domain, B^(xi) A^(xi) = I at every character,
turns the translate frame of a system into a dual-frame pair and is the whole
reconstruction story: convolving samples with the left inverse recovers the
expansion coefficients.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, FrameConditionError, SingularCharacterError
from .frames import FrameDiagnostics, diagnostics
from .systems import SequenceMatrix, TransferMatrix, from_transfer, transfer

# Conditioning threshold deciding between the normal-equation solve and the
# SVD fallback for the pseudo-inverse.
_NORMAL_EQUATION_MIN_COND = 1e-8
_SVD_RANK_RTOL = 1e-12


class LeftInverse:
    """A left inverse held in both domains: per-character matrices and sequences."""

    __slots__ = ("transfer", "coefficients", "kind")

    def __init__(self, spectral: TransferMatrix, coefficients: SequenceMatrix,
                 kind: str) -> None:
        object.__setattr__(self, "transfer", spectral)
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(self, "kind", kind)

    def __setattr__(self, name: str, value) -> None:
        raise AttributeError("LeftInverse is immutable")

    @classmethod
    def from_transfer(cls, spectral: TransferMatrix, kind: str) -> LeftInverse:
        return cls(spectral, from_transfer(spectral), kind)

    def to_json_dict(self) -> dict:
        data = self.coefficients.to_json_dict()
        data["kind"] = self.kind
        data["transfer"] = self.transfer.to_json_dict()
        return data


def _require_frame(a: SequenceMatrix, tol: float | None) -> FrameDiagnostics:
    diag = diagnostics(a, tol)
    if not diag.is_frame:
        raise FrameConditionError(
            f"system is not a frame: determinant infimum delta={diag.delta:.6e} "
            f"is not above tolerance {diag.tol:.6e}",
            delta=diag.delta, tol=diag.tol)
    return diag


def _pseudo_inverse_matrices(a: SequenceMatrix, diag: FrameDiagnostics) -> np.ndarray:
    t = transfer(a).matrices
    th = np.conj(t.transpose(0, 2, 1))
    beta_scale = max(diag.beta, np.finfo(float).tiny) ** a.cols
    if diag.delta / beta_scale > _NORMAL_EQUATION_MIN_COND:
        return np.linalg.solve(np.matmul(th, t), th)
    return np.linalg.pinv(t, rcond=_SVD_RANK_RTOL)


def moore_penrose(a: SequenceMatrix, tol: float | None = None) -> LeftInverse:
    """Canonical left inverse [A^* A^]^{-1} A^* per character.

    Uses the explicit normal-equation solve while the system is well
    conditioned and falls back to a rank-tolerant SVD pseudo-inverse close to
    degeneracy.  Requires the frame condition and reports the failing
    determinant infimum otherwise.
    """
    diag = _require_frame(a, tol)
    mats = _pseudo_inverse_matrices(a, diag)
    return LeftInverse.from_transfer(TransferMatrix(a.group, mats), "moore_penrose")


def left_inverse_family(a: SequenceMatrix, c: TransferMatrix,
                        tol: float | None = None) -> LeftInverse:
    """Family member A^dag + C (I - A^ A^dag); every choice of C is a left inverse."""
    if c.group != a.group:
        raise DimensionMismatchError("family parameter lives on a different dual group")
    if (c.rows, c.cols) != (a.cols, a.rows):
        raise DimensionMismatchError(
            f"family parameter must be {a.cols}x{a.rows}, got {c.rows}x{c.cols}")
    diag = _require_frame(a, tol)
    t = transfer(a).matrices
    dag = _pseudo_inverse_matrices(a, diag)
    eye = np.eye(a.rows)
    mats = dag + np.matmul(c.matrices, eye - np.matmul(t, dag))
    return LeftInverse.from_transfer(TransferMatrix(a.group, mats), "family")


def verify_left_inverse(a: SequenceMatrix, b: LeftInverse | SequenceMatrix) -> float:
    """Max over characters of the entrywise deviation of B^ A^ from the identity."""
    tb = b.transfer if isinstance(b, LeftInverse) else transfer(b)
    if tb.group != a.group:
        raise DimensionMismatchError("left inverse lives on a different dual group")
    if tb.cols != a.rows:
        raise DimensionMismatchError(
            f"cannot multiply {tb.rows}x{tb.cols} by {a.rows}x{a.cols}")
    product = np.matmul(tb.matrices, transfer(a).matrices)
    residual = product - np.eye(a.cols)
    return float(np.abs(residual).max())


def square_inverse(a: SequenceMatrix, tol: float | None = None) -> LeftInverse:
    """Exact per-character inverse of a square system; its dual is a Riesz basis."""
    if a.rows != a.cols:
        raise DimensionMismatchError(
            f"square inverse needs a square system, got {a.rows}x{a.cols}")
    diag = diagnostics(a, tol)
    dets = np.abs(np.linalg.det(transfer(a).matrices))
    threshold = diag.riesz_tol()
    bad = np.nonzero(dets <= threshold)[0]
    if bad.size:
        coords = a.group.coords_array
        offenders = [tuple(int(c) for c in coords[k]) for k in bad]
        raise SingularCharacterError(
            f"transfer matrix is singular at character {offenders[0]} "
            f"(|det|={dets[bad[0]]:.3e}, threshold {threshold:.3e})",
            offenders)
    mats = np.linalg.inv(transfer(a).matrices)
    return LeftInverse.from_transfer(TransferMatrix(a.group, mats), "square")
