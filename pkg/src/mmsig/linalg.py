"""Dense symmetric linear algebra: eigendecomposition, inertia, Schur
complements, and the centering transforms everything else builds on.

Matrices are plain square ``numpy`` arrays; ``as_sym_matrix`` is the single
validation gate. Inertia counting uses the eigenvalue spectrum as the source
of truth, with the zero threshold ``theta = tol_rel * n * max|lambda|``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import InvalidInput, InvalidMeasure, NoConvergence, SingularBlock

DEFAULT_TOL_REL = 1e-9

# Reciprocal condition number a pivot block must clear before we trust its
# Schur complement.
SCHUR_RCOND_MIN = 1e-12

# Roundoff slack allowed before declaring an input asymmetric; inputs inside
# the slack are symmetrized exactly.
_SYM_SLACK = 1e-12

_WEIGHT_SUM_TOL = 1e-12


class Inertia(NamedTuple):
    """Counts of negative / zero / positive eigenvalues at threshold ``tol``."""

    s_minus: int
    s_zero: int
    s_plus: int
    tol: float

    @property
    def n(self) -> int:
        return self.s_minus + self.s_zero + self.s_plus

    @property
    def signature(self) -> tuple[int, int]:
        """The (s_minus, s_plus) pair."""
        return (self.s_minus, self.s_plus)

    def counts(self) -> tuple[int, int, int]:
        return (self.s_minus, self.s_zero, self.s_plus)


class EigenDecomposition(NamedTuple):
    """Full spectral decomposition; column ``i`` pairs with eigenvalue ``i``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_sym_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate ``a`` as a finite square symmetric matrix.

    Asymmetry up to roundoff (1e-12 relative) is symmetrized exactly;
    anything larger raises InvalidInput.
    """
    A = np.asarray(a, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInput(f"{name} must be square, got shape {A.shape}")
    if A.shape[0] < 1:
        raise InvalidInput(f"{name} must have order >= 1")
    if not np.isfinite(A).all():
        raise InvalidInput(f"{name} has non-finite entries")
    if not np.array_equal(A, A.T):
        scale = max(float(np.abs(A).max()), 1.0)
        gap = float(np.abs(A - A.T).max())
        if gap > _SYM_SLACK * scale:
            raise InvalidInput(
                f"{name} is not symmetric (max |A - A^T| = {gap:.3e})"
            )
        A = 0.5 * (A + A.T)
    return A


def eig_sym(a) -> EigenDecomposition:
    """Spectral decomposition of a symmetric matrix, eigenvalues ascending."""
    A = as_sym_matrix(a)
    try:
        vals, vecs = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(
            f"eigensolver failed for matrix of order {A.shape[0]}: {exc}"
        ) from exc
    return EigenDecomposition(vals, vecs)


def _eigenvalues(a) -> np.ndarray:
    """Eigenvalues-only path of the same LAPACK solver family."""
    A = as_sym_matrix(a)
    try:
        return np.linalg.eigvalsh(A)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(
            f"eigensolver failed for matrix of order {A.shape[0]}: {exc}"
        ) from exc


def zero_threshold(eigenvalues: np.ndarray, tol_rel: float) -> float:
    """theta = tol_rel * n * max|lambda|; scale-invariant zero cutoff."""
    if len(eigenvalues) == 0:
        return 0.0
    return tol_rel * len(eigenvalues) * float(np.abs(eigenvalues).max())


def inertia_of_eigenvalues(vals, tol_rel: float = DEFAULT_TOL_REL) -> Inertia:
    """Count eigenvalues below -theta, within +-theta, above theta."""
    if tol_rel < 0:
        raise InvalidInput("tol_rel must be nonnegative")
    vals = np.asarray(vals, dtype=float)
    theta = zero_threshold(vals, tol_rel)
    s_minus = int(np.sum(vals < -theta))
    s_plus = int(np.sum(vals > theta))
    return Inertia(s_minus, len(vals) - s_minus - s_plus, s_plus, theta)


def inertia(a, tol_rel: float = DEFAULT_TOL_REL) -> Inertia:
    """Inertia triple of a symmetric matrix."""
    return inertia_of_eigenvalues(_eigenvalues(a), tol_rel)


def _normalize_block(block, n: int) -> np.ndarray:
    idx = np.asarray(sorted(set(int(i) for i in block)), dtype=int)
    if idx.size and (idx[0] < 0 or idx[-1] >= n):
        raise InvalidInput(f"block indices out of range for order {n}")
    return idx


def schur_complement(a, block) -> np.ndarray:
    """Schur complement A / A[block, block].

    The block must be well conditioned: its reciprocal condition estimate
    (min|lambda| / max|lambda|) has to reach SCHUR_RCOND_MIN, otherwise
    SingularBlock is raised.
    """
    A = as_sym_matrix(a)
    n = A.shape[0]
    idx = _normalize_block(block, n)
    if idx.size == 0:
        return A.copy()
    if idx.size == n:
        raise InvalidInput("block must leave at least one row outside")
    rest = np.setdiff1d(np.arange(n), idx)
    A11 = A[np.ix_(idx, idx)]
    vals = _eigenvalues(A11)
    vmax = float(np.abs(vals).max())
    rcond = float(np.abs(vals).min()) / vmax if vmax > 0 else 0.0
    if rcond < SCHUR_RCOND_MIN:
        raise SingularBlock(
            f"block of order {idx.size} has rcond {rcond:.3e} < {SCHUR_RCOND_MIN:.0e}"
        )
    A12 = A[np.ix_(idx, rest)]
    A22 = A[np.ix_(rest, rest)]
    out = A22 - A12.T @ np.linalg.solve(A11, A12)
    return 0.5 * (out + out.T)


def haynsworth_check(a, block, tol_rel: float = DEFAULT_TOL_REL) -> bool:
    """Inertia additivity: inertia(A) == inertia(block) + inertia(A/block)."""
    A = as_sym_matrix(a)
    idx = _normalize_block(block, A.shape[0])
    whole = inertia(A, tol_rel).counts()
    part = inertia(A[np.ix_(idx, idx)], tol_rel).counts()
    comp = inertia(schur_complement(A, idx), tol_rel).counts()
    return whole == tuple(p + c for p, c in zip(part, comp))


def double_center(s) -> np.ndarray:
    """Pi S Pi with Pi = Id - 11^T/n; annihilates the all-ones vector."""
    S = as_sym_matrix(s)
    row = S.mean(axis=1)
    out = S - row[:, None] - row[None, :] + row.mean()
    return 0.5 * (out + out.T)


def validate_weights(w, n: int | None = None) -> np.ndarray:
    """Check a probability vector: nonnegative, sums to 1 within 1e-12."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 1:
        raise InvalidMeasure(f"weights must be a vector, got shape {w.shape}")
    if n is not None and w.shape[0] != n:
        raise InvalidMeasure(f"expected {n} weights, got {w.shape[0]}")
    if not np.isfinite(w).all():
        raise InvalidMeasure("weights have non-finite entries")
    if (w < 0).any():
        i = int(np.argmin(w))
        raise InvalidMeasure(f"weight {i} is negative ({w[i]!r})")
    total = float(w.sum())
    if abs(total - 1.0) > _WEIGHT_SUM_TOL:
        raise InvalidMeasure(f"weights sum to {total!r}, not 1")
    return w


def weighted_center(s, w) -> np.ndarray:
    """Weighted analogue of double centering.

    Returns M^(1/2) C_w S C_w^T M^(1/2) with C_w = Id - 1 w^T and
    M = diag(w): a symmetric matrix congruent-similar to the kernel matrix
    of the measure-centered operator, so its inertia matches that operator.
    The inner factor C_w S C_w^T subtracts row and column mu-averages and
    adds back the double average.
    """
    S = as_sym_matrix(s)
    w = validate_weights(w, S.shape[0])
    sw = S @ w
    centered = S - sw[:, None] - sw[None, :] + float(w @ sw)
    root = np.sqrt(w)
    out = centered * np.outer(root, root)
    return 0.5 * (out + out.T)
