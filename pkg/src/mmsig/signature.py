"""Signature computations: the -d^2/2 matrix and its centered form,
limit-signature trajectories over nested subsets, embeddability
classification, and the indefinite scaling embedding with isometry check.

Sign convention for embeddings: coordinates attached to negative eigenvalues
come first, matching R^(n,p) with the form -sum_1^n + sum_(n+1)^(n+p).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import ConeViolation, InvalidInput, MonotonicityViolation
from .linalg import (
    DEFAULT_TOL_REL,
    Inertia,
    double_center,
    eig_sym,
    inertia,
    zero_threshold,
)
from .sampling import DiscreteMeasure, gv_sample, t_matrix
from .spaces import FiniteMetricSpace, PseudoEuclideanPointSet, squared_intervals

STABILIZATION_WINDOW = 25


def s_matrix(space: FiniteMetricSpace) -> np.ndarray:
    """-d^2/2: hollow, symmetric, strictly negative off the diagonal."""
    return -0.5 * space.dist**2


def space_signature(space: FiniteMetricSpace, tol_rel: float = DEFAULT_TOL_REL) -> Inertia:
    """Inertia of the -d^2/2 matrix; the space's distance signature."""
    return inertia(s_matrix(space), tol_rel)


def centered_signature(space: FiniteMetricSpace, tol_rel: float = DEFAULT_TOL_REL) -> Inertia:
    """Inertia of Pi S Pi; constants are always in the kernel (s_zero >= 1)."""
    return inertia(double_center(s_matrix(space)), tol_rel)


@dataclass(frozen=True)
class SignatureTrajectory:
    """Inertia along nested prefixes; s_minus and s_plus never decrease."""

    sizes: tuple
    inertias: tuple
    window: int
    stabilized: tuple | None

    def rows(self):
        for size, ine in zip(self.sizes, self.inertias):
            yield (size, ine.s_minus, ine.s_zero, ine.s_plus, ine.tol)


def _trajectory_from_prefixes(prefix_matrices, sizes, tol_rel, window):
    inertias = []
    prev = None
    for size, S in zip(sizes, prefix_matrices):
        ine = inertia(S, tol_rel)
        if prev is not None and (
            ine.s_minus < prev.s_minus or ine.s_plus < prev.s_plus
        ):
            raise MonotonicityViolation(
                f"signature decreased from {prev.signature} to {ine.signature} "
                f"at prefix size {size}; eigensolver or tolerance bug"
            )
        prev = ine
        inertias.append(ine)
    if window < 1:
        raise InvalidInput("stabilization window must be >= 1")
    stabilized = None
    if len(inertias) >= window:
        tail = [i.signature for i in inertias[-window:]]
        if all(t == tail[0] for t in tail):
            stabilized = tail[0]
    return SignatureTrajectory(
        sizes=tuple(int(s) for s in sizes),
        inertias=tuple(inertias),
        window=window,
        stabilized=stabilized,
    )


def limit_signature_trajectory(
    space: FiniteMetricSpace,
    order=None,
    sizes=None,
    tol_rel: float = DEFAULT_TOL_REL,
    window: int = STABILIZATION_WINDOW,
) -> SignatureTrajectory:
    """Signatures of -d^2/2 on nested prefixes of a deterministic point order.

    ``order`` is a permutation (or prefix) of the point indices, default the
    natural order; ``sizes`` the increasing prefix sizes to evaluate, default
    every size from 1. A stabilized (s_minus, s_plus) is reported when the
    last ``window`` evaluations agree; a plateau is evidence, never a proof,
    since the true limit may be infinite.
    """
    if order is None:
        order = np.arange(space.n)
    order = np.asarray(list(order), dtype=int)
    if len(set(order.tolist())) != len(order):
        raise InvalidInput("nesting order must not repeat points")
    if order.size and (order.min() < 0 or order.max() >= space.n):
        raise InvalidInput("nesting order has out-of-range indices")
    if sizes is None:
        sizes = range(1, order.size + 1)
    sizes = [int(s) for s in sizes]
    if any(b <= a for a, b in zip(sizes, sizes[1:])) or any(
        s < 1 or s > order.size for s in sizes
    ):
        raise InvalidInput("sizes must be increasing and within the order length")
    S_full = s_matrix(space)
    prefixes = (
        S_full[np.ix_(order[:size], order[:size])] for size in sizes
    )
    return _trajectory_from_prefixes(prefixes, sizes, tol_rel, window)


def sampled_signature_trajectory(
    space: FiniteMetricSpace,
    measure: DiscreteMeasure,
    m_max: int,
    seed: int,
    sizes=None,
    tol_rel: float = DEFAULT_TOL_REL,
    window: int = STABILIZATION_WINDOW,
) -> SignatureTrajectory:
    """Trajectory along the dedup prefixes of an i.i.d. sample.

    Draws m_max points from the measure and nests the distinct ones in order
    of first appearance; once the sample covers the support the signature
    equals the full space's.
    """
    traj = gv_sample(measure, m_max, seed)
    order = traj.dedup
    if order.size == 0:
        raise InvalidInput("empty sample; increase m_max")
    return limit_signature_trajectory(
        space, order=order, sizes=sizes, tol_rel=tol_rel, window=window
    )


def mds_embed(space: FiniteMetricSpace, tol_rel: float = DEFAULT_TOL_REL) -> PseudoEuclideanPointSet:
    """Spectral embedding into R^(n,p) from the centered -d^2/2 matrix.

    Point i gets coordinates sqrt|lambda_k| * u_k(i) over the eigenpairs of
    Pi S Pi with |lambda_k| above the zero threshold, negative eigenvalues
    first. The embedding is an isometry of the space onto its image and the
    image satisfies the cone condition.
    """
    T = double_center(s_matrix(space))
    vals, vecs = eig_sym(T)
    theta = zero_threshold(vals, tol_rel)
    neg = np.where(vals < -theta)[0]          # ascending: most negative first
    pos = np.where(vals > theta)[0][::-1]     # largest positive first
    keep = np.concatenate([neg, pos]).astype(int)
    coords = vecs[:, keep] * np.sqrt(np.abs(vals[keep]))[None, :]
    # deterministic sign: largest-magnitude entry of each eigenvector positive
    for c in range(coords.shape[1]):
        col = vecs[:, keep[c]]
        lead = int(np.argmax(np.abs(col)))
        if col[lead] < 0:
            coords[:, c] = -coords[:, c]
    return PseudoEuclideanPointSet(
        n_neg=int(neg.size), n_pos=int(pos.size), points=coords
    )


def verify_isometry(
    embedding: PseudoEuclideanPointSet,
    space: FiniteMetricSpace,
    tol_rel: float = DEFAULT_TOL_REL,
) -> float:
    """Largest deviation between embedded intervals and the input distances."""
    if embedding.n != space.n:
        raise InvalidInput(
            f"embedding has {embedding.n} points, space has {space.n}"
        )
    sq = squared_intervals(embedding)
    scale = float(np.abs(sq).max()) if sq.size else 0.0
    theta = tol_rel * space.n * scale
    worst = float(sq.min()) if sq.size else 0.0
    if worst < -theta:
        i, j = np.unravel_index(int(np.argmin(sq)), sq.shape)
        raise ConeViolation(
            (int(i), int(j)), worst, f"squared interval of ({i},{j}) is {worst!r}"
        )
    d = np.sqrt(np.maximum(sq, 0.0))
    return float(np.abs(d - space.dist).max())


@dataclass(frozen=True)
class EmbeddabilityVerdict:
    """Embedding classification with the centered inertia that justifies it.

    kind is "euclidean" when the centered matrix has no negative eigenvalues
    (for finite spaces, Hilbert and Euclidean embeddability coincide), else
    "pseudo" with the (n_neg, n_pos) target signature.
    """

    kind: str
    n_neg: int
    n_pos: int
    certificate: Inertia

    def describe(self) -> str:
        if self.kind == "euclidean":
            return f"euclidean({self.n_pos})"
        return f"pseudo({self.n_neg}, {self.n_pos})"


def classify_embeddability(
    space: FiniteMetricSpace, tol_rel: float = DEFAULT_TOL_REL
) -> EmbeddabilityVerdict:
    cert = centered_signature(space, tol_rel)
    kind = "euclidean" if cert.s_minus == 0 else "pseudo"
    return EmbeddabilityVerdict(
        kind=kind, n_neg=cert.s_minus, n_pos=cert.s_plus, certificate=cert
    )


def kernel_reconstruction_check(
    space: FiniteMetricSpace,
    measure: DiscreteMeasure,
    tol_rel: float = DEFAULT_TOL_REL,
) -> float:
    """Rebuild the centered kernel matrix from its full eigendecomposition.

    Returns the max entrywise deviation of V diag(lambda) V^T from the
    matrix; stays at machine scale relative to its norm.
    """
    del tol_rel  # accepted for interface symmetry; reconstruction is exact
    T = t_matrix(space, measure)
    vals, vecs = eig_sym(T)
    rebuilt = (vecs * vals[None, :]) @ vecs.T
    return float(np.abs(rebuilt - T).max())


# ---------------------------------------------------------------------------
# Serialization


def embedding_to_json(embedding: PseudoEuclideanPointSet, provenance: dict | None = None) -> str:
    doc = {
        "n_neg": embedding.n_neg,
        "n_pos": embedding.n_pos,
        "points": [[float(x) for x in row] for row in embedding.points],
    }
    if provenance:
        doc.update(provenance)
    return json.dumps(doc, sort_keys=True, indent=2)


def embedding_from_json(text: str) -> PseudoEuclideanPointSet:
    doc = json.loads(text)
    return PseudoEuclideanPointSet(
        n_neg=int(doc["n_neg"]),
        n_pos=int(doc["n_pos"]),
        points=np.asarray(doc["points"], dtype=float).reshape(
            len(doc["points"]), int(doc["n_neg"]) + int(doc["n_pos"])
        ),
    )


def write_trajectory_csv(traj: SignatureTrajectory, path, comment: str | None = None):
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["size", "s_minus", "s_zero", "s_plus", "theta"])
        for size, sm, s0, sp, theta in traj.rows():
            writer.writerow([size, sm, s0, sp, repr(theta)])
