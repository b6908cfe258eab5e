"""Builders for spaces with prescribed or extremal signatures, and the
seeded countable random-graph models.

The countable model materializes adjacency lazily: the bit for a pair (i, j)
is a 64-bit mix of (seed, min, max) compared against p * 2^64, so truncations
of any size are prefix-consistent and O(1) in memory.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    BadParams,
    DiameterTooLarge,
    EpsilonUnderflow,
    InvalidInput,
    StrictnessViolated,
    TriangleViolation,
)
from .linalg import DEFAULT_TOL_REL, double_center, inertia
from .spaces import FiniteMetricSpace, Graph, from_distance_matrix
from .signature import s_matrix

_MASK64 = (1 << 64) - 1
_EPS_FLOOR = 1e-300


# ---------------------------------------------------------------------------
# Signature-prescribing perturbation


def _strict_triangle_ok(D: np.ndarray) -> bool:
    try:
        from_distance_matrix(D, strict=True)
    except TriangleViolation:
        return False
    return True


def perturb_to_max_negative(
    space: FiniteMetricSpace, seed: int, tol_rel: float = DEFAULT_TOL_REL
) -> FiniteMetricSpace:
    """Shrink squared distances along random directions until the centered
    matrix reaches the most negative signature the space allows.

    Requires the strict triangle inequality. Uses d_eps^2 = d^2 - eps*|v_i -
    v_j|^2 with i.i.d. Gaussian v_i, halving eps from an analytic start until
    the perturbed table is a strictly triangular metric whose centered matrix
    keeps s_plus and reaches s_minus = N - 1 - s_plus, with max|d - d_eps|
    bounded by eps itself. On output s_plus(T_eps) = s_plus(T) and
    s_minus(T_eps) = N - 1 - s_plus(T).
    """
    result, _ = _perturb_with_eps(space, seed, tol_rel)
    return result


def _perturb_with_eps(space, seed, tol_rel):
    try:
        from_distance_matrix(space.dist, strict=True, labels=space.labels)
    except TriangleViolation as exc:
        raise StrictnessViolated(
            f"input must satisfy the strict triangle inequality: {exc}"
        ) from exc
    n = space.n
    T = double_center(s_matrix(space))
    s_plus = inertia(T, tol_rel).s_plus
    target_minus = n - 1 - s_plus
    if s_plus == n - 1:
        return space, 0.0  # already maximal, nothing to perturb

    rng = np.random.Generator(np.random.Philox(np.uint64(seed & _MASK64)))
    for _ in range(100):
        v = rng.normal(size=(n, n))
        if np.linalg.matrix_rank(v) == n:
            break
    else:
        raise BadParams("could not draw linearly independent directions")
    diff = v[:, None, :] - v[None, :, :]
    g2 = (diff**2).sum(axis=2)
    np.fill_diagonal(g2, 0.0)
    # Rescale directions so |d^2 - d_eps^2| <= eps * d_min; then
    # |d - d_eps| <= eps/2-ish, making the eps-bound condition reachable.
    offdiag = ~np.eye(n, dtype=bool)
    d_min = float(space.dist[offdiag].min())
    g2 *= d_min / float(g2.max())

    D2 = space.dist**2
    slack = _min_triangle_slack(space.dist)
    eps = 0.5 * slack / float(g2.max())
    while True:
        if eps < _EPS_FLOOR:
            raise EpsilonUnderflow(
                "halving reached 1e-300 without meeting the signature contract"
            )
        d2 = D2 - eps * g2
        off = d2 + np.eye(n)
        if (off <= 0).any():
            eps *= 0.5
            continue
        D_eps = np.sqrt(np.maximum(d2, 0.0))
        np.fill_diagonal(D_eps, 0.0)
        D_eps = 0.5 * (D_eps + D_eps.T)
        if float(np.abs(D_eps - space.dist).max()) > eps:
            eps *= 0.5
            continue
        if not _strict_triangle_ok(D_eps):
            eps *= 0.5
            continue
        out = from_distance_matrix(D_eps, labels=space.labels)
        ine = inertia(double_center(s_matrix(out)), tol_rel)
        if ine.s_plus == s_plus and ine.s_minus == target_minus:
            return out, eps
        eps *= 0.5


def _min_triangle_slack(D: np.ndarray) -> float:
    n = D.shape[0]
    best = np.inf
    for j in range(n):
        slack = D[:, j][:, None] + D[j, :][None, :] - D
        mask = np.ones_like(slack, dtype=bool)
        mask[j, :] = False
        mask[:, j] = False
        np.fill_diagonal(mask, False)
        if mask.any():
            best = min(best, float(slack[mask].min()))
    return best if np.isfinite(best) else 1.0


def prescribed_signature_space(
    n: int, p: int, seed: int, tol_rel: float = DEFAULT_TOL_REL
) -> FiniteMetricSpace:
    """An (n + p + 1)-point space whose centered matrix has signature
    s_minus = n, s_plus = p.

    Samples the points on the unit sphere of R^p (general position and strict
    triangles hold almost surely; resampled otherwise), then applies the
    signature-maximizing perturbation.
    """
    if n < 1 or p < 2:
        raise BadParams("prescribed signature needs n >= 1 and p >= 2")
    N = n + p + 1
    rng = np.random.Generator(np.random.Philox(np.uint64(seed & _MASK64)))
    for attempt in range(100):
        pts = rng.normal(size=(N, p))
        norms = np.linalg.norm(pts, axis=1)
        if (norms == 0).any():
            continue
        pts /= norms[:, None]
        centered = pts - pts.mean(axis=0, keepdims=True)
        if np.linalg.matrix_rank(centered) < p:
            continue
        diffp = pts[:, None, :] - pts[None, :, :]
        D = np.sqrt((diffp**2).sum(axis=2))
        D = 0.5 * (D + D.T)
        np.fill_diagonal(D, 0.0)
        if (D + np.eye(N) == 0).any() or not _strict_triangle_ok(D):
            continue
        base = from_distance_matrix(D)
        return perturb_to_max_negative(base, seed=(seed ^ (attempt + 1)), tol_rel=tol_rel)
    raise BadParams("could not sample a generic strictly-triangular point set")


# ---------------------------------------------------------------------------
# Disjoint unions with constant cross distance


def union_space(components, h: float) -> FiniteMetricSpace:
    """Disjoint union with distance h between points of different components.

    Each component must have diameter at most 2h, which is exactly what the
    triangle inequality needs.
    """
    comps = list(components)
    if not comps:
        raise InvalidInput("union needs at least one component")
    if h <= 0:
        raise InvalidInput("cross distance h must be positive")
    for ci, comp in enumerate(comps):
        if comp.diameter > 2 * h:
            d = comp.dist
            i, j = np.unravel_index(int(np.argmax(d)), d.shape)
            raise DiameterTooLarge(
                ci,
                (int(i), int(j)),
                f"component {ci} has diameter {comp.diameter!r} > 2h = {2 * h!r}",
            )
    if len(comps) == 1:
        return comps[0]
    n = sum(c.n for c in comps)
    D = np.full((n, n), float(h))
    labels = []
    at = 0
    for ci, comp in enumerate(comps):
        D[at : at + comp.n, at : at + comp.n] = comp.dist
        labels.extend(f"c{ci}:{lab}" for lab in comp.labels)
        at += comp.n
    np.fill_diagonal(D, 0.0)
    return from_distance_matrix(D, labels=labels)


def union_r_matrix(components, h: float) -> np.ndarray:
    """Block diagnostic (h^2/2) 11^T + S of the union; block-diagonal with one
    block per component."""
    space = union_space(components, h)
    n = space.n
    return (h * h / 2.0) * np.ones((n, n)) + s_matrix(space)


# ---------------------------------------------------------------------------
# Countable random graph models


def _mix64(x: int) -> int:
    x &= _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x


def _vmix64(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> np.uint64(30))
    x = x * np.uint64(0xBF58476D1CE4E5B9)
    x = x ^ (x >> np.uint64(27))
    x = x * np.uint64(0x94D049BB133111EB)
    x = x ^ (x >> np.uint64(31))
    return x


def residue_class_clique(modulus: int) -> Callable[[int], bool]:
    """Clique membership: every index not divisible by ``modulus``.

    With modulus j+1 this splits the clique into j residue classes matching
    the class-biased measure's layout (class 0 is the non-clique part).
    """
    if modulus < 2:
        raise BadParams("modulus must be >= 2")
    return lambda i: (i % modulus) != 0


def quadratic_gap_clique() -> Callable[[int], bool]:
    """Clique membership with non-clique vertices at 1-based positions
    k^2 + k, so that the first N^2 + N vertices hold N^2 clique members.

    This is the clique-first enumeration along which the positive/negative
    ratio of prefix signatures diverges.
    """

    def member(i: int) -> bool:
        x = i + 1
        k = (math.isqrt(4 * x + 1) - 1) // 2
        return k * k + k != x

    return member


@dataclass(frozen=True)
class CountableRadoModel:
    """Seeded infinite Bernoulli adjacency over the natural numbers.

    ``planted_clique`` may be an explicit index collection or a membership
    predicate; planted pairs are always adjacent. Adjacency is symmetric,
    self-loop free, and a pure function of (seed, min(i,j), max(i,j)).
    """

    edge_prob: float
    seed: int
    planted_clique: object = None

    def __post_init__(self):
        if not (0.0 < self.edge_prob < 1.0):
            raise BadParams(f"edge probability must be in (0, 1), got {self.edge_prob!r}")
        pc = self.planted_clique
        if pc is not None and not callable(pc):
            pc = frozenset(int(i) for i in pc)
            if pc and min(pc) < 0:
                raise BadParams("clique indices must be nonnegative")
            object.__setattr__(self, "planted_clique", pc)

    @property
    def _threshold(self) -> int:
        return int(self.edge_prob * 2.0**64)

    def in_clique(self, i: int) -> bool:
        pc = self.planted_clique
        if pc is None:
            return False
        if callable(pc):
            return bool(pc(int(i)))
        return int(i) in pc

    def adjacent(self, i: int, j: int) -> bool:
        i, j = int(i), int(j)
        if i == j:
            return False
        if self.in_clique(i) and self.in_clique(j):
            return True
        lo, hi = (i, j) if i < j else (j, i)
        h = _mix64(_mix64(_mix64(self.seed) ^ lo) ^ hi)
        return h < self._threshold

    def _clique_flags(self, indices: np.ndarray) -> np.ndarray:
        return np.fromiter(
            (self.in_clique(int(i)) for i in indices), dtype=bool, count=len(indices)
        )

    def adjacency_block(self, indices) -> np.ndarray:
        """Boolean adjacency among (possibly repeated) indices; repeated
        indices denote the same vertex, hence non-adjacent to themselves."""
        idx = np.asarray(indices, dtype=np.int64)
        if idx.size and idx.min() < 0:
            raise InvalidInput("vertex indices must be nonnegative")
        n = idx.size
        out = np.zeros((n, n), dtype=bool)
        if n < 2:
            return out
        ii, jj = np.triu_indices(n, k=1)
        a, b = idx[ii], idx[jj]
        lo = np.minimum(a, b).astype(np.uint64)
        hi = np.maximum(a, b).astype(np.uint64)
        with np.errstate(over="ignore"):
            h = _vmix64(_vmix64(np.full(lo.shape, _mix64(self.seed), dtype=np.uint64) ^ lo) ^ hi)
        bits = h < np.uint64(self._threshold)
        flags = self._clique_flags(idx)
        bits = bits | (flags[ii] & flags[jj])
        bits = bits & (a != b)
        out[ii, jj] = bits
        out[jj, ii] = bits
        return out

    def s_matrix_on(self, indices) -> np.ndarray:
        """-d^2/2 on sampled indices with the {1, 2} distance rule: adjacent
        pairs at 1, distinct non-adjacent at 2, repeated indices at 0."""
        idx = np.asarray(indices, dtype=np.int64)
        adj = self.adjacency_block(idx)
        distinct = idx[:, None] != idx[None, :]
        d2 = np.where(adj, 1.0, np.where(distinct, 4.0, 0.0))
        return -0.5 * d2

    def metric_on(self, indices) -> FiniteMetricSpace:
        """The {1, 2}-valued metric on distinct vertex indices."""
        idx = np.asarray(indices, dtype=np.int64)
        if len(set(idx.tolist())) != idx.size:
            raise InvalidInput("metric_on needs distinct vertex indices")
        adj = self.adjacency_block(idx)
        D = np.where(adj, 1.0, 2.0)
        np.fill_diagonal(D, 0.0)
        return from_distance_matrix(D, labels=tuple(f"v{i}" for i in idx))


def er_adjacency(model: CountableRadoModel, n: int) -> Graph:
    """Induced graph on the first n vertices; prefix-consistent in n."""
    if n < 1:
        raise BadParams("graph order must be >= 1")
    adj = model.adjacency_block(np.arange(n))
    ii, jj = np.nonzero(np.triu(adj, k=1))
    return Graph(n, frozenset(zip(ii.tolist(), jj.tolist())))


def rado_s_matrix(g: Graph) -> np.ndarray:
    """(3/2) A - 2 off the diagonal, 0 on it.

    Coincides with -d^2/2 of the hop metric exactly when the graph is
    connected with diameter at most 2 (see rado_consistency_check).
    """
    A = g.adjacency_matrix()
    S = 1.5 * A - 2.0
    np.fill_diagonal(S, 0.0)
    return S


def rado_metric_space(model: CountableRadoModel, n: int) -> FiniteMetricSpace:
    """The {1, 2}-valued metric of the first n model vertices."""
    if n < 1:
        raise BadParams("space order must be >= 1")
    return model.metric_on(np.arange(n))


def rado_consistency_check(g: Graph) -> bool:
    """True iff the {1, 2} formula matrix equals the true hop metric, i.e.
    the graph is connected with diameter at most 2."""
    A = g.adjacency_matrix()
    if g.n == 1:
        return True
    reach = A + A @ A
    off = ~np.eye(g.n, dtype=bool)
    return bool((reach[off] > 0).all())


def model_to_json(model: CountableRadoModel) -> str:
    pc = model.planted_clique
    if callable(pc):
        raise InvalidInput("predicate cliques are not JSON-serializable")
    doc = {"p": model.edge_prob, "seed": model.seed}
    if pc is not None:
        doc["planted_clique"] = sorted(int(i) for i in pc)
    return json.dumps(doc, sort_keys=True)


def model_from_json(text: str) -> CountableRadoModel:
    doc = json.loads(text)
    return CountableRadoModel(
        edge_prob=float(doc["p"]),
        seed=int(doc["seed"]),
        planted_clique=frozenset(doc["planted_clique"]) if "planted_clique" in doc else None,
    )
