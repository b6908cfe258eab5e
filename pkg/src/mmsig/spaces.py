"""Finite metric spaces and their constructors.

A FiniteMetricSpace is a validated distance matrix with labels; everything
else in the package consumes it. Constructors cover raw matrices, graphs
with hop metric, Euclidean and pseudo-Euclidean point sets, and the named
example families (tripod, extended tripod, simplex, sphere samples).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AsymmetryError,
    BadParams,
    ConeViolation,
    Disconnected,
    DuplicatePoints,
    InvalidInput,
    NegativeDistance,
    NonzeroDiagonal,
    TriangleViolation,
    UnknownName,
    ZeroOffDiagonal,
)

# Relative slack for the non-strict triangle test, in units of the diameter.
TRIANGLE_TOL_REL = 1e-12

# Relative slack before a squared pseudo-Euclidean interval counts as negative.
CONE_TOL_REL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Validated N-point metric space: symmetric distances, zero diagonal,
    positive off-diagonal, triangle inequality."""

    dist: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "dist", _frozen(np.asarray(self.dist, float)))
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    def subspace(self, indices) -> "FiniteMetricSpace":
        """Restriction to a tuple of distinct point indices (order kept)."""
        idx = np.asarray(list(indices), dtype=int)
        if len(set(idx.tolist())) != len(idx):
            raise InvalidInput("subspace indices must be distinct")
        return FiniteMetricSpace(
            self.dist[np.ix_(idx, idx)], tuple(self.labels[i] for i in idx)
        )


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: n vertices, edges as sorted pairs."""

    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInput("graph needs at least one vertex")
        norm = set()
        for e in self.edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise InvalidInput(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidInput(f"edge {(u, v)} out of range for n={self.n}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    def adjacency_lists(self) -> list:
        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def adjacency_matrix(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        for u, v in self.edges:
            A[u, v] = A[v, u] = 1.0
        return A


@dataclass(frozen=True)
class PseudoEuclideanPointSet:
    """Points in R^(n,p): first n_neg coordinates carry the negative sign of
    the bilinear form. The pairwise cone condition (all squared intervals
    nonnegative) is checked at construction."""

    n_neg: int
    n_pos: int
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if self.n_neg < 0 or self.n_pos < 0:
            raise InvalidInput("signature dimensions must be nonnegative")
        if pts.ndim != 2 or pts.shape[1] != self.n_neg + self.n_pos:
            raise InvalidInput(
                f"points must have {self.n_neg + self.n_pos} coordinates, "
                f"got shape {pts.shape}"
            )
        if not np.isfinite(pts).all():
            raise InvalidInput("points have non-finite coordinates")
        object.__setattr__(self, "points", _frozen(pts))
        sq = squared_intervals(self)
        scale = float(np.abs(sq).max()) if sq.size else 0.0
        worst = float(sq.min()) if sq.size else 0.0
        if worst < -CONE_TOL_REL * scale:
            i, j = np.unravel_index(int(np.argmin(sq)), sq.shape)
            raise ConeViolation(
                (int(i), int(j)),
                worst,
                f"squared interval of pair ({i}, {j}) is {worst!r} < 0",
            )

    @property
    def n(self) -> int:
        return self.points.shape[0]


def squared_intervals(ps: PseudoEuclideanPointSet) -> np.ndarray:
    """Pairwise squared intervals (z_i - z_j, z_i - z_j)_(n,p)."""
    pts = ps.points
    diff = pts[:, None, :] - pts[None, :, :]
    neg = (diff[:, :, : ps.n_neg] ** 2).sum(axis=2)
    pos = (diff[:, :, ps.n_neg :] ** 2).sum(axis=2)
    return pos - neg


def indefinite_form(ps: PseudoEuclideanPointSet, u, v) -> float:
    """The R^(n,p) bilinear form of two coordinate vectors."""
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    k = ps.n_neg
    return float(u[k:] @ v[k:] - u[:k] @ v[:k])


def _default_labels(n: int, prefix: str = "p") -> tuple:
    return tuple(f"{prefix}{i}" for i in range(n))


def _check_triangle(D: np.ndarray, strict: bool, strict_margin: float):
    n = D.shape[0]
    if n < 3:
        return
    diam = float(D.max())
    tol = TRIANGLE_TOL_REL * diam
    worst_gap = -np.inf
    worst = None
    min_slack = np.inf
    min_slack_triple = None
    for j in range(n):
        # slack[i, k] = d(i,j) + d(j,k) - d(i,k)
        slack = D[:, j][:, None] + D[j, :][None, :] - D
        gap = -slack
        g = float(gap.max())
        if g > worst_gap:
            i, k = np.unravel_index(int(np.argmax(gap)), gap.shape)
            worst_gap, worst = g, (int(i), j, int(k))
        if strict:
            mask = np.ones_like(slack, dtype=bool)
            mask[j, :] = False
            mask[:, j] = False
            np.fill_diagonal(mask, False)
            if mask.any():
                masked = np.where(mask, slack, np.inf)
                i, k = np.unravel_index(int(np.argmin(masked)), masked.shape)
                if masked[i, k] < min_slack:
                    min_slack = float(masked[i, k])
                    min_slack_triple = (int(i), j, int(k))
    if worst_gap > tol:
        i, j, k = worst
        raise TriangleViolation(
            (i, j, k),
            f"d({i},{k}) exceeds d({i},{j}) + d({j},{k}) by {worst_gap!r}",
        )
    if strict and min_slack <= strict_margin:
        i, j, k = min_slack_triple
        raise TriangleViolation(
            (i, j, k),
            f"strict triangle inequality fails: d({i},{k}) = "
            f"d({i},{j}) + d({j},{k}) up to slack {min_slack!r}",
        )


def from_distance_matrix(
    d, strict: bool = False, labels=None, strict_margin: float = 0.0
) -> FiniteMetricSpace:
    """Validate a raw distance matrix into a FiniteMetricSpace.

    With ``strict`` the triangle inequality must hold strictly (slack above
    ``strict_margin``) for every distinct triple, as the perturbation
    construction requires. Violations report a witness triple (i, j, k)
    meaning d(i,k) against d(i,j) + d(j,k).
    """
    D = np.asarray(d, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] < 1:
        raise InvalidInput(f"distance matrix must be square, got shape {D.shape}")
    if not np.isfinite(D).all():
        raise InvalidInput("distance matrix has non-finite entries")
    if not np.array_equal(D, D.T):
        i, j = np.unravel_index(int(np.argmax(np.abs(D - D.T))), D.shape)
        raise AsymmetryError(f"d({i},{j}) = {D[i, j]!r} but d({j},{i}) = {D[j, i]!r}")
    if (D < 0).any():
        i, j = np.unravel_index(int(np.argmin(D)), D.shape)
        raise NegativeDistance(f"d({i},{j}) = {D[i, j]!r} < 0")
    diag = np.diag(D)
    if (diag != 0).any():
        i = int(np.nonzero(diag)[0][0])
        raise NonzeroDiagonal(f"d({i},{i}) = {diag[i]!r} != 0")
    off = D + np.eye(D.shape[0])
    if (off == 0).any():
        i, j = np.unravel_index(int(np.argmin(off)), D.shape)
        raise ZeroOffDiagonal(f"distinct points {i} and {j} are at distance 0")
    _check_triangle(D, strict, strict_margin)
    if labels is None:
        labels = _default_labels(D.shape[0])
    elif len(labels) != D.shape[0]:
        raise InvalidInput("label count does not match matrix order")
    return FiniteMetricSpace(D, tuple(labels))


def from_graph(g: Graph) -> FiniteMetricSpace:
    """Hop-count (breadth-first) metric of a connected graph."""
    adj = g.adjacency_lists()
    n = g.n
    D = np.full((n, n), -1.0)
    for src in range(n):
        D[src, src] = 0.0
        frontier = [src]
        level = 0
        while frontier:
            level += 1
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if D[src, v] < 0:
                        D[src, v] = level
                        nxt.append(v)
            frontier = nxt
    if (D < 0).any():
        i, j = np.unravel_index(int(np.argmin(D)), D.shape)
        raise Disconnected((int(i), int(j)), f"no path between vertices {i} and {j}")
    return from_distance_matrix(D, labels=_default_labels(n, "v"))


def from_euclidean_points(pts, labels=None) -> FiniteMetricSpace:
    """Metric space of pairwise Euclidean distances."""
    P = np.asarray(pts, dtype=float)
    if P.ndim != 2 or P.shape[0] < 1:
        raise InvalidInput(f"points must be a 2-d array, got shape {P.shape}")
    if not np.isfinite(P).all():
        raise InvalidInput("points have non-finite coordinates")
    diff = P[:, None, :] - P[None, :, :]
    D = np.sqrt((diff**2).sum(axis=2))
    D = 0.5 * (D + D.T)
    np.fill_diagonal(D, 0.0)
    off = D + np.eye(D.shape[0])
    if (off == 0).any():
        i, j = np.unravel_index(int(np.argmin(off)), D.shape)
        raise DuplicatePoints(f"points {i} and {j} coincide")
    return from_distance_matrix(D, labels=labels)


def from_pseudo_euclidean(ps: PseudoEuclideanPointSet) -> FiniteMetricSpace:
    """Metric space of pairwise pseudo-Euclidean intervals.

    The cone condition makes the intervals real but does not imply the
    triangle inequality, which is validated here and raised on failure.
    """
    sq = squared_intervals(ps)
    D = np.sqrt(np.maximum(sq, 0.0))
    D = 0.5 * (D + D.T)
    np.fill_diagonal(D, 0.0)
    return from_distance_matrix(D)


def strict_cauchy_schwarz_check(ps: PseudoEuclideanPointSet, i: int, j: int, k: int) -> bool:
    """True iff (z_i - z_j, z_j - z_k) < d(z_i,z_j) * d(z_j,z_k).

    Equivalent to the strict triangle inequality
    d(z_i,z_k) < d(z_i,z_j) + d(z_j,z_k) for cone-admissible triples.
    """
    pts = ps.points
    sq = squared_intervals(ps)
    scale = float(np.abs(sq).max()) if sq.size else 0.0
    theta = CONE_TOL_REL * scale
    for a, b in ((i, j), (j, k), (i, k)):
        if sq[a, b] < -theta:
            raise ConeViolation(
                (a, b), float(sq[a, b]), f"pair ({a}, {b}) violates the cone condition"
            )
    lhs = indefinite_form(ps, pts[i] - pts[j], pts[j] - pts[k])
    rhs = np.sqrt(max(sq[i, j], 0.0)) * np.sqrt(max(sq[j, k], 0.0))
    return lhs < rhs


# ---------------------------------------------------------------------------
# Named examples


def _tripod_matrix(n: int) -> np.ndarray:
    # d(i, 3) = 1 for i < 3; every other distinct pair at distance 2.
    D = np.full((n, n), 2.0)
    np.fill_diagonal(D, 0.0)
    for i in range(3):
        D[i, 3] = D[3, i] = 1.0
    return D


def _sphere_points(dim: int, n: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed))
    for _ in range(100):
        pts = rng.normal(size=(n, dim + 1))
        norms = np.linalg.norm(pts, axis=1)
        if (norms == 0).any():
            continue
        pts /= norms[:, None]
        g = np.clip(pts @ pts.T, -1.0, 1.0)
        off = ~np.eye(n, dtype=bool)
        if n > 1 and (g[off] >= 1.0).any():
            continue  # coincident sample, resample
        return pts
    raise BadParams("could not draw distinct sphere points")


def _sphere_matrix(dim: int, n: int, seed: int) -> np.ndarray:
    pts = _sphere_points(dim, n, seed)
    g = np.clip(pts @ pts.T, -1.0, 1.0)
    D = np.arccos(g)
    D = 0.5 * (D + D.T)
    np.fill_diagonal(D, 0.0)
    return D


def named_example(name: str, **params) -> FiniteMetricSpace:
    """Build one of the named example spaces.

    tripod                   4 points, three legs of length 1, tips at 2
    tripod_extended(n>=5)    tripod plus points at distance 2 from everything
    simplex(n>=2)            all off-diagonal distances 1
    sphere(dim, n, seed)     geodesic distances of uniform points on S^dim
    sphere_sqrt(dim, n, seed)  square root of the geodesic distance
    """
    def need(key):
        if key not in params:
            raise BadParams(f"{name} requires parameter {key!r}")
        return params[key]

    if name == "tripod":
        return from_distance_matrix(_tripod_matrix(4))
    if name == "tripod_extended":
        n = int(need("n"))
        if n < 5:
            raise BadParams("tripod_extended needs n >= 5")
        return from_distance_matrix(_tripod_matrix(n))
    if name == "simplex":
        n = int(need("n"))
        if n < 2:
            raise BadParams("simplex needs n >= 2")
        D = np.ones((n, n)) - np.eye(n)
        return from_distance_matrix(D)
    if name in ("sphere", "sphere_sqrt"):
        dim = int(need("dim"))
        n = int(need("n"))
        seed = int(need("seed"))
        if dim < 1 or n < 1:
            raise BadParams("sphere needs dim >= 1 and n >= 1")
        D = _sphere_matrix(dim, n, seed)
        if name == "sphere_sqrt":
            D = np.sqrt(D)
        return from_distance_matrix(D)
    raise UnknownName(f"unknown example {name!r}")


# ---------------------------------------------------------------------------
# File formats: distance-matrix CSV and edge-list text


def write_distance_csv(space: FiniteMetricSpace, path, comment: str | None = None):
    """Header row of labels, then n rows of n floats (round-trip exact)."""
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(space.labels)
        for row in space.dist:
            writer.writerow([repr(float(x)) for x in row])


def read_distance_csv(path, strict: bool = False) -> FiniteMetricSpace:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    if not rows:
        raise InvalidInput(f"{path}: empty distance CSV")
    labels = tuple(s.strip() for s in rows[0])
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(labels):
            raise InvalidInput(
                f"{path}:{lineno}: expected {len(labels)} columns, got {len(row)}"
            )
        try:
            data.append([float(x) for x in row])
        except ValueError as exc:
            raise InvalidInput(f"{path}:{lineno}: {exc}") from exc
    if len(data) != len(labels):
        raise InvalidInput(
            f"{path}: header has {len(labels)} labels but {len(data)} rows follow"
        )
    return from_distance_matrix(np.asarray(data), strict=strict, labels=labels)


def write_edge_list(graph: Graph, path):
    """One 'u v' pair per line, 0-based."""
    with open(path, "w") as fh:
        for u, v in sorted(graph.edges):
            fh.write(f"{u} {v}\n")


def read_edge_list(path) -> Graph:
    edges = set()
    hi = -1
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise InvalidInput(f"{path}:{lineno}: expected 'u v', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise InvalidInput(f"{path}:{lineno}: {exc}") from exc
            edges.add((min(u, v), max(u, v)))
            hi = max(hi, u, v)
    if hi < 0:
        raise InvalidInput(f"{path}: empty edge list")
    return Graph(hi + 1, frozenset(edges))
