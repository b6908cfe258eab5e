"""Independent oracles shared by the test modules.

These deliberately avoid the library's own code paths: eigenvalues via the
characteristic polynomial, triangle checks via triple loops, Gram matrices
straight from coordinates.
"""

import numpy as np


def charpoly_eigenvalues(A):
    """Eigenvalues through numpy.roots on the characteristic polynomial.

    Independent of the symmetric eigensolver; adequate for small matrices.
    """
    coeffs = np.poly(np.asarray(A, dtype=float))
    roots = np.roots(coeffs)
    return np.sort(roots.real)


def count_inertia(vals, theta):
    vals = np.asarray(vals, dtype=float)
    return (
        int(np.sum(vals < -theta)),
        int(np.sum(np.abs(vals) <= theta)),
        int(np.sum(vals > theta)),
    )


def brute_triangle_ok(D, tol=0.0, strict=False):
    """Triple-loop triangle check."""
    n = D.shape[0]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if strict:
                    if len({i, j, k}) == 3 and D[i, k] >= D[i, j] + D[j, k]:
                        return False
                elif D[i, k] > D[i, j] + D[j, k] + tol:
                    return False
    return True


def centered_gram(points):
    """Gram matrix of mean-centered coordinates."""
    P = np.asarray(points, dtype=float)
    C = P - P.mean(axis=0, keepdims=True)
    return C @ C.T


def random_metric_matrix(rng, n):
    """Hollow symmetric with entries in [1, 2]; always a metric."""
    M = rng.uniform(1.0, 2.0, size=(n, n))
    D = 0.5 * (M + M.T)
    np.fill_diagonal(D, 0.0)
    return D


def random_symmetric(rng, n, scale=1.0):
    M = rng.normal(scale=scale, size=(n, n))
    return 0.5 * (M + M.T)


def random_cospherical_points(rng, n, p):
    """n points in general position on a random sphere in R^p (n >= p + 1).

    Cospherical sets have squared-distance matrices of rank p + 1, hence
    inertia(S) = (1, n - 1 - p, p); ambient-generic sets would give p + 2.
    """
    assert n >= p + 1
    while True:
        u = rng.normal(size=(n, p))
        norms = np.linalg.norm(u, axis=1, keepdims=True)
        if (norms == 0).any():
            continue
        u /= norms
        center = rng.normal(size=p)
        radius = rng.uniform(0.5, 3.0)
        pts = center + radius * u
        centered = pts - pts.mean(axis=0, keepdims=True)
        if np.linalg.matrix_rank(centered) == p:
            return pts


def unit_square_corners():
    return np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def b_matrix(n):
    """Squared-distance matrix of the extended tripod on n >= 4 points."""
    B = np.full((n, n), 4.0)
    np.fill_diagonal(B, 0.0)
    B[:4, :4] = np.array(
        [[0, 4, 4, 1], [4, 0, 4, 1], [4, 4, 0, 1], [1, 1, 1, 0]], dtype=float
    )
    return B
