"""Discrete measures, i.i.d. sampling with repetition cancelling, and the
finite matrices of the scaling operators.

Sampling is inverse-CDF on the cumulative weight vector driven by a Philox
counter-based generator, so trajectories are reproducible bit-for-bit across
platforms given the seed. Countable measures (geometric, super-geometric,
class-biased) are materialized down to a relative tail below 1e-18, beyond
the resolution of double-precision uniforms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, InvalidMeasure
from .linalg import DEFAULT_TOL_REL, Inertia, inertia, validate_weights, weighted_center
from .spaces import FiniteMetricSpace

_TAIL = 1e-18


@dataclass(frozen=True)
class DiscreteMeasure:
    """Probability weights over point indices.

    For a finite space the vector length matches the point count; the
    countable rules carry their (truncated) effective range plus the rule
    that generated them for provenance.
    """

    weights: np.ndarray
    rule: dict | None = None

    def __post_init__(self):
        w = validate_weights(np.asarray(self.weights, dtype=float))
        w = np.ascontiguousarray(w)
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def full_support(self) -> bool:
        return bool((self.weights > 0).all())

    def cumulative(self) -> np.ndarray:
        cum = np.cumsum(self.weights)
        cum[-1] = 1.0  # guard searchsorted against trailing roundoff
        return cum

    @classmethod
    def uniform(cls, n: int) -> "DiscreteMeasure":
        if n < 1:
            raise InvalidMeasure("uniform measure needs n >= 1")
        return cls(np.full(n, 1.0 / n), rule={"type": "uniform"})

    @classmethod
    def from_weights(cls, w) -> "DiscreteMeasure":
        return cls(np.asarray(w, dtype=float))

    @classmethod
    def geometric(cls, q: float) -> "DiscreteMeasure":
        """weights proportional to q^k over k = 0, 1, 2, ..."""
        if not (0.0 < q < 1.0):
            raise InvalidMeasure(f"geometric ratio must be in (0, 1), got {q!r}")
        length = max(int(math.ceil(math.log(_TAIL) / math.log(q))) + 1, 2)
        if length > 10**6:
            raise InvalidMeasure(
                f"geometric ratio {q!r} needs {length} support points; too close to 1"
            )
        w = (1.0 - q) * q ** np.arange(length)
        return cls(w / w.sum(), rule={"type": "geometric", "q": q})

    @classmethod
    def super_geometric(cls) -> "DiscreteMeasure":
        """weights proportional to 2^(-k^2) over k = 1, 2, ..."""
        ks = np.arange(1, 12)
        w = np.exp2(-(ks.astype(float) ** 2))
        # index 0 corresponds to k = 1
        return cls(w / w.sum(), rule={"type": "super_geometric"})

    @classmethod
    def class_biased(cls, j: int, level_q: float = 0.9) -> "DiscreteMeasure":
        """Equal mass 1/(j+1) on each of the classes {i : i mod (j+1) == c}.

        Index i belongs to class i mod (j+1) at level i // (j+1); every class
        gets the same pointwise mass at a given level, with a geometric
        distribution of ratio ``level_q`` over the levels.
        """
        if j < 1:
            raise InvalidMeasure("class count parameter j must be >= 1")
        levels = DiscreteMeasure.geometric(level_q).weights
        w = np.repeat(levels, j + 1) / (j + 1)
        return cls(
            w / w.sum(), rule={"type": "class_biased", "j": j, "q": level_q}
        )


def parse_measure_spec(spec, n: int | None = None) -> DiscreteMeasure:
    """Measure from a JSON-style spec: a weight array or a named rule."""
    if isinstance(spec, DiscreteMeasure):
        return spec
    if isinstance(spec, (list, tuple, np.ndarray)):
        return DiscreteMeasure.from_weights(spec)
    if isinstance(spec, dict):
        kind = spec.get("type")
        if kind == "uniform":
            if n is None:
                raise InvalidMeasure("uniform rule needs the point count")
            return DiscreteMeasure.uniform(n)
        if kind == "geometric":
            return DiscreteMeasure.geometric(float(spec["q"]))
        if kind == "super_geometric":
            return DiscreteMeasure.super_geometric()
        if kind == "class_biased":
            return DiscreteMeasure.class_biased(
                int(spec["j"]), float(spec.get("q", 0.9))
            )
        raise InvalidMeasure(f"unknown measure rule {kind!r}")
    raise InvalidMeasure(f"cannot interpret measure spec {spec!r}")


def load_measure(path, n: int | None = None) -> DiscreteMeasure:
    with open(path) as fh:
        return parse_measure_spec(json.load(fh), n=n)


@dataclass(frozen=True)
class SampleTrajectory:
    """An i.i.d. sample of point indices plus its repetition-cancelled form.

    ``dedup`` keeps the first occurrence of every index in order of first
    appearance, mirroring the sampling scheme without repetitions.
    """

    seed: int
    raw: np.ndarray
    dedup: np.ndarray = field(init=False)

    def __post_init__(self):
        raw = np.asarray(self.raw, dtype=np.int64)
        raw = np.ascontiguousarray(raw)
        raw.flags.writeable = False
        object.__setattr__(self, "raw", raw)
        if raw.size:
            _, first = np.unique(raw, return_index=True)
            dedup = raw[np.sort(first)]
        else:
            dedup = np.empty(0, dtype=np.int64)
        dedup = np.ascontiguousarray(dedup)
        dedup.flags.writeable = False
        object.__setattr__(self, "dedup", dedup)

    @property
    def m(self) -> int:
        return self.raw.shape[0]


def gv_sample(measure: DiscreteMeasure, m: int, seed: int) -> SampleTrajectory:
    """Draw m i.i.d. indices from the measure, deterministic in the seed."""
    if m < 0:
        raise InvalidInput("sample size must be nonnegative")
    if not isinstance(measure, DiscreteMeasure):
        measure = parse_measure_spec(measure)
    rng = np.random.Generator(np.random.Philox(np.uint64(seed & (2**64 - 1))))
    u = rng.random(m)
    raw = np.searchsorted(measure.cumulative(), u, side="right")
    return SampleTrajectory(seed=seed, raw=raw.astype(np.int64))


def trial_seed(seed: int, trial: int) -> int:
    """Derived per-trial seed; keeps parallel trials deterministic."""
    return (seed ^ trial) & (2**64 - 1)


def _squared_distance_matrix(space: FiniteMetricSpace, indices) -> np.ndarray:
    idx = np.asarray(indices, dtype=int)
    if idx.size and (idx.min() < 0 or idx.max() >= space.n):
        raise InvalidInput("trajectory indices out of range for the space")
    sub = space.dist[np.ix_(idx, idx)]
    return -0.5 * sub**2


def dedup_matrix_invariance(
    space: FiniteMetricSpace,
    traj: SampleTrajectory,
    tol_rel: float = DEFAULT_TOL_REL,
) -> tuple[Inertia, Inertia]:
    """Inertia of the raw-sequence matrix next to its repetition-cancelled one.

    Duplicated indices produce identical rows and columns; cancelling them
    leaves s_minus and s_plus unchanged and drops exactly one zero eigenvalue
    per cancelled row.
    """
    raw = inertia(_squared_distance_matrix(space, traj.raw), tol_rel)
    ded = inertia(_squared_distance_matrix(space, traj.dedup), tol_rel)
    return raw, ded


def k_matrix(space: FiniteMetricSpace, measure: DiscreteMeasure) -> np.ndarray:
    """M^(1/2) S M^(1/2) with S = -d^2/2 and M = diag(weights).

    Congruent-similar to the kernel matrix acting on the weighted space, so
    its inertia is the inertia of the unnormalized scaling operator.
    """
    w = validate_weights(measure.weights, space.n)
    S = -0.5 * space.dist**2
    root = np.sqrt(w)
    out = S * np.outer(root, root)
    return 0.5 * (out + out.T)


def t_matrix(space: FiniteMetricSpace, measure: DiscreteMeasure) -> np.ndarray:
    """Measure-centered companion of k_matrix (see linalg.weighted_center)."""
    w = validate_weights(measure.weights, space.n)
    return weighted_center(-0.5 * space.dist**2, w)
