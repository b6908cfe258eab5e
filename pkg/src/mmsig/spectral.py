"""Random-matrix statistics: empirical spectral distributions, the
semicircle comparison, and the positive/negative ratio experiments.

Statistical acceptance thresholds are desk-scale surrogates for the
asymptotic statements they operationalize; every stochastic experiment is
seeded and trials derive their seeds as seed XOR trial index.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .constructions import CountableRadoModel
from .errors import InvalidInput
from .linalg import DEFAULT_TOL_REL, Inertia, _eigenvalues, inertia
from .sampling import DiscreteMeasure, gv_sample, trial_seed


class ESD(NamedTuple):
    """Empirical spectral distribution: eigenvalues of A / sqrt(n), sorted."""

    n: int
    values: np.ndarray


def esd(a) -> ESD:
    vals = _eigenvalues(a)
    n = vals.shape[0]
    return ESD(n, np.sort(vals / math.sqrt(n)))


def semicircle_cdf(sigma: float, x) -> float | np.ndarray:
    """Closed-form CDF of the semicircle density with scale sigma.

    0 below -2 sigma, 1 above 2 sigma, and
    1/2 + x sqrt(4 sigma^2 - x^2) / (4 pi sigma^2) + arcsin(x / 2 sigma) / pi
    in between.
    """
    if sigma <= 0:
        raise InvalidInput("sigma must be positive")
    x = np.asarray(x, dtype=float)
    t = np.clip(x, -2.0 * sigma, 2.0 * sigma)
    out = (
        0.5
        + t * np.sqrt(np.maximum(4.0 * sigma**2 - t**2, 0.0)) / (4.0 * np.pi * sigma**2)
        + np.arcsin(t / (2.0 * sigma)) / np.pi
    )
    return float(out) if out.ndim == 0 else out


def ks_to_semicircle(e: ESD, sigma: float) -> float:
    """Sup distance between the ESD's empirical CDF and the semicircle CDF.

    For the {1, 2}-rule random matrices use sigma = (3/2) sqrt(p (1 - p)),
    the off-diagonal standard deviation.
    """
    v = np.sort(np.asarray(e.values, dtype=float))
    n = v.size
    if n == 0:
        raise InvalidInput("empty spectrum")
    F = semicircle_cdf(sigma, v)
    i = np.arange(n)
    lower = np.abs(F - i / n)
    upper = np.abs(F - (i + 1) / n)
    return float(max(lower.max(), upper.max()))


def delta_ratio(ine: Inertia) -> float:
    """s_plus / s_minus; +inf when only positives exist, 1 when neither does."""
    if ine.s_minus == 0:
        return math.inf if ine.s_plus > 0 else 1.0
    return ine.s_plus / ine.s_minus


def default_checkpoints(m_max: int, start: int = 16) -> tuple:
    """Geometric checkpoint schedule start, 2*start, ..., capped at m_max."""
    if m_max < 1:
        raise InvalidInput("m_max must be >= 1")
    pts = []
    m = start
    while m < m_max:
        pts.append(m)
        m *= 2
    pts.append(m_max)
    return tuple(p for p in pts if p >= 1)


@dataclass(frozen=True)
class RatioTrajectory:
    """Positive/negative ratio along the checkpoints of one sampled trial."""

    seed: int
    m_values: tuple
    dedup_sizes: tuple
    inertias: tuple
    deltas: tuple
    measure_rule: dict | None

    @property
    def final_delta(self) -> float:
        return self.deltas[-1]

    def max_delta(self) -> float:
        return max(self.deltas)


def rado_ratio_experiment(
    model: CountableRadoModel,
    measure: DiscreteMeasure,
    m_max: int,
    checkpoints=None,
    seed: int = 0,
    tol_rel: float = DEFAULT_TOL_REL,
) -> RatioTrajectory:
    """Sample vertices i.i.d. from the measure (independently of the model
    seed), build -d^2/2 with the model's {1, 2} rule, and record the ratio at
    each checkpoint.

    Signatures are computed on the repetition-cancelled prefix, which leaves
    the ratio unchanged and the eigensolves small.
    """
    if checkpoints is None:
        checkpoints = default_checkpoints(m_max)
    checkpoints = tuple(int(c) for c in checkpoints)
    if any(c < 1 or c > m_max for c in checkpoints) or any(
        b <= a for a, b in zip(checkpoints, checkpoints[1:])
    ):
        raise InvalidInput("checkpoints must be increasing and within m_max")
    raw = gv_sample(measure, m_max, seed).raw
    sizes = []
    inertias = []
    deltas = []
    for m in checkpoints:
        prefix = raw[:m]
        _, first = np.unique(prefix, return_index=True)
        dedup = prefix[np.sort(first)]
        ine = inertia(model.s_matrix_on(dedup), tol_rel)
        sizes.append(int(dedup.size))
        inertias.append(ine)
        deltas.append(delta_ratio(ine))
    return RatioTrajectory(
        seed=seed,
        m_values=checkpoints,
        dedup_sizes=tuple(sizes),
        inertias=tuple(inertias),
        deltas=tuple(deltas),
        measure_rule=measure.rule,
    )


def sampled_prefix_trajectory(
    model: CountableRadoModel,
    measure: DiscreteMeasure,
    m_max: int,
    seed: int,
    sizes=None,
    tol_rel: float = DEFAULT_TOL_REL,
    window: int | None = None,
):
    """Signature trajectory along the dedup prefixes of vertices sampled
    i.i.d. from the measure, with distances from the model's {1, 2} rule."""
    from .signature import STABILIZATION_WINDOW, limit_signature_trajectory

    if window is None:
        window = STABILIZATION_WINDOW
    dedup = gv_sample(measure, m_max, seed).dedup
    if dedup.size == 0:
        raise InvalidInput("empty sample; increase m_max")
    space = model.metric_on(dedup)
    return limit_signature_trajectory(
        space, sizes=sizes, tol_rel=tol_rel, window=window
    )


def worker_count() -> int:
    """Worker cap from MMS_SIG_THREADS; defaults to serial execution."""
    raw = os.environ.get("MMS_SIG_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(n, 1)


def rado_ratio_trials(
    model: CountableRadoModel,
    measure: DiscreteMeasure,
    m_max: int,
    trials: int,
    seed: int = 0,
    checkpoints=None,
    tol_rel: float = DEFAULT_TOL_REL,
    workers: int | None = None,
) -> list:
    """Independent repetitions with derived seeds seed XOR trial index."""
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    if workers is None:
        workers = worker_count()

    def run(t):
        return rado_ratio_experiment(
            model,
            measure,
            m_max,
            checkpoints=checkpoints,
            seed=trial_seed(seed, t),
            tol_rel=tol_rel,
        )

    if workers <= 1:
        return [run(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, range(trials)))


def write_ratio_csv(trajectories, path, comment: str | None = None):
    """CSV rows (trial, m, s_minus, s_zero, s_plus, delta)."""
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["trial", "m", "s_minus", "s_zero", "s_plus", "delta"])
        for t, traj in enumerate(trajectories):
            for m, ine, delta in zip(traj.m_values, traj.inertias, traj.deltas):
                writer.writerow(
                    [t, m, ine.s_minus, ine.s_zero, ine.s_plus, repr(delta)]
                )


def ratio_summary(
    trajectories,
    provenance: dict | None = None,
    delta_threshold: float | None = None,
    min_fraction: float | None = None,
) -> dict:
    """Quantiles of the final ratio across trials, JSON-ready.

    With ``delta_threshold`` the summary also reports the fraction of trials
    whose trajectory reaches the threshold at any checkpoint, and with
    ``min_fraction`` a pass/fail verdict against that fraction.
    """
    finals = np.asarray([t.final_delta for t in trajectories], dtype=float)
    finite = finals[np.isfinite(finals)]
    qs = {}
    if finite.size:
        for q in (0.0, 0.25, 0.5, 0.75, 1.0):
            qs[f"q{int(q * 100):03d}"] = float(np.quantile(finite, q))
    doc = {
        "trials": len(trajectories),
        "final_delta_quantiles": qs,
        "infinite_final_deltas": int(np.sum(~np.isfinite(finals))),
    }
    if delta_threshold is not None:
        reached = sum(t.max_delta() >= delta_threshold for t in trajectories)
        doc["delta_threshold"] = delta_threshold
        doc["fraction_reaching"] = reached / len(trajectories)
        if min_fraction is not None:
            doc["min_fraction"] = min_fraction
            doc["pass"] = bool(doc["fraction_reaching"] >= min_fraction)
    if provenance:
        doc.update(provenance)
    return doc


def write_esd_csv(e: ESD, path, comment: str | None = None):
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["index", "value"])
        for i, v in enumerate(e.values):
            writer.writerow([i, repr(float(v))])


def summary_to_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2)
