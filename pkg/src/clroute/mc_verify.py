"""Monte Carlo cross-checks of the closed-form expected forgetting losses.

The closed forms in :mod:`clroute.loss` promise expectations over the
actual learning process: sample features and noisy labels, fit (under) or
minimum-distance interpolate (over), move to the next region. This module
runs that process many times and compares the empirical average forgetting
loss of the final predictor against the closed form, summarized as a
z-score.

Ground truths are constructed, never estimated: ``simplex_ground_truth``
places region parameters on scaled coordinate axes so every pairwise
squared distance (and the distance to the initial predictor) is known
exactly and can be fed to the closed forms as-is.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .instance import ParameterError, Regime, RegimeError, Route, classify_regime
from .loss import closed_form_forgetting_over, closed_form_forgetting_under

_log = logging.getLogger(__name__)

_CHUNK = 512


@dataclass(frozen=True)
class TaskGroundTruth:
    """Actual region parameter vectors, initial predictor, and noise level.

    ``w_star`` has one row per region; ``w0`` is where the overparameterized
    learner starts. Arrays become read-only on construction.
    """

    w_star: np.ndarray
    w0: np.ndarray
    sigma2: float

    def __post_init__(self) -> None:
        w_star = np.array(self.w_star, dtype=float)
        w0 = np.array(self.w0, dtype=float)
        if w_star.ndim != 2:
            raise ValueError(f"w_star must be 2-D (regions x features), got shape {w_star.shape}")
        if w0.shape != (w_star.shape[1],):
            raise ValueError(f"w0 must have length {w_star.shape[1]}, got shape {w0.shape}")
        if self.sigma2 < 0.0:
            raise ValueError(f"sigma2 must be >= 0, got {self.sigma2}")
        for arr in (w_star, w0):
            arr.flags.writeable = False
        object.__setattr__(self, "w_star", w_star)
        object.__setattr__(self, "w0", w0)

    @property
    def t_regions(self) -> int:
        return self.w_star.shape[0]

    @property
    def m_features(self) -> int:
        return self.w_star.shape[1]


@dataclass(frozen=True)
class McReport:
    """Empirical-vs-closed-form comparison over a trial ensemble."""

    empirical_mean: float
    closed_form: float
    std_error: float
    trials: int

    @property
    def z(self) -> float:
        """|difference| in std-error units; 0 for exact agreement even at zero spread."""
        diff = abs(self.empirical_mean - self.closed_form)
        if diff == 0.0:
            return 0.0
        if self.std_error == 0.0:
            return math.inf
        return diff / self.std_error

    def to_json(self) -> dict:
        return {
            "empirical": self.empirical_mean,
            "closed_form": self.closed_form,
            "std_error": self.std_error,
            "trials": self.trials,
            "z": self.z,
        }


def simplex_ground_truth(
    t: int, m: int, scales: np.ndarray | None = None, sigma2: float = 1.0
) -> TaskGroundTruth:
    """Place region i's parameters at scales[i] times the i-th coordinate axis.

    With the initial predictor at the origin this makes every closed-form
    input exact: the pairwise squared distance between regions i != j is
    scales[i]^2 + scales[j]^2 and the initial squared distance to region i
    is scales[i]^2. Requires m >= t (one axis per region); scales default
    to all ones.
    """
    if t < 1:
        raise ParameterError(f"t must be >= 1, got {t}")
    if m < t:
        raise ParameterError(f"need m >= t to place {t} regions on separate axes, got m={m}")
    if scales is None:
        scales = np.ones(t)
    scales = np.asarray(scales, dtype=float)
    if scales.shape != (t,):
        raise ParameterError(f"scales must have length {t}, got shape {scales.shape}")
    w_star = np.zeros((t, m))
    w_star[np.arange(t), np.arange(t)] = scales
    return TaskGroundTruth(w_star, np.zeros(m), sigma2)


def delta_matrix(truth: TaskGroundTruth) -> np.ndarray:
    """Exact pairwise squared distances between region parameters."""
    d = truth.w_star[:, None, :] - truth.w_star[None, :, :]
    return np.sum(d * d, axis=2)


def delta0_vector(truth: TaskGroundTruth) -> np.ndarray:
    """Exact squared distances from the initial predictor to each region."""
    d = truth.w_star - truth.w0[None, :]
    return np.sum(d * d, axis=1)


def forgetting_loss(truth: TaskGroundTruth, w: np.ndarray) -> float:
    """Average squared distance from a predictor to every region's parameters."""
    d = truth.w_star - np.asarray(w, dtype=float)[None, :]
    return float(np.mean(np.sum(d * d, axis=1)))


def simulate_task_under(
    w_star_t: np.ndarray, m: int, n: int, sigma2: float, rng: np.random.Generator
) -> np.ndarray:
    """One underparameterized training run: fresh data, least-squares fit.

    Draws an n x m standard-normal design, labels y = X w* + noise with
    noise variance sigma2, and solves the normal equations by
    factorization (no explicit inverse). A singular Gram matrix — a
    probability-zero event under continuous sampling — is logged and the
    task data redrawn.
    """
    if not classify_regime(m, n).is_under:
        raise RegimeError(f"simulate_task_under needs n >= m+2, got m={m}, n={n}")
    w_star_t = np.asarray(w_star_t, dtype=float)
    if w_star_t.shape != (m,):
        raise ValueError(f"w_star_t must have length {m}, got shape {w_star_t.shape}")
    sig = math.sqrt(sigma2)
    while True:
        x = rng.standard_normal((n, m))
        z = sig * rng.standard_normal(n)
        y = x @ w_star_t + z
        try:
            return np.linalg.solve(x.T @ x, x.T @ y)
        except np.linalg.LinAlgError:
            _log.warning("singular Gram matrix; redrawing task data")


def simulate_sequence_over(
    truth: TaskGroundTruth, route: Route, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Minimum-distance interpolating updates along a route; returns w_T.

    Every task draws a fresh n x m design and moves the predictor to the
    nearest point interpolating that task's labels, so the current-task
    residual is zero after each update (up to solver precision). Singular
    n x n Gram matrices are logged and the task data redrawn.
    """
    m = truth.m_features
    if not classify_regime(m, n).is_over:
        raise RegimeError(f"simulate_sequence_over needs m >= n+2, got m={m}, n={n}")
    if len(route) != truth.t_regions:
        raise ValueError(f"route length {len(route)} != regions {truth.t_regions}")
    sig = math.sqrt(truth.sigma2)
    w = np.array(truth.w0)
    for region in route.order:
        while True:
            x = rng.standard_normal((n, m))
            z = sig * rng.standard_normal(n)
            y = x @ truth.w_star[region] + z
            try:
                sol = np.linalg.solve(x @ x.T, y - x @ w)
                break
            except np.linalg.LinAlgError:
                _log.warning("singular Gram matrix; redrawing task data")
        w = w + x.T @ sol
    return w


def _under_losses(
    truth: TaskGroundTruth, route: Route, n: int, trials: int, rng: np.random.Generator, chunk: int
) -> np.ndarray:
    """Per-trial forgetting losses, underparameterized.

    The final predictor is determined by the final region's data alone, so
    only that task is simulated; batched over chunks of trials with one
    stacked Gram solve per chunk (X drawn before the noise in each chunk).
    """
    m = truth.m_features
    w_last = truth.w_star[route.final_region]
    sig = math.sqrt(truth.sigma2)
    out = np.empty(trials)
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        while True:
            x = rng.standard_normal((b, n, m))
            z = sig * rng.standard_normal((b, n))
            y = x @ w_last + z
            xt = x.transpose(0, 2, 1)
            try:
                w = np.linalg.solve(xt @ x, xt @ y[..., None])[..., 0]
                break
            except np.linalg.LinAlgError:
                _log.warning("singular Gram matrix in a batch; redrawing the batch")
        diff = w[:, None, :] - truth.w_star[None, :, :]
        out[done : done + b] = np.mean(np.sum(diff * diff, axis=2), axis=1)
        done += b
    return out


def _over_losses(
    truth: TaskGroundTruth, route: Route, n: int, trials: int, rng: np.random.Generator, chunk: int
) -> np.ndarray:
    """Per-trial forgetting losses, overparameterized; full sequence per trial."""
    m = truth.m_features
    sig = math.sqrt(truth.sigma2)
    out = np.empty(trials)
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        w = np.tile(truth.w0, (b, 1))
        for region in route.order:
            while True:
                x = rng.standard_normal((b, n, m))
                z = sig * rng.standard_normal((b, n))
                # residual of the labels y = X w* + z against the current
                # predictor, written as X (w* - w) + z so it is exactly zero
                # when the predictor already matches the region
                resid = np.einsum("bnm,bm->bn", x, truth.w_star[region] - w) + z
                try:
                    sol = np.linalg.solve(x @ x.transpose(0, 2, 1), resid[..., None])[..., 0]
                    break
                except np.linalg.LinAlgError:
                    _log.warning("singular Gram matrix in a batch; redrawing the batch")
            w += np.einsum("bnm,bn->bm", x, sol)
        diff = w[:, None, :] - truth.w_star[None, :, :]
        out[done : done + b] = np.mean(np.sum(diff * diff, axis=2), axis=1)
        done += b
    return out


def verify_closed_form(
    truth: TaskGroundTruth,
    route: Route,
    regime: Regime,
    n_samples: int,
    trials: int,
    rng: np.random.Generator,
    chunk: int = _CHUNK,
) -> McReport:
    """Empirical mean forgetting loss versus the regime's closed form.

    Simulates the learning process ``trials`` times along ``route``,
    evaluates the forgetting loss of each final predictor, and reports the
    sample mean, the closed form on the exact ground-truth distances, and
    the standard error (sample stdev / sqrt(trials)). Per-trial losses are
    collected into one array and reduced with numpy's pairwise summation,
    so the report is a pure function of the RNG state, trial count and
    chunk size.
    """
    if trials < 100:
        raise ParameterError(f"trials must be >= 100, got {trials}")
    actual = classify_regime(truth.m_features, n_samples)
    if actual.kind is not regime.kind:
        raise RegimeError(
            f"requested {regime.kind.value} regime but m={truth.m_features}, "
            f"n={n_samples} is {actual.kind.value}parameterized"
        )
    if len(route) != truth.t_regions:
        raise ValueError(f"route length {len(route)} != regions {truth.t_regions}")

    ordered = truth.w_star[list(route.order)]
    if regime.is_under:
        losses = _under_losses(truth, route, n_samples, trials, rng, chunk)
        closed = closed_form_forgetting_under(ordered, truth.sigma2, truth.m_features, n_samples)
    else:
        losses = _over_losses(truth, route, n_samples, trials, rng, chunk)
        closed = closed_form_forgetting_over(
            ordered, truth.w0, truth.sigma2, truth.m_features, n_samples
        )
    mean = float(losses.mean())
    std_error = float(losses.std(ddof=1) / math.sqrt(trials))
    return McReport(mean, closed, std_error, trials)
