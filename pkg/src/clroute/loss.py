"""Closed-form expected losses and their route-dependent upper bounds.

Two regimes, two objectives:

* Underparameterized (n >= m+2): each region's training fully determines
  the predictor from that region's data alone, so expected forgetting
  depends only on which region is visited last. The route objective is

      sum_{i<T} delta[tau_i, tau_T]/T  +  sum_t c[tau_t, tau_{t+1}]/T
      + m*sigma2/(n-m-1).

* Overparameterized (m >= n+2): the minimum-distance interpolating update
  keeps a fraction r = 1 - n/m of the previous error, so earlier regions
  are discounted geometrically. The route objective is

      sum_i (1-r)*r^(T-i)/T * rowsum_delta(tau_i)
      + sum_t c[tau_t, tau_{t+1}]/T
      + r^T/T * sum_i delta0[tau_i]  +  (1-r^T)*m*sigma2/(m-n-1).

``closed_form_forgetting_under/over`` evaluate the same forgetting
expressions on actual ground-truth parameter vectors; they exist for the
Monte Carlo cross-checks and are never consulted by planners.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import ProblemInstance, Regime, RegimeError, Route, classify_regime


@dataclass(frozen=True)
class LossBreakdown:
    """Additive decomposition of an expected overall loss."""

    forgetting_part: float
    travel_part: float
    constant_part: float

    @property
    def total(self) -> float:
        return self.forgetting_part + self.travel_part + self.constant_part

    def csv_row(self) -> str:
        return ",".join(
            f"{v:.12g}"
            for v in (self.forgetting_part, self.travel_part, self.constant_part, self.total)
        )


def best_final_region(inst: ProblemInstance) -> int:
    """Region minimizing the dissimilarity row sum; ties go to the lowest index.

    Ending the route there minimizes the forgetting term in the
    underparameterized objective and is also where the descending-row-sum
    order of the overparameterized forgetting minimizer ends.
    """
    row_sums = inst.delta.sum(axis=1)
    return int(np.argmin(row_sums))


def _require(regime: Regime, want_under: bool, op: str) -> None:
    if want_under and not regime.is_under:
        raise RegimeError(f"{op} requires the underparameterized regime (n >= m+2)")
    if not want_under and not regime.is_over:
        raise RegimeError(f"{op} requires the overparameterized regime (m >= n+2)")


def _travel_part(inst: ProblemInstance, order: tuple[int, ...]) -> float:
    t = len(order)
    total = 0.0
    for a, b in zip(order[:-1], order[1:]):
        total += float(inst.costs[a, b])
    return total / t


def r_powers(r: float, t: int) -> np.ndarray:
    """[r^0, r^1, ..., r^t] by iterated multiplication (no pow), low to high."""
    out = np.empty(t + 1)
    p = 1.0
    for k in range(t + 1):
        out[k] = p
        p *= r
    return out


def loss_upper_under(inst: ProblemInstance, route: Route) -> LossBreakdown:
    """Upper bound on expected overall loss in the underparameterized regime."""
    _require(inst.regime(), True, "loss_upper_under")
    order = route.order
    t = len(order)
    if t != inst.t_regions:
        raise ValueError(f"route length {t} != t_regions {inst.t_regions}")
    last = order[-1]
    # the interior visits every region except the final one exactly once,
    # so the sum collapses to the final region's distance row; summing the
    # row in index order keeps the value independent of interior order
    forgetting = float(inst.delta[:, last].sum()) / t
    m, n = inst.m_features, inst.n_samples
    constant = m * inst.sigma2 / (n - m - 1)
    return LossBreakdown(forgetting, _travel_part(inst, order), constant)


def loss_upper_over(inst: ProblemInstance, route: Route) -> LossBreakdown:
    """Upper bound on expected overall loss in the overparameterized regime.

    Position i (1-based) is weighted (1-r)*r^(T-i)/T, so early regions
    fade geometrically; terms accumulate in ascending position order.
    """
    regime = inst.regime()
    _require(regime, False, "loss_upper_over")
    order = route.order
    t = len(order)
    if t != inst.t_regions:
        raise ValueError(f"route length {t} != t_regions {inst.t_regions}")
    r = regime.r
    powers = r_powers(r, t)
    r_t = float(powers[t])

    row_sums = inst.delta.sum(axis=1)
    forgetting = 0.0
    for pos, region in enumerate(order, start=1):
        forgetting += (1.0 - r) * float(powers[t - pos]) / t * float(row_sums[region])
    forgetting += r_t / t * float(inst.delta0.sum())

    m, n = inst.m_features, inst.n_samples
    constant = (1.0 - r_t) * m * inst.sigma2 / (m - n - 1)
    return LossBreakdown(forgetting, _travel_part(inst, order), constant)


def loss_upper(inst: ProblemInstance, route: Route, regime: Regime | None = None) -> LossBreakdown:
    """Dispatch to the regime's objective (regime derived from inst when omitted)."""
    regime = inst.regime() if regime is None else regime
    return loss_upper_under(inst, route) if regime.is_under else loss_upper_over(inst, route)


def closed_form_forgetting_under(
    true_params: list[np.ndarray] | np.ndarray,
    sigma2: float,
    m: int,
    n: int,
) -> float:
    """Expected forgetting loss given the actual ground truths, in route order.

    The final entry of ``true_params`` is the last-trained region. Only the
    distances to it matter; the estimation noise contributes
    m*sigma2/(n-m-1) regardless of the route.
    """
    regime = classify_regime(m, n)
    _require(regime, True, "closed_form_forgetting_under")
    w = np.asarray(true_params, dtype=float)
    t = w.shape[0]
    last = w[-1]
    total = sum(float(np.sum((last - w[i]) ** 2)) for i in range(t - 1)) / t
    return total + m * sigma2 / (n - m - 1)


def closed_form_forgetting_over(
    true_params: list[np.ndarray] | np.ndarray,
    w0: np.ndarray,
    sigma2: float,
    m: int,
    n: int,
) -> float:
    """Expected forgetting loss of the sequential interpolating learner.

    ``true_params`` in route order; w0 is the starting predictor. Pairwise
    distances are discounted by recency, the distance to w0 by r^T, and
    the noise floor saturates at (1-r^T)*m*sigma2/(m-n-1).
    """
    regime = classify_regime(m, n)
    _require(regime, False, "closed_form_forgetting_over")
    w = np.asarray(true_params, dtype=float)
    t = w.shape[0]
    r = regime.r
    powers = r_powers(r, t)
    r_t = float(powers[t])

    sq = np.sum((w[:, None, :] - w[None, :, :]) ** 2, axis=2)
    total = 0.0
    for pos in range(1, t + 1):
        total += (1.0 - r) * float(powers[t - pos]) / t * float(sq[pos - 1].sum())
    total += r_t / t * float(np.sum((w - np.asarray(w0, dtype=float)) ** 2))
    return total + (1.0 - r_t) * m * sigma2 / (m - n - 1)
