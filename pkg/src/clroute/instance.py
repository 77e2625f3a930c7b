"""Problem instances: regions, dissimilarity bounds, metric travel costs.

An instance describes T regions an agent must visit once each. Between
regions i and j there is a symmetric travel cost ``c[i][j]`` satisfying the
triangle inequality, and a known upper bound ``delta[i][j]`` on the squared
distance between the regions' ground-truth model parameters. ``delta0[i]``
bounds the squared distance between region i's ground truth and the agent's
initial predictor. The regression dimensions (m features, n samples, noise
variance sigma2) select the learning regime.

Region indices are 1-based in files, CLI output and error messages;
internally everything is 0-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np


class ParameterError(ValueError):
    """Bad generation or CLI parameters."""


class ValidationError(ValueError):
    """An instance violates one of its declared invariants."""


class FormatError(ValueError):
    """An instance file does not match the expected JSON schema."""


class RegimeError(ValueError):
    """Operation applied under the wrong (or an undefined) learning regime."""


class RegimeKind(str, Enum):
    UNDER = "under"
    OVER = "over"


@dataclass(frozen=True)
class Regime:
    """Learning regime classification of an (m, n) pair.

    ``r`` is the surviving-error fraction 1 - n/m of a single
    minimum-norm update; it is only meaningful in the overparameterized
    regime and is None otherwise.
    """

    kind: RegimeKind
    r: float | None = None

    @property
    def is_under(self) -> bool:
        return self.kind is RegimeKind.UNDER

    @property
    def is_over(self) -> bool:
        return self.kind is RegimeKind.OVER


def classify_regime(m: int, n: int) -> Regime:
    """Classify (m, n) as under- or overparameterized.

    Raises RegimeError for the undefined band m in {n-1, n, n+1}, where the
    inverse Gram matrix of the sampled features has no finite expectation.
    """
    if m < 1 or n < 1:
        raise RegimeError(f"m and n must be >= 1, got m={m}, n={n}")
    if n >= m + 2:
        return Regime(RegimeKind.UNDER)
    if m >= n + 2:
        return Regime(RegimeKind.OVER, r=1.0 - n / m)
    raise RegimeError(f"regime undefined for m ∈ {{n−1,n,n+1}} (m={m}, n={n})")


@dataclass(frozen=True)
class Route:
    """A visiting order over all T regions; the last entry is where training ends."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        t = len(self.order)
        if sorted(self.order) != list(range(t)):
            raise ValueError(f"route must be a permutation of 0..{t - 1}, got {self.order}")

    def __len__(self) -> int:
        return len(self.order)

    @property
    def final_region(self) -> int:
        return self.order[-1]

    def reversed(self) -> "Route":
        return Route(tuple(reversed(self.order)))

    def one_based(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in self.order)


@dataclass(frozen=True)
class ProblemInstance:
    """Immutable problem data; matrices are read-only numpy arrays.

    Construction checks shapes only. Semantic invariants (symmetry, the
    triangle inequality, a defined regime) are checked by
    :func:`validate_instance`, which reports violations instead of raising
    so that deliberately broken instances can be inspected.
    """

    t_regions: int
    delta: np.ndarray
    delta0: np.ndarray
    costs: np.ndarray
    m_features: int
    n_samples: int
    sigma2: float

    def __post_init__(self) -> None:
        t = self.t_regions
        delta = np.array(self.delta, dtype=float)
        delta0 = np.array(self.delta0, dtype=float)
        costs = np.array(self.costs, dtype=float)
        if delta.shape != (t, t):
            raise ValueError(f"delta must be {t}x{t}, got {delta.shape}")
        if delta0.shape != (t,):
            raise ValueError(f"delta0 must have length {t}, got {delta0.shape}")
        if costs.shape != (t, t):
            raise ValueError(f"costs must be {t}x{t}, got {costs.shape}")
        for arr in (delta, delta0, costs):
            arr.flags.writeable = False
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "delta0", delta0)
        object.__setattr__(self, "costs", costs)

    def regime(self) -> Regime:
        return classify_regime(self.m_features, self.n_samples)


@dataclass(frozen=True)
class ValidationReport:
    """Violation list plus the regime classification (None when undefined)."""

    violations: tuple[str, ...] = ()
    regime: Regime | None = None

    @property
    def ok(self) -> bool:
        return not self.violations


def _check_square_metric_free(name: str, mat: np.ndarray, out: list[str]) -> None:
    """Shared symmetry / diagonal / nonnegativity checks for delta and costs."""
    if not np.array_equal(mat, mat.T):
        bad = np.argwhere(mat != mat.T)
        i, j = bad[0]
        out.append(
            f"{name} not symmetric: {name}_{{{i + 1},{j + 1}}}={mat[i, j]:g} "
            f"!= {name}_{{{j + 1},{i + 1}}}={mat[j, i]:g}"
        )
    diag = np.diagonal(mat)
    if np.any(diag != 0.0):
        i = int(np.argmax(diag != 0.0))
        out.append(f"{name} diagonal must be zero: {name}_{{{i + 1},{i + 1}}}={diag[i]:g}")
    if np.any(mat < 0.0):
        i, j = np.argwhere(mat < 0.0)[0]
        out.append(f"{name} must be >= 0: {name}_{{{i + 1},{j + 1}}}={mat[i, j]:g}")


def validate_instance(inst: ProblemInstance) -> ValidationReport:
    """Check every instance invariant; an empty report means valid.

    The triangle-inequality check is exhaustive over ordered triples of
    distinct regions; the first violated triple is reported verbatim.
    """
    violations: list[str] = []
    t = inst.t_regions

    if t < 2:
        violations.append(f"t must be >= 2, got {t}")

    _check_square_metric_free("delta", inst.delta, violations)
    if np.any(inst.delta0 < 0.0):
        i = int(np.argmax(inst.delta0 < 0.0))
        violations.append(f"delta0 must be >= 0: delta0_{{{i + 1}}}={inst.delta0[i]:g}")
    _check_square_metric_free("c", inst.costs, violations)

    c = inst.costs
    done = False
    for i in range(t):
        for j in range(t):
            if i == j:
                continue
            for k in range(t):
                if k == i or k == j:
                    continue
                if c[i, j] > c[i, k] + c[k, j] + 1e-12 * max(1.0, c[i, j]):
                    violations.append(
                        f"triangle inequality: c_{{{i + 1},{j + 1}}}={c[i, j]:g} > "
                        f"c_{{{i + 1},{k + 1}}}+c_{{{k + 1},{j + 1}}}={c[i, k] + c[k, j]:g}"
                    )
                    done = True
                    break
            if done:
                break
        if done:
            break

    if inst.sigma2 < 0.0:
        violations.append(f"sigma2 must be >= 0, got {inst.sigma2:g}")

    regime: Regime | None = None
    try:
        regime = classify_regime(inst.m_features, inst.n_samples)
    except RegimeError:
        m, n = inst.m_features, inst.n_samples
        if m >= 1 and n >= 1:
            violations.append(f"regime undefined for m ∈ {{n−1,n,n+1}} (m={m}, n={n})")
        else:
            violations.append(f"m and n must be >= 1, got m={m}, n={n}")

    return ValidationReport(tuple(violations), regime)


def metric_closure(costs: np.ndarray) -> np.ndarray:
    """Replace each pairwise cost by the shortest-path distance under it.

    Floyd-Warshall over the complete graph, repeated to a fixed point so
    the result is exactly idempotent even when different relaxation
    orders round path sums differently. The result satisfies the
    triangle inequality, never exceeds the input entrywise, and keeps
    symmetry and the zero diagonal.
    """
    d = np.array(costs, dtype=float)
    t = d.shape[0]
    while True:
        before = d.copy()
        for k in range(t):
            np.minimum(d, d[:, k, None] + d[None, k, :], out=d)
        if np.array_equal(d, before):
            return d


def generate_instance(
    t: int,
    seed: int,
    range_lo: float = 1.0,
    range_hi: float = 10.0,
    m: int = 80,
    n: int = 100,
    sigma2: float = 1.0,
) -> ProblemInstance:
    """Draw a random instance; pure function of (seed, parameters).

    delta entries (upper triangle, row-major), delta0, then raw costs are
    drawn i.i.d. uniform on [range_lo, range_hi] from a PCG64 stream, in
    that fixed order; the raw costs are then replaced by their metric
    closure so the triangle inequality holds while every off-diagonal cost
    stays inside [range_lo, range_hi].
    """
    if t < 2:
        raise ParameterError(f"t must be >= 2, got {t}")
    if not (0.0 < range_lo <= range_hi):
        raise ParameterError(f"need 0 < range_lo <= range_hi, got [{range_lo}, {range_hi}]")

    rng = np.random.default_rng(seed)
    n_pairs = t * (t - 1) // 2
    iu = np.triu_indices(t, k=1)

    delta = np.zeros((t, t))
    delta[iu] = rng.uniform(range_lo, range_hi, n_pairs)
    delta = delta + delta.T

    delta0 = rng.uniform(range_lo, range_hi, t)

    raw = np.zeros((t, t))
    raw[iu] = rng.uniform(range_lo, range_hi, n_pairs)
    costs = metric_closure(raw + raw.T)

    inst = ProblemInstance(t, delta, delta0, costs, m, n, sigma2)
    report = validate_instance(inst)
    if not report.ok:
        raise ParameterError("generated instance invalid: " + "; ".join(report.violations))
    return inst


_SCHEMA = {
    "t": int,
    "m": int,
    "n": int,
    "sigma2": (int, float),
    "delta": list,
    "delta0": list,
    "costs": list,
}


def write_instance(inst: ProblemInstance, path: str | Path) -> None:
    """Serialize to JSON. Floats use Python repr, which round-trips exactly."""
    payload = {
        "t": inst.t_regions,
        "m": inst.m_features,
        "n": inst.n_samples,
        "sigma2": inst.sigma2,
        "delta": inst.delta.tolist(),
        "delta0": inst.delta0.tolist(),
        "costs": inst.costs.tolist(),
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def read_instance(path: str | Path) -> ProblemInstance:
    """Parse and validate an instance file.

    Raises FormatError for JSON syntax problems or missing/mistyped fields
    (naming the field), ValidationError when the parsed instance violates
    an invariant.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc

    if not isinstance(doc, dict):
        raise FormatError(f"{path}: top-level value must be an object")
    for name, typ in _SCHEMA.items():
        if name not in doc:
            raise FormatError(f"{path}: missing field \"{name}\"")
        if not isinstance(doc[name], typ) or isinstance(doc[name], bool):
            raise FormatError(f"{path}: field \"{name}\" has wrong type")

    t = doc["t"]
    try:
        inst = ProblemInstance(
            t_regions=t,
            delta=np.array(doc["delta"], dtype=float),
            delta0=np.array(doc["delta0"], dtype=float),
            costs=np.array(doc["costs"], dtype=float),
            m_features=doc["m"],
            n_samples=doc["n"],
            sigma2=float(doc["sigma2"]),
        )
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc

    report = validate_instance(inst)
    if not report.ok:
        raise ValidationError(f"{path}: " + "; ".join(report.violations))
    return inst
