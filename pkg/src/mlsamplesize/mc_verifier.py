"""Seeded Monte Carlo check of what a planned testing-set size delivers.

Each replication simulates one testing set: the number of in-scope
subjects (e.g. diseased cases for sensitivity) is drawn, the metric is
observed binomially at its anticipated value, and the resulting confidence
interval is scored for half-width and coverage.

Replication ``i`` draws from its own Philox stream keyed by the seed with
``i`` in the top counter word, so results do not depend on how
replications are scheduled across workers.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .metric_sizing import MetricKind, MetricTarget
from .stats_kernel import ConfidenceSpec, as_confidence, wald_half_width_z, wilson_interval_z

__all__ = [
    "CIMethod",
    "PrevalenceMode",
    "SimulationConfig",
    "MetricSimulation",
    "SimulationReport",
    "replication_rng",
    "simulate_study",
    "coverage_check",
]

GENERATOR_NAME = "numpy.random.Philox (4x64, 10 rounds)"
SUBSTREAM_SCHEME = "key = seed; counter = [0, 0, 0, replication index]"
_U64 = 2**64


class CIMethod(enum.Enum):
    WALD = "wald"
    WILSON = "wilson"


class PrevalenceMode(enum.Enum):
    RANDOM = "random"
    FIXED = "fixed"


@dataclass(frozen=True)
class SimulationConfig:
    seed: int = 0
    replications: int = 10000
    ci_method: CIMethod = CIMethod.WALD
    prevalence_mode: PrevalenceMode = PrevalenceMode.RANDOM

    def __post_init__(self):
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not (0 <= self.seed < _U64):
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if isinstance(self.replications, bool) or int(self.replications) != self.replications:
            raise ValueError(f"replications must be an integer, got {self.replications!r}")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "replications", int(self.replications))
        object.__setattr__(self, "ci_method", CIMethod(self.ci_method))
        object.__setattr__(self, "prevalence_mode", PrevalenceMode(self.prevalence_mode))


def replication_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, index]))


@dataclass
class MetricSimulation:
    """Aggregates for one metric over all replications.

    Half-width summaries (``half_width``, ``coverage``) cover only the
    replications in which the interval is defined; ``attainment_fraction``
    and ``zero_event_fraction`` are shares of all replications.
    """

    label: str
    kind: str
    true_value: float
    precision: float
    n_scored: int
    mean_events: float
    half_width: dict
    attainment_fraction: float
    coverage: float | None
    zero_event_fraction: float
    anticipated_half_width: dict
    anticipated_attainment_fraction: float


@dataclass
class SimulationReport:
    n_test: int
    ci_method: str
    prevalence_mode: str
    confidence: float
    metrics: list[MetricSimulation]
    rng_metadata: dict
    notes: list[str] = field(default_factory=list)


def _summary(values: np.ndarray) -> dict:
    if values.size == 0:
        return dict.fromkeys(("mean", "sd", "min", "p5", "p50", "p95", "max"))
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        # np.mean/np.std of a constant array can be off by an ulp
        return {"mean": lo, "sd": 0.0, "min": lo, "p5": lo, "p50": lo, "p95": lo, "max": hi}
    sd = float(np.std(values, ddof=1))
    p5, p50, p95 = np.percentile(values, [5, 50, 95])
    return {"mean": float(np.mean(values)), "sd": sd, "min": lo, "p5": float(p5), "p50": float(p50),
            "p95": float(p95), "max": hi}


def _scope_counts(metrics: list[MetricTarget], n_test: int, mode: PrevalenceMode, rng) -> list[int]:
    """Number of in-scope subjects for each metric in one simulated testing set.

    Sensitivity and specificity with the same prevalence share a single
    draw of the diseased count, as they would in a real testing set.
    """
    diseased: dict[Fraction, int] = {}

    def draw(share: Fraction) -> int:
        if mode is PrevalenceMode.FIXED:
            return math.floor(n_test * share + Fraction(1, 2))
        return int(rng.binomial(n_test, float(share)))

    counts = []
    for target in metrics:
        if target.kind in (MetricKind.SENSITIVITY, MetricKind.SPECIFICITY):
            if target.prevalence not in diseased:
                diseased[target.prevalence] = draw(target.prevalence)
            pos = diseased[target.prevalence]
            counts.append(pos if target.kind is MetricKind.SENSITIVITY else n_test - pos)
        elif target.kind is MetricKind.CLASS_RECALL:
            counts.append(draw(target.prevalence))
        else:
            counts.append(n_test)
    return counts


def _replicate(metrics, n_test, config, z, index, out):
    hw, covered, events, anticipated_hw = out
    rng = replication_rng(config.seed, index)
    counts = _scope_counts(metrics, n_test, config.prevalence_mode, rng)
    for j, (target, m) in enumerate(zip(metrics, counts)):
        events[index, j] = m
        if target.kind is MetricKind.MEAN_OUTCOME:
            sd = target.anticipated
            anticipated_hw[index, j] = z * sd / math.sqrt(m)
            if m < 2:
                continue
            draws = rng.normal(0.0, sd, m)
            width = z * float(np.std(draws, ddof=1)) / math.sqrt(m)
            hw[index, j] = width
            covered[index, j] = abs(float(np.mean(draws))) <= width
            continue
        if m == 0:
            continue
        p = target.anticipated
        anticipated_hw[index, j] = wald_half_width_z(p, m, z)
        k = int(rng.binomial(m, p))
        if config.ci_method is CIMethod.WALD:
            p_hat = k / m
            width = wald_half_width_z(p_hat, m, z)
            lower, upper = p_hat - width, p_hat + width
        else:
            lower, upper = wilson_interval_z(k, m, z)
            width = 0.5 * (upper - lower)
        hw[index, j] = width
        covered[index, j] = lower <= p <= upper


def simulate_study(design, n_test: int, config: SimulationConfig | None = None, workers: int = 1) -> SimulationReport:
    """Simulate ``config.replications`` testing sets of size ``n_test`` for ``design``.

    ``workers > 1`` spreads replications over threads; the report is
    identical for any worker count.
    """
    config = config or SimulationConfig()
    if isinstance(n_test, bool) or int(n_test) != n_test or n_test < 1:
        raise ValueError(f"n_test must be an integer >= 1, got {n_test!r}")
    n_test = int(n_test)
    metrics = list(design.metrics)
    if not metrics:
        raise ValueError("design has no metric targets")
    conf = as_confidence(design.confidence)
    z = conf.z
    reps, k = config.replications, len(metrics)

    hw = np.full((reps, k), np.nan)
    covered = np.zeros((reps, k), dtype=bool)
    events = np.zeros((reps, k), dtype=np.int64)
    anticipated_hw = np.full((reps, k), np.nan)
    out = (hw, covered, events, anticipated_hw)

    def run(chunk: range):
        for i in chunk:
            _replicate(metrics, n_test, config, z, i, out)

    workers = max(1, int(workers))
    if workers == 1:
        run(range(reps))
    else:
        step = -(-reps // workers)
        chunks = [range(s, min(s + step, reps)) for s in range(0, reps, step)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, chunks))

    results = []
    for j, target in enumerate(metrics):
        defined = ~np.isnan(hw[:, j])
        widths = hw[defined, j]
        anticipated = anticipated_hw[~np.isnan(anticipated_hw[:, j]), j]
        d = target.precision
        results.append(MetricSimulation(
            label=target.label,
            kind=target.kind.value,
            true_value=0.0 if target.kind is MetricKind.MEAN_OUTCOME else target.anticipated,
            precision=d,
            n_scored=int(defined.sum()),
            mean_events=float(events[:, j].mean()),
            half_width=_summary(widths),
            attainment_fraction=float(np.count_nonzero(widths <= d)) / reps,
            coverage=float(covered[defined, j].mean()) if widths.size else None,
            zero_event_fraction=float(np.count_nonzero(~defined)) / reps,
            anticipated_half_width=_summary(anticipated),
            anticipated_attainment_fraction=float(np.count_nonzero(anticipated <= d)) / reps,
        ))

    notes = [
        "half_width is computed from each replication's observed estimate",
        "anticipated_half_width uses the anticipated value and the simulated in-scope count (Wald)",
        "replications with no in-scope subjects count toward zero_event_fraction and are "
        "excluded from half_width and coverage; they count as not attaining the precision",
    ]
    if any(t.kind is MetricKind.MEAN_OUTCOME for t in metrics):
        notes.append("mean_outcome metrics use normal outcomes with mean 0 and the declared sd; "
                     "fewer than 2 subjects counts as zero-event")
    return SimulationReport(
        n_test=n_test,
        ci_method=config.ci_method.value,
        prevalence_mode=config.prevalence_mode.value,
        confidence=conf.level,
        metrics=results,
        rng_metadata={
            "generator": GENERATOR_NAME,
            "substreams": SUBSTREAM_SCHEME,
            "seed": config.seed,
            "replications": reps,
            "numpy_version": np.__version__,
        },
        notes=notes,
    )


def coverage_check(
    p_true: float,
    n_events: int,
    conf: ConfidenceSpec | float = 0.95,
    ci_method: CIMethod | str = CIMethod.WALD,
    seed: int = 0,
    replications: int = 10000,
) -> float:
    """Share of simulated intervals (``n_events`` trials each) that contain ``p_true``."""
    if not (0.0 < p_true < 1.0):
        raise ValueError(f"p_true must lie in (0, 1), got {p_true!r}")
    if isinstance(n_events, bool) or int(n_events) != n_events or n_events < 1:
        raise ValueError(f"n_events must be an integer >= 1, got {n_events!r}")
    config = SimulationConfig(seed=seed, replications=replications, ci_method=ci_method)
    z = as_confidence(conf).z
    n = int(n_events)
    hits = 0
    for i in range(config.replications):
        k = int(replication_rng(config.seed, i).binomial(n, p_true))
        if config.ci_method is CIMethod.WALD:
            p_hat = k / n
            width = wald_half_width_z(p_hat, n, z)
            lower, upper = p_hat - width, p_hat + width
        else:
            lower, upper = wilson_interval_z(k, n, z)
        hits += lower <= p_true <= upper
    return hits / config.replications
