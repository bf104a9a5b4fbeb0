"""Testing-set size needed to estimate each performance metric to a target precision.

A proportion metric needs ``n_events = ceil(z^2 p (1 - p) / d^2)`` in-scope
subjects (diseased cases for sensitivity, non-diseased for specificity).
The testing-set size is then ``ceil(n_events / share)`` where ``share`` is
the in-scope fraction of the testing population.  Both ceilings are taken
(events first, then the total); the single-ceiling value is kept in the
intermediates whenever it differs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import DesignError, SizingError
from .rational import ceil_div, to_fraction
from .stats_kernel import ConfidenceSpec, as_confidence, binomial_variance, wald_half_width_z

__all__ = [
    "MetricKind",
    "MetricTarget",
    "MetricRequirement",
    "OverallTestSize",
    "n_events_for_proportion",
    "n_test_for_sensitivity",
    "n_test_for_specificity",
    "n_test_for_class_recall",
    "n_test_for_proportion",
    "n_test_for_mean",
    "n_test_for_multiclass",
    "size_metric",
    "required_test_size",
]

# Sizes beyond this are treated as a failed computation rather than a plan.
_MAX_COUNT = 10**15


class MetricKind(enum.Enum):
    SENSITIVITY = "sensitivity"
    SPECIFICITY = "specificity"
    OVERALL_PROPORTION = "overall_proportion"
    CLASS_RECALL = "class_recall"
    MEAN_OUTCOME = "mean_outcome"

    @classmethod
    def parse(cls, value) -> "MetricKind":
        if isinstance(value, cls):
            return value
        key = str(value).replace("_", "").replace("-", "").replace(" ", "").lower()
        for kind in cls:
            if kind.value.replace("_", "") == key:
                return kind
        names = ", ".join(k.value for k in cls)
        raise DesignError("kind", f"unknown metric kind {value!r} (expected one of {names})")

    @property
    def needs_prevalence(self) -> bool:
        return self in _PREVALENCE_KINDS

    @property
    def is_proportion(self) -> bool:
        return self is not MetricKind.MEAN_OUTCOME


_PREVALENCE_KINDS = frozenset(
    {MetricKind.SENSITIVITY, MetricKind.SPECIFICITY, MetricKind.CLASS_RECALL}
)


@dataclass(frozen=True)
class MetricTarget:
    """One performance metric to be estimated on the testing set.

    ``anticipated`` is the expected proportion for proportion-like kinds and
    the outcome standard deviation for ``MEAN_OUTCOME``.  ``precision`` is
    the target CI half-width in the same units.  ``prevalence`` is the
    share of the class the metric is conditioned on (the diseased for
    sensitivity and specificity alike, the class itself for class recall).
    """

    kind: MetricKind
    anticipated: float
    precision: float
    prevalence: Fraction | None = None
    label: str = ""

    def __post_init__(self):
        kind = MetricKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        anticipated = _real(self.anticipated, "anticipated")
        precision = _real(self.precision, "precision")
        if kind.is_proportion:
            if not (0.0 < anticipated < 1.0):
                raise DesignError("anticipated", f"must lie in (0, 1), got {anticipated!r}")
            if not (0.0 < precision < 1.0):
                raise DesignError("precision", f"must lie in (0, 1), got {precision!r}")
        else:
            if not anticipated > 0.0:
                raise DesignError("anticipated", f"standard deviation must be > 0, got {anticipated!r}")
            if not precision > 0.0:
                raise DesignError("precision", f"must be > 0, got {precision!r}")
        object.__setattr__(self, "anticipated", anticipated)
        object.__setattr__(self, "precision", precision)

        if kind.needs_prevalence:
            if self.prevalence is None:
                raise DesignError("prevalence", f"required for {kind.value}")
            try:
                prevalence = to_fraction(self.prevalence)
            except (TypeError, ValueError) as exc:
                raise DesignError("prevalence", str(exc)) from None
            if not (0 < prevalence < 1):
                raise DesignError("prevalence", f"must lie in (0, 1), got {float(prevalence)!r}")
            object.__setattr__(self, "prevalence", prevalence)
        elif self.prevalence is not None:
            raise DesignError("prevalence", f"not applicable to {kind.value}")

        if not self.label:
            object.__setattr__(self, "label", kind.value)

    @property
    def share(self) -> Fraction:
        """In-scope fraction of the testing population."""
        if self.kind is MetricKind.SPECIFICITY:
            return 1 - self.prevalence
        if self.kind.needs_prevalence:
            return self.prevalence
        return Fraction(1)


def _real(value, name: str) -> float:
    try:
        x = float(to_fraction(value))
    except (TypeError, ValueError) as exc:
        raise DesignError(name, str(exc)) from None
    if not math.isfinite(x):
        raise DesignError(name, f"must be finite, got {value!r}")
    return x


@dataclass(frozen=True)
class MetricRequirement:
    target: MetricTarget
    n_events: int
    n_test_required: int
    intermediates: dict = field(default_factory=dict, compare=False)


class OverallTestSize(NamedTuple):
    requirements: list[MetricRequirement]
    n_test: int
    binding: int

    @property
    def binding_requirement(self) -> MetricRequirement:
        return self.requirements[self.binding]


def _smallest_count(real: float, half_width, d: float) -> int:
    """Smallest n >= 1 with ``half_width(n) <= d``, seeded at ``ceil(real)``.

    The closed form can land one off when ``real`` sits within rounding of
    an integer; stepping against the half-width itself removes that.
    """
    if not math.isfinite(real) or real > _MAX_COUNT:
        raise SizingError(f"required count is not representable (about {real:.3g})")
    n = max(1, math.ceil(real))
    while n > 1 and half_width(n - 1) <= d:
        n -= 1
    while half_width(n) > d:
        n += 1
    return n


def _events_detail(p: float, d: float, conf: ConfidenceSpec) -> tuple[int, dict]:
    if not (0.0 < p < 1.0):
        raise ValueError(f"anticipated proportion must lie in (0, 1), got {p!r}")
    if not (0.0 < d < 1.0):
        raise ValueError(f"precision must lie in (0, 1), got {d!r}")
    z = conf.z
    variance = binomial_variance(p)
    real = (z / d) * (z / d) * variance
    n = _smallest_count(real, lambda m: wald_half_width_z(p, m, z), d)
    return n, {"z": z, "variance": variance, "n_events_real": real}


def n_events_for_proportion(p: float, d: float, conf: ConfidenceSpec | float = 0.95) -> int:
    """Smallest number of in-scope subjects whose Wald half-width at ``p`` is at most ``d``."""
    return _events_detail(float(p), float(d), as_confidence(conf))[0]


def _adjusted(target: MetricTarget, conf: ConfidenceSpec) -> MetricRequirement:
    n_events, info = _events_detail(target.anticipated, target.precision, conf)
    share = target.share
    n_test = ceil_div(n_events, share)
    if n_test > _MAX_COUNT:
        raise SizingError(f"required testing-set size {n_test} is not representable")
    info["share"] = float(share)
    info["n_test_real"] = float(Fraction(n_events) / share)
    single = ceil_div(Fraction(info["n_events_real"]), share)
    if single != n_test:
        info["single_ceiling_n_test"] = single
    return MetricRequirement(target, n_events, n_test, info)


def n_test_for_sensitivity(
    sens: float, prevalence, d: float, conf: ConfidenceSpec | float = 0.95, label: str = ""
) -> MetricRequirement:
    target = MetricTarget(MetricKind.SENSITIVITY, sens, d, prevalence, label)
    return _adjusted(target, as_confidence(conf))


def n_test_for_specificity(
    spec: float, prevalence, d: float, conf: ConfidenceSpec | float = 0.95, label: str = ""
) -> MetricRequirement:
    """Specificity is sized on the non-diseased, whose share is ``1 - prevalence``."""
    target = MetricTarget(MetricKind.SPECIFICITY, spec, d, prevalence, label)
    return _adjusted(target, as_confidence(conf))


def n_test_for_class_recall(
    recall: float, class_prevalence, d: float, conf: ConfidenceSpec | float = 0.95, label: str = ""
) -> MetricRequirement:
    target = MetricTarget(MetricKind.CLASS_RECALL, recall, d, class_prevalence, label)
    return _adjusted(target, as_confidence(conf))


def n_test_for_proportion(
    p: float, d: float, conf: ConfidenceSpec | float = 0.95, label: str = ""
) -> MetricRequirement:
    """A proportion estimated on every testing subject (e.g. overall accuracy)."""
    target = MetricTarget(MetricKind.OVERALL_PROPORTION, p, d, None, label)
    return _adjusted(target, as_confidence(conf))


def n_test_for_mean(
    sd: float, d: float, conf: ConfidenceSpec | float = 0.95, label: str = ""
) -> MetricRequirement:
    """Size for a mean of a continuous outcome: ``ceil((z sd / d)^2)``."""
    if not (float(sd) > 0.0 and float(d) > 0.0):
        raise ValueError(f"sd and d must both be > 0, got sd={sd!r}, d={d!r}")
    target = MetricTarget(MetricKind.MEAN_OUTCOME, sd, d, None, label)
    return _mean_requirement(target, as_confidence(conf))


def _mean_requirement(target: MetricTarget, conf: ConfidenceSpec) -> MetricRequirement:
    sd, d = target.anticipated, target.precision
    z = conf.z
    ratio = z * sd / d
    real = ratio * ratio
    n = _smallest_count(real, lambda m: z * sd / math.sqrt(m), d)
    info = {"z": z, "variance": sd * sd, "n_events_real": real, "share": 1.0, "n_test_real": float(n)}
    return MetricRequirement(target, n, n, info)


def n_test_for_multiclass(
    classes: Sequence[tuple[float, float]], d: float, conf: ConfidenceSpec | float = 0.95
) -> MetricRequirement:
    """Size a multiclass outcome from per-class recalls.

    Each class is sized like sensitivity with its own class share as the
    prevalence; the returned requirement is the binding (largest) class,
    with every class listed under ``intermediates["per_class"]``.
    """
    classes = list(classes)
    if len(classes) < 2:
        raise ValueError(f"need at least 2 classes, got {len(classes)}")
    total = math.fsum(float(prev) for _, prev in classes)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"class prevalences must sum to 1, got {total!r}")
    conf = as_confidence(conf)
    per_class = [
        n_test_for_class_recall(recall, prev, d, conf, label=f"class {i}")
        for i, (recall, prev) in enumerate(classes)
    ]
    binding = max(range(len(per_class)), key=lambda i: per_class[i].n_test_required)
    best = per_class[binding]
    info = dict(best.intermediates)
    info["binding_class"] = binding
    info["per_class"] = [
        {
            "recall": r.target.anticipated,
            "class_prevalence": float(r.target.prevalence),
            "n_events": r.n_events,
            "n_test_required": r.n_test_required,
        }
        for r in per_class
    ]
    return MetricRequirement(best.target, best.n_events, best.n_test_required, info)


def size_metric(target: MetricTarget, conf: ConfidenceSpec | float = 0.95) -> MetricRequirement:
    conf = as_confidence(conf)
    if target.kind is MetricKind.MEAN_OUTCOME:
        return _mean_requirement(target, conf)
    return _adjusted(target, conf)


def required_test_size(design) -> OverallTestSize:
    """Per-metric requirements and the overall testing-set size (their maximum).

    Ties for the binding metric go to the first metric listed.
    """
    metrics = list(design.metrics)
    if not metrics:
        raise ValueError("design has no metric targets")
    requirements = []
    for i, target in enumerate(metrics):
        try:
            requirements.append(size_metric(target, design.confidence))
        except DesignError as exc:
            raise exc.prefixed(f"metrics[{i}]") from exc
        except (ValueError, ArithmeticError) as exc:
            raise type(exc)(f"metrics[{i}] ({target.label}): {exc}") from exc
    binding = max(range(len(requirements)), key=lambda i: (requirements[i].n_test_required, -i))
    return OverallTestSize(requirements, requirements[binding].n_test_required, binding)
