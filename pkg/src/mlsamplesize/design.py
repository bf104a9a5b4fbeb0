"""Study designs and their config documents.

A config is a YAML (or JSON) mapping::

    metrics:
      - {kind: sensitivity, anticipated: 0.85, prevalence: 0.20, precision: 0.05}
      - {kind: specificity, anticipated: 0.75, prevalence: 0.20, precision: 0.05}
    confidence: 0.95
    split: {ratio: 3}            # or {test_fraction: 0.25} or {parts: "75:25"}
    dropout: 0
    metadata: {title: triage classifier validation}

Proportions may be written as ``0.85``, ``"85%"`` or ``"17/20"``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import jsonschema
import yaml

from .errors import DesignError
from .metric_sizing import MetricTarget
from .rational import format_fraction, to_fraction
from .split_planner import SplitForm, SplitSpec
from .stats_kernel import ConfidenceSpec

__all__ = [
    "StudyDesign",
    "CONFIG_SCHEMA",
    "parse_config",
    "design_from_mapping",
    "design_to_config",
    "dump_config",
]

_NUMBER = {"type": ["number", "string"]}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "mlsamplesize study design",
    "type": "object",
    "required": ["metrics", "split"],
    "additionalProperties": False,
    "properties": {
        "metrics": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["kind", "anticipated", "precision"],
                "additionalProperties": False,
                "properties": {
                    "kind": {"type": "string"},
                    "anticipated": _NUMBER,
                    "prevalence": _NUMBER,
                    "precision": _NUMBER,
                    "label": {"type": "string"},
                },
            },
        },
        "confidence": _NUMBER,
        "split": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "ratio": _NUMBER,
                "test_fraction": _NUMBER,
                "parts": {"type": "string", "pattern": "^[^:]+:[^:]+$"},
                "validation_fraction": _NUMBER,
            },
        },
        "dropout": _NUMBER,
        "metadata": {
            "type": "object",
            "properties": {"title": {"type": "string"}, "notes": {"type": "string"}},
        },
    },
}


@dataclass(frozen=True)
class StudyDesign:
    metrics: tuple[MetricTarget, ...]
    split: SplitSpec
    confidence: ConfidenceSpec = ConfidenceSpec(0.95)
    dropout: Fraction = Fraction(0)
    metadata: dict = field(default_factory=dict, hash=False)

    def __post_init__(self):
        metrics = tuple(self.metrics)
        if not metrics:
            raise DesignError("metrics", "at least one metric target is required")
        object.__setattr__(self, "metrics", metrics)
        conf = self.confidence
        if not isinstance(conf, ConfidenceSpec):
            try:
                conf = ConfidenceSpec(float(to_fraction(conf)))
            except (TypeError, ValueError) as exc:
                raise DesignError("confidence", str(exc)) from None
        object.__setattr__(self, "confidence", conf)
        try:
            dropout = to_fraction(self.dropout)
        except (TypeError, ValueError) as exc:
            raise DesignError("dropout", str(exc)) from None
        if not (0 <= dropout < 1):
            raise DesignError("dropout", f"must lie in [0, 1), got {format_fraction(dropout)}")
        object.__setattr__(self, "dropout", dropout)
        object.__setattr__(self, "metadata", dict(self.metadata or {}))

    @classmethod
    def binary_diagnostic(
        cls, sens, spec, prevalence, precision, split: SplitSpec, confidence=0.95, dropout=0, metadata=None
    ) -> "StudyDesign":
        """Sensitivity plus specificity at one prevalence and one precision."""
        metrics = []
        if sens is not None:
            metrics.append(MetricTarget("sensitivity", sens, precision, prevalence, "sensitivity"))
        if spec is not None:
            metrics.append(MetricTarget("specificity", spec, precision, prevalence, "specificity"))
        return cls(tuple(metrics), split, confidence, dropout, metadata or {})


def _read_source(source) -> str:
    if isinstance(source, Path):
        return source.read_text()
    text = str(source)
    if "\n" not in text and not text.lstrip().startswith("{") and os.path.exists(text):
        return Path(text).read_text()
    return text


def parse_config(source) -> StudyDesign:
    """Parse a config document (path, text, or already-loaded mapping).

    Raises :class:`DesignError` naming the offending field for both
    malformed documents and invariant violations.
    """
    if isinstance(source, dict):
        data = source
    else:
        try:
            data = yaml.safe_load(_read_source(source))
        except OSError as exc:
            raise DesignError("", f"cannot read config: {exc}") from None
        except yaml.YAMLError as exc:
            raise DesignError("", f"malformed config document: {exc}") from None
    return design_from_mapping(data)


def _schema_path(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


def design_from_mapping(data) -> StudyDesign:
    if not isinstance(data, dict):
        raise DesignError("", "config document must be a mapping")
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        first = errors[0]
        raise DesignError(_schema_path(first.absolute_path), first.message)

    metrics = []
    for i, entry in enumerate(data["metrics"]):
        try:
            metrics.append(MetricTarget(
                kind=entry["kind"],
                anticipated=entry["anticipated"],
                precision=entry["precision"],
                prevalence=entry.get("prevalence"),
                label=entry.get("label", ""),
            ))
        except DesignError as exc:
            raise exc.prefixed(f"metrics[{i}]") from None

    split = _split_from_mapping(data["split"])
    return StudyDesign(
        metrics=tuple(metrics),
        split=split,
        confidence=data.get("confidence", 0.95),
        dropout=data.get("dropout", 0),
        metadata=data.get("metadata") or {},
    )


def _split_from_mapping(spec: dict) -> SplitSpec:
    forms = [k for k in ("ratio", "test_fraction", "parts") if k in spec]
    if len(forms) != 1:
        raise DesignError("split", "give exactly one of ratio, test_fraction or parts")
    validation = spec.get("validation_fraction", 0)
    try:
        if forms[0] == "ratio":
            return SplitSpec.ratio(spec["ratio"], validation)
        if forms[0] == "test_fraction":
            return SplitSpec.test_fraction(spec["test_fraction"], validation)
        return SplitSpec.from_parts(spec["parts"], validation)
    except DesignError as exc:
        raise exc.prefixed("split") from None


def _exact_out(value: Fraction):
    """JSON-friendly exact value: int, float when the float is exact, else ``"n/d"``."""
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    as_float = float(value)
    if Fraction(repr(as_float)) == value:
        return as_float
    return format_fraction(value)


def design_to_config(design: StudyDesign) -> dict:
    """Config mapping that :func:`parse_config` turns back into ``design``."""
    metrics = []
    for t in design.metrics:
        entry = {"kind": t.kind.value, "anticipated": t.anticipated}
        if t.prevalence is not None:
            entry["prevalence"] = _exact_out(t.prevalence)
        entry["precision"] = t.precision
        entry["label"] = t.label
        metrics.append(entry)
    split = design.split
    if split.form is SplitForm.RATIO:
        split_out = {"ratio": _exact_out(split.r_tt)}
    else:
        split_out = {"test_fraction": _exact_out(split.p_test)}
    if split.validation_fraction:
        split_out["validation_fraction"] = _exact_out(split.validation_fraction)
    return {
        "metrics": metrics,
        "confidence": design.confidence.level,
        "split": split_out,
        "dropout": _exact_out(design.dropout),
        "metadata": dict(design.metadata),
    }


def dump_config(design: StudyDesign) -> str:
    return json.dumps(design_to_config(design), indent=2)
