"""Compose sizing runs and render them as tables, structured JSON or CSV."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .design import StudyDesign, design_to_config
from .errors import DesignError
from .mc_verifier import SimulationReport
from .metric_sizing import MetricKind, MetricRequirement, required_test_size
from .rational import format_exact, format_fraction, to_fraction
from .split_planner import AuditStep, SizingResult, SplitForm, SplitSpec, plan_split
from .stats_kernel import ConfidenceSpec

__all__ = [
    "SweepGrid",
    "SweepRow",
    "SweepTable",
    "SWEEP_AXES",
    "OUTPUT_SCHEMA",
    "SIZING_CSV_HEADER",
    "SWEEP_CSV_HEADER",
    "SIMULATION_CSV_HEADER",
    "run_size",
    "run_sweep",
    "substitute",
    "sizing_document",
    "simulation_document",
    "sweep_document",
    "render_report",
]

ARITHMETIC = (
    "IEEE 754 binary64 for statistics; exact rationals for split fractions, "
    "prevalence adjustment and dropout"
)

# multiclass recall and mean sizing extend the binary-diagnostic method by analogy
EXTENSION = "extrapolated extension of the binary-diagnostic method"

SWEEP_AXES = ("precision", "prevalence", "confidence.level", "anticipated_value", "r_tt")
_AXIS_ALIASES = {"confidence": "confidence.level", "anticipated": "anticipated_value", "ratio": "r_tt"}

SIZING_CSV_HEADER = (
    "label", "kind", "anticipated", "prevalence", "precision", "n_events", "n_test_required", "binding",
)
SWEEP_CSV_HEADER = (
    "axis", "value", "n_test", "n_train", "n_val", "n_total", "n_total_adjusted", "binding_metric", "error",
)
SIMULATION_CSV_HEADER = (
    "label", "kind", "n_scored", "mean_events", "half_width_mean", "half_width_sd", "half_width_p5",
    "half_width_p50", "half_width_p95", "attainment_fraction", "coverage", "zero_event_fraction",
    "anticipated_attainment_fraction",
)

_STATS = {
    "type": "object",
    "properties": {k: {"type": ["number", "null"]} for k in ("mean", "sd", "min", "p5", "p50", "p95", "max")},
    "required": ["mean", "sd", "min", "p5", "p50", "p95", "max"],
}

OUTPUT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "mlsamplesize sizing output",
    "type": "object",
    "required": [
        "design", "per_metric", "binding_metric", "split", "n_test", "n_train", "n_val",
        "n_total", "n_total_adjusted", "audit", "metadata",
    ],
    "properties": {
        "design": {"type": "object"},
        "per_metric": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "kind", "n_events", "n_test_required", "binding", "intermediates"],
                "properties": {
                    "label": {"type": "string"},
                    "kind": {"type": "string"},
                    "n_events": {"type": "integer", "minimum": 1},
                    "n_test_required": {"type": "integer", "minimum": 1},
                    "binding": {"type": "boolean"},
                    "intermediates": {"type": "object"},
                },
            },
        },
        "binding_metric": {"type": "string"},
        "split": {"type": "object"},
        "n_test": {"type": "integer", "minimum": 1},
        "n_train": {"type": "integer", "minimum": 0},
        "n_val": {"type": "integer", "minimum": 0},
        "n_total": {"type": "integer", "minimum": 1},
        "n_total_adjusted": {"type": "integer", "minimum": 1},
        "audit": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["step", "formula", "inputs", "value"],
            },
        },
        "simulation": {
            "type": "object",
            "required": ["n_test", "ci_method", "prevalence_mode", "metrics", "rng_metadata"],
            "properties": {
                "metrics": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": [
                            "label", "half_width", "attainment_fraction", "coverage",
                            "zero_event_fraction",
                        ],
                        "properties": {"half_width": _STATS, "anticipated_half_width": _STATS},
                    },
                },
                "rng_metadata": {"type": "object", "required": ["seed", "generator", "replications"]},
            },
        },
        "metadata": {"type": "object"},
    },
}


# -- running ---------------------------------------------------------------

def _metric_steps(req: MetricRequirement, conf: ConfidenceSpec) -> list[AuditStep]:
    t, info = req.target, req.intermediates
    z = info["z"]
    if t.kind is MetricKind.MEAN_OUTCOME:
        return [AuditStep(
            f"n_test_required[{t.label}]", "ceil((z * sd / d)^2)",
            {"sd": t.anticipated, "d": t.precision, "confidence": conf.level, "z": z, "basis": EXTENSION},
            req.n_test_required,
        )]
    steps = [AuditStep(
        f"n_events[{t.label}]", "ceil(z^2 * p * (1 - p) / d^2)",
        {"p": t.anticipated, "d": t.precision, "confidence": conf.level, "z": z,
         "pre_ceiling": info["n_events_real"]},
        req.n_events,
    )]
    share_name = {MetricKind.SPECIFICITY: "(1 - prevalence)", MetricKind.OVERALL_PROPORTION: "1"}
    steps.append(AuditStep(
        f"n_test_required[{t.label}]", f"ceil(n_events / {share_name.get(t.kind, 'prevalence')})",
        {"n_events": req.n_events, "share": info["share"], "pre_ceiling": info["n_test_real"]},
        req.n_test_required,
    ))
    if t.kind is MetricKind.CLASS_RECALL:
        steps[-1].inputs["basis"] = EXTENSION
    if "single_ceiling_n_test" in info:
        steps.append(AuditStep(
            f"single_ceiling_alternative[{t.label}]",
            "ceil(z^2 * p * (1 - p) / (d^2 * share)); not used",
            {"n_events_real": info["n_events_real"], "share": info["share"]},
            info["single_ceiling_n_test"],
        ))
    return steps


def run_size(design: StudyDesign) -> SizingResult:
    """Testing-set requirement per metric, then the train/validation/total split."""
    sized = required_test_size(design)
    result = plan_split(sized.n_test, design.split, sized.requirements, design.dropout, sized.binding)
    steps = []
    for req in sized.requirements:
        steps.extend(_metric_steps(req, design.confidence))
    steps.append(AuditStep(
        "n_test", "max over metrics of n_test_required",
        {"binding_metric": sized.binding_requirement.target.label,
         "candidates": [r.n_test_required for r in sized.requirements]},
        sized.n_test,
    ))
    result.audit[:0] = steps
    return result


@dataclass(frozen=True)
class SweepGrid:
    """Values to substitute for one design field.

    ``metric`` optionally restricts ``precision``, ``prevalence`` and
    ``anticipated_value`` substitutions to the metric with that label.
    """

    axis: str
    values: tuple
    metric: str | None = None

    def __post_init__(self):
        axis = _AXIS_ALIASES.get(self.axis, self.axis)
        if axis not in SWEEP_AXES:
            raise DesignError("axis", f"unknown sweep axis {self.axis!r} (expected one of {', '.join(SWEEP_AXES)})")
        object.__setattr__(self, "axis", axis)
        values = tuple(self.values)
        if not values:
            raise DesignError("values", "a sweep needs at least one value")
        parsed = []
        for i, v in enumerate(values):
            try:
                x = to_fraction(v)
            except (TypeError, ValueError) as exc:
                raise DesignError(f"values[{i}]", str(exc)) from None
            if not x > 0:
                raise DesignError(f"values[{i}]", f"must be > 0, got {v!r}")
            if axis in ("prevalence", "confidence.level") and not x < 1:
                raise DesignError(f"values[{i}]", f"must lie in (0, 1), got {v!r}")
            parsed.append(x)
        object.__setattr__(self, "values", tuple(parsed))


@dataclass
class SweepRow:
    value: Fraction
    result: SizingResult | None
    error: str | None = None


@dataclass
class SweepTable:
    design: StudyDesign
    grid: SweepGrid
    rows: list[SweepRow]


def substitute(design: StudyDesign, axis: str, value, metric: str | None = None) -> StudyDesign:
    """Copy of ``design`` with one field replaced (raises on invalid values)."""
    axis = _AXIS_ALIASES.get(axis, axis)
    value = to_fraction(value)
    if axis == "confidence.level":
        return dataclasses.replace(design, confidence=ConfidenceSpec(float(value)))
    if axis == "r_tt":
        split = SplitSpec.ratio(value, design.split.validation_fraction)
        return dataclasses.replace(design, split=split)

    field_name = {"precision": "precision", "prevalence": "prevalence", "anticipated_value": "anticipated"}[axis]
    new_value = value if axis == "prevalence" else float(value)
    metrics, touched = [], False
    for i, t in enumerate(design.metrics):
        applies = metric is None or t.label == metric
        if axis == "prevalence":
            applies = applies and t.kind.needs_prevalence
        if applies:
            try:
                t = dataclasses.replace(t, **{field_name: new_value})
            except DesignError as exc:
                raise exc.prefixed(f"metrics[{i}]") from None
            touched = True
        metrics.append(t)
    if not touched:
        raise DesignError("metric", f"no metric matches sweep axis {axis!r}" + (f" and label {metric!r}" if metric else ""))
    return dataclasses.replace(design, metrics=tuple(metrics))


def run_sweep(design: StudyDesign, grid: SweepGrid) -> SweepTable:
    """One independently computed row per grid value, in the order given."""
    rows = []
    for value in grid.values:
        try:
            rows.append(SweepRow(value, run_size(substitute(design, grid.axis, value, grid.metric))))
        except (ValueError, ArithmeticError) as exc:
            rows.append(SweepRow(value, None, str(exc)))
    return SweepTable(design, grid, rows)


# -- structured documents --------------------------------------------------

def _jsonable(value):
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _metric_entry(req: MetricRequirement, binding: bool) -> dict:
    t = req.target
    return {
        "label": t.label,
        "kind": t.kind.value,
        "anticipated": t.anticipated,
        "prevalence": None if t.prevalence is None else float(t.prevalence),
        "precision": t.precision,
        "n_events": req.n_events,
        "n_test_required": req.n_test_required,
        "binding": binding,
        "intermediates": _jsonable(req.intermediates),
    }


def _split_summary(split: SplitSpec) -> dict:
    return {
        "form": split.form.value,
        "r_tt": format_exact(split.effective_r_tt),
        "p_test": format_exact(split.effective_p_test),
        "validation_fraction": format_exact(split.validation_fraction),
    }


def sizing_document(result: SizingResult, design: StudyDesign, simulation: SimulationReport | None = None) -> dict:
    """Structured output; keys are emitted in exactly this order."""
    binding = result.binding if result.binding is not None else 0
    doc = {
        "design": design_to_config(design),
        "per_metric": [_metric_entry(r, i == binding) for i, r in enumerate(result.per_metric)],
        "binding_metric": result.per_metric[binding].target.label if result.per_metric else "",
        "split": _split_summary(design.split),
        "n_test": result.n_test,
        "n_train": result.n_train,
        "n_val": result.n_val,
        "n_total": result.n_total,
        "n_total_adjusted": result.n_total_adjusted,
        "audit": [_jsonable(step.as_dict()) for step in result.audit],
    }
    if simulation is not None:
        doc["simulation"] = simulation_document(simulation)
    doc["metadata"] = {"arithmetic": ARITHMETIC, "version": __version__}
    return doc


def simulation_document(report: SimulationReport) -> dict:
    return {
        "n_test": report.n_test,
        "ci_method": report.ci_method,
        "prevalence_mode": report.prevalence_mode,
        "confidence": report.confidence,
        "metrics": [dataclasses.asdict(m) for m in report.metrics],
        "rng_metadata": dict(report.rng_metadata),
        "notes": list(report.notes),
    }


def sweep_document(table: SweepTable) -> dict:
    rows = []
    for row in table.rows:
        entry = {"value": format_exact(row.value)}
        if row.result is None:
            entry["error"] = row.error
        else:
            entry["result"] = sizing_document(row.result, substitute(table.design, table.grid.axis, row.value, table.grid.metric))
        rows.append(entry)
    return {
        "design": design_to_config(table.design),
        "sweep": {"axis": table.grid.axis, "metric": table.grid.metric,
                  "values": [format_exact(v) for v in table.grid.values]},
        "rows": rows,
        "metadata": {"arithmetic": ARITHMETIC, "version": __version__},
    }


# -- rendering -------------------------------------------------------------

def _num(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return format_fraction(x)
    return f"{x:.6g}"


def _grid(header, rows, indent="  ") -> list[str]:
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return [indent + "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]


def _format_inputs(inputs: dict) -> str:
    parts = []
    for k, v in inputs.items():
        if isinstance(v, list):
            v = "[" + ", ".join(_num(x) for x in v) + "]"
        elif not isinstance(v, str):
            v = _num(v)
        parts.append(f"{k}={v}")
    return " ".join(parts)


def _sizing_table(result: SizingResult, design: StudyDesign) -> list[str]:
    doc = sizing_document(result, design)
    title = design.metadata.get("title") or "Sample size plan"
    split = doc["split"]
    lines = [
        title,
        f"confidence level {_num(design.confidence.level)}; train:test ratio r_tt = {split['r_tt']}, "
        f"test fraction p_test = {split['p_test']}; validation fraction {split['validation_fraction']}; "
        f"dropout {format_exact(design.dropout)}",
        "",
        "Testing-set requirement per metric",
    ]
    rows = [
        (m["label"], m["kind"], _num(m["anticipated"]), _num(m["prevalence"]), _num(m["precision"]),
         m["n_events"], m["n_test_required"], "*" if m["binding"] else "")
        for m in doc["per_metric"]
    ]
    lines += _grid(SIZING_CSV_HEADER, rows)
    lines += ["", f"binding metric: {doc['binding_metric']}", ""]
    lines += _grid(("quantity", "size"), [
        ("n_test", result.n_test), ("n_train", result.n_train), ("n_val", result.n_val),
        ("n_total", result.n_total), ("n_total_adjusted", result.n_total_adjusted),
    ])
    lines += ["", "Audit trail"]
    lines += _grid(("step", "formula", "inputs", "value"), [
        (s.step, s.formula, _format_inputs(s.inputs), _num(s.value)) for s in result.audit
    ])
    return lines


def _simulation_table(report: SimulationReport) -> list[str]:
    meta = report.rng_metadata
    lines = [
        f"Monte Carlo verification at n_test {report.n_test}: {meta['replications']} replications, "
        f"{report.ci_method} intervals, {report.prevalence_mode} prevalence",
        f"rng: {meta['generator']}; {meta['substreams']}; seed {meta['seed']}; numpy {meta['numpy_version']}",
    ]
    rows = []
    for m in report.metrics:
        hw = m.half_width
        rows.append((
            m.label, m.kind, m.n_scored, _num(m.mean_events), _num(hw["mean"]), _num(hw["sd"]),
            _num(hw["p5"]), _num(hw["p50"]), _num(hw["p95"]), _num(m.attainment_fraction),
            _num(m.coverage), _num(m.zero_event_fraction), _num(m.anticipated_attainment_fraction),
        ))
    lines += _grid(SIMULATION_CSV_HEADER, rows)
    lines += [f"note: {n}" for n in report.notes]
    return lines


def _sweep_table(table: SweepTable) -> list[str]:
    lines = [f"Sweep over {table.grid.axis}" + (f" (metric {table.grid.metric})" if table.grid.metric else "")]
    lines += _grid(SWEEP_CSV_HEADER, _sweep_rows(table))
    return lines


def _sweep_rows(table: SweepTable) -> list[tuple]:
    rows = []
    for row in table.rows:
        value = format_exact(row.value)
        r = row.result
        if r is None:
            rows.append((table.grid.axis, value, "", "", "", "", "", "", row.error))
        else:
            label = r.per_metric[r.binding].target.label if r.per_metric else ""
            rows.append((table.grid.axis, value, r.n_test, r.n_train, r.n_val, r.n_total, r.n_total_adjusted, label, ""))
    return rows


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def render_report(
    result,
    format: str = "table",
    design: StudyDesign | None = None,
    simulation: SimulationReport | None = None,
) -> str:
    """Render a :class:`SizingResult`, :class:`SimulationReport` or :class:`SweepTable`.

    ``format`` is ``"table"``, ``"structured"`` (JSON) or ``"csv"``.
    Sizing results need their ``design`` for the structured echo and table
    header; ``simulation`` attaches a verification run to a sizing report.
    CSV emits one row per metric (sizing, simulation) or per sweep value.
    """
    if format not in ("table", "structured", "csv"):
        raise ValueError(f"unknown format {format!r}")

    if isinstance(result, SweepTable):
        if format == "structured":
            return _dump(sweep_document(result))
        if format == "csv":
            return _csv(SWEEP_CSV_HEADER, _sweep_rows(result))
        return "\n".join(_sweep_table(result)) + "\n"

    if isinstance(result, SimulationReport):
        if format == "structured":
            return _dump(simulation_document(result))
        if format == "csv":
            return _csv(SIMULATION_CSV_HEADER, _simulation_rows(result))
        return "\n".join(_simulation_table(result)) + "\n"

    if not isinstance(result, SizingResult):
        raise TypeError(f"cannot render {type(result).__name__}")
    if design is None:
        raise ValueError("rendering a sizing result needs its design")
    if format == "structured":
        return _dump(sizing_document(result, design, simulation))
    if format == "csv":
        if simulation is not None:
            return _csv(SIMULATION_CSV_HEADER, _simulation_rows(simulation))
        doc = sizing_document(result, design)
        return _csv(SIZING_CSV_HEADER, [
            (m["label"], m["kind"], m["anticipated"], "" if m["prevalence"] is None else m["prevalence"],
             m["precision"], m["n_events"], m["n_test_required"], str(m["binding"]).lower())
            for m in doc["per_metric"]
        ])
    lines = _sizing_table(result, design)
    if simulation is not None:
        lines += [""] + _simulation_table(simulation)
    return "\n".join(lines) + "\n"


def _simulation_rows(report: SimulationReport) -> list[tuple]:
    rows = []
    for m in report.metrics:
        hw = m.half_width
        rows.append((
            m.label, m.kind, m.n_scored, m.mean_events, hw["mean"], hw["sd"], hw["p5"], hw["p50"],
            hw["p95"], m.attainment_fraction, "" if m.coverage is None else m.coverage,
            m.zero_event_fraction, m.anticipated_attainment_fraction,
        ))
    return rows
