"""Turn a testing-set size into training, validation and total sizes.

All split arithmetic is exact (:class:`fractions.Fraction`); ceilings are
applied to exact quotients, so a 2:1 or 1/3 split never picks up an
off-by-one from binary floating point.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DesignError
from .metric_sizing import MetricRequirement
from .rational import ceil_div, format_exact, format_fraction, to_fraction

__all__ = [
    "SplitForm",
    "SplitSpec",
    "AuditStep",
    "SizingResult",
    "ratio_from_fractions",
    "n_train_from_ratio",
    "total_from_ratio",
    "total_from_test_fraction",
    "apply_dropout",
    "plan_split",
]


class SplitForm(enum.Enum):
    RATIO = "ratio"
    TEST_FRACTION = "test_fraction"


@dataclass(frozen=True)
class SplitSpec:
    """Either a train:test ratio ``r_tt`` or a test fraction ``p_test``.

    ``validation_fraction`` is the share of the training allocation held
    back for hyperparameter tuning.
    """

    form: SplitForm
    r_tt: Fraction | None = None
    p_test: Fraction | None = None
    validation_fraction: Fraction = Fraction(0)

    def __post_init__(self):
        form = SplitForm(self.form)
        object.__setattr__(self, "form", form)
        if form is SplitForm.RATIO:
            if self.r_tt is None or self.p_test is not None:
                raise DesignError("ratio", "ratio form takes r_tt only")
            r = _exact(self.r_tt, "ratio")
            if not r > 0:
                raise DesignError("ratio", f"train:test ratio must be > 0, got {format_fraction(r)}")
            object.__setattr__(self, "r_tt", r)
        else:
            if self.p_test is None or self.r_tt is not None:
                raise DesignError("test_fraction", "test-fraction form takes p_test only")
            p = _exact(self.p_test, "test_fraction")
            if not (0 < p < 1):
                raise DesignError("test_fraction", f"must lie in (0, 1), got {format_fraction(p)}")
            object.__setattr__(self, "p_test", p)
        v = _exact(self.validation_fraction, "validation_fraction")
        if not (0 <= v < 1):
            raise DesignError("validation_fraction", f"must lie in [0, 1), got {format_fraction(v)}")
        object.__setattr__(self, "validation_fraction", v)

    @classmethod
    def ratio(cls, r_tt, validation_fraction=0) -> "SplitSpec":
        return cls(SplitForm.RATIO, r_tt=r_tt, validation_fraction=validation_fraction)

    @classmethod
    def test_fraction(cls, p_test, validation_fraction=0) -> "SplitSpec":
        return cls(SplitForm.TEST_FRACTION, p_test=p_test, validation_fraction=validation_fraction)

    @classmethod
    def from_parts(cls, text: str, validation_fraction=0) -> "SplitSpec":
        """Parse ``"75:25"`` (train:test parts) into a ratio split."""
        train, sep, test = str(text).partition(":")
        if not sep:
            raise DesignError("parts", f"expected <train>:<test>, got {text!r}")
        a, b = _exact(train, "parts"), _exact(test, "parts")
        if not (a > 0 and b > 0):
            raise DesignError("parts", f"both parts must be > 0, got {text!r}")
        total = a + b
        return cls.ratio(ratio_from_fractions(a / total, b / total), validation_fraction)

    @property
    def effective_r_tt(self) -> Fraction:
        if self.form is SplitForm.RATIO:
            return self.r_tt
        return (1 - self.p_test) / self.p_test

    @property
    def effective_p_test(self) -> Fraction:
        if self.form is SplitForm.TEST_FRACTION:
            return self.p_test
        return 1 / (1 + self.r_tt)


def _exact(value, name: str) -> Fraction:
    try:
        return to_fraction(value)
    except (TypeError, ValueError) as exc:
        raise DesignError(name, str(exc)) from None


@dataclass(frozen=True)
class AuditStep:
    step: str
    formula: str
    inputs: dict
    value: object

    def as_dict(self) -> dict:
        return {"step": self.step, "formula": self.formula, "inputs": self.inputs, "value": self.value}


@dataclass
class SizingResult:
    n_test: int
    n_train: int
    n_val: int
    n_total: int
    n_total_adjusted: int
    per_metric: list[MetricRequirement] = field(default_factory=list)
    audit: list[AuditStep] = field(default_factory=list)
    binding: int | None = None

    def __post_init__(self):
        if self.n_total != self.n_test + self.n_train + self.n_val:
            raise AssertionError("n_total must equal n_test + n_train + n_val")


def _positive_int(n, name: str = "n_test") -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"{name} must be an integer >= 1, got {n!r}")
    return int(n)


def ratio_from_fractions(train_fraction, test_fraction) -> Fraction:
    """``r_tt = train / test`` for fractions that sum exactly to one."""
    train, test = to_fraction(train_fraction), to_fraction(test_fraction)
    if not (train > 0 and test > 0):
        raise ValueError("train and test fractions must both be > 0")
    if train + test != 1:
        raise ValueError(f"fractions must sum to 1, got {format_fraction(train + test)}")
    return train / test


def n_train_from_ratio(n_test: int, r_tt) -> int:
    n_test = _positive_int(n_test)
    r = to_fraction(r_tt)
    if not r > 0:
        raise ValueError(f"r_tt must be > 0, got {format_fraction(r)}")
    return ceil_div(n_test * r, 1)


def total_from_ratio(n_test: int, r_tt) -> int:
    return _positive_int(n_test) + n_train_from_ratio(n_test, r_tt)


def total_from_test_fraction(n_test: int, p_test) -> int:
    n_test = _positive_int(n_test)
    p = to_fraction(p_test)
    if not (0 < p < 1):
        raise ValueError(f"p_test must lie in (0, 1), got {format_fraction(p)}")
    return ceil_div(n_test, p)


def apply_dropout(n: int, dropout=0) -> int:
    """Inflate a recruitment target so ``n`` remain after attrition."""
    n = _positive_int(n, "n")
    rate = to_fraction(dropout)
    if not (0 <= rate < 1):
        raise ValueError(f"dropout must lie in [0, 1), got {format_fraction(rate)}")
    return ceil_div(n, 1 - rate)


def plan_split(
    n_test: int,
    split: SplitSpec,
    per_metric: list[MetricRequirement] | None = None,
    dropout=0,
    binding: int | None = None,
) -> SizingResult:
    n_test = _positive_int(n_test)
    r_tt = split.effective_r_tt
    audit = []

    n_train_total = n_train_from_ratio(n_test, r_tt)
    audit.append(AuditStep(
        "n_train", "ceil(n_test * r_tt)",
        {"n_test": n_test, "r_tt": format_exact(r_tt)},
        n_train_total,
    ))
    n_total = n_test + n_train_total
    if split.form is SplitForm.TEST_FRACTION:
        by_fraction = total_from_test_fraction(n_test, split.p_test)
        audit.append(AuditStep(
            "n_total", "ceil(n_test / p_test)",
            {"n_test": n_test, "p_test": format_exact(split.p_test)},
            by_fraction,
        ))
        # exact arithmetic makes the two routes agree
        assert by_fraction == n_total
    else:
        audit.append(AuditStep(
            "n_total", "n_test + n_train",
            {"n_test": n_test, "n_train": n_train_total},
            n_total,
        ))

    n_val = 0
    if split.validation_fraction:
        n_val = ceil_div(n_train_total * split.validation_fraction, 1)
        audit.append(AuditStep(
            "n_val", "ceil(n_train * validation_fraction)",
            {"n_train": n_train_total, "validation_fraction": format_exact(split.validation_fraction)},
            n_val,
        ))
    n_train = n_train_total - n_val

    adjusted = apply_dropout(n_total, dropout)
    audit.append(AuditStep(
        "n_total_adjusted", "ceil(n_total / (1 - dropout))",
        {"n_total": n_total, "dropout": format_exact(to_fraction(dropout))},
        adjusted,
    ))
    return SizingResult(
        n_test=n_test,
        n_train=n_train,
        n_val=n_val,
        n_total=n_total,
        n_total_adjusted=adjusted,
        per_metric=list(per_metric or []),
        audit=audit,
        binding=binding,
    )
