"""Normal distribution primitives and binomial confidence-interval half-widths.

Everything here is a pure function on IEEE 754 binary64 floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

__all__ = [
    "ConfidenceSpec",
    "as_confidence",
    "normal_cdf",
    "normal_pdf",
    "normal_quantile",
    "binomial_variance",
    "wald_half_width",
    "wilson_interval",
    "wilson_half_width",
]

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Acklam's rational approximation (relative error ~1.15e-9 before refinement).
_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)
_P_LOW = 0.02425


@dataclass(frozen=True)
class ConfidenceSpec:
    """Two-sided confidence level, e.g. ``ConfidenceSpec(0.95)``."""

    level: float

    def __post_init__(self):
        level = float(self.level)
        if not (0.0 < level < 1.0):
            raise ValueError(f"confidence level must lie in (0, 1), got {self.level!r}")
        object.__setattr__(self, "level", level)

    @property
    def alpha(self) -> float:
        return 1.0 - self.level

    @cached_property
    def z(self) -> float:
        """Upper ``1 - alpha/2`` standard-normal quantile."""
        return _z_for_level(self.level)


def _z_for_level(level: float) -> float:
    # lower tail is computed without cancellation, then reflected
    return -normal_quantile((1.0 - level) / 2.0)


def as_confidence(conf: ConfidenceSpec | float) -> ConfidenceSpec:
    if isinstance(conf, ConfidenceSpec):
        return conf
    return ConfidenceSpec(float(conf))


def normal_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def normal_cdf(x: float) -> float:
    """Standard normal CDF, accurate to well below 1e-12 absolute.

    Uses the complementary error function so neither tail suffers
    cancellation.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"normal_cdf requires a finite argument, got {x!r}")
    return 0.5 * math.erfc(-x / _SQRT2)


def _acklam_lower(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        c, d = _C, _D
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    q = p - 0.5
    r = q * q
    a, b = _A, _B
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / (
        ((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0
    )


def normal_quantile(p: float) -> float:
    """Inverse of :func:`normal_cdf` on the open interval (0, 1).

    A rational approximation seeds two Newton steps against ``normal_cdf``.
    Upper-half probabilities are reflected (``1 - p`` is exact there), so
    the refinement always works on the tail without cancellation.
    """
    p = float(p)
    if not (0.0 < p < 1.0):
        raise ValueError(f"normal_quantile requires 0 < p < 1, got {p!r}")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        return -normal_quantile(1.0 - p)

    x = _acklam_lower(p)
    for _ in range(2):
        x -= (normal_cdf(x) - p) / normal_pdf(x)
    return x


def _check_count(n: int, name: str = "n") -> int:
    if isinstance(n, bool) or int(n) != n:
        raise ValueError(f"{name} must be an integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise ValueError(f"{name} must be >= 1, got {n}")
    return n


def wald_half_width(p_hat: float, n: int, conf: ConfidenceSpec | float = 0.95) -> float:
    """Normal-approximation half-width ``z * sqrt(p_hat (1 - p_hat) / n)``."""
    n = _check_count(n)
    if not (0.0 <= p_hat <= 1.0):
        raise ValueError(f"p_hat must lie in [0, 1], got {p_hat!r}")
    return wald_half_width_z(p_hat, n, as_confidence(conf).z)


def wald_half_width_z(p_hat: float, n: int, z: float) -> float:
    # unchecked variant for hot loops; same expression as wald_half_width
    return z * math.sqrt(binomial_variance(p_hat) / n)


def binomial_variance(p: float) -> float:
    """``p (1 - p)``, evaluated identically for ``p`` and ``1 - p``.

    Working from the larger side ``q`` makes ``1 - q`` exact, so the two
    inputs share one floating-point path and give bit-identical results.
    """
    q = p if p >= 0.5 else 1.0 - p
    return (1.0 - q) * q


def wilson_interval(k: int, n: int, conf: ConfidenceSpec | float = 0.95) -> tuple[float, float]:
    """Wilson score interval for ``k`` successes out of ``n`` trials."""
    n = _check_count(n)
    if isinstance(k, bool) or int(k) != k or not (0 <= k <= n):
        raise ValueError(f"k must be an integer in [0, n={n}], got {k!r}")
    return wilson_interval_z(int(k), n, as_confidence(conf).z)


def wilson_interval_z(k: int, n: int, z: float) -> tuple[float, float]:
    p_hat = k / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p_hat + z2 / (2.0 * n)) / denom
    margin = (z / denom) * math.sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n))
    # clamp so the point estimate always sits inside, even after rounding
    lower = 0.0 if k == 0 else min(max(0.0, center - margin), p_hat)
    upper = 1.0 if k == n else max(min(1.0, center + margin), p_hat)
    return lower, upper


def wilson_half_width(k: int, n: int, conf: ConfidenceSpec | float = 0.95) -> float:
    lower, upper = wilson_interval(k, n, conf)
    return 0.5 * (upper - lower)
