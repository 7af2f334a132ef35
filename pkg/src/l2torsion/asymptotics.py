"""Degrees, leading coefficients and the volume bounds sandwich.

All fits work on log value against log t, so they are invariant under the
monomial ambiguity of the torsion representative.  The gauge exponent k is
resolved through the reciprocal-symmetry fit when the class is rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .torsion import TorsionCurve


@dataclass
class FitReport:
    k_minus: float
    k_plus: float
    thurston_estimate: float
    leading_coefficient: float | None = None
    confidence_band: tuple[float, float] | None = None
    gauge_k: float | None = None
    residuals: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "k_minus": self.k_minus,
            "k_plus": self.k_plus,
            "thurston_estimate": self.thurston_estimate,
            "leading_coefficient": self.leading_coefficient,
            "confidence_band": self.confidence_band,
            "gauge_k": self.gauge_k,
            "residuals": self.residuals,
        }


@dataclass
class BoundsRecord:
    lower: float  # A(N, phi)
    leading: float | None
    leading_band: tuple[float, float] | None
    upper: float | None
    volume_cap: float | None
    lower_ok: bool
    upper_ok: bool
    volume_cap_ok: bool

    @property
    def satisfied(self) -> bool:
        return self.lower_ok and self.upper_ok and self.volume_cap_ok

    def to_json(self) -> dict:
        return {
            "lower_A": self.lower,
            "leading_C": self.leading,
            "leading_band": self.leading_band,
            "upper": self.upper,
            "volume_cap": self.volume_cap,
            "lower_ok": self.lower_ok,
            "upper_ok": self.upper_ok,
            "volume_cap_ok": self.volume_cap_ok,
            "satisfied": self.satisfied,
        }


def _least_squares_line(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float, float]:
    """Fit y = a x + b; returns (a, b, rms residual)."""
    n = len(xs)
    if n < 2:
        raise ValueError("need at least two points for a line fit")
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    if sxx == 0:
        raise ValueError("degenerate fit: all x equal")
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    a = sxy / sxx
    b = mean_y - a * mean_x
    rms = math.sqrt(sum((y - (a * x + b)) ** 2 for x, y in zip(xs, ys)) / n)
    return a, b, rms


def _usable_points(curve: TorsionCurve) -> list[tuple[float, float]]:
    return [(p.t, p.value) for p in curve.points if not p.flagged and p.value > 0]


def degree_fit(curve: TorsionCurve, window: float = 0.25, min_points: int = 3) -> FitReport:
    """End slopes of log value vs log t over the lowest/highest window fraction.

    thurston_estimate = top slope - bottom slope.
    """
    pts = _usable_points(curve)
    if len(pts) < 2 * min_points:
        raise ValueError(
            f"need at least {2 * min_points} usable points, have {len(pts)}"
        )
    count = max(min_points, int(round(window * len(pts))))
    low = pts[:count]
    high = pts[-count:]
    a_low, _, r_low = _least_squares_line(
        [math.log(t) for t, _ in low], [math.log(v) for _, v in low]
    )
    a_high, _, r_high = _least_squares_line(
        [math.log(t) for t, _ in high], [math.log(v) for _, v in high]
    )
    return FitReport(
        k_minus=a_low,
        k_plus=a_high,
        thurston_estimate=a_high - a_low,
        residuals={"low_rms": r_low, "high_rms": r_high, "window_points": count},
    )


def symmetry_fit(curve: TorsionCurve, rel_tol: float = 1e-6) -> tuple[float, float, float]:
    """Fit log tau(t) - log tau(1/t) = a log t + b over reciprocal grid pairs.

    For a rational class the torsion satisfies tau(t) = t^(2k + x) tau(1/t)
    for the representative's gauge k, so a estimates 2k + x and b should
    vanish; the rms residual measures the symmetry defect.
    """
    pts = _usable_points(curve)
    by_t = {t: v for t, v in pts}
    xs: list[float] = []
    ys: list[float] = []
    ts = sorted(by_t)
    for t in ts:
        if t >= 1.0:
            continue
        # find the reciprocal partner
        target = 1.0 / t
        partner = min(ts, key=lambda s: abs(s - target))
        if abs(partner - target) > rel_tol * target:
            continue
        xs.append(math.log(partner))
        ys.append(math.log(by_t[partner]) - math.log(by_t[t]))
    if len(xs) < 2:
        raise ValueError("grid has too few reciprocal pairs for the symmetry fit")
    a, b, rms = _least_squares_line(xs, ys)
    return a, b, rms


def leading_fit(
    curve: TorsionCurve,
    x: float,
    window: float = 0.25,
    t_min: float | None = None,
    gauge_k: float | None = None,
) -> FitReport:
    """Leading coefficient: tau(t) ~ C t^(k + x) on the top window.

    The gauge k comes from the symmetry fit unless supplied; C is the
    geometric mean of the windowed pointwise values tau(t) / t^(k + x) and the
    confidence band is their min/max spread.
    """
    pts = _usable_points(curve)
    if gauge_k is None:
        a, b, rms = symmetry_fit(curve)
        gauge_k = (a - x) / 2.0
        sym_resid = rms
    else:
        sym_resid = None
    if t_min is not None:
        top = [(t, v) for t, v in pts if t >= t_min]
    else:
        count = max(3, int(round(window * len(pts))))
        top = pts[-count:]
    if len(top) < 2:
        raise ValueError("top window has too few points for the leading fit")
    cs = [v / t ** (gauge_k + x) for t, v in top]
    log_cs = [math.log(c) for c in cs]
    c_mean = math.exp(sum(log_cs) / len(log_cs))
    band = (min(cs), max(cs))
    slope, _, fit_rms = _least_squares_line(
        [math.log(t) for t, _ in top], [math.log(v) for _, v in top]
    )
    return FitReport(
        k_minus=float("nan"),
        k_plus=slope,
        thurston_estimate=float("nan"),
        leading_coefficient=c_mean,
        confidence_band=band,
        gauge_k=gauge_k,
        residuals={
            "symmetry_rms": sym_resid,
            "top_rms": fit_rms,
            "window_points": len(top),
        },
    )


def scaling_defect(
    curve_scaled: TorsionCurve,
    curve_base: TorsionCurve,
    r: float,
) -> tuple[float, float]:
    """Fit log curve_scaled(t) - log curve_base(t^r) = c log t; returns (c, rms).

    The scaling law says the curve for r*phi at t matches the curve for phi at
    t^r up to a monomial, so the residual should vanish.
    """
    base = {round(t, 12): v for t, v in _usable_points(curve_base)}
    xs = []
    ys = []
    for t, v in _usable_points(curve_scaled):
        key = round(t**r, 12)
        match = None
        for bt, bv in base.items():
            if abs(bt - key) <= 1e-9 * max(1.0, abs(key)):
                match = bv
                break
        if match is None or match <= 0 or v <= 0:
            continue
        xs.append(math.log(t))
        ys.append(math.log(v) - math.log(match))
    if len(xs) < 2:
        raise ValueError("curves share too few grid points after rescaling")
    c, b, rms = _least_squares_line(xs, ys)
    return c, math.sqrt(rms**2 + b**2 / max(1.0, len(xs)))


def volume_bound(jsj_records: Sequence[tuple[float, bool]]) -> float:
    """A(N, phi): product of exp(vol / 6 pi) over pieces where phi restricts to
    zero; the empty product is 1."""
    total = 1.0
    for volume, phi_restriction_zero in jsj_records:
        if volume < 0:
            raise ValueError("volumes must be nonnegative")
        if phi_restriction_zero:
            total *= math.exp(volume / (6.0 * math.pi))
    return total


def bounds_report(
    lower: float,
    leading: FitReport | float,
    upper: float | None = None,
    total_volume: float | None = None,
    band_slack: float = 0.0,
) -> BoundsRecord:
    """Check 1 <= A <= C <= upper within the fit confidence band, and
    C <= exp(vol/6pi) when the total volume is known."""
    if isinstance(leading, FitReport):
        c_value = leading.leading_coefficient
        band = leading.confidence_band or (c_value, c_value)
    else:
        c_value = float(leading)
        band = (c_value, c_value)
    lo_band = band[0] * (1 - band_slack)
    hi_band = band[1] * (1 + band_slack)
    lower_ok = lower >= 1.0 and (c_value is not None and hi_band >= lower)
    upper_ok = True
    if upper is not None and c_value is not None:
        upper_ok = lo_band <= upper
    volume_cap = None
    volume_cap_ok = True
    if total_volume is not None and c_value is not None:
        volume_cap = math.exp(total_volume / (6.0 * math.pi))
        volume_cap_ok = lo_band <= volume_cap
    return BoundsRecord(
        lower=lower,
        leading=c_value,
        leading_band=band,
        upper=upper,
        volume_cap=volume_cap,
        lower_ok=lower_ok,
        upper_ok=upper_ok,
        volume_cap_ok=volume_cap_ok,
    )
