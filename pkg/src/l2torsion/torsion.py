"""Torsion functions assembled from presentations.

The working formula is the deficiency-one evaluation: after dropping a
declared redundant relator the presentation has one more generator than
relators; the value at t is

    det(twisted Fox matrix with column j deleted) / det(t^phi(g_j) g_j - 1)

with the denominator evaluated exactly as max{1, t^|phi(g_j)|}.  The
representative is fixed by the dropped generator and relator; comparisons to
closed forms go through monomial-invariant fits, never raw values.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from .fkdet import (
    DEFAULT_DROP_TOL,
    DEFAULT_ORDER_CAP,
    DeterminantEstimate,
    EstimatorError,
    default_series_scale,
    det_quotient_family,
    det_rules,
    det_series,
)
from .groupring import GroupRingMatrix, TwistParameters, fox_matrix
from .presentations import CohomologyClass, GroupPresentation, validate_class
from .quotients import FiniteQuotient
from .wordproblem import QuotientOracle, has_infinite_order
from .words import Word


def log_grid(lo: float, hi: float, count: int) -> tuple[float, ...]:
    """Log-spaced grid, endpoints included."""
    if not (lo > 0 and hi > lo and count >= 2):
        raise ValueError("need 0 < lo < hi and count >= 2")
    ratio = math.log(hi / lo)
    return tuple(lo * math.exp(ratio * i / (count - 1)) for i in range(count))


DEFAULT_GRID = log_grid(0.125, 8.0, 17)


@dataclass
class EstimatorConfig:
    """How determinants are estimated along a curve."""

    method: str = "auto"  # rules | quotient | series | auto
    quotients: tuple[FiniteQuotient, ...] = ()
    series_depth: int = 40
    series_scale: float | None = None  # K; default 1.001 * opnorm bound
    drop_tol: float = DEFAULT_DROP_TOL
    order_cap: int = DEFAULT_ORDER_CAP
    workers: int = 1


@dataclass
class TorsionSpec:
    presentation: GroupPresentation
    phi: CohomologyClass
    grid: tuple[float, ...] = DEFAULT_GRID
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    dropped_generator: int | None = None
    dropped_relator: int | None = None

    def __post_init__(self) -> None:
        if list(self.grid) != sorted(set(self.grid)):
            raise ValueError("grid must be strictly increasing")
        if any(t <= 0 for t in self.grid):
            raise ValueError("grid values must be positive")
        if not validate_class(self.presentation, self.phi):
            raise ValueError("phi does not vanish on all relators")
        if self.dropped_generator is not None and not (
            0 <= self.dropped_generator < self.presentation.rank
        ):
            raise ValueError("dropped generator index out of range")

    def working_presentation(self) -> GroupPresentation:
        p = self.presentation
        if self.dropped_relator is not None:
            p = p.drop_relator(self.dropped_relator)
        return p

    def generator_to_drop(self) -> int:
        if self.dropped_generator is not None:
            return self.dropped_generator
        for j, w in enumerate(self.phi.weights):
            if w != 0:
                return j
        raise ValueError(
            "no generator with nonzero phi; declare dropped_generator explicitly"
        )

    def to_json(self) -> dict:
        return {
            "presentation": self.presentation.name,
            "generators": list(self.presentation.generator_names),
            "relators": [
                r.format(self.presentation.generator_names)
                for r in self.presentation.relators
            ],
            "phi": [str(w) for w in self.phi.weights],
            "grid": list(self.grid),
            "method": self.estimator.method,
            "quotient_orders": [q.order for q in self.estimator.quotients],
            "series_depth": self.estimator.series_depth,
            "dropped_generator": self.dropped_generator,
            "dropped_relator": self.dropped_relator,
        }


@dataclass
class CurvePoint:
    t: float
    value: float
    estimate: DeterminantEstimate
    flagged: bool = False
    note: str = ""


@dataclass
class TorsionCurve:
    spec: TorsionSpec | None
    points: list[CurvePoint]

    def values(self) -> list[tuple[float, float]]:
        return [(p.t, p.value) for p in self.points]

    def unflagged(self) -> list[CurvePoint]:
        return [p for p in self.points if not p.flagged and p.value > 0]


# ---------------------------------------------------------------------------
# chain-complex torsion: alternating product of boundary determinants
# ---------------------------------------------------------------------------


def chain_torsion(
    boundaries: Sequence[GroupRingMatrix],
    estimator: Callable[[GroupRingMatrix], DeterminantEstimate],
    oracle=None,
) -> DeterminantEstimate:
    """tau = prod det(boundary_i)^((-1)^i), boundaries listed from degree 1 up.

    Composability of dimensions is enforced; the vanishing of consecutive
    compositions is the caller's responsibility (warn-only check when an
    oracle is supplied).
    """
    for a, b in zip(boundaries, boundaries[1:]):
        if b.cols != a.rows:
            raise EstimatorError(
                f"boundary dimensions do not compose: {b.rows}x{b.cols} then {a.rows}x{a.cols}"
            )
    log_total = 0.0
    heuristic = False
    diagnostics: list[float] = []
    for i, boundary in enumerate(boundaries, start=1):
        est = estimator(boundary)
        diagnostics.append(est.value)
        heuristic = heuristic or est.heuristic
        if est.value == 0.0:
            return DeterminantEstimate(
                value=0.0,
                method="schur-composite",
                params={"vanishing_factor": i},
                diagnostics=diagnostics,
                heuristic=heuristic,
            )
        log_total += (-1) ** i * math.log(est.value)
    return DeterminantEstimate(
        value=math.exp(log_total),
        method="schur-composite",
        params={"factors": len(boundaries)},
        diagnostics=diagnostics,
        heuristic=heuristic,
    )


# ---------------------------------------------------------------------------
# torsion from submatrices of a three-term complex
# ---------------------------------------------------------------------------


def lemma_torsion(
    A: GroupRingMatrix,
    B: GroupRingMatrix,
    C: GroupRingMatrix | None,
    L: Sequence[int],
    J: Sequence[int],
    estimator: Callable[[GroupRingMatrix], DeterminantEstimate],
) -> DeterminantEstimate:
    """Torsion of 0 -> l2^j -C-> l2^k -B-> l2^(k+l-j) -A-> l2^l -> 0 from
    submatrix determinants:

        tau = det(B with J-rows and L-columns deleted) / (det(C restricted to
              J-columns) * det(A restricted to L-rows)).

    Sizes (row-vector convention): A is (k+l-j) x l, B is k x (k+l-j), C is
    j x k; L picks l rows of A, J picks j columns of C and j rows of B.  The
    published statement mixes two notations for the submatrices; this
    implementation follows the definition-consistent reading (delete L-columns
    and J-rows from B; take J-columns of C).
    """
    j = C.rows if C is not None else 0
    k = B.rows
    if B.cols != A.rows:
        raise EstimatorError("B and A do not compose")
    if C is not None and C.cols != k:
        raise EstimatorError("C and B do not compose")
    if len(J) != j:
        raise EstimatorError(f"J must have size {j}")
    if len(L) != A.cols:
        raise EstimatorError(f"L must have size {A.cols}")
    A_L = A.select(list(L), range(A.cols))
    det_a = estimator(A_L)
    if det_a.value == 0.0:
        raise EstimatorError("det A(L) estimated zero: change L")
    if C is not None and j > 0:
        C_J = C.select(range(C.rows), list(J))
        det_c = estimator(C_J)
        if det_c.value == 0.0:
            raise EstimatorError("det C(J) estimated zero: change J")
    else:
        det_c = DeterminantEstimate(value=1.0, method="rules", params={"trace": "empty block"})
    rows_keep = [i for i in range(B.rows) if i not in set(J)]
    cols_keep = [i for i in range(B.cols) if i not in set(L)]
    B_JL = B.select(rows_keep, cols_keep)
    if B_JL.rows != B_JL.cols:
        raise EstimatorError("B(J, L) is not square; check subset sizes")
    det_b = estimator(B_JL)
    value = det_b.value / (det_c.value * det_a.value)
    return DeterminantEstimate(
        value=value,
        method="schur-composite",
        params={
            "L": list(L),
            "J": list(J),
            "det_B": det_b.value,
            "det_C": det_c.value,
            "det_A": det_a.value,
        },
        diagnostics=[det_b.value, det_c.value, det_a.value],
        heuristic=det_a.heuristic or det_b.heuristic or det_c.heuristic,
    )


# ---------------------------------------------------------------------------
# deficiency-one evaluation
# ---------------------------------------------------------------------------

ZERO_CUTOFF = 1e-6
LARGE_KERNEL_DEFECT = 0.3


def _numerator_estimator(
    spec: TorsionSpec, oracle
) -> Callable[[GroupRingMatrix], DeterminantEstimate]:
    cfg = spec.estimator

    def run(M: GroupRingMatrix) -> DeterminantEstimate:
        if cfg.method in ("rules", "auto"):
            p = spec.working_presentation()

            def infinite(w: Word) -> bool:
                verdict = has_infinite_order(w, spec.phi, p, oracle)
                return verdict.infinite and verdict.certain

            est = det_rules(M, infinite)
            if est is not None:
                return est
            if cfg.method == "rules":
                raise EstimatorError("no exact rule applies to this matrix")
        if cfg.method in ("quotient", "auto") and cfg.quotients:
            return det_quotient_family(
                M, cfg.quotients, drop_tol=cfg.drop_tol, order_cap=cfg.order_cap
            )
        if cfg.method in ("series", "auto"):
            K = cfg.series_scale or default_series_scale(M)
            return det_series(M, K, cfg.series_depth, oracle)
        raise EstimatorError(
            f"estimator method {cfg.method!r} not usable (no quotients supplied?)"
        )

    return run


def torsion_at(
    spec: TorsionSpec, t: float, oracle=None
) -> CurvePoint:
    """One sample of the torsion function at parameter t."""
    p = spec.working_presentation()
    if len(p.relators) != p.rank - 1:
        raise EstimatorError(
            f"need #relators = #generators - 1 after dropping: have {len(p.relators)} "
            f"relators, {p.rank} generators"
        )
    j = spec.generator_to_drop()
    phi_j = spec.phi.weights[j]
    if oracle is None:
        oracle = QuotientOracle(p, spec.estimator.quotients) if not p.is_free() else None
    if phi_j == 0:
        gj = Word.generator(j)
        verdict = has_infinite_order(gj, spec.phi, p, oracle)
        if not (verdict.infinite and verdict.certain):
            raise EstimatorError(
                "dropped generator has phi = 0 and no infinite-order certificate"
            )
    fox = fox_matrix(p)
    tw = TwistParameters(spec.phi, Fraction(t) if isinstance(t, (int, Fraction)) else t)
    numerator_matrix = fox.kappa_twist(tw).delete_column(j)
    estimator = _numerator_estimator(spec, oracle)
    numerator = estimator(numerator_matrix)
    denominator = max(1.0, float(t) ** abs(float(phi_j)))
    flagged = False
    note = ""
    if numerator.value <= ZERO_CUTOFF and numerator.kernel_defect >= LARGE_KERNEL_DEFECT:
        value = 0.0
        flagged = True
        note = "not weakly acyclic (heuristic)"
    else:
        value = numerator.value / denominator
    return CurvePoint(t=float(t), value=value, estimate=numerator, flagged=flagged, note=note)


def torsion_curve(spec: TorsionSpec, oracle=None) -> TorsionCurve:
    """Sample the torsion over the whole grid; per-point records retained."""
    p = spec.working_presentation()
    if oracle is None and not p.is_free():
        oracle = QuotientOracle(p, spec.estimator.quotients)
    workers = max(1, spec.estimator.workers)
    if workers == 1:
        points = [torsion_at(spec, t, oracle) for t in spec.grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(lambda t: torsion_at(spec, t, oracle), spec.grid))
    return TorsionCurve(spec=spec, points=points)


# ---------------------------------------------------------------------------
# persistence: CSV of samples plus a JSON sidecar with the full records
# ---------------------------------------------------------------------------


def write_curve(curve: TorsionCurve, csv_path: str | Path) -> tuple[Path, Path]:
    csv_path = Path(csv_path)
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "value", "method", "heuristic"])
        for pt in curve.points:
            writer.writerow(
                [repr(pt.t), repr(pt.value), pt.estimate.method, str(pt.estimate.heuristic).lower()]
            )
    sidecar = csv_path.with_suffix(".json")
    payload = {
        "spec": curve.spec.to_json(),
        "points": [
            {
                "t": pt.t,
                "value": pt.value,
                "flagged": pt.flagged,
                "note": pt.note,
                "estimate": pt.estimate.to_json(),
            }
            for pt in curve.points
        ],
    }
    with open(sidecar, "w") as fh:
        json.dump(payload, fh, indent=1)
    return csv_path, sidecar


def read_curve_values(csv_path: str | Path) -> list[tuple[float, float]]:
    out = []
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "t" not in reader.fieldnames:
            raise ValueError(f"{csv_path}: missing curve header")
        for row in reader:
            out.append((float(row["t"]), float(row["value"])))
    return out
