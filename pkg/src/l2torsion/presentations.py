"""Finitely presented groups and cohomology classes on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .words import Word, parse_word


@dataclass(frozen=True)
class GroupPresentation:
    """A finite presentation <generators | relators>."""

    name: str
    generator_names: tuple[str, ...]
    relators: tuple[Word, ...]
    # group-theoretic facts recorded per entry, not derived here
    torsion_free: bool = False
    h1_free: bool = True

    def __post_init__(self) -> None:
        if not all(self.generator_names):
            raise ValueError("generator names must be nonempty")
        if len(set(self.generator_names)) != len(self.generator_names):
            raise ValueError("generator names must be distinct")
        n = len(self.generator_names)
        for r in self.relators:
            if r.max_generator() >= n:
                raise ValueError(f"relator {r!r} references generator beyond rank {n}")

    @property
    def rank(self) -> int:
        return len(self.generator_names)

    def is_free(self) -> bool:
        return not self.relators

    def deficiency(self) -> int:
        return self.rank - len(self.relators)

    def word(self, text: str) -> Word:
        return parse_word(text, self.generator_names)

    def relator_exponent_matrix(self) -> list[tuple[int, ...]]:
        return [r.exponent_sums(self.rank) for r in self.relators]

    def drop_relator(self, index: int) -> "GroupPresentation":
        if not 0 <= index < len(self.relators):
            raise ValueError(f"relator index {index} out of range")
        rels = self.relators[:index] + self.relators[index + 1 :]
        return GroupPresentation(
            name=self.name,
            generator_names=self.generator_names,
            relators=rels,
            torsion_free=self.torsion_free,
            h1_free=self.h1_free,
        )


@dataclass(frozen=True)
class CohomologyClass:
    """Rational weights on the generators; must vanish on every relator."""

    weights: tuple[Fraction, ...]

    @staticmethod
    def of(*weights) -> "CohomologyClass":
        return CohomologyClass(tuple(Fraction(w) for w in weights))

    def __call__(self, w: Word) -> Fraction:
        return w.evaluate_weights(self.weights)

    def is_zero(self) -> bool:
        return all(w == 0 for w in self.weights)

    def scale(self, r) -> "CohomologyClass":
        r = Fraction(r)
        return CohomologyClass(tuple(r * w for w in self.weights))


def validate_class(p: GroupPresentation, phi: CohomologyClass) -> bool:
    """True iff phi vanishes on every relator of p."""
    if len(phi.weights) != p.rank:
        raise ValueError(
            f"class has {len(phi.weights)} weights, presentation has rank {p.rank}"
        )
    return all(phi(r) == 0 for r in p.relators)


def dehn_fill(p: GroupPresentation, slope_relator: Word) -> GroupPresentation:
    """Append a filling relator; generators are untouched."""
    if slope_relator.max_generator() >= p.rank:
        raise ValueError("slope relator references unknown generator")
    return GroupPresentation(
        name=f"{p.name}+fill({slope_relator.format(p.generator_names)})",
        generator_names=p.generator_names,
        relators=p.relators + (slope_relator,),
        torsion_free=p.torsion_free,
        h1_free=p.h1_free,
    )


def has_infinite_abelian_image(p: GroupPresentation, w: Word) -> bool:
    """True iff w maps to an infinite-order element of H1 = Z^n / relator rows.

    The image has infinite order exactly when the exponent vector of w lies
    outside the rational span of the relator exponent vectors.
    """
    target = [Fraction(x) for x in w.exponent_sums(p.rank)]
    rows = [[Fraction(x) for x in r] for r in p.relator_exponent_matrix()]
    # Gaussian elimination: reduce target against the row space.
    pivots: list[tuple[int, list[Fraction]]] = []
    for row in rows:
        row = row[:]
        for col, pivot_row in pivots:
            if row[col]:
                factor = row[col] / pivot_row[col]
                row = [a - factor * b for a, b in zip(row, pivot_row)]
        lead = next((i for i, a in enumerate(row) if a), None)
        if lead is not None:
            pivots.append((lead, row))
    for col, pivot_row in pivots:
        if target[col]:
            factor = target[col] / pivot_row[col]
            target = [a - factor * b for a, b in zip(target, pivot_row)]
    return any(target)


# ---------------------------------------------------------------------------
# presentation text format:  line 1 "gens: a b c", then "rel: a b A B" lines,
# optionally one "phi: 1 -1 0" line with rationals as p/q.
# ---------------------------------------------------------------------------


def parse_presentation_text(
    text: str, name: str = "unnamed"
) -> tuple[GroupPresentation, CohomologyClass | None]:
    gens: tuple[str, ...] | None = None
    relators: list[Word] = []
    phi: CohomologyClass | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise ValueError(f"line {lineno}: expected 'key: value', got {raw!r}")
        key, rest = line.split(":", 1)
        key = key.strip()
        rest = rest.strip()
        if key == "gens":
            if gens is not None:
                raise ValueError(f"line {lineno}: duplicate gens line")
            gens = tuple(rest.split())
            if not gens:
                raise ValueError(f"line {lineno}: no generators listed")
        elif key == "rel":
            if gens is None:
                raise ValueError(f"line {lineno}: rel before gens")
            try:
                relators.append(parse_word(rest, gens))
            except ValueError as err:
                raise ValueError(f"line {lineno}: {err}") from None
        elif key == "phi":
            if gens is None:
                raise ValueError(f"line {lineno}: phi before gens")
            parts = rest.split()
            if len(parts) != len(gens):
                raise ValueError(
                    f"line {lineno}: phi has {len(parts)} weights for {len(gens)} generators"
                )
            phi = CohomologyClass(tuple(Fraction(p) for p in parts))
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    if gens is None:
        raise ValueError("missing gens line")
    pres = GroupPresentation(name=name, generator_names=gens, relators=tuple(relators))
    if phi is not None and not validate_class(pres, phi):
        raise ValueError("phi line does not vanish on all relators")
    return pres, phi


def format_presentation_text(
    p: GroupPresentation, phi: CohomologyClass | None = None
) -> str:
    lines = ["gens: " + " ".join(p.generator_names)]
    for r in p.relators:
        parts = []
        for g, e in r.letters:
            token = p.generator_names[g] if e > 0 else p.generator_names[g].upper()
            parts.extend([token] * abs(e))
        lines.append("rel: " + " ".join(parts))
    if phi is not None:
        lines.append("phi: " + " ".join(str(w) for w in phi.weights))
    return "\n".join(lines) + "\n"
