"""Freely reduced words over a finite generating set.

Words are stored run-length encoded as (generator index, exponent) pairs and
are always freely reduced, so they can serve as dictionary keys in group-ring
supports and compose in time proportional to the amount of cancellation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


def free_reduce(letters: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    """Freely reduce a raw letter sequence.

    Merges adjacent powers of the same generator, removes zero exponents and
    cancels inverse pairs.  Idempotent.
    """
    out: list[tuple[int, int]] = []
    for gen, exp in letters:
        if exp == 0:
            continue
        if out and out[-1][0] == gen:
            merged = out[-1][1] + exp
            out.pop()
            if merged:
                out.append((gen, merged))
        else:
            out.append((gen, exp))
    return tuple(out)


@dataclass(frozen=True, slots=True)
class Word:
    """A freely reduced word; the empty word is the identity."""

    letters: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def from_letters(letters: Iterable[tuple[int, int]]) -> "Word":
        return Word(free_reduce(letters))

    @staticmethod
    def generator(index: int, exp: int = 1) -> "Word":
        if exp == 0:
            return Word()
        return Word(((index, exp),))

    @staticmethod
    def identity() -> "Word":
        return Word()

    def __post_init__(self) -> None:
        reduced = free_reduce(self.letters)
        if reduced != self.letters:
            object.__setattr__(self, "letters", reduced)

    def __mul__(self, other: "Word") -> "Word":
        if not self.letters:
            return other
        if not other.letters:
            return self
        return Word(free_reduce(self.letters + other.letters))

    def __pow__(self, n: int) -> "Word":
        if n == 0:
            return Word()
        base = self if n > 0 else self.inverse()
        out = base
        for _ in range(abs(n) - 1):
            out = out * base
        return out

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def is_identity(self) -> bool:
        return not self.letters

    def length(self) -> int:
        """Number of letters counted with multiplicity."""
        return sum(abs(e) for _, e in self.letters)

    def syllables(self) -> int:
        return len(self.letters)

    def max_generator(self) -> int:
        """Largest generator index used; -1 for the identity."""
        return max((g for g, _ in self.letters), default=-1)

    def generators_used(self) -> frozenset[int]:
        return frozenset(g for g, _ in self.letters)

    def exponent_sums(self, num_generators: int) -> tuple[int, ...]:
        sums = [0] * num_generators
        for g, e in self.letters:
            sums[g] += e
        return tuple(sums)

    def evaluate_weights(self, weights: Sequence[Fraction | int | float]):
        """Sum of exponent * weight over the letters (phi evaluation)."""
        total = 0
        for g, e in self.letters:
            total = total + e * weights[g]
        return total

    def as_flat_letters(self) -> tuple[tuple[int, int], ...]:
        """Expand to single-exponent letters, e.g. a^2 -> a, a."""
        out = []
        for g, e in self.letters:
            step = 1 if e > 0 else -1
            out.extend((g, step) for _ in range(abs(e)))
        return tuple(out)

    def format(self, names: Sequence[str]) -> str:
        if not self.letters:
            return "1"
        parts = []
        for g, e in self.letters:
            if e == 1:
                parts.append(names[g])
            else:
                parts.append(f"{names[g]}^{e}")
        return " ".join(parts)

    def __repr__(self) -> str:
        if not self.letters:
            return "Word()"
        return "Word(" + "".join(
            (chr(ord("a") + g) if 0 <= g < 26 else f"g{g}") + (f"^{e}" if e != 1 else "")
            for g, e in self.letters
        ) + ")"


def parse_word(text: str, names: Sequence[str]) -> Word:
    """Parse a word in letter notation: lowercase = generator, uppercase = inverse.

    Tokens may be separated by whitespace; single-character generator names may
    also be run together ('abAB').  Explicit powers use 'a^-2'.
    """
    index = {name: i for i, name in enumerate(names)}
    tokens: list[str] = []
    for chunk in text.split():
        if chunk in index or chunk.lower() in index or "^" in chunk:
            tokens.append(chunk)
        else:
            tokens.extend(chunk)
    letters: list[tuple[int, int]] = []
    for tok in tokens:
        exp = 1
        if "^" in tok:
            tok, raw = tok.split("^", 1)
            exp = int(raw)
        if tok in index:
            letters.append((index[tok], exp))
        elif tok.lower() in index:
            letters.append((index[tok.lower()], -exp))
        else:
            raise ValueError(f"unknown generator {tok!r}")
    return Word.from_letters(letters)


def commutator(x: Word, y: Word) -> Word:
    """[x, y] = x y x^-1 y^-1."""
    return x * y * x.inverse() * y.inverse()
