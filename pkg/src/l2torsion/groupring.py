"""Sparse group-ring arithmetic, Fox calculus and the twist deformation.

Elements are finitely supported maps Word -> coefficient.  Products reduce
key words only freely; group relations enter solely through the trace oracle
and the finite-quotient representations, which keeps ring arithmetic exact.

Coefficients stay exact (int / Fraction) as long as every input is exact;
mixing in a float or complex degrades the affected coefficients to floating
point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Callable, Iterable, Sequence

from .presentations import CohomologyClass
from .words import Word

# products whose support would exceed this fail fast (group-ring powers blow
# up combinatorially)
SUPPORT_CAP = 10**6


class SupportCapExceeded(RuntimeError):
    pass


def _conj(c):
    if isinstance(c, complex):
        return c.conjugate()
    return c


def _is_exact(c) -> bool:
    return isinstance(c, (int, Fraction))


def _power(t, exponent):
    """t ** exponent, exact when t is rational and the exponent is integral."""
    if isinstance(exponent, Fraction) and exponent.denominator == 1:
        exponent = int(exponent)
    if isinstance(exponent, int) and _is_exact(t):
        return Fraction(t) ** exponent
    return float(t) ** float(exponent)


@dataclass(frozen=True)
class TwistParameters:
    """The ring deformation sending a word w to t^phi(w) * w."""

    phi: CohomologyClass
    t: Fraction | float

    def __post_init__(self) -> None:
        if not float(self.t) > 0:
            raise ValueError("twist parameter t must be positive")

    def factor(self, w: Word):
        return _power(self.t, self.phi(w))


class GroupRingElement:
    """Finitely supported formal sum of words; immutable by convention."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Word, object] | None = None):
        cleaned = {}
        for w, c in (terms or {}).items():
            if c == 0:
                continue
            cleaned[w] = c
        self.terms = cleaned

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero() -> "GroupRingElement":
        return GroupRingElement({})

    @staticmethod
    def one() -> "GroupRingElement":
        return GroupRingElement({Word(): 1})

    @staticmethod
    def of_word(w: Word, coeff=1) -> "GroupRingElement":
        return GroupRingElement({w: coeff})

    @staticmethod
    def of_generator(index: int, coeff=1) -> "GroupRingElement":
        return GroupRingElement({Word.generator(index): coeff})

    # -- basic queries -------------------------------------------------------

    def support_size(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, w: Word):
        return self.terms.get(w, 0)

    def is_exact(self) -> bool:
        return all(_is_exact(c) for c in self.terms.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- ring operations -----------------------------------------------------

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return GroupRingElement(out)

    def __neg__(self) -> "GroupRingElement":
        return GroupRingElement({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        return self + (-other)

    def scale(self, factor) -> "GroupRingElement":
        if factor == 0:
            return GroupRingElement.zero()
        return GroupRingElement({w: factor * c for w, c in self.terms.items()})

    def __mul__(self, other: "GroupRingElement") -> "GroupRingElement":
        if self.is_zero() or other.is_zero():
            return GroupRingElement.zero()
        out: dict[Word, object] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 * w2
                out[w] = out.get(w, 0) + c1 * c2
                if len(out) > SUPPORT_CAP:
                    raise SupportCapExceeded(
                        f"product support exceeded cap {SUPPORT_CAP}"
                    )
        return GroupRingElement(out)

    def __pow__(self, n: int) -> "GroupRingElement":
        if n < 0:
            raise ValueError("negative powers are not defined in the group ring")
        result = GroupRingElement.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n > 1
            if base_needed:
                base = base * base
            n >>= 1
        return result

    def adjoint(self) -> "GroupRingElement":
        """Term-wise lambda * g  ->  conj(lambda) * g^-1."""
        return GroupRingElement({w.inverse(): _conj(c) for w, c in self.terms.items()})

    def operator_transpose(self) -> "GroupRingElement":
        """Words inverted, coefficients kept: the transpose of right
        multiplication in the canonical basis (R_g^T = R_{g^-1})."""
        return GroupRingElement({w.inverse(): c for w, c in self.terms.items()})

    def kappa_twist(self, tw: TwistParameters) -> "GroupRingElement":
        return GroupRingElement({w: c * tw.factor(w) for w, c in self.terms.items()})

    # -- norms and traces ----------------------------------------------------

    def l1_norm(self) -> float:
        """Sum of |coefficients|; bounds the operator norm of right multiplication."""
        return float(sum(abs(c) for c in self.terms.values()))

    def trace(self, oracle) -> tuple[object, bool]:
        """Coefficient mass on words judged to be the identity.

        Returns (value, heuristic): heuristic is set when any word with a
        nonzero coefficient came back Unknown from the oracle (such words are
        treated as non-identity).
        """
        total = 0
        heuristic = False
        for w, c in self.terms.items():
            verdict = oracle(w)
            if verdict.is_identity():
                total = total + c
            elif verdict.is_unknown():
                heuristic = True
        return total, heuristic

    # -- presentation ----------------------------------------------------------

    def to_float(self) -> "GroupRingElement":
        return GroupRingElement(
            {
                w: complex(c) if isinstance(c, complex) else float(c)
                for w, c in self.terms.items()
            }
        )

    def canonical_str(self, names: Sequence[str] | None = None) -> str:
        """Deterministic text form 'coeff*word + ...' for golden tests."""
        if not self.terms:
            return "0"

        def word_key(w: Word):
            return (w.length(), w.letters)

        parts = []
        for w in sorted(self.terms, key=word_key):
            c = self.terms[w]
            wtxt = w.format(names) if names else repr(w)[5:-1] or "1"
            parts.append(f"{c}*{wtxt}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"GroupRingElement({self.canonical_str()})"


def from_words(pairs: Iterable[tuple[object, Word]]) -> GroupRingElement:
    out: dict[Word, object] = {}
    for c, w in pairs:
        out[w] = out.get(w, 0) + c
    return GroupRingElement(out)


def neumann_inverse(x: GroupRingElement, order: int) -> tuple[GroupRingElement, float]:
    """Truncated geometric series for x = 1 - y with ||y||_1 < 1.

    Returns (sum_{n<=order} y^n, residual bound ||y||^(order+1) / (1 - ||y||)).
    """
    y = GroupRingElement.one() - x
    norm = y.l1_norm()
    if norm >= 1:
        raise ValueError(f"not Neumann invertible: ||1 - x||_1 = {norm} >= 1")
    total = GroupRingElement.one()
    power = GroupRingElement.one()
    for _ in range(order):
        power = power * y
        total = total + power
    residual = norm ** (order + 1) / (1.0 - norm)
    return total, residual


# ---------------------------------------------------------------------------
# Fox calculus
# ---------------------------------------------------------------------------


def fox_derivative(r: Word, index: int) -> GroupRingElement:
    """Free derivative d(r)/d(g_index) in the free group ring.

    Rules: d(a)/d(a) = 1, d(b)/d(a) = 0, d(a^-1)/d(a) = -a^-1 and the product
    rule d(uv)/d(a) = d(u)/d(a) + u d(v)/d(a).
    """
    terms: dict[Word, object] = {}
    prefix = Word()
    for g, e in r.letters:
        if g == index:
            if e > 0:
                for k in range(e):
                    w = prefix * Word.generator(g) ** k
                    terms[w] = terms.get(w, 0) + 1
            else:
                for k in range(1, -e + 1):
                    w = prefix * Word.generator(g) ** (-k)
                    terms[w] = terms.get(w, 0) - 1
        prefix = prefix * Word.generator(g) ** e
    return GroupRingElement(terms)


class GroupRingMatrix:
    """Dense matrix of group-ring elements."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[GroupRingElement]]):
        self.entries = [list(row) for row in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        if any(len(row) != self.cols for row in self.entries):
            raise ValueError("ragged matrix")

    @staticmethod
    def identity(n: int) -> "GroupRingMatrix":
        return GroupRingMatrix(
            [
                [GroupRingElement.one() if i == j else GroupRingElement.zero() for j in range(n)]
                for i in range(n)
            ]
        )

    @staticmethod
    def zero(rows: int, cols: int) -> "GroupRingMatrix":
        return GroupRingMatrix(
            [[GroupRingElement.zero() for _ in range(cols)] for _ in range(rows)]
        )

    @staticmethod
    def single(x: GroupRingElement) -> "GroupRingMatrix":
        return GroupRingMatrix([[x]])

    def __getitem__(self, key: tuple[int, int]) -> GroupRingElement:
        i, j = key
        return self.entries[i][j]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupRingMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __add__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch")
        return GroupRingMatrix(
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __sub__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        return self + other.scale(-1)

    def scale(self, factor) -> "GroupRingMatrix":
        return GroupRingMatrix(
            [[e.scale(factor) for e in row] for row in self.entries]
        )

    def __mul__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = GroupRingElement.zero()
                for k in range(self.cols):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return GroupRingMatrix(out)

    def transpose(self) -> "GroupRingMatrix":
        """Entry layout transpose only.  This is NOT the determinant-invariant
        transpose over a noncommutative group ring; see operator_transpose."""
        return GroupRingMatrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)]
        )

    def operator_transpose(self) -> "GroupRingMatrix":
        """Transpose of the right-multiplication operator: entries moved and
        their words inverted, coefficients untouched.  Shares its singular
        values with the original, so determinants are preserved."""
        return GroupRingMatrix(
            [
                [self.entries[i][j].operator_transpose() for i in range(self.rows)]
                for j in range(self.cols)
            ]
        )

    def adjoint(self) -> "GroupRingMatrix":
        """Conjugate transpose with entry-wise adjoints (for M* M)."""
        return GroupRingMatrix(
            [
                [self.entries[i][j].adjoint() for i in range(self.rows)]
                for j in range(self.cols)
            ]
        )

    def kappa_twist(self, tw: TwistParameters) -> "GroupRingMatrix":
        return GroupRingMatrix(
            [[e.kappa_twist(tw) for e in row] for row in self.entries]
        )

    def delete_column(self, j: int) -> "GroupRingMatrix":
        if not 0 <= j < self.cols:
            raise ValueError("column index out of range")
        return GroupRingMatrix(
            [row[:j] + row[j + 1 :] for row in self.entries]
        )

    def delete_row(self, i: int) -> "GroupRingMatrix":
        if not 0 <= i < self.rows:
            raise ValueError("row index out of range")
        return GroupRingMatrix(self.entries[:i] + self.entries[i + 1 :])

    def select(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "GroupRingMatrix":
        return GroupRingMatrix(
            [[self.entries[i][j] for j in col_idx] for i in row_idx]
        )

    def permute(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "GroupRingMatrix":
        return self.select(row_perm, col_perm)

    def trace(self, oracle) -> tuple[object, bool]:
        if not self.is_square():
            raise ValueError("trace of a non-square matrix")
        total = 0
        heuristic = False
        for i in range(self.rows):
            v, h = self.entries[i][i].trace(oracle)
            total = total + v
            heuristic = heuristic or h
        return total, heuristic

    def l1_norm(self) -> float:
        return max(
            (sum(e.l1_norm() for e in row) for row in self.entries), default=0.0
        )

    def opnorm_bound(self) -> float:
        """Geometric mean of max row sum and max column sum of entry l1 norms."""
        if self.rows == 0 or self.cols == 0:
            return 0.0
        row_bound = max(sum(e.l1_norm() for e in row) for row in self.entries)
        col_bound = max(
            sum(self.entries[i][j].l1_norm() for i in range(self.rows))
            for j in range(self.cols)
        )
        return (row_bound * col_bound) ** 0.5

    def max_word_support(self) -> int:
        return max((e.support_size() for row in self.entries for e in row), default=0)

    def __repr__(self) -> str:
        body = "; ".join(
            ", ".join(e.canonical_str() for e in row) for row in self.entries
        )
        return f"GroupRingMatrix[{self.rows}x{self.cols}]({body})"


def opnorm_bound(obj) -> float:
    if isinstance(obj, GroupRingMatrix):
        return obj.opnorm_bound()
    return obj.l1_norm()


def fox_matrix(p) -> GroupRingMatrix:
    """Matrix of free derivatives: entry (i, j) = d(relator_i)/d(generator_j)."""
    if not p.relators:
        raise ValueError("presentation has no relators")
    return GroupRingMatrix(
        [[fox_derivative(r, j) for j in range(p.rank)] for r in p.relators]
    )
