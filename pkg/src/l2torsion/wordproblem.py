"""Identity oracles: exact for free and free-abelian groups, evidence-based
through finite quotients everywhere else.

Every NotIdentity verdict carries a finite quotient witnessing it.  The trace
layer treats Unknown words as non-identity and flags the result as heuristic;
for residually finite groups with enough quotients this under-approximates
identity collapse rarely, and the flag keeps reports honest.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .presentations import GroupPresentation, CohomologyClass, has_infinite_abelian_image
from .quotients import FiniteQuotient, identity_perm
from .words import Word, free_reduce


class Verdict(Enum):
    IDENTITY = "Identity"
    NOT_IDENTITY = "NotIdentity"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class IdentityVerdict:
    value: Verdict
    witness: FiniteQuotient | None = None

    def __post_init__(self) -> None:
        if self.value is Verdict.NOT_IDENTITY and self.witness is None:
            raise ValueError("NotIdentity requires a witness quotient")

    def is_identity(self) -> bool:
        return self.value is Verdict.IDENTITY

    def is_not_identity(self) -> bool:
        return self.value is Verdict.NOT_IDENTITY

    def is_unknown(self) -> bool:
        return self.value is Verdict.UNKNOWN


_IDENTITY = IdentityVerdict(Verdict.IDENTITY)
_UNKNOWN = IdentityVerdict(Verdict.UNKNOWN)


def _rotation_witness(rank: int, steps: Sequence[int], modulus: int) -> FiniteQuotient:
    """Homomorphism to Z/modulus sending generator i to rotation by steps[i]."""
    images = tuple(
        tuple((p + steps[g]) % modulus for p in range(modulus)) for g in range(rank)
    )
    return FiniteQuotient(modulus, images)


def _free_witness(w: Word) -> FiniteQuotient:
    """A permutation quotient of the free group in which w acts nontrivially.

    Traces w through prefix states 0..L and completes the resulting partial
    injections to permutations; the image of w then moves state 0 to L.
    Consistency of the partial maps is exactly free reducedness.
    """
    flat = w.as_flat_letters()
    L = len(flat)
    rank = w.max_generator() + 1
    n = L + 1
    fwd = [[-1] * n for _ in range(rank)]
    bwd = [[-1] * n for _ in range(rank)]
    for pos, (g, e) in enumerate(flat):
        if e > 0:
            src, dst = pos, pos + 1
        else:
            src, dst = pos + 1, pos
        fwd[g][src] = dst
        bwd[g][dst] = src
    images = []
    for g in range(rank):
        free_dst = [d for d in range(n) if bwd[g][d] < 0]
        it = iter(free_dst)
        perm = []
        for s in range(n):
            perm.append(fwd[g][s] if fwd[g][s] >= 0 else next(it))
        images.append(tuple(perm))
    return FiniteQuotient(n, tuple(images))


def oracle_free(w: Word) -> IdentityVerdict:
    """Exact oracle for free groups: identity iff freely reduced to empty."""
    if w.is_identity():
        return _IDENTITY
    return IdentityVerdict(Verdict.NOT_IDENTITY, _free_witness(w))


class FreeOracle:
    """Oracle for a declared free presentation."""

    def __init__(self, p: GroupPresentation | None = None):
        if p is not None and not p.is_free():
            raise ValueError("free oracle called on a non-free presentation")

    def __call__(self, w: Word) -> IdentityVerdict:
        return oracle_free(w)


class AbelianOracle:
    """Exact oracle for free abelian groups: identity iff all exponent sums vanish."""

    def __init__(self, rank: int):
        self.rank = rank

    def __call__(self, w: Word) -> IdentityVerdict:
        rank = max(self.rank, w.max_generator() + 1)
        sums = w.exponent_sums(rank)
        if all(s == 0 for s in sums):
            return _IDENTITY
        coord = next(i for i, s in enumerate(sums) if s)
        modulus = abs(sums[coord]) + 1
        steps = [1 if i == coord else 0 for i in range(rank)]
        return IdentityVerdict(
            Verdict.NOT_IDENTITY, _rotation_witness(rank, steps, modulus)
        )


def oracle_abelian(w: Word, rank: int) -> IdentityVerdict:
    return AbelianOracle(rank)(w)


def _separating_functional(p: GroupPresentation, w: Word) -> list[int] | None:
    """Integer vector u with u . relator_row = 0 for all relators and
    u . exponents(w) != 0, when the exponent vector of w lies outside the
    rational span of the relator rows.  Defines a cyclic quotient separating w.
    """
    n = p.rank
    rows = [[Fraction(x) for x in r] for r in p.relator_exponent_matrix()]
    # null space of the relator rows via Gaussian elimination
    pivots: list[tuple[int, list[Fraction]]] = []
    for row in rows:
        row = row[:]
        for col, prow in pivots:
            if row[col]:
                f = row[col] / prow[col]
                row = [a - f * b for a, b in zip(row, prow)]
        lead = next((i for i, a in enumerate(row) if a), None)
        if lead is not None:
            pivots.append((lead, row))
    pivot_cols = {col for col, _ in pivots}
    free_cols = [c for c in range(n) if c not in pivot_cols]
    target = [Fraction(x) for x in w.exponent_sums(n)]
    for free in free_cols:
        u = [Fraction(0)] * n
        u[free] = Fraction(1)
        # back-substitute so that u is orthogonal to every pivot row
        for col, prow in reversed(pivots):
            s = sum(u[i] * prow[i] for i in range(n) if i != col)
            u[col] = -s / prow[col]
        pairing = sum(ui * ti for ui, ti in zip(u, target))
        if pairing != 0:
            denom_lcm = 1
            for ui in u:
                denom_lcm = denom_lcm * ui.denominator // _gcd(denom_lcm, ui.denominator)
            return [int(ui * denom_lcm) for ui in u]
    return None


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a) or 1


def _abelian_witness(p: GroupPresentation, w: Word) -> FiniteQuotient | None:
    u = _separating_functional(p, w)
    if u is None:
        return None
    pairing = sum(ui * si for ui, si in zip(u, w.exponent_sums(p.rank)))
    modulus = abs(pairing) + 1
    q = _rotation_witness(p.rank, u, modulus)
    if q.is_valid_for(p) and not q.maps_to_identity(w):
        return q
    return None


def _conjugated_relator_set(p: GroupPresentation, depth: int) -> list[Word]:
    """Freely reduced u r^(+-1) u^-1 for relators r and |u| <= depth."""
    out: set[Word] = set()
    conjugators: list[Word] = [Word()]
    frontier = [Word()]
    for _ in range(depth):
        nxt = []
        for u in frontier:
            for g in range(p.rank):
                for e in (1, -1):
                    v = u * Word.generator(g, e)
                    if v.length() > u.length():
                        nxt.append(v)
        conjugators.extend(nxt)
        frontier = nxt
    for r in p.relators:
        for u in conjugators:
            for s in (r, r.inverse()):
                w = u * s * u.inverse()
                if not w.is_identity():
                    out.add(w)
    return sorted(out, key=lambda w: (w.length(), w.letters))


def _shrink_by_relators(w: Word, relator_set: list[Word], budget: int = 400) -> bool:
    """Bounded search: can w reach the empty word by inserting conjugated
    relators that strictly shorten it?  Detects literal relator consequences."""
    seen = {w}
    frontier = [w]
    steps = 0
    while frontier and steps < budget:
        frontier.sort(key=Word.length)
        current = frontier.pop(0)
        if current.is_identity():
            return True
        letters = current.as_flat_letters()
        for s in relator_set:
            steps += 1
            s_flat = s.as_flat_letters()
            for cut in range(len(letters) + 1):
                candidate = Word(free_reduce(letters[:cut] + s_flat + letters[cut:]))
                if candidate.length() < current.length() and candidate not in seen:
                    if candidate.is_identity():
                        return True
                    seen.add(candidate)
                    frontier.append(candidate)
            if steps >= budget:
                break
    return False


class QuotientOracle:
    """Oracle backed by a family of finite quotients plus a bounded
    relator-consequence search (conjugating words of length <= 2 by default)."""

    def __init__(
        self,
        p: GroupPresentation,
        quotients: Sequence[FiniteQuotient] = (),
        consequence_depth: int = 2,
    ):
        for q in quotients:
            if not q.is_valid_for(p):
                raise ValueError("quotient does not satisfy the presentation relators")
        self.p = p
        self.quotients = list(quotients)
        self._relator_set = (
            _conjugated_relator_set(p, consequence_depth) if p.relators else []
        )
        self._cache: dict[Word, IdentityVerdict] = {}

    def __call__(self, w: Word) -> IdentityVerdict:
        hit = self._cache.get(w)
        if hit is not None:
            return hit
        verdict = self._evaluate(w)
        if len(self._cache) < 500_000:
            self._cache[w] = verdict
        return verdict

    def _evaluate(self, w: Word) -> IdentityVerdict:
        if w.is_identity():
            return _IDENTITY
        for q in self.quotients:
            if not q.maps_to_identity(w):
                return IdentityVerdict(Verdict.NOT_IDENTITY, q)
        if not self.p.relators:
            return oracle_free(w)
        if has_infinite_abelian_image(self.p, w):
            witness = _abelian_witness(self.p, w)
            if witness is not None:
                return IdentityVerdict(Verdict.NOT_IDENTITY, witness)
        if self._relator_set and w.length() <= 64:
            if _shrink_by_relators(w, self._relator_set):
                return _IDENTITY
        return _UNKNOWN


def oracle_quotients(
    w: Word, p: GroupPresentation, quotients: Sequence[FiniteQuotient]
) -> IdentityVerdict:
    return QuotientOracle(p, quotients)(w)


@dataclass(frozen=True)
class OrderVerdict:
    infinite: bool
    certain: bool
    reason: str


def has_infinite_order(
    w: Word,
    phi: CohomologyClass | None,
    p: GroupPresentation,
    oracle=None,
) -> OrderVerdict:
    """Certify infinite order where possible.

    Certain when phi(w) != 0 (infinite image in R), when the abelianized
    image has infinite order in H1, or when the group is declared torsion
    free and the oracle rules out the identity.
    """
    if w.is_identity():
        raise ValueError("identity word has order one")
    if phi is not None and phi(w) != 0:
        return OrderVerdict(True, True, "nonzero phi image")
    if has_infinite_abelian_image(p, w):
        return OrderVerdict(True, True, "infinite order in H1")
    if p.torsion_free and oracle is not None:
        verdict = oracle(w)
        if verdict.is_not_identity():
            return OrderVerdict(True, True, "nontrivial in a torsion-free group")
    return OrderVerdict(False, False, "undetermined")
