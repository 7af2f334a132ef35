"""Finite permutation quotients of finitely presented groups.

A quotient is stored as one permutation per generator; permutations are
tuples mapping point i to p[i].  Words act by composing left to right, so the
image of a product is ``compose(image(u), image(v))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .presentations import GroupPresentation
from .words import Word

Perm = tuple[int, ...]


def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def compose(p: Perm, q: Perm) -> Perm:
    """Apply p, then q."""
    return tuple(q[i] for i in p)


def invert(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def perm_of_word(word: Word, images: Sequence[Perm]) -> Perm:
    n = len(images[0])
    cur = identity_perm(n)
    for g, e in word.letters:
        p = images[g] if e > 0 else invert(images[g])
        for _ in range(abs(e)):
            cur = compose(cur, p)
    return cur


def is_transitive(images: Sequence[Perm]) -> bool:
    n = len(images[0])
    seen = {0}
    stack = [0]
    gens = list(images) + [invert(p) for p in images]
    while stack:
        x = stack.pop()
        for p in gens:
            y = p[x]
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == n


def cycle_notation(p: Perm) -> str:
    seen: set[int] = set()
    out = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            seen.add(i)
            continue
        cyc = [i]
        j = p[i]
        while j != i:
            seen.add(j)
            cyc.append(j)
            j = p[j]
        seen.add(i)
        out.append("(" + " ".join(str(k + 1) for k in cyc) + ")")
    return "".join(out) if out else "()"


def group_order(gens: Sequence[Perm]) -> int:
    """Order of the generated group via a Schreier-Sims stabilizer chain."""
    gens = [g for g in gens if g != identity_perm(len(g))]
    if not gens:
        return 1
    n = len(gens[0])

    base: list[int] = []
    strong: list[list[Perm]] = []
    transversals: list[dict[int, Perm]] = []

    def orbit_transversal(point: int, gen_list: list[Perm]) -> dict[int, Perm]:
        trans = {point: identity_perm(n)}
        frontier = [point]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gen_list:
                    y = g[x]
                    if y not in trans:
                        trans[y] = compose(trans[x], g)
                        nxt.append(y)
            frontier = nxt
        return trans

    def strip(g: Perm, level: int) -> tuple[Perm, int]:
        for i in range(level, len(base)):
            x = g[base[i]]
            if x not in transversals[i]:
                return g, i
            g = compose(g, invert(transversals[i][x]))
        return g, len(base)

    def add_generator(g: Perm, level: int) -> None:
        for i in range(level, len(base)):
            strong[i].append(g)
        moved = next((x for x in range(n) if g[x] != x), None)
        if moved is None:
            return
        if level == len(base):
            base.append(moved)
            strong.append([g])
            transversals.append({})
        # rebuild transversals from the affected level down, sifting Schreier
        # generators to keep the chain strong
        i = level
        while i < len(base):
            transversals[i] = orbit_transversal(base[i], strong[i])
            new_gens = []
            for x, t in list(transversals[i].items()):
                for s in strong[i]:
                    y = s[x]
                    schreier = compose(compose(t, s), invert(transversals[i][y]))
                    residue, j = strip(schreier, i + 1)
                    if residue != identity_perm(n):
                        new_gens.append((residue, j))
            if new_gens:
                for residue, j in new_gens:
                    if j == len(base):
                        moved = next(x for x in range(n) if residue[x] != x)
                        base.append(moved)
                        strong.append([])
                        transversals.append({})
                    for k in range(i + 1, j + 1):
                        strong[k].append(residue)
                i += 1
            else:
                i += 1

    for g in gens:
        residue, level = strip(g, 0)
        if residue != identity_perm(n):
            add_generator(residue, level)

    # final stabilization sweep: keep sifting Schreier generators until clean
    stable = False
    while not stable:
        stable = True
        for i in range(len(base)):
            transversals[i] = orbit_transversal(base[i], strong[i])
        for i in range(len(base)):
            for x, t in list(transversals[i].items()):
                for s in strong[i]:
                    y = s[x]
                    schreier = compose(compose(t, s), invert(transversals[i][y]))
                    residue, j = strip(schreier, i + 1)
                    if residue != identity_perm(n):
                        add_generator(residue, j)
                        stable = False
        if not stable:
            continue
    order = 1
    for t in transversals:
        order *= len(t)
    return order


def enumerate_elements(gens: Sequence[Perm], cap: int) -> list[Perm] | None:
    """All elements of the generated group in deterministic BFS order.

    Returns None when the group has more than ``cap`` elements.
    """
    n = len(gens[0])
    ident = identity_perm(n)
    elems = {ident}
    order = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(x, g)
                if y not in elems:
                    if len(elems) >= cap:
                        return None
                    elems.add(y)
                    order.append(y)
                    nxt.append(y)
        frontier = nxt
    return order


@dataclass(frozen=True)
class FiniteQuotient:
    """A homomorphism onto a transitive permutation group, one image per generator."""

    degree: int
    generator_images: tuple[Perm, ...]
    order: int = field(default=0)

    def __post_init__(self) -> None:
        for p in self.generator_images:
            if sorted(p) != list(range(self.degree)):
                raise ValueError("generator image is not a permutation of the stated degree")
        if self.order == 0:
            object.__setattr__(self, "order", group_order(self.generator_images))

    def image(self, w: Word) -> Perm:
        return perm_of_word(w, self.generator_images)

    def maps_to_identity(self, w: Word) -> bool:
        return self.image(w) == identity_perm(self.degree)

    def is_valid_for(self, p: GroupPresentation) -> bool:
        if len(self.generator_images) != p.rank:
            return False
        return all(self.maps_to_identity(r) for r in p.relators)

    def elements(self, cap: int = 200_000) -> list[Perm]:
        elems = enumerate_elements(self.generator_images, cap)
        if elems is None:
            raise ValueError(f"quotient order {self.order} exceeds enumeration cap {cap}")
        return elems

    def describe(self) -> str:
        imgs = ", ".join(cycle_notation(p) for p in self.generator_images)
        return f"degree {self.degree}, order {self.order}: {imgs}"


def trivial_quotient(rank: int) -> FiniteQuotient:
    return FiniteQuotient(1, tuple(identity_perm(1) for _ in range(rank)), order=1)


def cyclic_quotient(p: GroupPresentation, modulus: int) -> FiniteQuotient | None:
    """Quotient through H1 -> Z/modulus sending every generator to +1.

    Valid only when every relator has total exponent sum divisible by the
    modulus (true for all link-group presentations, where relators are
    conjugacy relations).
    """
    if modulus < 2:
        return None
    for r in p.relators:
        if sum(e for _, e in r.letters) % modulus:
            return None
    cyc = tuple((i + 1) % modulus for i in range(modulus))
    return FiniteQuotient(modulus, tuple(cyc for _ in range(p.rank)), order=modulus)


# ---------------------------------------------------------------------------
# canonical form under conjugation, for deduplicating transitive quotients
# ---------------------------------------------------------------------------


def _canonical_relabel(images: Sequence[Perm]) -> tuple[Perm, ...]:
    """Minimal relabeling over BFS numberings from every start point.

    Two transitive tuples are conjugate iff their canonical relabelings agree:
    a BFS from a seed point, expanding by generators in fixed order, names the
    points by discovery order, which is conjugation-invariant data.
    """
    n = len(images[0])
    gens = list(images) + [invert(p) for p in images]
    best: tuple[Perm, ...] | None = None
    for seed in range(n):
        label = {seed: 0}
        frontier = [seed]
        count = 1
        while frontier and count < n:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = g[x]
                    if y not in label:
                        label[y] = count
                        count += 1
                        nxt.append(y)
            frontier = nxt
        if count < n:
            # not transitive from this seed; caller guarantees transitivity
            continue
        relabeled = tuple(
            tuple(label[p[x]] for x in sorted(label, key=label.get)) for p in images
        )
        if best is None or relabeled < best:
            best = relabeled
    assert best is not None
    return best


# ---------------------------------------------------------------------------
# backtracking search for transitive permutation quotients
# ---------------------------------------------------------------------------


def _cycle_type_representatives(n: int) -> list[Perm]:
    """One permutation per partition of n (canonical cycle-type representatives)."""

    def partitions(total: int, mx: int) -> Iterable[list[int]]:
        if total == 0:
            yield []
            return
        for k in range(min(total, mx), 0, -1):
            for rest in partitions(total - k, k):
                yield [k] + rest

    reps = []
    for part in partitions(n, n):
        p: list[int] = []
        start = 0
        for k in part:
            p.extend(list(range(start + 1, start + k)) + [start])
            start += k
        reps.append(tuple(p))
    return reps


class _PartialSearch:
    """Point-by-point assignment of the remaining generator images.

    Relators are traced incrementally from every start point; a completed
    trace that fails to close kills the branch.
    """

    def __init__(self, presentation: GroupPresentation, degree: int, first_image: Perm):
        self.p = presentation
        self.n = degree
        self.rank = presentation.rank
        # forward/backward partial maps per generator: -1 marks unassigned
        self.fwd = [[-1] * degree for _ in range(self.rank)]
        self.bwd = [[-1] * degree for _ in range(self.rank)]
        for i, j in enumerate(first_image):
            self.fwd[0][i] = j
            self.bwd[0][j] = i
        self.flat_relators = [r.as_flat_letters() for r in presentation.relators]
        self.results: list[tuple[Perm, ...]] = []

    def _trace_ok(self) -> bool:
        for rel in self.flat_relators:
            for start in range(self.n):
                x = start
                complete = True
                for g, e in rel:
                    x = self.fwd[g][x] if e > 0 else self.bwd[g][x]
                    if x < 0:
                        complete = False
                        break
                if complete and x != start:
                    return False
        return True

    def _next_slot(self) -> tuple[int, int] | None:
        for g in range(1, self.rank):
            for i in range(self.n):
                if self.fwd[g][i] < 0:
                    return g, i
        return None

    def run(self, limit: int | None = None) -> list[tuple[Perm, ...]]:
        self._backtrack(limit)
        return self.results

    def _backtrack(self, limit: int | None) -> None:
        if limit is not None and len(self.results) >= limit:
            return
        slot = self._next_slot()
        if slot is None:
            images = tuple(tuple(row) for row in self.fwd)
            if is_transitive(images):
                self.results.append(images)
            return
        g, i = slot
        for j in range(self.n):
            if self.bwd[g][j] >= 0:
                continue
            self.fwd[g][i] = j
            self.bwd[g][j] = i
            if self._trace_ok():
                self._backtrack(limit)
            self.fwd[g][i] = -1
            self.bwd[g][j] = -1
            if limit is not None and len(self.results) >= limit:
                return


def quotient_search(
    p: GroupPresentation,
    max_degree: int,
    limit: int = 20,
    degrees: Iterable[int] | None = None,
) -> list[FiniteQuotient]:
    """Enumerate transitive permutation quotients of degree <= max_degree.

    Deduplicated up to conjugation via canonical relabeling; deterministic
    output sorted by group order descending (ties by canonical form).
    """
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    found: dict[tuple, tuple[int, tuple[Perm, ...]]] = {}
    search_degrees = list(degrees) if degrees is not None else list(range(1, max_degree + 1))
    for n in search_degrees:
        if n == 1:
            images = tuple(identity_perm(1) for _ in range(p.rank))
            found[_canonical_relabel(images) if p.rank else ((),)] = (1, images)
            continue
        for first in _cycle_type_representatives(n):
            if p.rank == 1:
                images = (first,)
                if all(perm_of_word(r, images) == identity_perm(n) for r in p.relators):
                    if is_transitive(images):
                        key = _canonical_relabel(images)
                        if key not in found:
                            found[key] = (n, images)
                continue
            search = _PartialSearch(p, n, first)
            # generous internal limit; dedup happens here
            for images in search.run(limit=None if limit is None else limit * 50):
                key = _canonical_relabel(images)
                if key not in found:
                    found[key] = (n, images)
    quotients = [
        FiniteQuotient(deg, images) for deg, images in found.values()
    ]
    quotients.sort(key=lambda q: (-q.order, q.degree, q.generator_images))
    return quotients[:limit] if limit is not None else quotients


def completed_quotient_search(
    p: GroupPresentation,
    determined: dict[int, Word],
    max_degree: int,
    limit: int = 10,
) -> list[FiniteQuotient]:
    """Quotient search for presentations where some generators are words in
    the others (e.g. a Dehn-filling relation c = w(a, b)).

    Images are enumerated for the free generators only (at most two of them);
    the determined generators receive the image of their defining word.  Every
    candidate is still checked against all relators.
    """
    free_gens = [g for g in range(p.rank) if g not in determined]
    if not 1 <= len(free_gens) <= 2:
        raise ValueError("supported: one or two undetermined generators")
    for g, w in determined.items():
        if any(h in determined for h in w.generators_used()):
            raise ValueError("determined generators must be words in the free ones")
    found: dict[tuple, tuple[int, tuple[Perm, ...]]] = {}
    for n in range(2, max_degree + 1):
        ident = identity_perm(n)
        second_choices = list(itertools.permutations(range(n))) if len(free_gens) == 2 else [None]
        for first in _cycle_type_representatives(n):
            for second in second_choices:
                partial: dict[int, Perm] = {free_gens[0]: first}
                if second is not None:
                    partial[free_gens[1]] = tuple(second)
                images_list: list[Perm] = [None] * p.rank  # type: ignore[list-item]
                for g in free_gens:
                    images_list[g] = partial[g]
                ok = True
                for g, w in determined.items():
                    images_list[g] = perm_of_word(
                        w, [images_list[h] if images_list[h] else ident for h in range(p.rank)]
                    )
                images = tuple(images_list)
                if any(perm_of_word(r, images) != ident for r in p.relators):
                    continue
                if not is_transitive(images):
                    continue
                key = _canonical_relabel(images)
                if key not in found:
                    found[key] = (n, images)
    quotients = [FiniteQuotient(deg, images) for deg, images in found.values()]
    quotients.sort(key=lambda q: (-q.order, q.degree, q.generator_images))
    return quotients[:limit]


# ---------------------------------------------------------------------------
# structured congruence quotients for two-generator presentations
# ---------------------------------------------------------------------------


def _gf(q: int) -> tuple[int, int]:
    """Factor a prime power q = p^k with k in {1, 2}."""
    for p in range(2, q + 1):
        if q % p == 0:
            if q == p:
                return p, 1
            if q == p * p:
                return p, 2
            raise ValueError(f"{q} is not p or p^2 for a prime p")
    raise ValueError(f"bad field size {q}")


class _Field:
    """F_p or F_{p^2} = F_p[x]/(x^2 - nonresidue); elements are (u, v) = u + v x."""

    def __init__(self, q: int):
        p, k = _gf(q)
        self.p = p
        self.k = k
        self.q = q
        if k == 2:
            self.nonres = next(
                a for a in range(2, p) if pow(a, (p - 1) // 2, p) == p - 1
            )
        else:
            self.nonres = 0
        self.zero = (0, 0)
        self.one = (1, 0)

    def add(self, a, b):
        return ((a[0] + b[0]) % self.p, (a[1] + b[1]) % self.p)

    def neg(self, a):
        return ((-a[0]) % self.p, (-a[1]) % self.p)

    def mul(self, a, b):
        return (
            (a[0] * b[0] + self.nonres * a[1] * b[1]) % self.p,
            (a[0] * b[1] + a[1] * b[0]) % self.p,
        )

    def inv(self, a):
        u, v = a
        # (u + vx)(u - vx) = u^2 - nonres v^2 in F_p
        norm = (u * u - self.nonres * v * v) % self.p
        ninv = pow(norm, self.p - 2, self.p)
        return ((u * ninv) % self.p, (-v * ninv) % self.p)

    def elements(self):
        if self.k == 1:
            return [(u, 0) for u in range(self.p)]
        return [(u, v) for u in range(self.p) for v in range(self.p)]


def congruence_quotients(
    p: GroupPresentation,
    field_sizes: Iterable[int],
    max_results: int = 8,
) -> list[FiniteQuotient]:
    """PSL(2, q) style quotients for two-generator presentations.

    Tries images a -> [[1,1],[0,1]], b -> [[1,0],[c,1]] over F_q for each unit
    c, keeping parameter values for which every relator maps to +/-identity;
    the permutation action is on the projective line (q + 1 points).  This is
    a structured search, not a theorem: every returned quotient is verified
    against the relators like any other.
    """
    if p.rank != 2:
        raise ValueError("congruence quotients require exactly two generators")
    out: list[FiniteQuotient] = []
    seen_orders: set[int] = set()
    for q in field_sizes:
        F = _Field(q)
        pts = [(F.one, F.zero)] + [(x, F.one) for x in F.elements()]
        index = {v: i for i, v in enumerate(pts)}

        def normalize(v):
            x, y = v
            if y != F.zero:
                i = F.inv(y)
                return (F.mul(x, i), F.one)
            return (F.one, F.zero)

        def act(M, v):
            x, y = v
            return normalize(
                (
                    F.add(F.mul(M[0][0], x), F.mul(M[0][1], y)),
                    F.add(F.mul(M[1][0], x), F.mul(M[1][1], y)),
                )
            )

        def mat_perm(M) -> Perm:
            return tuple(index[act(M, v)] for v in pts)

        A = ((F.one, F.one), (F.zero, F.one))
        pa = mat_perm(A)
        ident = identity_perm(len(pts))
        for c in F.elements():
            if c == F.zero:
                continue
            B = ((F.one, F.zero), (c, F.one))
            pb = mat_perm(B)
            images = (pa, pb)
            if all(perm_of_word(r, images) == ident for r in p.relators):
                if not is_transitive(images):
                    continue
                quo = FiniteQuotient(len(pts), images)
                if quo.order in seen_orders:
                    continue
                seen_orders.add(quo.order)
                out.append(quo)
                if len(out) >= max_results:
                    return out
    return out
