"""Built-in presentations of knot and link groups with reference metadata.

Entries are hard-coded Wirtinger-style presentations (no diagram parsing).
Metadata values carry provenance notes; expected invariants are reference
data for tests and reports, never inputs to the computations themselves.

Sign conventions for the default cohomology class follow the source diagrams
per entry and are recorded in the notes rather than guessed globally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .presentations import CohomologyClass, GroupPresentation, dehn_fill
from .words import Word, commutator, parse_word


@dataclass(frozen=True)
class CatalogEntry:
    presentation: GroupPresentation
    default_class: CohomologyClass
    metadata: dict[str, Any] = field(default_factory=dict)


def _two_bridge_word(p: int, q: int) -> Word:
    """w = prod (b if i odd else a)^eps_i, eps_i = (-1)^floor(i q / p), i < p."""
    letters = []
    for i in range(1, p):
        eps = -1 if (i * q // p) % 2 else 1
        gen = 1 if i % 2 else 0  # odd positions use b (index 1)
        letters.append((gen, eps))
    return Word.from_letters(letters)


def _two_bridge_presentation(name: str, p: int, q: int) -> GroupPresentation:
    """Meridian presentation <a, b | a w b^-1 w^-1> of the 2-bridge knot S(p, q)."""
    w = _two_bridge_word(p, q)
    a = Word.generator(0)
    b = Word.generator(1)
    relator = a * w * b.inverse() * w.inverse()
    return GroupPresentation(
        name=name,
        generator_names=("a", "b"),
        relators=(relator,),
        torsion_free=True,
        h1_free=True,
    )


def _borromean_presentation() -> GroupPresentation:
    a, b, c = (Word.generator(i) for i in range(3))
    r = commutator(a, commutator(c, b.inverse()))
    s = commutator(b, commutator(a, c.inverse()))
    return GroupPresentation(
        name="borromean",
        generator_names=("a", "b", "c"),
        relators=(r, s),
        torsion_free=True,
        h1_free=True,
    )


def whitehead_filling_relator(m: int) -> Word:
    """c * [b, a^-1]^m: the 1/m Dehn-filling slope on the third component."""
    a, b, c = (Word.generator(i) for i in range(3))
    longitude = commutator(b, a.inverse())
    return c * longitude**m


# census volumes are duplicated in data/volumes.csv; the short constants here
# keep catalog construction free of file I/O
VOL_FIG8 = 2.029883212819307
VOL_WHITEHEAD = 3.663862376708876
VOL_BORROMEAN = 7.327724753417752
VOL_5_2 = 2.828122088330783
VOL_6_1 = 3.163963228883143

FIG8_ENTROPY = (3 + 5**0.5) / 2  # monodromy dilatation of the fibration


def _build_catalog() -> dict[str, CatalogEntry]:
    entries: dict[str, CatalogEntry] = {}

    trefoil = GroupPresentation(
        name="trefoil",
        generator_names=("a", "b"),
        relators=(parse_word("a b a B A B", ("a", "b")),),
        torsion_free=True,
        h1_free=True,
    )
    entries["trefoil"] = CatalogEntry(
        presentation=trefoil,
        default_class=CohomologyClass.of(1, 1),
        metadata={
            "census_name": "3_1",
            "genus": 1,
            "fibered": True,
            "entropy": 1.0,
            "volume": 0.0,
            "hyperbolic": False,
            "graph_manifold": True,
            "thurston_norm": 1,
            "leading_coefficient": 1.0,
            "jsj": [{"volume": 0.0, "phi_restriction_zero": False}],
            "notes": "torus knot exterior; closed form max{1,t^x}, x = 2g-1 = 1",
        },
    )

    entries["cinquefoil"] = CatalogEntry(
        presentation=_two_bridge_presentation("cinquefoil", 5, 1),
        default_class=CohomologyClass.of(1, 1),
        metadata={
            "census_name": "5_1",
            "genus": 2,
            "fibered": True,
            "entropy": 1.0,
            "volume": 0.0,
            "hyperbolic": False,
            "graph_manifold": True,
            "thurston_norm": 3,
            "leading_coefficient": 1.0,
            "jsj": [{"volume": 0.0, "phi_restriction_zero": False}],
            "notes": "(2,5) torus knot as 2-bridge S(5,1)",
        },
    )

    entries["figure8"] = CatalogEntry(
        presentation=_two_bridge_presentation("figure8", 5, 3),
        default_class=CohomologyClass.of(1, 1),
        metadata={
            "census_name": "4_1",
            "genus": 1,
            "fibered": True,
            "entropy": FIG8_ENTROPY,
            "volume": VOL_FIG8,
            "hyperbolic": True,
            "graph_manifold": False,
            "thurston_norm": 1,
            "leading_coefficient": 1.0,
            "jsj": [{"volume": VOL_FIG8, "phi_restriction_zero": False}],
            "notes": "2-bridge S(5,3); volume from census table; C = 1 for the "
            "fibered class (hyperbolic 2-bridge)",
        },
    )

    entries["5_2"] = CatalogEntry(
        presentation=_two_bridge_presentation("5_2", 7, 3),
        default_class=CohomologyClass.of(1, 1),
        metadata={
            "census_name": "5_2",
            "genus": 1,
            "fibered": False,
            "entropy": None,
            "volume": VOL_5_2,
            "hyperbolic": True,
            "graph_manifold": False,
            "thurston_norm": 1,
            "leading_coefficient": 1.0,
            "jsj": [{"volume": VOL_5_2, "phi_restriction_zero": False}],
            "notes": "non-fibered hyperbolic twist knot; 2-bridge, so C = 1",
        },
    )

    entries["6_1"] = CatalogEntry(
        presentation=_two_bridge_presentation("6_1", 9, 7),
        default_class=CohomologyClass.of(1, 1),
        metadata={
            "census_name": "6_1",
            "genus": 1,
            "fibered": False,
            "entropy": None,
            "volume": VOL_6_1,
            "hyperbolic": True,
            "graph_manifold": False,
            "thurston_norm": 1,
            "leading_coefficient": 1.0,
            "jsj": [{"volume": VOL_6_1, "phi_restriction_zero": False}],
            "notes": "non-fibered hyperbolic twist knot; 2-bridge, so C = 1",
        },
    )

    borromean = _borromean_presentation()
    entries["borromean"] = CatalogEntry(
        presentation=borromean,
        default_class=CohomologyClass.of(0, -1, 0),
        metadata={
            "census_name": "6^3_2",
            "fibered": False,
            "volume": VOL_BORROMEAN,
            "hyperbolic": True,
            "graph_manifold": False,
            "thurston_norm": 1,
            "leading_coefficient": 1.0,
            "jsj": [{"volume": VOL_BORROMEAN, "phi_restriction_zero": False}],
            "notes": "meridian presentation with commutator relators; "
            "default class normalized to phi(b) = -1; "
            "thurston_norm = |phi(a)| + |phi(b)| + |phi(c)| for this link; "
            "C = 1 for every nonzero class",
        },
    )

    whitehead = dehn_fill(borromean, whitehead_filling_relator(1))
    whitehead = GroupPresentation(
        name="whitehead",
        generator_names=whitehead.generator_names,
        relators=whitehead.relators,
        torsion_free=True,
        h1_free=True,
    )
    entries["whitehead"] = CatalogEntry(
        presentation=whitehead,
        default_class=CohomologyClass.of(0, -1, 0),
        metadata={
            "census_name": "5^2_1",
            "fibered": True,
            "volume": VOL_WHITEHEAD,
            "hyperbolic": True,
            "graph_manifold": False,
            "thurston_norm": 1,
            "leading_coefficient": 1.0,
            "redundant_relator": 1,
            "jsj": [{"volume": VOL_WHITEHEAD, "phi_restriction_zero": False}],
            "notes": "1/1 filling of the third Borromean component; the filled "
            "group is generated by a, b with c = [b, a^-1]^-1; C = 1 for "
            "every nonzero class",
        },
    )

    entries["whitehead_double_figure8"] = CatalogEntry(
        presentation=GroupPresentation(
            name="whitehead_double_figure8",
            generator_names=("m",),
            relators=(),
            torsion_free=True,
            h1_free=True,
        ),
        default_class=CohomologyClass.of(1),
        metadata={
            "census_name": "W(4_1)",
            "fibered": False,
            "volume": VOL_FIG8 + VOL_WHITEHEAD,
            "hyperbolic": False,
            "graph_manifold": False,
            "thurston_norm": 1,
            "leading_coefficient": 2.718281828459045 ** (VOL_FIG8 / (6 * 3.141592653589793)),
            "jsj": [
                {"volume": VOL_FIG8, "phi_restriction_zero": True},
                {"volume": VOL_WHITEHEAD, "phi_restriction_zero": False},
            ],
            "metadata_only": True,
            "notes": "untwisted Whitehead double of the figure-eight knot: "
            "bounds-record entry only (JSJ piece data), no torsion curve is "
            "computed from this placeholder presentation; "
            "C = exp(vol(E_4_1)/6pi)",
        },
    )

    return entries


_CATALOG = _build_catalog()


def catalog_names() -> list[str]:
    return sorted(_CATALOG)


def catalog_get(name: str) -> tuple[GroupPresentation, CohomologyClass, dict[str, Any]]:
    """Presentation, default cohomology class and metadata for a catalog name."""
    try:
        entry = _CATALOG[name]
    except KeyError:
        raise KeyError(
            f"unknown catalog name {name!r}; known: {', '.join(catalog_names())}"
        ) from None
    return entry.presentation, entry.default_class, dict(entry.metadata)
