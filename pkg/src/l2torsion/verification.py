"""Identity and invariant suites behind the ``verify`` command.

Each suite returns (check name, ok, detail) triples; the CLI renders one line
per check and a machine-readable summary.  The suites exercise the closed
forms and reference computations the library is built around, at small
parameter sizes so a full run stays interactive.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

from .catalog import catalog_get
from .fkdet import (
    det_quotient,
    det_quotient_family,
    det_rules,
    det_rules_product,
    det_schur,
    det_series,
    verify_u0v0_tables,
)
from .groupring import (
    GroupRingElement,
    GroupRingMatrix,
    TwistParameters,
    fox_derivative,
    fox_matrix,
    neumann_inverse,
)
from .presentations import (
    CohomologyClass,
    GroupPresentation,
    dehn_fill,
    has_infinite_abelian_image,
    validate_class,
)
from .catalog import whitehead_filling_relator
from .quotients import FiniteQuotient, cyclic_quotient, quotient_search
from .torsion import EstimatorConfig, TorsionSpec, log_grid, torsion_at, torsion_curve
from .wordproblem import AbelianOracle, FreeOracle, QuotientOracle, has_infinite_order
from .words import Word

Check = tuple[str, bool, str]


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol


def _free_group_infinite_order(w: Word) -> bool:
    return not w.is_identity()


def suite_rules() -> list[Check]:
    checks: list[Check] = []
    g = Word.generator(0)
    h = Word.generator(1)

    est = det_rules(GroupRingElement.of_word(g, 3))
    checks.append(("det(3g) = 3", est is not None and est.value == 3.0, ""))

    one = GroupRingElement.one()
    two_g = GroupRingElement.of_word(g, 2)
    est = det_rules(one - two_g, _free_group_infinite_order)
    checks.append(("det(1 - 2g) = 2", est is not None and est.value == 2.0, ""))
    half_g = GroupRingElement.of_word(g, Fraction(1, 2))
    est = det_rules(one - half_g, _free_group_infinite_order)
    checks.append(("det(1 - g/2) = 1", est is not None and est.value == 1.0, ""))

    upper = GroupRingMatrix(
        [
            [GroupRingElement.of_word(g, 3), GroupRingElement.of_word(h, 7)],
            [GroupRingElement.zero(), one - two_g],
        ]
    )
    est = det_rules(upper, _free_group_infinite_order)
    checks.append(
        ("block triangular diag(3g, 1-2g) = 6", est is not None and est.value == 6.0, "")
    )
    # permutation/transpose invariance through the rules path
    permuted = upper.permute([1, 0], [1, 0])
    est_p = det_rules(permuted, _free_group_infinite_order)
    checks.append(
        ("row/column permutation leaves the rules value unchanged",
         est_p is not None and est_p.value == 6.0, "")
    )

    est = det_rules_product(
        [GroupRingMatrix.single(one - two_g), GroupRingMatrix.single(GroupRingElement.of_word(h, 5))],
        _free_group_infinite_order,
    )
    checks.append(("multiplicativity on an explicit factorization", est is not None and est.value == 10.0, ""))

    # quotient estimator is exact on monomials / unitaries times scalars
    z8 = FiniteQuotient(8, (tuple((i + 1) % 8 for i in range(8)),))
    mono = GroupRingElement.of_word(Word.generator(0, 3), -2.5)
    est_q = det_quotient(GroupRingMatrix.single(mono), z8)
    checks.append(
        ("quotient estimate of a monomial = |coefficient| to 1e-6",
         _close(est_q.value, 2.5, 1e-6), f"got {est_q.value:.9f}")
    )

    # transpose / permutation invariance of the numeric estimator
    mat = GroupRingMatrix(
        [
            [one - two_g, GroupRingElement.of_word(g, 1)],
            [GroupRingElement.zero(), one + GroupRingElement.of_word(g, Fraction(1, 3))],
        ]
    )
    base = det_quotient(mat, z8).value
    tr = det_quotient(mat.operator_transpose(), z8).value
    pm = det_quotient(mat.permute([1, 0], [0, 1]), z8).value
    checks.append(
        ("numeric transpose invariance to 1e-10", _close(base, tr, 1e-10), f"{base} vs {tr}")
    )
    checks.append(
        ("numeric row-permutation invariance to 1e-10", _close(base, pm, 1e-10), f"{base} vs {pm}")
    )

    # subgroup induction: the element a - 2 inside F2 against the same element
    # in F1, through matched quotient families (Z/8 x Z/8 against Z/8)
    f2_quotient = FiniteQuotient(
        64,
        (
            tuple((i + 8) % 64 for i in range(64)),
            tuple(8 * (i // 8) + (i + 1) % 8 for i in range(64)),
        ),
    )
    elt = one.scale(2) - GroupRingElement.of_word(g)
    in_f1 = det_quotient(GroupRingMatrix.single(elt), z8).value
    in_f2 = det_quotient(GroupRingMatrix.single(elt), f2_quotient).value
    checks.append(
        ("subgroup induction: matched families agree to 1e-10",
         _close(in_f1, in_f2, 1e-10), f"{in_f1} vs {in_f2}")
    )
    return checks


def suite_mahler() -> list[Check]:
    checks: list[Check] = []
    z = GroupPresentation(name="Z", generator_names=("a",), relators=())
    oracle = AbelianOracle(1)
    one = GroupRingElement.one()
    g = GroupRingElement.of_word(Word.generator(0))
    q256 = cyclic_quotient(z, 256)
    for t, tol in [(0.25, 0.01), (0.5, 0.01), (2.0, 0.01), (4.0, 0.01), (0.9, 0.1), (1.1, 0.1)]:
        target = max(1.0, t)
        m = GroupRingMatrix.single(one - g.scale(t))
        quo = det_quotient(m, q256)
        ser = det_series(m, K=1.001 * (1 + t), pmax=60, oracle=oracle)
        ok_q = _close(quo.value, target, tol)
        ok_s = _close(ser.value, target, tol)
        checks.append(
            (f"quotient(256) det(1 - {t} g) within {tol} of {target}",
             ok_q, f"got {quo.value:.5f}")
        )
        checks.append(
            (f"series(60) det(1 - {t} g) within {tol} of {target}",
             ok_s, f"got {ser.value:.5f}")
        )
        mono = all(
            ser.diagnostics[i + 1] <= ser.diagnostics[i] + 1e-12
            for i in range(len(ser.diagnostics) - 1)
        )
        checks.append((f"series partial values non-increasing at t={t}", mono, ""))
    return checks


def suite_fox() -> list[Check]:
    checks: list[Check] = []
    a = Word.generator(0)

    # d(a^n)/da = 1 + a + ... + a^(n-1)
    expected = GroupRingElement({Word.generator(0) ** k: 1 for k in range(4)})
    checks.append(("d(a^4)/da = 1 + a + a^2 + a^3", fox_derivative(a**4, 0) == expected, ""))

    # d([a,b])/da = 1 - a b a^-1
    comm = Word.from_letters([(0, 1), (1, 1), (0, -1), (1, -1)])
    expected = GroupRingElement(
        {Word(): 1, Word.from_letters([(0, 1), (1, 1), (0, -1)]): -1}
    )
    checks.append(("d([a,b])/da = 1 - aba^-1", fox_derivative(comm, 0) == expected, ""))

    # fundamental identity on every catalog relator, exactly in the free ring
    for name in ("trefoil", "figure8", "cinquefoil", "5_2", "6_1", "borromean", "whitehead"):
        pres, _, _ = catalog_get(name)
        ok = True
        for r in pres.relators:
            total = GroupRingElement.zero()
            for j in range(pres.rank):
                gen = GroupRingElement.of_generator(j)
                total = total + fox_derivative(r, j) * (gen - GroupRingElement.one())
            ok = ok and total == GroupRingElement.of_word(r) - GroupRingElement.one()
        checks.append((f"fox fundamental identity: {name}", ok, ""))

    # the Borromean twisted Fox matrix reproduces the reference 2x2 shape
    checks.extend(_borromean_matrix_checks())
    return checks


def _borromean_matrix_checks() -> list[Check]:
    checks: list[Check] = []
    pres, _, _ = catalog_get("borromean")
    wd = pres.word
    r_word, s_word = pres.relators
    one = GroupRingElement.one()

    def elem(text: str) -> GroupRingElement:
        return GroupRingElement.of_word(wd(text))

    # exact free-ring factorizations of the Fox entries
    dr_db = fox_derivative(r_word, 1)
    dr_dc = fox_derivative(r_word, 2)
    ds_db = fox_derivative(s_word, 1)
    ds_dc = fox_derivative(s_word, 2)
    a_minus_r = elem("a") - GroupRingElement.of_word(r_word)
    b_minus_s = elem("b") - GroupRingElement.of_word(s_word)
    checks.append(
        ("d r / d b = (a - r)(c b^-1 c^-1 - c b^-1) exactly",
         dr_db == a_minus_r * (elem("c B C") - elem("c B")), "")
    )
    checks.append(
        ("d r / d c = (a - r)(1 - c b^-1 c^-1) exactly",
         dr_dc == a_minus_r * (one - elem("c B C")), "")
    )
    checks.append(
        ("d s / d b = 1 - b a c^-1 a^-1 c b^-1 exactly",
         ds_db == one - elem("b a C A c B"), "")
    )
    checks.append(
        ("d s / d c = (b - s)(a c^-1 a^-1 - a c^-1) exactly",
         ds_dc == b_minus_s * (elem("a C A") - elem("a C")), "")
    )

    # determinant agreement with the reference block form, inside a finite
    # quotient where the relators die (degree-8 class-2 nilpotent image)
    quotients = quotient_search(pres, 4, limit=3)
    quotients = [q for q in quotients if q.order >= 8] or quotients
    q = quotients[0]
    alpha, gamma = Fraction(1), Fraction(2)
    phi = CohomologyClass.of(alpha, -1, gamma)
    ok_all = True
    detail = ""
    for t in (Fraction(1, 2), Fraction(1, 3)):
        tw = TwistParameters(phi, t)
        mine = fox_matrix(pres).kappa_twist(tw).delete_column(0)
        tf = float(t)
        ta, tg = tf ** float(alpha), tf ** float(gamma)
        ref = GroupRingMatrix(
            [
                [
                    (elem("a").scale(ta) - one) * elem("c B C").scale(tf) * (one - elem("c").scale(tg)),
                    (elem("a").scale(ta) - one) * (one - elem("c B C").scale(tf)),
                ],
                [
                    one - elem("b a C A c B"),
                    (one - elem("b").scale(1 / tf))
                    * elem("a C A").scale(tg ** -1)
                    * (elem("a").scale(ta) - one),
                ],
            ]
        ).transpose()
        d_mine = det_quotient(mine, q).value
        d_ref = det_quotient(ref, q).value
        if not _close(d_mine, d_ref, 1e-9 * max(1.0, d_ref)):
            ok_all = False
            detail = f"t={t}: {d_mine} vs {d_ref}"
    checks.append(
        ("twisted Borromean Fox matrix matches the reference 2x2 determinant "
         f"in a degree-{q.degree} quotient", ok_all, detail)
    )

    # matrix trace = sum of diagonal traces
    mat = GroupRingMatrix(
        [[one - elem("a"), elem("b")], [elem("c"), one.scale(3) + elem("a C")]]
    )
    oracle = FreeOracle()
    total, _ = mat.trace(oracle)
    d0, _ = mat.entries[0][0].trace(oracle)
    d1, _ = mat.entries[1][1].trace(oracle)
    checks.append(("matrix trace sums the diagonal traces", total == d0 + d1, ""))
    return checks


def suite_u0v0() -> list[Check]:
    report = verify_u0v0_tables()
    checks: list[Check] = []
    for entry in report.entries:
        checks.append(
            (
                f"{entry.table}({entry.case}): {entry.expression} -> det 1",
                entry.ok,
                entry.form or "no classification",
            )
        )
    checks.append(("all 18 table entries classified", report.all_ok, ""))
    return checks


def suite_schur() -> list[Check]:
    checks: list[Check] = []
    one = GroupRingElement.one()
    g = GroupRingElement.of_word(Word.generator(0))

    # telescoping: (1 - y) * neumann(1 - y) = 1 - y^(n+1)
    x = one - g.scale(0.5)
    inv, residual = neumann_inverse(x, 3)
    expected = one - g.scale(0.5) ** 4
    checks.append(
        ("(1-y) * truncated inverse telescopes", x * inv == expected, f"residual {residual:.4f}")
    )

    z = GroupPresentation(name="Z", generator_names=("a",), relators=())
    q64 = cyclic_quotient(z, 64)

    def estimator(m: GroupRingMatrix):
        est = det_rules(m, _free_group_infinite_order)
        if est is not None:
            return est
        return det_quotient(m, q64)

    # det Schur with A = D = 1, B = 0: value approximates det(C) * det(C^-1) = 1
    A = GroupRingMatrix.single(one)
    B = GroupRingMatrix.single(GroupRingElement.zero())
    C = GroupRingMatrix.single(one - g.scale(0.5))
    D = GroupRingMatrix.single(one)
    est = det_schur(A, B, C, D, inversion_order=24, estimator=estimator)
    checks.append(
        ("Schur composite with trivial blocks near 1", _close(est.value, 1.0, 0.01),
         f"got {est.value:.5f}")
    )

    # block-triangular degenerate case: A = C = I, B = 0 leaves det(D)
    est = det_schur(
        GroupRingMatrix.identity(1),
        GroupRingMatrix.single(GroupRingElement.zero()),
        GroupRingMatrix.identity(1),
        GroupRingMatrix.single(one - g.scale(2)),
        inversion_order=0,
        estimator=estimator,
    )
    checks.append(("degenerate Schur reduces to det(D)", _close(est.value, 2.0, 1e-9), ""))

    # Borromean at t in (0,1): full 2x2 determinant equals det(C) * det(Schur
    # complement) within the truncation budget
    checks.append(_borromean_schur_check())
    return checks


def _borromean_schur_check() -> Check:
    pres, _, _ = catalog_get("borromean")
    wd = pres.word
    one = GroupRingElement.one()

    def elem(text: str) -> GroupRingElement:
        return GroupRingElement.of_word(wd(text))

    t = 0.5
    gamma = 0.0
    # gamma = 0, alpha = 0 blocks of the reference matrix at phi = (0,-1,0)
    A = GroupRingMatrix.single(elem("c B C").scale(t) * (one - elem("c")))
    B = GroupRingMatrix.single(one - elem("a C A c"))
    C = GroupRingMatrix.single(one - elem("c B C").scale(t))
    D = GroupRingMatrix.single(
        (elem("a") - one) * (one - elem("b").scale(1 / t))
    )
    quotients = [q for q in quotient_search(pres, 4, limit=3) if q.order >= 8]
    q = quotients[0]

    def estimator(m: GroupRingMatrix):
        return det_quotient(m, q)

    est = det_schur(A, B, C, D, inversion_order=30, estimator=estimator)
    direct = det_quotient(
        GroupRingMatrix([[A[0, 0], B[0, 0]], [C[0, 0], D[0, 0]]]), q
    )
    # det(C_t) = max{1, t} = 1 for t < 1, so the composite should match the
    # full block determinant
    ok = _close(est.value, direct.value, 0.05 * max(1.0, direct.value))
    return (
        "Borromean Schur composite matches the 2x2 block determinant at t=1/2",
        ok,
        f"{est.value:.5f} vs {direct.value:.5f}",
    )


def suite_presentations() -> list[Check]:
    checks: list[Check] = []
    boro, phi_b, _ = catalog_get("borromean")
    checks.append(
        ("Borromean class (alpha, -1, gamma) vanishes on the commutator relators",
         validate_class(boro, CohomologyClass.of(3, -1, Fraction(2, 7))), "")
    )
    bad = GroupPresentation(
        name="bad", generator_names=("a", "b"), relators=(Word.from_letters([(0, 1), (1, -1)]),)
    )
    checks.append(
        ("phi = (1,0) rejected on <a,b | a b^-1>", not validate_class(bad, CohomologyClass.of(1, 0)), "")
    )
    checks.append(("zero class always valid", validate_class(boro, CohomologyClass.of(0, 0, 0)), ""))

    # Dehn filling: Whitehead presentations
    for m in (1, 2):
        filled = dehn_fill(boro, whitehead_filling_relator(m))
        ok = (
            filled.rank == boro.rank
            and filled.relators[:2] == boro.relators
            and len(filled.relators) == 3
        )
        checks.append((f"1/{m} filling appends one relator, keeps generators", ok, ""))
    white, _, _ = catalog_get("whitehead")
    checks.append(
        ("catalog whitehead presentation == filled Borromean",
         white.relators == dehn_fill(boro, whitehead_filling_relator(1)).relators, "")
    )

    # quotient search reference points
    trefoil, _, _ = catalog_get("trefoil")
    quos = quotient_search(trefoil, 3, limit=10)
    s3 = [q for q in quos if q.order == 6 and q.degree == 3]
    checks.append(("trefoil degree-3 search finds the S3 quotient", bool(s3), ""))
    z = GroupPresentation(name="Z", generator_names=("a",), relators=())
    quos_z = quotient_search(z, 5, limit=10)
    checks.append(
        ("free rank-1 search finds the 5-cycle",
         any(q.degree == 5 and q.order == 5 for q in quos_z), "")
    )
    quos_1 = quotient_search(trefoil, 1, limit=10)
    checks.append(
        ("degree-1 search returns only the trivial quotient",
         len(quos_1) == 1 and quos_1[0].order == 1, "")
    )

    # word problem on the Whitehead group: the filling determines c, so the
    # search only enumerates images of a and b
    from .quotients import completed_quotient_search

    wq = completed_quotient_search(
        white,
        determined={2: white.word("a B A b")},  # c = [b, a^-1]^-1
        max_degree=5,
        limit=6,
    )
    oracle = QuotientOracle(white, wq)
    meridian = Word.generator(0)
    checks.append(
        ("meridian a nontrivial in the filled group", oracle(meridian).is_not_identity(), "")
    )
    longitude = white.word("b A B a")
    c_prime = Word.generator(2)
    checks.append(
        ("longitude [b, a^-1] nontrivial in the filled group",
         oracle(longitude).is_not_identity(), "")
    )
    checks.append(("relator maps to identity", oracle(white.relators[0]).is_identity(), ""))
    order = has_infinite_order(c_prime, CohomologyClass.of(0, -1, 0), white, oracle)
    checks.append(
        ("c' = [b,a^-1]^-1 certified of infinite order (torsion-free route)",
         order.infinite and order.certain, order.reason)
    )
    return checks


def suite_torsion() -> list[Check]:
    checks: list[Check] = []
    trefoil, phi, _ = catalog_get("trefoil")
    q11 = cyclic_quotient(trefoil, 11)
    cfg = EstimatorConfig(method="quotient", quotients=(q11,))
    spec = TorsionSpec(presentation=trefoil, phi=phi, grid=log_grid(0.25, 4.0, 9), estimator=cfg)
    point = torsion_at(spec, 2.0)
    checks.append(
        ("trefoil value at t=2 equals 2^k max{1,2} with k=0 (10%)",
         _close(point.value, 2.0, 0.2), f"got {point.value:.4f}")
    )
    curve = torsion_curve(spec)
    worst = max(
        abs(p.value - max(1.0, p.t)) / max(1.0, p.t) for p in curve.points
    )
    checks.append(
        ("trefoil curve tracks max{1,t} within 10%", worst < 0.10, f"worst {worst:.2%}")
    )

    # evaluation at t = 1 is independent of the class (structural identity)
    boro, phi_b, _ = catalog_get("borromean")
    quos = [q for q in quotient_search(boro, 4, limit=3) if q.order >= 8]
    cfg_b = EstimatorConfig(method="quotient", quotients=tuple(quos[:1]))
    val1 = torsion_at(
        TorsionSpec(presentation=boro, phi=phi_b, estimator=cfg_b), 1.0
    ).value
    val2 = torsion_at(
        TorsionSpec(presentation=boro, phi=CohomologyClass.of(1, -1, 0), estimator=cfg_b), 1.0
    ).value
    checks.append(
        ("torsion at t=1 independent of the class", _close(val1, val2, 1e-12), f"{val1} vs {val2}")
    )

    # figure-eight t=1 family trends downward toward exp(vol/6pi)
    fig8, phi8, meta8 = catalog_get("figure8")
    from .quotients import congruence_quotients

    family = congruence_quotients(fig8, [7, 13], max_results=4)
    family = sorted(family, key=lambda q: q.order)
    values = []
    from .groupring import fox_matrix as _fox

    numerator = _fox(fig8).delete_column(0)
    for q in family:
        values.append(det_quotient(numerator, q).value)
    target = math.exp(meta8["volume"] / (6 * math.pi))
    trending = len(values) >= 2 and values[-1] < values[0] and values[-1] > target
    checks.append(
        (f"figure-eight t=1 estimates decrease toward {target:.4f}",
         trending, " -> ".join(f"{v:.4f}" for v in values))
    )
    return checks


def available_suites() -> dict[str, Callable[[], list[Check]]]:
    return {
        "rules": suite_rules,
        "fox": suite_fox,
        "u0v0": suite_u0v0,
        "presentations": suite_presentations,
        "schur": suite_schur,
        "mahler": suite_mahler,
        "torsion": suite_torsion,
    }
