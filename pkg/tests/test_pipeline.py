from fractions import Fraction

import pytest

from splitcover.permgroup import (
    Permutation,
    closure,
    conjugate,
    inverse,
)
from splitcover.pipeline import (
    IrreducibilityFailureError,
    align_regular_labelings,
    realize_group,
    regular_representation,
    run_monodromy,
    run_verify_tower,
    solve_semitop_embedding,
)
from splitcover.wpoly import (
    BivariatePolyQi,
    GaussianRational,
    WeierstrassPoly,
    default_base_space,
)


def perm(*cycles, n):
    return Permutation.from_cycles(n, [tuple(c) for c in cycles])


def qi(re, im=0):
    return GaussianRational(Fraction(re), Fraction(im))


Z2 = closure((perm((1, 2), n=2),))
Z4 = closure((perm((1, 2, 3, 4), n=4),))
V4 = closure((perm((1, 2), (3, 4), n=4), perm((1, 3), (2, 4), n=4)))


@pytest.fixture(scope="module")
def realized_z2():
    space = default_base_space(1)
    poly, report = realize_group(Z2, space)
    return poly, space, report


def test_regular_representation_s3():
    s3 = closure((perm((1, 2), n=3), perm((1, 2, 3), n=3)))
    elems, images = regular_representation(s3)
    assert len(elems) == 6
    assert all(p.degree == 6 for p in images)
    assert closure(images).order() == 6
    assert closure(images).is_regular()


def test_align_regular_labelings_round_trip():
    s3 = closure((perm((1, 2), n=3), perm((1, 2, 3), n=3)))
    _, reg = regular_representation(s3)
    shuffle = Permutation((3, 1, 4, 2, 6, 5))
    scrambled = tuple(conjugate(p, inverse(shuffle)) for p in reg)
    pi = align_regular_labelings(scrambled, reg)
    assert pi is not None
    assert all(conjugate(s, pi) == d for s, d in zip(scrambled, reg))


def test_align_regular_labelings_rejects_mismatch():
    z4 = regular_representation(Z4)[1]
    v4 = regular_representation(V4)[1]
    padded_z4 = (z4[0], Permutation.identity(4))
    assert align_regular_labelings(padded_z4, v4) is None


def test_realize_trivial_group():
    trivial = closure((), degree=1)
    poly, report = realize_group(trivial)
    assert poly.degree == 1
    assert report.artifacts["deck_order"] == 1
    assert report.all_passed()


def test_realize_z2(realized_z2):
    poly, space, report = realized_z2
    assert poly.degree == 2
    assert report.verdicts["certificate_valid"]
    assert report.verdicts["monodromy_matches_regular_targets"]
    assert report.artifacts["monodromy"]["perms"] == [[2, 1]]
    assert report.artifacts["deck_order"] == 2
    assert report.artifacts["exact_recovery"]


def test_realize_z2_matches_square_root_oracle(realized_z2):
    # the output family must behave like z^2 - c(x) with c winding once
    poly, space, _ = realized_z2
    rep_perm = Permutation((2, 1))
    from splitcover.monodromy import characteristic_hom
    rep = characteristic_hom(poly, space, refine=True)
    assert rep.perms == (rep_perm,)


def test_realize_requires_matching_holes():
    with pytest.raises(ValueError):
        realize_group(Z2, default_base_space(2))


def test_realize_rejects_oversized_group():
    z30 = closure((perm(tuple(range(1, 31)), n=30),))
    with pytest.raises(ValueError):
        realize_group(z30, order_limit=24)


def test_realize_unsupported_group_exhausts_fallback():
    # D4 has no exact synthesis here; the braid-annulus fallback cannot meet
    # the certificate bound at desk-scale degrees
    from splitcover.approx import DegreeExhaustedError
    d4 = closure((perm((1, 2, 3, 4), n=4), perm((1, 3), n=4)))
    with pytest.raises(DegreeExhaustedError):
        realize_group(d4, max_degree=3)


def test_embed_identity_case(realized_z2):
    poly, space, _ = realized_z2
    s = Permutation((2, 1))
    h, report = solve_semitop_embedding(poly, space, Z2, (s,))
    assert report.artifacts["rank_used"] == 1
    assert h.degree == 2
    assert report.all_passed()


def test_embed_z4_over_z2(realized_z2):
    poly, space, _ = realized_z2
    s = Permutation((2, 1))
    h, report = solve_semitop_embedding(poly, space, Z4, (s,))
    assert h.degree == 4
    assert report.artifacts["rank_used"] == 1
    assert report.verdicts["restriction_triangle"]
    assert report.verdicts["monodromy_matches_solver_targets"]
    assert report.all_passed()


def test_embed_klein_rank_extension(realized_z2):
    poly, space, _ = realized_z2
    s = Permutation((2, 1))
    h, report = solve_semitop_embedding(
        poly, space, V4, (s, Permutation.identity(2)))
    assert h.degree == 4
    assert report.artifacts["rank_used"] == 2
    assert report.verdicts["base_monodromy_stable_under_extension"]
    assert report.all_passed()


def test_embed_rejects_reducible_base():
    space = default_base_space(1)
    f = WeierstrassPoly(
        2, [BivariatePolyQi.constant(qi(-1)), BivariatePolyQi.zero()], base=space)
    with pytest.raises(IrreducibilityFailureError):
        solve_semitop_embedding(f, space, Z2, (Permutation.identity(1),))


def test_run_monodromy_constant_coefficients():
    space = default_base_space(1)
    f = WeierstrassPoly(
        2, [BivariatePolyQi.constant(qi(-1)), BivariatePolyQi.zero()], base=space)
    report = run_monodromy(f, space)
    assert report.artifacts["irreducible"] is False
    assert report.artifacts["deck_order"] == 1
    assert report.all_passed()


def test_run_monodromy_square_root_model(realized_z2):
    poly, space, _ = realized_z2
    report = run_monodromy(poly, space)
    assert report.artifacts["irreducible"] is True
    assert report.artifacts["monodromy"]["perms"] == [[2, 1]]
    assert report.verdicts["deck_action_on_roots_faithful"]


def test_run_verify_tower_z4_over_z2(realized_z2):
    g_poly, space, _ = realized_z2
    s = Permutation((2, 1))
    h_poly, embed_report = solve_semitop_embedding(g_poly, space, Z4, (s,))
    psi_images = [Permutation.from_json(p) for p in
                  embed_report.artifacts["embedding_solution"]["psi"]["gen_images"]]
    report = run_verify_tower(h_poly, g_poly, space, Z4, (s,), psi_images)
    assert report.all_passed(), report.verdicts


def test_run_verify_tower_detects_wrong_psi(realized_z2):
    g_poly, space, _ = realized_z2
    s = Permutation((2, 1))
    h_poly, _ = solve_semitop_embedding(g_poly, space, Z4, (s,))
    # psi sending the generator to the identity is not even injective
    bad_psi = [Permutation.identity(4)]
    report = run_verify_tower(h_poly, g_poly, space, Z4, (s,), bad_psi)
    assert not report.all_passed()


def test_reports_are_reproducible(realized_z2):
    poly, space, report = realized_z2
    poly2, report2 = realize_group(Z2, space)
    assert report2.artifacts["monodromy"] == report.artifacts["monodromy"]
    assert report2.artifacts["polynomial"] == report.artifacts["polynomial"]
    assert report2.verdicts == report.verdicts
