"""Universal extensions, preenvelopes, precovers, and their verification."""

import dataclasses

import pytest

from filtra import (Conflation, ExtObstruction, RepMorphism, Representation,
                    ThetaFamily, ValidationError, ZeroExt, direct_sum,
                    enumerate_reps, ext_space, group, is_isomorphic,
                    is_theta_injective, is_theta_projective, oracle_filtered,
                    perp_class, precover, preenvelope, universal_extension_cover,
                    universal_extension_env, verify_precover, verify_preenvelope)


def test_universal_extension_cover_of_s1(s1, s2, p1):
    c = universal_extension_cover(s1, s2)
    assert c.A == s2 and c.C == s1
    assert is_isomorphic(c.B, p1)
    # the point of the construction: ext(B, A) vanishes afterwards
    assert ext_space(c.B, s2).dimension == 0


def test_universal_extension_cover_needs_ext(s1, s2):
    with pytest.raises(ZeroExt):
        universal_extension_cover(s2, s1)


def test_universal_extension_env_of_s2(s1, s2, p1):
    c = universal_extension_env(s2, s1)
    assert c.A == s2 and is_isomorphic(c.B, p1)
    assert is_isomorphic(c.C, s1)
    assert ext_space(s1, c.B).dimension == 0


def test_universal_extension_env_degenerate(s1, s2):
    c = universal_extension_env(s1, s2)
    assert c.A == s1 and c.B == s1 and c.C.total_dim == 0


def test_universal_extension_env_obstructed(s1, s2):
    both = direct_sum(s1, s2).rep
    assert ext_space(both, both).dimension == 1
    with pytest.raises(ExtObstruction, match="dimension 1"):
        universal_extension_env(s2, both)


def test_preenvelope_spot_value(full_family, s1, s2, p1):
    res = preenvelope(s2, full_family)
    assert res.side == "envelope"
    assert res.triangle.A == s2
    assert is_isomorphic(res.triangle.B, p1)
    assert is_isomorphic(res.triangle.C, s1)
    assert res.map == res.triangle.x
    assert res.filtered_part.top == res.triangle.C
    assert res.filtered_part.labels == (0,)


def test_precover_spot_value(full_family, s1, s2, p1):
    res = precover(s1, full_family)
    assert res.side == "cover"
    assert res.triangle.C == s1
    assert is_isomorphic(res.triangle.B, p1)
    assert is_isomorphic(res.triangle.A, s2)
    assert res.map == res.triangle.y
    assert res.filtered_part.top == res.triangle.A
    assert res.filtered_part.labels == (1,)


def test_preenvelope_of_injective_is_identity(full_family, p1):
    res = preenvelope(p1, full_family)
    assert res.triangle.B == p1 and res.triangle.C.total_dim == 0
    assert len(res.filtered_part) == 0


def test_approximations_over_the_desk(a2, full_family):
    for x in enumerate_reps(a2, 2, (2, 2)):
        env = preenvelope(x, full_family)
        assert is_theta_injective(env.triangle.B, full_family)
        assert oracle_filtered(env.triangle.C, full_family)
        assert env.filtered_part.is_ordered()
        assert len(group(env.filtered_part)) <= len(full_family)
        cov = precover(x, full_family)
        assert is_theta_projective(cov.triangle.B, full_family)
        assert oracle_filtered(cov.triangle.A, full_family)
        assert cov.filtered_part.is_ordered()
        assert len(group(cov.filtered_part)) <= len(full_family)


def test_verify_preenvelope_passes_and_sorts(full_family, s1, s2, p1):
    res = preenvelope(s2, full_family)
    report = verify_preenvelope(res, [p1, s1])
    assert report.passed
    assert [r.dim for r, _ in report.entries] == [(1, 0), (1, 1)]
    assert report.skipped == ()


def test_verify_skips_illegitimate_test_objects(full_family, s2):
    res = preenvelope(s2, full_family)
    report = verify_preenvelope(res, [s2])
    assert report.entries == () and len(report.skipped) == 1
    assert report.passed  # vacuously


def test_verify_detects_a_corrupted_map(full_family, s1, s2, p1):
    res = preenvelope(s2, full_family)
    fake = dataclasses.replace(res, map=RepMorphism.zero(s2, res.triangle.B))
    report = verify_preenvelope(fake, [p1, s1])
    assert not report.passed
    # hom(S2, S1) = 0, so the S1 test is vacuous; P1 must catch the corruption
    outcomes = {r.dim: ok for r, ok in report.entries}
    assert outcomes[(1, 1)] is False


def test_verify_precover_detects_corruption(full_family, s1, s2, p1):
    res = precover(s1, full_family)
    report = verify_precover(res, [p1, s2])
    assert report.passed
    fake = dataclasses.replace(res, map=RepMorphism.zero(res.triangle.B, s1))
    bad = verify_precover(fake, [p1, s2])
    assert not bad.passed


def test_perp_class_sides(a2, s1, s2, p1):
    single = ThetaFamily((s1,))
    indecs = [s1, s2, p1]
    assert perp_class(single, "hom-left", indecs) == [s2]
    assert set(x.dim for x in perp_class(single, "hom-right", indecs)) == \
        {(0, 1), (1, 1)}
    assert set(x.dim for x in perp_class(single, "ext-left", indecs)) == \
        {(1, 0), (0, 1), (1, 1)}
    with pytest.raises(ValidationError, match="side"):
        perp_class(single, "sideways", indecs)
