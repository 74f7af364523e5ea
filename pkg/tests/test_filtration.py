"""Filtrations: stacking, exchange, collapse, reorder, group, decision."""

import random

import pytest

from filtra import (Budget, Conflation, ExtObstruction, Filtration,
                    FiltrationStep, RepMorphism, Representation, ThetaFamily,
                    ValidationError, collapse, decide_filtered, direct_power,
                    direct_sum, enumerate_reps, exchange, ext_space, extend,
                    group, in_add, is_isomorphic, iso_witness, multiplicities,
                    oracle_filtered, power_filtration, realize, reorder,
                    star_membership, transport_top)
from filtra.selftest import random_filtration, standard_families


def one_step(theta, label):
    member = theta[label]
    return FiltrationStep(Conflation.identity_left(member), label,
                          RepMorphism.identity(member))


def test_validation_rejects_nonzero_start(full_family, s1, s2):
    step = FiltrationStep(Conflation.split(s1, s2), 1, RepMorphism.identity(s2))
    with pytest.raises(ValidationError, match="start at the zero"):
        Filtration(full_family, [step])


def test_validation_rejects_broken_witness(full_family, s1, s2):
    step = FiltrationStep(Conflation.identity_left(s2), 1,
                          RepMorphism.zero(s2, s2))
    with pytest.raises(ValidationError, match="witness"):
        Filtration(full_family, [step])


def test_power_filtration_shape(full_family, s2):
    f = power_filtration(full_family, 1, 3)
    assert len(f) == 3 and f.labels == (1, 1, 1)
    assert f.top == direct_power(s2, 3)
    assert f.is_ordered()
    g = group(f)
    assert len(g) == 1 and g.steps[0].multiplicity == 3


def test_extend_concatenates_labels(full_family, s1, s2):
    c = realize(ext_space(s1, s2).element([1]))
    f_sub = Filtration(full_family, [one_step(full_family, 1)])
    f_quot = Filtration(full_family, [one_step(full_family, 0)])
    f = extend(c, f_sub, f_quot)
    assert f.top == c.B
    assert f.labels == (1, 0) and f.is_ordered()
    assert multiplicities(f) == (1, 1)


def test_extend_requires_matching_tops(full_family, s1, s2):
    c = realize(ext_space(s1, s2).element([1]))
    wrong = Filtration(full_family, [one_step(full_family, 0)])
    with pytest.raises(ValidationError, match="tops"):
        extend(c, wrong, wrong)


def test_exchange_swaps_split_neighbors(full_family, s1, s2):
    # S1 below S2 can always be exchanged since ext(S2, S1) = 0
    c1 = Conflation.identity_left(s1)
    c2 = Conflation.split(s1, s2)
    low, high = exchange(c1, c2)
    assert low.A == c1.A and high.B == c2.B
    assert low.B == high.A
    assert is_isomorphic(low.C, s2) and is_isomorphic(high.C, s1)


def test_exchange_obstructed_by_ext(full_family, s1, s2):
    # S2 below S1 cannot be exchanged: ext(S1, S2) = 1
    c1 = Conflation.identity_left(s2)
    c2 = realize(ext_space(s1, s2).element([1]))
    with pytest.raises(ExtObstruction, match="dimension 1"):
        exchange(c1, c2)


def test_collapse_merges_equal_quotients(full_family, s1):
    fs = [Conflation.identity_left(s1), Conflation.split(s1, s1)]
    merged = collapse(fs)
    assert merged.A == fs[0].A and merged.B == fs[1].B
    assert merged.C == direct_power(s1, 2)


def test_collapse_obstructed_by_self_extension(a2, s1, s2):
    both = direct_sum(s1, s2).rep
    assert ext_space(both, both).dimension == 1
    with pytest.raises(ExtObstruction):
        collapse([Conflation.identity_left(both)])


def test_reorder_explicit_swap(full_family, s1, s2):
    st1 = one_step(full_family, 0)
    st2 = FiltrationStep(Conflation.split(s1, s2), 1, RepMorphism.identity(s2))
    f = Filtration(full_family, [st1, st2])
    assert not f.is_ordered()
    g = reorder(f)
    assert g.is_ordered() and g.labels == (1, 0)
    assert g.top == f.top
    assert multiplicities(g) == multiplicities(f)


def test_reorder_random_roundtrip(a2, a3):
    rng = random.Random(31)
    for quiver in (a2, a3):
        for theta in standard_families(quiver, 2):
            for _ in range(10):
                f = random_filtration(rng, theta, rng.randrange(5))
                g = reorder(f)
                assert g.is_ordered()
                assert g.top == f.top
                assert multiplicities(g) == multiplicities(f)
                grouped = group(g)
                assert grouped.top == f.top
                assert grouped.multiplicity_vector == multiplicities(f)
                assert len(grouped) <= len(theta)


def test_group_needs_order(full_family, s1, s2):
    st1 = one_step(full_family, 0)
    st2 = FiltrationStep(Conflation.split(s1, s2), 1, RepMorphism.identity(s2))
    f = Filtration(full_family, [st1, st2])
    with pytest.raises(ValidationError, match="reorder first"):
        group(f)


def test_transport_top_keeps_labels(full_family, p1, s1, s2):
    f = decide_filtered(p1, full_family)
    assert f is not None and f.top == p1
    c = realize(ext_space(s1, s2).element([1]))
    w = iso_witness(p1, c.B)
    g = transport_top(f, w)
    assert g.top == c.B and g.labels == f.labels


def test_star_membership_order_matters(p1, s1, s2):
    chain = star_membership(p1, [in_add(s2), in_add(s1)])
    assert chain is not None and len(chain) == 2
    assert chain[0].A.total_dim == 0 and chain[-1].B == p1
    assert chain[0].B == chain[1].A
    assert is_isomorphic(chain[0].C, s2) and is_isomorphic(chain[1].C, s1)
    assert star_membership(p1, [in_add(s1), in_add(s2)]) is None


def test_star_with_zero_layers(s1, s2, p1):
    # predicates accepting the zero object allow an unused layer
    assert star_membership(s1, [in_add(s2), in_add(s1)]) is not None
    assert star_membership(s1, [in_add(s1), in_add(s2)]) is not None


def test_decide_matches_oracle_spot_values(full_family, mixed_family, s1, s2, p1):
    f = decide_filtered(p1, full_family)
    assert f is not None and f.labels == (1, 0)
    assert oracle_filtered(p1, full_family)
    assert decide_filtered(s2, mixed_family) is None
    assert not oracle_filtered(s2, mixed_family)
    f = decide_filtered(s1, mixed_family)
    assert f is not None and f.labels == (0,)


def test_filtered_class_equals_layered_star(a2, full_family, mixed_family, s1, s2, p1):
    # membership in the filtered class is the same as membership in
    # add theta[t] * ... * add theta[1] (largest label at the bottom)
    for theta in (full_family, mixed_family):
        classes = [in_add(theta[i]) for i in range(len(theta) - 1, -1, -1)]
        for m in enumerate_reps(a2, 2, (2, 2)):
            decided = decide_filtered(m, theta) is not None
            starred = star_membership(m, classes) is not None
            assert decided == starred, m.dim


def test_decide_dimension_additivity(a2, full_family):
    for m in enumerate_reps(a2, 2, (2, 2)):
        f = decide_filtered(m, full_family)
        assert f is not None  # every A2 module is filtered by both simples
        counts = multiplicities(f)
        total = [0, 0]
        for i, k in enumerate(counts):
            for v in range(2):
                total[v] += k * full_family[i].dim[v]
        assert tuple(total) == m.dim


def test_decide_respects_budget(a2):
    # decisions are memoized per family, so use a field nothing else touches
    fam = ThetaFamily((Representation.simple(a2, 5, 0),
                       Representation.simple(a2, 5, 1)))
    target = direct_power(Representation.projective(a2, 5, 0), 3)
    with pytest.raises(Exception) as info:
        decide_filtered(target, fam, Budget(1))
    assert "budget" in str(info.value)


def test_filtration_of_direct_power_family(a2, s1, s2):
    # filtering by a direct power member accepts only multiples of it
    fam = ThetaFamily((s1, direct_power(s2, 2)))
    assert decide_filtered(s2, fam) is None
    assert decide_filtered(direct_power(s2, 2), fam) is not None
    assert oracle_filtered(direct_power(s2, 2), fam)
