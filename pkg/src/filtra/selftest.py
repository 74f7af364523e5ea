"""Invariant suites shared by the test suite and the command line selftest.

Each criterion function returns a CriterionResult with a pass flag and a
short human-readable detail line.  Randomized criteria take a seeded RNG so
identical invocations produce identical outcomes; searches that could blow
up take a Budget.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .approx import (is_theta_injective, is_theta_projective, perp_class,
                     precover, preenvelope, verify_precover, verify_preenvelope)
from .conflation import (Conflation, class_of, ext_space, is_split, et4_compose,
                         pullback, pushforward, realize)
from .errors import Budget
from .filtration import (Filtration, FiltrationStep, decide_filtered, group,
                         in_add, multiplicities, oracle_filtered, reorder,
                         star_membership)
from .linalg import Matrix
from .quiverrep import (Quiver, Representation, RepMorphism, ThetaFamily,
                        enumerate_indecomposables, enumerate_reps, euler_pairing,
                        hom_space, is_isomorphic)

__all__ = [
    "CriterionResult",
    "a2_quiver",
    "a3_quiver",
    "standard_families",
    "random_conflation",
    "random_filtration",
    "CRITERIA",
    "run_criteria",
]


@dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str


def a2_quiver() -> Quiver:
    return Quiver.from_edges(2, [("a", 0, 1)])


def a3_quiver() -> Quiver:
    return Quiver.from_edges(3, [("a", 0, 1), ("b", 1, 2)])


def standard_families(quiver: Quiver, p: int) -> list[ThetaFamily]:
    """The ordered families used throughout the desk checks.

    Candidates are (all simples), (first two simples), (first simple, first
    projective), (first simple); duplicates and candidates violating the
    ordering condition are dropped.
    """
    simples = [Representation.simple(quiver, p, v) for v in range(quiver.vertex_count)]
    proj = Representation.projective(quiver, p, 0)
    raw = [tuple(simples), tuple(simples[:2]), (simples[0], proj), (simples[0],)]
    families, seen = [], set()
    for members in raw:
        if members in seen:
            continue
        seen.add(members)
        if not ThetaFamily.ordering_failures(members):
            families.append(ThetaFamily(members))
    return families


# -- randomized generators ----------------------------------------------------

def _random_automorphism(rng: random.Random, m: Representation) -> Optional[RepMorphism]:
    basis = hom_space(m, m)
    for _ in range(16):
        phi = RepMorphism.zero(m, m)
        for f in basis:
            phi = phi + f.scale(rng.randrange(m.p))
        if phi.is_isomorphism():
            return phi
    return None


def scramble_middle(rng: random.Random, c: Conflation) -> Conflation:
    """Conjugate the middle object by a random automorphism when one is found."""
    phi = _random_automorphism(rng, c.B)
    return c.with_middle(phi) if phi is not None else c


def random_conflation(rng: random.Random, quiver: Quiver, p: int,
                      max_dim: Sequence[int]) -> Conflation:
    """Realize a random extension class between two random representations."""
    a = Representation.random(quiver, p, max_dim, rng)
    c = Representation.random(quiver, p, max_dim, rng)
    space = ext_space(c, a)
    coords = [rng.randrange(p) for _ in range(space.dimension)]
    return scramble_middle(rng, realize(space.element(coords)))


def random_filtration(rng: random.Random, theta: ThetaFamily, length: int) -> Filtration:
    """Stack random extension classes by randomly labeled family members."""
    steps = []
    cur = Representation.zero(theta.quiver, theta.p)
    for _ in range(length):
        i = rng.randrange(len(theta))
        member = theta[i]
        space = ext_space(member, cur)
        coords = [rng.randrange(theta.p) for _ in range(space.dimension)]
        c = realize(space.element(coords))
        if rng.random() < 0.5:
            c = scramble_middle(rng, c)
        steps.append(FiltrationStep(c, i, RepMorphism.identity(member)))
        cur = c.B
    return Filtration(theta, steps)


# -- criterion 1: ext dimensions and the Euler-form cross-check ---------------

def criterion_ext_dimensions(rng: random.Random, budget: Budget) -> CriterionResult:
    quiver, p = a2_quiver(), 2
    s1 = Representation.simple(quiver, p, 0)
    s2 = Representation.simple(quiver, p, 1)
    p1 = Representation.projective(quiver, p, 0)
    ok = True
    notes = []
    spot = {
        ("S1", "S2"): (ext_space(s1, s2).dimension, 1),
        ("S2", "S1"): (ext_space(s2, s1).dimension, 0),
        ("S1", "P1"): (ext_space(s1, p1).dimension, 0),
        ("P1", "S1"): (ext_space(p1, s1).dimension, 0),
        ("P1", "S2"): (ext_space(p1, s2).dimension, 0),
        ("P1", "P1"): (ext_space(p1, p1).dimension, 0),
    }
    for (cn, an), (got, want) in spot.items():
        if got != want:
            ok = False
            notes.append(f"ext({cn},{an}) = {got}, expected {want}")
    desk = enumerate_reps(quiver, p, (3, 3))
    pairs = 0
    for m in desk:
        for n in desk:
            pairs += 1
            lhs = len(hom_space(m, n)) - ext_space(m, n).dimension
            if lhs != euler_pairing(m, n):
                ok = False
                notes.append(f"Euler mismatch at dims {m.dim}, {n.dim}")
    detail = f"6 pinned dimensions, {pairs} Euler-form pairs"
    if notes:
        detail += "; " + "; ".join(notes[:4])
    return CriterionResult(1, "ext dimensions with Euler cross-check", ok, detail)


# -- criterion 2: split criterion equivalences ---------------------------------

def _exists_identity_combo(products: list[Matrix], shapes: Sequence[int], p: int) -> bool:
    """Is some linear combination of the products the identity family?

    products[k] is the flattened vertexwise family of the k-th basis
    composite; the target is the flattened identity family.
    """
    target = np.concatenate([np.eye(d, dtype=np.int64).reshape(-1) for d in shapes]) \
        if shapes else np.zeros(0, dtype=np.int64)
    if not products:
        return bool(target.size == 0 or not target.any())
    flat = np.stack([m.a.reshape(-1) for m in products])
    combos = np.array(list(itertools.product(range(p), repeat=len(products))), dtype=np.int64)
    return bool((((combos @ flat) % p) == target).all(axis=1).any())


def _retraction_exists(c: Conflation) -> bool:
    basis = hom_space(c.B, c.A)
    flats = []
    for f in basis:
        parts = [(f.components[v] @ c.x.components[v]).a.reshape(-1)
                 for v in range(c.B.quiver.vertex_count)]
        flats.append(Matrix(c.B.p, np.concatenate(parts).reshape(1, -1)
                            if parts else np.zeros((1, 0), dtype=np.int64)))
    return _exists_identity_combo(flats, c.A.dim, c.B.p)


def _section_exists(c: Conflation) -> bool:
    basis = hom_space(c.C, c.B)
    flats = []
    for f in basis:
        parts = [(c.y.components[v] @ f.components[v]).a.reshape(-1)
                 for v in range(c.B.quiver.vertex_count)]
        flats.append(Matrix(c.B.p, np.concatenate(parts).reshape(1, -1)
                            if parts else np.zeros((1, 0), dtype=np.int64)))
    return _exists_identity_combo(flats, c.C.dim, c.B.p)


def criterion_split(rng: random.Random, budget: Budget) -> CriterionResult:
    setups = [
        (a2_quiver(), 2, (1, 1)), (a2_quiver(), 3, (1, 1)),
        (a3_quiver(), 2, (1, 1, 1)), (a3_quiver(), 3, (1, 1, 1)),
    ]
    per = 130
    checked = split_count = 0
    ok = True
    notes = []
    for quiver, p, max_dim in setups:
        for _ in range(per):
            budget.spend()
            c = random_conflation(rng, quiver, p, max_dim)
            zero = class_of(c).is_zero()
            split, witness = is_split(c)
            retraction = _retraction_exists(c)
            section = _section_exists(c)
            if not (zero == split == retraction == section):
                ok = False
                notes.append(
                    f"disagreement at p={p} dims {c.B.dim}: zero={zero} split={split} "
                    f"retraction={retraction} section={section}")
            if split:
                split_count += 1
                w = witness
                ident_a = RepMorphism.identity(c.A)
                ident_c = RepMorphism.identity(c.C)
                ident_b = RepMorphism.identity(c.B)
                if (w.retraction @ c.x != ident_a or c.y @ w.section != ident_c
                        or not (w.retraction @ w.section).is_zero()
                        or c.x @ w.retraction + w.section @ c.y != ident_b):
                    ok = False
                    notes.append(f"bad split witness at p={p} dims {c.B.dim}")
            checked += 1
    detail = f"{checked} conflations, {split_count} split"
    if notes:
        detail += "; " + "; ".join(notes[:3])
    return CriterionResult(2, "split criterion equivalences", ok, detail)


# -- criterion 3: composition compatibilities ----------------------------------

def criterion_compose(rng: random.Random, budget: Budget) -> CriterionResult:
    setups = [(a2_quiver(), 2, (1, 1)), (a3_quiver(), 2, (1, 1, 1)),
              (a2_quiver(), 3, (1, 1))]
    checked = 0
    ok = True
    notes = []
    target = 120
    while checked < target:
        quiver, p, max_dim = setups[checked % len(setups)]
        budget.spend()
        c1 = random_conflation(rng, quiver, p, max_dim)
        f_obj = Representation.random(quiver, p, max_dim, rng)
        space = ext_space(f_obj, c1.B)
        coords = [rng.randrange(p) for _ in range(space.dimension)]
        c2 = realize(space.element(coords))
        res = et4_compose(c1, c2)
        delta1, delta2, delta3 = class_of(c1), class_of(c2), class_of(res.composite)
        eq1 = class_of(res.quotient) == pushforward(c1.y, delta2)
        eq2 = pullback(res.d, delta3) == delta1
        eq3 = pushforward(c1.x, delta3) == pullback(res.e, delta2)
        if not (eq1 and eq2 and eq3):
            ok = False
            notes.append(f"compatibility failure at p={p} dims {res.composite.B.dim}")
        checked += 1
    detail = f"{checked} composable pairs"
    if notes:
        detail += "; " + "; ".join(notes[:3])
    return CriterionResult(3, "inflation composition compatibilities", ok, detail)


# -- criterion 4: reorder and group --------------------------------------------

def criterion_reorder(rng: random.Random, budget: Budget) -> CriterionResult:
    pools = [(q, standard_families(q, 2)) for q in (a2_quiver(), a3_quiver())]
    checked = 0
    ok = True
    notes = []
    target = 240
    while checked < target:
        _, families = pools[checked % len(pools)]
        theta = families[rng.randrange(len(families))]
        f = random_filtration(rng, theta, rng.randrange(6))
        budget.spend()
        g = reorder(f)
        if g.top != f.top:
            ok = False
            notes.append("reorder changed the filtered object")
        if multiplicities(g) != multiplicities(f):
            ok = False
            notes.append("reorder changed multiplicities")
        if not g.is_ordered():
            ok = False
            notes.append("reorder output is not ordered")
        grouped = group(g)
        labels = grouped.labels
        if any(labels[i] <= labels[i + 1] for i in range(len(labels) - 1)):
            ok = False
            notes.append("grouped labels not strictly decreasing")
        if len(grouped) > len(theta):
            ok = False
            notes.append("grouped filtration longer than the family")
        if grouped.top != f.top:
            ok = False
            notes.append("group changed the filtered object")
        if grouped.multiplicity_vector != multiplicities(f):
            ok = False
            notes.append("group changed multiplicities")
        checked += 1
    detail = f"{checked} random filtrations"
    if notes:
        detail += "; " + "; ".join(sorted(set(notes))[:3])
    return CriterionResult(4, "reorder and group invariants", ok, detail)


# -- criterion 5: decision procedure against the oracle ------------------------

def criterion_decision(rng: random.Random, budget: Budget) -> CriterionResult:
    setups = [(a2_quiver(), 2, (3, 3)), (a3_quiver(), 2, (2, 2, 2))]
    ok = True
    notes = []
    compared = 0
    for quiver, p, bound in setups:
        desk = enumerate_reps(quiver, p, bound)
        for theta in standard_families(quiver, p):
            for m in desk:
                found = decide_filtered(m, theta, budget)
                accepted = oracle_filtered(m, theta, budget)
                if (found is not None) != accepted:
                    ok = False
                    notes.append(
                        f"disagreement at dims {m.dim} for family {[x.dim for x in theta.members]}")
                if found is not None:
                    if found.top != m:
                        ok = False
                        notes.append(f"filtration top mismatch at dims {m.dim}")
                    counts = multiplicities(found)
                    total = [0] * quiver.vertex_count
                    for i, mult in enumerate(counts):
                        for v in range(quiver.vertex_count):
                            total[v] += mult * theta[i].dim[v]
                    if tuple(total) != m.dim:
                        ok = False
                        notes.append(f"dimension additivity fails at dims {m.dim}")
                compared += 1
    # spot check: with the (simple, projective) family over the two-vertex
    # quiver, the filtered objects among the desk classes are exactly the
    # direct sums of the two members
    quiver, p = a2_quiver(), 2
    s1 = Representation.simple(quiver, p, 0)
    p1 = Representation.projective(quiver, p, 0)
    theta = ThetaFamily((s1, p1))
    pred = in_add([s1, p1])
    for m in enumerate_reps(quiver, p, (3, 3)):
        if (decide_filtered(m, theta, budget) is not None) != pred(m):
            ok = False
            notes.append(f"spot-family mismatch at dims {m.dim}")
    detail = f"{compared} decisions compared"
    if notes:
        detail += "; " + "; ".join(notes[:3])
    return CriterionResult(5, "filtration decision against the oracle", ok, detail)


# -- criterion 6: approximation triangles ---------------------------------------

def criterion_approx(rng: random.Random, budget: Budget) -> CriterionResult:
    quiver, p = a2_quiver(), 2
    s1 = Representation.simple(quiver, p, 0)
    s2 = Representation.simple(quiver, p, 1)
    p1 = Representation.projective(quiver, p, 0)
    theta = ThetaFamily((s1, s2))
    indecs = enumerate_indecomposables(quiver, p, (3, 3))
    injectives = perp_class(theta, "ext-right", indecs)
    projectives = perp_class(theta, "ext-left", indecs)
    ok = True
    notes = []
    if not (len(injectives) == 2 and any(is_isomorphic(x, s1) for x in injectives)
            and any(is_isomorphic(x, p1) for x in injectives)):
        ok = False
        notes.append("injective side of the perpendicular class is not {S1, P1}")
    if not (len(projectives) == 2 and any(is_isomorphic(x, s2) for x in projectives)
            and any(is_isomorphic(x, p1) for x in projectives)):
        ok = False
        notes.append("projective side of the perpendicular class is not {S2, P1}")
    count = 0
    for x in enumerate_reps(quiver, p, (2, 2)):
        budget.spend()
        env = preenvelope(x, theta)
        if any(ext_space(member, env.triangle.B).dimension for member in theta.members):
            ok = False
            notes.append(f"envelope middle not perpendicular at dims {x.dim}")
        if not oracle_filtered(env.triangle.C, theta, budget):
            ok = False
            notes.append(f"envelope quotient not filtered at dims {x.dim}")
        report = verify_preenvelope(env, injectives)
        if not (report.passed and not report.skipped):
            ok = False
            notes.append(f"preenvelope verification failed at dims {x.dim}")
        cov = precover(x, theta)
        if any(ext_space(cov.triangle.B, member).dimension for member in theta.members):
            ok = False
            notes.append(f"cover middle not perpendicular at dims {x.dim}")
        if not oracle_filtered(cov.triangle.A, theta, budget):
            ok = False
            notes.append(f"cover kernel not filtered at dims {x.dim}")
        report = verify_precover(cov, projectives)
        if not (report.passed and not report.skipped):
            ok = False
            notes.append(f"precover verification failed at dims {x.dim}")
        count += 1
    env = preenvelope(s2, theta)
    if not (is_isomorphic(env.triangle.B, p1) and is_isomorphic(env.triangle.C, s1)):
        ok = False
        notes.append("preenvelope of S2 is not P1 with quotient S1")
    cov = precover(s1, theta)
    if not (is_isomorphic(cov.triangle.B, p1) and is_isomorphic(cov.triangle.A, s2)):
        ok = False
        notes.append("precover of S1 is not P1 with kernel S2")
    detail = f"{count} objects enveloped and covered"
    if notes:
        detail += "; " + "; ".join(notes[:3])
    return CriterionResult(6, "approximation triangles and verification", ok, detail)


# -- criterion 7: perpendicular reduction ---------------------------------------

def criterion_perp(rng: random.Random, budget: Budget) -> CriterionResult:
    quiver, p = a2_quiver(), 2
    theta = ThetaFamily((Representation.simple(quiver, p, 0),
                         Representation.simple(quiver, p, 1)))
    desk = enumerate_reps(quiver, p, (3, 3))
    filtered = [m for m in desk if decide_filtered(m, theta, budget) is not None]
    ok = True
    notes = []
    for a in desk:
        left_family = is_theta_projective(a, theta)
        left_class = all(ext_space(a, m).dimension == 0 for m in filtered)
        right_family = is_theta_injective(a, theta)
        right_class = all(ext_space(m, a).dimension == 0 for m in filtered)
        if left_family != left_class:
            ok = False
            notes.append(f"projective-side mismatch at dims {a.dim}")
        if right_family != right_class:
            ok = False
            notes.append(f"injective-side mismatch at dims {a.dim}")
    detail = f"{len(desk)} candidates against {len(filtered)} filtered objects"
    if notes:
        detail += "; " + "; ".join(notes[:3])
    return CriterionResult(7, "perpendicular class reduction", ok, detail)


# -- criterion 8: star associativity and monotonicity ---------------------------

def criterion_star(rng: random.Random, budget: Budget) -> CriterionResult:
    quiver, p = a2_quiver(), 2
    desk = enumerate_reps(quiver, p, (2, 2))
    ok = True
    notes = []
    assoc_checked = mono_checked = 0
    for theta in standard_families(quiver, p):
        first = in_add(theta[0])
        last = in_add(theta[len(theta) - 1])
        full = in_add(list(theta.members))

        def pair(x: Callable, y: Callable) -> Callable[[Representation], bool]:
            return lambda q: star_membership(q, [x, y], budget) is not None

        for m in desk:
            flat = star_membership(m, [first, last, full], budget) is not None
            left = star_membership(m, [pair(first, last), full], budget) is not None
            right = star_membership(m, [first, pair(last, full)], budget) is not None
            if not (flat == left == right):
                ok = False
                notes.append(f"associativity mismatch at dims {m.dim}")
            assoc_checked += 1
            chain = [star_membership(m, [full] * k, budget) is not None
                     for k in range(1, 4)]
            if any(chain[i] and not chain[i + 1] for i in range(len(chain) - 1)):
                ok = False
                notes.append(f"monotonicity fails at dims {m.dim}")
            mono_checked += 1
    detail = f"{assoc_checked} associativity and {mono_checked} monotonicity checks"
    if notes:
        detail += "; " + "; ".join(notes[:3])
    return CriterionResult(8, "star associativity and monotonicity", ok, detail)


CRITERIA: list[Callable[[random.Random, Budget], CriterionResult]] = [
    criterion_ext_dimensions,
    criterion_split,
    criterion_compose,
    criterion_reorder,
    criterion_decision,
    criterion_approx,
    criterion_perp,
    criterion_star,
]


def run_criteria(seed: int = 0, budget_limit: Optional[int] = None) -> list[CriterionResult]:
    """Run all criteria with a fresh seeded RNG and budget per criterion."""
    results = []
    for fn in CRITERIA:
        rng = random.Random(seed)
        budget = Budget(budget_limit)
        try:
            results.append(fn(rng, budget))
        except Exception as exc:  # a crash is a failure, not an abort
            index = len(results) + 1
            results.append(CriterionResult(index, fn.__name__, False,
                                           f"raised {type(exc).__name__}: {exc}"))
    return results
