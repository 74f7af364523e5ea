"""Filtrations by a fixed ordered family and the calculus that rearranges them.

A filtration of M is a chain of conflations

    0 = M_0 -> M_1 -> ... -> M_n = M,   step i: (M_{i-1} -> M_i -> X_i)

where each quotient X_i comes labeled with a family index k_i and an
isomorphism witness X_i -> theta[k_i].  Consecutive steps share their middle
objects literally (value equality), which is what lets the composition
operations of the conflation module chain them without any gluing.

Conventions: labels are 0-based indices into the family; "ordered" means
labels are non-increasing from the bottom step to the top one, so the top
quotient carries the smallest label.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .conflation import (Conflation, et4_compose, et4op_compose, ext_space,
                         is_split)
from .errors import Budget, ExtObstruction, ValidationError
from .linalg import Matrix
from .quiverrep import (Representation, RepMorphism, ThetaFamily, direct_power,
                        direct_sum, _combo_components, _hom_component_stacks,
                        cokernel_quot, enumerate_subreps, hom_space,
                        is_isomorphic, iso_key, iso_witness, kernel_sub,
                        krull_schmidt)

__all__ = [
    "FiltrationStep",
    "Filtration",
    "GroupedStep",
    "GroupedFiltration",
    "multiplicities",
    "extend",
    "exchange",
    "collapse",
    "reorder",
    "group",
    "star_membership",
    "decide_filtered",
    "oracle_filtered",
    "power_filtration",
    "transport_top",
    "in_add",
]


@dataclass(frozen=True)
class FiltrationStep:
    """One layer: a conflation M_{i-1} -> M_i -> X with X ~ theta[label]."""

    conflation: Conflation
    label: int
    witness: RepMorphism  # isomorphism conflation.C -> theta[label]


class Filtration:
    """A labeled chain of conflations from 0 up to its top object."""

    __slots__ = ("theta", "steps")

    def __init__(self, theta: ThetaFamily, steps: Sequence[FiltrationStep], check: bool = True):
        steps = tuple(steps)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "steps", steps)
        if check:
            self.validate()

    def __setattr__(self, name, value):
        raise AttributeError("Filtration is immutable")

    def validate(self) -> None:
        prev = None
        for i, step in enumerate(self.steps):
            c = step.conflation
            if i == 0:
                if c.A.total_dim != 0:
                    raise ValidationError("a filtration must start at the zero representation")
            elif c.A != prev:
                raise ValidationError(f"steps {i} and {i + 1} do not share their middle object")
            if not 0 <= step.label < len(self.theta):
                raise ValidationError(f"step {i + 1} carries the out-of-range label {step.label}")
            w = step.witness
            if w.source != c.C or w.target != self.theta[step.label]:
                raise ValidationError(f"step {i + 1} witness endpoints do not match")
            if not w.is_isomorphism():
                raise ValidationError(f"step {i + 1} witness is not an isomorphism")
            prev = c.B

    @property
    def top(self) -> Representation:
        if self.steps:
            return self.steps[-1].conflation.B
        return Representation.zero(self.theta.quiver, self.theta.p)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(s.label for s in self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def is_ordered(self) -> bool:
        labels = self.labels
        return all(labels[i] >= labels[i + 1] for i in range(len(labels) - 1))

    def __eq__(self, other) -> bool:
        return (isinstance(other, Filtration)
                and self.theta == other.theta and self.steps == other.steps)

    def __hash__(self) -> int:
        return hash((self.theta, self.steps))

    def __repr__(self) -> str:
        return f"Filtration(top={self.top.dim}, labels={self.labels})"


@dataclass(frozen=True)
class GroupedStep:
    """One layer of a grouped filtration with quotient theta[label]^multiplicity."""

    conflation: Conflation
    label: int
    multiplicity: int


class GroupedFiltration:
    """Strictly-decreasing-label chain with direct-power quotients."""

    __slots__ = ("theta", "steps")

    def __init__(self, theta: ThetaFamily, steps: Sequence[GroupedStep], check: bool = True):
        steps = tuple(steps)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "steps", steps)
        if check:
            self.validate()

    def __setattr__(self, name, value):
        raise AttributeError("GroupedFiltration is immutable")

    def validate(self) -> None:
        prev = None
        prev_label = None
        for i, step in enumerate(self.steps):
            c = step.conflation
            if i == 0:
                if c.A.total_dim != 0:
                    raise ValidationError("a grouped filtration must start at zero")
            elif c.A != prev:
                raise ValidationError(f"grouped steps {i} and {i + 1} do not chain")
            if not 0 <= step.label < len(self.theta):
                raise ValidationError(f"grouped step {i + 1} has an out-of-range label")
            if prev_label is not None and step.label >= prev_label:
                raise ValidationError("grouped labels must strictly decrease")
            if step.multiplicity < 1:
                raise ValidationError("grouped multiplicities must be positive")
            if c.C != direct_power(self.theta[step.label], step.multiplicity):
                raise ValidationError(
                    f"grouped step {i + 1} quotient is not the labeled direct power")
            prev = c.B
            prev_label = step.label

    @property
    def top(self) -> Representation:
        if self.steps:
            return self.steps[-1].conflation.B
        return Representation.zero(self.theta.quiver, self.theta.p)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(s.label for s in self.steps)

    @property
    def multiplicity_vector(self) -> tuple[int, ...]:
        counts = [0] * len(self.theta)
        for s in self.steps:
            counts[s.label] += s.multiplicity
        return tuple(counts)

    def __len__(self) -> int:
        return len(self.steps)

    def __repr__(self) -> str:
        return (f"GroupedFiltration(top={self.top.dim}, labels={self.labels}, "
                f"multiplicities={[s.multiplicity for s in self.steps]})")


def multiplicities(f: Filtration) -> tuple[int, ...]:
    """How many steps carry each family label; sums to the length."""
    counts = [0] * len(f.theta)
    for s in f.steps:
        counts[s.label] += 1
    return tuple(counts)


def transport_top(f: Filtration, phi: RepMorphism) -> Filtration:
    """Move a filtration along an isomorphism phi out of its top object."""
    if phi.source != f.top or not phi.is_isomorphism():
        raise ValidationError("transport needs an isomorphism out of the top object")
    if not f.steps:
        return Filtration(f.theta, (), check=False)
    last = f.steps[-1]
    moved = FiltrationStep(last.conflation.with_middle(phi), last.label, last.witness)
    return Filtration(f.theta, f.steps[:-1] + (moved,), check=False)


def power_filtration(theta: ThetaFamily, label: int, k: int) -> Filtration:
    """The split filtration of theta[label]^k by k copies of theta[label]."""
    member = theta[label]
    ident = RepMorphism.identity(member)
    steps = []
    for j in range(k):
        c = Conflation.split(direct_power(member, j), member)
        steps.append(FiltrationStep(c, label, ident))
    return Filtration(theta, steps)


def extend(c: Conflation, fA: Filtration, fC: Filtration) -> Filtration:
    """Filtration of c.B obtained by stacking fA under fC across c.

    Peels fC from the top: each peel composes the current conflation with the
    top step of what remains of fC (a deflation composition), replacing the
    middle object by the kernel; when fC is exhausted the inflation of the
    remaining conflation is an isomorphism and fA is transported along it.
    Labels concatenate, so lengths and multiplicities add.
    """
    if fA.theta != fC.theta:
        raise ValidationError("both filtrations must use the same family")
    if fA.top != c.A or fC.top != c.C:
        raise ValidationError("filtration tops must match the conflation ends")

    def go(cur: Conflation, csteps: tuple[FiltrationStep, ...]) -> tuple[FiltrationStep, ...]:
        if not csteps:
            # quotient exhausted: cur.x is an isomorphism onto the middle
            if not fA.steps:
                return ()
            return transport_top(fA, cur.x).steps
        last = csteps[-1]
        res = et4op_compose(cur, last.conflation)
        below = go(res.kernel, csteps[:-1])
        return below + (FiltrationStep(res.composite, last.label, last.witness),)

    return Filtration(fA.theta, go(c, fC.steps))


def exchange(c1: Conflation, c2: Conflation) -> tuple[Conflation, Conflation]:
    """Swap the order of two stacked quotients U and V when ext(V, U) = 0.

    Input: c1 = (Z -> Y -> U) and c2 = (Y -> X -> V) with the same literal Y.
    Output: (Z -> W -> V, W -> X -> U) over the same Z and X.  The middle
    conflation U -> T -> V produced by composing the inflations must split,
    which ext(V, U) = 0 guarantees.
    """
    if c1.B != c2.A:
        raise ValidationError("exchange needs c1 and c2 to share their middle object")
    obstruction = ext_space(c2.C, c1.C)
    if obstruction.dimension != 0:
        raise ExtObstruction(
            f"ext space of dimension {obstruction.dimension} obstructs the exchange")
    composed = et4_compose(c1, c2)
    ok, witness = is_split(composed.quotient)
    assert ok  # the ext space is zero, so every class in it vanishes
    eta = Conflation(c2.C, composed.quotient.B, c1.C,
                     witness.section, witness.retraction)
    swapped = et4op_compose(composed.composite, eta)
    return swapped.kernel, swapped.composite


def collapse(fs: Sequence[Conflation]) -> Conflation:
    """Merge a chain of conflations with one repeated quotient A into one.

    Input conflations M_{i-1} -> M_i -> A must chain literally and share the
    quotient object A with ext(A, A) = 0; the result is M_0 -> M_k -> A^k
    with the direct_power layout and the literal outer objects.
    """
    fs = list(fs)
    if not fs:
        raise ValidationError("collapse needs at least one conflation")
    quotient = fs[0].C
    for i, c in enumerate(fs):
        if c.C != quotient:
            raise ValidationError("collapse needs every quotient to be the same object")
        if i and c.A != fs[i - 1].B:
            raise ValidationError(f"conflations {i} and {i + 1} do not chain")
    self_ext = ext_space(quotient, quotient)
    if self_ext.dimension != 0:
        raise ExtObstruction(
            f"ext space of dimension {self_ext.dimension} obstructs the collapse")
    cur = fs[0]
    for nxt in fs[1:]:
        composed = et4_compose(cur, nxt)
        ok, witness = is_split(composed.quotient)
        assert ok  # class lives in ext(A, A^j) = 0
        ds = direct_sum(cur.C, quotient)
        psi = ds.inject_left @ witness.retraction + ds.inject_right @ composed.quotient.y
        cur = composed.composite.with_quotient(psi)
    return cur


def reorder(f: Filtration) -> Filtration:
    """Sort the steps so labels are non-increasing from bottom to top.

    Bubble passes of adjacent exchanges; every swap moves a larger label
    below a smaller one, and its ext hypothesis is exactly the family's
    ordering invariant, so the exchanges cannot be obstructed.  The filtered
    object and the label multiset are unchanged.
    """
    steps = list(f.steps)
    changed = True
    while changed:
        changed = False
        for i in range(len(steps) - 1):
            low, high = steps[i], steps[i + 1]
            if low.label >= high.label:
                continue
            new_low, new_high = exchange(low.conflation, high.conflation)
            steps[i] = FiltrationStep(new_low, high.label, high.witness)
            steps[i + 1] = FiltrationStep(new_high, low.label, low.witness)
            changed = True
    return Filtration(f.theta, steps)


def group(f: Filtration) -> GroupedFiltration:
    """Bundle runs of equal labels of an ordered filtration into powers.

    Each step's quotient is first transported to the literal family member
    along its witness; maximal runs are then collapsed, giving at most one
    step per distinct label, with strictly decreasing labels.
    """
    if not f.is_ordered():
        raise ValidationError("group needs an ordered filtration; reorder first")
    normalized = [s.conflation.with_quotient(s.witness) for s in f.steps]
    grouped: list[GroupedStep] = []
    pos = 0
    while pos < len(normalized):
        label = f.steps[pos].label
        end = pos
        while end < len(normalized) and f.steps[end].label == label:
            end += 1
        run = normalized[pos:end]
        grouped.append(GroupedStep(collapse(run), label, end - pos))
        pos = end
    return GroupedFiltration(f.theta, grouped)


def in_add(pieces: Sequence[Representation] | Representation) -> Callable[[Representation], bool]:
    """Predicate: is the argument a finite direct sum of copies of the pieces?

    Decided through the Krull-Schmidt decomposition; the zero representation
    always passes (empty sum).
    """
    if isinstance(pieces, Representation):
        pieces = [pieces]
    pieces = list(pieces)

    def predicate(m: Representation) -> bool:
        if m.total_dim == 0:
            return True
        return all(any(is_isomorphic(part, piece) for piece in pieces)
                   for part, _ in krull_schmidt(m))

    return predicate


def star_membership(m: Representation,
                    classes: Sequence[Callable[[Representation], bool]],
                    budget: Optional[Budget] = None) -> Optional[list[Conflation]]:
    """Witness chain for membership in classes[0] * classes[1] * ... or None.

    The witness is a list of conflations 0 = N_0 -> N_1 -> ... -> N_k = m,
    one per class in order, whose i-th quotient satisfies classes[i].  The
    search enumerates subrepresentations as kernels of candidate top
    deflations and recurses; results are memoized per (object, depth).
    """
    budget = budget if budget is not None else Budget()
    classes = list(classes)
    memo: dict[tuple[Representation, int], Optional[tuple[Conflation, ...]]] = {}

    def go(cur: Representation, k: int) -> Optional[tuple[Conflation, ...]]:
        if k == 0:
            return () if cur.total_dim == 0 else None
        key = (cur, k)
        if key in memo:
            return memo[key]
        result = None
        for sub, incl in enumerate_subreps(cur):
            budget.spend()
            quot, proj = cokernel_quot(incl)
            if not classes[k - 1](quot):
                continue
            below = go(sub, k - 1)
            if below is not None:
                result = below + (Conflation(sub, cur, quot, incl, proj),)
                break
        memo[key] = result
        return result

    chain = go(m, len(classes))
    return list(chain) if chain is not None else None


@lru_cache(maxsize=None)
def _dim_feasible(theta_dims: tuple[tuple[int, ...], ...],
                  dim: tuple[int, ...], start: int) -> bool:
    """Can dim be a nonnegative integer combination of theta_dims[start:]?"""
    if all(d == 0 for d in dim):
        return True
    if start >= len(theta_dims):
        return False
    step = theta_dims[start]
    top = min((d // s for d, s in zip(dim, step) if s), default=0)
    for mult in range(top + 1):
        rest = tuple(d - mult * s for d, s in zip(dim, step))
        if _dim_feasible(theta_dims, rest, start + 1):
            return True
    return False


def _normalized_coefficients(p: int, h: int):
    """Nonzero coefficient tuples with leading nonzero entry 1.

    Scaling a morphism does not change its kernel or surjectivity, so one
    representative per line through the origin suffices.
    """
    for coeffs in itertools.product(range(p), repeat=h):
        first = next((c for c in coeffs if c), None)
        if first != 1:
            continue
        yield np.asarray(coeffs, dtype=np.int64)


# cross-call memo tables, keyed by the family; entries are grouped under a
# cheap iso invariant and resolved to true iso classes on lookup
_decide_memo: dict[ThetaFamily,
                   dict[tuple, list[tuple[Representation, Optional["Filtration"]]]]] = {}
_oracle_memo: dict[ThetaFamily, dict[tuple, list[tuple[Representation, bool]]]] = {}


def decide_filtered(m: Representation, theta: ThetaFamily,
                    budget: Optional[Budget] = None) -> Optional[Filtration]:
    """A filtration of m by the family, or None when no filtration exists.

    Backtracking peel from the top: enumerate epimorphisms m -> theta[i] in
    the hom space and recurse on their kernels.  Along any peel sequence the
    labels are non-decreasing, which is complete because every filtered
    object also has an ordered filtration (whose top label is minimal).
    Results, positive and negative, are memoized up to isomorphism together
    with the minimum-label bound; a cached filtration of an isomorphic
    object is transported along an isomorphism witness.
    """
    budget = budget if budget is not None else Budget()
    t = len(theta)
    theta_dims = tuple(mem.dim for mem in theta.members)
    memo = _decide_memo.setdefault(theta, {})

    def peel(cur: Representation, min_label: int) -> Optional[Filtration]:
        if cur.total_dim == 0:
            return Filtration(theta, ())
        if not _dim_feasible(theta_dims, cur.dim, min_label):
            return None
        key = (iso_key(cur), min_label)
        for rep, cached in memo.get(key, []):
            if rep == cur:
                return cached
            phi = iso_witness(rep, cur)
            if phi is None:
                continue
            if cached is None:
                return None
            return transport_top(cached, phi)
        result = None
        for i in range(min_label, t):
            member = theta[i]
            if any(dc < dm for dc, dm in zip(cur.dim, member.dim)):
                continue
            basis = hom_space(cur, member)
            stacks = _hom_component_stacks(basis, cur, member)
            for coeffs in _normalized_coefficients(cur.p, len(basis)):
                budget.spend()
                comps = _combo_components(coeffs, stacks, cur.p)
                if any(Matrix(cur.p, c).rank() != member.dim[v]
                       for v, c in enumerate(comps)):
                    continue
                epi = RepMorphism(cur, member,
                                  [Matrix(cur.p, c) for c in comps], check=False)
                sub, incl = kernel_sub(epi)
                below = peel(sub, i)
                if below is not None:
                    step = FiltrationStep(Conflation(sub, cur, member, incl, epi),
                                          i, RepMorphism.identity(member))
                    result = Filtration(theta, below.steps + (step,))
                    break
            if result is not None:
                break
        memo.setdefault(key, []).append((cur, result))
        return result

    return peel(m, 0)


def oracle_filtered(m: Representation, theta: ThetaFamily,
                    budget: Optional[Budget] = None) -> bool:
    """Independent brute-force membership test for the filtered class.

    Recursive search over all subrepresentations: m is filtered iff it is
    zero or some subrepresentation with quotient isomorphic to a family
    member is filtered.  No ordering shortcut and no hom-space enumeration;
    memoized up to isomorphism.
    """
    budget = budget if budget is not None else Budget()
    memo = _oracle_memo.setdefault(theta, {})

    def go(cur: Representation) -> bool:
        if cur.total_dim == 0:
            return True
        key = iso_key(cur)
        for rep, cached in memo.get(key, []):
            if rep == cur or is_isomorphic(rep, cur):
                return cached
        answer = False
        for sub, incl in enumerate_subreps(cur):
            budget.spend()
            qdim = tuple(dc - ds for dc, ds in zip(cur.dim, sub.dim))
            candidates = [mem for mem in theta.members if mem.dim == qdim]
            if not candidates:
                continue
            quot, _ = cokernel_quot(incl)
            if any(is_isomorphic(quot, mem) for mem in candidates) and go(sub):
                answer = True
                break
        memo.setdefault(key, []).append((cur, answer))
        return answer

    return go(m)
