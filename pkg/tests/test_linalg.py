"""Exact linear algebra over small prime fields."""

import random

import pytest

from filtra import Matrix, ValidationError
from filtra.linalg import PrimeField


def random_matrix(rng, p, rows, cols):
    return Matrix.from_rows(p, [[rng.randrange(p) for _ in range(cols)]
                                for _ in range(rows)], cols=cols)


def test_prime_field_rejects_composites():
    PrimeField(2)
    PrimeField(13)
    for bad in (0, 1, 4, 6, 9):
        with pytest.raises(ValidationError):
            PrimeField(bad)


def test_matmul_and_identity():
    m = Matrix.from_rows(5, [[1, 2], [3, 4]])
    assert (Matrix.identity(5, 2) @ m) == m
    assert (m @ Matrix.identity(5, 2)) == m


def test_rref_is_idempotent_and_pivots_monotone():
    rng = random.Random(5)
    for _ in range(100):
        p = rng.choice([2, 3, 5])
        m = random_matrix(rng, p, rng.randrange(5), rng.randrange(5))
        r, pivots = m.rref()
        assert list(pivots) == sorted(pivots)
        r2, pivots2 = r.rref()
        assert r2 == r and pivots2 == pivots


def test_rank_via_known_example():
    m = Matrix.from_rows(2, [[1, 1, 0], [1, 1, 0], [0, 0, 1]])
    assert m.rank() == 2


def test_kernel_vectors_are_killed():
    rng = random.Random(6)
    for _ in range(120):
        p = rng.choice([2, 3])
        m = random_matrix(rng, p, rng.randrange(1, 5), rng.randrange(1, 5))
        basis = m.kernel_basis()
        assert basis.cols == m.cols - m.rank()
        assert (m @ basis).is_zero()
        assert basis.rank() == basis.cols


def test_solve_and_right_inverse():
    rng = random.Random(7)
    solved = 0
    for _ in range(150):
        p = rng.choice([2, 3, 5])
        m = random_matrix(rng, p, rng.randrange(1, 4), rng.randrange(1, 4))
        x = random_matrix(rng, p, m.cols, 1)
        rhs = m @ x
        got = m.solve(rhs)
        assert got is not None and (m @ got) == rhs
        solved += 1
        if m.rank() == m.rows:
            r = m.right_inverse()
            assert (m @ r).is_identity()
    assert solved == 150


def test_solve_detects_inconsistency():
    m = Matrix.from_rows(2, [[1, 0], [1, 0]])
    rhs = Matrix.from_rows(2, [[1], [0]])
    assert m.solve(rhs) is None


def test_inverse_round_trip():
    rng = random.Random(8)
    found = 0
    for _ in range(200):
        p = rng.choice([2, 3])
        n = rng.randrange(1, 4)
        m = random_matrix(rng, p, n, n)
        if m.rank() < n:
            continue
        inv = m.inverse()
        assert (m @ inv).is_identity() and (inv @ m).is_identity()
        found += 1
    assert found > 50


def test_cokernel_projection_is_exact():
    rng = random.Random(9)
    for _ in range(120):
        p = rng.choice([2, 3])
        m = random_matrix(rng, p, rng.randrange(5), rng.randrange(5))
        q, d = m.cokernel_projection()
        assert d == m.rows - m.rank()
        assert q.rows == d and q.cols == m.rows
        assert (q @ m).is_zero()
        assert q.rank() == d


def test_block_assembly_matches_entries():
    a = Matrix.from_rows(3, [[1]])
    b = Matrix.from_rows(3, [[2]])
    grid = Matrix.block(3, [[a, b], [b, a]])
    assert grid.entries == [[1, 2], [2, 1]]
    assert Matrix.hstack(3, [a, b]).entries == [[1, 2]]
    assert Matrix.vstack(3, [a, b]).entries == [[1], [2]]


def test_entries_are_reduced_mod_p():
    m = Matrix.from_rows(3, [[4, -1]])
    assert m.entries == [[1, 2]]
