import itertools
import random
from fractions import Fraction
from math import prod

import pytest

from amstream.params import (
    ParameterError,
    crt_reconstruct,
    derive_params,
    extension_degree,
    omega_degree_bound,
    prime_basis,
    repetition_count,
)

from oracles import crt_scan, is_irreducible_trial, min_repetitions, sieve


@pytest.mark.parametrize("p,expected", [(5, [2, 3]), (29, [2, 3, 5]), (2, [2, 3]), (30, [2, 3, 5, 7])])
def test_prime_basis(p, expected):
    assert prime_basis(p) == expected


def test_prime_basis_is_shortest_prefix():
    primes = sieve(100)
    for p in range(2, 5000):
        Q = prime_basis(p)
        assert Q == primes[: len(Q)]
        assert prod(Q) > p >= prod(Q[:-1])


@pytest.mark.parametrize("q,p,lam", [(2, 7, 3), (3, 9, 3), (5, 4, 1)])
def test_extension_degree(q, p, lam):
    assert extension_degree(q, p) == lam


def test_crt_examples():
    assert crt_reconstruct([1, 2, 3], [2, 3, 5]) == 23 == crt_scan([1, 2, 3], [2, 3, 5])
    assert crt_reconstruct([0, 0, 0], [2, 3, 5]) == 0
    assert crt_reconstruct([4], [7]) == 4
    with pytest.raises(ValueError):
        crt_reconstruct([1, 2], [2])
    with pytest.raises(ValueError):
        crt_reconstruct([2], [2])


def test_crt_exhaustive_small():
    Q = [2, 3, 5, 7]
    for x in range(prod(Q)):
        assert crt_reconstruct([x % q for q in Q], Q) == x


def test_crt_random_large():
    Q = sieve(120)
    M = prod(Q)
    rnd = random.Random(0)
    for _ in range(500):
        x = rnd.randrange(M)
        assert crt_reconstruct([x % q for q in Q], Q) == x


@pytest.mark.parametrize("k,dp,L", [(1, Fraction(2, 3), 1), (1, Fraction(1, 2), 2), (4, Fraction(1, 100), 15)])
def test_repetition_count_examples(k, dp, L):
    assert repetition_count(k, dp) == L


def test_repetition_count_oracle():
    for k in range(1, 6):
        for den in range(1, 400, 7):
            dp = Fraction(1, den)
            assert repetition_count(k, dp) == max(1, min_repetitions(k, dp.numerator, dp.denominator))


def test_omega_degree_bound():
    assert omega_degree_bound(1, 3, 7, 9) == 0
    assert omega_degree_bound(2, 1, 2, 3) == 3
    assert omega_degree_bound(3, 2, 3, 2) == 16


def test_derive_params_example():
    pr = derive_params(4, 4, 2, 2, 1, 2, 0, Fraction(1, 3))
    assert pr.p > 16
    assert prod(pr.Q) > pr.p
    assert pr.check() == []
    for pp in pr.primes:
        assert is_irreducible_trial(list(pp.irreducible), pp.q) or pp.lam > 6


GRID = [
    (m, n, s, w, k, B, delta)
    for (m, n, s, w), k, B, delta in itertools.product(
        [(4, 4, 2, 2), (10, 16, 4, 4), (50, 16, 1, 16), (50, 16, 16, 1), (100, 64, 3, 22), (7, 9, 10, 1)],
        [1, 3],
        [2, 5],
        [Fraction(1, 3), Fraction(1, 20), Fraction(1)],
    )
]


@pytest.mark.parametrize("args", GRID)
def test_invariants_hold_on_grid(args):
    m, n, s, w, k, B, delta = args
    pr = derive_params(m, n, s, w, k, B, 0, delta, b"seed")
    assert pr.check() == []
    # restate the invariants independently of check()
    assert s * w >= n
    assert pr.p > 2 * n * B and pr.p in set(sieve(pr.p + 1)[-3:])
    assert prod(pr.Q) > pr.p
    for pp in pr.primes:
        assert pp.q**pp.lam > pr.p >= pp.q ** (pp.lam - 1)
        assert 2 * pp.degree_bound <= delta * pr.p
        assert pp.degree_bound == k * pr.L * (w - 1) * (pp.q - 1)
    assert Fraction(2, 3) ** pr.L <= pr.delta_prime / k
    assert pr.delta_prime == delta / (2 * n * len(pr.Q))


def test_derive_params_deterministic_and_seeded():
    a = derive_params(20, 16, 4, 4, 1, 2, 0, Fraction(1, 3), b"\x01")
    b = derive_params(20, 16, 4, 4, 1, 2, 0, Fraction(1, 3), b"\x01")
    assert a == b and a.shared_seed == b"\x01"
    assert "prime.2=" in a.to_text() and "seed=01" in a.to_text()


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(m=4, n=5, s=2, w=2, k=1, B=2),
        dict(m=4, n=4, s=2, w=2, k=1, B=0),
        dict(m=4, n=4, s=2, w=2, k=1, B=2, epsilon=Fraction(1, 2)),
        dict(m=4, n=4, s=2, w=2, k=1, B=2, delta=0),
        dict(m=0, n=4, s=2, w=2, k=1, B=2),
    ],
)
def test_derive_params_rejects(kwargs):
    with pytest.raises(ParameterError):
        derive_params(**kwargs)
