import itertools
import random

import pytest

from amstream.distinct import de_params, de_spec
from amstream.field import get_field, lagrange_interpolate_packed, poly_eval
from amstream.or_approx import (
    CODE_RATE,
    SharedRandomness,
    accumulate_coordinate,
    code_entry,
    finalize_eta,
    literal_value,
    or_failure_stats,
    sample_indices,
)
from amstream.protocol import streaming_eval_omega
from amstream.stream import DataStream, Literal, ProblemSpec, SparseMultilinear


def test_indices_deterministic_and_in_range():
    r = SharedRandomness(b"abc")
    a = sample_indices(r, 5, 40, 7)
    assert a == sample_indices(SharedRandomness(b"abc"), 5, 40, 7)
    assert all(1 <= x <= CODE_RATE * 7 for x in a)
    with pytest.raises(ValueError):
        sample_indices(r, 5, 0, 7)


def test_indices_differ_across_primes():
    same = 0
    for seed in range(100):
        r = SharedRandomness(seed.to_bytes(2, "little"))
        same += sample_indices(r, 2, 8, 50) == sample_indices(r, 3, 8, 50)
    assert same == 0


def test_code_entry_determinism_and_range():
    code = SharedRandomness(b"k").code(7, 5)
    assert code_entry(code, 3, 100) == code_entry(code, 3, 100)
    assert all(0 <= code_entry(code, i, c) < 7 for i in range(1, 6) for c in range(1, 50))
    with pytest.raises(ValueError):
        code_entry(code, 0, 1)
    with pytest.raises(ValueError):
        code_entry(code, 1, 501)


def test_code_linearity():
    q, m = 3, 4
    code = SharedRandomness(b"lin").code(q, m)
    rnd = random.Random(0)
    for _ in range(20):
        u = [rnd.randrange(q) for _ in range(m)]
        v = [rnd.randrange(q) for _ in range(m)]
        col = rnd.randint(1, code.length)
        uv = [(a + b) % q for a, b in zip(u, v)]
        # direct matrix action as the oracle
        G = code.column(col)
        assert code.encode_at(uv, col) == sum(a * g for a, g in zip(uv, G)) % q
        assert code.encode_at(uv, col) == (code.encode_at(u, col) + code.encode_at(v, col)) % q
    assert all(code.encode_at([0] * m, c) == 0 for c in range(1, code.length + 1))


@pytest.mark.parametrize("q,m", [(2, 6), (2, 10), (3, 5)])
def test_relative_distance_exhaustive(q, m):
    code = SharedRandomness(b"dist").code(q, m)
    G = [code.column(c) for c in range(1, code.length + 1)]
    worst = code.length
    for u in itertools.product(range(q), repeat=m):
        if any(u):
            weight = sum(1 for col in G if sum(a * g for a, g in zip(u, col)) % q)
            worst = min(worst, weight)
    assert worst * 3 >= code.length


def test_accumulate_coordinate():
    f = get_field(3, 4)
    code = SharedRandomness(b"acc").code(3, 6)
    zero = f.element(0)
    v = f.element(40)
    assert accumulate_coordinate(v, 2, 9, zero, code) == v
    got = accumulate_coordinate(zero, 2, 9, v, code)
    assert got.value == f.mul(40, code.entry(2, 9))
    # full pass on Boolean literals equals the batch encoding
    bits = [1, 0, 1, 1, 0, 1]
    for col in (1, 77, 600):
        acc = zero
        for i, b in enumerate(bits, start=1):
            acc = accumulate_coordinate(acc, i, col, f.element(b), code)
        assert acc.value == code.encode_at(bits, col)


def test_finalize_eta():
    f = get_field(5, 2)
    assert finalize_eta([f.element(0)] * 3).value == 0
    assert finalize_eta([f.element(0), f.element(3), f.element(0)], 5).value == 1
    assert finalize_eta([f.element(4)]).value == 1
    with pytest.raises(ValueError):
        finalize_eta([f.element(1)], 3)
    # extension value: 1 - (1 - a^(q-1)) computed directly
    a = 17
    assert finalize_eta([f.element(a)]).value == f.pow(a, 4)


def test_literal_value():
    f = get_field(3, 2)
    spec = ProblemSpec(
        k=1,
        psi=SparseMultilinear(((1, {0}),)),
        B=2,
        table={(0, 1): Literal.VAR, (0, 2): Literal.NEG, (0, 3): Literal.ONE},
    )
    one, five = f.element(1), f.element(5)
    assert literal_value(spec, 0, 1, one).value == 1
    assert literal_value(spec, 0, 2, one).value == 0
    assert literal_value(spec, 0, 2, five).value == f.sub(1, 5)
    assert literal_value(spec, 0, 3, five).value == 1
    assert literal_value(spec, 0, 4, five).value == 0


@pytest.mark.parametrize("q,m,L", [(2, 8, 3), (3, 16, 2)])
def test_or_failure_rate_small(q, m, L):
    st = or_failure_stats(q, m, L, trials=2000, seed=q)
    assert st["zero_failures"] == 0
    assert st["rate"] <= st["bound"] + 3 * st["bound_sigma"]


def test_degree_accounting_by_interpolation():
    # omega at D+1 points determines it; a fresh point must agree
    sigma = DataStream(8, (1, 5, 5, 8, 2, 7, 1, 3))
    params = de_params(sigma.m, 8, 2, 4, seed=b"deg")
    spec = de_spec()
    pp = params.primes[1]
    f = get_field(pp.q, pp.lam)
    D = pp.degree_bound
    xs = list(range(D + 1))
    ys = [streaming_eval_omega(sigma.cursor(), pp.q, x, params, spec) for x in xs]
    poly = lagrange_interpolate_packed(f, xs, ys)
    rnd = random.Random(4)
    for x in rnd.sample(range(D + 1, f.order), 3):
        assert poly_eval(poly, f.element(x)).value == streaming_eval_omega(sigma.cursor(), pp.q, x, params, spec)
