import random

import pytest

from amstream.distinct import de_spec
from amstream.field import get_field, lagrange_interpolate_packed, poly_eval
from amstream.stream import (
    DataStream,
    GridMap,
    Literal,
    ProblemSpec,
    SparseMultilinear,
    StreamFormatError,
    element_indicator,
    evaluate_problem_bruteforce,
    indicator_extension_eval,
)


def test_element_indicator():
    assert element_indicator(3, 3) == 1
    assert element_indicator(3, 2) == 0
    assert sum(element_indicator(4, j) for j in range(1, 9)) == 1


def test_indicator_extension_gf5_example():
    f = get_field(5, 1)
    grid = GridMap(f, 2, 2, 4)
    assert grid.locate(1) == (0, 0)
    # ((2-1)/(0-1)) * ((3-1)/(0-1)) mod 5, computed with plain integers
    want = (2 - 1) * pow(0 - 1, -1, 5) * (3 - 1) * pow(0 - 1, -1, 5) % 5
    assert want == 2
    assert indicator_extension_eval(grid, 1, f.element(2), f.element(3)).value == want


def test_grid_injective_and_row_major():
    f = get_field(2, 14)
    n, s, w = 10_000, 97, 104
    grid = GridMap(f, s, w, n)
    cells = [grid.locate(j) for j in range(1, n + 1)]
    assert len(set(cells)) == n
    assert cells[0] == (0, 0) and cells[s] == (1, 0)
    assert all(grid.symbol_at(*c) == j for j, c in enumerate(cells, start=1))
    with pytest.raises(ValueError):
        grid.locate(0)
    with pytest.raises(ValueError):
        GridMap(f, 2, 2, 5)


@pytest.mark.parametrize("q,lam,s,w,n", [(3, 2, 3, 3, 9), (5, 2, 4, 3, 11), (2, 4, 5, 2, 10)])
def test_extension_consistent_on_grid(q, lam, s, w, n):
    f = get_field(q, lam)
    grid = GridMap(f, s, w, n)
    for a in range(1, n + 1):
        for j in range(1, n + 1):
            x, y = grid.locate(j)
            got = indicator_extension_eval(grid, a, f.element(x), f.element(y))
            assert got.value == element_indicator(a, j)


def test_x_degree_bound():
    f = get_field(7, 3)
    s, w, n = 4, 6, 24
    grid = GridMap(f, s, w, n)
    rnd = random.Random(0)
    for a in (1, 7, 24):
        for y in range(s):
            xs = rnd.sample(range(w, f.order), w)
            ys = [indicator_extension_eval(grid, a, f.element(x), f.element(y)).value for x in xs]
            poly = lagrange_interpolate_packed(f, xs, ys)
            for x in rnd.sample(range(f.order), w):
                want = indicator_extension_eval(grid, a, f.element(x), f.element(y))
                assert poly_eval(poly, f.element(x)) == want


def test_fast_basis_matches_direct():
    f = get_field(13, 2)
    grid = GridMap(f, 3, 7, 20)
    coeffs = grid.basis_coefficients()
    for x in (0, 3, 50, 168):
        fast = grid.x_basis_at(x)
        for alpha in range(7):
            assert fast(alpha) == grid.x_basis(alpha, x)
            assert poly_eval(coeffs[alpha], f.element(x)).value == grid.x_basis(alpha, x)


def test_bruteforce_examples():
    assert evaluate_problem_bruteforce(DataStream(4, (1, 2, 2, 3)), de_spec()) == 3
    zero = ProblemSpec(k=1, psi=SparseMultilinear(((1, {0}),)), B=2, rule=lambda t, i: Literal.ZERO)
    assert evaluate_problem_bruteforce(DataStream(4, (1, 2, 2, 3)), zero) == 0


def test_bruteforce_matches_set_count():
    rnd = random.Random(1)
    spec = de_spec()
    for _ in range(1000):
        n = rnd.randint(1, 10)
        elems = tuple(rnd.randint(1, n) for _ in range(rnd.randint(0, 10)))
        assert evaluate_problem_bruteforce(DataStream(n, elems), spec) == len(set(elems))


def test_table_spec_and_psi_checks():
    # two clauses: C_0 = x_1, C_1 = not x_2; psi = z0 + z1 - z0 z1 (OR)
    psi = SparseMultilinear(((1, {0}), (1, {1}), (-1, {0, 1})))
    spec = ProblemSpec(k=2, psi=psi, B=2, table={(0, 1): Literal.VAR, (1, 2): Literal.NEG})
    assert spec.clause(0, [1, 0]) == 1 and spec.clause(1, [0, 1]) == 0
    assert spec.empty_value(2) == 1
    # symbol j counts iff a_1 == j or a_2 != j
    sigma = DataStream(3, (2, 1))
    want = sum(1 for j in (1, 2, 3) if sigma.elements[0] == j or sigma.elements[1] != j)
    assert evaluate_problem_bruteforce(sigma, spec) == want
    with pytest.raises(ValueError):
        ProblemSpec(k=2, psi=psi, B=1, table={})
    with pytest.raises(ValueError):
        ProblemSpec(k=1, psi=psi, B=2, table={})
    with pytest.raises(ValueError):
        SparseMultilinear(((1, {0}), (2, {0})))


def test_stream_round_trip_and_cursor(tmp_path):
    s = DataStream(5, (1, 5, 3))
    path = tmp_path / "s.txt"
    s.save(path)
    assert DataStream.load(path) == s
    assert list(s.cursor()) == [1, 5, 3]
    assert (s + DataStream(5, (2,))).elements == (1, 5, 3, 2)
    assert DataStream.loads("0 3\n").m == 0


@pytest.mark.parametrize(
    "text",
    ["", "3\n1\n2\n3\n", "2 3\n1\n", "2 3\n1\n2\n3\n", "1 3\n4\n", "1 3\n0\n", "1 3\nx\n", "1 3\n 1\n", "1 3\n1\n\n"],
)
def test_stream_format_errors(text):
    with pytest.raises(StreamFormatError):
        DataStream.loads(text)
