"""Data streams, element indicators, grid maps and problem descriptions.

Symbols are 1-indexed in [1, n] at every public boundary.  Internally a
symbol j sits at grid cell (x_index, y_index) = divmod(j - 1, s), and the
grid coordinates are the first w (resp. s) field elements in enumeration
order, i.e. the packed integers 0..w-1 and 0..s-1.
"""

from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, Sequence

import numpy as np

from .field import ExtElement, ExtField, vanishing_poly


class StreamFormatError(ValueError):
    pass


@dataclass(frozen=True)
class DataStream:
    """A length-m stream over the alphabet [1, n].

    The object itself is the prover's rewindable handle; ``cursor()`` mints an
    independent single-pass iterator.
    """

    n: int
    elements: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(int(a) for a in self.elements))
        if self.n < 1:
            raise ValueError("alphabet size must be >= 1")
        for a in self.elements:
            if not 1 <= a <= self.n:
                raise ValueError(f"symbol {a} outside [1, {self.n}]")

    @property
    def m(self) -> int:
        return len(self.elements)

    def cursor(self) -> Iterator[int]:
        return iter(self.elements)

    def __add__(self, other: "DataStream") -> "DataStream":
        if other.n != self.n:
            raise ValueError("alphabet mismatch")
        return DataStream(self.n, self.elements + other.elements)

    def dumps(self) -> str:
        return f"{self.m} {self.n}\n" + "".join(f"{a}\n" for a in self.elements)

    @classmethod
    def loads(cls, text: str) -> "DataStream":
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise StreamFormatError("empty stream file")
        head = lines[0].split()
        if len(head) != 2 or not all(h.isdigit() for h in head):
            raise StreamFormatError(f"bad header line {lines[0]!r}")
        m, n = int(head[0]), int(head[1])
        body = lines[1:]
        if len(body) != m:
            raise StreamFormatError(f"header says m={m} but file has {len(body)} symbols")
        elems = []
        for lineno, line in enumerate(body, start=2):
            if not line.isdigit():
                raise StreamFormatError(f"line {lineno}: not a symbol: {line!r}")
            a = int(line)
            if not 1 <= a <= n:
                raise StreamFormatError(f"line {lineno}: symbol {a} outside [1, {n}]")
            elems.append(a)
        try:
            return cls(n, tuple(elems))
        except ValueError as exc:
            raise StreamFormatError(str(exc)) from exc

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path: str | Path) -> "DataStream":
        return cls.loads(Path(path).read_text())


def element_indicator(a_i: int, j: int) -> int:
    return 1 if a_i == j else 0


class GridMap:
    """Bijection between [1, n] and a w x s grid of field elements.

    Holds the Lagrange denominators 1 / prod_{a != alpha}(alpha - a) for both
    axes; they are public constants shared by every evaluation over the grid.
    """

    def __init__(self, field: ExtField, s: int, w: int, n: int):
        if s * w < n:
            raise ValueError("grid too small for the alphabet")
        if max(s, w) > field.order:
            raise ValueError("grid does not fit in the field")
        self.field = field
        self.s, self.w, self.n = s, w, n
        self.x_points = list(range(w))
        self.y_points = list(range(s))
        self.x_inv_den = self._inv_denominators(self.x_points)
        self.y_inv_den = self._inv_denominators(self.y_points)

    def _inv_denominators(self, pts: list[int]) -> list[int]:
        return [int(v) for v in self.field.vinv(_node_products(self.field, len(pts)))]

    def locate(self, j: int) -> tuple[int, int]:
        """pi(j) as packed grid coordinates (alpha, beta)."""
        if not 1 <= j <= self.n:
            raise ValueError(f"symbol {j} outside [1, {self.n}]")
        return divmod(j - 1, self.s)

    def symbol_at(self, alpha: int, beta: int) -> int | None:
        j = alpha * self.s + beta + 1
        return j if j <= self.n else None

    def x_basis(self, alpha: int, x: int) -> int:
        """Lagrange basis polynomial for node alpha of D_w, evaluated at x."""
        return _basis(self.field, self.x_points, self.x_inv_den, alpha, x)

    def y_basis(self, beta: int, y: int) -> int:
        return _basis(self.field, self.y_points, self.y_inv_den, beta, y)

    def x_basis_at(self, x: int) -> Callable[[int], int]:
        """Fast alpha -> L_alpha(x) for a fixed x, O(1) per call.

        Uses L_alpha(x) = Z(x) / ((x - alpha) Z'(alpha)) with Z the vanishing
        polynomial of D_w, so only Z(x) is kept per point.
        """
        f = self.field
        if x < self.w:
            return lambda alpha: 1 if alpha == x else 0
        zx = 1
        for a in self.x_points:
            zx = f.mul(zx, f.sub(x, a))
        inv_den = self.x_inv_den
        return lambda alpha: f.mul(f.mul(zx, inv_den[alpha]), f.inv(f.sub(x, alpha)))

    def basis_coefficients(self) -> list[list[int]]:
        """Coefficients (lowest first) of every x-axis Lagrange basis polynomial."""
        return _basis_coefficients(self.field, self.w)


@functools.lru_cache(maxsize=64)
def grid_map(field: ExtField, s: int, w: int, n: int) -> GridMap:
    """Shared GridMap instance (its denominators cost O(s^2 + w^2) to build)."""
    return GridMap(field, s, w, n)


def _basis(f: ExtField, pts, inv_den, node: int, x: int) -> int:
    v = inv_den[node]
    for a in pts:
        if a != node:
            v = f.mul(v, f.sub(x, a))
    return v


def _node_products(f: ExtField, w: int) -> np.ndarray:
    """prod_{a != alpha} (alpha - a) over nodes 0..w-1, for every alpha."""
    nodes = np.arange(w, dtype=np.int64)
    out = np.ones(w, dtype=np.int64)
    for a in range(w):
        diff = f.vsub(nodes, a)
        diff[a] = 1
        out = f.vmul(out, diff)
    return out


@functools.lru_cache(maxsize=64)
def _basis_coefficients(f: ExtField, w: int) -> list[list[int]]:
    """Row alpha: coefficients of L_alpha = Z(x) / ((x - alpha) Z'(alpha))."""
    z = vanishing_poly(f, range(w))
    nodes = np.arange(w, dtype=np.int64)
    # synthetic division of Z by (x - alpha), for all alpha at once
    numer = np.zeros((w, w), dtype=np.int64)
    carry = np.zeros(w, dtype=np.int64)
    for i in range(w, 0, -1):
        carry = f.vadd(f.vmul(carry, nodes), z[i])
        numer[:, i - 1] = carry
    inv = f.vinv(_node_products(f, w))
    return f.vmul(numer, inv[:, None]).tolist()


def indicator_extension_eval(grid: GridMap, a_i: int, x: ExtElement, y: ExtElement) -> ExtElement:
    """Bivariate Lagrange extension of the i-th element indicator at (x, y)."""
    if x.field != grid.field or y.field != grid.field:
        raise ValueError("field mismatch")
    alpha, beta = grid.locate(a_i)
    f = grid.field
    return ExtElement(f, f.mul(grid.x_basis(alpha, x.value), grid.y_basis(beta, y.value)))


class Literal(enum.IntEnum):
    ZERO = 0
    ONE = 1
    VAR = 2
    NEG = 3


@dataclass(frozen=True)
class SparseMultilinear:
    """sum of coeff * prod_{t in subset} z_t; variable indices are 0-based."""

    terms: tuple[tuple[int, frozenset[int]], ...]

    def __post_init__(self):
        terms = tuple((int(c), frozenset(sub)) for c, sub in self.terms)
        if len({sub for _, sub in terms}) != len(terms):
            raise ValueError("duplicate monomials")
        object.__setattr__(self, "terms", terms)

    def __call__(self, bits: Sequence[int]) -> int:
        return sum(c for c, sub in self.terms if all(bits[t] for t in sub))

    @property
    def arity(self) -> int:
        return max((max(sub) + 1 for _, sub in self.terms if sub), default=0)


@dataclass(frozen=True)
class ProblemSpec:
    """k clauses over the m stream positions, combined through psi.

    ``literal(t, i)`` gives the literal of position i (1-based) in clause t
    (0-based).  Either pass a rule callable or a sparse table; positions
    missing from a table are the constant 0, which is neutral in an OR.
    """

    k: int
    psi: SparseMultilinear
    B: int
    epsilon: object = 0
    rule: Callable[[int, int], Literal] | None = None
    table: dict | None = None
    name: str = "custom"

    def __post_init__(self):
        if (self.rule is None) == (self.table is None):
            raise ValueError("give exactly one of rule or table")
        if self.psi.arity > self.k:
            raise ValueError("psi uses more variables than there are clauses")
        if self.k <= 20:
            for bits in itertools.product((0, 1), repeat=self.k):
                v = self.psi(bits)
                if not 0 <= v < self.B:
                    raise ValueError(f"psi{bits} = {v} outside [0, B={self.B})")

    def literal(self, t: int, i: int) -> Literal:
        if self.rule is not None:
            return Literal(self.rule(t, i))
        return Literal(self.table.get((t, i), Literal.ZERO))

    def clause(self, t: int, bits: Sequence[int]) -> int:
        """Evaluate clause t on a Boolean assignment to positions 1..m."""
        for i, b in enumerate(bits, start=1):
            lit = self.literal(t, i)
            if lit is Literal.ONE or (lit is Literal.VAR and b) or (lit is Literal.NEG and not b):
                return 1
        return 0

    def empty_value(self, m: int) -> int:
        """psi of the clause outputs on the all-zero indicator vector."""
        zeros = [0] * m
        return self.psi([self.clause(t, zeros) for t in range(self.k)])


def evaluate_problem_bruteforce(stream: DataStream, spec: ProblemSpec) -> int:
    """sum_j psi(C_1(chi(j)), ..., C_k(chi(j))) computed directly."""
    total = 0
    for j in range(1, stream.n + 1):
        chi = [element_indicator(a, j) for a in stream.elements]
        total += spec.psi([spec.clause(t, chi) for t in range(spec.k)])
    return total
