"""Low-degree randomized approximation of OR gates over GF(q).

An m-ary OR is replaced by

    eta(z) = 1 - prod_{l=1..L} (1 - ECC(z)_{iota_l} ** (q - 1))

where ECC is a linear code of length 100m and the iota_l are coordinates
drawn from the shared random string.  On a Boolean input the value is exact
when z = 0 and wrong only if every sampled coordinate of ECC(z) vanishes.

The code is a seeded random linear code whose generator entries are
computed on demand from a keyed hash, so a streaming evaluator can touch
single entries without storing the matrix.
"""

from __future__ import annotations

import hashlib
import math
import random
import struct
from dataclasses import dataclass
from typing import Iterator, Sequence

from .field import ExtElement, ExtField
from .stream import Literal, ProblemSpec

CODE_RATE = 100


def _master_key(seed: bytes) -> bytes:
    return hashlib.blake2b(seed, digest_size=32, person=b"amstream-seed").digest()


def _expand(key: bytes, label: bytes) -> Iterator[int]:
    """Endless byte stream from a keyed hash in counter mode."""
    ctr = 0
    while True:
        block = hashlib.blake2b(label + struct.pack("<Q", ctr), key=key, digest_size=64).digest()
        yield from block
        ctr += 1


def _uniform_below(stream: Iterator[int], bound: int) -> int:
    """Rejection sampling: an unbiased integer in [0, bound)."""
    nbytes = max(1, (bound - 1).bit_length() + 7 >> 3)
    span = 1 << (8 * nbytes)
    limit = span - span % bound
    while True:
        v = 0
        for _ in range(nbytes):
            v = v << 8 | next(stream)
        if v < limit:
            return v % bound


@dataclass(frozen=True)
class SharedRandomness:
    """The common random string shared by prover and verifier."""

    seed: bytes

    @property
    def key(self) -> bytes:
        return _master_key(self.seed)

    def code(self, q: int, m: int) -> "LinearCode":
        sub = hashlib.blake2b(b"code" + struct.pack("<Q", q), key=self.key, digest_size=32).digest()
        return LinearCode(sub, q, m)


def sample_indices(r: SharedRandomness, q: int, L: int, m: int) -> list[int]:
    """L code coordinates in [1, 100m], fresh per prime q."""
    if L < 1:
        raise ValueError("L must be >= 1")
    stream = _expand(r.key, b"indices" + struct.pack("<QQ", q, m))
    return [1 + _uniform_below(stream, CODE_RATE * m) for _ in range(L)]


class LinearCode:
    """Seeded random linear code GF(q)^m -> GF(q)^(100m).

    ``entry(i, col)`` is the generator entry G[i][col]; the codeword of u has
    coordinate col equal to sum_i u_i G[i][col].
    """

    def __init__(self, key: bytes, q: int, m: int):
        self.key = key
        self.q = q
        self.m = m
        self.length = CODE_RATE * m
        self._nbytes = max(1, (q - 1).bit_length() + 7 >> 3)
        span = 1 << (8 * self._nbytes)
        self._limit = span - span % q

    def entry(self, i: int, col: int) -> int:
        q, key = self.q, self.key
        if self._nbytes == 1:
            limit = self._limit
            for b in hashlib.blake2b(struct.pack("<QQ", i, col), key=key, digest_size=16).digest():
                if b < limit:
                    return b % q
        stream = _expand(key, b"entry" + struct.pack("<QQ", i, col))
        return _uniform_below(stream, q)

    def column(self, col: int) -> list[int]:
        return [self.entry(i, col) for i in range(1, self.m + 1)]

    def encode_at(self, message: Sequence[int], col: int) -> int:
        """Coordinate col of the codeword of a GF(q) message."""
        return sum(u * self.entry(i, col) for i, u in enumerate(message, start=1) if u) % self.q


def code_entry(code: LinearCode, i: int, col: int) -> int:
    if not (1 <= i <= code.m and 1 <= col <= code.length):
        raise ValueError("code coordinate out of range")
    return code.entry(i, col)


def accumulate_coordinate(acc: ExtElement, i: int, col: int, literal_value: ExtElement, code: LinearCode) -> ExtElement:
    """acc + literal_value * G[i][col], by linearity of the code."""
    g = code.entry(i, col)
    f = acc.field
    return ExtElement(f, f.add(acc.value, f.mul(literal_value.value, g)))


def eta_packed(field: ExtField, accs: Sequence[int]) -> int:
    q = field.q
    prod = 1
    for a in accs:
        prod = field.mul(prod, field.sub(1, field.pow(a, q - 1)))
    return field.sub(1, prod)


def finalize_eta(accs: Sequence[ExtElement], q: int | None = None) -> ExtElement:
    """1 - prod_l (1 - acc_l^(q-1))."""
    field = accs[0].field
    if q is not None and q != field.q:
        raise ValueError("characteristic mismatch")
    return ExtElement(field, eta_packed(field, [a.value for a in accs]))


def literal_value(spec: ProblemSpec, t: int, i: int, chi_value: ExtElement) -> ExtElement:
    lit = spec.literal(t, i)
    f = chi_value.field
    if lit is Literal.VAR:
        return chi_value
    if lit is Literal.NEG:
        return ExtElement(f, f.sub(1, chi_value.value))
    return ExtElement(f, 1 if lit is Literal.ONE else 0)


def or_failure_stats(q: int, m: int, L: int, trials: int, seed: int = 0) -> dict:
    """Monte-Carlo estimate of Pr[eta(x) != OR(x)] over fresh seeds.

    Each trial draws a fresh shared seed and a uniformly random nonzero
    Boolean x; a second set of trials uses x = 0.
    """
    rng = random.Random(seed)
    fail = zero_fail = 0
    for _ in range(trials):
        r = SharedRandomness(rng.randbytes(16))
        code = r.code(q, m)
        x = [0] * m
        while not any(x):
            x = [rng.getrandbits(1) for _ in range(m)]
        idx = sample_indices(r, q, L, m)
        eta = 1
        for col in idx:
            c = code.encode_at(x, col)
            eta = eta * (1 - pow(c, q - 1, q)) % q
        if (1 - eta) % q != 1:
            fail += 1
        # x = 0: every coordinate is 0, so eta is exactly 0
        zero_eta = 1
        for col in idx:
            zero_eta = zero_eta * (1 - pow(code.encode_at([0] * m, col), q - 1, q)) % q
        if (1 - zero_eta) % q != 0:
            zero_fail += 1
    rate = fail / trials
    bound = (2 / 3) ** L
    sigma = math.sqrt(bound * (1 - bound) / trials)
    return {
        "q": q,
        "m": m,
        "L": L,
        "trials": trials,
        "failures": fail,
        "rate": rate,
        "stderr": math.sqrt(rate * (1 - rate) / trials),
        "bound": bound,
        "bound_sigma": sigma,
        "zero_failures": zero_fail,
    }
