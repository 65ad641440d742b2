"""Protocol constants: modulus, prime basis, extension degrees, repetitions.

Every quantity the AM protocol leaves as "sufficiently large" is pinned here
to an exact value both parties can recompute from the public inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Sequence

from .field import find_irreducible, is_prime, next_prime


class ParameterError(ValueError):
    pass


def prime_basis(p: int) -> list[int]:
    """Shortest prefix of the primes whose product exceeds p."""
    if p < 2:
        raise ParameterError("p must be >= 2")
    out, acc, c = [], 1, 2
    while acc <= p:
        out.append(c)
        acc *= c
        c = next_prime(c)
    return out


def extension_degree(q: int, p: int) -> int:
    """Minimal lam with q**lam > p."""
    lam, power = 1, q
    while power <= p:
        lam += 1
        power *= q
    return lam


def crt_reconstruct(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Unique x in [0, prod(moduli)) with x = r_i (mod m_i)."""
    if len(residues) != len(moduli):
        raise ValueError("residues and moduli differ in length")
    if not moduli:
        raise ValueError("no moduli")
    x, mod = 0, 1
    for r, m in zip(residues, moduli):
        if not 0 <= r < m:
            raise ValueError(f"residue {r} out of range for modulus {m}")
        # lift x to the combined modulus: x + mod * t = r (mod m)
        t = (r - x) * pow(mod, -1, m) % m
        x += mod * t
        mod *= m
    return x


def repetition_count(k: int, delta_prime: Fraction | float) -> int:
    """Minimal L with (2/3)**L <= delta_prime / k, in exact arithmetic."""
    delta_prime = Fraction(delta_prime)
    if k < 1 or not 0 < delta_prime <= 1:
        raise ParameterError("need k >= 1 and 0 < delta' <= 1")
    target = delta_prime / k
    L, val = 0, Fraction(1)
    while val > target:
        L += 1
        val *= Fraction(2, 3)
    return max(L, 1)


def omega_degree_bound(w: int, k: int, q: int, L: int) -> int:
    """Exact degree bound k * L * (w - 1) * (q - 1) of the proof polynomials."""
    return k * L * (w - 1) * (q - 1)


@dataclass(frozen=True)
class PrimeParams:
    q: int
    lam: int
    irreducible: tuple[int, ...]
    degree_bound: int


@dataclass(frozen=True)
class ProtocolParams:
    m: int
    n: int
    s: int
    w: int
    k: int
    B: int
    epsilon: Fraction
    delta: Fraction
    p: int
    Q: tuple[int, ...]
    L: int
    delta_prime: Fraction
    primes: tuple[PrimeParams, ...]
    shared_seed: bytes = field(repr=False)

    def prime(self, q: int) -> PrimeParams:
        for pp in self.primes:
            if pp.q == q:
                return pp
        raise KeyError(q)

    def check(self) -> list[str]:
        """Names of violated invariants (empty when all hold)."""
        bad = []
        if self.s * self.w < self.n:
            bad.append("s*w >= n")
        if not (is_prime(self.p) and self.p > 2 * self.n * self.B):
            bad.append("p prime and p > 2nB")
        if list(self.Q) != sorted(self.Q) or not all(is_prime(q) for q in self.Q) or prod(self.Q) <= self.p:
            bad.append("prod(Q) > p")
        for pp in self.primes:
            if not (pp.q**pp.lam > self.p >= pp.q ** (pp.lam - 1)):
                bad.append(f"lambda_{pp.q} minimal")
            if Fraction(2 * pp.degree_bound, self.p) > self.delta:
                bad.append(f"2*D_{pp.q}/p <= delta")
        if Fraction(2, 3) ** self.L > self.delta_prime / self.k:
            bad.append("(2/3)^L <= delta'/k")
        return bad

    def to_text(self) -> str:
        """Human-readable key=value audit block."""
        lines = [
            f"m={self.m}",
            f"n={self.n}",
            f"s={self.s}",
            f"w={self.w}",
            f"k={self.k}",
            f"B={self.B}",
            f"epsilon={self.epsilon}",
            f"delta={self.delta}",
            f"p={self.p}",
            f"Q={','.join(map(str, self.Q))}",
            f"L={self.L}",
            f"delta_prime={self.delta_prime}",
            f"seed={self.shared_seed.hex()}",
        ]
        for pp in self.primes:
            irr = ",".join(map(str, pp.irreducible))
            lines.append(f"prime.{pp.q}=lambda:{pp.lam} irreducible:{irr} D:{pp.degree_bound}")
        return "\n".join(lines)


def derive_params(
    m: int,
    n: int,
    s: int,
    w: int,
    k: int,
    B: int,
    epsilon: Fraction | int = 0,
    delta: Fraction | float = Fraction(1, 3),
    shared_seed: bytes = b"",
) -> ProtocolParams:
    """Fixed-point selection of p until every invariant holds at once."""
    epsilon, delta = Fraction(epsilon), Fraction(delta)
    if min(m, n, s, w, k) < 1:
        raise ParameterError("m, n, s, w, k must all be >= 1")
    if s * w < n:
        raise ParameterError(f"s*w = {s * w} < n = {n}")
    if not 0 <= epsilon < Fraction(1, 2):
        raise ParameterError("epsilon must lie in [0, 1/2)")
    if not 0 < delta <= 1:
        raise ParameterError("delta must lie in (0, 1]")
    if B < 1:
        raise ParameterError("B must be >= 1")

    p = next_prime(2 * n * B)
    while True:
        Q = prime_basis(p)
        delta_prime = delta / (2 * n * len(Q))
        L = repetition_count(k, delta_prime)
        d_max = omega_degree_bound(w, k, Q[-1], L)
        if Fraction(2 * d_max, p) < delta:
            break
        p = next_prime(-(-2 * d_max * delta.denominator // delta.numerator))

    primes = []
    for q in Q:
        lam = extension_degree(q, p)
        primes.append(PrimeParams(q, lam, find_irreducible(q, lam), omega_degree_bound(w, k, q, L)))
    return ProtocolParams(
        m=m,
        n=n,
        s=s,
        w=w,
        k=k,
        B=B,
        epsilon=epsilon,
        delta=delta,
        p=p,
        Q=tuple(Q),
        L=L,
        delta_prime=delta_prime,
        primes=tuple(primes),
        shared_seed=bytes(shared_seed),
    )
