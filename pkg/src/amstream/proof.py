"""Binary proof-stream format.

Layout (all integers little-endian unsigned 64-bit unless noted)::

    b"AMSP1"
    m n s w k B eps_num eps_den delta_num delta_den p
    seed_len, seed bytes
    for each q in Q, ascending:
        q, lam
        lam low coefficients of the monic irreducible (1 byte each if q < 256,
        else u64); the leading 1 is implicit
        D
        D + 1 coefficients, ceil(lam * log2 q) bits each, packed LSB first,
        zero padded to a byte boundary

Q is not stored: it is the shortest prime prefix with product > p.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import BinaryIO, Iterator

import numpy as np

from .field import ExtField, get_field, pack_elements, unpack_elements
from .params import ProtocolParams, prime_basis

MAGIC = b"AMSP1"
_U64 = struct.Struct("<Q")
_HEADER = struct.Struct("<11Q")
MAX_SEED = 1 << 16


class ProofFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ProofHeader:
    m: int
    n: int
    s: int
    w: int
    k: int
    B: int
    epsilon: Fraction
    delta: Fraction
    p: int
    seed: bytes

    @classmethod
    def from_params(cls, params: ProtocolParams) -> "ProofHeader":
        return cls(
            params.m,
            params.n,
            params.s,
            params.w,
            params.k,
            params.B,
            params.epsilon,
            params.delta,
            params.p,
            params.shared_seed,
        )

    def encode(self) -> bytes:
        fields = (
            self.m,
            self.n,
            self.s,
            self.w,
            self.k,
            self.B,
            self.epsilon.numerator,
            self.epsilon.denominator,
            self.delta.numerator,
            self.delta.denominator,
            self.p,
        )
        return MAGIC + _HEADER.pack(*fields) + _U64.pack(len(self.seed)) + self.seed


@dataclass
class ProofSection:
    q: int
    lam: int
    irreducible: tuple[int, ...]
    degree_bound: int
    coeffs: np.ndarray

    @property
    def field(self) -> ExtField:
        return get_field(self.q, self.lam) if get_field(self.q, self.lam).irreducible == self.irreducible else ExtField(
            self.q, self.lam, self.irreducible
        )

    def encode(self) -> bytes:
        if len(self.coeffs) != self.degree_bound + 1:
            raise ValueError("section must carry exactly D + 1 coefficients")
        out = [_U64.pack(self.q), _U64.pack(self.lam)]
        low = self.irreducible[: self.lam]
        out.append(bytes(low) if self.q < 256 else b"".join(_U64.pack(c) for c in low))
        out.append(_U64.pack(self.degree_bound))
        out.append(pack_elements(self.field, self.coeffs))
        return b"".join(out)


@dataclass
class ProofStream:
    header: ProofHeader
    sections: list[ProofSection]

    def encode(self) -> bytes:
        return self.header.encode() + b"".join(s.encode() for s in self.sections)

    @classmethod
    def decode(cls, data: bytes) -> "ProofStream":
        reader = ProofReader(io.BytesIO(data))
        sections = []
        for sec in reader.sections():
            coeffs = np.concatenate([b for b in sec.blocks()] or [np.zeros(0, dtype=np.int64)])
            sections.append(ProofSection(sec.q, sec.lam, sec.irreducible, sec.degree_bound, coeffs))
        reader.finish()
        return cls(reader.header, sections)

    def section(self, q: int) -> ProofSection:
        for s in self.sections:
            if s.q == q:
                return s
        raise KeyError(q)


def _read_exact(fh: BinaryIO, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise ProofFormatError("truncated proof stream")
    return data


class SectionReader:
    """One per-prime section; coefficients are consumed in bounded blocks."""

    def __init__(self, fh: BinaryIO, q: int, lam: int, irreducible: tuple[int, ...], degree_bound: int):
        self._fh = fh
        self.q = q
        self.lam = lam
        self.irreducible = irreducible
        self.degree_bound = degree_bound
        self.field = ExtField(q, lam, irreducible) if get_field(q, lam).irreducible != irreducible else get_field(q, lam)
        self.consumed = False

    def blocks(self, block: int = 4096) -> Iterator[np.ndarray]:
        """Yield coefficient arrays, lowest degree first; block is rounded to a multiple of 8."""
        block = max(8, block // 8 * 8)
        bits = self.field.bits
        left = self.degree_bound + 1
        while left:
            take = min(block, left)
            raw = _read_exact(self._fh, (take * bits + 7) // 8)
            try:
                yield unpack_elements(self.field, raw, take)
            except ValueError as exc:
                raise ProofFormatError(str(exc)) from exc
            left -= take
        self.consumed = True


class ProofReader:
    """Sequential, single-pass reader over an encoded proof."""

    def __init__(self, fh: BinaryIO):
        self._fh = fh
        if _read_exact(fh, len(MAGIC)) != MAGIC:
            raise ProofFormatError("bad magic")
        f = _HEADER.unpack(_read_exact(fh, _HEADER.size))
        m, n, s, w, k, B, en, ed, dn, dd, p = f
        if min(m, n, s, w, k, B) < 1 or ed == 0 or dd == 0 or p < 2:
            raise ProofFormatError("invalid header values")
        (seed_len,) = _U64.unpack(_read_exact(fh, 8))
        if seed_len > MAX_SEED:
            raise ProofFormatError("seed too long")
        seed = _read_exact(fh, seed_len)
        self.header = ProofHeader(m, n, s, w, k, B, Fraction(en, ed), Fraction(dn, dd), p, seed)
        self.Q = prime_basis(p)
        self._started = False

    def sections(self) -> Iterator[SectionReader]:
        if self._started:
            raise RuntimeError("sections() is single pass")
        self._started = True
        for expect_q in self.Q:
            (q,) = _U64.unpack(_read_exact(self._fh, 8))
            (lam,) = _U64.unpack(_read_exact(self._fh, 8))
            if q != expect_q:
                raise ProofFormatError(f"expected section for q={expect_q}, found {q}")
            if not 1 <= lam <= 64:
                raise ProofFormatError(f"implausible extension degree {lam}")
            if q < 256:
                low = tuple(_read_exact(self._fh, lam))
            else:
                low = tuple(_U64.unpack(_read_exact(self._fh, 8))[0] for _ in range(lam))
            (D,) = _U64.unpack(_read_exact(self._fh, 8))
            if D > 1 << 40:
                raise ProofFormatError("implausible degree bound")
            try:
                sec = SectionReader(self._fh, q, lam, low + (1,), D)
            except ValueError as exc:
                raise ProofFormatError(str(exc)) from exc
            yield sec
            if not sec.consumed:
                for _ in sec.blocks(1 << 16):
                    pass

    def finish(self) -> None:
        if self._fh.read(1):
            raise ProofFormatError("trailing bytes after last section")


def as_reader(source) -> ProofReader:
    """Accept a ProofStream, raw bytes, or a binary file object."""
    if isinstance(source, ProofReader):
        return source
    if isinstance(source, ProofStream):
        source = source.encode()
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(bytes(source))
    return ProofReader(source)
