"""The AM streaming protocol: prover, streaming evaluator, verifier.

For each prime q of the basis Q the prover sends the coefficients of

    omega_q(x) = sum_{y in D_s} psi_q(eta_1(x, y), ..., eta_k(x, y))

over H_q = GF(q^lam).  The verifier evaluates omega_q at a private point
xi_q in one pass over the data stream, compares it with the received
polynomial at xi_q, and on agreement reconstructs the answer from the domain
sums sum_{x in D_w} omega_q(x) with the Chinese remainder theorem.
"""

from __future__ import annotations

import functools
import os
import random
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import fastpoly
from .field import (
    ExtField,
    get_field,
    lagrange_interpolate_packed,
    pack_elements,
    unpack_elements,
    vanishing_poly,
)
from .or_approx import LinearCode, SharedRandomness, sample_indices
from .params import ProtocolParams, crt_reconstruct
from .proof import ProofFormatError, ProofHeader, ProofSection, ProofStream, as_reader
from .stream import DataStream, Literal, ProblemSpec, grid_map

REJECT = None


class StreamLengthError(ValueError):
    """The data stream is shorter or longer than the declared m."""


class TranscriptExhausted(RuntimeError):
    pass


# -- private randomness ----------------------------------------------------------


class PrivateRandomness:
    """The verifier's private coins, journaled so a run can be replayed."""

    def __init__(self, source: Callable[[int], bytes] | None = None):
        self._source = source or os.urandom
        self.journal = bytearray()

    @classmethod
    def from_seed(cls, seed: int) -> "PrivateRandomness":
        return cls(random.Random(seed).randbytes)

    @classmethod
    def replay(cls, data: bytes) -> "PrivateRandomness":
        pos = 0

        def source(n: int) -> bytes:
            nonlocal pos
            if pos + n > len(data):
                raise TranscriptExhausted("randomness transcript exhausted")
            out = data[pos : pos + n]
            pos += n
            return out

        return cls(source)

    @classmethod
    def load(cls, path: str | Path) -> "PrivateRandomness":
        return cls.replay(Path(path).read_bytes())

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(bytes(self.journal))

    def read(self, n: int) -> bytes:
        b = self._source(n)
        self.journal += b
        return b

    def randbelow(self, bound: int) -> int:
        nbytes = max(1, ((bound - 1).bit_length() + 7) // 8)
        span = 1 << (8 * nbytes)
        limit = span - span % bound
        while True:
            v = int.from_bytes(self.read(nbytes), "little")
            if v < limit:
                return v % bound


# -- per-prime public constants ----------------------------------------------------


class PrimeContext:
    """Everything about one prime q that both parties derive from public data."""

    def __init__(self, params: ProtocolParams, q: int):
        pp = params.prime(q)
        self.q = q
        self.params = params
        self.field = get_field(q, pp.lam) if get_field(q, pp.lam).irreducible == pp.irreducible else ExtField(
            q, pp.lam, pp.irreducible
        )
        self.grid = grid_map(self.field, params.s, params.w, params.n)
        shared = SharedRandomness(params.shared_seed)
        self.code: LinearCode = shared.code(q, params.m)
        self.indices = sample_indices(shared, q, params.L, params.m)
        self.degree_bound = pp.degree_bound
        self._g: dict[int, list[int]] = {}

    def g_row(self, i: int) -> list[int]:
        """Generator entries G[i][iota_l] for l = 1..L (not cached)."""
        return [self.code.entry(i, col) for col in self.indices]

    def g_row_cached(self, i: int) -> list[int]:
        row = self._g.get(i)
        if row is None:
            row = self._g[i] = self.g_row(i)
        return row


@functools.lru_cache(maxsize=64)
def prime_context(params: ProtocolParams, q: int) -> PrimeContext:
    return PrimeContext(params, q)


def psi_terms(spec: ProblemSpec, q: int) -> list[tuple[int, tuple[int, ...]]]:
    """psi's monomials with coefficients reduced mod q (zero terms dropped)."""
    return [(c % q, tuple(sorted(sub))) for c, sub in spec.psi.terms if c % q]


def _check_compatible(params: ProtocolParams, spec: ProblemSpec) -> None:
    if spec.k != params.k or spec.B != params.B:
        raise ValueError("problem spec does not match the protocol parameters")


# -- streaming evaluator -------------------------------------------------------------


class OmegaEvaluator:
    """One-pass evaluation of omega_q at a fixed point xi.

    State: acc[t][l][y] and off[t][l] (packed field elements), the point xi
    and the stream position.  off collects the contributions of constant and
    negated literals, which do not depend on y; acc[t][l][y] + off[t][l] is
    coordinate iota_l of the code applied to clause t's literal vector at
    (xi, y).
    """

    def __init__(self, params: ProtocolParams, spec: ProblemSpec, q: int, xi: int, cache_code: bool = False):
        _check_compatible(params, spec)
        self.ctx = ctx = prime_context(params, q)
        self.spec = spec
        self.field = ctx.field
        if not 0 <= xi < self.field.order:
            raise ValueError("xi outside the field")
        self.xi = xi
        self.m, self.s, self.k, self.L = params.m, params.s, params.k, params.L
        self.acc = [0] * (self.k * self.L * self.s)
        self.off = [0] * (self.k * self.L)
        self.position = 0
        self._lx = ctx.grid.x_basis_at(xi)
        self._g = ctx.g_row_cached if cache_code else ctx.g_row

    @property
    def live_elements(self) -> int:
        """Field elements held: the accumulators plus xi and the position counter."""
        return len(self.acc) + len(self.off) + 2

    def feed(self, symbol: int) -> None:
        i = self.position + 1
        if i > self.m:
            raise StreamLengthError(f"stream longer than m={self.m}")
        alpha, beta = self.ctx.grid.locate(symbol)
        chi = self._lx(alpha)
        gs = self._g(i)
        f, acc, off, L, s = self.field, self.acc, self.off, self.L, self.s
        for t in range(self.k):
            lit = self.spec.literal(t, i)
            if lit is Literal.ZERO:
                continue
            base = t * L
            if lit is not Literal.VAR:
                for l, g in enumerate(gs):
                    if g:
                        off[base + l] = f.add(off[base + l], g)
            if lit is Literal.ONE or not chi:
                continue
            for l, g in enumerate(gs):
                if g:
                    j = (base + l) * s + beta
                    v = f.mul(chi, g)
                    acc[j] = f.add(acc[j], v) if lit is Literal.VAR else f.sub(acc[j], v)
        self.position = i

    def value(self) -> int:
        if self.position != self.m:
            raise StreamLengthError(f"stream ended after {self.position} of m={self.m} elements")
        f, q, L, s = self.field, self.field.q, self.L, self.s
        terms = psi_terms(self.spec, q)
        total = 0
        for y in range(s):
            etas = []
            for t in range(self.k):
                prod = 1
                for l in range(L):
                    a = f.add(self.acc[(t * L + l) * s + y], self.off[t * L + l])
                    prod = f.mul(prod, f.sub(1, f.pow(a, q - 1)))
                    if not prod:
                        break
                etas.append(f.sub(1, prod))
            for c, sub in terms:
                v = c
                for t in sub:
                    v = f.mul(v, etas[t])
                total = f.add(total, v)
        return total

    # state (de)serialisation for the split simulation
    def state(self) -> list[int]:
        return [self.xi, *self.acc, *self.off]

    def load_state(self, position: int, values: Sequence[int]) -> None:
        n_acc = len(self.acc)
        self.position = position
        self.acc = list(values[:n_acc])
        self.off = list(values[n_acc:])


def streaming_eval_omega(
    cursor: Iterable[int], q: int, xi: int, params: ProtocolParams, spec: ProblemSpec
) -> int:
    ev = OmegaEvaluator(params, spec, q, xi)
    for a in cursor:
        ev.feed(a)
    return ev.value()


# -- prover --------------------------------------------------------------------------


def _omega_interpolate(stream: DataStream, params: ProtocolParams, spec: ProblemSpec, q: int) -> np.ndarray:
    """Evaluate omega_q at D+1 points by streaming, then interpolate."""
    ctx = prime_context(params, q)
    D = ctx.degree_bound
    xs = list(range(D + 1))
    ys = []
    for x in xs:
        ev = OmegaEvaluator(params, spec, q, x, cache_code=True)
        for a in stream.cursor():
            ev.feed(a)
        ys.append(ev.value())
    coeffs = lagrange_interpolate_packed(ctx.field, xs, ys)
    out = np.zeros(D + 1, dtype=np.int64)
    out[: len(coeffs)] = coeffs
    return out


def _omega_compose(stream: DataStream, params: ProtocolParams, spec: ProblemSpec, q: int) -> np.ndarray:
    """Build omega_q symbolically with fast polynomial products.

    For each clause t, coordinate l and column y, the code coordinate is the
    polynomial A(x) = sum_alpha d[alpha] L_alpha(x) where d[alpha] is its
    (base-field) value at grid point (alpha, y).  Then eta = 1 - prod_l
    (1 - A_l^(q-1)) and psi is expanded term by term.
    """
    ctx = prime_context(params, q)
    f, grid = ctx.field, ctx.grid
    k, L, s, w, lam = params.k, params.L, params.s, params.w, f.lam
    vals = np.zeros((k, L, s, w), dtype=np.int64)
    const = np.zeros((k, L), dtype=np.int64)
    for i, a in enumerate(stream.elements, start=1):
        alpha, beta = grid.locate(a)
        g = np.array(ctx.g_row_cached(i), dtype=np.int64)
        for t in range(k):
            lit = spec.literal(t, i)
            if lit is Literal.VAR:
                vals[t, :, beta, alpha] += g
            elif lit is Literal.NEG:
                const[t] += g
                vals[t, :, beta, alpha] -= g
            elif lit is Literal.ONE:
                const[t] += g
    vals = (vals + const[:, :, None, None]) % q
    basis = f.vdigits(np.array(grid.basis_coefficients(), dtype=np.int64))  # (alpha, coef, digit)
    A = (vals.reshape(-1, w) @ basis.reshape(w, w * lam)) % q
    A = A.reshape(k, L, s, w, lam)

    terms = psi_terms(spec, q)
    one = fastpoly.const(f, 1)
    total = fastpoly.zero(f)
    for y in range(s):
        etas = []
        for t in range(k):
            factors = []
            eta = None
            for l in range(L):
                a = fastpoly.trim(A[t, l, y])
                if fastpoly.is_zero(a):
                    continue
                if len(a) == 1:
                    # nonzero constant: a^(q-1) = 1, so the product vanishes
                    eta = one
                    break
                factors.append(fastpoly.one_minus(f, fastpoly.power(f, a, q - 1)))
            if eta is None:
                eta = fastpoly.one_minus(f, fastpoly.product(f, factors)) if factors else fastpoly.zero(f)
            etas.append(eta)
        for c, sub in terms:
            term = fastpoly.product(f, [etas[t] for t in sub])
            total = fastpoly.add(f, total, (term * c) % q)
    return fastpoly.to_packed(f, fastpoly.trim(total), ctx.degree_bound + 1)


PROVER_METHODS = {"compose": _omega_compose, "interpolate": _omega_interpolate}


def omega_coefficients(
    stream: DataStream, params: ProtocolParams, spec: ProblemSpec, q: int, method: str = "compose"
) -> np.ndarray:
    return PROVER_METHODS[method](stream, params, spec, q)


def prover_build_proof(
    stream: DataStream, params: ProtocolParams, spec: ProblemSpec, method: str = "compose"
) -> ProofStream:
    _check_compatible(params, spec)
    if stream.m != params.m or stream.n != params.n:
        raise ValueError("stream does not match the protocol parameters")
    if method not in PROVER_METHODS:
        raise ValueError(f"unknown prover method {method!r}")
    sections = []
    for pp in params.primes:
        coeffs = omega_coefficients(stream, params, spec, pp.q, method)
        sections.append(ProofSection(pp.q, pp.lam, pp.irreducible, pp.degree_bound, coeffs))
    return ProofStream(ProofHeader.from_params(params), sections)


# -- verifier ------------------------------------------------------------------------


def padding_correction(params: ProtocolParams, spec: ProblemSpec) -> int:
    """Contribution of the s*w - n grid cells that carry no symbol."""
    return (params.s * params.w - params.n) * spec.empty_value(params.m)


def extract_result(domain_sums: dict[int, int], params: ProtocolParams, padding: int = 0) -> int:
    """CRT-lift the per-prime residues (minus the padding contribution)."""
    if sorted(domain_sums) != list(params.Q):
        raise ValueError("need exactly one residue per prime in Q")
    residues = [(domain_sums[q] - padding) % q for q in params.Q]
    return crt_reconstruct(residues, params.Q)


@functools.lru_cache(maxsize=64)
def _power_sums(field: ExtField, w: int) -> np.ndarray:
    """P_j = sum_{x in D_w} x^j for j < w (with 0^0 = 1)."""
    f = field
    xs = np.arange(w, dtype=np.int64)
    cur = np.ones(w, dtype=np.int64)
    out = np.zeros(w, dtype=np.int64)
    for j in range(w):
        out[j] = f.vsum(cur)
        cur = f.vmul(cur, xs)
    return out


@functools.lru_cache(maxsize=64)
def _vanishing_digits(field: ExtField, w: int) -> np.ndarray:
    return field.vdigits(np.array(vanishing_poly(field, range(w)), dtype=np.int64))


def _powers(field: ExtField, x: int, count: int) -> np.ndarray:
    """[x^0, ..., x^(count-1)] by repeated doubling of the known prefix."""
    out = np.ones(1, dtype=np.int64)
    step = x
    while len(out) < count:
        out = np.concatenate([out, field.vmul(out, step)])
        step = field.mul(step, step)
    return out[:count]


class ProofAccumulator:
    """Consumes the omega-hat coefficient stream block by block.

    Keeps omega-hat(xi) and the remainder R of omega-hat modulo
    Z(x) = prod_{a in D_w} (x - a), together with x^d mod Z for the current
    offset d.  Since omega-hat and R agree on D_w, the domain sum is
    sum_j R_j * P_j with the power sums P_j of D_w.  State is O(w) elements.
    """

    def __init__(self, field: ExtField, xi: int, w: int, block: int | None = None):
        self.field = field
        self.xi = xi
        self.w = w
        self.block = block or max(1024, 4 * w) // 8 * 8
        self.at_xi = 0
        self.degree = 0
        self._red = fastpoly.ModReducer(field, _vanishing_digits(field, w), w + self.block)
        self._xi_table = _powers(field, xi, self.block)
        self._xpow: dict[int, np.ndarray] = {}
        self._t = fastpoly.pad(fastpoly.const(field, 1), w)
        self._r = np.zeros((w, field.lam), dtype=np.int64)
        self._xi_pw = 1

    def block_size(self) -> int:
        return self.block

    def _x_to(self, e: int) -> np.ndarray:
        """x^e mod Z for 0 < e <= block."""
        r = self._xpow.get(e)
        if r is None:
            mono = np.zeros((e + 1, self.field.lam), dtype=np.int64)
            mono[e, 0] = 1
            r = self._xpow[e] = self._red.reduce(mono)
        return r

    def _eval_block(self, chunk: np.ndarray) -> int:
        f = self.field
        return f.vsum(f.vmul(chunk, self._xi_table[: len(chunk)]))

    def absorb(self, coeffs: np.ndarray) -> None:
        f, red = self.field, self._red
        for start in range(0, len(coeffs), self.block):
            chunk = np.asarray(coeffs[start : start + self.block], dtype=np.int64)
            n = len(chunk)
            if chunk.any():
                self.at_xi = f.add(self.at_xi, f.mul(self._xi_pw, self._eval_block(chunk)))
                part = red.reduce(fastpoly.mul(f, self._t, f.vdigits(chunk)))
                self._r = (self._r + fastpoly.pad(part, self.w)) % f.q
            self._xi_pw = f.mul(self._xi_pw, f.pow(self.xi, n))
            self._t = fastpoly.pad(red.reduce(fastpoly.mul(f, self._t, self._x_to(n))), self.w)
            self.degree += n

    @property
    def remainder(self) -> np.ndarray:
        return self.field.vpack(self._r)

    @property
    def domain(self) -> int:
        f = self.field
        return f.vsum(f.vmul(self.remainder, _power_sums(f, self.w)))


@dataclass
class VerifierReport:
    value: int | None
    reason: str | None
    live_elements: int
    proof_bits: int


class Verifier:
    """Single-pass verifier: read the proof, then feed the data stream."""

    def __init__(self, params: ProtocolParams, spec: ProblemSpec, rng: PrivateRandomness | None = None):
        _check_compatible(params, spec)
        self.params = params
        self.spec = spec
        self.reason: str | None = None
        self.proof_done = False
        self.proof_bits = 0
        self.xi: dict[int, int] = {}
        self.evaluators: dict[int, OmegaEvaluator] = {}
        self.claimed: dict[int, int] = {}
        self.domain: dict[int, int] = {}
        if rng is not None:
            for q in params.Q:
                f = prime_context(params, q).field
                self.xi[q] = rng.randbelow(f.order)
                self.evaluators[q] = OmegaEvaluator(params, spec, q, self.xi[q])

    @property
    def rejected(self) -> bool:
        return self.reason is not None

    @property
    def position(self) -> int:
        return next(iter(self.evaluators.values())).position

    @property
    def live_elements(self) -> int:
        return sum(ev.live_elements for ev in self.evaluators.values())

    def consume_proof(self, source) -> None:
        """Read the whole proof stream; raises ProofFormatError on bad framing."""
        if self.proof_done:
            raise RuntimeError("proof already consumed")
        reader = as_reader(source)
        self.proof_done = True
        if reader.header != ProofHeader.from_params(self.params):
            self.reason = "proof header does not match the public parameters"
            return
        for sec in reader.sections():
            pp = self.params.prime(sec.q)
            if (sec.lam, sec.irreducible, sec.degree_bound) != (pp.lam, pp.irreducible, pp.degree_bound):
                self.reason = f"section q={sec.q} disagrees with the derived field or degree"
                return
            acc = ProofAccumulator(sec.field, self.xi[sec.q], self.params.w)
            for block in sec.blocks(acc.block_size()):
                acc.absorb(block)
            self.claimed[sec.q] = acc.at_xi
            self.domain[sec.q] = acc.domain
            self.proof_bits += (sec.degree_bound + 1) * sec.field.bits
        reader.finish()

    def feed(self, symbol: int) -> None:
        for ev in self.evaluators.values():
            ev.feed(symbol)

    def feed_all(self, cursor: Iterable[int]) -> None:
        for a in cursor:
            self.feed(a)

    def finish(self) -> int | None:
        if self.reason is not None:
            return REJECT
        if not self.proof_done:
            raise RuntimeError("proof not consumed")
        for q in self.params.Q:
            if self.evaluators[q].value() != self.claimed[q]:
                self.reason = f"omega_{q}(xi) disagrees with the proof"
                return REJECT
            if self.domain[q] >= q:
                self.reason = f"domain sum for q={q} is not in the base field"
                return REJECT
        value = extract_result(self.domain, self.params, padding_correction(self.params, self.spec))
        if value >= 2 * self.params.n * self.params.B:
            self.reason = "reconstructed value out of range"
            return REJECT
        return value

    def report(self, value: int | None) -> VerifierReport:
        return VerifierReport(value, self.reason, self.live_elements, self.proof_bits)

    # -- snapshot ---------------------------------------------------------------

    def snapshot(self) -> bytes:
        """Serialise the complete mutable state (what the streaming memory holds)."""
        out = [struct.pack("<QBB", self.position, self.proof_done, self.reason is not None)]
        for q in self.params.Q:
            ev = self.evaluators[q]
            vals = [self.claimed.get(q, 0), self.domain.get(q, 0), *ev.state()]
            out.append(pack_elements(ev.field, np.array(vals, dtype=np.int64)))
        return b"".join(out)

    @classmethod
    def restore(cls, params: ProtocolParams, spec: ProblemSpec, blob: bytes) -> "Verifier":
        v = cls(params, spec)
        position, proof_done, rejected = struct.unpack_from("<QBB", blob)
        off = struct.calcsize("<QBB")
        v.proof_done = bool(proof_done)
        if rejected:
            v.reason = "rejected before the snapshot"
        n_state = params.k * params.L * (params.s + 1) + 3
        for q in params.Q:
            ctx = prime_context(params, q)
            nbytes = (n_state * ctx.field.bits + 7) // 8
            vals = unpack_elements(ctx.field, blob[off : off + nbytes], n_state).tolist()
            off += nbytes
            v.claimed[q], v.domain[q], xi = vals[:3]
            v.xi[q] = xi
            ev = OmegaEvaluator(params, spec, q, xi)
            ev.load_state(position, vals[3:])
            v.evaluators[q] = ev
        if off != len(blob):
            raise ValueError("snapshot length mismatch")
        return v


def verifier_run(
    cursor: Iterable[int],
    proof_source,
    params: ProtocolParams,
    spec: ProblemSpec,
    rng: PrivateRandomness,
) -> int | None:
    """Returns the verified value, or None (reject)."""
    v = Verifier(params, spec, rng)
    v.consume_proof(proof_source)
    if v.rejected:
        return REJECT
    v.feed_all(cursor)
    return v.finish()


__all__ = [
    "REJECT",
    "OmegaEvaluator",
    "PrivateRandomness",
    "ProofAccumulator",
    "ProofFormatError",
    "StreamLengthError",
    "Verifier",
    "extract_result",
    "omega_coefficients",
    "padding_correction",
    "prover_build_proof",
    "streaming_eval_omega",
    "verifier_run",
]
