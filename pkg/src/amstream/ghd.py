"""MA communication protocol for Gap Hamming Distance, and the reduction to F0.

Alice holds a, Bob holds b, both in {-1, +1}^n.  Each input is tiled into a
W x T grid f(x, y) = a_{(x-1)T + y} and extended to a polynomial over F_q of
degree < W in x and < T in y.  Merlin sends

    s(x) = sum_{y in [T]} fa(x, y) * fb(x, y)            (degree <= 2(W-1))

Bob sends a random r and the column fb(r, 1..T); Alice checks s(r) against
her own side and reads the inner product off sum_{x in [W]} s(x).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .distinct import DE_SPEC, de_params
from .field import get_field, is_prime, lagrange_interpolate_packed
from .protocol import PrivateRandomness, Verifier, prover_build_proof
from .stream import DataStream

OFF_PROMISE = "off-promise"
SENDERS = ("Merlin", "Bob", "Alice")
ADVERSARIES = ("honest", "shift", "xpow", "random")


class GhdParameterError(ValueError):
    pass


class GhdProtocolError(ValueError):
    """A message that violates the protocol format (not a soundness rejection)."""


def choose_ghd_prime(n: int) -> int:
    """Smallest prime >= 6n."""
    if n < 1:
        raise GhdParameterError("n must be >= 1")
    q = 6 * n
    while not is_prime(q):
        q += 1
    return q


def element_bits(q: int) -> int:
    """ceil(log2 q): bits per F_q element on the wire."""
    return (q - 1).bit_length()


# -- transcript ----------------------------------------------------------------------


@dataclass
class Message:
    sender: str
    label: str
    payload: bytes
    bits: int

    @property
    def padding(self) -> int:
        return 8 * len(self.payload) - self.bits


@dataclass
class Transcript:
    q: int
    messages: list[Message] = field(default_factory=list)

    def send(self, sender: str, label: str, values: Sequence[int]) -> Message:
        if sender not in SENDERS:
            raise ValueError(f"unknown sender {sender!r}")
        merlin_spoke = any(m.sender == "Merlin" for m in self.messages)
        if sender == "Merlin" and merlin_spoke:
            raise GhdProtocolError("Merlin speaks once")
        if sender != "Merlin" and not merlin_spoke:
            raise GhdProtocolError("Merlin speaks first")
        width = element_bits(self.q)
        vals = np.array([int(v) for v in values], dtype=np.int64)
        if vals.size and (vals.min() < 0 or vals.max() >= self.q):
            raise ValueError("message values must lie in F_q")
        payload = _pack_bits(vals, width)
        msg = Message(sender, label, payload, len(vals) * width)
        self.messages.append(msg)
        return msg

    @property
    def proof_bits(self) -> int:
        return sum(m.bits for m in self.messages if m.sender == "Merlin")

    @property
    def comm_bits(self) -> int:
        return sum(m.bits for m in self.messages if m.sender != "Merlin")


def _pack_bits(vals: np.ndarray, width: int) -> bytes:
    if not vals.size:
        return b""
    bits = ((vals[:, None] >> np.arange(width)) & 1).astype(np.uint8).ravel()
    return np.packbits(bits, bitorder="little").tobytes()


# -- tiled inputs ------------------------------------------------------------------


def _check_pm1(v: Sequence[int]) -> None:
    if any(e not in (-1, 1) for e in v):
        raise ValueError("entries must be -1 or +1")


def _lagrange_row(q: int, nodes: int, r: int) -> list[int]:
    """[L_1(r), ..., L_nodes(r)] for the Lagrange basis on {1..nodes} over F_q."""
    out = []
    for i in range(1, nodes + 1):
        num = den = 1
        for j in range(1, nodes + 1):
            if j != i:
                num = num * (r - j) % q
                den = den * (i - j) % q
        out.append(num * pow(den, -1, q) % q)
    return out


class TiledFunction:
    """f(x, y) = a_{(x-1)T + y} on [W] x [T], padded with +1 past n, over F_q."""

    def __init__(self, values: Sequence[int], T: int, W: int, q: int):
        _check_pm1(values)
        if T * W < len(values):
            raise GhdParameterError("T*W must be >= n")
        if max(T, W) >= q:
            raise GhdParameterError("grid does not fit in F_q")
        self.n = len(values)
        self.T, self.W, self.q = T, W, q
        padded = list(values) + [1] * (T * W - self.n)
        self.grid = np.array(padded, dtype=np.int64).reshape(W, T) % q

    def raw(self, x: int, y: int) -> int:
        """f at integer grid point (x, y), 1-based."""
        return int(self.grid[x - 1, y - 1])

    def column(self, r: int) -> list[int]:
        """f~(r, y) for y = 1..T."""
        lx = np.array(_lagrange_row(self.q, self.W, r % self.q), dtype=np.int64)
        return [int(v) for v in (lx @ self.grid) % self.q]

    def eval(self, x: int, y: int) -> int:
        ly = np.array(_lagrange_row(self.q, self.T, y % self.q), dtype=np.int64)
        return int(np.array(self.column(x), dtype=np.int64) @ ly % self.q)


# -- protocol parties ----------------------------------------------------------------


def _check_lift(T: int, W: int, q: int) -> None:
    if 2 * T * W >= q:
        raise GhdParameterError(f"T*W = {T * W} must be < q/2 = {q / 2} for the signed lift")


def _peval(coeffs: Sequence[int], x: int, q: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % q
    return acc


def merlin_compute_s(x: Sequence[int], y: Sequence[int], T: int, W: int, q: int) -> list[int]:
    """Coefficients (lowest first, length 2W - 1) of s(X) = sum_y fa(X, y) fb(X, y)."""
    fa, fb = TiledFunction(x, T, W, q), TiledFunction(y, T, W, q)
    pts = list(range(1, 2 * W))
    vals = [sum(u * v for u, v in zip(fa.column(r), fb.column(r))) % q for r in pts]
    coeffs = lagrange_interpolate_packed(get_field(q, 1), pts, vals)
    return list(coeffs) + [0] * (2 * W - 1 - len(coeffs))


def bob_message(tiling: TiledFunction, rng: PrivateRandomness) -> tuple[int, list[int]]:
    r = rng.randbelow(tiling.q)
    return r, tiling.column(r)


def alice_check(
    tiling: TiledFunction, s_claim: Sequence[int], r: int, bob_evals: Sequence[int]
) -> int | None:
    """Hamming distance, or None if Merlin's polynomial fails the check at r."""
    q, T, W, n = tiling.q, tiling.T, tiling.W, tiling.n
    _check_lift(T, W, q)
    if len(s_claim) > 2 * W - 1:
        raise GhdProtocolError("Merlin's polynomial exceeds degree 2(W-1)")
    if len(bob_evals) != T:
        raise GhdProtocolError("Bob must send exactly T evaluations")
    s_r = sum(u * v for u, v in zip(tiling.column(r), bob_evals)) % q
    if s_r != _peval(s_claim, r, q):
        return None
    total = sum(_peval(s_claim, x, q) for x in range(1, W + 1)) % q
    lifted = total - q if total > q // 2 else total
    inner = lifted - (T * W - n)
    # a claimed sum of the wrong parity or range cannot come from an honest s
    if (n - inner) % 2:
        return None
    hd = (n - inner) // 2
    if not 0 <= hd <= n:
        return None
    return hd


def ghd_decide(hd: int, n: int):
    """1 if <x,y> > sqrt(n), 0 if < -sqrt(n), OFF_PROMISE otherwise."""
    if not 0 <= hd <= n:
        raise ValueError("hd outside [0, n]")
    inner = n - 2 * hd
    if inner * inner > n:
        return 1 if inner > 0 else 0
    return OFF_PROMISE


def hamming(x: Sequence[int], y: Sequence[int]) -> int:
    return sum(a != b for a, b in zip(x, y))


def adversary_polynomial(kind: str, honest: list[int], q: int, rnd: random.Random) -> list[int]:
    s = list(honest)
    if kind == "honest":
        return s
    if kind == "shift":
        s[0] = (s[0] + 1) % q
        return s
    if kind == "xpow":
        s[-1] = (s[-1] + 1) % q
        return s
    if kind == "random":
        while True:
            cand = [rnd.randrange(q) for _ in s]
            if cand != s:
                return cand
    raise ValueError(f"unknown adversary {kind!r}")


@dataclass
class GhdRun:
    n: int
    T: int
    W: int
    q: int
    hd: int | None
    true_hd: int
    transcript: Transcript

    @property
    def accepted(self) -> bool:
        return self.hd is not None


def run_ghd(
    x: Sequence[int],
    y: Sequence[int],
    T: int,
    W: int,
    rng: PrivateRandomness,
    adversary: str = "honest",
    adv_rng: random.Random | None = None,
) -> GhdRun:
    n = len(x)
    if len(y) != n:
        raise ValueError("inputs differ in length")
    q = choose_ghd_prime(n)
    _check_lift(T, W, q)
    tr = Transcript(q)
    honest = merlin_compute_s(x, y, T, W, q)
    s_claim = adversary_polynomial(adversary, honest, q, adv_rng or random.Random(0))
    tr.send("Merlin", "s", s_claim)
    fa, fb = TiledFunction(x, T, W, q), TiledFunction(y, T, W, q)
    r, evals = bob_message(fb, rng)
    tr.send("Bob", "r+column", [r, *evals])
    hd = alice_check(fa, s_claim, r, evals)
    return GhdRun(n, T, W, q, hd, hamming(x, y), tr)


# -- reduction to distinct elements --------------------------------------------------


def ghd_symbol(i: int, b: int) -> int:
    """(i, b) -> 2(i-1) + [b = +1] + 1 in [1, 2n]."""
    return 2 * (i - 1) + (b == 1) + 1


def reduce_ghd_to_streams(x: Sequence[int], y: Sequence[int]) -> tuple[DataStream, DataStream]:
    _check_pm1(x)
    _check_pm1(y)
    if len(x) != len(y):
        raise ValueError("inputs differ in length")
    n = len(x)
    sa = DataStream(2 * n, tuple(ghd_symbol(i, b) for i, b in enumerate(x, start=1)))
    sb = DataStream(2 * n, tuple(ghd_symbol(i, b) for i, b in enumerate(y, start=1)))
    return sa, sb


def hd_from_f0(d: int, n: int) -> int:
    return d - n


@dataclass
class SplitResult:
    answer: int | None
    monolithic: int | None
    snapshot_bits: int


def simulate_streaming_as_communication(
    sa: DataStream,
    sb: DataStream,
    s: int,
    w: int,
    delta=Fraction(1, 3),
    seed: bytes = b"",
    coins: bytes | None = None,
) -> SplitResult:
    """Run the F0 verifier on sa, ship its memory to Bob, finish on sb.

    Merlin's proof is for the concatenation.  ``coins`` pins the verifier's
    private randomness; the same coins drive a monolithic run for comparison.
    """
    whole = sa + sb
    params = de_params(whole.m, whole.n, s, w, delta, seed)
    proof = prover_build_proof(whole, params, DE_SPEC).encode()
    rng = PrivateRandomness() if coins is None else PrivateRandomness.replay(coins)
    alice = Verifier(params, DE_SPEC, rng)
    alice.consume_proof(proof)
    alice.feed_all(sa.cursor())
    blob = alice.snapshot()
    bob = Verifier.restore(params, DE_SPEC, blob)
    bob.feed_all(sb.cursor())
    answer = bob.finish()

    mono = Verifier(params, DE_SPEC, PrivateRandomness.replay(bytes(rng.journal)))
    mono.consume_proof(proof)
    mono.feed_all(whole.cursor())
    return SplitResult(answer, mono.finish(), 8 * len(blob))


__all__ = [
    "ADVERSARIES",
    "OFF_PROMISE",
    "GhdRun",
    "Message",
    "SplitResult",
    "TiledFunction",
    "Transcript",
    "alice_check",
    "bob_message",
    "choose_ghd_prime",
    "ghd_decide",
    "ghd_symbol",
    "hamming",
    "hd_from_f0",
    "merlin_compute_s",
    "reduce_ghd_to_streams",
    "run_ghd",
    "simulate_streaming_as_communication",
]
