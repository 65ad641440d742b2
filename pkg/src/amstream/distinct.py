"""Exact Distinct Elements (F0) through the AM protocol.

F0 is the sum over symbols j of OR_i chi_i(j): a single clause whose
literals are all plain variables, with psi the identity.
"""

from __future__ import annotations

from fractions import Fraction

from .params import ProtocolParams, derive_params
from .proof import ProofStream, as_reader
from .protocol import PrivateRandomness, Verifier, prover_build_proof
from .stream import DataStream, Literal, ProblemSpec, SparseMultilinear

DE_B = 2


def _all_var(t: int, i: int) -> Literal:
    return Literal.VAR


DE_SPEC = ProblemSpec(k=1, psi=SparseMultilinear(((1, {0}),)), B=DE_B, epsilon=0, rule=_all_var, name="f0")


def de_spec() -> ProblemSpec:
    return DE_SPEC


def f0_bruteforce(stream: DataStream) -> int:
    return len(set(stream.elements))


def de_params(m: int, n: int, s: int, w: int, delta=Fraction(1, 3), seed: bytes = b"") -> ProtocolParams:
    return derive_params(m, n, s, w, 1, DE_B, 0, delta, seed)


def de_prove(
    stream: DataStream, s: int, w: int, delta=Fraction(1, 3), seed: bytes = b"", method: str = "compose"
) -> ProofStream:
    params = de_params(stream.m, stream.n, s, w, delta, seed)
    return prover_build_proof(stream, params, DE_SPEC, method)


def de_verify(
    stream: DataStream,
    proof,
    delta=Fraction(1, 3),
    seed: bytes = b"",
    rng: PrivateRandomness | None = None,
    s: int | None = None,
    w: int | None = None,
) -> int | None:
    """Verified F0, or None on rejection.

    The grid shape (s, w) is the prover's choice and is read from the proof
    header unless given; delta and the shared seed are the verifier's own.
    """
    reader = as_reader(proof)
    h = reader.header
    params = de_params(stream.m, stream.n, s or h.s, w or h.w, delta, seed)
    v = Verifier(params, DE_SPEC, rng or PrivateRandomness())
    v.consume_proof(reader)
    if v.rejected:
        return None
    v.feed_all(stream.cursor())
    return v.finish()
