"""Verifiable streaming computation: an AM protocol for sums of clause
functions over data streams, exact distinct elements, and an MA protocol for
Gap Hamming Distance."""

from .distinct import de_prove, de_spec, de_verify, f0_bruteforce
from .field import ExtElement, ExtField, get_field
from .params import ProtocolParams, derive_params
from .proof import ProofFormatError, ProofStream
from .protocol import PrivateRandomness, Verifier, prover_build_proof, streaming_eval_omega, verifier_run
from .stream import DataStream, ProblemSpec

__version__ = "0.1.0"

__all__ = [
    "DataStream",
    "ExtElement",
    "ExtField",
    "PrivateRandomness",
    "ProblemSpec",
    "ProofFormatError",
    "ProofStream",
    "ProtocolParams",
    "Verifier",
    "de_prove",
    "de_spec",
    "de_verify",
    "derive_params",
    "f0_bruteforce",
    "get_field",
    "prover_build_proof",
    "streaming_eval_omega",
    "verifier_run",
]
