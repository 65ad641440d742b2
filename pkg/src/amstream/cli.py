"""Command-line interface.

Output is line-oriented key=value.  Exit codes:

    0  success (verify: proof accepted, value on stdout)
    1  internal error
    2  usage error
    3  verifier rejected (bottom)
    4  malformed stream or proof file
    5  I/O error
"""

from __future__ import annotations

import argparse
import math
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .distinct import DE_SPEC, de_params, f0_bruteforce
from .ghd import (
    ADVERSARIES,
    GhdParameterError,
    choose_ghd_prime,
    ghd_decide,
    hamming,
    reduce_ghd_to_streams,
    run_ghd,
)
from .or_approx import or_failure_stats
from .params import ParameterError, repetition_count
from .proof import ProofFormatError, as_reader
from .protocol import (
    PrivateRandomness,
    StreamLengthError,
    TranscriptExhausted,
    Verifier,
    prover_build_proof,
)
from .stream import DataStream, StreamFormatError

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_REJECT = 3
EXIT_FORMAT = 4
EXIT_IO = 5

PROBLEMS = {"f0": DE_SPEC}


class UsageError(Exception):
    pass


def _emit(**kv) -> None:
    for k, v in kv.items():
        print(f"{k}={v}")


def _fraction(text: str) -> Fraction:
    try:
        if "/" in text:
            num, den = text.split("/")
            return Fraction(int(num), int(den))
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _hex(text: str) -> bytes:
    try:
        return bytes.fromhex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not hex: {text!r}") from exc


def _load_stream(path: str) -> DataStream:
    return DataStream.load(path)


def _private_rng(path: str | None) -> tuple[PrivateRandomness, bool]:
    """Replay the transcript if it exists, otherwise journal fresh coins to it."""
    if path and Path(path).exists():
        return PrivateRandomness.load(path), True
    return PrivateRandomness(), False


# -- commands ------------------------------------------------------------------------


def cmd_gen_stream(args) -> int:
    if args.m < 1 or args.n < 1:
        raise UsageError("m and n must be >= 1")
    rnd = random.Random(args.seed)
    if args.dist == "uniform":
        elems = [rnd.randint(1, args.n) for _ in range(args.m)]
    elif args.dist == "zipf":
        weights = [1 / j**args.skew for j in range(1, args.n + 1)]
        elems = rnd.choices(range(1, args.n + 1), weights=weights, k=args.m)
    else:
        elems = [rnd.randint(1, args.n)] * args.m
    stream = DataStream(args.n, tuple(elems))
    if args.out:
        stream.save(args.out)
        _emit(m=args.m, n=args.n, dist=args.dist, seed=args.seed, out=args.out)
    else:
        sys.stdout.write(stream.dumps())
    return EXIT_OK


def _params_from(args, m: int, n: int):
    return de_params(m, n, args.s, args.w, args.delta, args.seed)


def cmd_params(args) -> int:
    if args.stream:
        st = _load_stream(args.stream)
        m, n = st.m, st.n
    elif args.m and args.n:
        m, n = args.m, args.n
    else:
        raise UsageError("give --stream or both --m and --n")
    params = _params_from(args, m, n)
    print(params.to_text())
    bad = params.check()
    _emit(problem=args.problem, invariants="ok" if not bad else ";".join(bad))
    return EXIT_OK if not bad else EXIT_INTERNAL


def cmd_prove(args) -> int:
    st = _load_stream(args.stream)
    params = _params_from(args, st.m, st.n)
    proof = prover_build_proof(st, params, PROBLEMS[args.problem], args.method)
    data = proof.encode()
    Path(args.proof).write_bytes(data)
    _emit(
        problem=args.problem,
        m=st.m,
        n=st.n,
        s=args.s,
        w=args.w,
        delta=args.delta,
        seed=args.seed.hex(),
        p=params.p,
        Q=",".join(map(str, params.Q)),
        L=params.L,
        proof_bytes=len(data),
        proof=args.proof,
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    st = _load_stream(args.stream)
    rng, replayed = _private_rng(args.rand_transcript)
    with open(args.proof, "rb") as fh:
        reader = as_reader(fh)
        h = reader.header
        params = de_params(st.m, st.n, args.s or h.s, args.w or h.w, args.delta, args.seed)
        v = Verifier(params, PROBLEMS[args.problem], rng)
        v.consume_proof(reader)
    value = None
    if not v.rejected:
        v.feed_all(st.cursor())
        value = v.finish()
    if args.rand_transcript and not replayed:
        rng.save(args.rand_transcript)
    _emit(
        problem=args.problem,
        m=st.m,
        n=st.n,
        s=params.s,
        w=params.w,
        delta=args.delta,
        seed=args.seed.hex(),
        status="accept" if value is not None else "reject",
        result=value if value is not None else "bottom",
        reason=v.reason or "",
        live_stream_elements=v.live_elements,
        proof_bits=v.proof_bits,
        randomness=("replayed" if replayed else "fresh"),
    )
    return EXIT_OK if value is not None else EXIT_REJECT


def cmd_f0(args) -> int:
    st = _load_stream(args.stream)
    _emit(m=st.m, n=st.n, f0=f0_bruteforce(st))
    return EXIT_OK


def _pm1(text: str) -> list[int]:
    out = []
    for ch in text:
        if ch not in "+-10":
            raise UsageError("vectors are strings over '+'/'-' (or '1'/'0')")
        out.append(1 if ch in "+1" else -1)
    return out


def cmd_ghd_sim(args) -> int:
    n, T, W = args.n, args.T, args.W
    if args.trials < 1:
        raise UsageError("trials must be >= 1")
    rnd = random.Random(args.seed)
    rng = PrivateRandomness.from_seed(args.seed)
    accepted = wrong = 0
    max_proof = max_comm = 0
    q = choose_ghd_prime(n)
    for _ in range(args.trials):
        x = [rnd.choice((-1, 1)) for _ in range(n)]
        y = [rnd.choice((-1, 1)) for _ in range(n)]
        run = run_ghd(x, y, T, W, rng, args.adversary, rnd)
        accepted += run.accepted
        wrong += run.accepted and run.hd != run.true_hd
        max_proof = max(max_proof, run.transcript.proof_bits)
        max_comm = max(max_comm, run.transcript.comm_bits)
    rate = accepted / args.trials
    width = (q - 1).bit_length()
    _emit(
        n=n,
        T=T,
        W=W,
        q=q,
        adversary=args.adversary,
        trials=args.trials,
        seed=args.seed,
        accepted=accepted,
        acceptance_rate=f"{rate:.6f}",
        acceptance_stderr=f"{math.sqrt(rate * (1 - rate) / args.trials):.6f}",
        soundness_bound=f"{2 * (W - 1) / q:.6f}",
        hd_error_rate=f"{wrong / args.trials:.6f}",
        proof_bits=max_proof,
        proof_bits_bound=(2 * W - 1) * width,
        comm_bits=max_comm,
        comm_bits_expected=(T + 1) * width,
    )
    return EXIT_OK


def cmd_reduce(args) -> int:
    if args.x and args.y:
        x, y = _pm1(args.x), _pm1(args.y)
        if len(x) != len(y):
            raise UsageError("x and y differ in length")
    elif args.n:
        rnd = random.Random(args.seed)
        x = [rnd.choice((-1, 1)) for _ in range(args.n)]
        y = [rnd.choice((-1, 1)) for _ in range(args.n)]
    else:
        raise UsageError("give --x and --y, or --n")
    sa, sb = reduce_ghd_to_streams(x, y)
    sa.save(args.out_a)
    sb.save(args.out_b)
    n = len(x)
    d = f0_bruteforce(sa + sb)
    hd = hamming(x, y)
    _emit(n=n, f0=d, hd=d - n, hd_bruteforce=hd, decision=ghd_decide(hd, n), out_a=args.out_a, out_b=args.out_b)
    return EXIT_OK


def cmd_or_stats(args) -> int:
    L = args.L or repetition_count(1, Fraction(1, 3))
    st = or_failure_stats(args.q, args.m, L, args.trials, args.seed)
    _emit(**{k: (f"{v:.6f}" if isinstance(v, float) else v) for k, v in st.items()}, seed=args.seed)
    return EXIT_OK


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="amstream", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def protocol_flags(p, need_shape=True):
        p.add_argument("--s", type=int, required=need_shape, help="grid rows (symbols per column)")
        p.add_argument("--w", type=int, required=need_shape, help="grid columns")
        p.add_argument("--delta", type=_fraction, default=Fraction(1, 3), help="error bound NUM/DEN")
        p.add_argument("--seed", type=_hex, default=b"", help="shared random seed (hex)")
        p.add_argument("--problem", choices=sorted(PROBLEMS), default="f0")

    p = sub.add_parser("gen-stream", help="write a random stream file")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dist", choices=("uniform", "zipf", "constant"), default="uniform")
    p.add_argument("--skew", type=int, default=1, help="zipf exponent")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.set_defaults(func=cmd_gen_stream)

    p = sub.add_parser("params", help="derive and audit protocol parameters")
    p.add_argument("--stream")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    protocol_flags(p)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("prove", help="build a proof stream")
    p.add_argument("--stream", required=True)
    p.add_argument("--proof", required=True, help="output proof file")
    p.add_argument("--method", choices=("compose", "interpolate"), default="compose")
    protocol_flags(p)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("verify", help="verify a proof against a stream")
    p.add_argument("--stream", required=True)
    p.add_argument("--proof", required=True)
    p.add_argument("--rand-transcript", help="replay private coins from PATH, or record them there")
    protocol_flags(p, need_shape=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("f0", help="brute-force distinct-element count")
    p.add_argument("--stream", required=True)
    p.set_defaults(func=cmd_f0)

    p = sub.add_parser("ghd-sim", help="Monte-Carlo run of the Gap Hamming Distance protocol")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--W", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--adversary", choices=ADVERSARIES, default="honest")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ghd_sim)

    p = sub.add_parser("reduce-ghd", help="write the two streams of the GHD -> F0 reduction")
    p.add_argument("--x", help="Alice's vector as a +/- (or 1/0) string; use --x=... if it starts with '-'")
    p.add_argument("--y", help="Bob's vector, same format as --x")
    p.add_argument("--n", type=int, help="draw random vectors of this length")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-a", required=True)
    p.add_argument("--out-b", required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("or-stats", help="empirical failure rate of the OR approximation")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--L", type=int, default=0, help="repetitions (default: repetition_count(1, 1/3))")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_or_stats)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParameterError, GhdParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ProofFormatError, StreamFormatError, StreamLengthError, TranscriptExhausted) as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # stream symbols or parameters that fail validation deep inside
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except Exception as exc:  # pragma: no cover
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
