"""Dense univariate polynomials over GF(q^lam) with fast multiplication.

A polynomial of degree N-1 is an int64 array of shape (N, lam): row i holds
the base-q digits of the i-th coefficient.  Multiplication uses Kronecker
substitution: both the field variable X and the polynomial variable x are
mapped to powers of two, the resulting big integers are multiplied with GMP,
and the product is unpacked and reduced modulo q and the irreducible.
"""

from __future__ import annotations

import gmpy2
import numpy as np

from .field import ExtField


def zero(field: ExtField) -> np.ndarray:
    return np.zeros((1, field.lam), dtype=np.int64)


def const(field: ExtField, c: int) -> np.ndarray:
    return field.vdigits(np.array([c]))


def trim(a: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(a.any(axis=1))
    return a[: nz[-1] + 1] if nz.size else a[:1] * 0


def pad(a: np.ndarray, length: int) -> np.ndarray:
    """Zero-extend to exactly ``length`` rows (truncating zero rows if longer)."""
    if len(a) >= length:
        return a[:length]
    return np.vstack([a, np.zeros((length - len(a), a.shape[1]), dtype=np.int64)])


def is_zero(a: np.ndarray) -> bool:
    return not a.any()


def add(field: ExtField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if len(a) < len(b):
        a, b = b, a
    out = a.copy()
    out[: len(b)] += b
    return out % field.q


def sub(field: ExtField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = max(len(a), len(b))
    out = np.zeros((n, field.lam), dtype=np.int64)
    out[: len(a)] += a
    out[: len(b)] -= b
    return out % field.q


def one_minus(field: ExtField, a: np.ndarray) -> np.ndarray:
    out = (-a) % field.q
    out[0, 0] = (out[0, 0] + 1) % field.q
    return out


def _slot_dtype(field: ExtField, na: int, nb: int):
    bound = min(na, nb) * field.lam * (field.q - 1) ** 2
    return np.uint32 if bound < 1 << 32 else np.uint64


def _to_mpz(a: np.ndarray, slots: int, dtype) -> gmpy2.mpz:
    buf = np.zeros((len(a), slots), dtype=dtype)
    buf[:, : a.shape[1]] = a
    return gmpy2.mpz.from_bytes(buf.tobytes(), "little")


def _reduce(field: ExtField, raw: np.ndarray) -> np.ndarray:
    """Reduce rows of X-degree <= 2lam-2 modulo q and the irreducible."""
    q = field.q
    raw = raw % q
    if raw.shape[1] <= field.lam:
        return raw.astype(np.int64)
    return (raw.astype(np.int64) @ field.fold_matrix) % q


def mul(field: ExtField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of two digit-array polynomials."""
    if is_zero(a) or is_zero(b):
        return zero(field)
    lam = field.lam
    slots = 2 * lam - 1
    dtype = _slot_dtype(field, len(a), len(b))
    width = np.dtype(dtype).itemsize
    za = _to_mpz(a, slots, dtype)
    prod = za * za if a is b else za * _to_mpz(b, slots, dtype)
    n = len(a) + len(b) - 1
    raw = np.frombuffer(prod.to_bytes(n * slots * width, "little"), dtype=dtype)
    return trim(_reduce(field, raw.reshape(n, slots)))


def power(field: ExtField, a: np.ndarray, e: int) -> np.ndarray:
    result = const(field, 1)
    base = a
    while e:
        if e & 1:
            result = mul(field, result, base)
        e >>= 1
        if e:
            base = mul(field, base, base)
    return result


def product(field: ExtField, polys: list[np.ndarray]) -> np.ndarray:
    """Balanced product tree."""
    if not polys:
        return const(field, 1)
    polys = list(polys)
    while len(polys) > 1:
        nxt = [mul(field, polys[i], polys[i + 1]) for i in range(0, len(polys) - 1, 2)]
        if len(polys) % 2:
            nxt.append(polys[-1])
        polys = nxt
    return polys[0]


def to_packed(field: ExtField, a: np.ndarray, length: int | None = None) -> np.ndarray:
    """Packed coefficient vector, zero padded to ``length``."""
    packed = field.vpack(a)
    if length is not None:
        if len(packed) > length:
            if packed[length:].any():
                raise ValueError("polynomial exceeds requested length")
            packed = packed[:length]
        packed = np.concatenate([packed, np.zeros(length - len(packed), dtype=np.int64)])
    return packed


def series_inverse(field: ExtField, a: np.ndarray, n: int) -> np.ndarray:
    """b with a * b = 1 mod x^n, by Newton iteration; a[0] must be 1."""
    if not (a[0, 0] == 1 and not a[0, 1:].any()):
        raise ValueError("series_inverse needs constant term 1")
    b = const(field, 1)
    k = 1
    while k < n:
        k = min(2 * k, n)
        ab = mul(field, a[:k], b)[:k]
        # b <- b * (2 - a b)
        corr = (-ab) % field.q
        corr[0, 0] = (corr[0, 0] + 2) % field.q
        b = mul(field, b, corr)[:k]
    return b


class ModReducer:
    """Remainder modulo a fixed monic polynomial z, for inputs of bounded length.

    Uses the reversed-series (Barrett) quotient: rev(quo) = rev(a) * rev(z)^-1
    mod x^(len(a) - deg z).
    """

    def __init__(self, field: ExtField, z: np.ndarray, max_len: int):
        self.field = field
        self.z = trim(z)
        self.deg = len(self.z) - 1
        if not (self.z[-1, 0] == 1 and not self.z[-1, 1:].any()):
            raise ValueError("modulus must be monic")
        self.max_len = max_len
        span = max(1, max_len - self.deg)
        self._zinv = series_inverse(field, self.z[::-1], span)

    def reduce(self, a: np.ndarray) -> np.ndarray:
        f, dz = self.field, self.deg
        if len(a) <= dz:
            return a
        if len(a) > self.max_len:
            raise ValueError("input longer than the reducer was built for")
        span = len(a) - dz
        quo_rev = pad(mul(f, a[::-1][:span], self._zinv[:span])[:span], span)
        return pad(sub(f, a[:dz], mul(f, quo_rev[::-1], self.z)[:dz]), dz)
