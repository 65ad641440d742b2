"""Arithmetic in prime fields GF(q) and their extensions GF(q^lam).

An element of GF(q^lam) is stored as a *packed integer*: the coefficient
vector (c_0, ..., c_{lam-1}) of c_0 + c_1 X + ... + c_{lam-1} X^{lam-1}
read as a base-q number, c_0 least significant.  This makes the natural
enumeration order of the field (0, 1, ..., q-1, X, X+1, ...) coincide with
integer order, and it is also the wire encoding used by proof files.

Two arithmetic back ends exist:

* schoolbook digit arithmetic modulo the irreducible polynomial, always
  available and used as a reference, and
* discrete log / Zech log tables, built lazily for fields of order up to
  ``TABLE_LIMIT``.  Scalar operations become a couple of table lookups and
  the ``v*`` methods apply them to whole numpy arrays.

``ExtElement`` wraps a packed integer with operator overloading for callers
that prefer value semantics; hot loops work on packed ints directly.
"""

from __future__ import annotations

import functools
import math
from array import array
from typing import Iterable, Sequence

import numpy as np

TABLE_LIMIT = 1 << 23

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic primality test.

    Trial division below 2**32, Miller-Rabin with the first 13 prime bases
    (proven deterministic below 3.3e24), and a strong BPSW test above that.
    """
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13):
        if n % small == 0:
            return n == small
    if n < 1 << 32:
        return all(n % f for f in range(17, math.isqrt(n) + 1, 2))
    if n < 3317044064679887385961981:
        d, r = n - 1, 0
        while d % 2 == 0:
            d //= 2
            r += 1
        for a in _MR_BASES:
            x = pow(a, d, n)
            if x in (1, n - 1):
                continue
            for _ in range(r - 1):
                x = x * x % n
                if x == n - 1:
                    break
            else:
                return False
        return True
    import gmpy2

    return bool(gmpy2.is_strong_bpsw_prp(n))


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than ``n``."""
    c = max(n + 1, 2)
    while not is_prime(c):
        c += 1
    return c


def _factor(n: int) -> list[int]:
    """Distinct prime factors of n by trial division."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


# --- polynomials over GF(q) as coefficient lists, constant term first -------


def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: Sequence[int], m: Sequence[int], q: int) -> list[int]:
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], q - 2, q)
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] * inv_lead % q
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % q
    return _ptrim(a[:dm])


def _pmulmod(a: Sequence[int], b: Sequence[int], m: Sequence[int], q: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % q
    return _pmod(out, m, q)


def _pgcd(a: list[int], b: list[int], q: int) -> list[int]:
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pmod(a, b, q)
    return a


def _x_pow_qk(k: int, m: Sequence[int], q: int) -> list[int]:
    """X^(q^k) mod m, by k successive q-th powers."""
    r = [0, 1]
    for _ in range(k):
        base, acc, e = r, [1], q
        while e:
            if e & 1:
                acc = _pmulmod(acc, base, m, q)
            base = _pmulmod(base, base, m, q)
            e >>= 1
        r = acc
    return r


def is_irreducible(poly: Sequence[int], q: int) -> bool:
    """Rabin's irreducibility test for a monic polynomial over GF(q)."""
    lam = len(poly) - 1
    if lam < 1 or poly[-1] != 1:
        return False
    if lam == 1:
        return True
    if poly[0] == 0:
        return False
    x = [0, 1]
    if _ptrim(_sub(_x_pow_qk(lam, poly, q), x, q)):
        return False
    for r in _factor(lam):
        h = _sub(_x_pow_qk(lam // r, poly, q), x, q)
        if len(_pgcd(list(poly), h, q)) != 1:
            return False
    return True


def _sub(a: Sequence[int], b: Sequence[int], q: int) -> list[int]:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _ptrim([(x - y) % q for x, y in zip(a, b)])


@functools.lru_cache(maxsize=None)
def find_irreducible(q: int, lam: int) -> tuple[int, ...]:
    """First monic irreducible polynomial of degree ``lam`` over GF(q).

    Candidates are the low coefficients (c_0..c_{lam-1}) read as a base-q
    integer, c_0 least significant, scanned upward.  Returned constant term
    first, including the leading 1.
    """
    if not is_prime(q):
        raise ValueError(f"q={q} is not prime")
    if lam < 1:
        raise ValueError("extension degree must be >= 1")
    for v in range(q**lam):
        low = [(v // q**d) % q for d in range(lam)]
        cand = low + [1]
        if is_irreducible(cand, q):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class ExtField:
    """The field GF(q^lam) = GF(q)[X] / (irreducible)."""

    def __init__(self, q: int, lam: int, irreducible: Sequence[int] | None = None):
        if not is_prime(q):
            raise ValueError(f"q={q} is not prime")
        if lam < 1:
            raise ValueError("extension degree must be >= 1")
        if irreducible is None:
            irreducible = find_irreducible(q, lam)
        irreducible = tuple(int(c) for c in irreducible)
        if len(irreducible) != lam + 1 or not all(0 <= c < q for c in irreducible):
            raise ValueError("irreducible must have lam+1 coefficients in [0, q)")
        if not is_irreducible(irreducible, q):
            raise ValueError(f"{irreducible} is not a monic irreducible over GF({q})")
        self.q = q
        self.lam = lam
        self.irreducible = irreducible
        self.order = q**lam
        self.bits = (self.order - 1).bit_length()
        self._pows = [q**d for d in range(lam)]
        self._tables: tuple | None = None

    def __repr__(self) -> str:
        return f"ExtField(q={self.q}, lam={self.lam})"

    def __eq__(self, other) -> bool:
        return isinstance(other, ExtField) and (self.q, self.lam, self.irreducible) == (
            other.q,
            other.lam,
            other.irreducible,
        )

    def __hash__(self) -> int:
        return hash((self.q, self.lam, self.irreducible))

    # -- encoding -------------------------------------------------------------

    def digits(self, v: int) -> list[int]:
        q = self.q
        out = []
        for _ in range(self.lam):
            v, r = divmod(v, q)
            out.append(r)
        return out

    def pack(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) != self.lam or not all(0 <= c < self.q for c in coeffs):
            raise ValueError("need exactly lam residues in [0, q)")
        return sum(c * p for c, p in zip(coeffs, self._pows))

    def element(self, v: int | Sequence[int]) -> "ExtElement":
        if not isinstance(v, int):
            v = self.pack(v)
        if not 0 <= v < self.order:
            raise ValueError("packed value out of range")
        return ExtElement(self, v)

    def vdigits(self, a: np.ndarray) -> np.ndarray:
        """Packed array of shape S -> digit array of shape S + (lam,)."""
        a = np.asarray(a, dtype=np.int64)
        out = np.empty(a.shape + (self.lam,), dtype=np.int64)
        rest = a.copy()
        for d in range(self.lam):
            rest, out[..., d] = np.divmod(rest, self.q)
        return out

    def vpack(self, digits: np.ndarray) -> np.ndarray:
        return np.asarray(digits, dtype=np.int64) @ np.array(self._pows, dtype=np.int64)

    # -- schoolbook arithmetic (reference path) --------------------------------

    def add_school(self, a: int, b: int) -> int:
        q = self.q
        return self.pack([(x + y) % q for x, y in zip(self.digits(a), self.digits(b))])

    def mul_school(self, a: int, b: int) -> int:
        r = _pmulmod(_ptrim(self.digits(a)), _ptrim(self.digits(b)), self.irreducible, self.q)
        return self.pack(r + [0] * (self.lam - len(r)))

    def pow_school(self, a: int, e: int) -> int:
        acc = 1
        while e:
            if e & 1:
                acc = self.mul_school(acc, a)
            a = self.mul_school(a, a)
            e >>= 1
        return acc

    # -- log tables --------------------------------------------------------------

    @property
    def tabled(self) -> bool:
        return self.order <= TABLE_LIMIT

    def _const_matrix(self, c: int) -> np.ndarray:
        # row j holds the digits of c * X^j: multiplication by c as a linear map
        return np.array([self.digits(self.mul_school(c, p)) for p in self._pows], dtype=np.int64)

    def _build_tables(self):
        n = self.order
        m = n - 1
        if m == 1:
            gen = 1
        else:
            factors = _factor(m)
            gen = next(
                g
                for g in range(2, n)
                if all(self.pow_school(g, m // r) != 1 for r in factors)
            )
        exp = np.empty(m, dtype=np.int64)
        exp[0] = 1
        size = 1
        while size < m:
            block = min(size, m - size)
            mat = self._const_matrix(self.pow_school(gen, size))
            exp[size : size + block] = self.vpack(self.vdigits(exp[:block]) @ mat % self.q)
            size += block
        log = np.full(n, -1, dtype=np.int64)
        log[exp] = np.arange(m, dtype=np.int64)
        # Zech logarithm: log(1 + g^k); -1 marks 1 + g^k == 0
        d0 = exp % self.q
        zech = log[exp - d0 + (d0 + 1) % self.q]
        exp_a = array("i", exp.astype(np.int32).tobytes())
        log_a = array("i", log.astype(np.int32).tobytes())
        zech_a = array("i", zech.astype(np.int32).tobytes())
        self._tables = (
            exp_a,
            log_a,
            zech_a,
            np.frombuffer(exp_a, dtype=np.int32),
            np.frombuffer(log_a, dtype=np.int32),
            np.frombuffer(zech_a, dtype=np.int32),
        )
        self.generator = gen

    def _t(self):
        if self._tables is None:
            if not self.tabled:
                raise RuntimeError(f"{self!r} is too large for log tables")
            self._build_tables()
        return self._tables

    # -- scalar arithmetic on packed ints -----------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.q == 2:
            return a ^ b
        if not self.tabled:
            return self.add_school(a, b)
        if not a:
            return b
        if not b:
            return a
        exp, log, zech = self._t()[:3]
        m = self.order - 1
        la = log[a]
        z = zech[(log[b] - la) % m]
        if z < 0:
            return 0
        return exp[(la + z) % m]

    def neg(self, a: int) -> int:
        if self.q == 2 or not a:
            return a
        if not self.tabled:
            return self.pack([(-c) % self.q for c in self.digits(a)])
        exp, log = self._t()[:2]
        m = self.order - 1
        return exp[(log[a] + m // 2) % m]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if not a or not b:
            return 0
        if not self.tabled:
            return self.mul_school(a, b)
        exp, log = self._t()[:2]
        return exp[(log[a] + log[b]) % (self.order - 1)]

    def inv(self, a: int) -> int:
        if not a:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        if not self.tabled:
            return self.pow_school(a, self.order - 2)
        exp, log = self._t()[:2]
        return exp[(-log[a]) % (self.order - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        """a**e with 0**0 == 1."""
        if e < 0:
            raise ValueError("negative exponent")
        if e == 0:
            return 1
        if not a:
            return 0
        if not self.tabled:
            return self.pow_school(a, e)
        exp, log = self._t()[:2]
        m = self.order - 1
        return exp[log[a] * e % m]

    def log(self, a: int) -> int:
        return self._t()[1][a]

    @property
    def exp_table(self) -> np.ndarray:
        """exp_table[k] = g**k as packed ints, k in [0, order - 1)."""
        return self._t()[3]

    @property
    def log_table(self) -> np.ndarray:
        """log_table[a] = log_g(a); -1 at a = 0."""
        return self._t()[4]

    @functools.cached_property
    def exp_digits(self) -> np.ndarray:
        """Digits of every power of g, shape (order - 1, lam), uint8 when q < 256."""
        dt = np.uint8 if self.q < 256 else np.int64
        return self.vdigits(self.exp_table).astype(dt)

    # -- vectorised arithmetic on int64 arrays of packed values --------------------

    def vadd(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.q == 2:
            return a ^ b
        if not self.tabled:
            return self.vpack((self.vdigits(a) + self.vdigits(b)) % self.q)
        exp, log, zech = self._t()[3:]
        m = self.order - 1
        a, b = np.broadcast_arrays(a, b)
        la = log[a].astype(np.int64)
        z = zech[(log[b].astype(np.int64) - la) % m].astype(np.int64)
        out = exp[(la + z) % m].astype(np.int64)
        out[z < 0] = 0
        out = np.where(a == 0, b, np.where(b == 0, a, out))
        return out

    def vneg(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.q == 2:
            return a
        return self.vpack((-self.vdigits(a)) % self.q)

    def vsub(self, a, b) -> np.ndarray:
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        if not self.tabled:
            return self.vpack(self.vmul_digits(self.vdigits(a), self.vdigits(b)))
        exp, log = self._t()[3:5]
        m = self.order - 1
        out = exp[(log[a].astype(np.int64) + log[b]) % m].astype(np.int64)
        out[(a == 0) | (b == 0)] = 0
        return out

    @functools.cached_property
    def fold_matrix(self) -> np.ndarray:
        """Row d holds the digits of X^d mod the irreducible, d < 2lam - 1."""
        q, lam = self.q, self.lam
        low = np.array(self.irreducible[:lam], dtype=np.int64)
        rows = np.zeros((2 * lam - 1, lam), dtype=np.int64)
        cur = np.zeros(lam, dtype=np.int64)
        cur[0] = 1
        for d in range(2 * lam - 1):
            rows[d] = cur
            # multiply by X: shift up, fold the overflow with X^lam = -low
            top = cur[-1]
            cur = np.concatenate([[0], cur[:-1]])
            cur = (cur - top * low) % q
        return rows

    def vmul_digits(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise product of digit arrays (shape S + (lam,)), table free."""
        lam, q = self.lam, self.q
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        raw = np.zeros(a.shape[:-1] + (2 * lam - 1,), dtype=np.int64)
        for i in range(lam):
            raw[..., i : i + lam] += a[..., i : i + 1] * b
        return (raw % q) @ self.fold_matrix % q

    def vinv(self, a) -> np.ndarray:
        """Elementwise inverse; raises on a zero entry."""
        a = np.asarray(a, dtype=np.int64)
        if (a == 0).any():
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        if self.tabled:
            exp, log = self._t()[3:5]
            return exp[(-log[a].astype(np.int64)) % (self.order - 1)].astype(np.int64)
        # a^(order - 2) by square and multiply, all entries at once
        e = self.order - 2
        out = np.ones_like(a)
        base = a
        while e:
            if e & 1:
                out = self.vmul(out, base)
            base = self.vmul(base, base)
            e >>= 1
        return out

    def vpow_log(self, log_base: int, exponents: np.ndarray) -> np.ndarray:
        """g^(log_base * e) for an array of exponents e (base must be nonzero)."""
        exp = self._t()[3]
        e = np.asarray(exponents, dtype=np.int64)
        return exp[(e * log_base) % (self.order - 1)].astype(np.int64)

    def vsum(self, a, axis=None):
        """Field sum over one axis (all elements when axis is None)."""
        a = np.asarray(a, dtype=np.int64)
        if axis is None:
            a, axis = a.ravel(), 0
        axis %= a.ndim
        if self.q == 2:
            out = np.bitwise_xor.reduce(a, axis=axis)
        else:
            out = self.vpack(self.vdigits(a).sum(axis=axis) % self.q)
        return int(out) if np.ndim(out) == 0 else out


@functools.lru_cache(maxsize=24)
def get_field(q: int, lam: int) -> ExtField:
    """Shared field instance; tables are built once per (q, lam)."""
    return ExtField(q, lam)


class ExtElement:
    """Immutable element of an ``ExtField`` with operator overloading."""

    __slots__ = ("field", "value")

    def __init__(self, field: ExtField, value: int):
        self.field = field
        self.value = value

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(self.field.digits(self.value))

    def _coerce(self, other) -> int:
        if isinstance(other, ExtElement):
            if other.field != self.field:
                raise ValueError("field mismatch")
            return other.value
        if isinstance(other, int):
            # base-field residue embedded as a constant polynomial
            return other % self.field.q
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ExtElement(self.field, self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ExtElement(self.field, self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ExtElement(self.field, self.field.sub(o, self.value))

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ExtElement(self.field, self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __neg__(self):
        return ExtElement(self.field, self.field.neg(self.value))

    def __truediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ExtElement(self.field, self.field.div(self.value, o))

    def __pow__(self, e: int):
        return ExtElement(self.field, self.field.pow(self.value, e))

    def inverse(self) -> "ExtElement":
        return ExtElement(self.field, self.field.inv(self.value))

    def __eq__(self, other) -> bool:
        if isinstance(other, ExtElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.q
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field, self.value))

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        terms = [
            (str(c) if d == 0 else ("" if c == 1 else str(c)) + ("X" if d == 1 else f"X^{d}"))
            for d, c in reversed(list(enumerate(self.coeffs)))
            if c
        ]
        return " + ".join(terms) or "0"


# Free-function forms of the ring operations.


def ext_add(a: ExtElement, b: ExtElement) -> ExtElement:
    return a + b


def ext_sub(a: ExtElement, b: ExtElement) -> ExtElement:
    return a - b


def ext_mul(a: ExtElement, b: ExtElement) -> ExtElement:
    return a * b


def ext_neg(a: ExtElement) -> ExtElement:
    return -a


def ext_inv(a: ExtElement) -> ExtElement:
    return a.inverse()


def ext_pow(a: ExtElement, e: int) -> ExtElement:
    return a**e


def enumerate_field(field: ExtField, count: int) -> list[ExtElement]:
    """First ``count`` elements of the field in packed-integer order."""
    if count < 0 or count > field.order:
        raise ValueError(f"cannot enumerate {count} elements of a field of order {field.order}")
    return [ExtElement(field, v) for v in range(count)]


# --- univariate polynomials over a field, coefficient lists lowest degree first ---


def _vals(field: ExtField, seq) -> list[int]:
    return [x.value if isinstance(x, ExtElement) else int(x) for x in seq]


def poly_eval(coeffs: Sequence, x) -> ExtElement:
    """Horner evaluation of a nonempty coefficient sequence at x."""
    if not len(coeffs):
        raise ValueError("empty polynomial")
    field = x.field
    xv = x.value
    acc = 0
    for c in reversed(_vals(field, coeffs)):
        acc = field.add(field.mul(acc, xv), c)
    return ExtElement(field, acc)


class PolyEvaluator:
    """Incremental evaluation at a fixed point, coefficients lowest degree first.

    Holds two field elements (running power and running sum) regardless of the
    polynomial's length.
    """

    def __init__(self, x: ExtElement):
        self.field = x.field
        self.x = x.value
        self.power = 1
        self.total = 0
        self.count = 0

    def feed(self, c) -> None:
        f = self.field
        c = c.value if isinstance(c, ExtElement) else int(c)
        self.total = f.add(self.total, f.mul(c, self.power))
        self.power = f.mul(self.power, self.x)
        self.count += 1

    @property
    def value(self) -> ExtElement:
        return ExtElement(self.field, self.total)


def _synthetic_div(field: ExtField, coeffs: list[int], root: int) -> list[int]:
    """coeffs / (X - root) for a polynomial known to vanish at root."""
    n = len(coeffs) - 1
    out = [0] * n
    carry = 0
    for i in range(n, 0, -1):
        carry = field.add(coeffs[i], field.mul(carry, root))
        out[i - 1] = carry
    return out


def vanishing_poly(field: ExtField, roots: Iterable[int]) -> list[int]:
    """Coefficients of prod (X - r), packed ints, lowest degree first."""
    poly = np.ones(1, dtype=np.int64)
    for r in roots:
        nxt = np.zeros(len(poly) + 1, dtype=np.int64)
        nxt[1:] = poly
        nxt[:-1] = field.vadd(nxt[:-1], field.vmul(poly, field.neg(r)))
        poly = nxt
    return [int(c) for c in poly]


def lagrange_interpolate_packed(field: ExtField, xs: Sequence[int], ys: Sequence[int]) -> list[int]:
    """Interpolate on packed ints; returns len(xs) coefficients."""
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation points must have distinct x")
    n = len(xs)
    if n == 0:
        raise ValueError("need at least one point")
    z = vanishing_poly(field, xs)
    acc = np.zeros(n, dtype=np.int64)
    for xi, yi in zip(xs, ys):
        if not yi:
            continue
        numer = _synthetic_div(field, z, xi)
        denom = 0
        for c in reversed(numer):
            denom = field.add(field.mul(denom, xi), c)
        scale = field.div(yi, denom)
        acc = field.vadd(acc, field.vmul(np.array(numer, dtype=np.int64), scale))
    return [int(v) for v in acc]


def lagrange_interpolate(points: Sequence[tuple[ExtElement, ExtElement]]) -> list[ExtElement]:
    """Unique polynomial of degree < len(points) through the given points."""
    if not points:
        raise ValueError("need at least one point")
    field = points[0][0].field
    xs = [p[0].value for p in points]
    ys = [p[1].value for p in points]
    return [ExtElement(field, v) for v in lagrange_interpolate_packed(field, xs, ys)]


def element_bits(field: ExtField) -> int:
    """Serialized width of one element: ceil(lam * log2 q) bits."""
    return field.bits


def pack_elements(field: ExtField, values: np.ndarray) -> bytes:
    """Little-endian bit packing, ``field.bits`` bits per element, zero padded."""
    values = np.asarray(values, dtype=np.uint64)
    b = field.bits
    if b == 0:
        return b""
    shifts = np.arange(b, dtype=np.uint64)
    bits = ((values[:, None] >> shifts) & np.uint64(1)).astype(np.uint8)
    return np.packbits(bits.ravel(), bitorder="little").tobytes()


def unpack_elements(field: ExtField, data: bytes, count: int) -> np.ndarray:
    """Inverse of ``pack_elements``; raises ValueError on out-of-range or dirty padding."""
    b = field.bits
    need = (count * b + 7) // 8
    if len(data) != need:
        raise ValueError(f"expected {need} bytes, got {len(data)}")
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    if bits[count * b :].any():
        raise ValueError("nonzero padding bits")
    bits = bits[: count * b].reshape(count, b).astype(np.int64)
    values = bits @ (np.int64(1) << np.arange(b, dtype=np.int64))
    if count and values.max() >= field.order:
        raise ValueError("encoded element out of field range")
    return values
