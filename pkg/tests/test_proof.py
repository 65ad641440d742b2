import io
import struct

import numpy as np
import pytest

from amstream.distinct import de_params, de_prove
from amstream.field import get_field
from amstream.proof import MAGIC, ProofFormatError, ProofHeader, ProofReader, ProofSection, ProofStream, as_reader
from amstream.stream import DataStream

SIGMA = DataStream(6, (1, 2, 2, 3, 6, 1))


@pytest.fixture(scope="module")
def proof():
    return de_prove(SIGMA, 2, 3, seed=b"\x07\x08")


def test_round_trip(proof):
    data = proof.encode()
    back = ProofStream.decode(data)
    assert back.header == proof.header
    assert [s.q for s in back.sections] == [s.q for s in proof.sections]
    for a, b in zip(proof.sections, back.sections):
        assert (a.lam, a.irreducible, a.degree_bound) == (b.lam, b.irreducible, b.degree_bound)
        assert np.array_equal(a.coeffs, b.coeffs)
    assert back.encode() == data


def test_header_layout(proof):
    data = proof.encode()
    assert data[:5] == MAGIC == b"AMSP1"
    fields = struct.unpack_from("<11Q", data, 5)
    params = de_params(6, 6, 2, 3, seed=b"\x07\x08")
    assert fields == (6, 6, 2, 3, 1, 2, 0, 1, 1, 3, params.p)
    assert struct.unpack_from("<Q", data, 5 + 88) == (2,)
    assert data[5 + 96 : 5 + 98] == b"\x07\x08"
    # first section: q=2, lam, irreducible low coefficients as bytes, D
    off = 5 + 98
    q, lam = struct.unpack_from("<QQ", data, off)
    pp = params.prime(2)
    assert (q, lam) == (2, pp.lam)
    assert tuple(data[off + 16 : off + 16 + lam]) == pp.irreducible[:lam]
    assert struct.unpack_from("<Q", data, off + 16 + lam) == (pp.degree_bound,)


def test_header_from_params():
    params = de_params(6, 6, 2, 3, seed=b"x")
    h = ProofHeader.from_params(params)
    assert (h.m, h.n, h.s, h.w, h.p, h.seed) == (6, 6, 2, 3, params.p, b"x")


def test_truncation_rejected(proof):
    data = proof.encode()
    for cut in (3, 20, 5 + 98 + 4, len(data) - 1):
        with pytest.raises(ProofFormatError):
            ProofStream.decode(data[:cut])


def test_trailing_bytes_rejected(proof):
    with pytest.raises(ProofFormatError):
        ProofStream.decode(proof.encode() + b"\x00")


def test_bad_magic_rejected(proof):
    data = bytearray(proof.encode())
    data[0] ^= 1
    with pytest.raises(ProofFormatError):
        ProofStream.decode(bytes(data))


def test_wrong_section_order_rejected(proof):
    bad = ProofStream(proof.header, list(reversed(proof.sections)))
    with pytest.raises(ProofFormatError):
        ProofStream.decode(bad.encode())


def test_dirty_padding_rejected():
    # q=3, lam=1: two-bit elements; a single coefficient leaves six padding bits
    f = get_field(3, 1)
    assert f.bits == 2
    sec = ProofSection(3, 1, f.irreducible, 0, np.array([1], dtype=np.int64))
    params = de_params(1, 1, 1, 1)
    head = ProofHeader.from_params(params)
    good = ProofStream(head, [ProofSection(q, 1, get_field(q, 1).irreducible, 0, np.array([0])) for q in params.Q])
    data = bytearray(good.encode())
    ProofStream.decode(bytes(data))
    data[-1] |= 0x80
    with pytest.raises(ProofFormatError):
        ProofStream.decode(bytes(data))
    with pytest.raises(ValueError):
        ProofSection(3, 1, f.irreducible, 2, sec.coeffs).encode()


def test_out_of_range_element_rejected():
    params = de_params(1, 1, 1, 1)
    head = ProofHeader.from_params(params)
    secs = [ProofSection(q, 1, get_field(q, 1).irreducible, 0, np.array([0])) for q in params.Q]
    data = bytearray(ProofStream(head, secs).encode())
    # last section's single coefficient is the final byte; q=3 elements are two bits
    assert params.Q[-1] == 3
    data[-1] = 0b11
    with pytest.raises(ProofFormatError):
        ProofStream.decode(bytes(data))


def test_reader_is_single_pass(proof):
    reader = as_reader(proof.encode())
    assert isinstance(as_reader(reader), ProofReader)
    list(reader.sections())
    reader.finish()
    with pytest.raises(RuntimeError):
        list(reader.sections())


def test_reader_drains_unread_sections(proof):
    reader = ProofReader(io.BytesIO(proof.encode()))
    qs = [sec.q for sec in reader.sections()]
    reader.finish()
    assert qs == [s.q for s in proof.sections]
