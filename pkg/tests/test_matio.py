import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrjs.matio import (
    HEADER_SIZE,
    BadMagicError,
    LrjsFormatError,
    TruncatedPayloadError,
    UnsupportedVersionError,
    read_matrix,
    write_matrix,
)


def test_header_size_of_1x1_real(tmp_path):
    path = tmp_path / "a.lrjs"
    write_matrix(path, np.zeros((1, 1)))
    raw = path.read_bytes()
    assert HEADER_SIZE == 4 + 2 + 1 + 8 + 8 == 23
    assert len(raw) == 31
    assert raw[:4] == b"LRJS"
    assert struct.unpack("<HBQQ", raw[4:23]) == (1, 0, 1, 1)


def test_complex_2x2_payload_length(tmp_path):
    path = tmp_path / "c.lrjs"
    write_matrix(path, np.ones((2, 2), dtype=complex))
    raw = path.read_bytes()
    assert raw[6] == 1
    assert len(raw) - HEADER_SIZE == 64


def test_complex_rewrite_is_byte_identical(tmp_path, rng):
    m = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    a, b = tmp_path / "a.lrjs", tmp_path / "b.lrjs"
    write_matrix(a, m)
    write_matrix(b, read_matrix(a))
    assert a.read_bytes() == b.read_bytes()


def test_row_major_little_endian_payload(tmp_path):
    path = tmp_path / "r.lrjs"
    write_matrix(path, np.array([[1.0, 2.0], [3.0, 4.0]]))
    payload = path.read_bytes()[HEADER_SIZE:]
    assert struct.unpack("<4d", payload) == (1.0, 2.0, 3.0, 4.0)


@settings(max_examples=50, deadline=None)
@given(rows=st.integers(1, 6), cols=st.integers(1, 6), complex_=st.booleans(), seed=st.integers(0, 2**32 - 1))
def test_round_trip_bit_exact(tmp_path_factory, rows, cols, complex_, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((rows, cols)) * 10.0 ** rng.integers(-300, 300, (rows, cols))
    if complex_:
        m = m + 1j * rng.standard_normal((rows, cols))
    path = tmp_path_factory.mktemp("rt") / "m.lrjs"
    write_matrix(path, m)
    back = read_matrix(path)
    assert back.dtype == m.dtype
    assert back.tobytes() == m.tobytes()


def test_bad_magic(tmp_path):
    path = tmp_path / "bad.lrjs"
    write_matrix(path, np.zeros((2, 2)))
    path.write_bytes(b"XXXX" + path.read_bytes()[4:])
    with pytest.raises(BadMagicError):
        read_matrix(path)


def test_truncated_payload(tmp_path):
    path = tmp_path / "t.lrjs"
    header = struct.pack("<4sHBQQ", b"LRJS", 1, 0, 10, 10)
    path.write_bytes(header + np.zeros(50).tobytes())
    with pytest.raises(TruncatedPayloadError):
        read_matrix(path)


def test_unsupported_version(tmp_path):
    path = tmp_path / "v.lrjs"
    path.write_bytes(struct.pack("<4sHBQQ", b"LRJS", 2, 0, 1, 1) + bytes(8))
    with pytest.raises(UnsupportedVersionError):
        read_matrix(path)


def test_errors_are_distinct():
    kinds = {BadMagicError, TruncatedPayloadError, UnsupportedVersionError}
    assert len(kinds) == 3
    assert all(issubclass(k, LrjsFormatError) for k in kinds)
    assert not issubclass(BadMagicError, TruncatedPayloadError)


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_rejects_non_finite(tmp_path, bad):
    with pytest.raises(ValueError):
        write_matrix(tmp_path / "n.lrjs", np.array([[1.0, bad]]))
