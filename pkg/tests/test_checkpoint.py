import numpy as np
import pytest

from sarlab.checkpoint import (
    CheckpointError, decode_bigint, decode_rng, decode_text,
    encode_bigint, encode_rng, encode_text, load_arrays, save_arrays,
)


def test_save_load_save_identical_bytes(tmp_path):
    rng = np.random.default_rng(0)
    arrays = {
        "a/w": rng.standard_normal((3, 4)),
        "b": np.array([1.0]),
        "scalar0d": np.array(2.5),
    }
    p1, p2 = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
    save_arrays(p1, arrays)
    loaded = load_arrays(p1)
    save_arrays(p2, loaded)
    assert p1.read_bytes() == p2.read_bytes()
    for k in arrays:
        np.testing.assert_array_equal(loaded[k], arrays[k])


def test_corrupt_magic_raises(tmp_path):
    p = tmp_path / "x.ckpt"
    save_arrays(p, {"a": np.ones(2)})
    raw = bytearray(p.read_bytes())
    raw[0] = ord("X")
    p.write_bytes(bytes(raw))
    with pytest.raises(CheckpointError, match="magic"):
        load_arrays(p)


def test_truncated_file_raises(tmp_path):
    p = tmp_path / "x.ckpt"
    save_arrays(p, {"a": np.ones(100)})
    raw = p.read_bytes()
    p.write_bytes(raw[: len(raw) - 11])
    with pytest.raises(CheckpointError, match="truncated"):
        load_arrays(p)


def test_version_mismatch_raises(tmp_path):
    p = tmp_path / "x.ckpt"
    save_arrays(p, {"a": np.ones(2)})
    raw = bytearray(p.read_bytes())
    raw[7:11] = (99).to_bytes(4, "little")
    p.write_bytes(bytes(raw))
    with pytest.raises(CheckpointError, match="version"):
        load_arrays(p)


def test_bigint_roundtrip():
    for v in (0, 1, 2**31, 2**64 - 1, 2**127 + 12345):
        assert decode_bigint(encode_bigint(v, 4 if v < 2**128 else 8)) == v


def test_text_roundtrip():
    s = "seed = 3\ntask = point_mass\n"
    assert decode_text(encode_text(s)) == s


def test_rng_state_roundtrip_continues_stream():
    gen = np.random.default_rng(123)
    gen.standard_normal(17)
    enc = encode_rng(gen)
    clone = decode_rng(enc)
    np.testing.assert_array_equal(gen.standard_normal(5), clone.standard_normal(5))
