import pytest

from piforge.borwein import borwein_pi
from piforge.checkpoint import (MAGIC, decode_fields, encode_fields, load_state, save_state,
                                state_from_bytes, state_to_bytes)
from piforge.errors import CheckpointError
from piforge.fixedpoint import Magnifier
from piforge.salamin import salamin_pi


def collect(fn, m, n):
    states = []
    final = fn(m, n, on_step=states.append)
    return states, final


@pytest.mark.parametrize("fn, n", [(borwein_pi, 5), (salamin_pi, 5)])
def test_state_round_trip_and_resume(fn, n, tmp_path):
    m = Magnifier(10**40 + 1)
    states, final = collect(fn, m, n)
    for st in states:
        assert state_from_bytes(state_to_bytes(st)) == st
        path = tmp_path / "run.ckpt"
        save_state(path, st)
        loaded = load_state(path)
        assert loaded == st
        assert fn(m, n, state=loaded) == final
    assert not list(tmp_path.glob("*.tmp"))


def test_fields_round_trip():
    fields = ["borwein", 0, -1, 1, 255, 256, -(2**300), 2**4000 + 17]
    assert decode_fields(encode_fields(fields)) == fields


def test_layout_is_length_prefixed_big_endian():
    data = encode_fields(["x", 258])
    assert data[:4] == MAGIC
    assert data[5:13] == (1).to_bytes(8, "big") and data[13:14] == b"x"
    assert data[14:22] == (2).to_bytes(8, "big") and data[22:24] == b"\x01\x02"


def test_corrupt_files_are_rejected():
    states, _ = collect(salamin_pi, Magnifier(10**40 + 1), 3)
    good = state_to_bytes(states[1])
    bad = [
        b"",
        b"NOPE" + good[4:],
        good[:4] + b"\x09" + good[5:],
        good[:-3],
        good[:5],
        encode_fields(["quartic", 10**6, 3, 1, 1, 1, 1, 1]),
        encode_fields(["salamin", 10**6, 3]),
        encode_fields(["salamin", 999, 3, 1, 1, 1, 0, 2]),
        encode_fields(["salamin", 10**9, 3, 1, 1, 1, 0, 4]),
        encode_fields(["borwein", 10**9, 3, 0, 1, 1, 1, 1]),
        MAGIC + b"\x01" + (2).to_bytes(8, "big") + b"\xff\xfe",
    ]
    for data in bad:
        with pytest.raises(CheckpointError):
            state_from_bytes(data)


def test_missing_file_is_os_error(tmp_path):
    with pytest.raises(OSError):
        load_state(tmp_path / "absent.ckpt")
