"""Checkpoint files for resumable AGM runs.

Layout: the magic ``PIFG``, a version byte, then a sequence of fields, each
an 8-byte big-endian length followed by that many bytes.  The first field is
the algorithm name (UTF-8); the rest are signed big-endian integers:

    borwein: magnifier, n, index, s2, y, z, prod
    salamin: magnifier, n, k, a, b, total, pow2
"""
from __future__ import annotations

import os
import struct
from pathlib import Path
from typing import Union

from .borwein import BorweinState
from .errors import CheckpointError, ContractError
from .fixedpoint import FixedReal, Magnifier
from .salamin import AgmPair, SalaminState

MAGIC = b"PIFG"
VERSION = 1


def _int_bytes(v: int) -> bytes:
    return v.to_bytes(v.bit_length() // 8 + 1, "big", signed=True)


def encode_fields(fields: list) -> bytes:
    out = [MAGIC, bytes([VERSION])]
    for f in fields:
        raw = f.encode() if isinstance(f, str) else _int_bytes(f)
        out.append(struct.pack(">Q", len(raw)))
        out.append(raw)
    return b"".join(out)


def decode_fields(data: bytes) -> list:
    if data[:4] != MAGIC:
        raise CheckpointError("not a piforge checkpoint")
    if len(data) < 5 or data[4] != VERSION:
        raise CheckpointError("unsupported checkpoint version")
    pos = 5
    raw_fields = []
    while pos < len(data):
        if pos + 8 > len(data):
            raise CheckpointError("truncated checkpoint")
        (n,) = struct.unpack_from(">Q", data, pos)
        pos += 8
        if pos + n > len(data):
            raise CheckpointError("truncated checkpoint")
        raw_fields.append(data[pos:pos + n])
        pos += n
    if not raw_fields:
        raise CheckpointError("empty checkpoint")
    try:
        name = raw_fields[0].decode()
    except UnicodeDecodeError:
        raise CheckpointError("bad algorithm tag") from None
    return [name] + [int.from_bytes(b, "big", signed=True) for b in raw_fields[1:]]


def state_to_bytes(st: Union[BorweinState, SalaminState]) -> bytes:
    if isinstance(st, BorweinState):
        return encode_fields(["borwein", st.magnifier.value, st.n, st.index,
                              st.s2.mantissa, st.y.mantissa, st.z.mantissa, st.prod.mantissa])
    return encode_fields(["salamin", st.magnifier.value, st.n, st.k, st.pair.a.mantissa,
                          st.pair.b.mantissa, st.total.mantissa, st.pow2])


def state_from_bytes(data: bytes) -> Union[BorweinState, SalaminState]:
    fields = decode_fields(data)
    name, ints = fields[0], fields[1:]
    if len(ints) != 7:
        raise CheckpointError(f"expected 7 integer fields, found {len(ints)}")
    try:
        m = Magnifier(ints[0])
    except ContractError as exc:
        raise CheckpointError(f"bad magnifier: {exc}") from None
    if name == "borwein":
        _, n, index, s2, y, z, prod = ints
        if not 1 <= index <= n:
            raise CheckpointError("iteration index out of range")
        return BorweinState(m, n, index, *(FixedReal(v, m) for v in (s2, y, z, prod)))
    if name == "salamin":
        _, n, k, a, b, total, pow2 = ints
        if not 0 <= k <= n + 1 or pow2 != 2**k:
            raise CheckpointError("inconsistent AGM step counter")
        return SalaminState(m, n, k, AgmPair(FixedReal(a, m), FixedReal(b, m)),
                            FixedReal(total, m), pow2)
    raise CheckpointError(f"unknown algorithm {name!r}")


def save_state(path: Union[str, Path], st) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(state_to_bytes(st))
    os.replace(tmp, path)


def load_state(path: Union[str, Path]):
    return state_from_bytes(Path(path).read_bytes())
