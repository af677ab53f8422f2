"""Binary tablebase files.

Layout, all little-endian::

    b"BNTB"  version:u16  rule:u8  grundy:u8  n_stacks:u16  n_tokens:u32
    for m = n_tokens down to 0:
        entries:u64  payload
    crc32:u32

The payload is one Grundy byte per entry when the grundy flag is set (the
outcome is recovered as ``grundy != 0``), otherwise outcome bits packed eight
per byte, least significant bit first, 1 meaning N. The CRC covers every byte
between the header and the checksum itself.
"""

from __future__ import annotations

import io
import os
import struct
import zlib
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .exceptions import ParamsMismatch, TableFormatError
from .game import GameParams, layer_size
from .solver import FORMAT_VERSION, GRUNDY_BOUNDARY, SolveTable

MAGIC = b"BNTB"
_HEADER = struct.Struct("<4sHBBHI")
_U64 = struct.Struct("<Q")
_U32 = struct.Struct("<I")
_RULE_CODES = {"normal": 0, "misere": 1}


def _layer_bytes(t: SolveTable, m: int) -> bytes:
    if t.grundy is not None:
        return np.ascontiguousarray(t.grundy[m], dtype=np.uint8).tobytes()
    return np.packbits(t.outcomes[m], bitorder="little").tobytes()


def dumps_table(t: SolveTable) -> bytes:
    if any(layer is None for layer in t.outcomes):
        raise ValueError("only fully retained tables can be saved")
    p = t.params
    head = _HEADER.pack(MAGIC, FORMAT_VERSION, _RULE_CODES[t.rule], int(t.has_grundy), p.n_stacks, p.n_tokens)
    body = io.BytesIO()
    for m in range(p.n_tokens, -1, -1):
        body.write(_U64.pack(len(t.outcomes[m])))
        body.write(_layer_bytes(t, m))
    payload = body.getvalue()
    return head + payload + _U32.pack(zlib.crc32(payload))


def save_table(t: SolveTable, destination: str | os.PathLike | BinaryIO) -> None:
    data = dumps_table(t)
    if hasattr(destination, "write"):
        destination.write(data)
        return
    path = Path(destination)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    tmp.replace(path)


def loads_table(data: bytes, expected: GameParams | None = None, rule: str | None = None) -> SolveTable:
    if len(data) < _HEADER.size + _U32.size:
        raise TableFormatError(f"truncated tablebase ({len(data)} bytes)")
    magic, version, rule_code, gflag, n_stacks, n_tokens = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise TableFormatError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise TableFormatError(f"format version {version}, this build reads {FORMAT_VERSION}")
    codes = {v: k for k, v in _RULE_CODES.items()}
    if rule_code not in codes or gflag not in (0, 1):
        raise TableFormatError("corrupt header flags")
    payload = data[_HEADER.size : -_U32.size]
    (crc,) = _U32.unpack_from(data, len(data) - _U32.size)
    if zlib.crc32(payload) != crc:
        raise TableFormatError("checksum mismatch; file is corrupted or truncated")

    params = GameParams(n_tokens, n_stacks)
    if expected is not None and expected != params:
        raise ParamsMismatch(
            f"file holds BN({n_tokens},{n_stacks}), expected BN({expected.n_tokens},{expected.n_stacks})"
        )
    file_rule = codes[rule_code]
    if rule is not None and rule != file_rule:
        raise ParamsMismatch(f"file holds the {file_rule} rule, expected {rule}")

    outcomes: list = [None] * (n_tokens + 1)
    grundy: list | None = [None] * (n_tokens + 1) if gflag else None
    off = 0
    for m in range(n_tokens, -1, -1):
        if off + _U64.size > len(payload):
            raise TableFormatError(f"truncated before layer {m}")
        (count,) = _U64.unpack_from(payload, off)
        off += _U64.size
        if count != layer_size(n_stacks, m):
            raise TableFormatError(f"layer {m} has {count} entries, expected {layer_size(n_stacks, m)}")
        nbytes = count if gflag else (count + 7) // 8
        chunk = payload[off : off + nbytes]
        if len(chunk) != nbytes:
            raise TableFormatError(f"truncated inside layer {m}")
        off += nbytes
        if gflag:
            g = np.frombuffer(chunk, dtype=np.uint8).copy()
            grundy[m] = g
            outcomes[m] = g != 0
        else:
            outcomes[m] = np.unpackbits(np.frombuffer(chunk, dtype=np.uint8), count=count, bitorder="little").astype(bool)
    if off != len(payload):
        raise TableFormatError(f"{len(payload) - off} trailing bytes after layer 0")
    meta = {
        "format_version": version,
        "grundy_boundary": GRUNDY_BOUNDARY if gflag else None,
        "order": "descending-lex",
    }
    return SolveTable(params, file_rule, outcomes, grundy, meta)


def load_table(
    source: str | os.PathLike | BinaryIO,
    expected: GameParams | None = None,
    rule: str | None = None,
) -> SolveTable:
    """Read a tablebase; ``expected``/``rule`` turn parameter drift into ``ParamsMismatch``."""
    data = source.read() if hasattr(source, "read") else Path(source).read_bytes()
    return loads_table(data, expected, rule)


def tables_equal(a: SolveTable, b: SolveTable) -> bool:
    if a.params != b.params or a.rule != b.rule or a.has_grundy != b.has_grundy:
        return False
    for m in range(a.params.n_tokens + 1):
        if not np.array_equal(a.outcomes[m], b.outcomes[m]):
            return False
        if a.grundy is not None and not np.array_equal(a.grundy[m], b.grundy[m]):
            return False
    return True
