"""
Deterministic binary dumps for regression snapshots.

Layout::

    b"RMMDUMP1\\n"
    uint64 little-endian header length
    JSON header (sorted keys): {"version", "meta", "arrays": [{"name", "dtype", "shape"}, ...]}
    raw array payloads in header order, C order, little-endian

Complex arrays are stored as ``<c16``: row-major (real, imaginary) float64 pairs.
The same inputs always produce the same bytes.
"""

from __future__ import annotations

import dataclasses
import json
import struct
from pathlib import Path

import numpy as np

from .channel import UE, ChannelRealization

MAGIC = b"RMMDUMP1\n"
VERSION = 1


def dumps_arrays(arrays: dict, meta: dict | None = None) -> bytes:
    entries, payload = [], []
    for name, arr in arrays.items():
        a = np.asarray(arr)
        dtype = a.dtype.newbyteorder("<") if a.dtype.byteorder not in ("|",) else a.dtype
        a = np.ascontiguousarray(a, dtype=dtype)
        entries.append({"name": name, "dtype": a.dtype.str, "shape": list(a.shape)})
        payload.append(a.tobytes())
    header = json.dumps({"version": VERSION, "meta": meta or {}, "arrays": entries},
                        sort_keys=True, separators=(",", ":")).encode()
    return MAGIC + struct.pack("<Q", len(header)) + header + b"".join(payload)


def loads_arrays(blob: bytes) -> tuple[dict, dict]:
    if not blob.startswith(MAGIC):
        raise ValueError("not an rmmimo dump")
    off = len(MAGIC)
    (hlen,) = struct.unpack_from("<Q", blob, off)
    off += 8
    header = json.loads(blob[off:off + hlen])
    off += hlen
    if header.get("version") != VERSION:
        raise ValueError(f"unsupported dump version {header.get('version')}")
    arrays = {}
    for e in header["arrays"]:
        dt = np.dtype(e["dtype"])
        count = int(np.prod(e["shape"], dtype=np.int64))
        arrays[e["name"]] = np.frombuffer(blob, dt, count, off).reshape(e["shape"]).copy()
        off += count * dt.itemsize
    return arrays, header["meta"]


def dump_realization(real: ChannelRealization, path=None) -> bytes:
    meta = {
        "kind": "channel",
        "noise_power": real.noise_power,
        "seed": real.seed,
        "users": [dataclasses.asdict(u) for u in real.users],
        "meta": real.meta,
    }
    blob = dumps_arrays({"coeffs": real.coeffs}, meta)
    if path is not None:
        Path(path).write_bytes(blob)
    return blob


def load_realization(source) -> ChannelRealization:
    blob = source if isinstance(source, bytes) else Path(source).read_bytes()
    arrays, meta = loads_arrays(blob)
    if meta.get("kind") != "channel":
        raise ValueError("dump does not hold a channel realization")
    users = tuple(UE(**u) for u in meta["users"])
    return ChannelRealization(arrays["coeffs"], meta["noise_power"], users, meta["seed"], meta["meta"])


def dump_precoders(analog, digital, path=None, meta: dict | None = None) -> bytes:
    info = {"kind": "precoders", "structure": analog.structure, "phase_bits": analog.phase_bits}
    info.update(meta or {})
    blob = dumps_arrays({"F_RF": analog.matrix, "F_BB": digital.matrix}, info)
    if path is not None:
        Path(path).write_bytes(blob)
    return blob
