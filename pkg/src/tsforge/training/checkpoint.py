"""
Binary checkpoint format.

Layout (little-endian):
    magic       8 bytes  b"TSFGCKPT"
    version     u32
    header_len  u32
    header      JSON (sorted keys): config, step, rng_state, adam step counts,
                record count
    records     repeated: u16 name length, UTF-8 name, u8 ndim (<= 8),
                u32 * ndim dims, float64 * prod(dims) values
    crc32       u32 over everything before it
"""

import json
import logging
import math
import struct
import zlib
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

import numpy as np

from ..errors import (
    BadMagicError,
    CheckpointError,
    TruncatedCheckpointError,
    VersionMismatchError,
)
from .adam import AdamState

logger = logging.getLogger(__name__)

MAGIC = b"TSFGCKPT"
FORMAT_VERSION = 1
MAX_NDIM = 8

_SECTIONS = ("generator", "discriminator", "adam_g.m", "adam_g.v", "adam_d.m", "adam_d.v")


@dataclass
class Checkpoint:
    """Everything needed to resume or sample from a training run"""
    config: Dict[str, Any]
    generator: "OrderedDict[str, np.ndarray]"
    discriminator: "OrderedDict[str, np.ndarray]"
    adam_g: AdamState = field(default_factory=AdamState)
    adam_d: AdamState = field(default_factory=AdamState)
    step: int = 0
    rng_state: Dict[str, Any] = field(default_factory=dict)
    version: int = FORMAT_VERSION

    def _sections(self) -> List[Tuple[str, "OrderedDict[str, np.ndarray]"]]:
        return [
            ("generator", self.generator),
            ("discriminator", self.discriminator),
            ("adam_g.m", self.adam_g.m),
            ("adam_g.v", self.adam_g.v),
            ("adam_d.m", self.adam_d.m),
            ("adam_d.v", self.adam_d.v),
        ]


def _encode_record(name: str, array: np.ndarray) -> bytes:
    encoded = name.encode("utf-8")
    array = np.ascontiguousarray(array, dtype="<f8")
    parts = [struct.pack("<H", len(encoded)), encoded, struct.pack("<B", array.ndim)]
    parts.append(struct.pack(f"<{array.ndim}I", *array.shape))
    parts.append(array.tobytes())
    return b"".join(parts)


def checkpoint_bytes(ckpt: Checkpoint) -> bytes:
    records = [
        _encode_record(f"{section}/{name}", array)
        for section, arrays in ckpt._sections()
        for name, array in arrays.items()
    ]
    header = {
        "config": ckpt.config,
        "step": ckpt.step,
        "rng_state": ckpt.rng_state,
        "adam_g_t": ckpt.adam_g.t,
        "adam_d_t": ckpt.adam_d.t,
        "records": len(records),
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    body = b"".join([
        MAGIC,
        struct.pack("<II", ckpt.version, len(header_bytes)),
        header_bytes,
        *records,
    ])
    return body + struct.pack("<I", zlib.crc32(body))


def save_checkpoint(path: Union[str, Path], ckpt: Checkpoint) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(checkpoint_bytes(ckpt))
    logger.info(f"Checkpoint saved at step {ckpt.step}: {path}")


class _Reader:
    def __init__(self, buf: bytes, end: int):
        self.buf = buf
        self.end = end
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > self.end:
            raise TruncatedCheckpointError(
                f"checkpoint ends after {self.end} bytes, needed {self.pos + n}"
            )
        chunk = self.buf[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str) -> Tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def _parse_body(buf: bytes) -> Tuple[Dict[str, Any], Dict[str, "OrderedDict[str, np.ndarray]"]]:
    """Walk the header and records between the version field and the checksum"""
    # the final 4 bytes are the checksum
    reader = _Reader(buf, len(buf) - 4)
    reader.take(len(MAGIC) + 4)
    (header_len,) = reader.unpack("<I")
    try:
        header = json.loads(reader.take(header_len).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"checkpoint header is corrupted: {e}") from e
    if not isinstance(header, dict) or not isinstance(header.get("records"), int):
        raise CheckpointError("checkpoint header is missing fields")

    sections: Dict[str, "OrderedDict[str, np.ndarray]"] = {s: OrderedDict() for s in _SECTIONS}
    for _ in range(header["records"]):
        (name_len,) = reader.unpack("<H")
        try:
            full_name = reader.take(name_len).decode("utf-8")
        except UnicodeDecodeError as e:
            raise CheckpointError(f"corrupted record name at byte {reader.pos}") from e
        section, _, name = full_name.partition("/")
        if section not in sections:
            raise CheckpointError(f"unknown checkpoint section {section!r}")
        (ndim,) = reader.unpack("<B")
        if ndim > MAX_NDIM:
            raise CheckpointError(f"record {full_name!r} claims {ndim} dimensions")
        shape = reader.unpack(f"<{ndim}I")
        count = math.prod(shape)
        values = np.frombuffer(reader.take(8 * count), dtype="<f8").astype(np.float64)
        try:
            sections[section][name] = values.reshape(shape)
        except ValueError as e:
            raise CheckpointError(f"record {full_name!r} has {values.size} values for shape {shape}") from e

    if reader.pos != reader.end:
        raise CheckpointError(f"{reader.end - reader.pos} unexpected trailing bytes")
    return header, sections


def parse_checkpoint(buf: bytes) -> Checkpoint:
    """
    Decode checkpoint bytes.

    The checksum is verified before any record is decoded. When it does not
    match, a file that ends before its records do is reported as truncated;
    any other damage is a checksum mismatch.
    """
    if len(buf) < len(MAGIC) + 12:
        raise TruncatedCheckpointError(f"checkpoint is only {len(buf)} bytes")
    if buf[:len(MAGIC)] != MAGIC:
        raise BadMagicError("not a tsforge checkpoint (bad magic bytes)")
    (version,) = struct.unpack_from("<I", buf, len(MAGIC))
    if version != FORMAT_VERSION:
        raise VersionMismatchError(
            f"checkpoint format version {version}, this build reads {FORMAT_VERSION}"
        )

    (stored_crc,) = struct.unpack("<I", buf[-4:])
    if zlib.crc32(buf[:-4]) != stored_crc:
        try:
            _parse_body(buf)
        except TruncatedCheckpointError:
            raise
        except CheckpointError:
            pass
        raise CheckpointError("checkpoint checksum mismatch")

    header, sections = _parse_body(buf)
    try:
        return Checkpoint(
            config=header["config"],
            generator=sections["generator"],
            discriminator=sections["discriminator"],
            adam_g=AdamState(sections["adam_g.m"], sections["adam_g.v"], int(header["adam_g_t"])),
            adam_d=AdamState(sections["adam_d.m"], sections["adam_d.v"], int(header["adam_d_t"])),
            step=int(header["step"]),
            rng_state=header["rng_state"],
            version=version,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise CheckpointError(f"checkpoint header is missing fields: {e}") from e


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")
    with open(path, "rb") as f:
        buf = f.read()
    ckpt = parse_checkpoint(buf)
    logger.info(f"Loaded checkpoint at step {ckpt.step}: {path}")
    return ckpt
