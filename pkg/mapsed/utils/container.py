"""
Binary container shared by dataset files and checkpoints.

Layout (all integers little-endian)::

    offset  size  content
    0       8     magic, b'MAPSEDDS' (dataset) or b'MAPSEDCK' (checkpoint)
    8       4     format version (uint32)
    12      4     header length H (uint32)
    16      H     UTF-8 JSON header with sorted keys and compact separators:
                  {"arrays": [{"count": int, "name": str, "offset": int,
                               "shape": [int, ...]}, ...],
                   "meta": {...}}
    16+H    ...   payload: float64 little-endian row-major arrays,
                  concatenated in header order; "offset" is in bytes from
                  the start of the payload

Files are written to a temporary sibling first and renamed into place.
"""
from __future__ import annotations

import os
import pathlib
import struct
import tempfile
from dataclasses import dataclass, field
from typing import Any, Dict, List, Union

import numpy as np

from mapsed.types.exceptions import MapsedError
from mapsed.utils.compat import json

FORMAT_VERSION = 1
MAGIC_SIZE = 8
_PREAMBLE = struct.Struct('<II')
_PAYLOAD_DTYPE = np.dtype('<f8')

PathLike = Union[str, pathlib.Path]


class ContainerFormatError(MapsedError):
    description = 'File is not a valid mapsed container'


@dataclass
class Container:
    meta: Dict[str, Any] = field(default_factory=dict)
    arrays: Dict[str, np.ndarray] = field(default_factory=dict)


def encode_container(magic: bytes, container: Container) -> bytes:
    if len(magic) != MAGIC_SIZE:
        raise ValueError(f'Magic must be {MAGIC_SIZE} bytes, got {magic!r}')

    entries: List[Dict[str, Any]] = []
    chunks: List[bytes] = []
    offset = 0
    for name, array in container.arrays.items():
        data = np.ascontiguousarray(array, dtype=_PAYLOAD_DTYPE)
        raw = data.tobytes(order='C')
        entries.append(
            {'name': name, 'shape': list(data.shape), 'offset': offset, 'count': int(data.size)}
        )
        chunks.append(raw)
        offset += len(raw)

    header = json.dumps({'meta': container.meta, 'arrays': entries})
    return b''.join([magic, _PREAMBLE.pack(FORMAT_VERSION, len(header)), header, *chunks])


def decode_container(magic: bytes, blob: bytes) -> Container:
    if blob[:MAGIC_SIZE] != magic:
        raise ContainerFormatError(f'Expected magic {magic!r}, got {blob[:MAGIC_SIZE]!r}')
    try:
        version, header_length = _PREAMBLE.unpack_from(blob, MAGIC_SIZE)
    except struct.error as ex:
        raise ContainerFormatError(f'Truncated preamble: {ex}') from ex
    if version != FORMAT_VERSION:
        raise ContainerFormatError(f'Unsupported container version {version}')

    header_start = MAGIC_SIZE + _PREAMBLE.size
    payload_start = header_start + header_length
    header = json.loads(blob[header_start:payload_start])

    arrays: Dict[str, np.ndarray] = {}
    for entry in header['arrays']:
        start = payload_start + entry['offset']
        stop = start + entry['count'] * _PAYLOAD_DTYPE.itemsize
        if stop > len(blob):
            raise ContainerFormatError(f"Array {entry['name']!r} runs past the end of file")
        flat = np.frombuffer(blob[start:stop], dtype=_PAYLOAD_DTYPE)
        arrays[entry['name']] = flat.astype(np.float64).reshape(entry['shape'])
    return Container(meta=header['meta'], arrays=arrays)


def write_atomically(path: PathLike, data: bytes) -> None:
    target = pathlib.Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f'.{target.name}.', dir=str(target.parent))
    try:
        with os.fdopen(fd, 'wb') as fp:
            fp.write(data)
            fp.flush()
            os.fsync(fp.fileno())
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def write_text_atomically(path: PathLike, text: str) -> None:
    write_atomically(path, text.encode('utf-8'))


def save_container(path: PathLike, magic: bytes, container: Container) -> None:
    write_atomically(path, encode_container(magic, container))


def load_container(path: PathLike, magic: bytes) -> Container:
    return decode_container(magic, pathlib.Path(path).read_bytes())
