import struct

import numpy as np
import pytest

from mapsed.utils.compat import json
from mapsed.utils.container import (
    Container,
    ContainerFormatError,
    decode_container,
    encode_container,
    load_container,
    save_container,
    write_atomically,
)

MAGIC = b'MAPSEDTS'


@pytest.fixture()
def container() -> Container:
    return Container(
        meta={'name': 'grid', 'sizes': [2, 3]},
        arrays={'a': np.arange(6, dtype=np.float64).reshape(2, 3), 'b': np.array([0.5])},
    )


def test_layout(container):
    blob = encode_container(MAGIC, container)

    assert blob[:8] == MAGIC
    version, header_length = struct.unpack_from('<II', blob, 8)
    assert version == 1
    header = json.loads(blob[16 : 16 + header_length])
    assert header['arrays'] == [
        {'count': 6, 'name': 'a', 'offset': 0, 'shape': [2, 3]},
        {'count': 1, 'name': 'b', 'offset': 48, 'shape': [1]},
    ]
    assert blob[16 + header_length + 8 : 16 + header_length + 16] == struct.pack('<d', 1.0)
    assert len(blob) == 16 + header_length + 7 * 8


def test_header_keys_are_sorted(container):
    blob = encode_container(MAGIC, container)
    _, header_length = struct.unpack_from('<II', blob, 8)

    assert blob[16 : 16 + header_length].startswith(b'{"arrays":[{"count":6,"name":"a"')


def test_decoded_arrays_are_float64(container):
    decoded = decode_container(MAGIC, encode_container(MAGIC, container))

    assert decoded.meta == container.meta
    assert decoded.arrays['a'].dtype == np.float64
    np.testing.assert_array_equal(decoded.arrays['a'], container.arrays['a'])


def test_integer_arrays_are_stored_as_float64():
    blob = encode_container(MAGIC, Container(arrays={'x': np.array([1, 2], dtype=np.int32)}))

    assert decode_container(MAGIC, blob).arrays['x'].tolist() == [1.0, 2.0]


class TestMalformed:
    def test_wrong_magic(self, container):
        with pytest.raises(ContainerFormatError):
            decode_container(b'MAPSEDXX', encode_container(MAGIC, container))

    def test_truncated_preamble(self):
        with pytest.raises(ContainerFormatError):
            decode_container(MAGIC, MAGIC + b'\x01\x00')

    def test_unsupported_version(self, container):
        blob = bytearray(encode_container(MAGIC, container))
        blob[8:12] = struct.pack('<I', 7)

        with pytest.raises(ContainerFormatError) as exc_info:
            decode_container(MAGIC, bytes(blob))

        assert 'version 7' in str(exc_info.value)

    def test_truncated_payload(self, container):
        blob = encode_container(MAGIC, container)

        with pytest.raises(ContainerFormatError):
            decode_container(MAGIC, blob[:-4])

    def test_magic_must_be_eight_bytes(self, container):
        with pytest.raises(ValueError):
            encode_container(b'SHORT', container)


def test_save_leaves_no_temporary_files(tmp_path, container):
    path = tmp_path / 'nested' / 'grid.bin'

    save_container(path, MAGIC, container)
    save_container(path, MAGIC, container)

    assert [p.name for p in path.parent.iterdir()] == ['grid.bin']
    assert load_container(path, MAGIC).meta == container.meta


def test_failed_write_keeps_the_previous_file(tmp_path, mocker):
    path = tmp_path / 'grid.bin'
    write_atomically(path, b'old')
    mocker.patch('mapsed.utils.container.os.replace', side_effect=OSError('disk full'))

    with pytest.raises(OSError):
        write_atomically(path, b'new')

    assert path.read_bytes() == b'old'
    assert [p.name for p in tmp_path.iterdir()] == ['grid.bin']
