from mapsed.utils.compat import json


def test_dumps_is_compact_sorted_bytes():
    assert json.dumps({'b': [1, 2.5], 'a': None}) == b'{"a":null,"b":[1,2.5]}'


def test_loads_accepts_bytes():
    assert json.loads(b'{"x":"\xc3\xa9"}') == {'x': 'é'}
