from typing import Any

try:
    import orjson

    def dumps(obj: Any) -> bytes:
        """Deterministic compact JSON (sorted keys)."""
        return orjson.dumps(obj, option=orjson.OPT_SORT_KEYS)

    loads = orjson.loads

except ImportError:  # pragma: no cover
    import json as _json

    def dumps(obj: Any) -> bytes:
        """Deterministic compact JSON (sorted keys)."""
        return _json.dumps(obj, sort_keys=True, separators=(',', ':')).encode('utf-8')

    loads = _json.loads  # type: ignore


class _JSONNamespace:
    dumps = staticmethod(dumps)
    loads = staticmethod(loads)


json = _JSONNamespace()
