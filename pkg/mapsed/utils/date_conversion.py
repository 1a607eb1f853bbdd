import zoneinfo
from datetime import date, datetime, time
from typing import Union

from mapsed.types.exceptions import ConfigurationError


def as_midnight(obj: Union[date, datetime]) -> datetime:
    if isinstance(obj, datetime):
        return datetime.combine(obj.date(), time.min)
    return datetime.combine(obj, time.min)


def get_zone(timezone_name: str) -> zoneinfo.ZoneInfo:
    try:
        return zoneinfo.ZoneInfo(timezone_name)
    except (zoneinfo.ZoneInfoNotFoundError, ValueError):
        raise ConfigurationError(f'Unknown IANA time zone {timezone_name!r}') from None
