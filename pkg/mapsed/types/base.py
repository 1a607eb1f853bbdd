from pydantic import BaseConfig, BaseModel

from mapsed.utils.compat import json


class Base(BaseModel):
    class Config(BaseConfig):
        json_loads = json.loads
        orm_mode = True
        arbitrary_types_allowed = True


class HashableBase(Base):
    class Config(BaseConfig):
        allow_mutation = False
        frozen = True
