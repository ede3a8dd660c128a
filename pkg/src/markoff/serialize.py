"""Canonical JSON: sorted keys, compact separators, exact rationals as strings."""

from __future__ import annotations

import dataclasses
import enum
import json
from fractions import Fraction

from .arith import INF
from .brauer import InvariantProfile
from .quadform import QuadForm, UnimodularMap
from .witness import WitnessCertificate


def _key(k) -> str:
    if k is INF:
        return "inf"
    return str(k)


def to_jsonable(obj):
    if obj is INF:
        return "inf"
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        raise TypeError("floats are not serialized; format them as strings")
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, WitnessCertificate):
        return obj.to_dict()
    if isinstance(obj, InvariantProfile):
        return {"element": obj.element.value, "inv": {_key(k): str(v) for k, v in obj.inv.items()}}
    if isinstance(obj, QuadForm):
        return {"a": obj.a, "b": obj.b, "c": obj.c}
    if isinstance(obj, UnimodularMap):
        return [[obj.r, obj.s], [obj.t, obj.u]]
    if isinstance(obj, dict):
        return {_key(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def serialize(obj) -> bytes:
    text = json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def parse_certificate(data: bytes | str) -> WitnessCertificate:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return WitnessCertificate.from_dict(json.loads(data))
