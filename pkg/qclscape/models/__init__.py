# pylama:ignore=W0401,W0611
import json

from marshmallow import ValidationError

from qclscape.errors import SchemaValidationError
from qclscape.models.configs import *
from qclscape.models.quantum import *
from qclscape.models.results import *
from qclscape.utils import dump_json


def first_error(messages, prefix=''):
    """Walk marshmallow's nested error dict down to the first offending field."""
    if isinstance(messages, dict):
        key = sorted(messages, key=str)[0]
        name = f"{prefix}.{key}" if prefix else str(key)
        return first_error(messages[key], name)
    if isinstance(messages, list) and messages:
        return prefix, str(messages[0])
    return prefix, str(messages)


def serializer(obj):
    data = obj.to_dict() if hasattr(obj, 'to_dict') else obj
    return dump_json(data)


def deserializer(text, cls):
    try:
        data = json.loads(text)
    except ValueError as e:
        raise SchemaValidationError('<document>', f"not valid JSON ({e})")
    if not isinstance(data, dict):
        raise SchemaValidationError('<document>', "expected a JSON object")
    try:
        return cls.schema().load(data)
    except ValidationError as e:
        field, reason = first_error(e.messages)
        raise SchemaValidationError(field, reason)
