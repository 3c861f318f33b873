import importlib

import jax
import numpy as np

NAMEDTUPLE_TAG = '__namedtuple__'
NDARRAY_TAG = '__ndarray__'


def isinstance_namedtuple(obj) -> bool:
    return isinstance(obj, tuple) and hasattr(obj, '_asdict') and hasattr(obj, '_fields')


def _import_class(class_path: str):
    module_name, class_name = class_path.rsplit('.', 1)
    return getattr(importlib.import_module(module_name), class_name)


def serialise_namedtuple(obj):
    """
    Turn a (nested) report, state or config into JSON-compatible python objects.

    Arrays keep dtype and shape. Callables (the analytic forcing inside a Forcing, the law callables) cannot be
    stored and are written as None.
    """
    if isinstance_namedtuple(obj):
        return {'type': NAMEDTUPLE_TAG,
                '__class__': f"{type(obj).__module__}.{type(obj).__name__}",
                '__data__': {name: serialise_namedtuple(value) for name, value in obj._asdict().items()}}
    if isinstance(obj, (np.ndarray, jax.Array)):
        return serialise_ndarray(np.asarray(obj))
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, (list, tuple)):
        return list(map(serialise_namedtuple, obj))
    if isinstance(obj, dict):
        return {key: serialise_namedtuple(value) for key, value in obj.items()}
    if callable(obj):
        return None
    return obj


def deserialise_namedtuple(obj):
    if isinstance(obj, list):
        return list(map(deserialise_namedtuple, obj))
    if not isinstance(obj, dict):
        return obj
    tag = obj.get('type')
    if tag == NAMEDTUPLE_TAG:
        fields = {name: deserialise_namedtuple(value) for name, value in obj['__data__'].items()}
        return _import_class(obj['__class__'])(**fields)
    if tag == NDARRAY_TAG:
        return deserialise_ndarray(obj)
    return {key: deserialise_namedtuple(value) for key, value in obj.items()}


def serialise_ndarray(obj: np.ndarray):
    return {'type': NDARRAY_TAG, '__dtype__': str(obj.dtype), '__shape__': list(obj.shape),
            '__data__': obj.ravel().tolist()}


def deserialise_ndarray(obj):
    return np.asarray(obj['__data__'], dtype=obj['__dtype__']).reshape(obj['__shape__'])
