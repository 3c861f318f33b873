import json
from typing import NamedTuple

import numpy as np

from jaxslip.internals.namedtuple_utils import isinstance_namedtuple, serialise_namedtuple, deserialise_namedtuple
from jaxslip.internals.types import InequalityReport, Forcing


# module level so that deserialisation can import them
class MockAge(NamedTuple):
    years: int
    months: np.ndarray


class MockPerson(NamedTuple):
    name: str
    age: MockAge


def test_isinstance_namedtuple():
    data = MockPerson('Alice', MockAge(25, np.asarray(6)))
    assert isinstance_namedtuple(data)
    assert not isinstance_namedtuple(())
    assert not isinstance_namedtuple((1, 2))


def test_serialise_namedtuple():
    data = MockPerson('Alice', MockAge(25, np.array(6)))
    restored_data = deserialise_namedtuple(serialise_namedtuple(data))
    assert data == restored_data


def test_to_json():
    data = MockPerson('Alice', MockAge(25, np.array(6)))
    s = json.dumps(serialise_namedtuple(data), indent=2)
    restored_data = deserialise_namedtuple(json.loads(s))
    assert data == restored_data


def test_report_to_json():
    report = InequalityReport(name='korn', analytic_constant=8., worst_observed_ratio=2.5, sample_count=200,
                              passed=True)
    restored = deserialise_namedtuple(json.loads(json.dumps(serialise_namedtuple(report))))
    assert restored == report


def test_callables_serialise_to_none():
    forcing = Forcing(f=lambda t, x, y: (x, y))
    restored = deserialise_namedtuple(json.loads(json.dumps(serialise_namedtuple(forcing))))
    assert restored.f is None
    assert restored.h is None
    assert restored.time_dependent is False


def test_arrays_keep_shape_and_dtype():
    data = MockAge(3, np.arange(6, dtype=np.float64).reshape((2, 3)))
    restored = deserialise_namedtuple(json.loads(json.dumps(serialise_namedtuple(data))))
    assert restored.months.shape == (2, 3)
    assert restored.months.dtype == np.float64
    np.testing.assert_array_equal(restored.months, data.months)
