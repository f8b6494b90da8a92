import pytest

from actorcover import canon
from actorcover.canon import Record, diff, dumps, freeze, loads


def test_freeze_scalars_pass_through():
    for value in (None, True, False, 0, -3, "x"):
        assert freeze(value) == value


def test_freeze_containers():
    frozen = freeze({"b": [1, 2], "a": {1, 2}})
    assert isinstance(frozen, Record)
    assert frozen["b"] == (1, 2)
    assert frozen["a"] == frozenset({1, 2})


def test_floats_rejected():
    with pytest.raises(TypeError):
        freeze(1.5)
    with pytest.raises(TypeError):
        dumps({"a": 2.0})


def test_record_is_hashable_and_ordered_by_key():
    a = Record({"x": 1, "y": 2})
    b = Record({"y": 2, "x": 1})
    assert a == b
    assert hash(a) == hash(b)
    assert dumps(a) == dumps(b) == '{"x":1,"y":2}'


def test_reserved_set_key_rejected():
    with pytest.raises(ValueError):
        Record({canon.SET_TAG: 1})


def test_set_members_sorted_in_dumps():
    a = dumps({"s": {3, 1, 2}})
    b = dumps({"s": {2, 3, 1}})
    assert a == b
    assert a == '{"s":{"$set":[1,2,3]}}'


def test_dumps_loads_round_trip():
    value = freeze(
        {
            "n": None,
            "flag": True,
            "nested": {"seq": [1, "two", {"deep": {4, 5}}]},
            "empty": [],
        }
    )
    assert loads(dumps(value)) == value


def test_loads_rejects_floats():
    with pytest.raises(TypeError):
        loads("[1.5]")


def test_diff_names_the_field():
    a = {"replica": {"commit": 1, "view": 0}}
    b = {"replica": {"commit": 2, "view": 0}}
    out = diff(a, b)
    assert out == [("replica.commit", 1, 2)]


def test_diff_equal_is_empty():
    assert diff({"a": [1, {2}]}, {"a": [1, {2}]}) == []


def test_record_replace():
    a = Record({"x": 1, "y": 2})
    assert a.replace(y=3) == Record({"x": 1, "y": 3})
    assert a["y"] == 2
