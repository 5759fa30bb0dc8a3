import pytest

from iimhard import parse_instance
from iimhard.instance_io import InstanceFormatError, InstanceSpec


def test_parse_full():
    spec = parse_instance("initial_failures: [a2, a3]\nbudget: 1\nprotect: b4\n")
    assert spec.initial_failures == ["a2", "a3"]
    assert spec.budget == 1 and spec.protect == ["b4"]
    assert parse_instance(spec_to_yaml(spec)) == spec


def spec_to_yaml(spec):
    import yaml
    return yaml.safe_dump(spec.to_dict())


def test_string_lists():
    assert parse_instance("initial_failures: 'a2, a3'").initial_failures == ["a2", "a3"]
    assert parse_instance("protect: ''").protect == []


def test_empty():
    assert parse_instance("") == InstanceSpec()


@pytest.mark.parametrize("text", ["budget: -1", "budget: x", "colour: red", "- a", "protect: {a: 1}"])
def test_rejects(text):
    with pytest.raises(InstanceFormatError):
        parse_instance(text)
