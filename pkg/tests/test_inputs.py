"""Input suite generation."""

import pytest

from invwb import corpus
from invwb.errors import ConfigError
from invwb.inputs import (generate_inputs, input_from_json, parse_cli_arg,
                          satisfies_precondition)
from invwb.parser import parse_routine
from invwb.values import Array


def test_suites_are_deterministic_and_valid():
    for e in corpus.load_corpus():
        for name, r in e.routines.items():
            a = generate_inputs(r, e.policy(name), seed=3, size=30)
            b = generate_inputs(r, e.policy(name), seed=3, size=30)
            assert [c.key() for c in a] == [c.key() for c in b]
            assert all(satisfies_precondition(r, c) for c in a)
            assert len({c.key() for c in a}) == len(a)


def test_different_seeds_differ():
    e = corpus.get("selection_sort")
    a = generate_inputs(e.routine, e.policy(), seed=1, size=30)
    b = generate_inputs(e.routine, e.policy(), seed=2, size=30)
    assert [c.key() for c in a] != [c.key() for c in b]


def test_edge_cases_come_first():
    e = corpus.get("max_one_way")
    suite = generate_inputs(e.routine, e.policy(), seed=0, size=10)
    labels = [c.label for c in suite]
    assert labels[0] == "min" and "singleton" in labels


def test_small_input_space_stops_early():
    r = parse_routine("f (b: BOOLEAN): INTEGER\n  do\n    Result := 1\n  end\n")
    suite = generate_inputs(r, {"b": {"type": "int", "lo": 0, "hi": 1}}, size=50)
    assert len(suite) == 2


def test_unsatisfiable_precondition_is_a_config_error():
    r = parse_routine("f (x: INTEGER): INTEGER\n  require\n    x > 100\n  do\n    Result := x\n  end\n")
    with pytest.raises(ConfigError, match="rejected"):
        generate_inputs(r, {"x": {"type": "int", "lo": 0, "hi": 10}}, size=5)


def test_missing_policy_is_a_config_error():
    r = corpus.get("divided_diff").routine
    with pytest.raises(ConfigError, match="no input policy"):
        generate_inputs(r, {"n": {"type": "int"}}, size=5)


def test_json_round_trip_with_heap():
    e = corpus.get("list_reversal")
    for case in generate_inputs(e.routine, e.policy(), seed=0, size=10):
        again = input_from_json(e.routine, case.to_json())
        assert again.key() == case.key()


def test_cli_arguments():
    assert parse_cli_arg("7", "INTEGER") == 7
    assert parse_cli_arg("[3, 1]", "ARRAY [INTEGER]") == Array(1, [3, 1])
    assert parse_cli_arg("abc", "ARRAY [CHARACTER]") == Array(1, ["a", "b", "c"])
    with pytest.raises(ConfigError):
        parse_cli_arg("seven", "INTEGER")
    with pytest.raises(ConfigError):
        parse_cli_arg("x", "NODE")
