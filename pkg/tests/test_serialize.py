import copy
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbcalc.constructions import heegaard_splitting, sixth_sharp_decomposition, superadd_decomposition
from orbcalc.errors import OrbcalcError, SchemaError
from orbcalc.examples import run_named_example
from orbcalc.generators import FuzzConfig, candidate_moves, generate_random_decomposition
from orbcalc.moves import apply_move, run_script
from orbcalc.orbifold import INF
from orbcalc.serialize import (
    decomposition_from_dict,
    decomposition_to_dict,
    dump_rational,
    load_rational,
    parse_decomposition,
    parse_script,
    record_from_dict,
    record_to_dict,
    report_to_dict,
    script_from_dict,
    sequence_from_dict,
    sequence_to_dict,
    serialize_decomposition,
    serialize_script,
)
seeds = st.integers(0, 2**63 - 1)


def key_paths(obj, path=()):
    """Every path to a dictionary key in a JSON tree."""
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield path + (k,)
            yield from key_paths(v, path + (k,))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from key_paths(v, path + (i,))


def rename_key(obj, path, new):
    obj = copy.deepcopy(obj)
    parent = obj
    for step in path[:-1]:
        parent = parent[step]
    parent[new] = parent.pop(path[-1])
    return obj


def drop_key(obj, path):
    obj = copy.deepcopy(obj)
    parent = obj
    for step in path[:-1]:
        parent = parent[step]
    del parent[path[-1]]
    return obj


@pytest.mark.parametrize(
    "d", [heegaard_splitting(2), superadd_decomposition(2, 3), sixth_sharp_decomposition(7), sixth_sharp_decomposition(INF)]
)
def test_round_trip_fixtures(d):
    text = serialize_decomposition(d)
    assert parse_decomposition(text) == d
    assert serialize_decomposition(parse_decomposition(text)) == text


def test_weights_and_rationals_format():
    v = decomposition_to_dict(sixth_sharp_decomposition(INF))
    assert ["inf" in json.dumps(s["punctures"]) for s in v["surfaces"]].count(True) >= 1
    assert dump_rational(Fraction(-3, 6)) == "-1/2"
    assert load_rational("7/3", "x") == Fraction(7, 3)
    for bad in ("7/0", "1.5", 3, "x"):
        with pytest.raises(SchemaError):
            load_rational(bad, "x")


@pytest.mark.parametrize(
    "mutate",
    [
        lambda v: v.update(format_version=2),
        lambda v: v["surfaces"][0].update(role="thicc"),
        lambda v: v["surfaces"][0].update(punctures=[1]),
        lambda v: v["surfaces"][0].update(genus=-1),
        lambda v: v["pieces"][0]["zero_handles"].append({"type": "cube"}),
        lambda v: v["pieces"][0].update(minus="S"),
        lambda v: v["surfaces"][1].update(punctures=[2, True]),
    ],
)
def test_malformed_values_are_rejected(mutate):
    v = decomposition_to_dict(superadd_decomposition(1, 2))
    mutate(v)
    with pytest.raises(SchemaError):
        decomposition_from_dict(v)


def test_not_json():
    with pytest.raises(SchemaError):
        parse_decomposition("{nope")


@settings(max_examples=200, deadline=None)
@given(seeds, st.integers(0, 40))
def test_random_round_trip(seed, index):
    d = generate_random_decomposition(FuzzConfig(seed=seed), index)
    text = serialize_decomposition(d)
    assert parse_decomposition(text) == d
    assert serialize_decomposition(parse_decomposition(text)) == text


@settings(max_examples=200, deadline=None)
@given(seeds, st.integers(0, 40), st.data())
def test_mutated_field_names_are_rejected(seed, index, data):
    v = decomposition_to_dict(generate_random_decomposition(FuzzConfig(seed=seed), index))
    path = data.draw(st.sampled_from(list(key_paths(v))))
    new = data.draw(st.text(min_size=1, max_size=12).filter(lambda s: s != path[-1]))
    with pytest.raises(SchemaError):
        decomposition_from_dict(rename_key(v, path, new))
    with pytest.raises(SchemaError):
        decomposition_from_dict(drop_key(v, path))


def _moves_for(seed, index, n=3):
    d = generate_random_decomposition(FuzzConfig(seed=seed), index)
    steps = []
    cur = d
    for kind, params in candidate_moves(d)[:n]:
        try:
            cur, rec = apply_move(cur, kind, params)
        except OrbcalcError:
            continue
        steps.append((rec.kind, rec.params))
    return d, steps


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(0, 40), st.data())
def test_scripts_records_and_sequences_round_trip(seed, index, data):
    d, steps = _moves_for(seed, index)
    seq = run_script(d, steps)
    assert parse_script(serialize_script(steps)) == [(k, p) for k, p in steps]
    for rec in seq.records:
        assert record_from_dict(json.loads(json.dumps(record_to_dict(rec)))) == rec
        assert record_from_dict(record_to_dict(rec)).params == rec.params
    back = sequence_from_dict(json.loads(json.dumps(sequence_to_dict(seq))))
    assert back == seq
    if steps:
        script = json.loads(serialize_script(steps))
        path = data.draw(st.sampled_from(list(key_paths(script))))
        with pytest.raises(SchemaError):
            script_from_dict(rename_key(script, path, path[-1] + "_"))


def test_gallery_script_round_trip():
    steps = [("create_removable", {"piece": "B1", "ghost_arc": 0}), ("amalgamate", {"thick1": "H1", "thick2": "H2", "thin": "S"})]
    text = serialize_script(steps)
    assert serialize_script(parse_script(text)) == text


def test_report_to_dict_is_json_and_exact():
    v = report_to_dict(run_named_example("sixth-sharp", a=12))
    assert json.loads(json.dumps(v)) == v
    assert v["quantities"]["netX"] == "1/4" and v["ok"] is True
