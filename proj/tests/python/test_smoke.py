import json

import pytest

mdxpy = pytest.importorskip("mdxpy")

EXPLICIT = {
    "schema_version": 1,
    "ground_set": ["a", "b"],
    "family": {"kind": "explicit", "members": [["a", "b"]]},
    "requirements": {"kind": "table", "values": [{"member": ["a", "b"], "pi": "3/5"}]},
    "marginals": {"a": "3/10", "b": "3/10"},
}


def test_check_feasible():
    assert mdxpy.check(json.dumps(EXPLICIT)) == {"feasible": True}


def test_check_infeasible_reports_member():
    doc = dict(EXPLICIT, marginals={"a": "1/5", "b": "1/5"})
    out = mdxpy.check(json.dumps(doc))
    assert out["feasible"] is False
    assert out["member"] == "{a,b}"
    assert out["gap"] == "1/5"


def test_decompose_exact_weights():
    res = json.loads(mdxpy.decompose(json.dumps(EXPLICIT)))
    assert res["schema_version"] == 1
    weights = {tuple(entry["set"]): entry["weight"] for entry in res["decomposition"]}
    assert weights == {(): "2/5", ("a",): "3/10", ("b",): "3/10"}


def test_sample_deterministic():
    res = mdxpy.decompose(json.dumps(EXPLICIT))
    draws = mdxpy.sample(res, 5, 7)
    assert len(draws) == 5
    assert draws == mdxpy.sample(res, 5, 7)


def test_invalid_input_raises():
    with pytest.raises(mdxpy.MdxError):
        mdxpy.decompose("{")


def test_committee_app_law():
    doc = {
        "schema_version": 1,
        "ground_set": ["a", "b"],
        "family": {"kind": "committee", "votes": [1, 1], "k": 1},
        "requirements": {"kind": "derived"},
    }
    out = mdxpy.app("committee", json.dumps(doc))
    assert out["k"] == 1
    law = {tuple(entry["set"]): entry["weight"] for entry in json.loads(out["law"])["decomposition"]}
    assert law == {("a",): "1/2", ("b",): "1/2"}


def test_normalize_rational():
    assert mdxpy.normalize_rational("0.35") == "7/20"
