"""Smoke test for the Python bindings (run with pytest, or directly)."""

import json
from fractions import Fraction
from pathlib import Path

import codedpir_py as cp

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture(name):
    return (FIXTURES / name).read_text()


def test_capacity():
    assert Fraction(cp.capacity(5, 3, 2)) == Fraction(5, 8)
    assert Fraction(cp.capacity(7, 3)) == Fraction(4, 7)


def test_code_info():
    info = json.loads(cp.code_info(fixture("c8.json")))
    assert (info["n"], info["k"], info["d_min"]) == (7, 3, 4)
    assert info["necessary_condition"] is True
    rm = json.loads(cp.code_info(json.dumps({"family": "reed-muller", "v": 1, "m": 3})))
    assert (rm["n"], rm["k"], rm["d_min"]) == (8, 4, 4)


def test_optimize():
    r = json.loads(cp.optimize(fixture("c8.json")))
    assert Fraction(r["rate"]) == Fraction(4, 7)
    r = json.loads(cp.optimize(fixture("c11_colluding.json")))
    assert Fraction(r["rate"]) == Fraction(1, 6)


def test_simulate_all_protocols():
    for proto, name, rate in [("p1", "c1.json", None), ("p2", "c8.json", Fraction(4, 7)), ("p3", "c12_colluding.json", Fraction(5, 12))]:
        t = json.loads(cp.simulate(proto, fixture(name), files=2, request=1, seed=3))
        assert t["recovered"], proto
        assert t["decoded_digest"] == t["stored_digest"]
        if rate is not None:
            assert Fraction(t["rate"]) == rate
    a = cp.simulate("p2", fixture("c8.json"), seed=5)
    assert a == cp.simulate("p2", fixture("c8.json"), seed=5)


def test_audit():
    rep = json.loads(cp.audit_privacy("p3", fixture("c11_colluding.json"), trials=2000))
    assert rep["pass"]
    assert all(len(s["set"]) == 2 for s in rep["sets"])


def test_fixtures_and_report():
    fx = json.loads(cp.builtin_fixtures())
    assert len(fx) == len(list(FIXTURES.glob("*.json")))
    c1 = next(f for f in fx if f["id"] == "C1")
    row = json.loads(cp.report_row(json.dumps(c1), round_trip=True))
    assert row["matches"] and row["recovered"]
    assert Fraction(row["r_opt"]) == Fraction(2, 5)


def test_errors():
    import pytest

    with pytest.raises(ValueError):
        cp.code_info("{}")
    with pytest.raises(ValueError):
        cp.simulate("p9", fixture("c1.json"))


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            fn()
            print("ok", name)
