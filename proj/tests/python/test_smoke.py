import pathlib

import pytest

import padicaut

DATA = pathlib.Path(__file__).resolve().parents[2] / "data"


def test_version():
    assert padicaut.__version__ == "0.1.0"


def test_bounds():
    b = padicaut.bounds(4, 3)
    assert b["M"] == 2 and b["M_prime"] == 2
    b2 = padicaut.bounds(2, 2)
    assert (b2["M"], b2["M_prime"], b2["case"]) == (3, 4, "C")


def test_prime_search():
    assert padicaut.prime_search(3, 1) == 2
    assert padicaut.prime_search(5, 2) == 3


def test_optimal_group():
    assert padicaut.optimal_group(4, 3)["closure_order"] == 18


def test_linearize():
    cert = padicaut.linearize((DATA / "order9_a4.txt").read_text(), 3)
    assert cert["passed"] and cert["bound_saturated"]


def test_flow():
    f = padicaut.flow("d=1; ring=Q\nf1 = 4*x1 + 3*x1^2\n", 3)
    assert f["iterates_verified"]


def test_unitri_series():
    s = padicaut.unitri_series(3, ["E12", "E23"], 3)
    assert s["derived_orders"] == [27, 3, 1]
    assert s["class"] == 2 and s["dl"] == 2


def test_vdl_witness():
    w = padicaut.vdl_witness(3)
    assert w["faithful"] and w["powers_noncommuting"]
    assert w["dl"] == 2 and w["class"] == 3


def test_theorem_b_exp_family():
    r = padicaut.theorem_b_exp_family(3)
    assert (r["dl"], r["d"], r["class"]) == (2, 2, 3)
    assert r["equality"]


def test_errors():
    with pytest.raises(padicaut.InputError):
        padicaut.flow("d=1; ring=Q\nf1 = x1 + 1\n", 3)
    with pytest.raises(ValueError):
        padicaut.bounds(2, 4)
