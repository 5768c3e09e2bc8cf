import math

import pytest

import blocksymm


def test_remainders_match_closed_forms():
    assert blocksymm.remainder_rn(2.0, 16, 2.0, 0.1) == pytest.approx(0.4, rel=1e-12)
    assert blocksymm.remainder_r1(1.0, 64, 2.0, 0.1) == pytest.approx(0.1, rel=1e-12)
    assert blocksymm.remainder_r2(2.0, 0.04, 5.0) == pytest.approx(0.5)


def test_concentration_examples():
    assert blocksymm.concentration_general(math.exp(2), 2 * math.exp(-10)) == pytest.approx(0.4)
    bound = blocksymm.concentration_subexp(math.exp(math.e), 10000, 1.0, 1.0, 1.0, 1.0, 0.5)
    assert bound == pytest.approx(math.e / 100)
    with pytest.raises(blocksymm.VacuousBoundError):
        blocksymm.concentration_general(2.0, 1.0)


def test_enumeration_and_ks():
    e = blocksymm.exact_enumeration(2, 1, 1)
    assert e["lhs"] == pytest.approx(0.5)
    assert e["mid"] == pytest.approx(0.5)
    assert blocksymm.kolmogorov_distance([1.0, 2.0], [1.0, 3.0]) == pytest.approx(0.5)
    assert blocksymm.hoeffding_factor(2.0, 1.0, 1, 10) == pytest.approx(2 * math.log(2) / 10)


def test_validation_names_field():
    cfg = {
        "dgp": {"kind": "iid_gaussian", "n": 10, "p": 2},
        "scheme": {"b": 3},
        "truncation": {"U": 1.0},
        "checks": ["prop2"],
    }
    with pytest.raises(blocksymm.ConfigError, match="scheme.b"):
        blocksymm.validate_config(cfg)


def test_run_independence_reduction():
    cfg = {
        "dgp": {"kind": "iid_gaussian", "n": 16, "p": 3},
        "scheme": {"b": 1},
        "psi": {"kind": "power", "q": 2},
        "reps": 2000,
        "rho_reps": 1000,
        "seed": 4,
        "checks": ["independence-reduction"],
    }
    code, reports = blocksymm.run(cfg)
    assert code == 0
    assert len(reports) == 1
    assert reports[0]["check"] == "independence-reduction"
    assert {c["verdict"] for c in reports[0]["inequalities"]} <= {"holds", "holds-within-noise"}
