import math

import pytest

import symgap


def test_oracle_counts_queries():
    f = symgap.additive([1.0, 2.0, 3.0])
    assert f([0, 2]) == 4.0
    assert f.query_count == 1
    assert f.with_fresh_counter().query_count == 0


def test_descriptor_round_trip():
    f = symgap.budget_additive([1, 1, 1, 2], 2)
    g = symgap.from_descriptor(symgap.descriptor(f))
    assert g([3]) == f([3]) == 2.0


def test_structure_check():
    assert symgap.check_monotone_submodular(symgap.coverage([1, 2], [[0], [0, 1], []]))["pass"]
    square = symgap.custom(4, "square", lambda s: float(len(s) ** 2))
    report = symgap.check_monotone_submodular(square)
    assert not report["pass"]


def test_psi_values():
    assert symgap.psi(1.0, 0.5, 0.5) == pytest.approx(0.75)
    assert symgap.psi_tilde(1.0, 0.1, 0.45, 0.55) == pytest.approx(0.75)


def test_gap_midpoint():
    f = symgap.gap_instance(200, 0.5)
    half = 1 - math.exp(-0.5)
    v, se = symgap.multilinear_F(f, [half] * 400, mode="exact_blockwise")
    assert se == 0.0
    assert v == pytest.approx(4 * math.exp(-0.5) - 4 * math.exp(-1), abs=0.01)


def test_greedy_and_opt():
    f = symgap.coverage([3, 3, 2], [[0, 1], [1], [2]])
    assert symgap.greedy_cpp([f], 2) == [0, 2]
    items, value = symgap.exhaustive_opt_cpp([f], 2)
    assert value == pytest.approx(8.0)


def test_vcg_payments_nonnegative():
    a = symgap.polar(4, [0, 1], 0.1)
    b = symgap.polar(4, [2, 3], 0.1)
    bundles, pays = symgap.vcg_auction([a, b])
    assert sorted(bundles[0] + bundles[1]) == [0, 1, 2, 3]
    assert all(p >= -1e-12 for p in pays)


def test_poisson_midr_and_refusal():
    d = symgap.poisson_midr(symgap.additive([1.0, 0.0]), 1)
    assert d["value"] == pytest.approx(1 - math.exp(-1), abs=1e-6)
    with pytest.raises(ValueError):
        symgap.poisson_midr(symgap.budget_additive([1, 1, 1, 2], 2), 2)


def test_separation():
    assert symgap.separate_quadrant([(0.2, 0.1), (0.9, 0.3)], (0.5, 0.5))["branch"] == "witness"
    assert symgap.separate_quadrant([(0.1, 0.6)], (0.5, 0.5))["branch"] == "line"


def test_run_experiment_reproducible():
    params = {"m": 100, "beta": 0.2, "trials": 2000}
    a = symgap.run_experiment("chernoff", params, seed=7)
    b = symgap.run_experiment("chernoff", params, seed=7)
    assert a == b and a["pass"]
    assert "suite" in symgap.experiment_names()


def test_unknown_parameter_rejected():
    with pytest.raises(ValueError):
        symgap.run_experiment("gap955", {"nope": 1})
