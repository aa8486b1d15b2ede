import math

import pytest

import uboundlab as ubl


def test_cc_distance_axis_value():
    # full-circle geodesic: d((0,0,1)) = sqrt(4 pi)
    assert ubl.cc_distance([0.0, 0.0, 1.0]) == pytest.approx(math.sqrt(4 * math.pi), rel=1e-10)
    assert ubl.cc_distance([3.0, 4.0, 0.0]) == pytest.approx(5.0)


def test_group_law_and_dilation():
    prod = ubl.group_mul([2.0, 0.0, 0.0], [0.0, 3.0, 0.0])
    assert prod == pytest.approx([2.0, 3.0, 3.0])  # z = xy/2
    assert ubl.dilate(2.0, [1.0, 0.0, 1.0]) == pytest.approx([2.0, 0.0, 4.0])
    g = [0.3, -0.7, 0.4]
    assert ubl.cc_distance(ubl.dilate(1.7, g)) == pytest.approx(1.7 * ubl.cc_distance(g), rel=1e-10)


def test_oracle_cross_check():
    r = ubl.cc_distance_oracle([0.6, -0.4, 0.3], segments=32, restarts=4)
    assert r["length"] == pytest.approx(ubl.cc_distance([0.6, -0.4, 0.3]), rel=3e-3)
    assert r["residual"] < 1e-6


def test_theorem_constants():
    C, D = ubl.constants_thm2_5(1.0, 2.0)
    assert (C, D) == (pytest.approx(0.5), pytest.approx(2.5))
    C6, D6 = ubl.constants_thm2_6(0.5, 2.5, 1.0, 1.0)
    assert (C6, D6) == (pytest.approx(1.0), pytest.approx(7.0))


def test_normalize_and_sampling():
    logZ, tol = ubl.normalize("gauss1d")
    assert logZ == pytest.approx(0.5 * math.log(math.pi), abs=1e-7)
    xs1, diag1 = ubl.sample("gauss1d", 5000, seed=42)
    xs2, _ = ubl.sample("gauss1d", 5000, seed=42)
    assert (xs1 == xs2).all()
    assert 0.05 < diag1["acceptance_rate"] < 0.8
    m2 = float((xs1[:, 0] ** 2).mean())
    assert m2 == pytest.approx(0.5, abs=0.05)


def test_poincare_check_and_gap():
    summary = ubl.run_check("gauss1d", "poincare", q=2.0, constant=2.0, n=8000, seed=3)
    assert summary["n_violated"] == 0
    gap = ubl.fd_spectral_gap("power", beta=1.0, p=2.0, R=8.0, grid_n=1024)
    assert gap == pytest.approx(2.0, abs=0.02)


def test_muckenhoupt_series_grows():
    rows = ubl.counterexample_series(1.0, 2.0, 0.5, q=2.0, n_max=3)
    logbs = [r["log_b"] for r in rows]
    assert logbs == sorted(logbs)
    assert all(r["log_b"] >= r["log_lower_bound"] for r in rows)


def test_no_ls_table_diverges():
    table = ubl.no_ls_table(n=8000, t_grid=[4.0, 16.0])
    rows = table["kaplan"]
    assert rows[-1]["ratio"] > 2.0 * rows[0]["ratio"]


def test_input_errors_map_to_value_error():
    with pytest.raises(ValueError):
        ubl.cc_distance([1.0, 2.0])  # wrong arity
