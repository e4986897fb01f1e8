import math

import numpy as np
import pytest

import hausdim


def test_q4_fixtures():
    for b in ([2], [1, 3]):
        d = hausdim.dimension_bound(4, b)
        assert abs(d["bound"] - 0.5) < 1e-12
    assert hausdim.dimension_bound(4, [1])["symmetrized"]


def test_vertices_and_basis():
    v = hausdim.vertices(4, [2])
    assert v.shape == (2, 4)
    assert np.allclose(np.abs(v), 1.0)
    w = hausdim.wb_basis(6, [1, 5])
    assert w.shape == (6, 2)
    assert np.allclose(w.T @ w, np.eye(2))
    assert np.allclose(w.sum(axis=0), 0.0)


def test_riesz_closed_forms():
    for q in range(3, 13):
        assert abs(hausdim.kappa_prime_riesz(q) - hausdim.kappa_prime_1(q, [1, q - 1])) < 1e-9
    assert abs(hausdim.bound_theorem3(4) - 0.5) < 1e-15
    assert abs(hausdim.bound_prop4_substituted(16) - hausdim.bound_theorem3(16)) < 1e-9
    assert abs(hausdim.log_integral(4) + 1.73582167561819142835) < 1e-9
    assert hausdim.fan_main_term(1.0, 8) == pytest.approx(1 - (1 - math.log(2)) / math.log(8))


def test_spectrum_and_martingale():
    spec = dict(hausdim.riesz_spectrum(1.0, 3, 2))
    assert len(spec) == 9 and abs(spec[4] - 0.25) < 1e-15
    levels = hausdim.martingale_levels(list(range(27)), 3, 3)
    assert [len(x) for x in levels] == [1, 3, 9, 27]
    assert levels[0][0] == pytest.approx(13.0)
    r = hausdim.riesz_growth_check(1.0, 3, 5, 2.0)
    assert r["pass"] and r["checks"] > 0


def test_errors_map_to_python_exceptions():
    with pytest.raises(hausdim.InvalidInput):
        hausdim.bound_prop4(5)
    with pytest.raises(ValueError):
        hausdim.dimension_bound(4, [7])
    with pytest.raises(hausdim.ResourceError):
        hausdim.riesz_spectrum(1.0, 3, 20)


def test_cli_in_process():
    rep = hausdim.report("bound", q=4, B="2")
    assert set(rep) >= {"version", "config", "results", "checks"}
    assert rep["results"]["rows"][0]["bound"] == pytest.approx(0.5)
    code, _, err = hausdim.run("verify", suite="nope")
    assert code == 2 and "nope" in err
    csv = hausdim.run("sweep", q_lo=8, q_hi=32, step="x2", estimates=False, format="csv")[1]
    assert csv.splitlines()[0].startswith("q,B,kappa_prime_1,bound")
    assert len(csv.strip().splitlines()) == 4
