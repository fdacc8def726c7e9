import math

import pytest

import skl


def test_fejer_and_chebyshev():
    assert skl.fejer(5, 0.0) == pytest.approx(5.0)
    assert skl.chebyshev_first(7, math.cos(0.4)) == pytest.approx(math.cos(2.8))


def test_propagation_closed_form():
    f = skl.propagation_closed_form(3, 2)
    assert f["p"] == 3
    assert len(f["values"]) == 3


def test_tree_design_report():
    d = skl.design_tree_kernel(5, 0.3, 40, 0.0)
    assert d["report"]["pass"]["all"]
    h = skl.tree_transform(5, 0.3, 40, 0.0, [0.0, 1.0])
    assert len(h) == 2


def test_selberg_pair():
    assert skl.profile_h(1.0, 0.0) == pytest.approx(1.0)
    assert skl.fourier_h(1.5, 2.0) == pytest.approx(math.cos(3.0) / math.cosh(math.pi), abs=1e-6)
    assert skl.profile_q(2.0, 0.0) == pytest.approx(1.0 / math.cosh(2.0))
    assert abs(skl.truncated_transform(3.0, 0.5) - skl.profile_h(3.0, 0.5)) <= 0.5 / math.sinh(3.0) + 1e-9


def test_quasimode():
    assert skl.laplace_defect([(2.0, 1.0), (4.0, 1.0)], 3.0) == pytest.approx(math.sqrt(37.0))
    rep = skl.projection_bound([(20.0, 1.0), (21.0, 0.1)], 20.0, 0.5)
    assert rep["holds"]


def test_errors_are_raised():
    with pytest.raises(skl.SklError):
        skl.design_tree_kernel(5, 0.7, 40, 0.0)


def test_run_command_is_deterministic():
    a, passed, csv = skl.run("quasimode", trials=50, seed=3)
    b, _, _ = skl.run("quasimode", trials=50, seed=3)
    assert passed
    assert a == b
    assert a["config"]["seed"] == 3
    assert csv.startswith("section,")
