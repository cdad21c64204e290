"""Sea-level case study: fitted parameters, golden rows, objective surface."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tailmax import OptimizerConfig, SpecError, SurvivalEvc, TawnTypeI, TawnTypeII
from tailmax import sealevel


def test_label_catalog():
    assert sealevel.LABELS == ("I-1", "I-2", "I-3", "II-1", "II-2")
    with pytest.raises(SpecError):
        sealevel.get_model("I-9")


def test_fitted_parameters():
    m = sealevel.get_model("I-3").stdf
    assert isinstance(m, TawnTypeI)
    assert (m.s, m.r, m.theta) == (7.44, 2.21, (0.23, 0.23, 0.55))
    m = sealevel.get_model("II-2").stdf
    assert isinstance(m, TawnTypeII)
    assert (m.s, m.r, m.t, m.phi) == (1.69, 1.25, 7.44, 0.74)


def test_inert_placeholder_parameters():
    # I-1, I-2 fix the first two asymmetry weights at 1: the r-term is exactly
    # zero, so any admissible r yields the same function
    rng = np.random.default_rng(1)
    for label in ("I-1", "I-2"):
        base = sealevel.get_model(label).stdf
        other = TawnTypeI(s=base.s, r=5.0, theta=base.theta)
        for _ in range(25):
            x = rng.uniform(0.05, 5.0, 3).tolist()
            assert base.value(x) == other.value(x)
    # II-1 fixes phi = 1, so t is inert
    base = sealevel.get_model("II-1").stdf
    other = TawnTypeII(s=base.s, r=base.r, t=9.0, phi=1.0)
    for _ in range(25):
        x = rng.uniform(0.05, 5.0, 3).tolist()
        assert base.value(x) == other.value(x)


def test_reference_maximizers_satisfy_unit_product():
    for m in sealevel.MODELS:
        prod = math.prod(m.expected.b_star)
        assert 0.995 <= prod <= 1.005


def test_single_row_reproduces_reference():
    rows = sealevel.report(OptimizerConfig(starts=6))
    row = {r.label: r for r in rows}["I-2"]
    assert row.passed
    assert row.lam_diff <= sealevel.LAMBDA_TOL
    assert row.lam_star_diff <= sealevel.LAMBDA_TOL
    assert max(row.b_star_diff) <= sealevel.B_STAR_TOL


def test_rows_satisfy_structural_invariants():
    rows = sealevel.report(OptimizerConfig(starts=6))
    for r in rows:
        # the diagonal is feasible, so it cannot beat the maximum
        assert r.lam <= r.result.lambda_star + 1e-9
        assert abs(math.prod(r.result.b_star) - 1.0) <= 1e-10
    # coordinates 1 and 2 are exchangeable in every fitted model
    for r in rows:
        assert abs(r.result.b_star[0] - r.result.b_star[1]) <= 1e-3


def test_format_report_layout():
    rows = sealevel.report(OptimizerConfig(starts=6))
    text = sealevel.format_report(rows)
    lines = text.splitlines()
    assert lines[0].startswith("model")
    assert len(lines) == 2 + len(rows)
    for r, line in zip(rows, lines[2:]):
        assert line.startswith(r.label)
        assert ("pass" in line) != ("FAIL" in line)


def test_surface_zero_range_collapses_to_diagonal():
    grid = sealevel.surface("I-1", 3, 0.0)
    assert grid.shape == (9, 3)
    assert np.all(grid[:, :2] == 0.0)
    assert np.all(grid[:, 2] == grid[0, 2])
    assert abs(grid[0, 2] - 0.356) <= 1e-3


def test_surface_symmetric_for_exchangeable_model():
    grid = sealevel.surface("I-1", 21, math.log(5.0))
    vals = grid[:, 2].reshape(21, 21)
    assert_allclose(vals, vals.T, rtol=1e-12)


def test_surface_grid_maximum_reference():
    grid = sealevel.surface("II-1", 201, math.log(5.0))
    assert abs(grid[:, 2].max() - 0.378) <= 2e-3


def test_surface_matches_direct_evaluation():
    grid = sealevel.surface("I-3", 5, 1.0)
    tc = SurvivalEvc(sealevel.get_model("I-3").stdf)
    for x1, x2, lam in grid:
        assert_allclose(tc.value([math.exp(x1), math.exp(x2), math.exp(-x1 - x2)]), lam, rtol=1e-12)


def test_surface_rejects_bad_arguments():
    with pytest.raises(SpecError):
        sealevel.surface("I-1", 1, 1.0)
    with pytest.raises(SpecError):
        sealevel.surface("I-1", 5, -1.0)
    with pytest.raises(SpecError):
        sealevel.surface("nope", 5, 1.0)
