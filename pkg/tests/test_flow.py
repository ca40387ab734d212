import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmc.curve import DiscreteCurve, perturbed_circle
from cmc.errors import ConvergenceError, DomainError, FocalError
from cmc.flow import (
    CurvatureTrajectory,
    curvature_report,
    evolve_curvature,
    evolve_curvature_ode,
    offset_curve,
    offset_nodes,
)


def test_trajectory_classification():
    assert CurvatureTrajectory.from_k0(1.0).regime == "unit"
    assert CurvatureTrajectory.from_k0(0.3).regime == "sub"
    assert CurvatureTrajectory.from_k0(-2.0).regime == "super"
    assert CurvatureTrajectory.from_k0(-1.0).k_tilde is None
    assert CurvatureTrajectory.from_k0(3.0).k_tilde == pytest.approx(0.5)


def test_unit_curvature_is_fixed():
    assert evolve_curvature(1.0, 3.0) == 1.0


def test_zero_time_is_identity():
    for k0 in (-3.0, -0.5, 0.0, 0.5, 2.0):
        assert evolve_curvature(k0, 0.0) == pytest.approx(k0, abs=1e-15)


def test_circle_of_radius_R_becomes_circle_of_radius_R_plus_t():
    for R in (0.2, 1.0, 3.0):
        for t in (0.1, 0.5, 2.0):
            assert evolve_curvature(1 / math.tanh(R), t) == pytest.approx(1 / math.tanh(R + t), rel=1e-13)


def test_excluded_and_blowup():
    with pytest.raises(DomainError):
        evolve_curvature(-1.0, 0.5)
    with pytest.raises(DomainError):
        evolve_curvature_ode(-1.0, 0.5)
    with pytest.raises(DomainError):
        evolve_curvature(0.5, -0.1)
    shift = CurvatureTrajectory.from_k0(-3.0).shift
    with pytest.raises(DomainError):
        evolve_curvature(-3.0, shift + 0.01)
    with pytest.raises(ConvergenceError):
        evolve_curvature_ode(-3.0, shift + 0.01)


@settings(max_examples=150, deadline=None)
@given(st.floats(-0.999, 6.0), st.floats(0.0, 3.0))
def test_closed_form_matches_ode(k0, t):
    if abs(k0 + 1.0) < 1e-3:
        return
    closed = evolve_curvature(k0, t)
    np.testing.assert_allclose(evolve_curvature_ode(k0, t), closed, rtol=1e-10, atol=1e-10)


@given(st.floats(-0.99, 5.0), st.floats(0.0, 4.0), st.floats(0.0, 4.0))
def test_flow_is_a_semigroup(k0, s, t):
    once = evolve_curvature(k0, s + t)
    twice = evolve_curvature(evolve_curvature(k0, s), t)
    assert once == pytest.approx(twice, rel=1e-9, abs=1e-12)


def test_offset_of_circle_is_circle():
    c = DiscreteCurve.circle(0.7, 32)
    np.testing.assert_allclose(offset_curve(c, 0.4).g, 1.1, rtol=1e-14)


def test_offset_nodes_rejects_negative_time():
    with pytest.raises(DomainError):
        offset_nodes(DiscreteCurve.circle(0.5, 16), -1.0)


def test_offset_loses_star_shape():
    # a deep dent produces crossing normals once the flow passes its focal distance
    c = DiscreteCurve.from_function(lambda th: 0.3 + 0.25 * np.cos(th) ** 20, 64)
    with pytest.raises(FocalError):
        offset_nodes(c, 3.0)


def test_circle_report_exact():
    rep = curvature_report(DiscreteCurve.circle(1.0, 64), 0.5)
    np.testing.assert_allclose(rep["k_after_closed_form"], 1 / math.tanh(1.5), rtol=1e-14)
    np.testing.assert_allclose(rep["k_after_discrete"], rep["k_after_closed_form"], atol=1e-13)


def test_perturbed_report_second_order():
    errs = []
    for n in (64, 128):
        rep = curvature_report(perturbed_circle(0.5, 0.03, 2, n), 0.4)
        err = np.abs(rep["k_after_discrete"] - rep["k_after_closed_form"]).max()
        assert err <= 2 * (2 * math.pi / n) ** 2
        errs.append(err)
    assert errs[1] < errs[0]
