import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmc.errors import DomainError
from cmc.hyperbolic import (
    ModelPoint,
    PolarPoint,
    conformal_factor,
    exp_map,
    from_polar,
    hyp_distance,
    mobius_translate,
    to_polar,
    translate,
)

radius = st.floats(0.0, 0.95)
angle = st.floats(0.0, 2 * math.pi, exclude_max=True)
disk_points = st.builds(lambda r, t: ModelPoint(r * math.cos(t), r * math.sin(t)), radius, angle)


def test_conformal_factor_values():
    assert conformal_factor(0.0) == 2.0
    np.testing.assert_allclose(conformal_factor(0.5), 8.0 / 3.0, rtol=1e-15)


def test_conformal_factor_integrates_to_distance():
    # the distance from 0 to (t, 0) is the integral of lambda along the segment
    t = math.tanh(0.5)
    x = np.linspace(0.0, t, 20001)
    lam = conformal_factor(x)
    integral = np.sum(0.5 * (lam[1:] + lam[:-1]) * np.diff(x))
    np.testing.assert_allclose(integral, hyp_distance(ModelPoint(0, 0), ModelPoint(t, 0)), rtol=1e-8)
    np.testing.assert_allclose(integral, 1.0, rtol=1e-8)


def test_conformal_factor_rejects_boundary():
    with pytest.raises(DomainError):
        conformal_factor(1.0)


def test_model_point_outside_disk():
    with pytest.raises(DomainError):
        ModelPoint(0.8, 0.6)


def test_distance_basic_values():
    o = ModelPoint(0.0, 0.0)
    assert hyp_distance(o, o) == 0.0
    np.testing.assert_allclose(hyp_distance(o, ModelPoint(math.tanh(0.5), 0.0)), 1.0, rtol=1e-14)
    np.testing.assert_allclose(hyp_distance(o, ModelPoint(0.3, 0.0)), 2 * math.atanh(0.3), rtol=1e-14)


def test_distance_rejects_boundary_points():
    with pytest.raises(DomainError):
        hyp_distance(0.0, 1.0 + 0j)


@settings(max_examples=200)
@given(disk_points, disk_points, disk_points)
def test_distance_is_a_metric(p, q, r):
    dpq, dqp = hyp_distance(p, q), hyp_distance(q, p)
    assert dpq >= 0.0
    assert dpq == pytest.approx(dqp, abs=1e-12)
    assert hyp_distance(p, r) <= dpq + hyp_distance(q, r) + 1e-10


@given(disk_points, disk_points)
def test_identity_of_indiscernibles(p, q):
    if p == q:
        assert hyp_distance(p, q) == 0.0
    elif abs(p.z - q.z) > 1e-9:
        assert hyp_distance(p, q) > 0.0


def test_polar_round_trip_examples():
    assert to_polar(ModelPoint(0, 0)) == PolarPoint(0.0, 0.0)
    pp = to_polar(ModelPoint(math.tanh(1.0), 0.0))
    np.testing.assert_allclose([pp.rho, pp.theta], [2.0, 0.0], atol=1e-14)


@settings(max_examples=200)
@given(disk_points)
def test_polar_round_trip(p):
    q = from_polar(to_polar(p))
    np.testing.assert_allclose([q.x, q.y], [p.x, p.y], atol=1e-12)


def test_polar_normalizes_theta():
    assert PolarPoint(1.0, -math.pi / 2).theta == pytest.approx(1.5 * math.pi)
    with pytest.raises(DomainError):
        PolarPoint(-0.1, 0.0)


def test_translate_origin():
    p = translate(ModelPoint(0, 0), 0.0, 1.0)
    pp = to_polar(p)
    np.testing.assert_allclose([pp.rho, pp.theta], [1.0, 0.0], atol=1e-14)
    q = translate(ModelPoint(0, 0), 0.3, -2.0)
    np.testing.assert_allclose(to_polar(q).rho, 2.0, rtol=1e-13)
    np.testing.assert_allclose(to_polar(q).theta, 0.3 + math.pi, rtol=1e-13)


@settings(max_examples=200)
@given(disk_points, disk_points, angle, st.floats(-3.0, 3.0))
def test_translate_is_isometry(p, q, theta0, s):
    d0 = hyp_distance(p, q)
    d1 = hyp_distance(translate(p, theta0, s), translate(q, theta0, s))
    assert d1 == pytest.approx(d0, rel=1e-9, abs=1e-10)


@given(disk_points, angle, st.floats(-3.0, 3.0))
def test_translate_inverse(p, theta0, s):
    back = translate(translate(p, theta0, s), theta0, -s)
    np.testing.assert_allclose([back.x, back.y], [p.x, p.y], atol=1e-12)


def test_exp_map_moves_unit_speed():
    z = np.array([0.1 + 0.2j, -0.5j, 0.3])
    d = np.exp(1j * np.array([0.3, 2.0, -1.0]))
    for t in (0.1, 0.7, 2.5):
        np.testing.assert_allclose(hyp_distance(z, exp_map(z, d, t)), t, rtol=1e-12)


def test_exp_map_follows_geodesic():
    # midpoint of the exp path lies at half the distance from both ends
    z, d = 0.2 - 0.3j, np.exp(0.9j)
    a, m, b = z, exp_map(z, d, 0.6), exp_map(z, d, 1.2)
    np.testing.assert_allclose(hyp_distance(a, m) + hyp_distance(m, b), hyp_distance(a, b), rtol=1e-12)


def test_mobius_translate_sends_origin():
    a = 0.4 - 0.2j
    assert mobius_translate(0.0, a) == pytest.approx(a)
