import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmc.curve import (
    DiscreteCurve,
    curvature_of_samples,
    curve_from_dict,
    discrete_curvature,
    load_curve,
    perturbed_circle,
    radial_graph_curvature,
    save_curve,
)
from cmc.errors import CurveFormatError, DomainError
from cmc.hyperbolic import complex_to_polar, exp_map


def test_circle_curvature_is_coth():
    for R in (0.3, 1.0, 2.5):
        c = DiscreteCurve.circle(R, 64)
        np.testing.assert_allclose(c.curvature(), 1.0 / math.tanh(R), rtol=1e-13)
    np.testing.assert_allclose(discrete_curvature(DiscreteCurve.circle(1.0, 32), 5), 1.3130352854993312, rtol=1e-12)


def test_large_circle_tends_to_horocycle():
    assert discrete_curvature(DiscreteCurve.circle(15.0, 32), 0) == pytest.approx(1.0, abs=1e-12)


def test_off_centre_circle_curvature_converges():
    # the circle of radius R about a point at distance a from 0, as a radial graph
    R, a = 0.8, 0.3
    center = math.tanh(a / 2)
    errors = []
    for n in (32, 64, 128):
        theta = 2 * math.pi * np.arange(n) / n
        # bisect the radius along each ray
        lo, hi = np.zeros(n), np.full(n, 5.0)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            z = np.tanh(mid / 2) * np.exp(1j * theta)
            inside = 2 * np.arcsinh(np.abs(z - center) / np.sqrt((1 - abs(z) ** 2) * (1 - center**2))) < R
            lo, hi = np.where(inside, mid, lo), np.where(inside, hi, mid)
        errors.append(np.abs(DiscreteCurve(lo).curvature() - 1 / math.tanh(R)).max())
    assert errors[0] / errors[1] > 3.5 and errors[1] / errors[2] > 3.5


def test_geodesic_has_zero_curvature():
    # geodesic through (d, 0) perpendicular to the x-axis: tanh(rho) cos(theta) = tanh(d)
    d = 0.5
    theta = np.linspace(-0.6, 0.6, 41)
    g = np.arctanh(math.tanh(d) / np.cos(theta))
    dtheta = theta[1] - theta[0]
    k = curvature_of_samples(g, dtheta, periodic=False)
    assert np.abs(k).max() < 1e-5


def test_radial_graph_curvature_formula_for_circle():
    assert radial_graph_curvature(1.0, 0.0, 0.0) == pytest.approx(1 / math.tanh(1.0))


def test_curve_validation():
    with pytest.raises(DomainError):
        DiscreteCurve(np.ones(5))
    with pytest.raises(DomainError):
        DiscreteCurve(np.array([1.0] * 7 + [-1.0]))
    c = DiscreteCurve(np.ones(8))
    with pytest.raises(ValueError):
        c.g[0] = 2.0


def test_fourier_constructor_and_evaluate():
    c = DiscreteCurve.from_fourier(0.5, [0.0, 0.02], [0.01], 64)
    theta = np.array([0.1, 1.3, 4.0])
    exact = 0.5 + 0.02 * np.cos(2 * theta) + 0.01 * np.sin(theta)
    np.testing.assert_allclose(c.evaluate(theta), exact, atol=1e-14)
    np.testing.assert_allclose(c.evaluate(theta, 1), -0.04 * np.sin(2 * theta) + 0.01 * np.cos(theta), atol=1e-13)
    np.testing.assert_allclose(c.resample(128).g[::2], c.g, atol=1e-14)


def test_outward_normals_of_circle_are_radial():
    c = DiscreteCurve.circle(0.7, 16)
    np.testing.assert_allclose(c.outward_normals(), np.exp(1j * c.theta), atol=1e-14)


def test_outward_normal_moves_away():
    c = perturbed_circle(0.5, 0.05)
    moved = exp_map(c.model_points(), c.outward_normals(), 0.1)
    rho, _ = complex_to_polar(moved)
    assert np.all(rho > c.g)


@settings(max_examples=30)
@given(st.integers(0, 63))
def test_rotation_permutes_curvature(shift):
    c = perturbed_circle(0.5, 0.03, 3, 64)
    np.testing.assert_array_equal(c.rotate(shift).curvature(), np.roll(c.curvature(), shift))


def test_json_round_trip(tmp_path):
    c = perturbed_circle(0.4, 0.02, 2, 32)
    path = tmp_path / "c.json"
    save_curve(c, path)
    np.testing.assert_array_equal(load_curve(path).g, c.g)


def test_fourier_json(tmp_path):
    path = tmp_path / "f.json"
    path.write_text(json.dumps({"n": 32, "fourier": {"a0": 0.4, "a": [0, 0.02], "b": []}}))
    np.testing.assert_allclose(load_curve(path).g, perturbed_circle(0.4, 0.02, 2, 32).g, atol=1e-15)


def test_malformed_json_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 8,\n "g": [1, 2,, 3]}')
    with pytest.raises(CurveFormatError, match="line 2, column"):
        load_curve(path)


def test_inconsistent_sample_count():
    with pytest.raises(CurveFormatError):
        curve_from_dict({"n": 9, "g": [1.0] * 8})
    with pytest.raises(CurveFormatError):
        curve_from_dict([1, 2, 3])
