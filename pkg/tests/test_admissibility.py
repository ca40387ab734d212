import math

import numpy as np
import pytest

from cmc import rotational as rot
from cmc.admissibility import (
    barrier_center,
    check_r_admissible,
    choose_parameters,
    horosphere_convex,
    interior_sphere_radius,
    sphere_margins,
    verify_all_nodes,
    verify_barrier_tangency,
    xi,
)
from cmc.config import RunConfig
from cmc.curve import DiscreteCurve, perturbed_circle
from cmc.errors import CertificationError, DomainError
from cmc.hyperbolic import hyp_distance

H = 0.25


@pytest.fixture(scope="module")
def circle_report():
    c = DiscreteCurve.circle(0.4, 32)
    return c, check_r_admissible(c, H)


@pytest.fixture(scope="module")
def perturbed_report():
    c = perturbed_circle(0.4, 0.02, 2, 64)
    return c, check_r_admissible(c, H)


def test_interior_sphere_of_circle_is_its_radius():
    assert interior_sphere_radius(DiscreteCurve.circle(0.4, 32)) == pytest.approx(0.4, rel=1e-9)


def test_interior_sphere_margins_sign():
    c = perturbed_circle(0.4, 0.02, 2, 64)
    r = interior_sphere_radius(c)
    assert sphere_margins(c, r).min() >= -1e-7
    assert sphere_margins(c, 1.2 * r).min() < 0.0


def test_tangent_disk_centre_is_inside():
    c = DiscreteCurve.circle(0.6, 16)
    z = barrier_center(c, 3, 0.2)
    assert hyp_distance(z, c.model_points()[3]) == pytest.approx(0.2, rel=1e-12)
    assert hyp_distance(z, 0.0) == pytest.approx(0.4, rel=1e-12)


def test_horosphere_convexity():
    ok, kmin = horosphere_convex(DiscreteCurve.circle(0.4, 32))
    assert ok and kmin == pytest.approx(1 / math.tanh(0.4))
    assert horosphere_convex(np.array([1.5, 0.9]))[0] is False


def test_xi_requires_ordered_parameters():
    assert xi(H, 0.2, 0.8) > 0.0
    with pytest.raises(DomainError):
        xi(H, 0.6, 0.8)


def test_choose_parameters_places_base_circle_inside():
    c = perturbed_circle(0.4, 0.02, 2, 64)
    p = choose_parameters(c, H)
    assert 0.0 < p.alpha < 2 * H < p.beta <= p.beta_bar
    assert rot.rho_h(H, p.alpha) == pytest.approx(0.9 * c.g.min(), rel=1e-10)
    assert rot.rho_h(H, p.beta) == pytest.approx(p.r_effective, abs=1e-12)


def test_choose_parameters_rejects_bad_alpha():
    c = DiscreteCurve.circle(0.4, 32)
    with pytest.raises(DomainError):
        choose_parameters(c, H, alpha=0.6)
    with pytest.raises(CertificationError):
        choose_parameters(DiscreteCurve.circle(0.1, 32), H, alpha=1e-6)


def test_beta_reduced_to_beta_bar():
    # a large radius requires beta above the certified range
    c = DiscreteCurve.circle(2.0, 32)
    p = choose_parameters(c, H, r=2.0)
    assert p.r_reduced and p.beta == p.beta_bar and p.r_effective < 2.0


def test_circle_fixture_passes(circle_report):
    c, rep = circle_report
    assert rep.verdict and rep.contained and rep.interior_sphere
    assert rep.annulus[0] <= c.g.min() + 1e-9 and c.g.max() <= rep.annulus[1]
    assert set(rep.to_dict()) >= {"verdict", "alpha", "beta", "xi", "margins", "reasons"}


def test_perturbed_fixture_passes(perturbed_report):
    _, rep = perturbed_report
    assert rep.verdict, rep.reasons
    assert rep.margins["inner"] >= 0.0 and rep.margins["outer"] >= 0.0


def test_inflated_fixture_fails_with_containment_reason(circle_report):
    _, rep = circle_report
    big = DiscreteCurve.circle(0.4 + 2 * rep.xi, 32)
    bad = check_r_admissible(big, H, r=rep.r)
    assert not bad.verdict and not bad.contained
    assert any("leaves the annulus" in reason for reason in bad.reasons)


def test_xi_override_builds_negative_example():
    c = perturbed_circle(0.4, 0.02, 2, 64)
    assert not check_r_admissible(c, H, xi_override=1e-6).verdict


@pytest.mark.parametrize("fixture", ["circle_report", "perturbed_report"])
def test_barrier_tangency_at_every_node(fixture, request):
    c, rep = request.getfixturevalue(fixture)
    reports = verify_all_nodes(c, H, rep)
    assert len(reports) == c.n
    for br in reports:
        assert br.passed
        assert br.below_alpha_margin > 0.0 and br.below_zero_margin > 0.0 and br.asymptotic_margin > 0.0


def test_barrier_translation_distance(perturbed_report):
    c, rep = perturbed_report
    br = verify_barrier_tangency(c, H, rep, 5, RunConfig())
    assert br.translation == pytest.approx(
        hyp_distance(barrier_center(c, 5, rep.r_effective), 0.0), rel=1e-12)
