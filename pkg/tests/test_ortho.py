import numpy as np
import pytest

from core.densities import (
    Family1Density,
    Family2Density,
    GeneralDensity,
    LimitBetaDensity,
    OrthoQuadratic,
    ortho_quadratic_canonical,
    ortho_quadratic_closed_form,
    ortho_quadratic_gram_schmidt,
    validate_user_q,
)
from core.exception import SpecException
from core.quadrature import edge_rule
from core.special import modified_incomplete_gamma

FINE = edge_rule(400)


def quadrature_inner(q: OrthoQuadratic, shift: int) -> float:
    """int t^shift q omega，独立于矩的数值求积"""
    w = q.density.weights(FINE)
    return float(w @ (FINE.nodes**shift * q(FINE.nodes)))


def quadrature_norm2(q: OrthoQuadratic) -> float:
    w = q.density.weights(FINE)
    return float(w @ q(FINE.nodes) ** 2)


def test_closed_form_uniform_limit_is_legendre():
    q = ortho_quadratic_closed_form(LimitBetaDensity.uniform())
    assert np.allclose(q.coefficients, [-1 / 3, 0.0, 1.0])
    assert q.norm2 == pytest.approx(4 / 45)
    assert q.kappa == pytest.approx(q.norm2)
    assert q.is_even
    assert q.degree == 2


def test_closed_form_second_moment():
    q = ortho_quadratic_closed_form(Family1Density(1.0, 2.0))
    m2 = modified_incomplete_gamma(7 / 4, 0.5) / modified_incomplete_gamma(5 / 4, 0.5)
    assert q.m2 == pytest.approx(m2, rel=1e-14)
    assert q.coefficients[0] == pytest.approx(-m2, rel=1e-14)


@pytest.mark.parametrize(
    "density",
    [Family1Density(1.0, 2.0), Family1Density(0.5, 1.5), Family2Density(0.7, 2.0), Family2Density(2.0, 3.0), LimitBetaDensity(2.0, family=2)],
)
def test_closed_form_norm_and_orthogonality(density):
    q = ortho_quadratic_closed_form(density)
    assert q.norm2 == pytest.approx(quadrature_norm2(q), abs=1e-10)
    assert abs(quadrature_inner(q, 0)) <= 1e-10
    assert abs(quadrature_inner(q, 1)) <= 1e-10
    assert max(q.residuals) <= 1e-10
    assert q.norm2 > 0
    q.check_orthogonal()


def test_closed_form_rejects_general_density():
    with pytest.raises(SpecException):
        ortho_quadratic_closed_form(GeneralDensity.uniform())


def test_canonical_uniform():
    q = ortho_quadratic_canonical(GeneralDensity.uniform())
    assert np.allclose(q.coefficients, [-1 / 3, 0.0, 1.0], atol=1e-14)
    assert q.norm2 == pytest.approx(4 / 45, rel=1e-12)


def test_canonical_symmetric_has_no_linear_term():
    omega = GeneralDensity.from_density(Family2Density(0.7, 2.0))
    q = ortho_quadratic_canonical(omega)
    assert abs(q.coefficients[1]) <= 1e-12
    assert q.coefficients[0] == pytest.approx(-omega.moment(2), rel=1e-12)


def test_canonical_matches_closed_form():
    closed = ortho_quadratic_closed_form(Family1Density(1.0, 2.0))
    canonical = ortho_quadratic_canonical(GeneralDensity.from_density(Family1Density(1.0, 2.0)))
    assert np.allclose(canonical.coefficients, closed.coefficients, atol=1e-9)
    assert canonical.norm2 == pytest.approx(closed.norm2, abs=1e-9)


def test_canonical_asymmetric():
    omega = GeneralDensity(lambda t: (1 + t) / 2)
    q = ortho_quadratic_canonical(omega)
    # mu1 = mu2 = 1/3, mu3 = mu4 = 1/5 => b = 2/5, a = 1/5
    assert np.allclose(q.coefficients, [-0.2, -0.4, 1.0], atol=1e-13)
    assert not q.is_even
    assert max(q.residuals) <= 1e-10
    assert q.norm2 == pytest.approx(quadrature_norm2(q), abs=1e-12)


def test_canonical_normalized():
    omega = GeneralDensity(lambda t: (1 + t) / 2)
    q = ortho_quadratic_canonical(omega, normalize=True)
    assert q.norm2 == 1.0
    assert quadrature_norm2(q) == pytest.approx(1.0, abs=1e-12)
    plain = ortho_quadratic_canonical(omega)
    assert np.allclose(q.coefficients * np.sqrt(plain.norm2), plain.coefficients)


def test_gram_schmidt_uniform():
    q = ortho_quadratic_gram_schmidt(GeneralDensity.uniform())
    c = q.coefficients
    assert c[2] > 0
    assert c[0] / c[2] == pytest.approx(-1 / 3, rel=1e-12)
    assert abs(c[1]) <= 1e-12
    assert quadrature_norm2(q) == pytest.approx(1.0, abs=1e-12)


def test_gram_schmidt_is_scaled_closed_form():
    closed = ortho_quadratic_closed_form(Family2Density(0.7, 2.0))
    gs = ortho_quadratic_gram_schmidt(GeneralDensity.from_density(Family2Density(0.7, 2.0)))
    t = np.array([-0.9, 0.1, 0.8])
    ratio = gs(t) / closed(t)
    assert ratio[0] > 0
    assert np.allclose(ratio, ratio[0], rtol=1e-8)


def test_gram_schmidt_asymmetric():
    omega = GeneralDensity(lambda t: (1 + t) / 2)
    gs = ortho_quadratic_gram_schmidt(omega)
    canonical = ortho_quadratic_canonical(omega)
    assert max(gs.residuals) <= 1e-10
    assert np.allclose(gs.coefficients / gs.coefficients[2], canonical.coefficients, atol=1e-12)


def test_validate_user_q_accepts_legendre():
    report = validate_user_q(GeneralDensity.uniform(), [-1 / 3, 0.0, 1.0])
    assert report.accepted
    assert report.degree == 2
    assert report.kappa == pytest.approx(4 / 45)
    assert report.reason == ""


def test_validate_user_q_rejects_constant_residual():
    # int t^2 * (1/2) dt = 1/3
    report = validate_user_q(GeneralDensity.uniform(), [0.0, 0.0, 1.0])
    assert not report.accepted
    assert report.residual_constant == pytest.approx(1 / 3)


def test_validate_user_q_rejects_odd_cubic():
    report = validate_user_q(GeneralDensity.uniform(), [0.0, -0.6, 0.0, 1.0])
    assert not report.accepted
    assert report.degree == 3
    assert report.residual_constant <= 1e-12
    assert report.residual_linear <= 1e-12
    assert abs(report.kappa) <= 1e-10


def test_validate_user_q_low_degree():
    report = validate_user_q(GeneralDensity.uniform(), [1.0, 1.0, 0.0])
    assert not report.accepted
    assert report.degree == 1


def test_ortho_quadratic_requires_degree_two():
    with pytest.raises(SpecException):
        OrthoQuadratic.from_coefficients(LimitBetaDensity.uniform(), [1.0, 2.0, 0.0])


def test_check_orthogonal_rejects_non_orthogonal():
    q = OrthoQuadratic.from_coefficients(LimitBetaDensity.uniform(), [0.0, 0.0, 1.0])
    assert q.norm2 == pytest.approx(1 / 5)
    with pytest.raises(SpecException):
        q.check_orthogonal()
