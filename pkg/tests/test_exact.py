import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate, stats
from scipy.special import expit

from cautious.errors import CapacityError, DomainError
from cautious.models.dataset import Dataset, Hyperparameters
from cautious.models.posterior import ModelIndicator
from cautious.posterior import exact
from cautious.probes.normalizer import restrict_columns


def test_model_space_bit_layout():
    models = exact.model_space(3)
    assert models.shape == (8, 3)
    assert models[0].tolist() == [False, False, False]
    assert models[1].tolist() == [True, False, False]
    assert models[6].tolist() == [False, True, True]


def test_gray_and_direct_enumeration_agree(small_data, hp):
    alpha = np.linspace(0.2, 0.6, small_data.p)
    gray = exact.enumerate_log_scores(small_data, alpha, hp, method="gray")
    direct = exact.enumerate_log_scores(small_data, alpha, hp, method="direct")
    assert_allclose(gray, direct, rtol=0, atol=1e-8)


def test_enumeration_matches_single_model_scores(small_data, hp):
    alpha = np.full(small_data.p, 0.3)
    scores = exact.enumerate_log_scores(small_data, alpha, hp)
    models = exact.model_space(small_data.p)
    for code in (0, 1, 37, 128, 200, 255):
        assert_allclose(scores[code], exact.model_log_score(models[code], small_data, alpha, hp), rtol=1e-12)


def test_partitioned_enumeration_is_deterministic(small_data, hp):
    alpha = np.full(small_data.p, 0.25)
    serial = exact.enumerate_log_scores(small_data, alpha, hp, workers=1)
    split = exact.enumerate_log_scores(small_data, alpha, hp, workers=3)
    assert_allclose(serial, split, rtol=0, atol=1e-9)


def test_model_odds_consistent_with_scores(small_data, hp):
    alpha = np.linspace(0.1, 0.8, small_data.p)
    rng = np.random.default_rng(8)
    for _ in range(10):
        a, b = rng.integers(0, 2, size=(2, small_data.p)).astype(bool)
        from_scores = np.exp(
            exact.model_log_score(a, small_data, alpha, hp) - exact.model_log_score(b, small_data, alpha, hp)
        )
        assert_allclose(exact.model_odds(a, b, small_data, alpha, hp), from_scores, rtol=1e-10)


def test_model_odds_increase_with_alpha_of_flipped_variable(small_data, hp):
    a = np.zeros(small_data.p, dtype=bool)
    a[[0, 3]] = True
    b = a.copy()
    b[3] = False
    values = []
    for alpha_3 in np.linspace(0.05, 0.95, 19):
        alpha = np.full(small_data.p, 0.3)
        alpha[3] = alpha_3
        values.append(exact.log_model_odds(a, b, small_data, alpha, hp))
    assert np.all(np.diff(values) > 0)


def test_model_odds_accept_indicators(small_data, hp):
    a = ModelIndicator(gamma=[1, 0, 0, 1, 0, 0, 1, 0])
    b = ModelIndicator(gamma=[0] * 8)
    assert exact.log_model_odds(a, b, small_data, 0.3, hp) == pytest.approx(
        exact.log_model_odds(a.as_array(), b.as_array(), small_data, 0.3, hp)
    )


def test_alpha_must_be_open_interval(small_data, hp):
    with pytest.raises(DomainError):
        exact.model_log_score(np.zeros(small_data.p), small_data, 1.0, hp)


def test_posterior_normalizes_and_finds_signal(small_data, hp):
    posterior = exact.enumerate_posterior(small_data, 0.3, hp)
    assert_allclose(posterior.probabilities.sum(), 1.0)
    inclusion = posterior.marginal_inclusion()
    assert np.all((inclusion >= 0) & (inclusion <= 1))
    assert_allclose(expit(posterior.inclusion_log_odds()), inclusion, atol=1e-12)
    assert inclusion[0] > 0.9
    assert posterior.probability(posterior.models[int(np.argmax(posterior.probabilities))]) == pytest.approx(
        posterior.probabilities.max()
    )


def test_capacity_guard_names_the_alternative(small_data, hp):
    with pytest.raises(CapacityError, match="gibbs"):
        exact.enumerate_log_scores(small_data, 0.3, hp, cap=2**7)


def test_product_expansion_identity():
    rng = np.random.default_rng(21)
    worst = 0.0
    for _ in range(1000):
        hp = Hyperparameters(tau0=10 ** rng.uniform(-3, -1), tau1=rng.uniform(1.5, 5.0))
        beta = rng.normal(0.0, 1.0, 6)
        alpha = rng.uniform(0.01, 0.99, 6)
        lhs, rhs = exact.verify_product_expansion(beta, alpha, rng.uniform(0.5, 2.0), hp)
        worst = max(worst, abs(lhs - rhs))
    assert worst <= 1e-10


def test_product_expansion_allows_alpha_one():
    hp = Hyperparameters(tau0=0.01, tau1=2.0)
    lhs, rhs = exact.verify_product_expansion([0.3, -0.1, 1.2], [1.0, 0.4, 0.7], 1.0, hp)
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_product_expansion_rejects_large_p():
    with pytest.raises(CapacityError):
        exact.verify_product_expansion(np.zeros(13), np.full(13, 0.5), 1.0, Hyperparameters())


def _quadrature_density(data, hp, alpha, beta):
    """Mixes N(mu_g, sigma2 L_g) over the inverse-gamma posterior of sigma2, model by model."""
    posterior = exact.enumerate_posterior(data, alpha, hp)
    shape = hp.a + 0.5 * data.n
    total = 0.0
    for bits, weight in zip(posterior.models, posterior.probabilities):
        geom = exact.model_geometry(bits, data, hp)
        sigma2_post = stats.invgamma(shape, scale=geom.r_gamma)
        integrand = lambda s2: stats.multivariate_normal(geom.mu_gamma, s2 * geom.l_gamma).pdf(beta) * sigma2_post.pdf(s2)
        split = 20.0 * geom.r_gamma / (shape + 1.0)
        value = sum(
            integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-11, limit=200)[0]
            for lo, hi in ((0.0, split), (split, np.inf))
        )
        total += weight * value
    return total


def test_t_mixture_matches_sigma2_quadrature(tiny_data):
    data = restrict_columns(tiny_data, [0, 3])
    hp = Hyperparameters(tau0=0.1, tau1=2.0, a=1.0, b=1.0)
    mixture = exact.beta_posterior_mixture_exact(data, 0.4, hp)
    center = mixture.mean()
    for offset in ([0.0, 0.0], [0.1, -0.05], [-0.2, 0.1], [0.05, 0.2], [0.3, 0.0]):
        beta = center + np.array(offset)
        assert_allclose(np.exp(mixture.logpdf(beta)), _quadrature_density(data, hp, 0.4, beta), rtol=1e-6)


def test_mixture_mean_equals_model_averaged_mean(small_data, hp):
    posterior = exact.enumerate_posterior(small_data, 0.3, hp)
    mixture = exact.beta_posterior_mixture_exact(small_data, 0.3, hp)
    assert_allclose(exact.posterior_mean_exact(small_data, posterior, hp, floor=0.0), mixture.mean(), atol=1e-12)
    assert_allclose(mixture.weights().sum(), 1.0)


def test_marginal_inclusion_exact_in_unit_interval(tiny_data, hp):
    inclusion = exact.marginal_inclusion_exact(tiny_data, [0.2, 0.4, 0.6, 0.8], hp)
    assert inclusion.shape == (4,)
    assert inclusion[0] > inclusion[1]


def test_duplicated_columns_are_exchangeable(tiny_data, hp):
    x = tiny_data.x
    data = Dataset(y=tiny_data.y, x=np.column_stack([x[:, 0], x[:, 0], x[:, 1], x[:, 3]]))
    inclusion = exact.marginal_inclusion_exact(data, np.full(4, 0.3), hp)
    assert abs(inclusion[0] - inclusion[1]) <= 1e-10
    log_odds = exact.enumerate_posterior(data, np.full(4, 0.3), hp).inclusion_log_odds()
    assert abs(log_odds[0] - log_odds[1]) <= 1e-10
