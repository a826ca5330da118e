import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose
from scipy import linalg, stats

from cautious.errors import DomainError
from cautious.models.chain import ChainSettings, GibbsState
from cautious.models.dataset import Dataset, Hyperparameters
from cautious.posterior import exact
from cautious.sampler import gibbs


def _state(data, gamma=None, sigma2=1.3):
    gamma = np.zeros(data.p, dtype=bool) if gamma is None else np.asarray(gamma, dtype=bool)
    return GibbsState(beta=np.linspace(-0.5, 0.5, data.p), gamma=gamma, q=np.full(data.p, 0.3), sigma2=sigma2)


def test_initial_state(tiny_data):
    state = gibbs.initial_state(tiny_data, np.full(tiny_data.p, 0.2))
    assert not state.gamma.any()
    assert_allclose(state.q, 0.2)
    assert state.sigma2 == pytest.approx(np.var(tiny_data.y, ddof=1))


def test_state_rejects_bad_values(tiny_data):
    with pytest.raises(DomainError):
        GibbsState(beta=np.zeros(4), gamma=np.zeros(4, dtype=bool), q=np.full(4, 0.3), sigma2=0.0)
    with pytest.raises(DomainError):
        GibbsState(beta=np.zeros(4), gamma=np.zeros(4, dtype=bool), q=np.full(4, 1.0), sigma2=1.0)


def test_beta_conditional_moments(tiny_data, hp):
    state = _state(tiny_data, gamma=[1, 0, 1, 0])
    mean, factor = gibbs.conditional_beta_moments(state, tiny_data, hp)
    precision = tiny_data.x.T @ tiny_data.x + np.diag(hp.prior_precision(state.gamma))
    assert_allclose(mean, np.linalg.solve(precision, tiny_data.x.T @ tiny_data.y), rtol=1e-8, atol=1e-10)
    assert_allclose(factor @ factor.T, precision, rtol=1e-10, atol=1e-8)


def test_beta_draws_have_conditional_covariance(tiny_data):
    hp = Hyperparameters(tau0=0.1, tau1=2.0)
    state = _state(tiny_data, gamma=[1, 1, 0, 1], sigma2=0.7)
    rng = np.random.default_rng(4)
    draws = np.array([gibbs.sample_beta(state, tiny_data, hp, rng) for _ in range(20_000)])
    mean, factor = gibbs.conditional_beta_moments(state, tiny_data, hp)
    covariance = 0.7 * np.linalg.inv(factor @ factor.T)
    assert_allclose(draws.mean(axis=0), mean, atol=4 * np.sqrt(np.diag(covariance).max() / 20_000))
    assert_allclose(np.cov(draws.T), covariance, atol=0.05 * np.abs(covariance).max())


def test_inclusion_probability_formula(tiny_data, hp):
    state = _state(tiny_data)
    prob = gibbs.inclusion_probability(state, hp)
    sd = np.sqrt(state.sigma2)
    slab = state.q * stats.norm(0, sd * hp.tau1).pdf(state.beta)
    spike = (1 - state.q) * stats.norm(0, sd * hp.tau0).pdf(state.beta)
    assert_allclose(prob, slab / (slab + spike), rtol=1e-10, atol=1e-300)


def test_q_draws_stay_inside_unit_interval(tiny_data, hp):
    state = _state(tiny_data, gamma=[1, 0, 1, 0])
    rng = np.random.default_rng(0)
    for _ in range(200):
        q = gibbs.sample_q(state, hp, np.full(tiny_data.p, 0.01), rng)
        assert np.all((q > 0) & (q < 1))


def test_sigma2_conditional_parameters(tiny_data, hp):
    state = _state(tiny_data, gamma=[0, 1, 0, 1])
    shape, rate = gibbs.sigma2_conditional(state, tiny_data, hp)
    residual = tiny_data.y - tiny_data.x @ state.beta
    assert shape == pytest.approx(hp.a + 0.5 * (tiny_data.n + tiny_data.p))
    expected = hp.b + 0.5 * residual @ residual + 0.5 * np.sum(state.beta**2 * hp.prior_precision(state.gamma))
    assert rate == pytest.approx(expected)


def test_chain_is_reproducible(tiny_data, hp):
    first = gibbs.run_chain(tiny_data, 0.3, hp, iterations=300, burnin=100, seed=42)
    second = gibbs.run_chain(tiny_data, 0.3, hp, iterations=300, burnin=100, seed=42)
    other = gibbs.run_chain(tiny_data, 0.3, hp, iterations=300, burnin=100, seed=43)
    assert np.array_equal(first.inclusion_counts, second.inclusion_counts)
    assert np.array_equal(first.beta_sum, second.beta_sum)
    assert not np.array_equal(first.beta_sum, other.beta_sum)
    assert first.kept_draws == 200


def test_thinning_counts(tiny_data, hp):
    out = gibbs.run_chain(tiny_data, 0.3, hp, iterations=110, burnin=10, thin=5, seed=1)
    assert out.kept_draws == 20
    assert np.all(out.inclusion_counts <= 20)


def test_chains_do_not_depend_on_worker_count(tiny_data, hp):
    settings = ChainSettings(iterations=200, burnin=50, chains=3)
    serial = gibbs.run_chains(tiny_data, 0.3, hp, settings=settings, seed=9, workers=1)
    threaded = gibbs.run_chains(tiny_data, 0.3, hp, settings=settings, seed=9, workers=3)
    assert np.array_equal(serial.inclusion_counts, threaded.inclusion_counts)
    assert np.array_equal(serial.beta_sum, threaded.beta_sum)
    assert serial.kept_draws == 450
    assert len(serial.seeds) == 3


def test_smoothed_odds_are_finite(tiny_data, hp):
    out = gibbs.run_chain(tiny_data, 0.3, hp, iterations=150, burnin=50, seed=3)
    assert np.all(np.isfinite(out.inclusion_log_odds()))


def test_trace_file_layout(tiny_data, hp, tmp_path):
    path = tmp_path / "trace.csv"
    gibbs.run_chain(tiny_data, 0.3, hp, iterations=60, burnin=10, seed=5, trace_path=path)
    trace = pd.read_csv(path)
    assert list(trace.columns[:3]) == ["iteration", "sigma2", "gamma_1"]
    assert trace.columns[-1] == "beta_4"
    assert len(trace) == 50
    assert trace["iteration"].iloc[0] == 10


def test_scalar_regression_posterior_mean():
    # one covariate with alpha near one: essentially the slab-only t posterior
    rng = np.random.default_rng(6)
    x = rng.standard_normal((60, 1))
    y = 1.2 * x[:, 0] + 0.5 * rng.standard_normal(60)
    data = Dataset(y=y, x=x)
    hp = Hyperparameters(tau0=0.1, tau1=3.0, a=1.0, b=1.0)
    out = gibbs.run_chain(data, 0.999, hp, iterations=6000, burnin=1000, seed=2)
    expected = exact.beta_posterior_mixture_exact(data, 0.999, hp).mean()
    assert out.posterior_mean()[0] == pytest.approx(expected[0], abs=0.03)


@pytest.mark.slow
def test_gibbs_matches_exact_enumeration(small_data):
    hp = Hyperparameters(tau0=0.1, tau1=2.0, a=1.0, b=1.0)
    alpha = np.full(small_data.p, 0.3)
    settings = ChainSettings(iterations=50_000, burnin=10_000, chains=1)
    out = gibbs.run_chains(small_data, alpha, hp, settings=settings, seed=2024)
    assert_allclose(out.inclusion_frequency(), exact.marginal_inclusion_exact(small_data, alpha, hp), atol=0.03)
    posterior = exact.enumerate_posterior(small_data, alpha, hp)
    assert_allclose(out.posterior_mean(), exact.posterior_mean_exact(small_data, posterior, hp), atol=0.05)


def test_joint_step_matches_marginal_likelihood_ratio():
    # with one covariate the joint step draws gamma from the ratio of the two
    # marginal likelihoods of y with beta integrated out
    rng = np.random.default_rng(17)
    x = rng.standard_normal((12, 1))
    y = 0.4 * x[:, 0] + rng.standard_normal(12)
    data = Dataset(y=y, x=x)
    hp = Hyperparameters(tau0=1e-6, tau1=5.0)
    state = GibbsState(beta=np.zeros(1), gamma=np.zeros(1, dtype=bool), q=np.full(1, 0.3), sigma2=0.9)

    def log_marginal(tau):
        covariance = 0.9 * (np.eye(12) + tau**2 * np.outer(x[:, 0], x[:, 0]))
        return stats.multivariate_normal(np.zeros(12), covariance).logpdf(y)

    logit = np.log(0.3 / 0.7) + log_marginal(5.0) - log_marginal(1e-6)
    expected = 1.0 / (1.0 + np.exp(-logit))
    draws = 20_000
    hits = 0
    slab_betas = []
    for _ in range(draws):
        gamma, beta = gibbs.sample_gamma_beta_joint(state, data, hp, rng)
        hits += int(gamma[0])
        if gamma[0]:
            slab_betas.append(beta[0])
    assert hits / draws == pytest.approx(expected, abs=4 * np.sqrt(expected * (1 - expected) / draws) + 1e-3)
    precision = x[:, 0] @ x[:, 0] + 1.0 / 25.0
    if len(slab_betas) > 500:
        assert np.mean(slab_betas) == pytest.approx((x[:, 0] @ y) / precision, abs=4 * np.sqrt(0.9 / precision / len(slab_betas)))


def test_joint_step_keeps_spike_coefficients_tiny(tiny_data):
    hp = Hyperparameters(tau0=1e-6, tau1=5.0)
    state = _state(tiny_data)
    state.q = np.full(tiny_data.p, 1e-30)
    gamma, beta = gibbs.sample_gamma_beta_joint(state, tiny_data, hp, np.random.default_rng(1))
    assert not gamma.any()
    assert np.all(np.abs(beta) < 1e-4)


def test_conditional_gamma_frequency(tiny_data):
    hp = Hyperparameters(tau0=0.3, tau1=2.0)
    state = GibbsState(beta=np.array([0.05, 0.4, 0.8, -0.6]), gamma=np.zeros(4, dtype=bool), q=np.full(4, 0.4), sigma2=1.0)
    prob = gibbs.inclusion_probability(state, hp)
    rng = np.random.default_rng(8)
    draws = 40_000
    freq = np.mean([gibbs.sample_gamma(state, tiny_data, hp, rng) for _ in range(draws)], axis=0)
    assert_allclose(freq, prob, atol=4 * np.sqrt(0.25 / draws))


def test_q_draw_mean(tiny_data):
    hp = Hyperparameters(s=3.0)
    state = _state(tiny_data, gamma=[1, 0, 1, 0])
    alpha = np.array([0.2, 0.2, 0.7, 0.7])
    rng = np.random.default_rng(12)
    draws = np.array([gibbs.sample_q(state, hp, alpha, rng) for _ in range(40_000)])
    expected = (hp.s * alpha + state.gamma) / (hp.s + 1.0)
    assert_allclose(draws.mean(axis=0), expected, atol=0.006)


def test_sigma2_draw_mean(tiny_data, hp):
    state = _state(tiny_data, gamma=[1, 1, 0, 0])
    shape, rate = gibbs.sigma2_conditional(state, tiny_data, hp)
    rng = np.random.default_rng(21)
    draws = np.array([gibbs.sample_sigma2(state, tiny_data, hp, rng) for _ in range(40_000)])
    mean = rate / (shape - 1.0)
    sd = mean / np.sqrt(shape - 2.0)
    assert draws.mean() == pytest.approx(mean, abs=4 * sd / np.sqrt(40_000))


def _exact_posterior_draw(data, alpha, hp, posterior, rng):
    """gamma, sigma^2, beta and q drawn jointly from the exact posterior."""
    code = rng.choice(len(posterior.probabilities), p=posterior.probabilities)
    gamma = posterior.models[code].copy()
    geom = exact.model_geometry(gamma, data, hp)
    sigma2 = float(stats.invgamma(hp.a + 0.5 * data.n, scale=geom.r_gamma).rvs(random_state=rng))
    noise = linalg.solve_triangular(geom.chol_precision.T, rng.standard_normal(data.p), lower=False)
    beta = geom.mu_gamma + np.sqrt(sigma2) * noise
    q = rng.beta(hp.s * alpha + gamma, hp.s * (1.0 - alpha) + 1.0 - gamma)
    q = np.clip(q, gibbs.Q_FLOOR, gibbs.Q_CEIL)
    return GibbsState(beta=beta, gamma=gamma, q=q, sigma2=sigma2)


@pytest.mark.parametrize("update", ["joint", "conditional"])
def test_sweep_leaves_exact_posterior_invariant(tiny_data, update):
    hp = Hyperparameters(tau0=1e-6, tau1=5.0, a=1.0, b=1.0)
    alpha = np.full(tiny_data.p, 0.4)
    posterior = exact.enumerate_posterior(tiny_data, alpha, hp)
    target = posterior.marginal_inclusion()
    rng = np.random.default_rng(31)
    draws = 4_000
    counts = np.zeros(tiny_data.p)
    for _ in range(draws):
        state = _exact_posterior_draw(tiny_data, alpha, hp, posterior, rng)
        counts += gibbs.sweep_once(state, tiny_data, alpha, hp, rng, update).gamma
    se = np.sqrt(target * (1 - target) / draws)
    assert_allclose(counts / draws, target, atol=4 * se.max() + 1e-3)


def test_default_spike_chain_leaves_the_null_model(small_data):
    hp = Hyperparameters(a=1.0, b=1.0)
    out = gibbs.run_chain(small_data, 0.3, hp, iterations=800, burnin=200, seed=7)
    frequency = out.inclusion_frequency()
    assert frequency[[0, 3, 6]].min() > 0.8


def test_conditional_update_sticks_at_default_spike(small_data):
    # gamma given beta cannot leave the spike when tau0 is tiny
    hp = Hyperparameters(a=1.0, b=1.0)
    out = gibbs.run_chain(small_data, 0.3, hp, iterations=300, burnin=100, seed=7, update="conditional")
    assert not out.inclusion_counts.any()


def test_default_spike_matches_exact_on_tiny_data(tiny_data):
    hp = Hyperparameters(a=1.0, b=1.0)
    alpha = np.full(tiny_data.p, 0.3)
    settings = ChainSettings(iterations=6_000, burnin=1_000, chains=2)
    out = gibbs.run_chains(tiny_data, alpha, hp, settings=settings, seed=5)
    assert_allclose(out.inclusion_frequency(), exact.marginal_inclusion_exact(tiny_data, alpha, hp), atol=0.05)


@pytest.mark.slow
def test_default_spike_gibbs_matches_exact_enumeration(small_data):
    hp = Hyperparameters(a=1.0, b=1.0)
    alpha = np.full(small_data.p, 0.3)
    settings = ChainSettings(iterations=50_000, burnin=5_000, chains=1)
    out = gibbs.run_chains(small_data, alpha, hp, settings=settings, seed=2024)
    assert_allclose(out.inclusion_frequency(), exact.marginal_inclusion_exact(small_data, alpha, hp), atol=0.03)
