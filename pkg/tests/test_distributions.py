"""Reward models: laws, tail functionals, truncation, file loading."""

import math

import numpy as np
import pytest
from scipy import integrate, special, stats

from ds_bandits.distributions import (
    Bernoulli,
    CsvFormatError,
    Empirical,
    Exponential,
    Gaussian,
    GaussianMixture,
    PointMassMixture,
    Uniform,
    load_empirical,
    model_from_dict,
    model_to_dict,
    norm_ppf,
    truncate,
)
from ds_bandits.seeding import make_rng

MIXTURE = GaussianMixture(((0.5, -0.3, 0.5), (0.5, 1.3, 0.5)))
TRIMODAL = GaussianMixture(((0.1, -1.5, 0.5), (0.8, 0.6, 0.5), (0.1, 2.5, 0.5)))
PMM = PointMassMixture(
    atoms=((0.0, 0.15),),
    parts=((0.45, Gaussian(2.0, 0.6)), (0.40, Gaussian(4.0, 0.8))),
)


def quad_gap_mean(model, mu, lo):
    """Quadrature oracle for E[(mu - X)_+] of continuous models."""
    val, _ = integrate.quad(lambda x: (mu - x) * _pdf(model, x), lo, mu, limit=300)
    return val


def _pdf(model, x):
    if isinstance(model, Gaussian):
        return stats.norm.pdf(x, model.loc, model.sigma)
    if isinstance(model, Exponential):
        return stats.expon.pdf(x, scale=1.0 / model.rate)
    if isinstance(model, Uniform):
        return stats.uniform.pdf(x, model.low, model.high - model.low)
    if isinstance(model, GaussianMixture):
        return sum(w * stats.norm.pdf(x, m, s) for w, m, s in model.components)
    raise AssertionError


class TestNormPpf:
    def test_against_scipy(self):
        grid = np.concatenate(
            [np.linspace(1e-9, 0.02, 40), np.linspace(0.03, 0.97, 200), 1 - np.linspace(1e-9, 0.02, 40)]
        )
        for p in grid:
            assert abs(norm_ppf(float(p)) - special.ndtri(p)) < 1e-9

    def test_rejects_boundary(self):
        with pytest.raises(ValueError):
            norm_ppf(0.0)
        with pytest.raises(ValueError):
            norm_ppf(1.0)


class TestMeans:
    def test_basic_means(self):
        assert Bernoulli(0.3).mean() == 0.3
        assert Uniform(0.2, 0.9).mean() == pytest.approx(0.55)
        assert Gaussian(1.0, 2.0).mean() == 1.0
        assert Exponential(0.5).mean() == 2.0
        assert MIXTURE.mean() == pytest.approx(0.5)
        assert TRIMODAL.mean() == pytest.approx(0.58)

    def test_point_mass_mixture_mean(self):
        expected = 0.45 * 2.0 + 0.40 * 4.0
        assert PMM.mean() == pytest.approx(expected)

    def test_empirical_summary(self):
        emp = Empirical(np.arange(1.0, 11.0))
        assert emp.summary() == (1.0, 5.5, 10.0)


class TestCdfQuantile:
    def test_bernoulli_steps(self):
        b = Bernoulli(0.3)
        assert b.cdf(-0.1) == 0.0
        assert b.cdf(0.0) == 0.7
        assert b.cdf(0.5) == 0.7
        assert b.cdf(1.0) == 1.0
        assert b.quantile(0.5) == 0.0
        assert b.quantile(0.7) == 1.0
        assert b.quantile(0.9) == 1.0

    def test_exponential_quantile(self):
        assert Exponential(0.5).quantile(0.95) == pytest.approx(5.991464547, abs=1e-8)

    def test_uniform_quantile(self):
        assert Uniform(0.0, 1.0).quantile(0.9) == pytest.approx(0.9)

    def test_gaussian_quantile_median(self):
        assert Gaussian(2.0, 3.0).quantile(0.5) == pytest.approx(2.0, abs=1e-9)

    def test_empirical_quantile_order_statistic(self):
        emp = Empirical(np.arange(1.0, 11.0))
        assert emp.quantile(0.8) == 9.0
        assert emp.quantile(0.75) == 8.0
        assert emp.quantile(0.05) == 1.0

    def test_quantile_inverts_cdf_continuous(self):
        rng = make_rng(20)
        for model in (Uniform(-1.0, 2.0), Gaussian(0.3, 1.7), Exponential(1.3), MIXTURE, TRIMODAL):
            for beta in rng.uniform(0.01, 0.99, size=25):
                q = model.quantile(float(beta))
                assert model.cdf(q) == pytest.approx(beta, abs=1e-8)

    def test_quantile_is_infimum_for_atoms(self):
        for model in (Bernoulli(0.4), Empirical(np.array([1.0, 1.0, 2.0, 5.0])), PMM):
            for beta in (0.1, 0.25, 0.5, 0.6, 0.9, 0.97):
                q = model.quantile(beta)
                assert model.cdf(q) > beta - 1e-9
                assert model.cdf(q - 1e-6) <= beta + 1e-9


class TestGapMean:
    def test_closed_forms_match_quadrature(self):
        cases = [
            (Uniform(0.0, 1.0), -0.5),
            (Gaussian(0.0, 1.0), -9.0),
            (Exponential(0.5), 0.0),
            (MIXTURE, -9.0),
            (TRIMODAL, -9.0),
        ]
        rng = make_rng(21)
        for model, lo in cases:
            for _ in range(8):
                mu = float(rng.uniform(model.mean() - 1.0, model.mean() + 2.0))
                assert model.positive_gap_mean(mu) == pytest.approx(
                    quad_gap_mean(model, mu, lo), abs=1e-7
                )

    def test_atomic_enumeration(self):
        b = Bernoulli(0.25)
        assert b.positive_gap_mean(0.5) == pytest.approx(0.75 * 0.5)
        emp = Empirical(np.array([1.0, 3.0]))
        assert emp.positive_gap_mean(2.0) == pytest.approx(0.5)
        assert PMM.positive_gap_mean(1.0) == pytest.approx(
            0.15 * 1.0
            + 0.45 * quad_gap_mean(Gaussian(2.0, 0.6), 1.0, -9.0)
            + 0.40 * quad_gap_mean(Gaussian(4.0, 0.8), 1.0, -9.0),
            abs=1e-7,
        )

    def test_below_support_is_zero(self):
        assert Uniform(0.0, 1.0).positive_gap_mean(-0.1) == 0.0
        assert Exponential(2.0).positive_gap_mean(0.0) == 0.0


class TestCvar:
    def test_uniform(self):
        assert Uniform(0.0, 1.0).cvar(0.1) == pytest.approx(0.95, abs=1e-9)

    def test_exponential_shifted_quantile(self):
        # exponential: CVaR = quantile + mean
        model = Exponential(0.5)
        assert model.cvar(0.05) == pytest.approx(model.quantile(0.95) + 2.0, abs=1e-8)

    def test_gaussian_closed_form(self):
        z = special.ndtri(0.95)
        expected = math.exp(-0.5 * z * z) / (0.05 * math.sqrt(2 * math.pi))
        assert Gaussian(0.0, 1.0).cvar(0.05) == pytest.approx(expected, abs=1e-8)
        shifted = Gaussian(2.0, 3.0)
        assert shifted.cvar(0.05) == pytest.approx(2.0 + 3.0 * expected, abs=1e-7)

    def test_gaussian_matches_tail_quadrature(self):
        model = Gaussian(0.3, 1.2)
        alpha = 0.07
        q = model.quantile(1.0 - alpha)
        tail, _ = integrate.quad(lambda x: x * _pdf(model, x), q, 40.0, limit=300)
        assert model.cvar(alpha) == pytest.approx(tail / alpha, abs=1e-7)

    def test_mixture_matches_tail_quadrature(self):
        alpha = 0.1
        q = MIXTURE.quantile(1.0 - alpha)
        tail, _ = integrate.quad(lambda x: x * _pdf(MIXTURE, x), q, 30.0, limit=300)
        assert MIXTURE.cvar(alpha) == pytest.approx(tail / alpha, abs=1e-7)

    def test_empirical_top_block_average(self):
        emp = Empirical(np.arange(1.0, 11.0))
        assert emp.cvar(0.2) == pytest.approx(9.5)
        assert emp.cvar(0.1) == pytest.approx(10.0)

    def test_empirical_fractional_tail_splits_atom(self):
        # tail mass 0.25 takes atoms 10, 9 fully and half of the atom at 8
        emp = Empirical(np.arange(1.0, 11.0))
        assert emp.cvar(0.25) == pytest.approx((0.1 * 10.0 + 0.1 * 9.0 + 0.05 * 8.0) / 0.25)

    def test_bernoulli_tail_inside_atom(self):
        assert Bernoulli(0.5).cvar(0.3) == pytest.approx(1.0)

    def test_cvar_dominates_quantile(self):
        rng = make_rng(22)
        for model in (Uniform(0, 1), Gaussian(0, 1), Exponential(1.0), MIXTURE, PMM):
            for alpha in rng.uniform(0.02, 0.8, size=10):
                assert model.cvar(float(alpha)) >= model.quantile(1.0 - float(alpha)) - 1e-9


class TestTruncate:
    def test_fields_for_empirical_example(self):
        trunc = truncate(Empirical(np.arange(1.0, 11.0)), 0.2)
        assert trunc.quantile_point == 9.0
        assert trunc.cvar_atom == pytest.approx(9.5)

    def test_mean_preserved_against_quadrature(self):
        for model, lo in ((Gaussian(0.0, 1.0), -12.0), (Exponential(0.7), 0.0), (Uniform(0, 1), 0.0)):
            for alpha in (0.05, 0.2, 0.5):
                trunc = truncate(model, alpha)
                below, _ = integrate.quad(
                    lambda x: x * _pdf(model, x), lo, trunc.quantile_point, limit=300
                )
                assert below + alpha * trunc.cvar_atom == pytest.approx(
                    model.mean(), abs=1e-8
                )

    def test_mass_below_plus_alpha_is_one(self):
        # probe between the quantile and the relocated atom; when the two
        # coincide the base law is untouched and there is nothing to check
        for model in (Gaussian(0.0, 1.0), Exponential(0.7), Bernoulli(0.35), PMM):
            for alpha in (0.05, 0.3):
                trunc = truncate(model, alpha)
                if trunc.cvar_atom <= trunc.quantile_point + 1e-9:
                    continue
                mid = 0.5 * (trunc.quantile_point + trunc.cvar_atom)
                assert trunc.cdf(mid) + alpha == pytest.approx(1.0, abs=1e-9)

    def test_sampling_law(self):
        rng = make_rng(23)
        trunc = truncate(Gaussian(0.0, 1.0), 0.1)
        draws = np.array([trunc.sample(rng) for _ in range(60_000)])
        assert draws.max() == trunc.cvar_atom
        assert abs(np.mean(draws == trunc.cvar_atom) - 0.1) < 0.005
        assert abs(draws.mean() - 0.0) < 0.01

    def test_sampling_splits_atom_at_quantile(self):
        # Ber(0.5) truncated at alpha=0.3: atom at 1 splits 0.2 kept, 0.3 moved
        rng = make_rng(24)
        trunc = truncate(Bernoulli(0.5), 0.3)
        assert trunc.quantile_point == 1.0
        assert trunc.cvar_atom == pytest.approx(1.0)
        draws = np.array([trunc.sample(rng) for _ in range(20_000)])
        assert abs(draws.mean() - 0.5) < 0.02


class TestSamplingLaws:
    def test_ks_against_cdf(self):
        rng = make_rng(25)
        crit = stats.kstwobign.ppf(0.99)
        for model in (Uniform(-1, 2), Gaussian(0.5, 1.3), Exponential(0.8), MIXTURE):
            draws = model.sample_n(rng, 50_000)
            stat = stats.kstest(draws, np.vectorize(model.cdf)).statistic
            assert stat < crit / math.sqrt(draws.size)

    def test_single_draw_matches_batch_law(self):
        rng = make_rng(26)
        singles = np.array([MIXTURE.sample(rng) for _ in range(20_000)])
        stat = stats.kstest(singles, np.vectorize(MIXTURE.cdf)).statistic
        assert stat < stats.kstwobign.ppf(0.99) / math.sqrt(singles.size)

    def test_point_mass_mixture_atom_frequency(self):
        rng = make_rng(27)
        draws = np.array([PMM.sample(rng) for _ in range(40_000)])
        assert abs(np.mean(draws == 0.0) - 0.15) < 0.006

    def test_bernoulli_frequency(self):
        rng = make_rng(28)
        draws = Bernoulli(0.3).sample_n(rng, 50_000)
        assert set(np.unique(draws)) <= {0.0, 1.0}
        assert abs(draws.mean() - 0.3) < 0.01


class TestLoadEmpirical:
    def test_plain_file(self, tmp_path):
        p = tmp_path / "vals.csv"
        p.write_text("1.5\n2.5\n4.0\n")
        emp = load_empirical(p)
        assert emp.values.tolist() == [1.5, 2.5, 4.0]

    def test_header_detected(self, tmp_path):
        p = tmp_path / "vals.csv"
        p.write_text("yield\n1.0\n2.0\n")
        assert load_empirical(p).values.tolist() == [1.0, 2.0]

    def test_bad_row_names_position(self, tmp_path):
        p = tmp_path / "vals.csv"
        p.write_text("1.0\n2.0\noops\n4.0\n")
        with pytest.raises(CsvFormatError, match="row 3"):
            load_empirical(p)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "vals.csv"
        p.write_text("")
        with pytest.raises(CsvFormatError):
            load_empirical(p)

    def test_header_only(self, tmp_path):
        p = tmp_path / "vals.csv"
        p.write_text("yield\n")
        with pytest.raises(CsvFormatError):
            load_empirical(p)


class TestConfigRoundTrip:
    def test_all_kinds(self):
        models = [
            Bernoulli(0.4),
            Uniform(0.0, 1.0),
            Gaussian(1.0, 2.0),
            Exponential(0.5),
            MIXTURE,
            Empirical(np.array([1.0, 2.0, 2.0])),
            PMM,
        ]
        for model in models:
            rebuilt = model_from_dict(model_to_dict(model))
            assert rebuilt.mean() == pytest.approx(model.mean())
            assert rebuilt.kind == model.kind

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            model_from_dict({"kind": "cauchy", "params": {}})

    def test_missing_param_named(self):
        with pytest.raises(ValueError, match="sigma"):
            model_from_dict({"kind": "gaussian", "params": {"loc": 0.0}})

    def test_validation(self):
        with pytest.raises(ValueError):
            Uniform(1.0, 0.0)
        with pytest.raises(ValueError):
            Gaussian(0.0, -1.0)
        with pytest.raises(ValueError):
            Exponential(0.0)
        with pytest.raises(ValueError):
            Bernoulli(1.2)
        with pytest.raises(ValueError):
            GaussianMixture(((0.5, 0.0, 1.0),))
