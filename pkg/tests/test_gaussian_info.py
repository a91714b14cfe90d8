import itertools

import numpy as np
import pytest

from conftest import random_stable_model
from predinfo.errors import ConsistencyError, InputError
from predinfo.gaussian_info import (
    InfoContext,
    predictive_information,
    q_sensitivity,
    sample_covariance,
    subset_mutual_information,
    to_bits,
)
from predinfo.sweep import three_unit_model
from predinfo.var_model import TimeSeries, VarModel, estimate_var, simulate_var

HALF_LN_4_3 = 0.5 * np.log(4 / 3)


def isolated_ar1(n):
    coeffs = np.zeros((1, n, n))
    coeffs[0, 0, 0] = 0.5
    return VarModel(coeffs, np.eye(n))


def test_white_noise_has_no_information():
    ctx = InfoContext.from_model(VarModel(np.zeros((1, 3, 3)), np.eye(3)))
    assert predictive_information(ctx) == 0.0


@pytest.mark.parametrize("n", [1, 2, 4])
def test_isolated_ar1_closed_form(n):
    ctx = InfoContext.from_model(isolated_ar1(n))
    assert predictive_information(ctx) == pytest.approx(HALF_LN_4_3, abs=1e-12)
    assert HALF_LN_4_3 == pytest.approx(0.14384, abs=1e-5)


def test_three_unit_pi_matches_plugin():
    m = three_unit_model()
    x = simulate_var(m, 1_000_000, seed=8)
    fit = estimate_var(x, 2)
    plugin = 0.5 * (np.linalg.slogdet(sample_covariance(x))[1] - np.linalg.slogdet(fit.innov_cov)[1])
    pi = predictive_information(InfoContext.from_model(m))
    assert pi > 0
    assert plugin == pytest.approx(pi, rel=0.02)


@pytest.mark.parametrize("seed", range(10))
def test_full_subset_equals_pi(seed):
    m = random_stable_model(np.random.default_rng(seed), 3, 2)
    ctx = InfoContext.from_model(m, q=6)
    assert subset_mutual_information(ctx, [0, 1, 2]) == pytest.approx(predictive_information(ctx), abs=1e-10)


def test_disconnected_white_unit_is_uninformative():
    m = three_unit_model(0.4, 0.3)
    coeffs = np.zeros((2, 4, 4))
    coeffs[:, :3, :3] = m.coeffs
    ctx = InfoContext.from_model(VarModel(coeffs, np.eye(4)))
    assert subset_mutual_information(ctx, [3]) == pytest.approx(0.0, abs=1e-9)


def test_monotone_under_inclusion():
    for seed in range(100):
        rng = np.random.default_rng(1000 + seed)
        n = int(rng.integers(2, 5))
        ctx = InfoContext.from_model(random_stable_model(rng, n, int(rng.integers(1, 4))), q=10)
        subsets = [s for r in range(1, n + 1) for s in itertools.combinations(range(n), r)]
        mi = {s: subset_mutual_information(ctx, s) for s in subsets}
        for a in subsets:
            assert mi[a] >= 0
            for b in subsets:
                if set(a) < set(b):
                    assert mi[a] <= mi[b] + 1e-10


def test_relabeling_permutes_subset_information(rng):
    m = random_stable_model(rng, 3, 2)
    perm = np.array([2, 0, 1])
    pm = VarModel(m.coeffs[:, perm][:, :, perm], m.innov_cov[np.ix_(perm, perm)])
    a, b = InfoContext.from_model(m, q=8), InfoContext.from_model(pm, q=8)
    assert predictive_information(a) == pytest.approx(predictive_information(b), abs=1e-10)
    for i in range(3):
        assert subset_mutual_information(b, [i]) == pytest.approx(
            subset_mutual_information(a, [perm[i]]), abs=1e-10
        )


def test_q_must_cover_model_order():
    with pytest.raises(InputError):
        InfoContext.from_model(random_stable_model(np.random.default_rng(0), 2, 3), q=2)


def test_negative_information_raises_in_model_mode():
    m = three_unit_model()
    ctx = InfoContext.from_model(m)
    bad = InfoContext(m, ctx.cov, ctx.q, 0.5 * ctx.sigma_x, "model")
    with pytest.raises(ConsistencyError):
        predictive_information(bad)


def test_sample_mode_clamps_with_warning():
    m = three_unit_model()
    ctx = InfoContext.from_model(m, sigma_x=0.5 * np.eye(3))
    assert predictive_information(ctx) == 0.0
    assert ctx.warnings


def test_sample_sigma_x_is_used(rng):
    x = simulate_var(three_unit_model(), 5000, seed=1)
    fit = estimate_var(x, 2)
    ctx = InfoContext.from_model(fit, sigma_x=sample_covariance(x))
    expect = 0.5 * (np.linalg.slogdet(sample_covariance(x))[1] - np.linalg.slogdet(fit.innov_cov)[1])
    assert predictive_information(ctx) == pytest.approx(expect, abs=1e-12)


def test_q_sensitivity_nonnegative_and_decaying():
    m = three_unit_model(0.3, 0.3)
    ctx = InfoContext.from_model(m)
    early = InfoContext.from_model(m, q=2)
    for s in ([0], [1], [2], [1, 2]):
        late = q_sensitivity(ctx, s)
        assert -1e-12 <= late < 1e-3 * subset_mutual_information(ctx, s)
        assert q_sensitivity(early, s) >= late


def test_bits_conversion():
    assert to_bits(np.log(2)) == pytest.approx(1.0)
