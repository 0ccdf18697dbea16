import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from chancomp.channels import identity_channel, tensor_kraus
from chancomp.estimators import ChannelTransformer, MaxOutputNorm
from chancomp.exceptions import OptimizationError, ParameterRangeError
from chancomp.linalg import random_density, schatten_norm
from chancomp.purity import (
    PuritySearchConfig,
    multiplicativity_report,
    nu_p,
    nu_p_product,
    probe_norm,
    renyi_entropy,
    renyi_from_norm,
    von_neumann_entropy,
    wh_min_entropy_closed,
    wh_nu_closed,
)
from chancomp.zoo import DepolarizingParams, TransposeDepolarizingParams, depolarizing_kraus, td_kraus, wh_kraus

from conftest import random_kraus

seeds = st.integers(0, 2**32 - 1)
FAST = PuritySearchConfig(restarts=6, max_iters=500)


# entropies


def test_renyi_pure_state():
    rho = np.diag([1.0, 0.0, 0.0])
    for p in (1.0, 2.0, 5.0):
        assert renyi_entropy(rho, p) == pytest.approx(0.0, abs=1e-15)


def test_renyi_flat():
    for p in (1.0, 1.5, 3.0):
        assert renyi_entropy(np.eye(4) / 4, p) == pytest.approx(np.log(4), abs=1e-14)
    assert renyi_entropy(np.eye(4) / 4, 2, base=2) == pytest.approx(2.0, abs=1e-14)


def test_renyi_diag_p2():
    assert renyi_entropy(np.diag([0.75, 0.25]), 2) == pytest.approx(-np.log(10 / 16), abs=1e-14)
    assert renyi_entropy(np.diag([0.75, 0.25]), 2) == pytest.approx(0.4700036292, abs=1e-9)


def test_renyi_from_norm_round_trip(rng):
    rho = random_density(3, rng)
    for p in (1.5, 2.0, 4.0):
        assert renyi_from_norm(schatten_norm(rho, p), p) == pytest.approx(renyi_entropy(rho, p), abs=1e-12)


def test_renyi_near_one_approaches_von_neumann(rng):
    rho = random_density(3, rng)
    assert renyi_entropy(rho, 1 + 1e-7) == pytest.approx(von_neumann_entropy(rho), abs=1e-6)


def test_renyi_rejects_bad_input():
    with pytest.raises(ParameterRangeError):
        renyi_entropy(np.eye(2), 2.0)
    with pytest.raises(ValueError):
        renyi_entropy(np.eye(2) / 2, 0.5)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(2, 5), st.floats(1.0, 8.0), st.floats(0.0, 8.0))
def test_renyi_pointwise_monotone(seed, d, p, dq):
    rho = random_density(d, np.random.default_rng(seed))
    assert renyi_entropy(rho, p + dq) <= renyi_entropy(rho, p) + 1e-12


# closed forms


def test_wh_nu_closed_values():
    assert wh_nu_closed(3, 2) == pytest.approx(2**-0.5, abs=1e-15)
    assert wh_nu_closed(2, 2) == pytest.approx(1.0)
    assert wh_nu_closed(3, 1) == 1.0
    assert wh_nu_closed(3, 1e6) == pytest.approx(0.5, abs=1e-5)
    assert wh_min_entropy_closed(3) == pytest.approx(np.log(2))


# config


def test_config_validation():
    with pytest.raises(ParameterRangeError):
        PuritySearchConfig(restarts=0)
    with pytest.raises(ValueError):
        PuritySearchConfig(p=0.9)
    with pytest.raises(ParameterRangeError):
        PuritySearchConfig(step=0.0)


# nu_p


@pytest.mark.parametrize("p", [1.0, 2.0, 4.0])
def test_nu_p_identity(p):
    res = nu_p(identity_channel(3), FAST, p=p)
    assert res.value == pytest.approx(1.0, abs=1e-12)
    assert res.renyi == pytest.approx(0.0, abs=1e-8)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_nu_p_completely_depolarizing(p):
    res = nu_p(td_kraus(TransposeDepolarizingParams(3, 0.0)), FAST, p=p)
    assert res.value == pytest.approx(3 ** ((1 - p) / p), abs=1e-12)


@pytest.mark.parametrize("d", [3, 4])
@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 5.0])
def test_nu_p_wh_matches_closed_form(d, p):
    res = nu_p(wh_kraus(d), FAST, p=p)
    assert abs(res.value - wh_nu_closed(d, p)) <= 1e-6
    assert res.n_converged >= 1


def test_nu_p_wh_entropy():
    res = nu_p(wh_kraus(3), FAST, p=1.0)
    assert abs(res.renyi - np.log(2)) <= 1e-6
    assert res.restarts[res.best_restart].value == pytest.approx(res.renyi)


def test_nu_p_records_every_restart():
    res = nu_p(wh_kraus(3), FAST, p=2.0)
    assert [r.index for r in res.restarts] == list(range(6))
    assert [r.seed for r in res.restarts] == list(range(6))
    assert res.value == pytest.approx(max(r.value for r in res.restarts))


def test_nu_p_deterministic():
    a = nu_p(wh_kraus(3), FAST, p=3.0, seed=11)
    b = nu_p(wh_kraus(3), FAST, p=3.0, seed=11)
    assert a.value == b.value
    assert np.array_equal(a.argmax_state, b.argmax_state)


def test_nu_p_nonconvergence_reported():
    # every pure input is optimal for WH, so a generic channel is needed here
    k = random_kraus(3, 3, 2, np.random.default_rng(7))
    res = nu_p(k, PuritySearchConfig(restarts=3, max_iters=1))
    assert res.n_converged == 0
    assert all(not r.converged for r in res.restarts)


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_nu_p_bounds_and_probe(seed):
    rng = np.random.default_rng(seed)
    k = random_kraus(2, 2, 3, rng)
    res = nu_p(k, PuritySearchConfig(restarts=3))
    assert res.value <= 1.0
    for _ in range(5):
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        assert res.value >= probe_norm(k, psi, 2.0) - 1e-9


# products


def test_product_identity():
    res = nu_p_product(identity_channel(2), identity_channel(2), FAST)
    assert res.value == pytest.approx(1.0, abs=1e-12)


def test_product_restricted_matches_full():
    from chancomp.zoo import wh_complement_kraus

    ch1, ch2 = wh_kraus(3), wh_complement_kraus(3)
    full = nu_p_product(ch1, ch2, FAST, p=2.0)
    restricted = nu_p_product(ch1, ch2, FAST, p=2.0, restrict="schmidt")
    assert abs(full.value - restricted.value) <= 1e-8
    assert abs(restricted.value - 0.5) <= 1e-6


def test_product_bad_restrict():
    with pytest.raises(ValueError):
        nu_p_product(wh_kraus(3), wh_kraus(3), FAST, restrict="diag")


def test_multiplicativity_identity():
    rep = multiplicativity_report(identity_channel(2), wh_kraus(3), 2.0, FAST)
    assert rep.ratio == pytest.approx(1.0, abs=1e-8)
    assert not rep.violation


def test_multiplicativity_depolarizing_pair():
    k = depolarizing_kraus(DepolarizingParams(2, 0.5))
    rep = multiplicativity_report(k, k, 2.0, FAST)
    assert rep.ratio >= 1 - 1e-8
    assert rep.ratio == pytest.approx(1.0, abs=1e-6)
    assert set(rep.as_dict()) == {"p", "nu1", "nu2", "nu12", "ratio", "violation"}


def test_multiplicativity_rejects_p_one():
    with pytest.raises(ParameterRangeError):
        multiplicativity_report(wh_kraus(3), wh_kraus(3), 1.0, FAST)


# estimator


def test_max_output_norm_params_and_clone():
    est = MaxOutputNorm(p=3.0, restarts=4)
    params = est.get_params()
    assert params["p"] == 3.0 and params["restarts"] == 4
    twin = clone(est).set_params(seed=5)
    assert twin.seed == 5 and est.seed == 0


def test_max_output_norm_fit():
    est = MaxOutputNorm(p=2.0, restarts=6).fit(wh_kraus(3))
    assert abs(est.value_ - 2**-0.5) <= 1e-6
    assert est.renyi_ == pytest.approx(np.log(2), abs=1e-5)
    assert est.score() == est.value_
    assert len(est.restarts_) == 6


def test_max_output_norm_from_transformer():
    tr = ChannelTransformer(family="wh", d=3).fit()
    est = MaxOutputNorm(p=3.0, restarts=4).fit(tr)
    assert abs(est.value_ - wh_nu_closed(3, 3.0)) <= 1e-6


def test_max_output_norm_product():
    est = MaxOutputNorm(p=2.0, restarts=4, restrict="schmidt").fit(wh_kraus(3), tensor_kraus(identity_channel(1), wh_kraus(3)))
    assert est.value_ == pytest.approx(0.5, abs=1e-6)


def test_max_output_norm_errors():
    with pytest.raises(OptimizationError):
        MaxOutputNorm(restarts=2, max_iter=1).fit(random_kraus(3, 3, 2, np.random.default_rng(7)))
    with pytest.raises(TypeError):
        MaxOutputNorm().fit(np.eye(3))
    with pytest.raises(ValueError):
        MaxOutputNorm(restrict="schmidt").fit(wh_kraus(3))
