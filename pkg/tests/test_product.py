from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chancomp.exceptions import ParameterRangeError
from chancomp.linalg import cluster_eigenvalues, eigvalsh_desc
from chancomp.product import (
    SchmidtVector,
    antisym_projector,
    antisym_vectors,
    crossing_function,
    f12,
    f23,
    find_crossing,
    me_power_sum,
    me_ratio,
    me_ratio_pow,
    omega_from_schmidt,
    omega_me_closed,
    omega_me_closed_table,
    omega_me_spectrum,
    p1_projector,
    product_output,
    tr_omega_sq_closed,
    violation_scan,
    wh_square_me_spectrum,
)
from chancomp.purity import wh_nu_closed

seeds = st.integers(0, 2**32 - 1)


def test_schmidt_vector_validation():
    with pytest.raises(ParameterRangeError):
        SchmidtVector(3, [0.5, 0.5, 0.1])
    with pytest.raises(ParameterRangeError):
        SchmidtVector(2, [1.2, -0.2])
    with pytest.raises(ParameterRangeError):
        SchmidtVector(3, [0.5, 0.5])
    v = SchmidtVector(3, [0.5, 0.3, 0.2])
    assert np.isclose(np.linalg.norm(v.vector()), 1.0)
    assert v.purity == pytest.approx(0.38)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_omega_matches_direct_application(d, rng):
    for _ in range(3):
        sv = SchmidtVector.random(d, rng)
        assert np.max(np.abs(omega_from_schmidt(d, sv) - product_output(d, sv.vector()))) <= 1e-12


@pytest.mark.parametrize("d", [2, 3, 4])
def test_omega_product_input(d):
    lam = np.zeros(d)
    lam[0] = 1.0
    omega = product_output(d, SchmidtVector(d, lam).vector())
    ev = eigvalsh_desc(omega)
    # product of two rank-(d-1) flat states
    assert np.sum(ev > 1e-10) == (d - 1) ** 2
    assert np.allclose(ev[: (d - 1) ** 2], 1 / (d - 1) ** 2, atol=1e-13)
    assert np.sum(ev**2) == pytest.approx(1 / (d - 1) ** 2, abs=1e-12)
    assert np.allclose(omega_from_schmidt(d, SchmidtVector(d, lam)), omega, atol=1e-13)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_omega_uniform_is_me(d):
    assert np.allclose(omega_from_schmidt(d, SchmidtVector.uniform(d)), omega_me_closed(d), atol=1e-14)


def test_omega_d3_example():
    sv = SchmidtVector(3, [1 / 2, 1 / 3, 1 / 6])
    omega = product_output(3, sv.vector())
    assert np.trace(omega).real == pytest.approx(1.0, abs=1e-13)
    assert np.trace(omega @ omega).real == pytest.approx(tr_omega_sq_closed(3, sv.purity), abs=1e-13)


def test_tr_omega_sq_values():
    assert tr_omega_sq_closed(3, 1.0) == pytest.approx(0.25)
    assert tr_omega_sq_closed(3, 1 / 3) == pytest.approx(1 / 6)
    for d in (2, 4, 7):
        assert tr_omega_sq_closed(d, 1.0) == pytest.approx(1 / (d - 1) ** 2)
    with pytest.raises(ParameterRangeError):
        tr_omega_sq_closed(3, 0.2)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(2, 4))
def test_tr_omega_sq_property(seed, d):
    sv = SchmidtVector.random(d, np.random.default_rng(seed))
    omega = product_output(d, sv.vector())
    assert abs(np.trace(omega @ omega).real - tr_omega_sq_closed(d, sv.purity)) <= 1e-10


# antisymmetric subspace


def test_antisym_projector_ranks():
    assert np.allclose(antisym_projector(2), 0)
    assert np.linalg.matrix_rank(antisym_projector(3)) == 1
    assert np.linalg.matrix_rank(antisym_projector(4)) == comb(4, 3)


@pytest.mark.parametrize("d", [3, 4, 5])
def test_antisym_vectors(d):
    v = antisym_vectors(d)
    assert np.allclose(v.conj().T @ v, np.eye(comb(d, 3)), atol=1e-14)
    assert np.allclose(f12(d) @ v, -v) and np.allclose(f23(d) @ v, -v)


@pytest.mark.parametrize("d", [3, 4])
def test_antisym_projector_identities(d):
    p1, p2 = p1_projector(d), antisym_projector(d)
    a, b = f12(d), f23(d)
    eye = np.eye(d**3)
    # sum of signed permutations of three factors
    total = eye - a - b - a @ b @ a + a @ b + b @ a
    assert np.allclose(total, 6 * p2, atol=1e-12)
    assert np.allclose(p1 @ p2, p2, atol=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_p1_is_projector_of_rank(d):
    p1 = p1_projector(d)
    assert np.allclose(p1 @ p1, p1)
    assert round(np.trace(p1).real) == d * d * (d - 1) // 2


# spectra


def test_me_spectrum_d3_nonzero():
    rep = omega_me_spectrum(3)
    assert rep.multiplicity(1 / 3) == 1
    assert rep.multiplicity(1 / 12) == 8
    assert rep.dimension == 27


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_me_spectrum_matches_table(d):
    rep, table = omega_me_spectrum(d), omega_me_closed_table(d)
    assert len(rep.clusters) == len(table.clusters)
    for (v, m), (tv, tm) in zip(rep.clusters, table.clusters):
        assert m == tm and abs(v - tv) <= 1e-10


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_multiplicities_fill_the_space(d):
    assert comb(d, 3) + d * (d * d - 1) // 3 + d * d * (d + 1) // 2 == d**3
    assert sum(m for _, m in omega_me_closed_table(d).clusters) == d**3


def test_me_spectrum_small_examples():
    assert omega_me_closed_table(2).as_list() == [[0.5, 2], [0.0, 6]]
    rep = omega_me_closed_table(4)
    assert rep.multiplicity(1 / 9) == 4 and rep.multiplicity(1 / 36) == 20 and rep.multiplicity(0.0) == 40


def test_me_unit_trace():
    for d in (2, 3, 4):
        assert sum(v * m for v, m in omega_me_closed_table(d).clusters) == pytest.approx(1.0)


def test_square_channel_same_nonzero_spectrum_d3():
    a = [(round(v, 10), m) for v, m in wh_square_me_spectrum(3).clusters if v > 0]
    b = [(round(v, 10), m) for v, m in omega_me_spectrum(3).clusters if v > 0]
    assert a == b


# violation


def test_ratio_p2_below_one():
    assert crossing_function(3, 2.0) < 0
    assert me_ratio(3, 2.0) <= 1.0


def test_ratio_p5_above_one():
    assert me_power_sum(3, 5.0) == pytest.approx(4.147e-3, rel=1e-3)
    assert me_ratio_pow(3, 5.0) == pytest.approx(1.0617, abs=1e-4)
    assert me_ratio(3, 5.0) ** 5 == pytest.approx(me_ratio_pow(3, 5.0), rel=1e-12)


def test_ratio_forms_agree():
    for d in (3, 4, 5):
        for p in (1.0, 2.5, 7.0):
            direct = me_power_sum(d, p) / wh_nu_closed(d, p) ** (2 * p)
            assert direct == pytest.approx(me_ratio_pow(d, p), rel=1e-12)


def test_crossing_d3():
    p_star = find_crossing(3)
    assert abs(p_star - 4.78) <= 0.02
    assert abs(crossing_function(3, p_star)) <= 1e-12


def test_no_crossing_d4_and_touching_point():
    assert find_crossing(4) is None
    assert find_crossing(3, 1.0, 2.0) is None


def test_violation_scan():
    res = violation_scan(3, np.linspace(1, 10, 19))
    assert res.any_violation and res.crossing == pytest.approx(find_crossing(3))
    assert all(r > 0 for r in res.ratio_lower_bounds)
    assert np.allclose(res.log_ratios, np.log(res.ratio_lower_bounds))
    res4 = violation_scan(4, np.linspace(1, 10, 19))
    assert not res4.any_violation and res4.crossing is None
    with pytest.raises(ParameterRangeError):
        violation_scan(3, [])


def test_cluster_report_from_omega():
    rep = cluster_eigenvalues(eigvalsh_desc(omega_me_closed(3)), 1e-8)
    assert rep.values()[0] == pytest.approx(1 / 3)
