import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_coherent_mixture, random_pure
from twomode.dephasing import evolve_closed_form
from twomode.errors import DomainError, PremiseError, UndefinedSqueezingError
from twomode.fock import PureState, coherent_state, fock_state, maximally_mixed
from twomode.metrology import (
    DirectionTriplet,
    averaged_rotated_variance,
    convexity_bound_check,
    dephasing_rotation,
    direction_triplets,
    evolved_moments,
    evolved_spin_mean,
    evolved_spin_variance,
    fibonacci_sphere,
    heisenberg_check,
    min_squeezing_scan,
    orthogonal_basis,
    spin_mean,
    spin_moments,
    spin_variance,
    squeezing_parameter,
    squeezing_sweep,
)

X, Y, Z = np.eye(3)


def squeezed_two_boson():
    # xi_W^2 = 1 / (1 + sin(pi/4)) for n2 = x, n3 = z
    return PureState.normalized(2, [-np.sin(np.pi / 8), 0.0, np.cos(np.pi / 8)]).density_matrix()


def random_axis(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def random_triplet(rng):
    n3 = random_axis(rng)
    e1, e2 = orthogonal_basis(n3)
    a = rng.uniform(0, 2 * np.pi)
    return DirectionTriplet.from_n2_n3(np.cos(a) * e1 + np.sin(a) * e2, n3)


def test_triplet_validation():
    DirectionTriplet(X, Y, Z)
    with pytest.raises(DomainError, match="right-handed"):
        DirectionTriplet(Y, X, Z)
    with pytest.raises(DomainError, match="orthogonal"):
        DirectionTriplet(X, X, Z)
    with pytest.raises(DomainError):
        DirectionTriplet(X, Y, 2 * Z)


@pytest.mark.parametrize("n", [1, 4, 7])
def test_spin_mean_examples(n):
    top = fock_state(n, n).density_matrix()
    assert spin_mean(top, Z) == pytest.approx(n / 2, abs=1e-14)
    assert spin_mean(top, X) == 0.0
    assert spin_mean(coherent_state(0.5, 0.0, n).density_matrix(), X) == pytest.approx(n / 2, abs=1e-12)


@pytest.mark.parametrize("n", [1, 4, 7])
def test_spin_variance_examples(n):
    top = fock_state(n, n).density_matrix()
    assert spin_variance(top, Z) == 0.0
    assert spin_variance(top, X) == pytest.approx(n / 4, abs=1e-13)
    expected = sum((k - n / 2) ** 2 for k in range(n + 1)) / (n + 1)
    assert spin_variance(maximally_mixed(n), Z) == pytest.approx(expected, abs=1e-13)


def test_moments_match_direct_traces(rng):
    rho = random_coherent_mixture(rng, 5)
    mean, second = spin_moments(rho)
    for _ in range(5):
        n = random_axis(rng)
        assert n @ mean == pytest.approx(spin_mean(rho, n), abs=1e-12)
        assert n @ second @ n - (n @ mean) ** 2 == pytest.approx(spin_variance(rho, n), abs=1e-12)


def test_heisenberg_examples(rng):
    n = 6
    chk = heisenberg_check(fock_state(n, n).density_matrix(), DirectionTriplet.standard())
    assert chk.lhs == pytest.approx(n * n / 16, abs=1e-12)
    assert chk.rhs == pytest.approx(n * n / 16, abs=1e-12)
    assert chk.holds
    chk = heisenberg_check(maximally_mixed(n), random_triplet(rng))
    assert chk.rhs == pytest.approx(0.0, abs=1e-20) and chk.holds


def test_heisenberg_random_sweep(rng):
    for i in range(100):
        n = 1 + i % 8
        rho = random_pure(rng, n) if i % 2 else random_coherent_mixture(rng, n)
        assert heisenberg_check(rho, random_triplet(rng)).holds


@pytest.mark.parametrize("n", [1, 3, 8])
def test_squeezing_shot_noise_references(n):
    rep = squeezing_parameter(fock_state(n, n).density_matrix(), DirectionTriplet.from_n2_n3(X, Z))
    assert rep.xi_w_squared == pytest.approx(1.0, abs=1e-12)
    assert rep.delta_theta_squared == pytest.approx(1 / n, abs=1e-12)
    assert rep.delta_theta_squared == pytest.approx(rep.xi_w_squared / n, abs=1e-12)
    assert rep.xi_w_squared == pytest.approx(n * rep.variance_n2 / rep.mean_n3 ** 2, abs=1e-12)
    rep = squeezing_parameter(coherent_state(0.5, 0.0, n).density_matrix(), DirectionTriplet.from_n2_n3(Z, X))
    assert rep.xi_w_squared == pytest.approx(1.0, abs=1e-12)


def test_squeezing_undefined_for_zero_mean():
    with pytest.raises(UndefinedSqueezingError):
        squeezing_parameter(maximally_mixed(4), DirectionTriplet.standard())


def test_rotation_matrix_is_proper():
    for u in (-3.0, 0.0, 0.4, 7.0):
        for t, g in ((0.0, 1.0), (1.3, 0.5), (5.0, 2.0)):
            r = dephasing_rotation(u, t, g)
            np.testing.assert_allclose(r @ r.T, np.eye(3), atol=1e-14)
            assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-14)
            v = r @ np.array([0.6, 0.0, 0.8])
            assert abs(np.linalg.norm(v) - 1) <= 1e-12


def test_evolved_mean_examples(rng):
    rho = random_coherent_mixture(rng, 5)
    for t in (0.0, 0.3, 1.7):
        assert evolved_spin_mean(rho, Z, 1.0, t) == pytest.approx(spin_mean(rho, Z), abs=1e-12)
        assert evolved_spin_mean(rho, X, 1.0, t) == pytest.approx(np.exp(-t / 2) * spin_mean(rho, X), abs=1e-10)
    n = random_axis(rng)
    assert evolved_spin_mean(rho, n, 0.8, 0.0) == pytest.approx(spin_mean(rho, n), abs=1e-13)


def test_evolved_mean_dual_path(rng):
    rho = random_pure(rng, 6)
    gamma, t = 0.9, 1.4
    rho_t = evolve_closed_form(rho, gamma, [t]).states[0]
    for _ in range(4):
        n = random_axis(rng)
        assert abs(evolved_spin_mean(rho, n, gamma, t) - spin_mean(rho_t, n)) <= 1e-8


def test_evolved_variance_examples(rng):
    rho = random_pure(rng, 4)
    n = random_axis(rng)
    assert evolved_spin_variance(rho, n, 1.0, 0.0) == pytest.approx(spin_variance(rho, n), abs=1e-12)
    for t in (0.5, 2.0):
        assert evolved_spin_variance(rho, Z, 1.0, t) == pytest.approx(spin_variance(rho, Z), abs=1e-12)
    coh = coherent_state(0.5, 0.0, 4).density_matrix()
    direct = spin_variance(evolve_closed_form(coh, 1.0, [0.5]).states[0], X)
    assert abs(evolved_spin_variance(coh, X, 1.0, 0.5) - direct) <= 1e-7


def test_evolved_moments_consistent(rng):
    rho = random_coherent_mixture(rng, 4)
    m_t, s_t = evolved_moments(rho, 1.1, 0.8)
    rho_t = evolve_closed_form(rho, 1.1, [0.8]).states[0]
    m_d, s_d = spin_moments(rho_t)
    np.testing.assert_allclose(m_t, m_d, atol=1e-10)
    np.testing.assert_allclose(s_t, s_d, atol=1e-10)


def test_convexity_intermediate_inequality(rng):
    for i in range(30):
        n = 1 + i % 7
        rho = random_coherent_mixture(rng, n)
        axis = random_axis(rng)
        t = rng.uniform(0, 3)
        rho_t = evolve_closed_form(rho, 1.0, [t]).states[0]
        assert spin_variance(rho_t, axis) >= averaged_rotated_variance(rho, axis, 1.0, t) - 1e-9


@pytest.mark.parametrize("t", [0.1, 0.5, 1.0, 2.0])
def test_bound_holds_for_fock_input(t):
    trip = DirectionTriplet.from_n2_n3(X, Z)
    chk = convexity_bound_check(fock_state(4, 4).density_matrix(), trip, 1.0, t)
    assert chk.holds


def test_bound_reduces_to_squeezing_at_zero_time():
    rho = coherent_state(0.5, 0.0, 3).density_matrix()
    trip = DirectionTriplet.from_n2_n3(Z, X)
    chk = convexity_bound_check(rho, trip, 1.0, 0.0)
    assert chk.lhs == pytest.approx(squeezing_parameter(rho, trip).xi_w_squared, abs=1e-12)
    assert chk.lhs >= 1 - 1e-8


def test_bound_sweep_coherent():
    rho = coherent_state(0.5, 0.0, 6).density_matrix()
    trip = DirectionTriplet.from_n2_n3(Z, X)
    for t in np.linspace(0, 4, 9):
        assert convexity_bound_check(rho, trip, 0.5, t).holds


def test_bound_rejects_squeezed_premise():
    with pytest.raises(PremiseError):
        convexity_bound_check(squeezed_two_boson(), DirectionTriplet.from_n2_n3(X, Z), 1.0, 0.5)


def test_bound_rejects_vanishing_mean():
    trip = DirectionTriplet.from_n2_n3(Z, X)
    with pytest.raises(UndefinedSqueezingError):
        convexity_bound_check(fock_state(3, 3).density_matrix(), trip, 1.0, 0.5)


def test_fibonacci_sphere_and_basis():
    pts = fibonacci_sphere(64)
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-15)
    assert abs(pts.mean(axis=0)).max() < 0.05
    for n3 in pts[::7]:
        e1, e2 = orthogonal_basis(n3)
        np.testing.assert_allclose(np.cross(e1, e2), n3, atol=1e-14)
        assert abs(e1 @ n3) < 1e-14
    assert len(direction_triplets(8)) == 64


@pytest.mark.parametrize("n", [2, 5])
def test_scan_unsqueezed_states(n):
    assert min_squeezing_scan(fock_state(n, n).density_matrix(), 16).min_xi == pytest.approx(1.0, abs=1e-3)
    assert min_squeezing_scan(coherent_state(0.5, 0.0, n).density_matrix(), 16).min_xi == pytest.approx(1.0, abs=1e-3)


def test_scan_finds_squeezing():
    scan = min_squeezing_scan(squeezed_two_boson(), 16)
    assert scan.min_xi < 1.0
    assert scan.min_xi == pytest.approx(1 / (1 + np.sin(np.pi / 4)), abs=1e-2)


def test_scan_undefined_without_mean_spin():
    # (|0,2> + |2,0>)/sqrt(2) has <J> = 0 along every direction
    rho = PureState.normalized(2, [1.0, 0.0, 1.0]).density_matrix()
    with pytest.raises(UndefinedSqueezingError):
        min_squeezing_scan(rho, 8)
    with pytest.raises(DomainError):
        min_squeezing_scan(rho, 4)


def test_sweep_paths_agree():
    rho = coherent_state(0.5, 0.0, 4).density_matrix()
    premise, rows = squeezing_sweep(rho, direction_triplets(8), 1.0, np.linspace(0, 2, 5))
    assert premise.min_xi >= 1 - 1e-3
    assert rows
    for r in rows:
        assert abs(r["bound_lhs"] - r["xi_w_squared"]) <= 1e-6 * max(1.0, r["xi_w_squared"])
        assert r["bound_lhs"] >= 1 - 1e-8


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6), t=st.floats(0, 3))
def test_heisenberg_holds_on_evolved_states(seed, n, t):
    rng = np.random.default_rng(seed)
    rho_t = evolve_closed_form(random_pure(rng, n), 1.0, [t]).states[0]
    assert heisenberg_check(rho_t, random_triplet(rng)).holds
