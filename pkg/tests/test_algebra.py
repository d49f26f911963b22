import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koopdiff.algebra import (PosDefSequence, TestFunction, TorusMeasure, atom_scan,
                              bochner_density, check_positive_definite, convolve, fejer_weights,
                              involute, quadratic_form, scan_grid_size, toeplitz_matrix,
                              wiener_atom_mass, wiener_pp_energy)

GOLDEN = (np.sqrt(5) - 1) / 2

complexes = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@st.composite
def tfuncs(draw, max_len=6, lo=-5, hi=5):
    offset = draw(st.integers(lo, hi))
    coef = draw(st.lists(complexes, min_size=0, max_size=max_len))
    return TestFunction(offset, np.array(coef, dtype=complex))


def naive_convolve(phi, psi):
    # oracle: direct double sum over both supports
    out = {}
    for a in phi.support:
        for b in psi.support:
            out[a + b] = out.get(a + b, 0) + phi(a) * psi(b)
    return TestFunction.from_dict(out)


def fejer_closed_form(x, L):
    s = np.sin(np.pi * x)
    with np.errstate(invalid="ignore", divide="ignore"):
        v = np.sin(np.pi * (L + 1) * x) ** 2 / ((L + 1) * s ** 2)
    return np.where(np.abs(s) < 1e-15, L + 1.0, v)


# ---------------------------------------------------------------- TestFunction


def test_canonical_trimming():
    phi = TestFunction(-2, np.array([0, 0, 1, 2, 0]))
    assert phi.offset == 0
    assert np.array_equal(phi.coefficients, [1, 2])
    assert phi(-1) == 0 and phi(2) == 0 and phi(1) == 2


def test_zero_function_is_canonical():
    z = TestFunction(7, np.zeros(3))
    assert z.is_zero and z.offset == 0
    assert z == TestFunction.from_dict({})


def test_convolve_identity():
    assert convolve(TestFunction.delta(0), TestFunction.delta(0)) == TestFunction.delta(0)


def test_convolve_translation():
    assert convolve(TestFunction.delta(1), TestFunction.delta(2)) == TestFunction.delta(3)


def test_convolve_hand_example():
    phi = TestFunction.from_dict({0: 1, 1: 1})
    psi = TestFunction.from_dict({0: 1, 1: -1})
    out = convolve(phi, psi)
    assert out == TestFunction.from_dict({0: 1, 1: 0, 2: -1})
    assert out(1) == 0


def test_convolve_with_zero():
    assert convolve(TestFunction.from_dict({}), TestFunction.delta(3)).is_zero


def test_involute_examples():
    assert involute(TestFunction.delta(4)) == TestFunction.delta(-4)
    sym = TestFunction.from_dict({-1: 2.0, 0: 1.0, 1: 2.0})
    assert involute(sym) == sym
    assert involute(TestFunction.from_dict({1: 1j})) == TestFunction.from_dict({-1: -1j})


@settings(max_examples=200, deadline=None)
@given(tfuncs(), tfuncs())
def test_convolve_matches_double_sum(phi, psi):
    a, b = convolve(phi, psi), naive_convolve(phi, psi)
    assert a.offset == b.offset
    np.testing.assert_allclose(a.coefficients, b.coefficients, rtol=1e-12, atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(tfuncs(), tfuncs())
def test_convolve_commutes(phi, psi):
    a, b = convolve(phi, psi), convolve(psi, phi)
    assert a.offset == b.offset
    np.testing.assert_allclose(a.coefficients, b.coefficients, rtol=1e-12, atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(tfuncs())
def test_involute_is_isometric_involution(phi):
    assert involute(involute(phi)) == phi
    assert involute(phi).l1_norm() == pytest.approx(phi.l1_norm(), rel=1e-15)


@settings(max_examples=200, deadline=None)
@given(tfuncs())
def test_autoconvolution_at_zero_is_l2_norm(phi):
    auto = convolve(phi, involute(phi))
    assert auto(0).real == pytest.approx(np.sum(np.abs(phi.coefficients) ** 2), rel=1e-12)
    assert abs(auto(0).imag) <= 1e-9 * max(1.0, auto(0).real)


# ------------------------------------------------------------- PosDefSequence


def test_sequence_accessors_and_window():
    c = PosDefSequence.from_nonnegative([1.0, 0.5 + 0.5j, 0.25])
    assert c.max_lag == 2 and c.c0 == 1.0
    assert c[-1] == 0.5 - 0.5j
    with pytest.raises(KeyError):
        c[3]
    c.check_invariants()


def test_sequence_rejects_even_length():
    with pytest.raises(ValueError):
        PosDefSequence(np.ones(4))


def test_invariant_violations_detected():
    with pytest.raises(ValueError):
        PosDefSequence(np.array([0.5, 1.0, 0.3])).check_invariants()
    with pytest.raises(ValueError):
        PosDefSequence(np.array([2.0, 1.0, 2.0])).check_invariants()


def test_taper_and_debias():
    c = PosDefSequence(np.array([0.9, 1.0, 0.9]), window_length=10)
    np.testing.assert_allclose(c.debiased(), [1.0, 1.0, 1.0])


def test_quadratic_form_rank_one_closed_form():
    xi0, K = 0.3, 8
    c = PosDefSequence.from_function(lambda n: np.exp(2j * np.pi * n * xi0), K)
    phi = TestFunction.from_dict({-2: 1.0, 0: 0.5j, 3: -1.0})
    q_oracle = abs(sum(phi(k) * np.exp(2j * np.pi * k * xi0) for k in phi.support)) ** 2
    assert quadratic_form(c, phi) == pytest.approx(q_oracle, rel=1e-12)


def test_pd_delta():
    c = PosDefSequence.from_nonnegative([1.0, 0, 0, 0, 0])
    m, w = check_positive_definite(c, 50, rng_seed=1)
    assert m >= 0 and w is None


def test_pd_rank_one():
    c = PosDefSequence.from_function(lambda n: np.exp(2j * np.pi * n * 0.17), 20)
    m, w = check_positive_definite(c, 100, rng_seed=2)
    assert m >= -1e-9 and w is None


def test_pd_short_window():
    c = PosDefSequence.from_nonnegative([1.0, 0.8])
    m, w = check_positive_definite(c, 100, rng_seed=3)
    # oracle: eigenvalues of the 2x2 Toeplitz matrix are 1 +- 0.8
    assert m == pytest.approx(0.2, abs=1e-12) or m > 0.2
    assert w is None


def test_pd_finds_negative_direction():
    # c_n = 0.8 at |n| = 1 on a 3x3 Toeplitz block has eigenvalue 1 - 0.8 sqrt(2) < 0
    c = PosDefSequence.from_nonnegative([1.0, 0.8, 0.0])
    m, w = check_positive_definite(c, 10, rng_seed=4)
    assert m == pytest.approx(1 - 0.8 * np.sqrt(2), abs=1e-12)
    assert w is not None and quadratic_form(c, w) == pytest.approx(m, abs=1e-12)


def test_toeplitz_layout():
    c = PosDefSequence.from_nonnegative([3.0, 1 + 1j, 2j])
    T = toeplitz_matrix(c, 3)
    assert T[1, 0] == c[1] and T[0, 1] == c[-1] and T[2, 0] == c[2]


# ----------------------------------------------------------------- Bochner


def test_bochner_flat_for_delta():
    c = PosDefSequence.from_nonnegative([1.0] + [0.0] * 10)
    d = bochner_density(c, 64, 10)
    np.testing.assert_allclose(d, 1.0, atol=1e-14)


@pytest.mark.parametrize("xi0", [0.0, 0.25, 0.3, GOLDEN])
def test_bochner_fejer_kernel(xi0):
    L, G = 16, 512
    c = PosDefSequence.from_function(lambda n: np.exp(2j * np.pi * n * xi0), L)
    d = bochner_density(c, G, L)
    x = np.arange(G) / G
    np.testing.assert_allclose(d, fejer_closed_form(x - xi0, L), atol=1e-10)
    if xi0 * G == int(xi0 * G):
        assert d.max() == pytest.approx(L + 1, rel=1e-12)


def test_bochner_cosine_two_peaks():
    L, G, xi0 = 20, 400, 0.1
    c = PosDefSequence.from_function(lambda n: np.cos(2 * np.pi * n * xi0), L)
    d = bochner_density(c, G, L)
    x = np.arange(G) / G
    expect = 0.5 * fejer_closed_form(x - xi0, L) + 0.5 * fejer_closed_form(x + xi0, L)
    np.testing.assert_allclose(d, expect, atol=1e-10)
    assert d[40] == pytest.approx(d[360]) and d[40] == pytest.approx((L + 1) / 2, rel=1e-2)


def test_bochner_preconditions():
    c = PosDefSequence.from_nonnegative([1.0, 0.5])
    with pytest.raises(ValueError):
        bochner_density(c, 64, 2)
    c = PosDefSequence.from_nonnegative([1.0] + [0.0] * 8)
    with pytest.raises(ValueError):
        bochner_density(c, 16, 8)


@settings(max_examples=100, deadline=None)
@given(st.lists(complexes, min_size=2, max_size=40), st.integers(0, 10))
def test_bochner_nonnegative_and_mass_conserving(values, L):
    # a self-correlation window is positive definite
    x = np.array(values)
    N = x.size
    K = min(L, N - 1)
    pos = np.array([np.vdot(x[:N - k], x[k:]) / N for k in range(K + 1)])
    c = PosDefSequence.from_nonnegative(pos)
    d = bochner_density(c, max(4 * K, 8), K)
    assert d.min() >= -1e-9 * c.c0
    assert d.mean() == pytest.approx(c.c0, rel=1e-9, abs=1e-12)


def test_fejer_weights():
    np.testing.assert_allclose(fejer_weights(2), [1 / 3, 2 / 3, 1, 2 / 3, 1 / 3])


# ------------------------------------------------------------------ Wiener


def test_wiener_delta():
    K = 25
    c = PosDefSequence.from_nonnegative([1.0] + [0.0] * K)
    assert wiener_atom_mass(c, 0.37) == pytest.approx(1 / (2 * K + 1), rel=1e-14)


def test_wiener_exact_at_frequency():
    c = PosDefSequence.from_function(lambda n: np.exp(2j * np.pi * n * GOLDEN), 200)
    assert wiener_atom_mass(c, GOLDEN) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("offset", [0.1, 0.25, 1 / 3])
def test_wiener_dirichlet_bound(offset):
    K, xi0 = 100, 0.2
    c = PosDefSequence.from_function(lambda n: np.exp(2j * np.pi * n * xi0), K)
    m = wiener_atom_mass(c, xi0 + offset)
    dirichlet = np.sin((2 * K + 1) * np.pi * offset) / np.sin(np.pi * offset) / (2 * K + 1)
    assert m == pytest.approx(dirichlet, abs=1e-12)
    assert abs(m) <= 1 / ((2 * K + 1) * abs(np.sin(np.pi * offset))) + 1e-12


def test_wiener_array_input():
    c = PosDefSequence.from_function(lambda n: 0.5 + 0.5 * np.exp(2j * np.pi * n / 4), 40)
    m = wiener_atom_mass(c, np.array([0.0, 0.25, 0.6]))
    assert m.shape == (3,)
    np.testing.assert_allclose(m[:2], 0.5, atol=1 / 81 + 1e-12)


def test_pp_energy_examples():
    K = 30
    assert wiener_pp_energy(PosDefSequence.from_nonnegative([1.0] + [0.0] * K)) == \
        pytest.approx(1 / (2 * K + 1))
    c = PosDefSequence.from_function(lambda n: np.exp(2j * np.pi * n * 0.4), K)
    assert wiener_pp_energy(c) == pytest.approx(1.0, abs=1e-14)
    assert wiener_pp_energy(PosDefSequence(np.ones(2 * K + 1))) == 1.0


def test_wiener_needs_positive_window():
    with pytest.raises(ValueError):
        wiener_atom_mass(PosDefSequence(np.array([1.0])), 0.0)
    with pytest.raises(ValueError):
        wiener_pp_energy(PosDefSequence(np.array([1.0])))


@settings(max_examples=100, deadline=None)
@given(st.lists(complexes, min_size=1, max_size=12), st.floats(0, 1, exclude_max=True))
def test_wiener_real_for_hermitian(pos, xi):
    pos = np.array(pos)
    pos[0] = abs(pos[0]) + 1
    c = PosDefSequence.from_nonnegative(pos) if pos.size > 1 else \
        PosDefSequence.from_nonnegative([pos[0], 0])
    K = c.max_lag
    direct = np.sum(c.coefficients * np.exp(-2j * np.pi * c.lags * xi)) / (2 * K + 1)
    assert abs(direct.imag) <= 1e-12 * max(1, np.abs(c.coefficients).sum())
    assert wiener_atom_mass(c, xi) == pytest.approx(direct.real, abs=1e-12)


# ----------------------------------------------------------------- atom scan


def test_atom_scan_no_atoms():
    assert atom_scan(PosDefSequence.from_nonnegative([1.0] + [0.0] * 50), 0.1, 1024) == []


def test_atom_scan_golden_rotation():
    K = 10_000
    c = PosDefSequence.from_function(lambda n: np.exp(2j * np.pi * n * GOLDEN), K)
    atoms = atom_scan(c, 0.5, 4096)
    assert len(atoms) == 1
    x, m = atoms[0]
    assert abs(x - GOLDEN) <= 1e-6 and abs(m - 1) <= 0.01


def test_atom_scan_two_atoms():
    c = PosDefSequence.from_function(lambda n: 0.5 * (1 + np.exp(2j * np.pi * n / 3)), 300)
    atoms = atom_scan(c, 0.25, 2048)
    assert len(atoms) == 2
    (x0, m0), (x1, m1) = atoms
    assert min(x0, 1 - x0) < 1e-6 and abs(x1 - 1 / 3) < 1e-6
    assert m0 == pytest.approx(0.5, abs=1e-3) and m1 == pytest.approx(0.5, abs=1e-3)


def test_atom_scan_ignores_sidelobes():
    # a unit atom's Dirichlet sidelobes reach about 0.13, well above tau
    c = PosDefSequence.from_function(lambda n: np.exp(2j * np.pi * n * 0.3), 500)
    atoms = atom_scan(c, 0.05, 4096)
    assert len(atoms) == 1 and atoms[0][1] == pytest.approx(1.0, abs=1e-6)


def test_atom_scan_twelve_equal_atoms():
    # uniform measure on the 12th roots of unity has 12 atoms of mass 1/12
    K = 24
    c = PosDefSequence.from_function(lambda n: float(n % 12 == 0), K)
    atoms = atom_scan(c, 0.02, 1024)
    assert len(atoms) == 12
    pos = np.array([x * 12 for x, _ in atoms])
    err = np.abs(pos - np.round(pos))
    assert np.all(err <= 1e-4)
    assert sorted(int(np.round(p)) % 12 for p in pos) == list(range(12))
    np.testing.assert_allclose([m for _, m in atoms], 1 / 12, atol=1e-6)


def test_atom_scan_deterministic():
    c = PosDefSequence.from_function(lambda n: 0.3 * np.exp(2j * np.pi * n * 0.71) + (n == 0), 64)
    assert atom_scan(c, 0.1, 512) == atom_scan(c, 0.1, 512)


def test_atom_scan_rejects_nonpositive_threshold():
    with pytest.raises(ValueError):
        atom_scan(PosDefSequence.from_nonnegative([1.0, 0.0]), 0.0, 64)


def test_scan_grid_is_power_of_two_and_fine():
    assert scan_grid_size(10, 64) == 128
    assert scan_grid_size(1000, 4096) == 8192


# ------------------------------------------------------------- TorusMeasure


def test_measure_validation():
    with pytest.raises(ValueError):
        TorusMeasure([0.1, 0.1], [0.5, 0.5], np.zeros(8), 2, 1.0)
    with pytest.raises(ValueError):
        TorusMeasure([1.0], [0.5], np.zeros(8), 2, 1.0)
    with pytest.raises(ValueError):
        TorusMeasure([0.5], [-0.5], np.zeros(8), 2, 1.0)


def test_measure_coefficients_and_cdf():
    m = TorusMeasure([0.25], [0.5], np.full(64, 0.5), 4, 1.0)
    coef = m.fourier_coefficients(3)
    expect = 0.5 * np.exp(2j * np.pi * np.arange(-3, 4) * 0.25)
    expect[3] += 0.5
    np.testing.assert_allclose(coef, expect, atol=1e-14)
    np.testing.assert_allclose(m.cdf(np.array([0.0, 0.2, 0.25, 0.5, 1.0])),
                               [0.0, 0.1, 0.625, 0.75, 1.0], atol=1e-14)
