import numpy as np
import pytest

from thouless_lab import (
    DomainError,
    SampleSpec,
    band_spectrum,
    bloch_eigenvalues,
    discriminant,
    one_period_transfer,
    periodized_parameters,
    thouless_conductance,
    transfer_step,
)
from thouless_lab.selfcheck import random_sample


def test_sample_validation():
    with pytest.raises(DomainError):
        SampleSpec(hop=(), onsite=(), kappa_s=1.0)
    with pytest.raises(DomainError):
        SampleSpec(hop=(0.0,), onsite=(0.0, 0.0), kappa_s=1.0)
    with pytest.raises(DomainError):
        SampleSpec(hop=(1.0,), onsite=(0.0, 0.0), kappa_s=0.0)
    with pytest.raises(DomainError):
        SampleSpec(hop=(1.0, 1.0), onsite=(0.0, 0.0), kappa_s=1.0)


def test_periodization_is_derived():
    s = SampleSpec(hop=(2.0,), onsite=(0.5, -0.5), kappa_s=3.0)
    assert s.hopping(1) == 2.0
    assert s.hopping(2) == 3.0  # J_L = kappa_s
    assert s.hopping(3) == 2.0 and s.hopping(4) == 3.0
    assert s.onsite_at(3) == 0.5 and s.onsite_at(4) == -0.5
    diag, off = periodized_parameters(s, 3)
    np.testing.assert_array_equal(diag, [0.5, -0.5] * 3)
    np.testing.assert_array_equal(off, [2.0, 3.0, 2.0, 3.0, 2.0])


def test_transfer_step_examples(free_chain):
    np.testing.assert_allclose(
        transfer_step(free_chain, 1, 0.0).as_array(), [[0.0, -1.0], [1.0, 0.0]]
    )
    np.testing.assert_allclose(
        transfer_step(free_chain, 1, 2.0).as_array(), [[2.0, -1.0], [1.0, 0.0]]
    )
    s = SampleSpec(hop=(2.0,), onsite=(0.0, 0.0), kappa_s=1.0)
    np.testing.assert_allclose(
        transfer_step(s, 1, 1.0).as_array(), [[0.5, -0.5], [2.0, 0.0]]
    )


def test_one_period_transfer_free_chain(free_chain):
    for E in (-1.3, 0.0, 2.7):
        T = one_period_transfer(free_chain, E)
        np.testing.assert_allclose(T.as_array(), [[E, -1.0], [1.0, 0.0]])


def test_one_period_transfer_two_site_hand_product():
    s = SampleSpec(hop=(1.0,), onsite=(0.0, 0.0), kappa_s=1.0)
    T = one_period_transfer(s, 0.0)
    np.testing.assert_allclose(T.as_array(), [[-1.0, 0.0], [0.0, -1.0]], atol=1e-15)


def test_determinants_unimodular(rng):
    for _ in range(100):
        s = random_sample(rng)
        for E in rng.uniform(-3.0, 3.0, 5):
            T = one_period_transfer(s, E)
            scale = max(1.0, abs(T.a * T.d) + abs(T.b * T.c))
            assert abs(T.det - 1.0) <= 1e-12 * scale
            x = int(rng.integers(1, 2 * s.length + 1))
            A = transfer_step(s, x, E)
            assert abs(A.det - 1.0) <= 1e-12


def test_discriminant_free_chain(free_chain):
    assert discriminant(free_chain, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert discriminant(free_chain, 2.0) == pytest.approx(2.0)
    assert discriminant(free_chain, -2.0) == pytest.approx(-2.0)
    assert discriminant(free_chain, 3.0) == pytest.approx(3.0)
    grid = np.linspace(-1.9, 1.9, 7)
    np.testing.assert_allclose(discriminant(free_chain, grid), grid)


def test_discriminant_band_gap_dichotomy(rng):
    # interior grid points of every band obey |tr| <= 2; gap midpoints exceed it
    for _ in range(100):
        s = random_sample(rng)
        spectrum = band_spectrum(s)
        for lo, hi in spectrum.bands:
            w = hi - lo
            grid = np.linspace(lo + 0.005 * w, hi - 0.005 * w, 99)
            assert np.max(np.abs(discriminant(s, grid))) <= 2.0 + 1e-9
        for g_lo, g_hi in spectrum.gaps():
            assert abs(discriminant(s, 0.5 * (g_lo + g_hi))) > 2.0


def test_bloch_free_chain_dispersion(free_chain):
    for k in np.linspace(-np.pi, np.pi, 11):
        eps = bloch_eigenvalues(free_chain, k)
        assert eps.shape == (1,)
        assert eps[0] == pytest.approx(2.0 * np.cos(k), abs=1e-12)
    assert bloch_eigenvalues(free_chain, 0.0)[0] == pytest.approx(2.0)
    assert bloch_eigenvalues(free_chain, np.pi)[0] == pytest.approx(-2.0)


def test_bloch_even_in_k(rng):
    for _ in range(20):
        s = random_sample(rng)
        k = float(rng.uniform(0.0, np.pi / s.length))
        np.testing.assert_allclose(
            bloch_eigenvalues(s, k), bloch_eigenvalues(s, -k), atol=1e-10
        )


def test_bloch_zone_validation(free_chain):
    with pytest.raises(DomainError):
        bloch_eigenvalues(free_chain, 4.0)


def assert_interlacing(sample: SampleSpec) -> None:
    """eps_L(0) > eps_L(pi/L) >= eps_{L-1}(pi/L) > eps_{L-1}(0) >= eps_{L-2}(0) > ..."""
    L = sample.length
    e0 = bloch_eigenvalues(sample, 0.0)
    epi = bloch_eigenvalues(sample, np.pi / L)
    chain = []
    for step, j in enumerate(range(L - 1, -1, -1)):
        pair = (e0[j], epi[j]) if step % 2 == 0 else (epi[j], e0[j])
        chain.extend(pair)
    for i, (hi, lo) in enumerate(zip(chain[:-1], chain[1:])):
        strict = i % 2 == 0  # within-band comparisons strict, between-band may touch
        if strict:
            assert hi - lo > 1e-12, f"expected strict drop at position {i}"
        else:
            assert hi - lo >= -1e-10, f"expected non-strict drop at position {i}"


def test_bloch_interlacing(rng):
    for _ in range(100):
        assert_interlacing(random_sample(rng))


def test_band_spectrum_free_chain(free_chain):
    spectrum = band_spectrum(free_chain)
    assert len(spectrum.bands) == 1
    lo, hi = spectrum.bands[0]
    assert lo == pytest.approx(-2.0, abs=1e-14)
    assert hi == pytest.approx(2.0, abs=1e-14)


def test_band_spectrum_dimer_matches_discriminant_roots(dimer):
    # independent oracle: tr T_2(E) = 2E^2 - 2.5 by hand, |tr| = 2 at +-0.5, +-1.5
    spectrum = band_spectrum(dimer)
    expect = [(-1.5, -0.5), (0.5, 1.5)]
    assert len(spectrum.bands) == 2
    for (lo, hi), (elo, ehi) in zip(spectrum.bands, expect):
        assert lo == pytest.approx(elo, abs=1e-12)
        assert hi == pytest.approx(ehi, abs=1e-12)
    mid_gap = 0.0
    assert abs(discriminant(dimer, mid_gap)) > 2.0


def test_band_measure_vanishes_with_kappa_s():
    base = dict(hop=(1.3, 0.7), onsite=(0.2, -0.4, 0.1))
    m_small = band_spectrum(SampleSpec(kappa_s=1e-6, **base)).measure()
    m_tiny = band_spectrum(SampleSpec(kappa_s=1e-7, **base)).measure()
    assert m_small < 1e-4
    assert m_small / m_tiny == pytest.approx(10.0, rel=0.05)


def test_thouless_conductance_free_chain(free_chain):
    g = thouless_conductance(free_chain, (-2.0, 2.0))
    assert g == pytest.approx(1.0 / (2.0 * np.pi), abs=1e-15)


def test_thouless_conductance_disjoint_window(free_chain):
    assert thouless_conductance(free_chain, (5.0, 6.0)) == 0.0


def test_thouless_conductance_zero_length_window(free_chain):
    with pytest.raises(DomainError):
        thouless_conductance(free_chain, (1.0, 1.0))


def test_thouless_conductance_partition_average(dimer, rng):
    lo, hi = -1.8, 1.7
    cuts = np.sort(rng.uniform(lo, hi, 5))
    edges = [lo, *cuts, hi]
    total = thouless_conductance(dimer, (lo, hi)) * (hi - lo)
    parts = sum(
        thouless_conductance(dimer, (a, b)) * (b - a)
        for a, b in zip(edges[:-1], edges[1:])
        if b > a
    )
    assert parts == pytest.approx(total, abs=1e-12)
