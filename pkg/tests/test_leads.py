import numpy as np
import pytest

from thouless_lab import (
    ConfigError,
    CrystallineLead,
    DomainError,
    HalfLineLead,
    OffSpectrumError,
    TabulatedLead,
    band_spectrum,
    crystal_m_functions,
    essential_support,
    lead_F,
    lead_F_values,
    load_tabulated_csv,
)
from thouless_lab.selfcheck import band_interior_grid, random_sample


def test_halfline_validation():
    with pytest.raises(DomainError):
        HalfLineLead(t=0.0)


def test_halfline_in_band_value(free_lead):
    bv = lead_F(free_lead, 0.0)
    assert bv.value == pytest.approx(1j, abs=1e-15)
    assert bv.energy == 0.0


def test_halfline_outside_band_real_decaying(free_lead):
    bv = lead_F(free_lead, 3.0)
    assert bv.value.imag == 0.0
    assert bv.value.real == pytest.approx((-3.0 + np.sqrt(5.0)) / 2.0, abs=1e-14)
    # decaying: |t m| < 1
    assert abs(bv.value) < 1.0
    below = lead_F(free_lead, -3.0).value
    assert below.imag == 0.0 and abs(below) < 1.0


def test_halfline_quadratic_residual():
    lead = HalfLineLead(t=1.4, v0=-0.3)
    grid = np.linspace(-4.0, 4.0, 401)
    F = lead_F_values(lead, grid)
    resid = lead.t**2 * F * F + (grid - lead.v0) * F + 1.0
    assert np.max(np.abs(resid)) <= 1e-12


def test_halfline_resolvent_asymptotics():
    # F(E) ~ -1/E far outside the band
    lead = HalfLineLead(t=0.8, v0=0.2)
    for E in (50.0, -50.0):
        assert lead_F(lead, E).value.real == pytest.approx(-1.0 / (E - lead.v0), rel=1e-2)


def test_essential_support_halfline(free_lead):
    assert essential_support(free_lead, 0.0) is True
    assert essential_support(free_lead, 3.0) is False
    assert essential_support(free_lead, 1.999) is True


def test_essential_support_crystalline_gap(dimer):
    lead = CrystallineLead(dimer, "r")
    assert essential_support(lead, 0.0) is False  # mid-gap
    assert essential_support(lead, 1.0) is True  # mid-band


def test_crystal_m_functions_free_chain(free_chain):
    m_l, m_r = crystal_m_functions(free_chain, 0.0)
    assert m_r == pytest.approx(1j, abs=1e-15)
    assert m_l == pytest.approx(1j, abs=1e-15)


def test_crystal_m_product_identity(rng):
    # m_r / (kappa_s^2 m_l) = |m_r|^2 > 0, i.e. the two quadratic roots multiply to -b/c
    for _ in range(20):
        s = random_sample(rng, max_sites=5)
        for E in band_interior_grid(band_spectrum(s), 12):
            try:
                m_l, m_r = crystal_m_functions(s, float(E))
            except OffSpectrumError:
                continue
            lhs = m_r / (s.kappa_s**2 * m_l)
            assert lhs.imag == pytest.approx(0.0, abs=1e-10)
            assert lhs.real == pytest.approx(abs(m_r) ** 2, rel=1e-10)
            assert m_l.imag > 0.0 and m_r.imag > 0.0


def test_crystal_m_off_spectrum_refusal(free_chain, dimer):
    with pytest.raises(OffSpectrumError):
        crystal_m_functions(free_chain, 3.0)
    with pytest.raises(OffSpectrumError):
        crystal_m_functions(dimer, 0.0)  # in the gap
    with pytest.raises(OffSpectrumError):
        crystal_m_functions(free_chain, 2.0 - 1e-12)  # inside the edge zone


def test_matched_crystalline_lead_identity(rng):
    # with kappa = kappa_s and the lead periodizing the same sample,
    # kappa_s^2 m_{l/r}(E) = kappa^2 F_{l/r}(E) on band-interior grids
    for _ in range(5):
        s = random_sample(rng, max_sites=4)
        grid = band_interior_grid(band_spectrum(s), 25)
        F_l = lead_F_values(CrystallineLead(s, "l"), grid)
        F_r = lead_F_values(CrystallineLead(s, "r"), grid)
        for E, fl, fr in zip(grid, F_l, F_r):
            try:
                m_l, m_r = crystal_m_functions(s, float(E))
            except OffSpectrumError:
                continue
            assert s.kappa_s**2 * m_l == pytest.approx(s.kappa_s**2 * fl, rel=1e-12)
            assert s.kappa_s**2 * m_r == pytest.approx(s.kappa_s**2 * fr, rel=1e-12)


def test_lead_F_continuity(dimer):
    # local Lipschitz behavior away from edges: refining the step shrinks increments
    lead = CrystallineLead(dimer, "r")
    E0, E1 = 0.7, 1.3  # interior of the upper band
    coarse = np.linspace(E0, E1, 11)
    fine = np.linspace(E0, E1, 101)
    slope = lambda grid: np.max(np.abs(np.diff(lead_F_values(lead, grid)))) / (
        grid[1] - grid[0]
    )
    assert slope(fine) <= 4.0 * slope(coarse) + 1e-12


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_tabulated_node_exactness_and_interp():
    grid = np.array([-1.0, 0.0, 1.0, 2.0])
    vals = np.array([0.1 + 0.5j, -0.2 + 1.0j, 0.0 + 0.8j, 0.3 + 0.1j])
    lead = TabulatedLead(grid, vals)
    for E, v in zip(grid, vals):
        assert lead_F(lead, float(E)).value == pytest.approx(v, abs=1e-15)
    mid = lead_F(lead, 0.5).value
    assert mid == pytest.approx(0.5 * (vals[1] + vals[2]), abs=1e-15)


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_tabulated_extrapolation_rejected():
    lead = TabulatedLead(np.array([0.0, 1.0]), np.array([1j, 1j]))
    with pytest.raises(DomainError):
        lead_F(lead, 2.0)
    assert essential_support(lead, 2.0) is False  # support query never raises


def test_tabulated_validation():
    with pytest.raises(DomainError):
        TabulatedLead(np.array([0.0, 0.0]), np.array([1j, 1j]))
    with pytest.raises(DomainError):
        TabulatedLead(np.array([0.0, 1.0]), np.array([1j, -0.5j]))


def test_tabulated_normalization_warning():
    import warnings

    grid = np.linspace(-2.0, 2.0, 200)
    with pytest.warns(UserWarning, match="normalized spectral measure"):
        TabulatedLead(grid, np.full(grid.size, 5.0j))
    # a properly normalized semicircle stays silent
    im = np.sqrt(np.maximum(4.0 - grid**2, 0.0)) / 2.0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        TabulatedLead(grid, 1j * im)


def test_load_tabulated_csv(tmp_path):
    path = tmp_path / "lead.csv"
    grid = np.linspace(-2.0, 2.0, 201)  # odd count puts a node at E = 0
    im = np.sqrt(np.maximum(4.0 - grid**2, 0.0)) / 2.0
    lines = ["E,ReF,ImF"] + [f"{e},{-e / 2.0},{v}" for e, v in zip(grid, im)]
    path.write_text("\n".join(lines) + "\n")
    lead = load_tabulated_csv(path)
    assert lead.energies.size == 201
    assert lead_F(lead, 0.0).value == pytest.approx(1j, abs=1e-12)


def test_load_tabulated_csv_errors(tmp_path):
    bad_header = tmp_path / "h.csv"
    bad_header.write_text("energy,re,im\n0,0,1\n1,0,1\n")
    with pytest.raises(ConfigError, match=":1:"):
        load_tabulated_csv(bad_header)

    bad_row = tmp_path / "r.csv"
    bad_row.write_text("E,ReF,ImF\n0,0,1\n1,zero,1\n")
    with pytest.raises(ConfigError, match=":3:"):
        load_tabulated_csv(bad_row)

    bad_cols = tmp_path / "c.csv"
    bad_cols.write_text("E,ReF,ImF\n0,0\n")
    with pytest.raises(ConfigError, match=":2:"):
        load_tabulated_csv(bad_cols)

    not_increasing = tmp_path / "i.csv"
    not_increasing.write_text("E,ReF,ImF\n0,0,1\n0,0,1\n")
    with pytest.raises(ConfigError, match="strictly increasing"):
        load_tabulated_csv(not_increasing)
