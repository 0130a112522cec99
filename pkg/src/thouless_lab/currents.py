"""Steady currents: Landauer-Buttiker, crystalline limit, and Thouless.

All three current families are integrals over the band spectrum of the
periodized sample,

    <Phi>  = (1/2pi) ∫ T(E) E Delta(E) dE        (energy, units 1/hbar)
    <I>    = (1/2pi) ∫ T(E) Delta(E) dE          (charge, units e/hbar)
    <J>    = (1/2pi) ∫ T(E) varsigma(E) dE       (entropy, units k_B/hbar)

with T = T_N, T_infty, or identically 1 (Thouless).  Delta and varsigma
are built from Fermi-Dirac occupations of the two reservoirs; the spin
degeneracy factor 2 is deliberately not included.  Quadrature is composite
Gauss-Legendre over each band shrunk by a small edge margin (the
integrands are only a.e.-defined at band edges), with panel doubling until
successive estimates agree.

At beta = inf the occupations are exact indicators: panels are split at the
chemical potentials, and an off-equilibrium entropy current is genuinely
+inf (zeta diverges on the bias window), reported as such with a nan
balance residual.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, NumericalError, QuadratureError
from .jacobi import BandSpectrum, SampleSpec, band_spectrum, thouless_conductance
from .leads import LeadModel
from .transport import transmittance_inf, transmittance_n

log = logging.getLogger(__name__)

_MAX_HALVINGS = 12


@dataclass(frozen=True)
class ThermoState:
    """Reservoir inverse temperatures (positive, may be math.inf) and chemical potentials."""

    beta_l: float
    mu_l: float
    beta_r: float
    mu_r: float

    def __post_init__(self):
        for name in ("beta_l", "beta_r"):
            b = float(getattr(self, name))
            object.__setattr__(self, name, b)
            if not b > 0.0:
                raise DomainError(f"{name} must be positive (math.inf allowed)")
        object.__setattr__(self, "mu_l", float(self.mu_l))
        object.__setattr__(self, "mu_r", float(self.mu_r))

    @property
    def is_equilibrium(self) -> bool:
        return self.beta_l == self.beta_r and self.mu_l == self.mu_r


@dataclass(frozen=True)
class QuadratureConfig:
    """Composite Gauss-Legendre settings for band integrals.

    edge_margin is the fraction of each band's width excluded at both edges;
    the reported error estimate includes a bound for the excluded mass.
    """

    panels_per_band: int = 8
    points_per_panel: int = 12
    edge_margin: float = 1e-4
    abs_tol: float = 1e-8

    def __post_init__(self):
        if self.panels_per_band < 1 or self.points_per_panel < 1:
            raise DomainError("panel and point counts must be positive")
        if not 0.0 < self.edge_margin < 0.5:
            raise DomainError("edge_margin must lie in (0, 0.5)")
        if not self.abs_tol > 0.0:
            raise DomainError("abs_tol must be positive")


@dataclass(frozen=True)
class CurrentReport:
    """Steady currents with conservation and entropy-balance residuals.

    conservation_residuals = (|phi_l + phi_r|, |i_l + i_r|); the entropy
    balance residual is nan when either beta is infinite (the balance
    identity involves beta * (phi - mu i), ill-defined there).
    """

    phi_l: float
    phi_r: float
    i_l: float
    i_r: float
    entropy_j: float
    conservation_residuals: tuple[float, float]
    entropy_balance_residual: float


def fermi_dirac(beta: float, mu: float, E):
    """Fermi-Dirac occupation 1 / (1 + e^{beta (E - mu)}), overflow-safe.

    beta = math.inf yields the indicator of E < mu with value 1/2 at E = mu.
    Accepts scalars or arrays.
    """
    scalar = np.ndim(E) == 0
    E_arr = np.atleast_1d(np.asarray(E, dtype=float))
    if math.isinf(beta):
        out = np.where(E_arr < mu, 1.0, np.where(E_arr > mu, 0.0, 0.5))
    else:
        x = beta * (E_arr - mu)
        out = np.empty_like(x)
        pos = x >= 0.0
        ex = np.exp(-np.abs(x))
        out[pos] = ex[pos] / (1.0 + ex[pos])
        out[~pos] = 1.0 / (1.0 + ex[~pos])
    return float(out[0]) if scalar else out


def _zeta(beta: float, mu: float, E: np.ndarray) -> np.ndarray:
    if math.isinf(beta):
        return np.where(E > mu, np.inf, np.where(E < mu, -np.inf, 0.0))
    return beta * (E - mu)


def weights(thermo: ThermoState, E):
    """Thermodynamic weights (zeta_l, zeta_r, delta_l, delta_r, varsigma) at E.

    zeta = beta (E - mu), Delta_{l/r} = rho_{l/r} - rho_{r/l}, and
    varsigma = (zeta_r - zeta_l) Delta_l >= 0, vanishing identically at
    equilibrium.  With an infinite beta off equilibrium varsigma is +inf on
    the bias window.  Accepts scalars or arrays.
    """
    scalar = np.ndim(E) == 0
    E_arr = np.atleast_1d(np.asarray(E, dtype=float))
    rho_l = np.atleast_1d(fermi_dirac(thermo.beta_l, thermo.mu_l, E_arr))
    rho_r = np.atleast_1d(fermi_dirac(thermo.beta_r, thermo.mu_r, E_arr))
    zeta_l = _zeta(thermo.beta_l, thermo.mu_l, E_arr)
    zeta_r = _zeta(thermo.beta_r, thermo.mu_r, E_arr)
    delta_l = rho_l - rho_r
    delta_r = -delta_l
    with np.errstate(invalid="ignore"):
        diff = zeta_r - zeta_l
        varsigma = np.where(delta_l == 0.0, 0.0, diff * delta_l)
    if scalar:
        return tuple(float(v[0]) for v in (zeta_l, zeta_r, delta_l, delta_r, varsigma))
    return zeta_l, zeta_r, delta_l, delta_r, varsigma


def sign_change_energy(thermo: ThermoState) -> float:
    """The unique energy E_c where Delta changes sign (requires beta_l != beta_r).

    Derived as the root of zeta_r(E) - zeta_l(E) = 0, i.e.
    E_c = (beta_r mu_r - beta_l mu_l) / (beta_r - beta_l); for a single
    infinite beta the limit is that reservoir's chemical potential.
    """
    bl, br = thermo.beta_l, thermo.beta_r
    if bl == br:
        raise DomainError("Delta has no sign change when beta_l = beta_r")
    if math.isinf(bl):
        return thermo.mu_l
    if math.isinf(br):
        return thermo.mu_r
    return (br * thermo.mu_r - bl * thermo.mu_l) / (br - bl)


def _segments(spectrum: BandSpectrum, edge_margin: float, breakpoints) -> list[tuple[float, float]]:
    """Band intervals shrunk by the edge margin and split at interior breakpoints."""
    segs: list[tuple[float, float]] = []
    for lo, hi in spectrum.bands:
        w = hi - lo
        s0, s1 = lo + edge_margin * w, hi - edge_margin * w
        if s1 <= s0:
            continue
        cuts = [s0] + sorted(b for b in breakpoints if s0 < b < s1) + [s1]
        segs.extend(zip(cuts[:-1], cuts[1:]))
    return segs


def _adaptive_panels(spectrum, integrand_vec, quad: QuadratureConfig, breakpoints=()):
    """Adaptive composite Gauss-Legendre for a vector-valued integrand.

    integrand_vec maps an energy array of length n to an (m, n) array.
    Panels per segment start at quad.panels_per_band and double until all
    finite components move by less than abs_tol; components that come out
    non-finite (infinite entropy weights) are passed through with an inf
    error estimate.  Returns (values (m,), error_estimates (m,)).
    """
    segs = _segments(spectrum, quad.edge_margin, breakpoints)
    probe = np.atleast_2d(integrand_vec(np.empty(0)))
    m = probe.shape[0]
    if not segs:
        return np.zeros(m), np.zeros(m)
    xg, wg = np.polynomial.legendre.leggauss(quad.points_per_panel)
    margin_measure = sum(2.0 * quad.edge_margin * (hi - lo) for lo, hi in spectrum.bands)

    panels = quad.panels_per_band
    prev = None
    diff = np.full(m, np.inf)
    total = np.zeros(m)
    fmax = np.zeros(m)
    for _ in range(_MAX_HALVINGS + 1):
        total = np.zeros(m)
        fmax = np.zeros(m)
        for s0, s1 in segs:
            edges = np.linspace(s0, s1, panels + 1)
            half = (edges[1] - edges[0]) / 2.0
            mids = (edges[:-1] + edges[1:]) / 2.0
            nodes = (mids[:, None] + half * xg[None, :]).ravel()
            w = np.tile(wg * half, panels)
            vals = np.atleast_2d(integrand_vec(nodes))
            with np.errstate(invalid="ignore"):
                total = total + vals @ w
            finite_vals = np.where(np.isfinite(vals), np.abs(vals), 0.0)
            if finite_vals.size:
                fmax = np.maximum(fmax, finite_vals.max(axis=1))
        finite = np.isfinite(total)
        if prev is not None:
            with np.errstate(invalid="ignore"):
                diff = np.abs(total - prev)
            ok = finite & np.isfinite(prev)
            if np.all(diff[ok] < quad.abs_tol) and np.array_equal(finite, np.isfinite(prev)):
                err = np.where(finite, np.where(ok, diff, 0.0) + fmax * margin_measure, np.inf)
                return total, err
        prev = total
        panels *= 2
    err = np.where(np.isfinite(total), diff + fmax * margin_measure, np.inf)
    raise QuadratureError(
        f"quadrature did not converge to {quad.abs_tol} after {_MAX_HALVINGS} panel doublings",
        value=total,
        error_estimate=err,
    )


def integrate_bands(
    spectrum: BandSpectrum,
    integrand,
    quad: QuadratureConfig,
    breakpoints=(),
) -> tuple[float, float]:
    """Integral of a scalar integrand over the band spectrum minus edge margins.

    integrand must accept an energy array and return an array of values.
    Returns (value, error_estimate); the estimate combines the last panel
    refinement difference with a bound on the margin-excluded mass.
    """
    vals, errs = _adaptive_panels(
        spectrum, lambda E: np.asarray(integrand(E))[None, :], quad, breakpoints
    )
    return float(vals[0]), float(errs[0])


def _mu_breakpoints(thermo: ThermoState) -> list[float]:
    cuts = []
    if math.isinf(thermo.beta_l):
        cuts.append(thermo.mu_l)
    if math.isinf(thermo.beta_r):
        cuts.append(thermo.mu_r)
    return cuts


def _current_report(T_of_E, spectrum, thermo: ThermoState, quad: QuadratureConfig) -> CurrentReport:
    """Assemble all five current integrals for a given transmittance profile."""

    def integrand(E: np.ndarray) -> np.ndarray:
        T = T_of_E(E)
        _, _, delta_l, delta_r, varsigma = weights(thermo, E)
        with np.errstate(invalid="ignore"):
            ent = np.where(T == 0.0, 0.0, T * varsigma)
        return np.vstack([T * E * delta_l, T * E * delta_r, T * delta_l, T * delta_r, ent])

    vals, _ = _adaptive_panels(spectrum, integrand, quad, _mu_breakpoints(thermo))
    phi_l, phi_r, i_l, i_r, ent = (v / (2.0 * np.pi) for v in vals)

    if ent < -quad.abs_tol:
        raise NumericalError(f"entropy production {ent} below -abs_tol")
    if math.isinf(thermo.beta_l) or math.isinf(thermo.beta_r):
        balance = math.nan
    else:
        balance = abs(
            ent
            + thermo.beta_l * (phi_l - thermo.mu_l * i_l)
            + thermo.beta_r * (phi_r - thermo.mu_r * i_r)
        )
    return CurrentReport(
        phi_l=float(phi_l),
        phi_r=float(phi_r),
        i_l=float(i_l),
        i_r=float(i_r),
        entropy_j=float(ent),
        conservation_residuals=(abs(float(phi_l + phi_r)), abs(float(i_l + i_r))),
        entropy_balance_residual=balance,
    )


def lb_currents(
    sample: SampleSpec,
    lead_l: LeadModel,
    lead_r: LeadModel,
    kappa: float,
    n_cells: int,
    thermo: ThermoState,
    quad: QuadratureConfig = QuadratureConfig(),
) -> CurrentReport:
    """Landauer-Buttiker steady currents of the N-fold repeated sample."""
    spectrum = band_spectrum(sample)
    return _current_report(
        lambda E: transmittance_n(sample, lead_l, lead_r, kappa, n_cells, E),
        spectrum,
        thermo,
        quad,
    )


def crystalline_currents(
    sample: SampleSpec,
    lead_l: LeadModel,
    lead_r: LeadModel,
    kappa: float,
    thermo: ThermoState,
    quad: QuadratureConfig = QuadratureConfig(),
) -> CurrentReport:
    """Crystalline-limit steady currents (T = T_infty over the band spectrum)."""
    spectrum = band_spectrum(sample)
    return _current_report(
        lambda E: transmittance_inf(sample, lead_l, lead_r, kappa, E),
        spectrum,
        thermo,
        quad,
    )


def thouless_currents(
    sample: SampleSpec,
    thermo: ThermoState,
    quad: QuadratureConfig = QuadratureConfig(),
) -> CurrentReport:
    """Thouless currents: reflectionless transport, T = 1 on the band spectrum."""
    spectrum = band_spectrum(sample)
    return _current_report(lambda E: np.ones_like(E), spectrum, thermo, quad)


def zero_temperature_conductance(
    sample: SampleSpec,
    lead_l: LeadModel,
    lead_r: LeadModel,
    kappa: float,
    mu_l: float,
    mu_r: float,
    quad: QuadratureConfig = QuadratureConfig(),
) -> tuple[float, float]:
    """Mean zero-temperature conductance over the window [mu_l, mu_r] and its Thouless bound.

    g is the crystalline charge current at beta = inf divided by the window
    width; g_th = |sp(h_crystal) ∩ I| / (2 pi |I|) dominates it, with
    equality for matched (reflectionless) leads.
    """
    if not mu_r > mu_l:
        raise DomainError("window must satisfy mu_l < mu_r")
    thermo = ThermoState(math.inf, mu_l, math.inf, mu_r)
    report = crystalline_currents(sample, lead_l, lead_r, kappa, thermo, quad)
    g = report.i_r / (mu_r - mu_l)
    g_th = thouless_conductance(sample, (mu_l, mu_r))
    if g > g_th + max(quad.abs_tol, 1e-12):
        raise NumericalError(f"g = {g} exceeds its Thouless bound {g_th}")
    return g, g_th


@dataclass(frozen=True)
class ConvergenceRow:
    """One row of a crystalline-limit convergence study."""

    n_cells: int
    integral_n: float
    integral_inf: float
    abs_diff: float
    converged: bool


def convergence_study(
    sample: SampleSpec,
    lead_l: LeadModel,
    lead_r: LeadModel,
    kappa: float,
    weight,
    n_list,
    quad: QuadratureConfig = QuadratureConfig(),
    breakpoints=(),
) -> list[ConvergenceRow]:
    """Tabulate ∫ T_N f against ∫ T_infty f for increasing N.

    The weak convergence T_N -> T_infty has no rate: finite-N rows
    oscillate, and the table reports them as computed.  The integrand
    oscillates like e^{2iN theta}, so each row's panel count grows linearly
    with N and the row tolerance is relaxed to at least 1e-6; rows whose
    quadrature still fails are flagged with converged=False and the study
    continues.  `weight` maps an energy array to weight values; pass its
    discontinuities in `breakpoints`.
    """
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise DomainError("n_list must be strictly increasing")
    spectrum = band_spectrum(sample)
    val_inf, _ = _adaptive_panels(
        spectrum,
        lambda E: (transmittance_inf(sample, lead_l, lead_r, kappa, E) * weight(E))[None, :],
        quad,
        breakpoints,
    )
    integral_inf = float(val_inf[0])

    rows: list[ConvergenceRow] = []
    for n in n_list:
        row_quad = replace(
            quad,
            abs_tol=max(quad.abs_tol, 1e-6),
            panels_per_band=quad.panels_per_band + 2 * n,
        )

        def integrand(E: np.ndarray, n=n) -> np.ndarray:
            return (transmittance_n(sample, lead_l, lead_r, kappa, n, E) * weight(E))[None, :]

        try:
            vals, _ = _adaptive_panels(spectrum, integrand, row_quad, breakpoints)
            value, ok = float(vals[0]), True
        except QuadratureError as exc:
            value, ok = float(exc.value[0]), False
            log.warning("convergence row N=%d did not converge", n)
        rows.append(ConvergenceRow(n, value, integral_inf, abs(value - integral_inf), ok))
    return rows
