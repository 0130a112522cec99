"""Closed-form transmittances of N-fold repeated samples and their crystalline limit.

Everything is driven by the eigendata of the one-period transfer matrix
T_L(E).  Inside a band T_L has unimodular eigenvalues e^{±i theta} with
cos theta = tr T_L / 2 and sign(theta) = sign(b); the normalized
eigenvectors (1, kappa_s psi_±) satisfy

    kappa_s psi_±(E) = (e^{±i theta} - a) / b,
    psi_+ = -1 / (kappa_s m_r),      psi_- = -kappa_s m_l,

tying them to the Weyl m-functions of the periodized half-lines.  Outside
the bands the eigenvalues are real with |alpha| > 1 and the eigenvectors
real.  The 2x2 Green matrices of the N-cell sample, the coupled system's
off-diagonal Green value, the transmittances T_N and T_infty, and the
(r, vartheta) oscillation diagnostics are all evaluated from this data;
large-N powers use e^{±iN theta} in band and log-domain magnitudes off
band, never raw matrix powers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import (
    BandEdgeError,
    DegeneratePivotError,
    DomainError,
    NumericalError,
    SampleEigenvalueError,
    SingularEnergyError,
)
from .jacobi import GreenMatrix2, SampleSpec, _one_period_abcd, _real_eigvec2
from .leads import EDGE_TOL, SUPPORT_TOL, LeadModel, _crystal_m_values, lead_F_values

log = logging.getLogger(__name__)

# transmittance values in [-CLAMP_TOL, 1 + CLAMP_TOL] are clamped; worse is an error
CLAMP_TOL = 1e-9


@dataclass(frozen=True)
class TransferEigenData:
    """Eigenvalue and eigenvector data of T_L(E) under the in/out-of-band conventions.

    The stored psi values have the kappa_s factor stripped: the eigenvector
    for alpha^{±1} is (phi_±, kappa_s psi_±).  In band, alpha = e^{i theta}
    and psi_- = conj(psi_+); off band alpha is real with |alpha| > 1 and
    all components are real (theta is None there).
    """

    energy: float
    alpha: complex
    phi_plus: complex
    phi_minus: complex
    psi_plus: complex
    psi_minus: complex
    theta: float | None
    in_band: bool


def _eigendata_values(sample: SampleSpec, E: np.ndarray):
    """Vectorized transfer eigendata.

    Returns a dict of arrays: alpha, phi_p, phi_m, kpsi_p, kpsi_m (the
    second eigenvector components kappa_s psi_±), theta (nan off band),
    in_band, edge (within the band-edge exclusion zone).  No errors are
    raised; callers decide how to treat flagged entries.
    """
    a, b, c, d = _one_period_abcd(sample, E)
    tr = a + d
    disc = tr * tr - 4.0
    in_band = disc < 0.0
    edge = np.abs(np.abs(tr) - 2.0) < EDGE_TOL

    alpha = np.empty(E.shape, dtype=complex)
    phi_p = np.ones(E.shape, dtype=complex)
    phi_m = np.ones(E.shape, dtype=complex)
    kpsi_p = np.empty(E.shape, dtype=complex)
    kpsi_m = np.empty(E.shape, dtype=complex)
    theta = np.full(E.shape, np.nan)

    # in band: cos theta = tr/2, sign(theta) = sign(b); b != 0 there since bc < 0
    bi = b[in_band]
    costh = tr[in_band] / 2.0
    th = np.where(bi >= 0.0, 1.0, -1.0) * np.arccos(np.clip(costh, -1.0, 1.0))
    al_in = np.exp(1j * th)
    theta[in_band] = th
    alpha[in_band] = al_in
    kpsi_p[in_band] = (al_in - a[in_band]) / bi
    kpsi_m[in_band] = (np.conj(al_in) - a[in_band]) / bi

    off = ~in_band
    if np.any(off):
        sq = np.sqrt(np.maximum(disc[off], 0.0))
        tro = tr[off]
        al = (tro + np.sign(tro) * sq) / 2.0  # |alpha| >= 1
        be = 1.0 / al
        # real eigenvectors (phi, kappa_s psi), any normalization
        ph_p, w_p = _real_eigvec2(a[off], b[off], c[off], d[off], al)
        ph_m, w_m = _real_eigvec2(a[off], b[off], c[off], d[off], be)
        alpha[off] = al
        phi_p[off] = ph_p
        phi_m[off] = ph_m
        kpsi_p[off] = w_p
        kpsi_m[off] = w_m
    return {
        "a": a,
        "b": b,
        "c": c,
        "d": d,
        "alpha": alpha,
        "phi_p": phi_p,
        "phi_m": phi_m,
        "kpsi_p": kpsi_p,
        "kpsi_m": kpsi_m,
        "theta": theta,
        "in_band": in_band,
        "edge": edge,
    }


def transfer_eigendata(sample: SampleSpec, E: float) -> TransferEigenData:
    """Eigendata of T_L(E) at a single energy.

    Raises BandEdgeError within the |tr T_L| ~ 2 exclusion zone and
    DegeneratePivotError if b(E) degenerates inside a band (the latter
    cannot occur strictly inside a band, where b*c < 0; the guard protects
    against rounding at the zone boundary).
    """
    E_arr = np.asarray([float(E)])
    ed = _eigendata_values(sample, E_arr)
    if ed["edge"][0]:
        raise BandEdgeError(
            f"transfer eigendata at E={E}: |tr T_L| within {EDGE_TOL} of 2"
        )
    if ed["in_band"][0] and abs(ed["b"][0]) < 1e-12:
        raise DegeneratePivotError(f"b(E) degenerate inside a band at E={E}")
    kS = sample.kappa_s
    in_band = bool(ed["in_band"][0])
    return TransferEigenData(
        energy=float(E),
        alpha=complex(ed["alpha"][0]),
        phi_plus=complex(ed["phi_p"][0]),
        phi_minus=complex(ed["phi_m"][0]),
        psi_plus=complex(ed["kpsi_p"][0]) / kS,
        psi_minus=complex(ed["kpsi_m"][0]) / kS,
        theta=float(ed["theta"][0]) if in_band else None,
        in_band=in_band,
    )


def _alpha_pow(ed, n_cells: int):
    """(alpha^N, alpha^{-N}) elementwise: e^{±iN theta} in band, log-domain off band.

    Off band alpha^{-N} underflows gracefully to 0; alpha^{+N} is returned
    as inf past the overflow threshold (callers use the normalized forms
    that never multiply by it).
    """
    in_band = ed["in_band"]
    theta = ed["theta"]
    alpha = ed["alpha"]
    a_pow = np.empty(alpha.shape, dtype=complex)
    a_neg = np.empty(alpha.shape, dtype=complex)

    phase = np.mod(n_cells * theta[in_band], 2.0 * np.pi)
    a_pow[in_band] = np.exp(1j * phase)
    a_neg[in_band] = np.exp(-1j * phase)

    off = ~in_band
    if np.any(off):
        al = alpha[off].real
        sign = np.where(al >= 0.0, 1.0, -1.0) ** (n_cells % 2)
        log_mag = n_cells * np.log(np.abs(al))
        with np.errstate(over="ignore"):
            a_pow[off] = sign * np.exp(log_mag)
        a_neg[off] = sign * np.exp(-log_mag)
    return a_pow, a_neg


def _sample_green_values(sample: SampleSpec, n_cells: int, E: np.ndarray):
    """Closed-form entries of G_S^(N) plus the scaled denominator, vectorized.

    Uses the alpha^{-N}-normalized form so nothing overflows: with
    z = alpha^{-2N}, A = phi_+ psi_-, B = phi_- psi_+,

        G_ll = -(1/kappa_s) phi_+ phi_- (1 - z) / (A - z B)
        G_lr = -(1/kappa_s) (A - B) alpha^{-N} / (A - z B)
        G_rr = -(1/kappa_s) psi_+ psi_- (1 - z) / (A - z B).
    """
    ed = _eigendata_values(sample, E)
    kS = sample.kappa_s
    kpsi_p, kpsi_m = ed["kpsi_p"], ed["kpsi_m"]
    phi_p, phi_m = ed["phi_p"], ed["phi_m"]
    psi_p, psi_m = kpsi_p / kS, kpsi_m / kS
    a_pow, a_neg = _alpha_pow(ed, n_cells)
    z = a_neg * a_neg
    A = phi_p * psi_m
    B = phi_m * psi_p
    denom = A - z * B
    W = A - B
    with np.errstate(divide="ignore", invalid="ignore"):
        g_ll = -(1.0 / kS) * phi_p * phi_m * (1.0 - z) / denom
        g_lr = -(1.0 / kS) * W * a_neg / denom
        g_rr = -(1.0 / kS) * psi_p * psi_m * (1.0 - z) / denom
    scale = np.abs(A) + np.abs(B)
    return g_ll, g_lr, g_rr, denom, scale, ed


def sample_green(sample: SampleSpec, n_cells: int, E: float) -> GreenMatrix2:
    """2x2 Green matrix of the decoupled (Dirichlet) N-cell sample at energy E.

    Raises SampleEigenvalueError when E sits at an eigenvalue of the N-cell
    sample, where the resolvent has a pole.
    """
    if n_cells < 1:
        raise DomainError("n_cells must be a positive integer")
    E_arr = np.asarray([float(E)])
    g_ll, g_lr, g_rr, denom, scale, _ = _sample_green_values(sample, n_cells, E_arr)
    if abs(denom[0]) <= 1e-12 * max(scale[0], 1e-300):
        raise SampleEigenvalueError(
            f"E={E} is an eigenvalue of the {n_cells}-cell sample (D_N ~ 0)"
        )
    return GreenMatrix2(
        g_ll=complex(g_ll[0]),
        g_lr=complex(g_lr[0]),
        g_rl=complex(g_lr[0]),
        g_rr=complex(g_rr[0]),
        energy=float(E),
        n_cells=n_cells,
    )


def _full_green_lr_values(sample, kappa, n_cells, E, F_l, F_r):
    """Off-diagonal full Green value, vectorized; returns (g_lr, denom, scale).

    Dressed eigenvector components per the coupling to the reservoirs:

        psi~_± = psi_± + eta^2 kappa_s phi_± F_l
        phi~_± = phi_± + eta^2 kappa_s psi_± F_r,   eta = kappa / kappa_s,

    and, normalized by alpha^{-N} against overflow,

        G_lr = -(1/kappa_s) (phi_+ psi_- - phi_- psi_+) alpha^{-N}
               / (phi~_+ psi~_- - alpha^{-2N} phi~_- psi~_+).
    """
    ed = _eigendata_values(sample, E)
    kS = sample.kappa_s
    eta2 = (kappa / kS) ** 2
    psi_p, psi_m = ed["kpsi_p"] / kS, ed["kpsi_m"] / kS
    phi_p, phi_m = ed["phi_p"], ed["phi_m"]
    pst_p = psi_p + eta2 * kS * phi_p * F_l
    pst_m = psi_m + eta2 * kS * phi_m * F_l
    pht_p = phi_p + eta2 * kS * psi_p * F_r
    pht_m = phi_m + eta2 * kS * psi_m * F_r
    a_pow, a_neg = _alpha_pow(ed, n_cells)
    z = a_neg * a_neg
    A = pht_p * pst_m
    B = pht_m * pst_p
    denom = A - z * B
    W = phi_p * psi_m - phi_m * psi_p
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        g_lr = -(1.0 / kS) * W * a_neg / denom
    scale = np.abs(A) + np.abs(B)
    return g_lr, denom, scale, ed


def full_green_lr(
    sample: SampleSpec,
    lead_l: LeadModel,
    lead_r: LeadModel,
    kappa: float,
    n_cells: int,
    E: float,
) -> complex:
    """Off-diagonal element G_lr^(N)(E) of the coupled-system Green matrix.

    Raises SingularEnergyError when the dressed denominator vanishes beyond
    tolerance (an a.e.-measure-zero set, skipped by quadrature grids).
    """
    if n_cells < 1:
        raise DomainError("n_cells must be a positive integer")
    if kappa == 0.0:
        raise DomainError("coupling kappa must be nonzero")
    E_arr = np.asarray([float(E)])
    F_l = lead_F_values(lead_l, E_arr)
    F_r = lead_F_values(lead_r, E_arr)
    g_lr, denom, scale, _ = _full_green_lr_values(sample, kappa, n_cells, E_arr, F_l, F_r)
    if not np.isfinite(g_lr[0]) or abs(denom[0]) <= 1e-12 * max(scale[0], 1e-300):
        raise SingularEnergyError(f"full Green denominator vanished at E={E}")
    return complex(g_lr[0])


def _clamp_unit(T: np.ndarray, what: str) -> np.ndarray:
    """Clamp to [0, 1]; violations beyond CLAMP_TOL are implementation bugs."""
    worst = 0.0
    if T.size:
        worst = max(float(np.max(T) - 1.0), float(-np.min(T)), 0.0)
    if worst > CLAMP_TOL:
        raise NumericalError(f"{what} outside [0,1] by {worst:.3e} (beyond {CLAMP_TOL})")
    if worst > 1e-12:
        log.debug("%s clamped by %.3e", what, worst)
    return np.clip(T, 0.0, 1.0)


def transmittance_n(
    sample: SampleSpec,
    lead_l: LeadModel,
    lead_r: LeadModel,
    kappa: float,
    n_cells: int,
    E,
):
    """Transmittance T_N(E) = 4 kappa^4 |G_lr^(N)(E)|^2 Im F_l Im F_r in [0, 1].

    Accepts a scalar or an array of energies.  T_N is 0 outside the common
    essential support of the leads; energies where the Green denominator
    degenerates (a measure-zero set) are returned as 0 and logged.
    """
    scalar = np.ndim(E) == 0
    E_arr = np.atleast_1d(np.asarray(E, dtype=float))
    F_l = lead_F_values(lead_l, E_arr)
    F_r = lead_F_values(lead_r, E_arr)
    T = np.zeros(E_arr.shape)
    live = (F_l.imag > SUPPORT_TOL) & (F_r.imag > SUPPORT_TOL)
    if np.any(live):
        g_lr, denom, scale, _ = _full_green_lr_values(
            sample, kappa, n_cells, E_arr[live], F_l[live], F_r[live]
        )
        vals = 4.0 * kappa**4 * np.abs(g_lr) ** 2 * F_l.imag[live] * F_r.imag[live]
        bad = ~np.isfinite(vals)
        if np.any(bad):
            log.debug("transmittance_n: %d singular energies set to 0", int(np.sum(bad)))
            vals = np.where(bad, 0.0, vals)
        T[live] = vals
    T = _clamp_unit(T, "T_N")
    return float(T[0]) if scalar else T


def transmittance_inf(
    sample: SampleSpec,
    lead_l: LeadModel,
    lead_r: LeadModel,
    kappa: float,
    E,
):
    """Crystalline-limit transmittance T_infty(E) in [0, 1].

    Zero outside sp(h_crystal) ∩ Sigma_l ∩ Sigma_r and within the band-edge
    exclusion zone (a measure-zero set).  Accepts scalars or arrays.
    """
    scalar = np.ndim(E) == 0
    E_arr = np.atleast_1d(np.asarray(E, dtype=float))
    m_l, m_r, in_band = _crystal_m_values(sample, E_arr)
    a, b, c, d = _one_period_abcd(sample, E_arr)
    edge = np.abs(np.abs(a + d) - 2.0) < EDGE_TOL
    F_l = lead_F_values(lead_l, E_arr)
    F_r = lead_F_values(lead_r, E_arr)
    live = in_band & ~edge & (F_l.imag > SUPPORT_TOL) & (F_r.imag > SUPPORT_TOL)

    T = np.zeros(E_arr.shape)
    if np.any(live):
        kS2 = sample.kappa_s**2
        k2 = kappa**2
        sm_r, sm_l = kS2 * m_r[live], kS2 * m_l[live]
        sF_r, sF_l = k2 * F_r[live], k2 * F_l[live]
        term_r = np.abs(sm_r - sF_r) ** 2 / (sm_r.imag * sF_r.imag)
        term_l = np.abs(sm_l - sF_l) ** 2 / (sm_l.imag * sF_l.imag)
        T[live] = 1.0 / (1.0 + 0.25 * (term_r + term_l))
    T = _clamp_unit(T, "T_inf")
    return float(T[0]) if scalar else T


def _r_theta_values(sample, lead_l, lead_r, kappa, E: np.ndarray):
    """Vectorized (r, vartheta, theta) of the oscillation polar decomposition.

    Entries off the band interior or off the common support are nan.
    """
    m_l, m_r, in_band = _crystal_m_values(sample, E)
    a, b, c, d = _one_period_abcd(sample, E)
    tr = a + d
    edge = np.abs(np.abs(tr) - 2.0) < EDGE_TOL
    F_l = lead_F_values(lead_l, E)
    F_r = lead_F_values(lead_r, E)
    live = in_band & ~edge & (F_l.imag > SUPPORT_TOL) & (F_r.imag > SUPPORT_TOL)

    eta2 = (kappa / sample.kappa_s) ** 2
    r = np.full(E.shape, np.nan)
    vth = np.full(E.shape, np.nan)
    theta = np.full(E.shape, np.nan)
    if np.any(live):
        ml, mr = m_l[live], m_r[live]
        fl, fr = F_l[live], F_r[live]
        prod = (
            (ml - eta2 * fl)
            / (np.conj(ml) - eta2 * fl)
            * (mr - eta2 * fr)
            / (np.conj(mr) - eta2 * fr)
            * (np.conj(mr) / mr)
        )
        r[live] = np.abs(prod)
        vth[live] = np.angle(prod)
        bi = b[live]
        costh = np.clip(tr[live] / 2.0, -1.0, 1.0)
        theta[live] = np.where(bi >= 0.0, 1.0, -1.0) * np.arccos(costh)
    return r, vth, theta, live


def r_theta_diagnostic(
    sample: SampleSpec,
    lead_l: LeadModel,
    lead_r: LeadModel,
    kappa: float,
    E: float,
) -> tuple[float, float, float]:
    """(r, vartheta, theta) controlling the finite-N oscillation

        T_N(E) = T_infty(E) * sum_k r^{|k|} e^{i k (2 N theta + vartheta)}.

    r < 1 wherever Im m and Im F are positive.  Raises DomainError off the
    band interior or outside the common essential support (where the
    decomposition is undefined).
    """
    E_arr = np.asarray([float(E)])
    r, vth, theta, live = _r_theta_values(sample, lead_l, lead_r, kappa, E_arr)
    if not live[0]:
        raise DomainError(
            f"r/theta diagnostic requested at E={E} outside band interior ∩ support"
        )
    return float(r[0]), float(vth[0]), float(theta[0])


def reflection(T: float) -> float:
    """Reflection probability 1 - T for a transmittance T in [0, 1]."""
    if not -CLAMP_TOL <= T <= 1.0 + CLAMP_TOL:
        raise DomainError(f"transmittance {T} outside [0, 1]")
    return 1.0 - min(max(T, 0.0), 1.0)
