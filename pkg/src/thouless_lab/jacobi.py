"""Finite and periodized Jacobi matrices.

A sample is an L-site Jacobi matrix

    (h u)(x) = J_x u(x+1) + J_{x-1} u(x-1) + lambda_x u(x)

with Dirichlet boundary conditions.  Its periodization closes each period
with the internal coupling kappa_S (playing the role of J_L) and repeats
(J, lambda) over the whole lattice.  This module provides the one-period
transfer matrix, the discriminant, Bloch band structure of the
periodization, and the Thouless conductance of an energy window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError

# Touching band endpoints closer than this are merged into one interval.
_BAND_MERGE_TOL = 1e-12


@dataclass(frozen=True)
class SampleSpec:
    """An L-site sample plus the internal coupling of its periodization.

    Parameters
    ----------
    hop : sequence of L-1 nonzero floats
        Hoppings J_1..J_{L-1} (energy units).
    onsite : sequence of L floats
        Onsite energies lambda_1..lambda_L.
    kappa_s : nonzero float
        Internal coupling closing each period (J_L of the periodization).

    The periodized parameters J_{x+nL} = J_x, lambda_{x+nL} = lambda_x are
    always derived on demand, never stored.
    """

    hop: tuple[float, ...]
    onsite: tuple[float, ...]
    kappa_s: float

    def __post_init__(self):
        hop = tuple(float(j) for j in self.hop)
        onsite = tuple(float(v) for v in self.onsite)
        object.__setattr__(self, "hop", hop)
        object.__setattr__(self, "onsite", onsite)
        object.__setattr__(self, "kappa_s", float(self.kappa_s))
        if len(onsite) < 1:
            raise DomainError("sample needs at least one site")
        if len(hop) != len(onsite) - 1:
            raise DomainError(
                f"expected {len(onsite) - 1} hoppings for {len(onsite)} sites, got {len(hop)}"
            )
        if any(j == 0.0 for j in hop):
            raise DomainError("all hoppings J_x must be nonzero")
        if self.kappa_s == 0.0:
            raise DomainError("kappa_s must be nonzero")
        if not all(np.isfinite(hop + onsite + (self.kappa_s,))):
            raise DomainError("sample parameters must be finite")

    @property
    def length(self) -> int:
        return len(self.onsite)

    def hopping(self, x: int) -> float:
        """Periodized hopping J_x for any site index x >= 1 (J_L = kappa_s)."""
        i = (x - 1) % self.length
        return self.kappa_s if i == self.length - 1 else self.hop[i]

    def onsite_at(self, x: int) -> float:
        """Periodized onsite lambda_x for any site index x >= 1."""
        return self.onsite[(x - 1) % self.length]


def periodized_parameters(sample: SampleSpec, n_cells: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal (length N*L) and off-diagonal (length N*L-1) of the N-cell sample h_S^(N)."""
    if n_cells < 1:
        raise DomainError("n_cells must be a positive integer")
    L = sample.length
    diag = np.tile(np.asarray(sample.onsite, dtype=float), n_cells)
    period = np.asarray(sample.hop + (sample.kappa_s,), dtype=float)
    off = np.tile(period, n_cells)[: n_cells * L - 1]
    return diag, off


@dataclass(frozen=True)
class TransferMatrix2:
    """Unimodular 2x2 transfer matrix [[a, b], [c, d]] at a fixed energy."""

    a: float
    b: float
    c: float
    d: float
    energy: float

    @property
    def trace(self) -> float:
        return self.a + self.d

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)


@dataclass(frozen=True)
class GreenMatrix2:
    """2x2 Green matrix between the first and last sites of an N-cell sample."""

    g_ll: complex
    g_lr: complex
    g_rl: complex
    g_rr: complex
    energy: float
    n_cells: int

    def as_array(self) -> np.ndarray:
        return np.array([[self.g_ll, self.g_lr], [self.g_rl, self.g_rr]])


def transfer_step(sample: SampleSpec, x: int, E: float) -> TransferMatrix2:
    """One-site transfer matrix A_x(E) = (1/J_x) [[E - lambda_x, -1], [J_x^2, 0]].

    The site index is periodized, so x = L uses J_L = kappa_s.
    """
    if x < 1:
        raise DomainError("site index must be >= 1")
    J = sample.hopping(x)
    lam = sample.onsite_at(x)
    return TransferMatrix2((E - lam) / J, -1.0 / J, J, 0.0, float(E))


def _one_period_abcd(sample: SampleSpec, E):
    """Entries (a, b, c, d) of T_L(E) = A_L ... A_1, vectorized over E."""
    E = np.asarray(E, dtype=float)
    a = np.ones_like(E)
    b = np.zeros_like(E)
    c = np.zeros_like(E)
    d = np.ones_like(E)
    L = sample.length
    for x in range(1, L + 1):
        J = sample.hopping(x)
        lam = sample.onsite_at(x)
        # left-multiply by A_x
        na = ((E - lam) * a - c) / J
        nb = ((E - lam) * b - d) / J
        c, d = J * a, J * b
        a, b = na, nb
    return a, b, c, d


def one_period_transfer(sample: SampleSpec, E: float) -> TransferMatrix2:
    """One-period transfer matrix T_L(E) = A_L(E) ... A_1(E), always unimodular."""
    a, b, c, d = _one_period_abcd(sample, float(E))
    return TransferMatrix2(float(a), float(b), float(c), float(d), float(E))


def _real_eigvec2(a, b, c, d, lam):
    """Eigenvector (x, y) of [[a,b],[c,d]] for real eigenvalue lam, elementwise.

    The two row candidates (b, lam-a) and (lam-d, c) are both exact; the one
    with the larger norm is kept (the other degenerates when the matrix is
    triangular or diagonal) and scaled to unit max-component.
    """
    x1, y1 = b, lam - a
    x2, y2 = lam - d, c
    n1 = np.hypot(x1, y1)
    n2 = np.hypot(x2, y2)
    use1 = n1 >= n2
    x = np.where(use1, x1, x2)
    y = np.where(use1, y1, y2)
    scale = np.maximum(np.abs(x), np.abs(y))
    scale = np.where(scale > 0.0, scale, 1.0)
    return x / scale, y / scale


def discriminant(sample: SampleSpec, E):
    """tr T_L(E); |discriminant| <= 2 exactly on the spectrum of the periodization.

    Accepts a scalar or an array of energies.
    """
    a, _, _, d = _one_period_abcd(sample, E)
    tr = a + d
    return float(tr) if np.ndim(E) == 0 else tr


def bloch_hamiltonian(sample: SampleSpec, k: float) -> np.ndarray:
    """L x L Bloch Hamiltonian h(k): tridiagonal (J, lambda) plus corner couplings kappa_s e^{∓ikL}."""
    L = sample.length
    h = np.zeros((L, L), dtype=complex)
    h[np.arange(L), np.arange(L)] = sample.onsite
    for i, J in enumerate(sample.hop):
        h[i, i + 1] += J
        h[i + 1, i] += J
    phase = np.exp(-1j * k * L) * sample.kappa_s
    h[0, L - 1] += phase
    h[L - 1, 0] += np.conj(phase)
    return h


def bloch_eigenvalues(sample: SampleSpec, k: float) -> np.ndarray:
    """Sorted eigenvalues eps_1(k) <= ... <= eps_L(k) of the Bloch Hamiltonian.

    k must lie in the first Brillouin zone [-pi/L, pi/L].
    """
    L = sample.length
    if abs(k) > np.pi / L + 1e-12:
        raise DomainError(f"k={k} outside the Brillouin zone [-pi/{L}, pi/{L}]")
    return np.linalg.eigvalsh(bloch_hamiltonian(sample, k))


@dataclass(frozen=True)
class BandSpectrum:
    """Ordered disjoint closed intervals forming the spectrum of the periodization."""

    bands: tuple[tuple[float, float], ...]

    def measure(self) -> float:
        """Total Lebesgue measure of the spectrum."""
        return sum(hi - lo for lo, hi in self.bands)

    def intersection_measure(self, lo: float, hi: float) -> float:
        """Lebesgue measure of spectrum ∩ [lo, hi]."""
        if hi < lo:
            raise DomainError("interval must satisfy lo <= hi")
        return sum(max(0.0, min(hi, b_hi) - max(lo, b_lo)) for b_lo, b_hi in self.bands)

    def contains(self, E: float) -> bool:
        return any(lo <= E <= hi for lo, hi in self.bands)

    @property
    def hull(self) -> tuple[float, float]:
        return self.bands[0][0], self.bands[-1][1]

    def gaps(self) -> tuple[tuple[float, float], ...]:
        """Open gaps strictly between consecutive bands."""
        return tuple(
            (self.bands[i][1], self.bands[i + 1][0])
            for i in range(len(self.bands) - 1)
            if self.bands[i + 1][0] > self.bands[i][1]
        )


def band_spectrum(sample: SampleSpec) -> BandSpectrum:
    """Band spectrum of the periodization from Bloch eigenvalues at k = 0 and k = pi/L.

    The j-th band is the closed interval between eps_j(0) and eps_j(pi/L);
    eigenvalues are monotone in between, so no further k-points are needed.
    Bands touching within 1e-12 are merged.  The discriminant condition
    |tr T_L| <= 2 is verified on a coarse interior grid of every band.
    """
    L = sample.length
    eps0 = bloch_eigenvalues(sample, 0.0)
    eps_pi = bloch_eigenvalues(sample, np.pi / L)
    raw = sorted(
        (min(a, b), max(a, b)) for a, b in zip(eps0, eps_pi)
    )
    merged: list[list[float]] = []
    for lo, hi in raw:
        if merged and lo <= merged[-1][1] + _BAND_MERGE_TOL:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    spectrum = BandSpectrum(tuple((lo, hi) for lo, hi in merged))

    # cross-check: interior points of every band satisfy the discriminant bound
    for lo, hi in spectrum.bands:
        w = hi - lo
        if w <= 0.0:
            continue
        grid = np.linspace(lo + 0.01 * w, hi - 0.01 * w, 17)
        tr = discriminant(sample, grid)
        if np.max(np.abs(tr)) > 2.0 + 1e-9:
            raise NumericalError(
                f"band interior violates |tr T_L| <= 2 (worst {np.max(np.abs(tr))!r}); "
                "Bloch eigensolver and transfer matrix disagree"
            )
    return spectrum


def thouless_conductance(sample: SampleSpec, window: tuple[float, float]) -> float:
    """Thouless conductance g_Th(I) = |sp(h_crystal) ∩ I| / (2 pi |I|).

    The band measure is computed exactly by interval arithmetic on the
    Bloch band endpoints; `window` is a closed interval of positive length.
    """
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise DomainError("window must have positive length")
    spectrum = band_spectrum(sample)
    return spectrum.intersection_measure(lo, hi) / (2.0 * np.pi * (hi - lo))
