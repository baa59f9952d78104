"""Spectral bookkeeping for the singular harmonic oscillator H + |x|^2/4.

From the angular eigenvalues mu_k this module derives the indices

    alpha_k = (N-2)/2 - sqrt(((N-2)/2)^2 + mu_k),
    beta_k  = sqrt(((N-2)/2)^2 + mu_k),

classifies the problem (Hardy validity, loss-of-decay range), enumerates the
oscillator levels gamma_{n,j} = 2n - alpha_j + N/2 with their multiplicities,
and builds/normalizes/projects the separable eigenfunctions

    V_{n,j}(x) = r^{-alpha_j} e^{-r^2/4} P_{n}(r^2/2) psi_j(theta).
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .angular import AngularEigensystem
from .quadrature import RadialQuadrature
from .specfun import PolySpec

DECAY_INVALID = "invalid"
DECAY_LOSS = "loss_of_decay"
DECAY_CLASSICAL = "classical_candidate"


class HardyViolation(ValueError):
    """The lowest angular eigenvalue violates the strict Hardy bound, so the
    oscillator basis does not exist."""


@dataclass(frozen=True)
class SpectralTable:
    """Rows (k, mu_k, alpha_k, beta_k) for k = 1..K_max plus classification."""

    N: int
    mu: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    hardy_ok: bool
    decay_class: str
    eigsys: AngularEigensystem | None = None

    @property
    def K_max(self) -> int:
        return len(self.mu)

    def row(self, k: int):
        """1-based row access: (mu_k, alpha_k, beta_k)."""
        if not 1 <= k <= self.K_max:
            raise IndexError(f"mode index k={k} outside 1..{self.K_max}")
        return float(self.mu[k - 1]), float(self.alpha[k - 1]), float(self.beta[k - 1])

    def write_csv(self, fh) -> None:
        writer = csv.writer(fh)
        writer.writerow(["k", "mu", "alpha", "beta"])
        for k in range(1, self.K_max + 1):
            mu, alpha, beta = self.row(k)
            writer.writerow([k, repr(mu), repr(alpha), repr(beta)])


def build_table(eigsys: AngularEigensystem, N: int, K_max: int) -> SpectralTable:
    """Derive the index table from an angular eigensystem.

    Classification is always produced, including the invalid (Hardy-violated)
    case; only downstream basis construction refuses to run then.
    """
    if eigsys.N != N:
        raise ValueError(f"dimension mismatch: eigensystem N={eigsys.N}, requested N={N}")
    if K_max < 1 or K_max > len(eigsys.eigenvalues):
        raise IndexError(
            f"K_max={K_max} outside the {len(eigsys.eigenvalues)} available modes"
        )
    mu = np.asarray(eigsys.eigenvalues[:K_max], dtype=float)
    half = (N - 2) / 2.0
    hardy_ok = bool(mu[0] > -half * half)
    disc = half * half + mu
    if hardy_ok:
        beta = np.sqrt(disc)
    else:
        beta = np.sqrt(np.maximum(disc, 0.0))
    alpha = half - beta
    if not hardy_ok:
        decay = DECAY_INVALID
    elif mu[0] < 0:
        decay = DECAY_LOSS
    else:
        decay = DECAY_CLASSICAL
    return SpectralTable(
        N=N, mu=mu, alpha=alpha, beta=beta, hardy_ok=hardy_ok,
        decay_class=decay, eigsys=eigsys,
    )


@dataclass(frozen=True)
class ModeIndex:
    """Oscillator index pair: radial quantum number n >= 0, angular mode j >= 1."""

    n: int
    j: int

    def __post_init__(self):
        if self.n < 0 or self.j < 1:
            raise ValueError(f"ModeIndex requires n >= 0 and j >= 1, got {self}")


def gamma_of(index: ModeIndex, table: SpectralTable) -> float:
    """Oscillator level gamma_{n,j} = 2n - alpha_j + N/2."""
    _, alpha_j, _ = table.row(index.j)
    return 2.0 * index.n - alpha_j + table.N / 2.0


def level_multiplicity(gamma: float, table: SpectralTable, n_cap: int,
                       tol: float = 1e-9) -> list[ModeIndex]:
    """All (n, j) with j <= K_max, n <= n_cap and gamma_{n,j} = gamma (within
    tol); the count is the level multiplicity within the truncation."""
    out = []
    for n in range(n_cap + 1):
        for j in range(1, table.K_max + 1):
            idx = ModeIndex(n, j)
            if abs(gamma_of(idx, table) - gamma) <= tol:
                out.append(idx)
    return out


@dataclass(frozen=True)
class NormalizedMode:
    """An L^2-normalized oscillator eigenfunction in separated form."""

    index: ModeIndex
    N: int
    alpha: float
    gamma: float
    norm: float
    poly: PolySpec

    def radial(self, r, weighted: bool = False):
        """Normalized radial factor r^{-alpha} e^{-r^2/4} P(r^2/2) / norm.

        ``weighted=True`` returns r^alpha times that, which extends to r=0.
        """
        r_arr = np.asarray(r, dtype=float)
        if not weighted and np.any(r_arr <= 0):
            raise ValueError("unweighted radial value requires r > 0")
        core = np.exp(-r_arr * r_arr / 4.0) * self.poly(r_arr * r_arr / 2.0) / self.norm
        if weighted:
            return core
        return r_arr ** (-self.alpha) * core


class AccuracyWarning(UserWarning):
    """A quadrature grid is too coarse for the requested operation."""


def make_mode(index: ModeIndex, table: SpectralTable,
              quad: RadialQuadrature | None = None) -> NormalizedMode:
    """Construct and normalize the oscillator eigenfunction V_{n,j}.

    The norm is computed by radial quadrature of
    r^{N-1-2 alpha_j} e^{-r^2/2} P^2(r^2/2); the angular factor is already
    unit-normalized on the sphere.
    """
    if not table.hardy_ok:
        raise HardyViolation(
            "the oscillator eigenbasis requires mu_1 > -((N-2)/2)^2"
        )
    if quad is None:
        quad = RadialQuadrature()
    mu_j, alpha_j, _ = table.row(index.j)
    b = table.N / 2.0 - alpha_j
    poly = PolySpec(index.n, b)
    r = quad.nodes
    integrand = r ** (table.N - 1 - 2.0 * alpha_j) * np.exp(-r * r / 2.0) * poly(r * r / 2.0) ** 2
    norm_sq = float(quad.integrate(integrand))
    if norm_sq <= 0:
        raise ValueError(f"non-positive norm^2 = {norm_sq} for mode {index}")
    return NormalizedMode(
        index=index,
        N=table.N,
        alpha=alpha_j,
        gamma=gamma_of(index, table),
        norm=math.sqrt(norm_sq),
        poly=poly,
    )


def eval_mode(mode: NormalizedMode, r, angular_value=1.0, weighted: bool = False):
    """Value of the normalized eigenfunction at radius r and angular factor
    psi_j(theta) = angular_value."""
    return mode.radial(r, weighted=weighted) * angular_value


def project(state, mode: NormalizedMode) -> complex:
    """Projection coefficient of a separated state onto a normalized mode.

    Angular orthogonality makes the coefficient a single radial quadrature of
    f_j(r) conj(V_radial(r)) r^{N-1} on the state's grid; exactly zero when
    the state carries no j-component.  Emits AccuracyWarning when the grid is
    coarser than 16 points per unit radius over the mode's effective support.
    """
    j = mode.index.j
    if j not in state.profiles:
        return 0.0 + 0.0j
    r = state.grid
    support = min(2.0 * math.sqrt(max(mode.gamma, 1.0)) + 4.0, float(r[-1]))
    n_inside = int(np.sum(r <= support))
    if n_inside < 16 * support:
        warnings.warn(
            f"grid has {n_inside} points inside the mode support radius {support:.1f} "
            f"(< {int(16 * support)}); projection accuracy may suffer",
            AccuracyWarning,
            stacklevel=2,
        )
    integrand = state.profiles[j] * np.conj(mode.radial(r)) * r ** (state.N - 1)
    return complex(np.sum(state.weights * integrand))
