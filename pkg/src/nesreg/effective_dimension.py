"""Entropy-based effective dimension of the metric and the figure tables built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from nesreg.errors import DomainError
from nesreg.kinematics import MetricNES, lambda_of_energy, metric_from_lambda, rho_from_sigma


@dataclass(frozen=True)
class PhysicalConstants:
    planck_energy_gev: float = 1.2e19
    hbar_js: float = 1.054571817e-34
    gev_to_joule: float = 1.602176634e-10

    def __post_init__(self):
        if min(self.planck_energy_gev, self.hbar_js, self.gev_to_joule) <= 0.0:
            raise DomainError("physical constants must be positive")


DEFAULT_CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class EnergyState:
    m0c2: float
    energy: float

    def __post_init__(self):
        if not self.m0c2 > 0.0:
            raise DomainError(f"rest energy must be positive, got {self.m0c2}")
        if self.energy < self.m0c2:
            raise DomainError(f"energy {self.energy} is below the rest energy {self.m0c2}")


class SpectrumWeights(tuple):
    """Probability vector of trace-normalized metric eigenvalues."""

    def __new__(cls, weights):
        w = tuple(float(v) for v in weights)
        if any(not -1e-15 <= v <= 1.0 + 1e-15 for v in w):
            raise DomainError(f"weights must lie in [0, 1], got {w}")
        # rounding can push a weight a few ulps past the boundary
        w = tuple(min(max(v, 0.0), 1.0) for v in w)
        if abs(math.fsum(w) - 1.0) > 1e-12:
            raise DomainError(f"weights must sum to 1, got sum {math.fsum(w)}")
        return super().__new__(cls, w)


def normalized_eigenvalues(g: MetricNES) -> SpectrumWeights:
    """Eigenvalues of ``g`` divided by its trace, in closed form.

    For the 4-D metric these are ``(1 +- rho) / (2 (1 + lam))`` and
    ``lam / (2 (1 + lam))`` twice.
    """
    scale = g.lam * g.trace
    return SpectrumWeights(
        [(1.0 + g.rho) / scale, g.one_minus_rho / scale] + [g.lam / scale] * (g.dim - 2)
    )


def numeric_normalized_eigenvalues(g: MetricNES) -> np.ndarray:
    """Same weights via a symmetric eigensolver, sorted to match :func:`normalized_eigenvalues`."""
    m = g.matrix
    ev = np.linalg.eigvalsh(m) / np.trace(m)
    # closed form order: largest, smallest, then the unit eigenvalues
    ev = np.sort(ev)
    return np.concatenate([[ev[-1], ev[0]], ev[1:-1]])


def effective_dim(weights) -> float:
    """``exp(-sum w ln w)`` with ``0 ln 0 = 0``."""
    w = np.asarray(weights, dtype=float)
    w = w[w > 0.0]
    return float(np.exp(-np.sum(w * np.log(w))))


def q_of_energy(state: EnergyState, dim=4) -> float:
    _, lam = lambda_of_energy(state.m0c2, state.energy)
    return effective_dim(normalized_eigenvalues(metric_from_lambda(lam, dim=dim)))


def q_of_rho(rho, dim=4) -> float:
    lam = math.sqrt((1.0 - rho) * (1.0 + rho))
    return effective_dim(normalized_eigenvalues(MetricNES(rho=rho, lam=lam, dim=dim)))


def q_jump(energy_gev, constants=DEFAULT_CONSTANTS) -> int:
    """Step profile used inside the loop integral: 4 below the Planck energy, 1 at and above it."""
    if not energy_gev > 0.0:
        raise DomainError(f"energy must be positive, got {energy_gev}")
    return 4 if energy_gev < constants.planck_energy_gev else 1


def multinomial_entropy_oracle(occupations) -> float:
    """``Omega**(1/M)`` for ``Omega = M! / prod(q_k!)``, evaluated in log space."""
    q = np.asarray(occupations, dtype=float)
    if q.ndim != 1 or q.size == 0 or np.any(q < 1) or np.any(q != np.round(q)):
        raise DomainError("occupations must be a non-empty sequence of integers >= 1")
    m = q.sum()
    log_omega = gammaln(m + 1.0) - np.sum(gammaln(q + 1.0))
    return float(np.exp(log_omega / m))


FIGURE2_COLUMNS = ("panel", "sigma", "rho", "lambda")


def figure2_data(n_points=200, sigma_max=10.0, edge=1e-6, anchors=(1.0 / 3.0, 3.0)):
    """Rows ``(panel, sigma0, rho, lam)`` for both velocity branches.

    The left panel samples ``sigma0`` on ``[0, 1 - edge]``, the right panel on
    ``[1 + edge, sigma_max]``. ``anchors`` are merged into whichever panel
    contains them so reference points appear verbatim in the table.
    """
    if n_points < 2:
        raise DomainError(f"need at least 2 points per panel, got {n_points}")
    if not sigma_max > 1.0 + edge:
        raise DomainError(f"sigma_max must exceed 1, got {sigma_max}")
    left = np.linspace(0.0, 1.0 - edge, n_points)
    right = np.linspace(1.0 + edge, sigma_max, n_points)
    left = np.union1d(left, [a for a in anchors if 0.0 <= a <= 1.0 - edge])
    right = np.union1d(right, [a for a in anchors if 1.0 + edge <= a <= sigma_max])
    rows = []
    for panel, grid in (("left", left), ("right", right)):
        for s in grid:
            rho, lam = rho_from_sigma(float(s))
            rows.append((panel, float(s), rho, lam))
    return rows


FIGURE3_COLUMNS = ("m0c2_gev", "e_over_ep", "q", "below_rest")


def figure3_data(masses_gev, n_points=200, ratio_range=(1e-20, 1e3), constants=DEFAULT_CONSTANTS):
    """Rows ``(m0c2, E/E_p, q, below_rest)`` with ``E/E_p`` log-uniform over ``ratio_range``.

    Energies below the rest energy are not reachable by the particle; those
    rows carry the rest value ``q = 4`` and ``below_rest = 1``.
    """
    lo, hi = ratio_range
    if not 0.0 < lo < hi:
        raise DomainError(f"ratio range must satisfy 0 < lo < hi, got {ratio_range}")
    if n_points < 2:
        raise DomainError(f"need at least 2 points, got {n_points}")
    ratios = np.logspace(math.log10(lo), math.log10(hi), n_points)
    rows = []
    for m in masses_gev:
        if not m > 0.0:
            raise DomainError(f"masses must be positive, got {m}")
        for r in ratios:
            energy = float(r) * constants.planck_energy_gev
            if energy < m:
                rows.append((float(m), float(r), 4.0, 1))
            else:
                rows.append((float(m), float(r), q_of_energy(EnergyState(m, energy)), 0))
    return rows
