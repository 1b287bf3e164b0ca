"""Metrics, boosts and relativistic kinematics in the non-orthogonal Euclidean space.

All coordinates are scaled and dimensionless with ``x0 = tau = c t``, so the
speed of light is 1 throughout this module. Index 0 is the time axis; the
boost axis ``axis_j`` is one of the spatial indices.

The metric realized here is the upper-index matrix::

    g^00 = g^jj = 1/lam,  g^0j = g^j0 = rho/lam,  g^kk = 1 (k != j)

with ``lam = sqrt(1 - rho^2)``, so ``det g = 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from nesreg.errors import BranchError, DomainError, SingularityError

#: |1 - sigma^2| below this is treated as the light cone.
LIGHT_CONE_GUARD = 1e-15


class Branch(str, enum.Enum):
    SUBLUMINAL = "subluminal"
    SUPERLUMINAL = "superluminal"


@dataclass(frozen=True)
class VelocityRatio:
    """A boost velocity ratio tagged with the branch it belongs to."""

    sigma: float
    branch: Branch

    def __post_init__(self):
        s = abs(self.sigma)
        if not math.isfinite(self.sigma):
            raise SingularityError(f"velocity ratio is not finite: {self.sigma}")
        if self.branch is Branch.SUBLUMINAL and not s < 1.0:
            raise BranchError(f"subluminal solution has |sigma| = {s} >= 1")
        if self.branch is Branch.SUPERLUMINAL and not s > 1.0:
            raise BranchError(f"superluminal solution has |sigma| = {s} <= 1")

    def __float__(self):
        return float(self.sigma)


def _check_layout(axis_j, dim):
    if dim not in (2, 3, 4):
        raise DomainError(f"dim must be 2, 3 or 4, got {dim}")
    if not 1 <= axis_j < dim:
        raise DomainError(f"axis_j must be a spatial index in [1, {dim - 1}], got {axis_j}")


def _omega(sigma):
    gap = abs((1.0 - sigma) * (1.0 + sigma))
    if gap < LIGHT_CONE_GUARD:
        raise SingularityError(f"sigma = {sigma} is on the light cone (|1 - sigma^2| = {gap:.3g})")
    return 1.0 / math.sqrt(gap)


@dataclass(frozen=True)
class MetricNES:
    """Symmetric positive definite metric with a single non-orthogonal axis pair.

    ``lam`` is stored alongside ``rho`` so that nearly degenerate metrics
    (``rho`` indistinguishable from 1 in double precision) stay usable.
    Use :func:`metric_from_rho` or :func:`metric_from_lambda` to build one.
    """

    rho: float
    lam: float
    axis_j: int = 1
    dim: int = 4

    def __post_init__(self):
        _check_layout(self.axis_j, self.dim)
        if not (0.0 <= self.rho <= 1.0) or not (0.0 < self.lam <= 1.0):
            raise DomainError(
                f"metric needs 0 <= rho < 1 and 0 < lam <= 1, got rho={self.rho}, lam={self.lam}"
            )
        if abs(self.rho * self.rho + self.lam * self.lam - 1.0) > 1e-12:
            raise DomainError(f"rho^2 + lam^2 != 1 (rho={self.rho}, lam={self.lam})")

    @property
    def one_minus_rho(self):
        # cancellation-free form of 1 - rho
        return self.lam * self.lam / (1.0 + self.rho)

    @property
    def matrix(self):
        """Upper-index realization ``g^{mu nu}``."""
        g = np.eye(self.dim)
        j = self.axis_j
        g[0, 0] = g[j, j] = 1.0 / self.lam
        g[0, j] = g[j, 0] = self.rho / self.lam
        return g

    @property
    def lower(self):
        """Inverse of :attr:`matrix`, i.e. the lower-index ``g_{mu nu}``."""
        g = np.eye(self.dim)
        j = self.axis_j
        g[0, 0] = g[j, j] = 1.0 / self.lam
        g[0, j] = g[j, 0] = -self.rho / self.lam
        return g

    @property
    def trace(self):
        return 2.0 / self.lam + (self.dim - 2)

    def eigenvalues(self):
        """Closed-form eigenvalues ``(1 + rho)/lam, (1 - rho)/lam, 1, ...``."""
        return np.array(
            [(1.0 + self.rho) / self.lam, self.one_minus_rho / self.lam] + [1.0] * (self.dim - 2)
        )


def metric_from_rho(rho, axis_j=1, dim=4):
    if not 0.0 <= rho < 1.0:
        raise DomainError(f"rho must lie in [0, 1), got {rho}")
    lam = math.sqrt((1.0 - rho) * (1.0 + rho))
    return MetricNES(rho=float(rho), lam=lam, axis_j=axis_j, dim=dim)


def metric_from_lambda(lam, axis_j=1, dim=4):
    if not 0.0 < lam <= 1.0:
        raise DomainError(f"lam must lie in (0, 1], got {lam}")
    rho = math.sqrt((1.0 - lam) * (1.0 + lam))
    return MetricNES(rho=rho, lam=float(lam), axis_j=axis_j, dim=dim)


@dataclass(frozen=True)
class BoostNES:
    """Axis-aligned boost ``N`` with ``N^0_0 = N^j_j = omega`` and ``N^0_j = N^j_0 = -sigma omega``."""

    sigma: float
    axis_j: int = 1
    dim: int = 4

    def __post_init__(self):
        _check_layout(self.axis_j, self.dim)
        _omega(self.sigma)

    @property
    def omega(self):
        return _omega(self.sigma)

    @property
    def matrix(self):
        n = np.eye(self.dim)
        j = self.axis_j
        w = self.omega
        n[0, 0] = n[j, j] = w
        n[0, j] = n[j, 0] = -self.sigma * w
        return n


def boost_from_sigma(sigma, axis_j=1, dim=4):
    return BoostNES(sigma=float(sigma), axis_j=axis_j, dim=dim)


def rho_from_sigma(sigma):
    """Metric parameters ``(rho, lam)`` induced by a boost with velocity ratio ``sigma``.

    Both branches (``sigma < 1`` and ``sigma > 1``) map onto the same
    ``(rho, lam)``; a negative ``sigma`` gives a negative ``rho``.
    """
    if abs(1.0 - sigma * sigma) < LIGHT_CONE_GUARD:
        raise SingularityError(f"sigma = {sigma} is on the light cone")
    denom = 1.0 + sigma * sigma
    rho = 2.0 * sigma / denom
    lam = abs((1.0 - sigma) * (1.0 + sigma)) / denom
    return rho, lam


def _lam_for(rho, lam):
    # an explicit lam avoids the precision lost in sqrt(1 - rho^2) as rho -> 1
    if lam is not None:
        if not 0.0 < lam <= 1.0 or abs(rho * rho + lam * lam - 1.0) > 1e-12:
            raise DomainError(f"inconsistent metric parameters rho={rho}, lam={lam}")
        return lam
    if not 0.0 <= rho < 1.0:
        raise DomainError(f"rho must lie in [0, 1), got {rho}")
    return math.sqrt((1.0 - rho) * (1.0 + rho))


def sigma0_from_rho(rho, branch=Branch.SUBLUMINAL, lam=None):
    """Velocity ratio of a frame with metric parameter ``rho`` relative to a resting observer."""
    branch = Branch(branch)
    lam = _lam_for(rho, lam)
    if branch is Branch.SUBLUMINAL:
        return VelocityRatio(rho / (1.0 + lam), branch)
    if rho == 0.0:
        raise SingularityError("superluminal branch is undefined for a resting frame (rho = 0)")
    return VelocityRatio((1.0 + lam) / rho, branch)


def sigma_between_frames(rho_obs, rho_part, lam_obs=None, lam_part=None):
    """Both solutions ``(sigma, sigma_hat)`` for the boost between two moving frames.

    ``sigma_hat`` is ``None`` when the two frames have equal ``lam`` (it
    diverges there). Each returned ratio is checked to lie on its branch.
    """
    lam = _lam_for(rho_obs, lam_obs)
    lam_p = _lam_for(rho_part, lam_part)
    sigma = VelocityRatio((rho_part * lam - rho_obs * lam_p) / (lam + lam_p), Branch.SUBLUMINAL)
    if lam == lam_p:
        return sigma, None
    sigma_hat = VelocityRatio((rho_part * lam + rho_obs * lam_p) / (lam - lam_p), Branch.SUPERLUMINAL)
    return sigma, sigma_hat


def compose_sigma(sigma_prime0, sigma0, branch=Branch.SUBLUMINAL):
    """Relative velocity ratio of two frames given their ratios to a common resting observer."""
    branch = Branch(branch)
    if branch is Branch.SUBLUMINAL:
        num, den = sigma_prime0 - sigma0, 1.0 - sigma_prime0 * sigma0
    else:
        num, den = 1.0 - sigma_prime0 * sigma0, sigma_prime0 - sigma0
    if den == 0.0:
        raise SingularityError(f"velocity addition denominator vanishes for ({sigma_prime0}, {sigma0})")
    return VelocityRatio(num / den, branch)


def apply_boost(boost, x):
    """``x'_mu = N_mu^alpha x_alpha``; ``x`` may be a single vector or an ``(n, D)`` batch."""
    x = np.asarray(x, dtype=float)
    return x @ boost.matrix.T


def inner_product(g, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.einsum("...i,ij,...j->...", x, g.matrix, y)


def invariance_residual(g, g_prime, boost):
    """Max deviation of ``g^{ab} - N_m^a g'^{mn} N_n^b`` from zero."""
    n = boost.matrix
    return float(np.max(np.abs(g.matrix - n.T @ g_prime.matrix @ n)))


def frames_for_boost(rho_obs, sigma, axis_j=1, dim=4):
    """Observer metric, particle metric and boost that are mutually consistent.

    The particle frame's velocity ratio to a resting observer follows from
    velocity addition; its metric then follows from that ratio.
    """
    sigma_obs0 = sigma0_from_rho(rho_obs).sigma
    sigma_part0 = (sigma + sigma_obs0) / (1.0 + sigma * sigma_obs0)
    if sigma_part0 < 0.0:
        raise DomainError(
            f"boost sigma={sigma} from rho_obs={rho_obs} needs a negative particle rho"
        )
    rho_part, lam_part = rho_from_sigma(sigma_part0)
    g = metric_from_rho(rho_obs, axis_j, dim)
    g_prime = MetricNES(rho=rho_part, lam=lam_part, axis_j=axis_j, dim=dim)
    return g, g_prime, boost_from_sigma(sigma, axis_j, dim)


def eigenzeit_factor(sigma0):
    """Proper-time rate ``dt_e/dt = sqrt(1 - sigma0^2)``."""
    if not abs(sigma0) < 1.0:
        raise DomainError(f"proper time needs |sigma0| < 1, got {sigma0}")
    return math.sqrt((1.0 - sigma0) * (1.0 + sigma0))


def eigenzeit_from_line_element(beta):
    """Same rate computed from the line element of the particle's metric along ``dx_j = -beta dt``."""
    if not 0.0 <= beta < 1.0:
        raise DomainError(f"beta must lie in [0, 1), got {beta}")
    rho, lam = rho_from_sigma(beta)
    g = MetricNES(rho=rho, lam=lam, dim=2)
    return math.sqrt(float(inner_product(g, [1.0, -beta], [1.0, -beta])))


def energy_of(m0c2, sigma):
    """Total energy ``m0 c^2 / sqrt|1 - sigma^2|``."""
    return m0c2 * _omega(sigma)


def two_velocity(sigma):
    """``u = omega (1, -sigma)`` in units of c."""
    w = _omega(sigma)
    return np.array([w, -sigma * w])


def on_shell_momentum(m0, sigma, axis_j=1, dim=4):
    """Momentum ``m0 u(sigma)`` embedded along ``axis_j`` together with the particle-frame metric."""
    if not 0.0 <= sigma < 1.0:
        raise DomainError(f"on-shell momentum needs 0 <= sigma < 1, got {sigma}")
    u = two_velocity(sigma)
    p = np.zeros(dim)
    p[0], p[axis_j] = m0 * u[0], m0 * u[1]
    rho, lam = rho_from_sigma(sigma)
    return p, MetricNES(rho=rho, lam=lam, axis_j=axis_j, dim=dim)


def lambda_of_energy(m0c2, energy):
    """Metric parameters of a particle with rest energy ``m0c2`` and total energy ``energy``."""
    if not m0c2 > 0.0:
        raise DomainError(f"rest energy must be positive, got {m0c2}")
    if energy < m0c2:
        raise DomainError(f"total energy {energy} is below the rest energy {m0c2}")
    r = m0c2 / energy
    lam = r * r / (2.0 - r * r)
    rho = math.sqrt((1.0 - lam) * (1.0 + lam))
    return rho, lam


def oms_lorentz(beta, tau, x):
    """Standard Lorentz boost in orthogonal Minkowski space."""
    if not abs(beta) < 1.0:
        raise DomainError(f"|beta| must be < 1, got {beta}")
    gamma = 1.0 / math.sqrt((1.0 - beta) * (1.0 + beta))
    return gamma * (tau - beta * x), gamma * (x - beta * tau)
