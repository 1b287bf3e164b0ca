"""Recovering a boost from second moments of metric-correlated coordinate fluctuations.

Microscopic coordinates ``x`` fluctuate with covariance ``s2 * g_lower``
(``g_lower`` is the inverse of the upper-index metric). The transformed
coordinates are ``x' = N x + zeta`` with independent noise of covariance
``e2 * g'_lower``. Two estimators of ``N`` work from the moments:

* the inverse form ``N = s^-2 <x' x> g``, which uses the known metric and scale;
* the adjugate form ``N = <x' x> adj(<x x>) / det(<x x>)``, written with
  Levi-Civita contractions and free of any metric assumption.

:class:`BlurredLorentzEstimator` wraps both behind the scikit-learn
estimator interface.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, validate_data

from nesreg.errors import DomainError, ModelError, RankError
from nesreg.kinematics import BoostNES, MetricNES, frames_for_boost, invariance_residual

#: Samples drawn per independently seeded stream.
DEFAULT_STREAM_SIZE = 1 << 18


@dataclass(frozen=True)
class FluctuationModel:
    g: MetricNES
    g_prime: MetricNES
    boost: BoostNES
    s2: float
    e2: float
    seed: int = 0

    def __post_init__(self):
        if not self.s2 > 0.0:
            raise DomainError(f"s2 must be positive, got {self.s2}")
        if not self.e2 >= 0.0:
            raise DomainError(f"e2 must be non-negative, got {self.e2}")
        if not self.g.dim == self.g_prime.dim == self.boost.dim:
            raise ModelError("metrics and boost must share one dimension")
        res = invariance_residual(self.g, self.g_prime, self.boost)
        if res > 1e-10:
            raise ModelError(f"g, g' and N are inconsistent (residual {res:.3g})")

    @property
    def dim(self):
        return self.g.dim


def make_model(rho_obs, sigma, s2=1.0, e2=0.0, seed=0, dim=4, axis_j=1):
    """Model whose particle metric is the one implied by boosting the observer by ``sigma``."""
    g, g_prime, boost = frames_for_boost(rho_obs, sigma, axis_j, dim)
    return FluctuationModel(g=g, g_prime=g_prime, boost=boost, s2=s2, e2=e2, seed=seed)


@dataclass(frozen=True)
class FluctuationEnsemble:
    x: np.ndarray
    zeta: np.ndarray
    x_prime: np.ndarray

    @property
    def n_samples(self):
        return self.x.shape[0]


@dataclass(frozen=True)
class MomentMatrix:
    cxx: np.ndarray
    cxpx: np.ndarray
    n_samples: int
    cxpxp: np.ndarray | None = None

    def __post_init__(self):
        if not np.allclose(self.cxx, self.cxx.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(self.cxx).max())):
            raise DomainError("<x x> must be symmetric")


@dataclass(frozen=True)
class EstimatedTransform:
    n_hat: np.ndarray
    max_abs_error: float | None = None
    s_prime2_hat: float | None = None


def _sqrt_cov(cov):
    vals, vecs = np.linalg.eigh(cov)
    if vals.min() <= 0.0:
        raise ModelError(f"covariance is not positive definite (min eigenvalue {vals.min():.3g})")
    return (vecs * np.sqrt(vals)) @ vecs.T


def _blocks(model, n, stream_size):
    if n < 1:
        raise DomainError(f"need at least one sample, got {n}")
    if stream_size < 1:
        raise DomainError(f"stream size must be positive, got {stream_size}")
    d = model.dim
    root_x = _sqrt_cov(model.s2 * model.g.lower)
    root_z = _sqrt_cov(model.g_prime.lower) * math.sqrt(model.e2)
    nmat = model.boost.matrix
    n_streams = -(-n // stream_size)
    children = np.random.SeedSequence(model.seed).spawn(n_streams)
    for i, child in enumerate(children):
        m = min(stream_size, n - i * stream_size)
        rng = np.random.default_rng(child)
        z = rng.standard_normal((2, m, d))
        x = z[0] @ root_x
        zeta = z[1] @ root_z
        yield x, zeta, x @ nmat.T + zeta


def sample_fluctuations(model, n, stream_size=DEFAULT_STREAM_SIZE):
    """Draw ``n`` Gaussian fluctuation pairs.

    Samples are produced in streams of ``stream_size`` seeded from
    ``SeedSequence(model.seed).spawn``; the ensemble is a pure function of
    ``(model, n, stream_size)``.
    """
    parts = list(_blocks(model, n, stream_size))
    return FluctuationEnsemble(*(np.concatenate(p) for p in zip(*parts)))


def moments_from_ensemble(ens):
    n = ens.n_samples
    return MomentMatrix(
        cxx=ens.x.T @ ens.x / n,
        cxpx=ens.x_prime.T @ ens.x / n,
        n_samples=n,
        cxpxp=ens.x_prime.T @ ens.x_prime / n,
    )


def accumulate_moments(model, n, stream_size=DEFAULT_STREAM_SIZE):
    """Moments of the same ensemble as :func:`sample_fluctuations`, without holding it in memory."""
    d = model.dim
    cxx = np.zeros((d, d))
    cxpx = np.zeros((d, d))
    cxpxp = np.zeros((d, d))
    for x, _, xp in _blocks(model, n, stream_size):
        cxx += x.T @ x
        cxpx += xp.T @ x
        cxpxp += xp.T @ xp
    return MomentMatrix(cxx=cxx / n, cxpx=cxpx / n, n_samples=n, cxpxp=cxpxp / n)


def population_moments(model):
    """Exact second moments implied by the model."""
    cxx = model.s2 * model.g.lower
    nmat = model.boost.matrix
    return MomentMatrix(
        cxx=cxx,
        cxpx=nmat @ cxx,
        n_samples=0,
        cxpxp=nmat @ cxx @ nmat.T + model.e2 * model.g_prime.lower,
    )


def _as_moments(data):
    if isinstance(data, MomentMatrix):
        return data
    return moments_from_ensemble(data)


def _error(n_hat, n_true):
    if n_true is None:
        return None
    return float(np.max(np.abs(n_hat - np.asarray(n_true))))


def estimate_inverse_form(data, g, s2, n_true=None):
    """``N = s^-2 <x' x> g`` from an ensemble or precomputed moments."""
    mom = _as_moments(data)
    if mom.n_samples and mom.n_samples < g.dim:
        raise DomainError(f"need at least {g.dim} samples, got {mom.n_samples}")
    n_hat = mom.cxpx @ g.matrix / s2
    return EstimatedTransform(n_hat=n_hat, max_abs_error=_error(n_hat, n_true))


def _perm_sign(p):
    inversions = sum(1 for a, b in itertools.combinations(p, 2) if a > b)
    return -1 if inversions % 2 else 1


def _signed_perms(d):
    return [(p, _perm_sign(p)) for p in itertools.permutations(range(d))]


_PERMS = {d: _signed_perms(d) for d in (2, 3, 4)}


def levi_civita_q(cxx):
    """``Q^{ab} = eps^{a s k ...} C_st C_kl ... eps^{t l ... b}`` by permutation enumeration.

    Only the ``D!`` nonzero entries of each symbol are visited.
    """
    c = np.asarray(cxx, dtype=float)
    d = c.shape[0]
    perms = _PERMS[d]
    q = np.zeros((d, d))
    for p, sp in perms:
        rows = p[1:]
        for r, sr in perms:
            q[p[0], r[-1]] += sp * sr * np.prod(c[rows, r[:-1]])
    return q


def estimate_adjugate_form(moments, dim=None, n_true=None):
    """``N = (-1)^(D-1)/(D-1)! det(<xx>)^-1 <x' x> Q``; equals ``<x' x> <x x>^-1``."""
    mom = _as_moments(moments)
    cxx = np.asarray(mom.cxx, dtype=float)
    d = cxx.shape[0] if dim is None else dim
    if cxx.shape != (d, d) or d not in _PERMS:
        raise DomainError(f"adjugate form supports D in (2, 3, 4), got moments of shape {cxx.shape}")
    if np.linalg.matrix_rank(cxx) < d:
        raise RankError("<x x> is singular")
    det = np.linalg.det(cxx)
    pref = (-1) ** (d - 1) / math.factorial(d - 1)
    n_hat = pref / det * mom.cxpx @ levi_civita_q(cxx)
    return EstimatedTransform(n_hat=n_hat, max_abs_error=_error(n_hat, n_true))


def residual_variance_check(model, data):
    """Compare the observed transformed-coordinate scale with the noise level.

    ``s'^2`` is ``g'^{mn} <x'_m x'_n> / Tr(g')``. The report gives the
    noise estimate ``s'^2 - s^2`` alongside ``s'^2 - s^2 D / Tr(g')``, which
    is what the middle term contracts to under the invariance relation. With
    lower-index noise covariance the noise term contracts to ``e^2 D``, so the
    second estimate targets ``e^2 D / Tr(g')``; both coincide when
    ``Tr(g') = D``.
    """
    mom = _as_moments(data)
    if mom.cxpxp is None:
        raise DomainError("moments lack <x' x'>")
    d = model.dim
    tr = model.g_prime.trace
    s_prime2 = float(np.sum(model.g_prime.matrix * mom.cxpxp)) / tr
    e2_paper = s_prime2 - model.s2
    e2_trace = s_prime2 - model.s2 * d / tr
    return {
        "dim": d,
        "n_samples": mom.n_samples,
        "s2": model.s2,
        "e2_model": model.e2,
        "trace_g_prime": tr,
        "s_prime2_hat": s_prime2,
        "e2_paper_relation": e2_paper,
        "e2_trace_relation": e2_trace,
        "e2_trace_relation_expected": model.e2 * d / tr,
        "relation_discrepancy": e2_paper - e2_trace,
    }


class BlurredLorentzEstimator(RegressorMixin, BaseEstimator):
    """Estimate a linear transformation ``x' = N x + noise`` from paired samples.

    Parameters
    ----------
    method : {"adjugate", "inverse"}, default="adjugate"
        ``"adjugate"`` uses the sample moments alone. ``"inverse"`` assumes
        ``<x x> = s2 * metric.lower`` and needs both ``metric`` and ``s2``.
    metric : MetricNES, optional
        Metric of the source frame (inverse form only).
    s2 : float, optional
        Fluctuation scale of the source coordinates (inverse form only).

    Attributes
    ----------
    coef_ : ndarray of shape (D, D)
        The estimated transformation matrix.
    moments_ : MomentMatrix
    """

    def __init__(self, method="adjugate", metric=None, s2=None):
        self.method = method
        self.metric = metric
        self.s2 = s2

    def fit(self, X, y):
        X, y = validate_data(self, X, y, multi_output=True, y_numeric=True)
        y = np.asarray(y, dtype=float)
        if y.ndim != 2 or y.shape[1] != X.shape[1]:
            raise ValueError(f"y must have shape (n, {X.shape[1]}), got {y.shape}")
        n = X.shape[0]
        self.moments_ = MomentMatrix(cxx=X.T @ X / n, cxpx=y.T @ X / n, n_samples=n, cxpxp=y.T @ y / n)
        if self.method == "adjugate":
            est = estimate_adjugate_form(self.moments_)
        elif self.method == "inverse":
            if self.metric is None or self.s2 is None:
                raise ValueError("method='inverse' needs both metric and s2")
            if self.metric.dim != X.shape[1]:
                raise ValueError(f"metric has dim {self.metric.dim}, data has {X.shape[1]} features")
            est = estimate_inverse_form(self.moments_, self.metric, self.s2)
        else:
            raise ValueError(f"unknown method {self.method!r}")
        self.coef_ = est.n_hat
        return self

    def predict(self, X):
        check_is_fitted(self)
        X = validate_data(self, X, reset=False)
        return X @ self.coef_.T

    def residuals(self, X, y):
        """Per-sample noise estimates ``x' - N x``."""
        check_is_fitted(self)
        return check_array(y) - self.predict(X)
