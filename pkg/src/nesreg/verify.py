"""Runtime property suite behind ``nesreg verify``.

Each property draws its own randomized parameters from a seeded generator
and returns ``(residual, tolerance)``; it passes when ``residual < tolerance``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from nesreg import blurred_lt as blt
from nesreg import effective_dimension as ed
from nesreg import kinematics as kin
from nesreg import loop
from nesreg.errors import NESError

N_DRAWS = 1000


def _length_conservation(rng):
    worst = 0.0
    for _ in range(N_DRAWS):
        s = rng.uniform(-0.99, 0.99)
        rho, lam = kin.rho_from_sigma(s)
        tau, x = rng.normal(size=2)
        tp, xp = kin.apply_boost(kin.boost_from_sigma(s, dim=2), [tau, x])
        lhs = tau * tau + x * x
        rhs = (tp * tp + xp * xp + 2.0 * rho * tp * xp) / lam
        worst = max(worst, abs(lhs - rhs) / lhs)
    return worst, 1e-10


def _metric_invariance(rng):
    worst = 0.0
    for _ in range(N_DRAWS):
        r, rp = rng.uniform(0.0, 0.99, size=2)
        sig, sig_hat = kin.sigma_between_frames(r, rp)
        g, gp = kin.metric_from_rho(r), kin.metric_from_rho(rp)
        for v in (sig, sig_hat):
            if v is None:
                continue
            res = kin.invariance_residual(g, gp, kin.boost_from_sigma(v.sigma))
            worst = max(worst, res / np.abs(g.matrix).max())
    return worst, 1e-10


def _mass_shell(rng):
    worst = 0.0
    for _ in range(N_DRAWS):
        s = rng.uniform(0.0, 0.99)
        m0 = rng.uniform(0.1, 10.0)
        p, g = kin.on_shell_momentum(m0, s)
        worst = max(worst, abs(kin.inner_product(g, p, p) - m0 * m0) / (m0 * m0))
    return worst, 1e-10


def _eigenzeit(rng):
    beta = rng.uniform(0.0, 0.999, size=N_DRAWS)
    return max(abs(kin.eigenzeit_factor(b) - kin.eigenzeit_from_line_element(b)) for b in beta), 1e-10


def _composition(rng):
    worst = 0.0
    for _ in range(N_DRAWS):
        s0, sp0 = rng.uniform(0.0, 0.99, size=2)
        direct = kin.compose_sigma(sp0, s0).sigma
        rho, lam = kin.rho_from_sigma(s0)
        rho_p, lam_p = kin.rho_from_sigma(sp0)
        via_frames = kin.sigma_between_frames(rho, rho_p, lam, lam_p)[0].sigma
        worst = max(worst, abs(direct - via_frames))
    return worst, 1e-10


def _positive_definite(rng):
    worst = math.inf
    for _ in range(N_DRAWS):
        g = kin.metric_from_rho(rng.uniform(0.0, 0.999), axis_j=int(rng.integers(1, 4)))
        x = rng.normal(size=4)
        worst = min(worst, kin.inner_product(g, x, x) / (x @ x))
    # residual is how far the smallest Rayleigh quotient falls below zero
    return max(0.0, -worst), 1e-300


def _oms_agreement(rng):
    worst = 0.0
    for _ in range(N_DRAWS):
        b = rng.uniform(-0.99, 0.99)
        tau, x = rng.normal(size=2)
        nes = kin.apply_boost(kin.boost_from_sigma(b, dim=2), [tau, x])
        oms = np.array(kin.oms_lorentz(b, tau, x))
        worst = max(worst, float(np.max(np.abs(nes - oms))) / float(np.max(np.abs(oms))))
    return worst, 1e-12


def _eigen_crosscheck(rng):
    worst = 0.0
    for rho in np.linspace(0.0, 1.0 - 1e-9, N_DRAWS):
        g = kin.metric_from_rho(float(rho))
        worst = max(worst, float(np.max(np.abs(np.array(ed.normalized_eigenvalues(g)) - ed.numeric_normalized_eigenvalues(g)))))
    return worst, 1e-10


def _q_range(rng):
    qs = np.array([ed.q_of_rho(float(r)) for r in np.linspace(0.0, 1.0 - 1e-9, N_DRAWS)])
    viol = max(abs(qs[0] - 4.0), float(np.max(np.diff(qs), initial=0.0)), float(max(0.0, 1.0 - qs.min(), qs.max() - 4.0)))
    return viol, 1e-12


def _multinomial(rng):
    p = rng.dirichlet(np.ones(4))
    occ = np.maximum(1, np.round(p * 1e4))
    exact = ed.effective_dim(occ / occ.sum())
    return abs(ed.multinomial_entropy_oracle(occ) / exact - 1.0), 0.01


def _pv_vs_analytic(rng):
    worst = 0.0
    for ks in (2.0, 10.0, 1e3, float(rng.uniform(1.1, 1e4))):
        r = loop.dzero_quadrature(ks)
        worst = max(worst, abs(r.segment1.real / (loop.INV_8PI2 * loop.pv_antiderivative(ks)) - 1.0))
    return worst, 1e-6


def _plemelj_imag(rng):
    ks = rng.uniform(1.1, 1e6, size=20)
    return max(abs(loop.dzero_quadrature(k).segment1.imag + 1.0 / (16.0 * math.pi)) for k in ks), 1e-10


def _paper_imag(rng):
    ks = 10.0 ** rng.uniform(1.0, 20.0, size=100)
    return max(abs(loop.dzero_paper_closed_form(k).d0.imag - 0.48) for k in ks), 0.005


def _estimator_consistency(rng):
    worst = 0.0
    for _ in range(50):
        d = int(rng.integers(2, 5))
        model = blt.make_model(rng.uniform(0.0, 0.9), rng.uniform(0.0, 0.9), s2=rng.uniform(0.5, 2.0), dim=d)
        pop = blt.population_moments(model)
        n = model.boost.matrix
        a = blt.estimate_inverse_form(pop, model.g, model.s2, n).max_abs_error
        b = blt.estimate_adjugate_form(pop, n_true=n).max_abs_error
        worst = max(worst, a, b / np.abs(n).max())
    return worst, 1e-10


def _adjugate_identity(rng):
    worst = 0.0
    for d in (2, 3, 4):
        for _ in range(30):
            a = rng.normal(size=(d, d))
            c = a @ a.T + 0.1 * np.eye(d)
            cxpx = rng.normal(size=(d, d))
            m = blt.MomentMatrix(cxx=c, cxpx=cxpx, n_samples=0)
            adj = blt.estimate_adjugate_form(m).n_hat
            inv = cxpx @ np.linalg.inv(c)
            worst = max(worst, float(np.max(np.abs(adj - inv))) / max(1.0, float(np.abs(inv).max())))
    return worst, 1e-10


def _mc_recovery(rng):
    model = blt.make_model(0.0, 0.5, s2=1.0, e2=0.01, seed=int(rng.integers(2**31)))
    n = 200_000
    est = blt.estimate_inverse_form(blt.accumulate_moments(model, n), model.g, 1.0, model.boost.matrix)
    # roughly 5 standard errors of the worst entry
    return est.max_abs_error, 5.0 * math.sqrt(3.0 / n)


@dataclass(frozen=True)
class Property:
    group: str
    name: str
    check: object


PROPERTIES = (
    Property("kinematics", "length_conservation", _length_conservation),
    Property("kinematics", "metric_invariance", _metric_invariance),
    Property("kinematics", "mass_shell", _mass_shell),
    Property("kinematics", "eigenzeit_identity", _eigenzeit),
    Property("kinematics", "velocity_composition", _composition),
    Property("kinematics", "positive_definite", _positive_definite),
    Property("kinematics", "minkowski_agreement", _oms_agreement),
    Property("effective_dimension", "eigen_crosscheck", _eigen_crosscheck),
    Property("effective_dimension", "q_range_monotone", _q_range),
    Property("effective_dimension", "multinomial_limit", _multinomial),
    Property("loop", "pv_vs_analytic", _pv_vs_analytic),
    Property("loop", "plemelj_imaginary", _plemelj_imag),
    Property("loop", "paper_imaginary", _paper_imag),
    Property("blurred_lt", "estimator_consistency", _estimator_consistency),
    Property("blurred_lt", "adjugate_identity", _adjugate_identity),
    Property("blurred_lt", "mc_recovery", _mc_recovery),
)

GROUPS = tuple(dict.fromkeys(p.group for p in PROPERTIES))

VERIFY_COLUMNS = ("group", "property", "status", "residual", "tolerance", "message")


def _metric_at(rho):
    def check(rng):
        g = kin.metric_from_rho(rho)
        w = ed.normalized_eigenvalues(g)
        return float(np.max(np.abs(np.array(w) - ed.numeric_normalized_eigenvalues(g)))), 1e-10

    return check


def run_properties(groups=None, seed=0, rho=None):
    """Run the suite; ``rho`` adds a metric check at a user-supplied parameter."""
    props = list(PROPERTIES)
    if rho is not None:
        props.append(Property("kinematics", f"metric_at_rho={rho}", _metric_at(rho)))
    if groups:
        unknown = set(groups) - set(GROUPS)
        if unknown:
            raise ValueError(f"unknown property groups: {sorted(unknown)}")
        props = [p for p in props if p.group in groups]
    results = []
    for i, prop in enumerate(props):
        rng = np.random.default_rng([seed, i])
        try:
            residual, tol = prop.check(rng)
        except NESError as exc:
            results.append((prop.group, prop.name, f"error:{exc.kind}", math.nan, math.nan, str(exc)))
            continue
        status = "pass" if residual < tol else "fail"
        results.append((prop.group, prop.name, status, float(residual), float(tol), ""))
    return results
