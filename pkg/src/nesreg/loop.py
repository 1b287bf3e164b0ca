"""Regularized one-loop integral ``D(0)``, the dressed propagator and the mass correction.

The loop integral is split at ``k* = E_p / m0c2``: below it the integrand
runs in four dimensions, above it in one. Two evaluations are provided:

``paper``
    The published closed form, term by term.
``plemelj``
    Principal value plus pole term for the lower segment (the ``i eps``
    limit taken analytically) and the exact, pole-free upper tail.

The two disagree in the constant and imaginary parts, so every result
carries its mode.
"""

from __future__ import annotations

import enum
import math
import sys
import warnings
from dataclasses import dataclass, field

from scipy import integrate
from scipy.special import gamma

from nesreg.effective_dimension import DEFAULT_CONSTANTS, PhysicalConstants
from nesreg.errors import DomainError, NumericError, PoleError, QuadratureError, WeakCouplingError

INV_8PI2 = 1.0 / (8.0 * math.pi**2)
INV_16PI2 = 1.0 / (16.0 * math.pi**2)
#: quadpack rejects relative tolerances below 50 machine epsilons
MIN_TOLERANCE = 50.0 * sys.float_info.epsilon


class Mode(str, enum.Enum):
    PAPER = "paper"
    PLEMELJ = "plemelj"


@dataclass(frozen=True)
class LoopResult:
    d0: complex
    kstar: float
    mode: Mode
    segment1: complex
    segment2: complex

    def as_record(self):
        return {
            "mode": self.mode.value,
            "kstar": self.kstar,
            "re": self.d0.real,
            "im": self.d0.imag,
            "segment1_re": self.segment1.real,
            "segment1_im": self.segment1.imag,
            "segment2_re": self.segment2.real,
            "segment2_im": self.segment2.imag,
        }


@dataclass(frozen=True)
class MassCorrection:
    m0c2_gev: float
    w: float
    mode: Mode
    loop: LoopResult = field(repr=False)
    theta_js: float
    mu_star: float
    tau_l_s: float | None

    def as_record(self):
        rec = {
            "mode": self.mode.value,
            "m0c2_gev": self.m0c2_gev,
            "coupling_per_js": self.w,
            "kstar": self.loop.kstar,
            "d0_re": self.loop.d0.real,
            "d0_im": self.loop.d0.imag,
            "theta_js": self.theta_js,
            "theta_inv_per_js": 1.0 / self.theta_js,
            "mu_star": self.mu_star,
            "tau_l_s": self.tau_l_s,
        }
        return rec


def kstar(m0c2_gev, constants=DEFAULT_CONSTANTS):
    """Split point of the loop integral, the Planck-to-rest-energy ratio."""
    if not m0c2_gev > 0.0:
        raise DomainError(f"rest energy must be positive, got {m0c2_gev}")
    return constants.planck_energy_gev / m0c2_gev


def surface_factor(q):
    """Angular prefactor ``2 / ((4 pi)^(q/2) Gamma(q/2))`` of a radial integral in ``q`` dimensions."""
    if not q > 0.0:
        raise DomainError(f"dimension must be positive, got {q}")
    return 2.0 / ((4.0 * math.pi) ** (q / 2.0) * gamma(q / 2.0))


def _check_kstar(ks):
    if not ks > 1.0:
        raise DomainError(f"k* must exceed 1 (the mass-shell pole), got {ks}")
    if ks - 1.0 < 1e-6:
        warnings.warn(f"k* = {ks} is next to the pole; Re D(0) diverges logarithmically", RuntimeWarning)


def _check_finite(value, ks):
    if not math.isfinite(value):
        raise NumericError(f"Re D(0) overflows double precision at k* = {ks:.3g}")
    return value


def dzero_paper_closed_form(ks):
    _check_kstar(ks)
    re1 = _check_finite(INV_16PI2 * (ks * ks + math.log(ks - 1.0) + math.log(ks + 1.0)), ks)
    seg1 = complex(re1, -math.pi * INV_16PI2)
    seg2 = complex(math.atan(ks) / math.pi, 0.5)
    return LoopResult(d0=seg1 + seg2, kstar=float(ks), mode=Mode.PAPER, segment1=seg1, segment2=seg2)


def _cubic_over_kp1(k):
    return k**3 / (k + 1.0)


def principal_value_segment(ks, tolerance=1e-10, limit=200):
    """``PV int_0^k* k^3 / (k^2 - 1) dk`` by singularity subtraction and adaptive quadrature.

    Returns ``(value, abserr)``. With ``f(k) = k^3 / (k + 1)`` the integrand is
    ``f(k) / (k - 1)``. On the window ``[1 - h, 1 + h]`` symmetric about the
    pole, ``f(1) / (k - 1)`` integrates to zero in the principal-value sense,
    leaving the regular ``(f(k) - f(1)) / (k - 1)``. Outside the window the
    integrand is regular; the far piece is integrated in ``u = ln k`` so that
    very large ``k*`` stays well resolved.
    """
    if not tolerance >= MIN_TOLERANCE:
        raise DomainError(f"tolerance must be at least {MIN_TOLERANCE:.3g}, got {tolerance}")
    h = min(1.0, ks - 1.0)
    f1 = _cubic_over_kp1(1.0)

    def window(k):
        d = k - 1.0
        if d == 0.0:
            # f'(1) = (3 k^2 (k+1) - k^3) / (k+1)^2 at k = 1
            return 5.0 / 4.0
        return (_cubic_over_kp1(k) - f1) / d

    pieces = []
    opts = dict(epsabs=0.0, epsrel=tolerance, limit=limit)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            pieces.append(integrate.quad(window, 1.0 - h, 1.0 + h, **opts))
            if h < 1.0:
                pieces.append(integrate.quad(lambda k: k**3 / (k * k - 1.0), 0.0, 1.0 - h, **opts))
            if 1.0 + h < ks:
                pieces.append(
                    integrate.quad(
                        lambda u: math.exp(2.0 * u) / -math.expm1(-2.0 * u),
                        math.log(1.0 + h),
                        math.log(ks),
                        **opts,
                    )
                )
        except OverflowError as exc:
            raise NumericError(f"principal value overflows double precision at k* = {ks:.3g}") from exc
        except integrate.IntegrationWarning as exc:
            estimate = math.fsum(p[0] for p in pieces)
            raise QuadratureError(f"principal-value quadrature did not converge: {exc}", estimate) from exc
    value = math.fsum(p[0] for p in pieces)
    abserr = math.fsum(p[1] for p in pieces)
    return value, abserr


def pv_antiderivative(ks):
    """Closed form of the same principal value, ``k*^2/2 + ln|k*^2 - 1| / 2``."""
    return 0.5 * ks * ks + 0.5 * math.log(abs((ks - 1.0) * (ks + 1.0)))


def dzero_quadrature(ks, tolerance=1e-10):
    """``D(0)`` with the ``i eps`` prescription resolved by the Sokhotski-Plemelj formula.

    Lower segment: ``(1/8 pi^2) [PV int - i pi f(1)/|g'(1)|]`` with
    ``f = k^3``, ``g = k^2 - 1``. Upper segment: ``(1/pi) int_k*^inf dk/(k^2-1)``,
    which has no pole and equals ``ln((k*+1)/(k*-1)) / (2 pi)``.
    """
    _check_kstar(ks)
    pv, abserr = principal_value_segment(ks, tolerance)
    if abserr > tolerance * abs(pv) and abserr > 1e-300:
        raise QuadratureError(
            f"achieved relative error {abserr / abs(pv):.3g} exceeds tolerance {tolerance:.3g}",
            estimate=pv,
            abserr=abserr,
        )
    pole = math.pi * 1.0 / 2.0
    seg1 = complex(_check_finite(INV_8PI2 * pv, ks), -pole * INV_8PI2)
    seg2 = complex(math.log1p(2.0 / (ks - 1.0)) / (2.0 * math.pi), 0.0)
    return LoopResult(d0=seg1 + seg2, kstar=float(ks), mode=Mode.PLEMELJ, segment1=seg1, segment2=seg2)


def dzero(ks, mode=Mode.PAPER, tolerance=1e-10):
    mode = Mode(mode)
    if mode is Mode.PAPER:
        return dzero_paper_closed_form(ks)
    return dzero_quadrature(ks, tolerance)


def dressed_propagator(q2, w, d0, constants=DEFAULT_CONSTANTS, eps=0.0):
    """First-order dressed propagator ``1 / (q^2 - [1 + w hbar Re D/2] + i[eps - w hbar Im D/2])``."""
    half = 0.5 * w * constants.hbar_js
    if half * abs(d0) >= 0.1:
        warnings.warn(
            f"w hbar |D(0)| / 2 = {half * abs(d0):.3g} is not small; first-order form is unreliable",
            RuntimeWarning,
        )
    denom = complex(q2 - (1.0 + half * d0.real), eps - half * d0.imag)
    if denom == 0:
        raise PoleError(f"propagator evaluated on its pole at q^2 = {q2}")
    return 1.0 / denom


def mass_correction(m0c2_gev, w, mode=Mode.PAPER, constants=DEFAULT_CONSTANTS, tolerance=1e-10):
    """Scale ``Theta = hbar Re D(0)/2``, corrected mass ``sqrt(1 + w Theta)`` and lifetime.

    The lifetime uses ``|Im D(0)|`` of the selected mode and is ``None`` for
    ``w = 0`` (or a vanishing imaginary part).
    """
    if not w >= 0.0:
        raise DomainError(f"coupling must be non-negative, got {w}")
    mode = Mode(mode)
    loop = dzero(kstar(m0c2_gev, constants), mode, tolerance)
    hbar = constants.hbar_js
    theta = 0.5 * hbar * loop.d0.real
    if w * theta >= 1.0:
        raise WeakCouplingError(f"w Theta = {w * theta:.3g} >= 1: coupling is not weak (need w << {1.0 / theta:.3g} /Js)")
    if w * theta >= 0.1:
        warnings.warn(f"w Theta = {w * theta:.3g} is not << 1", RuntimeWarning)
    tau = lifetime(m0c2_gev, w, loop.d0.imag, constants)
    return MassCorrection(
        m0c2_gev=float(m0c2_gev),
        w=float(w),
        mode=mode,
        loop=loop,
        theta_js=theta,
        mu_star=math.sqrt(1.0 + w * theta),
        tau_l_s=tau,
    )


def lifetime(m0c2_gev, w, im_d0, constants=DEFAULT_CONSTANTS):
    """``(hbar / m0c2) sqrt(2 / (w hbar |Im D(0)|))`` in seconds."""
    rate = w * constants.hbar_js * abs(im_d0)
    if rate == 0.0:
        return None
    return constants.hbar_js / (m0c2_gev * constants.gev_to_joule) * math.sqrt(2.0 / rate)


THETA_COLUMNS = ("m0c2_gev", "kstar", "theta_js", "theta_inv_per_js")

#: Higgs-like, electron and proton rest energies in GeV.
DEFAULT_MASSES_GEV = (128.0, 5.1e-4, 0.94)


def theta_table(masses_gev=DEFAULT_MASSES_GEV, constants=DEFAULT_CONSTANTS):
    rows = []
    for m in masses_gev:
        loop = dzero_paper_closed_form(kstar(m, constants))
        theta = 0.5 * constants.hbar_js * loop.d0.real
        rows.append((float(m), loop.kstar, theta, 1.0 / theta))
    return rows
