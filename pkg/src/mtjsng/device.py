"""Precessional-switching model of an in-plane MTJ.

The switching-time density is

    P(t) ~ exp(-delta * sin^2(phi)) * (J - J_c0) * sin^2(phi)
    phi(t) = pi/2 * exp(-eta * mu_B / (e * M_s * t_F) * (J - J_c0) * t)

with an arbitrary overall constant.  Every quantity derived from it
(switching probability, conditional switching time) is a ratio of
integrals, so the constant cancels.

All internal arithmetic is SI.  ``DeviceParams.from_lab_units`` and
``DeviceParams.lab_units`` convert to and from nm, emu/cc, MA/cm^2 and
Ohm*um^2.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import (
    DomainError,
    NoBracket,
    ParameterError,
    QuadratureFailure,
    SubcriticalDrive,
    UndefinedConditional,
)
from .quadrature import adaptive_simpson, bisect_increasing, simpson_richardson


@dataclass(frozen=True)
class PhysicalConstants:
    mu_b: float = 9.2740100783e-24  # Bohr magneton, J/T
    e: float = 1.602176634e-19  # elementary charge, C
    k_b: float = 1.380649e-23  # Boltzmann constant, J/K
    mu_0: float = 1.25663706212e-6  # vacuum permeability, N/A^2


CONSTANTS = PhysicalConstants()

# Unit factors: multiply a value in the named unit to get SI.
NM = 1e-9
EMU_PER_CC = 1e3  # emu/cm^3 -> A/m
MA_PER_CM2 = 1e10  # MA/cm^2 -> A/m^2
OHM_UM2 = 1e-12  # Ohm*um^2 -> Ohm*m^2
OERSTED = 1e3 / (4.0 * math.pi)  # Oe -> A/m

# Fitted by ``mtjsng.calibration.calibrate`` against the 0.93 pJ write and
# 0.46 pJ reset operating points; rerun it if any other default changes.
DEFAULT_TMR = 0.67459

# Switching-time grid: the improper integral is truncated where a doubling of
# the window adds less than this fraction of the mass.
T_INF_START = 10e-9
T_INF_REL_TAIL = 1e-9
QUAD_REL_TOL = 1e-12
INVERSE_PROB_TOL = 1e-6
SAMPLE_PROB_TOL = 1e-12


class MtjState(enum.Enum):
    """Magnetic state; the value is the logic bit it encodes."""

    P = 0
    AP = 1

    @property
    def bit(self) -> int:
        return self.value


class Transition(enum.Enum):
    P_TO_AP = "PtoAP"
    AP_TO_P = "APtoP"

    @property
    def source(self) -> MtjState:
        return MtjState.P if self is Transition.P_TO_AP else MtjState.AP

    @property
    def destination(self) -> MtjState:
        return MtjState.AP if self is Transition.P_TO_AP else MtjState.P

    def j_c0(self, params: "DeviceParams") -> float:
        if self is Transition.P_TO_AP:
            return params.j_c0_ptoap
        return params.j_c0_aptop


@dataclass(frozen=True)
class DeviceParams:
    """Geometry, magnetic and electrical constants of one MTJ (SI units)."""

    width: float = 20 * NM
    length: float = 58 * NM
    t_f: float = 2.5 * NM
    m_s: float = 1222 * EMU_PER_CC
    delta: float = 47.5
    eta: float = 0.85
    temperature: float = 300.0
    ra: float = 5 * OHM_UM2
    tmr: float = DEFAULT_TMR
    # Damping constant.  Not used by the precessional formula.
    alpha: float = 6.82e-3
    j_c0_ptoap: float = 7.55 * MA_PER_CM2
    j_c0_aptop: float = 4.10 * MA_PER_CM2

    def __post_init__(self):
        positive = {
            "width": self.width,
            "length": self.length,
            "t_f": self.t_f,
            "m_s": self.m_s,
            "delta": self.delta,
            "temperature": self.temperature,
            "ra": self.ra,
            "j_c0_ptoap": self.j_c0_ptoap,
            "j_c0_aptop": self.j_c0_aptop,
        }
        for name, value in positive.items():
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be positive and finite, got {value!r}")
        if not (0 < self.eta <= 1):
            raise ParameterError(f"eta must lie in (0, 1], got {self.eta!r}")
        if not (math.isfinite(self.tmr) and self.tmr >= 0):
            raise ParameterError(f"tmr must be >= 0, got {self.tmr!r}")
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ParameterError(f"alpha must be >= 0, got {self.alpha!r}")

    @classmethod
    def from_lab_units(
        cls,
        width_nm: float = 20.0,
        length_nm: float = 58.0,
        t_f_nm: float = 2.5,
        m_s_emu_cc: float = 1222.0,
        delta: float = 47.5,
        eta: float = 0.85,
        temperature_k: float = 300.0,
        ra_ohm_um2: float = 5.0,
        tmr: float = DEFAULT_TMR,
        alpha: float = 6.82e-3,
        j_c0_ptoap_ma_cm2: float = 7.55,
        j_c0_aptop_ma_cm2: float = 4.10,
    ) -> "DeviceParams":
        return cls(
            width=width_nm * NM,
            length=length_nm * NM,
            t_f=t_f_nm * NM,
            m_s=m_s_emu_cc * EMU_PER_CC,
            delta=delta,
            eta=eta,
            temperature=temperature_k,
            ra=ra_ohm_um2 * OHM_UM2,
            tmr=tmr,
            alpha=alpha,
            j_c0_ptoap=j_c0_ptoap_ma_cm2 * MA_PER_CM2,
            j_c0_aptop=j_c0_aptop_ma_cm2 * MA_PER_CM2,
        )

    def lab_units(self) -> dict[str, float]:
        """Inverse of ``from_lab_units``."""
        return {
            "width_nm": self.width / NM,
            "length_nm": self.length / NM,
            "t_f_nm": self.t_f / NM,
            "m_s_emu_cc": self.m_s / EMU_PER_CC,
            "delta": self.delta,
            "eta": self.eta,
            "temperature_k": self.temperature,
            "ra_ohm_um2": self.ra / OHM_UM2,
            "tmr": self.tmr,
            "alpha": self.alpha,
            "j_c0_ptoap_ma_cm2": self.j_c0_ptoap / MA_PER_CM2,
            "j_c0_aptop_ma_cm2": self.j_c0_aptop / MA_PER_CM2,
        }

    @property
    def area(self) -> float:
        return self.width * self.length

    @property
    def volume(self) -> float:
        return self.width * self.length * self.t_f

    @property
    def precession_coefficient(self) -> float:
        """eta * mu_B / (e * M_s * t_F), in m^2/C; times (J - J_c0) gives 1/s."""
        c = CONSTANTS
        return self.eta * c.mu_b / (c.e * self.m_s * self.t_f)

    def with_tmr(self, tmr: float) -> "DeviceParams":
        return replace(self, tmr=tmr)


@dataclass(frozen=True)
class PulseSpec:
    """A rectangular voltage pulse.  The bias sign only records polarity."""

    bias: float
    width: float

    def __post_init__(self):
        if not math.isfinite(self.bias):
            raise ParameterError(f"pulse bias must be finite, got {self.bias!r}")
        if not (math.isfinite(self.width) and self.width >= 0):
            raise ParameterError(f"pulse width must be >= 0, got {self.width!r}")


@dataclass(frozen=True)
class SwitchingStats:
    p_sw: float
    # Conditional mean switching instant; None when p_sw == 0.
    ex_t_sw: Optional[float]
    j: float


def derive_anisotropy_field(params: DeviceParams) -> float:
    """Anisotropy field H_K in A/m that reproduces the stability factor.

    Solves delta = mu_0 * H_K * M_s * V / (2 k_B T); in Gaussian units the
    mu_0 disappears and the result divided by ``OERSTED`` is in Oe.
    """
    c = CONSTANTS
    return 2.0 * params.delta * c.k_b * params.temperature / (
        c.mu_0 * params.m_s * params.volume
    )


def resistance(params: DeviceParams, state: MtjState) -> float:
    r_p = params.ra / params.area
    if state is MtjState.P:
        return r_p
    return r_p * (1.0 + params.tmr)


def current_density(params: DeviceParams, pulse: PulseSpec, state: MtjState) -> float:
    """Magnitude of the current density through a device sitting in ``state``."""
    return abs(pulse.bias) / (resistance(params, state) * params.area)


def drive_current_density(pulse: PulseSpec, tr: Transition, params: DeviceParams) -> float:
    """Current density seen while the device is still in the source state."""
    return current_density(params, pulse, tr.source)


class SwitchingDistribution:
    """Switching-time density for one drive level, with cached integrals.

    The constructor partitions ``[0, t_inf]`` by adaptive Simpson and stores
    cumulative mass and first moment at the panel edges; queries at an
    arbitrary width then only integrate the partial panel.
    """

    def __init__(self, j_excess: float, params: DeviceParams, scale: float = 1.0):
        if not j_excess > 0:
            raise ValueError("j_excess must be positive")
        if not scale > 0:
            raise ValueError("scale must be positive")
        self.j_excess = j_excess
        self.delta = params.delta
        self.scale = scale
        self.rate = params.precession_coefficient * j_excess
        # Small-angle closed form of the total mass; fixes the absolute
        # tolerance before the mass itself is known.
        approx_mass = scale / (2.0 * params.precession_coefficient * params.delta)
        self.tol = QUAD_REL_TOL * approx_mass
        self._build()

    def pdf_scalar(self, t: float) -> float:
        s = math.sin(0.5 * math.pi * math.exp(-self.rate * t)) ** 2
        return self.scale * math.exp(-self.delta * s) * self.j_excess * s

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        s = np.sin(0.5 * np.pi * np.exp(-self.rate * t)) ** 2
        return self.scale * np.exp(-self.delta * s) * self.j_excess * s

    def _moment_integrand(self, t):
        return t * self.pdf(t)

    def _build(self) -> None:
        t_hi = T_INF_START
        first = adaptive_simpson(self.pdf_scalar, 0.0, t_hi, self.tol)
        edges = [first.edges]
        values = [first.panel_values]
        total = first.value
        for _ in range(48):
            nxt = adaptive_simpson(self.pdf_scalar, t_hi, 2.0 * t_hi, self.tol)
            edges.append(nxt.edges[1:])
            values.append(nxt.panel_values)
            total += nxt.value
            t_hi *= 2.0
            if nxt.value < T_INF_REL_TAIL * total:
                break
        else:
            raise QuadratureFailure("tail mass did not converge while doubling t_inf")
        self.t_inf = t_hi
        self.edges = np.concatenate(edges)
        panel_mass = np.concatenate(values)
        panel_moment = simpson_richardson(self._moment_integrand, self.edges[:-1], self.edges[1:])
        self.cum_mass = np.concatenate(([0.0], np.cumsum(panel_mass)))
        self.cum_moment = np.concatenate(([0.0], np.cumsum(panel_moment)))
        self.total_mass = float(self.cum_mass[-1])

    def _panel(self, w: float) -> int:
        k = int(np.searchsorted(self.edges, w, side="right")) - 1
        return min(max(k, 0), len(self.edges) - 2)

    def mass(self, w: float) -> float:
        """Unnormalised integral of the density over ``[0, w]``."""
        if w <= 0:
            return 0.0
        if w >= self.t_inf:
            return self.total_mass
        k = self._panel(w)
        lo = float(self.edges[k])
        panel = float(self.cum_mass[k + 1] - self.cum_mass[k])
        partial = adaptive_simpson(self.pdf_scalar, lo, w, self.tol).value
        return float(self.cum_mass[k]) + min(max(partial, 0.0), panel)

    def moment(self, w: float) -> float:
        """Unnormalised integral of t * density over ``[0, w]``."""
        if w <= 0:
            return 0.0
        if w >= self.t_inf:
            return float(self.cum_moment[-1])
        k = self._panel(w)
        lo = float(self.edges[k])
        partial = adaptive_simpson(
            lambda t: t * self.pdf_scalar(t), lo, w, self.tol * w
        ).value
        return float(self.cum_moment[k]) + partial

    def probability(self, w: float) -> float:
        return min(self.mass(w) / self.total_mass, 1.0)

    def expected_time(self, w: float) -> float:
        m = self.mass(w)
        if m <= 0:
            raise UndefinedConditional(f"no switching mass within width {w!r}")
        ex = self.moment(min(w, self.t_inf)) / m
        return min(max(ex, 0.0), w)

    def width_for_probability(self, target: float) -> float:
        if not (0 < target < 1):
            raise DomainError(f"target probability must lie in (0, 1), got {target!r}")
        if target > self.probability(self.t_inf):
            raise NoBracket(f"target {target!r} exceeds the mass reachable within t_inf")
        return bisect_increasing(self.probability, target, 0.0, self.t_inf, INVERSE_PROB_TOL)

    def sample(self, u, width: float) -> np.ndarray:
        """Switching instants for uniforms ``u``, conditioned on t <= width.

        Inverse-CDF by bisection on the truncated, normalised CDF until the
        probability residual is below 1e-12 (or the interval stops shrinking).
        """
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if u.size == 0:
            return np.empty(0)
        w = min(width, self.t_inf)
        m_w = self.mass(w)
        if m_w <= 0:
            raise UndefinedConditional(f"no switching mass within width {width!r}")
        target = u * m_w
        k = np.searchsorted(self.cum_mass, target, side="right") - 1
        k = np.clip(k, 0, self._panel(w))
        base = self.cum_mass[k]
        lo = self.edges[k]
        f_lo = self.pdf(lo)
        a = lo.copy()
        b = np.minimum(self.edges[k + 1], w)
        out = np.empty_like(u)
        done = np.zeros(u.shape, dtype=bool)
        for _ in range(200):
            mid = 0.5 * (a + b)
            h = mid - lo
            f1 = self.pdf(lo + 0.25 * h)
            f2 = self.pdf(lo + 0.5 * h)
            f3 = self.pdf(lo + 0.75 * h)
            f4 = self.pdf(mid)
            whole = h / 6.0 * (f_lo + 4.0 * f2 + f4)
            halves = h / 12.0 * (f_lo + 4.0 * f1 + 2.0 * f2 + 4.0 * f3 + f4)
            resid = (base + halves + (halves - whole) / 15.0 - target) / m_w
            newly = ~done & ((np.abs(resid) <= SAMPLE_PROB_TOL) | (mid == a) | (mid == b))
            out[newly] = mid[newly]
            done |= newly
            if done.all():
                break
            below = resid < 0
            a = np.where(below, mid, a)
            b = np.where(below, b, mid)
        else:
            out[~done] = mid[~done]
        return out


@lru_cache(maxsize=512)
def _distribution(j_excess: float, params: DeviceParams, scale: float) -> SwitchingDistribution:
    return SwitchingDistribution(j_excess, params, scale)


def switching_distribution(
    bias: float, tr: Transition, params: DeviceParams, scale: float = 1.0
) -> SwitchingDistribution:
    """Distribution for a drive at ``bias`` volts; raises SubcriticalDrive."""
    j = current_density(params, PulseSpec(bias, 0.0), tr.source)
    j_c0 = tr.j_c0(params)
    if not j > j_c0:
        raise SubcriticalDrive(bias, j, j_c0, tr.value)
    return _distribution(j - j_c0, params, float(scale))


def switching_pdf_unnormalized(
    t, pulse: PulseSpec, tr: Transition, params: DeviceParams, scale: float = 1.0
):
    """Density of the switching instant at time(s) ``t``, up to a constant."""
    dist = switching_distribution(pulse.bias, tr, params, scale)
    if np.ndim(t) == 0:
        return dist.pdf_scalar(float(t))
    return dist.pdf(t)


def switching_probability(
    pulse: PulseSpec, tr: Transition, params: DeviceParams, scale: float = 1.0
) -> float:
    return switching_distribution(pulse.bias, tr, params, scale).probability(pulse.width)


def expected_switching_time(
    pulse: PulseSpec, tr: Transition, params: DeviceParams, scale: float = 1.0
) -> float:
    """Mean switching instant given that the device switched within the pulse."""
    return switching_distribution(pulse.bias, tr, params, scale).expected_time(pulse.width)


def switching_stats(pulse: PulseSpec, tr: Transition, params: DeviceParams) -> SwitchingStats:
    dist = switching_distribution(pulse.bias, tr, params)
    p = dist.probability(pulse.width)
    ex = dist.expected_time(pulse.width) if p > 0 else None
    return SwitchingStats(p_sw=p, ex_t_sw=ex, j=drive_current_density(pulse, tr, params))


def pulse_width_for_probability(
    bias: float, tr: Transition, target: float, params: DeviceParams
) -> float:
    """Pulse width whose switching probability is within 1e-6 of ``target``."""
    return switching_distribution(bias, tr, params).width_for_probability(target)
