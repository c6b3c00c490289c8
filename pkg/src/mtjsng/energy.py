"""Expected energies of write, reset and read pulses, and per-bit SNG cost.

Per-bit accounting under each policy (q is the AP->P write probability):

* Normal: every cycle pays the expected reset energy.
* Smart Reset / SR+BMS: the reset fires only after a successful write,
  i.e. with probability about q in steady state.

The read costs V^2 t / R of whichever state the write left behind.
Peripheral CMOS (sense amplifier, mux, logic) is not included.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .device import (
    DeviceParams,
    MtjState,
    PulseSpec,
    Transition,
    resistance,
    switching_distribution,
)
from .errors import DomainError
from .policy import Policy, plan_generation

AVERAGE_GRID_POINTS = 999


@dataclass(frozen=True)
class EnergyBreakdown:
    e_sw: float
    e_ns: float
    ex_e: float
    p_sw: float


@dataclass(frozen=True)
class OperatingPoints:
    reset: PulseSpec = PulseSpec(-0.8, 4.33e-9)
    write_bias: float = 1.2
    # Write slot reserved in the bit period: the q = 0.99 width, or the
    # q = 0.5 width once BMS caps q at one half.
    write_width_max_full: float = 2.73e-9
    write_width_max_bms: float = 1.49e-9
    read: PulseSpec = PulseSpec(-0.1, 2e-9)

    def write_width_max(self, policy: Policy) -> float:
        if policy is Policy.SR_BMS:
            return self.write_width_max_bms
        return self.write_width_max_full


def write_energy(pulse: PulseSpec, tr: Transition, params: DeviceParams) -> EnergyBreakdown:
    """Expected energy of one write attempt.

    If the device switches at t_sw it carries source-state current until
    t_sw and destination-state current afterwards; otherwise it carries
    source-state current for the whole pulse.  t_sw is replaced by its
    conditional mean.
    """
    dist = switching_distribution(pulse.bias, tr, params)
    v2 = pulse.bias * pulse.bias
    w = pulse.width
    if w == 0:
        return EnergyBreakdown(0.0, 0.0, 0.0, 0.0)
    r_src = resistance(params, tr.source)
    r_dst = resistance(params, tr.destination)
    p = dist.probability(w)
    e_ns = v2 * w / r_src
    if p > 0:
        ex_t = dist.expected_time(w)
        e_sw = v2 * (ex_t / r_src + (w - ex_t) / r_dst)
    else:
        e_sw = e_ns
    ex_e = p * e_sw + (1.0 - p) * e_ns
    return EnergyBreakdown(e_sw=e_sw, e_ns=e_ns, ex_e=ex_e, p_sw=p)


def read_energy(read: PulseSpec, state: MtjState, params: DeviceParams) -> float:
    return read.bias * read.bias * read.width / resistance(params, state)


def reset_energy(ops: OperatingPoints, params: DeviceParams) -> EnergyBreakdown:
    """Expected cost of the P->AP reset pulse applied to a P device."""
    return write_energy(ops.reset, Transition.P_TO_AP, params)


@lru_cache(maxsize=8192)
def _write_for_q(q: float, write_bias: float, params: DeviceParams) -> tuple[float, EnergyBreakdown]:
    dist = switching_distribution(write_bias, Transition.AP_TO_P, params)
    width = dist.width_for_probability(q)
    return width, write_energy(PulseSpec(write_bias, width), Transition.AP_TO_P, params)


def write_for_probability(
    q: float, ops: OperatingPoints, params: DeviceParams
) -> tuple[float, EnergyBreakdown]:
    """Width and expected energy of the AP->P write that switches with probability q."""
    return _write_for_q(float(q), float(ops.write_bias), params)


@dataclass(frozen=True)
class BitEnergy:
    """Expected per-bit energy split into its three pulses.

    ``state_p`` is the stationary probability that a cycle starts with the
    device in P.  ``p_one`` is the probability that the raw device bit is 1
    (before any BMS inversion).
    """

    q: float
    inverted: bool
    write_width: float
    state_p: float
    p_one: float
    reset: float
    write: float
    read: float

    @property
    def total(self) -> float:
        return self.reset + self.write + self.read

    @property
    def decoded_value(self) -> float:
        return 1.0 - self.p_one if self.inverted else self.p_one


def bit_energy_terms(
    p: float, policy: Policy, ops: OperatingPoints, params: DeviceParams
) -> BitEnergy:
    """Stationary expectation of one reset / write / read cycle.

    The device state at the start of a cycle is a two-state Markov chain.
    With write probability s and reset-failure probability f, the chance of
    starting in P is s / (1 - f (1 - s)).  A failed reset leaves the device
    in P, so the write pulse then runs at P-state current and the bit is 0.
    With f = 0 this reduces to q * E_reset + E_write + E_read for the smart
    policies and E_reset + E_write + E_read for Normal.
    """
    if not (0.0 < p < 1.0):
        raise DomainError(f"p must lie strictly inside (0, 1), got {p!r}")
    q, inverted = plan_generation(p, policy)
    width, wr = write_for_probability(q, ops, params)
    rs = reset_energy(ops, params)
    s = wr.p_sw
    f = 1.0 - rs.p_sw
    state_p = s / (1.0 - f * (1.0 - s))
    stuck = state_p * f  # cycles whose reset failed
    live = 1.0 - stuck  # cycles whose write starts from AP

    read_p = read_energy(ops.read, MtjState.P, params)
    read_ap = read_energy(ops.read, MtjState.AP, params)
    write_on_p = ops.write_bias ** 2 * width / resistance(params, MtjState.P)
    reset_rate = state_p if policy.smart_reset else 1.0
    return BitEnergy(
        q=q,
        inverted=inverted,
        write_width=width,
        state_p=state_p,
        p_one=live * (1.0 - s),
        reset=reset_rate * rs.ex_e,
        write=live * wr.ex_e + stuck * write_on_p,
        read=live * (s * read_p + (1.0 - s) * read_ap) + stuck * read_p,
    )


def expected_bit_energy(
    p: float, policy: Policy, ops: OperatingPoints, params: DeviceParams
) -> float:
    """Steady-state expected energy to emit one bit of the SN ``p``."""
    return bit_energy_terms(p, policy, ops, params).total


def expected_decoded_value(
    p: float, policy: Policy, ops: OperatingPoints, params: DeviceParams
) -> float:
    """Mean decoded value of a long stream; below ``p`` by reset failures only."""
    return bit_energy_terms(p, policy, ops, params).decoded_value


def average_grid(n_points: int = AVERAGE_GRID_POINTS) -> np.ndarray:
    """Uniform interior grid of (0, 1): i / (n + 1) for i = 1..n."""
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    return np.arange(1, n_points + 1) / (n_points + 1)


def figure_grid() -> np.ndarray:
    """p = 0.01, 0.02, ..., 0.99: the range the per-bit curves are reported on."""
    return np.arange(1, 100) / 100


def average_bit_energy(
    policy: Policy,
    ops: OperatingPoints,
    params: DeviceParams,
    n_points: int = AVERAGE_GRID_POINTS,
) -> float:
    """Mean of ``expected_bit_energy`` for p uniform on (0, 1)."""
    grid = average_grid(n_points)
    return float(np.mean([expected_bit_energy(float(p), policy, ops, params) for p in grid]))


def bit_period(policy: Policy, ops: OperatingPoints) -> float:
    return ops.reset.width + ops.write_width_max(policy) + ops.read.width


def savings_curve(
    policy_a: Policy,
    policy_b: Policy,
    grid: Iterable[float],
    ops: OperatingPoints,
    params: DeviceParams,
) -> list[tuple[float, float]]:
    """Pointwise fractional saving ``1 - E_b(p) / E_a(p)``."""
    out = []
    for p in grid:
        p = float(p)
        e_a = expected_bit_energy(p, policy_a, ops, params)
        e_b = expected_bit_energy(p, policy_b, ops, params)
        out.append((p, 1.0 - e_b / e_a))
    return out


def energy_range(
    policy: Policy, ops: OperatingPoints, params: DeviceParams, grid: Sequence[float] | None = None
) -> tuple[float, float]:
    grid = figure_grid() if grid is None else grid
    values = [expected_bit_energy(float(p), policy, ops, params) for p in grid]
    return min(values), max(values)
