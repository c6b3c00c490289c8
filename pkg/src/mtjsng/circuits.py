"""Stochastic logic over bitstreams and the MTJ-SNG multiplier.

The multiplier generates each operand on its own SNG substream, picks the
stream or its complement with a 2:1 mux, and ANDs the two:

    X = A' S_X + A S_X'        Y = B' S_Y + B S_Y'        Z = X AND Y

With the biased policy, an operand below one half is produced as its
complement, so its select line is 1.  Mux, inverter and gate energy are
not counted; the multiplier's energy is the two SNGs' energy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .device import DeviceParams
from .energy import OperatingPoints, average_bit_energy, bit_period, expected_bit_energy
from .errors import DomainError, InvariantViolation, LengthMismatch
from .policy import Policy
from .sng import GeneratedSN, SngConfig, generate_stream


@dataclass(frozen=True, eq=False)
class StochasticSignal:
    bits: np.ndarray
    nominal_value: float

    def __post_init__(self):
        if self.bits.size < 1:
            raise DomainError("a stochastic signal needs at least one bit")

    def __len__(self) -> int:
        return int(self.bits.size)

    @property
    def value(self) -> float:
        """Decoded value: fraction of ones."""
        return float(np.count_nonzero(self.bits)) / self.bits.size

    @classmethod
    def from_stream(cls, sn: GeneratedSN) -> "StochasticSignal":
        """Raw device output; its nominal value is the device-side SN."""
        p = sn.config.p_target if sn.config is not None else sn.decoded_value
        return cls(np.asarray(sn.bits, dtype=np.uint8), 1.0 - p if sn.inverted else p)


def invert(s: StochasticSignal) -> StochasticSignal:
    return StochasticSignal(np.uint8(1) - s.bits, 1.0 - s.nominal_value)


def and_gate(x: StochasticSignal, y: StochasticSignal) -> StochasticSignal:
    if x.bits.size != y.bits.size:
        raise LengthMismatch(f"cannot AND streams of length {x.bits.size} and {y.bits.size}")
    return StochasticSignal(x.bits & y.bits, x.nominal_value * y.nominal_value)


def mux2(a: StochasticSignal, a_bar: StochasticSignal, select: int) -> StochasticSignal:
    """2:1 mux fed with a stream and its complement."""
    if a.bits.size != a_bar.bits.size or np.any(a.bits == a_bar.bits):
        raise InvariantViolation("mux inputs must be a stream and its bitwise complement")
    if select not in (0, 1):
        raise DomainError(f"select must be 0 or 1, got {select!r}")
    return a_bar if select else a


def select_bit_for(p: float) -> int:
    """MSB of the binary fraction is 0 exactly when p < 0.5; select is its complement."""
    return 1 if p < 0.5 else 0


@dataclass
class MultiplierResult:
    product_bits: np.ndarray
    estimate: float
    expected_product: float
    total_energy: float
    total_time: float
    select_x: int
    select_y: int
    streams: tuple[GeneratedSN, GeneratedSN]


def multiply(
    p1: float,
    p2: float,
    n: int,
    policy: Policy,
    seed: int,
    ops: Optional[OperatingPoints] = None,
    params: Optional[DeviceParams] = None,
) -> MultiplierResult:
    """Multiply two values with a pair of MTJ-SNGs on substreams 0 and 1.

    Only the biased policy inverts on the device, so only there do the
    select lines follow the operands; for Normal and Smart Reset both
    selects are 0 and the circuit degenerates to a plain AND.
    """
    ops = ops or OperatingPoints()
    params = params or DeviceParams()
    sn_a = generate_stream(SngConfig(p1, policy, n, seed, stream_id=0), ops, params)
    sn_b = generate_stream(SngConfig(p2, policy, n, seed, stream_id=1), ops, params)
    sel_x = select_bit_for(p1) if policy is Policy.SR_BMS else 0
    sel_y = select_bit_for(p2) if policy is Policy.SR_BMS else 0
    assert sel_x == int(sn_a.inverted) and sel_y == int(sn_b.inverted)

    a = StochasticSignal.from_stream(sn_a)
    b = StochasticSignal.from_stream(sn_b)
    x = mux2(a, invert(a), sel_x)
    y = mux2(b, invert(b), sel_y)
    z = and_gate(x, y)
    return MultiplierResult(
        product_bits=z.bits,
        estimate=z.value,
        expected_product=p1 * p2,
        total_energy=math.fsum(sn_a.energy_per_bit) + math.fsum(sn_b.energy_per_bit),
        total_time=n * bit_period(policy, ops),
        select_x=sel_x,
        select_y=sel_y,
        streams=(sn_a, sn_b),
    )


def multiplier_average_energy(policy: Policy, ops: OperatingPoints, params: DeviceParams) -> float:
    """Expected energy per product bit with both operands uniform on (0, 1)."""
    return 2.0 * average_bit_energy(policy, ops, params)


@dataclass(frozen=True)
class PrecisionRow:
    precision: int
    n_bits: int
    policy: Policy
    # n * (mean multiplier energy per bit) over uniform operands.
    average_energy: float
    # n * (E(p1) + E(p2)) for the operands the sweep was asked about.
    pair_energy: float


def precision_sweep(
    p1: float,
    p2: float,
    precisions: Iterable[int],
    policies: Sequence[Policy],
    ops: Optional[OperatingPoints] = None,
    params: Optional[DeviceParams] = None,
) -> list[PrecisionRow]:
    """Multiplication energy at b-bit precision, i.e. n = 2**b bits per operand."""
    ops = ops or OperatingPoints()
    params = params or DeviceParams()
    avg = {pol: multiplier_average_energy(pol, ops, params) for pol in policies}
    pair = {}
    for pol in policies:
        pair[pol] = sum(
            expected_bit_energy(v, pol, ops, params) if 0.0 < v < 1.0 else _edge_energy(v, pol, ops, params)
            for v in (p1, p2)
        )
    rows = []
    for b in precisions:
        if b < 1:
            raise DomainError(f"precision must be >= 1 bit, got {b!r}")
        n = 2 ** b
        for pol in policies:
            rows.append(PrecisionRow(b, n, pol, n * avg[pol], n * pair[pol]))
    return rows


def _edge_energy(v: float, policy: Policy, ops: OperatingPoints, params: DeviceParams) -> float:
    # p = 0 or 1 has no finite-width analytic point; estimate from a short run.
    if not (0.0 <= v <= 1.0):
        raise DomainError(f"operand must lie in [0, 1], got {v!r}")
    sn = generate_stream(SngConfig(v, policy, 4096, seed=0), ops, params)
    return float(np.mean(sn.energy_per_bit))
