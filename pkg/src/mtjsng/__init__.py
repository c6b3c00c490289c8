"""Simulation of stochastic-number generation with magnetic tunnel junctions.

Layers, bottom up: ``device`` (switching statistics), ``energy`` (pulse and
per-bit energy), ``sng`` (bitstream generation), ``circuits`` (stochastic
logic and the multiplier), ``cli`` (reports).
"""
__version__ = "0.1.0"

from .device import (
    DEFAULT_TMR,
    DeviceParams,
    MtjState,
    PulseSpec,
    SwitchingStats,
    Transition,
    expected_switching_time,
    pulse_width_for_probability,
    switching_pdf_unnormalized,
    switching_probability,
    switching_stats,
)
from .energy import (
    BitEnergy,
    EnergyBreakdown,
    OperatingPoints,
    average_bit_energy,
    bit_energy_terms,
    bit_period,
    expected_bit_energy,
    read_energy,
    reset_energy,
    write_energy,
)
from .policy import Policy, plan_generation
from .sng import GeneratedSN, SngConfig, generate_bit, generate_stream, read_dump, write_dump
from .circuits import StochasticSignal, and_gate, invert, multiply, mux2
from .calibration import calibrate
from .errors import (
    ConfigError,
    DomainError,
    InvariantViolation,
    LengthMismatch,
    MtjSngError,
    NoBracket,
    NumericalError,
    ParameterError,
    QuadratureFailure,
    SubcriticalDrive,
    UndefinedConditional,
)

__all__ = [name for name in dir() if not name.startswith("_")]
