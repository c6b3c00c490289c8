"""Seeded Monte Carlo of an MTJ cycled as a stochastic number generator.

Each bit is one reset / write / read cycle:

* reset: a P->AP pulse.  Normal fires it every cycle; Smart Reset fires it
  only when the device sits in P (the previous write switched).
* write: an AP->P pulse whose width gives switching probability q.
* read: non-perturbing; the emitted bit is 1 iff the device ends in AP.

Switching events are Bernoulli draws against the pulse's switching
probability; when a pulse switches, the instant is drawn from the
truncated switching-time density so the realised energy matches the
analytic expectation.  A reset can fail (about 0.1 % of the time), in which
case the write pulse hits a P device, changes nothing, and the bit is 0.

Under Normal the reset fires even when the device already sits in AP.  That
pulse is charged as a draw from the reset's switch/no-switch energy
distribution, the same cost the analytic model assigns to every Normal
reset; the state is left at AP.

Inversion for the biased policy is recorded as a flag only.  Decoding is the
consumer's job, as in hardware where the inverter sits after the device.
"""
from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import BinaryIO, Iterable, Optional, Union

import numpy as np

from .device import DeviceParams, MtjState, Transition, resistance, switching_distribution
from .energy import OperatingPoints, bit_period, write_for_probability
from .errors import DomainError
from .policy import Policy, plan_generation

# Per-bit uniforms: reset switch, reset instant, write switch, write instant.
DRAWS_PER_BIT = 4

_RESET_NONE, _RESET_SWITCH, _RESET_STAY = 0, 1, 2
_WRITE_STAY, _WRITE_SWITCH, _WRITE_ON_P = 0, 1, 2


def substream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Independent generator for ``(seed, stream_id)``.

    Distinct stream ids under one seed are spawned children of the same
    SeedSequence, which numpy guarantees to be statistically independent.
    """
    if stream_id < 0:
        raise ValueError("stream_id must be nonnegative")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream_id),))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class SngConfig:
    p_target: float
    policy: Policy
    n_bits: int
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0.0 <= self.p_target <= 1.0):
            raise DomainError(f"p_target must lie in [0, 1], got {self.p_target!r}")
        if self.n_bits < 1:
            raise DomainError("n_bits must be >= 1")
        if self.stream_id < 0:
            raise DomainError("stream_id must be >= 0")


@dataclass
class GeneratedSN:
    bits: np.ndarray
    inverted: bool
    energy_per_bit: np.ndarray
    total_time: float
    resets_fired: int
    config: Optional[SngConfig] = None
    # Sum of the per-pulse energies kept by the device automaton.
    total_energy: float = 0.0

    @property
    def n_bits(self) -> int:
        return int(self.bits.size)

    @property
    def decoded_value(self) -> float:
        frac = float(np.count_nonzero(self.bits)) / self.bits.size
        return 1.0 - frac if self.inverted else frac


@dataclass(frozen=True)
class BitOutcome:
    bit: int
    energy: float
    state: MtjState
    reset_fired: bool


class CyclePlan:
    """Pulse widths, probabilities and electrical constants for one (q, policy)."""

    def __init__(self, q: float, policy: Policy, ops: OperatingPoints, params: DeviceParams):
        if not (0.0 <= q <= 1.0):
            raise DomainError(f"write probability must lie in [0, 1], got {q!r}")
        self.q = q
        self.policy = policy
        self.ops = ops
        self.r_p = resistance(params, MtjState.P)
        self.r_ap = resistance(params, MtjState.AP)

        self.reset_dist = switching_distribution(ops.reset.bias, Transition.P_TO_AP, params)
        self.reset_width = ops.reset.width
        self.p_reset = self.reset_dist.probability(self.reset_width)
        self.v2_reset = ops.reset.bias ** 2

        self.write_dist = switching_distribution(ops.write_bias, Transition.AP_TO_P, params)
        if q <= 0.0:
            self.write_width = 0.0
        elif q >= 1.0:
            self.write_width = self.write_dist.t_inf
        else:
            self.write_width = write_for_probability(q, ops, params)[0]
        self.p_write = self.write_dist.probability(self.write_width) if self.write_width > 0 else 0.0
        self.v2_write = ops.write_bias ** 2

        self.read_energy_p = ops.read.bias ** 2 * ops.read.width / self.r_p
        self.read_energy_ap = ops.read.bias ** 2 * ops.read.width / self.r_ap

    def run(self, entry_is_p: bool, draws: np.ndarray):
        """Execute ``len(draws)`` cycles starting from the given state.

        Returns (bits, reset energies, write energies, read energies,
        reset-fired mask, final-state-is-P flag).
        """
        n = draws.shape[0]
        smart = self.policy.smart_reset
        p_reset, p_write = self.p_reset, self.p_write
        u_reset = draws[:, 0].tolist()
        u_write = draws[:, 2].tolist()
        reset_kind = bytearray(n)
        write_kind = bytearray(n)
        bits = bytearray(n)
        state_p = entry_is_p
        for i in range(n):
            if state_p or not smart:
                if u_reset[i] < p_reset:
                    reset_kind[i] = _RESET_SWITCH
                    state_p = False
                else:
                    reset_kind[i] = _RESET_STAY
            if state_p:
                write_kind[i] = _WRITE_ON_P
            elif u_write[i] < p_write:
                write_kind[i] = _WRITE_SWITCH
                state_p = True
            if not state_p:
                bits[i] = 1

        reset_kind = np.frombuffer(bytes(reset_kind), dtype=np.uint8)
        write_kind = np.frombuffer(bytes(write_kind), dtype=np.uint8)
        bit_arr = np.frombuffer(bytes(bits), dtype=np.uint8).copy()

        e_reset = np.zeros(n)
        fired = reset_kind != _RESET_NONE
        e_reset[reset_kind == _RESET_STAY] = self.v2_reset * self.reset_width / self.r_p
        sw = np.flatnonzero(reset_kind == _RESET_SWITCH)
        if sw.size:
            t = self.reset_dist.sample(draws[sw, 1], self.reset_width)
            e_reset[sw] = self.v2_reset * (t / self.r_p + (self.reset_width - t) / self.r_ap)

        w = self.write_width
        e_write = np.zeros(n)
        e_write[write_kind == _WRITE_STAY] = self.v2_write * w / self.r_ap
        e_write[write_kind == _WRITE_ON_P] = self.v2_write * w / self.r_p
        sw = np.flatnonzero(write_kind == _WRITE_SWITCH)
        if sw.size:
            t = self.write_dist.sample(draws[sw, 3], w)
            e_write[sw] = self.v2_write * (t / self.r_ap + (w - t) / self.r_p)

        e_read = np.where(bit_arr == 1, self.read_energy_ap, self.read_energy_p)
        return bit_arr, e_reset, e_write, e_read, fired, state_p


@lru_cache(maxsize=256)
def cycle_plan(q: float, policy: Policy, ops: OperatingPoints, params: DeviceParams) -> CyclePlan:
    return CyclePlan(q, policy, ops, params)


def generate_bit(
    state: MtjState,
    q: float,
    policy: Policy,
    rng: np.random.Generator,
    ops: Optional[OperatingPoints] = None,
    params: Optional[DeviceParams] = None,
) -> BitOutcome:
    """One reset / write / read cycle.  Consumes four uniforms from ``rng``."""
    plan = cycle_plan(float(q), policy, ops or OperatingPoints(), params or DeviceParams())
    draws = rng.random((1, DRAWS_PER_BIT))
    bits, e_r, e_w, e_rd, fired, final_p = plan.run(state is MtjState.P, draws)
    return BitOutcome(
        bit=int(bits[0]),
        energy=float(e_r[0] + e_w[0] + e_rd[0]),
        state=MtjState.P if final_p else MtjState.AP,
        reset_fired=bool(fired[0]),
    )


def generate_stream(
    cfg: SngConfig,
    ops: Optional[OperatingPoints] = None,
    params: Optional[DeviceParams] = None,
) -> GeneratedSN:
    """Generate ``cfg.n_bits`` bits starting from a freshly reset (AP) device."""
    ops = ops or OperatingPoints()
    params = params or DeviceParams()
    q, inverted = plan_generation(cfg.p_target, cfg.policy)
    plan = cycle_plan(float(q), cfg.policy, ops, params)
    rng = substream(cfg.seed, cfg.stream_id)
    draws = rng.random((cfg.n_bits, DRAWS_PER_BIT))
    bits, e_r, e_w, e_rd, fired, _ = plan.run(False, draws)
    energy = e_r + e_w + e_rd
    return GeneratedSN(
        bits=bits,
        inverted=inverted,
        energy_per_bit=energy,
        total_time=cfg.n_bits * bit_period(cfg.policy, ops),
        resets_fired=int(np.count_nonzero(fired)),
        config=cfg,
        total_energy=math.fsum(e_r) + math.fsum(e_w) + math.fsum(e_rd),
    )


@dataclass(frozen=True)
class StreamStats:
    decoded_value: float
    mean_energy: float
    energy_sem: float
    resets_per_bit: float
    lag1_autocorrelation: float
    # True when the raw bits are constant and the autocorrelation is undefined.
    degenerate: bool


def stream_statistics(sn: GeneratedSN) -> StreamStats:
    n = sn.bits.size
    if n == 0:
        raise DomainError("empty stream")
    x = sn.bits.astype(float)
    dx = x - x.mean()
    var = float(np.mean(dx * dx))
    if var == 0.0 or n < 2:
        lag1, degenerate = 0.0, True
    else:
        lag1, degenerate = float(np.mean(dx[:-1] * dx[1:]) / var), False
    e = sn.energy_per_bit
    sem = float(np.std(e, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return StreamStats(
        decoded_value=sn.decoded_value,
        mean_energy=float(np.mean(e)),
        energy_sem=sem,
        resets_per_bit=sn.resets_fired / n,
        lag1_autocorrelation=lag1,
        degenerate=degenerate,
    )


# -- bitstream dump --------------------------------------------------------
#
# File layout: MAGIC, then one record per stream:
#   uint32 little-endian header length L
#   L bytes of UTF-8 JSON header (sorted keys)
#   ceil(n_bits / 8) bytes of bits, 8 per byte, least significant bit first

MAGIC = b"MTJSN\x00\x01\n"
HEADER_KEYS = ("p_target", "policy", "seed", "stream_id", "n_bits", "inverted")


@dataclass(frozen=True)
class BitstreamRecord:
    header: dict
    bits: np.ndarray


def record_for(sn: GeneratedSN) -> BitstreamRecord:
    cfg = sn.config
    if cfg is None:
        raise ValueError("stream has no config; build the record header by hand")
    header = {
        "p_target": cfg.p_target,
        "policy": cfg.policy.value,
        "seed": cfg.seed,
        "stream_id": cfg.stream_id,
        "n_bits": sn.n_bits,
        "inverted": sn.inverted,
    }
    return BitstreamRecord(header, sn.bits)


def pack_bits(bits: np.ndarray) -> bytes:
    return np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little").tobytes()


def unpack_bits(data: bytes, n_bits: int) -> np.ndarray:
    arr = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    return arr[:n_bits].copy()


def write_records(fh: BinaryIO, records: Iterable[BitstreamRecord]) -> None:
    fh.write(MAGIC)
    for rec in records:
        missing = [k for k in HEADER_KEYS if k not in rec.header]
        if missing:
            raise ValueError(f"record header lacks {missing}")
        if rec.header["n_bits"] != len(rec.bits):
            raise ValueError("header n_bits disagrees with the bit count")
        head = json.dumps(rec.header, sort_keys=True, separators=(",", ":")).encode()
        fh.write(struct.pack("<I", len(head)))
        fh.write(head)
        fh.write(pack_bits(rec.bits))


def read_records(fh: BinaryIO) -> list[BitstreamRecord]:
    if fh.read(len(MAGIC)) != MAGIC:
        raise ValueError("not a bitstream dump (bad magic)")
    out = []
    while True:
        raw = fh.read(4)
        if not raw:
            return out
        if len(raw) != 4:
            raise ValueError("truncated record length")
        (size,) = struct.unpack("<I", raw)
        header = json.loads(fh.read(size).decode())
        n = int(header["n_bits"])
        payload = fh.read((n + 7) // 8)
        if len(payload) != (n + 7) // 8:
            raise ValueError("truncated bit payload")
        out.append(BitstreamRecord(header, unpack_bits(payload, n)))


def write_dump(path: Union[str, Path], records: Iterable[BitstreamRecord]) -> None:
    with open(path, "wb") as fh:
        write_records(fh, records)


def read_dump(path: Union[str, Path]) -> list[BitstreamRecord]:
    with open(path, "rb") as fh:
        return read_records(fh)
