"""Command-line front end: curve sweeps, table reproductions, calibration.

    mtjsng curve-psw     --biases 0.8 1.0 1.2 --out out/
    mtjsng curve-energy  --bias 1.2
    mtjsng curve-perbit  --policy normal --policy srbms
    mtjsng table1
    mtjsng table2        --p1 0.7 --p2 0.2
    mtjsng multiply      --p1 0.7 --p2 0.2 --n 4096 --policy srbms --seed 3
    mtjsng calibrate

Every command writes CSV files plus ``manifest.json`` into ``--out``.  A
YAML or JSON file given with ``--config`` supplies defaults; flags win.

Exit codes: 0 success, 2 configuration error, 3 subcritical drive,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import platform
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from . import __version__
from .calibration import calibrate
from .circuits import multiplier_average_energy, multiply, precision_sweep
from .device import DeviceParams, PulseSpec, Transition, switching_distribution
from .energy import (
    AVERAGE_GRID_POINTS,
    OperatingPoints,
    average_bit_energy,
    average_grid,
    bit_period,
    energy_range,
    expected_bit_energy,
    savings_curve,
    write_energy,
)
from .errors import ConfigError, MtjSngError, NumericalError, SubcriticalDrive
from .policy import Policy
from .sng import BitstreamRecord, record_for, write_records

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_NUMERICAL = 0, 2, 3, 4

COMMANDS = (
    "curve-psw",
    "curve-energy",
    "curve-perbit",
    "table1",
    "table2",
    "multiply",
    "calibrate",
)

# Reference values the tables are compared against.
REFERENCE_TABLE1 = {
    "time_per_bit_ns": {Policy.NORMAL: 9.06, Policy.SMART_RESET: 9.06, Policy.SR_BMS: 7.82},
    "energy_per_bit_min_pJ": {Policy.NORMAL: 0.65, Policy.SMART_RESET: 0.19, Policy.SR_BMS: 0.19},
    "energy_per_bit_max_pJ": {Policy.NORMAL: 1.16, Policy.SMART_RESET: 1.16, Policy.SR_BMS: 0.55},
    "avg_energy_per_bit_pJ": {Policy.NORMAL: 0.809, Policy.SMART_RESET: 0.579, Policy.SR_BMS: 0.372},
    "sng_avg_power_mW": {Policy.NORMAL: 0.107, Policy.SMART_RESET: 0.083, Policy.SR_BMS: 0.067},
    "multiplier_avg_power_mW": {Policy.NORMAL: 0.215, Policy.SMART_RESET: 0.166, Policy.SR_BMS: 0.135},
    "multiplier_avg_energy_pJ": {Policy.NORMAL: 1.95, Policy.SMART_RESET: 1.50, Policy.SR_BMS: 1.06},
}
REFERENCE_SAVINGS = {"energy_saving_min": 0.29, "energy_saving_max": 0.83, "energy_saving_avg": 0.54, "time_saving": 0.14}
REFERENCE_TABLE2_NJ = {
    8: {Policy.NORMAL: 0.50, Policy.SMART_RESET: 0.38, Policy.SR_BMS: 0.27},
    9: {Policy.NORMAL: 1.00, Policy.SMART_RESET: 0.77, Policy.SR_BMS: 0.54},
    10: {Policy.NORMAL: 2.00, Policy.SMART_RESET: 1.54, Policy.SR_BMS: 1.09},
    11: {Policy.NORMAL: 3.99, Policy.SMART_RESET: 3.07, Policy.SR_BMS: 2.17},
    12: {Policy.NORMAL: 7.99, Policy.SMART_RESET: 6.14, Policy.SR_BMS: 4.34},
}
POWER_NOTE = "computed as avg energy / bit period; reference power is not consistent with that ratio"


# -- configuration ---------------------------------------------------------

OPERATING_KEYS = {
    "reset_bias_v",
    "reset_width_ns",
    "write_bias_v",
    "write_width_max_ns",
    "bms_write_width_max_ns",
    "read_bias_v",
    "read_width_ns",
}
SECTION_KEYS = {
    "grids": {"average_points", "perbit_points", "psw_points", "psw_width_max_ns", "energy_targets"},
    "curve_psw": {"biases", "transition"},
    "curve_energy": {"bias", "transition"},
    "table2": {"p1", "p2", "precisions"},
    "multiply": {"p1", "p2", "n"},
}
TOP_KEYS = {"command", "out", "seed", "policies", "device", "operating"} | set(SECTION_KEYS)


def _default_settings() -> dict[str, Any]:
    return {
        "command": None,
        "out": "out",
        "seed": 1,
        "policies": [p.value for p in Policy],
        "device": {},
        "operating": {},
        "grids": {
            "average_points": AVERAGE_GRID_POINTS,
            "perbit_points": 99,
            "psw_points": 201,
            "psw_width_max_ns": 5.0,
            "energy_targets": [round(0.01 * i, 2) for i in range(1, 100)] + [0.999],
        },
        "curve_psw": {"biases": [0.8, 1.0, 1.2, 1.4], "transition": "APtoP"},
        "curve_energy": {"bias": 1.2, "transition": "APtoP"},
        "table2": {"p1": 0.7, "p2": 0.2, "precisions": [8, 9, 10, 11, 12]},
        "multiply": {"p1": 0.7, "p2": 0.2, "n": 4096},
    }


@dataclass
class RunConfig:
    command: str
    out: Path
    seed: int
    policies: list[Policy]
    params: DeviceParams
    ops: OperatingPoints
    grids: dict[str, Any]
    sections: dict[str, dict[str, Any]]
    raw: dict[str, Any] = field(repr=False, default_factory=dict)


def load_config_file(path: Path) -> dict[str, Any]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        if Path(path).suffix.lower() in (".yaml", ".yml"):
            import yaml

            data = yaml.safe_load(text)
        else:
            data = json.loads(text)
    except Exception as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    return data


def _merge(settings: dict[str, Any], overrides: dict[str, Any], where: str = "") -> None:
    for key, value in overrides.items():
        if where == "":
            if key not in TOP_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
        if isinstance(value, dict) and isinstance(settings.get(key), dict):
            allowed = _allowed_keys(key) if where == "" else None
            if allowed is not None:
                unknown = set(value) - allowed
                if unknown:
                    raise ConfigError(f"unknown key(s) in {key!r}: {sorted(unknown)}")
            settings[key].update(value)
        else:
            settings[key] = value


def _allowed_keys(section: str) -> Optional[set]:
    if section == "device":
        return set(DeviceParams().lab_units())
    if section == "operating":
        return OPERATING_KEYS
    return SECTION_KEYS.get(section)


def _build_ops(op: dict[str, Any]) -> OperatingPoints:
    d = OperatingPoints()
    ns = 1e-9
    return OperatingPoints(
        reset=PulseSpec(float(op.get("reset_bias_v", d.reset.bias)), float(op.get("reset_width_ns", d.reset.width / ns)) * ns),
        write_bias=float(op.get("write_bias_v", d.write_bias)),
        write_width_max_full=float(op.get("write_width_max_ns", d.write_width_max_full / ns)) * ns,
        write_width_max_bms=float(op.get("bms_write_width_max_ns", d.write_width_max_bms / ns)) * ns,
        read=PulseSpec(float(op.get("read_bias_v", d.read.bias)), float(op.get("read_width_ns", d.read.width / ns)) * ns),
    )


def _check_probability(name: str, value: Any, open_interval: bool = False) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}") from None
    ok = 0.0 < v < 1.0 if open_interval else 0.0 <= v <= 1.0
    if not ok:
        raise ConfigError(f"{name} must lie in {'(0, 1)' if open_interval else '[0, 1]'}, got {v!r}")
    return v


def build_run_config(file_settings: dict[str, Any], flag_settings: dict[str, Any]) -> RunConfig:
    """Merge defaults, file and flags, then validate everything up front."""
    settings = _default_settings()
    _merge(settings, copy.deepcopy(file_settings))
    _merge(settings, flag_settings)

    command = settings["command"]
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {', '.join(COMMANDS)}; got {command!r}")
    try:
        params = DeviceParams.from_lab_units(**{**DeviceParams().lab_units(), **settings["device"]})
        ops = _build_ops(settings["operating"])
        policies = [Policy.parse(p) for p in settings["policies"]]
        seed = int(settings["seed"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if not policies:
        raise ConfigError("at least one policy is required")
    if seed < 0 or seed >= 2**64:
        raise ConfigError("seed must be a 64-bit nonnegative integer")

    grids = settings["grids"]
    for key in ("average_points", "perbit_points", "psw_points"):
        if int(grids[key]) < 1:
            raise ConfigError(f"grids.{key} must be >= 1")
    if not float(grids["psw_width_max_ns"]) > 0:
        raise ConfigError("grids.psw_width_max_ns must be positive")
    for q in grids["energy_targets"]:
        _check_probability("grids.energy_targets entry", q, open_interval=True)
    for name in ("curve_psw", "curve_energy"):
        try:
            Transition(settings[name]["transition"])
        except ValueError:
            raise ConfigError(f"{name}.transition must be PtoAP or APtoP") from None
    _check_probability("table2.p1", settings["table2"]["p1"])
    _check_probability("table2.p2", settings["table2"]["p2"])
    if any(int(b) < 1 for b in settings["table2"]["precisions"]):
        raise ConfigError("table2.precisions must be >= 1")
    _check_probability("multiply.p1", settings["multiply"]["p1"])
    _check_probability("multiply.p2", settings["multiply"]["p2"])
    if int(settings["multiply"]["n"]) < 1:
        raise ConfigError("multiply.n must be >= 1")

    return RunConfig(
        command=command,
        out=Path(settings["out"]),
        seed=seed,
        policies=policies,
        params=params,
        ops=ops,
        grids=grids,
        sections={k: settings[k] for k in SECTION_KEYS},
        raw=settings,
    )


# -- output helpers --------------------------------------------------------


def fmt(x: Any) -> str:
    if isinstance(x, bool) or x is None:
        return "" if x is None else str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))  # shortest exact round trip
    if isinstance(x, Policy):
        return x.value
    return str(x)


def csv_text(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def rel_dev(computed: float, ref: float) -> float:
    return (computed - ref) / ref


@dataclass
class Outputs:
    files: dict[str, bytes] = field(default_factory=dict)
    console: list[str] = field(default_factory=list)
    extra_manifest: dict[str, Any] = field(default_factory=dict)

    def csv(self, name: str, header: list[str], rows: list[list[Any]]) -> None:
        self.files[name] = csv_text(header, rows).encode()


# -- commands --------------------------------------------------------------


def _biases_supercritical(biases: list[float], tr: Transition, params: DeviceParams) -> None:
    for v in biases:
        switching_distribution(v, tr, params)


def cmd_curve_psw(cfg: RunConfig) -> Outputs:
    sec = cfg.sections["curve_psw"]
    tr = Transition(sec["transition"])
    biases = sorted(float(v) for v in sec["biases"])
    _biases_supercritical(biases, tr, cfg.params)
    widths = np.linspace(0.0, float(cfg.grids["psw_width_max_ns"]), int(cfg.grids["psw_points"]))
    out = Outputs()
    rows = []
    for v in biases:
        dist = switching_distribution(v, tr, cfg.params)
        for w in widths:
            rows.append([v, w, dist.probability(w * 1e-9)])
        w99 = dist.width_for_probability(0.99)
        out.console.append(f"bias {v:+.3f} V: width for p_sw = 0.99 is {w99 * 1e9:.4f} ns")
    out.csv("psw.csv", ["bias_V", "width_ns", "p_sw"], rows)
    return out


def cmd_curve_energy(cfg: RunConfig) -> Outputs:
    sec = cfg.sections["curve_energy"]
    tr = Transition(sec["transition"])
    bias = float(sec["bias"])
    dist = switching_distribution(bias, tr, cfg.params)
    rows = []
    for q in cfg.grids["energy_targets"]:
        w = dist.width_for_probability(float(q))
        e = write_energy(PulseSpec(bias, w), tr, cfg.params)
        rows.append([float(q), w * 1e9, e.ex_e * 1e12])
    out = Outputs()
    out.csv("energy.csv", ["p_sw_target", "width_ns", "ex_e_pJ"], rows)
    return out


def cmd_curve_perbit(cfg: RunConfig) -> Outputs:
    grid = average_grid(int(cfg.grids["perbit_points"]))
    rows = []
    for p in grid:
        for pol in cfg.policies:
            rows.append([float(p), pol, expected_bit_energy(float(p), pol, cfg.ops, cfg.params) * 1e12])
    out = Outputs()
    out.csv("perbit.csv", ["p", "policy", "energy_pJ"], rows)
    out.extra_manifest["perbit_grid_points"] = len(grid)
    return out


def table1_rows(cfg: RunConfig) -> list[list[Any]]:
    n_avg = int(cfg.grids["average_points"])
    fig_grid = average_grid(int(cfg.grids["perbit_points"]))
    rows = []
    for pol in Policy:
        period = bit_period(pol, cfg.ops)
        lo, hi = energy_range(pol, cfg.ops, cfg.params, fig_grid)
        avg = average_bit_energy(pol, cfg.ops, cfg.params, n_avg)
        mult = multiplier_average_energy(pol, cfg.ops, cfg.params) if n_avg == AVERAGE_GRID_POINTS else 2 * avg
        computed = {
            "time_per_bit_ns": period * 1e9,
            "energy_per_bit_min_pJ": lo * 1e12,
            "energy_per_bit_max_pJ": hi * 1e12,
            "avg_energy_per_bit_pJ": avg * 1e12,
            "sng_avg_power_mW": avg / period * 1e3,
            "multiplier_avg_power_mW": mult / period * 1e3,
            "multiplier_avg_energy_pJ": mult * 1e12,
        }
        for key, value in computed.items():
            ref = REFERENCE_TABLE1[key][pol]
            note = POWER_NOTE if key.endswith("power_mW") else ""
            rows.append([key, pol, value, ref, rel_dev(value, ref), note])

    avg_curve = savings_curve(Policy.NORMAL, Policy.SR_BMS, average_grid(n_avg), cfg.ops, cfg.params)
    fig_curve = savings_curve(Policy.NORMAL, Policy.SR_BMS, fig_grid, cfg.ops, cfg.params)
    at_half = savings_curve(Policy.NORMAL, Policy.SR_BMS, [0.5], cfg.ops, cfg.params)[0][1]
    p_max, s_max = max(fig_curve, key=lambda r: r[1])
    savings = {
        "energy_saving_avg": (float(np.mean([s for _, s in avg_curve])), ""),
        "energy_saving_min": (at_half, "at p = 0.5"),
        "energy_saving_max": (s_max, f"argmax p = {p_max:g}"),
        "time_saving": (1 - bit_period(Policy.SR_BMS, cfg.ops) / bit_period(Policy.NORMAL, cfg.ops), ""),
    }
    for key, (value, note) in savings.items():
        ref = REFERENCE_SAVINGS[key]
        rows.append([key, Policy.SR_BMS, value, ref, rel_dev(value, ref), note])
    return rows


def cmd_table1(cfg: RunConfig) -> Outputs:
    rows = table1_rows(cfg)
    out = Outputs()
    out.csv("table1.csv", ["quantity", "policy", "computed", "reference", "rel_dev", "note"], rows)
    out.console.append(f"{'quantity':28s} {'policy':7s} {'computed':>10s} {'reference':>10s} {'dev':>8s}")
    for q, pol, c, p, d, note in rows:
        flag = " *" if note == POWER_NOTE else ""
        out.console.append(f"{q:28s} {pol.value:7s} {c:10.4f} {p:10.3f} {d:+8.1%}{flag}")
    out.console.append(f"* {POWER_NOTE}")
    out.extra_manifest["average_grid_points"] = int(cfg.grids["average_points"])
    return out


def cmd_table2(cfg: RunConfig) -> Outputs:
    sec = cfg.sections["table2"]
    rows = []
    sweep = precision_sweep(
        float(sec["p1"]), float(sec["p2"]), [int(b) for b in sec["precisions"]], list(Policy), cfg.ops, cfg.params
    )
    for r in sweep:
        ref = REFERENCE_TABLE2_NJ.get(r.precision, {}).get(r.policy)
        e_nj = r.average_energy * 1e9
        rows.append(
            [r.precision, r.n_bits, r.policy, e_nj, ref, rel_dev(e_nj, ref) if ref else None, r.pair_energy * 1e9]
        )
    out = Outputs()
    out.csv(
        "table2.csv",
        ["precision_bits", "n_bits", "policy", "energy_nJ", "reference_nJ", "rel_dev", "pair_energy_nJ"],
        rows,
    )
    for row in rows:
        ref = "" if row[4] is None else f"{row[4]:.2f}"
        out.console.append(f"{row[0]:3d}-bit {row[2].value:6s} {row[3]:8.4f} nJ  ref {ref}")
    return out


def cmd_multiply(cfg: RunConfig) -> Outputs:
    sec = cfg.sections["multiply"]
    if len(cfg.policies) != 1:
        raise ConfigError("multiply needs exactly one --policy")
    pol = cfg.policies[0]
    p1, p2, n = float(sec["p1"]), float(sec["p2"]), int(sec["n"])
    res = multiply(p1, p2, n, pol, cfg.seed, cfg.ops, cfg.params)
    ledger = math.fsum(math.fsum(s.energy_per_bit) for s in res.streams)
    records = [record_for(s) for s in res.streams]
    records.append(
        BitstreamRecord(
            {
                "kind": "product",
                "p_target": p1 * p2,
                "policy": pol.value,
                "seed": cfg.seed,
                "stream_id": None,
                "n_bits": n,
                "inverted": False,
            },
            res.product_bits,
        )
    )
    buf = io.BytesIO()
    write_records(buf, records)
    out = Outputs()
    out.files["multiply_bits.bin"] = buf.getvalue()
    header = ["p1", "p2", "n", "policy", "seed", "estimate", "expected", "energy_pJ", "ledger_energy_pJ", "time_ns", "select_x", "select_y"]
    row = [p1, p2, n, pol, cfg.seed, res.estimate, res.expected_product, res.total_energy * 1e12, ledger * 1e12,
           res.total_time * 1e9, res.select_x, res.select_y]
    out.csv("multiply.csv", header, [row])
    out.console.append(
        f"Z = {res.estimate:.6f} (expected {res.expected_product:.6f}), energy {res.total_energy * 1e12:.4f} pJ, "
        f"time {res.total_time * 1e9:.2f} ns, S_X={res.select_x} S_Y={res.select_y}"
    )
    return out


def cmd_calibrate(cfg: RunConfig) -> Outputs:
    rep = calibrate(cfg.params, cfg.ops)
    rows = [[r.name, r.computed * 1e12, r.target * 1e12, r.relative, r.within_tolerance] for r in rep.residuals]
    for name, computed, ref in (
        ("width_q0.5_1.2V_ns", rep.width_q50 * 1e9, 1.49),
        ("width_q0.99_1.2V_ns", rep.width_q99 * 1e9, 2.73),
    ):
        d = rel_dev(computed, ref)
        rows.append([name, computed, ref, d, abs(d) <= 0.10])
    out = Outputs()
    out.csv("calibration.csv", ["target", "computed", "reference", "residual_rel", "within_10pct"], rows)
    out.files["calibration.json"] = (
        json.dumps({"tmr": rep.tmr, "objective": rep.objective, "evaluations": rep.evaluations}, indent=2, sort_keys=True)
        + "\n"
    ).encode()
    out.console.append(f"fitted tmr = {rep.tmr!r}")
    for name, computed, ref, d, ok in rows:
        out.console.append(f"{name:30s} {computed:9.4f} vs {ref:6.3f}  residual {d:+.2%}{'' if ok else '  OUTSIDE 10%'}")
    out.extra_manifest["fitted_tmr"] = rep.tmr
    return out


HANDLERS: dict[str, Callable[[RunConfig], Outputs]] = {
    "curve-psw": cmd_curve_psw,
    "curve-energy": cmd_curve_energy,
    "curve-perbit": cmd_curve_perbit,
    "table1": cmd_table1,
    "table2": cmd_table2,
    "multiply": cmd_multiply,
    "calibrate": cmd_calibrate,
}


def manifest(cfg: RunConfig, out: Outputs) -> bytes:
    data = {
        "command": cfg.command,
        "version": __version__,
        "seed": cfg.seed,
        "policies": [p.value for p in cfg.policies],
        "device": cfg.params.lab_units(),
        "operating": {k: (asdict(v) if hasattr(v, "__dataclass_fields__") else v) for k, v in asdict(cfg.ops).items()},
        "grids": cfg.grids,
        "sections": cfg.sections,
        "outputs": sorted(out.files),
        "python": platform.python_version(),
        "numpy": np.__version__,
        **out.extra_manifest,
    }
    return (json.dumps(data, indent=2, sort_keys=True) + "\n").encode()


def run(cfg: RunConfig) -> Outputs:
    """Compute all outputs in memory; nothing touches disk here."""
    out = HANDLERS[cfg.command](cfg)
    out.files["manifest.json"] = manifest(cfg, out)
    return out


def write_outputs(directory: Path, out: Outputs) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for name, data in out.files.items():
        (directory / name).write_bytes(data)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mtjsng", description=__doc__.split("\n")[0])
    ap.add_argument("command", nargs="?", choices=COMMANDS, help="command (may also come from the config file)")
    ap.add_argument("--config", type=Path, help="YAML or JSON run configuration")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--policy", action="append", help="normal, sr or srbms (repeatable)")
    ap.add_argument("--tmr", type=float, help="override the device TMR ratio")
    ap.add_argument("--biases", type=float, nargs="+", help="curve-psw biases in V")
    ap.add_argument("--transition", choices=[t.value for t in Transition])
    ap.add_argument("--bias", type=float, help="curve-energy bias in V")
    ap.add_argument("--p1", type=float)
    ap.add_argument("--p2", type=float)
    ap.add_argument("--n", type=int, help="multiply: bits per operand")
    ap.add_argument("--average-points", type=int)
    ap.add_argument("-q", "--quiet", action="store_true")
    return ap


def flags_to_settings(args: argparse.Namespace) -> dict[str, Any]:
    s: dict[str, Any] = {}
    if args.command:
        s["command"] = args.command
    if args.out is not None:
        s["out"] = args.out
    if args.seed is not None:
        s["seed"] = args.seed
    if args.policy:
        s["policies"] = args.policy
    if args.tmr is not None:
        s["device"] = {"tmr": args.tmr}
    if args.average_points is not None:
        s["grids"] = {"average_points": args.average_points}
    cmd = args.command
    if args.biases is not None:
        s["curve_psw"] = {"biases": args.biases}
    if args.transition is not None:
        key = "curve_energy" if cmd == "curve-energy" else "curve_psw"
        s.setdefault(key, {})["transition"] = args.transition
    if args.bias is not None:
        s["curve_energy"] = {**s.get("curve_energy", {}), "bias": args.bias}
    for name in ("p1", "p2"):
        v = getattr(args, name)
        if v is not None:
            key = "table2" if cmd == "table2" else "multiply"
            s.setdefault(key, {})[name] = v
    if args.n is not None:
        s.setdefault("multiply", {})["n"] = args.n
    return s


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_settings = load_config_file(args.config) if args.config else {}
        cfg = build_run_config(file_settings, flags_to_settings(args))
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        out = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SubcriticalDrive as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except MtjSngError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    write_outputs(cfg.out, out)
    if not args.quiet:
        for line in out.console:
            print(line)
        print(f"wrote {', '.join(sorted(out.files))} to {cfg.out}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
