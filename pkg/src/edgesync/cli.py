"""Command-line front end: config files, scenario runs, artifact emission.

Config files are flat ``key = value`` text with INI-style sections (graph /
plant / controller / reference / sim / output / analysis); numeric arrays
are comma lists, weight and reference descriptors are space-separated
records.  Emitted artifacts: ``timeseries.csv`` (full-precision sampled
series), ``pe_report.csv`` (one excitation margin per window),
``summary.txt`` (tail bounds and recovery), and optional SVG line plots.

Exit codes: 0 success, 1 property failure (excitation not certified),
2 usage or config error, 3 numerical divergence.
"""
from __future__ import annotations

import argparse
import configparser
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import plots
from .analysis import PEReport, pe_margin, recover_topology, udpe_margin, ultimate_bound
from .controller import ESTIMATE_AND_SYNC, ESTIMATE_ONLY, ControllerConfig, PEReference
from .numerics import DivergenceError
from .plant import EdgeWeight, InternalDynamics, WeightTrajectory
from .sim import Scenario, SimulationRecord, benchmark_scenario, simulate

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_USAGE = 2
EXIT_DIVERGED = 3

ENV_OUT = "EDGESYNC_OUT"


class ConfigError(ValueError):
    """A config file is missing, malformed, or inconsistent."""


@dataclass(frozen=True)
class RunConfig:
    """A Scenario plus output and analysis options, as read from a file."""

    scenario: Scenario
    out_dir: str = "out"
    emit_svg: bool = True
    csv_decimation: int = 1
    pe_window: float = 4.0
    pe_stride: Optional[float] = None
    pe_floor: float = 1e-3
    recover_threshold: float = 0.1


_SECTIONS = ("graph", "plant", "controller", "reference", "sim", "output", "analysis")
_KEYS = {
    "graph": {"n"},
    "plant": {"dynamics"},  # plus weight_<k> entries, validated separately
    "controller": {"mode", "c", "c1", "c2", "sigma1", "kappa"},
    "reference": None,  # node_<i> entries
    "sim": {"dt", "t_end", "sample_every", "x0", "w_hat0", "z_hat0"},
    "output": {"out_dir", "emit_svg", "csv_decimation"},
    "analysis": {"pe_window", "pe_stride", "pe_floor", "recover_threshold"},
}


def _floats(text: str) -> list[float]:
    items = [p.strip() for p in text.split(",") if p.strip()]
    try:
        return [float(p) for p in items]
    except ValueError as exc:
        raise ConfigError(f"expected a comma list of numbers, got {text!r}") from exc


def _parse_weight(text: str, key: str) -> EdgeWeight:
    parts = text.split()
    kind = parts[0] if parts else ""
    try:
        if kind == "const" and len(parts) == 2:
            return EdgeWeight("const", float(parts[1]))
        if kind in ("sin", "cos") and len(parts) in (4, 5):
            base, amp, omega = (float(p) for p in parts[1:4])
            phase = float(parts[4]) if len(parts) == 5 else 0.0
            return EdgeWeight(kind, base, amp, omega, phase)
    except ValueError:
        pass
    raise ConfigError(
        f"bad weight descriptor {key} = {text!r} "
        "(use 'const V' or 'sin|cos BASE AMP OMEGA [PHASE]')"
    )


def _parse_dynamics(text: str, n: int) -> InternalDynamics:
    parts = text.split()
    if len(parts) == 2 and parts[0] in ("linear", "tanh"):
        try:
            gain = float(parts[1])
        except ValueError:
            raise ConfigError(f"bad dynamics gain in {text!r}") from None
        if parts[0] == "linear":
            return InternalDynamics.linear(n, gain)
        return InternalDynamics.saturating(n, gain)
    raise ConfigError(f"bad dynamics {text!r} (use 'linear SLOPE' or 'tanh GAIN')")


def _parse_reference(section, n: int) -> PEReference:
    nodes = []
    for i in range(1, n + 1):
        key = f"node_{i}"
        if key not in section:
            raise ConfigError(f"[reference] is missing {key}")
        vals = [float(p) for p in section[key].split()]
        if len(vals) == 0 or len(vals) % 3 != 0:
            raise ConfigError(f"[reference] {key} must hold (amp omega phase) triples")
        nodes.append(tuple(tuple(vals[j : j + 3]) for j in range(0, len(vals), 3)))
    extra = set(section) - {f"node_{i}" for i in range(1, n + 1)}
    if extra:
        raise ConfigError(f"unknown [reference] keys: {sorted(extra)}")
    return PEReference(tuple(nodes))


def parse_config(path) -> RunConfig:
    """Read and validate a run configuration file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(path.read_text(encoding="utf-8"))
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    unknown = set(cp.sections()) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    for sec, allowed in _KEYS.items():
        if allowed is None or sec not in cp:
            continue
        keys = set(cp[sec])
        if sec == "plant":
            keys = {k for k in keys if not k.startswith("weight_")}
        bad = keys - allowed
        if bad:
            raise ConfigError(f"unknown keys in [{sec}]: {sorted(bad)}")

    if "graph" not in cp or "n" not in cp["graph"]:
        raise ConfigError("config must set [graph] n")
    try:
        n = int(cp["graph"]["n"])
    except ValueError:
        raise ConfigError(f"[graph] n must be an integer, got {cp['graph']['n']!r}") from None
    m = n * (n - 1)

    plant_sec = cp["plant"] if "plant" in cp else {}
    dynamics = _parse_dynamics(plant_sec.get("dynamics", "linear 1.0"), n)
    edges = [EdgeWeight()] * m
    for key in plant_sec:
        if not key.startswith("weight_"):
            continue
        try:
            k = int(key.split("_", 1)[1])
        except ValueError:
            raise ConfigError(f"bad weight key {key!r}") from None
        if not 1 <= k <= m:
            raise ConfigError(f"{key} is out of range for {m} edges")
        edges[k - 1] = _parse_weight(plant_sec[key], key)
    weights = WeightTrajectory.from_edges(edges)

    csec = cp["controller"] if "controller" in cp else {}
    mode = csec.get("mode", ESTIMATE_ONLY)
    try:
        control = ControllerConfig(
            c=float(csec.get("c", 1.0)),
            c1=float(csec.get("c1", 2.0)),
            c2=float(csec.get("c2", 1.3)),
            sigma1=float(csec.get("sigma1", 0.0)),
            kappa=float(csec.get("kappa", 1.0)),
            mode=mode,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    reference = None
    if mode == ESTIMATE_ONLY:
        reference = _parse_reference(cp["reference"], n) if "reference" in cp else PEReference.default(n)
    elif "reference" in cp:
        raise ConfigError("[reference] only applies to estimate_only mode")

    ssec = cp["sim"] if "sim" in cp else {}

    def _vec(key: str, size: int):
        if key not in ssec:
            return None
        vals = _floats(ssec[key])
        if len(vals) != size:
            raise ConfigError(f"[sim] {key} must list {size} values")
        return tuple(vals)

    try:
        scenario = Scenario(
            n=n,
            weights=weights,
            dynamics=dynamics,
            control=control,
            reference=reference,
            x0=_vec("x0", n),
            w_hat0=_vec("w_hat0", m),
            z_hat0=_vec("z_hat0", m),
            dt=float(ssec.get("dt", 1e-3)),
            t_end=float(ssec.get("t_end", 10.0)),
            sample_every=int(ssec.get("sample_every", 10)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    osec = cp["output"] if "output" in cp else {}
    asec = cp["analysis"] if "analysis" in cp else {}
    emit_svg = osec.get("emit_svg", "true").strip().lower()
    if emit_svg not in ("true", "false"):
        raise ConfigError(f"[output] emit_svg must be true or false, got {emit_svg!r}")
    stride_txt = asec.get("pe_stride", "").strip()
    try:
        return RunConfig(
            scenario=scenario,
            out_dir=osec.get("out_dir", "out"),
            emit_svg=emit_svg == "true",
            csv_decimation=int(osec.get("csv_decimation", 1)),
            pe_window=float(asec.get("pe_window", 4.0)),
            pe_stride=float(stride_txt) if stride_txt else None,
            pe_floor=float(asec.get("pe_floor", 1e-3)),
            recover_threshold=float(asec.get("recover_threshold", 0.1)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form; ``parse_config`` of the result reproduces ``cfg``."""
    sc = cfg.scenario
    lines = ["[graph]", f"n = {sc.n}", "", "[plant]"]
    dk = sc.dynamics.kinds[0]
    lines.append(f"dynamics = {dk} {sc.dynamics.gains[0]!r}")
    for k, e in enumerate(sc.weights.edges, start=1):
        if e.kind == "const":
            if e.base != 0.0:
                lines.append(f"weight_{k} = const {e.base!r}")
        else:
            lines.append(f"weight_{k} = {e.kind} {e.base!r} {e.amplitude!r} {e.omega!r} {e.phase!r}")
    lines += [
        "",
        "[controller]",
        f"mode = {sc.control.mode}",
        f"c = {sc.control.c!r}",
        f"c1 = {sc.control.c1!r}",
        f"c2 = {sc.control.c2!r}",
        f"sigma1 = {sc.control.sigma1!r}",
        f"kappa = {sc.control.kappa!r}",
    ]
    if sc.reference is not None:
        lines += ["", "[reference]"]
        for i, node in enumerate(sc.reference.terms, start=1):
            flat = " ".join(f"{a!r} {w!r} {p!r}" for (a, w, p) in node)
            lines.append(f"node_{i} = {flat}")
    lines += [
        "",
        "[sim]",
        f"dt = {sc.dt!r}",
        f"t_end = {sc.t_end!r}",
        f"sample_every = {sc.sample_every}",
    ]
    for key, vec in (("x0", sc.x0), ("w_hat0", sc.w_hat0), ("z_hat0", sc.z_hat0)):
        if vec is not None:
            lines.append(f"{key} = " + ", ".join(repr(v) for v in vec))
    lines += [
        "",
        "[output]",
        f"out_dir = {cfg.out_dir}",
        f"emit_svg = {'true' if cfg.emit_svg else 'false'}",
        f"csv_decimation = {cfg.csv_decimation}",
        "",
        "[analysis]",
        f"pe_window = {cfg.pe_window!r}",
    ]
    if cfg.pe_stride is not None:
        lines.append(f"pe_stride = {cfg.pe_stride!r}")
    lines += [
        f"pe_floor = {cfg.pe_floor!r}",
        f"recover_threshold = {cfg.recover_threshold!r}",
    ]
    return "\n".join(lines) + "\n"


def _g17(v: float) -> str:
    return f"{v:.17g}"


def _write_timeseries_csv(path: Path, record: SimulationRecord, decimation: int = 1) -> None:
    n = record.x.shape[1]
    m = record.w_hat.shape[1]
    header = (
        ["t"]
        + [f"x_{i}" for i in range(1, n + 1)]
        + [f"xhat_{i}" for i in range(1, n + 1)]
        + [f"what_{k}" for k in range(1, m + 1)]
        + [f"wtrue_{k}" for k in range(1, m + 1)]
        + ["norm_ztilde", "norm_wtilde", "norm_z", "V1"]
    )
    rows = range(0, record.times.size, max(1, decimation))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for i in rows:
            vals = (
                [record.times[i]]
                + list(record.x[i])
                + list(record.x_hat[i])
                + list(record.w_hat[i])
                + list(record.w_true[i])
                + [record.norm_z_tilde[i], record.norm_w_tilde[i], record.norm_z[i], record.v1[i]]
            )
            fh.write(",".join(_g17(v) for v in vals) + "\n")


def _write_pe_report_csv(path: Path, report: Optional[PEReport]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("window_start,lambda_min\n")
        if report is None:
            return
        for start, margin in zip(report.starts, report.margins):
            fh.write(f"{_g17(start)},{_g17(margin)}\n")


def _pe_report_for(record: SimulationRecord, cfg: RunConfig) -> Optional[PEReport]:
    span = float(record.times[-1] - record.times[0])
    if cfg.pe_window > span:
        return None
    if record.scenario.control.mode == ESTIMATE_ONLY:
        return pe_margin(record.times, record.z_hat, cfg.pe_window, cfg.pe_stride)
    return udpe_margin(
        record, record.model, cfg.pe_window, cfg.pe_stride, floor=cfg.pe_floor
    )


def _write_summary(path: Path, record: SimulationRecord, report: Optional[PEReport], threshold: float) -> None:
    sc = record.scenario
    t0 = 0.5 * sc.t_end
    sup_w = ultimate_bound(record.times, record.norm_w_tilde, t0)
    sup_z = ultimate_bound(record.times, record.norm_z, t0)
    rec = recover_topology(record.w_hat[-1], record.w_true[-1], threshold)
    lines = [
        f"n = {sc.n}",
        f"mode = {sc.control.mode}",
        f"t_end = {_g17(sc.t_end)}",
        f"dt = {_g17(sc.dt)}",
        f"sup_[{_g17(t0)},{_g17(sc.t_end)}] norm_wtilde = {_g17(sup_w)}",
        f"sup_[{_g17(t0)},{_g17(sc.t_end)}] norm_z = {_g17(sup_z)}",
        f"recovery threshold = {_g17(threshold)}",
        f"recovery precision = {_g17(rec.precision)}",
        f"recovery recall = {_g17(rec.recall)}",
        f"recovery predicted_edges = {len(rec.predicted)}",
        f"recovery actual_edges = {len(rec.actual)}",
    ]
    if report is None:
        lines.append("pe mu_hat = not computed (window exceeds horizon)")
    elif report.is_empty:
        lines.append("pe mu_hat = no qualifying window")
    else:
        lines.append(f"pe window = {_g17(report.window)}")
        lines.append(f"pe windows = {report.n_windows}")
        lines.append(f"pe mu_hat = {_g17(report.mu_hat)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _emit_svgs(out: Path, record: SimulationRecord) -> None:
    plots.write_line_plot(out / "weights.svg", record.times, record.w_hat,
                          "Estimated edge weights", "w_hat_k")
    plots.write_line_plot(out / "weight_errors.svg", record.times, record.w_tilde,
                          "Weight estimation errors", "wtilde_k")
    plots.write_line_plot(out / "sync_errors.svg", record.times, record.z,
                          "Synchronization errors (edge states)", "z_k")
    plots.write_line_plot(out / "ztilde.svg", record.times, record.z_tilde_tree,
                          "Tree tracking errors", "ztilde_T")


def _resolve_out(cli_out, cfg_out: str) -> Path:
    env = os.environ.get(ENV_OUT)
    if env:
        return Path(env)
    if cli_out is not None:
        return Path(cli_out)
    return Path(cfg_out)


def cmd_simulate(config_path, out_dir=None) -> int:
    """Run a configured scenario and emit all artifacts."""
    cfg = parse_config(config_path)
    out = _resolve_out(out_dir, cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    record = simulate(cfg.scenario)
    report = _pe_report_for(record, cfg)
    _write_timeseries_csv(out / "timeseries.csv", record, cfg.csv_decimation)
    _write_pe_report_csv(out / "pe_report.csv", report)
    _write_summary(out / "summary.txt", record, report, cfg.recover_threshold)
    if cfg.emit_svg:
        _emit_svgs(out, record)
    return EXIT_OK


def cmd_reproduce_paper(out_dir=None) -> int:
    """Run the built-in six-agent benchmark and emit all artifacts."""
    out = _resolve_out(out_dir, "out")
    out.mkdir(parents=True, exist_ok=True)
    scenario = benchmark_scenario()
    record = simulate(scenario)
    cfg = RunConfig(scenario=scenario)
    report = _pe_report_for(record, cfg)
    _write_timeseries_csv(out / "timeseries.csv", record)
    _write_pe_report_csv(out / "pe_report.csv", report)
    _write_summary(out / "summary.txt", record, report, cfg.recover_threshold)
    _emit_svgs(out, record)
    return EXIT_OK


def cmd_check_pe(config_path, window: float, stride=None, out_dir=None) -> int:
    """Run a scenario and certify its realized excitation level."""
    cfg = parse_config(config_path)
    span = cfg.scenario.t_end
    if window <= 0 or window > span:
        raise ConfigError(f"window {window} does not fit the horizon {span}")
    out = _resolve_out(out_dir, cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    record = simulate(cfg.scenario)
    if cfg.scenario.control.mode == ESTIMATE_ONLY:
        report = pe_margin(record.times, record.z_hat, window, stride)
    else:
        report = udpe_margin(record, record.model, window, stride, floor=cfg.pe_floor)
    _write_pe_report_csv(out / "pe_report.csv", report)
    certified = (not report.is_empty) and report.mu_hat > 0.0
    mu = "nan" if report.is_empty else _g17(report.mu_hat)
    print(f"windows={report.n_windows} mu_hat={mu} certified={certified}")
    return EXIT_OK if certified else EXIT_PROPERTY


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="edgesync",
        description="Adaptive topology estimation and synchronization simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a configured scenario")
    p_sim.add_argument("config", help="path to a run configuration file")
    p_sim.add_argument("--out", default=None, help="output directory (default: from config)")

    p_rep = sub.add_parser("reproduce-paper", help="run the built-in six-agent benchmark")
    p_rep.add_argument("--out", default=None, help="output directory (default: ./out)")

    p_pe = sub.add_parser("check-pe", help="certify persistency of excitation for a scenario")
    p_pe.add_argument("config", help="path to a run configuration file")
    p_pe.add_argument("--window", type=float, required=True, help="Gram window length (s)")
    p_pe.add_argument("--stride", type=float, default=None, help="window stride (default: window)")
    p_pe.add_argument("--out", default=None, help="output directory (default: from config)")

    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args.config, args.out)
        if args.command == "reproduce-paper":
            return cmd_reproduce_paper(args.out)
        return cmd_check_pe(args.config, args.window, args.stride, args.out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DivergenceError as exc:
        print(f"error: simulation diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
