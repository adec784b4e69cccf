"""Command-line driver.

    qeewitness gen-bath     --out bath.txt [--config run.json] [--seed N]
    qeewitness run-protocol --bath bath.txt --out trace.csv [--diagonal] [--threads N]
    qeewitness echo         --bath bath.txt --out echo.csv
    qeewitness noise        --out noise.csv
    qeewitness verify       [--inject-fault eq14-sign]

Exit status: 0 success, 2 validation error, 3 numerical or oracle failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import config as config_mod
from . import noise as noise_mod
from .errors import NumericalError, ValidationError
from .nvbath import ContactModel, build_bath, read_bath, write_bath
from .protocol import bath_qee_criterion, echo_trace, protocol_trace
from .verify import FAULTS, run_all

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


def _sidecar(out: Path, suffix: str) -> Path:
    return out.with_name(out.name + suffix)


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise ValidationError(f"cannot write {path}: {exc}") from exc


def _resolve_config(args) -> config_mod.RunConfig:
    cfg = config_mod.load(args.config) if args.config else config_mod.RunConfig()
    cfg = config_mod.apply_overrides(cfg, args.set or [])
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "threads", None) is not None:
        cfg = replace(cfg, threads=args.threads)
    if getattr(args, "diagonal", False):
        cfg = replace(cfg, grid=replace(cfg.grid, diagonal=True))
    return cfg


def _load_bath(path):
    try:
        return read_bath(path)
    except OSError as exc:
        raise ValidationError(f"cannot read bath file {path}: {exc}") from exc


def cmd_gen_bath(cfg, args) -> int:
    bath = build_bath(cfg.lattice, cfg.b_z, cfg.gamma_e, cfg.gamma_n, cfg.contact,
                      cfg.polarization.r_p, cfg.polarization.p_inner)
    out = Path(args.out)
    try:
        write_bath(out, bath)
    except OSError as exc:
        raise ValidationError(f"cannot write {out}: {exc}") from exc
    _write(_sidecar(out, ".config.json"), cfg.dumps())
    mags = np.linalg.norm(bath.couplings, axis=1)
    print(f"{len(bath)} spins, {int(np.count_nonzero(bath.polarization))} polarized")
    if len(bath):
        print(f"coupling |A| min {mags.min():.6g} max {mags.max():.6g} rad/us")
    return EXIT_OK


def cmd_run_protocol(cfg, args) -> int:
    bath = _load_bath(args.bath)
    trace = protocol_trace(bath, cfg.grid, workers=cfg.threads)
    out = Path(args.out)
    _write(out, trace.to_csv())
    transverse = float(np.max(np.hypot(bath.couplings[:, 0], bath.couplings[:, 1]), initial=0.0))
    reports = [bath_qee_criterion(bath, tau, cfg.tolerance.qee) for tau in trace.tau_grid]
    report = {
        "norm": "relative-frobenius",
        "tolerance": cfg.tolerance.qee,
        "commuting": transverse == 0.0,
        "max_transverse_coupling": transverse,
        "max_abs_delta_norm": float(np.max(np.abs(trace.delta_norm))),
        "entries": [{"tau": r.tau, "distance": r.distance, "qee_detected": r.qee_detected}
                    for r in reports],
    }
    _write(_sidecar(out, ".report.json"), json.dumps(report, indent=1) + "\n")
    _write(_sidecar(out, ".config.json"), cfg.dumps())
    print(f"{sum(r.qee_detected for r in reports)}/{len(reports)} delays show entanglement; "
          f"max |delta_norm| = {report['max_abs_delta_norm']:.6g}")
    return EXIT_OK


def cmd_echo(cfg, args) -> int:
    bath = _load_bath(args.bath)
    taus = cfg.grid.taus
    echo = echo_trace(bath, taus)
    lines = ["tau_us,re_echo,im_echo,abs_echo"]
    for tau, e in zip(taus, echo):
        lines.append(",".join(format(float(v), ".17g") for v in (tau, e.real, e.imag, abs(e))))
    out = Path(args.out)
    _write(out, "\n".join(lines) + "\n")
    _write(_sidecar(out, ".config.json"), cfg.dumps())
    if np.all(np.abs(np.abs(echo) - 0.5) <= cfg.tolerance.echo):
        print("commuting environment - witness blind spot possible")
    else:
        print(f"echo magnitude minimum {np.min(np.abs(echo)):.6g}")
    return EXIT_OK


def cmd_noise(cfg, args) -> int:
    n = cfg.noise
    proc = noise_mod.NoiseProcess(n.kind, n.sigma, n.corr_time, n.mean, cfg.seed)
    trajs = noise_mod.sample_trajectories(proc, n.dt, n.duration, n.count)
    out = Path(args.out)
    _write(out, noise_mod.noise_trace_csv(trajs, n.tau))
    _write(_sidecar(out, ".config.json"), cfg.dumps())
    print(f"{len(trajs)} trajectories of {proc.kind} noise")
    return EXIT_OK


def cmd_verify(cfg, args) -> int:
    results = run_all(fault=args.inject_fault)
    summary = {"passed": all(r.passed for r in results), "checks": [r.as_dict() for r in results]}
    text = json.dumps(summary, indent=1) + "\n"
    if args.out:
        _write(Path(args.out), text)
    print(text, end="")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print("FAILED: " + ", ".join(failed), file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qeewitness", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=True):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--seed", type=int, help="master seed (overrides config)")
        p.add_argument("--out", required=out_required, help="primary output path")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config entry, e.g. lattice.bath_radius=9")
        return p

    common(sub.add_parser("gen-bath", help="generate and serialize a polarized 13C bath"))
    p = common(sub.add_parser("run-protocol", help="two-preparation coherence trace"))
    p.add_argument("--bath", required=True)
    p.add_argument("--threads", type=int)
    p.add_argument("--diagonal", action="store_true", help="only the t = tau slice")
    p = common(sub.add_parser("echo", help="spin-echo coherence versus tau"))
    p.add_argument("--bath", required=True)
    common(sub.add_parser("noise", help="classical-noise reference pipeline"))
    p = common(sub.add_parser("verify", help="run the oracle self-checks"), out_required=False)
    p.add_argument("--inject-fault", choices=FAULTS)
    return parser


COMMANDS = {"gen-bath": cmd_gen_bath, "run-protocol": cmd_run_protocol, "echo": cmd_echo,
            "noise": cmd_noise, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        return COMMANDS[args.command](cfg, args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
