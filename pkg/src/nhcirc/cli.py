"""Command-line front end.

Subcommands map one-to-one onto the library pipelines and emit CSV/JSON
artifacts.  Every option has a config-file equivalent (INI-style, section
named after the subcommand); a flag overrides the file.  Exit codes:
0 success, 2 usage/config error, 3 physics error (exceptional point,
invalid dilation parameters, ...).

The default output directory comes from $NHCIRC_OUTDIR (falling back to
the working directory).
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from pathlib import Path

import numpy as np

from .errors import (
    DilationValidityError,
    DomainError,
    ExceptionalPointError,
    NumericalError,
    OrthogonalStatesError,
    PhaseBoundaryError,
    PostselectionError,
    PreparationError,
)
from . import dilation, evolution, experiment, genexp, ssh
from .statevector import StateVector

_PHYSICS_ERRORS = (
    DilationValidityError,
    DomainError,
    ExceptionalPointError,
    NumericalError,
    OrthogonalStatesError,
    PhaseBoundaryError,
    PostselectionError,
    PreparationError,
)

_DEFAULTS = {
    "t1": 1.0,
    "delta": 0.5,
    "bc": "pbc",
    "k": None,
    "N": 200,
    "T": 10.0,
    "steps": 200,
    "alpha": "auto",
    "shots": None,
    "seed": 0,
    "eta0": 0.8,
    "b": 0.23,
    "t1_min": 0.1,
    "t1_max": 1.9,
    "t1_step": 0.1,
    "jobs": 1,
    "out": None,
}

_FLOAT_KEYS = {"t1", "delta", "k", "T", "eta0", "b", "t1_min", "t1_max", "t1_step"}
_INT_KEYS = {"N", "steps", "shots", "seed", "jobs"}


def _resolve(args: argparse.Namespace, command: str) -> dict:
    """flag > config file > built-in default."""
    cfg = {}
    if getattr(args, "config", None):
        parser = configparser.ConfigParser()
        read = parser.read(args.config)
        if not read:
            raise UsageError(f"config file not found: {args.config}")
        if parser.has_section(command):
            cfg = dict(parser.items(command))
    out = {}
    for key, default in _DEFAULTS.items():
        flag = getattr(args, key, None)
        if flag is not None:
            out[key] = flag
        elif key in cfg:
            raw = cfg[key]
            if key in _FLOAT_KEYS:
                out[key] = float(raw)
            elif key in _INT_KEYS:
                out[key] = int(raw)
            else:
                out[key] = raw
        else:
            out[key] = default
    if out["out"] is None:
        out["out"] = os.environ.get("NHCIRC_OUTDIR", ".")
    return out


class UsageError(Exception):
    pass


def _config_header(cfg: dict, command: str) -> str:
    pairs = " ".join(f"{k}={cfg[k]}" for k in sorted(cfg) if cfg[k] is not None)
    return f"nhcirc {command} {pairs}"


def _prep(cfg) -> experiment.PrepConfig:
    alpha = cfg["alpha"]
    if alpha != "auto":
        alpha = experiment.alpha_value(alpha)
    return experiment.PrepConfig(t_final=cfg["T"], steps=max(cfg["steps"], 1), alpha=alpha)


def _meas(cfg) -> experiment.MeasConfig:
    return experiment.MeasConfig(shots=cfg["shots"], seed=cfg["seed"])


def _params(cfg) -> ssh.SSHParams:
    return ssh.SSHParams(t1=cfg["t1"], delta=cfg["delta"], bc=cfg["bc"])


def _outdir(cfg) -> Path:
    path = Path(cfg["out"])
    path.mkdir(parents=True, exist_ok=True)
    return path


def _cmd_texture(args) -> int:
    cfg = _resolve(args, "texture")
    samples = experiment.texture_sweep(_params(cfg), cfg["N"], _prep(cfg), _meas(cfg))
    path = _outdir(cfg) / "texture.csv"
    experiment.write_texture_csv(path, samples, header=_config_header(cfg, "texture"))
    print(path)
    return 0


def _cmd_winding(args) -> int:
    cfg = _resolve(args, "winding")
    p = _params(cfg)
    result, samples = experiment.measure_winding(p, cfg["N"], _prep(cfg), _meas(cfg))
    oracle = experiment.winding_oracle(p, cfg["N"])
    try:
        expected = ssh.expected_winding(p)
    except PhaseBoundaryError:
        expected = None
    outdir = _outdir(cfg)
    experiment.write_texture_csv(
        outdir / "texture.csv", samples, header=_config_header(cfg, "winding")
    )
    experiment.write_winding_json(
        outdir / "winding.json", p, result, oracle=oracle, expected=expected,
        config={k: str(v) for k, v in cfg.items()},
    )
    print(outdir / "winding.json")
    return 0


def _cmd_phase_diagram(args) -> int:
    cfg = _resolve(args, "phase-diagram")
    n_points = int(round((cfg["t1_max"] - cfg["t1_min"]) / cfg["t1_step"])) + 1
    t1_values = cfg["t1_min"] + cfg["t1_step"] * np.arange(n_points)
    rows = experiment.winding_sweep(
        t1_values, cfg["delta"], cfg["bc"], cfg["N"], _prep(cfg), _meas(cfg)
    )
    path = _outdir(cfg) / "phase_diagram.csv"
    with open(path, "w") as fh:
        fh.write(f"# {_config_header(cfg, 'phase-diagram')}\n")
        fh.write("t1,w_measured,w_oracle,w_expected,error\n")
        for row in rows:
            vals = [
                f"{row[c]:.17e}" if row[c] is not None else ""
                for c in ("t1", "w_measured", "w_oracle", "w_expected")
            ]
            fh.write(",".join(vals) + f",{row['error']}\n")
    print(path)
    return 0


def _cmd_prepare(args) -> int:
    cfg = _resolve(args, "prepare")
    if cfg["k"] is None:
        raise UsageError("prepare requires --k")
    p = _params(cfg)
    d = ssh.d_vector(cfg["k"], p)
    alpha = cfg["alpha"]
    alpha = experiment._auto_alpha(d) if alpha == "auto" else experiment.alpha_value(alpha)
    _, res_r, res_l = evolution.prepare_dual_pair(
        d.matrix(), cfg["T"], max(cfg["steps"], 1), alpha
    )
    outdir = _outdir(cfg)
    header = _config_header(cfg, "prepare")
    res_r.write_csv(outdir / "prepare_right.csv", header=header + " branch=right")
    res_l.write_csv(outdir / "prepare_left.csv", header=header + " branch=left")
    print(outdir / "prepare_right.csv")
    return 0


def _cmd_dilation_check(args) -> int:
    cfg = _resolve(args, "dilation-check")
    if cfg["k"] is None:
        raise UsageError("dilation-check requires --k")
    p = _params(cfg)
    d = ssh.d_vector(cfg["k"], p)
    h = d.matrix()
    alpha = cfg["alpha"]
    alpha = experiment._auto_alpha(d) if alpha == "auto" else experiment.alpha_value(alpha)
    outdir = _outdir(cfg)
    header = _config_header(cfg, "dilation-check")
    psi0 = np.array([1.0, 0.0], dtype=complex)

    rows = None
    max_dev = 0.0
    for branch, h_branch, a_branch in (
        ("right", h, alpha),
        ("left", h.conj().T, -np.conj(alpha)),
    ):
        dp = dilation.DilationParams(
            eta0=cfg["eta0"], b=cfg["b"], alpha=a_branch,
            t_final=cfg["T"], steps=cfg["steps"],
        )
        schedule = dilation.build_schedule(h_branch, dp)
        schedule.write_csv(outdir / f"schedule_{branch}.csv", header=f"{header} branch={branch}")
        run = dilation.run_dilated(psi0, h_branch, dp)
        direct = evolution.evolve(a_branch * h_branch, psi0, cfg["T"], cfg["steps"])
        pop_dil = run.populations()[:, 0]
        pop_dir = direct.populations[:, 0]
        max_dev = max(max_dev, float(np.abs(pop_dil - pop_dir).max()))
        if rows is None:
            rows = [run.times, pop_dil, pop_dir]
        else:
            rows += [pop_dil, pop_dir]

    path = outdir / "dilation_compare.csv"
    with open(path, "w") as fh:
        fh.write(f"# {header}\n")
        fh.write("t,pop0_dilated_right,pop0_direct_right,pop0_dilated_left,pop0_direct_left\n")
        for vals in zip(*rows):
            fh.write(",".join(f"{x:.17e}" for x in vals) + "\n")
    print(path)
    print(f"max_population_deviation {max_dev:.6e}")
    return 0


def _cmd_genexp(args) -> int:
    cfg = _resolve(args, "genexp")
    psi1 = StateVector.load(args.psi1)
    psi2 = StateVector.load(args.psi2)
    obs = genexp.load_observables(args.obs)
    obs_prime = genexp.load_observables(args.obs_prime) if args.obs_prime else None
    res = genexp.generalized_expectation(
        psi1, psi2, obs, obs_prime, shots=cfg["shots"], seed=cfg["seed"]
    )
    if res.mode == "exact":
        print(f"{res.value.real:.17e} {res.value.imag:.17e}")
    else:
        print(
            f"{res.value.real:.17e} {res.value.imag:.17e} "
            f"{res.stderr.real:.17e} {res.stderr.imag:.17e}"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nhcirc",
        description="Generalized-expectation circuits and non-Hermitian SSH winding numbers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, *, model=True, prep=True, meas=True):
        sp.add_argument("--config", help="INI config file; section per subcommand")
        sp.add_argument("--out", help="output directory (default $NHCIRC_OUTDIR or .)")
        sp.add_argument("--jobs", type=int, help="parallel worker hint (output order fixed)")
        if model:
            sp.add_argument("--t1", type=float)
            sp.add_argument("--delta", type=float)
            sp.add_argument("--bc", choices=["pbc", "obc"])
        if prep:
            sp.add_argument("--T", type=float, help="evolution time in 1/t2")
            sp.add_argument("--steps", type=int)
            sp.add_argument("--alpha", help="'auto', complex literal, or exp(i*pi/16)")
        if meas:
            sp.add_argument("--shots", type=int, help="sampled mode; omit for exact")
            sp.add_argument("--seed", type=int)

    sp = sub.add_parser("texture", help="per-k spin-texture sweep -> texture.csv")
    add_common(sp)
    sp.add_argument("--N", type=int, help="number of k samples")
    sp.set_defaults(func=_cmd_texture)

    sp = sub.add_parser("winding", help="winding number -> winding.json + texture.csv")
    add_common(sp)
    sp.add_argument("--N", type=int)
    sp.set_defaults(func=_cmd_winding)

    sp = sub.add_parser("phase-diagram", help="t1 sweep -> phase_diagram.csv")
    add_common(sp)
    sp.add_argument("--N", type=int)
    sp.add_argument("--t1-min", dest="t1_min", type=float)
    sp.add_argument("--t1-max", dest="t1_max", type=float)
    sp.add_argument("--t1-step", dest="t1_step", type=float)
    sp.set_defaults(func=_cmd_phase_diagram)

    sp = sub.add_parser("prepare", help="dual-pair trajectories -> prepare_{right,left}.csv")
    add_common(sp, meas=False)
    sp.add_argument("--k", type=float, help="momentum in [-pi, pi]")
    sp.set_defaults(func=_cmd_prepare)

    sp = sub.add_parser(
        "dilation-check",
        help="dilated vs direct evolution -> schedule_*.csv + dilation_compare.csv",
    )
    add_common(sp, meas=False)
    sp.add_argument("--k", type=float)
    sp.add_argument("--eta0", type=float)
    sp.add_argument("--b", type=float)
    sp.set_defaults(func=_cmd_dilation_check)

    sp = sub.add_parser("genexp", help="generalized expectation from state/observable files")
    add_common(sp, model=False, prep=False)
    sp.add_argument("--psi1", required=True, help="state file for <psi1|")
    sp.add_argument("--psi2", required=True, help="state file for |psi2>")
    sp.add_argument("--obs", required=True, help="observable file for O")
    sp.add_argument("--obs-prime", dest="obs_prime", help="observable file for O'")
    sp.set_defaults(func=_cmd_genexp)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, OSError) as exc:
        print(json.dumps({"error": "UsageError", "message": str(exc)}), file=sys.stderr)
        return 2
    except _PHYSICS_ERRORS as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 3


if __name__ == "__main__":
    sys.exit(main())
