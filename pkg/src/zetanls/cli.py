"""Command-line front end: ``python3 -m zetanls <command> [flags]``.

Exit codes: 0 success, 1 a check failed, 2 bad usage or invalid parameters.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import dynamics as dyn
from . import experiments as ex
from . import field as fld
from . import specfun

COMMANDS = ("simulate", "verify", "compare", "eps-study", "zeta")
ENV_OUT_DIR = "ZNLS_OUT_DIR"


class UsageError(ValueError):
    pass


@dataclass
class CliConfig:
    subcommand: str = "simulate"
    variant: str = "zeta"
    n: int = 64
    l: float = 2 * math.pi
    dt: float = 1e-3
    t_final: float = 5.0
    lam: float = 1.0
    mu: float = 0.0
    eps: float = 0.0
    seed: int = 42
    decay_p: float = 3.0
    target_mass: float = 1.0
    out_dir: str | None = None
    threads: int = 0
    deterministic: bool = False
    suite: str = "all"
    samples: int = 10**6
    eps_list: tuple = (0.2, 0.1, 0.05, 0.025)

    def validate(self) -> None:
        if self.subcommand not in COMMANDS:
            raise UsageError(f"unknown command {self.subcommand!r}")
        try:
            dyn.Equation.parse(self.variant)
        except ValueError:
            raise UsageError(f"unknown variant {self.variant!r}") from None
        if self.n < 2 or self.n & (self.n - 1):
            raise UsageError(f"n must be a power of two >= 2, got {self.n}")
        for name in ("l", "dt", "t_final", "lam", "target_mass"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise UsageError(f"{name} must be a positive finite number, got {val}")
        if self.dt > 0.1:
            raise UsageError("dt must be <= 0.1")
        if self.t_final < self.dt:
            raise UsageError("t_final must be >= dt")
        if not (math.isfinite(self.eps) and self.eps >= 0) or not math.isfinite(self.mu):
            raise UsageError("eps must be >= 0 and mu finite")
        if self.decay_p < 2:
            raise UsageError("decay_p must be >= 2")
        if self.threads < 0:
            raise UsageError("threads must be >= 0 (0 = auto)")
        if self.suite not in ex.SUITES:
            raise UsageError(f"suite must be one of {ex.SUITES}")
        if self.samples < 1:
            raise UsageError("samples must be >= 1")

    def variant_obj(self) -> dyn.Variant:
        try:
            return dyn.Variant(dyn.Equation.parse(self.variant), self.lam, self.mu, self.eps)
        except ValueError as e:
            raise UsageError(str(e)) from None

    def initial(self) -> fld.ComplexField:
        return ex.initial_field(self.seed, self.n, self.l, self.decay_p, self.target_mass)

    def output_dir(self) -> Path:
        return Path(self.out_dir or os.environ.get(ENV_OUT_DIR) or ".")


# argparse dest -> CliConfig field
_FLAG_FIELDS = {"variant": "variant", "n": "n", "l": "l", "dt": "dt", "t": "t_final",
                "lam": "lam", "mu": "mu", "eps": "eps", "seed": "seed", "decay_p": "decay_p",
                "target_mass": "target_mass", "out_dir": "out_dir", "threads": "threads",
                "suite": "suite", "samples": "samples", "eps_list": "eps_list"}
_CONFIG_ALIASES = {"lambda": "lam", "t": "t_final"}


def _eps_list(text: str) -> tuple:
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad eps list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty eps list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with CliConfig fields; flags override it")
    common.add_argument("--variant", help="zeta | zeta_eps | zeta_log | sign")
    common.add_argument("--n", type=int)
    common.add_argument("--l", type=float)
    common.add_argument("--dt", type=float)
    common.add_argument("--t", type=float, help="final time")
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--mu", type=float)
    common.add_argument("--eps", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--decay-p", type=float)
    common.add_argument("--target-mass", type=float)
    common.add_argument("--out-dir", help=f"output directory (fallback: ${ENV_OUT_DIR}, then .)")
    common.add_argument("--threads", type=int, help="FFT worker threads, 0 = all cores")
    common.add_argument("--deterministic", action="store_true", default=None,
                        help="single-threaded execution; byte-identical outputs")

    p = argparse.ArgumentParser(prog="zetanls", description="Zeta-damped Schrodinger simulator and checks")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="evolve one field, write series and final state")
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", choices=ex.SUITES)
    v.add_argument("--samples", type=int, help="random samples for the property battery")
    sub.add_parser("compare", parents=[common], help="zeta run against sign run from the same data")
    e = sub.add_parser("eps-study", parents=[common], help="distance of regularized runs to eps = 0")
    e.add_argument("--eps-list", type=_eps_list, help="comma separated, decreasing")
    z = sub.add_parser("zeta", help="evaluate zeta (and zeta') as CSV")
    zs = z.add_mutually_exclusive_group(required=True)
    zs.add_argument("--s", type=float)
    zs.add_argument("--table", nargs=3, type=float, metavar=("SMIN", "SMAX", "STEP"))
    z.add_argument("--prime", action="store_true", help="add a zeta' column")
    return p


def load_config(args: argparse.Namespace) -> CliConfig:
    cfg = CliConfig(subcommand=args.command)
    known = {f.name for f in fields(CliConfig)}
    if getattr(args, "config", None):
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config {args.config}: {e}") from None
        if not isinstance(doc, dict):
            raise UsageError("config must be a JSON object")
        for key, val in doc.items():
            name = _CONFIG_ALIASES.get(key, key).replace("-", "_")
            if name == "subcommand":
                continue
            if name not in known:
                raise UsageError(f"unknown config key {key!r}")
            if name == "eps_list":
                try:
                    val = tuple(float(x) for x in (val.split(",") if isinstance(val, str) else val))
                except (TypeError, ValueError):
                    raise UsageError(f"bad eps_list {val!r}") from None
            setattr(cfg, name, val)
    for dest, name in _FLAG_FIELDS.items():
        val = getattr(args, dest, None)
        if val is not None:
            setattr(cfg, name, val)
    if getattr(args, "deterministic", None):
        cfg.deterministic = True
    try:
        for f in fields(CliConfig):
            val = getattr(cfg, f.name)
            if f.type == "int" and not isinstance(val, bool):
                if float(val) != int(val):
                    raise ValueError(f"{f.name} must be an integer, got {val!r}")
                setattr(cfg, f.name, int(val))
            elif f.type == "float":
                setattr(cfg, f.name, float(val))
    except (TypeError, ValueError) as e:
        raise UsageError(f"bad config value: {e}") from None
    cfg.validate()
    return cfg


def _apply_threads(cfg: CliConfig) -> None:
    if cfg.deterministic:
        fld.set_fft_workers(1)
    else:
        fld.set_fft_workers(cfg.threads or os.cpu_count() or 1)


def _emit(lines) -> None:
    for line in lines:
        print(line)


def cmd_simulate(cfg: CliConfig) -> int:
    v = cfg.variant_obj()
    u0 = cfg.initial()
    u, series = dyn.evolve(u0, v, dyn.StepperConfig(cfg.dt), cfg.t_final)
    out = cfg.output_dir()
    out.mkdir(parents=True, exist_ok=True)
    stem = f"simulate_{v.tag.value}"
    series.to_csv(out / f"{stem}_series.csv")
    fld.write_field(out / f"{stem}_final.bin", u, series.times[-1])
    fld.write_abs_csv(out / f"{stem}_final_abs.csv", u)
    print(f"t={series.times[-1]!r} mass={series.mass[-1]!r} grad={series.grad[-1]!r} "
          f"sup={series.sup[-1]!r} extinct_fraction={series.extinct_fraction[-1]!r}")
    return 0


def _finish(reports, cfg: CliConfig, name: str, params: dict) -> int:
    out = cfg.output_dir()
    for r in reports:
        r.write(out)
        _emit(r.lines())
    doc = ex.summary(reports, name, params)
    (out / "summary.json").write_text(ex.dumps(doc))
    print("PASSED" if doc["passed"] else "FAILED")
    return 0 if doc["passed"] else 1


def cmd_verify(cfg: CliConfig) -> int:
    reports = ex.suite_reports(cfg.suite, seed=cfg.seed, n=cfg.n, dt=cfg.dt, lam=cfg.lam,
                               samples=cfg.samples, mu=cfg.mu or 0.5)
    params = dict(seed=cfg.seed, n=cfg.n, dt=cfg.dt, lam=cfg.lam, samples=cfg.samples, mu=cfg.mu or 0.5)
    return _finish(reports, cfg, cfg.suite, params)


def cmd_compare(cfg: CliConfig) -> int:
    rep = ex.run_comparison(seed=cfg.seed, n=cfg.n, dt=cfg.dt, lam=cfg.lam, t_final=cfg.t_final,
                            decay_p=cfg.decay_p, target_mass=cfg.target_mass, u0=cfg.initial())
    return _finish([rep], cfg, "compare", rep.params)


def cmd_eps_study(cfg: CliConfig) -> int:
    try:
        rep = ex.run_eps_convergence(seed=cfg.seed, n=cfg.n, dt=cfg.dt, lam=cfg.lam, t_final=cfg.t_final,
                                     eps_list=cfg.eps_list, variant=cfg.variant, mu=cfg.mu,
                                     decay_p=cfg.decay_p, target_mass=cfg.target_mass, u0=cfg.initial())
    except ValueError as e:
        raise UsageError(str(e)) from None
    return _finish([rep], cfg, "eps-study", rep.params)


def cmd_zeta(args: argparse.Namespace) -> int:
    if args.table is not None:
        lo, hi, step = args.table
        if not step > 0 or hi < lo:
            raise UsageError("--table needs SMIN <= SMAX and STEP > 0")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        s = lo + step * np.arange(count)
    else:
        s = np.array([args.s])
    try:
        z = specfun.zeta(s)
        zp = specfun.zeta_prime(s) if args.prime else None
    except specfun.DomainError as e:
        raise UsageError(str(e)) from None
    print("s,zeta,zeta_prime" if args.prime else "s,zeta")
    for i in range(len(s)):
        row = [repr(float(s[i])), repr(float(z[i]))]
        if zp is not None:
            row.append(repr(float(zp[i])))
        print(",".join(row))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if args.command == "zeta":
            return cmd_zeta(args)
        cfg = load_config(args)
        _apply_threads(cfg)
        handler = {"simulate": cmd_simulate, "verify": cmd_verify, "compare": cmd_compare,
                   "eps-study": cmd_eps_study}[args.command]
        return handler(cfg)
    except UsageError as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return 2
    except dyn.SimulationError as e:
        print(f"{parser.prog}: simulation failed at step {e.step}: {e}", file=sys.stderr)
        return 1


def config_json(cfg: CliConfig) -> str:
    """Serialize a config in the form ``--config`` accepts."""
    d = asdict(cfg)
    d["eps_list"] = list(d["eps_list"])
    return json.dumps(d, indent=2, sort_keys=True)
