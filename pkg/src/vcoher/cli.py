"""Command-line front end.

Subcommands ``spectrum``, ``group-index``, ``ob``, ``floquet`` and
``validate``.  Configuration is a flat JSON object (``--config`` or a
bundled ``--recipe``); flags with the same names override it.

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 solver failure affecting every point.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from contextlib import contextmanager

import numpy as np

from . import config as cfgmod
from .bistability import OB_MODES, XGrid, ob_curve
from .config import INT_KEYS, KEYS, STR_KEYS, RunConfig
from .errors import ConfigError, VcoherError
from .model import ORDER, build_liouvillian_parts
from .response import MODES, Sweep, group_index, spectrum
from .solver import harmonic_balance

EXIT_OK, EXIT_VALIDATE, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3

logger = logging.getLogger("vcoher")


def fmt(value: float) -> str:
    """Lowercase scientific notation, 12 significant digits."""
    return f"{value:.11e}"


def worker_count() -> int | None:
    raw = os.environ.get("VCOHER_THREADS")
    if raw is None or raw == "":
        return None
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ConfigError(f"VCOHER_THREADS must be a positive integer, got {raw!r}")
    return n


@contextmanager
def _output(path: str | None):
    if path in (None, "", "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="\n") as fh:
            yield fh


def _write_rows(out, header: str, rows) -> None:
    out.write(header + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")


def _sweep(cfg: RunConfig) -> Sweep:
    var = cfg.sweep_variable or "delta"
    if var not in ("delta", "delta_c"):
        raise ConfigError(f"sweep_variable for spectra must be 'delta' or 'delta_c', got {var!r}")
    try:
        return Sweep(var, cfg.sweep_start, cfg.sweep_stop, cfg.sweep_count)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _spectrum_mode(cfg: RunConfig) -> str:
    mode = cfg.mode or "floquet_r1"
    if mode not in MODES:
        raise ConfigError(f"mode for spectra must be one of {', '.join(MODES)}, got {mode!r}")
    return mode


def cmd_spectrum(cfg: RunConfig) -> int:
    points = spectrum(cfg.system(), _sweep(cfg), _spectrum_mode(cfg), cfg.scale(), worker_count())
    with _output(cfg.out_path) as out:
        _write_rows(out, "delta_p,re_s,im_s,abs,disp",
                    ((p.detuning, p.s.real, p.s.imag, p.absorption, p.dispersion) for p in points))
    return EXIT_OK


def cmd_group_index(cfg: RunConfig) -> int:
    sweep = _sweep(cfg)
    if sweep.count < 3:
        raise ConfigError("group index needs sweep_count >= 3")
    points = spectrum(cfg.system(), sweep, _spectrum_mode(cfg), cfg.scale(), worker_count())
    with _output(cfg.out_path) as out:
        _write_rows(out, "delta_p,ng_minus_1", group_index(points, cfg.scale()))
    return EXIT_OK


def cmd_ob(cfg: RunConfig) -> int:
    mode = cfg.mode or "static"
    if mode not in OB_MODES:
        raise ConfigError(f"mode for ob must be one of {', '.join(OB_MODES)}, got {mode!r}")
    if cfg.sweep_variable not in (None, "x"):
        raise ConfigError(f"ob sweeps the transmitted field; sweep_variable must be 'x', got {cfg.sweep_variable!r}")
    try:
        grid = XGrid(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_count)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    curve = ob_curve(cfg.system(), cfg.cavity(), grid, mode, cfg.k_max, workers=worker_count())
    with _output(cfg.out_path) as out:
        _write_rows(out, "x,abs_y,re_y,im_y", ((x, abs(y), y.real, y.imag) for x, y in zip(curve.x, curve.y)))
        tps = " ".join(fmt(x) for x in curve.turning_points) or "none"
        out.write(f"# turning_points: {tps}\n")
    return EXIT_OK


def cmd_floquet(cfg: RunConfig) -> int:
    params = cfg.system()
    if params.delta == 0:
        raise ConfigError("floquet needs delta != 0; at two-photon resonance use spectrum with mode static_full")
    sol = harmonic_balance(build_liouvillian_parts(params), params.delta, params.omega_p, cfg.k_max)
    with _output(cfg.out_path) as out:
        out.write("k,component,re,im\n")
        for k in sol.ks:
            for name, value in zip(ORDER, sol[k]):
                out.write(f"{k},{name},{fmt(value.real)},{fmt(value.imag)}\n")
        out.write(f"# residual_norm: {fmt(sol.residual_norm)}\n")
    return EXIT_OK


def cmd_validate(quick: bool) -> int:
    from .validation import run_checks

    width = 40

    def show(res):
        print(f"{res.name:<{width}} {'PASS' if res.passed else 'FAIL'}  {res.seconds:7.2f}s  {res.detail}", flush=True)

    print(f"{'check':<{width}} {'result':<6} {'time':>8}  detail")
    results = run_checks(quick=quick, progress=show)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"FAILED: {', '.join(failed)}")
        return EXIT_VALIDATE
    print(f"all {len(results)} checks passed")
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "group-index": cmd_group_index,
    "ob": cmd_ob,
    "floquet": cmd_floquet,
}


def _flag_type(key):
    if key in STR_KEYS:
        return str
    return int if key in INT_KEYS else float


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vcoher", description="V-type atom coherence, spectra and bistability.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver warnings")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat JSON configuration file")
        p.add_argument("--recipe", help="bundled figure recipe (" + ", ".join(cfgmod.recipe_names()) + ")")
        p.add_argument("--dump-config", action="store_true", help="print the effective configuration and exit")
        group = p.add_argument_group("configuration keys (override the file)")
        for key in KEYS:
            group.add_argument(f"--{key}", dest=key, type=_flag_type(key), default=argparse.SUPPRESS)
    v = sub.add_parser("validate", help="run the self-check suite")
    v.add_argument("--quick", action="store_true", help="only the fast algebraic checks")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if args.recipe:
        data.update(cfgmod.load_recipe(args.recipe))
    if args.config:
        file_data = cfgmod.load_json(args.config)
        if not isinstance(file_data, dict):
            raise ConfigError("configuration must be a flat JSON object")
        data.update(file_data)
    cfg = cfgmod.from_mapping(data)
    overrides = {k: getattr(args, k) for k in KEYS if hasattr(args, k)}
    return cfgmod.from_mapping(overrides, cfg)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "validate":
        return cmd_validate(args.quick)
    try:
        cfg = resolve_config(args)
        if args.dump_config:
            print(cfgmod.dump(cfg))
            return EXIT_OK
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"vcoher: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (VcoherError, np.linalg.LinAlgError) as exc:
        print(f"vcoher: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
