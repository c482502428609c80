"""Command line interface: ``cgme <command> --config run.json [--out file.csv]``.

Commands are ``kossakowski``, ``evolve``, ``entangle``, ``sweep`` and
``verify``. Every command writes CSV (stdout unless ``--out`` is given)
with floats in 17 significant digits and '\\n' line endings, so identical
inputs give byte-identical files.

Exit codes: 0 success, 2 bad configuration or violated precondition,
3 numerical contract violation, 4 formula mismatch not in the registry.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .core import (
    KET_MINUS,
    KET_PLUS,
    NumericalContractError,
    SystemConfig,
    ValidationError,
    bell_state,
    product_state,
    validate_state,
)
from .dynamics import build_generator, evolve
from .entanglement import CRITERIA, CRITERION_ALIASES, CriterionReport, find_boundary
from .kossakowski import KERNELS, PSD_TOL, kossakowski_matrix
from .verify import SUITES, run_suites

__all__ = ["main", "load_config", "RunConfig", "SCHEMA_VERSION", "EXIT_OK", "EXIT_CONFIG",
           "EXIT_NUMERICAL", "EXIT_DISCREPANCY"]

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_DISCREPANCY = 0, 2, 3, 4

MODES = ("exact", "highT", "closed")
TOP_KEYS = {"schema_version", "system", "mode", "kernel", "tolerance",
            "kossakowski", "evolve", "entangle", "sweep"}
SYSTEM_KEYS = {"omega1", "omega2", "ell", "beta", "delta_t", "lambda", "n", "epsilon"}
SYSTEM_REQUIRED = {"omega1", "omega2", "ell", "beta", "delta_t"}
SECTION_KEYS = {
    "kossakowski": set(),
    "evolve": {"t_max", "n_points", "initial_state", "method"},
    "entangle": {"criterion", "u", "v"},
    "sweep": {"criterion", "axes", "boundary", "trajectory", "u", "v"},
}
AXIS_NAMES = ("beta", "ell", "delta_t", "omega1", "omega2")


class ConfigError(ValidationError):
    """Malformed or inconsistent configuration file."""


class UnregisteredDiscrepancy(Exception):
    pass


# -- configuration ------------------------------------------------------------------

class RunConfig:
    """Validated run configuration."""

    def __init__(self, system: SystemConfig, mode: str, kernel: str, tol: float, sections: dict):
        self.system = system
        self.mode = mode
        self.kernel = kernel
        self.tol = tol
        self.sections = sections

    def section(self, name: str) -> dict:
        return self.sections.get(name, {})


def _number(value, name, allow_inf=False):
    if allow_inf and value in ("inf", "Infinity", "+inf"):
        return math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite")
    return value


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _system(obj) -> SystemConfig:
    _check_keys(obj, SYSTEM_KEYS, "system")
    missing = sorted(SYSTEM_REQUIRED - set(obj))
    if missing:
        raise ConfigError(f"missing key(s) in system: {', '.join(missing)}")
    kwargs = {
        "omega1": _number(obj["omega1"], "omega1"),
        "omega2": _number(obj["omega2"], "omega2"),
        "ell": _number(obj["ell"], "ell"),
        "beta": _number(obj["beta"], "beta", allow_inf=True),
        "delta_t": _number(obj["delta_t"], "delta_t"),
        "lam": _number(obj.get("lambda", 0.1), "lambda"),
        "epsilon": _number(obj.get("epsilon", 0.0), "epsilon"),
    }
    if "n" in obj:
        n = obj["n"]
        if not isinstance(n, list) or len(n) != 3:
            raise ConfigError("n must be a list of three numbers")
        kwargs["n"] = tuple(_number(c, "n") for c in n)
    return SystemConfig(**kwargs)


def parse_config(data: dict, mode_override: str | None = None) -> RunConfig:
    _check_keys(data, TOP_KEYS, "config")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}, got {version!r}")
    if "system" not in data:
        raise ConfigError("config needs a 'system' object")
    system = _system(data["system"])
    mode = mode_override or data.get("mode", "highT")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    kernel = data.get("kernel", "thermal")
    if kernel not in KERNELS:
        raise ConfigError(f"kernel must be one of {KERNELS}, got {kernel!r}")
    tol = _number(data.get("tolerance", 1e-10), "tolerance")
    if not tol > 0:
        raise ConfigError("tolerance must be positive")
    sections = {}
    for name, keys in SECTION_KEYS.items():
        if name in data:
            _check_keys(data[name], keys, name)
            sections[name] = data[name]
    return RunConfig(system, mode, kernel, tol, sections)


def load_config(path: str, mode_override: str | None = None) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from None
    return parse_config(data, mode_override)


# -- output -------------------------------------------------------------------------

def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if value == 0:
            return "0"
        return format(value, ".17g")
    return str(value)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# -- commands -----------------------------------------------------------------------

def _kossakowski_mode(mode):
    return "exact" if mode == "exact" else "highT"


def cmd_kossakowski(run: RunConfig) -> str:
    km = kossakowski_matrix(run.system, _kossakowski_mode(run.mode), kernel=run.kernel, tol=run.tol)
    m = km.matrix
    rows = [("matrix", i, j, m[i, j].real, m[i, j].imag) for i in range(6) for j in range(6)]
    eig = km.eigenvalues()
    rows += [("eigenvalue", k, None, float(eig[k]), 0.0) for k in range(6)]
    rows.append(("psd", "min_eigenvalue", bool(eig[0] >= -PSD_TOL), float(eig[0]), 0.0))
    for (a, b), errs in sorted(km.quadrature_errors.items()):
        if (b, a) < (a, b):
            continue
        for name, err in zip(("i_plus", "i_minus", "i_zero"), errs):
            rows.append(("quad_error", f"{a}{b}", name, float(err), 0.0))
    return to_csv(("section", "row", "col", "re", "im"), rows)


def _initial_state(spec):
    if spec is None or spec == "product_mp":
        return product_state(KET_MINUS, KET_PLUS)
    if spec == "bell":
        return bell_state()
    if isinstance(spec, dict) and set(spec) <= {"real", "imag"} and "real" in spec:
        try:
            re = np.array(spec["real"], dtype=float)
            im = np.array(spec.get("imag", np.zeros((4, 4))), dtype=float)
        except (TypeError, ValueError):
            raise ConfigError("initial_state matrix entries must be numbers") from None
        if re.shape != (4, 4) or im.shape != (4, 4):
            raise ConfigError("initial_state matrix must be 4x4")
        return validate_state(re + 1j * im)
    raise ConfigError("initial_state must be 'product_mp', 'bell' or {'real': ..., 'imag': ...}")


def _time_grid(section):
    if "t_max" not in section or "n_points" not in section:
        raise ConfigError("evolve needs t_max and n_points")
    t_max = _number(section["t_max"], "t_max")
    n_points = section["n_points"]
    if isinstance(n_points, bool) or not isinstance(n_points, int) or n_points < 2:
        raise ConfigError("n_points must be an integer >= 2")
    if not t_max > 0:
        raise ConfigError("t_max must be positive")
    return t_max, n_points


def cmd_evolve(run: RunConfig) -> str:
    section = run.section("evolve")
    t_max, n_points = _time_grid(section)
    method = section.get("method", "expm")
    rho0 = _initial_state(section.get("initial_state"))
    gen = build_generator(run.system, run.mode, kernel=run.kernel, tol=run.tol)
    traj = evolve(rho0, gen, t_max, n_points - 1, method=method)
    pops = traj.populations
    rows = [
        (traj.times[k], *pops[k], traj.trace_deviation[k], traj.min_eigenvalue[k], traj.negativity[k])
        for k in range(len(traj.times))
    ]
    header = ("t", "p_pp", "p_pm", "p_mp", "p_mm", "trace_deviation", "min_eigenvalue", "negativity")
    return to_csv(header, rows)


def _criterion_name(name):
    name = CRITERION_ALIASES.get(name, name)
    if name not in CRITERIA:
        choices = sorted(CRITERIA) + sorted(CRITERION_ALIASES)
        raise ConfigError(f"criterion must be one of {choices}, got {name!r}")
    return name


def _probe(section, key):
    if key not in section:
        return None
    raw = section[key]
    try:
        vec = np.array([complex(*pair) for pair in raw])
    except TypeError:
        raise ConfigError(f"{key} must be a list of three [re, im] pairs") from None
    if vec.shape != (3,):
        raise ConfigError(f"{key} must have three components")
    return vec


def _evaluate(run: RunConfig, cfg: SystemConfig, name: str, u, v) -> CriterionReport:
    if name == "full":
        return CRITERIA["full"](cfg, u, v, mode=_kossakowski_mode(run.mode), kernel=run.kernel, tol=run.tol)
    return CRITERIA[name](cfg)


REPORT_HEADER = ("criterion", "lhs", "rhs", "margin", "satisfied", "degenerate")


def _report_row(rep: CriterionReport):
    return (rep.criterion_id, rep.lhs, rep.rhs, rep.margin, rep.satisfied,
            bool(rep.extras.get("degenerate", False)))


def cmd_entangle(run: RunConfig) -> str:
    section = run.section("entangle")
    if "criterion" not in section:
        raise ConfigError("entangle needs a criterion")
    name = _criterion_name(section["criterion"])
    u, v = _probe(section, "u"), _probe(section, "v")
    if (u is None) != (v is None):
        raise ConfigError("give both u and v, or neither")
    rep = _evaluate(run, run.system, name, u, v)
    return to_csv(REPORT_HEADER, [_report_row(rep)])


def _axis(obj):
    _check_keys(obj, {"name", "from", "to", "points", "scale"}, "sweep axis")
    name = obj.get("name")
    if name not in AXIS_NAMES:
        raise ConfigError(f"axis name must be one of {AXIS_NAMES}, got {name!r}")
    lo, hi = _number(obj.get("from"), "from"), _number(obj.get("to"), "to")
    points = obj.get("points")
    if isinstance(points, bool) or not isinstance(points, int) or points < 1:
        raise ConfigError("axis points must be a positive integer")
    if points > 1 and lo == hi:
        raise ConfigError(f"degenerate axis {name!r}: from == to with {points} points")
    if points == 1 and lo != hi:
        raise ConfigError(f"axis {name!r} with one point needs from == to")
    scale = obj.get("scale", "linear")
    if scale == "linear":
        values = np.linspace(lo, hi, points)
    elif scale == "log":
        if not (lo > 0 and hi > 0):
            raise ConfigError("log axis needs positive bounds")
        values = np.geomspace(lo, hi, points)
    else:
        raise ConfigError(f"axis scale must be 'linear' or 'log', got {scale!r}")
    return name, [float(x) for x in values]


def _threads() -> int:
    raw = os.environ.get("CGME_THREADS")
    if raw is None or raw == "":
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"CGME_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"CGME_THREADS must be a positive integer, got {raw!r}")
    return value


def _ordered_map(func, items):
    items = list(items)
    workers = min(_threads(), max(len(items), 1))
    if workers == 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def cmd_sweep(run: RunConfig) -> str:
    section = run.section("sweep")
    if "criterion" not in section or "axes" not in section:
        raise ConfigError("sweep needs criterion and axes")
    name = _criterion_name(section["criterion"])
    axes_raw = section["axes"]
    if not isinstance(axes_raw, list) or not 1 <= len(axes_raw) <= 2:
        raise ConfigError("sweep needs one or two axes")
    axes = [_axis(a) for a in axes_raw]
    names = [a[0] for a in axes]
    if len(set(names)) != len(names):
        raise ConfigError("sweep axes must be distinct")
    u, v = _probe(section, "u"), _probe(section, "v")
    boundary = section.get("boundary", False)
    if not isinstance(boundary, bool):
        raise ConfigError("boundary must be true or false")
    trajectory = section.get("trajectory")
    if trajectory is not None:
        _check_keys(trajectory, {"t_max", "n_points"}, "sweep trajectory")
        t_max, n_points = _time_grid(trajectory)
    rho0 = product_state(KET_MINUS, KET_PLUS)

    grid = list(itertools.product(*[a[1] for a in axes]))
    # build every configuration first so that invalid points fail fast
    configs = [run.system.replace(**dict(zip(names, point))) for point in grid]

    def work(cfg):
        rep = _evaluate(run, cfg, name, u, v)
        extra = ()
        if trajectory is not None:
            gen = build_generator(cfg, run.mode, kernel=run.kernel, tol=run.tol)
            traj = evolve(rho0, gen, t_max, n_points - 1)
            extra = (traj.negativity[-1], float(np.min(traj.min_eigenvalue)))
        return rep, extra

    results = _ordered_map(work, configs)
    rows = []
    for point, (rep, extra) in zip(grid, results):
        rows.append(("point", *point, *_report_row(rep)[1:], *extra))

    if boundary:
        inner = axes[-1][1]
        outer = list(itertools.product(*[a[1] for a in axes[:-1]]))
        flags = {point: rep.satisfied for point, (rep, _) in zip(grid, results)}
        for prefix in outer:
            for x0, x1 in zip(inner[:-1], inner[1:]):
                if flags[prefix + (x0,)] == flags[prefix + (x1,)]:
                    continue
                fixed = dict(zip(names[:-1], prefix))

                def margin(x, fixed=fixed):
                    cfg = run.system.replace(**fixed, **{names[-1]: x})
                    return _evaluate(run, cfg, name, u, v)

                x_star = find_boundary(margin, x0, x1)
                rep = margin(x_star)
                pad = (None,) * (2 if trajectory is not None else 0)
                rows.append(("boundary", *prefix, x_star, rep.lhs, rep.rhs, rep.margin, None, None, *pad))

    header = ["kind", *names, "lhs", "rhs", "margin", "satisfied", "degenerate"]
    if trajectory is not None:
        header += ["final_negativity", "min_eigenvalue"]
    return to_csv(header, rows)


def cmd_verify(suite: str) -> tuple[str, bool]:
    if suite not in SUITES + ("all",):
        raise ConfigError(f"suite must be one of {SUITES + ('all',)}, got {suite!r}")
    checks = run_suites(suite)
    rows = [(c.suite, c.formula, c.points, c.max_rel_err, c.tolerance, c.status, c.note) for c in checks]
    text = to_csv(("suite", "formula", "points", "max_rel_err", "tolerance", "status", "note"), rows)
    return text, all(c.ok for c in checks)


# -- entry point --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cgme", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=("kossakowski", "evolve", "entangle", "sweep", "verify"))
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--out", help="output CSV path (default: stdout)")
    parser.add_argument("--mode", choices=MODES, help="override the configured mode")
    parser.add_argument("--suite", default="all", help="verify suite: appendix, kossakowski, hamiltonian or all")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.command == "verify":
            text, ok = cmd_verify(args.suite)
            _emit(text, args.out)
            if not ok:
                raise UnregisteredDiscrepancy("verification found an unregistered mismatch")
            return EXIT_OK
        if not args.config:
            raise ConfigError(f"{args.command} needs --config")
        run = load_config(args.config, args.mode)
        command = {"kossakowski": cmd_kossakowski, "evolve": cmd_evolve,
                   "entangle": cmd_entangle, "sweep": cmd_sweep}[args.command]
        _emit(command(run), args.out)
        return EXIT_OK
    except ValidationError as exc:
        print(f"cgme: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalContractError as exc:
        print(f"cgme: numerical contract violated: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except UnregisteredDiscrepancy as exc:
        print(f"cgme: {exc}", file=sys.stderr)
        return EXIT_DISCREPANCY


if __name__ == "__main__":
    sys.exit(main())
