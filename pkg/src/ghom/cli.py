"""Command-line front end.

Subcommands: qfim, scan, ezc, weakcomm, oracle-diff, baseline.

Exit codes: 0 success, 2 configuration or parse error, 3 numeric failure
(including a singular QFIM where an inverse was requested), 4 a
verification that ran but did not pass.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import math
import operator
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .ezc import GridSpec, NoEzcSolution, ezc_phase_solution, ezc_verify
from .optics import InterferometerLayout
from .oracle import OracleDomainError
from .qfim import (
    DEFAULT_CONDITION_CAP,
    EvalPoint,
    SingularQfimError,
    overlaps,
    qcrb_bounds,
    qfim,
    qfim_det,
)
from .scan import QUANTITIES, Axis, oracle_diff, scan_grid
from .spectra import GaussianJsaParams, NumericFailure, build_quadrature

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VERIFY = 4

WEAKCOMM_TOL = 1e-9


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------- parsing

_FUNCS = {"sqrt": math.sqrt, "acos": math.acos, "asin": math.asin, "atan": math.atan,
          "cos": math.cos, "sin": math.sin, "tan": math.tan}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def parse_number(text: str) -> float:
    """Float or small arithmetic expression: ``pi/2``, ``acos(1/sqrt3)``, ``2*pi/3``."""
    src = text.strip().replace("sqrt3", "sqrt(3)").replace("sqrt2", "sqrt(2)")
    try:
        return float(src)
    except ValueError:
        pass

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError

    try:
        return float(ev(ast.parse(src, mode="eval")))
    except (SyntaxError, ValueError, ZeroDivisionError, OverflowError):
        raise argparse.ArgumentTypeError(f"cannot parse number {text!r}") from None


def parse_list(text: str) -> list[float]:
    if not text.strip():
        return []
    return [parse_number(part) for part in text.split(",")]


def parse_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"range must be min:max:count, got {text!r}")
    lo, hi = parse_number(parts[0]), parse_number(parts[1])
    try:
        count = int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"range count must be an integer, got {parts[2]!r}") from None
    if count < 2 or not hi > lo:
        raise argparse.ArgumentTypeError(f"range needs max > min and count >= 2, got {text!r}")
    return lo, hi, count


def parse_axis(text: str) -> Axis:
    name, sep, rng = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"axis must be NAME=min:max:count, got {text!r}")
    try:
        return Axis(name.strip(), *parse_range(rng))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def read_config_file(path: str) -> dict[str, str]:
    """``key = value`` per line; ``#`` starts a comment."""
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _coerce_bool(key: str, value: str) -> bool:
    v = value.lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise ConfigError(f"config key {key!r} expects a boolean, got {value!r}")


# ---------------------------------------------------------------- config


@dataclass
class RunConfig:
    subcommand: str
    k: int
    tau: list[float]
    theta: list[float]
    omega0: float
    omega1: float
    omega2: float
    nodes: int
    controls: bool
    copies: int
    seed: int
    precision: int
    output: str | None
    extras: dict = field(default_factory=dict)

    @property
    def jsa(self) -> GaussianJsaParams:
        return GaussianJsaParams(self.omega0, self.omega1, self.omega2)

    @property
    def layout(self) -> InterferometerLayout:
        return InterferometerLayout.ghom(self.tau, self.theta, self.controls)

    def fmt(self, x: float) -> str:
        return f"{x:.{self.precision}g}"

    def header_lines(self) -> list[str]:
        items = {
            "subcommand": self.subcommand, "k": self.k,
            "tau": ",".join(self.fmt(t) for t in self.tau),
            "theta": ",".join(self.fmt(t) for t in self.theta),
            "omega0": self.fmt(self.omega0), "omega1": self.fmt(self.omega1),
            "omega2": self.fmt(self.omega2), "nodes": self.nodes,
            "controls": self.controls, "copies": self.copies, "seed": self.seed,
            "precision": self.precision,
        }
        for key, value in self.extras.items():
            if key in _EXECUTION_ONLY:
                continue
            if key == "grid" and value is not None:
                value = f"{self.fmt(value[0])}:{self.fmt(value[1])}:{value[2]}"
            elif isinstance(value, Axis):
                value = f"{value.name}={self.fmt(value.lo)}:{self.fmt(value.hi)}:{value.count}"
            elif isinstance(value, (list, tuple)):
                value = ";".join(
                    f"{v.name}={self.fmt(v.lo)}:{self.fmt(v.hi)}:{v.count}" if isinstance(v, Axis)
                    else (self.fmt(v) if isinstance(v, float) else str(v))
                    for v in value
                )
            elif isinstance(value, float):
                value = self.fmt(value)
            items[key] = value
        return [f"# ghom {__version__}"] + [f"# {key} = {value}" for key, value in items.items()]


# settings that change how a run executes or where it writes, never its numbers;
# they stay out of the header so output is byte-identical across them
_EXECUTION_ONLY = {"jobs", "plot"}


def _default_thetas(k: int) -> list[float]:
    try:
        return list(ezc_phase_solution(k).thetas)
    except NoEzcSolution:
        return [0.0] * (k - 1)


def build_config(args: argparse.Namespace) -> RunConfig:
    k = args.k
    if k < 1:
        raise ConfigError("k must be >= 1")
    tau = args.tau if args.tau is not None else [0.0] * k
    if len(tau) != k:
        raise ConfigError(f"--tau has {len(tau)} values but k={k}")
    if args.theta2 is not None:
        if args.theta is not None:
            raise ConfigError("give either --theta or --theta2, not both")
        if k != 2:
            raise ConfigError("--theta2 is only meaningful for k=2; use --theta")
        theta = [args.theta2]
    elif args.theta is not None:
        theta = args.theta
    else:
        theta = _default_thetas(k)
    if len(theta) != k - 1:
        raise ConfigError(f"--theta needs {k - 1} values (theta2..theta{k}) for k={k}, got {len(theta)}")
    if args.nodes < 2:
        raise ConfigError("--nodes must be >= 2")
    if args.precision < 1:
        raise ConfigError("--precision must be >= 1")
    if args.copies < 1:
        raise ConfigError("--copies must be >= 1")
    common = {"k", "tau", "theta", "theta2", "omega0", "omega1", "omega2", "nodes", "no_controls",
              "copies", "seed", "precision", "output", "config", "command", "func"}
    extras = {key: value for key, value in vars(args).items() if key not in common}
    cfg = RunConfig(
        subcommand=args.command, k=k, tau=list(tau), theta=list(theta),
        omega0=args.omega0, omega1=args.omega1, omega2=args.omega2, nodes=args.nodes,
        controls=not args.no_controls, copies=args.copies, seed=args.seed,
        precision=args.precision, output=args.output, extras=extras,
    )
    try:
        cfg.jsa
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


# ---------------------------------------------------------------- output


def _emit(cfg: RunConfig, out, lines: list[str]) -> None:
    for line in cfg.header_lines():
        print(line, file=out)
    for line in lines:
        print(line, file=out)


def write_csv(cfg: RunConfig, columns: list[str], rows) -> str:
    buf = io.StringIO()
    for line in cfg.header_lines():
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([cfg.fmt(v) if isinstance(v, float) else v for v in row])
    text = buf.getvalue()
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8")
    return text


def _matrix_lines(cfg: RunConfig, name: str, m: np.ndarray) -> list[str]:
    lines = [f"{name} ="]
    for row in np.atleast_2d(m):
        lines.append("  [" + ", ".join(cfg.fmt(float(x)) for x in row) + "]")
    return lines


# ---------------------------------------------------------------- commands


def _signed(v: np.ndarray) -> np.ndarray:
    """Fix an eigenvector's sign so its largest component is positive."""
    return v * np.sign(v[np.argmax(np.abs(v))])


def cmd_qfim(cfg: RunConfig, out) -> int:
    point = EvalPoint.create(cfg.layout, cfg.jsa, cfg.nodes)
    h = qfim(point)
    lines = _matrix_lines(cfg, "H", h.entries)
    lines.append(f"det = {cfg.fmt(qfim_det(h))}")
    vals, _ = h.eigh()
    lines.append("eigenvalues = " + ", ".join(cfg.fmt(float(v)) for v in vals))
    code = EXIT_OK
    try:
        bounds = qcrb_bounds(h, cfg.copies, cfg.extras.get("condition_cap", DEFAULT_CONDITION_CAP))
    except SingularQfimError as exc:
        lines.append("SINGULAR: QFIM not invertible; delays are intertwined")
        lines.append(f"condition = {cfg.fmt(exc.condition)}")
        lines.append("null direction = (" + ", ".join(cfg.fmt(float(x)) for x in exc.null_vector) + ")")
        vals, vecs = h.eigh()
        lines.append("most informative direction = (" + ", ".join(cfg.fmt(float(x)) for x in _signed(vecs[:, -1])) + ")")
        code = EXIT_NUMERIC
    else:
        lines += _matrix_lines(cfg, "H^-1", np.linalg.inv(h.entries))
        lines.append("QCRB [H^-1]_ii/M = " + ", ".join(cfg.fmt(float(x)) for x in bounds.inverse_diagonal))
        lines.append("QCRB 1/(M H_ii) = " + ", ".join(cfg.fmt(float(x)) for x in bounds.diagonal))
    _emit(cfg, out, lines)
    if cfg.output:
        rows = [[f"H{i + 1}{j + 1}", float(h[i, j])] for i in range(h.k) for j in range(h.k)]
        rows.append(["det", qfim_det(h)])
        write_csv(cfg, ["entry", "value"], rows)
    return code


def cmd_baseline(cfg: RunConfig, out) -> int:
    cfg.controls = False
    h = qfim(EvalPoint.create(cfg.layout, cfg.jsa, cfg.nodes))
    vals, vecs = h.eigh()
    top = _signed(vecs[:, -1])
    lines = _matrix_lines(cfg, "H (no controls)", h.entries)
    lines.append("eigenvalues = " + ", ".join(cfg.fmt(float(v)) for v in vals))
    lines.append(f"rank (eigenvalues > 1e-10 * max) = {int(np.sum(vals > 1e-10 * vals[-1]))}")
    lines.append("informative direction = (" + ", ".join(cfg.fmt(float(x)) for x in top) + ")")
    _emit(cfg, out, lines)
    if cfg.output:
        write_csv(cfg, ["eigenvalue"] + [f"v{i + 1}" for i in range(h.k)],
                  [[float(vals[i]), *map(float, vecs[:, i])] for i in range(h.k)])
    return EXIT_OK


def cmd_scan(cfg: RunConfig, out) -> int:
    axes = cfg.extras["vary"]
    if not axes or len(axes) != 2:
        raise ConfigError("scan needs exactly two --vary axes")
    try:
        rows = scan_grid(cfg.extras["quantity"], cfg.layout, cfg.jsa, axes, cfg.nodes, cfg.extras["jobs"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    text = write_csv(cfg, [axes[0].name, axes[1].name, cfg.extras["quantity"]], rows)
    if not cfg.output:
        out.write(text)
    else:
        values = np.array([r[2] for r in rows])
        _emit(cfg, out, [f"wrote {len(rows)} rows to {cfg.output}",
                         f"min = {cfg.fmt(float(values.min()))}, max = {cfg.fmt(float(values.max()))}"])
    if cfg.extras.get("plot"):
        _plot_scan(cfg, axes, rows)
    return EXIT_OK


def _plot_scan(cfg: RunConfig, axes, rows) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    grid = np.array([r[2] for r in rows]).reshape(axes[0].count, axes[1].count)
    fig, ax = plt.subplots(figsize=(5, 4))
    mesh = ax.pcolormesh(axes[1].values(), axes[0].values(), grid, shading="auto")
    fig.colorbar(mesh, ax=ax, label=cfg.extras["quantity"])
    ax.set_xlabel(axes[1].name)
    ax.set_ylabel(axes[0].name)
    fig.tight_layout()
    fig.savefig(cfg.extras["plot"], dpi=120)
    plt.close(fig)


def cmd_ezc(cfg: RunConfig, out) -> int:
    lines = []
    if cfg.k == 3:
        try:
            ezc_phase_solution(3)
        except NoEzcSolution as exc:
            lines.append(f"phase lookup: {exc}")
    grid_range = cfg.extras.get("grid") or ((-3.0, 3.0, 41) if cfg.k <= 2 else (-2.0, 2.0, 9))
    grid = GridSpec.uniform(cfg.k, *grid_range)
    try:
        report = ezc_verify(cfg.theta, cfg.jsa, grid, cfg.extras["tol"], build_quadrature(cfg.jsa, cfg.nodes))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    lines.append(report.summary())
    _emit(cfg, out, lines)
    if cfg.output:
        write_csv(cfg, [f"tau{i + 1}" for i in range(cfg.k)] + ["R"],
                  [[*tau, r] for tau, r in report.zero_points])
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_weakcomm(cfg: RunConfig, out) -> int:
    if cfg.k < 2:
        raise ConfigError("weak commutativity needs k >= 2")
    rng = np.random.default_rng(cfg.seed)
    quad = build_quadrature(cfg.jsa, cfg.nodes)
    span = cfg.extras["tau_range"]
    worst = 0.0
    worst_at = None
    samples = 1 if cfg.extras["fixed_tau"] else cfg.extras["samples"]
    for _ in range(samples):
        taus = cfg.tau if cfg.extras["fixed_tau"] else list(rng.uniform(-span, span, cfg.k))
        thetas = list(rng.uniform(0, 2 * math.pi, cfg.k - 1)) if cfg.extras["random_theta"] else cfg.theta
        layout = InterferometerLayout.ghom(taus, thetas, cfg.controls)
        d = overlaps(EvalPoint(layout, cfg.jsa, quad)).d_overlaps
        im = np.abs(np.imag(d[np.triu_indices(cfg.k, 1)])).max()
        if im >= worst:
            worst, worst_at = float(im), (taus, thetas)
    lines = [f"max |Im <d_i Psi|d_j Psi>| over {samples} draw(s) = {cfg.fmt(worst)}"]
    lines.append("worst tau = (" + ", ".join(cfg.fmt(float(t)) for t in worst_at[0]) + ")")
    if cfg.k == 2:
        ok = worst <= WEAKCOMM_TOL
        lines.append(("PASS" if ok else "FAIL") + f": threshold {WEAKCOMM_TOL:g}")
        code = EXIT_OK if ok else EXIT_VERIFY
    else:
        lines.append("informational for k != 2")
        code = EXIT_OK
    _emit(cfg, out, lines)
    return code


def cmd_oracle_diff(cfg: RunConfig, out) -> int:
    if cfg.k != 2:
        raise ConfigError("closed forms exist only for k=2")
    lo, hi, count = cfg.extras.get("grid") or (-3.0, 3.0, 41)
    try:
        devs = oracle_diff(cfg.jsa, lo, hi, count, cfg.theta[0], cfg.nodes)
    except OracleDomainError as exc:
        raise ConfigError(f"{exc}; the closed forms are only defined on the EZC phase") from None
    lines = []
    for d in devs:
        verdict = "PASS" if d.passed else "FAIL"
        lines.append(
            f"{d.name}: max rel dev = {cfg.fmt(d.max_rel)} (tol {d.rel_tol:g}), "
            f"max abs dev (|closed| < 1e-3) = {cfg.fmt(d.max_abs)} (tol {d.abs_tol:g}), "
            f"worst at tau = ({cfg.fmt(d.worst_point[0])}, {cfg.fmt(d.worst_point[1])}) {verdict}"
        )
    _emit(cfg, out, lines)
    if cfg.output:
        write_csv(cfg, ["entry", "max_rel", "max_abs", "worst_tau1", "worst_tau2", "passed"],
                  [[d.name, d.max_rel, d.max_abs, d.worst_point[0], d.worst_point[1], d.passed] for d in devs])
    return EXIT_OK if all(d.passed for d in devs) else EXIT_VERIFY


COMMANDS = {
    "qfim": cmd_qfim,
    "scan": cmd_scan,
    "ezc": cmd_ezc,
    "weakcomm": cmd_weakcomm,
    "oracle-diff": cmd_oracle_diff,
    "baseline": cmd_baseline,
}


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("interferometer and source")
    g.add_argument("--k", type=int, default=2, help="number of delay modules")
    g.add_argument("--tau", type=parse_list, default=None, help="comma list tau1..tauk (default zeros)")
    g.add_argument("--theta", type=parse_list, default=None,
                   help="comma list theta2..thetak in radians; default is the EZC solution when known, else zeros")
    g.add_argument("--theta2", type=parse_number, default=None, help="shortcut for k=2")
    g.add_argument("--no-controls", action="store_true", help="bare delay line, no splitters")
    g.add_argument("--omega0", type=parse_number, default=5.0)
    g.add_argument("--omega1", type=parse_number, default=1.0 / 3.0)
    g.add_argument("--omega2", type=parse_number, default=1.0)
    g = common.add_argument_group("numerics and output")
    g.add_argument("--nodes", type=int, default=80, help="Gauss-Hermite nodes per axis")
    g.add_argument("--copies", type=int, default=1, help="number of probe copies M for the QCRB")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--precision", type=int, default=12, help="significant digits in output")
    g.add_argument("--output", "-o", default=None, help="CSV output path")
    g.add_argument("--config", default=None, help="key = value file; flags override it")

    parser = _Parser(prog="ghom", description="GHOM interferometer QFIM toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("qfim", parents=[common], help="QFIM, determinant and QCRB at one point")
    p.add_argument("--condition-cap", type=float, default=DEFAULT_CONDITION_CAP)

    p = sub.add_parser("scan", parents=[common], help="two-axis sweep written as CSV")
    p.add_argument("--quantity", choices=QUANTITIES, default="det")
    p.add_argument("--vary", type=parse_axis, action="append", default=None,
                   help="NAME=min:max:count, e.g. tau1=-3:3:121; give exactly two")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--plot", default=None, help="also save a PNG colour map")

    p = sub.add_parser("ezc", parents=[common], help="verify the exclusive zero-coincidence property on a grid")
    p.add_argument("--grid", type=parse_range, default=None, help="min:max:count on every delay axis")
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("weakcomm", parents=[common], help="max |Im <d_i Psi|d_j Psi>| over random draws")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--tau-range", type=float, default=3.0, help="draw each tau uniformly in [-r, r]")
    p.add_argument("--random-theta", action="store_true", help="also draw the phases uniformly in [0, 2pi)")
    p.add_argument("--fixed-tau", action="store_true", help="evaluate once at --tau")

    p = sub.add_parser("oracle-diff", parents=[common], help="numeric QFIM versus closed forms (k=2)")
    p.add_argument("--grid", type=parse_range, default=None, help="min:max:count for both delays")

    sub.add_parser("baseline", parents=[common], help="QFIM of the bare delay line (no controls)")
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    values = read_config_file(known.config)
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    seen = set()
    for sp in subparsers.choices.values():
        actions = {a.dest: a for a in sp._actions}
        defaults = {}
        for key, value in values.items():
            action = actions.get(key)
            if action is None:
                continue
            seen.add(key)
            if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
                defaults[key] = _coerce_bool(key, value)
            elif isinstance(action, argparse._AppendAction):
                defaults[key] = [action.type(v) for v in value.split(";")]
            elif action.type is not None:
                try:
                    defaults[key] = action.type(value)
                except (argparse.ArgumentTypeError, ValueError) as exc:
                    raise ConfigError(f"config key {key!r}: {exc}") from None
            else:
                defaults[key] = value
        sp.set_defaults(**defaults)
    unknown = set(values) - seen
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")


def main(argv: list[str] | None = None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        cfg = build_config(args)
        return COMMANDS[args.command](cfg, out)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_CONFIG
    except ConfigError as exc:
        print(f"ghom: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericFailure, np.linalg.LinAlgError) as exc:
        print(f"ghom: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
