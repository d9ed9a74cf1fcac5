"""Command-line surface: verification, simulation, drift, chart maps,
figure data, and the auxiliary-function checks.

Configuration comes from an optional ``--config`` file of ``key = value``
lines plus ``key=value`` overrides on the command line; flags
(``--seed``, ``--format``, ``--out``) win over both.  Every value is
validated before any computation and all problems are reported together
(exit code 2).  Runs are deterministic for a fixed config; reports that
sample random points record the seed.

Exit codes: 0 success / all checks pass, 1 a check failed or the run
ended early, 2 invalid configuration.
"""

import argparse
import csv
import dataclasses
import io
import json
import math
import sys

from . import appendix, transforms, verify
from .coalgebra import CasimirSpec, NCopyState, casimir_value
from .coeffexpr import as_function
from .errors import CoeffParseError, ConfigError, LhdeformError, StiffnessError
from .integrator import COMPLETED, drift_series, integrate
from .sl2systems import (CoefficientSet, Family, assemble_system,
                         build_realization, mp_coefficients, pdm_profile)

_MISSING = object()


def _parse_config_file(path):
    """key = value lines; blank lines and # comments ignored."""
    pairs = {}
    errors = []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError([f"cannot read config file: {exc}"])
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            errors.append(f"{path}:{lineno}: expected key = value, got {stripped!r}")
            continue
        key, _, value = stripped.partition("=")
        pairs[key.strip()] = _unquote(value.strip())
    if errors:
        raise ConfigError(errors)
    return pairs


def _unquote(s):
    if len(s) >= 2 and s[0] == s[-1] and s[0] in "'\"":
        return s[1:-1]
    return s


def _parse_overrides(items):
    pairs = {}
    errors = []
    for item in items:
        if "=" not in item:
            errors.append(f"override {item!r} is not of the form key=value")
            continue
        key, _, value = item.partition("=")
        pairs[key.strip()] = _unquote(value.strip())
    if errors:
        raise ConfigError(errors)
    return pairs


class RunConfig:
    """Typed view of the key-value pairs; collects every error before failing."""

    # always legal because the flags may also live in the file
    GLOBAL_KEYS = frozenset({"seed", "format", "out"})

    def __init__(self, pairs, allowed):
        self.pairs = dict(pairs)
        self.errors = []
        unknown = set(pairs) - set(allowed) - self.GLOBAL_KEYS
        for key in sorted(unknown):
            self.errors.append(
                f"unknown key {key!r}; expected one of: "
                + ", ".join(sorted(allowed)))

    def _raw(self, key, default):
        if key in self.pairs:
            return self.pairs[key]
        if default is _MISSING:
            self.errors.append(f"missing required key {key!r}")
        return default

    def error(self, message):
        self.errors.append(message)

    def str_value(self, key, default=_MISSING):
        raw = self._raw(key, default)
        return None if raw is _MISSING else raw

    def float_value(self, key, default=_MISSING):
        raw = self._raw(key, default)
        if raw is _MISSING or raw is None or isinstance(raw, float):
            return None if raw is _MISSING else raw
        try:
            v = float(raw)
        except ValueError:
            self.errors.append(f"{key}: expected a number, got {raw!r}")
            return None
        if not math.isfinite(v):
            self.errors.append(f"{key}: must be finite, got {raw!r}")
            return None
        return v

    def int_value(self, key, default=_MISSING, minimum=None):
        raw = self._raw(key, default)
        if raw is _MISSING or raw is None or isinstance(raw, int):
            v = None if raw is _MISSING else raw
        else:
            try:
                v = int(raw)
            except ValueError:
                self.errors.append(f"{key}: expected an integer, got {raw!r}")
                return None
        if v is not None and minimum is not None and v < minimum:
            self.errors.append(f"{key}: must be >= {minimum}, got {v}")
            return None
        return v

    def choice(self, key, options, default=_MISSING):
        raw = self._raw(key, default)
        if raw is _MISSING or raw is None:
            return None if raw is _MISSING else raw
        if raw not in options:
            self.errors.append(
                f"{key}: expected one of {', '.join(options)}; got {raw!r}")
            return None
        return raw

    def float_list(self, key, default=_MISSING):
        raw = self._raw(key, default)
        if raw is _MISSING or raw is None or isinstance(raw, (tuple, list)):
            return None if raw is _MISSING else raw
        out = []
        for part in raw.split(","):
            try:
                out.append(float(part))
            except ValueError:
                self.errors.append(f"{key}: {part.strip()!r} is not a number")
                return None
        if not out:
            self.errors.append(f"{key}: empty list")
            return None
        return out

    def point(self, key, default=_MISSING):
        vs = self.float_list(key, default)
        if vs is None or vs is default:
            return vs
        if len(vs) != 2:
            self.errors.append(f"{key}: expected two numbers x,y")
            return None
        return tuple(vs)

    def span(self, key, default=_MISSING):
        vs = self.float_list(key, default)
        if vs is None or vs is default:
            return vs
        if len(vs) != 2 or not vs[1] > vs[0]:
            self.errors.append(f"{key}: expected t0,t1 with t1 > t0")
            return None
        return tuple(vs)

    def expr(self, key, default=_MISSING):
        raw = self._raw(key, default)
        if raw is _MISSING or raw is None or callable(raw):
            return None if raw is _MISSING else raw
        try:
            return as_function(raw)
        except CoeffParseError as exc:
            self.errors.append(f"{key}: {exc}")
            return None

    def family(self, key="family", default=_MISSING):
        raw = self.choice(key, ("mp", "cr", "2r"), default)
        return None if raw is None else Family(raw)

    def raise_if_errors(self):
        if self.errors:
            raise ConfigError(self.errors)


def _fmt12(v):
    return f"{v:.12g}"


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_table(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt12(v) for v in row])
    return buf.getvalue()


def _json_clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _json_table(columns, rows):
    payload = {
        "schema_version": 1,
        "columns": list(columns),
        "rows": [[_json_clean(v) for v in row] for row in rows],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _emit_table(columns, rows, fmt, out):
    text = (_csv_table if fmt == "csv" else _json_table)(columns, rows)
    _emit(text, out)


def _emit_json(obj, out):
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", out)


def _realization(cfg: RunConfig):
    family = cfg.family()
    z = cfg.float_value("z", 0.0)
    c = cfg.float_value("c", None)
    if family is Family.MP and c is None:
        cfg.error("c: required for the mp family")
        return None
    if None in (family, z):
        return None
    try:
        return build_realization(family, z, c)
    except (ValueError, LhdeformError) as exc:
        cfg.error(str(exc))
        return None


def _coefficients(cfg: RunConfig, family):
    """Either omega_sq=<expr> (mp oscillator shorthand) or b1/b2/b3 exprs."""
    if "omega_sq" in cfg.pairs:
        for key in ("b1", "b2", "b3"):
            if key in cfg.pairs:
                cfg.error(f"{key}: give either omega_sq or b1/b2/b3, not both")
        if family is not None and family is not Family.MP:
            cfg.error("omega_sq: only meaningful for the mp family")
        omega = cfg.expr("omega_sq")
        return None if omega is None else mp_coefficients(omega)
    bs = [cfg.expr(key, "0") for key in ("b1", "b2", "b3")]
    if all(callable(b) for b in bs):
        label = ", ".join(getattr(b, "source", "0") for b in bs)
        return CoefficientSet(*bs, label=label)
    return None


_SIM_KEYS = ("family", "z", "c", "omega_sq", "b1", "b2", "b3", "state",
             "t_span", "rtol", "atol", "samples")


def cmd_simulate(cfg: RunConfig, fmt, out):
    """One-copy trajectory: t, x, y, h_z(t), F_z at the sample times."""
    r = _realization(cfg)
    coeffs = _coefficients(cfg, None if r is None else r.family)
    state = cfg.point("state")
    span = cfg.span("t_span")
    rtol = cfg.float_value("rtol", 1e-9)
    atol = cfg.float_value("atol", 1e-12)
    n = cfg.int_value("samples", 201, minimum=2)
    cfg.raise_if_errors()

    system = assemble_system(r, coeffs)
    t0, t1 = span
    t_eval = [t0 + (t1 - t0) * i / (n - 1) for i in range(n)]
    trouble = None
    try:
        traj = integrate(lambda t, y: system.rhs(t, y[0], y[1]), state, span,
                         rtol=rtol, atol=atol, t_eval=t_eval,
                         guard=None if r.chart.gap is None
                         else lambda y: r.chart.gap(y[0], y[1]))
    except StiffnessError as exc:
        if exc.trajectory is None:
            raise
        traj, trouble = exc.trajectory, str(exc)
    else:
        if traj.termination != COMPLETED:
            trouble = (f"{traj.termination} at "
                       f"t = {traj.termination_time:.6g}")
    spec = CasimirSpec(deformed=True)
    rows = [(t, x, y, system.hamiltonian(t, x, y),
             casimir_value(r, spec, (x, y)))
            for t, (x, y) in traj.samples()]
    _emit_table(("t", "x", "y", "h_z", "F_z"), rows, fmt, out)
    if trouble is not None:
        print(f"warning: integration ended early ({trouble}); partial output",
              file=sys.stderr)
        return 1
    return 0


_DRIFT_KEYS = ("family", "z", "c", "omega_sq", "b1", "b2", "b3", "state1",
               "state2", "t_span", "rtol", "atol", "samples")


def cmd_drift(cfg: RunConfig, fmt, out):
    """Two-copy invariant series plus a drift summary.

    The series (t, F2) goes to --out in the requested format; the summary
    JSON goes to stdout, or to stderr when the series itself is on stdout.
    """
    r = _realization(cfg)
    coeffs = _coefficients(cfg, None if r is None else r.family)
    p1 = cfg.point("state1")
    p2 = cfg.point("state2")
    span = cfg.span("t_span")
    rtol = cfg.float_value("rtol", 1e-10)
    atol = cfg.float_value("atol", 1e-12)
    n = cfg.int_value("samples", 201, minimum=2)
    cfg.raise_if_errors()

    times, values, report = drift_series(r, coeffs, NCopyState((p1, p2)),
                                         span, rtol=rtol, atol=atol,
                                         n_samples=n)
    _emit_table(("t", "F2"), list(zip(times, values)), fmt, out)
    summary = dataclasses.asdict(report)
    summary.update(schema_version=1, family=r.family.value, z=r.z, c=r.c)
    stream = sys.stdout if out else sys.stderr
    stream.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return 0 if report.termination == COMPLETED else 1


_PDM_KEYS = ("zs", "x_min", "x_max", "x_points")


def cmd_pdm(cfg: RunConfig, fmt, out):
    """Mass and potential profiles on an x-grid, one block per z."""
    zs = cfg.float_list("zs", (0.0, 0.1, 0.5, 1.0))
    x_min = cfg.float_value("x_min", -3.0)
    x_max = cfg.float_value("x_max", 3.0)
    n = cfg.int_value("x_points", 121, minimum=2)
    if None not in (x_min, x_max) and not x_max > x_min:
        cfg.error("x_max must exceed x_min")
    cfg.raise_if_errors()

    xs = [x_min + (x_max - x_min) * i / (n - 1) for i in range(n)]
    rows = []
    for z in zs:
        rows.extend(pdm_profile(z).rows(xs))
    _emit_table(("x", "z", "m_z", "U_osc", "U_rw"), rows, fmt, out)
    return 0


_MAP_KEYS = ("map", "branch", "point", "direction")

_MAP_BUILDERS = {
    "cr": transforms.mp_to_cr,
    "2r": transforms.mp_to_2r,
    "i7": lambda branch=None: transforms.i7_chart(),
}


def cmd_map(cfg: RunConfig, fmt, out):
    """Send one point through a chart map; report image and diagnostics."""
    name = cfg.choice("map", ("cr", "2r", "i7"))
    branch = cfg.choice("branch", (transforms.PLUS, transforms.MINUS),
                        transforms.PLUS)
    p = cfg.point("point")
    direction = cfg.choice("direction", ("forward", "inverse"), "forward")
    cfg.raise_if_errors()

    m = _MAP_BUILDERS[name](branch)
    if direction == "forward":
        q = transforms.map_point(m, p)
        back = transforms.invert_point(m, q)
    else:
        q = transforms.invert_point(m, p)
        back = transforms.map_point(m, q)
    roundtrip = math.hypot(back[0] - p[0], back[1] - p[1])
    jac = transforms.map_jacobian(m, p if direction == "forward" else q)
    det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0]

    if fmt == "csv":
        _emit_table(("x_in", "y_in", "x_out", "y_out"), [(*p, *q)], fmt, out)
        return 0
    result = {
        "schema_version": 1,
        "map": m.name,
        "branch": branch,
        "direction": direction,
        "input": list(p),
        "output": list(q),
        "jacobian": [list(row) for row in jac],
        "jacobian_det": det,
        "roundtrip_error": roundtrip,
    }
    _emit_json(result, out)
    return 0


_VERIFY_KEYS = ("families", "z_grid", "mp_couplings")


def cmd_verify(cfg: RunConfig, fmt, out, seed):
    """Run the identity suites over the configured grid; exit 0 iff all pass."""
    families_raw = cfg.str_value("families", "mp,cr,2r")
    families = tuple(f.strip() for f in families_raw.split(","))
    for f in families:
        if f not in ("mp", "cr", "2r"):
            cfg.error(f"families: unknown family {f!r}")
    z_grid = cfg.float_list("z_grid", verify.DEFAULT_Z_GRID)
    mp_c = cfg.float_list("mp_couplings", verify.DEFAULT_MP_COUPLINGS)
    cfg.raise_if_errors()

    report = verify.run_verification(families, z_grid, mp_c, seed=seed)
    if fmt == "csv":
        cols = ("suite", "identity", "family", "z", "c", "samples",
                "max_residual", "tolerance", "passed")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for s in report["suites"]:
            w.writerow([s["suite"], s["identity"], s["family"],
                        _fmt12(s["z"]), _fmt12(s["c"]), s["samples"],
                        _fmt12(s["max_residual"]), _fmt12(s["tolerance"]),
                        s["passed"]])
        _emit(buf.getvalue(), out)
    else:
        _emit_json(report, out)
    return 0 if report["passed"] else 1


# tolerance for the integrate-and-fit deviation is looser than the pointwise
# residuals: it carries integrator error over a whole span
_APPENDIX_RESIDUAL_TOL = 1e-10
_APPENDIX_FIT_TOL = 1e-6


def cmd_appendix(fmt, out):
    """Residual and structure checks for the auxiliary-function appendix."""
    shc_params = appendix.ShcODEParams(eta=1.0, A=1.0, B=0.5)
    sinc_params = appendix.SincODEParams(lam=1.0, A=-0.3, B=1.2)
    ts = [0.1 + (6.0 - 0.1) * i / 199 for i in range(200)]
    shc_res = max(abs(appendix.shc_ode_residual(shc_params, t)) for t in ts)
    sinc_res = max(abs(appendix.sinc_ode_residual(sinc_params, t)) for t in ts)

    fit = appendix.integrate_and_fit(appendix.ShcODEParams(0.9, 0.7, -0.4),
                                     0.5, 4.0)
    gl2 = appendix.gl2_commutator_check((0.7, -1.3))

    checks = {
        "shc_ode_max_residual": (shc_res, _APPENDIX_RESIDUAL_TOL),
        "sinc_ode_max_residual": (sinc_res, _APPENDIX_RESIDUAL_TOL),
        "fit_max_deviation": (fit.max_deviation, _APPENDIX_FIT_TOL),
        "gl2_max_residual": (gl2.max_residual, _APPENDIX_RESIDUAL_TOL),
    }
    report = {
        "schema_version": 1,
        "t_grid": [ts[0], ts[-1], len(ts)],
        "shc_ode": {"eta": shc_params.eta, "A": shc_params.A,
                    "B": shc_params.B, "max_residual": shc_res},
        "sinc_ode": {"lam": sinc_params.lam, "A": sinc_params.A,
                     "B": sinc_params.B, "max_residual": sinc_res},
        "fit": dataclasses.asdict(fit),
        "gl2": {"commutators": gl2.commutator_residuals,
                "pushforwards": gl2.pushforward_residuals,
                "max_residual": gl2.max_residual},
        "checks": {name: {"value": v, "tolerance": tol, "passed": v <= tol}
                   for name, (v, tol) in checks.items()},
    }
    report["passed"] = all(c["passed"] for c in report["checks"].values())
    _emit_json(report, out)
    return 0 if report["passed"] else 1


_COMMANDS = {
    "verify": (_VERIFY_KEYS, "run the identity verification suites"),
    "simulate": (_SIM_KEYS, "integrate one copy and emit t,x,y,h_z,F_z"),
    "drift": (_DRIFT_KEYS, "track the two-copy invariant along the lifted flow"),
    "map": (_MAP_KEYS, "send a point through a chart map"),
    "pdm": (_PDM_KEYS, "emit mass/potential profiles on an x-grid"),
    "appendix": ((), "check the auxiliary-function identities"),
}

_DEFAULT_FORMAT = {"verify": "json", "appendix": "json"}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="lhdeform",
        description="Deformed sl(2) Lie-Hamilton systems: verification, "
                    "simulation, invariant drift, chart maps, figure data.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, (_, help_text) in _COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--seed", type=int, help="seed for sampled points")
        p.add_argument("--format", choices=("csv", "json"),
                       help="output format (default: csv for tables, "
                            "json for reports)")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("overrides", nargs="*", metavar="KEY=VALUE",
                       help="config entries overriding the file")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        pairs = {}
        if args.config:
            pairs.update(_parse_config_file(args.config))
        pairs.update(_parse_overrides(args.overrides))

        allowed, _ = _COMMANDS[args.command]
        cfg = RunConfig(pairs, allowed)
        fmt = args.format or pairs.get("format") or \
            _DEFAULT_FORMAT.get(args.command, "csv")
        if fmt not in ("csv", "json"):
            cfg.error(f"format: expected csv or json, got {fmt!r}")
        out = args.out or pairs.get("out") or None
        seed = args.seed if args.seed is not None \
            else cfg.int_value("seed", 2026)

        if args.command == "verify":
            return cmd_verify(cfg, fmt, out, seed)
        if args.command == "simulate":
            return cmd_simulate(cfg, fmt, out)
        if args.command == "drift":
            return cmd_drift(cfg, fmt, out)
        if args.command == "map":
            return cmd_map(cfg, fmt, out)
        if args.command == "pdm":
            return cmd_pdm(cfg, fmt, out)
        cfg.raise_if_errors()
        return cmd_appendix(fmt, out)
    except ConfigError as exc:
        for message in exc.errors:
            print(f"config error: {message}", file=sys.stderr)
        return 2
    except LhdeformError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
