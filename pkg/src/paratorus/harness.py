"""Experiment orchestration: configs, manifests, CSV emission, worker pool.

Configuration is flat key-value text (``key = value`` per line, ``#``
comments); command-line flags override file keys.  Every run writes a
``manifest.txt`` with the full typed configuration plus the smoothing/cutoff
profile identifiers and the package version; its SHA-256 is appended as a
trailing ``manifest_hash`` column to every CSV the run produces, so outputs
are traceable to the exact configuration.  All outputs are byte-identical
under rerun with the same master seed, whatever the pool size.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields as dc_fields
import hashlib
import os

import numpy as np

from . import __version__
from ._bump import PROFILE_ID
from .errors import BlowUpError, ConfigurationError, EllipticityError
from .estimates import run_all_estimates
from .grid import Grid, TorusField, heat_semigroup, write_field
from .littlewood_paley import besov_norm, make_partition
from .noise import (DEFAULT_CUTOFF, noise_regularity_report, regularize,
                    sample_white_noise)
from .nonlinear import clamped_linear_fn, constant_fn, shifted_tanh_fn, tanh_fn
from .paraproducts import TimeMollifier
from .presets import PRESETS, preset_catalog
from .renorm import cauchy_study, renorm_constant
from .solver import (SolverConfig, convergence_study, counterterm_ablation,
                     exact_linear_solve, solve_renormalized)
from .symbols import (gaussian_symbol, identity_symbol, load_symbol,
                      make_modulated_symbol, power_symbol)

__all__ = ["RunConfig", "run", "preset_catalog", "parallel_map",
           "build_symbol", "build_nonlinearity", "build_initial_condition"]

SUBCOMMANDS = ("sample-noise", "renorm-constant", "renorm-study", "solve",
               "convergence-study", "ablation", "check-estimates", "presets")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


# ----------------------------------------------------------------------
# configuration

@dataclass
class RunConfig:
    subcommand: str = "presets"
    preset: str = ""
    grid: int = 64
    alpha: float = 0.9
    beta: float = 0.7
    s: float = 0.0
    mu: float = 0.5
    gamma: float = float("nan")        # nan -> 2*alpha - 2
    eps_ladder: str = "2^-2..2^-4"
    samples: int = 20
    r: float = 2.0
    dt: float = 1e-3
    t_final: float = 0.1
    t_smooth: float = float("nan")     # nan -> 4*dt
    substep_policy: str = "adaptive"
    alpha_prime: float = 0.5
    symbol: str = "identity"
    symbol_b: str = "identity"
    f: str = "const:1"
    g: str = "const:1"
    u0: str = "zero"
    floor: float = 1e-6
    cap: float = 1e3
    seed: int = 0
    out: str = "out"
    stride: int = 10
    estimate_grids: str = "64"
    gammas: str = "-1.5,-1.2,-0.9,-0.6,-0.3,0"
    emit_gnuplot: bool = False

    def eps_values(self):
        return parse_ladder(self.eps_ladder)

    def gamma_value(self):
        return 2.0 * self.alpha - 2.0 if np.isnan(self.gamma) else self.gamma

    def validate(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigurationError("unknown subcommand %r (choose from %s)"
                                     % (self.subcommand, ", ".join(SUBCOMMANDS)))
        try:
            Grid(self.grid)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None
        if self.subcommand not in ("presets", "check-estimates"):
            ladder = self.eps_values()
            if not ladder:
                raise ConfigurationError("empty eps ladder %r" % self.eps_ladder)
            for eps in ladder:
                if eps < 4.0 / self.grid - 1e-12:
                    raise ConfigurationError(
                        "eps=%g below the grid bound 4/n=%g"
                        % (eps, 4.0 / self.grid))
        if self.samples < 1:
            raise ConfigurationError("samples must be >= 1")
        if not (0 < self.alpha_prime < 1):
            raise ConfigurationError("alpha_prime must lie in (0,1)")
        return self


def parse_ladder(text):
    """Cutoff ladders: ``2^-2..2^-5`` (halving range) or a comma list."""
    text = str(text).strip()
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        start, stop = _parse_scale(lo_s), _parse_scale(hi_s)
        if start < stop:
            start, stop = stop, start
        out = []
        e = start
        while e >= stop * (1.0 - 1e-12):
            out.append(e)
            e /= 2.0
        return tuple(out)
    return tuple(_parse_scale(tok) for tok in text.split(",") if tok.strip())


def _parse_scale(tok):
    tok = tok.strip()
    if "^" in tok:
        base, expo = tok.split("^", 1)
        return float(base) ** float(expo)
    return float(tok)


_BOOL_KEYS = {"emit_gnuplot"}


def parse_config_file(path):
    """Flat ``key = value`` text; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(
                    "%s:%d: expected 'key = value', got %r" % (path, lineno, raw))
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def make_config(file_keys=None, flag_keys=None):
    """Typed RunConfig from file keys overridden by flag keys."""
    merged = {}
    preset_name = None
    for source in (file_keys or {}), (flag_keys or {}):
        for key, value in source.items():
            if value is None:
                continue
            merged[key.replace("-", "_")] = value
            if key.replace("-", "_") == "preset":
                preset_name = value
    if preset_name:
        if preset_name not in PRESETS:
            raise ConfigurationError("unknown preset %r (have: %s)"
                                     % (preset_name, ", ".join(PRESETS)))
        base = {k: v for k, v in PRESETS[preset_name].items()
                if k != "description"}
        base.update(merged)
        merged = base
    typed = {}
    by_name = {f.name: f for f in dc_fields(RunConfig)}
    for key, value in merged.items():
        if key not in by_name:
            raise ConfigurationError("unknown configuration key %r" % key)
        typed[key] = _coerce(key, value, by_name[key].type)
    return RunConfig(**typed)


def _coerce(key, value, typ):
    if not isinstance(value, str):
        return value
    try:
        if key in _BOOL_KEYS:
            return value.lower() in ("1", "true", "yes", "on")
        if typ in (int, "int"):
            return int(value)
        if typ in (float, "float"):
            return float(value)
        return value
    except ValueError as exc:
        raise ConfigurationError("bad value for %s: %r (%s)"
                                 % (key, value, exc)) from None


# ----------------------------------------------------------------------
# builders

def build_symbol(spec, grid, alpha=1.0, mu=0.5):
    """Symbol from a spec string: builtin name[:params] or ``file:<path>``."""
    name, _, params = str(spec).partition(":")
    name = name.strip().lower()
    if name == "identity":
        return identity_symbol(grid, alpha=alpha)
    if name == "gaussian":
        return gaussian_symbol(grid, float(params or "1e-4"), alpha=alpha)
    if name == "power":
        return power_symbol(grid, float(params or "-0.5"), alpha=alpha)
    if name == "modulated":
        opts = _parse_params(params, {"amp": 0.5, "kmin": 8.0, "s": -1.0})
        theta = TorusField.from_physical(
            grid, 1.0 + opts["amp"] * np.cos(grid.x[0]), real=True)

        def m(k1, k2):
            kn = np.hypot(k1, k2)
            return np.where(kn >= opts["kmin"],
                            (1.0 + kn) ** opts["s"], 0.0)

        return make_modulated_symbol(grid, theta, m, mu=mu, order=opts["s"],
                                     alpha=alpha, name="modulated")
    if name == "file":
        sym = load_symbol(params)
        if sym.grid != grid:
            raise ConfigurationError("symbol file grid n=%d != config grid "
                                     "n=%d" % (sym.grid.n, grid.n))
        return sym
    raise ConfigurationError("unknown symbol spec %r" % spec)


def _parse_params(text, defaults):
    out = dict(defaults)
    for tok in (text or "").split(","):
        tok = tok.strip()
        if not tok:
            continue
        key, _, val = tok.partition("=")
        if key not in out:
            raise ConfigurationError("unknown symbol parameter %r" % key)
        out[key] = float(val)
    return out


def build_nonlinearity(spec):
    name, _, params = str(spec).partition(":")
    name = name.strip().lower()
    if name in ("const", "constant"):
        return constant_fn(float(params or "1"))
    if name == "tanh":
        return tanh_fn()
    if name in ("tanhshift", "shifted-tanh"):
        return shifted_tanh_fn(float(params or "2"))
    if name in ("clamped", "clamped-linear"):
        opts = _parse_params(params, {"a": 1.0, "r": 2.0})
        return clamped_linear_fn(opts["a"], opts["r"])
    raise ConfigurationError("unknown nonlinearity spec %r" % spec)


def build_initial_condition(spec, grid):
    name = str(spec).strip().lower()
    if name == "zero":
        return TorusField.zero(grid)
    if name == "coscos":
        return TorusField.from_physical(
            grid, np.cos(grid.x[0]) + np.sin(grid.x[1]), real=True)
    if name.startswith("const:"):
        return TorusField.constant(grid, float(name.split(":", 1)[1]))
    raise ConfigurationError("unknown initial condition %r" % spec)


def solver_config_from(cfg):
    grid = Grid(cfg.grid)
    kwargs = dict(
        grid=grid, alpha=cfg.alpha, beta=cfg.beta,
        a=build_symbol(cfg.symbol, grid, alpha=cfg.alpha, mu=cfg.mu),
        b=build_symbol(cfg.symbol_b, grid, alpha=cfg.alpha, mu=cfg.mu),
        f=build_nonlinearity(cfg.f), g=build_nonlinearity(cfg.g),
        eps=cfg.eps_values()[0], dt=cfg.dt, t_final=cfg.t_final,
        substep_policy=cfg.substep_policy, seed=cfg.seed,
        floor=cfg.floor, blowup_cap=cfg.cap)
    if not np.isnan(cfg.t_smooth):
        kwargs["t_smooth"] = cfg.t_smooth
    return SolverConfig(**kwargs).validate()


# ----------------------------------------------------------------------
# worker pool

def pool_size():
    """Worker count, capped by the PARATORUS_THREADS environment variable."""
    raw = os.environ.get("PARATORUS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Order-preserving map over independent tasks.

    With a pool the per-item work runs concurrently, but results come back
    in submission order, so downstream reductions are bit-identical to the
    serial path.
    """
    workers = pool_size()
    items = list(items)
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ----------------------------------------------------------------------
# manifests and CSV output

def format_value(value):
    if isinstance(value, float):
        return "%.17g" % value
    if isinstance(value, (np.floating,)):
        return "%.17g" % float(value)
    return str(value)


_NON_SEMANTIC_KEYS = {"out", "emit_gnuplot"}   # don't affect computed values


def manifest_text(cfg, extra=None):
    pairs = {f.name: getattr(cfg, f.name) for f in dc_fields(RunConfig)
             if f.name not in _NON_SEMANTIC_KEYS}
    pairs["profile_chi"] = DEFAULT_CUTOFF.name
    pairs["profile_phi"] = TimeMollifier().identifier
    pairs["profile_family"] = PROFILE_ID
    pairs["version"] = __version__
    if extra:
        pairs.update(extra)
    lines = ["%s = %s" % (key, format_value(pairs[key]))
             for key in sorted(pairs)]
    return "\n".join(lines) + "\n"


def manifest_hash(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class OutputWriter:
    """Writes manifests and hash-stamped CSVs into the run directory."""

    def __init__(self, cfg, extra=None):
        self.cfg = cfg
        self.dir = cfg.out
        os.makedirs(self.dir, exist_ok=True)
        self.manifest = manifest_text(cfg, extra)
        self.hash = manifest_hash(self.manifest)
        with open(self._path("manifest.txt"), "w") as fh:
            fh.write(self.manifest)
        self.csv_files = []

    def _path(self, name):
        return os.path.join(self.dir, name)

    def write_csv(self, name, columns, rows):
        path = self._path(name)
        with open(path, "w", newline="") as fh:
            fh.write(",".join(tuple(columns) + ("manifest_hash",)) + "\n")
            for row in rows:
                cells = [format_value(v) for v in row]
                fh.write(",".join(cells + [self.hash]) + "\n")
        self.csv_files.append(name)
        return path

    def write_text(self, name, text):
        with open(self._path(name), "w") as fh:
            fh.write(text)
        return self._path(name)

    def write_failure(self, category, message):
        self.write_text("failure.txt",
                        "category = %s\nmessage = %s\n" % (category, message))

    def maybe_gnuplot(self):
        if not self.cfg.emit_gnuplot or not self.csv_files:
            return
        lines = ["set datafile separator ','", "set key autotitle columnhead"]
        for name in self.csv_files:
            lines.append("plot '%s' using 1:2 with linespoints" % name)
            lines.append("pause -1")
        self.write_text("plots.gp", "\n".join(lines) + "\n")


# ----------------------------------------------------------------------
# subcommand implementations

def _run_sample_noise(cfg, out):
    grid = Grid(cfg.grid)
    gammas = tuple(float(t) for t in cfg.gammas.split(","))
    report = noise_regularity_report(grid, cfg.eps_values(), gammas,
                                     cfg.samples, cfg.seed)
    out.write_csv("noise_regularity.csv",
                  ("epsilon", "gamma", "mean_besov"),
                  list(report.rows()))
    xi = sample_white_noise(grid, cfg.seed)
    write_field(out._path("noise_seed%d.field" % cfg.seed), xi.field)
    summary = "max_bounded_gamma = %s\n" % format_value(report.max_bounded_gamma)
    out.write_text("summary.txt", summary)


def _run_renorm_constant(cfg, out):
    grid = Grid(cfg.grid)
    symbol = build_symbol(cfg.symbol, grid, alpha=cfg.alpha, mu=cfg.mu)
    part = make_partition(grid)
    rows = []
    for eps in cfg.eps_values():
        c = renorm_constant(symbol, eps, part)
        phys = np.real(c.physical)
        rows.append((eps, float(np.real(c.mean())), float(phys.min()),
                     float(phys.max())))
    out.write_csv("renorm_constant.csv",
                  ("epsilon", "c_mean", "c_min", "c_max"), rows)


def _run_renorm_study(cfg, out):
    grid = Grid(cfg.grid)
    symbol = build_symbol(cfg.symbol, grid, alpha=cfg.alpha, mu=cfg.mu)
    gamma = cfg.gamma_value()
    study = cauchy_study(symbol, cfg.eps_values(), cfg.samples, cfg.r, gamma,
                         cfg.seed, map_fn=parallel_map)
    sup_by_eps = dict(study.unrenorm_sup_means)
    mean_by_eps = dict(study.unrenorm_means)
    rows = []
    for eps, eta, moment in study.rows:
        rows.append((eps, eta, gamma, cfg.r, cfg.samples, moment,
                     sup_by_eps[eps], study.c_slope, mean_by_eps[eps]))
    out.write_csv("renorm_study.csv",
                  ("epsilon", "eta", "gamma", "r", "M", "moment",
                   "unrenorm_sup_mean", "c_slope", "unrenorm_mean"), rows)
    summary = (
        "monotone_decreasing = %s\nmoment_slope = %s\nc_slope = %s\n"
        "unrenorm_slope = %s\ndivergence_slope = %s\n"
        % (study.monotone_decreasing, format_value(study.moment_slope),
           format_value(study.c_slope), format_value(study.unrenorm_slope),
           format_value(study.divergence_slope)))
    out.write_text("summary.txt", summary)


def _run_solve(cfg, out):
    scfg = solver_config_from(cfg)
    grid = scfg.grid
    xi = sample_white_noise(grid, cfg.seed)
    u0 = build_initial_condition(cfg.u0, grid)
    traj = solve_renormalized(scfg, xi, u0)
    part = make_partition(grid)
    rows = []
    for i, f in enumerate(traj.fields):
        rows.append((i, i * traj.dt, f.sup_norm(), float(np.real(f.mean())),
                     besov_norm(f, cfg.alpha, part)))
        if i % cfg.stride == 0 or i == len(traj) - 1:
            write_field(out._path("snapshot_%05d.field" % i), f,
                        representation="spectral")
    out.write_csv("trajectory.csv",
                  ("node", "time", "sup_norm", "mean", "besov_alpha"), rows)
    if scfg.f.name == "const(1)" and scfg.g.name == "const(1)" \
            and scfg.a.is_identity and scfg.b.is_identity:
        start = heat_semigroup(u0, scfg.t_smooth) if scfg.t_smooth > 0 else u0
        exact = exact_linear_solve(regularize(xi.field, scfg.eps), 1.0,
                                   start, scfg.t_final, scfg.dt)
        err = max((a - b).sup_norm()
                  for a, b in zip(traj.fields, exact.fields))
        out.write_text("summary.txt", "exact_oracle_sup_error = %s\n"
                       % format_value(err))


def _run_convergence(cfg, out):
    scfg = solver_config_from(cfg)
    u0 = build_initial_condition(cfg.u0, scfg.grid)
    study = convergence_study(scfg, u0, cfg.eps_values(), cfg.samples,
                              cfg.alpha_prime, cfg.seed, map_fn=parallel_map)
    rows = [(eps, eta, cfg.alpha_prime, used, mean)
            for eps, eta, mean, used in study.rows]
    out.write_csv("convergence_study.csv",
                  ("epsilon", "eta", "alpha_prime", "samples_used",
                   "mean_parabolic_diff"), rows)
    summary = ("monotone_decreasing = %s\nloglog_slope = %s\nfailures = %d\n"
               % (study.monotone_decreasing,
                  format_value(study.loglog_slope), len(study.failures)))
    out.write_text("summary.txt", summary)
    if study.failures:
        out.write_csv("failures.csv", ("sample", "epsilon", "message"),
                      [(s, e, msg.replace(",", ";"))
                       for s, e, msg in study.failures])


def _run_ablation(cfg, out):
    scfg = solver_config_from(cfg)
    u0 = build_initial_condition(cfg.u0, scfg.grid)
    study = counterterm_ablation(scfg, u0, cfg.eps_values(), cfg.samples,
                                 cfg.seed, map_fn=parallel_map)
    rows = [(eps, used, mean) for eps, mean, used in study.rows]
    out.write_csv("ablation.csv",
                  ("epsilon", "samples_used", "mean_ct_gap"), rows)
    summary = ("monotone_increasing = %s\nloglog_slope = %s\nfailures = %d\n"
               % (study.monotone_increasing,
                  format_value(study.loglog_slope), len(study.failures)))
    out.write_text("summary.txt", summary)


def _run_check_estimates(cfg, out):
    n_values = tuple(int(t) for t in cfg.estimate_grids.split(","))
    reports = run_all_estimates(n_values=n_values, samples=cfg.samples,
                                master_seed=cfg.seed, map_fn=parallel_map)
    by_name = {}
    for rep in reports:
        by_name.setdefault(rep.name, []).append(rep)
    for name, reps in by_name.items():
        rows = [(rep.n, rep.samples, rep.max_ratio, rep.mean_ratio)
                for rep in reps]
        out.write_csv("estimate_%s.csv" % name,
                      ("n", "samples", "max_ratio", "mean_ratio"), rows)


def _run_presets(cfg, out):
    rows = []
    for name, spec in preset_catalog().items():
        rows.append((name, spec.get("description", "").replace(",", ";")))
    out.write_csv("presets.csv", ("name", "description"), rows)
    for name in PRESETS:
        make_config(flag_keys={"preset": name, "subcommand": "presets"}).validate()


_SUBCOMMAND_IMPL = {
    "sample-noise": _run_sample_noise,
    "renorm-constant": _run_renorm_constant,
    "renorm-study": _run_renorm_study,
    "solve": _run_solve,
    "convergence-study": _run_convergence,
    "ablation": _run_ablation,
    "check-estimates": _run_check_estimates,
    "presets": _run_presets,
}


def run(cfg):
    """Execute one subcommand; returns the process exit status.

    Configuration errors exit with status 2 before touching the output
    directory where possible; numerical failures exit with status 3 and
    leave a machine-readable ``failure.txt`` next to any partial outputs.
    """
    try:
        cfg.validate()
    except ConfigurationError as exc:
        print("configuration error: %s" % exc)
        return EXIT_CONFIG
    out = OutputWriter(cfg)
    try:
        _SUBCOMMAND_IMPL[cfg.subcommand](cfg, out)
        out.maybe_gnuplot()
        return EXIT_OK
    except ConfigurationError as exc:
        out.write_failure("configuration", str(exc))
        print("configuration error: %s" % exc)
        return EXIT_CONFIG
    except EllipticityError as exc:
        out.write_failure("ellipticity", str(exc))
        print("numerical failure: %s" % exc)
        return EXIT_NUMERICAL
    except BlowUpError as exc:
        out.write_failure("blowup", str(exc))
        print("numerical failure: %s" % exc)
        return EXIT_NUMERICAL
