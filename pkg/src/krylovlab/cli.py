"""Command-line entry point: ``krylovlab <subcommand> [flags]``.

Every subcommand produces one :class:`~krylovlab.io.ResultTable`, written as
CSV (default) or JSON to ``--output`` or stdout. Output is a pure function of
the flags and the code version; ``--timing`` opts into a wall-time field.

Exit codes: 0 success, 2 invalid configuration, 3 numeric domain error.
"""

from __future__ import annotations

import argparse
import math
import multiprocessing
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .classical import (
    SpherePolynomial,
    alpha_curve,
    classical_lanczos,
    energy_range,
    find_saddles_fp,
    find_saddles_lmg,
    fp_coupling_map,
    fp_lower_bound_alpha,
    fp_saddle_exponent,
    sup_alpha,
)
from .errors import DomainError, InvalidArgument, KrylovLabError
from .evolution import (
    autocorrelation_from_wavefunction,
    default_times,
    evolve_wavefunction,
    fit_exponential,
    k_complexity,
    otoc,
)
from .io import ResultTable, format_value, read_config_file
from .krylov import (
    InnerProductSpec,
    decompose_oscillation,
    fit_linear_slope,
    fit_power_law,
    lanczos,
    microcanonical_inner_spec,
)
from .models import build_fp, build_lmg, eigendecompose
from .spin_algebra import as_spin

EXIT_OK, EXIT_INVALID, EXIT_DOMAIN = 0, 2, 3
DEFAULT_MAX_N = 3000
MP_BITS = 512
MP_MAX_DIM = 200
# flags that only steer where/how results are written; never echoed into metadata
OUTPUT_KEYS = ("output", "format", "plot", "gnuplot", "timing", "config")


@dataclass
class RunConfig:
    """Validated settings of one run; ``extra`` carries command-specific knobs."""

    command: str
    model: str = "lmg"
    spin: Fraction | None = None
    coupling: float | None = None
    seed_operator: str | None = None
    seed_file: str | None = None
    inner: str = "infinite"
    energy: float | None = None
    window: float | None = None
    max_n: int | None = None
    t_max: float = 20.0
    points: int | None = None
    precision: str = "auto"
    fit_n: tuple | None = None
    fit_t: tuple | None = None
    output: str | None = None
    format: str = "csv"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in ("lmg", "fp"):
            raise InvalidArgument(f"model must be 'lmg' or 'fp', got {self.model!r}")
        if self.inner not in ("infinite", "micro"):
            raise InvalidArgument(f"inner must be 'infinite' or 'micro', got {self.inner!r}")
        if self.format not in ("csv", "json"):
            raise InvalidArgument(f"format must be 'csv' or 'json', got {self.format!r}")
        for name in ("coupling", "energy", "window", "t_max"):
            v = getattr(self, name)
            if v is not None and not math.isfinite(v):
                raise InvalidArgument(f"{name} must be finite")
        for k, v in self.extra.items():
            if isinstance(v, float) and not math.isfinite(v):
                raise InvalidArgument(f"{k} must be finite")
        if self.max_n is not None and self.max_n < 0:
            raise InvalidArgument("max-n must be non-negative")
        if self.points is not None and self.points < 2:
            raise InvalidArgument("points must be at least 2")
        if not self.t_max > 0:
            raise InvalidArgument("t-max must be positive")
        if self.spin is not None:
            self.spin = as_spin(self.spin)

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        d = {k: v for k, v in vars(ns).items() if k not in ("func", "timing", "plot", "gnuplot", "config")}
        known = {f for f in cls.__dataclass_fields__ if f != "extra"}
        base = {k: v for k, v in d.items() if k in known}
        if "seed" in d:
            base["seed_operator"] = d["seed"]
        extra = {k: v for k, v in d.items() if k not in known and k != "seed"}
        return cls(**base, extra=extra)

    def echo(self, flags=None) -> dict:
        """Flag values needed to re-run the command, keyed as in a config file.

        ``flags`` restricts the echo to the options the subcommand accepts.
        """
        out = {}
        for k in sorted(self.__dataclass_fields__):
            if k in ("command", "extra") or k in OUTPUT_KEYS:
                continue
            if flags is not None and k not in flags and not (k == "seed_operator" and "seed" in flags):
                continue
            v = getattr(self, k)
            if v is None:
                continue
            out[f"config.{k}"] = _echo_value(v)
        for k in sorted(self.extra):
            if self.extra[k] is not None:
                out[f"config.{k}"] = _echo_value(self.extra[k])
        return out


def _echo_value(v):
    if isinstance(v, tuple):
        return ":".join(format_value(x) for x in v)
    return str(v) if isinstance(v, Fraction) else v


# --- argument types -----------------------------------------------------------


def _finite_float(s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite: {s!r}")
    return v


def _spin(s: str) -> Fraction:
    try:
        return as_spin(Fraction(s))
    except (ValueError, ZeroDivisionError, InvalidArgument) as exc:
        raise argparse.ArgumentTypeError(f"invalid spin {s!r}: {exc}") from None


def _range_pair(s: str) -> tuple:
    lo, sep, hi = s.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {s!r}")
    return _finite_float(lo), _finite_float(hi)


def _int_pair(s: str) -> tuple:
    lo, hi = _range_pair(s)
    if lo != int(lo) or hi != int(hi):
        raise argparse.ArgumentTypeError(f"expected integer LO:HI, got {s!r}")
    return int(lo), int(hi)


def _precision(s: str) -> str:
    if s in ("auto", "float"):
        return s
    if s.isdigit() and int(s) >= 64:
        return s
    raise argparse.ArgumentTypeError("precision is 'auto', 'float' or a bit count >= 64")


def _bool(s) -> bool:
    if isinstance(s, bool):
        return s
    low = str(s).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise InvalidArgument(f"expected a boolean, got {s!r}")


# --- shared pieces ---------------------------------------------------------------


def _quantum_model(cfg: RunConfig):
    """Model, eigendecomposition of H_tilde, seed operator and inner product."""
    if cfg.spin is None:
        raise InvalidArgument("--spin is required")
    if cfg.coupling is None:
        raise InvalidArgument("--coupling is required")
    d1 = int(2 * cfg.spin + 1)
    D = d1 if cfg.model == "lmg" else d1 * d1
    if cfg.precision == "auto":
        bits = MP_BITS if D <= MP_MAX_DIM else None
    elif cfg.precision == "float":
        bits = None
    else:
        bits = int(cfg.precision)
    if cfg.model == "lmg":
        model = build_lmg(cfg.spin, cfg.coupling, bits)
        name = cfg.seed_operator or "z"
    else:
        model = build_fp(cfg.spin, cfg.coupling, bits)
        name = cfg.seed_operator or "x1+x2"
    if name == "custom-file":
        if not cfg.seed_file:
            raise InvalidArgument("--seed custom-file needs --seed-file PATH.npy")
        try:
            seed = np.load(cfg.seed_file, allow_pickle=False)
        except (OSError, ValueError) as exc:
            raise InvalidArgument(f"cannot load seed operator from {cfg.seed_file}: {exc}") from exc
        if seed.shape != (D, D):
            raise InvalidArgument(f"seed file holds shape {seed.shape}, expected ({D}, {D})")
    else:
        seed = model.seed(name)
    spectral = eigendecompose(model.H_tilde)
    inner = InnerProductSpec()
    if cfg.inner == "micro":
        if cfg.energy is None or cfg.window is None:
            raise InvalidArgument("a microcanonical run needs --energy and --window")
        inner = microcanonical_inner_spec(spectral.scaled(1 / Fraction(cfg.spin)), cfg.energy, cfg.window)
    return model, spectral, seed, inner, bits


def _run_lanczos(cfg: RunConfig):
    model, spectral, seed, inner, bits = _quantum_model(cfg)
    max_n = DEFAULT_MAX_N if cfg.max_n is None else cfg.max_n
    out = lanczos(model.H_tilde, seed, inner, max_n, spectral=spectral)
    meta = {
        "dimension": model.dim,
        "dimension_bound": model.dim**2 - model.dim + 1,
        "precision_bits": bits or 53,
        "krylov_dim": out.krylov_dim,
        "termination": out.termination.value,
        "support": out.support,
    }
    if inner.is_microcanonical:
        meta["window_count"] = inner.count
    return model, spectral, inner, out, meta


def _slope_metadata(b, window, meta: dict, prefix: str = "") -> None:
    lo, hi = window
    hi = min(hi, len(b))
    if hi - lo + 1 < 3:
        meta[prefix + "fit_status"] = f"skipped: fewer than 3 coefficients in [{lo}, {window[1]}]"
        return
    fit = fit_power_law(b, (lo, hi)) if np.all(np.asarray(b)[lo - 1 : hi] > 0) else fit_linear_slope(b, (lo, hi))
    meta[prefix + "fit_window"] = f"{lo}:{hi}"
    meta[prefix + "alpha"] = fit.alpha
    meta[prefix + "intercept"] = fit.intercept
    meta[prefix + "residual"] = fit.residual
    if fit.delta is not None:
        meta[prefix + "power_delta"] = fit.delta
        meta[prefix + "power_prefactor"] = fit.prefactor


def _times(cfg: RunConfig) -> np.ndarray:
    return default_times(cfg.t_max, cfg.points or 2001)


def _default_fit_t(cfg: RunConfig) -> tuple:
    return cfg.fit_t or (1.0, math.log(float(cfg.spin)))


# --- subcommands ----------------------------------------------------------------


def cmd_lanczos(cfg: RunConfig) -> ResultTable:
    _, _, _, out, meta = _run_lanczos(cfg)
    _slope_metadata(out.b, cfg.fit_n or (2, 37), meta)
    return ResultTable({"n": out.n, "b_n": out.b}, meta)


def cmd_kcomplexity(cfg: RunConfig) -> ResultTable:
    _, _, inner, out, meta = _run_lanczos(cfg)
    t = _times(cfg)
    w = evolve_wavefunction(out.b, t, out.a if inner.is_microcanonical else None)
    K = k_complexity(w).K
    C = autocorrelation_from_wavefunction(w)
    cols = {"t": t, "K": K, "C": C.real, "sum_prob": w.total_probability()}
    if np.iscomplexobj(C):
        cols["C_imag"] = C.imag
    lo, hi = _default_fit_t(cfg)
    if out.b.size:
        fit = fit_exponential(t, K, (lo, hi)) if np.all(K[(t >= lo) & (t <= hi)] > 0) else None
        if fit is not None:
            meta.update({"fit_t": f"{format_value(lo)}:{format_value(hi)}", "lambda_K": fit.lam, "r2_K": fit.r2})
    meta["max_prob_error"] = float(np.max(np.abs(cols["sum_prob"] - 1)))
    return ResultTable(cols, meta)


def cmd_otoc(cfg: RunConfig) -> ResultTable:
    model, spectral, seed, _, bits = _quantum_model(cfg)
    t = _times(cfg)
    curve = otoc(spectral, seed, model.hbar_eff, t)
    lo, hi = _default_fit_t(cfg)
    fit = fit_exponential(t, curve.values, (lo, hi))
    meta = {
        "dimension": model.dim,
        "precision_bits": bits or 53,
        "hbar_eff": model.hbar_eff,
        "fit_t": f"{format_value(lo)}:{format_value(hi)}",
        "lambda_otoc": fit.lam,
        "r2": fit.r2,
    }
    return ResultTable({"t": t, "OTOC": curve.values}, meta)


def cmd_microcanonical(cfg: RunConfig) -> ResultTable:
    cfg.inner = "micro"
    _, _, _, out, meta = _run_lanczos(cfg)
    b = out.b
    _slope_metadata(b, cfg.fit_n or (2, 20), meta)
    if b.size < 4:
        raise InvalidArgument(f"window yields only {b.size} coefficients; widen --window")
    f, g = decompose_oscillation(b)
    glo, ghi = cfg.extra.get("g_window") or (10, 40)
    n = np.arange(1, b.size)
    sel = (n >= glo) & (n <= ghi)
    if sel.any():
        meta["g_window"] = f"{glo}:{ghi}"
        meta["mean_abs_g"] = float(np.mean(np.abs(g[sel])))
    late = cfg.extra.get("late_t") or (10.0, 20.0)
    t = _times(cfg)
    C = autocorrelation_from_wavefunction(evolve_wavefunction(b, t, out.a))
    sel_t = (t >= late[0]) & (t <= late[1])
    if sel_t.any():
        meta["late_t"] = f"{format_value(late[0])}:{format_value(late[1])}"
        meta["late_max_abs_C"] = float(np.max(np.abs(C[sel_t])))
    return ResultTable({"n": n, "b_n": b[:-1], "f": f, "g": g}, meta)


def cmd_classical_alpha(cfg: RunConfig) -> ResultTable:
    J = cfg.coupling
    if J is None:
        raise InvalidArgument("--coupling is required")
    lo, hi = energy_range(J)
    emin = cfg.extra.get("emin")
    emax = cfg.extra.get("emax")
    emin = lo + 1e-6 if emin is None else emin
    emax = hi - 1e-6 if emax is None else emax
    if not emin < emax:
        raise InvalidArgument("need emin < emax")
    curve = alpha_curve(J, np.linspace(emin, emax, cfg.points or 200))
    E_star, a_star = sup_alpha(J)
    meta = {"energy_min": lo, "energy_max": hi, "E_star": E_star, "two_alpha_star": 2 * a_star}
    if J >= 0.5:
        meta["reference_sqrt_2J_minus_1"] = math.sqrt(2 * J - 1)
    cols = {"E": curve.energies, "alpha": curve.alpha, "two_alpha": 2 * curve.alpha, "sigma_star": curve.sigma_star}
    return ResultTable(cols, meta)


def cmd_classical_saddles(cfg: RunConfig) -> ResultTable:
    if cfg.coupling is None:
        raise InvalidArgument("--coupling is required")
    if cfg.model == "lmg":
        pts, names = find_saddles_lmg(cfg.coupling), ("x", "y", "z")
    else:
        pts, names = find_saddles_fp(cfg.coupling), ("x1", "y1", "z1", "x2", "y2", "z2")
    cols = {"index": np.arange(len(pts))}
    for i, name in enumerate(names):
        cols[name] = [p.coords[i] for p in pts]
    cols["omega_saddle"] = [p.omega_saddle for p in pts]
    for k in range(len(names)):
        cols[f"eig_re_{k}"] = [p.jacobian_eigenvalues[k].real for p in pts]
        cols[f"eig_im_{k}"] = [p.jacobian_eigenvalues[k].imag for p in pts]
    meta = {f"label_{i}": p.label for i, p in enumerate(pts)}
    if cfg.model == "fp":
        meta["omega_formula"] = fp_saddle_exponent(cfg.coupling)
    return ResultTable(cols, meta)


def _classical_hamiltonian(cfg: RunConfig):
    V = SpherePolynomial.variable
    if cfg.model == "lmg":
        H = V("x") + cfg.coupling * V("z") ** 2
        seeds = {"z": V("z"), "x": V("x")}
        default = "z"
    else:
        c = cfg.coupling
        x1, x2 = V("x", 0, 2), V("x", 1, 2)
        z1, z2 = V("z", 0, 2), V("z", 1, 2)
        H = (1 + c) * (x1 + x2) + 4 * (1 - c) * z1 * z2
        seeds = {"x1+x2": x1 + x2, "x1": x1, "x2": x2, "z1": z1, "z2": z2}
        default = "x1+x2"
    name = cfg.seed_operator or default
    if name not in seeds:
        raise InvalidArgument(f"seed {name!r} is not available for the classical {cfg.model} model")
    return H, seeds[name]


def cmd_classical_lanczos(cfg: RunConfig) -> ResultTable:
    if cfg.coupling is None:
        raise InvalidArgument("--coupling is required")
    H, seed = _classical_hamiltonian(cfg)
    out = classical_lanczos(H, seed, cfg.max_n, degree_cap=cfg.extra.get("degree_cap") or 40)
    meta = {"krylov_dim": out.krylov_dim, "termination": out.termination.value}
    _slope_metadata(out.b, cfg.fit_n or (1, 20), meta)
    return ResultTable({"n": out.n, "b_n": out.b}, meta)


def cmd_fp_bound(cfg: RunConfig) -> ResultTable:
    cmin = cfg.extra.get("cmin")
    cmax = cfg.extra.get("cmax")
    cmin = -0.95 if cmin is None else cmin
    cmax = 0.95 if cmax is None else cmax
    if not cmin < cmax:
        raise InvalidArgument("need cmin < cmax")
    c = np.linspace(cmin, cmax, cfg.points or 101)
    J = np.array([fp_coupling_map(v) for v in c])
    bound = np.array([fp_lower_bound_alpha(v) for v in c])
    omega = np.array([fp_saddle_exponent(v) for v in c])
    k = int(np.argmax(omega))
    meta = {"omega_max": float(omega[k]), "c_at_omega_max": float(c[k])}
    return ResultTable({"c": c, "J": J, "bound": bound, "omega": omega}, meta)


COMMANDS = {
    "lanczos": cmd_lanczos,
    "kcomplexity": cmd_kcomplexity,
    "otoc": cmd_otoc,
    "microcanonical": cmd_microcanonical,
    "classical-alpha": cmd_classical_alpha,
    "classical-saddles": cmd_classical_saddles,
    "classical-lanczos": cmd_classical_lanczos,
    "fp-bound": cmd_fp_bound,
}


# --- sweep -----------------------------------------------------------------------


def _sweep_worker(job):
    argv, path = job
    try:
        table, ns = run(argv)
        _emit(table, ns.command, path, "csv", plot=False, gnuplot=False)
        return 0, ""
    except DomainError as exc:
        return EXIT_DOMAIN, str(exc)
    except (InvalidArgument, SystemExit) as exc:
        return EXIT_INVALID, str(exc)


def _sweep_value(v: str) -> float:
    try:
        return float(Fraction(v))
    except (ValueError, ZeroDivisionError):
        raise InvalidArgument(f"sweep value {v!r} is not numeric") from None


def sweep_threads(n_jobs: int) -> int:
    env = os.environ.get("KRYLOV_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise InvalidArgument(f"KRYLOV_THREADS must be an integer, got {env!r}") from None
        if cap < 1:
            raise InvalidArgument("KRYLOV_THREADS must be at least 1")
    return max(1, min(cap, n_jobs))


def cmd_sweep(ns: argparse.Namespace) -> ResultTable:
    rest = list(ns.rest)
    if rest and rest[0] == "--":
        rest = rest[1:]
    if not rest or rest[0] not in COMMANDS:
        raise InvalidArgument(f"sweep needs a subcommand to run, one of {', '.join(COMMANDS)}")
    if "--output" in rest or "--config" in rest:
        raise InvalidArgument("pass --output to sweep itself, not to the swept subcommand")
    values = [v.strip() for v in ns.values.split(",") if v.strip()]
    if not values:
        raise InvalidArgument("--values needs at least one entry")
    flag = "--" + ns.vary.replace("_", "-")
    workdir = Path(ns.workdir or (Path(ns.output).with_suffix("") if ns.output else "sweep_runs"))
    workdir.mkdir(parents=True, exist_ok=True)
    jobs = []
    for i, v in enumerate(values):
        path = workdir / f"{rest[0]}_{i:03d}.csv"
        jobs.append((rest + [flag, v], str(path)))
    threads = sweep_threads(len(jobs))
    if threads == 1:
        results = [_sweep_worker(j) for j in jobs]
    else:
        with multiprocessing.get_context("fork").Pool(threads) as pool:
            results = pool.map(_sweep_worker, jobs)
    for (argv, _), (code, msg) in zip(jobs, results):
        if code == EXIT_DOMAIN:
            raise DomainError(f"sweep run {' '.join(argv)}: {msg}")
        if code:
            raise InvalidArgument(f"sweep run {' '.join(argv)}: {msg}")

    # single-threaded merge: one row per run, numeric metadata shared by all runs
    tables = [ResultTable.read(p) for _, p in jobs]
    keys = [
        k
        for k, v in tables[0].metadata.items()
        if not k.startswith("config.")
        and isinstance(v, (int, float))
        and not isinstance(v, bool)
        and all(isinstance(t.metadata.get(k), (int, float)) for t in tables)
    ]
    cols = {"value": [_sweep_value(v) for v in values]}
    for k in keys:
        cols[k] = [float(t.metadata[k]) for t in tables]
    meta = {"sweep.command": rest[0], "sweep.vary": ns.vary, "sweep.values": ",".join(values)}
    meta.update({f"sweep.run_{i:03d}": p for i, (_, p) in enumerate(jobs)})
    return ResultTable(cols, meta)


# --- parser ------------------------------------------------------------------------


def _add_output(p):
    p.add_argument("--config", help="flat key = value file; flags given on the command line win")
    p.add_argument("--output", help="result file (stdout when omitted)")
    p.add_argument("--format", choices=("csv", "json"), default=None, help="default: from --output suffix, else csv")
    p.add_argument("--plot", action="store_true", help="also render a PNG next to --output")
    p.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script next to the CSV output")
    p.add_argument("--timing", action="store_true", help="record wall time in the metadata (breaks byte identity)")


def _add_model(p, coupling_help="J for lmg, c for fp"):
    p.add_argument("--model", choices=("lmg", "fp"), default="lmg")
    p.add_argument("--spin", type=_spin, help="spin S (lmg) or s (fp), integer or half-integer")
    p.add_argument("--coupling", type=_finite_float, help=coupling_help)
    p.add_argument("--seed", default=None, help="z, x (lmg); x1+x2, x1, x2, z1, z2 (fp); or custom-file")
    p.add_argument("--seed-file", help=".npy operator for --seed custom-file")
    p.add_argument("--precision", type=_precision, default="auto", help="auto, float or mpfr bits (auto: 512 bits when D <= 200)")
    p.add_argument("--max-n", type=int, help=f"number of Lanczos coefficients (default {DEFAULT_MAX_N}, capped by breakdown)")


def _add_micro(p, required_inner=False):
    if not required_inner:
        p.add_argument("--inner", choices=("infinite", "micro"), default="infinite")
    p.add_argument("--energy", type=_finite_float, help="window center E (eigenvalues of H)")
    p.add_argument("--window", type=_finite_float, help="window half-width dE")


def _add_time(p):
    p.add_argument("--t-max", type=_finite_float, default=20.0)
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("--fit-t", type=_range_pair, help="exponential fit window LO:HI in t (default 1:ln S)")


def build_parser():
    parser = argparse.ArgumentParser(prog="krylovlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = subs["lanczos"] = sub.add_parser("lanczos", help="Lanczos coefficients b_n")
    _add_model(p)
    _add_micro(p)
    p.add_argument("--fit-n", type=_int_pair, help="linear-slope fit window LO:HI in n (default 2:37)")

    p = subs["kcomplexity"] = sub.add_parser("kcomplexity", help="K-complexity and auto-correlation")
    _add_model(p)
    _add_micro(p)
    _add_time(p)

    p = subs["otoc"] = sub.add_parser("otoc", help="infinite-temperature OTOC")
    _add_model(p)
    _add_time(p)

    p = subs["microcanonical"] = sub.add_parser("microcanonical", help="energy-window Lanczos diagnostics")
    _add_model(p)
    _add_micro(p, required_inner=True)
    _add_time(p)
    p.add_argument("--fit-n", type=_int_pair, help="slope fit window in n (default 2:20)")
    p.add_argument("--g-window", type=_int_pair, help="window in n for mean |g(n)| (default 10:40)")
    p.add_argument("--late-t", type=_range_pair, help="window in t for max |C(t)| (default 10:20)")

    p = subs["classical-alpha"] = sub.add_parser("classical-alpha", help="semi-analytic alpha(E) for classical LMG")
    p.add_argument("--coupling", type=_finite_float, required=False, help="J")
    p.add_argument("--emin", type=_finite_float)
    p.add_argument("--emax", type=_finite_float)
    p.add_argument("--points", type=int, default=200)

    p = subs["classical-saddles"] = sub.add_parser("classical-saddles", help="fixed points and Jacobian spectra")
    p.add_argument("--model", choices=("lmg", "fp"), default="lmg")
    p.add_argument("--coupling", type=_finite_float, help="J for lmg, c for fp")

    p = subs["classical-lanczos"] = sub.add_parser("classical-lanczos", help="Poisson-bracket Lanczos on sphere polynomials")
    p.add_argument("--model", choices=("lmg", "fp"), default="lmg")
    p.add_argument("--coupling", type=_finite_float, help="J for lmg, c for fp")
    p.add_argument("--seed", default=None)
    p.add_argument("--max-n", type=int)
    p.add_argument("--degree-cap", type=int, default=40)
    p.add_argument("--fit-n", type=_int_pair, help="slope fit window in n (default 1:20)")

    p = subs["fp-bound"] = sub.add_parser("fp-bound", help="equal-spin lower bound on 2 alpha for FP")
    p.add_argument("--cmin", type=_finite_float)
    p.add_argument("--cmax", type=_finite_float)
    p.add_argument("--points", type=int, default=101)

    p = subs["sweep"] = sub.add_parser("sweep", help="run a subcommand over a list of values in parallel")
    p.add_argument("--vary", required=True, help="flag name to vary, e.g. coupling")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--workdir", help="directory for per-run files (default: next to --output)")
    p.add_argument("rest", nargs=argparse.REMAINDER, help="subcommand and its flags")

    for p in subs.values():
        _add_output(p)
    return parser, subs


def parse_args(argv):
    parser, subs = build_parser()
    ns = parser.parse_args(argv)
    if getattr(ns, "config", None):
        sub = subs[ns.command]
        actions = {a.dest: a for a in sub._actions}
        defaults = {}
        for key, val in read_config_file(ns.config).items():
            a = actions.get(key)
            if a is None or key in ("help", "config", "rest"):
                raise InvalidArgument(f"unknown config key {key!r} for {ns.command}")
            if a.nargs == 0:
                val = _bool(val)
            elif a.choices is not None and val not in a.choices:
                raise InvalidArgument(f"config key {key!r}: {val!r} is not one of {', '.join(a.choices)}")
            defaults[key] = val
        sub.set_defaults(**defaults)
        ns = parser.parse_args(argv)
    return ns


def run(argv) -> tuple:
    """Parse ``argv`` and compute the result table; returns ``(table, command)``."""
    ns = parse_args(argv)
    start = time.perf_counter()
    if ns.command == "sweep":
        table = cmd_sweep(ns)
        echo = {}
    else:
        fmt = ns.format
        cfg = RunConfig.from_namespace(argparse.Namespace(**{**vars(ns), "format": fmt or "csv"}))
        table = COMMANDS[ns.command](cfg)
        echo = cfg.echo(set(vars(ns)))
    meta = {"command": ns.command, "code_version": __version__, **echo, **table.metadata}
    if ns.timing:
        meta["wall_time_s"] = time.perf_counter() - start
    table.metadata = meta
    return table, ns


def _emit(table: ResultTable, command: str, output, fmt, plot: bool, gnuplot: bool) -> None:
    from .plotting import render_png, write_gnuplot

    if output is None:
        if plot or gnuplot:
            raise InvalidArgument("--plot and --gnuplot need --output")
        sys.stdout.write(table.to_csv() if fmt == "csv" else table.to_json())
        return
    path = table.write(output, fmt)
    if gnuplot:
        if fmt != "csv":
            raise InvalidArgument("--gnuplot references a CSV file; use --format csv")
        write_gnuplot(table, command, path)
    if plot:
        render_png(table, command, path.with_suffix(".png"))


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        table, ns = run(argv)
        fmt = ns.format or ("json" if ns.output and ns.output.endswith(".json") else "csv")
        _emit(table, ns.command, ns.output, fmt, ns.plot, ns.gnuplot)
    except SystemExit as exc:
        return int(exc.code or 0)
    except DomainError as exc:
        print(f"krylovlab: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except InvalidArgument as exc:
        print(f"krylovlab: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except KrylovLabError as exc:
        print(f"krylovlab: {exc}", file=sys.stderr)
        return 1
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
