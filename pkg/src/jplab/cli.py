"""
Command-line driver: ``jplab <command> [--config PATH] [--out DIR] [--seed N]``.

Every command reads an optional JSON configuration (keys override the
stock scenario), writes one CSV table (to ``DIR/<command>.csv`` or standard
output) and reports a one-line summary on standard error.

Exit codes: 0 pass, 2 numerical threshold failure, 64 configuration error.
The environment variable ``JPLAB_THREADS`` caps the worker threads used
for independent grid points.
"""

import argparse
import csv
import io
import json
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    ConfigError,
    EigenvalueHitError,
    JplabError,
    TruncationError,
    TruncationWarning,
    UnsupportedOrderError,
)

EXIT_OK = 0
EXIT_FAIL = 2
EXIT_CONFIG = 64

TRUNCATION_WARN = 1e-4
SPECTRUM_MARGIN = 1e-4

_HALFLINE_Z = [[re, im] for re in (-3.0, -1.0, 0.5, 2.0, 4.0) for im in (0.25, 0.5, 1.0, 2.0)]

DEFAULTS = {
    "tk": {"k": 2},
    "verify-product": {"trials": 500, "dim": 8, "k_max": 5, "radius": 0.8, "tolerance": 1e-9},
    "verify-halfline": {
        "potential": {"name": "square_well", "params": {"v0": 2.0, "a": 1.5}},
        "z": _HALFLINE_Z,
        "n": 400,
        "jost_n": 1000,
        "tolerance": 1e-5,
    },
    "verify-disk": {
        "R": 1.0,
        "potential": {"name": "gaussian", "params": {"amp": -3.0, "width": 0.3}},
        "z": [-2.0, 0.5],
        "M_max": 30,
        "n_radial": 200,
        "k": 2,
        "lemma_modes": 10,
        "tag": "benchmark",
        "tolerance": 1e-3,
    },
    "spectra": {
        "R": 1.0,
        "potential": {"name": "square_well", "params": {"v0": 5.0, "a": 0.5}},
        "bc": ["D", "N"],
        "window": [-10.0, 20.0],
        "M_max": 6,
        "tolerance": 1e-6,
    },
    "xi-scan": {
        "R": 1.0,
        "potential": {"name": "square_well", "params": {"v0": 5.0, "a": 0.5}},
        "lambdas": {"start": -3.0, "stop": 20.0, "num": 24},
        "M_max": 6,
        "n_radial": 100,
        "tolerance": 1e-3,
    },
}


@dataclass
class RunConfig:
    """Validated parameters of one command invocation."""

    command: str
    params: dict
    out: Path = None
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.params[key]


def _fail(msg):
    raise ConfigError(msg)


def load_config(command, path=None, seed=0, out=None, overrides=None):
    """Merge the stock scenario with a JSON file and command-line overrides.

    Raises
    ------
    ConfigError
        Unreadable file, unknown keys or invalid values.
    """
    params = json.loads(json.dumps(DEFAULTS[command]))
    user = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                user = json.load(fh)
        except OSError as exc:
            _fail(f"cannot read config {path}: {exc.strerror}")
        except json.JSONDecodeError as exc:
            _fail(f"config {path} is not valid JSON: {exc}")
        if not isinstance(user, dict):
            _fail("config must be a JSON object")
    user = {**user, **{k: v for k, v in (overrides or {}).items() if v is not None}}
    unknown = sorted(set(user) - set(params) - {"seed"})
    if unknown:
        _fail(f"unknown config keys for {command}: {', '.join(unknown)}")
    if "seed" in user and seed is None:
        seed = user["seed"]
    params.update({k: v for k, v in user.items() if k != "seed"})
    seed = 0 if seed is None else seed
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        _fail("seed must be an integer in [0, 2^64)")
    cfg = RunConfig(command, params, Path(out) if out else None, seed)
    _validate(cfg)
    return cfg


def _positive(cfg, key, kind=float):
    val = cfg.params[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not val > 0:
        _fail(f"{key} must be positive, got {val!r}")
    if kind is int and int(val) != val:
        _fail(f"{key} must be an integer, got {val!r}")
    return kind(val)


def _nonneg_int(cfg, key):
    val = cfg.params[key]
    if isinstance(val, bool) or not isinstance(val, int) or val < 0:
        _fail(f"{key} must be a nonnegative integer, got {val!r}")
    return val


def _z_list(raw):
    if isinstance(raw, (list, tuple)) and len(raw) == 2 and all(isinstance(x, (int, float)) for x in raw):
        raw = [raw]
    if not isinstance(raw, (list, tuple)) or not raw:
        _fail("z grid must be a nonempty list of [re, im] pairs")
    out = []
    for p in raw:
        if not (isinstance(p, (list, tuple)) and len(p) == 2):
            _fail(f"bad z point {p!r}; expected [re, im]")
        out.append(complex(float(p[0]), float(p[1])))
    return out


def _lambda_list(raw):
    if isinstance(raw, dict):
        try:
            start, stop, num = float(raw["start"]), float(raw["stop"]), int(raw["num"])
        except (KeyError, TypeError, ValueError):
            _fail("lambdas must be a list or {start, stop, num}")
        if num < 1 or not start <= stop:
            _fail("lambdas needs num >= 1 and start <= stop")
        return [float(x) for x in np.linspace(start, stop, num)]
    if not isinstance(raw, (list, tuple)) or not raw:
        _fail("lambdas must be a nonempty list")
    return [float(x) for x in raw]


def _validate(cfg):
    p = cfg.params
    if "tolerance" in p:
        _positive(cfg, "tolerance")
    if cfg.command == "tk":
        if isinstance(p["k"], bool) or not isinstance(p["k"], int):
            _fail("k must be an integer")
    elif cfg.command == "verify-product":
        _nonneg_int(cfg, "trials")
        _positive(cfg, "dim", int)
        _positive(cfg, "k_max", int)
        _positive(cfg, "radius")
    elif cfg.command == "verify-halfline":
        cfg.extra["z"] = _z_list(p["z"])
        _positive(cfg, "n", int)
        _positive(cfg, "jost_n", int)
        cfg.extra["V"] = _potential_1d(p["potential"])
    else:
        _positive(cfg, "R")
        _nonneg_int(cfg, "M_max")
        cfg.extra["V"] = _potential_radial(p["potential"], float(p["R"]))
        if cfg.command == "verify-disk":
            cfg.extra["z"] = _z_list(p["z"])
            _positive(cfg, "n_radial", int)
            _nonneg_int(cfg, "lemma_modes")
            if p["k"] != 2:
                _fail("only k = 2 is implemented for the disk")
        elif cfg.command == "spectra":
            bcs = p["bc"] if isinstance(p["bc"], list) else [p["bc"]]
            if not bcs or any(str(b).upper() not in ("D", "N") for b in bcs):
                _fail("bc must be 'D', 'N' or a list of them")
            cfg.extra["bc"] = [str(b).upper() for b in bcs]
            w = p["window"]
            if not (isinstance(w, list) and len(w) == 2 and float(w[0]) < float(w[1])):
                _fail("window must be [lo, hi] with lo < hi")
        elif cfg.command == "xi-scan":
            cfg.extra["lambdas"] = _lambda_list(p["lambdas"])
            _positive(cfg, "n_radial", int)


def _spec(raw):
    if not isinstance(raw, dict) or "name" not in raw:
        _fail("potential must be an object with a name")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        _fail("potential params must be an object")
    return raw["name"], params


def _potential_1d(raw):
    from .potentials import potential_1d

    return potential_1d(*_spec(raw))


def _potential_radial(raw, R):
    from .potentials import radial_potential

    return radial_potential(*_spec(raw), R=R)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def threads():
    """Worker count: CPU count capped by ``JPLAB_THREADS``."""
    n = os.cpu_count() or 1
    raw = os.environ.get("JPLAB_THREADS")
    if raw is None or raw == "":
        return n
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigError(f"JPLAB_THREADS must be a positive integer, got {raw!r}") from None
    if cap < 1:
        raise ConfigError(f"JPLAB_THREADS must be a positive integer, got {raw!r}")
    return min(n, cap)


def parallel_map(func, items):
    """Ordered map over `items` on up to :func:`threads` workers."""
    items = list(items)
    n = min(threads(), len(items))
    if n <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items))


def fmt(x):
    """Deterministic shortest round-trip text for CSV cells."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _emit(cfg, header, rows, stdout, append=False):
    path = None if cfg.out is None else cfg.out / f"{cfg.command.replace('-', '_')}.csv"
    fresh = path is None or not append or not path.exists()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if fresh:
        writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(c) for c in row])
    if path is None:
        stdout.write(buf.getvalue())
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a" if not fresh else "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _note(msg):
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_tk(cfg, stdout):
    """Print the canonical ``T_k`` and compare with the shipped golden file."""
    from .detcalc import cyclic_reduce, load_golden, tk_polynomial

    k = cfg["k"]
    poly = cyclic_reduce(tk_polynomial(k))
    text = str(poly)
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        (cfg.out / f"tk_{k}.txt").write_text(text + "\n", encoding="utf-8")
    stdout.write(text + "\n")
    golden = load_golden()
    if k not in golden:
        warnings.warn(f"no golden entry for k = {k}; generated form not verified", UserWarning)
        return EXIT_OK
    if golden[k] != poly:
        _note(f"mismatch against golden T_{k}:\n  golden:\n{golden[k]}\n  generated:\n{text}")
        return EXIT_FAIL
    _note(f"T_{k} matches golden")
    return EXIT_OK


def cmd_verify_product(cfg, stdout):
    """Random trials of the multiplicative defect formula."""
    from .detcalc import product_formula_residual, random_matrix

    rng = np.random.default_rng(cfg.seed)
    cases = []
    for t in range(cfg["trials"]):
        k = int(rng.integers(1, cfg["k_max"] + 1))
        dim = int(rng.integers(1, cfg["dim"] + 1))
        ra, rb = rng.uniform(0.05, cfg["radius"], size=2)
        cases.append((t, k, dim, random_matrix(rng, dim, radius=ra), random_matrix(rng, dim, radius=rb)))
    res = parallel_map(lambda c: product_formula_residual(c[3], c[4], c[1]), cases)
    _emit(cfg, ["trial", "k", "dim", "residual"], [(c[0], c[1], c[2], r) for c, r in zip(cases, res)], stdout)
    worst = max(res, default=0.0)
    _note(f"{len(res)} trials, max residual {worst:.3e}")
    return EXIT_OK if worst <= cfg["tolerance"] else EXIT_FAIL


def cmd_verify_halfline(cfg, stdout):
    """Determinant formulas and the four-way ratio chain on a z-grid."""
    from .halfline import theorem11_residuals, theorem12_chain

    V, n, jn = cfg.extra["V"], cfg["n"], cfg["jost_n"]

    def row(z):
        try:
            rd, rn = theorem11_residuals(z, V, n, jn)
            chain = theorem12_chain(z, V, n, jn)["residual"]
        except EigenvalueHitError:
            return (z.real, z.imag, None, None, None, "eigenvalue_hit")
        ok = max(rd, rn, chain) <= cfg["tolerance"]
        return (z.real, z.imag, rd, rn, chain, "pass" if ok else "fail")

    rows = parallel_map(row, cfg.extra["z"])
    _emit(cfg, ["z_re", "z_im", "det_d_residual", "det_n_residual", "chain_residual", "status"], rows, stdout)
    hits = sum(r[-1] == "eigenvalue_hit" for r in rows)
    fails = sum(r[-1] == "fail" for r in rows)
    _note(f"{len(rows)} points, {fails} failed, {hits} eigenvalue hits excluded")
    return EXIT_FAIL if fails else EXIT_OK


def cmd_verify_disk(cfg, stdout):
    """Determinant identities on the disk; appends to ``verify_disk.csv``."""
    from .disk2d import (
        lhs_ratio_det,
        mode_terms,
        neumann_variant_residual,
        radial_grid,
        rhs_dtn_det,
        t2_trace,
        theorem42_residual,
        truncation_diagnostic,
    )

    V, M, nr = cfg.extra["V"], cfg["M_max"], cfg["n_radial"]
    grid = radial_grid(V, nr)
    tag, tol = cfg["tag"], cfg["tolerance"]

    def block(z):
        rows = []
        lhs, rhs, t2 = lhs_ratio_det(z, V, M, grid), rhs_dtn_det(z, V, M, grid), t2_trace(z, V, M, grid)
        rows.append((f"{tag}:theorem42", z, lhs, rhs, t2, theorem42_residual(z, V, M, grid)))
        terms = [mode_terms(m, z, V, grid) for m in range(M + 1)]
        inv_lhs = 1 / lhs
        inv_rhs = complex(np.prod([((1 / t.d) * np.exp(1 - 1 / t.d)) ** t.mult for t in terms]))
        t2n = complex(sum(t.t2_neumann * t.mult for t in terms))
        rows.append((f"{tag}:remark44", z, inv_lhs, inv_rhs, t2n, neumann_variant_residual(z, V, M, grid)))
        for m in range(min(cfg["lemma_modes"], M) + 1):
            t = terms[m]
            rows.append((f"{tag}:lemma35_m{m}", z, t.d, 1 - t.s, t.t2, float(abs(t.d - 1 + t.s))))
        return rows, truncation_diagnostic(z, V, M, grid)

    results = parallel_map(block, cfg.extra["z"])
    rows, worst = [], 0.0
    for block_rows, diag in results:
        for tag_, z, lhs, rhs, t2, res in block_rows:
            worst = max(worst, res)
            rows.append((tag_, z.real, z.imag, lhs.real, lhs.imag, complex(rhs).real, complex(rhs).imag,
                         complex(t2).real, complex(t2).imag, res, M, nr))
        if diag["dtn_tail"] > TRUNCATION_WARN:
            warnings.warn(
                f"M_max = {M} is too small: |d_M - 1| = {diag['dtn_tail']:.2e} exceeds {TRUNCATION_WARN:g}",
                TruncationWarning,
            )
    header = ["tag", "z_re", "z_im", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "t2_re", "t2_im",
              "residual", "M_max", "n_radial"]
    _emit(cfg, header, rows, stdout, append=True)
    _note(f"{len(rows)} rows, max residual {worst:.3e}")
    return EXIT_OK if worst <= tol else EXIT_FAIL


def cmd_spectra(cfg, stdout):
    """Eigenvalue table with shooting cross-validation."""
    from .disk2d import eig_detect
    from .errors import VerificationError

    V, M, tol = cfg.extra["V"], cfg["M_max"], cfg["tolerance"]
    rows, status = [], EXIT_OK
    for bc in cfg.extra["bc"]:
        try:
            pairs = eig_detect(tuple(cfg["window"]), V, bc, M, check=True, tol=tol)
        except VerificationError as exc:
            _note(f"{bc}: {exc}")
            status = EXIT_FAIL
            continue
        for e in pairs:
            bf = complex(e.boundary_factor)
            rows.append((bc, e.m, e.mult, e.lam, e.shooting, e.delta, bf.real, bf.imag))
    _emit(cfg, ["bc", "m", "mult", "lambda", "shooting", "delta", "factor_re", "factor_im"], rows, stdout)
    _note(f"{len(rows)} eigenvalues")
    return status


def _all_eigenvalues(V, lo, hi, M):
    from .disk2d import eig_detect
    from .potentials import radial_potential

    free = radial_potential("zero", R=V.R)
    return sorted(
        e.lam for pot in (V, free) for bc in ("D", "N") for e in eig_detect((lo, hi), pot, bc, M, check=False)
    )


def cmd_xi_scan(cfg, stdout):
    """Spectral shifts, counting functions and both counting-identity residuals."""
    from .disk2d import radial_grid, theorem49_scan

    V, M = cfg.extra["V"], cfg["M_max"]
    lams = cfg.extra["lambdas"]
    grid = radial_grid(V, cfg["n_radial"])
    eigs = _all_eigenvalues(V, min(lams) - 1.0, max(lams) + SPECTRUM_MARGIN, M)
    on = [any(abs(lam - e) < SPECTRUM_MARGIN for e in eigs) for lam in lams]
    off = [lam for lam, o in zip(lams, on) if not o]
    data = theorem49_scan(off, V, M, grid) if off else {}
    rows, fails, it = [], 0, 0
    for lam, o in zip(lams, on):
        if o:
            rows.append((lam,) + (None,) * 10 + ("on_spectrum",))
            continue
        d = {k: v[it] for k, v in data.items()}
        it += 1
        frac = max(abs(d[k] - round(d[k])) for k in ("xi_d", "xi_n"))
        diff = round(d["xi_n"] - d["xi_d"])
        target = (d["n_d"] - d["n0_d"]) - (d["n_n"] - d["n0_n"])
        ok = frac <= cfg["tolerance"] and diff == target
        fails += not ok
        rows.append((lam, d["n0_d"], d["n_d"], d["n0_n"], d["n_n"], d["xi_d"], d["xi_n"], d["boundary"],
                     d["integer"], d["determinant"], frac, "pass" if ok else "fail"))
    header = ["lambda", "n0_d", "n_d", "n0_n", "n_n", "xi_d", "xi_n", "boundary_phase",
              "integer_residual", "determinant_residual", "fractional_part", "status"]
    _emit(cfg, header, rows, stdout)
    _note(f"{len(rows)} points, {sum(on)} on a spectrum, {fails} failed")
    return EXIT_FAIL if fails else EXIT_OK


COMMANDS = {
    "tk": cmd_tk,
    "verify-product": cmd_verify_product,
    "verify-halfline": cmd_verify_halfline,
    "verify-disk": cmd_verify_disk,
    "spectra": cmd_spectra,
    "xi-scan": cmd_xi_scan,
}


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors, not numerical failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="jplab", description="Perturbation-determinant verification suite.")
    parser.add_argument("--version", action="version", version=f"jplab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, func in COMMANDS.items():
        p = sub.add_parser(name, help=func.__doc__.strip().splitlines()[0])
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--out", help="output directory (default: CSV to stdout)")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (unsigned 64-bit)")
        if name == "tk":
            p.add_argument("k", nargs="?", type=int, help="regularization order")
        if name == "verify-product":
            p.add_argument("--trials", type=int, help="number of random pairs")
    return parser


def main(argv=None, stdout=None):
    """Entry point; returns the process exit code."""
    stdout = sys.stdout if stdout is None else stdout
    args = build_parser().parse_args(argv)
    overrides = {"k": getattr(args, "k", None), "trials": getattr(args, "trials", None)}
    try:
        cfg = load_config(args.command, args.config, args.seed, args.out, overrides)
        threads()
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = _show_warning
            return COMMANDS[args.command](cfg, stdout)
    except (ConfigError, UnsupportedOrderError, TruncationError, ValueError) as exc:
        _note(f"jplab: config error: {exc}")
        return EXIT_CONFIG
    except JplabError as exc:
        _note(f"jplab: numerical failure: {type(exc).__name__}: {exc}")
        return EXIT_FAIL
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        _note(f"jplab: numerical failure: {exc}")
        return EXIT_FAIL


def _show_warning(message, category, filename, lineno, file=None, line=None):
    _note(f"warning: {category.__name__}: {message}")


if __name__ == "__main__":
    sys.exit(main())
