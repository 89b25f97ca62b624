"""Command-line front end.

Subcommands: ``dispersion``, ``effmass``, ``resolvent``, ``oracle-compare``
and ``bounds-audit``. Settings come from built-in defaults, then an optional
TOML file (``--config``), then explicit flags. The fully resolved settings
are embedded in every output.

Exit codes: 0 success, 1 systemic failure, 2 audit failure under
``--strict``, 64 usage or input error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from pfiber.errors import ContractError, DomainError
from pfiber.grid import StateVector, build_grid
from pfiber.io import read_state, render_csv, render_json, render_state
from pfiber.kernels import QuadratureSpec, kernel_triplet
from pfiber.model import ModelParams, default_gamma0, tilde_t, z0
from pfiber.oracle import build_discrete_h, ground_eigenvalue, residual
from pfiber.resolvent import apply_resolvent
from pfiber.spectrum import (
    dispersion_curve,
    effective_mass,
    effective_mass_fd_extrapolated,
    effective_mass_sigma0,
    effective_mass_sigma_limit,
    lemma_dd1_bound,
    no_root_threshold,
    solve_ground,
    spectrum_report,
    theorem1_bound,
)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_FAIL, EXIT_AUDIT, EXIT_USAGE = 0, 1, 2, 64

COMMON_DEFAULTS = {
    "e": 1.0, "R": 1.0, "sigma": 0.0, "gamma0": "auto",
    "p_min": 0.0, "p_max": 3.0, "p_count": 31, "direction": [0.0, 0.0, 1.0],
    "tol": 1e-12, "quad_tol": 1e-10,
    "quad_nrho": 16, "quad_nt": 16, "quad_nphi": 8,
    "format": "csv", "out": None, "strict": False, "workers": 1,
}

COMMAND_DEFAULTS = {
    "dispersion": {},
    "effmass": {"sigma_sweep": None, "fd_h": [1e-2, 5e-3], "mass_tol": 1e-4},
    "resolvent": {"input": None, "p": [0.0, 0.0, 0.5], "z_re": None, "z_im": 1.0,
                  "kernels": "grid", "seed": 0, "residual_tol": 1e-8, "margin": 0.0},
    "oracle-compare": {"p": [0.0, 0.0, 0.5], "n_rho_list": [16, 32, 64], "gap_tol": 1e-3,
                       "noise_floor": 1e-12},
    "bounds-audit": {"p_min": 0.05, "p_max": 3.0, "p_count": 50, "threshold_check": True},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _vec3(text):
    v = _floats(text)
    if len(v) != 3:
        raise argparse.ArgumentTypeError(f"expected three components, got {text!r}")
    return v


def _gamma0(text):
    if text == "auto":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--gamma0 takes a number or 'auto', got {text!r}")


def _bool(text):
    t = text.lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _common(sub):
    # every default is None so that only explicitly given flags override the file
    g = sub.add_argument_group("model")
    g.add_argument("--e", type=float, help="coupling constant (default 1)")
    g.add_argument("--R", type=float, help="ultraviolet cutoff (default 1)")
    g.add_argument("--sigma", type=float, help="infrared exponent in [0, 1/2) (default 0)")
    g.add_argument("--gamma0", type=_gamma0, help="energy shift or 'auto' (default auto)")
    g = sub.add_argument_group("momentum grid")
    g.add_argument("--p-min", type=float)
    g.add_argument("--p-max", type=float)
    g.add_argument("--p-count", type=int)
    g.add_argument("--direction", type=_vec3, help="unit vector, e.g. 0,0,1")
    g = sub.add_argument_group("numerics")
    g.add_argument("--tol", type=float, help="root-finding tolerance (default 1e-12)")
    g.add_argument("--quad-tol", type=float, help="kernel quadrature absolute tolerance")
    g.add_argument("--quad-nrho", type=int, help="radial nodes of the discretization grid")
    g.add_argument("--quad-nt", type=int, help="polar nodes of the discretization grid")
    g.add_argument("--quad-nphi", type=int, help="azimuthal nodes of the discretization grid")
    g.add_argument("--workers", type=int, help="worker threads for sweeps")
    g = sub.add_argument_group("output")
    g.add_argument("--out", help="output file (default stdout)")
    g.add_argument("--format", choices=("csv", "json"))
    g.add_argument("--strict", action="store_const", const=True,
                   help="exit with status 2 when an audit fails")
    g.add_argument("--config", help="TOML file with default settings")


def build_parser():
    parser = _Parser(prog="pfiber", description=__doc__.split("\n\n")[0])
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = subs.add_parser("dispersion", help="band edge and ground-state energy over |p|")
    _common(p)

    p = subs.add_parser("effmass", help="inverse effective mass by formula and finite difference")
    _common(p)
    p.add_argument("--sigma-sweep", type=_floats,
                   help="comma-separated sigmas; adds the sigma -> 0 extrapolation")
    p.add_argument("--fd-h", type=_floats, help="two step sizes for the extrapolated difference")
    p.add_argument("--mass-tol", type=float, help="formula vs difference tolerance")

    p = subs.add_parser("resolvent", help="apply (H(p) - z)^-1 to a state and check the residual")
    _common(p)
    p.add_argument("--input", help="StateVector CSV; a random state is generated if absent")
    p.add_argument("--p", type=_vec3, help="momentum vector, e.g. 0,0,0.5")
    p.add_argument("--z-re", type=float, help="real part of z (default z0(|p|) + 1)")
    p.add_argument("--z-im", type=float, help="imaginary part of z (default 1)")
    p.add_argument("--kernels", choices=("grid", "exact"))
    p.add_argument("--seed", type=int, help="seed for the generated state")
    p.add_argument("--residual-tol", type=float)
    p.add_argument("--margin", type=float, help="safety margin below the spectrum for real z")

    p = subs.add_parser("oracle-compare", help="discrete ground eigenvalue against the secular root")
    _common(p)
    p.add_argument("--p", type=_vec3)
    p.add_argument("--n-rho-list", type=_ints, help="comma-separated radial node counts")
    p.add_argument("--gap-tol", type=float, help="largest admissible final gap")
    p.add_argument("--noise-floor", type=float,
                   help="allowed increase between refinements (round-off)")

    p = subs.add_parser("bounds-audit", help="audit the D12 and ground-state bounds over |p|")
    _common(p)
    p.add_argument("--threshold-check", type=_bool,
                   help="also test |p| one unit beyond the no-root threshold")
    return parser


def _load_toml(path):
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"invalid TOML in {path}: {exc}") from None
    flat = {}
    for key, value in data.items():
        if isinstance(value, dict):  # [section] tables are flattened
            flat.update(value)
        else:
            flat[key] = value
    return {k.replace("-", "_"): v for k, v in flat.items()}


def resolve_config(args):
    """Merge defaults, the TOML file and flags into a plain dict."""
    cmd = args.command
    cfg = dict(COMMON_DEFAULTS)
    cfg.update(COMMAND_DEFAULTS[cmd])
    if args.config:
        file_cfg = _load_toml(args.config)
        unknown = sorted(set(file_cfg) - set(cfg))
        if unknown:
            raise UsageError(f"unknown config keys for {cmd}: {', '.join(unknown)}")
        cfg.update(file_cfg)
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    cfg["command"] = cmd
    try:
        params = ModelParams(cfg["e"], cfg["R"], cfg["sigma"],
                             default_gamma0(cfg["e"], cfg["R"], cfg["sigma"])
                             if cfg["gamma0"] == "auto" else cfg["gamma0"])
        QuadratureSpec(abs_tol=float(cfg["quad_tol"]))
    except (DomainError, TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    cfg["gamma0_resolved"] = params.gamma0
    if cfg["format"] not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    if int(cfg["p_count"]) < 1:
        raise UsageError("p_count must be at least 1")
    if int(cfg["p_count"]) > 1 and float(cfg["p_max"]) < float(cfg["p_min"]):
        raise UsageError("need p_max >= p_min")
    if float(cfg["p_min"]) < 0:
        raise UsageError("p_min must be non-negative")
    if not float(cfg["tol"]) > 0:
        raise UsageError("tol must be positive")
    if int(cfg["workers"]) < 1:
        raise UsageError("workers must be at least 1")
    d = np.asarray(cfg["direction"], dtype=float)
    if d.shape != (3,) or np.linalg.norm(d) == 0:
        raise UsageError("direction must be a non-zero 3-vector")
    cfg["direction"] = [float(x) for x in d / np.linalg.norm(d)]
    return cfg, params


def _quad(cfg):
    return QuadratureSpec(abs_tol=float(cfg["quad_tol"]))


def _p_grid(cfg):
    n = int(cfg["p_count"])
    if n == 1:
        return [float(cfg["p_min"])]
    return [float(v) for v in np.linspace(cfg["p_min"], cfg["p_max"], n)]


def _emit(cfg, columns, rows, extra=None, comments=()):
    if cfg["format"] == "csv":
        text = render_csv(columns, rows, cfg, comments)
    else:
        text = render_json(columns, rows, cfg, extra)
    if cfg["out"]:
        with open(cfg["out"], "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_dispersion(cfg, params):
    reports = dispersion_curve(_p_grid(cfg), cfg["direction"], params, _quad(cfg),
                               float(cfg["tol"]), int(cfg["workers"]))
    rows = [{"p_abs": r.p_abs, "z0": r.ess_edge, "z_star": r.eigenvalue,
             "F_at_edge": r.f_at_edge, "d12_edge": r.d12_edge,
             "upper_ok": r.bounds_ok[0], "dd1_ok": r.bounds_ok[1], "positive_ok": r.bounds_ok[2],
             "regime": r.regime, "error": r.error} for r in reports]
    cols = ["p_abs", "z0", "z_star", "F_at_edge", "d12_edge",
            "upper_ok", "dd1_ok", "positive_ok", "regime", "error"]
    _emit(cfg, cols, rows)
    if rows and all(r["error"] for r in rows):
        return EXIT_FAIL
    if cfg["strict"] and not all(r.ok for r in reports):
        return EXIT_AUDIT
    return EXIT_OK


def cmd_effmass(cfg, params):
    quad = _quad(cfg)
    tol = float(cfg["mass_tol"])
    rows = []
    formula = effective_mass(params, quad).inv_mass
    hs = cfg["fd_h"]
    if len(hs) != 2:
        raise UsageError("fd_h needs exactly two step sizes")
    fd = effective_mass_fd_extrapolated(params, quad, tuple(hs))
    diff = abs(formula - fd.inv_mass)
    rows.append({"method": "formula", "sigma": params.sigma, "inv_mass": formula,
                 "reference": fd.inv_mass, "abs_diff": diff, "flagged": diff > tol})
    rows.append({"method": "finite_difference", "sigma": params.sigma, "inv_mass": fd.inv_mass,
                 "reference": formula, "abs_diff": diff, "flagged": diff > tol})
    if cfg["sigma_sweep"]:
        sweep = [float(s) for s in cfg["sigma_sweep"]]
        lim = effective_mass_sigma_limit(params.e, params.R, sweep, quad)
        target = effective_mass_sigma0(params.e, params.R)
        for s, v in zip(lim.details["sigmas"], lim.details["values"]):
            rows.append({"method": "sigma_sweep", "sigma": s, "inv_mass": v,
                         "reference": target, "abs_diff": abs(v - target), "flagged": None})
        d = abs(lim.inv_mass - target)
        rows.append({"method": "sigma_limit", "sigma": 0.0, "inv_mass": lim.inv_mass,
                     "reference": target, "abs_diff": d, "flagged": d > tol})
    cols = ["method", "sigma", "inv_mass", "reference", "abs_diff", "flagged"]
    _emit(cfg, cols, rows)
    if cfg["strict"] and any(r["flagged"] for r in rows):
        return EXIT_AUDIT
    return EXIT_OK


def cmd_resolvent(cfg, params):
    p = np.asarray(cfg["p"], dtype=float)
    if p.shape != (3,):
        raise UsageError("p must be a 3-vector")
    p_abs = float(np.linalg.norm(p))
    axis = p / p_abs if p_abs > 0 else np.array([0.0, 0.0, 1.0])
    if cfg["input"]:
        try:
            u = read_state(cfg["input"], R=params.R)
        except OSError as exc:
            raise UsageError(f"cannot read {cfg['input']}: {exc}") from None
        except ContractError as exc:
            raise UsageError(f"{cfg['input']}: {exc}") from None
    else:
        grid = build_grid(int(cfg["quad_nrho"]), int(cfg["quad_nt"]), int(cfg["quad_nphi"]),
                          params, axis=axis)
        u = StateVector.random(grid, np.random.default_rng(int(cfg["seed"])))
    z_re = z0(p_abs, params) + 1.0 if cfg["z_re"] is None else float(cfg["z_re"])
    z = complex(z_re, float(cfg["z_im"]))
    cfg["z_re"] = z_re
    f = apply_resolvent(p, z, u, params, kernels=cfg["kernels"], quad=_quad(cfg),
                        margin=float(cfg["margin"]))
    hd = build_discrete_h(p, u.grid, params)
    res = residual(hd, z, f, u)
    passed = res <= float(cfg["residual_tol"])
    if cfg["format"] == "csv":
        text = render_state(f, cfg, comments=[f"residual: {res:.17g}"])
    else:
        rows = [{"kx": k[0], "ky": k[1], "kz": k[2], "weight": w, "lambda": lam,
                 "re": v.real, "im": v.imag}
                for lam in (1, 2) for k, w, v in zip(u.grid.nodes, u.grid.weights, f.f1[lam - 1])]
        text = render_json(["kx", "ky", "kz", "weight", "lambda", "re", "im"], rows, cfg,
                           {"f0_re": f.f0.real, "f0_im": f.f0.imag, "residual": res,
                            "T": (tilde_t(p, params) - z).real})
    if cfg["out"]:
        with open(cfg["out"], "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"residual {res:.3e} ({'ok' if passed else 'above tolerance'})", file=sys.stderr)
    if cfg["strict"] and not passed:
        return EXIT_AUDIT
    return EXIT_OK


def cmd_oracle_compare(cfg, params):
    p = np.asarray(cfg["p"], dtype=float)
    if p.shape != (3,):
        raise UsageError("p must be a 3-vector")
    p_abs = float(np.linalg.norm(p))
    axis = p / p_abs if p_abs > 0 else np.array([0.0, 0.0, 1.0])
    zs = solve_ground(p_abs, params, _quad(cfg), float(cfg["tol"]))
    rows = []
    for n_rho in cfg["n_rho_list"]:
        grid = build_grid(int(n_rho), int(cfg["quad_nt"]), int(cfg["quad_nphi"]), params, axis=axis)
        hd = build_discrete_h(p, grid, params)
        ev = ground_eigenvalue(hd)
        rows.append({"p_abs": p_abs, "n_rho": int(n_rho), "n_t": int(cfg["quad_nt"]),
                     "n_phi": int(cfg["quad_nphi"]), "dim": hd.dim, "oracle_ground": ev,
                     "z_star": zs, "gap": None if zs is None else abs(ev - zs)})
    gaps = [r["gap"] for r in rows]
    floor = float(cfg["noise_floor"])
    ok = (zs is not None and gaps[-1] <= float(cfg["gap_tol"])
          and all(b <= a + floor for a, b in zip(gaps, gaps[1:])))
    cols = ["p_abs", "n_rho", "n_t", "n_phi", "dim", "oracle_ground", "z_star", "gap"]
    _emit(cfg, cols, rows, extra={"converged": ok}, comments=[f"converged: {str(ok).lower()}"])
    if cfg["strict"] and not ok:
        return EXIT_AUDIT
    return EXIT_OK


def cmd_bounds_audit(cfg, params):
    quad = _quad(cfg)
    tol = float(cfg["tol"])
    grid = _p_grid(cfg)
    th1 = theorem1_bound(params)
    rows = []
    for p_abs in grid:
        r = spectrum_report(p_abs, params, quad, tol)
        dd1 = lemma_dd1_bound(p_abs, params)
        rows.append({"p_abs": p_abs, "d12_edge": r.d12_edge, "dd1_bound": dd1,
                     "z_star": r.eigenvalue, "th1_bound": th1,
                     "dd1_ok": r.bounds_ok[1], "th1_ok": r.bounds_ok[0],
                     "positive_ok": r.bounds_ok[2], "no_root_ok": None, "error": r.error})
    if cfg["threshold_check"]:
        p_far = no_root_threshold(params) + 1.0
        d12e = kernel_triplet(p_far, None, params, quad, edge=True).d12.value.real
        zs = solve_ground(p_far, params, quad, tol)
        rows.append({"p_abs": p_far, "d12_edge": d12e, "dd1_bound": lemma_dd1_bound(p_far, params),
                     "z_star": zs, "th1_bound": th1,
                     "dd1_ok": d12e <= lemma_dd1_bound(p_far, params), "th1_ok": True,
                     "positive_ok": True, "no_root_ok": zs is None, "error": None})
    cols = ["p_abs", "d12_edge", "dd1_bound", "z_star", "th1_bound",
            "dd1_ok", "th1_ok", "positive_ok", "no_root_ok", "error"]
    _emit(cfg, cols, rows)
    flags = ("dd1_ok", "th1_ok", "positive_ok", "no_root_ok")
    ok = all(r[f] is not False for r in rows for f in flags) and not any(r["error"] for r in rows)
    if cfg["strict"] and not ok:
        return EXIT_AUDIT
    return EXIT_OK


COMMANDS = {
    "dispersion": cmd_dispersion,
    "effmass": cmd_effmass,
    "resolvent": cmd_resolvent,
    "oracle-compare": cmd_oracle_compare,
    "bounds-audit": cmd_bounds_audit,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg, params = resolve_config(args)
        return COMMANDS[args.command](cfg, params)
    except UsageError as exc:
        print(f"pfiber {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, ValueError, RuntimeError, OSError) as exc:
        print(f"pfiber {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
