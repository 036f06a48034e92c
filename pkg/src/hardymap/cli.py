"""Command-line surface of the toolkit.

Each subcommand resolves its configuration, echoes it into the output
artifact together with the library version, and emits either CSV (for
per-level tables) or JSON (for verdicts and reports).  Outputs are
UTF-8 with LF line endings, numbers carry 9 significant digits, and two
runs with the same configuration produce byte-identical payloads
regardless of the thread count taken from HARDYMAP_THREADS.

Exit codes: 0 decisive result, 2 inconclusive, 64 usage error,
1 computational failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from ._threads import ENV_THREADS
from .criteria import (
    FIT_RESIDUAL_MAX,
    AlphaGrid,
    hyp_criterion,
    levelset_decay_profile,
    measure_profile,
    membership_verdict,
)
from .errors import HardyMapError, ParameterRangeError, UnknownMapError
from .hmeasure import WoSConfig
from .hypgeo import green_disk, green_via_distance, hyp_dist
from .levelset import min_modulus
from .maps import catalog_entries, parse_map_spec

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64

_GREENS_TOL = 1e-12


class UsageError(HardyMapError):
    """Invalid command line; reported on stderr with exit code 64."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags, which collides with the
    # inconclusive exit code; route everything through UsageError instead
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings of one invocation, echoed into outputs."""

    command: str
    map_spec: str | None = None
    p: float | None = None
    alpha: float | None = None
    grid: AlphaGrid | None = None
    walkers: int | None = None
    epsilon: float | None = None
    seed: int | None = None
    pairs: int | None = None
    include_harm: bool | None = None

    def as_dict(self):
        out = {"command": self.command}
        if self.map_spec is not None:
            out["map"] = self.map_spec
        for key in ("p", "alpha", "walkers", "epsilon", "seed", "pairs"):
            v = getattr(self, key)
            if v is not None:
                out[key] = v
        if self.grid is not None:
            out["grid"] = {
                "alpha_min": self.grid.alpha_min,
                "alpha_max": self.grid.alpha_max,
                "points_per_decade": self.grid.points_per_decade,
            }
        if self.include_harm is not None:
            out["include_harm"] = self.include_harm
        return out


# ---------------------------------------------------------------------------
# deterministic serialization


def _num(x):
    """9-significant-digit text for one CSV field."""
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def _jsonable(obj):
    """Payload copy with floats rounded to 9 digits, non-finite as text."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "infinity" if x > 0 else "-infinity"
        return float(f"{x:.9g}")
    return obj


def _emit(text, out_path):
    if out_path is None:
        sys.stdout.write(text)
        return
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _render_json(payload, config):
    doc = {"version": __version__, "config": config.as_dict()}
    doc.update(payload)
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"


def _render_csv(header, rows, config):
    buf = io.StringIO()
    buf.write(f"# hardymap {__version__}\n")
    buf.write(
        "# config: " + json.dumps(_jsonable(config.as_dict()), sort_keys=True) + "\n"
    )
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([_num(v) for v in row] for row in rows)
    return buf.getvalue()


def _render_table(header, rows, config, fmt):
    if fmt == "json":
        payload = {"columns": list(header), "rows": [list(r) for r in rows]}
        return _render_json(payload, config)
    return _render_csv(header, rows, config)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_greens_check(args):
    if args.pairs < 1:
        raise UsageError("--pairs must be a positive integer")
    config = RunConfig(command="greens-check", seed=args.seed, pairs=args.pairs)
    rng = np.random.Generator(np.random.Philox(key=args.seed))
    u = rng.random((4, args.pairs))
    z = 0.95 * np.sqrt(u[0]) * np.exp(2j * math.pi * u[1])
    w = 0.95 * np.sqrt(u[2]) * np.exp(2j * math.pi * u[3])
    w = np.where(z == w, 0.5 * w + 0.1, w)
    direct = green_disk(z, w)
    via = green_via_distance(hyp_dist(z, w))
    max_rel = float(np.max(np.abs(direct - via) / np.abs(direct)))
    passed = max_rel <= _GREENS_TOL
    text = _render_json(
        {"max_rel_deviation": max_rel, "tolerance": _GREENS_TOL, "passed": passed},
        config,
    )
    _emit(text, args.out)
    return EXIT_OK if passed else EXIT_FAILURE


def _cmd_distance(args):
    if args.alpha is None or args.alpha <= 0.0:
        raise UsageError("--alpha must be a positive real")
    m = parse_map_spec(args.map)
    config = RunConfig(command="distance", map_spec=m.spec, alpha=args.alpha)
    r_min = min_modulus(m, args.alpha)
    d = math.log1p(r_min) - math.log1p(-r_min)
    row = (m.spec, args.alpha, r_min, d, math.exp(-d))
    text = _render_table(
        ("map", "alpha", "r_min", "d", "exp_neg_d"), [row], config, args.format
    )
    _emit(text, args.out)
    return EXIT_OK


def _cmd_hardy_number(args):
    m = parse_map_spec(args.map)
    grid = _grid_from(args)
    config = RunConfig(command="hardy-number", map_spec=m.spec, grid=grid)
    fit = hyp_criterion(m, 1.0, grid)
    if fit.superpolynomial:
        estimate, residual = math.inf, fit.fit_residual
    else:
        estimate, residual = fit.tail_exponent, fit.fit_residual
    conclusive = fit.superpolynomial or (
        math.isfinite(residual) and residual <= FIT_RESIDUAL_MAX
    )
    payload = {
        "map": m.spec,
        "estimate": estimate if conclusive else None,
        "fit_residual": residual,
        "known": m.known_hardy_number,
    }
    _emit(_render_json(payload, config), args.out)
    return EXIT_OK if conclusive else EXIT_INCONCLUSIVE


def _criterion_evidence(result):
    return {
        "kind": result.kind,
        "verdict": result.verdict,
        "tail_exponent": result.tail_exponent,
        "fit_residual": result.fit_residual,
        "truncated_value": result.truncated_value,
        "superpolynomial": result.superpolynomial,
        "n_points": result.n_points,
    }


def _cmd_verify(args):
    if args.p is None or args.p <= 0.0:
        raise UsageError("--p must be a positive real")
    m = parse_map_spec(args.map)
    grid = _grid_from(args)
    cfg = _wos_from(args)
    config = RunConfig(
        command="verify",
        map_spec=m.spec,
        p=args.p,
        grid=grid,
        include_harm=args.include_harm,
        walkers=cfg.n_walkers if args.include_harm else None,
        epsilon=cfg.epsilon if args.include_harm else None,
        seed=cfg.seed if args.include_harm else None,
    )
    verdict = membership_verdict(
        m, args.p, grid=grid, include_harm=args.include_harm, cfg=cfg
    )
    evidence = {}
    for name, res in verdict.evidence:
        if hasattr(res, "verdict"):
            evidence[name] = _criterion_evidence(res)
        elif hasattr(res, "partials"):
            evidence[name] = {
                "classification": res.classification,
                "value": res.value,
                "growth_exponent": res.growth_exponent,
                "increment_ratio": res.increment_ratio,
                "divergent": res.divergent,
            }
        else:
            evidence[name] = {
                "classification": res.classification,
                "growth_exponent": res.growth_exponent,
                "increment_ratio": res.increment_ratio,
                "nondecreasing": res.nondecreasing,
                "sup_estimate": res.sup_estimate,
            }
    payload = {"map": m.spec, "p": args.p, "conclusion": verdict.conclusion,
               "evidence": evidence}
    _emit(_render_json(payload, config), args.out)
    return EXIT_OK if verdict.conclusion != "inconclusive" else EXIT_INCONCLUSIVE


def _cmd_criteria(args):
    if args.p is not None and args.p <= 0.0:
        raise UsageError("--p must be a positive real")
    p = args.p if args.p is not None else 1.0
    m = parse_map_spec(args.map)
    grid = _grid_from(args, alpha_min=1.0, alpha_max=1e3, per_decade=4)
    cfg = _wos_from(args)
    config = RunConfig(
        command="criteria",
        map_spec=m.spec,
        p=p,
        grid=grid,
        walkers=cfg.n_walkers,
        epsilon=cfg.epsilon,
        seed=cfg.seed,
    )
    decay = levelset_decay_profile(m, grid)
    estimates = measure_profile(m, grid, cfg)
    rows = []
    for a, e_d, est in zip(grid.values, decay, estimates):
        a = float(a)
        rows.append(
            (
                a,
                float(e_d),
                est.value,
                est.std_error,
                a ** (p - 1.0) * float(e_d),
                a ** (p - 1.0) * est.value,
            )
        )
    header = ("alpha", "exp_neg_d", "omega", "omega_stderr",
              "integrand_hyp", "integrand_harm")
    _emit(_render_table(header, rows, config, args.format), args.out)
    return EXIT_OK


def _cmd_catalog(args):
    config = RunConfig(command="catalog")
    rows = list(catalog_entries())
    header = ("name", "parameters", "image_domain", "hardy_number")
    _emit(_render_table(header, rows, config, args.format), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument plumbing


def _grid_from(args, alpha_min=None, alpha_max=None, per_decade=None):
    defaults = AlphaGrid()
    return AlphaGrid(
        alpha_min=args.alpha_min
        if args.alpha_min is not None
        else (alpha_min if alpha_min is not None else defaults.alpha_min),
        alpha_max=args.alpha_max
        if args.alpha_max is not None
        else (alpha_max if alpha_max is not None else defaults.alpha_max),
        points_per_decade=args.per_decade
        if args.per_decade is not None
        else (per_decade if per_decade is not None else defaults.points_per_decade),
    )


def _wos_from(args):
    defaults = WoSConfig()
    walkers = args.walkers if args.walkers is not None else _default_walkers(args)
    return WoSConfig(
        epsilon=args.epsilon if args.epsilon is not None else defaults.epsilon,
        n_walkers=walkers,
        seed=args.seed if args.seed is not None else defaults.seed,
    )


def _default_walkers(args):
    # the criteria table favors turnaround: one WoS run per grid row
    if args.command == "criteria":
        return 20_000
    return WoSConfig().n_walkers


def _add_grid_flags(sub):
    sub.add_argument("--alpha-min", type=float, default=None,
                     help="smallest level of the alpha grid")
    sub.add_argument("--alpha-max", type=float, default=None,
                     help="largest level of the alpha grid")
    sub.add_argument("--per-decade", type=int, default=None,
                     help="grid points per decade")


def _add_wos_flags(sub):
    sub.add_argument("--walkers", type=int, default=None,
                     help="random walkers per harmonic-measure estimate")
    sub.add_argument("--epsilon", type=float, default=None,
                     help="absorption shell width")
    sub.add_argument("--seed", type=int, default=None,
                     help="base seed; grid row i uses seed + i")


def _add_common(sub, formats=("csv", "json"), default_format="csv"):
    sub.add_argument("--format", choices=list(formats), default=default_format,
                     help=f"output format (default {default_format})")
    sub.add_argument("--out", default=None, metavar="PATH",
                     help="write the output to PATH instead of stdout")


def _build_parser():
    parser = _Parser(
        prog="hardymap",
        description="Hardy-space membership of conformal disk maps.",
        epilog=f"Thread count is read from {ENV_THREADS} (default: all "
               "logical cores); results never depend on it.",
    )
    parser.add_argument("--version", action="version",
                        version=f"hardymap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("greens-check",
                       help="verify the two Green-function formulas agree")
    g.add_argument("--pairs", type=int, default=10_000,
                   help="number of random point pairs (default 10000)")
    g.add_argument("--seed", type=int, default=7, help="sampling seed")
    _add_common(g, formats=("json",), default_format="json")
    g.set_defaults(fn=_cmd_greens_check)

    d = sub.add_parser("distance",
                       help="hyperbolic distance from 0 to one level set")
    d.add_argument("--map", required=True, help="catalog spec, e.g. sector:2")
    d.add_argument("--alpha", type=float, default=None, help="level of |psi|")
    _add_common(d)
    d.set_defaults(fn=_cmd_distance)

    h = sub.add_parser("hardy-number",
                       help="fit the decay exponent of exp(-d) on a grid")
    h.add_argument("--map", required=True)
    _add_grid_flags(h)
    _add_common(h, formats=("json",), default_format="json")
    h.set_defaults(fn=_cmd_hardy_number)

    v = sub.add_parser("verify",
                       help="decide H^p membership from all criteria")
    v.add_argument("--map", required=True)
    v.add_argument("--p", type=float, default=None, help="Hardy exponent")
    v.add_argument("--include-harm", action="store_true",
                   help="add the Monte Carlo harmonic-measure criterion")
    _add_grid_flags(v)
    _add_wos_flags(v)
    _add_common(v, formats=("json",), default_format="json")
    v.set_defaults(fn=_cmd_verify)

    c = sub.add_parser("criteria",
                       help="per-level table of both decay integrands")
    c.add_argument("--map", required=True)
    c.add_argument("--p", type=float, default=None,
                   help="Hardy exponent for the integrand columns (default 1)")
    _add_grid_flags(c)
    _add_wos_flags(c)
    _add_common(c)
    c.set_defaults(fn=_cmd_criteria)

    cat = sub.add_parser("catalog", help="list the built-in map families")
    _add_common(cat)
    cat.set_defaults(fn=_cmd_catalog)
    return parser


def run(argv=None):
    """Entry point; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except (UsageError, UnknownMapError, ParameterRangeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HardyMapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(run())
