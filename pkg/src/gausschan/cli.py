"""Command-line front end.

Every command writes one document (JSON, CSV or SVG) to ``--output`` or
stdout. JSON documents carry ``{"manifest": ..., "data": ...}``; CSV output
gets a ``<output>.manifest.json`` sidecar when written to a file; SVG embeds
the manifest in ``<metadata>``. The manifest timestamp honours
``SOURCE_DATE_EPOCH`` so complete files can be made byte-reproducible.

Exit codes: 0 ok, 2 validation error, 3 numeric failure (including failed
Monte Carlo checks).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from datetime import datetime, timezone
from importlib import metadata as importlib_metadata

import numpy as np

from . import canonical, cloner, dilation, mc_oracle, qkd
from .gaussian_core import GaussianChannel, GaussianError, SingularConditioningError, vacuum
from .plot import threshold_svg

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC = 0, 2, 3
TOOL = "gausschan"


def _version() -> str:
    try:
        return importlib_metadata.version("artifact")
    except importlib_metadata.PackageNotFoundError:
        return "0+unknown"


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return now.strftime("%Y-%m-%dT%H:%M:%SZ")


def jsonable(obj):
    """Convert numpy values and non-finite floats ("inf", "-inf", "nan") for strict JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True, allow_nan=False, ensure_ascii=False) + "\n"


def fmt_float(x: float) -> str:
    return repr(float(x))


def _manifest(args: argparse.Namespace) -> dict:
    params = {k: v for k, v in vars(args).items() if k not in ("func", "command", "output")}
    return {
        "command": args.command,
        "parameters": jsonable(params),
        "tool": TOOL,
        "version": _version(),
        "seed": getattr(args, "seed", None),
        "timestamp": _timestamp(),
    }


def _write(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _emit_json(args, data) -> None:
    _write(dumps({"manifest": _manifest(args), "data": data}), args.output)


def _form_dict(form: canonical.CanonicalForm) -> dict:
    inv = form.invariants
    return {
        "invariants": {"tau": inv.tau, "rank_r": inv.rank_r, "nbar": inv.nbar},
        "class": form.cls.value,
        "regular": canonical.is_regular(inv),
        "Tc": form.Tc,
        "Nc": form.Nc,
    }


def cmd_classify(args) -> int:
    t, n, d = args.T, args.N, args.d
    ch = GaussianChannel(np.reshape(t, (2, 2)), [[n[0], n[1]], [n[1], n[2]]], d)
    validity = ch.validity()
    if not all(validity.values()):
        _emit_json(args, {"error": {"type": "InvalidChannelError", "validity": validity}})
        return EXIT_VALIDATION
    inv = canonical.invariants_of(ch)
    out = _form_dict(canonical.canonical_form(inv))
    out["validity"] = validity
    _emit_json(args, out)
    return EXIT_OK


def cmd_canonical_form(args) -> int:
    form = canonical.canonical_form(canonical.ChannelInvariants(args.tau, args.rank, args.nbar))
    out = _form_dict(form)
    out["validity"] = form.as_channel().validity()
    _emit_json(args, out)
    return EXIT_OK


def cmd_dilation(args) -> int:
    form = canonical.regular_form(args.tau, args.nbar)
    rep = dilation.physical_representation(form)
    pur = dilation.tmsv_purification(form)
    vac = rep.bob_state(vacuum(1))
    _emit_json(args, {
        **_form_dict(form),
        "M_ae": rep.M.matrix,
        "env_cov": rep.env.cov,
        "M_ext": pur.M_ext.matrix,
        "tmsv_cov": pur.env.cov,
        "bob_cov_on_vacuum": vac.cov,
        "strongly_antidegradable": dilation.is_strongly_antidegradable(form),
        "weakly_degradable": dilation.is_weakly_degradable(form),
    })
    return EXIT_OK


def _attack(args) -> qkd.AttackParams:
    mu = math.inf if args.mu is None else args.mu
    if args.epsilon is not None:
        return qkd.AttackParams.from_excess_noise(args.tau, args.epsilon, mu)
    return qkd.AttackParams(args.tau, args.omega, mu)


def cmd_keyrate(args) -> int:
    report = qkd.rate_report(_attack(args))
    data = report.to_dict()
    data["asymptotic"] = math.isinf(report.mu)
    data["log_base"] = 2
    _emit_json(args, data)
    return EXIT_OK


def _tau_grid(args) -> list[float]:
    if args.steps < 1:
        raise GaussianError("steps must be >= 1")
    if args.tau_max < args.tau_min:
        raise GaussianError("tau-max must be >= tau-min")
    if args.steps == 1:
        if args.tau_max != args.tau_min:
            raise GaussianError("a single step needs tau-min == tau-max")
        return [float(args.tau_min)]
    if args.tau_max == args.tau_min:
        raise GaussianError("degenerate range: tau-min == tau-max with several steps")
    return [float(x) for x in np.linspace(args.tau_min, args.tau_max, args.steps)]


def threshold_csv(rows) -> str:
    lines = ["tau,eps_dr,eps_rr"]
    for r in rows:
        if r.excluded:
            lines.append(f"{fmt_float(r.tau)},excluded,excluded")
        else:
            lines.append(f"{fmt_float(r.tau)},{fmt_float(r.eps_dr)},{fmt_float(r.eps_rr)}")
    return "\n".join(lines) + "\n"


def cmd_threshold(args) -> int:
    rows = qkd.threshold_sweep(_tau_grid(args))
    manifest = _manifest(args)
    if args.format == "csv":
        _write(threshold_csv(rows), args.output)
        if args.output not in (None, "-"):
            _write(dumps(manifest), args.output + ".manifest.json")
    elif args.format == "json":
        data = [
            {"tau": r.tau, "eps_dr": None if r.excluded else r.eps_dr,
             "eps_rr": None if r.excluded else r.eps_rr, "excluded": r.excluded}
            for r in rows
        ]
        _write(dumps({"manifest": manifest, "data": data}), args.output)
    else:
        _write(threshold_svg(rows, manifest), args.output)
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.grid_file:
        with open(args.grid_file, encoding="utf-8") as fh:
            grid = json.load(fh)
    else:
        grid = mc_oracle.DEFAULT_GRID
    record = mc_oracle.validate_grid(grid, args.samples, args.seed, n_se=args.n_se,
                                     workers=args.workers, quadrature=args.quadrature)
    _emit_json(args, record)
    return EXIT_OK if record["passed"] else EXIT_NUMERIC


def cmd_cloner_equiv(args) -> int:
    attack = qkd.AttackParams(args.tau, args.omega)
    c = cloner.ogc_equivalent_of(attack)
    eq = cloner.dr_equivalence(attack, args.mu)
    _emit_json(args, {
        "chi_b": c.chi_b,
        "chi_c": c.chi_c,
        "disturbance_product": cloner.disturbance_product(c),
        "mu": args.mu,
        "attack": {"I_AB": eq.attack_I_AB, "I_AE": eq.attack_I_AE},
        "cloner": {"I_AB": eq.cloner_I_AB, "I_AE": eq.cloner_I_AE},
        "max_abs_diff": eq.max_abs_diff,
        "scope": "direct reconciliation, high modulation",
    })
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL, description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--output", "-o", default=None, help="output path (default stdout)")
        return p

    p = add("classify", cmd_classify, "invariants and canonical form of a channel")
    p.add_argument("--T", type=float, nargs=4, required=True, metavar="X", help="T row-major")
    p.add_argument("--N", type=float, nargs=3, required=True, metavar="X", help="N11 N12 N22")
    p.add_argument("--d", type=float, nargs=2, default=[0.0, 0.0], metavar="X")

    p = add("canonical-form", cmd_canonical_form, "table matrices for given invariants")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--rank", type=int, required=True, choices=(0, 1, 2))
    p.add_argument("--nbar", type=float, default=0.0)

    p = add("dilation", cmd_dilation, "single-mode dilation of a regular form")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--nbar", type=float, default=0.0)

    p = add("keyrate", cmd_keyrate, "variances, informations and key rates")
    p.add_argument("--tau", type=float, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--omega", type=float)
    g.add_argument("--epsilon", type=float, help="excess noise instead of omega")
    p.add_argument("--mu", type=float, default=None, help="modulation (default: asymptotic)")

    p = add("threshold", cmd_threshold, "DR / RR excess-noise thresholds over a tau range")
    p.add_argument("--tau-min", type=float, required=True)
    p.add_argument("--tau-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json", "svg"), default="csv")

    p = add("validate", cmd_validate, "Monte Carlo check of the closed-form variances")
    p.add_argument("--grid-file", default=None, help="JSON list of {tau, omega, mu}")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--n-se", type=float, default=4.0)
    p.add_argument("--quadrature", choices=("q", "p"), default="q")

    p = add("cloner-equiv", cmd_cloner_equiv, "optimal-cloner equivalent of an attack")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--mu", type=float, default=1e8)
    return parser


def _error(args, exc: Exception, code: int) -> int:
    _write(dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}),
           getattr(args, "output", None))
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with np.errstate(all="raise"):
            return args.func(args)
    except (SingularConditioningError, qkd.InfiniteInformationError, FloatingPointError,
            ZeroDivisionError, OverflowError) as exc:
        return _error(args, exc, EXIT_NUMERIC)
    except (GaussianError, ValueError, OSError) as exc:
        return _error(args, exc, EXIT_VALIDATION)


if __name__ == "__main__":
    sys.exit(main())
