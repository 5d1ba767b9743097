"""Command-line surface.

Subcommands: wigner3j, cg, legendre, cumulants, bounds, simulate, sweep,
verify. Exit codes are a stable contract: 0 success, 1 verification failure,
2 usage/config error, 3 I/O error. Every output file is accompanied by a
JSON manifest carrying the sha256 of its generating configuration and of the
CSV payload, so mismatched replays are detectable. CSV numbers use the
shortest round-trip decimal representation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from . import __version__
from . import bounds as bounds_mod
from . import mc, model, moments
from . import sphfn, wigner
from .checks import run_verify
from .errors import CapacityError, DomainError

__all__ = ["main"]

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("SPHWAVE_WORKERS", "1")))
    except ValueError:
        return 1


def _write_outputs(outdir: str, stem: str, csv_text: str, manifest: dict) -> None:
    os.makedirs(outdir, exist_ok=True)
    csv_path = os.path.join(outdir, stem + ".csv")
    json_path = os.path.join(outdir, stem + ".json")
    manifest = dict(manifest)
    manifest["csv_sha256"] = _sha256(csv_text)
    manifest["tool_version"] = __version__
    with open(csv_path, "w") as fh:
        fh.write(csv_text)
    with open(json_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_wigner3j(args) -> int:
    val = wigner.wigner3j(args.l1, args.l2, args.l3, args.m1, args.m2, args.m3)
    print(_fmt(val))
    if args.exact:
        print(str(wigner.wigner3j_exact(args.l1, args.l2, args.l3, args.m1, args.m2, args.m3)))
    return EXIT_OK


def _cmd_cg(args) -> int:
    val = wigner.clebsch_gordan(args.l1, args.m1, args.l2, args.m2, args.l3, args.m3)
    print(_fmt(val))
    if args.exact:
        phase = (-1) ** ((args.l1 - args.l2 + args.m3) % 2)
        e3 = wigner.wigner3j_exact(args.l1, args.l2, args.l3, args.m1, args.m2, -args.m3)
        print(f"({phase * e3.rational})*sqrt({(2 * args.l3 + 1) * e3.radicand})")
    return EXIT_OK


def _cmd_legendre(args) -> int:
    if args.m:
        print(_fmt(sphfn.assoc_legendre(args.ell, args.m, args.t)))
    else:
        print(_fmt(sphfn.legendre(args.ell, args.t)))
    return EXIT_OK


def _bound_report(args):
    budget = bounds_mod.SmoothnessBudget(args.m1, args.m2, args.m3)
    name = args.theorem
    if name == "one_dim_wasserstein":
        return bounds_mod.bound_one_dim(args.ell, args.rate)
    if name == "one_dim_kolmogorov":
        return bounds_mod.bound_one_dim_kolmogorov(args.ell, args.rate)
    if name == "fdd_d3":
        return bounds_mod.bound_fdd_d3(args.ell, args.rate, args.d, budget)
    if name == "harmonic_d3":
        return bounds_mod.bound_harmonic_d3(args.ell, args.rate, budget)
    if name == "harmonic_d2":
        return bounds_mod.bound_harmonic_d2(args.ell, args.rate, budget)
    if name == "fdd_via_harmonics":
        return bounds_mod.bound_fdd_via_harmonics(args.ell, args.rate, args.d, budget)
    if name == "functional":
        return bounds_mod.bound_functional(args.rate, args.ell)
    raise DomainError(f"unknown theorem {name!r}; know {bounds_mod.THEOREMS}")


def _cmd_bounds(args) -> int:
    rep = _bound_report(args)
    header = "theorem,ell,rate,d,m1,m2,m3,value,leading_term,combined"
    row = ",".join(
        _fmt(v)
        for v in (
            rep.theorem,
            rep.ell,
            rep.rate,
            rep.d,
            args.m1,
            args.m2,
            args.m3,
            rep.value,
            rep.leading_term,
            rep.combined,
        )
    )
    csv_text = header + "\n" + row + "\n"
    obj = {
        "theorem": rep.theorem,
        "ell": rep.ell,
        "rate": rep.rate,
        "d": rep.d,
        "budget": {"m1": args.m1, "m2": args.m2, "m3": args.m3},
        "value": rep.value,
        "leading_term": rep.leading_term,
        "combined": rep.combined,
    }
    print(csv_text, end="")
    print(json.dumps(obj, sort_keys=True))
    if args.out:
        cfg = {"command": "bounds", **obj}
        _write_outputs(args.out, f"bounds_{rep.theorem}", csv_text, {"config": cfg, "config_sha256": _sha256(_canonical_json(cfg))})
    return EXIT_OK


def _cmd_cumulants(args) -> int:
    target = args.target
    if target == "point":
        analytic = moments.cum4_point(args.ell, args.rate)
    elif target == "coefficient":
        analytic = moments.cum4_coefficient(args.ell, args.m, args.rate)
    else:
        raise DomainError("cumulants targets: point, coefficient")
    k4 = k4_se = w1 = None
    sample = None
    if args.replicates:
        cfg = mc.ExperimentConfig(
            ell=args.ell,
            rate=args.rate,
            replicates=args.replicates,
            seed=args.seed,
            target=target,
            m=args.m,
            workers=args.workers,
        )
        sample = mc.run(cfg)
        ks = mc.k_statistics(sample)
        k4, k4_se = ks.k4, ks.se4
        if target == "point":
            w1 = mc.empirical_w1_to_standard_normal(sample)
    report = moments.CumulantReport(
        target=target,
        ell=args.ell,
        rate=args.rate,
        m=args.m if target == "coefficient" else None,
        analytic=analytic,
        mc_estimate=k4,
        mc_stderr=k4_se,
    )
    row = {
        "ell": args.ell,
        "rate": args.rate,
        "replicates": args.replicates or 0,
        "seed": args.seed,
        "target": target,
        "analytic_cum4": analytic,
        "k4": k4,
        "k4_se": k4_se,
        "w1": w1,
        "bound_wasserstein": bounds_mod.bound_one_dim(args.ell, args.rate).value if args.ell >= 2 else None,
        "bound_d3": bounds_mod.bound_fdd_d3(args.ell, args.rate, d=1).value,
        "bound_functional": bounds_mod.bound_functional(args.rate).value,
    }
    csv_text = ",".join(mc.CSV_COLUMNS) + "\n" + ",".join(_fmt(row[c]) for c in mc.CSV_COLUMNS) + "\n"
    obj = {
        "target": report.target,
        "ell": report.ell,
        "rate": report.rate,
        "m": report.m,
        "analytic": report.analytic,
        "mc_estimate": report.mc_estimate,
        "mc_stderr": report.mc_stderr,
        "sigma_distance": report.sigma_distance,
        "w1": w1,
    }
    print(csv_text, end="")
    print(json.dumps(obj, sort_keys=True))
    if args.out:
        cfg = {
            "command": "cumulants",
            "ell": args.ell,
            "rate": args.rate,
            "m": args.m,
            "target": target,
            "replicates": args.replicates or 0,
            "seed": args.seed,
        }
        _write_outputs(
            args.out,
            "cumulants",
            csv_text,
            {"config": cfg, "config_sha256": _sha256(_canonical_json(cfg))},
        )
    return EXIT_OK


def _cmd_simulate(args) -> int:
    r = model.sample_realization(args.rate, args.seed, args.replicate)
    if args.out:
        model.save_realization(r, args.out)
    print(json.dumps({"rate": r.rate, "seed": r.seed, "replicate": r.replicate, "count": r.count}))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        ells = cfg["ell"] if isinstance(cfg["ell"], list) else [cfg["ell"]]
        rates = cfg["rate"] if isinstance(cfg["rate"], list) else [cfg["rate"]]
        base = mc.ExperimentConfig(
            ell=int(ells[0]),
            rate=float(rates[0]),
            replicates=int(cfg["replicates"]),
            seed=int(cfg["seed"]),
            target=cfg.get("target", "point"),
            workers=int(cfg.get("workers", args.workers)),
            batches=int(cfg.get("batches", 25)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    t0 = time.time()
    result = mc.convergence_sweep([int(e) for e in ells], [float(v) for v in rates], base)
    csv_text = result.to_csv()
    print(csv_text, end="")
    manifest = {
        "config": cfg,
        "config_sha256": _sha256(_canonical_json(cfg)),
        "floor": {
            "mean": result.floor.mean,
            "sd": result.floor.sd,
            "replicates": result.floor.replicates,
            "runs": result.floor.runs,
        },
        "slopes": {str(k): v for k, v in result.slopes.items()},
        "wall_time_s": time.time() - t0,
    }
    print(json.dumps({"slopes": manifest["slopes"], "floor": manifest["floor"]}, sort_keys=True))
    if args.out:
        _write_outputs(args.out, "sweep", csv_text, manifest)
    return EXIT_OK


def _cmd_verify(args) -> int:
    manifest = run_verify(args.level)
    for c in manifest.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} {c.name}: measured {c.measured:.3e} tolerance {c.tolerance:.3e} {c.detail}")
    print(f"{'PASS' if manifest.passed else 'FAIL'} overall ({manifest.level}, {manifest.finished - manifest.started:.1f}s)")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, f"verify_{args.level}.json"), "w") as fh:
            json.dump(manifest.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    if not manifest.passed:
        failing = [c.name for c in manifest.checks if not c.passed]
        print(f"failing checks: {', '.join(failing)}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sphwave", description=__doc__)
    parser.add_argument("--version", action="version", version=f"sphwave {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wigner3j", help="one Wigner 3j symbol")
    for name in ("l1", "l2", "l3", "m1", "m2", "m3"):
        p.add_argument(name, type=int)
    p.add_argument("--exact", action="store_true", help="also print the exact rational*sqrt form")
    p.set_defaults(fn=_cmd_wigner3j)

    p = sub.add_parser("cg", help="one Clebsch-Gordan coefficient")
    for name in ("l1", "m1", "l2", "m2", "l3", "m3"):
        p.add_argument(name, type=int)
    p.add_argument("--exact", action="store_true")
    p.set_defaults(fn=_cmd_cg)

    p = sub.add_parser("legendre", help="Legendre or associated Legendre value")
    p.add_argument("ell", type=int)
    p.add_argument("t", type=float)
    p.add_argument("--m", type=int, default=0)
    p.set_defaults(fn=_cmd_legendre)

    p = sub.add_parser("cumulants", help="analytic cumulant with optional Monte Carlo check")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--target", choices=("point", "coefficient"), default="point")
    p.add_argument("--replicates", type=int, default=0)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=_default_workers())
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_cumulants)

    p = sub.add_parser("bounds", help="evaluate one theorem bound")
    p.add_argument("--theorem", required=True, choices=bounds_mod.THEOREMS)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--m1", type=float, default=1.0)
    p.add_argument("--m2", type=float, default=1.0)
    p.add_argument("--m3", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_bounds)

    p = sub.add_parser("simulate", help="draw one realization and write its replay file")
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--replicate", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("sweep", help="convergence sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--workers", type=int, default=_default_workers())
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("verify", help="run the identity/bound check suite")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (DomainError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
