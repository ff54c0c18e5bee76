"""Command line front end.

    ofdmaloss bound     --config paper_sec3 --alpha 1.5:2.0:0.1
    ofdmaloss exact     --config paper_sec4 --alpha 1.5,2
    ofdmaloss simulate  --config paper_sec3 --alpha 1.5 --reps 100000 --seed 42
    ofdmaloss multicell --config paper_sec5 --both-associations
    ofdmaloss tables    --outdir report

Exit status: 0 success, 2 configuration or usage error, 3 accuracy
warning under ``--strict``.
"""

import argparse
import math
import platform
import sys
import time
import warnings
from pathlib import Path

import numpy as np
import scipy

from . import __version__, config, montecarlo, multicell
from .exactloss import exact_loss
from .model import Scenario, compute_thresholds
from .moments import class_masses, moments_from_classes
from .quadrature import AccuracyWarning
from .report import RunReport
from .tailbound import p_sup

EXIT_CONFIG = 2
EXIT_ACCURACY = 3

PUBLISHED_TABLE1 = (0.18, 0.1, 0.04, 0.02, 0.008, 0.003)
PUBLISHED_TABLE1_DELTA = (0.98, 0.1, 1.15, 1.3, 1.3, 1.4)
PUBLISHED_TABLE2 = (0.2, 0.1, 0.05, 0.02, 0.01, 0.004)
PUBLISHED_TABLE2_DELTA = (1.7, 1.8, 2.1, 2.3, 2.4, 2.6)
PUBLISHED_SEC5 = (21.60, 26.81)
TABLE_ALPHAS = (1.5, 1.6, 1.7, 1.8, 1.9, 2.0)


def parse_alphas(text):
    """``"1.5,2"`` or an inclusive range ``"1.5:2.0:0.1"``."""
    alphas = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            lo, hi, step = (float(x) for x in part.split(":"))
            n = int(math.floor((hi - lo) / step + 1e-9)) + 1
            alphas += [round(lo + k * step, 12) for k in range(n)]
        else:
            alphas.append(float(part))
    if not alphas or any(a < 1 for a in alphas):
        raise argparse.ArgumentTypeError("alpha values must be >= 1")
    return alphas


def _provenance(**extra):
    prov = {"ofdmaloss": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}
    prov.update(extra)
    return prov


def _load(args, want_multicell=False):
    scenario, values = config.load_scenario(args.config)
    if getattr(args, "outage_policy", None):
        values["outage_policy"] = args.outage_policy
        scenario = config.scenario_from_values(values)
    if scenario.mode == "multicell" or want_multicell:
        layout = None
        if getattr(args, "layout", None):
            path = Path(args.layout)
            if not path.is_file():
                raise config.ConfigError(f"layout file not found: {path}")
            try:
                layout = multicell.read_layout(path)
            except ValueError as exc:
                raise config.ConfigError(str(exc)) from None
        return config.multicell_from_values(values, layout), values
    return scenario, values


def scenario_classes(obj):
    if isinstance(obj, multicell.MulticellScenario):
        return multicell.multicell_class_masses(obj)
    return class_masses(obj)


def _base(obj) -> Scenario:
    return obj.base if isinstance(obj, multicell.MulticellScenario) else obj


def _write(report: RunReport, args):
    report.check()
    print(report.to_markdown())
    if getattr(args, "csv", None):
        Path(args.csv).write_text(report.to_csv())


def bound_report(obj, alphas, title="bound"):
    base = _base(obj)
    classes = scenario_classes(obj)
    mom = moments_from_classes(classes)
    rep = RunReport(title, config.dump_scenario(base))
    rep.thresholds = compute_thresholds(base) if base.mode != "multicell" else None
    rep.moments["moments"] = mom
    for a in alphas:
        rep.add_row(alpha=a, n0=a * mom.m, p_sup=p_sup(a, mom, classes.n_max))
    return rep, classes, mom


def exact_report(obj, alphas, title="exact"):
    rep, classes, mom = bound_report(obj, alphas, title)
    rows = rep.rows
    rep.rows, rep.columns = [], []
    for row in rows:
        p_gt = exact_loss(classes, row["n0"], strict=True)
        p_ge = exact_loss(classes, row["n0"], strict=False)
        delta = math.log10(row["p_sup"] / p_gt) if p_gt > 0 else float("nan")
        rep.add_row(**row, p_exact=p_gt, p_exact_ge=p_ge, delta=delta)
    return rep, classes, mom


def cmd_bound(args):
    obj, _ = _load(args)
    rep, _, _ = bound_report(obj, args.alpha, f"bound: {args.config}")
    rep.provenance = _provenance()
    _write(rep, args)


def cmd_exact(args):
    obj, _ = _load(args)
    rep, _, _ = exact_report(obj, args.alpha, f"exact: {args.config}")
    if isinstance(obj, multicell.MulticellScenario):
        rep.notes.append("multicell class masses come from quadrature; loss is semi-exact")
    rep.provenance = _provenance()
    _write(rep, args)


def simulate_rows(obj, alphas, reps, seed, workers):
    """``(alpha, n0, MCEstimate)`` per alpha, all from one simulated sample."""
    classes = scenario_classes(obj)
    mom = moments_from_classes(classes)
    if isinstance(obj, multicell.MulticellScenario):
        totals = multicell.simulate_total_demand_multicell(obj, reps, seed, workers)
    else:
        totals = montecarlo.simulate_total_demand(obj, reps, seed, workers)
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for a in alphas:
            rows.append((a, a * mom.m, montecarlo.estimate_from_totals(totals, a * mom.m, seed)))
    return rows, classes, mom


def cmd_simulate(args):
    obj, _ = _load(args)
    rows, classes, mom = simulate_rows(obj, args.alpha, args.reps, args.seed, args.workers)
    rep = RunReport(f"simulate: {args.config}", config.dump_scenario(_base(obj)))
    rep.moments["moments"] = mom
    for a, n0, est in rows:
        exact = exact_loss(classes, n0)
        rep.add_row(alpha=a, n0=n0, p_hat=est.p_hat, ci_low=est.ci_low, ci_high=est.ci_high,
                    n_reps=est.n_reps, seed=est.seed, p_exact=exact,
                    covers=bool(est.contains(exact)))
        if est.hits < 20:
            rep.notes.append(f"alpha={a}: only {est.hits} overload events; interval unreliable")
    rep.provenance = _provenance(seed=args.seed, reps=args.reps)
    print(rep.to_markdown())
    if args.csv:
        Path(args.csv).write_text(montecarlo.estimates_to_csv(rows))


def multicell_variants(obj, both):
    assocs = multicell.ASSOCIATIONS if both else (obj.association,)
    return [obj.with_(association=a) for a in assocs]


def cmd_multicell(args):
    obj, _ = _load(args, want_multicell=True)
    if args.region:
        obj = obj.with_(region=args.region)
    rep = RunReport(f"multicell: {args.config}", config.dump_scenario(obj.base))
    rep.notes.append(f"region={obj.region}"
                     + (f", region_radius={obj.radius:g} m" if obj.region == "disk" else "")
                     + f", interferers={obj.layout.n_interferers}")
    for variant in multicell_variants(obj, args.both_associations):
        classes = multicell.multicell_class_masses(variant)
        mom = moments_from_classes(classes)
        rep.moments[variant.association] = mom
        totals = None
        if args.reps:
            totals = multicell.simulate_total_demand_multicell(
                variant, args.reps, args.seed, args.workers)
        for a in args.alpha:
            n0 = a * mom.m
            ps = p_sup(a, mom, classes.n_max)
            pl = exact_loss(classes, n0)
            row = dict(association=variant.association, alpha=a, n0=n0, p_sup=ps,
                       p_semi_exact=pl,
                       delta=math.log10(ps / pl) if pl > 0 else float("nan"))
            if totals is not None:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", RuntimeWarning)
                    est = montecarlo.estimate_from_totals(totals, n0, args.seed)
                row.update(p_hat=est.p_hat, ci_low=est.ci_low, ci_high=est.ci_high)
            rep.add_row(**row)
    rep.provenance = _provenance(seed=args.seed if args.reps else None)
    _write(rep, args)


def tables(outdir, reps=0, seed=1, workers=1):
    """Reproduce the published tables; returns the markdown text."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    parts = ["# Reproduction report", ""]

    for name, published, pub_delta in (("paper_sec3", PUBLISHED_TABLE1, PUBLISHED_TABLE1_DELTA),
                                       ("paper_sec4", PUBLISHED_TABLE2, PUBLISHED_TABLE2_DELTA)):
        scen, values = config.load_scenario(name)
        rep, classes, mom = exact_report(scen, TABLE_ALPHAS, f"{name}")
        for row, pub, d in zip(rep.rows, published, pub_delta):
            row["p_sup_published"] = pub
            row["delta_published"] = d
        rep.columns += ["p_sup_published", "delta_published"]
        if reps:
            mc_rows, _, _ = simulate_rows(scen, TABLE_ALPHAS, reps, seed, workers)
            for row, (_, _, est) in zip(rep.rows, mc_rows):
                row.update(p_hat=est.p_hat, ci_low=est.ci_low, ci_high=est.ci_high)
            rep.columns += ["p_hat", "ci_low", "ci_high"]
        rep.provenance = _provenance(seed=seed if reps else None)
        if name == "paper_sec3":
            rep.notes.append("published delta at alpha=1.6 (0.1) breaks the trend of its "
                             "neighbours and is treated as a misprint")
        if name == "paper_sec4":
            values = dict(values)
            values.pop("n_max", None)
            literal = config.scenario_from_values(values)
            lrep, lcls, lmom = bound_report(literal, TABLE_ALPHAS)
            rep.notes.append(
                f"with the ceiling rule n_max = {lcls.n_max}: m_N = {lmom.m:.4f}, "
                f"v_N = {lmom.v:.4f}, P_sup = "
                + ", ".join(f"{r['p_sup']:.4f}" for r in lrep.rows))
        parts.append(rep.to_markdown())
        (outdir / f"{name}.csv").write_text(rep.to_csv())

    sec5, values = config.load_scenario("paper_sec5")
    rep = RunReport("paper_sec5: hexagonal layout moments")
    rep.notes.append(f"published: m_N = {PUBLISHED_SEC5[0]}, v_N = {PUBLISHED_SEC5[1]}")
    for policy in ("exclude", "clamp_to_nmax"):
        base5 = config.multicell_from_values(dict(values, outage_policy=policy))
        for region in ("cell", "disk"):
            for assoc in multicell.ASSOCIATIONS:
                variant = base5.with_(region=region, association=assoc)
                classes = multicell.multicell_class_masses(variant)
                mom = moments_from_classes(classes)
                rep.add_row(outage_policy=policy, region=region, association=assoc,
                            m_N=mom.m, v_N=mom.v,
                            rel_err_m=mom.m / PUBLISHED_SEC5[0] - 1.0,
                            rel_err_v=mom.v / PUBLISHED_SEC5[1] - 1.0,
                            users=classes.total,
                            p_sup_2=p_sup(2.0, mom, classes.n_max))
    best = min(rep.rows, key=lambda r: abs(r["rel_err_m"]) + abs(r["rel_err_v"]))
    rep.notes.append(f"closest: outage_policy={best['outage_policy']}, region={best['region']}, "
                     f"association={best['association']} "
                     f"(m_N {best['rel_err_m']:+.1%}, v_N {best['rel_err_v']:+.1%})")
    rep.provenance = _provenance()
    parts.append(rep.to_markdown())
    (outdir / "paper_sec5.csv").write_text(rep.to_csv())

    text = "\n".join(parts)
    (outdir / "report.md").write_text(text)
    return text


def cmd_tables(args):
    print(tables(args.outdir, args.reps, args.seed, args.workers))


def build_parser():
    parser = argparse.ArgumentParser(prog="ofdmaloss", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, alpha_default="1.5:2.0:0.1"):
        p.add_argument("--config", required=True,
                       help="scenario file or bundled name (paper_sec3, paper_sec4, paper_sec5)")
        p.add_argument("--alpha", type=parse_alphas, default=parse_alphas(alpha_default),
                       help="load factors: '1.5,2' or 'lo:hi:step'")
        p.add_argument("--outage-policy", choices=("clamp_to_nmax", "exclude"))
        p.add_argument("--csv", help="also write the table as CSV")
        p.add_argument("--strict", action="store_true",
                       help="exit with status 3 on any numerical accuracy warning")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("bound", help="concentration bound P_sup per alpha")
    common(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("exact", help="exact compound-Poisson loss and delta")
    common(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("simulate", help="Monte Carlo loss estimate")
    common(p, "1.5")
    p.add_argument("--reps", type=int, default=100_000)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("multicell", help="best-server multicell moments and bounds")
    common(p)
    p.add_argument("--layout", help="antenna file, 'x y' per line, serving antenna first")
    p.add_argument("--region", choices=multicell.REGIONS)
    p.add_argument("--both-associations", action="store_true")
    p.add_argument("--reps", type=int, default=0, help="optional Monte Carlo validation")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_multicell)

    p = sub.add_parser("tables", help="reproduce the published tables")
    p.add_argument("--outdir", default="report")
    p.add_argument("--reps", type=int, default=0)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "reps", 0) and args.command == "multicell" and args.seed is None:
        parser.error("--reps requires an explicit --seed")
    if getattr(args, "reps", 0) and args.reps < 1000:
        parser.error("--reps must be at least 1000")
    start = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", AccuracyWarning)
        try:
            args.func(args)
        except config.ConfigError as exc:
            print(f"ofdmaloss: error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    accuracy = [w for w in caught if issubclass(w.category, AccuracyWarning)]
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if accuracy and args.strict:
        return EXIT_ACCURACY
    print(f"# elapsed {time.perf_counter() - start:.2f} s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
