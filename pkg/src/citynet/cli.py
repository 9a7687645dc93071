"""Command-line interface.

Subcommands: ingest raw CSVs into a dataset, build the check-in/follow
network, run the generator (with ablations and a reproducibility manifest),
analyze a graph, synthesize a test city, and compare model output against a
dataset.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import secrets
import sys
from dataclasses import asdict, fields, replace
from pathlib import Path

from . import __version__
from .analysis import (
    compute_metric_report,
    ks_distance,
    place_popularity,
    popularity_comparison,
    span_distribution,
    write_ccdf_csv,
    write_degree_csv,
    write_popularity_grouped_csv,
    write_popularity_pairs_csv,
    write_span_pdf_csv,
)
from .community import louvain, modularity
from .generator import (
    GeneratorConfig,
    calibrate_uniform_tie_prob,
    generate,
    generate_synthetic_city,
    read_assignment,
    write_assignment,
)
from .graph import average_clustering, giant_component, read_edge_list, write_edge_list
from .ingest import (
    build_city_network,
    CityDataset,
    load_dataset,
    parse_checkins,
    parse_follows,
    parse_venues,
    save_dataset,
)

log = logging.getLogger("citynet")


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _resolve_threads(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("CITYNET_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring invalid CITYNET_THREADS=%r", env)
    return 1


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_ingest(args: argparse.Namespace) -> int:
    with open(args.checkins, encoding="utf-8", newline="") as fh:
        checkins = parse_checkins(fh)
    with open(args.venues, encoding="utf-8", newline="") as fh:
        venues = parse_venues(fh)
    with open(args.follows, encoding="utf-8", newline="") as fh:
        follows = parse_follows(fh)
    dataset, stats = CityDataset.assemble(checkins, venues, follows)
    if stats["dropped_follows"]:
        log.info("dropped %d follow(s) referencing users with no check-ins",
                 stats["dropped_follows"])
    save_dataset(dataset, args.out)
    print(
        f"users={len(dataset.users)} venues={len(dataset.venues)} "
        f"checkins={len(dataset.checkins)}"
    )
    return 0


def cmd_build_network(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.dataset)
    g = build_city_network(dataset, include_isolated=args.include_isolated)
    write_edge_list(g, args.out)
    gc = giant_component(g)
    print(f"N={g.node_count} K={g.edge_count} N_GC={gc.node_count}")
    return 0


def _config_from_args(args: argparse.Namespace) -> tuple[GeneratorConfig, bool, bool]:
    """Build the run config; returns (config, seed_was_auto, tie_prob_pinned)."""
    doc: dict = {}
    if args.config:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(doc, dict):
            raise ValueError("config file must hold a JSON object")
        known = {f.name for f in fields(GeneratorConfig)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    overrides = dict(doc)
    for name in ("distance", "categories", "closure"):
        if name in (args.ablate or []):
            overrides[f"ablate_{name}"] = True
    if args.alpha is not None:
        overrides["alpha"] = args.alpha
    tie_prob_pinned = "uniform_tie_prob" in doc
    if args.uniform_tie_prob is not None:
        overrides["uniform_tie_prob"] = args.uniform_tie_prob
        tie_prob_pinned = True
    auto_seed = False
    if args.seed is not None:
        overrides["seed"] = args.seed
    elif "seed" not in overrides:
        overrides["seed"] = secrets.randbits(63)
        auto_seed = True
    return GeneratorConfig(**overrides), auto_seed, tie_prob_pinned


def cmd_generate(args: argparse.Namespace) -> int:
    if args.runs < 1:
        raise ValueError("--runs must be >= 1")
    threads = _resolve_threads(args.threads)
    dataset = load_dataset(args.dataset)
    cfg, auto_seed, tie_prob_pinned = _config_from_args(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seeds = [cfg.seed + i for i in range(args.runs)]
    calibrated: list[float] | None = (
        [] if (cfg.ablate_categories and not tie_prob_pinned) else None
    )
    outputs: dict[str, str] = {}
    metrics_all: list[dict] = []
    for i, seed in enumerate(seeds):
        run_cfg = replace(cfg, seed=seed)
        if calibrated is not None:
            p = calibrate_uniform_tie_prob(dataset, run_cfg)
            calibrated.append(p)
            run_cfg = replace(run_cfg, uniform_tie_prob=p)
        assignment, g = generate(dataset, run_cfg)
        tag = f"-{i:02d}" if args.runs > 1 else ""
        graph_path = out_dir / f"graph{tag}.edges"
        assign_path = out_dir / f"assignment{tag}.csv"
        metrics_path = out_dir / f"metrics{tag}.json"
        write_edge_list(g, graph_path)
        write_assignment(assignment, assign_path)
        metrics = _structural_metrics(g, seed)
        _dump_json(metrics, metrics_path)
        metrics_all.append(metrics)
        for p_ in (graph_path, assign_path, metrics_path):
            outputs[p_.name] = _sha256(p_)
        log.info("run %d/%d: seed=%d N=%d K=%d", i + 1, args.runs, seed,
                 metrics["n"], metrics["k"])
    if args.runs > 1:
        avg = _average_metrics(metrics_all)
        avg_path = out_dir / "metrics-avg.json"
        _dump_json(avg, avg_path)
        outputs[avg_path.name] = _sha256(avg_path)
    manifest = {
        "command": "generate",
        "tool_version": __version__,
        "config": asdict(cfg),
        "auto_seed": auto_seed,
        "runs": args.runs,
        "seeds": seeds,
        "calibrated_uniform_tie_prob": calibrated,
        "threads": threads,
        "inputs": {"dataset": {"path": str(args.dataset), "sha256": _sha256(Path(args.dataset))}},
        "outputs": outputs,
    }
    _dump_json(manifest, out_dir / "manifest.json")
    last = metrics_all[-1]
    print(f"N={last['n']} K={last['k']} N_GC={last['n_gc']} seed={seeds[-1]}")
    return 0


def _structural_metrics(g, seed: int) -> dict:
    from .analysis import average_shortest_path

    n = g.node_count
    k = g.edge_count
    gc = giant_component(g)
    metrics: dict = {"n": n, "k": k, "n_gc": gc.node_count}
    metrics["clustering"] = average_clustering(g) if n > 0 else None
    if gc.node_count < 2:
        metrics["avg_path"] = None
    elif gc.node_count <= 10000:
        metrics["avg_path"] = average_shortest_path(gc)
    else:
        metrics["avg_path"] = average_shortest_path(gc, mode="sampled", seed=seed)
    metrics["modularity"] = modularity(g, louvain(g, seed=seed)) if k > 0 else None
    return metrics


def _average_metrics(metrics_all: list[dict]) -> dict:
    keys = metrics_all[0].keys()
    avg: dict = {}
    for key in keys:
        vals = [m[key] for m in metrics_all]
        if any(v is None for v in vals):
            avg[key] = None
        else:
            avg[key] = sum(vals) / len(vals)
    return avg


def cmd_analyze(args: argparse.Namespace) -> int:
    _resolve_threads(args.threads)
    g = read_edge_list(args.graph)
    dataset = load_dataset(args.dataset) if args.dataset else None
    assignment = None
    if args.assignment:
        venues = dataset.venues if dataset is not None else None
        assignment = read_assignment(args.assignment, venues)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = compute_metric_report(
        g,
        dataset=dataset,
        assignment=assignment,
        seed=args.seed,
        coloc_mode=args.coloc_mode,
    )
    _dump_json(report, out_dir / "report.json")
    write_degree_csv(g, out_dir / "degree_hist.csv")
    pop = None
    if assignment is not None and dataset is not None:
        pop = place_popularity(assignment, dataset.venues)
    elif dataset is not None:
        pop = place_popularity(dataset)
    if pop and any(c > 0 for c in pop.values()):
        write_ccdf_csv(pop, out_dir / "popularity_ccdf.csv")
    if dataset is not None:
        span_source = assignment if assignment is not None else dataset
        _, pdf = span_distribution(span_source, dataset.venues, bin_width_km=args.bin_km)
        write_span_pdf_csv(pdf, out_dir / "span_pdf.csv")
    path_s = "None" if report["avg_path"] is None else f"{report['avg_path']:.3f}"
    mod_s = "None" if report["modularity"] is None else f"{report['modularity']:.3f}"
    print(
        f"N={report['n']} K={report['k']} N_GC={report['n_gc']} "
        f"C={report['clustering']:.4f} d={path_s} Q={mod_s}"
    )
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    dataset = generate_synthetic_city(
        args.users,
        args.venues,
        popularity_exponent=args.popularity_exponent,
        span_km=args.span_km,
        seed=args.seed,
        count_exponent=args.count_exponent,
        min_places=args.min_places,
        pop_xmin=args.pop_xmin,
        alpha=args.alpha,
    )
    save_dataset(dataset, args.out)
    print(
        f"users={len(dataset.users)} venues={len(dataset.venues)} "
        f"checkins={len(dataset.checkins)} follows={len(dataset.follows)}"
    )
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.dataset)
    assignment = read_assignment(args.assignment, dataset.venues)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    emp = place_popularity(dataset)
    mod = place_popularity(assignment, dataset.venues)
    cmp_ = popularity_comparison(emp, mod)
    write_popularity_pairs_csv(cmp_, out_dir / "popularity_pairs.csv")
    write_popularity_grouped_csv(cmp_, out_dir / "popularity_grouped.csv")
    emp_samples, emp_pdf = span_distribution(dataset, bin_width_km=args.bin_km)
    mod_samples, mod_pdf = span_distribution(assignment, dataset.venues, bin_width_km=args.bin_km)
    write_span_pdf_csv(emp_pdf, out_dir / "span_pdf_empirical.csv")
    write_span_pdf_csv(mod_pdf, out_dir / "span_pdf_model.csv")
    span_ks = ks_distance(
        [s.span_km for s in emp_samples], [s.span_km for s in mod_samples]
    )
    summary = {"spearman": cmp_.spearman, "span_ks": span_ks}
    _dump_json(summary, out_dir / "summary.json")
    rho_s = "None" if cmp_.spearman is None else f"{cmp_.spearman:.4f}"
    print(f"spearman={rho_s} span_ks={span_ks:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citynet",
        description="Place-focused city social networks: ingest, generate, analyze.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse raw CSVs into a dataset JSON")
    p.add_argument("--checkins", required=True)
    p.add_argument("--venues", required=True)
    p.add_argument("--follows", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("build-network", help="build the check-in/follow social graph")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--include-isolated", action="store_true",
                   help="keep users with no qualifying ties as isolated nodes")
    p.set_defaults(func=cmd_build_network)

    p = sub.add_parser("generate", help="run the generative model")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--config", help="JSON file with GeneratorConfig overrides")
    p.add_argument("--seed", type=int)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--ablate", action="append", choices=["distance", "categories", "closure"],
                   help="disable a model ingredient (repeatable)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--uniform-tie-prob", type=float,
                   help="pin the category-ablation tie probability (skips calibration)")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", help="metrics for a graph (plus optional dataset context)")
    p.add_argument("--graph", required=True)
    p.add_argument("--dataset")
    p.add_argument("--assignment")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--coloc-mode", choices=["pairs", "events"], default="pairs")
    p.add_argument("--bin-km", type=float, default=0.5)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", help="generate a synthetic city dataset")
    p.add_argument("--users", type=int, required=True)
    p.add_argument("--venues", type=int, required=True)
    p.add_argument("--popularity-exponent", type=float, default=1.87)
    p.add_argument("--span-km", type=float, default=10.0)
    p.add_argument("--count-exponent", type=float, default=2.0)
    p.add_argument("--min-places", type=int, default=1)
    p.add_argument("--pop-xmin", type=int, default=1,
                   help="popularity floor (denser city when raised)")
    p.add_argument("--alpha", type=float, default=0.84,
                   help="rank-distance decay used while placing users")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("compare", help="model assignment vs dataset mobility")
    p.add_argument("--dataset", required=True)
    p.add_argument("--assignment", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--bin-km", type=float, default=0.5)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except OSError as e:
        log.error("cannot open: %s", e)
        return 2
    except (ValueError, KeyError) as e:
        log.error("%s", e)
        return 1


if __name__ == "__main__":
    sys.exit(main())
