"""Command-line entry point.

Commands: ``gen-data`` (synthetic dataset replicas), ``ground`` (emit a
grounded network plus statistics), ``stats`` (counts only), ``train-kge``
(checkpoint plus loss trace), ``propagate`` (score table), ``eval``
(ranking report), ``make-ablation`` (split files), ``experiment``
(train -> ground -> propagate -> eval, averaged over seeds) and ``plot``.

Every command writes its artifacts under ``--out`` with the resolved
configuration echoed alongside for provenance; identical configs and
seeds reproduce artifacts bitwise (wall-clock timings go to a separate
``timings.txt``).  Exit codes: 0 ok, 2 configuration error, 3 parse
error, 4 budget refusal, 5 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from . import datasets
from .evaluation import (
    KgeScorer,
    OverlayScorer,
    average_reports,
    build_ablation_split,
    candidate_roots,
    corruption_candidates,
    evaluate,
)
from .facts import FactFormatError, FactStore, intern_triples, load_facts
from .gmn import GmnFormatError, build_gmn, export_gmn, gmn_stats, import_gmn
from .grounding import (
    INF,
    BudgetExceededError,
    GrounderParams,
    GroundingResult,
    ground,
    herbrand_universe_size,
)
from .kge import (
    NumericError,
    TrainConfig,
    atom_scorer,
    create_model,
    load_model,
    save_model,
    train,
)
from .logic import ArityConflictError, GroundAtom, LogicError, Theory, herbrand_base_size
from .parsing import ParseError, format_ground, parse_theory
from .reasoner import ScoreError, initial_scores, propagate, read_scores, write_scores

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_BUDGET = 4
EXIT_NUMERIC = 5


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# small shared helpers
# ---------------------------------------------------------------------------


def _read(path: str) -> str:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"path does not exist: {path}")
    return p.read_text(encoding="utf-8")


def _parse_extent(text: str, name: str) -> float:
    if text in ("inf", "INF", "Inf"):
        return INF
    try:
        value = int(text)
    except ValueError:
        raise ConfigError(f"{name} must be an integer or 'inf', got {text!r}") from None
    return value


def _out_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _echo_args(out: Path, args: argparse.Namespace) -> None:
    resolved = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    (out / "resolved_args.json").write_text(
        json.dumps(resolved, indent=2, default=str) + "\n", encoding="utf-8"
    )


def _load_world(
    rules: Optional[str],
    facts: Optional[str],
    vocab_files: Sequence[str] = (),
    entities_file: Optional[str] = None,
) -> tuple[Theory, Optional[FactStore], dict[str, list[GroundAtom]]]:
    """Theory + store + interned query sets from the usual file triplet."""
    theory = parse_theory(_read(rules)) if rules else Theory()
    if entities_file:
        for line in _read(entities_file).splitlines():
            if line.strip():
                theory.constant(line.strip())
    store = load_facts(_read(facts), theory) if facts else None
    extras: dict[str, list[GroundAtom]] = {}
    for path in vocab_files:
        if path:
            extras[path] = intern_triples(_read(path), theory)
    return theory, store, extras


def _load_roots(spec: str, theory: Theory, hb_budget: int) -> list[GroundAtom]:
    if spec == "hb":
        size = herbrand_base_size(theory, len(theory.constants))
        if size > hb_budget:
            raise BudgetExceededError(
                f"Herbrand base has {size} atoms, root budget is {hb_budget}",
                required=size,
                budget=hb_budget,
            )
        return list(theory.herbrand_base())
    return intern_triples(_read(spec), theory)


def _ground_params(args: argparse.Namespace) -> GrounderParams:
    cap = getattr(args, "cap", None)
    return GrounderParams(
        width=_parse_extent(args.width, "width"),
        depth=_parse_extent(args.depth, "depth"),
        uncertain=bool(getattr(args, "uncertain", False)),
        enumeration_cap=cap if cap else None,
    )


def _write_ground_outputs(
    out: Path,
    theory: Theory,
    store: FactStore,
    result: GroundingResult,
    roots: list[GroundAtom],
    write_gmn: bool,
) -> dict:
    net = build_gmn(result, roots, store, theory)
    stats = {
        "roots": result.stats.roots,
        "proved_roots": result.stats.proved_roots,
        "instances": result.stats.instances,
        "gmn": gmn_stats(net),
        "rejections": {
            "width": result.stats.width_rejections,
            "depth": result.stats.depth_rejections,
        },
        "expansions": result.stats.expansions,
        "memo_hits": result.stats.memo_hits,
        "truncations": [
            {
                "rule_id": t.rule_id,
                "pattern": list(t.pattern),
                "total": t.total,
                "emitted": t.emitted,
            }
            for t in result.truncations
        ],
    }
    (out / "stats.json").write_text(json.dumps(stats, indent=2) + "\n", encoding="utf-8")
    (out / "timings.txt").write_text(f"wall_time_s\t{result.stats.wall_time:.3f}\n", encoding="utf-8")
    if write_gmn:
        export_gmn(net, str(out / "gmn.jsonl"))
    return stats


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


_S1_EXPERIMENT_TOML = """[paths]
rules = "rules.pl"
train = "train.tsv"
valid = "valid.tsv"
test = "test.tsv"
filter_extra = "filter_extra.tsv"
entities = "entities.txt"
out = "runs/s1"

[grounder]
width = 1
depth = 1

[reasoner]
tnorm = "product"
steps = "depth"

[kge]
model = "complex"
dim = 100
lr = 1e-2
epochs = 300
loss = "ce"
n3 = 0.4

[run]
seeds = 5
"""


def cmd_gen_data(args: argparse.Namespace) -> int:
    out = _out_dir(args.out)
    if args.dataset == "countries_s1":
        ds = datasets.make_countries_s1(args.seed)
    elif args.dataset == "countries_ablation":
        ds = datasets.make_ablation_world(args.seed)
    elif args.dataset == "scale":
        ds = datasets.make_scale_kb(args.seed)
    else:
        raise ConfigError(f"unknown dataset {args.dataset!r}")
    paths = datasets.write_dataset(ds, str(out))
    if args.dataset == "countries_s1":
        (out / "experiment.toml").write_text(_S1_EXPERIMENT_TOML, encoding="utf-8")
    _echo_args(out, args)
    print(f"wrote {ds.name}: {len(ds.train)} train, {len(ds.valid)} valid, "
          f"{len(ds.test)} test triples -> {out}")
    for name in sorted(paths):
        print(f"  {paths[name]}")
    return EXIT_OK


def cmd_ground(args: argparse.Namespace, write_gmn: bool = True) -> int:
    out = _out_dir(args.out)
    theory, store, _ = _load_world(args.rules, args.facts)
    assert store is not None
    params = _ground_params(args)
    if args.roots == "hb" and params.uncertain and params.depth == 1 and params.width == INF:
        hu = herbrand_universe_size(theory, len(theory.constants))
        if hu > args.budget:
            raise BudgetExceededError(
                f"full grounding refused: Herbrand universe has {hu} instances, "
                f"budget is {args.budget}",
                required=hu,
                budget=args.budget,
            )
    roots = _load_roots(args.roots, theory, args.budget)
    result = ground(theory, store, params, roots, jobs=args.jobs)
    stats = _write_ground_outputs(out, theory, store, result, roots, write_gmn)
    _echo_args(out, args)
    print(json.dumps({k: stats[k] for k in ("roots", "proved_roots", "instances", "gmn")}, indent=2))
    print(f"wall time: {result.stats.wall_time:.2f}s")
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    return cmd_ground(args, write_gmn=False)


def cmd_train_kge(args: argparse.Namespace) -> int:
    out = _out_dir(args.out)
    theory, store, _ = _load_world(
        args.rules, args.facts, vocab_files=[args.valid, args.test],
        entities_file=args.entities,
    )
    assert store is not None
    cfg = TrainConfig(
        dim=args.dim, lr=args.lr, epochs=args.epochs, negatives=args.negatives,
        seed=args.seed, batch_size=args.batch_size, l2=args.l2, n3=args.n3,
        loss=args.loss, model=args.model,
    )
    model = create_model(
        cfg.model, theory.constants.names(), theory.predicates.names(), cfg.dim, cfg.seed
    )
    model, losses = train(model, store, cfg)
    save_model(model, str(out / "model.npz"))
    with open(out / "loss_trace.tsv", "w", encoding="utf-8") as fh:
        for epoch, loss in enumerate(losses):
            fh.write(f"{epoch}\t{loss:.17g}\n")
    _echo_args(out, args)
    print(f"trained {cfg.model} dim={cfg.dim} on {len(store)} facts: "
          f"loss {losses[0]:.4f} -> {losses[-1]:.4f}")
    return EXIT_OK


def cmd_propagate(args: argparse.Namespace) -> int:
    out = _out_dir(args.out)
    net = import_gmn(args.gmn)
    scorer = None
    if args.checkpoint:
        model = load_model(args.checkpoint)
        name_to_ent = {n: i for i, n in enumerate(model.entity_names)}
        name_to_rel = {n: i for i, n in enumerate(model.relation_names)}
        from .kge import prob_triple

        def scorer(atom: GroundAtom) -> Optional[float]:
            if len(atom) != 3:
                return None
            pred = name_to_rel.get(net.pred_names[atom[0]])
            s = name_to_ent.get(net.const_names[atom[1]])
            o = name_to_ent.get(net.const_names[atom[2]])
            if pred is None or s is None or o is None:
                return None
            return prob_triple(model, s, pred, o)

    init = initial_scores(net, scorer)
    steps = None if args.steps == "fixpoint" else int(args.steps)
    table = propagate(net, init, kind=args.tnorm, steps=steps)
    write_scores(net, table, str(out / "scores.tsv"))
    _echo_args(out, args)
    changed = sum(
        1 for nid, src in table.provenance.items() if src == "propagated"
    )
    print(f"propagated {args.tnorm} over {len(net.nodes)} nodes, "
          f"{len(net.edges)} hyperedges: {changed} scores raised")
    return EXIT_OK


def _filter_sets(theory: Theory, args: argparse.Namespace, extras: dict) -> list[list[GroundAtom]]:
    sets = list(extras.values())
    for path in getattr(args, "filter", None) or []:
        sets.append(intern_triples(_read(path), theory))
    return sets


def cmd_eval(args: argparse.Namespace) -> int:
    out = _out_dir(args.out)
    theory, store, extras = _load_world(
        args.rules, args.train, vocab_files=[args.valid, args.test],
        entities_file=args.entities,
    )
    assert store is not None
    queries = extras[args.test]
    model = load_model(args.checkpoint)
    scorer = KgeScorer(model)
    if args.scores:
        if not args.gmn:
            raise ConfigError("--scores requires --gmn to map atoms to ids")
        net = import_gmn(args.gmn)
        raw_scores = read_scores(args.scores)
        table: dict[GroundAtom, float] = {}
        for node in net.nodes:
            text = net.atom_text(node.atom)
            if text in raw_scores:
                table[node.atom] = raw_scores[text]
        scorer = OverlayScorer(scorer, table)
    filter_sets = [list(store)] + _filter_sets(theory, args, extras)
    corruptions = "all" if args.corruptions == "all" else int(args.corruptions)
    report = evaluate(
        scorer, queries,
        filter_sets=filter_sets, corruptions=corruptions,
        seed=args.seed, raw=args.raw, with_ranks=args.dump_ranks,
    )
    (out / "report.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    (out / "report.txt").write_text(report.table() + "\n", encoding="utf-8")
    if args.dump_ranks and report.ranks is not None:
        with open(out / "ranks.tsv", "w", encoding="utf-8") as fh:
            for atom, side, rank in report.ranks:
                fh.write(f"{format_ground(theory, atom)}\t{side}\t{rank:g}\n")
    _echo_args(out, args)
    print(report.table())
    return EXIT_OK


def cmd_make_ablation(args: argparse.Namespace) -> int:
    out = _out_dir(args.out)
    theory, store, _ = _load_world(args.rules, args.facts)
    assert store is not None
    if not theory.clauses:
        raise ConfigError("rule file holds no clauses")
    split = build_ablation_split(
        store, theory, theory.clauses[args.rule], args.hops, args.queries, args.seed
    )
    def dump(name: str, atoms: list[GroundAtom]) -> None:
        with open(out / name, "w", encoding="utf-8") as fh:
            for atom in atoms:
                s = theory.constants.name_of(atom[1])
                r = theory.predicates.name_of(atom[0])
                o = theory.constants.name_of(atom[2])
                fh.write(f"{s}\t{r}\t{o}\n")
    dump("train.tsv", split.facts)
    dump("queries.tsv", split.queries)
    dump("removed.tsv", split.removed)
    _echo_args(out, args)
    print(f"ablation split hops={args.hops}: {len(split.queries)} queries, "
          f"{len(split.facts)} facts kept, {len(split.removed)} removed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# experiment pipeline
# ---------------------------------------------------------------------------


def _config_get(cfg: dict, section: str, key: str, default):
    return cfg.get(section, {}).get(key, default)


def run_experiment_config(cfg: dict, cfg_dir: Path, out: Path, echo_text: str) -> dict:
    paths = cfg.get("paths", {})

    def resolve(name: str, required: bool = False) -> Optional[str]:
        value = paths.get(name)
        if value is None:
            if required:
                raise ConfigError(f"config is missing paths.{name}")
            return None
        return str((cfg_dir / value).resolve())

    rules = resolve("rules", required=True)
    train_path = resolve("train", required=True)
    valid_path = resolve("valid")
    test_path = resolve("test", required=True)
    extra_path = resolve("filter_extra")
    entities_path = resolve("entities")

    width = _config_get(cfg, "grounder", "width", 1)
    depth = _config_get(cfg, "grounder", "depth", 1)
    width = INF if width == "inf" else float(width)
    depth = INF if depth == "inf" else float(depth)
    uncertain = bool(_config_get(cfg, "grounder", "uncertain", False))
    cap = _config_get(cfg, "grounder", "enumeration_cap", 0) or None
    jobs = int(_config_get(cfg, "grounder", "jobs", 1))

    tnorm = _config_get(cfg, "reasoner", "tnorm", "product")
    steps_cfg = _config_get(cfg, "reasoner", "steps", "depth")

    kcfg = TrainConfig(
        dim=int(_config_get(cfg, "kge", "dim", 100)),
        lr=float(_config_get(cfg, "kge", "lr", 1e-2)),
        epochs=int(_config_get(cfg, "kge", "epochs", 100)),
        negatives=int(_config_get(cfg, "kge", "negatives", 32)),
        seed=0,
        batch_size=int(_config_get(cfg, "kge", "batch_size", 512)),
        l2=float(_config_get(cfg, "kge", "l2", 0.0)),
        n3=float(_config_get(cfg, "kge", "n3", 0.0)),
        loss=str(_config_get(cfg, "kge", "loss", "bce")),
        model=str(_config_get(cfg, "kge", "model", "complex")),
    )
    corruptions = _config_get(cfg, "eval", "corruptions", "all")
    if corruptions != "all":
        corruptions = int(corruptions)
    raw = bool(_config_get(cfg, "eval", "raw", False))
    n_seeds = int(_config_get(cfg, "run", "seeds", 1))
    seed_base = int(_config_get(cfg, "run", "seed_base", 0))

    out.mkdir(parents=True, exist_ok=True)
    (out / "config_echo.toml").write_text(echo_text, encoding="utf-8")

    reports = []
    for run_index in range(n_seeds):
        seed = seed_base + run_index
        seed_dir = out / f"seed_{seed}"
        seed_dir.mkdir(exist_ok=True)
        report = _run_single(
            rules, train_path, valid_path, test_path, extra_path, entities_path,
            width, depth, uncertain, cap, jobs, tnorm, steps_cfg,
            kcfg, corruptions, raw, seed, seed_dir,
        )
        (seed_dir / "report.json").write_text(
            json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8"
        )
        reports.append(report)
    summary = average_reports(reports) if len(reports) > 1 else reports[0]
    payload = {
        "summary": summary.to_dict(),
        "per_seed": [r.to_dict() for r in reports],
        "depth": depth if depth != INF else "inf",
        "width": width if width != INF else "inf",
        "tnorm": tnorm,
        "seeds": n_seeds,
    }
    (out / "summary.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    (out / "summary.txt").write_text(summary.table() + "\n", encoding="utf-8")
    return payload


def _run_single(
    rules, train_path, valid_path, test_path, extra_path, entities_path,
    width, depth, uncertain, cap, jobs, tnorm, steps_cfg,
    kcfg: TrainConfig, corruptions, raw, seed: int, seed_dir: Path,
):
    theory, store, extras = _load_world(
        rules, train_path,
        vocab_files=[p for p in (valid_path, test_path, extra_path) if p],
        entities_file=entities_path,
    )
    assert store is not None
    queries = extras[test_path]

    cfg = TrainConfig(
        dim=kcfg.dim, lr=kcfg.lr, epochs=kcfg.epochs, negatives=kcfg.negatives,
        seed=seed, batch_size=kcfg.batch_size, l2=kcfg.l2, n3=kcfg.n3,
        loss=kcfg.loss, model=kcfg.model,
    )
    model = create_model(
        cfg.model, theory.constants.names(), theory.predicates.names(), cfg.dim, seed
    )
    model, losses = train(model, store, cfg)
    save_model(model, str(seed_dir / "model.npz"))

    scorer = KgeScorer(model)
    candidates = corruption_candidates(queries, len(theory.constants), corruptions, seed)
    if depth >= 1:
        params = GrounderParams(width=width, depth=depth, uncertain=uncertain, enumeration_cap=cap)
        roots = list(dict.fromkeys(candidate_roots(queries, candidates)))
        result = ground(theory, store, params, roots, jobs=jobs)
        net = build_gmn(result, roots, store, theory)
        init = initial_scores(net, atom_scorer(model, theory))
        if steps_cfg == "depth":
            steps = None if depth == INF else int(depth)
        elif steps_cfg == "fixpoint":
            steps = None
        else:
            steps = int(steps_cfg)
        table = propagate(net, init, kind=tnorm, steps=steps)
        overlay = {node.atom: table.scores[node.id] for node in net.nodes}
        scorer = OverlayScorer(scorer, overlay)
        export_gmn(net, str(seed_dir / "gmn.jsonl"))
        write_scores(net, table, str(seed_dir / "scores.tsv"))

    filter_sets = [list(store)] + list(extras.values())
    return evaluate(
        scorer, queries,
        filter_sets=filter_sets, corruptions=corruptions,
        seed=seed, raw=raw, candidates=candidates,
    )


def cmd_experiment(args: argparse.Namespace) -> int:
    cfg_path = Path(args.config)
    if not cfg_path.exists():
        raise ConfigError(f"config file does not exist: {args.config}")
    echo_text = cfg_path.read_text(encoding="utf-8")
    try:
        cfg = tomllib.loads(echo_text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML config: {exc}") from exc
    # flag overrides
    for section, key, value in (
        ("grounder", "width", args.width),
        ("grounder", "depth", args.depth),
        ("reasoner", "tnorm", args.tnorm),
        ("reasoner", "steps", args.steps),
        ("run", "seeds", args.seeds),
    ):
        if value is not None:
            cfg.setdefault(section, {})[key] = value
    out = Path(args.out) if args.out else Path(_config_get(cfg, "paths", "out", "experiment_out"))
    payload = run_experiment_config(cfg, cfg_path.parent, out, echo_text)
    print(json.dumps(payload["summary"], indent=2))
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise ConfigError("plotting requires matplotlib (pip install groundkit[plot])") from exc
    points = []
    for path in args.summaries:
        payload = json.loads(_read(path))
        depth = payload.get("depth", 0)
        depth = math.inf if depth == "inf" else float(depth)
        points.append((depth, payload["summary"]["mrr"], path))
    points.sort()
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot([p[0] for p in points], [p[1] for p in points], marker="o")
    ax.set_xlabel("grounder depth")
    ax.set_ylabel("MRR")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out} ({len(points)} points)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groundkit",
        description="Backward-chaining grounding and neural-symbolic link prediction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate a synthetic dataset replica")
    p.add_argument("--dataset", required=True,
                   choices=["countries_s1", "countries_ablation", "scale"])
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_data)

    for name, func, with_gmn in (("ground", cmd_ground, True), ("stats", cmd_stats, False)):
        p = sub.add_parser(name, help=f"{'run grounding and export the network' if with_gmn else 'run grounding, report counts only'}")
        p.add_argument("--rules", required=True)
        p.add_argument("--facts", required=True)
        p.add_argument("--roots", required=True,
                       help="roots triple file, or 'hb' for the whole Herbrand base")
        p.add_argument("--width", default="0")
        p.add_argument("--depth", default="1")
        p.add_argument("--uncertain", action="store_true")
        p.add_argument("--cap", type=int, default=0,
                       help="enumeration cap for the uncertain regime (0 = none)")
        p.add_argument("--budget", type=int, default=10_000_000,
                       help="refusal bound for 'hb' roots / full grounding")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--out", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("train-kge", help="train the embedding scorer")
    p.add_argument("--facts", required=True)
    p.add_argument("--rules", default=None)
    p.add_argument("--valid", default=None)
    p.add_argument("--test", default=None)
    p.add_argument("--entities", default=None)
    p.add_argument("--model", default="complex", choices=["complex", "distmult"])
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--lr", type=float, default=1e-2)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--negatives", type=int, default=32)
    p.add_argument("--batch-size", type=int, default=512)
    p.add_argument("--l2", type=float, default=0.0)
    p.add_argument("--n3", type=float, default=0.0)
    p.add_argument("--loss", default="bce", choices=["bce", "ce"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_kge)

    p = sub.add_parser("propagate", help="t-norm propagation over an exported network")
    p.add_argument("--gmn", required=True)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--tnorm", default="product", choices=["product", "goedel", "lukasiewicz"])
    p.add_argument("--steps", default="1", help="step count or 'fixpoint'")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("eval", help="filtered ranking evaluation")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--rules", default=None)
    p.add_argument("--valid", default=None)
    p.add_argument("--entities", default=None)
    p.add_argument("--filter", nargs="*", default=[],
                   help="extra triple files treated as known-true for filtering")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--scores", default=None, help="propagated score table to overlay")
    p.add_argument("--gmn", default=None)
    p.add_argument("--corruptions", default="all")
    p.add_argument("--raw", action="store_true")
    p.add_argument("--dump-ranks", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("make-ablation", help="construct a k-hop ablation split")
    p.add_argument("--rules", required=True)
    p.add_argument("--facts", required=True)
    p.add_argument("--rule", type=int, default=0, help="index of the chain rule")
    p.add_argument("--hops", type=int, required=True)
    p.add_argument("--queries", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_make_ablation)

    p = sub.add_parser("experiment", help="train -> ground -> propagate -> eval over seeds")
    p.add_argument("--config", required=True)
    p.add_argument("--seeds", type=int, default=None)
    p.add_argument("--width", default=None)
    p.add_argument("--depth", default=None)
    p.add_argument("--tnorm", default=None)
    p.add_argument("--steps", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("plot", help="MRR-versus-depth plot from experiment summaries")
    p.add_argument("--summaries", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParseError, FactFormatError, ArityConflictError, GmnFormatError, ScoreError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetExceededError as exc:
        print(f"budget refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except LogicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
