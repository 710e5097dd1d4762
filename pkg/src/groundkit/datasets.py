"""Synthetic dataset generators mirroring the benchmark family used by
the experiment protocol.

``make_countries_s1`` reproduces the structure and summary statistics of
the country/region link-prediction task (272 entities, 3 relations,
1,110 training facts, mean degree ~4.28 over entities present in
training): countries sit in subregions, subregions in regions, and
held-out country->region facts form the queries, solvable by one
application of the transitivity rule.

``make_ablation_world`` builds a deeper located-in hierarchy whose
chains support ablation splits requiring one, two or three reasoning
steps.  ``make_scale_kb`` emits a knowledge graph at the 93k-fact scale
with machine-generated chain rules for grounding benchmarks.

All generators are deterministic in their seed.  A dataset carries
``filter_extra``: facts true in the generated world but absent from
train/valid/test, needed for fair filtered ranking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

Triple = tuple[str, str, str]

RULE_CHAIN = "locatedIn(X,Z) :- locatedIn(X,Y), locatedIn(Y,Z).\n"
RULE_NEIGHBOR = "locatedIn(X,Z) :- neighborOf(X,Y), locatedIn(Y,Z).\n"


@dataclass
class Dataset:
    name: str
    entities: list[str]
    relations: list[str]
    rules_text: str
    train: list[Triple]
    valid: list[Triple] = field(default_factory=list)
    test: list[Triple] = field(default_factory=list)
    filter_extra: list[Triple] = field(default_factory=list)


def _tsv(triples: list[Triple]) -> str:
    return "".join(f"{s}\t{r}\t{o}\n" for s, r, o in triples)


def write_dataset(ds: Dataset, out_dir: str) -> dict[str, str]:
    """Write the dataset's files; returns name -> path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, content in (
        ("rules.pl", ds.rules_text),
        ("train.tsv", _tsv(ds.train)),
        ("valid.tsv", _tsv(ds.valid)),
        ("test.tsv", _tsv(ds.test)),
        ("filter_extra.tsv", _tsv(ds.filter_extra)),
        ("entities.txt", "".join(e + "\n" for e in ds.entities)),
        ("relations.txt", "".join(r + "\n" for r in ds.relations)),
    ):
        path = out / name
        path.write_text(content, encoding="utf-8")
        paths[name] = str(path)
    return paths


def _sample_pairs(
    rng, pool: list[str], count: int, *, symmetric: bool = False
) -> list[tuple[str, str]]:
    taken: set[tuple[str, str]] = set()
    pairs: list[tuple[str, str]] = []
    while len(pairs) < count:
        a, b = rng.choice(len(pool), size=2, replace=False)
        pair = (pool[int(a)], pool[int(b)])
        key = tuple(sorted(pair)) if symmetric else pair
        if key not in taken:
            taken.add(key)
            pairs.append(pair)
    return pairs


def make_countries_s1(
    seed: int = 0,
    *,
    n_regions: int = 5,
    n_subregions: int = 23,
    n_countries: int = 244,
    n_isolated: int = 13,
    n_test: int = 24,
    n_valid: int = 24,
    n_neighbor_pairs: int = 220,
    n_export_pairs: int = 220,
) -> Dataset:
    """Country/region world with the reference task's summary statistics.

    Held-out countries keep their subregion membership in training, so
    every test query is recoverable through the two-step located-in
    chain.  A handful of isolated countries appear only in validation
    queries, leaving 259 of the 272 entities present in training.
    """
    rng = np.random.default_rng(seed)
    regions = [f"region_{i:02d}" for i in range(n_regions)]
    subregions = [f"subregion_{i:02d}" for i in range(n_subregions)]
    countries = [f"country_{i:03d}" for i in range(n_countries)]

    sub_region = {sub: regions[i % n_regions] for i, sub in enumerate(subregions)}
    country_sub = {
        c: subregions[int(rng.integers(0, n_subregions))] for c in countries
    }
    country_region = {c: sub_region[country_sub[c]] for c in countries}

    shuffled = list(countries)
    rng.shuffle(shuffled)
    isolated = set(shuffled[:n_isolated])
    connected = [c for c in countries if c not in isolated]

    # Neighborhood is geographic: most border pairs share a subregion,
    # the rest at least a region.  That locality is what lets a pure
    # embedding model place held-out countries next to their region.
    by_sub: dict[str, list[str]] = {}
    by_reg: dict[str, list[str]] = {}
    for c in connected:
        by_sub.setdefault(country_sub[c], []).append(c)
        by_reg.setdefault(country_region[c], []).append(c)

    def local_pairs(count: int, p_same_sub: float, symmetric: bool) -> list[tuple[str, str]]:
        taken: set[tuple[str, str]] = set()
        pairs: list[tuple[str, str]] = []
        while len(pairs) < count:
            a = connected[int(rng.integers(0, len(connected)))]
            pool = by_sub[country_sub[a]] if rng.random() < p_same_sub else by_reg[country_region[a]]
            if len(pool) < 2:
                continue
            b = pool[int(rng.integers(0, len(pool)))]
            if a == b:
                continue
            key = tuple(sorted((a, b))) if symmetric else (a, b)
            if key in taken:
                continue
            taken.add(key)
            pairs.append((a, b))
        return pairs

    neighbor_pairs = local_pairs(n_neighbor_pairs, 0.8, symmetric=True)
    export_pairs = local_pairs(n_export_pairs, 0.5, symmetric=False)

    # Held-out countries need enough border context to stay locatable,
    # as in the source task (isolated islands are never queried).
    neighbor_count: dict[str, int] = {}
    for a, b in neighbor_pairs:
        neighbor_count[a] = neighbor_count.get(a, 0) + 1
        neighbor_count[b] = neighbor_count.get(b, 0) + 1
    n_valid_connected = n_valid - n_isolated
    eligible = [
        c for c in shuffled[n_isolated:]
        if c not in isolated and neighbor_count.get(c, 0) >= 2
    ]
    held = eligible[: n_test + n_valid_connected]
    test_countries = held[:n_test]
    valid_connected = held[n_test:]

    train: list[Triple] = []
    for c in connected:
        train.append((c, "locatedIn", country_sub[c]))
    for sub in subregions:
        train.append((sub, "locatedIn", sub_region[sub]))
    held_out = set(test_countries) | set(valid_connected)
    for c in connected:
        if c not in held_out:
            train.append((c, "locatedIn", country_region[c]))
    for a, b in neighbor_pairs:
        train.append((a, "neighborOf", b))
        train.append((b, "neighborOf", a))
    for a, b in export_pairs:
        train.append((a, "exportsTo", b))

    test = [(c, "locatedIn", country_region[c]) for c in test_countries]
    valid = [(c, "locatedIn", country_region[c]) for c in sorted(isolated)]
    valid += [(c, "locatedIn", country_region[c]) for c in valid_connected]
    filter_extra = [(c, "locatedIn", country_sub[c]) for c in sorted(isolated)]

    return Dataset(
        name="countries_s1",
        entities=countries + subregions + regions,
        relations=["locatedIn", "neighborOf", "exportsTo"],
        rules_text=RULE_CHAIN,
        train=train,
        valid=valid,
        test=test,
        filter_extra=filter_extra,
    )


def make_ablation_world(
    seed: int = 0,
    *,
    level_sizes: tuple[int, ...] = (96, 24, 12, 6, 3),
    n_neighbor_pairs: int = 60,
    n_export_pairs: int = 60,
) -> Dataset:
    """Located-in hierarchy deep enough for multi-step ablation splits.

    Training holds only the consecutive level-to-level links (plus noise
    relations); every transitive shortcut is withheld into
    ``filter_extra``, so a query spanning k+1 links genuinely requires k
    nested rule applications.
    """
    rng = np.random.default_rng(seed)
    level_names = ["country", "province", "region", "continent", "hemisphere"]
    if len(level_sizes) > len(level_names):
        raise ValueError("at most five hierarchy levels are supported")
    levels: list[list[str]] = [
        [f"{level_names[d]}_{i:03d}" for i in range(size)]
        for d, size in enumerate(level_sizes)
    ]

    parent: dict[str, str] = {}
    train: list[Triple] = []
    for depth in range(len(levels) - 1):
        uppers = levels[depth + 1]
        for i, node in enumerate(levels[depth]):
            up = uppers[i % len(uppers)] if i < len(uppers) * 2 else uppers[int(rng.integers(0, len(uppers)))]
            parent[node] = up
            train.append((node, "locatedIn", up))

    countries = levels[0]
    for a, b in _sample_pairs(rng, countries, n_neighbor_pairs, symmetric=True):
        train.append((a, "neighborOf", b))
        train.append((b, "neighborOf", a))
    for a, b in _sample_pairs(rng, countries, n_export_pairs):
        train.append((a, "exportsTo", b))

    # Transitive closure minus the consecutive links = withheld truth.
    filter_extra: list[Triple] = []
    for node in parent:
        ancestor = parent[node]
        while ancestor in parent:
            ancestor = parent[ancestor]
            filter_extra.append((node, "locatedIn", ancestor))

    entities = [node for level in levels for node in level]
    return Dataset(
        name="countries_ablation",
        entities=entities,
        relations=["locatedIn", "neighborOf", "exportsTo"],
        rules_text=RULE_CHAIN,
        train=train,
        filter_extra=filter_extra,
    )


def make_scale_kb(
    seed: int = 0,
    *,
    n_entities: int = 40943,
    n_relations: int = 18,
    n_train: int = 93003,
    n_rules: int = 17,
    n_test: int = 1000,
    n_planted: int = 9000,
) -> Dataset:
    """Random knowledge graph at benchmark scale with chain rules.

    Rules are two-atom chains over random relation pairs, in the shape
    mined rule sets take, and ``n_planted`` chains are planted as
    explicit support so that grounding joins actually fire; half the
    test triples are planted rule consequences withheld from training
    (provable by the known-body grounder), the rest random.  Entity
    usage is quadratically skewed toward low indices.
    """
    rng = np.random.default_rng(seed)
    entities = [f"e{i:05d}" for i in range(n_entities)]
    relations = [f"rel_{i:02d}" for i in range(n_relations)]

    rules = []
    rule_rels = []
    for _ in range(n_rules):
        ra, rb, rh = (int(x) for x in rng.integers(0, n_relations, size=3))
        rule_rels.append((ra, rb, rh))
        rules.append(
            f"{relations[rh]}(X,Z) :- {relations[ra]}(X,Y), {relations[rb]}(Y,Z).\n"
        )

    def skewed(count: int) -> np.ndarray:
        return (rng.random(count) ** 2 * n_entities).astype(np.int64)

    train_set: set[tuple[int, int, int]] = set()
    test_set: set[tuple[int, int, int]] = set()
    n_test_planted = n_test // 2

    planted = 0
    while planted < n_planted:
        ra, rb, rh = rule_rels[int(rng.integers(0, n_rules))]
        x, y, z = (int(v) for v in skewed(3))
        if x == y or y == z or x == z:
            continue
        head = (x, rh, z)
        if head in test_set or head in train_set:
            continue
        train_set.add((x, ra, y))
        train_set.add((y, rb, z))
        if len(test_set) < n_test_planted:
            test_set.add(head)
        else:
            train_set.add(head)
        planted += 1

    while len(test_set) < n_test:
        s, o = (int(v) for v in skewed(2))
        r = int(rng.integers(0, n_relations))
        if s != o and (s, r, o) not in train_set:
            test_set.add((s, r, o))
    while len(train_set) < n_train:
        need = n_train - len(train_set)
        ss = skewed(need + need // 4 + 8)
        oo = skewed(ss.shape[0])
        rr = rng.integers(0, n_relations, size=ss.shape[0])
        for s, r, o in zip(ss, rr, oo):
            if s != o and (int(s), int(r), int(o)) not in test_set:
                train_set.add((int(s), int(r), int(o)))
                if len(train_set) >= n_train:
                    break

    def to_names(triples: set) -> list[Triple]:
        ordered = sorted(triples)
        rng.shuffle(ordered)
        return [(entities[s], relations[r], entities[o]) for s, r, o in ordered]

    return Dataset(
        name="scale_kb",
        entities=entities,
        relations=relations,
        rules_text="".join(rules),
        train=to_names(train_set),
        test=to_names(test_set),
    )
