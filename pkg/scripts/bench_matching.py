#!/usr/bin/env python3
"""Benchmark exact bipartite matching against a greedy first-fit check.

The catalog-search contract promises an injective role-compatible mapping
whenever one exists, which needs real matching. A linear greedy pass is
cheaper and is what a strict O(columns x templates) bound would imply, but
it misses instances where an early assignment must be revised. This script
measures both the speed gap and the miss rate on synthetic catalogs.

Usage: bench_matching.py [--templates N] [--columns K] [--trials T] [--seed S]
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from ivyengine.explore import match_template, search_catalog
from ivyengine.model import (
    DataRole,
    DataTarget,
    MatchKind,
    ObjectExpr,
    Parameter,
    Template,
)

ROLES = (DataRole.MEASURE, DataRole.DIMENSION, DataRole.TIME)


def random_template(rng: random.Random, index: int) -> Template:
    params = []
    for slot in range(rng.randint(1, 5)):
        allowed = tuple(rng.sample(ROLES, rng.randint(1, 3)))
        params.append(
            Parameter(f"p{slot}", DataTarget(allowed, rng.random() < 0.5))
        )
    return Template(f"t{index:04d}", "", "table", tuple(params), ObjectExpr({}))


def random_query(rng: random.Random, columns: int):
    return [(f"c{i}", rng.choice(ROLES)) for i in range(columns)]


def greedy_match(t: Template, query) -> MatchKind:
    """First-fit assignment in declaration order, no revision."""
    filled: set[int] = set()
    for _, role in query:
        for index, p in enumerate(t.params):
            if index not in filled and role in p.type.allowed_roles:
                filled.add(index)
                break
        else:
            return MatchKind.NO_MATCH
    required = {i for i, p in enumerate(t.params) if p.type.required}
    return MatchKind.COMPLETE if required <= filled else MatchKind.PARTIAL


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--templates", type=int, default=1000)
    parser.add_argument("--columns", type=int, default=3)
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)

    rng = random.Random(args.seed)
    catalog = [random_template(rng, i) for i in range(args.templates)]
    queries = [random_query(rng, args.columns) for _ in range(args.trials)]

    start = time.perf_counter()
    for query in queries:
        search_catalog(catalog, query)
    exact_ms = (time.perf_counter() - start) * 1000 / args.trials

    start = time.perf_counter()
    for query in queries:
        for t in catalog:
            greedy_match(t, query)
    greedy_ms = (time.perf_counter() - start) * 1000 / args.trials

    misses = disagreements = checks = 0
    for query in queries:
        for t in catalog:
            checks += 1
            exact = match_template(t, query).kind
            greedy = greedy_match(t, query)
            if exact != greedy:
                disagreements += 1
                if greedy is MatchKind.NO_MATCH and exact is not MatchKind.NO_MATCH:
                    misses += 1

    print(f"catalog size          {args.templates}")
    print(f"query columns         {args.columns}")
    print(f"exact search          {exact_ms:8.2f} ms per catalog pass")
    print(f"greedy search         {greedy_ms:8.2f} ms per catalog pass")
    print(f"greedy disagreements  {disagreements}/{checks}"
          f" ({100 * disagreements / checks:.2f}%)")
    print(f"  of which misses     {misses} (match exists, greedy says NoMatch)")
    print()
    print("Greedy stays linear but drops real matches; the engine keeps the")
    print("exact matcher and pays the small per-template augmenting cost.")
    return 0


if __name__ == "__main__":
    sys.exit(main())
