"""Seeded random generators for expressions, predicates, and match instances.

All functions take an explicit random.Random so tests stay reproducible.
"""

from __future__ import annotations

import random
import string

from ivyengine.model import (
    Atomic,
    Conditional,
    DataRole,
    Expression,
    InterpolatedString,
    ListExpr,
    ObjectExpr,
    VariableRef,
)
from ivyengine.predicate import parse as parse_predicate

NAMES = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta")

_WORDS = ("bar", "line", "area", "sum", "mean", "count", "x", "y", "title")


def random_atom(rng: random.Random):
    kind = rng.randrange(6)
    if kind == 0:
        return None
    if kind == 1:
        return rng.choice((True, False))
    if kind == 2:
        return rng.randint(-1000, 1000)
    if kind == 3:
        return round(rng.uniform(-100.0, 100.0), 3)
    if kind == 4:
        return rng.choice(_WORDS)
    return "".join(rng.choice(string.ascii_lowercase + "[] ") for _ in range(rng.randint(0, 6)))


def random_settings(rng: random.Random) -> dict:
    values: dict = {}
    for name in NAMES:
        if rng.random() < 0.7:
            kind = rng.randrange(5)
            if kind == 0:
                values[name] = rng.choice((True, False))
            elif kind == 1:
                values[name] = rng.randint(-50, 50)
            elif kind == 2:
                values[name] = round(rng.uniform(-5.0, 5.0), 2)
            elif kind == 3:
                values[name] = rng.choice(_WORDS)
            else:
                values[name] = [
                    rng.choice(_WORDS) for _ in range(rng.randint(0, 3))
                ]
    return values


def _literal_source(rng: random.Random) -> str:
    kind = rng.randrange(5)
    if kind == 0:
        return rng.choice(("true", "false", "null"))
    if kind == 1:
        return str(rng.randint(-100, 100))
    if kind == 2:
        return repr(round(rng.uniform(-10.0, 10.0), 2))
    if kind == 3:
        return '"' + rng.choice(_WORDS) + '"'
    return '"' + "".join(rng.choice("ab c") for _ in range(rng.randint(0, 4))) + '"'


def _operand_source(rng: random.Random) -> str:
    if rng.random() < 0.5:
        return rng.choice(NAMES)
    return _literal_source(rng)


def random_predicate_source(rng: random.Random, depth: int = 2) -> str:
    roll = rng.random()
    if depth <= 0 or roll < 0.45:
        kind = rng.randrange(4)
        if kind == 0:
            op = rng.choice(("==", "!=", "<", "<=", ">", ">="))
            return f"{_operand_source(rng)} {op} {_operand_source(rng)}"
        if kind == 1:
            options = ", ".join(_literal_source(rng) for _ in range(rng.randint(1, 3)))
            return f"{_operand_source(rng)} in [{options}]"
        if kind == 2:
            return rng.choice(NAMES)
        return rng.choice(("true", "false"))
    if roll < 0.6:
        return f"!({random_predicate_source(rng, depth - 1)})"
    op = rng.choice(("&&", "||"))
    return (
        f"({random_predicate_source(rng, depth - 1)}) {op} "
        f"({random_predicate_source(rng, depth - 1)})"
    )


def random_interpolation(rng: random.Random) -> InterpolatedString:
    segments: list = []
    want_literal = rng.random() < 0.5
    for _ in range(rng.randint(2, 4)):
        if want_literal:
            segments.append(
                "".join(rng.choice("ab[ c") for _ in range(rng.randint(1, 5)))
            )
        else:
            segments.append(VariableRef(rng.choice(NAMES)))
        want_literal = not want_literal
    if not any(isinstance(s, VariableRef) for s in segments):
        segments.append(VariableRef(rng.choice(NAMES)))
    return InterpolatedString(tuple(segments))


def random_expression(
    rng: random.Random,
    max_depth: int = 5,
    max_branching: int = 4,
) -> Expression:
    if max_depth <= 0:
        kind = rng.randrange(3)
    else:
        kind = rng.randrange(6)
    if kind == 0:
        return Atomic(random_atom(rng))
    if kind == 1:
        return VariableRef(rng.choice(NAMES))
    if kind == 2:
        return random_interpolation(rng)
    if kind == 3:
        fields = {}
        for index in range(rng.randint(0, max_branching)):
            key = rng.choice(_WORDS) + str(index)
            fields[key] = random_expression(rng, max_depth - 1, max_branching)
        return ObjectExpr(fields)
    if kind == 4:
        return ListExpr(
            tuple(
                random_expression(rng, max_depth - 1, max_branching)
                for _ in range(rng.randint(0, max_branching))
            )
        )
    query = parse_predicate(random_predicate_source(rng))
    shape = rng.randrange(3)
    then_branch = (
        random_expression(rng, max_depth - 1, max_branching) if shape != 1 else None
    )
    else_branch = (
        random_expression(rng, max_depth - 1, max_branching) if shape != 0 else None
    )
    return Conditional(query, then_branch, else_branch)


def random_match_instance(rng: random.Random):
    """A random catalog-matching instance: parameter slots and a column query.

    Returns (param_specs, query_roles) with param_specs as a list of
    (allowed_roles frozenset, required bool) in declaration order.
    """
    roles = (DataRole.MEASURE, DataRole.DIMENSION, DataRole.TIME)
    param_specs = []
    for _ in range(rng.randint(0, 5)):
        allowed = frozenset(
            rng.sample(roles, rng.randint(1, 3))
        )
        param_specs.append((allowed, rng.random() < 0.5))
    query_roles = [rng.choice(roles) for _ in range(rng.randint(0, 5))]
    return param_specs, query_roles
