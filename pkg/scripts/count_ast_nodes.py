#!/usr/bin/env python3
"""Standalone size counter for JSON documents and template bodies.

Prints {"ast": N, "loc": N} for each input file. Deliberately imports
nothing from the package so it can serve as an independent check on the
metrics module.

Counting rules:
  - atomic value: 1
  - string (template mode): 1 when it has no bracket references or is a
    single whole-string reference; otherwise one per parsed segment
  - object: 1 + sum over fields of (1 + count(value))
  - list: 1 + sum of element counts
  - {"$cond": ...} in template mode: 1 + counts of the present branches;
    the query itself is not counted
  - loc: line count of the 2-space-indented JSON print

Usage: count_ast_nodes.py [--body] [--pointer /body] FILE...
"""

from __future__ import annotations

import argparse
import json
import re
import sys

_TOKEN = re.compile(r"\[\[|\[([A-Za-z_][A-Za-z0-9_]*)\]")


def segment_count(text: str) -> int:
    """Number of segments under the bracket syntax: literal runs merge,
    doubled brackets stay literal."""
    segments: list[str] = []
    buffer_nonempty = False
    pos = 0
    for match in _TOKEN.finditer(text):
        if match.start() > pos:
            buffer_nonempty = True
        if match.group(0) == "[[":
            # contributes a literal "[" to the running buffer
            buffer_nonempty = True
        else:
            if buffer_nonempty:
                segments.append("lit")
                buffer_nonempty = False
            segments.append("ref")
        pos = match.end()
    if pos < len(text):
        buffer_nonempty = True
    if buffer_nonempty:
        segments.append("lit")
    if "ref" not in segments:
        return 1
    return len(segments)


def count_nodes(value, template_mode: bool) -> int:
    if isinstance(value, str):
        return segment_count(value) if template_mode else 1
    if isinstance(value, dict):
        if template_mode and set(value.keys()) == {"$cond"}:
            inner = value["$cond"]
            total = 1
            for branch in ("true", "false"):
                if branch in inner:
                    total += count_nodes(inner[branch], template_mode)
            return total
        return 1 + sum(1 + count_nodes(v, template_mode) for v in value.values())
    if isinstance(value, list):
        return 1 + sum(count_nodes(v, template_mode) for v in value)
    return 1


def line_count(value) -> int:
    printed = json.dumps(value, indent=2, ensure_ascii=False) + "\n"
    return len(printed.splitlines())


def resolve_pointer(doc, pointer: str):
    if pointer in ("", None):
        return doc
    node = doc
    for token in pointer.split("/")[1:]:
        token = token.replace("~1", "/").replace("~0", "~")
        if isinstance(node, list):
            node = node[int(token)]
        else:
            node = node[token]
    return node


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("files", nargs="+")
    parser.add_argument("--body", action="store_true", help="template syntax mode")
    parser.add_argument("--pointer", default="", help="count only this subdocument")
    args = parser.parse_args(argv)

    for path in args.files:
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
        doc = resolve_pointer(doc, args.pointer)
        print(
            json.dumps(
                {"ast": count_nodes(doc, args.body), "loc": line_count(doc)}
            )
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
