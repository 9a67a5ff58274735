"""The closed predicate grammar used by conditional queries and display rules.

Sources are short boolean expressions over parameter names, for example::

    sort == true
    year in [1990, 2000] && region != null
    !(people < 1000 || name == "total")

Grammar (precedence low to high)::

    expr    := and ("||" and)*
    and     := cmp ("&&" cmp)*
    cmp     := unary (("==" | "!=" | "<" | "<=" | ">" | ">=") unary
                      | "in" "[" literals "]")?
    unary   := "!" unary | primary
    primary := literal | identifier | "(" expr ")"

Literals are JSON-style strings (single or double quoted), numbers, ``true``,
``false``, ``null``.  Evaluation is total over any settings: unset identifiers
resolve to Null, Null supports only ``==``/``!=``, and ordered comparison
involving Null (or mismatched operand types) yields false.  There is no access
to a host language.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterator, Union

from .errors import BadPredicateError

# --- abstract syntax ------------------------------------------------------

PredValue = Union[None, bool, int, float, str]


@dataclass(frozen=True)
class Literal:
    value: PredValue


@dataclass(frozen=True)
class Identifier:
    name: str


@dataclass(frozen=True)
class Comparison:
    op: str  # one of == != < <= > >=
    left: "PredNode"
    right: "PredNode"


@dataclass(frozen=True)
class Membership:
    item: "PredNode"
    options: tuple[PredValue, ...]


@dataclass(frozen=True)
class Not:
    operand: "PredNode"


@dataclass(frozen=True)
class And:
    left: "PredNode"
    right: "PredNode"


@dataclass(frozen=True)
class Or:
    left: "PredNode"
    right: "PredNode"


PredNode = Union[Literal, Identifier, Comparison, Membership, Not, And, Or]


@dataclass(frozen=True)
class Predicate:
    """A parsed predicate; ``source`` is kept verbatim for serialization."""

    source: str
    ast: PredNode


# --- tokenizer ------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<number>-?(?:0|[1-9]\d*)(?:\.\d+)?(?:[eE][+-]?\d+)?)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<string>"(?:[^"\\]|\\.)*"|'(?:[^'\\]|\\.)*')
    | (?P<op>==|!=|<=|>=|&&|\|\||[<>!()\[\],])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"true": True, "false": False, "null": None}

_ESCAPES = {
    "n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f",
    "\\": "\\", '"': '"', "'": "'", "/": "/",
}


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | string | op | end
    text: str
    pos: int
    value: PredValue = None


def _unescape(body: str, base: int) -> str:
    out: list[str] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        i += 1
        if i >= len(body):
            raise BadPredicateError("dangling escape in string literal", position=base + i)
        esc = body[i]
        if esc == "u":
            hexpart = body[i + 1 : i + 5]
            if len(hexpart) != 4 or any(c not in "0123456789abcdefABCDEF" for c in hexpart):
                raise BadPredicateError("bad \\u escape in string literal", position=base + i)
            out.append(chr(int(hexpart, 16)))
            i += 5
        elif esc in _ESCAPES:
            out.append(_ESCAPES[esc])
            i += 1
        else:
            raise BadPredicateError(f"bad escape \\{esc} in string literal", position=base + i)
    return "".join(out)


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise BadPredicateError(
                f"unexpected character {source[pos]!r}", position=pos, source=source
            )
        kind = m.lastgroup or ""
        text = m.group(0)
        if kind == "number":
            num = float(text)
            value: PredValue = int(num) if num.is_integer() and "." not in text and "e" not in text.lower() else num
            tokens.append(_Token("number", text, pos, value))
        elif kind == "ident":
            if text in _KEYWORDS:
                tokens.append(_Token("keyword", text, pos, _KEYWORDS[text]))
            else:
                tokens.append(_Token("ident", text, pos))
        elif kind == "string":
            tokens.append(_Token("string", text, pos, _unescape(text[1:-1], pos + 1)))
        elif kind == "op":
            tokens.append(_Token("op", text, pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


# --- parser ---------------------------------------------------------------

_CMP_OPS = ("==", "!=", "<=", ">=", "<", ">")


class _Parser:
    def __init__(self, source: str) -> None:
        self.source = source
        self.tokens = _tokenize(source)
        self.index = 0

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def expect_op(self, text: str) -> None:
        tok = self.advance()
        if tok.kind != "op" or tok.text != text:
            raise self.fail(f"expected {text!r}", tok)

    def fail(self, message: str, tok: _Token) -> BadPredicateError:
        return BadPredicateError(message, position=tok.pos, source=self.source)

    def parse(self) -> PredNode:
        node = self.parse_or()
        tok = self.peek()
        if tok.kind != "end":
            raise self.fail(f"unexpected trailing input {tok.text!r}", tok)
        return node

    def parse_or(self) -> PredNode:
        node = self.parse_and()
        while self.peek().kind == "op" and self.peek().text == "||":
            self.advance()
            node = Or(node, self.parse_and())
        return node

    def parse_and(self) -> PredNode:
        node = self.parse_cmp()
        while self.peek().kind == "op" and self.peek().text == "&&":
            self.advance()
            node = And(node, self.parse_cmp())
        return node

    def parse_cmp(self) -> PredNode:
        node = self.parse_unary()
        tok = self.peek()
        if tok.kind == "op" and tok.text in _CMP_OPS:
            self.advance()
            return Comparison(tok.text, node, self.parse_unary())
        if tok.kind == "ident" and tok.text == "in":
            self.advance()
            return Membership(node, self.parse_literal_list())
        return node

    def parse_unary(self) -> PredNode:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "!":
            self.advance()
            return Not(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> PredNode:
        tok = self.advance()
        if tok.kind in ("number", "string", "keyword"):
            return Literal(tok.value)
        if tok.kind == "ident":
            if tok.text == "in":
                raise self.fail("'in' is a keyword, not an identifier", tok)
            return Identifier(tok.text)
        if tok.kind == "op" and tok.text == "(":
            node = self.parse_or()
            self.expect_op(")")
            return node
        raise self.fail(f"expected a value, got {tok.text or 'end of input'!r}", tok)

    def parse_literal_list(self) -> tuple[PredValue, ...]:
        self.expect_op("[")
        items: list[PredValue] = []
        if self.peek().kind == "op" and self.peek().text == "]":
            self.advance()
            return ()
        while True:
            tok = self.advance()
            if tok.kind not in ("number", "string", "keyword"):
                raise self.fail("membership lists may only contain literals", tok)
            items.append(tok.value)
            tok = self.advance()
            if tok.kind == "op" and tok.text == "]":
                return tuple(items)
            if not (tok.kind == "op" and tok.text == ","):
                raise self.fail("expected ',' or ']' in membership list", tok)


def parse(source: str) -> Predicate:
    """Parse a predicate source string; raises BadPredicateError with the
    offending position on syntax errors."""
    if not isinstance(source, str):
        raise BadPredicateError("predicate source must be a string", position=0)
    return Predicate(source, _Parser(source).parse())


# --- evaluation -----------------------------------------------------------

def _is_number(v: object) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def equal_values(a: object, b: object) -> bool:
    """Type-strict equality: booleans only equal booleans, numbers compare
    numerically across int/float, Null only equals Null."""
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a is b
    if _is_number(a) and _is_number(b):
        return a == b
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    if a is None and b is None:
        return True
    if isinstance(a, (list, tuple)) and isinstance(b, (list, tuple)):
        return len(a) == len(b) and all(equal_values(x, y) for x, y in zip(a, b))
    return False


def _ordered(op: str, a: object, b: object) -> bool:
    # Ordered comparison is defined for number-number and string-string pairs
    # only; anything else (including Null) is false.
    if _is_number(a) and _is_number(b):
        pass
    elif isinstance(a, str) and isinstance(b, str):
        pass
    else:
        return False
    if op == "<":
        return a < b  # type: ignore[operator]
    if op == "<=":
        return a <= b  # type: ignore[operator]
    if op == ">":
        return a > b  # type: ignore[operator]
    return a >= b  # type: ignore[operator]


def _truthy(v: object) -> bool:
    return v is True


def evaluate_node(node: PredNode, lookup: Callable[[str], object]) -> object:
    if isinstance(node, Literal):
        return node.value
    if isinstance(node, Identifier):
        return lookup(node.name)
    if isinstance(node, Comparison):
        left = evaluate_node(node.left, lookup)
        right = evaluate_node(node.right, lookup)
        if node.op == "==":
            return equal_values(left, right)
        if node.op == "!=":
            return not equal_values(left, right)
        return _ordered(node.op, left, right)
    if isinstance(node, Membership):
        item = evaluate_node(node.item, lookup)
        return any(equal_values(item, option) for option in node.options)
    if isinstance(node, Not):
        return not _truthy(evaluate_node(node.operand, lookup))
    if isinstance(node, And):
        return _truthy(evaluate_node(node.left, lookup)) and _truthy(
            evaluate_node(node.right, lookup)
        )
    if isinstance(node, Or):
        return _truthy(evaluate_node(node.left, lookup)) or _truthy(
            evaluate_node(node.right, lookup)
        )
    raise TypeError(f"not a predicate node: {node!r}")


def evaluate(pred: Predicate | PredNode, lookup: Callable[[str], object]) -> bool:
    node = pred.ast if isinstance(pred, Predicate) else pred
    return _truthy(evaluate_node(node, lookup))


def identifiers(pred: Predicate | PredNode) -> Iterator[str]:
    """Yield every identifier name referenced by the predicate."""
    node = pred.ast if isinstance(pred, Predicate) else pred
    stack: list[PredNode] = [node]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Identifier):
            yield cur.name
        elif isinstance(cur, Comparison):
            stack.append(cur.left)
            stack.append(cur.right)
        elif isinstance(cur, Membership):
            stack.append(cur.item)
        elif isinstance(cur, Not):
            stack.append(cur.operand)
        elif isinstance(cur, (And, Or)):
            stack.append(cur.left)
            stack.append(cur.right)
