"""Independent reference implementations the engine is checked against.

- ``derivable_spans``: chart closure over a context-free grammar (CYK
  generalized to unit productions and right sides of any length).
- ``parse_expression``: precedence climbing for +, * and right
  associative ^ with parentheses; returns a tree whose node count the
  LR grammar's firing count must equal.
- ``pronoun_readings``: brute force over every pronoun binding, filtered
  by the integrity constraints of the abduction demo.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from chrg.models.grammar import Grammar, Terminal

# A grammar symbol is ("t", token) or ("n", name).
Symbol = tuple[str, str]


@dataclass(frozen=True)
class CfgRule:
    lhs: str
    rhs: tuple

    def to_source(self) -> str:
        items = ", ".join(f"[{value}]" if kind == "t" else value for kind, value in self.rhs)
        return f"{items} --> {self.lhs}."


def grammar_source(rules: list[CfgRule]) -> str:
    return "\n".join(r.to_source() for r in rules) + "\n"


def random_grammar(rng: random.Random, *, nonterminals: int = 5, productions: int = 8,
                   rhs_max: int = 3, alphabet: tuple = ("a", "b")) -> list[CfgRule]:
    """Random grammar; may contain unit loops (callers filter with loop_check)."""
    names = [f"n{i}" for i in range(rng.randint(1, nonterminals))]
    rules = []
    for _ in range(rng.randint(1, productions)):
        rhs = []
        for _ in range(rng.randint(1, rhs_max)):
            if rng.random() < 0.5:
                rhs.append(("t", rng.choice(alphabet)))
            else:
                rhs.append(("n", rng.choice(names)))
        rules.append(CfgRule(rng.choice(names), tuple(rhs)))
    return rules


def cfg_rules(grammar: Grammar) -> list[CfgRule]:
    """Context-free view of a grammar made of plain terminals and nonterminals."""
    rules = []
    for production in grammar.productions:
        rhs = tuple(
            ("t", item.value.name) if isinstance(item, Terminal) else ("n", item.name)
            for item in production.core
        )
        rules.append(CfgRule(production.lhs.name, rhs))
    return rules


def derivable_spans(rules: list[CfgRule], tokens: list[str]) -> set[tuple[str, int, int]]:
    """Every (N, i, j) such that N derives tokens[i:j]."""
    n = len(tokens)
    chart: set[tuple[str, int, int]] = set()
    ends_at: dict[tuple[str, int], set[int]] = {}

    def spans(symbol: Symbol, i: int) -> list[int]:
        kind, value = symbol
        if kind == "t":
            return [i + 1] if i < n and tokens[i] == value else []
        return list(ends_at.get((value, i), ()))

    def ends(rhs: tuple, i: int) -> set[int]:
        frontier = {i}
        for symbol in rhs:
            frontier = {j for k in frontier for j in spans(symbol, k)}
            if not frontier:
                break
        return frontier

    changed = True
    while changed:
        changed = False
        for rule in rules:
            for i in range(n):
                for j in ends(rule.rhs, i):
                    if (rule.lhs, i, j) not in chart:
                        chart.add((rule.lhs, i, j))
                        ends_at.setdefault((rule.lhs, i), set()).add(j)
                        changed = True
    return chart


# ── Expressions ───────────────────────────────────────────────────────

_PRECEDENCE = {"+": (1, "left"), "*": (2, "left"), "^": (3, "right")}


def random_expression(rng: random.Random, depth: int = 4) -> list:
    """Token list of a well-formed expression over small integers."""
    roll = rng.random()
    if depth == 0 or roll < 0.3:
        return [rng.randint(0, 9)]
    if roll < 0.45:
        return ["(", *random_expression(rng, depth - 1), ")"]
    op = rng.choice(["+", "*", "^"])
    return [*random_expression(rng, depth - 1), op, *random_expression(rng, depth - 1)]


def parse_expression(tokens: list):
    """Precedence-climbing parse into nested tuples:
    ``("int", v)``, ``("paren", e)``, ``(op, left, right)``."""
    position = 0

    def primary():
        nonlocal position
        token = tokens[position]
        position += 1
        if token == "(":
            inner = climb(1)
            assert tokens[position] == ")"
            position += 1
            return ("paren", inner)
        assert isinstance(token, int)
        return ("int", token)

    def climb(min_precedence: int):
        nonlocal position
        left = primary()
        while position < len(tokens) and tokens[position] in _PRECEDENCE:
            op = tokens[position]
            precedence, assoc = _PRECEDENCE[op]
            if precedence < min_precedence:
                break
            position += 1
            right = climb(precedence + 1 if assoc == "left" else precedence)
            left = (op, left, right)
        return left

    tree = climb(1)
    assert position == len(tokens)
    return tree


def node_count(tree) -> int:
    if tree[0] == "int":
        return 1
    if tree[0] == "paren":
        return 1 + node_count(tree[1])
    return 1 + node_count(tree[1]) + node_count(tree[2])


# ── Pronouns ──────────────────────────────────────────────────────────

NAMES = {"mary": "fem", "martha": "fem", "peter": "masc", "john": "masc"}
PRONOUNS = {"she": "fem", "her": "fem", "he": "masc", "him": "masc"}


def pronoun_readings(sentences: list[tuple[str, str, str]]) -> list[set[tuple[str, str, str]]]:
    """Consistent fact sets for subject-verb-object sentences.

    A pronoun may refer to any individual of its gender named earlier in
    the text. Readings where someone hates a person they like or love, or
    hates themselves, are dropped.
    """
    words = [w for sub, _, obj in sentences for w in (sub, obj)]
    slots = []
    for index, word in enumerate(words):
        if word in PRONOUNS:
            earlier = {w for w in words[:index] if w in NAMES}
            slots.append(sorted(n for n in earlier if NAMES[n] == PRONOUNS[word]))

    readings = []
    for choice in itertools.product(*slots):
        picks = iter(choice)
        facts = set()
        for sub, verb, obj in sentences:
            sub = next(picks) if sub in PRONOUNS else sub
            obj = next(picks) if obj in PRONOUNS else obj
            facts.add((verb, sub, obj))
        if _consistent(facts) and facts not in readings:
            readings.append(facts)
    return readings


def _consistent(facts: set[tuple[str, str, str]]) -> bool:
    for verb, x, y in facts:
        if verb == "hates" and (x == y or ("likes", x, y) in facts or ("loves", x, y) in facts):
            return False
    return True
