"""Grammar compiler: turns grammar sources into CHR programs.

Every production becomes one rule (or one per right-context alternative):

    np, verb, np --> sentence.
        np(N0,N1), verb(N1,N2), np(N2,N3) ==> sentence(N0,N3)

    exp, [+], exp /- ([+];[')'];[eof]) <-> exp.
        token(R,N3,N4) \\ exp(N0,N1), token('+',N1,N2), exp(N2,N3)
            <=> member(R,['+',')',eof]) | exp(N0,N3)

Nonterminal attributes come before the two position arguments. The
compiled program starts with the idempotence rules (when duplicate
elimination is on), then abducible and negation rules, the assumption
prelude, and finally productions and raw rules in source order.

Usage:
    grammar = parse_grammar_source(text)
    program = compile_cfg(grammar)
    result = run(program, tokenize(["peter", "likes", "mary"]))
"""
from __future__ import annotations

from typing import Iterable

import structlog

from chrg.models.grammar import (
    Code,
    Grammar,
    Nonterminal,
    Production,
    ProductionKind,
    RightContext,
    Terminal,
)
from chrg.models.rules import TRUE, Builtin, Call, Goal, Program, Rule, conjunction, conjuncts, term_to_goal
from chrg.models.terms import Compound, Const, Int, Term, Var, from_python, make_list, struct, term_vars
from chrg.services.engine import build_program
from chrg.services.hypotheses import ASSERTION_KEYS, abducible_rules, assumption_prelude, negation_rules
from chrg.services.unification import SERIALS, SerialCounter
from chrg.syntax.reader import parse_grammar_source
from chrg.utils.exceptions import ContextPlacementError, EmptyProductionError, GrammarError, InputValidationError

logger = structlog.get_logger(__name__)

TOKEN = "token"
EOF = Const("eof")

__all__ = [
    "TOKEN",
    "accepts",
    "compile_cfg",
    "compile_source",
    "desugar",
    "idempotence_rule",
    "loop_check",
    "parse_grammar_source",
    "recognized_spans",
    "tokenize",
]


def tokenize(tokens: Iterable, *, eof: bool = False) -> list[Term]:
    """``token(t_i, i-1, i)`` for every token, plus ``token(eof,k,k+1)`` when asked."""
    result = [struct(TOKEN, from_python(t), Int(i), Int(i + 1)) for i, t in enumerate(tokens)]
    if not result:
        raise InputValidationError("cannot tokenize an empty token sequence")
    if eof:
        k = len(result)
        result.append(struct(TOKEN, EOF, Int(k), Int(k + 1)))
    return result


def compile_cfg(
    grammar: Grammar,
    *,
    lr: bool | None = None,
    lr_convention: str = "rightmost",
    dedup: bool | None = None,
    counter: SerialCounter = SERIALS,
) -> Program:
    """Compile ``grammar`` into a program.

    Args:
        lr: Force LR passivation on (True) or off (False) for every
            production; None follows ``ruleLR`` prefixes and ``:- modeLR.``.
        lr_convention: 'rightmost' keeps only the rightmost grammar symbol
            active, 'leftmost' only the leftmost.
        dedup: Override the grammar's duplicate elimination setting.
    """
    if lr_convention not in ("rightmost", "leftmost"):
        raise GrammarError(f"unknown LR convention '{lr_convention}'")
    productions = grammar.productions
    for p in productions:
        _check_names(p)

    if dedup is None:
        dedup = grammar.dedup
    if dedup is None:
        dedup = bool(productions) and all(p.kind is ProductionKind.PROPAGATION for p in productions)

    rules: list[Rule] = []
    if dedup:
        rules.extend(idempotence_rule(name, arity, counter) for name, arity in grammar.nonterminals())
    for name, arity in grammar.abducibles:
        rules.extend(abducible_rules(name, arity, counter))
    for name, arity in grammar.negations:
        rules.extend(negation_rules(name, arity, counter))
    if grammar.prelude:
        rules.extend(assumption_prelude())

    numbering: dict[str, int] = {}
    for clause in grammar.clauses:
        if isinstance(clause, Production):
            numbering[clause.lhs.name] = numbering.get(clause.lhs.name, 0) + 1
            use_lr = lr if lr is not None else (clause.lr_mode or grammar.global_lr)
            rules.extend(desugar(
                clause,
                lr=use_lr,
                lr_convention=lr_convention,
                name=f"{clause.lhs.name}{numbering[clause.lhs.name]}",
            ))
        else:
            rules.append(clause)

    loops = loop_check(grammar)
    if loops:
        logger.warning("grammar_loops_detected", nonterminals=sorted(loops))

    program = build_program(rules, ground_keys=ASSERTION_KEYS, counter=counter)
    logger.debug(
        "grammar_compiled",
        rules=len(program),
        productions=len(productions),
        dedup=dedup,
        lr=lr if lr is not None else grammar.global_lr,
    )
    return program


def compile_source(text: str, **options) -> tuple[Grammar, Program]:
    """Parse and compile grammar text in one step."""
    grammar = parse_grammar_source(text)
    return grammar, compile_cfg(grammar, **options)


def desugar(
    production: Production,
    *,
    lr: bool = False,
    lr_convention: str = "rightmost",
    name: str | None = None,
) -> list[Rule]:
    """Rules for one production: one per right-context alternative, or a
    single rule with a ``member`` guard when every alternative is one terminal."""
    core = production.core
    if not any(isinstance(i, (Terminal, Nonterminal)) for i in core):
        raise EmptyProductionError(_describe(production))
    for item in production.rhs:
        if isinstance(item, RightContext) and not item.alternatives:
            raise ContextPlacementError(f"{_describe(production)}: empty right context")

    name = name or production.lhs.name
    taken = {v.name for v in _production_vars(production)}
    left = production.left_context
    right = production.right_context

    # positions: L<m>..L1 for the left context, N0..Nk for the core and beyond
    core_symbols = [i for i in core if not isinstance(i, Code)]
    left_symbols = [i for i in left.items if not isinstance(i, Code)] if left else []
    left_positions = [_fresh(f"L{len(left_symbols) - j}", taken) for j in range(len(left_symbols))]
    positions = [_fresh(f"N{j}", taken) for j in range(len(core_symbols) + 1)]
    start, end = positions[0], positions[-1]

    left_heads, left_guards = _chain(left.items if left else (), left_positions + [start])
    core_heads, core_guards = _chain(core, positions)
    body = _result(production.result_items, start, end)

    alternatives: list[tuple[list, list]] = [([], [])]
    if right is not None:
        alternatives = _right_alternatives(right, end, len(core_symbols), taken)

    rules = []
    for index, (right_heads, right_guards) in enumerate(alternatives, start=1):
        rule_name = name if len(alternatives) == 1 else f"{name}_{index}"
        rules.append(_assemble(
            rule_name,
            production.kind,
            left_heads,
            core_heads,
            right_heads,
            left_guards + core_guards + right_guards,
            body,
            lr=lr,
            lr_convention=lr_convention,
        ))
    return rules


def idempotence_rule(name: str, arity: int, counter: SerialCounter = SERIALS) -> Rule:
    """``p(X1..Xa)#Id0 \\ p(X1..Xa) <=> true``: a newly inserted duplicate is removed."""
    head = struct(name, *(counter.fresh(f"X{i}") for i in range(1, arity + 1)))
    return Rule(
        name=f"dedup_{name}_{arity}",
        kept_heads=(head,),
        removed_heads=(head,),
        passive=frozenset({0}),
    )


def loop_check(grammar: Grammar) -> set[str]:
    """Nonterminals that can derive themselves through unit productions."""
    edges: dict[str, set[str]] = {}
    for p in grammar.productions:
        symbols = [i for i in p.core if not isinstance(i, Code)]
        if len(symbols) == 1 and isinstance(symbols[0], Nonterminal):
            edges.setdefault(p.lhs.name, set()).add(symbols[0].name)

    looping: set[str] = set()
    for origin in edges:
        stack, seen = list(edges[origin]), set()
        while stack:
            node = stack.pop()
            if node == origin:
                looping.add(origin)
                break
            if node not in seen:
                seen.add(node)
                stack.extend(edges.get(node, ()))
    return looping


def accepts(terms: Iterable[Term], start: str, length: int) -> bool:
    """Whether ``start(..., 0, length)`` is among ``terms``."""
    return any(
        isinstance(t, Compound) and t.functor == start and len(t.args) >= 2
        and t.args[-2] == Int(0) and t.args[-1] == Int(length)
        for t in terms
    )


def recognized_spans(terms: Iterable[Term], grammar: Grammar) -> list[Term]:
    """Nonterminal constraints among ``terms``, in the order given."""
    keys = set(grammar.nonterminals())
    return [
        t for t in terms
        if isinstance(t, (Compound, Const)) and _key(t) in keys
    ]


# ── Private Helpers ───────────────────────────────────────────────────

def _key(term: Term) -> tuple[str, int]:
    return (term.functor, len(term.args)) if isinstance(term, Compound) else (term.name, 0)


def _describe(production: Production) -> str:
    where = f"line {production.line}: " if production.line is not None else ""
    return f"{where}production for '{production.lhs.name}'"


def _check_names(production: Production) -> None:
    for item in (*production.result_items, *production.core):
        if isinstance(item, Nonterminal) and item.name == TOKEN:
            raise GrammarError(f"{_describe(production)}: '{TOKEN}' is reserved for terminals")


def _production_vars(production: Production) -> list[Var]:
    terms: list[Term] = []

    def collect(items: Iterable) -> None:
        for item in items:
            if isinstance(item, Terminal):
                terms.append(item.value)
            elif isinstance(item, Nonterminal):
                terms.extend(item.attrs)
            elif isinstance(item, Code):
                terms.append(item.goal)
            elif isinstance(item, RightContext):
                for alt in item.alternatives:
                    collect(alt)
            else:
                collect(item.items)

    collect(production.rhs)
    collect(production.result_items)
    return term_vars(*terms)


def _fresh(name: str, taken: set[str]) -> Var:
    candidate = name
    while candidate in taken:
        candidate += "_"
    taken.add(candidate)
    return SERIALS.fresh(candidate)


def _symbol_head(item: Terminal | Nonterminal, start: Term, end: Term) -> Term:
    if isinstance(item, Terminal):
        return struct(TOKEN, item.value, start, end)
    return struct(item.name, *item.attrs, start, end)


def _chain(items: Iterable, positions: list[Term]) -> tuple[list[Term], list[Goal]]:
    """Heads for consecutive grammar symbols over ``positions``; code items become guards."""
    heads: list[Term] = []
    guards: list[Goal] = []
    index = 0
    for item in items:
        if isinstance(item, Code):
            guards.extend(conjuncts(_code_goal(item)))
        else:
            heads.append(_symbol_head(item, positions[index], positions[index + 1]))
            index += 1
    return heads, guards


def _right_alternatives(context: RightContext, start: Var, base: int, taken: set[str]) -> list[tuple[list, list]]:
    """(heads, guards) per alternative; the context begins at position ``N<base>``."""
    alternatives = context.alternatives
    singles = [alt[0].value for alt in alternatives if len(alt) == 1 and isinstance(alt[0], Terminal)]
    if len(alternatives) > 1 and len(singles) == len(alternatives):
        look_ahead = _fresh("R", taken)
        head = struct(TOKEN, look_ahead, start, _fresh(f"N{base + 1}", taken))
        return [([head], [Builtin("member", (look_ahead, make_list(singles)))])]

    result = []
    for alt in alternatives:
        # each alternative becomes its own rule, so names may repeat across them
        names = set(taken)
        count = sum(1 for i in alt if not isinstance(i, Code))
        positions = [start] + [_fresh(f"N{base + j}", names) for j in range(1, count + 1)]
        result.append(_chain(alt, positions))
    return result


def _code_goal(item: Code) -> Goal:
    try:
        return term_to_goal(item.goal)
    except ValueError as e:
        raise GrammarError(str(e)) from e


def _result(items: Iterable, start: Term, end: Term) -> Goal:
    goals: list[Goal] = []
    for item in items:
        if isinstance(item, Code):
            goals.append(_code_goal(item))
        else:
            head = _symbol_head(item, start, end)
            goals.append(Call(head.functor, head.args))
    return conjunction(goals)


def _assemble(
    name: str,
    kind: ProductionKind,
    left_heads: list[Term],
    core_heads: list[Term],
    right_heads: list[Term],
    guards: list[Goal],
    body: Goal,
    *,
    lr: bool,
    lr_convention: str,
) -> Rule:
    ask: list[Goal] = []
    tell: list[Goal] = []
    for g in guards:
        if g is TRUE:
            continue
        if not isinstance(g, Builtin):
            raise GrammarError(f"rule '{name}': code on the reduced side must be builtins, got {g!r}")
        (tell if g.key == ("=", 2) else ask).append(g)

    textual = left_heads + core_heads + right_heads
    if kind is ProductionKind.PROPAGATION:
        kept, removed = textual, []
        order = list(range(len(textual)))
    else:
        kept, removed = left_heads + right_heads, core_heads
        # head position of each textual symbol: kept heads first, then removed
        n_left, n_kept = len(left_heads), len(left_heads) + len(right_heads)
        order = (list(range(n_left))
                 + [n_kept + j for j in range(len(core_heads))]
                 + [n_left + j for j in range(len(right_heads))])

    passive: frozenset = frozenset()
    if lr and len(textual) > 1:
        active = order[-1] if lr_convention == "rightmost" else order[0]
        passive = frozenset(p for p in order if p != active)

    return Rule(
        name=name,
        kept_heads=tuple(kept),
        removed_heads=tuple(removed),
        passive=passive,
        guard_ask=tuple(ask),
        guard_tell=tuple(tell),
        body=body,
    )
