"""Reader for terms, raw CHR rules and the sugared grammar notation.

One lark grammar covers all three surfaces; a source file may mix raw
rules, grammar rules and directives:

    :- modeLR.
    exp, [+], exp /- ([+];[')'];[eof]) <-> exp.
    token(Int,N0,N1) <=> integer(Int) | exp(N0,N1).

Variables are scoped per clause; ``_`` is a fresh variable every time.
Integers are unsigned. Parse errors raise GrammarSyntaxError with the
line and column lark reports.
"""
from __future__ import annotations

import re
from dataclasses import replace
from functools import lru_cache

import structlog
from lark import Lark, Token, Transformer, v_args
from lark.exceptions import LarkError, UnexpectedEOF, UnexpectedInput, VisitError

from chrg.models.grammar import (
    Code,
    Grammar,
    LeftContext,
    Nonterminal,
    Production,
    ProductionKind,
    RightContext,
    Terminal,
)
from chrg.models.rules import Builtin, Goal, Rule, conjuncts, term_to_goal, TRUE
from chrg.models.terms import NIL, Compound, Const, Int, Term, Var, functor_key, make_list, term_args
from chrg.services.unification import SERIALS
from chrg.utils.exceptions import ChrgError, ContextPlacementError, GrammarError, GrammarSyntaxError

logger = structlog.get_logger(__name__)

GRAMMAR = r"""
program: clause*
clause: (directive | chr_rule | grammar_rule) "."
term_only: goal

directive: ":-" goal

chr_rule: [rule_name] heads CHR_ARROW [guard "|"] goal [pragmas]
rule_name: NAME "@"
heads: head_list ["\\" head_list]
head_list: head ("," head)*
head: expr ["#" VAR]
guard: conj ["&" conj]
pragmas: ","? "pragma" passive ("," passive)*
passive: "passive" "(" VAR ")"

grammar_rule: [RULE_LR] [context "-\\"] [items] ["/-" context] GRAMMAR_ARROW items
context: "(" items (";" items)* ")"
       | items
items: item ("," item)*
item: "[" [expr ("," expr)*] "]"  -> terminals
    | "{" goal "}"                -> code
    | callable                    -> nonterminal

?goal: disj
?disj: ite ";" disj       -> op_or
     | ite
?ite: conj "->" ite       -> op_then
    | conj
?conj: expr "," conj      -> op_and
     | expr
?expr: _NOT expr          -> op_not
     | "\\+" expr         -> op_naf
     | cmp
?cmp: sum CMP_OP sum      -> op_infix
    | sum
?sum: sum "+" prod        -> op_plus
    | prod
?prod: prod MUL_OP diff   -> op_infix
     | diff
?diff: diff "-" pow       -> op_minus
     | pow
?pow: primary "^" pow     -> op_pow
    | primary
?primary: callable
        | VAR                      -> var
        | INT                      -> int
        | "[" "]"                  -> nil
        | "[" args ["|" expr] "]"  -> list
        | "(" goal ")"
?callable: NAME "(" args ")"       -> compound
         | QUOTED "(" args ")"     -> compound
         | SYM_ATOM "(" args ")"   -> compound
         | NAME                    -> atom
         | QUOTED                  -> atom
         | SYM_ATOM                -> atom
args: expr ("," expr)*

CMP_OP: "=<" | ">=" | "\\==" | "\\=" | "==" | "=" | "<" | ">"
MUL_OP: "*" | "/"
SYM_ATOM: "=+" | "=-" | "=*" | "+" | "-" | "*" | "/" | "^"
RULE_LR: "ruleLR"
CHR_ARROW: "==>" | "<=>"
GRAMMAR_ARROW: "-->" | "<->"
VAR: /[A-Z_][A-Za-z0-9_]*/
NAME: /(?!not\s)[a-z][A-Za-z0-9_]*/
_NOT: /not(?=\s)/
QUOTED: /'(?:[^'\\]|\\.)*'/
INT: /[0-9]+/
COMMENT: /%[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""

_ESCAPE = re.compile(r"\\(.)")


@lru_cache(maxsize=1)
def _parser() -> Lark:
    return Lark(
        GRAMMAR,
        start=["program", "term_only"],
        parser="earley",
        lexer="dynamic",
        ambiguity="resolve",
        propagate_positions=True,
        maybe_placeholders=True,
    )


class _Directive:
    __slots__ = ("term", "line")

    def __init__(self, term: Term, line: int | None) -> None:
        self.term = term
        self.line = line


class _SourceTransformer(Transformer):
    """Builds terms, rules, productions and directives; one variable scope per clause."""

    def __init__(self) -> None:
        super().__init__()
        self._scope: dict[str, Var] = {}

    # ── Terms ─────────────────────────────────────────────────────────

    def var(self, children):
        name = str(children[0])
        if name == "_":
            return SERIALS.fresh("_")
        var = self._scope.get(name)
        if var is None:
            var = self._scope[name] = SERIALS.fresh(name)
        return var

    def int(self, children):
        return Int(int(children[0]))

    def nil(self, _children):
        return NIL

    def list(self, children):
        items, tail = children
        return make_list(items, NIL if tail is None else tail)

    def args(self, children):
        return list(children)

    def atom(self, children):
        return Const(_atom_name(children[0]))

    def compound(self, children):
        name, args = children
        return Compound(_atom_name(name), tuple(args))

    def op_infix(self, children):
        left, op, right = children
        return Compound(str(op), (left, right))

    def op_or(self, children):
        return Compound(";", tuple(children))

    def op_then(self, children):
        return Compound("->", tuple(children))

    def op_and(self, children):
        return Compound(",", tuple(children))

    def op_not(self, children):
        return Compound("not", tuple(children))

    def op_naf(self, children):
        return Compound("\\+", tuple(children))

    def op_plus(self, children):
        return Compound("+", tuple(children))

    def op_minus(self, children):
        return Compound("-", tuple(children))

    def op_pow(self, children):
        return Compound("^", tuple(children))

    def term_only(self, children):
        return children[0]

    # ── Raw rules ─────────────────────────────────────────────────────

    def rule_name(self, children):
        return str(children[0])

    def head(self, children):
        term, ident = children
        return term, None if ident is None else str(ident)

    def head_list(self, children):
        return list(children)

    def heads(self, children):
        return children[0], children[1]

    def guard(self, children):
        return children[0], children[1]

    def passive(self, children):
        return str(children[0])

    def pragmas(self, children):
        return list(children)

    @v_args(meta=True)
    def chr_rule(self, meta, children):
        name, (first, second), arrow, guard, body, pragmas = children
        if second is not None:
            if arrow == "==>":
                raise GrammarError(f"line {meta.line}: simpagation rules use '<=>'")
            kept, removed = first, second
        elif arrow == "==>":
            kept, removed = first, []
        else:
            kept, removed = [], first

        positions: dict[str, int] = {}
        heads = kept + removed
        for position, (_, ident) in enumerate(heads):
            if ident is not None:
                positions[ident] = position
        passive = set()
        for ident in pragmas or ():
            if ident not in positions:
                raise GrammarError(f"line {meta.line}: pragma names unknown head id {ident}")
            passive.add(positions[ident])

        ask, tell = _split_guard(guard, meta.line)
        return Rule(
            name=name or "",
            kept_heads=tuple(t for t, _ in kept),
            removed_heads=tuple(t for t, _ in removed),
            passive=frozenset(passive),
            guard_ask=ask,
            guard_tell=tell,
            body=_goal(body, meta.line),
        )

    # ── Grammar rules ─────────────────────────────────────────────────

    def terminals(self, children):
        return [Terminal(t) for t in children if t is not None]

    def code(self, children):
        return [Code(children[0])]

    def nonterminal(self, children):
        term = children[0]
        name, _ = functor_key(term)
        return [Nonterminal(name, term_args(term))]

    def items(self, children):
        return tuple(item for group in children for item in group)

    def context(self, children):
        return tuple(children)

    @v_args(meta=True)
    def grammar_rule(self, meta, children):
        lr_prefix, left, core, right, arrow, result = children
        rhs: list = []
        if left is not None:
            if len(left) != 1:
                raise ContextPlacementError(f"line {meta.line}: a left context has a single alternative")
            rhs.append(LeftContext(left[0]))
        if not core and (left is not None or right is not None):
            raise ContextPlacementError(f"line {meta.line}: context given without a core")
        rhs.extend(core or ())
        if right is not None:
            rhs.append(RightContext(tuple(right)))

        lhs = next((i for i in result if isinstance(i, Nonterminal)), None)
        if lhs is None:
            raise GrammarError(f"line {meta.line}: the result side names no nonterminal")
        return Production(
            lhs=lhs,
            rhs=tuple(rhs),
            kind=ProductionKind(str(arrow)),
            lr_mode=lr_prefix is not None,
            result=tuple(result),
            line=meta.line,
        )

    # ── Clauses ───────────────────────────────────────────────────────

    @v_args(meta=True)
    def directive(self, meta, children):
        return _Directive(children[0], meta.line)

    def clause(self, children):
        self._scope = {}
        return children[0]

    def program(self, children):
        return list(children)


# ── Public API ────────────────────────────────────────────────────────

def parse_term(text: str) -> Term:
    """Parse one term (operators and ``,`` allowed, no trailing period)."""
    return _parse(text, "term_only")


def parse_goal(text: str) -> Goal:
    term = parse_term(text)
    return _goal(term, None)


def parse_rules(text: str) -> list[Rule]:
    """Parse raw CHR rules only; unnamed rules are called r1, r2, ..."""
    grammar = parse_grammar_source(text)
    if grammar.productions:
        raise GrammarError("grammar rules are not allowed here")
    return grammar.raw_rules


def parse_grammar_source(text: str, *, source_name: str = "<string>") -> Grammar:
    """Parse a grammar file: grammar rules, raw rules and directives."""
    clauses = _parse(text, "program")
    settings: dict = {"abducibles": [], "negations": []}
    collected: list = []
    for index, clause in enumerate(clauses, start=1):
        if isinstance(clause, _Directive):
            _apply_directive(clause, settings)
        elif isinstance(clause, Rule):
            collected.append(clause if clause.name else replace(clause, name=f"r{index}"))
        else:
            collected.append(clause)

    grammar = Grammar(
        clauses=tuple(collected),
        start=settings.get("start"),
        global_lr=settings.get("global_lr", False),
        dedup=settings.get("dedup"),
        eof=settings.get("eof", False),
        prelude=settings.get("prelude", False),
        abducibles=tuple(settings["abducibles"]),
        negations=tuple(settings["negations"]),
    )
    logger.debug("grammar_source_parsed", source=source_name, clauses=len(collected))
    return grammar


# ── Private Helpers ───────────────────────────────────────────────────

def _parse(text: str, start: str):
    try:
        tree = _parser().parse(text, start=start)
        return _SourceTransformer().transform(tree)
    except UnexpectedEOF as e:
        raise GrammarSyntaxError("unexpected end of input") from e
    except UnexpectedInput as e:
        raise GrammarSyntaxError(_describe(e, text), e.line, e.column) from e
    except VisitError as e:
        if isinstance(e.orig_exc, ChrgError):
            raise e.orig_exc from None
        raise GrammarError(str(e.orig_exc)) from e
    except LarkError as e:
        raise GrammarSyntaxError(str(e)) from e


def _describe(e: UnexpectedInput, text: str) -> str:
    context = e.get_context(text).strip()
    return f"unexpected input\n{context}" if context else "unexpected input"


def _atom_name(token: Token) -> str:
    text = str(token)
    if token.type == "QUOTED":
        return _ESCAPE.sub(r"\1", text[1:-1])
    return text


def _goal(term: Term, line: int | None) -> Goal:
    try:
        return term_to_goal(term)
    except ValueError as e:
        where = f"line {line}: " if line is not None else ""
        raise GrammarError(f"{where}{e}") from e


def _split_guard(guard, line: int | None) -> tuple[tuple, tuple]:
    """(ask goals, tell goals) from a parsed ``Ask & Tell`` or plain guard."""
    if guard is None:
        return (), ()
    first, second = guard
    first_goals = conjuncts(_goal(first, line))
    if second is not None:
        ask, tell = first_goals, conjuncts(_goal(second, line))
    else:
        ask = [g for g in first_goals if not _is_unification(g)]
        tell = [g for g in first_goals if _is_unification(g)]
    for g in (*ask, *tell):
        if g is not TRUE and not isinstance(g, Builtin):
            raise GrammarError(f"line {line}: guards may only contain builtins, got {g!r}")
    return tuple(ask), tuple(tell)


def _is_unification(goal: Goal) -> bool:
    return isinstance(goal, Builtin) and goal.key == ("=", 2)


def _apply_directive(directive: _Directive, settings: dict) -> None:
    term = directive.term
    name, arity = functor_key(term) if isinstance(term, (Compound, Const)) else ("", -1)
    args = term_args(term)
    if (name, arity) == ("modeLR", 0):
        settings["global_lr"] = True
    elif (name, arity) == ("eof", 0):
        settings["eof"] = True
    elif (name, arity) == ("prelude", 0):
        settings["prelude"] = True
    elif (name, arity) == ("start", 1) and isinstance(args[0], Const):
        settings["start"] = args[0].name
    elif (name, arity) == ("dedup", 1) and args[0] in (Const("on"), Const("off")):
        settings["dedup"] = args[0] == Const("on")
    elif (name, arity) in (("abducible", 1), ("negation", 1)):
        key = "abducibles" if name == "abducible" else "negations"
        settings[key].append(_indicator(args[0], directive.line))
    else:
        raise GrammarError(f"line {directive.line}: unknown directive")


def _indicator(term: Term, line: int | None) -> tuple[str, int]:
    if (isinstance(term, Compound) and term.functor == "/" and isinstance(term.args[0], Const)
            and isinstance(term.args[1], Int)):
        return term.args[0].name, term.args[1].value
    raise GrammarError(f"line {line}: expected Name/Arity")
