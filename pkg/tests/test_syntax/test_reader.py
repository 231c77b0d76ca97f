"""Tests for the term, rule and grammar reader."""
from __future__ import annotations

import pytest

from chrg.models.grammar import Code, LeftContext, Nonterminal, ProductionKind, RightContext, Terminal
from chrg.models.rules import FAIL, Builtin, Call, IfThenElse, RuleKind
from chrg.models.terms import NIL, Compound, Const, Int, Var, list_items, struct
from chrg.syntax.reader import parse_goal, parse_grammar_source, parse_rules, parse_term
from chrg.utils.exceptions import ContextPlacementError, GrammarError, GrammarSyntaxError


class TestParseTerm:
    def test_atoms_and_integers(self):
        assert parse_term("peter") == Const("peter")
        assert parse_term("42") == Int(42)

    def test_quoted_atoms(self):
        assert parse_term("')'") == Const(")")
        assert parse_term("'it\\'s'") == Const("it's")

    def test_symbol_atoms(self):
        assert parse_term("token(+,0,1)") == struct("token", Const("+"), Int(0), Int(1))
        assert parse_term("'^'") == Const("^")

    def test_variables_shared_within_term(self):
        t = parse_term("f(X, Y, X)")
        assert t.args[0] == t.args[2]
        assert t.args[0] != t.args[1]

    def test_anonymous_variables_are_distinct(self):
        t = parse_term("f(_, _)")
        assert isinstance(t.args[0], Var)
        assert t.args[0] != t.args[1]

    def test_lists(self):
        assert parse_term("[]") == NIL
        assert list_items(parse_term("[a, 1]")) == [Const("a"), Int(1)]
        tail = parse_term("[a|T]")
        assert isinstance(tail.args[1], Var)

    def test_operator_precedence(self):
        # + binds looser than *, * looser than -, - looser than ^
        t = parse_term("a + b * c - d ^ e ^ f")
        assert t.functor == "+"
        product = t.args[1]
        assert product.functor == "*"
        difference = product.args[1]
        assert difference.functor == "-"
        power = difference.args[1]
        assert power == parse_term("d ^ (e ^ f)")

    def test_plus_left_associative(self):
        t = parse_term("a + b + c")
        assert t.args[0] == parse_term("a + b")

    def test_minus_with_pair(self):
        t = parse_term("likes-(mary,peter)")
        assert t == struct("-", Const("likes"), struct(",", Const("mary"), Const("peter")))

    def test_comparison(self):
        assert parse_term("Z1 < Z2").functor == "<"
        assert parse_term("R \\= '^'").functor == "\\="

    def test_assumption_operators(self):
        t = parse_term("*(active_individual,[X,G],N)")
        assert t.functor == "*" and t.arity == 3
        assert parse_term("=+(ref_object,[O])").functor == "=+"
        assert parse_term("-(p,[X],3)").functor == "-"

    def test_negation(self):
        assert parse_term("not fact(a,b,c)").functor == "not"

    def test_syntax_error_located(self):
        with pytest.raises(GrammarSyntaxError) as info:
            parse_term("f(a,,b)")
        assert info.value.line == 1
        assert info.value.exit_code == 1

    def test_unexpected_end(self):
        with pytest.raises(GrammarSyntaxError):
            parse_term("f(a,")


class TestParseGoal:
    def test_builtin_and_call(self):
        goal = parse_goal("X = 1, p(X)")
        assert isinstance(goal.left, Builtin)
        assert isinstance(goal.right, Call)

    def test_if_then_else(self):
        goal = parse_goal("( find_constraint(p(_),_) -> q ; true )")
        assert isinstance(goal, IfThenElse)

    def test_fail(self):
        assert parse_goal("fail") is FAIL


class TestParseRules:
    def test_simplification(self):
        [rule] = parse_rules("token(a,N1,N2) <=> as(N1,N2).")
        assert rule.kind is RuleKind.SIMPLIFICATION
        assert rule.name == "r1"

    def test_propagation(self):
        [rule] = parse_rules("p(X) ==> q(X).")
        assert rule.kind is RuleKind.PROPAGATION

    def test_simpagation_named(self):
        [rule] = parse_rules("dedup @ p(X) \\ p(X) <=> true.")
        assert rule.name == "dedup"
        assert rule.kind is RuleKind.SIMPAGATION

    def test_simpagation_needs_simplification_arrow(self):
        with pytest.raises(GrammarError, match="simpagation"):
            parse_rules("p(X) \\ q(X) ==> r.")

    def test_guard_split_by_ampersand(self):
        [rule] = parse_rules("a(P,A,Z1), b(P,B,Z2) <=> Z1 < Z2 & A=B | true.")
        assert [g.name for g in rule.guard_ask] == ["<"]
        assert [g.name for g in rule.guard_tell] == ["="]

    def test_guard_without_ampersand_splits_unifications(self):
        [rule] = parse_rules("a(X,Y) <=> integer(X), Y = X | b(Y).")
        assert [g.name for g in rule.guard_ask] == ["integer"]
        assert [g.name for g in rule.guard_tell] == ["="]

    def test_guard_with_constraint_rejected(self):
        with pytest.raises(GrammarError, match="guards may only contain builtins"):
            parse_rules("a(X) <=> b(X) | c.")

    def test_passive_pragma(self):
        [rule] = parse_rules("p(X)#Id1, q(X)#Id2 ==> r(X) pragma passive(Id1).")
        assert rule.passive == frozenset({0})

    def test_passive_pragma_with_comma(self):
        [rule] = parse_rules("p(X)#A \\ q(X)#B <=> true, pragma passive(B).")
        assert rule.passive == frozenset({1})

    def test_unknown_pragma_id(self):
        with pytest.raises(GrammarError, match="unknown head id"):
            parse_rules("p(X)#A ==> q pragma passive(B).")

    def test_variables_scoped_per_clause(self):
        first, second = parse_rules("p(X) ==> q(X).\np(X) ==> r(X).")
        assert first.kept_heads[0].args[0] != second.kept_heads[0].args[0]

    def test_comments_ignored(self):
        rules = parse_rules("% a comment\np(X) ==> q(X). % trailing\n")
        assert len(rules) == 1

    def test_grammar_rules_rejected(self):
        with pytest.raises(GrammarError, match="not allowed"):
            parse_rules("[a] --> as.")


class TestParseGrammarSource:
    def test_plain_production(self):
        g = parse_grammar_source("np, verb, np --> sentence.")
        [p] = g.productions
        assert p.lhs == Nonterminal("sentence")
        assert p.kind is ProductionKind.PROPAGATION
        assert p.core == (Nonterminal("np"), Nonterminal("verb"), Nonterminal("np"))

    def test_terminals_and_code(self):
        [p] = parse_grammar_source("[Int], {integer(Int)} <-> exp.").productions
        assert p.kind is ProductionKind.SIMPLIFICATION
        terminal, code = p.core
        assert isinstance(terminal, Terminal) and isinstance(terminal.value, Var)
        assert isinstance(code, Code)
        assert code.goal.args[0] == terminal.value

    def test_several_terminals_in_one_bracket(self):
        [p] = parse_grammar_source("[is, a] --> copula.").productions
        assert p.core == (Terminal(Const("is")), Terminal(Const("a")))

    def test_right_context_alternatives(self):
        [p] = parse_grammar_source("exp, [+], exp /- ([+]; [')']; [eof]) <-> exp.").productions
        right = p.right_context
        assert isinstance(right, RightContext)
        assert [alt[0].value for alt in right.alternatives] == [Const("+"), Const(")"), Const("eof")]

    def test_left_context(self):
        [p] = parse_grammar_source("[the] -\\ [dog] --> noun.").productions
        assert p.left_context == LeftContext((Terminal(Const("the")),))
        assert p.core == (Terminal(Const("dog")),)

    def test_left_context_single_alternative(self):
        with pytest.raises(ContextPlacementError):
            parse_grammar_source("([a]; [b]) -\\ [c] --> d.")

    def test_rule_lr_prefix(self):
        [p] = parse_grammar_source("ruleLR exp, [+], exp <-> exp.").productions
        assert p.lr_mode

    def test_attributes(self):
        [p] = parse_grammar_source("np(X), verb(V), np(Y) --> sent(V-(X,Y)).").productions
        assert p.lhs.name == "sent"
        assert len(p.lhs.attrs) == 1
        assert p.core[0].attrs[0] == p.lhs.attrs[0].args[1].args[0]

    def test_result_without_nonterminal(self):
        with pytest.raises(GrammarError, match="names no nonterminal"):
            parse_grammar_source("[a] --> {true}.")

    def test_directives(self):
        g = parse_grammar_source(
            ":- modeLR.\n:- eof.\n:- prelude.\n:- start(text).\n:- dedup(on).\n"
            ":- abducible(fact/3).\n:- negation(fact/3).\n[a] --> text."
        )
        assert g.global_lr and g.eof and g.prelude
        assert g.start == "text"
        assert g.dedup is True
        assert g.abducibles == (("fact", 3),)
        assert g.negations == (("fact", 3),)

    def test_unknown_directive(self):
        with pytest.raises(GrammarError, match="unknown directive"):
            parse_grammar_source(":- frobnicate.")

    def test_bad_indicator(self):
        with pytest.raises(GrammarError, match="Name/Arity"):
            parse_grammar_source(":- abducible(fact).")

    def test_mixed_clauses_keep_source_order(self):
        g = parse_grammar_source("[a] --> as.\ntoken(b,N1,N2) <=> as(N1,N2).\n[a], as --> as.")
        kinds = [type(c).__name__ for c in g.clauses]
        assert kinds == ["Production", "Rule", "Production"]
        assert g.raw_rules[0].name == "r2"

    def test_syntax_error_line(self):
        with pytest.raises(GrammarSyntaxError) as info:
            parse_grammar_source("[a] --> as.\n[a] as --> as.")
        assert info.value.line == 2
