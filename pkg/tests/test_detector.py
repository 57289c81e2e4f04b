from hypothesis import given, settings, strategies as st

from aggrewrite.detector import (
    DISTINCT,
    LESS_THAN,
    ComparisonFact,
    find_all_candidates,
    find_candidate,
    normalize_comparison,
)
from aggrewrite.syntax import AggregateLiteral, AtomLiteral, Variable

from conftest import corpus_files, load, parse_ok


def rule_of(text):
    (rule,) = parse_ok(text).statements
    return rule


def cmp(text):
    return rule_of(f":- {text}.").body[0]


def test_normalize_plain_distinct():
    assert normalize_comparison(cmp("Y!=Z"), 2) == ComparisonFact("Y", "Z", DISTINCT, 2)


def test_normalize_equal_offsets():
    assert normalize_comparison(cmp("X1+1 != X2+1")) == ComparisonFact("X1", "X2", DISTINCT, -1)
    assert normalize_comparison(cmp("X1-2 < X2-2")).relation == LESS_THAN
    assert normalize_comparison(cmp("3+A < 3+B")) == ComparisonFact("A", "B", LESS_THAN, -1)


def test_normalize_rejects():
    assert normalize_comparison(cmp("X < 3")) is None
    assert normalize_comparison(cmp("X+1 != Y+2")) is None
    assert normalize_comparison(cmp("X*2 != Y*2")) is None
    assert normalize_comparison(cmp("X <= Y")) is None
    assert normalize_comparison(cmp("X = Y")) is None
    assert normalize_comparison(cmp("X != X")) is None


def test_greater_is_flipped():
    assert normalize_comparison(cmp("A > B")) == ComparisonFact("B", "A", LESS_THAN, -1)


def test_hamiltonian_constraint_candidate():
    c = find_candidate(rule_of(":- hc(X,Y), hc(X,Z), Y!=Z."), 3)
    assert c.predicate == ("hc", 2)
    assert c.bound == 2
    assert c.counting_vars == ("Y", "Z")
    assert c.counting_position == 1
    assert c.context == (Variable("X"),)
    assert c.residual == ()
    assert c.head is None
    assert c.rule_index == 3


def test_second_hamiltonian_constraint():
    c = find_candidate(rule_of(":- hc(X,Y), hc(Z,Y), X!=Z."))
    assert c.counting_position == 0 and c.counting_vars == ("X", "Z")
    assert c.context == (Variable("Y"),)


def test_recursive_rule_not_candidate():
    assert find_candidate(rule_of("reach(X,Y) :- hc(X,Z), reach(Z,Y).")) is None


def test_chain_of_three():
    c = find_candidate(rule_of(":- p(X1), p(X2), p(X3), X1<X2, X2<X3."))
    assert c.bound == 3 and c.context == ()
    assert c.counting_literals == (0, 1, 2, 3, 4)


def test_chain_with_redundant_fact_consumed():
    c = find_candidate(rule_of(":- p(X1), p(X2), p(X3), X1<X2, X2<X3, X1<X3."))
    assert c.bound == 3 and c.residual == ()


def test_chain_gap_rejected():
    # X1<X3 and X2<X3 do not order X1 and X2
    assert find_candidate(rule_of(":- p(X1), p(X2), p(X3), X1<X3, X2<X3.")) is None


def test_mixed_relations_rejected():
    assert find_candidate(rule_of(":- p(X1), p(X2), p(X3), X1<X2, X2!=X3, X1!=X3.")) is None


def test_residual_and_head_kept():
    c = find_candidate(rule_of("busy(D) :- task(T1,D), task(T2,D), T1 != T2, day(D)."))
    assert c.residual == (3,)
    assert c.head is not None and c.head.predicate == "busy"


def test_counting_variable_in_head_rejected():
    assert find_candidate(rule_of("pair(X1) :- p(X1), p(X2), X1 != X2.")) is None


def test_counting_variable_in_context_rejected():
    assert find_candidate(rule_of(":- p(X1,X2), p(X2,X1), X1 != X2.")) is None


def test_aggregate_in_residual_mentioning_counting_var_rejected():
    assert find_candidate(rule_of(":- p(X1), p(X2), X1 != X2, 1 <= #count{ Y : q(X1,Y) }.")) is None


def test_hamiltonian_has_two_candidates():
    cands = find_all_candidates(load("hamiltonian.lp"))
    assert [c.rule_index for c in cands] == [3, 4]


def test_no_comparisons_no_candidates():
    assert find_all_candidates(parse_ok("p(1). q(X) :- p(X).")) == []


def test_negative_fixtures():
    for path in corpus_files("neg_"):
        assert find_all_candidates(load(path.name)) == [], path.name


def test_tiebreak_larger_set_wins():
    c = find_candidate(load("eq15_mixed_tiebreak.lp").statements[2])
    assert c.predicate == ("p", 1) and c.bound == 3


def test_tiebreak_earlier_comparison_on_equal_size():
    c = find_candidate(rule_of(":- s(Y1), s(Y2), p(X1), p(X2), X1 != X2, Y1 != Y2."))
    assert c.predicate == ("p", 1)


def test_counting_vars_follow_body_order():
    c = find_candidate(rule_of(":- p(B), p(A), A != B."))
    assert c.counting_vars == ("B", "A")


def test_determinism_over_corpus():
    for path in corpus_files():
        program = load(path.name)
        assert find_all_candidates(program) == find_all_candidates(program)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 5), st.sampled_from(["!=", "<", ">"]), st.randoms(use_true_random=False))
def test_generated_rules_detected_and_literals_positive(b, op, rnd):
    names = [f"X{i}" for i in range(b)]
    literals = [f"f(Y,{n})" for n in names]
    if op == "!=":
        comps = [f"{a} != {c}" for i, a in enumerate(names) for c in names[i + 1:]]
    else:
        comps = [f"{a} {op} {c}" for a, c in zip(names, names[1:])]
    parts = literals + comps + ["g(Y)"]
    rnd.shuffle(parts)
    rule = rule_of(":- " + ", ".join(parts) + ".")
    c = find_candidate(rule)
    assert c is not None and c.bound == b
    for index in c.counting_literals:
        lit = rule.body[index]
        assert not isinstance(lit, AggregateLiteral)
        assert not (isinstance(lit, AtomLiteral) and lit.negated)


@settings(max_examples=100, deadline=None)
@given(st.integers(3, 5), st.data())
def test_dropping_a_clique_edge_kills_candidate(b, data):
    names = [f"X{i}" for i in range(b)]
    comps = [f"{a} != {c}" for i, a in enumerate(names) for c in names[i + 1:]]
    comps.pop(data.draw(st.integers(0, len(comps) - 1)))
    rule = rule_of(":- " + ", ".join([f"p({n})" for n in names] + comps) + ".")
    assert find_candidate(rule) is None
