import random

import pytest

from ldalg.errors import DomainError
from ldalg.limit_algebra import eval_level
from ldalg.term_algebra import (
    EXPAND, ONE, RIGHT, Derivation, app, full_word, herringbone, ld_redexes, ld_step, left_product, parse,
)
from ldalg.word_problem import (
    Verdict, compare, compose_parts, compositions_connected, lemma27_derivation, left_subterm_witness,
    normalize_composition, spine_compose, spine_decompose, track_left_subterm,
)
from oracles import all_pairs, bfs_relation, to_text

P = parse


def random_term(rng, leaves):
    if leaves == 1:
        return ONE
    k = rng.randint(1, leaves - 1)
    return app(random_term(rng, k), random_term(rng, leaves - k))


def test_left_subterm_witness():
    assert left_subterm_witness(ONE, P("1*1")) == [ONE]
    a = P("1*1")
    assert left_subterm_witness(a, a) is None
    assert left_subterm_witness(a, P("((1*1)*1)*1")) == [ONE, ONE]


@pytest.mark.parametrize("a,k", [("1", 0), ("1*1", 1), ("2", 2), ("1*(1*1)", 3), ("(1*1)*(1*1)", 2)])
def test_lemma27_replays(a, k):
    d = lemma27_derivation(P(a), k)
    assert d.start is app(P(a), herringbone(k))
    assert d.replay() is herringbone(k + 1)


def test_lemma27_base_is_empty():
    assert len(lemma27_derivation(ONE, 0)) == 0


def test_lemma27_depth_guard():
    with pytest.raises(DomainError):
        lemma27_derivation(herringbone(3), 2)


def test_track_examples():
    b = P("1*1")
    a2, d = track_left_subterm(ONE, b, Derivation.empty(b))
    assert a2 is ONE and len(d) == 0
    b = P("1*(1*(1*1))")
    step = ((RIGHT,), EXPAND)
    a2, d = track_left_subterm(ONE, b, Derivation(b, (step,), ld_step(b, *step)))
    assert a2 is ONE


@pytest.mark.parametrize("seed", range(4))
def test_track_random(seed):
    rng = random.Random(seed)
    for _ in range(25):
        a = random_term(rng, rng.randint(1, 3))
        b = left_product(a, [random_term(rng, rng.randint(1, 3)) for _ in range(rng.randint(1, 2))])
        steps, t = [], b
        for _ in range(rng.randint(0, 4)):
            rs = ld_redexes(t)
            if not rs:
                break
            q = rng.choice(rs)
            steps.append((q, EXPAND))
            t = ld_step(t, q, EXPAND)
        a2, d = track_left_subterm(a, b, Derivation(b, tuple(steps), t))
        assert d.replay() is a2
        assert left_subterm_witness(a2, t) is not None


def test_compare_examples():
    assert str(compare(ONE, P("1*1"))) == "less"
    assert compare(P("1*(1*1)"), P("(1*1)*(1*1)")).verdict is Verdict.EQUIV
    assert compare(P("3"), P("1*2")).verdict is Verdict.LESS
    assert compare(P("1*1"), ONE).verdict is Verdict.GREATER


def test_compare_agrees_with_bfs_oracle():
    for a, b in all_pairs(4):
        r = compare(P(to_text(a)), P(to_text(b)))
        assert r.verdict.value == bfs_relation(a, b), (to_text(a), to_text(b))


def test_compare_witness_is_checked_by_oracle():
    pairs = [("1", "1*1"), ("3", "1*2"), ("1*1", "1*(1*1)")]
    for a, b in pairs:
        r = compare(P(a), P(b))
        assert r.verdict is Verdict.LESS
        full = left_product(P(a), list(r.witness))
        assert bfs_relation(_tree(full), _tree(P(b)), cap=max(full.leaves, 8) + 2) == "equiv"


def _tree(t):
    return "1" if t.left is None else (_tree(t.left), _tree(t.right))


def test_compare_out_of_fuel():
    r = compare(P("1*(1*1)"), P("(1*1)*1"), fuel=1)
    assert r.verdict is Verdict.OUT_OF_FUEL and r.stage
    assert str(r).startswith("out_of_fuel ")


def test_compare_strategies_agree():
    for a, b in [("1*1", "1*(1*1)"), ("2", "1*(1*1)")]:
        s = compare(P(a), P(b), strategy="saturate")
        c = compare(P(a), P(b), strategy="confluence")
        assert s.method == "saturate" and s.verdict == c.verdict
    with pytest.raises(DomainError):
        compare(ONE, ONE, strategy="guess")


def test_pipeline_derivations_replay():
    r = compare(P("1*(1*1)"), P("((1*1)*1)*1"))
    assert r.derivations
    ends = {d.replay() for d in r.derivations}
    assert len(ends) == 1 and all(d.expand_only for d in r.derivations)


def test_monotone_under_left_multiplication():
    for a, b in [("1", "1*1"), ("3", "1*2")]:
        for c in ("1", "1*1"):
            r = compare(app(P(c), P(a)), app(P(c), P(b)))
            assert r.verdict is Verdict.LESS


def test_normalize_examples():
    assert normalize_composition(ONE) == [ONE]
    assert normalize_composition(P("1 o 1")) == [ONE, ONE]
    assert normalize_composition(P("(1 o 1)*1")) == [P("1*(1*1)")]
    with pytest.raises(DomainError):
        normalize_composition(P("0 o 1"))


@pytest.mark.parametrize("word", ["1 o 1", "(1 o 1)*1", "(1 o (1*1))*(1 o 1)", "((1 o 1) o 1)*(1*1)",
                                  "1*(1 o 1)"])
def test_normalize_preserves_values(word):
    p = P(word)
    q = compose_parts(normalize_composition(p))
    for n in range(0, 11):
        assert eval_level(p, n) == eval_level(q, n)


def test_composition_forms_connected():
    a, b = P("1*1"), ONE
    assert compositions_connected([a, b], [app(a, b), a]) is True
    assert compositions_connected([ONE], [ONE, ONE]) is False
    assert compositions_connected([ONE, ONE], [P("1*1"), ONE], max_leaves=3) is True


def test_spine_round_trip():
    assert spine_decompose(ONE) == []
    assert spine_decompose(P("1*(1*1)")) == [ONE, ONE]
    assert spine_decompose(P("(1*1)*1")) == [P("1*1")]
    rng = random.Random(1)
    for _ in range(100):
        t = random_term(rng, rng.randint(1, 8))
        assert spine_compose(spine_decompose(t)) is t


def test_equiv_implies_level_equal():
    for a, b in all_pairs(3):
        ta, tb = P(to_text(a)), P(to_text(b))
        if compare(ta, tb).verdict is Verdict.EQUIV:
            assert all(eval_level(ta, n) == eval_level(tb, n) for n in range(13))


def test_full_word_equivalent_to_herringbone():
    assert compare(full_word(2), herringbone(2)).verdict is Verdict.EQUIV
    assert compare(full_word(3), herringbone(3)).verdict is Verdict.EQUIV
