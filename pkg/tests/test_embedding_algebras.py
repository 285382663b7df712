import itertools
import random

import pytest
from hypothesis import given, strategies as st

from ldalg.embedding_algebras import (
    ID, Bounds, Candidate, FnPrefix, FormalComposition, Refuted, Unchecked, Verified, build_two_sorted,
    check_candidate, check_two_sorted, closure_candidate, critical_sequence, crit, load_sample_candidate,
    sample_candidate_path, search_sample_candidate, trivial_candidate_path,
)
from ldalg.errors import DomainError, FormatError
from ldalg.laver_tables import build_table
from ldalg.limit_algebra import eval_level
from ldalg.term_algebra import parse
from ldalg.word_problem import compose_parts, normalize_composition
from oracles import candidate_violations

DATA = sample_candidate_path().parent


def fn(name, *vals):
    return FnPrefix(name, tuple(vals))


def cand(text):
    return Candidate.from_text(text)


SUCC = "EMBEDALG v1 prefix=5\nfun f 1 2 3 4 5\nop f f f\n"


def test_crit_examples():
    assert crit(fn("s", 1, 2, 3, 4)) == 0
    assert crit(fn("g", 0, 1, 2, 5, 6)) == 3
    with pytest.raises(DomainError, match="no critical point"):
        crit(fn("i", 0, 1, 2, 3))


def test_critical_sequences():
    f = fn("f", 0, 1, 4, 5, 7, 8, 9, 10)
    assert critical_sequence(f, 3).terms == (2, 4, 7)
    short = critical_sequence(f, 6)
    assert short.exhausted and short.terms == (2, 4, 7, 10)
    assert str(short).endswith("...")
    with pytest.raises(DomainError):
        critical_sequence(fn("i", 0, 1, 2), 2)
    c = Candidate(8, {"f": f, "g": fn("g", 0, 2, 3, 4, 5, 6, 7, 8)}, {})
    seq = critical_sequence(FormalComposition(("f", "g")), 3, c)
    assert seq.terms[0] == min(crit(c["f"]), crit(c["g"])) == 1
    assert seq.terms[1] == c["f"](c["g"](1))
    with pytest.raises(DomainError):
        critical_sequence(FormalComposition(()), 2, c)


def test_file_round_trip():
    c = load_sample_candidate()
    assert Candidate.from_text(c.to_text()).to_text() == c.to_text() == sample_candidate_path().read_text()
    assert c.generator == "j"


@pytest.mark.parametrize("text", [
    "",
    "EMBEDALG v2 prefix=3\n",
    "EMBEDALG v1 prefix=3\nfun f 1 2\n",
    "EMBEDALG v1 prefix=3\nfun f 1 2 3\nop f g f\n",
    "EMBEDALG v1 prefix=3\nfun id 0 1 2\n",
    "EMBEDALG v1 prefix=3\nfun 9f 1 2 3\n",
    "EMBEDALG v1 prefix=3\nfun f 1 2 3\nfun f 1 2 3\n",
    "EMBEDALG v1 prefix=3\nfun f 1 2 x\n",
    "EMBEDALG v1 prefix=3\nfun f 1 2 3\ngen g\n",
    "EMBEDALG v1 prefix=3\nfun f 1 2 3\nop f f\n",
    "EMBEDALG v1 prefix=3\nwhat\n",
])
def test_format_errors(text):
    with pytest.raises(FormatError):
        Candidate.from_text(text)


def test_unequal_lengths_rejected():
    with pytest.raises(FormatError):
        Candidate(3, {"f": fn("f", 1, 2)}, {})


def test_trivial_candidate():
    c = Candidate.load(trivial_candidate_path())
    rep = check_candidate(c)
    assert all(isinstance(s, Verified) for s in rep.statuses.values())
    assert rep.statuses["crit"] == Verified(0)


def test_successor_refuted_at_crit():
    rep = check_candidate(cand(SUCC))
    assert rep.statuses["crit"] == Refuted(("f", "f", 0), rep.statuses["crit"].detail)
    assert isinstance(rep.statuses["monotone"], Verified)
    assert check_candidate(Candidate.load(DATA / "successor_candidate.txt")).statuses["crit"].instance == ("f", "f", 0)


def test_nonmonotone_result_refuted():
    c = cand("EMBEDALG v1 prefix=4\nfun f 0 2 3 4\nfun g 0 3 2 5\nop f f g\n")
    rep = check_candidate(c)
    assert isinstance(rep.statuses["monotone"], Refuted)
    assert rep.statuses["monotone"].instance == ("g", 1)


def test_missing_entries_unchecked():
    c = cand("EMBEDALG v1 prefix=4\nfun f 0 2 3 4\n")
    rep = check_candidate(c)
    assert rep.statuses["crit"] == Verified(1)          # only id*f = f is available
    assert ("crit", ("f", "f"), "missing op entry f*f") in rep.unchecked
    assert isinstance(check_candidate(cand("EMBEDALG v1 prefix=2\nfun f 1 2\n"),
                                      coherence=False).statuses["ld"], Verified)
    bare = check_candidate(Candidate(2, {"f": fn("f", 1, 2)}, {("f", "f"): "f"}))
    assert isinstance(bare.statuses["crit"], Refuted)
    only_missing = check_candidate(Candidate(2, {"f": fn("f", 0, 2), "g": fn("g", 1, 2)}, {("f", "g"): "g"}))
    assert only_missing.statuses["crit"] == Verified(3)


@given(st.lists(st.integers(0, 5), min_size=1, max_size=8))
def test_monotone_implies_moves_up(steps):
    vals, v = [], -1
    for s in steps:
        v += s + 1
        vals.append(v)
    f = FnPrefix("f", tuple(vals))
    assert f.strictly_increasing
    assert all(f(i) >= i for i in range(f.length))


def _corrupt(rng, c: Candidate):
    funcs = {k: list(v.values) for k, v in c.functions.items() if k != ID}
    ops = dict(c.ops)
    names = list(funcs) + [ID]
    for _ in range(rng.randint(1, 3)):
        kind = rng.randrange(4)
        if kind == 0 and funcs:
            k = rng.choice(list(funcs))
            i = rng.randrange(c.length)
            funcs[k][i] = max(0, funcs[k][i] + rng.choice([-2, -1, 1, 2]))
        elif kind == 1 and ops:
            key = rng.choice(list(ops))
            ops[key] = rng.choice(names)
        elif kind == 2:
            ops[(rng.choice(names), rng.choice(names))] = rng.choice(names)
        elif ops:
            ops.pop(rng.choice(list(ops)))
    return funcs, ops


def fuzz_candidates(count=1000, seed=0):
    rng = random.Random(seed)
    bases = [load_sample_candidate(), cand(SUCC), Candidate.load(trivial_candidate_path()),
             closure_candidate(FnPrefix("j", (0, 1, 3, 4, 6, 7, 8, 9)))]
    for _ in range(count):
        base = rng.choice(bases)
        funcs, ops = _corrupt(rng, base)
        c = Candidate(base.length, {k: FnPrefix(k, tuple(v)) for k, v in funcs.items()}, ops)
        yield c, candidate_violations(base.length, funcs, ops)


def test_fuzz_never_false_verified():
    for c, truth in fuzz_candidates(300, seed=11):
        rep = check_candidate(c)
        for axiom, violated in truth.items():
            st_ = rep.statuses[axiom]
            if violated:
                assert isinstance(st_, Refuted), (axiom, c.to_text())
            else:
                assert not isinstance(st_, Refuted), (axiom, c.to_text())


def test_closure_candidates_satisfy_crit_laws():
    for vals in itertools.combinations(range(10), 7):
        c = closure_candidate(FnPrefix("j", vals), max_elements=4)
        if not check_candidate(c).ok:
            continue
        for (a, b), x in c.ops.items():
            kb = next((i for i, v in enumerate(c[b].values) if v > i), None)
            ka = c[a](kb) if kb is not None else None
            if ka is not None and ka < c.length:
                assert crit(c[x]) == ka
        ts = build_two_sorted(c, max_parts=2)
        for x in ts.elements:
            if x:
                k = ts.crit(x)
                if k is not None:
                    assert all(ts.apply(x, g) == g for g in range(k))


def test_build_two_sorted_basics():
    c = load_sample_candidate()
    ts = build_two_sorted(c)
    g = ts.ordinals[0]
    assert ts.apply(("j", "j"), g) == c["j"](c["j"](g))
    for (a, b), x in c.ops.items():
        if a != ID and b != ID:
            assert ts.equal((a, b), (x, a)) is True
    assert ts.equal(("j",), ("j", "j")) is False
    with pytest.raises(DomainError):
        build_two_sorted(cand(SUCC))


def test_bfs_equality_is_sound():
    c = load_sample_candidate()
    ts = build_two_sorted(c)
    for x, y in itertools.combinations([e for e in ts.elements if len(e) == 3], 2):
        if ts.equal(x, y):
            for g in range(c.length):
                u, v = ts.apply(x, g), ts.apply(y, g)
                if u is not None and v is not None:
                    assert u == v


def test_bfs_budget_gives_unknown():
    c = load_sample_candidate()
    ts = build_two_sorted(c, max_bfs=1)
    results = {ts.equal(x, y) for x, y in itertools.combinations([e for e in ts.elements if len(e) == 3], 2)}
    assert None in results


def test_composition_matches_table():
    # 1 o 1 in the word algebra, normalised and evaluated, against the table's composition
    p = parse("1 o 1")
    q = compose_parts(normalize_composition(p))
    assert eval_level(q, 2) == build_table(2).compose(1, 1) == 3


def test_two_sorted_trivial_vacuous():
    rep = check_two_sorted(build_two_sorted(Candidate.load(trivial_candidate_path())))
    assert rep.ok
    assert all(isinstance(s, (Verified, Unchecked)) for s in rep.statuses.values())


def test_below_crit_fault_is_refuted():
    c = cand("EMBEDALG v1 prefix=8\nfun a 0 1 2 3 4 6 7 8\nfun b 0 1 3 4 5 6 7 8\n"
             "fun c 0 1 4 5 6 7 8 9\nop a b c\n")
    rep = check_two_sorted(build_two_sorted(c))
    st_ = rep.statuses["below_crit_i"]
    assert isinstance(st_, Refuted) and st_.instance == (("a",), ("b",), 2)


def test_sample_kappa_sequence():
    c = load_sample_candidate()
    ts = build_two_sorted(c)
    k0, k1, k2 = critical_sequence(c["j"], 3).terms
    depth = ts.depths()
    for name, d in depth.items():
        if d <= 1:
            assert c[name](k1) == k2
    assert isinstance(check_two_sorted(ts).statuses["kappa_sequence"], Verified)


def test_sample_two_sorted_never_refuted():
    rep = check_two_sorted(build_two_sorted(load_sample_candidate()), Bounds(parts=3, context=3))
    assert rep.ok, rep.refuted
    assert list(rep.statuses)[:3] == ["ld", "monotone", "crit_moves"]


def test_search_reproduces_shipped_sample():
    assert search_sample_candidate().to_text() == sample_candidate_path().read_text()
