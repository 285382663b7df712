"""Comparison of LD-words up to equivalence and the left-subterm order.

``compare`` follows the constructive route: both words are absorbed into a
herringbone, the two mixed derivations are turned into Expand-only ones that
end at a common word, and the two words are tracked as left subterms of that
word.  Every verdict is backed by replayable Expand-only derivations.
"""

from __future__ import annotations

import enum
import sys
from collections import deque
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DomainError, FuelError
from .term_algebra import (
    CONTRACT, DEFAULT_FUEL, EXPAND, LEFT, ONE, RIGHT, Budget, Derivation, Term,
    _absorb, _lift_step, _partial, _require_a, _saturate, app, comp, herringbone,
    ld_redexes, ld_step, render, replay_steps,
)


@contextmanager
def _deep_recursion(limit: int = 200_000):
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, limit))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


# -- left subterms -------------------------------------------------------------

def left_subterm_witness(a: Term, b: Term) -> list[Term] | None:
    """The ``c_1, ..., c_k`` (k > 0) with ``b = a c_1 ... c_k`` literally, if any."""
    rest = []
    t = b
    while t.kind == "*" and t.leaves > a.leaves:
        rest.append(t.right)
        t = t.left
        if t is a:
            return rest[::-1]
    return None


def spine(t: Term) -> list[Term]:
    """``t`` followed by its successive left factors, down to a leaf."""
    out = [t]
    while t.kind == "*":
        t = t.left
        out.append(t)
    return out


# -- absorption into herringbones -----------------------------------------------

def _herringbone_absorb(w: Term, k: int, pre: tuple, out: list, bud: Budget) -> None:
    # w u_k  <->  u_{k+1}, mixed directions, for depth(w) <= k
    if w.left is None:
        return
    a, b = w.left, w.right
    inner: list = []
    _herringbone_absorb(a, k - 1, (), inner, bud)
    # u_k = 1 u_{k-1} becomes a u_{k-1} inside the right factor
    flip = {EXPAND: CONTRACT, CONTRACT: EXPAND}
    bud.spend(len(inner))
    out.extend((pre + (RIGHT,) + p, flip[d]) for p, d in reversed(inner))
    # (ab)(a u_{k-1}) <- a(b u_{k-1})
    bud.spend()
    out.append((pre, CONTRACT))
    _herringbone_absorb(b, k - 1, pre + (RIGHT,), out, bud)
    _herringbone_absorb(a, k, pre, out, bud)


def lemma27_derivation(a: Term, k: int, fuel=DEFAULT_FUEL) -> Derivation:
    """Mixed-direction derivation from ``a u_k`` to ``u_{k+1}`` when depth(a) <= k."""
    _require_a(a, "a")
    if a.depth > k:
        raise DomainError(f"depth {a.depth} exceeds the bound k = {k}")
    bud = fuel if isinstance(fuel, Budget) else Budget(fuel, "absorption")
    out: list = []
    _herringbone_absorb(a, k, (), out, bud)
    return Derivation(app(a, herringbone(k)), tuple(out), herringbone(k + 1))


# -- left-subterm tracking -----------------------------------------------------

def _track(level: int, steps: Iterable, on_inner) -> int:
    """Follow the left subterm at spine depth ``level`` through Expand steps.

    ``on_inner(pos)`` receives each step that falls inside the tracked
    subterm, with its position relative to that subterm.
    """
    for pos, d in steps:
        if d != EXPAND:
            raise DomainError("left-subterm tracking needs Expand steps only")
        e = 0
        while e < len(pos) and pos[e] == LEFT:
            e += 1
        if e >= level:
            on_inner(pos[level:])
        elif e == len(pos):
            # a step at a spine node above: x(yz) -> xy(xz) pushes x one level down
            level += 1
    return level


def track_left_subterm(a: Term, b: Term, d: Derivation) -> tuple[Term, Derivation]:
    """Given ``a <_L b`` syntactically and ``d: b -> b'``, return ``a'`` and ``a -> a'``.

    ``a'`` is a left subterm of ``b'``.
    """
    if d.start is not b:
        raise DomainError("derivation does not start at b")
    if not d.expand_only:
        raise DomainError("left-subterm tracking needs Expand steps only")
    cs = left_subterm_witness(a, b)
    if cs is None:
        raise DomainError(f"{render(a)} is not a left subterm of {render(b)}")
    inner: list = []
    level = _track(len(cs), d.steps, lambda p: inner.append((p, EXPAND)))
    a2 = spine(d.end)[level]
    return a2, Derivation(a, tuple(inner), a2)


# -- turning mixed chains into common expansions -------------------------------

def _peak(p: tuple, q: tuple) -> tuple[list, list]:
    """Close two Expand steps at ``p`` and ``q`` out of the same word."""
    if p == q:
        return [], []
    if q[:len(p)] == p:
        r = q[len(p):]
        if r[0] == LEFT:
            rest = r[1:]
            return ([(p + (LEFT, LEFT) + rest, EXPAND), (p + (RIGHT, LEFT) + rest, EXPAND)],
                    [(p, EXPAND)])
        if len(r) == 1:
            # x(y(z1 z2)): the only overlap of two redexes
            return ([(p + (RIGHT,), EXPAND), (p, EXPAND)],
                    [(p, EXPAND), (p + (LEFT,), EXPAND), (p + (RIGHT,), EXPAND)])
        if r[1] == LEFT:
            return [(p + (LEFT, RIGHT) + r[2:], EXPAND)], [(p, EXPAND)]
        return [(p + (RIGHT, RIGHT) + r[2:], EXPAND)], [(p, EXPAND)]
    if p[:len(q)] == q:
        r2, r1 = _peak(q, p)
        return r1, r2
    return [(q, EXPAND)], [(p, EXPAND)]


def _tile(x: Term, d1: list, d2: list, bud: Budget) -> tuple[list, list]:
    """For Expand-only ``d1: x -> y`` and ``d2: x -> z``, find ``y -> w <- z``."""
    if not d1:
        return list(d2), []
    if not d2:
        return [], list(d1)
    if len(d1) == 1 and len(d2) == 1:
        r1, r2 = _peak(d1[0][0], d2[0][0])
        bud.spend(len(r1) + len(r2))
        return r1, r2
    if len(d1) > 1:
        h = len(d1) // 2
        head, tail = d1[:h], d1[h:]
        e1, e2 = _tile(x, head, d2, bud)
        mid = replay_steps(x, head)
        f1, f2 = _tile(mid, tail, e1, bud)
        return f1, e2 + f2
    f2, f1 = _tile(x, d2, d1, bud)
    return f1, f2


def _valley(start: Term, chain: Sequence, bud: Budget) -> tuple[list, list, Term]:
    """Turn a mixed chain ``start <-> end`` into ``start -> w <- end``."""
    left: list = []
    right: list = []
    w = start
    cur = start
    for pos, d in chain:
        nxt = ld_step(cur, pos, d)
        if d == CONTRACT:
            right.insert(0, (pos, EXPAND))
        else:
            f1, f2 = _tile(cur, [(pos, EXPAND)], right, bud)
            left.extend(f2)
            right = f1
            w = replay_steps(w, f2)
        cur = nxt
    return left, right, w


def _saturating_chain(chain_start: Term, chain: Sequence, rounds: int, bud: Budget):
    """For a mixed chain x_0 <-> x_m, an Expand-only derivation x_m -> d^rounds x_0."""
    steps: list = []
    target = chain_start
    cur = chain_start
    i = 0
    for pos, d in chain:
        nxt = ld_step(cur, pos, d)
        if d == EXPAND:
            # x_{i+1} -> d x_i, then lift x_i -> d^i x_0
            new: list = []
            q = pos
            _absorb(cur, q, (), new, bud)
            t = cur
            for p, _ in steps:
                _lift_step(t, p, (), new, bud)
                t = ld_step(t, p, EXPAND)
        else:
            new = [(pos, EXPAND)] + steps
            _saturate(target, (), new, bud)
        steps = new
        target = _partial(target)
        cur = nxt
        i += 1
    while i < rounds:
        _saturate(target, (), steps, bud)
        target = _partial(target)
        i += 1
    return steps, target


# -- comparison ----------------------------------------------------------------

class Verdict(enum.Enum):
    EQUIV = "equiv"
    LESS = "less"
    GREATER = "greater"
    OUT_OF_FUEL = "out_of_fuel"


@dataclass(frozen=True)
class CompareResult:
    """Outcome of ``compare``.

    For LESS, ``witness`` holds words ``c_1, ..., c_k`` with
    ``b == a c_1 ... c_k`` modulo LD (GREATER: with a and b swapped).
    ``derivations`` are Expand-only derivations from ``a u_k`` and ``b u_k``
    to a common word when the pipeline ran.
    """

    verdict: Verdict
    stage: str | None = None
    method: str = ""
    witness: tuple = ()
    derivations: tuple = field(default=(), repr=False)

    def __str__(self):
        if self.verdict is Verdict.OUT_OF_FUEL:
            return f"out_of_fuel {self.stage}"
        return self.verdict.value


def _pipeline(a: Term, b: Term, k: int, fuel: int | None, strategy: str) -> CompareResult:
    uk = herringbone(k)
    top = herringbone(k + 1)
    bud = Budget(fuel, "absorption")
    da = lemma27_derivation(a, k, bud)
    db = lemma27_derivation(b, k, bud)
    ua, ub = app(a, uk), app(b, uk)

    if strategy == "confluence":
        bud = Budget(fuel, "confluence")
        chain = list(da.steps) + list(db.reversed().steps)
        ea, eb, w = _valley(ua, chain, bud)
    else:
        bud = Budget(fuel, "saturate")
        m = max(len(da), len(db))
        ea, w = _saturating_chain(top, da.reversed().steps, m, bud)
        eb, w2 = _saturating_chain(top, db.reversed().steps, m, bud)
        assert w is w2

    bud = Budget(fuel, "track")
    bud.spend(len(ea) + len(eb))
    la = _track(1, ea, lambda p: None)
    lb = _track(1, eb, lambda p: None)
    sp = spine(w)
    evidence = (Derivation(ua, tuple(ea), w), Derivation(ub, tuple(eb), w))
    if la == lb:
        return CompareResult(Verdict.EQUIV, method=strategy, derivations=evidence)
    if la > lb:
        cs = left_subterm_witness(sp[la], sp[lb])
        return CompareResult(Verdict.LESS, method=strategy, witness=tuple(cs), derivations=evidence)
    cs = left_subterm_witness(sp[lb], sp[la])
    return CompareResult(Verdict.GREATER, method=strategy, witness=tuple(cs), derivations=evidence)


STRATEGIES = ("auto", "confluence", "saturate")


def compare(a: Term, b: Term, fuel: int | None = DEFAULT_FUEL, strategy: str = "auto") -> CompareResult:
    """Decide which of ``a == b``, ``a <_L b``, ``b <_L a`` holds modulo LD.

    ``strategy`` selects how the two absorption derivations are brought to a
    common word: ``saturate`` uses iterated saturation ``d^m u_{k+1}``,
    ``confluence`` closes local peaks one at a time, and ``auto`` tries
    ``confluence`` first.  Running out of fuel yields OUT_OF_FUEL, never a
    guess.
    """
    _require_a(a, "a")
    _require_a(b, "b")
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown strategy {strategy!r}")
    if a is b:
        return CompareResult(Verdict.EQUIV, method="syntactic")
    cs = left_subterm_witness(a, b)
    if cs is not None:
        return CompareResult(Verdict.LESS, method="syntactic", witness=tuple(cs))
    cs = left_subterm_witness(b, a)
    if cs is not None:
        return CompareResult(Verdict.GREATER, method="syntactic", witness=tuple(cs))
    k = max(a.depth, b.depth)
    order = ("confluence", "saturate") if strategy == "auto" else (strategy,)
    stage = None
    with _deep_recursion():
        for s in order:
            try:
                return _pipeline(a, b, k, fuel, s)
            except FuelError as exc:
                stage = exc.stage
    return CompareResult(Verdict.OUT_OF_FUEL, stage=stage)


# -- composition forms ---------------------------------------------------------

def _no_zero(p: Term) -> None:
    stack = [p]
    while stack:
        t = stack.pop()
        if t.kind == "0":
            raise DomainError("composition forms are defined for words without 0")
        if t.left is not None:
            stack.extend((t.left, t.right))


def spine_apply(parts: Sequence[Term], x: Term) -> Term:
    """``a_1(a_2(...(a_n(x))...))``."""
    for p in reversed(parts):
        x = app(p, x)
    return x


def normalize_composition(p: Term) -> list[Term]:
    """Write ``p`` as ``a_1 o ... o a_n`` with every part an LD-word."""
    _no_zero(p)

    def go(t: Term) -> list[Term]:
        if t.left is None:
            return [t]
        q, r = go(t.left), go(t.right)
        if t.kind == "o":
            return q + r
        return [spine_apply(q, bj) for bj in r]

    with _deep_recursion():
        return go(p)


def compose_parts(parts: Sequence[Term]) -> Term:
    """The word ``a_1 o ... o a_n`` (left-associated)."""
    if not parts:
        raise DomainError("a composition needs at least one part")
    t = parts[0]
    for x in parts[1:]:
        t = comp(t, x)
    return t


def spine_decompose(a: Term) -> list[Term]:
    """The unique ``a_1, ..., a_n`` with ``a = a_1(a_2(...(a_n(1))...))``."""
    _require_a(a, "a")
    out = []
    while a.left is not None:
        out.append(a.left)
        a = a.right
    return out


def spine_compose(parts: Sequence[Term]) -> Term:
    return spine_apply(parts, ONE)


def composition_moves(parts: tuple, max_leaves: int) -> Iterable[tuple]:
    """Neighbours of a composition form under the two-operation laws.

    Moves: ``a o b <-> ab o a`` on adjacent parts, and single LD steps inside
    one part.  Forms whose total size exceeds ``max_leaves`` are skipped.
    """
    n = len(parts)
    size = sum(p.leaves for p in parts)
    for i in range(n - 1):
        x, y = parts[i], parts[i + 1]
        if size + x.leaves <= max_leaves:
            yield parts[:i] + (app(x, y), x) + parts[i + 2:]
        if x.kind == "*" and x.left is y:
            yield parts[:i] + (y, x.right) + parts[i + 2:]
    for i, x in enumerate(parts):
        for pos in ld_redexes(x, EXPAND):
            nx = ld_step(x, pos, EXPAND)
            if size - x.leaves + nx.leaves <= max_leaves:
                yield parts[:i] + (nx,) + parts[i + 1:]
        for pos in ld_redexes(x, CONTRACT):
            yield parts[:i] + (ld_step(x, pos, CONTRACT),) + parts[i + 1:]


def compositions_connected(f1: Sequence[Term], f2: Sequence[Term], max_leaves: int = 12,
                           max_states: int = 200_000) -> bool | None:
    """Breadth-first search between two composition forms.

    Returns True if connected, False if the bounded component was exhausted
    without meeting, None if ``max_states`` ran out.
    """
    f1, f2 = tuple(f1), tuple(f2)
    if f1 == f2:
        return True
    seen = {f1}
    queue = deque([f1])
    while queue:
        cur = queue.popleft()
        for nb in composition_moves(cur, max_leaves):
            if nb in seen:
                continue
            if nb == f2:
                return True
            seen.add(nb)
            if len(seen) > max_states:
                return None
            queue.append(nb)
    return False
