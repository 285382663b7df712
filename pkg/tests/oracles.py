"""Independent reference implementations used only by the tests.

Nothing here shares code with the package: tables come from the plain
recursion on the 1..2^n convention with dense rows, and LD equivalence from
a breadth-first search over bounded trees.
"""

from __future__ import annotations

import functools
import itertools
import sys
from collections import deque


@functools.lru_cache(maxsize=None)
def naive_table(n: int) -> tuple:
    """Dense table of A_n in the zero convention, from a*1 = a+1 and a*(b+1) = (a*b)*(a+1)."""
    N = 1 << n
    sys.setrecursionlimit(max(10_000, sys.getrecursionlimit()))
    memo: dict = {}

    def star(a: int, b: int) -> int:  # 1..N convention
        if a == N:
            return b
        if b == 1:
            return a % N + 1 if a < N else 1
        key = (a, b)
        if key not in memo:
            memo[key] = star(star(a, b - 1), a + 1)
        return memo[key]

    for a in range(N, 0, -1):
        for b in range(1, N + 1):
            star(a, b)
    to0 = lambda x: x % N  # noqa: E731
    return tuple(tuple(to0(star(a if a else N, b if b else N)) for b in range(N)) for a in range(N))


def naive_period(n: int, a: int) -> int:
    """Least p with ``a*(b+p) = a*b`` for all b in 1..2^n (indices taken mod 2^n)."""
    row = naive_table(n)[a]
    N = 1 << n
    for p in range(1, N + 1):
        if all(row[(b + p) % N] == row[b % N] for b in range(1, N + 1)):
            return p
    return N


def naive_compose(n: int, a: int, b: int) -> int:
    N = 1 << n
    return (naive_table(n)[a][(b + 1) % N] - 1) % N


# -- tree words as nested tuples --------------------------------------------------

ONE = "1"


def trees(leaves: int) -> list:
    """All binary trees with exactly ``leaves`` leaves."""
    return _trees(leaves)


@functools.lru_cache(maxsize=None)
def _trees(leaves: int) -> list:
    if leaves == 1:
        return [ONE]
    out = []
    for k in range(1, leaves):
        for l in _trees(k):
            for r in _trees(leaves - k):
                out.append((l, r))
    return out


def size(t) -> int:
    return 1 if t == ONE else size(t[0]) + size(t[1])


def to_text(t) -> str:
    return "1" if t == ONE else f"({to_text(t[0])}*{to_text(t[1])})"


def neighbours(t):
    """Everything one LD rewrite (either direction, any position) away."""
    if t == ONE:
        return
    l, r = t
    if r != ONE:
        yield ((l, r[0]), (l, r[1]))
    if l != ONE and r != ONE and l[0] == r[0]:
        yield (l[0], (l[1], r[1]))
    for x in neighbours(l):
        yield (x, r)
    for x in neighbours(r):
        yield (l, x)


def left_prefixes(t):
    """Proper iterated left subterms of t."""
    out = []
    while t != ONE:
        t = t[0]
        out.append(t)
    return out


def component(t, cap: int) -> frozenset:
    """Trees reachable from t by LD rewrites in either direction, never exceeding ``cap`` leaves."""
    seen = {t}
    queue = deque([t])
    while queue:
        x = queue.popleft()
        for u in neighbours(x):
            if u not in seen and size(u) <= cap:
                seen.add(u)
                queue.append(u)
    return frozenset(seen)


def bfs_relation(a, b, cap: int = 16) -> str | None:
    """'equiv', 'less' or 'greater' when evidence exists within the cap, else None."""
    ca, cb = component(a, cap), component(b, cap)
    if ca & cb:
        return "equiv"
    if any(p in ca for t in cb for p in left_prefixes(t)):
        return "less"
    if any(p in cb for t in ca for p in left_prefixes(t)):
        return "greater"
    return None


def random_tree(rng, leaves: int):
    if leaves == 1:
        return ONE
    k = rng.randint(1, leaves - 1)
    return (random_tree(rng, k), random_tree(rng, leaves - k))


def eval_tree(t, n: int) -> int:
    """Value in A_n via the naive dense table."""
    tab = naive_table(n)
    if t == ONE:
        return 1 % (1 << n)
    return tab[eval_tree(t[0], n)][eval_tree(t[1], n)]


def all_pairs(max_leaves: int):
    ts = [t for k in range(1, max_leaves + 1) for t in trees(k)]
    return list(itertools.product(ts, repeat=2))


# -- direct axiom evaluation for embedding candidates ------------------------------

def candidate_violations(length: int, funcs: dict, ops: dict) -> dict:
    """Which axioms have a violated, fully computable instance.

    ``funcs`` maps names (without id) to value lists, ``ops`` maps name pairs
    to names; id and its default products are added here.
    """
    f = {"id": list(range(length)), **{k: list(v) for k, v in funcs.items()}}

    def prod(a, b):
        if (a, b) in ops:
            return ops[(a, b)]
        if a == "id":
            return b
        if b == "id":
            return "id"
        return None

    def at(name, i):
        return f[name][i] if i is not None and i < length else None

    def crit_of(name):
        return next((i for i, v in enumerate(f[name]) if v > i), None)

    names = list(f)
    out = {"monotone": False, "ld": False, "crit": False, "application": False}
    out["monotone"] = any(v[i] >= v[i + 1] for v in f.values() for i in range(length - 1))
    for a, b, c in itertools.product(names, repeat=3):
        bc, ab, ac = prod(b, c), prod(a, b), prod(a, c)
        if None in (bc, ab, ac):
            continue
        l, r = prod(a, bc), prod(ab, ac)
        if l is not None and r is not None and f[l] != f[r]:
            out["ld"] = True
    for a, b in itertools.product(names, repeat=2):
        ab = prod(a, b)
        if ab is None:
            continue
        kb = crit_of(b)
        if b != "id" and kb is not None:
            t = at(a, kb)
            if t is not None and t < length and crit_of(ab) != t:
                out["crit"] = True
        for n in range(length):
            l, r = at(ab, at(a, n)), at(a, at(b, n))
            if l is not None and r is not None and l != r:
                out["application"] = True
    return out
