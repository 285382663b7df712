"""Level-wise evaluation of words in the finite tables, signatures and probes.

A word ``t`` has a value ``[t]_n`` in every ``P_n``; those values are coherent
under reduction mod ``2^n``.  Whether every word eventually leaves 0 is an
open question, so signatures and probes answer with ``Known`` or
``Undecided`` and never claim that no level exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError
from .laver_tables import TableCache, default_cache
from .term_algebra import ONE, Term, app, integer_word

DEFAULT_CAP = 12
HARD_CEILING = 16


def eval_level(t: Term, n: int, cache: TableCache = default_cache) -> int:
    """The value of ``t`` in ``P_n``, with ``0 a = a``, ``a 0 = 0``, ``a o 0 = 0 o a = a``."""
    table = cache.get(n)
    size = table.size
    memo: dict[int, int] = {}
    stack = [t]
    while stack:
        x = stack[-1]
        if id(x) in memo:
            stack.pop()
            continue
        if x.left is None:
            memo[id(x)] = (1 % size) if x.kind == "1" else 0
            stack.pop()
            continue
        l, r = memo.get(id(x.left)), memo.get(id(x.right))
        if l is None or r is None:
            if r is None:
                stack.append(x.right)
            if l is None:
                stack.append(x.left)
            continue
        stack.pop()
        memo[id(x)] = table.apply(l, r) if x.kind == "*" else table.compose(l, r)
    return memo[id(t)]


def _check_cap(cap: int, cache: TableCache) -> None:
    if cap < 0:
        raise DomainError("cap must be non-negative")
    if cap > cache.max_level:
        cache.get(cap)  # raises the resource error with the policy message


@dataclass(frozen=True)
class LevelProfile:
    term: Term
    values: tuple
    cap: int

    def __post_init__(self):
        for n in range(len(self.values) - 1):
            lo, hi = self.values[n], self.values[n + 1]
            if hi != lo and hi != lo + (1 << n):
                raise DomainError(
                    f"incoherent profile: level {n} value {lo}, level {n + 1} value {hi}")

    def to_csv(self) -> str:
        return "n,value\n" + "".join(f"{n},{v}\n" for n, v in enumerate(self.values))


def eval_profile(t: Term, cap: int = DEFAULT_CAP, cache: TableCache = default_cache) -> LevelProfile:
    _check_cap(cap, cache)
    return LevelProfile(t, tuple(eval_level(t, n, cache) for n in range(cap + 1)), cap)


@dataclass(frozen=True)
class Known:
    level: int

    def __str__(self):
        return f"known {self.level}"


@dataclass(frozen=True)
class Undecided:
    cap: int

    def __str__(self):
        return f"undecided {self.cap}"


def _no_zero_constant(t: Term) -> None:
    if t.kind == "0":
        raise DomainError("the signature is not defined for the constant 0")


def signature_from_values(values: Sequence[int]):
    """Largest zero level, given coherent values for levels 0..cap."""
    for n, v in enumerate(values):
        if v:
            return Known(n - 1)
    return Undecided(len(values) - 1)


def signature(t: Term, cap: int = DEFAULT_CAP, cache: TableCache = default_cache):
    """``Known(s)`` with s the largest level where ``t`` is 0, else ``Undecided(cap)``."""
    _no_zero_constant(t)
    _check_cap(cap, cache)
    for n in range(cap + 1):
        if eval_level(t, n, cache):
            return Known(n - 1)
    return Undecided(cap)


def first_nonzero_one_times(k: int, cap: int = DEFAULT_CAP, cache: TableCache = default_cache):
    """Least n <= cap with ``[1 k]_n != 0``.

    ``[1 k]_n = 0`` exactly when the period of 1 in ``A_n`` divides k, so k
    never has to be evaluated as a word.
    """
    if k < 1:
        raise DomainError("k must be a positive integer")
    _check_cap(cap, cache)
    for n in range(cap + 1):
        if k % cache.get(n).period(1 % (1 << n)):
            return Known(n)
    return Undecided(cap)


def freeness_probe(k: int, cap: int = DEFAULT_CAP, cache: TableCache = default_cache):
    """Search for a level with ``[1 k]_n != 0``."""
    return first_nonzero_one_times(k, cap, cache)


def herringbone_probe(k: int, cap: int = DEFAULT_CAP, cache: TableCache = default_cache):
    """The signature of ``u_k`` via ``s(u_{j+1}) = s(1 2^{s(u_j)})``."""
    if k < 0:
        raise DomainError("k must be non-negative")
    _check_cap(cap, cache)
    s = 0  # u_0 = 1 is zero only at level 0
    for _ in range(k):
        r = first_nonzero_one_times(1 << s, cap, cache)
        if isinstance(r, Undecided):
            return r
        s = r.level - 1
    return Known(s)


@dataclass(frozen=True)
class Distinguished:
    level: int

    def __str__(self):
        return f"distinguished {self.level}"


@dataclass(frozen=True)
class IndistinguishableUpTo:
    cap: int

    def __str__(self):
        return f"indistinguishable {self.cap}"


def equiv_inf(a: Term, b: Term, cap: int = DEFAULT_CAP, cache: TableCache = default_cache):
    """Least level where the values of a and b differ, if any up to ``cap``."""
    _check_cap(cap, cache)
    for n in range(cap + 1):
        if eval_level(a, n, cache) != eval_level(b, n, cache):
            return Distinguished(n)
    return IndistinguishableUpTo(cap)


def power_of_two_word(s: int) -> Term:
    return integer_word(1 << s)


def one_times(k: int) -> Term:
    return app(ONE, integer_word(k))

