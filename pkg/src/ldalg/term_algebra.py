"""Words over the generator 1 with the operations ``*`` (application) and ``o``.

Terms are hash-consed: building the same tree twice returns the same object,
so structural equality is identity and ``partial`` can share subterms.

Positions are tuples over ``{LEFT, RIGHT}`` read from the root.  Every
derivation builder below emits positions relative to a ``prefix`` so that a
witness for a subterm can be spliced into any context without copying.
"""

from __future__ import annotations

import re
import weakref
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import DomainError, FormatError, FuelError, RewriteError

LEFT, RIGHT = 0, 1
EXPAND, CONTRACT = "expand", "contract"
DEFAULT_FUEL = 10**6

Position = tuple


class Term:
    __slots__ = ("kind", "left", "right", "leaves", "depth", "is_a", "__weakref__")

    def __init__(self, kind, left=None, right=None):
        self.kind = kind
        self.left = left
        self.right = right
        if left is None:
            self.leaves = 1
            self.depth = 0
            self.is_a = kind == "1"
        else:
            self.leaves = left.leaves + right.leaves
            self.depth = max(left.depth, right.depth) + 1
            self.is_a = kind == "*" and left.is_a and right.is_a

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def __mul__(self, other: "Term") -> "Term":
        return app(self, other)

    def __repr__(self):
        return f"Term({render(self)!r})"

    def __str__(self):
        return render(self)

    def __reduce__(self):
        return (parse, (render(self),))


_interned: "weakref.WeakValueDictionary[tuple, Term]" = weakref.WeakValueDictionary()

ONE = Term("1")
ZERO = Term("0")


def _node(kind: str, left: Term, right: Term) -> Term:
    key = (kind, id(left), id(right))
    t = _interned.get(key)
    if t is None:
        t = Term(kind, left, right)
        _interned[key] = t
    return t


def app(a: Term, b: Term) -> Term:
    """The application ``a * b`` (written ab)."""
    return _node("*", a, b)


def comp(a: Term, b: Term) -> Term:
    """The formal composition ``a o b``."""
    return _node("o", a, b)


def left_product(first: Term, rest: Sequence[Term]) -> Term:
    """``first c_1 ... c_k`` with the left-associated convention."""
    t = first
    for c in rest:
        t = app(t, c)
    return t


# -- named words ---------------------------------------------------------------

def depth(t: Term) -> int:
    return t.depth


def herringbone(k: int) -> Term:
    """u_0 = 1, u_{k+1} = 1 u_k."""
    if k < 0:
        raise DomainError("herringbone index must be non-negative")
    t = ONE
    for _ in range(k):
        t = app(ONE, t)
    return t


def full_word(k: int) -> Term:
    """v_0 = 1, v_{k+1} = v_k v_k: the largest word of depth k."""
    if k < 0:
        raise DomainError("full word index must be non-negative")
    t = ONE
    for _ in range(k):
        t = app(t, t)
    return t


def integer_word(k: int) -> Term:
    """The word for the positive integer k: 1, then k+1 = k 1."""
    if k < 1:
        raise DomainError("integer words start at 1")
    t = ONE
    for _ in range(k - 1):
        t = app(t, ONE)
    return t


# -- parsing and rendering -----------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(.))")


def _tokenize(s: str) -> list[str]:
    out = []
    pos = 0
    s = s.rstrip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        num, ch = m.group(1), m.group(2)
        if num is not None:
            out.append(num)
        elif ch in "*o()":
            out.append(ch)
        else:
            raise FormatError(f"unexpected character {ch!r} at offset {m.start(2)} in {s!r}")
        pos = m.end()
    return out


def parse(s: str) -> Term:
    """Parse the ASCII grammar: ``*`` binds tighter than ``o``, both left-associative."""
    toks = _tokenize(s)
    if not toks:
        raise FormatError("empty term")
    i = 0

    def atom() -> Term:
        nonlocal i
        if i >= len(toks):
            raise FormatError(f"unexpected end of input in {s!r}")
        tok = toks[i]
        i += 1
        if tok == "(":
            t = term()
            if i >= len(toks) or toks[i] != ")":
                raise FormatError(f"missing ')' in {s!r}")
            i += 1
            return t
        if tok.isdigit():
            if len(tok) > 1 and tok[0] == "0":
                raise FormatError(f"bad integer {tok!r}")
            k = int(tok)
            return ZERO if k == 0 else integer_word(k)
        raise FormatError(f"unexpected token {tok!r} in {s!r}")

    def factor() -> Term:
        nonlocal i
        t = atom()
        while i < len(toks) and toks[i] == "*":
            i += 1
            t = app(t, atom())
        return t

    def term() -> Term:
        nonlocal i
        t = factor()
        while i < len(toks) and toks[i] == "o":
            i += 1
            t = comp(t, factor())
        return t

    t = term()
    if i != len(toks):
        raise FormatError(f"trailing input {' '.join(toks[i:])!r} in {s!r}")
    return t


def render(t: Term) -> str:
    """Fully parenthesized rendering, e.g. ``(1*(1*1))``."""
    out: list[str] = []
    stack: list = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, str):
            out.append(x)
        elif x.left is None:
            out.append(x.kind)
        else:
            op = "*" if x.kind == "*" else " o "
            stack.extend((")", x.right, op, x.left, "("))
    return "".join(out)


def render_position(pos: Position) -> str:
    return "".join("LR"[d] for d in pos) or "root"


def parse_position(s: str) -> Position:
    if s in ("", "root"):
        return ()
    if set(s) - {"L", "R"}:
        raise FormatError(f"positions are strings over L and R, got {s!r}")
    return tuple(LEFT if c == "L" else RIGHT for c in s)


# -- positions and single steps ------------------------------------------------

def subterm(t: Term, pos: Position) -> Term:
    for d in pos:
        if t.left is None:
            raise DomainError(f"position {render_position(pos)} leaves the term")
        t = t.right if d else t.left
    return t


def replace_at(t: Term, pos: Position, new: Term) -> Term:
    path = []
    for d in pos:
        if t.left is None:
            raise DomainError(f"position {render_position(pos)} leaves the term")
        path.append(t)
        t = t.right if d else t.left
    for parent, d in zip(reversed(path), reversed(pos)):
        new = _node(parent.kind, parent.left, new) if d else _node(parent.kind, new, parent.right)
    return new


def _expand_local(s: Term) -> Term | None:
    if s.kind == "*" and s.right.kind == "*":
        x, y, z = s.left, s.right.left, s.right.right
        return app(app(x, y), app(x, z))
    return None


def _contract_local(s: Term) -> Term | None:
    if (s.kind == "*" and s.left.kind == "*" and s.right.kind == "*"
            and s.left.left is s.right.left):
        return app(s.left.left, app(s.left.right, s.right.right))
    return None


def ld_step(t: Term, pos: Position, direction: str = EXPAND) -> Term:
    """Rewrite x(yz) -> xy(xz) at ``pos`` (Expand) or its inverse (Contract)."""
    s = subterm(t, pos)
    if direction == EXPAND:
        new = _expand_local(s)
    elif direction == CONTRACT:
        new = _contract_local(s)
    else:
        raise DomainError(f"unknown direction {direction!r}")
    if new is None:
        raise RewriteError(f"no {direction} redex at {render_position(pos)} in {render(t)}")
    return replace_at(t, pos, new)


def ld_redexes(t: Term, direction: str = EXPAND) -> list[Position]:
    """All positions where a step of ``direction`` applies, in preorder."""
    local = _expand_local if direction == EXPAND else _contract_local
    out = []
    stack = [(t, ())]
    while stack:
        s, p = stack.pop()
        if s.left is None:
            continue
        if local(s) is not None:
            out.append(p)
        stack.append((s.right, p + (RIGHT,)))
        stack.append((s.left, p + (LEFT,)))
    return out


def leaf_positions(t: Term) -> Iterator[Position]:
    stack = [(t, ())]
    while stack:
        s, p = stack.pop()
        if s.left is None:
            yield p
        else:
            stack.append((s.right, p + (RIGHT,)))
            stack.append((s.left, p + (LEFT,)))


# -- derivations ---------------------------------------------------------------

Step = tuple  # (Position, direction)


@dataclass(frozen=True)
class Derivation:
    start: Term
    steps: tuple
    end: Term

    def __len__(self):
        return len(self.steps)

    @property
    def expand_only(self) -> bool:
        return all(d == EXPAND for _, d in self.steps)

    def replay(self) -> Term:
        """Apply every step, validating each redex, and check the end term."""
        t = replay_steps(self.start, self.steps)
        if t is not self.end:
            raise RewriteError(f"replay reaches {render(t)}, not the declared end {render(self.end)}")
        return t

    def then(self, other: "Derivation") -> "Derivation":
        if other.start is not self.end:
            raise DomainError("derivations do not meet")
        return Derivation(self.start, self.steps + other.steps, other.end)

    def reversed(self) -> "Derivation":
        flip = {EXPAND: CONTRACT, CONTRACT: EXPAND}
        return Derivation(self.end, tuple((p, flip[d]) for p, d in reversed(self.steps)), self.start)

    def in_context(self, host: Term, pos: Position) -> "Derivation":
        """This derivation performed on the subterm of ``host`` at ``pos``."""
        if subterm(host, pos) is not self.start:
            raise DomainError("host does not contain the derivation start at that position")
        steps = tuple((pos + p, d) for p, d in self.steps)
        return Derivation(host, steps, replace_at(host, pos, self.end))

    @classmethod
    def empty(cls, t: Term) -> "Derivation":
        return cls(t, (), t)


def replay_steps(t: Term, steps) -> Term:
    for p, d in steps:
        t = ld_step(t, p, d)
    return t


class Budget:
    """Counts emitted steps and raises ``FuelError`` past the limit."""

    __slots__ = ("limit", "used", "stage")

    def __init__(self, limit: int | None = DEFAULT_FUEL, stage: str = "witness"):
        self.limit = limit
        self.used = 0
        self.stage = stage

    def spend(self, k: int = 1) -> None:
        self.used += k
        if self.limit is not None and self.used > self.limit:
            raise FuelError(self.stage, self.limit)


def _budget(fuel, stage):
    return fuel if isinstance(fuel, Budget) else Budget(fuel, stage)


# -- the distributing product and the saturation map ---------------------------

def _require_a(t: Term, what: str) -> None:
    if not t.is_a:
        raise DomainError(f"{what} must be a word over 1 and * only, got {render(t)}")


@lru_cache(maxsize=1 << 18)
def _otimes(a: Term, b: Term) -> Term:
    if b.left is None:
        return app(a, ONE)
    return app(_otimes(a, b.left), _otimes(a, b.right))


def otimes(a: Term, b: Term) -> Term:
    """a (x) 1 = a1 and a (x) bc = (a (x) b)(a (x) c)."""
    _require_a(a, "otimes left argument")
    _require_a(b, "otimes right argument")
    return _otimes(a, b)


@lru_cache(maxsize=1 << 18)
def _partial(t: Term) -> Term:
    if t.left is None:
        return t
    return _otimes(_partial(t.left), _partial(t.right))


def partial(t: Term) -> Term:
    """d1 = 1 and d(ab) = da (x) db."""
    _require_a(t, "partial argument")
    return _partial(t)


def partial_power(t: Term, m: int) -> Term:
    for _ in range(m):
        t = partial(t)
    return t


# Each builder appends (position, EXPAND) steps to ``out`` for a term located
# at ``pre`` inside the host word.

def _distribute(a: Term, b: Term, pre: Position, out: list, bud: Budget) -> None:
    # ab -> a (x) b
    if b.left is None:
        return
    bud.spend()
    out.append((pre, EXPAND))
    _distribute(a, b.left, pre + (LEFT,), out, bud)
    _distribute(a, b.right, pre + (RIGHT,), out, bud)


def _otimes_assoc(a: Term, b: Term, c: Term, pre: Position, out: list, bud: Budget) -> None:
    # a (x) (b (x) c) -> (a (x) b) (x) (a (x) c)
    if c.left is None:
        bud.spend()
        out.append((pre, EXPAND))
        _distribute(_otimes(a, b), a, pre + (LEFT,), out, bud)
        return
    _otimes_assoc(a, b, c.left, pre + (LEFT,), out, bud)
    _otimes_assoc(a, b, c.right, pre + (RIGHT,), out, bud)


def _lift_left(steps: Sequence[Step], b: Term, pre: Position, out: list, bud: Budget) -> None:
    # a -> a' gives a (x) b -> a' (x) b: replay at the left of every a1 leaf
    for leaf in leaf_positions(b):
        base = pre + leaf + (LEFT,)
        bud.spend(len(steps))
        out.extend((base + p, d) for p, d in steps)


def _saturate(a: Term, pre: Position, out: list, bud: Budget) -> None:
    # a -> da
    if a.left is None:
        return
    _saturate(a.left, pre + (LEFT,), out, bud)
    _saturate(a.right, pre + (RIGHT,), out, bud)
    _distribute(_partial(a.left), _partial(a.right), pre, out, bud)


def _absorb(a: Term, q: Position, pre: Position, out: list, bud: Budget) -> None:
    # a ->LD b at q gives b -> da
    if not q:
        a1, a2, a3 = a.left, a.right.left, a.right.right
        _saturate(a1, pre + (LEFT, LEFT), out, bud)
        _saturate(a2, pre + (LEFT, RIGHT), out, bud)
        _saturate(a1, pre + (RIGHT, LEFT), out, bud)
        _saturate(a3, pre + (RIGHT, RIGHT), out, bud)
        d1, d2, d3 = _partial(a1), _partial(a2), _partial(a3)
        # d1 d2 (d1 d3) -> d1 (x) d2 d3
        _distribute(d1, d2, pre + (LEFT,), out, bud)
        _distribute(d1, d3, pre + (RIGHT,), out, bud)
        # d1 (x) (d2 d3) -> d1 (x) (d2 (x) d3): same positions, b-side steps carry over
        _distribute(d2, d3, pre, out, bud)
        return
    if q[0] == LEFT:
        _absorb(a.left, q[1:], pre + (LEFT,), out, bud)
        _saturate(a.right, pre + (RIGHT,), out, bud)
    else:
        _saturate(a.left, pre + (LEFT,), out, bud)
        _absorb(a.right, q[1:], pre + (RIGHT,), out, bud)
    _distribute(_partial(a.left), _partial(a.right), pre, out, bud)


def _lift_step(a: Term, q: Position, pre: Position, out: list, bud: Budget) -> None:
    # a ->LD b at q gives da -> db
    if not q:
        d1, d2, d3 = _partial(a.left), _partial(a.right.left), _partial(a.right.right)
        _otimes_assoc(d1, d2, d3, pre, out, bud)
        return
    if q[0] == LEFT:
        inner: list = []
        _lift_step(a.left, q[1:], (), inner, bud)
        _lift_left(inner, _partial(a.right), pre, out, bud)
    else:
        # a (x) b mirrors b, so steps inside the right factor keep their positions
        _lift_step(a.right, q[1:], pre, out, bud)


def _check_expand(steps) -> None:
    for _, d in steps:
        if d != EXPAND:
            raise DomainError("derivation must use Expand steps only")


def _finish(start: Term, steps: list, end: Term) -> Derivation:
    return Derivation(start, tuple(steps), end)


def witness_distribute(a: Term, b: Term, fuel=DEFAULT_FUEL) -> Derivation:
    """Expand-only derivation ab -> a (x) b."""
    _require_a(a, "a")
    _require_a(b, "b")
    out: list = []
    _distribute(a, b, (), out, _budget(fuel, "distribute"))
    return _finish(app(a, b), out, _otimes(a, b))


def witness_expand(a: Term, fuel=DEFAULT_FUEL) -> Derivation:
    """Expand-only derivation a -> da."""
    _require_a(a, "a")
    out: list = []
    _saturate(a, (), out, _budget(fuel, "expand"))
    return _finish(a, out, _partial(a))


def single_step_position(a: Term, b: Term) -> Position | None:
    """The position q with b = ld_step(a, q, EXPAND), if there is one."""
    prefix: list = []
    while a.left is not None and b.left is not None:
        if _expand_local(a) is b:
            return tuple(prefix)
        if a.kind != b.kind:
            return None
        if a.left is b.left:
            a, b = a.right, b.right
            prefix.append(RIGHT)
        elif a.right is b.right:
            a, b = a.left, b.left
            prefix.append(LEFT)
        else:
            return None
    return None


def witness_absorb(a: Term, b: Term, fuel=DEFAULT_FUEL) -> Derivation:
    """For a ->LD b, an Expand-only derivation b -> da."""
    _require_a(a, "a")
    _require_a(b, "b")
    q = single_step_position(a, b)
    if q is None:
        raise DomainError(f"{render(b)} is not one Expand step from {render(a)}")
    out: list = []
    _absorb(a, q, (), out, _budget(fuel, "absorb"))
    return _finish(b, out, _partial(a))


def lift_derivation(d: Derivation, fuel=DEFAULT_FUEL) -> Derivation:
    """For an Expand-only a -> b, an Expand-only derivation da -> db."""
    _check_expand(d.steps)
    _require_a(d.start, "derivation start")
    bud = _budget(fuel, "lift")
    out: list = []
    t = d.start
    for q, _ in d.steps:
        _lift_step(t, q, (), out, bud)
        t = ld_step(t, q, EXPAND)
    if t is not d.end:
        raise DomainError("derivation steps do not reach its declared end")
    return _finish(_partial(d.start), out, _partial(d.end))
