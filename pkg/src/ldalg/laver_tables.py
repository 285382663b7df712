"""Finite Laver tables A_n = P_n on {0, ..., 2^n - 1}.

Elements use the zero convention: 0 plays the part of the top element 2^n,
so ``0 * b = b``, ``a * 0 = 0`` and ``a * 1 = a + 1 mod 2^n``.  Only one
period of every row is stored; row 0 is the identity and never materialized.
"""

from __future__ import annotations

import random
import threading
from array import array
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, FormatError, ResourceError

MAX_LEVEL = 16
DEFAULT_MEMORY_CAP = 1 << 30
EXHAUSTIVE = "exhaustive"
DEFAULT_TUPLE_CEILING = 1 << 27

_ENTRY_BYTES = 4
_ROW_OVERHEAD = 64

LAWS = ("LD", "Sigma", "Hom", "Periods")


class LaverTable:
    """The algebra P_n stored as period-compressed rows.

    ``rows[a]`` holds ``a*1, ..., a*p(a)`` for ``1 <= a < 2^n``; ``rows[0]``
    is an empty placeholder.
    """

    __slots__ = ("n", "size", "rows", "_flat")

    def __init__(self, n: int, rows: Sequence[Sequence[int]], *, validate: bool = True):
        if n < 0:
            raise DomainError(f"level must be non-negative, got {n}")
        self.n = n
        self.size = 1 << n
        if len(rows) != self.size:
            raise FormatError(f"expected {self.size} rows (row 0 empty), got {len(rows)}")
        self.rows = [r if isinstance(r, array) else array("I", r) for r in rows]
        self._flat = None
        if validate:
            for a in range(1, self.size):
                _check_row(self.n, a, self.rows[a])

    def __repr__(self):
        return f"LaverTable(n={self.n})"

    def _check(self, x: int) -> None:
        if not 0 <= x < self.size:
            raise DomainError(f"element {x} outside A_{self.n} = [0, {self.size})")

    def apply(self, a: int, b: int) -> int:
        """Return ``a *_n b``."""
        self._check(a)
        self._check(b)
        if a == 0:
            return b
        row = self.rows[a]
        return row[(b - 1) % len(row)]

    def compose(self, a: int, b: int) -> int:
        """Return ``a o_n b = (a *_n (b+1)) - 1 mod 2^n``."""
        self._check(a)
        self._check(b)
        return (self.apply(a, (b + 1) % self.size) - 1) % self.size

    def period(self, a: int) -> int:
        self._check(a)
        return self.size if a == 0 else len(self.rows[a])

    def periods(self) -> list[int]:
        return [self.size] + [len(self.rows[a]) for a in range(1, self.size)]

    def total_entries(self) -> int:
        return sum(len(r) for r in self.rows)

    # -- vectorized access ---------------------------------------------------

    def _flat_arrays(self):
        if self._flat is None:
            per = np.array(self.periods(), dtype=np.int64)
            per_rows = per.copy()
            per_rows[0] = 0
            offsets = np.zeros(self.size, dtype=np.int64)
            np.cumsum(per_rows[:-1], out=offsets[1:])
            flat = np.zeros(max(int(per_rows.sum()), 1), dtype=np.int64)
            for a in range(1, self.size):
                o = offsets[a]
                flat[o:o + per_rows[a]] = np.frombuffer(self.rows[a], dtype=np.uint32)
            self._flat = (flat, offsets, per)
        return self._flat

    def apply_many(self, a, b) -> np.ndarray:
        """Vectorized ``a *_n b`` over broadcastable integer arrays."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        flat, offsets, per = self._flat_arrays()
        a, b = np.broadcast_arrays(a, b)
        safe_a = np.where(a == 0, 1 if self.size > 1 else 0, a)
        if self.size == 1:
            return b.copy()
        vals = flat[offsets[safe_a] + (b - 1) % per[safe_a]]
        return np.where(a == 0, b, vals)

    def compose_many(self, a, b) -> np.ndarray:
        b = np.asarray(b, dtype=np.int64)
        return (self.apply_many(a, (b + 1) % self.size) - 1) % self.size

    def full_table(self) -> np.ndarray:
        """The dense ``2^n x 2^n`` multiplication table (small n only)."""
        idx = np.arange(self.size, dtype=np.int64)
        return self.apply_many(idx[:, None], idx[None, :])

    # -- display and persistence --------------------------------------------

    def display(self, x: int, convention: str = "zero") -> int:
        """Render an element; the ``one`` convention shows 0 as 2^n."""
        if convention == "one":
            return x if x else self.size
        if convention != "zero":
            raise DomainError(f"unknown convention {convention!r}")
        return x

    def to_text(self) -> str:
        lines = [f"LAVERTABLE v1 n={self.n} convention=zero"]
        for a in range(1, self.size):
            row = self.rows[a]
            lines.append(" ".join(map(str, (a, len(row), *row))))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LaverTable":
        lines = text.split("\n")
        if not lines or not text.endswith("\n"):
            raise FormatError("table file must be newline-terminated")
        lines = lines[:-1]
        head = lines[0].split(" ") if lines else []
        if (len(head) != 4 or head[0] != "LAVERTABLE" or head[1] != "v1"
                or not head[2].startswith("n=") or head[3] != "convention=zero"):
            raise FormatError(f"bad header line: {lines[0] if lines else ''!r}")
        n = _parse_nat(head[2][2:], "level")
        size = 1 << n
        if len(lines) != size:
            raise FormatError(f"expected {size - 1} row lines, got {len(lines) - 1}")
        rows: list = [array("I")]
        for a, line in enumerate(lines[1:], start=1):
            fields = line.split(" ")
            nums = [_parse_nat(f, f"row {a}") for f in fields]
            if len(nums) < 3 or nums[0] != a:
                raise FormatError(f"row line for {a} malformed: {line!r}")
            p = nums[1]
            if len(nums) != p + 2:
                raise FormatError(f"row {a} declares period {p} but has {len(nums) - 2} values")
            rows.append(array("I", nums[2:]))
        try:
            return cls(n, rows, validate=True)
        except DomainError as exc:
            raise FormatError(str(exc)) from exc

    def dump(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "LaverTable":
        return cls.from_text(Path(path).read_text())


def _parse_nat(s: str, what: str) -> int:
    if not s.isdigit() or (len(s) > 1 and s[0] == "0"):
        raise FormatError(f"{what}: expected a decimal natural number, got {s!r}")
    return int(s)


def _check_row(n: int, a: int, row: Sequence[int]) -> None:
    size = 1 << n
    p = len(row)
    if p == 0 or p & (p - 1) or size % p:
        raise DomainError(f"row {a}: period {p} is not a power of 2 dividing {size}")
    if row[-1] != 0:
        raise DomainError(f"row {a}: last entry of the period must be 0")
    prev = a
    for v in row[:-1]:
        if not prev < v < size:
            raise DomainError(f"row {a}: entries must increase strictly from above {a}")
        prev = v


def build_table(n: int, memory_cap: int = DEFAULT_MEMORY_CAP) -> LaverTable:
    """Build ``A_n`` from the double recursion, rows in descending order.

    Each new entry ``a*(b+1) = (a*b)*(a+1)`` is a single lookup into the
    already finished row of ``a*b > a``.
    """
    if n < 0:
        raise DomainError(f"level must be non-negative, got {n}")
    size = 1 << n
    rows: list = [None] * size
    rows[0] = array("I")
    used = _ROW_OVERHEAD
    for a in range(size - 1, 0, -1):
        used += _ROW_OVERHEAD
        budget = (memory_cap - used) // _ENTRY_BYTES
        nxt = a + 1 if a + 1 < size else 0
        row = array("I", [nxt])
        x = nxt
        while x:
            r = rows[x]
            x = r[a % len(r)]
            row.append(x)
            if len(row) > budget:
                raise ResourceError(
                    f"memory cap of {memory_cap} bytes exceeded while building row {a} of A_{n}")
        used += len(row) * _ENTRY_BYTES
        if used > memory_cap:
            raise ResourceError(
                f"memory cap of {memory_cap} bytes exceeded while building row {a} of A_{n}")
        rows[a] = row
    return LaverTable(n, rows, validate=False)


def project(x: int, n: int) -> int:
    """Reduction modulo 2^n, the homomorphism from level n+1 to level n."""
    return x % (1 << n)


class TableCache:
    """Lazily built, immutable tables keyed by level; safe for concurrent use."""

    def __init__(self, memory_cap: int = DEFAULT_MEMORY_CAP, max_level: int = MAX_LEVEL):
        self.memory_cap = memory_cap
        self.max_level = max_level
        self._tables: dict[int, LaverTable] = {}
        self._lock = threading.Lock()

    def get(self, n: int) -> LaverTable:
        t = self._tables.get(n)
        if t is not None:
            return t
        if n < 0:
            raise DomainError(f"level must be non-negative, got {n}")
        if n > self.max_level:
            raise ResourceError(
                f"level {n} exceeds the maximum level {self.max_level}; raise max_level explicitly")
        with self._lock:
            t = self._tables.get(n)
            if t is None:
                t = build_table(n, self.memory_cap)
                self._tables[n] = t
        return t

    __getitem__ = get


default_cache = TableCache()


def get_table(n: int) -> LaverTable:
    return default_cache.get(n)


# -- law verification ---------------------------------------------------------

@dataclass(frozen=True)
class LawReport:
    law: str
    holds: bool
    counterexample: tuple | None = None
    detail: str = ""
    checked: int = 0

    def __post_init__(self):
        if self.holds == (self.counterexample is not None):
            raise ValueError("counterexample must be present exactly when the law fails")


def _sigma_violations(t: LaverTable, a, b, c):
    """Yield (name, mask) for the four two-operation laws on triples."""
    ap, co = t.apply_many, t.compose_many
    yield "(a o b) o c = a o (b o c)", co(co(a, b), c) != co(a, co(b, c))
    yield "(a o b) * c = a * (b * c)", ap(co(a, b), c) != ap(a, ap(b, c))
    yield "a * (b o c) = (a * b) o (a * c)", ap(a, co(b, c)) != co(ap(a, b), ap(a, c))
    yield "a o b = (a * b) o a", co(a, b) != co(ap(a, b), a)


def _tuples(size: int, arity: int, budget, rng: random.Random, ceiling: int):
    """Yield chunks of coordinate arrays, exhaustive or uniformly sampled."""
    if budget == EXHAUSTIVE:
        total = size ** arity
        if total > ceiling:
            raise ResourceError(
                f"exhaustive check needs {total} tuples, above the ceiling of {ceiling}")
        idx = np.arange(size, dtype=np.int64)
        if arity == 1:
            yield (idx,)
            return
        rest = np.meshgrid(*([idx] * (arity - 1)), indexing="ij")
        rest = [r.ravel() for r in rest]
        for first in range(size):
            yield (np.full(rest[0].shape, first, dtype=np.int64), *rest)
        return
    count = int(budget)
    if count < 0:
        raise DomainError("sample budget must be non-negative")
    chunk = 1 << 16
    done = 0
    g = np.random.default_rng(rng.getrandbits(63))
    while done < count:
        m = min(chunk, count - done)
        yield tuple(g.integers(0, size, m, dtype=np.int64) for _ in range(arity))
        done += m


def verify_law(tables, law: str, sample_budget=EXHAUSTIVE, *, seed: int | None = 0,
               ceiling: int = DEFAULT_TUPLE_CEILING) -> LawReport:
    """Check one of the laws LD, Sigma, Hom or Periods.

    ``tables`` is a single table for LD and Sigma, and a ``(lower, upper)``
    pair at consecutive levels for Hom and Periods.  Sampled mode draws the
    stated number of uniform tuples from a generator seeded by ``seed``.
    """
    if law not in LAWS:
        raise DomainError(f"unknown law {law!r}; expected one of {LAWS}")
    rng = random.Random(seed)
    if law in ("Hom", "Periods"):
        if not isinstance(tables, (tuple, list)) or len(tables) != 2:
            raise DomainError(f"{law} needs tables at levels n and n+1")
        lower, upper = tables
        if upper.n != lower.n + 1:
            raise DomainError(f"{law} needs consecutive levels, got {lower.n} and {upper.n}")
    else:
        if isinstance(tables, (tuple, list)):
            raise DomainError(f"{law} takes a single table")
        t = tables

    checked = 0
    if law == "LD":
        for a, b, c in _tuples(t.size, 3, sample_budget, rng, ceiling):
            ap = t.apply_many
            bad = ap(a, ap(b, c)) != ap(ap(a, b), ap(a, c))
            checked += len(a)
            if bad.any():
                i = int(np.argmax(bad))
                return LawReport(law, False, (int(a[i]), int(b[i]), int(c[i])),
                                 "a * (b * c) = (a * b) * (a * c)", checked)
        return LawReport(law, True, None, "", checked)

    if law == "Sigma":
        for a, b, c in _tuples(t.size, 3, sample_budget, rng, ceiling):
            checked += len(a)
            for name, bad in _sigma_violations(t, a, b, c):
                if bad.any():
                    i = int(np.argmax(bad))
                    return LawReport(law, False, (int(a[i]), int(b[i]), int(c[i])), name, checked)
        return LawReport(law, True, None, "", checked)

    if law == "Hom":
        mod = lower.size
        for a, b in _tuples(upper.size, 2, sample_budget, rng, ceiling):
            checked += len(a)
            for name, up, low in (
                ("*", upper.apply_many(a, b), lower.apply_many(a % mod, b % mod)),
                ("o", upper.compose_many(a, b), lower.compose_many(a % mod, b % mod)),
            ):
                bad = (up % mod) != low
                if bad.any():
                    i = int(np.argmax(bad))
                    return LawReport(law, False, (int(a[i]), int(b[i])),
                                     f"reduction mod 2^{lower.n} fails for {name}", checked)
        return LawReport(law, True, None, "", checked)

    # Periods
    lo = np.array(lower.periods(), dtype=np.int64)
    hi = np.array(upper.periods(), dtype=np.int64)
    for (a,) in _tuples(lower.size, 1, sample_budget, rng, ceiling):
        checked += len(a)
        bad_top = hi[a + lower.size] != lo[a]
        bad_low = (hi[a] != lo[a]) & (hi[a] != 2 * lo[a])
        for name, bad in (("p_{n+1}(a + 2^n) = p_n(a)", bad_top),
                          ("p_{n+1}(a) in {p_n(a), 2 p_n(a)}", bad_low)):
            if bad.any():
                i = int(np.argmax(bad))
                return LawReport(law, False, (int(a[i]),), name, checked)
    return LawReport(law, True, None, "", checked)


def row_values(t: LaverTable, a: int) -> list[int]:
    """The full row ``a*0, a*1, ..., a*(2^n - 1)``."""
    return [t.apply(a, b) for b in range(t.size)]


def table_rows_text(t: LaverTable, convention: str = "zero") -> Iterable[str]:
    for a in range(t.size):
        yield " ".join(str(t.display(v, convention)) for v in row_values(t, a))
