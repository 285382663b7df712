"""Command-line front end.

Exit codes: 0 a verdict was produced, 1 something was refuted, 2 undecided
or out of fuel, 3 usage or format error.  Verdicts go to stdout, one per
line; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import embedding_algebras as ea
from .errors import FormatError, FuelError, LdalgError, ResourceError
from .laver_tables import DEFAULT_MEMORY_CAP, EXHAUSTIVE, LAWS, LaverTable, TableCache, row_values, verify_law
from .limit_algebra import DEFAULT_CAP, Undecided, eval_level, eval_profile, freeness_probe, herringbone_probe, signature
from .term_algebra import DEFAULT_FUEL, parse, render
from .word_problem import STRATEGIES, Verdict, compare, normalize_composition

OK, REFUTED, UNDECIDED, USAGE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE)


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _nonneg(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


# -- subcommands ---------------------------------------------------------------

def cmd_table(args, cache, out):
    t = cache.get(args.n)
    if args.file:
        t.dump(args.file)
    conv = args.convention
    rows = [[t.display(v, conv) for v in row_values(t, a)] for a in range(t.size)]
    labels = [t.display(a, conv) for a in range(t.size)]
    if args.format == "csv":
        out.write("a,b,value\n")
        for a in range(t.size):
            for b in range(t.size):
                out.write(f"{labels[a]},{labels[b]},{rows[a][b]}\n")
    elif args.format == "json":
        out.write(_dump_json({"n": t.n, "convention": conv, "table": rows}) + "\n")
    else:
        for r in rows:
            out.write(" ".join(map(str, r)) + "\n")
    return OK


def cmd_period(args, cache, out):
    t = cache.get(args.n)
    if args.k is not None:
        out.write(f"{t.period(args.k % t.size)}\n")
        return OK
    ps = t.periods()
    if args.format == "json":
        out.write(_dump_json({"n": t.n, "periods": ps}) + "\n")
    else:
        if args.format == "csv":
            out.write("a,period\n")
        sep = "," if args.format == "csv" else " "
        for a, p in enumerate(ps):
            out.write(f"{t.display(a, args.convention)}{sep}{p}\n")
    return OK


def cmd_eval(args, cache, out):
    v = eval_level(parse(args.term), args.n, cache)
    out.write(f"{cache.get(args.n).display(v, args.convention)}\n")
    return OK


def cmd_profile(args, cache, out):
    prof = eval_profile(parse(args.term), args.cap, cache)
    if args.format == "json":
        out.write(_dump_json({"cap": prof.cap, "values": list(prof.values)}) + "\n")
    elif args.format == "text":
        out.write(" ".join(map(str, prof.values)) + "\n")
    else:
        out.write(prof.to_csv())
    return OK


def _report_signature(res, out):
    out.write(f"{res}\n")
    return UNDECIDED if isinstance(res, Undecided) else OK


def cmd_signature(args, cache, out):
    return _report_signature(signature(parse(args.term), args.cap, cache), out)


def cmd_probe(args, cache, out):
    return _report_signature(freeness_probe(args.k, args.cap, cache), out)


def cmd_hprobe(args, cache, out):
    return _report_signature(herringbone_probe(args.k, args.cap, cache), out)


def cmd_compare(args, cache, out):
    res = compare(parse(args.a), parse(args.b), fuel=args.fuel, strategy=args.strategy)
    if args.format == "json":
        out.write(_dump_json({"verdict": res.verdict.value, "stage": res.stage, "method": res.method,
                              "witness": [render(w) for w in res.witness]}) + "\n")
    else:
        out.write(f"{res}\n")
        if args.format == "text" and res.witness:
            out.write(" ".join(render(w) for w in res.witness) + "\n")
    return UNDECIDED if res.verdict is Verdict.OUT_OF_FUEL else OK


def cmd_normalize(args, cache, out):
    parts = normalize_composition(parse(args.term))
    if args.format == "json":
        out.write(_dump_json([render(p) for p in parts]) + "\n")
    else:
        out.write(" o ".join(render(p) for p in parts) + "\n")
    return OK


def cmd_check_laws(args, cache, out):
    laws = LAWS if args.law == "all" else (args.law,)
    budget = EXHAUSTIVE if args.samples is None else args.samples
    code = OK
    for law in laws:
        if law in ("Hom", "Periods"):
            if args.file:
                raise FormatError(f"{law} needs two consecutive levels; --file gives only one table")
            if args.n < 1:
                continue
            tables = (cache.get(args.n - 1), cache.get(args.n))
        else:
            tables = LaverTable.load(args.file) if args.file else cache.get(args.n)
        rep = verify_law(tables, law, budget, seed=args.seed)
        if rep.holds:
            out.write(f"{law} holds {rep.checked}\n")
        else:
            out.write(f"{law} fails {' '.join(map(str, rep.counterexample))}\n")
            print(rep.detail, file=sys.stderr)
            code = REFUTED
    return code


def _report_axioms(rep: ea.AxiomReport, out, fmt: str) -> int:
    if fmt == "json":
        out.write(json.dumps([[name, str(st)] for name, st in rep.statuses.items()]) + "\n")
    else:
        for line in rep.lines():
            out.write(line + "\n")
    return OK if rep.ok else REFUTED


def _candidate(args) -> ea.Candidate:
    if not args.file:
        raise FormatError("--file is required")
    return ea.Candidate.load(args.file)


def cmd_embed_check(args, cache, out):
    return _report_axioms(ea.check_candidate(_candidate(args), coherence=not args.no_coherence), out,
                          args.format)


def cmd_embed_critseq(args, cache, out):
    c = _candidate(args)
    if args.name is None:
        x = c[c.generator] if c.generator else None
        if x is None:
            raise FormatError("no --name given and the candidate has no generator")
    else:
        parts = args.name.split(",")
        for p in parts:
            if p not in c.functions:
                raise FormatError(f"unknown function {p}")
        x = c[parts[0]] if len(parts) == 1 else ea.FormalComposition(tuple(parts))
    seq = ea.critical_sequence(x, args.k, c)
    out.write(f"{seq}\n")
    return UNDECIDED if seq.exhausted else OK


def cmd_embed_two_sorted(args, cache, out):
    ts = ea.build_two_sorted(_candidate(args), max_parts=args.parts)
    bounds = ea.Bounds(parts=args.parts, context=args.context)
    return _report_axioms(ea.check_two_sorted(ts, bounds), out, args.format)


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ldalg", description="Laver tables, LD words and embedding-algebra candidates.")
    p.add_argument("--memory-cap", type=_positive, default=DEFAULT_MEMORY_CAP,
                   help="byte budget for table construction")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, *flags):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--memory-cap", type=_positive, default=argparse.SUPPRESS)
        for f in flags:
            f(sp)
        return sp

    def n_flag(sp, required=True):
        sp.add_argument("--n", type=_nonneg, required=required, help="table level")

    def fmt(default):
        return lambda sp: sp.add_argument("--format", choices=("csv", "json", "text"), default=default)

    def conv(sp):
        sp.add_argument("--convention", choices=("zero", "one"), default="zero")

    def cap(sp):
        sp.add_argument("--cap", type=_nonneg, default=DEFAULT_CAP)

    def term(sp):
        sp.add_argument("term", help="word, e.g. '1*(1*1)' or '(1 o 1)*1'")

    def file_(sp):
        sp.add_argument("--file", help="input or output path")

    add("table", cmd_table, "multiplication table of A_n", n_flag, fmt("text"), conv, file_)
    add("period", cmd_period, "periods of rows", n_flag, fmt("text"), conv,
        lambda sp: sp.add_argument("--k", type=_nonneg, help="a single element"))
    add("eval", cmd_eval, "value of a word at level n", term, n_flag, conv)
    add("profile", cmd_profile, "values at levels 0..cap", term, cap, fmt("csv"))
    add("signature", cmd_signature, "largest level where a word is 0", term, cap)
    add("probe", cmd_probe, "search a level with 1*k nonzero", cap,
        lambda sp: sp.add_argument("--k", type=_positive, required=True))
    add("hprobe", cmd_hprobe, "signature of the herringbone word u_k", cap,
        lambda sp: sp.add_argument("--k", type=_nonneg, required=True))
    add("compare", cmd_compare, "decide a <_L b, a = b or a >_L b", fmt("csv"),
        lambda sp: sp.add_argument("--a", required=True),
        lambda sp: sp.add_argument("--b", required=True),
        lambda sp: sp.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL),
        lambda sp: sp.add_argument("--strategy", choices=STRATEGIES, default="auto"))
    add("normalize", cmd_normalize, "composition normal form of a word", term, fmt("text"))
    add("check-laws", cmd_check_laws, "verify table laws", n_flag, file_,
        lambda sp: sp.add_argument("--law", choices=(*LAWS, "all"), default="all"),
        lambda sp: sp.add_argument("--samples", type=_positive, help="sample count instead of exhaustive"),
        lambda sp: sp.add_argument("--seed", type=int, default=0))
    add("embed-check", cmd_embed_check, "check a candidate file", file_, fmt("text"),
        lambda sp: sp.add_argument("--no-coherence", action="store_true"))
    add("embed-critseq", cmd_embed_critseq, "critical sequence of a function", file_,
        lambda sp: sp.add_argument("--name", help="function name, or comma-separated composition"),
        lambda sp: sp.add_argument("--k", type=_positive, default=4, help="number of terms"))
    add("embed-two-sorted", cmd_embed_two_sorted, "bounded two-sorted check", file_, fmt("text"),
        lambda sp: sp.add_argument("--parts", type=_positive, default=3),
        lambda sp: sp.add_argument("--context", type=_nonneg, default=3))
    return p


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cache = TableCache(memory_cap=args.memory_cap)
    try:
        return args.func(args, cache, out)
    except FuelError as exc:
        print(f"out of fuel: {exc}", file=sys.stderr)
        return UNDECIDED
    except (LdalgError, ValueError, OSError) as exc:
        kind = "resource" if isinstance(exc, ResourceError) else "error"
        print(f"{kind}: {exc}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
