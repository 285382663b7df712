"""Left-distributive algebra toolkit: Laver tables, LD words, limit levels, embedding candidates."""

from .errors import DomainError, FormatError, FuelError, LdalgError, ResourceError, RewriteError
from .laver_tables import LaverTable, build_table, get_table, verify_law
from .term_algebra import Derivation, Term, parse, render
from .word_problem import CompareResult, Verdict, compare

__version__ = "0.1.0"
