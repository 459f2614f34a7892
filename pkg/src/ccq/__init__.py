"""Copy-sensitive conjunctive queries: evaluation, mappings and equivalence tests."""

from .errors import CcqError
from .evaluator import BagDatabase, evaluate, multiplicity
from .query import Atom, Const, Query, QueryClass, Var, classify, scale_signature
from .textio import GRAMMAR_VERSION, parse_database, parse_queries, parse_query

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "BagDatabase",
    "CcqError",
    "Const",
    "GRAMMAR_VERSION",
    "Query",
    "QueryClass",
    "Var",
    "classify",
    "evaluate",
    "multiplicity",
    "parse_database",
    "parse_queries",
    "parse_query",
    "scale_signature",
    "__version__",
]
