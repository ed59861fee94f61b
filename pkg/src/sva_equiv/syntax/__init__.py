"""Lexer, parser, printer and queries for the supported SVA fragment."""

from .lexer import Token, tokenize
from .nodes import *  # noqa: F401,F403
from .nodes import Identifier, walk
from .parser import parse, parse_expression
from .printer import flatten_path, render, render_expr
from .queries import (
    BOUNDED_TEMPORAL_OPS,
    LIVENESS_OPS,
    SAMPLED_OPS,
    clock_signals,
    contains_operator,
    free_identifiers,
    identifier_occurrences,
    operators,
)
