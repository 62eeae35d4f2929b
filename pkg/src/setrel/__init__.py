"""setrel: a satisfiability solver for quantifier-free constraints over
finite sets and relations with Cartesian product, a filter operator, and
set-bounded quantifiers."""

__version__ = "0.1.0"
