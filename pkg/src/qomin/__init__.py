"""qomin: decision procedures, quantifier elimination, and witnessed interval
normal forms for a fixed roster of ordered-group theories, verified at desk
scale by exact-arithmetic window oracles."""

from .syntax import Theory, Term, parse, print_formula

__version__ = "0.1.0"

__all__ = ["Theory", "Term", "parse", "print_formula", "__version__"]
