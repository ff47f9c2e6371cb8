"""Workbench for many-sorted regular logic."""
from .errors import (ArityError, BudgetExhausted, DiagramError, NotFunctional, NotInjective,
                     ParseError, PreconditionError, RegularityError, RwbError, SortError)
from .parser import parse_formula, parse_sequent, parse_theory
from .structure import Homomorphism, Structure
from .syntax import FormulaInContext, Sequent, Signature, Theory
from .kernel import BACKEND

__version__ = "0.1.0"
