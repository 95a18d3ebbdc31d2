"""Exception taxonomy.

Every error the library raises deliberately is one of these, so the CLI can
map failure classes to stable exit codes (config -> 2, numerical -> 3,
infeasible -> 4).
"""


class PyrewatchError(Exception):
    """Base class for all deliberate pyrewatch errors."""


class ScenarioError(PyrewatchError, ValueError):
    """Invalid or inconsistent configuration input."""


class NumericalError(PyrewatchError, ArithmeticError):
    """An internal numerical consistency check failed."""


class InfeasibleError(PyrewatchError):
    """The requested design problem has no feasible solution."""
