"""Exception types shared across the package."""


class GraphPotError(Exception):
    """Base class for every error raised by graphpot."""


class GraphError(GraphPotError, ValueError):
    """Malformed graph, region or vertex reference."""


class UnknownVertexError(GraphError, KeyError):
    def __init__(self, vertex):
        super().__init__(f"unknown vertex {vertex!r}")
        self.vertex = vertex

    def __str__(self):
        return self.args[0]


class UndefinedValueError(GraphPotError, KeyError):
    """A graph function was read at a vertex outside its domain."""

    def __init__(self, vertex):
        super().__init__(f"function undefined at vertex {vertex!r}")
        self.vertex = vertex

    def __str__(self):
        return self.args[0]


class PreconditionError(GraphPotError, ValueError):
    """Inputs violate an operation's stated precondition."""


class SingularSystemError(GraphPotError, ArithmeticError):
    """The Dirichlet operator is not positive definite on the region."""


class ConvergenceError(GraphPotError, ArithmeticError):
    """An iterative method hit its iteration cap."""


class PositivityError(GraphPotError, ArithmeticError):
    """A solution that must be strictly positive is not."""


class ResourceCapError(GraphPotError, MemoryError):
    """A requested object would exceed the configured vertex cap."""


class FormatError(GraphPotError, ValueError):
    """Parse failure in a graph, function, region or report file."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
