"""Exception hierarchy shared by all fairad modules."""


class FairADError(Exception):
    """Base class for every error raised by fairad."""


class ValidationError(FairADError, ValueError):
    """Input violates a documented precondition."""


class ParseError(ValidationError):
    """Malformed input file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SingularityError(FairADError, ArithmeticError):
    """An operation needed D^{-1} but some node has zero degree."""

    def __init__(self, node):
        super().__init__(f"node {node} has zero degree")
        self.node = node


class NumericalError(FairADError, ArithmeticError):
    pass


class StructuralError(FairADError):
    pass


class DegeneracyError(FairADError):
    """Clustering produced an empty cluster that restarts could not repair."""


class SolverError(FairADError):
    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class StageError(FairADError):
    """Wraps a failure inside one pipeline stage and names that stage."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
