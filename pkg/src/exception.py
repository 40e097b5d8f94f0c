
# Custom exception class
class CustomException(Exception):
    def __init__(self, message, *args):
        super().__init__(message, *args)
        self.message = message

    def __str__(self):
        return f"{type(self).__name__}: {self.message}"


class InvalidInputError(CustomException, ValueError):
    """Bad parameters or malformed strategies."""


class OracleLimitError(CustomException):
    """A brute-force oracle was asked for more than its guard allows."""


class SizeLimitError(CustomException):
    """Strategy enumeration exceeds the configured cap."""

    def __init__(self, message, rows: int, cols: int, cap: int):
        super().__init__(message)
        self.rows = rows
        self.cols = cols
        self.cap = cap

    def __reduce__(self):
        # keep the required constructor args so the error survives a worker process boundary
        return (type(self), (self.message, self.rows, self.cols, self.cap))


class MatrixFileError(CustomException):
    pass


class MatrixVersionError(MatrixFileError):
    pass


class CorruptMatrixFileError(MatrixFileError):
    pass


class MatrixSpecMismatchError(MatrixFileError):
    pass


class SolverError(CustomException):
    """The LP backend failed or returned a solution outside its certificate."""


class ConvergenceError(CustomException):
    """Double oracle hit its iteration cap.

    `equilibrium` holds the last restricted equilibrium so callers can still report it.
    """

    def __init__(self, message, equilibrium=None):
        super().__init__(message)
        self.equilibrium = equilibrium

