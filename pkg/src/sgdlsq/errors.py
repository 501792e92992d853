"""Exception types raised across the package."""


class DimensionMismatch(ValueError):
    """Two containers that must agree in length do not.

    Carries both lengths so callers can report them without parsing the
    message.
    """

    def __init__(self, what, expected, got):
        self.expected = int(expected)
        self.got = int(got)
        super().__init__(f"{what}: expected length {expected}, got {got}")


class BackendMismatch(ValueError):
    """Operands live in different hypothesis-space realizations."""


class KernelDomainError(ValueError):
    """Kernel input outside the kernel's domain of definition."""


class DivergenceError(RuntimeError):
    """An iterate left the admissible range (non-finite or > 1e12)."""

    def __init__(self, iteration, detail=""):
        self.iteration = int(iteration)
        msg = f"iterate diverged at iteration {iteration}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class DataFormatError(ValueError):
    """Malformed tabular input. ``line_no`` is 1-based."""

    def __init__(self, message, line_no):
        self.line_no = int(line_no)
        super().__init__(f"line {line_no}: {message}")


class EmptyDataError(DataFormatError):
    pass


class RaggedRowError(DataFormatError):
    pass


class NonNumericError(DataFormatError):
    pass
