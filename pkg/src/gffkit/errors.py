"""Exception hierarchy shared by all gffkit modules."""


class GFFKitError(Exception):
    """Base class for every error raised by gffkit."""


class PartitionCapError(GFFKitError, ValueError):
    def __init__(self, n, cap, bell):
        self.n = n
        self.cap = cap
        self.bell = bell
        super().__init__(
            f"refusing to enumerate partitions of {n} elements: Bell({n}) = {bell} "
            f"partitions exceeds the configured cap n <= {cap} (pass cap=None to override)"
        )


class MissingEntryError(GFFKitError, KeyError):
    """A correlator table has no value for a requested argument tuple."""


class NormalisationError(GFFKitError, ValueError):
    """Moments with omega_0 != 1."""


class OrderError(GFFKitError, ValueError):
    """Requested order is outside the range an operation or state supports."""


class CommutatorTableError(GFFKitError, KeyError):
    """Generator without a commutator value."""


class QueryError(GFFKitError, ValueError):
    """Malformed wavefront query (e.g. one lying on the zero section)."""


class UnsupportedBoundError(GFFKitError, NotImplementedError):
    """Intersection leaves the class of product forms handled exactly."""


class PreconditionError(GFFKitError, ValueError):
    """An input violates a documented precondition."""


class QuadratureError(GFFKitError, ArithmeticError):
    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics or {}
        super().__init__(f"{message} {self.diagnostics}" if diagnostics else message)


class ConfigError(GFFKitError, ValueError):
    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))
