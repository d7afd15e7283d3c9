"""Exception hierarchy.

Three families, matching the CLI exit codes: configuration/input problems
(exit 2), numeric failures (exit 3), and convergence failures (exit 4).
"""


class PlomError(Exception):
    """Base class for all package errors."""


# -- configuration / input errors (CLI exit code 2) -------------------------

class ConfigInvalid(PlomError):
    pass


class TooFewSamples(ConfigInvalid):
    pass


class ConstantRow(ConfigInvalid):
    """A feature row has zero spread; the caller may drop it and retry."""


class DimensionMismatch(ConfigInvalid):
    pass


class PartitionMismatch(ConfigInvalid):
    pass


class InvalidEpsilon(ConfigInvalid):
    pass


class EmptySampleList(ConfigInvalid):
    pass


# -- numeric failures (CLI exit code 3) --------------------------------------

class NumericError(PlomError):
    pass


class RankDeficiency(NumericError):
    pass


class ToleranceUnreachable(NumericError):
    def __init__(self, msg, achievable=None):
        super().__init__(msg)
        self.achievable = achievable


class NonFiniteKernel(NumericError):
    pass


class EigSolverFailure(NumericError):
    pass


class NoValidEpsilon(NumericError):
    """Kernel-scale search exhausted; carries the jump curve for inspection."""

    def __init__(self, msg, jump_curve=None):
        super().__init__(msg)
        self.jump_curve = jump_curve or []


class CholeskyFailure(NumericError):
    pass


class NumericalBlowup(NumericError):
    def __init__(self, msg, step=None):
        super().__init__(msg)
        self.step = step


# -- convergence failures (CLI exit code 4) ----------------------------------

class NoConvergence(PlomError):
    pass
