"""Exception hierarchy.

Everything raised on purpose by catgrav derives from :class:`CatgravError`, so
callers (the CLI in particular) can separate configuration problems from
numerical failures.
"""


class CatgravError(Exception):
    pass


class ConfigError(CatgravError, ValueError):
    pass


class InvalidDimensionError(ConfigError):
    pass


class TruncationError(ConfigError):
    pass


class DegenerateBasisError(ConfigError):
    pass


class UndefinedBaselineError(ConfigError):
    pass


class ContractViolation(CatgravError, ValueError):
    pass


class NumericalError(CatgravError, ArithmeticError):
    pass


class StiffnessError(NumericalError):
    def __init__(self, t, h):
        super().__init__(f"step size underflow (h={h:.3e} s) at t={t:.6e} s")
        self.t = t
        self.h = h


class StepInstabilityError(NumericalError):
    pass


class InsensitivePointError(NumericalError):
    pass


class DegenerateStatisticsError(NumericalError):
    pass
