"""Exception hierarchy shared by all modules."""


class NewtonInfError(Exception):
    """Base class for every error raised by the package."""


class InputError(NewtonInfError, ValueError):
    """Malformed or unsupported input (CLI exit code 2)."""


class GuardError(NewtonInfError):
    """A desk-scale size guard was exceeded (CLI exit code 3)."""


class PolySyntaxError(InputError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class NonzeroConstantTerm(InputError):
    def __init__(self, component, value, line=None):
        self.component = component
        self.value = value
        self.line = line
        loc = f" (line {line})" if line is not None else ""
        super().__init__(
            f"component {component!r}{loc} has nonzero constant term {value}; "
            "maps must satisfy F(0) = 0 (use translate_constants to subtract it)"
        )


class ConjInNonMixed(InputError):
    pass


class EmptyPolynomial(InputError):
    pass


class PointOutsideSupport(InputError):
    pass


class AlreadyReal(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class ZeroDirection(InputError):
    pass


class ZeroScaledPoint(InputError):
    pass


class OriginPoint(InputError):
    pass


class SettingNotReal(InputError):
    pass


class NotApplicable(NewtonInfError):
    pass


class DimensionTooLarge(GuardError):
    pass
