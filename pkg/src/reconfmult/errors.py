"""Exception hierarchy shared by the simulator modules."""


class ValidationError(ValueError):
    """Base class for rejected inputs; the CLI maps it to a validation exit code."""


class WidthOverflow(ValidationError):
    pass


class ZeroWidth(ValidationError):
    pass


class UnsupportedPartitioning(ValidationError):
    pass


class OperandOverflow(ValidationError):
    pass


class NetlistError(ValidationError):
    pass
