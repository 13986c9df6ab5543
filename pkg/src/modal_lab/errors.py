"""Exception hierarchy shared by every module."""


class ModalLabError(Exception):
    """Base class for all errors raised by modal_lab."""


class NotHermitian(ModalLabError):
    pass


class NotPSD(ModalLabError):
    pass


class NotPositiveDefinite(ModalLabError):
    pass


class DimensionMismatch(ModalLabError):
    pass


class DegenerateCenter(ModalLabError):
    pass


class BadLegSet(ModalLabError):
    pass


class NotUnitVector(ModalLabError):
    pass


class NotAState(ModalLabError):
    pass


class NotFaithful(ModalLabError):
    pass


class NotInAlgebra(ModalLabError):
    pass


class NoDouble(ModalLabError):
    pass


class BadCoefficients(ModalLabError):
    pass
