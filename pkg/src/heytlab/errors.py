class HeytlabError(Exception):
    """Base class for all errors raised by heytlab."""


class PosetError(HeytlabError, ValueError):
    pass


class AlgebraError(HeytlabError, ValueError):
    pass


class AmalgamationError(HeytlabError):
    """Raised when no certified completion is found within the search bound."""


class WitnessNotFound(HeytlabError):
    pass
