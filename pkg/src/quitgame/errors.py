"""Exception hierarchy. The CLI reports the class name of any of these."""


class QuittingGameError(ValueError):
    pass


class MissingCoalition(QuittingGameError):
    pass


class BadVectorLength(QuittingGameError):
    pass


class NonFiniteEntry(QuittingGameError):
    pass


class BadPlayerCount(QuittingGameError):
    pass


class BadProfile(QuittingGameError):
    pass


class TooManyPlayers(QuittingGameError):
    pass


class BadLambda(QuittingGameError):
    pass


class BadEpsilon(QuittingGameError):
    pass


class NotEtaPerfect(QuittingGameError):
    pass


class NoQualifyingPlayer(QuittingGameError):
    pass


class AssumptionViolated(QuittingGameError):
    pass


class NoEquilibriumFound(QuittingGameError):
    pass


class ConvergenceFailure(QuittingGameError):
    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class BadCoalition(QuittingGameError):
    pass
