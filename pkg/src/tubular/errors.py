"""Exception hierarchy shared by every module of the package."""


class TubularError(ValueError):
    """Base class for all errors raised by this package."""


class ZeroVector(TubularError):
    pass


class NotInLattice(TubularError):
    pass


class NotSublattice(TubularError):
    pass


class InvalidParameters(TubularError):
    pass


class ZeroScalar(TubularError):
    pass


class InvalidGroup(TubularError):
    """A tubular group failed validation; ``violations`` lists the reasons."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class EmptySelection(TubularError):
    pass


class DisconnectedSubgraph(TubularError):
    pass


class DocumentSyntaxError(TubularError):
    """Malformed JSON or word text. ``location`` is a path or character offset."""

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{message} (at {location})"
        super().__init__(message)


class SemanticError(TubularError):
    pass


class MissingEdgeEntry(TubularError):
    pass


class RankDeficientEdge(TubularError):
    pass


class TooFewEdges(TubularError):
    pass


class NotSingleVertex(TubularError):
    pass


class InvalidCertificate(TubularError):
    pass


class MalformedWord(TubularError):
    pass


class NotPrimitive(TubularError):
    pass


class ConditionViolated(TubularError):
    pass


class TrivialWord(TubularError):
    pass
