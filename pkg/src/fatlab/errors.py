"""Exception types shared across the package."""


class FatlabError(Exception):
    pass


class ShapeMismatch(FatlabError):
    pass


class NonSquare(FatlabError):
    pass


class NotInvertible(FatlabError):
    pass


class NoSolution(FatlabError):
    pass


class BadParams(FatlabError):
    pass


class MalformedTable(FatlabError):
    pass


class NotComposable(FatlabError):
    pass


class NotInvertibleInput(FatlabError):
    pass


class NotChainMap(FatlabError):
    pass


class NotCanonicalForm(FatlabError):
    pass


class HypothesisViolated(FatlabError):
    pass


class StructureNotVerified(FatlabError):
    pass


class NerveCapExceeded(FatlabError):
    pass


class DegreeTooLow(FatlabError):
    pass


class DegreeMismatch(FatlabError):
    pass


class BaseMismatch(FatlabError):
    pass


class NotMultiplicative(FatlabError):
    pass


class FiberNotCertified(FatlabError):
    pass


class CheckRequired(FatlabError):
    pass


class ValidationRequired(FatlabError):
    pass


class Malformed(FatlabError):
    pass
