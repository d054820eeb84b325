"""Exception hierarchy.

``InputError`` subclasses signal bad user input (CLI exit code 2);
``NumericFailure`` and its subclasses signal conditioning problems
(exit code 3).  Everything derives from :class:`PolyfoldError`.
"""


class PolyfoldError(Exception):
    pass


class InputError(PolyfoldError, ValueError):
    pass


class NumericFailure(PolyfoldError, ArithmeticError):
    pass


# geometry core
class UnboundedInput(InputError):
    pass


class DegenerateInput(InputError):
    pass


class EmptyPolyhedron(InputError):
    pass


class GluingMismatch(InputError):
    pass


class NotPseudomanifold(InputError):
    pass


class NonPositiveCurvature(InputError):
    pass


# folding
class NotAdjacent(InputError):
    pass


class InvalidSequence(InputError):
    pass


# voronoi
class NotAMember(InputError):
    pass


class NotARidgeOfF(InputError):
    pass


class EmptyIntersection(PolyfoldError):
    pass


# jets
class NotAJetFrame(InputError):
    pass


class NotOuterSupport(InputError):
    pass


class TooManyTies(NumericFailure):
    pass


# unfolder
class SourceOnWarpedFace(InputError):
    pass


class EmptySet(PolyfoldError):
    pass


class NotMinimal(PolyfoldError, AssertionError):
    pass


class IterationCapExceeded(NumericFailure):
    pass


class OrphanEvent(PolyfoldError):
    pass


# geodesic
class PointOutsideFacet(InputError):
    pass


class DuplicateSources(InputError):
    pass


class NoPathFound(PolyfoldError):
    pass
