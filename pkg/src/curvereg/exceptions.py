"""Exception hierarchy for curvereg.

All library errors derive from :class:`CurveregError` so callers can catch a
single base class at API boundaries (the CLI maps subclasses to exit codes).
"""


class CurveregError(Exception):
    """Base class for all curvereg errors."""


# --- geometry -------------------------------------------------------------

class GeometryError(CurveregError):
    """Base class for errors raised by the closed-form pose machinery."""


class ZeroVector(GeometryError):
    """A vector that must be nonzero has (numerically) zero length."""


class DegenerateBaseline(GeometryError):
    """The two points of a 2-tuple are closer than the minimum baseline."""


class DegenerateElevation(GeometryError):
    """A tuple vector is parallel to the baseline; azimuth is undefined."""


class NoConsistentSolution(GeometryError):
    """The null space of the constraint matrix is not a valid (cos, sin) pair.

    Raised when two 2-tuples do not admit a rigid motion placing the curve
    tangents in the surface tangent planes.
    """


class RankDeficientM(GeometryError):
    """The 2x3 constraint matrix is rank deficient; the angle is not unique."""


class InconsistentSecondVector(GeometryError):
    """Second vector of a same-kind tuple pair fails to align after the pose
    is fixed by the first vector."""


# --- differential estimation ---------------------------------------------

class EstimationError(CurveregError):
    """Base class for normal/tangent estimation errors."""


class TooFewPoints(EstimationError):
    """Not enough points for the requested neighbourhood size."""


class DegenerateNeighborhood(EstimationError):
    """Neighbourhood covariance has no well-separated smallest eigenvalue."""


class SegmentTooShort(EstimationError):
    """A polyline segment has fewer than 3 points."""


# --- matching / index ------------------------------------------------------

class MatchingError(CurveregError):
    """Base class for pair-index errors."""


class EmptySurface(MatchingError):
    """No surface samples available to index."""


class NoValidPairs(MatchingError):
    """No point pair passed the baseline / elevation gates."""


# --- registration ----------------------------------------------------------

class NoHypothesisFound(CurveregError):
    """RANSAC never produced a single valid pose hypothesis."""


# --- i/o and benchmark -----------------------------------------------------

class ParseError(CurveregError):
    """A model/curve/config file failed to parse.

    Attributes
    ----------
    path : str
    line : int or None
        1-based line number of the offending record, when known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        loc = ""
        if path is not None:
            loc = f"{path}"
            if line is not None:
                loc += f":{line}"
            loc = f" ({loc})"
        super().__init__(f"{message}{loc}")


class DegenerateModel(CurveregError):
    """Model has zero extent; diameter normalization impossible."""


class FractionUnsupported(CurveregError):
    """Requested curve subset fraction is not one of the supported values."""
