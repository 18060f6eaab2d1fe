"""Exception types raised by the library."""


class RoofError(Exception):
    """Base class for all library errors."""


class InvalidInputError(RoofError, ValueError):
    """Input is malformed (non-finite amplitudes, unnormalized state, ...)."""


class DomainError(RoofError, ValueError):
    """A scalar argument lies outside its admissible range."""


class NoCrossingError(RoofError, ValueError):
    """A chord does not cross the symmetry axis."""


class GeometryError(RoofError, ValueError):
    """A line-sphere or chord construction has no real solution."""


class DegeneratePlaneError(GeometryError):
    """Three points are collinear, so no unique plane passes through them."""


class DegeneratePolynomialError(RoofError, ValueError):
    """A tangle polynomial vanishes identically or the basis is dependent."""


class InsideObstacleError(RoofError, ValueError):
    """A visibility query was made from inside an opaque polytope."""


class ConvexificationNotNeeded(RoofError):
    """The characteristic curve is already convex; no tangent line exists."""
