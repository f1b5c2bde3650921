"""Exception types shared across the toolkit."""


class CroftonLabError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(CroftonLabError):
    """Operands have incompatible ambient dimensions or ranks."""


class RankDeficient(CroftonLabError):
    """Input vectors are numerically dependent (smallest singular value below threshold)."""


class NotUnit(CroftonLabError):
    """A vector expected to have unit norm does not."""


class DegenerateVector(CroftonLabError):
    """A vector fails a non-degeneracy precondition."""


class DegenerateLine(CroftonLabError):
    """Two points meant to span a projective line are projectively dependent."""


class IdenticallyZero(CroftonLabError):
    """A restricted polynomial vanishes identically (the line lies inside the curve)."""


class ConfigError(CroftonLabError):
    """A run configuration fails validation."""
