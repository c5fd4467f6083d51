"""Exception types shared across the package.

Every failure mode that callers are expected to catch has its own class;
generic ValueError/TypeError are reserved for plain misuse of an API.
"""


class HeptamapError(Exception):
    """Base class for all package-specific failures."""


class NonPositiveDefinite(HeptamapError):
    """Imaginary part of a Riemann matrix is not positive definite."""


class NoConvergence(HeptamapError):
    """An iteration or series truncation failed to meet its tolerance."""


class BadLabel(HeptamapError):
    """Branch-point or characteristic label out of range."""


class BadSegment(HeptamapError):
    """Integration segment does not join admissible endpoints."""


class PathThroughSingularity(HeptamapError):
    """Integration path passes too close to a branch point or pole."""


class SingularSystem(HeptamapError):
    """A linear system that should be well conditioned is numerically rank
    deficient."""


class ConeViolation(HeptamapError):
    """Computed period matrix does not land in the expected real cone."""


class HumbertDegenerate(HeptamapError):
    """Theta constants vanish: the period matrix sits on a boundary stratum
    where the curve degenerates."""


class DenominatorZero(HeptamapError):
    """Theta quotient evaluated at a pole of the projection."""


class SignCheckFailed(HeptamapError):
    """Neither sign of a two-valued closed form reproduces a known value."""


class NoRootInBracket(HeptamapError):
    """A bracketed scalar root find saw no sign change."""


class ContinuationStalled(HeptamapError):
    """Predictor-corrector step size shrank below its floor."""


class LeftValidRegion(HeptamapError):
    """Continuation trajectory left the parameter cone or heptagon class."""


class AtPole(HeptamapError):
    """Map evaluated at (or too close to) one of its logarithmic poles."""


class OutsideHeptagon(HeptamapError):
    """Point is not in the closed heptagon domain."""


class WrongTile(HeptamapError):
    """A Jacobian point landed in the wrong quarter-period block."""


class InvalidHeptagon(HeptamapError):
    """Side data violates the polygon class constraints."""
