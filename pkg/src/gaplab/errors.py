"""Exception types shared across the package."""


class GaplabError(Exception):
    """Base class for all package-specific errors."""


class DegenerateDomain(GaplabError):
    """Polygon is not strictly convex / has (near-)zero area."""


class InvalidChord(GaplabError):
    """Chord endpoints are not contained in the polygon."""


class JohnSolveFailed(GaplabError):
    """Inscribed-ellipse optimization did not converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class EmptyCut(GaplabError):
    """Cutting line misses the polygon interior (or leaves a sliver)."""


class NotLogConcave(GaplabError):
    """Weight fails the discrete log-concavity test."""


class DegenerateWeight(GaplabError):
    """Weight vanishes on a set of positive measure."""


class SolverFailed(GaplabError):
    """Eigenvalue solve did not converge."""


class ResolutionError(GaplabError):
    """Grid too coarse to resolve the domain."""


class FitUnderdetermined(GaplabError):
    """Not enough family points for a least-squares exponent fit."""


class PreconditionError(GaplabError):
    """Documented operation precondition violated by the input."""
