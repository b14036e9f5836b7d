"""Exception types shared across the package."""


class SplinegaleError(Exception):
    """Base class for all library errors."""


class AtomTooSmall(SplinegaleError):
    """A partition split would create an atom below the minimum length."""


class NotARefinement(SplinegaleError):
    """The finer grid does not contain every breakpoint of the coarser one."""


class DegreeOverflow(SplinegaleError):
    """A piecewise-polynomial operation exceeded the configured degree cap."""


class QuadratureNonConvergence(SplinegaleError):
    """Adaptive quadrature hit the maximum subdivision depth."""


class EmptySet(SplinegaleError):
    """An interval union with zero measure where positive measure is required."""


class SingularGram(SplinegaleError):
    """Gram matrix factorization failed; signals a basis construction bug."""


class BoundViolation(SplinegaleError):
    """A hard kernel bound failed at construction time; signals a bug."""


class ParameterError(SplinegaleError):
    """Parameters outside the admissible range of an inequality."""


class ZeroFunction(SplinegaleError):
    """An input function is identically zero where that is not allowed."""


class NotAdapted(SplinegaleError):
    """A sequence member does not lie in the spline space of its level."""


class PropertyViolation(SplinegaleError):
    """A property that holds by theorem failed numerically; signals a bug."""


class InstanceInvalid(SplinegaleError):
    """A disjoint-allocation instance violates its feasibility assumption."""


class InternalExhaustion(SplinegaleError):
    """Greedy allocation ran out of room on a valid instance (bug signal)."""


class GenerationExhausted(SplinegaleError):
    """Random generation failed to satisfy constraints within the retry cap."""


class InvalidConfig(SplinegaleError):
    """Malformed or out-of-range experiment configuration."""


class NumericalGuard(SplinegaleError):
    """An internal cross-check (e.g. sampled vs analytic sup) disagreed."""
