"""Exception types raised by the numerical routines.

Invalid arguments (bad shapes, out-of-range parameters) raise plain
``ValueError``; the classes below mark data-dependent numerical failures
that callers may want to catch and recover from.
"""


class NumericalError(RuntimeError):
    """Base class for data-dependent numerical failures."""


class RankDeficientError(NumericalError):
    """A matrix expected to have full column rank does not."""


class RankCollapseError(NumericalError):
    """The iterated subspace collapsed to lower rank during refinement."""


class DegenerateEmbeddingError(NumericalError):
    """A real subspace is not closed under the complex-pairing map."""


class SingularMatrixError(NumericalError):
    """A matrix required to be positive definite is singular even after
    regularization."""


class UndefinedCoherenceError(NumericalError):
    """Band coherence requested for a channel with no band power."""
