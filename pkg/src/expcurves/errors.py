"""Exception hierarchy shared by every module."""


class ExpCurvesError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(ExpCurvesError, ValueError):
    """Operation undefined for the given input (e.g. inverting zero)."""


class PrecisionError(ExpCurvesError):
    """A certified decision could not be reached below the precision cap.

    ``required_bits`` carries an estimate of the precision that would be
    needed, when one is known.
    """

    def __init__(self, message, required_bits=None):
        super().__init__(message)
        self.required_bits = required_bits


class BoundaryZeroError(ExpCurvesError):
    """The contour of a box passes through (or too close to) a zero."""


class RankError(ExpCurvesError, ValueError):
    """Lattice basis rows are linearly dependent."""


class InconsistencyError(ExpCurvesError):
    """A numerically detected relation failed exact verification."""


class CapError(ExpCurvesError):
    """A bounded search would exceed its configured cap."""


class HypothesisError(ExpCurvesError):
    """An input violates the hypothesis an operation relies on."""


class SearchExhaustedError(ExpCurvesError):
    """No admissible point was found within the search budget."""


class InputError(ExpCurvesError, ValueError):
    """Malformed or inadmissible user input."""


class PartialResultError(ExpCurvesError):
    """A multi-stage computation stopped early.

    ``partial`` holds whatever was completed, labelled by stage.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial if partial is not None else {}
