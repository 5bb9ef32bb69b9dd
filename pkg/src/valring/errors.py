"""Exception types with machine-readable reason codes.

The CLI maps reason codes to exit statuses: malformed input is exit 1,
mathematical rejections are exit 2.
"""


class ValringError(Exception):
    reason = "error"


class MalformedInput(ValringError):
    """Bad user input: unparsable config, wrong types, unknown fields."""
    reason = "malformed-input"


class MalformedDivisor(MalformedInput):
    reason = "malformed-divisor"


class UnsupportedNormalization(MalformedInput):
    """Generator not normalized so that every root is a unit."""
    reason = "unsupported-normalization"


class UndefinedResultant(MalformedInput):
    reason = "undefined-resultant"


class MathRejection(ValringError):
    """Input is well-formed but the mathematics rejects it."""
    reason = "rejected"


class RamifiedBranch(MathRejection):
    """A branch with non-integer value increment; e = 1 fails there."""
    reason = "ramified-branch"


class AmbiguousBranch(MathRejection):
    reason = "ambiguous-branch"


class OracleUnavailable(MathRejection):
    reason = "oracle-unavailable"


class NoConvergence(MathRejection):
    reason = "no-convergence"


class InsufficientDepth(MathRejection):
    reason = "insufficient-depth"


class NotInIdeal(MathRejection):
    reason = "not-in-ideal"


class StepCapExceeded(ValringError):
    """Rewriting exceeded its defensive step cap; indicates a bug."""
    reason = "internal-step-cap"
