"""Exception hierarchy for the nehari package.

Every error raised by the library derives from :class:`NehariError` so that
callers (in particular the CLI) can map failures to exit codes in one place.
"""


class NehariError(Exception):
    """Base class for all nehari errors."""


class InvalidMesh(NehariError):
    """Mesh construction arguments are unusable (too few nodes, degenerate extents)."""


class MeshMismatch(NehariError):
    """A field or pair does not live on the mesh an operation expects."""


class UnknownPreset(NehariError):
    """A weight preset descriptor is not recognized."""


class ZeroPair(NehariError):
    """An operation defined only for nonzero pairs received the zero pair."""


class InvalidParams(NehariError):
    """Problem parameters violate the exponent chain or the (lambda, mu) constraint."""


class NotOnManifold(NehariError):
    """An on-manifold operation received diagnostics of an off-manifold pair."""


class NonpositiveT(NehariError):
    """The fibering map is only defined for scaling factors t > 0."""


class NoScaling(NehariError):
    """No scaling of the given pair lands on the requested branch."""


class InvalidConstant(NehariError):
    """A Sobolev constant fed to a certificate is not positive."""


class NonConvergence(NehariError):
    """An iteration budget was exhausted before the tolerance was met.

    Carries the partial result so diagnostics survive the failure: the solver
    attaches a ``report`` attribute, the Rayleigh-quotient descent a ``value``.
    """

    def __init__(self, message, report=None, value=None):
        super().__init__(message)
        self.report = report
        self.value = value


class BranchInfeasible(NehariError):
    """No seed admits the requested branch (e.g. Plus with a nonpositive concave term)."""


class DistinctnessFailure(NehariError):
    """The two branch solutions coincide within the distinctness threshold."""

    def __init__(self, message, distinctness=None):
        super().__init__(message)
        self.distinctness = distinctness


class ConfigNotFound(NehariError):
    """The configuration file path does not exist or is unreadable."""


class ConfigInvalid(NehariError):
    """A configuration entry failed validation.

    Records the offending key, the reason, and the 1-based line number when
    known, so the CLI can point at the exact line.
    """

    def __init__(self, key, reason, line=None):
        location = f" (line {line})" if line is not None else ""
        super().__init__(f"config key '{key}': {reason}{location}")
        self.key = key
        self.reason = reason
        self.line = line


class IoFailure(NehariError):
    """An output directory or file could not be written."""
