"""Exception hierarchy shared by every gifpsi module."""


class GifPsiError(Exception):
    """Base class for all library errors."""


class DomainError(GifPsiError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ShapeError(GifPsiError, ValueError):
    """A vector does not have the dimension of the space it is evaluated in."""


class ConfigError(GifPsiError, ValueError):
    """A sampler, grid or run configuration is malformed.

    ``diagnostics`` holds ``"path: message"`` strings, one per violated rule.
    """

    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class SearchExhaustedError(GifPsiError):
    """A witness search over a grid found nothing (non-conforming connective)."""


class UnreachableLevelError(GifPsiError):
    """The membership never reaches the requested level below the bracket cap."""


class RankError(GifPsiError, ValueError):
    """Input vectors are linearly dependent."""


class UnboundedError(GifPsiError):
    """A sequence has a coordinate that grows without bound over the window."""


class ReconstructionError(GifPsiError):
    """Coordinate tails do not settle, so no limit can be reconstructed."""


class PreconditionError(GifPsiError):
    """A documented precondition of a check does not hold."""


class ProbeError(GifPsiError):
    """A probe sequence leaves the set it is supposed to sample."""


class UnsupportedError(GifPsiError):
    """The requested set or map combination is not supported."""
