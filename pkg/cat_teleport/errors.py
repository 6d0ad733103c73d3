"""Exceptions raised by the `cat_teleport` library. Every error the library raises on purpose
derives from `CatTeleportError`, so callers such as the CLI can catch them in one place.
"""


class CatTeleportError(Exception):
    """Base class for all library errors"""


class InvalidParameter(CatTeleportError, ValueError):
    """A parameter is outside its documented domain"""


class CapExceeded(CatTeleportError):
    """The Fock truncation needed for the requested accuracy is above the policy cap"""


class MultiModeState(CatTeleportError):
    """A single-mode operation was given a state with more than one mode"""


class BadMode(CatTeleportError):
    """A mode index is out of range, or two modes that must differ are equal"""


class ZeroState(CatTeleportError):
    """A state has (numerically) zero norm and cannot be normalized"""


class DegenerateAlpha(CatTeleportError):
    """The coherent amplitude is too small for a construction that is singular at zero"""


class SeriesDiverged(CatTeleportError):
    """A truncated series did not converge at its cutoff"""


class UnknownOutcome(CatTeleportError):
    """No correction is defined for the given measurement outcome"""


class NoBracket(CatTeleportError):
    """A root search interval does not bracket a sign change"""


class UnknownPreset(CatTeleportError):
    """A named parameter preset does not exist"""
