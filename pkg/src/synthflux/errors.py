"""Exception and warning types shared across the package.

Every error raised on a physics precondition (rather than plain bad input,
which uses ValueError) derives from SynthfluxError so callers can catch the
whole family at once.
"""

from __future__ import annotations

__all__ = [
    "SynthfluxError",
    "DegeneratePointError",
    "PolePatchError",
    "RefineGridError",
    "ZeroOverlapError",
    "BlowUpError",
    "NonQuantizedWarning",
]


class SynthfluxError(Exception):
    """Base class for physics-level failures."""


class DegeneratePointError(SynthfluxError):
    """The field magnitude vanished, so bands touch and no quantity that
    divides by |B| or by a band gap is defined there."""


class PolePatchError(SynthfluxError):
    """The closed-form dressed state was evaluated at (or too close to) the
    south pole of its chart, where the stereographic coordinate diverges."""


class RefineGridError(SynthfluxError):
    """A lattice plaquette phase left the principal branch, so the grid is
    too coarse for the curvature being resolved."""


class ZeroOverlapError(SynthfluxError):
    """A link overlap between neighbouring eigenstates has (numerically)
    zero modulus, so its phase is undefined."""


class BlowUpError(SynthfluxError):
    """A trajectory exceeded the configured velocity bound, which signals a
    stepsize or parameter problem rather than physical transport."""


class NonQuantizedWarning(UserWarning):
    """A flux integral failed to land near an integer at the requested
    resolution.  The raw value is still returned."""
