"""Natural-unit conventions used throughout the package.

Everything runs with hbar = m = c = 1.  Converting results back to a
particle of mass m:

    length    -> Compton wavelengths  lambda_C = hbar / (m c)
    time      -> t0 = lambda_C / c = hbar / (m c^2)
    momentum  -> m c
    energy    -> m c^2
    velocity  -> c  (components are always in [-1, 1])

No dimensional constant appears anywhere else in the package.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class UnitSystem:
    """Marker for the hbar = m = c = 1 convention plus unit labels."""

    length: str = "hbar/(m c)"
    time: str = "hbar/(m c^2)"
    momentum: str = "m c"
    energy: str = "m c^2"
    velocity: str = "c"


NATURAL = UnitSystem()
