"""diracpack: dual-engine simulator for free 3D Dirac wave packets.

Natural units (hbar = m = c = 1) throughout; see diracpack.units.
"""

__version__ = "0.1.0"

from .grid import BispinorField, MomentumField, MomentumGrid, PositionGrid
from .packet import (GaussianPacket, PolarizedState, PHI_AXIAL, PHI_ZPARITY,
                     axial_state, zparity_state)
from .units import NATURAL, UnitSystem

__all__ = [
    "BispinorField", "MomentumField", "MomentumGrid", "PositionGrid",
    "GaussianPacket", "PolarizedState", "PHI_AXIAL", "PHI_ZPARITY",
    "axial_state", "zparity_state", "NATURAL", "UnitSystem", "__version__",
]
