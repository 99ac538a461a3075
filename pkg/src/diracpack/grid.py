"""Regular 3D sample lattices and bispinor field containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PositionGrid:
    """Regular lattice with centered node offsets x_i = (i - n//2) * dx.

    Spacings must stay below one Compton wavelength (the resolution
    condition for trembling-motion runs); with even node counts the
    origin plane is a node and index reflection j -> (n - j) mod n is an
    exact mirror map.
    """

    shape: tuple            # (nx, ny, nz)
    spacing: tuple          # (dx, dy, dz), Compton wavelengths

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        spacing = tuple(float(d) for d in self.spacing)
        if len(shape) != 3 or len(spacing) != 3:
            raise ValueError("shape and spacing must have 3 entries")
        if any(n < 4 for n in shape):
            raise ValueError(f"grid too small: {shape}")
        if any(d <= 0 for d in spacing):
            raise ValueError(f"spacings must be positive: {spacing}")
        if any(d >= 1.0 for d in spacing):
            raise ValueError(
                f"spacing {spacing} violates the Compton resolution "
                "condition (all spacings must be < 1)")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "spacing", spacing)

    @classmethod
    def cubic(cls, n: int, d: float) -> "PositionGrid":
        return cls((n, n, n), (d, d, d))

    @property
    def is_uniform(self) -> bool:
        dx, dy, dz = self.spacing
        return dx == dy == dz

    @property
    def cell_volume(self) -> float:
        dx, dy, dz = self.spacing
        return dx * dy * dz

    def axis(self, k: int) -> np.ndarray:
        n, d = self.shape[k], self.spacing[k]
        return (np.arange(n) - n // 2) * d

    def axes(self):
        return self.axis(0), self.axis(1), self.axis(2)

    def meshgrid(self):
        return np.meshgrid(*self.axes(), indexing="ij", sparse=True)

    def momentum_grid(self) -> "MomentumGrid":
        axes = tuple(
            2.0 * np.pi * np.fft.fftfreq(n, d)
            for n, d in zip(self.shape, self.spacing))
        return MomentumGrid(self.shape, axes, self)


@dataclass(frozen=True)
class MomentumGrid:
    """FFT-dual lattice of a PositionGrid (fftfreq ordering)."""

    shape: tuple
    axes_1d: tuple                  # (px, py, pz) 1D arrays
    position_grid: PositionGrid = field(repr=False)

    @property
    def cell_volume(self) -> float:
        g = self.position_grid
        return float(np.prod([2.0 * np.pi / (n * d)
                              for n, d in zip(g.shape, g.spacing)]))

    def meshgrid(self):
        return np.meshgrid(*self.axes_1d, indexing="ij", sparse=True)

    def magnitude_sq(self) -> np.ndarray:
        px, py, pz = self.meshgrid()
        return px**2 + py**2 + pz**2


@dataclass
class BispinorField:
    """Four complex amplitudes per node of a position grid, time-stamped."""

    grid: PositionGrid
    values: np.ndarray              # (4, nx, ny, nz) complex128
    time: float = 0.0

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.shape != (4, *self.grid.shape):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"{(4, *self.grid.shape)}")

    def density(self) -> np.ndarray:
        return np.sum(np.abs(self.values) ** 2, axis=0)

    def norm(self) -> float:
        """Discrete norm sum |psi|^2 * cell volume."""
        v = self.values
        return float(np.vdot(v, v).real * self.grid.cell_volume)

    def copy(self) -> "BispinorField":
        return BispinorField(self.grid, self.values.copy(), self.time)


@dataclass
class MomentumField:
    """Momentum-space counterpart of BispinorField."""

    grid: MomentumGrid
    values: np.ndarray              # (4, nx, ny, nz) complex128
    time: float = 0.0

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.shape != (4, *self.grid.shape):
            raise ValueError("values shape does not match grid")

    def density(self) -> np.ndarray:
        return np.sum(np.abs(self.values) ** 2, axis=0)

    def norm(self) -> float:
        v = self.values
        return float(np.vdot(v, v).real * self.grid.cell_volume)
