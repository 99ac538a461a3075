"""Measured quantities: densities, expectations, quadrature oracles,
trembling-motion analysis, and symmetry metrics.

Velocity components are in units of c and spins are dimensionless; every
oracle integrates the printed closed-form integrands against |f(p)|^2 with
the shared Gauss-Legendre panel stack, so oracle and grid-moment routes
stay fully independent of each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import hilbert

from .grid import BispinorField, MomentumField
from .packet import GaussianPacket, PolarizedState
from .quadrature import MomentumNodes2D, MomentumNodes3D
from .spinor import ALPHA, BETA, SIGMA_X, SIGMA_Y, SIGMA_Z

# ---------------------------------------------------------------------------
# pointwise densities


def probability_density(field) -> np.ndarray:
    """sum_i |psi_i|^2 per node; integrates to the field norm."""
    return field.density()


@dataclass
class SpinDensityField:
    sigma_x: np.ndarray
    sigma_y: np.ndarray
    sigma_z: np.ndarray
    time: float = 0.0

    def component(self, axis: str) -> np.ndarray:
        return {"x": self.sigma_x, "y": self.sigma_y, "z": self.sigma_z}[axis]


def spin_density(field) -> SpinDensityField:
    """Pointwise spin bilinears:
    Sx = 2 Re(psi1* psi2 + psi3* psi4), Sy = 2 Im(same),
    Sz = |psi1|^2 - |psi2|^2 + |psi3|^2 - |psi4|^2."""
    v = field.values
    cross = np.conj(v[0]) * v[1] + np.conj(v[2]) * v[3]
    sx = 2.0 * cross.real
    sy = 2.0 * cross.imag
    sz = (np.abs(v[0]) ** 2 - np.abs(v[1]) ** 2
          + np.abs(v[2]) ** 2 - np.abs(v[3]) ** 2)
    return SpinDensityField(sx, sy, sz, getattr(field, "time", 0.0))


# ---------------------------------------------------------------------------
# grid moments (work for both position and momentum fields: alpha and
# Sigma act pointwise)


def velocity_expectation(field) -> np.ndarray:
    """<alpha> * cell volume sums, components in c."""
    v = field.values
    ax = 2.0 * np.sum((np.conj(v[0]) * v[3] + np.conj(v[1]) * v[2]).real)
    ay = 2.0 * np.sum((np.conj(v[0]) * v[3]).imag
                      - (np.conj(v[1]) * v[2]).imag)
    az = 2.0 * np.sum((np.conj(v[0]) * v[2]).real
                      - (np.conj(v[1]) * v[3]).real)
    return np.array([ax, ay, az]) * field.grid.cell_volume


def velocity_expectation_grid(mfield: MomentumField) -> np.ndarray:
    """Momentum-representation velocity moment (spec-named entry point)."""
    return velocity_expectation(mfield)


def spin_expectation(field) -> np.ndarray:
    sd = spin_density(field)
    vol = field.grid.cell_volume
    return np.array([sd.sigma_x.sum(), sd.sigma_y.sum(),
                     sd.sigma_z.sum()]) * vol


def mean_position(field: BispinorField) -> np.ndarray:
    dens = field.density()
    total = dens.sum()
    x, y, z = field.grid.meshgrid()
    return np.array([float((dens * x).sum()), float((dens * y).sum()),
                     float((dens * z).sum())]) / total


# ---------------------------------------------------------------------------
# quadrature oracles (closed-form integrands over |f|^2)


def _nodes2d(packet: GaussianPacket, times, nodes=None) -> MomentumNodes2D:
    if nodes is not None:
        return nodes
    t_max = float(np.max(np.abs(times))) if np.size(times) else 0.0
    return MomentumNodes2D(packet, t_max)


# 8-point azimuthal means of cos(phi) and sin(phi): exactly zero up to
# rounding; multiplying radial integrals by these keeps the transverse-odd
# terms of the printed integrands as explicit self-checks instead of
# dropping them silently.
_AZ_ANGLES = 2.0 * np.pi * np.arange(8) / 8.0
_AVG_COS = float(np.cos(_AZ_ANGLES).mean())
_AVG_SIN = float(np.sin(_AZ_ANGLES).mean())


def velocity_series_axial(packet: GaussianPacket, times, *, nodes=None
                          ) -> np.ndarray:
    """Packet-center velocity for polarization (1,0,1,0)/sqrt2:

        Vx(t) = int |f|^2 [p1 p3/lam^2 (1 - cos 2 lam t) + p2/lam sin]
        Vy(t) = int |f|^2 [p2 p3/lam^2 (1 - cos 2 lam t) - p1/lam sin]
        Vz(t) = int |f|^2 [pz^2/lam^2 + (1 - pz^2/lam^2) cos 2 lam t]

    The x and y integrands are transverse-odd and vanish for the axially
    symmetric envelope; they are evaluated anyway.  Returns (len(times), 3).
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    nd = _nodes2d(packet, times, nodes)
    lam, pz, pp = nd.lam, nd.pz, nd.pp
    const = pz**2 / lam**2
    osc = 1.0 - const
    out = np.empty((len(times), 3))
    for i, t in enumerate(times):
        c2 = np.cos(2.0 * lam * t)
        s2 = np.sin(2.0 * lam * t)
        i_pp_pz = nd.integrate(pp * pz / lam**2 * (1.0 - c2))
        i_pp_s = nd.integrate(pp / lam * s2)
        out[i, 0] = _AVG_COS * i_pp_pz + _AVG_SIN * i_pp_s
        out[i, 1] = _AVG_SIN * i_pp_pz - _AVG_COS * i_pp_s
        out[i, 2] = nd.integrate(const + osc * c2)
    return out


def velocity_series_zparity(packet: GaussianPacket, times, *, nodes=None
                            ) -> np.ndarray:
    """Packet-center velocity for polarization (1,0,0,1)/sqrt2:

        Vx(t) = int |f|^2 [p1^2/lam^2 + (1 - p1^2/lam^2) cos 2 lam t]
        Vy(t) = int |f|^2 [p1 p2/lam^2 (1 - cos) + (1/lam) sin 2 lam t]
        Vz(t) = int |f|^2 [p1 p3/lam^2 (1 - cos)]

    with the azimuthal averages <p1^2> = p_perp^2/2, <p1 p2> = <p1 p3> = 0.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    nd = _nodes2d(packet, times, nodes)
    lam, pp = nd.lam, nd.pp
    p1sq = 0.5 * pp**2 / lam**2
    out = np.empty((len(times), 3))
    for i, t in enumerate(times):
        c2 = np.cos(2.0 * lam * t)
        s2 = np.sin(2.0 * lam * t)
        out[i, 0] = nd.integrate(p1sq + (1.0 - p1sq) * c2)
        out[i, 1] = nd.integrate(s2 / lam)
        out[i, 2] = _AVG_COS * nd.integrate(pp * nd.pz / lam**2 * (1.0 - c2))
    return out


def spin_series_axial(packet: GaussianPacket, times, *, nodes=None
                      ) -> np.ndarray:
    """Average spin for polarization (1,0,1,0)/sqrt2: only

        Sz(t) = int |f|^2/lam^2 [(lam^2 - p_perp^2) + p_perp^2 cos 2 lam t]

    survives; the x and y integrands are transverse-odd (evaluated anyway).
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    nd = _nodes2d(packet, times, nodes)
    lam, pp, pz = nd.lam, nd.pp, nd.pz
    out = np.empty((len(times), 3))
    for i, t in enumerate(times):
        c2 = np.cos(2.0 * lam * t)
        s2 = np.sin(2.0 * lam * t)
        i_xy = nd.integrate(pz * pp / lam**2 * (1.0 - c2))
        out[i, 0] = _AVG_SIN * nd.integrate(pp * s2 / lam) + _AVG_COS * i_xy
        out[i, 1] = -_AVG_COS * nd.integrate(pp * s2 / lam) + _AVG_SIN * i_xy
        out[i, 2] = nd.integrate(((lam**2 - pp**2) + pp**2 * c2) / lam**2)
    return out


def spin_series_zparity(packet: GaussianPacket, times, *, nodes=None
                        ) -> np.ndarray:
    """Average spin for polarization (1,0,0,1)/sqrt2:

        Sx(t) = -int |f|^2/lam^2 p3 (1 - cos 2 lam t)
        Sy(t) =  int |f|^2/lam   p3 sin 2 lam t
        Sz(t) =  int |f|^2/lam [-p2 sin + p1/lam (1 - cos)]  (vanishes)

    All three vanish for k0 = 0; for k0 != 0 the x-y pair is a transient
    precession.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    nd = _nodes2d(packet, times, nodes)
    lam, pp, pz = nd.lam, nd.pp, nd.pz
    out = np.empty((len(times), 3))
    for i, t in enumerate(times):
        c2 = np.cos(2.0 * lam * t)
        s2 = np.sin(2.0 * lam * t)
        out[i, 0] = -nd.integrate(pz * (1.0 - c2) / lam**2)
        out[i, 1] = nd.integrate(pz * s2 / lam)
        out[i, 2] = (-_AVG_SIN * nd.integrate(pp * s2 / lam)
                     + _AVG_COS * nd.integrate(pp * (1.0 - c2) / lam**2))
    return out


# ---------------------------------------------------------------------------
# constant drift for arbitrary polarization


def initial_velocity(phi) -> np.ndarray:
    """<alpha> of a normalized polarization."""
    phi = np.asarray(phi, dtype=np.complex128)
    phi = phi / np.linalg.norm(phi)
    return np.array([float((phi.conj() @ (a @ phi)).real) for a in ALPHA])


def _bracket(phi) -> tuple:
    """Polarization bilinears of the drift integrand: mass asymmetry and
    the three momentum couplings (normalized by sum |phi_i|^2)."""
    phi = np.asarray(phi, dtype=np.complex128)
    nrm2 = float(np.sum(np.abs(phi) ** 2))
    m_term = float((np.abs(phi[0])**2 + np.abs(phi[1])**2
                    - np.abs(phi[2])**2 - np.abs(phi[3])**2)) / nrm2
    cross14 = (np.conj(phi[0]) * phi[3] + np.conj(phi[2]) * phi[1]) / nrm2
    cross13 = (np.conj(phi[0]) * phi[2] - np.conj(phi[1]) * phi[3]) / nrm2
    return m_term, 2.0 * cross14.real, 2.0 * cross14.imag, 2.0 * cross13.real


def drift_velocity_general(phi, packet: GaussianPacket, *, nodes=None
                           ) -> np.ndarray:
    """Time-independent packet-center velocity for arbitrary polarization:

        V_mu0 = int |f|^2 (p_mu/lam^2) [m_term + b1 p1 + b2 p2 + b3 p3]

    where the bracket coefficients are the polarization bilinears.
    Returns all three components.
    """
    nd = nodes if nodes is not None else MomentumNodes3D(packet)
    m_term, b1, b2, b3 = _bracket(phi)
    bracket = (m_term + b1 * nd.px + b2 * nd.py + b3 * nd.pz)
    lam2 = nd.lam ** 2
    return np.array([nd.integrate(nd.px / lam2 * bracket),
                     nd.integrate(nd.py / lam2 * bracket),
                     nd.integrate(nd.pz / lam2 * bracket)])


def drift_velocity_split(phi, packet: GaussianPacket, *, nodes=None
                         ) -> tuple:
    """Decomposition of the drift into the initial-velocity term
    V_mu(0) * int |f|^2 p_mu^2/lam^2 and the mass-asymmetry term
    m_term * int |f|^2 p_mu/lam^2.  Returns (term1, term2) 3-vectors."""
    nd = nodes if nodes is not None else MomentumNodes3D(packet)
    v0 = initial_velocity(phi)
    m_term = _bracket(phi)[0]
    lam2 = nd.lam ** 2
    p = (nd.px, nd.py, nd.pz)
    term1 = np.array([v0[mu] * nd.integrate(p[mu] ** 2 / lam2)
                      for mu in range(3)])
    term2 = np.array([m_term * nd.integrate(p[mu] / lam2)
                      for mu in range(3)])
    return term1, term2


# ---------------------------------------------------------------------------
# trembling-motion extraction


class SeriesError(ValueError):
    """Series unusable for oscillation fitting."""


@dataclass
class ZbFit:
    drift: float                 # long-time constant component
    frequency: float             # dominant angular frequency
    amplitude: float             # oscillation amplitude near t=0
    envelope_times: np.ndarray
    envelope: np.ndarray

    def decay_time(self, fraction: float) -> float:
        """First time after the envelope peak where it stays below
        fraction * peak; inf when it never does."""
        peak_idx = int(np.argmax(self.envelope))
        target = fraction * self.envelope[peak_idx]
        below = np.nonzero(self.envelope[peak_idx:] < target)[0]
        if len(below) == 0:
            return float("inf")
        return float(self.envelope_times[peak_idx + below[0]])


def zb_fit(times, values) -> ZbFit:
    """Separate constant drift from the oscillatory part of a series.

    Drift = mean over the trailing half of the window; frequency = Hann
    windowed rFFT peak with parabolic interpolation; envelope = |analytic
    signal| of the drift-subtracted series (edge-windowed).
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.ndim != 1 or times.shape != values.shape or len(times) < 32:
        raise SeriesError("need a 1D series with at least 32 samples")
    dt = np.diff(times)
    if not np.allclose(dt, dt[0], rtol=1e-8):
        raise SeriesError("series must be uniformly sampled")
    dt = float(dt[0])
    if dt <= 0:
        raise SeriesError("times must be strictly increasing")

    drift = float(values[times >= times[0] + 0.5 * (times[-1] - times[0])]
                  .mean())
    osc = values - drift
    n = len(osc)
    window = np.hanning(n)
    spec = np.abs(np.fft.rfft(osc * window))
    freqs = 2.0 * np.pi * np.fft.rfftfreq(n, dt)
    k = int(np.argmax(spec[1:]) + 1)
    if k >= len(spec) - 1:
        raise SeriesError("dominant frequency at Nyquist: undersampled")
    # parabolic peak interpolation
    a, b, c = spec[k - 1], spec[k], spec[k + 1]
    denom = a - 2.0 * b + c
    shift = 0.0 if denom == 0 else 0.5 * (a - c) / denom
    freq = float(freqs[k] + shift * (freqs[1] - freqs[0]))

    env = np.abs(hilbert(osc))
    amplitude = float(np.max(np.abs(osc[: max(8, n // 16)])))
    if np.max(np.abs(osc)) < 1e-14 * max(1.0, abs(drift)):
        freq, amplitude = 0.0, 0.0
    return ZbFit(drift, freq, amplitude, times, env)


def drift_from_series(times, values) -> float:
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    half = times >= times[0] + 0.5 * (times[-1] - times[0])
    return float(values[half].mean())


# ---------------------------------------------------------------------------
# discrete symmetries and conservation metrics


def _reflect(values: np.ndarray, axis: int) -> np.ndarray:
    """Index map j -> (n - j) mod n: exact mirror about the centered
    origin node."""
    return np.roll(np.flip(values, axis=axis + 1), 1, axis=axis + 1)


_SYMMETRY_OPS = {
    "P": (BETA, (0, 1, 2), False),
    "P_xy": (SIGMA_Z, (0, 1), False),
    "P_x": (SIGMA_X @ BETA, (0,), False),
    "P_y": (SIGMA_Y @ BETA, (1,), False),
    "P_z": (SIGMA_Z @ BETA, (2,), False),
    "antiunitary_x": (ALPHA[0], (2,), True),
}


def apply_discrete_symmetry(field: BispinorField, op: str) -> BispinorField:
    """Apply one of P, P_xy, P_x, P_y, P_z or the antiunitary alpha_x K R_z
    map to a sampled field (exact index reflections)."""
    try:
        matrix, axes, conjugate = _SYMMETRY_OPS[op]
    except KeyError:
        raise ValueError(f"unknown symmetry op {op!r}; "
                         f"choose from {sorted(_SYMMETRY_OPS)}") from None
    v = field.values
    for ax in axes:
        v = _reflect(v, ax)
    if conjugate:
        v = np.conj(v)
    v = np.einsum("ab,b...->a...", matrix, v)
    return BispinorField(field.grid, v, field.time)


def parity_metric(density: np.ndarray, axes) -> float:
    """Normalized max deviation of a density under exact index
    reflection of the given axes (unpaired extreme plane excluded)."""
    refl = density
    mask = np.ones_like(density, dtype=bool)
    for ax in axes:
        refl = np.roll(np.flip(refl, axis=ax), 1, axis=ax)
        sl = [slice(None)] * density.ndim
        sl[ax] = 0
        mask[tuple(sl)] = False
    peak = float(density.max())
    if peak == 0.0:
        return 0.0
    return float(np.abs((density - refl)[mask]).max() / peak)


def axial_metric_grid(density: np.ndarray, grid, n_angles: int = 16) -> float:
    """Rotation-sampling axial metric with bilinear interpolation in the
    x-y planes.  Interpolation error floors this at O(h^2); use
    axial_metric_spectral for tight bounds on spectral fields."""
    x, y = grid.axis(0), grid.axis(1)
    nx, ny = len(x), len(y)
    xx, yy = np.meshgrid(x, y, indexing="ij")
    peak = float(density.max())
    if peak == 0.0:
        return 0.0
    worst = 0.0
    for k in range(1, n_angles):
        th = 2.0 * np.pi * k / n_angles
        xr = np.cos(th) * xx - np.sin(th) * yy
        yr = np.sin(th) * xx + np.cos(th) * yy
        fx = (xr - x[0]) / grid.spacing[0]
        fy = (yr - y[0]) / grid.spacing[1]
        inside = (fx >= 0) & (fx <= nx - 1) & (fy >= 0) & (fy <= ny - 1)
        fx = np.clip(fx, 0, nx - 1 - 1e-9)
        fy = np.clip(fy, 0, ny - 1 - 1e-9)
        ix = fx.astype(int)
        iy = fy.astype(int)
        ax = fx - ix
        ay = fy - iy
        d00 = density[ix, iy, :]
        d10 = density[ix + 1, iy, :]
        d01 = density[ix, iy + 1, :]
        d11 = density[ix + 1, iy + 1, :]
        w = ((1 - ax) * (1 - ay))[..., None] * d00 \
            + (ax * (1 - ay))[..., None] * d10 \
            + ((1 - ax) * ay)[..., None] * d01 \
            + (ax * ay)[..., None] * d11
        diff = np.abs(w - density) * inside[..., None]
        worst = max(worst, float(diff.max()))
    return worst / peak


def axial_metric_spectral(engine, t: float, z_values, radii,
                          n_angles: int = 16) -> float:
    """Axial metric by direct off-grid synthesis on rings: compares the
    band-limited density at rotated sample points, so it is free of
    interpolation error."""
    radii = np.asarray(radii, dtype=float)
    angles = 2.0 * np.pi * np.arange(n_angles) / n_angles
    worst = 0.0
    peak = 0.0
    for z0 in np.atleast_1d(z_values):
        xs = (radii[:, None] * np.cos(angles)[None, :]).ravel()
        ys = (radii[:, None] * np.sin(angles)[None, :]).ravel()
        vals = engine.plane_values_at(t, 2, float(z0), xs, ys)
        dens = np.sum(np.abs(vals) ** 2, axis=0).reshape(len(radii),
                                                         n_angles)
        peak = max(peak, float(dens.max()))
        worst = max(worst, float((dens.max(axis=1) - dens.min(axis=1)).max()))
    return worst / peak if peak > 0 else 0.0


def symmetry_metrics(field: BispinorField, which: str,
                     n_angles: int = 16) -> float:
    """Named grid metrics: 'axial', 'z-parity', or 'xy-parity'."""
    dens = field.density()
    if which == "axial":
        return axial_metric_grid(dens, field.grid, n_angles)
    if which == "z-parity":
        return parity_metric(dens, (2,))
    if which == "xy-parity":
        return parity_metric(dens, (0, 1))
    raise ValueError(f"unknown metric {which!r}")
