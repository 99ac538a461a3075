"""Exact time evolution in momentum space and synthesis back to a grid.

Free evolution is diagonal per momentum mode:

    psi(p, t) = exp(-i H(p) t) psi(p, 0),
    H(p) = alpha.p + beta,  H^2 = lambda_p^2,

so the propagator is cos(lambda t) - i sin(lambda t) H(p)/lambda.  The
engine samples the initial state on a position grid, transforms with the
e^{i p r}/(2 pi)^{3/2} plane-wave convention (so the t = 0 round trip is
exact to rounding), evolves per mode, and synthesizes snapshots by inverse
FFT.  Per-mode closed forms for the two concrete polarizations and the
positive/negative-energy splits live here as well.
"""

from __future__ import annotations

import numpy as np
import scipy.fft as sfft

from .grid import BispinorField, MomentumField, MomentumGrid, PositionGrid
from .packet import PolarizedState, envelope_momentum_radial, initial_bispinor_field
from .quadrature import MomentumNodes2D, gaussian_cutoff, gl_nodes, integrate_1d
from .spinor import free_spinor, project_coefficients

_WORKERS = -1          # let pocketfft use all cores
ALIAS_GATE = 1e-6      # max spectral mass fraction on the Nyquist shell


class SpectralAliasError(RuntimeError):
    """Initial state carries non-negligible mass at the grid Nyquist."""


# ---------------------------------------------------------------------------
# per-mode evolution

def evolve_mode_general(phi, p, t: float) -> np.ndarray:
    """Evolve one momentum mode of a (normalized) polarization by the
    explicit eigenbasis sum sum_r C_r U_r exp(-i E_r t); the momentum
    envelope is factored out by linearity."""
    c = project_coefficients(phi, p)
    lam = np.sqrt(1.0 + np.dot(p, p))
    out = np.zeros(4, dtype=np.complex128)
    for r in (1, 2, 3, 4):
        e_r = lam if r in (1, 2) else -lam
        out += c[r - 1] * free_spinor(r, p).u * np.exp(-1j * e_r * t)
    return out


def evolve_mode_axial(p, t: float) -> np.ndarray:
    """Closed form for polarization (1,0,1,0)/sqrt(2); components 2 and 4
    stay identical for all (p, t)."""
    p1, p2, p3 = (float(c) for c in p)
    lam = np.sqrt(1.0 + p1 * p1 + p2 * p2 + p3 * p3)
    em = np.exp(-1j * lam * t)
    ep = np.exp(1j * lam * t)
    a = (1.0 + p3) / lam
    b = (1.0 - p3) / lam
    s = 1.0 / (2.0 * np.sqrt(2.0))
    psi1 = s * (em * (1.0 + a) + ep * (1.0 - a))
    psi3 = s * (em * (1.0 - b) + ep * (1.0 + b))
    psi24 = -1j * (p1 + 1j * p2) / (lam * np.sqrt(2.0)) * np.sin(lam * t)
    return np.array([psi1, psi24, psi3, psi24])


def evolve_mode_zparity(p, t: float) -> np.ndarray:
    """Closed form for polarization (1,0,0,1)/sqrt(2); components 2 and 3
    stay opposite for all (p, t)."""
    p1, p2, p3 = (float(c) for c in p)
    lam = np.sqrt(1.0 + p1 * p1 + p2 * p2 + p3 * p3)
    em = np.exp(-1j * lam * t)
    ep = np.exp(1j * lam * t)
    a = (1.0 + (p1 - 1j * p2)) / lam
    b = (1.0 - (p1 + 1j * p2)) / lam
    s = 1.0 / (2.0 * np.sqrt(2.0))
    psi1 = s * (em * (1.0 + a) + ep * (1.0 - a))
    psi4 = s * (em * (1.0 - b) + ep * (1.0 + b))
    psi2 = 1j * p3 / (lam * np.sqrt(2.0)) * np.sin(lam * t)
    return np.array([psi1, psi2, -psi2, psi4])


# ---------------------------------------------------------------------------
# vectorized momentum-space algebra

def apply_h_momentum(values, px, py, pz) -> np.ndarray:
    """(alpha.p + beta) applied elementwise over momentum arrays.

    values has shape (4, ...) broadcastable with px/py/pz.
    """
    v0, v1, v2, v3 = values
    out = np.empty_like(values)
    out[0] = (px - 1j * py) * v3 + pz * v2 + v0
    out[1] = (px + 1j * py) * v2 - pz * v3 + v1
    out[2] = (px - 1j * py) * v1 + pz * v0 - v2
    out[3] = (px + 1j * py) * v0 - pz * v1 - v3
    return out


def _axis_phases(grid: PositionGrid, mgrid: MomentumGrid, sign: float):
    """Per-axis factors exp(sign * i * p * x_first_node)."""
    phases = []
    for k in range(3):
        x0 = grid.axis(k)[0]
        phases.append(np.exp(sign * 1j * mgrid.axes_1d[k] * x0))
    return phases


def to_momentum(field: BispinorField) -> MomentumField:
    """Forward transform; approximates the continuum f-convention so that
    sum |psi(p)|^2 d^3p equals the discrete position norm."""
    grid = field.grid
    mgrid = grid.momentum_grid()
    scale = grid.cell_volume / (2.0 * np.pi) ** 1.5
    phx, phy, phz = _axis_phases(grid, mgrid, -1.0)
    out = np.empty_like(field.values)
    for c in range(4):
        out[c] = sfft.fftn(field.values[c], workers=_WORKERS)
    out *= scale
    out *= phx[:, None, None]
    out *= phy[None, :, None]
    out *= phz[None, None, :]
    return MomentumField(mgrid, out, field.time)


def to_position(mfield: MomentumField) -> BispinorField:
    """Inverse of to_momentum."""
    grid = mfield.grid.position_grid
    scale = (2.0 * np.pi) ** 1.5 / grid.cell_volume
    phx, phy, phz = _axis_phases(grid, mfield.grid, +1.0)
    tmp = mfield.values * phx[:, None, None]
    tmp *= phy[None, :, None]
    tmp *= phz[None, None, :]
    out = np.empty_like(tmp)
    for c in range(4):
        out[c] = sfft.ifftn(tmp[c], workers=_WORKERS)
    out *= scale
    return BispinorField(grid, out, mfield.time)


def nyquist_mass_fraction(mfield: MomentumField) -> float:
    """Spectral mass fraction on the three Nyquist planes."""
    v2 = mfield.density()
    total = float(v2.sum())
    if total == 0.0:
        return 0.0
    nx, ny, nz = v2.shape
    mass = float(v2[nx // 2, :, :].sum() + v2[:, ny // 2, :].sum()
                 + v2[:, :, nz // 2].sum())
    return mass / total


class SpectralEngine:
    """Evolves a sampled initial state exactly, snapshot by snapshot.

    The Nyquist planes of the initial spectrum are projected out: those
    modes are self-paired under reflection yet carry an unpairable
    momentum sign, so any amplitude there (bounded by the alias gate, in
    practice the box-truncation floor of the envelope tails) would break
    the exact parity/rotation pairing of the lattice evolution.
    """

    def __init__(self, initial: BispinorField, check_alias: bool = True):
        self.grid = initial.grid
        mfield = to_momentum(initial)
        self.mgrid = mfield.grid
        if check_alias:
            frac = nyquist_mass_fraction(mfield)
            if frac > ALIAS_GATE:
                raise SpectralAliasError(
                    f"spectral mass at Nyquist = {frac:.3e} exceeds "
                    f"{ALIAS_GATE:.0e}; refine the grid")
        for axis, n in enumerate(self.mgrid.shape):
            if n % 2 == 0:
                sl = [slice(None)] * 4
                sl[1 + axis] = n // 2
                mfield.values[tuple(sl)] = 0.0
        px, py, pz = self.mgrid.meshgrid()
        self.lam = np.sqrt(1.0 + px**2 + py**2 + pz**2)
        self.psi0 = mfield.values
        self.h_psi0 = apply_h_momentum(self.psi0, px, py, pz)

    @classmethod
    def from_state(cls, state: PolarizedState, grid: PositionGrid,
                   normalize: bool = True, check_alias: bool = True):
        fld = initial_bispinor_field(state, grid, normalize=normalize)
        return cls(fld, check_alias=check_alias)

    def momentum_values_at(self, t: float) -> np.ndarray:
        ph_c = np.cos(self.lam * t)
        ph_s = np.sin(self.lam * t) / self.lam
        return ph_c * self.psi0 - 1j * ph_s * self.h_psi0

    def momentum_field_at(self, t: float) -> MomentumField:
        return MomentumField(self.mgrid, self.momentum_values_at(t), t)

    def field_at(self, t: float) -> BispinorField:
        return to_position(self.momentum_field_at(t))

    def split_momentum_values(self):
        """Time-independent positive/negative-energy projections at t=0
        (their moduli never change; phases evolve as exp(-/+ i lambda t))."""
        plus = 0.5 * (self.psi0 + self.h_psi0 / self.lam)
        minus = 0.5 * (self.psi0 - self.h_psi0 / self.lam)
        return plus, minus

    def norm(self) -> float:
        v = self.psi0
        return float(np.vdot(v, v).real * self.mgrid.cell_volume)

    def plane_values_at(self, t: float, axis: int, value: float,
                        coords_a, coords_b) -> np.ndarray:
        """Direct (off-grid) synthesis of the bispinor on a coordinate
        plane: exact evaluation of the band-limited field at arbitrary
        in-plane points.  Returns shape (4, len(coords_a)).

        axis selects the fixed coordinate (0=x, 1=y, 2=z); coords_a/b are
        the two free coordinates in axis order (e.g. for axis=2 they are
        x and y).
        """
        psi = self.momentum_values_at(t)
        axes = self.mgrid.axes_1d
        fixed_p = axes[axis]
        # contract the fixed axis first
        phase = np.exp(1j * fixed_p * value)
        psi = np.moveaxis(psi, 1 + axis, -1)        # (4, Na, Nb, Nfixed)
        g = psi @ phase                              # (4, Na, Nb)
        free_axes = [k for k in range(3) if k != axis]
        pa, pb = axes[free_axes[0]], axes[free_axes[1]]
        ea = np.exp(1j * np.outer(np.asarray(coords_a, float), pa))
        eb = np.exp(1j * np.outer(np.asarray(coords_b, float), pb))
        # sum_k ea[m,ka] eb[m,kb] g[c,ka,kb]
        tmp = np.einsum("cab,mb->cma", g, eb)
        vals = np.einsum("cma,ma->cm", tmp, ea)
        scale = self.mgrid.cell_volume / (2.0 * np.pi) ** 1.5
        return vals * scale


def synthesize_cartesian(state: PolarizedState, grid: PositionGrid,
                         t: float, normalize: bool = False) -> BispinorField:
    """One-shot position-space snapshot at time t."""
    engine = SpectralEngine.from_state(state, grid, normalize=normalize)
    return engine.field_at(t)


# ---------------------------------------------------------------------------
# energy-sign splits

def energy_split(state: PolarizedState, p):
    """(w_plus, w_minus) = positive/negative-energy weight of the
    polarization at momentum p, with the envelope factored out.  Computed
    from the eigenbasis coefficients; for the axial polarization it equals
    (1 +/- p_z/lambda)/2."""
    c = project_coefficients(state.phi, p)
    w_plus = float(abs(c[0]) ** 2 + abs(c[1]) ** 2)
    w_minus = float(abs(c[2]) ** 2 + abs(c[3]) ** 2)
    return w_plus, w_minus


_N_AZIMUTHAL = 8    # |C_r|^2 is a trig polynomial of degree 2 in the
                    # azimuth, so an 8-point average is exact


def _split_weights_radial(state: PolarizedState, pp, pz):
    """Azimuthally averaged (w_plus, w_minus) on (p_perp, p_z) arrays."""
    pp = np.asarray(pp, float)
    pz = np.asarray(pz, float)
    lam = np.sqrt(1.0 + pp**2 + pz**2)
    wp = np.zeros(np.broadcast(pp, pz).shape)
    wm = np.zeros_like(wp)
    phis = 2.0 * np.pi * np.arange(_N_AZIMUTHAL) / _N_AZIMUTHAL
    phi_hat = state.phi
    g = 1.0 / (lam + 1.0)
    n2 = (lam + 1.0) / (2.0 * lam)
    for az in phis:
        p1 = pp * np.cos(az)
        p2 = pp * np.sin(az)
        c1 = phi_hat[0] + g * ((p1 - 1j * p2) * phi_hat[3] + pz * phi_hat[2])
        c2 = phi_hat[1] + g * ((p1 + 1j * p2) * phi_hat[2] - pz * phi_hat[3])
        c3 = phi_hat[2] - g * (pz * phi_hat[0] + (p1 - 1j * p2) * phi_hat[1])
        c4 = phi_hat[3] - g * ((p1 + 1j * p2) * phi_hat[0] - pz * phi_hat[1])
        wp += n2 * (np.abs(c1) ** 2 + np.abs(c2) ** 2)
        wm += n2 * (np.abs(c3) ** 2 + np.abs(c4) ** 2)
    return wp / _N_AZIMUTHAL, wm / _N_AZIMUTHAL


def w_curve(state: PolarizedState, pz_samples, *, rtol: float = 1e-10):
    """Longitudinal distributions W_+/-(p_z) of the energy-sign
    subpackets: radial quadrature of |f|^2 times the split weights.

    Returns (w_plus, w_minus) arrays over pz_samples.
    """
    pk = state.packet
    pz_samples = np.asarray(pz_samples, dtype=float)
    cut = gaussian_cutoff(pk.d)

    def make(which):
        def f(pp, pz):
            wp, wm = _split_weights_radial(state, pp, pz)
            w = wp if which == 0 else wm
            f2 = np.abs(envelope_momentum_radial(pk, pp, pz)) ** 2
            return 2.0 * np.pi * pp * f2 * w
        return f

    out = []
    for which in (0, 1):
        f2d = make(which)
        vals = np.array([
            integrate_1d(lambda pp, z=z: f2d(pp, z), 0.0, cut, rtol=rtol)
            for z in pz_samples])
        out.append(vals)
    return out[0], out[1]


def w_curve_integrals(state: PolarizedState, *, rtol: float = 1e-12):
    """(int W_+ dp_z, int W_- dp_z); they sum to one."""
    nodes = MomentumNodes2D(state.packet, 0.0, rtol=rtol)
    wp, wm = _split_weights_radial(state, nodes.pp, nodes.pz)
    return nodes.integrate(wp), nodes.integrate(wm)


def w_negative_mass_fraction(state: PolarizedState, *,
                             rtol: float = 1e-12) -> float:
    """Fraction of (W_+ + W_-) mass at p_z < 0."""
    pk = state.packet
    cut_z = gaussian_cutoff(pk.delta)
    lo = pk.k0 - cut_z
    if lo >= 0.0:
        return 0.0
    pz, wz = gl_nodes(lo, 0.0, 32, 16)
    wp, wm = w_curve(state, pz)
    return float(np.dot(wz, wp + wm))
