"""Adaptive Gauss-Legendre panel quadrature shared by the oracles.

Policy: integrands are Gaussian envelopes times smooth oscillatory factors
(cos/sin of 2*lambda*t, Bessel kernels).  Integrals run over a finite box
chosen so the envelope at the cut satisfies |f(p_max)|^2 / |f|^2_peak
< 1e-14; the box is split into equal panels carrying a fixed-order
Gauss-Legendre rule, and the panel count is doubled until two successive
estimates agree.  The node sequence for a given (cutoff, panel count,
order) is fully deterministic, so reductions are reproducible bit-for-bit.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

DEFAULT_ORDER = 16
CUTOFF_MARGIN = 1.15
# exp(-x^2) = 1e-14 at x = sqrt(14 ln 10)
_GAUSS_CUT = float(np.sqrt(14.0 * np.log(10.0)))


class QuadratureError(RuntimeError):
    """Raised when panel doubling fails to converge; carries the last
    estimate in .estimate."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


def gaussian_cutoff(width: float) -> float:
    """Half-width of the integration box for envelope scale `width`."""
    return CUTOFF_MARGIN * _GAUSS_CUT / width


def gl_nodes(a: float, b: float, n_panels: int,
             order: int = DEFAULT_ORDER):
    """Composite Gauss-Legendre nodes/weights on [a, b]."""
    x0, w0 = leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
    w = (half[:, None] * w0[None, :]).ravel()
    return x, w


def gl_nodes_on_edges(edges, order: int = DEFAULT_ORDER):
    """Composite rule with prescribed panel edges (e.g. Bessel zeros)."""
    edges = np.asarray(edges, dtype=float)
    x0, w0 = leggauss(order)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
    w = (half[:, None] * w0[None, :]).ravel()
    return x, w


def integrate_1d(f, a: float, b: float, *, rtol: float = 1e-12,
                 atol: float = 1e-14, order: int = DEFAULT_ORDER,
                 initial_panels: int = 2, max_doublings: int = 12):
    """Integrate a vectorized callable by panel doubling."""
    panels = initial_panels
    x, w = gl_nodes(a, b, panels, order)
    prev = float(np.dot(w, f(x)))
    for _ in range(max_doublings):
        panels *= 2
        x, w = gl_nodes(a, b, panels, order)
        cur = float(np.dot(w, f(x)))
        if abs(cur - prev) <= max(atol, rtol * abs(cur)):
            return cur
        prev = cur
    raise QuadratureError(
        f"1D quadrature did not converge on [{a}, {b}] "
        f"after {panels} panels (last estimate {prev:.6e})", estimate=prev)


def phase_panels(total_phase: float, minimum: int = 4,
                 per_panel: float = 12.0) -> int:
    """Panel count that resolves an oscillatory factor of given total
    phase.  A 16-point Gauss-Legendre panel integrates ~2 full
    oscillations (12 radians) to ~1e-13, so that is the default budget;
    the adaptive doubling on top catches anything marginal."""
    return max(minimum, int(np.ceil(abs(total_phase) / per_panel)))


class MomentumNodes2D:
    """Tensor (p_perp, p_z) nodes with weights 2 pi p_perp |f(p)|^2 w.

    Evaluates oracle integrals int d^3p |f|^2 g(p_perp, p_z, t) for
    axially symmetric envelopes.  Nodes are built once (sized for the
    largest time of interest) and reused across a whole time series.
    """

    def __init__(self, packet, t_max: float = 0.0, *, rtol: float = 1e-12,
                 order: int = DEFAULT_ORDER, max_doublings: int = 8):
        self.packet = packet
        pp_cut = gaussian_cutoff(packet.d)
        pz_cut = gaussian_cutoff(packet.delta)
        lam_span = self._lambda_span(pp_cut, pz_cut, packet.k0)
        base = phase_panels(2.0 * t_max * lam_span)
        built = None
        prev = None
        for k in range(max_doublings):
            panels = base * (2 ** k)
            built = self._build(pp_cut, pz_cut, panels, order)
            probe = self._probe(built, t_max)
            if prev is not None and all(
                    abs(c - p) <= max(1e-14, rtol * max(abs(c), 1.0))
                    for c, p in zip(probe, prev)):
                break
            prev = probe
        else:
            raise QuadratureError(
                "2D momentum quadrature did not converge "
                f"(last probes {prev})", estimate=prev)
        self.pp, self.pz, self.weights = built
        self.lam = np.sqrt(1.0 + self.pp ** 2 + self.pz ** 2)

    @staticmethod
    def _lambda_span(pp_cut, pz_cut, k0):
        hi = np.sqrt(1.0 + pp_cut ** 2 + (abs(k0) + pz_cut) ** 2)
        lo = 1.0 if abs(k0) <= pz_cut else np.sqrt(1.0 + (abs(k0) - pz_cut) ** 2)
        return hi - lo

    def _build(self, pp_cut, pz_cut, panels, order):
        from .packet import envelope_momentum_radial
        pp, wp = gl_nodes(0.0, pp_cut, panels, order)
        k0 = self.packet.k0
        pz, wz = gl_nodes(k0 - pz_cut, k0 + pz_cut, panels, order)
        PP, PZ = np.meshgrid(pp, pz, indexing="ij")
        W = np.outer(wp, wz)
        f = envelope_momentum_radial(self.packet, PP, PZ)
        weights = (2.0 * np.pi * PP * np.abs(f) ** 2 * W).ravel()
        return PP.ravel(), PZ.ravel(), weights

    @staticmethod
    def _probe(built, t_max):
        pp, pz, w = built
        lam = np.sqrt(1.0 + pp ** 2 + pz ** 2)
        return (float(np.sum(w)),
                float(np.sum(w * np.cos(2.0 * lam * t_max))),
                float(np.sum(w * pz ** 2 / lam ** 2)))

    def integrate(self, values) -> float:
        """Sum of weights times a vectorized integrand evaluated on
        (self.pp, self.pz, self.lam)."""
        return float(np.dot(self.weights, values))


class MomentumNodes3D:
    """Full tensor (px, py, pz) nodes with weights |f(p)|^2 w for drift
    integrals with arbitrary polarization.  Node sets are symmetric in px
    and py (and in p_z about k0), so odd moments cancel exactly."""

    def __init__(self, packet, *, rtol: float = 1e-12,
                 order: int = DEFAULT_ORDER, max_doublings: int = 6):
        self.packet = packet
        cut_t = gaussian_cutoff(packet.d)
        cut_z = gaussian_cutoff(packet.delta)
        prev = None
        for k in range(max_doublings):
            panels = 2 * (2 ** k)
            built = self._build(cut_t, cut_z, panels, order)
            probe = (float(np.sum(built[3])),
                     float(np.sum(built[3] * built[2] ** 2)))
            if prev is not None and all(
                    abs(c - p) <= max(1e-14, rtol * max(abs(c), 1.0))
                    for c, p in zip(probe, prev)):
                break
            prev = probe
        else:
            raise QuadratureError(
                "3D momentum quadrature did not converge", estimate=prev)
        self.px, self.py, self.pz, self.weights = built
        self.lam = np.sqrt(1.0 + self.px**2 + self.py**2 + self.pz**2)

    def _build(self, cut_t, cut_z, panels, order):
        from .packet import envelope_momentum
        k0 = self.packet.k0
        px, wx = gl_nodes(-cut_t, cut_t, panels, order)
        py, wy = gl_nodes(-cut_t, cut_t, panels, order)
        pz, wz = gl_nodes(k0 - cut_z, k0 + cut_z, panels, order)
        PX, PY, PZ = np.meshgrid(px, py, pz, indexing="ij")
        W = wx[:, None, None] * wy[None, :, None] * wz[None, None, :]
        f = envelope_momentum(self.packet, PX, PY, PZ)
        weights = (np.abs(f) ** 2 * W).ravel()
        return PX.ravel(), PY.ravel(), PZ.ravel(), weights

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))
