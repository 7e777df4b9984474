"""Stress and displacement fields from the solved series coefficients.

Within the annulus the stress combinations follow the standard
curvilinear resolution of the two complex potentials.  With
F(zeta) = sum A_k zeta^k, its conjugated variants and the outer-expansion
sum Q(zeta) = sum B_k conj(zeta)^{-k}:

    sigma_theta + sigma_rho = 4 Re[(1 - zeta)^2 / (-2a) F],
    sigma_rho + i tau       = (1 - zb)^2 / (-2a) Fb
                              + e^{-2 i theta} [ ... derivative terms ... ]
                              + (1 - zeta)^2 / (-2a) F + (1 - zeta)^2 Q / (2 a rho^2),

where zb = conj(zeta) and e^{-2 i theta} = zb^2 / rho^2 (the boundary
phase factor squared).  The displacement potential

    2G (u + i v) = i [ sum_k (kappa A_{k-1} zeta^k / k + ...)
                       - (1 + zeta)(1 - zb)^2 / (2 (1 - zeta)) sum A_k zb^k
                       + (kappa A_{-1} - B_{-1}) ln rho + C0 ]

vanishes exactly at zeta = 1 (the image of infinity) by construction of
C0, which removes the displacement singularity that a free-surface model
would leave there.

Mapping back to the half-plane keeps the first stress invariant and the
displacements, and rotates the deviatoric combination by the unit-modulus
factor (zb / zeta) conj(z') / z'.  Total stress adds the initial gravity
field at the point's depth.

Lanczos filtering replaces every A_k and B_k by L_k A_k, L_k B_k and
recomputes the dependent psi and C0; it damps the Gibbs oscillation near
the two boundary-condition transition points but cannot remove it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .geometry import (
    INFINITY_EXCLUSION,
    DerivedGeometry,
    check_annulus,
    map_backward,
    map_derivative,
    map_forward,
)
from .loading import initial_stress
from .series import FilterWeights, filter_window
from .solver import SolutionCoefficients, displacement_constant, psi_coefficients

# Relative margin for classifying grid points against domain boundaries.
BOUNDARY_MARGIN = 1e-6


@dataclass(frozen=True)
class NormalizationScales:
    """Reference scales: stress gamma*h, displacement u0 = gamma h R / (2G)."""

    stress: float
    displacement: float


@dataclass(frozen=True)
class PhysicalField:
    """Cartesian fields at half-plane points (excavation-induced + totals)."""

    x: np.ndarray
    y: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    txy: np.ndarray
    u: np.ndarray
    v: np.ndarray
    sx_total: np.ndarray
    sy_total: np.ndarray
    txy_total: np.ndarray
    smax: np.ndarray
    smin: np.ndarray


@dataclass(frozen=True)
class GridField:
    """Physical fields on a rectangular grid with a validity mask.

    Points above the surface, inside the tunnel opening, or too close to
    the image of infinity are masked out (``valid`` False, fields NaN).
    """

    x: np.ndarray
    y: np.ndarray
    valid: np.ndarray
    field: PhysicalField


def norm_scales(sol: SolutionCoefficients) -> NormalizationScales:
    m = sol.material
    g = sol.derived.geom
    return NormalizationScales(
        stress=m.gamma * g.h,
        displacement=m.gamma * g.h * g.R / (2.0 * m.G),
    )


def apply_filter(sol: SolutionCoefficients, weights: FilterWeights) -> SolutionCoefficients:
    """Lanczos-filtered copy: A, B damped entrywise, psi and C0 recomputed."""
    A = filter_window(sol.A, weights)
    B = filter_window(sol.B, weights)
    N = sol.N
    return replace(
        sol,
        A=A,
        B=B,
        psi=psi_coefficients(A, B, N),
        C0=displacement_constant(A, B, sol.material.kappa, N),
        filtered=True,
    )


def _as_points(zeta):
    """Flattened complex point array plus shape/scalar restorers."""
    scalar = np.ndim(zeta) == 0
    arr = np.atleast_1d(np.asarray(zeta, dtype=complex))
    return arr.ravel(), arr.shape, scalar


def _phi_sums(zeta, A, N):
    """Power sums of the inner expansion at the points.

    Returns (F, Fb, Fb1) = (sum A_k zeta^k, sum A_k zb^k, sum k A_k zb^{k-1}).
    """
    zb = np.conj(zeta)
    F = np.zeros_like(zeta)
    Fb = np.zeros_like(zeta)
    Fb1 = np.zeros_like(zeta)
    zp = np.ones_like(zeta)
    zbp = np.ones_like(zeta)
    for k in range(0, N + 1):
        Ak = A[k]
        F += Ak * zp
        Fb += Ak * zbp
        if k >= 1:
            Fb1 += (Ak * k) * zbp / zb
        zp = zp * zeta
        zbp = zbp * zb
    zm = np.ones_like(zeta)
    zbm = np.ones_like(zeta)
    for k in range(1, N + 1):
        zm = zm / zeta
        zbm = zbm / zb
        Ak = A[-k]
        F += Ak * zm
        Fb += Ak * zbm
        Fb1 += (-Ak * k) * zbm / zb
    return F, Fb, Fb1


def _outer_sum(zeta, B, N):
    """Q = sum_{k in [-N-2, N-1]} B_k conj(zeta)^{-k}."""
    zb = np.conj(zeta)
    Q = np.zeros_like(zeta)
    zbm = np.ones_like(zeta)
    for k in range(0, N):
        Q += B[k] * zbm
        zbm = zbm / zb
    zbp = np.ones_like(zeta)
    for k in range(1, N + 3):
        zbp = zbp * zb
        Q += B[-k] * zbp
    return Q


def eval_annulus_stress(zeta, sol: SolutionCoefficients):
    """Curvilinear stresses (sigma_rho, sigma_theta, tau_rhotheta) in kPa."""
    pts, shape, scalar = _as_points(zeta)
    check_annulus(pts, sol.derived, allow_unit_point=True)
    N = sol.N
    a = sol.derived.a
    zb = np.conj(pts)
    rho2 = (pts * zb).real
    F, Fb, Fb1 = _phi_sums(pts, sol.A, N)
    Q = _outer_sum(pts, sol.B, N)
    e2 = zb * zb / rho2
    one_m = (1.0 - pts) ** 2
    one_mb = (1.0 - zb) ** 2
    s_plus = 4.0 * np.real(one_m / (-2.0 * a) * F)
    srit = (
        one_mb / (-2.0 * a) * Fb
        + e2
        * (
            one_m / (-4.0 * a) * (zb * zb * Fb1 + 2.0 * zb * Fb)
            + one_m / (4.0 * a) * Fb1
            + (1.0 - pts**2) * (1.0 - zb) / (-2.0 * a) * Fb
            + (1.0 - pts**2) * one_mb / (4.0 * a) * Fb1
        )
        + one_m / (-2.0 * a) * F
        + one_m / (2.0 * a * rho2) * Q
    )
    srho = np.real(srit)
    trt = np.imag(srit)
    stheta = s_plus - srho
    if scalar:
        return float(srho[0]), float(stheta[0]), float(trt[0])
    return srho.reshape(shape), stheta.reshape(shape), trt.reshape(shape)


def eval_annulus_displacement(zeta, sol: SolutionCoefficients):
    """Displacements (u, v) in metres; exactly (0, 0) at zeta = 1."""
    pts, shape, scalar = _as_points(zeta)
    check_annulus(pts, sol.derived, allow_unit_point=True)
    N = sol.N
    A, B = sol.A, sol.B
    kappa = sol.material.kappa
    zb = np.conj(pts)
    rho = np.abs(pts)
    D = np.zeros_like(pts)
    zp = np.ones_like(pts)
    zbp = np.ones_like(pts)
    zm = np.ones_like(pts)
    zbm = np.ones_like(pts)
    for k in range(1, N + 3):
        zp = zp * pts
        zbp = zbp * zb
        zm = zm / pts
        zbm = zbm / zb
        D += kappa * A[k - 1] / k * zp + (0.5 * (A[k - 2] - A[k]) - B[-k - 1] / k) * zbp
        D += -kappa * A[-k - 1] / k * zm + (0.5 * (A[-k - 2] - A[-k]) + B[k - 1] / k) * zbm
    _, Fb, _ = _phi_sums(pts, A, N)
    at_one = pts == 1.0
    denom = np.where(at_one, 1.0, 1.0 - pts)
    factor = np.where(at_one, 0.0, (1.0 + pts) * (1.0 - zb) ** 2 / (2.0 * denom))
    g = 1j * (D - factor * Fb + (kappa * A[-1] - B[-1]) * np.log(rho) + sol.C0)
    u = np.real(g) / (2.0 * sol.material.G)
    v = np.imag(g) / (2.0 * sol.material.G)
    # g(1) = 0 holds by the construction of C0; pin it against roundoff.
    u = np.where(at_one, 0.0, u)
    v = np.where(at_one, 0.0, v)
    if scalar:
        return float(u[0]), float(v[0])
    return u.reshape(shape), v.reshape(shape)


def principal(sx, sy, txy):
    """Principal stresses (smax, smin) of a plane stress state."""
    sx = np.asarray(sx, dtype=float)
    sy = np.asarray(sy, dtype=float)
    txy = np.asarray(txy, dtype=float)
    mean = 0.5 * (sx + sy)
    radius = np.hypot(0.5 * (sx - sy), txy)
    if sx.ndim == 0:
        return float(mean + radius), float(mean - radius)
    return mean + radius, mean - radius


def stress_rotation(zeta, derived: DerivedGeometry):
    """Unit-modulus factor (zb / zeta) conj(z') / z' mapping deviatoric stress."""
    zp = map_derivative(zeta, derived)
    return (np.conj(zeta) / zeta) * (np.conj(zp) / zp)


def to_physical(zeta, annulus_stress, annulus_disp, sol: SolutionCoefficients) -> PhysicalField:
    """Map annulus stresses/displacements at points zeta to half-plane fields.

    The first invariant carries over, the deviatoric part rotates, and the
    displacement vector is unchanged.  Total stress adds the initial field
    evaluated at the physical depth.
    """
    pts, shape, _ = _as_points(zeta)
    srho, stheta, trt = (np.asarray(c, dtype=float).ravel() for c in annulus_stress)
    u, v = (np.asarray(c, dtype=float).ravel() for c in annulus_disp)
    z = map_backward(pts, sol.derived)
    s_plus = stheta + srho
    rot = stress_rotation(pts, sol.derived)
    s_dev = (stheta - srho + 2j * trt) * rot
    sy = 0.5 * (s_plus + np.real(s_dev))
    sx = 0.5 * (s_plus - np.real(s_dev))
    txy = 0.5 * np.imag(s_dev)
    y = np.imag(z)
    # Surface points may land at +eps; initial stress is defined for y <= 0.
    sx0, sy0, _ = initial_stress(np.minimum(y, 0.0), sol.material)
    sx_t = sx + sx0
    sy_t = sy + sy0
    smax, smin = principal(sx_t, sy_t, txy)
    rs = lambda w: w.reshape(shape)
    return PhysicalField(
        x=rs(np.real(z)),
        y=rs(y),
        sx=rs(sx),
        sy=rs(sy),
        txy=rs(txy),
        u=rs(u),
        v=rs(v),
        sx_total=rs(sx_t),
        sy_total=rs(sy_t),
        txy_total=rs(txy),
        smax=rs(smax),
        smin=rs(smin),
    )


def evaluate_physical(z, sol: SolutionCoefficients) -> PhysicalField:
    """Forward-map half-plane points and evaluate the full field there."""
    zeta = map_forward(np.asarray(z, dtype=complex), sol.derived)
    stress = eval_annulus_stress(zeta, sol)
    disp = eval_annulus_displacement(zeta, sol)
    return to_physical(zeta, stress, disp, sol)


def classify_grid(x, y, derived: DerivedGeometry):
    """Validity mask for physical points: in the ground, outside the tunnel.

    Points within BOUNDARY_MARGIN * R of either boundary count as boundary
    samples (valid); points mapping within the zeta = 1 exclusion disc are
    rejected.
    """
    g = derived.geom
    margin = BOUNDARY_MARGIN * g.R
    z = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
    below = np.imag(z) <= margin
    outside = np.abs(z + 1j * g.h) >= g.R - margin
    zeta = (z + 1j * derived.a) / (z - 1j * derived.a)
    away = np.abs(zeta - 1.0) >= INFINITY_EXCLUSION
    return below & outside & away


def evaluate_grid(sol: SolutionCoefficients, x: np.ndarray, y: np.ndarray) -> GridField:
    """Evaluate the physical field on the tensor grid x (columns) by y (rows).

    Invalid points are skipped and reported NaN with ``valid`` False.
    """
    X, Y = np.meshgrid(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    valid = classify_grid(X, Y, sol.derived)
    # Project boundary samples onto the domain before mapping: the surface
    # margin clamps to y = 0, the tunnel margin to the periphery circle.
    zpts = X[valid] + 1j * np.minimum(Y[valid], 0.0)
    g = sol.derived.geom
    centre = -1j * g.h
    rel = zpts - centre
    dist = np.abs(rel)
    inside = dist < g.R
    zpts = np.where(inside, centre + g.R * rel / np.where(inside, dist, 1.0), zpts)
    sub = evaluate_physical(zpts, sol)
    fields = {}
    for name in ("sx", "sy", "txy", "u", "v", "sx_total", "sy_total", "txy_total", "smax", "smin"):
        full = np.full(X.shape, np.nan)
        full[valid] = getattr(sub, name)
        fields[name] = full
    return GridField(
        x=X,
        y=Y,
        valid=valid,
        field=PhysicalField(x=X, y=Y, **fields),
    )
