"""Conformal geometry of a circular tunnel below a flat ground surface.

The half-plane y <= 0 with a circular hole of radius R centred at
z = -i h is mapped onto the concentric annulus r <= |zeta| <= 1 by the
bilinear pair

    zeta(z) = (z + i a) / (z - i a),        z(zeta) = -i a (1 + zeta) / (1 - zeta),

with a = sqrt(h^2 - R^2) and r = R / (h + sqrt(h^2 - R^2)).  The ground
surface goes to the unit circle, the tunnel wall to |zeta| = r, and the
point at infinity to zeta = 1.  The surface points x = +-x0 that separate
the traction-free strip from the displacement-constrained remainder land
at polar angles +-theta0 on the unit circle, theta0 = 2 atan(a / x0).

All mapping helpers broadcast over numpy arrays of complex coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GeometryError

# |zeta| membership slack for boundary points produced by round trips.
ANNULUS_TOL = 1e-9
# zeta = 1 is the image of infinity; z'(zeta) has a double pole there.
INFINITY_EXCLUSION = 1e-4


@dataclass(frozen=True)
class TunnelGeometry:
    """Physical layout: tunnel radius R, axis depth h, free half-width x0 (metres)."""

    R: float
    h: float
    x0: float

    def __post_init__(self):
        if not self.R > 0:
            raise GeometryError(f"tunnel radius R must be positive, got {self.R}")
        if not self.h > self.R:
            raise GeometryError(
                f"degenerate geometry: depth h={self.h} must exceed radius R={self.R}"
            )
        if not self.x0 > 0:
            raise GeometryError(f"free surface half-width x0 must be positive, got {self.x0}")


@dataclass(frozen=True)
class DerivedGeometry:
    """Mapping constants derived from a :class:`TunnelGeometry`.

    a       half distance between the map's focal points, metres
    r       inner annulus radius (tunnel image), dimensionless
    theta0  polar angle of the free/constrained transition on the unit circle
    """

    a: float
    r: float
    theta0: float
    geom: TunnelGeometry


def derive_geometry(geom: TunnelGeometry) -> DerivedGeometry:
    """Compute the annulus constants (a, r, theta0) for a tunnel layout.

    a = sqrt(h^2 - R^2) equals h (1 - r^2) / (1 + r^2); theta0 is the real
    value of the transition angle, evaluated as 2 atan(a / x0) to avoid any
    complex-logarithm branch handling.
    """
    R, h, x0 = geom.R, geom.h, geom.x0
    a = np.sqrt(h * h - R * R)
    r = R / (h + np.sqrt(h * h - R * R))
    theta0 = 2.0 * np.arctan2(a, x0)
    return DerivedGeometry(a=float(a), r=float(r), theta0=float(theta0), geom=geom)


def map_forward(z, g: DerivedGeometry):
    """Half-plane point(s) z -> annulus point(s) zeta = (z + ia)/(z - ia)."""
    z = np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
    pole = 1j * g.a
    if np.any(np.abs(np.asarray(z) - pole) == 0.0):
        raise DomainError("z = ia is the pole of the forward map")
    return (z + pole) / (z - pole)


def map_backward(zeta, g: DerivedGeometry):
    """Annulus point(s) zeta -> half-plane point(s) z = -ia (1+zeta)/(1-zeta)."""
    zeta = np.asarray(zeta, dtype=complex) if np.ndim(zeta) else complex(zeta)
    if np.any(np.asarray(zeta) == 1.0):
        raise DomainError("zeta = 1 is the image of infinity")
    return -1j * g.a * (1.0 + zeta) / (1.0 - zeta)


def map_derivative(zeta, g: DerivedGeometry):
    """dz/dzeta = -2ia / (1 - zeta)^2; nonzero on the whole annulus."""
    zeta = np.asarray(zeta, dtype=complex) if np.ndim(zeta) else complex(zeta)
    if np.any(np.asarray(zeta) == 1.0):
        raise DomainError("zeta = 1 is a second-order pole of z'(zeta)")
    return -2j * g.a / (1.0 - zeta) ** 2


def check_annulus(zeta, g: DerivedGeometry, allow_unit_point: bool = False) -> None:
    """Validate that points lie in r <= |zeta| <= 1 away from zeta = 1.

    Boundary membership is judged with slack ``ANNULUS_TOL`` because round
    trips through the maps land a few ulp off the circles.  Points closer
    than ``INFINITY_EXCLUSION`` to zeta = 1 are rejected: the factors that
    cancel the double pole of z'(zeta) are removable but numerically
    delicate there.  ``allow_unit_point`` admits zeta == 1 exactly, where
    the displacement has an exact closed value.
    """
    arr = np.asarray(zeta, dtype=complex)
    rho = np.abs(arr)
    if np.any(rho < g.r - ANNULUS_TOL) or np.any(rho > 1.0 + ANNULUS_TOL):
        raise DomainError("point outside the annulus r <= |zeta| <= 1")
    near = np.abs(arr - 1.0) < INFINITY_EXCLUSION
    if allow_unit_point:
        near &= arr != 1.0
    if np.any(near):
        raise DomainError(
            f"point within {INFINITY_EXCLUSION} of zeta = 1 (image of infinity)"
        )
