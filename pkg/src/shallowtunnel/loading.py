"""Initial gravity stress, excavation tractions, and their series coefficients.

Before excavation the geomaterial carries the uniform-gradient field

    sigma_x0 = k0 gamma y,   sigma_y0 = gamma y,   tau_xy0 = 0      (y <= 0),

compression negative.  Excavating the tunnel applies the opposite of the
initial tractions along the periphery; written in the tunnel-centred polar
angle vartheta they are

    X = k0 gamma (-h + R sin vartheta) cos vartheta,
    Y =    gamma (-h + R sin vartheta) sin vartheta,

whose resultant is purely vertical, Fy = gamma pi R^2 (the weight of the
excavated material, acting upward on the remaining ground).

The solver consumes these tractions through the Fourier coefficients E_k
of the path-integrated traction along the tunnel image circle |zeta| = r,
multiplied by -2i(1 - r e^{i theta}).  The closed forms below come from
partial fractions of 1 / ((1 - r e^{i theta})(e^{i theta} - r)^2) and the
geometric/logarithmic expansions of the remaining factors; everything is
real and decays like r^|k|.

Units: lengths m, unit weight kN/m^3, stresses kPa.  Table values such as
gamma = 20, R = 5, h = 10 can be used without conversion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .geometry import DerivedGeometry, TunnelGeometry
from .windows import SeriesWindow


@dataclass(frozen=True)
class Material:
    """Elastic constants and initial-stress parameters.

    gamma  unit weight, kN/m^3
    k0     lateral initial-stress coefficient
    E      elastic modulus, kPa
    nu     Poisson ratio, in (0, 0.5)
    plane  'strain' or 'stress'

    Derived: Kolosov coefficient kappa (3 - 4 nu for plane strain,
    (3 - nu)/(1 + nu) for plane stress), shear modulus G = E / (2 (1 + nu)),
    and the kernel exponent lam = ln(kappa) / (2 pi).
    """

    gamma: float
    k0: float
    E: float
    nu: float
    plane: str = "strain"

    def __post_init__(self):
        if self.plane not in ("strain", "stress"):
            raise ConfigError(f"plane must be 'strain' or 'stress', got {self.plane!r}")
        if not 0.0 < self.nu < 0.5:
            raise ConfigError(f"nu must lie in (0, 0.5), got {self.nu}")
        if not self.E > 0:
            raise ConfigError(f"elastic modulus must be positive, got {self.E}")
        if self.gamma < 0:
            raise ConfigError(f"unit weight must be nonnegative, got {self.gamma}")
        if self.k0 < 0:
            raise ConfigError(f"lateral coefficient must be nonnegative, got {self.k0}")

    @property
    def kappa(self) -> float:
        if self.plane == "strain":
            return 3.0 - 4.0 * self.nu
        return (3.0 - self.nu) / (1.0 + self.nu)

    @property
    def G(self) -> float:
        return self.E / (2.0 * (1.0 + self.nu))

    @property
    def lam(self) -> float:
        return float(np.log(self.kappa) / (2.0 * np.pi))


@dataclass(frozen=True)
class Resultant:
    """Net force per metre of tunnel carried by the periphery tractions (kN/m)."""

    Fx: float
    Fy: float


@dataclass(frozen=True)
class LoadingCoefficients:
    """Constants of the traction-series expansion.

    K1..K3 are the partial-fraction constants, L1..L6 lump the load
    amplitudes (stress x length^2 units).  f(k) = K1 r^k and
    g(k) = K2 k r^{k-1} + K3 (k-1) r^{k-2} are the two expansion families.
    """

    K1: float
    K2: float
    K3: float
    L1: float
    L2: float
    L3: float
    L4: float
    L5: float
    L6: float
    r: float

    def f(self, k: int) -> float:
        return self.K1 * self.r**k

    def g(self, k: int) -> float:
        if k < 1:
            raise ValueError(f"g(k) defined for k >= 1, got {k}")
        tail = self.K3 * (k - 1) * self.r ** (k - 2) if k >= 2 else 0.0
        return self.K2 * k * self.r ** (k - 1) + tail


def initial_stress(y, m: Material):
    """Initial stresses (sigma_x0, sigma_y0, tau_xy0) in kPa at depth y <= 0."""
    y = np.asarray(y, dtype=float) if np.ndim(y) else float(y)
    if np.any(np.asarray(y) > 0.0):
        raise DomainError("initial stress is defined for y <= 0 only")
    return m.k0 * m.gamma * y, m.gamma * y, np.zeros_like(y) if np.ndim(y) else 0.0


def periphery_traction(vartheta, geom: TunnelGeometry, m: Material):
    """Excavation tractions (X, Y) in kPa at tunnel polar angle vartheta."""
    vartheta = np.asarray(vartheta, dtype=float) if np.ndim(vartheta) else float(vartheta)
    depth = -geom.h + geom.R * np.sin(vartheta)
    return m.k0 * m.gamma * depth * np.cos(vartheta), m.gamma * depth * np.sin(vartheta)


def resultant(geom: TunnelGeometry, m: Material) -> Resultant:
    """Unbalanced resultant of the periphery tractions: (0, gamma pi R^2)."""
    return Resultant(Fx=0.0, Fy=float(m.gamma * np.pi * geom.R**2))


def loading_constants(derived: DerivedGeometry, m: Material) -> LoadingCoefficients:
    """Partial-fraction constants K and load lumps L for the traction series."""
    r = derived.r
    a = derived.a
    R = derived.geom.R
    one = (1.0 - r * r) ** 2
    return LoadingCoefficients(
        K1=r * r / one,
        K2=r / one,
        K3=(1.0 - 2.0 * r * r) / one,
        L1=-m.k0 * m.gamma * a * a * one,
        L2=-m.gamma * a * a,
        L3=m.gamma * a * a * r * r,
        L4=m.gamma * a * R,
        L5=-m.gamma * a * r * R,
        L6=m.gamma * R * R,
        r=r,
    )


def compute_E(N: int, lc: LoadingCoefficients) -> SeriesWindow:
    """Traction-series coefficients E_k for k in [-N, N].

    Four closed-form branches: k >= 2, k = 1, k = 0 and k <= -1.  The
    k = 0 and k = 1 branches absorb the logarithmic terms of the path
    integral, which is why they differ structurally from the k >= 2 tail.
    """
    if N < 2:
        raise ValueError(f"truncation order N must be >= 2, got {N}")
    r = lc.r
    L1, L2, L3, L4, L5, L6 = lc.L1, lc.L2, lc.L3, lc.L4, lc.L5, lc.L6
    E = SeriesWindow(-N, N)
    for k in range(2, N + 1):
        E[k] = L1 * lc.f(k - 2) + L2 * r**k - L6 * r**k / k + L6 * r**k / (k - 1)
    E[1] = L1 * lc.g(1) + L2 * r - L6 * r
    E[0] = L1 * lc.g(2) + L2 - L4 * r + L5 - L6 * r * r
    for k in range(1, N + 1):
        E[-k] = (
            L1 * lc.g(k + 2)
            + L3 * (k - 1) * r ** (k - 2)
            - L3 * k * r**k
            + L4 * r ** (k - 1)
            - L4 * r ** (k + 1)
            + L6 * r**k / k
            - L6 * r ** (k + 2) / (k + 1)
        )
    return E
