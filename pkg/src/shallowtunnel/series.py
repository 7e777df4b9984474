"""Expansions of the sectionally analytic kernel and Lanczos filter weights.

The mixed boundary conditions on the unit circle reduce to a homogeneous
jump problem whose solving kernel is

    X(zeta) = (zeta - e^{-i theta0})^{-1/2 - i lam} (zeta - e^{i theta0})^{-1/2 + i lam},

branch fixed by zeta X(zeta) -> 1 at infinity, cut along the constrained
arc |theta| <= theta0 of the unit circle.  Both one-sided expansions

    X(zeta) = sum_{k>=0} alpha_k zeta^k      (|zeta| < 1),
    X(zeta) = sum_{k>=1} beta_k zeta^-k      (|zeta| > 1),

have real coefficients: each is the Cauchy product of a binomial series
with its elementwise conjugate.  Coefficients are built from the stable
ratio recurrence

    u_0 = 1,   u_k = u_{k-1} (k - 1/2 + i lam) / k * e^{+- i theta0},

never from raw factorials (which overflow near k = 170), and the interior
series carries the continuation constant X(0) = -e^{-2 lam theta0}.

Lanczos weights sin(k pi / N) / (k pi / N) damp the highest harmonics of a
truncated series to suppress Gibbs oscillation next to the two points
where the boundary condition changes type; outside |k| < N the weights
are clamped to zero so out-of-window use is harmless.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .windows import SeriesWindow

# Imaginary residue allowed before a coefficient is truncated to real.
_REALITY_TOL = 1e-12


@dataclass(frozen=True)
class AngularExpansion:
    """Kernel expansion tables.

    alpha[k], k = 0..M_alpha: interior Taylor coefficients.
    beta[k],  k = 1..M_beta:  exterior coefficients (beta[0] is unused 0).
    """

    alpha: np.ndarray
    beta: np.ndarray
    lam: float
    theta0: float


@dataclass(frozen=True)
class FilterWeights:
    """Symmetric sinc damping weights L_k, |k| <= N, with L_0 = 1, L_N = 0."""

    N: int
    values: np.ndarray  # index k + N

    def __getitem__(self, k: int) -> float:
        if abs(k) > self.N:
            return 0.0
        return float(self.values[k + self.N])


def _binomial_factors(M: int, lam: float, theta0: float, sign: int) -> np.ndarray:
    """Coefficients u_k of (1 - w)^(-1/2 - i lam) with w = zeta e^{i sign theta0}."""
    u = np.empty(M + 1, dtype=complex)
    u[0] = 1.0
    phase = np.exp(1j * sign * theta0)
    for k in range(1, M + 1):
        u[k] = u[k - 1] * ((k - 0.5 + 1j * lam) / k) * phase
    return u


def _real_convolution(u: np.ndarray, M: int, scale: float, label: str) -> np.ndarray:
    """Cauchy products sum_l u_l conj(u_{k-l}), checked real, times scale."""
    out = np.empty(M + 1)
    v = np.conj(u)
    for k in range(M + 1):
        s = np.sum(u[: k + 1] * v[k::-1])
        if abs(s.imag) > _REALITY_TOL * max(1.0, abs(s.real)):
            raise ArithmeticError(
                f"{label} coefficient {k} has imaginary residue {s.imag:.3e}"
            )
        out[k] = scale * s.real
    return out


def compute_alpha(M: int, lam: float, theta0: float) -> np.ndarray:
    """Interior kernel coefficients alpha_0..alpha_M.

    alpha_0 = -e^{-2 lam theta0} and alpha_1 = alpha_0 (cos theta0
    - 2 lam sin theta0); the general term is the convolution of the two
    binomial factor sequences, scaled by the continuation constant.
    """
    if M < 2:
        raise ValueError(f"alpha table needs M >= 2, got {M}")
    u = _binomial_factors(M, lam, theta0, sign=+1)
    return _real_convolution(u, M, float(-np.exp(-2.0 * lam * theta0)), "alpha")


def compute_beta(M: int, lam: float, theta0: float) -> np.ndarray:
    """Exterior kernel coefficients beta_1..beta_M (entry 0 unused).

    beta_1 = 1 pins the branch through zeta X(zeta) -> 1 at infinity;
    beta_2 = cos theta0 + 2 lam sin theta0.
    """
    if M < 3:
        raise ValueError(f"beta table needs M >= 3, got {M}")
    w = _binomial_factors(M - 1, lam, theta0, sign=-1)
    conv = _real_convolution(w, M - 1, 1.0, "beta")
    beta = np.zeros(M + 1)
    beta[1:] = conv
    return beta


def compute_expansion(N: int, lam: float, theta0: float) -> AngularExpansion:
    """Kernel tables long enough for a truncation order N.

    The inner-coefficient convolutions need alpha up to 2N and the outer
    ones beta up to 2N + 2.
    """
    return AngularExpansion(
        alpha=compute_alpha(2 * N, lam, theta0),
        beta=compute_beta(2 * N + 2, lam, theta0),
        lam=lam,
        theta0=theta0,
    )


def lanczos_weights(N: int) -> FilterWeights:
    """Sinc filter weights for a series truncated at order N."""
    if N < 1:
        raise ValueError(f"filter order must be >= 1, got {N}")
    k = np.arange(-N, N + 1)
    x = k * np.pi / N
    with np.errstate(invalid="ignore"):
        vals = np.where(k == 0, 1.0, np.sin(x) / np.where(k == 0, 1.0, x))
    vals[0] = 0.0
    vals[-1] = 0.0
    return FilterWeights(N=N, values=vals)


def filter_window(w: SeriesWindow, weights: FilterWeights) -> SeriesWindow:
    """Entrywise L_k * c_k on the window of w (weights clamp to 0 past N)."""
    out = w.copy()
    for k in out.indices():
        out[k] = weights[k] * w[k]
    return out
