"""Iterative solution of the mixed boundary value problem on the annulus.

The first complex potential derivative is sought as X(zeta) times a
bilateral series with real coefficients d_n, truncated to |n| <= N.
Multiplying through the kernel expansions gives the working coefficient
sets on which everything downstream operates:

    A_k = sum_{n=-N}^{k} alpha_{k-n} d_n        (inner expansion, k in [-N, N]),
    B_k = sum_{n=k+1}^{N} beta_{n-k} d_n        (outer expansion, k in [-N-2, N-1]),

and the second potential derivative has Laurent coefficients

    psi_k = (k+1)/2 (A_{k-1} - A_{k+1}) - B_{-k-2}.

Force balance between the constrained far surface and the tunnel load,
plus single-valuedness of displacement, pin two combinations exactly:

    A_{-1} = -gamma R^2 / (2 (1 + kappa)),   B_{-1} = kappa gamma R^2 / (2 (1 + kappa)).

Matching the tunnel-wall traction harmonic by harmonic yields three
linear systems with iteration-independent left sides:

  set 1  (N-1 eqs)  upper-triangular Toeplitz in alpha, unknowns d_{-n}, n = 2..N;
  set 2  (N-1 eqs)  upper-triangular Toeplitz in beta,  unknowns d_{+n}, n = 2..N;
  set 3  (4 eqs)    couples d_{-1}, d_0, d_1 and the integration constant C_a.

A direct single-matrix formulation would mix r^{+k} and r^{-k} scales and
be badly conditioned; splitting into these three well-conditioned sets
and iterating (each rep feeds the previous rep's increment coefficients
back through the coupling terms) keeps every condition number small.
The increments contract geometrically whenever h >= 2R, i.e.
r <= 1/(2 + sqrt(3)); shallower covers still converge, just more slowly.
Totals are the sums of per-rep increments; iteration stops when the
largest new increment drops below epsilon.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .geometry import DerivedGeometry, TunnelGeometry, derive_geometry
from .loading import LoadingCoefficients, Material, compute_E, loading_constants
from .numerics import FactoredSystem
from .series import AngularExpansion, compute_expansion
from .windows import SeriesWindow


@dataclass(frozen=True)
class SolverConfig:
    """Truncation order, stop threshold, iteration cap and filter flag."""

    N: int = 50
    epsilon: float = 1e-16
    max_reps: int = 200
    lanczos_enabled: bool = True

    def __post_init__(self):
        if self.N < 4:
            raise ValueError(f"truncation order N must be >= 4, got {self.N}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_reps < 1:
            raise ValueError("max_reps must be >= 1")


@dataclass(frozen=True)
class SystemBlocks:
    """Row coefficients of the two constant-harmonic matching equations.

    I couples through 2 beta_n / alpha mixes with r^2 weights, J likewise;
    Iprime and Jprime are the load constants of those rows (they carry the
    -r E_1 and +E_0 traction terms and the gamma R^2 log terms).
    """

    I: SeriesWindow
    J: SeriesWindow
    Iprime: float
    Jprime: float


@dataclass(frozen=True)
class SolutionCoefficients:
    """Converged series solution plus diagnostics.

    d [-N, N]        solved bilateral coefficients (totals)
    Ca               integration constant of the traction matching
    A [-N, N]        inner-expansion coefficients of the first potential
    B [-N-2, N-1]    outer-expansion coefficients
    psi [-N-2, N+1]  Laurent coefficients of the second potential derivative
    C0               displacement constant anchoring u + iv = 0 at zeta = 1
    reps             iteration reps executed after the initial phase
    cond             2-norm condition numbers of the three system matrices
    history          max|increment| per rep (index 0 = initial phase)
    """

    d: SeriesWindow
    Ca: float
    A: SeriesWindow
    B: SeriesWindow
    psi: SeriesWindow
    C0: float
    reps: int
    cond: tuple
    history: list
    derived: DerivedGeometry
    material: Material
    config: SolverConfig
    elapsed: float = 0.0
    filtered: bool = False

    @property
    def N(self) -> int:
        return self.config.N


def compute_AB(d: SeriesWindow, exp: AngularExpansion, N: int):
    """Expansion coefficients (A, B) generated by d through the kernel tables."""
    alpha, beta = exp.alpha, exp.beta
    darr = d.values  # index n + N
    # A_k = sum_m alpha_m d_{k-m}: plain convolution, read off at j = k + N.
    conv_a = np.convolve(alpha[: 2 * N + 1], darr)
    A = SeriesWindow(-N, N, conv_a[: 2 * N + 1])
    # B_k = sum_{m>=1} beta_m d_{k+m}: convolve beta with reversed d, j = N - k.
    conv_b = np.convolve(beta[: 2 * N + 3], darr[::-1])
    idx = [N - k for k in range(-N - 2, N)]
    B = SeriesWindow(-N - 2, N - 1, conv_b[idx])
    return A, B


def psi_coefficients(A: SeriesWindow, B: SeriesWindow, N: int) -> SeriesWindow:
    """Second-potential coefficients psi_k = (k+1)/2 (A_{k-1} - A_{k+1}) - B_{-k-2}.

    The natural window is [-N-2, N+1]: outside it every generating term is
    zero after truncation.
    """
    psi = SeriesWindow(-N - 2, N + 1)
    for k in psi.indices():
        psi[k] = 0.5 * (k + 1) * (A[k - 1] - A[k + 1]) - B[-k - 2]
    return psi


def displacement_constant(A: SeriesWindow, B: SeriesWindow, kappa: float, N: int) -> float:
    """Constant C0 that makes the boundary displacement vanish at zeta = 1.

    Negative of the displacement series evaluated at the image of
    infinity, where all powers collapse to 1 and the log term drops out.
    """
    s = 0.0
    for k in range(1, N + 3):
        s += kappa * A[k - 1] / k + 0.5 * (A[k - 2] - A[k]) - B[-k - 1] / k
        s += -kappa * A[-k - 1] / k + 0.5 * (A[-k - 2] - A[-k]) + B[k - 1] / k
    return -s


def assemble_blocks(
    exp: AngularExpansion,
    E: SeriesWindow,
    derived: DerivedGeometry,
    mat: Material,
    N: int,
) -> SystemBlocks:
    """Row coefficients I_n, J_n and load constants I', J' of system set 3."""
    alpha, beta = exp.alpha, exp.beta
    r = derived.r
    r2 = r * r
    I = SeriesWindow(-N, N)
    J = SeriesWindow(-N, N)
    for n in range(1, N + 1):
        I[n] = 2.0 * beta[n]
        J[n] = -2.0 * r2 * beta[n + 2]
    I[0] = -3.0 * r2 * alpha[0]
    I[-1] = -3.0 * r2 * alpha[1]
    J[0] = (1.0 - 2.0 * r2) * alpha[0] - 2.0 * r2 * beta[2]
    J[-1] = (1.0 - 2.0 * r2) * alpha[1] - 2.0 * r2 * beta[1]
    for n in range(2, N + 1):
        I[-n] = (2.0 - r2) * alpha[n - 2] - 3.0 * r2 * alpha[n]
        J[-n] = (1.0 - 2.0 * r2) * alpha[n] + 3.0 * alpha[n - 2]
    gR2 = mat.gamma * derived.geom.R**2
    kap = mat.kappa
    logr = np.log(r)
    Iprime = -gR2 * (1.0 - r2) / (1.0 + kap) + (1.0 - kap) / (1.0 + kap) * gR2 * r2 * logr - r * E[1]
    Jprime = -gR2 * (1.0 - r2) / (1.0 + kap) + (1.0 - kap) / (1.0 + kap) * gR2 * logr + E[0]
    return SystemBlocks(I=I, J=J, Iprime=float(Iprime), Jprime=float(Jprime))


def assemble_matrices(exp: AngularExpansion, blocks: SystemBlocks, derived: DerivedGeometry, N: int):
    """Left-side matrices of the three linear system sets.

    A1(i, j) = alpha_{j-i} and A2(i, j) = beta_{j-i+1} for 1 <= i <= j <= N-1
    (upper-triangular Toeplitz, zero below the diagonal); A3 is the 4 x 4
    block over (d_{-1}, d_0, d_1, C_a).
    """
    alpha, beta = exp.alpha, exp.beta
    n1 = N - 1
    A1 = np.zeros((n1, n1))
    A2 = np.zeros((n1, n1))
    for i in range(n1):
        A1[i, i:] = alpha[: n1 - i]
        A2[i, i:] = beta[1 : n1 - i + 1]
    r2 = derived.r**2
    A3 = np.array(
        [
            [blocks.I[-1], blocks.I[0], blocks.I[1], 2.0 * r2],
            [blocks.J[-1], blocks.J[0], blocks.J[1], 2.0],
            [alpha[0], 0.0, 0.0, 0.0],
            [0.0, beta[1], beta[2], 0.0],
        ]
    )
    return A1, A2, A3


def _solve_tail_and_core(
    sys1: FactoredSystem,
    sys2: FactoredSystem,
    sys3: FactoredSystem,
    rhs1: np.ndarray,
    rhs2: np.ndarray,
    core_extra: np.ndarray,
    blocks: SystemBlocks,
    exp: AngularExpansion,
    N: int,
):
    """Solve the three sets for one rep and return (increment window, Ca increment)."""
    dm = sys1.solve(rhs1)  # d_{-n}, n = 2..N
    dp = sys2.solve(rhs2)  # d_{+n}, n = 2..N
    alpha, beta = exp.alpha, exp.beta
    ns = np.arange(2, N + 1)
    b3 = np.array(
        [
            -np.dot(blocks.I.values[N - ns], dm) - np.dot(blocks.I.values[N + ns], dp),
            -np.dot(blocks.J.values[N - ns], dm) - np.dot(blocks.J.values[N + ns], dp),
            -np.dot(alpha[ns - 1], dm),
            -np.dot(beta[ns + 1], dp),
        ]
    )
    b3 += core_extra
    x3 = sys3.solve(b3)
    inc = SeriesWindow(-N, N)
    inc.values[N - ns] = dm
    inc.values[N + ns] = dp
    inc[-1], inc[0], inc[1] = x3[0], x3[1], x3[2]
    return inc, float(x3[3])


def initial_phase(
    systems,
    E: SeriesWindow,
    blocks: SystemBlocks,
    exp: AngularExpansion,
    derived: DerivedGeometry,
    mat: Material,
    N: int,
):
    """First increments, driven purely by the traction series and load constants."""
    r = derived.r
    rhs1 = np.array([-0.5 * (k - 1) * r ** (k - 1) * E[-k + 1] for k in range(2, N + 1)])
    rhs2 = np.array(
        [
            -0.5 * k * (k + 1) * (1.0 - r * r) * r**k * E[-k] - 0.5 * (k + 1) * r ** (k + 1) * E[k + 1]
            for k in range(1, N)
        ]
    )
    gR2 = mat.gamma * derived.geom.R**2
    kap = mat.kappa
    core_extra = np.array(
        [blocks.Iprime, blocks.Jprime, -gR2 / (2.0 * (1.0 + kap)), kap * gR2 / (2.0 * (1.0 + kap))]
    )
    return _solve_tail_and_core(*systems, rhs1, rhs2, core_extra, blocks, exp, N)


def iteration_phase(
    systems,
    inc_prev: SeriesWindow,
    blocks: SystemBlocks,
    exp: AngularExpansion,
    derived: DerivedGeometry,
    N: int,
):
    """Next increments from the previous rep's increment coefficients.

    The right sides are the coupling terms, evaluated on the expansion
    coefficients A, B generated by the previous increment alone; the load
    terms appear only in the initial phase.
    """
    r = derived.r
    r2 = r * r
    Aq, Bq = compute_AB(inc_prev, exp, N)
    rhs1 = np.array(
        [
            (k - 1) / k * Aq[-k - 1]
            + r ** (2 * k - 2) * Bq[-k]
            - (k - 1) / k * r ** (2 * k) * Bq[-k - 1]
            + (k - 1) * (1.0 - r2) * r ** (2 * k - 2) * (Aq[k - 1] - Aq[k - 2])
            for k in range(2, N + 1)
        ]
    )
    rhs2 = np.array(
        [
            (k + 1) / k * r2 * Bq[k - 1]
            + r ** (2 * k + 2) * Aq[k]
            - (k + 1) / k * r ** (2 * k + 2) * Aq[k - 1]
            - (1.0 - r2) * Aq[-k - 2]
            + (k + 1) * (1.0 - r2) * r ** (2 * k) * Bq[-k - 1]
            - k * (1.0 - r2) * r ** (2 * k + 2) * Bq[-k - 2]
            + k * (k + 1) * (1.0 - r2) ** 2 * r ** (2 * k) * (Aq[k] - Aq[k - 1])
            for k in range(1, N)
        ]
    )
    return _solve_tail_and_core(*systems, rhs1, rhs2, np.zeros(4), blocks, exp, N)


def run_solver(geom: TunnelGeometry, mat: Material, cfg: SolverConfig = SolverConfig()) -> SolutionCoefficients:
    """Solve the excavation problem for one parameter set.

    Returns unfiltered coefficients; apply the Lanczos replacement at
    evaluation time (``fields.apply_filter``) when ``cfg.lanczos_enabled``
    is set.  Raises :class:`ConvergenceError` if the increments do not
    drop below ``cfg.epsilon`` within ``cfg.max_reps`` reps.
    """
    t0 = time.perf_counter()
    N = cfg.N
    derived = derive_geometry(geom)
    exp = compute_expansion(N, mat.lam, derived.theta0)
    lc = loading_constants(derived, mat)
    E = compute_E(N, lc)
    blocks = assemble_blocks(exp, E, derived, mat, N)
    A1, A2, A3 = assemble_matrices(exp, blocks, derived, N)
    systems = (FactoredSystem(A1), FactoredSystem(A2), FactoredSystem(A3))
    cond = tuple(s.cond for s in systems)

    inc, ca_inc = initial_phase(systems, E, blocks, exp, derived, mat, N)
    totals = inc.copy()
    Ca = ca_inc
    history = [inc.max_abs()]
    reps = 0
    while history[-1] > cfg.epsilon:
        if reps >= cfg.max_reps:
            raise ConvergenceError(
                f"no convergence after {cfg.max_reps} reps (last increment {history[-1]:.3e})",
                history,
            )
        inc, ca_inc = iteration_phase(systems, inc, blocks, exp, derived, N)
        totals.values += inc.values
        Ca += ca_inc
        history.append(inc.max_abs())
        reps += 1

    A, B = compute_AB(totals, exp, N)
    psi = psi_coefficients(A, B, N)
    C0 = displacement_constant(A, B, mat.kappa, N)
    return SolutionCoefficients(
        d=totals,
        Ca=float(Ca),
        A=A,
        B=B,
        psi=psi,
        C0=float(C0),
        reps=reps,
        cond=cond,
        history=history,
        derived=derived,
        material=mat,
        config=cfg,
        elapsed=time.perf_counter() - t0,
    )
