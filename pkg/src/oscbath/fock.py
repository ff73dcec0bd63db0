"""Truncated number-basis density-matrix integrator.

Implements the reduced-density-matrix generators on a finite level basis
(a|n> = sqrt(n)|n-1>, Q = a + a^+) and integrates them with a classic
fourth-order Runge-Kutta scheme under step-doubling error control.  After
every accepted step the state is re-symmetrized, sigma <- (sigma +
sigma^+)/2, and the correction magnitude is logged; the trace is never
renormalized, so trace drift is a genuine quality metric.

Generators (all exactly trace-free; each line is a commutator or a
Lindblad form, and tr[A,B] = 0 termwise, which covers the literal
quadratic form as well):

* phase-sensitive linear coupling (non-RWA), B = (n+1) a + n a^+:
      R sigma = gamma ([B sigma, X] + [X, sigma B^+]),  X = a + a^+.
  The second slot carries B^+, not B: with B in both slots the mean
  coordinate never decays, contradicting the damped-oscillator limit the
  same coupling produces for the Gaussian solvers.
* RWA damped oscillator, normalized so <a> decays as e^{-gamma t}:
      gamma (n+1) D[a] + gamma n D[a^+],  D[L]s = 2 L s L^+ - {L^+L, s}.
* two-quantum bath, standardized dissipator (default):
      Gamma (n+1) D[a^2] + Gamma n D[(a^+)^2].
* two-quantum bath, literal commutator form (kept for comparison; at
  n = 0 it pumps |1> -> |3>, so it is not the default):
      Gamma (n+1) ([a^2 s, a^+2] + [a^+2, s a^2])
    + Gamma n     ([a^+2 s, a^2] + [a^2, s a^+2]).
* time-dependent second-order kernel: C(t) a-coefficients come from the
  bath gamma functions, C = (gamma_{n+1} + conj(gtilde_n)) a
  + (conj(gamma_n) + gtilde_{n+1}) a^+, same sandwich as the non-RWA
  linear form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .bath import DiscreteModes, gamma_functions
from .errors import IntegrationError, TruncationError
from .wavepacket import WavepacketFrame


# ---------------------------------------------------------------------------
# ladder operators and states

def build_ladder(dim: int):
    """(a, a^+, Q) matrices on dim levels; a|n> = sqrt(n)|n-1>."""
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    n = np.arange(1, dim)
    a = np.zeros((dim, dim))
    a[n - 1, n] = np.sqrt(n)
    ad = a.T.copy()
    return a, ad, a + ad


@dataclass
class FockDensityMatrix:
    """Complex Hermitian matrix sigma_mn = <m|sigma|n> on dim levels."""

    dim: int
    sigma: np.ndarray

    def __post_init__(self):
        self.sigma = np.asarray(self.sigma, dtype=complex)
        if self.sigma.shape != (self.dim, self.dim):
            raise ValueError(f"sigma must be {self.dim}x{self.dim}")

    def hermiticity_defect(self) -> float:
        return float(np.abs(self.sigma - self.sigma.conj().T).max())

    def trace_defect(self) -> float:
        return abs(complex(np.trace(self.sigma)) - 1.0)

    def top_population(self) -> float:
        return float(self.sigma[-1, -1].real)


def coherent_density_matrix(alpha: complex, dim: int) -> FockDensityMatrix:
    """|alpha><alpha| truncated to dim levels.

    Raises TruncationError if the truncated trace deficit exceeds 1e-8
    (the Poisson tail of |<n|alpha>|^2 beyond the basis).
    """
    c = coherent_vector(alpha, dim)
    deficit = 1.0 - float(np.vdot(c, c).real)
    if deficit > 1e-8:
        raise TruncationError(
            f"coherent state alpha={alpha} loses {deficit:.3e} probability "
            f"on {dim} levels; enlarge dim")
    return FockDensityMatrix(dim=dim, sigma=np.outer(c, c.conj()))


def coherent_vector(alpha: complex, dim: int) -> np.ndarray:
    """<n|alpha> = e^{-|a|^2/2} a^n / sqrt(n!), by stable recurrence."""
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    c = np.zeros(dim, dtype=complex)
    c[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, dim):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return c


def cat_density_matrix(alpha: complex, phi: float, dim: int) -> FockDensityMatrix:
    """Density matrix of N^-1(|alpha> + e^{i phi} |-alpha>)."""
    if abs(alpha) == 0:
        raise ValueError("cat state needs |alpha| > 0")
    n2 = 2.0 + 2.0 * math.cos(phi) * math.exp(-2.0 * abs(alpha) ** 2)
    psi = coherent_vector(alpha, dim) + np.exp(1j * phi) * coherent_vector(-alpha, dim)
    sigma = np.outer(psi, psi.conj()) / n2
    deficit = 1.0 - float(np.trace(sigma).real)
    if deficit > 1e-8:
        raise TruncationError(
            f"cat state alpha={alpha} loses {deficit:.3e} probability "
            f"on {dim} levels; enlarge dim")
    return FockDensityMatrix(dim=dim, sigma=sigma)


def number_state_density_matrix(k: int, dim: int) -> FockDensityMatrix:
    if not 0 <= k < dim:
        raise ValueError(f"level k={k} outside basis of {dim} levels")
    sigma = np.zeros((dim, dim), dtype=complex)
    sigma[k, k] = 1.0
    return FockDensityMatrix(dim=dim, sigma=sigma)


# ---------------------------------------------------------------------------
# dissipator kinds

@dataclass(frozen=True)
class LinearNonRWA:
    gamma: float
    nbar: float = 0.0

    def __post_init__(self):
        if self.gamma < 0 or self.nbar < 0:
            raise ValueError("gamma and nbar must be >= 0")


@dataclass(frozen=True)
class LinearRWA:
    gamma: float
    nbar: float = 0.0

    def __post_init__(self):
        if self.gamma < 0 or self.nbar < 0:
            raise ValueError("gamma and nbar must be >= 0")


@dataclass(frozen=True)
class QuadraticLindblad:
    Gamma: float
    nbar2: float = 0.0

    def __post_init__(self):
        if self.Gamma < 0 or self.nbar2 < 0:
            raise ValueError("Gamma and nbar2 must be >= 0")


@dataclass(frozen=True)
class QuadraticLiteral:
    Gamma: float
    nbar2: float = 0.0

    def __post_init__(self):
        if self.Gamma < 0 or self.nbar2 < 0:
            raise ValueError("Gamma and nbar2 must be >= 0")


@dataclass(frozen=True)
class TimeDependent:
    bath: DiscreteModes

    def __post_init__(self):
        if not isinstance(self.bath, DiscreteModes):
            raise ValueError("TimeDependent requires a DiscreteModes bath")


DissipatorKind = Union[LinearNonRWA, LinearRWA, QuadraticLindblad,
                       QuadraticLiteral, TimeDependent]


class Liouvillian:
    """Precomputed generator action d sigma/dt = L(sigma, t)."""

    def __init__(self, kind: DissipatorKind, omega: float, dim: int):
        self.kind = kind
        self.omega = omega
        self.dim = dim
        a, ad, X = build_ladder(dim)
        levels = np.arange(dim)
        # -i w [a^+a, sigma] acts elementwise as -i w (m - n) sigma_mn
        self._ham_phase = -1j * omega * (levels[:, None] - levels[None, :])
        self._a, self._ad, self._X = a, ad, X
        self._coeff_cache: Dict[float, Tuple[complex, complex]] = {}
        if isinstance(kind, LinearNonRWA):
            self._B = kind.gamma * ((kind.nbar + 1) * a + kind.nbar * ad)
            self._Bd = self._B.conj().T
        elif isinstance(kind, LinearRWA):
            self._channels = []
            if kind.gamma > 0:
                self._channels.append((kind.gamma * (kind.nbar + 1), a, ad, ad @ a))
                if kind.nbar > 0:
                    self._channels.append((kind.gamma * kind.nbar, ad, a, a @ ad))
        elif isinstance(kind, (QuadraticLindblad, QuadraticLiteral)):
            A = a @ a
            Ad = ad @ ad
            self._A, self._Ad = A, Ad
            self._AdA, self._AAd = Ad @ A, A @ Ad

    def apply(self, sigma: np.ndarray, t: float = 0.0) -> np.ndarray:
        kind = self.kind
        out = self._ham_phase * sigma
        if isinstance(kind, LinearNonRWA):
            if kind.gamma > 0:
                out += self._sandwich(self._B, self._Bd, sigma)
        elif isinstance(kind, LinearRWA):
            for rate, L, Ld, LdL in self._channels:
                out += rate * (2.0 * (L @ sigma) @ Ld - LdL @ sigma - sigma @ LdL)
        elif isinstance(kind, QuadraticLindblad):
            G, nb = kind.Gamma, kind.nbar2
            if G > 0:
                out += G * (nb + 1) * (2.0 * (self._A @ sigma) @ self._Ad
                                       - self._AdA @ sigma - sigma @ self._AdA)
                if nb > 0:
                    out += G * nb * (2.0 * (self._Ad @ sigma) @ self._A
                                     - self._AAd @ sigma - sigma @ self._AAd)
        elif isinstance(kind, QuadraticLiteral):
            G, nb = kind.Gamma, kind.nbar2
            A, Ad = self._A, self._Ad
            if G > 0:
                As = A @ sigma
                sA = sigma @ A
                out += G * (nb + 1) * (As @ Ad - Ad @ As + Ad @ sA - sA @ Ad)
                if nb > 0:
                    Ads = Ad @ sigma
                    sAd = sigma @ Ad
                    out += G * nb * (Ads @ A - A @ Ads + A @ sAd - sAd @ A)
        elif isinstance(kind, TimeDependent):
            mu_plus_nuc, nu = self._td_coefficients(t)
            C = mu_plus_nuc * self._a + nu * self._ad
            out += self._sandwich(C, C.conj().T, sigma)
        else:
            raise TypeError(f"unknown dissipator kind {kind!r}")
        return out

    def _sandwich(self, C, Cd, sigma):
        # [C sigma, X] + [X, sigma Cd]
        Cs = C @ sigma
        sCd = sigma @ Cd
        X = self._X
        return Cs @ X - X @ Cs + X @ sCd - sCd @ X

    def _td_coefficients(self, t: float):
        if t < 0:
            raise ValueError("time-dependent kernel is defined for t >= 0 only")
        cached = self._coeff_cache.get(t)
        if cached is not None:
            return cached
        g = gamma_functions(self.kind.bath, self.omega, t)
        nu = np.conj(g.gamma_n) + g.gtilde_n1
        mu_plus_nuc = g.gamma_n1 + np.conj(g.gtilde_n)
        if len(self._coeff_cache) > 64:
            self._coeff_cache.clear()
        self._coeff_cache[t] = (mu_plus_nuc, nu)
        return mu_plus_nuc, nu


def liouvillian_apply(kind: DissipatorKind, sigma: FockDensityMatrix,
                      t: float = 0.0, omega: float = 1.0) -> np.ndarray:
    """Generator action d sigma/dt for a single state (one-shot surface)."""
    return Liouvillian(kind, omega, sigma.dim).apply(sigma.sigma, t)


# ---------------------------------------------------------------------------
# adaptive RK4 with step doubling

@dataclass
class FockTrajectory:
    """Trajectory at grid points plus per-frame health diagnostics."""

    times: np.ndarray
    states: List[np.ndarray]
    dim: int
    omega: float
    trace: np.ndarray
    herm_drift: np.ndarray          # max pre-resymmetrization defect per interval
    min_eigenvalue: np.ndarray
    top_population: np.ndarray
    n_accepted: int
    n_rejected: int
    truncation_flagged: bool
    positivity_flagged: bool

    def density_matrices(self) -> List[FockDensityMatrix]:
        return [FockDensityMatrix(dim=self.dim, sigma=s) for s in self.states]


def _rk4(f, t, y, h, k1=None):
    if k1 is None:
        k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + (0.5 * h) * k1)
    k3 = f(t + 0.5 * h, y + (0.5 * h) * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(kind: DissipatorKind, sigma0: FockDensityMatrix, omega: float,
              t_grid: Sequence[float], rtol: float = 1e-8, atol: float = 1e-10,
              first_step: Optional[float] = None,
              truncation_warn: float = 1e-6, truncation_error: float = 1e-3,
              positivity_threshold: float = -1e-6,
              max_steps: int = 5_000_000) -> FockTrajectory:
    """Adaptive step-doubling RK4 trajectory reported at grid points.

    Each accepted step takes one h-step and two h/2-steps, combines them
    with local extrapolation, and re-symmetrizes the state; the
    pre-symmetrization defect is logged per reporting interval.  The
    top-level population is watched: above truncation_warn the run is
    flagged, above truncation_error it aborts.  The minimum eigenvalue is
    monitored per frame (never clipped); dips below positivity_threshold
    set a flag.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1:
        raise ValueError("t_grid must be a 1-d grid")
    if t_grid[0] != 0.0:
        raise ValueError("time grid must start at 0")
    if t_grid.size > 1 and np.any(np.diff(t_grid) <= 0):
        raise ValueError("time grid must be strictly increasing")
    if sigma0.hermiticity_defect() > 1e-10:
        raise ValueError("initial state is not Hermitian")
    if sigma0.trace_defect() > 1e-9:
        raise ValueError("initial state is not unit trace")

    L = Liouvillian(kind, omega, sigma0.dim)

    def f(t, y):
        return L.apply(y, t)

    y = sigma0.sigma.copy()
    t = 0.0
    h = first_step if first_step is not None else 1e-3 / omega
    n_acc = n_rej = 0
    trunc_flag = False

    states: List[np.ndarray] = []
    traces: List[float] = []
    drifts: List[float] = []
    mins: List[float] = []
    tops: List[float] = []

    def record(frame_drift):
        states.append(y.copy())
        traces.append(float(np.trace(y).real))
        drifts.append(frame_drift)
        eigmin = float(np.linalg.eigvalsh(0.5 * (y + y.conj().T)).min())
        mins.append(eigmin)
        tops.append(float(y[-1, -1].real))

    frame_drift = 0.0
    if t_grid[0] == 0.0:
        record(0.0)
        targets = t_grid[1:]
    else:
        targets = t_grid

    for target in targets:
        while True:
            remaining = target - t
            if remaining <= 1e-12 * max(1.0, target):
                t = target
                break
            if n_acc + n_rej > max_steps:
                raise IntegrationError(
                    f"step budget exhausted at t={t:g}", time=t)
            landing = h >= remaining
            h_step = remaining if landing else h
            if h_step < 1e-14 * max(1.0, target):
                raise IntegrationError(
                    f"step size underflow at t={t:g}", time=t)
            k1 = f(t, y)
            y_big = _rk4(f, t, y, h_step, k1=k1)
            y_half = _rk4(f, t, y, 0.5 * h_step, k1=k1)
            y_two = _rk4(f, t + 0.5 * h_step, y_half, 0.5 * h_step)
            delta = y_two - y_big
            scale = atol + rtol * np.abs(y_two)
            ratio = float(np.max(np.abs(delta) / scale)) / 15.0
            if ratio <= 1.0:
                y = y_two + delta / 15.0
                t = target if landing else t + h_step
                n_acc += 1
                defect = float(np.abs(y - y.conj().T).max())
                frame_drift = max(frame_drift, defect)
                y = 0.5 * (y + y.conj().T)
                top = float(y[-1, -1].real)
                if top > truncation_error:
                    raise TruncationError(
                        f"top-level population {top:.3e} exceeded "
                        f"{truncation_error:g} at t={t:g}; enlarge dim")
                if top > truncation_warn:
                    trunc_flag = True
                if not landing:
                    grow = 0.9 * ratio ** -0.2 if ratio > 0 else 5.0
                    h = h_step * min(5.0, max(0.2, grow))
            else:
                n_rej += 1
                h = h_step * max(0.2, 0.9 * ratio ** -0.25)
        record(frame_drift)
        frame_drift = 0.0

    traj = FockTrajectory(
        times=t_grid.copy(), states=states, dim=sigma0.dim, omega=omega,
        trace=np.array(traces), herm_drift=np.array(drifts),
        min_eigenvalue=np.array(mins), top_population=np.array(tops),
        n_accepted=n_acc, n_rejected=n_rej,
        truncation_flagged=trunc_flag,
        positivity_flagged=bool(np.min(mins) < positivity_threshold))
    return traj


# ---------------------------------------------------------------------------
# observables and coordinate densities

def observables(sigma: FockDensityMatrix) -> dict:
    """{meanQ, V, populations, parity, purity}; V = Var(Q)/2."""
    s = sigma.sigma
    _, _, X = build_ladder(sigma.dim)
    meanQ = float(np.trace(s @ X).real)
    meanQ2 = float(np.trace(s @ (X @ X)).real)
    pops = np.real(np.diag(s)).copy()
    signs = np.where(np.arange(sigma.dim) % 2 == 0, 1.0, -1.0)
    return {
        "meanQ": meanQ,
        "V": 0.5 * (meanQ2 - meanQ * meanQ),
        "populations": pops,
        "parity": float(np.sum(signs * pops)),
        "purity": float(np.vdot(s, s).real),
    }


def hermite_functions(dim: int, grid) -> np.ndarray:
    """psi_n(Q) for n < dim, normalized so the ground state has Var(Q) = 1.

    psi_0(Q) = (2 pi)^{-1/4} e^{-Q^2/4}; stable upward recurrence
    psi_{n+1} = (Q psi_n - sqrt(n) psi_{n-1}) / sqrt(n+1).
    """
    grid = np.asarray(grid, dtype=float)
    psi = np.zeros((dim, grid.size))
    psi[0] = (2.0 * math.pi) ** -0.25 * np.exp(-grid**2 / 4.0)
    if dim > 1:
        psi[1] = grid * psi[0]
    for n in range(1, dim - 1):
        psi[n + 1] = (grid * psi[n] - math.sqrt(n) * psi[n - 1]) / math.sqrt(n + 1)
    return psi


def position_density(sigma: FockDensityMatrix, grid) -> WavepacketFrame:
    """P(Q) = sum_mn sigma_mn psi_m(Q) psi_n(Q) on the grid."""
    grid = np.asarray(grid, dtype=float)
    psi = hermite_functions(sigma.dim, grid)
    u = sigma.sigma @ psi
    density = np.einsum("mj,mj->j", psi, u).real
    warnings: Tuple[str, ...] = ()
    pops = np.real(np.diag(sigma.sigma))
    occupied = np.nonzero(pops > 1e-6)[0]
    if occupied.size and grid.size > 1:
        n_top = int(occupied.max())
        k_max = math.sqrt((2 * n_top + 1) / 2.0)
        dq = float(np.max(np.diff(grid)))
        if dq > math.pi / k_max:
            warnings = ("fringe-nyquist",)
    return WavepacketFrame(time=0.0, grid=grid, density=density, warnings=warnings)


def trajectory_observables(traj: FockTrajectory) -> dict:
    """Per-frame observable series as arrays keyed by name."""
    names = ("meanQ", "V", "parity", "purity")
    series = {k: np.empty(len(traj.states)) for k in names}
    for i, s in enumerate(traj.states):
        obs = observables(FockDensityMatrix(dim=traj.dim, sigma=s))
        for k in names:
            series[k][i] = obs[k]
    series["trace"] = traj.trace.copy()
    series["min_eigenvalue"] = traj.min_eigenvalue.copy()
    series["top_population"] = traj.top_population.copy()
    return series


def trajectory_to_csv(traj: FockTrajectory, path) -> None:
    """Long-format CSV: t,observable,value."""
    series = trajectory_observables(traj)
    with open(path, "w") as fh:
        fh.write("t,observable,value\n")
        for name in sorted(series):
            vals = series[name]
            for t, v in zip(traj.times, vals):
                fh.write(f"{float(t)!r},{name},{float(v)!r}\n")
