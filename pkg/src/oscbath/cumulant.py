"""First- and second-cumulant dynamics of Gaussian wave-packet branches.

Each branch (alpha, beta) of a superposition carries five cumulants
K10, K01, K11, K20, K02 of the normally ordered characteristic function

    F = exp(K10 l - K01 l* - K11 l l* + K20 l^2 + K02 l*^2),

with initial values K10 = alpha, K01 = beta, second cumulants zero.
They obey the linear system (mu, nu are the bath relaxation functions)

    dK10 = ( iw - mu*) K10 + mu  K01
    dK01 = -( iw + mu ) K01 + mu* K10
    dK11 = 2 Re nu - 2 Re mu K11 + 2 mu K02 + 2 mu* K20
    dK20 = -nu* + mu  K11 + 2 ( iw - mu*) K20
    dK02 = -nu  + mu* K11 - 2 ( iw + mu ) K02

Note the sign of mu in the K02 damping term: it is the complex conjugate
of the K20 equation, as it must be for K02 = conj(K20) (and hence a real
packet width) to be preserved.  Writing it with the opposite sign breaks
conjugation symmetry and disagrees with the closed-form Markov solution
by orders of magnitude after a few periods.

The Markov closed form for a coherent branch is

    Q(t) = 2 Re(alpha0 z(t)) e^{-gamma t}
    V(t) = 1/2 + n - n e^{-2 gamma t} [1 + (g/w~)^2 (1 - cos 2w~t)
                                         + (g/w~) sin 2w~t]
    z(t) = cos w~t + (g/w~) sin w~t + i (w/w~) sin w~t,  w~ = sqrt(w^2-g^2)

and the idealized early-time bath (mu=0, nu=Gamma0 t) has the exact
solution V(t) = 1/2 + Gamma0 t^2 - (Gamma0/w^2) sin^2(wt); the widely
quoted quadratic law keeps only the first term and holds pointwise within
5% once wt >~ 4.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .bath import RelaxationCoefficients
from .errors import IntegrationError


@dataclass(frozen=True)
class BranchCumulants:
    """Cumulants of one (alpha, beta) branch at a single time."""

    alpha: complex
    beta: complex
    K10: complex
    K01: complex
    K11: complex
    K20: complex
    K02: complex

    @classmethod
    def initial(cls, alpha: complex, beta: complex) -> "BranchCumulants":
        return cls(alpha=complex(alpha), beta=complex(beta),
                   K10=complex(alpha), K01=complex(beta),
                   K11=0j, K20=0j, K02=0j)

    @property
    def center(self) -> complex:
        """Packet center Q^{(a,b)} = K10 + K01 (imaginary for off-diagonal)."""
        return self.K10 + self.K01

    @property
    def variance_param(self) -> complex:
        """V = 1/2 + K11 + K20 + K02; the Gaussian has variance 2V."""
        return 0.5 + self.K11 + self.K20 + self.K02


@dataclass(frozen=True)
class Branch:
    """Label pair plus the complex weight c(alpha, beta)."""

    alpha: complex
    beta: complex
    weight: complex

    def is_diagonal(self, tol: float = 1e-12) -> bool:
        return abs(self.beta - self.alpha.conjugate()) <= tol * max(1.0, abs(self.beta))


@dataclass(frozen=True)
class SuperpositionState:
    """Weighted list of coherent branches; weights are constants of motion."""

    branches: Tuple[Branch, ...]
    system_omega: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))


def coherent_state(alpha0: complex, system_omega: float = 1.0) -> SuperpositionState:
    """Single diagonal branch representing |alpha0>."""
    a0 = complex(alpha0)
    return SuperpositionState(
        branches=(Branch(alpha=a0.conjugate(), beta=a0, weight=1.0 + 0j),),
        system_omega=system_omega)


def make_cat(alpha: complex, phi: float, system_omega: float = 1.0) -> SuperpositionState:
    """Four-branch superposition N^-1(|alpha> + e^{i phi}|-alpha>).

    Branch labels (a*, a), (-a*, -a), (a*, -a), (-a*, a) with weights
    N^-2 {1, 1, e^{-2|a|^2} e^{i phi}, e^{-2|a|^2} e^{-i phi}} and
    N^2 = 2 + 2 cos(phi) e^{-2|a|^2}.
    """
    a = complex(alpha)
    if abs(a) == 0:
        raise ValueError("cat state needs |alpha| > 0")
    overlap = math.exp(-2 * abs(a) ** 2)
    n2 = 2.0 + 2.0 * math.cos(phi) * overlap
    w_diag = 1.0 / n2
    w_off = overlap * cmath.exp(1j * phi) / n2
    return SuperpositionState(
        branches=(
            Branch(alpha=a.conjugate(), beta=a, weight=w_diag),
            Branch(alpha=-a.conjugate(), beta=-a, weight=w_diag),
            Branch(alpha=a.conjugate(), beta=-a, weight=w_off),
            Branch(alpha=-a.conjugate(), beta=a, weight=w_off.conjugate()),
        ),
        system_omega=system_omega)


def _rhs(t, y, omega, mu_f, nu_f):
    K10, K01, K11, K20, K02 = y
    mu = mu_f(t)
    nu = nu_f(t)
    mu_c = np.conj(mu)
    dK10 = (1j * omega - mu_c) * K10 + mu * K01
    dK01 = -(1j * omega + mu) * K01 + mu_c * K10
    dK11 = 2 * np.real(nu) - 2 * np.real(mu) * K11 + 2 * mu * K02 + 2 * mu_c * K20
    dK20 = -np.conj(nu) + mu * K11 + 2 * (1j * omega - mu_c) * K20
    dK02 = -nu + mu_c * K11 - 2 * (1j * omega + mu) * K02
    return [dK10, dK01, dK11, dK20, dK02]


def evolve_cumulants(initial: BranchCumulants, coeffs: RelaxationCoefficients,
                     omega: float, times: Sequence[float],
                     rtol: float = 1e-10, atol: float = 1e-12) -> List[BranchCumulants]:
    """Integrate the cumulant system on a caller-supplied grid.

    times must be strictly increasing and start at 0.  Internally the
    integrator takes adaptive substeps (explicit 4th/5th-order pair) but
    reports only at the grid points.
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size < 1:
        raise ValueError("times must be a 1-d grid")
    if t[0] != 0.0:
        raise ValueError("time grid must start at 0")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")

    y0 = np.array([initial.K10, initial.K01, initial.K11, initial.K20, initial.K02],
                  dtype=complex)
    if t.size == 1:
        return [initial]
    sol = solve_ivp(_rhs, (0.0, float(t[-1])), y0, t_eval=t, method="RK45",
                    rtol=rtol, atol=atol, args=(omega, coeffs.mu, coeffs.nu))
    if not sol.success:
        bad_t = sol.t[-1] if sol.t.size else 0.0
        raise IntegrationError(
            f"cumulant integration failed near t={bad_t:g}: {sol.message}", time=bad_t)
    out = []
    for k in range(t.size):
        K10, K01, K11, K20, K02 = sol.y[:, k]
        out.append(BranchCumulants(alpha=initial.alpha, beta=initial.beta,
                                   K10=complex(K10), K01=complex(K01),
                                   K11=complex(K11), K20=complex(K20),
                                   K02=complex(K02)))
    return out


def evolve_superposition(state: SuperpositionState, coeffs: RelaxationCoefficients,
                         times: Sequence[float], rtol: float = 1e-10,
                         atol: float = 1e-12) -> List[List[BranchCumulants]]:
    """Evolve every branch independently; returns [branch][time] cumulants."""
    return [
        evolve_cumulants(BranchCumulants.initial(b.alpha, b.beta), coeffs,
                         state.system_omega, times, rtol=rtol, atol=atol)
        for b in state.branches
    ]


def effective_frequency(omega: float, gamma: float) -> float:
    """w~ = sqrt(w^2 - g^2); requires the underdamped regime gamma < omega."""
    if gamma >= omega:
        raise ValueError(f"overdamped regime (gamma={gamma} >= omega={omega}) "
                         "is out of scope")
    return math.sqrt(omega * omega - gamma * gamma)


def markov_z(gamma: float, omega: float, t):
    """z(t) = cos w~t + (g/w~) sin w~t + i (w/w~) sin w~t."""
    wt = effective_frequency(omega, gamma)
    t = np.asarray(t, dtype=float)
    s, c = np.sin(wt * t), np.cos(wt * t)
    return c + (gamma / wt) * s + 1j * (omega / wt) * s


def analytic_markov(alpha0: complex, gamma: float, omega: float, nbar: float, t):
    """Closed-form Markov relaxation of a coherent branch.

    Returns (Q, V, z) with Q = 2 Re(alpha0 z(t)) e^{-gamma t}; for complex
    alpha0 the cumulant system corresponds to 2 Re(alpha0 z*(t)) e^{-gamma t}
    (the two agree for real alpha0, the case exercised everywhere here).
    Vectorized over t.
    """
    wt = effective_frequency(omega, gamma)
    t = np.asarray(t, dtype=float)
    z = markov_z(gamma, omega, t)
    Q = 2.0 * np.real(alpha0 * z) * np.exp(-gamma * t)
    r = gamma / wt
    V = 0.5 + nbar - nbar * np.exp(-2 * gamma * t) * (
        1.0 + r * r * (1.0 - np.cos(2 * wt * t)) + r * np.sin(2 * wt * t))
    if t.ndim == 0:
        return float(Q), float(V), complex(z)
    return Q, V, z


def early_time(alpha0: complex, Gamma0: float, omega: float, t):
    """Early-stage kinematics: Q = 2 Re(alpha0 e^{-iwt}), V = 1/2 + Gamma0 t^2.

    This is the quadratic-broadening reference law; the exact solution of
    the cumulant system for the idealized bath carries an additional
    -(Gamma0/w^2) sin^2(wt), see early_time_exact_variance.
    """
    t = np.asarray(t, dtype=float)
    Q = 2.0 * np.real(alpha0 * np.exp(-1j * omega * t))
    V = 0.5 + Gamma0 * t * t
    if t.ndim == 0:
        return float(Q), float(V)
    return Q, V


def early_time_exact_variance(Gamma0: float, omega: float, t):
    """Exact V(t) for mu = 0, nu = Gamma0 t: 1/2 + G0 t^2 - (G0/w^2) sin^2 wt."""
    t = np.asarray(t, dtype=float)
    V = 0.5 + Gamma0 * t * t - (Gamma0 / omega**2) * np.sin(omega * t) ** 2
    if t.ndim == 0:
        return float(V)
    return V
