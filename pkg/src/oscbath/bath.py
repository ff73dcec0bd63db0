"""Bath models and their time-dependent relaxation functions.

A bath is either an analytic limit (Markov or early-time) or an explicit
list of discrete modes.  For discrete modes the four relaxation functions

    gamma_{n+1}(t) = sum_xi K^2 (n_xi+1) (e^{-i(w_xi-w)t} - 1)/(-i(w_xi-w))
    gamma_n(t)     = sum_xi K^2  n_xi    (e^{-i(w_xi-w)t} - 1)/(-i(w_xi-w))
    gtilde_{n+1}(t)= sum_xi K^2 (n_xi+1) (e^{-i(w_xi+w)t} - 1)/(-i(w_xi+w))
    gtilde_n(t)    = sum_xi K^2  n_xi    (e^{-i(w_xi+w)t} - 1)/(-i(w_xi+w))

are evaluated in closed form; they are the running integrals of the bath
correlation functions R_n, R_{n+1} (times e^{-2iwt} for the tilde pair).
The derived pair feeding the cumulant equations is

    nu(t) = conj(gamma_n(t)) + gtilde_{n+1}(t)
    mu(t) = gamma_{n+1}(t) + conj(gtilde_n(t)) - conj(nu(t))

which reduces to the constants (gamma, gamma*nbar) in the Markov limit and
to (0, Gamma0*t) at early times, Gamma0 = sum_xi K^2 (2 n_xi + 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Tuple, Union

import numpy as np


@dataclass(frozen=True)
class LinearMarkov:
    """Flat bath around the system frequency; constant decay rate gamma.

    gamma is the amplitude decay rate (units of the system frequency),
    nbar the mean thermal occupation at that frequency.
    """

    gamma: float
    nbar: float = 0.0

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.nbar < 0:
            raise ValueError(f"nbar must be >= 0, got {self.nbar}")


@dataclass(frozen=True)
class QuadraticMarkov:
    """Two-quantum bath at twice the system frequency.

    Gamma is the two-quantum decay rate, nbar2 the occupation at 2w.
    Its dynamics are not Gaussian; only the Fock solver accepts it.
    """

    Gamma: float
    nbar2: float = 0.0

    def __post_init__(self):
        if self.Gamma < 0:
            raise ValueError(f"Gamma must be >= 0, got {self.Gamma}")
        if self.nbar2 < 0:
            raise ValueError(f"nbar2 must be >= 0, got {self.nbar2}")


@dataclass(frozen=True)
class EarlyTime:
    """Idealized coherent-bath limit: mu = 0, nu(t) = Gamma0 * t."""

    Gamma0: float

    def __post_init__(self):
        if self.Gamma0 < 0:
            raise ValueError(f"Gamma0 must be >= 0, got {self.Gamma0}")


@dataclass(frozen=True)
class Mode:
    """One bath oscillator: frequency, coupling, mean occupation."""

    omega: float
    coupling: float
    occupation: float = 0.0

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError(f"mode frequency must be > 0, got {self.omega}")
        if self.coupling < 0:
            raise ValueError(f"coupling must be >= 0, got {self.coupling}")
        if self.occupation < 0:
            raise ValueError(f"occupation must be >= 0, got {self.occupation}")


@dataclass(frozen=True)
class DiscreteModes:
    """Explicit finite mode list; keeps the mode sums exactly computable."""

    modes: Tuple[Mode, ...]

    def __post_init__(self):
        if len(self.modes) == 0:
            raise ValueError("DiscreteModes needs at least one mode")
        object.__setattr__(self, "modes", tuple(self.modes))

    def arrays(self):
        """(omegas, couplings^2, occupations) as numpy arrays."""
        om = np.array([m.omega for m in self.modes])
        k2 = np.array([m.coupling for m in self.modes]) ** 2
        occ = np.array([m.occupation for m in self.modes])
        return om, k2, occ

    def early_time_constant(self) -> float:
        """Gamma0 = sum K^2 (2 n + 1)."""
        _, k2, occ = self.arrays()
        return float(np.sum(k2 * (2 * occ + 1)))

    def correlation_time(self) -> float:
        """tau_c ~ 1/(spectral width); diagnostic only."""
        om, _, _ = self.arrays()
        width = float(om.max() - om.min())
        if width == 0.0:
            return math.inf
        return 1.0 / width


BathModel = Union[LinearMarkov, QuadraticMarkov, EarlyTime, DiscreteModes]


class GammaFunctions(NamedTuple):
    gamma_n: complex
    gamma_n1: complex
    gtilde_n: complex
    gtilde_n1: complex


@dataclass(frozen=True)
class RelaxationCoefficients:
    """The complex pair (mu(t), nu(t)) driving the cumulant equations."""

    mu: Callable[[float], complex]
    nu: Callable[[float], complex]


def bose_occupation(omega: float, kT: float) -> float:
    """Mean occupation n = 1/(e^{omega/kT} - 1), hbar = k_B = 1.

    Returns 0 at kT = 0.  Raises for omega <= 0 or kT < 0.
    """
    if omega <= 0:
        raise ValueError(f"omega must be > 0, got {omega}")
    if kT < 0:
        raise ValueError(f"kT must be >= 0, got {kT}")
    if kT == 0:
        return 0.0
    x = omega / kT
    if x > 700.0:  # expm1 overflows near 709; the occupation underflows anyway
        return 0.0
    return 1.0 / math.expm1(x)


def _phase_integral(delta, t):
    """int_0^t e^{-i delta s} ds = (e^{-i delta t} - 1)/(-i delta).

    Switches to the series t(1 - ix/2 - x^2/6 + ix^3/24), x = delta*t,
    when |delta*t| < 1e-6; the resonant point delta = 0 gives exactly t.
    """
    delta = np.asarray(delta, dtype=float)
    t = np.asarray(t, dtype=float)
    x = delta * t
    small = np.abs(x) < 1e-6
    safe_delta = np.where(small, 1.0, delta)
    with np.errstate(invalid="ignore"):
        exact = (np.exp(-1j * x) - 1.0) / (-1j * safe_delta)
    series = t * (1.0 - 0.5j * x - x**2 / 6.0 + 1j * x**3 / 24.0)
    return np.where(small, series, exact)


def gamma_functions(bath: DiscreteModes, system_omega: float, t):
    """Evaluate (gamma_n, gamma_{n+1}, gtilde_n, gtilde_{n+1}) at time t.

    t may be a scalar or an array; t >= 0.  The mode sums are closed-form,
    so this is exact up to rounding (no quadrature).
    """
    if not isinstance(bath, DiscreteModes):
        raise TypeError("gamma_functions needs a DiscreteModes bath")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be >= 0")
    om, k2, occ = bath.arrays()
    # shape (nmodes, ...) broadcast over t
    tt = t_arr[np.newaxis, ...]
    res = _phase_integral((om - system_omega).reshape((-1,) + (1,) * t_arr.ndim), tt)
    anti = _phase_integral((om + system_omega).reshape((-1,) + (1,) * t_arr.ndim), tt)
    w_n = (k2 * occ).reshape((-1,) + (1,) * t_arr.ndim)
    w_n1 = (k2 * (occ + 1)).reshape((-1,) + (1,) * t_arr.ndim)
    gamma_n = np.sum(w_n * res, axis=0)
    gamma_n1 = np.sum(w_n1 * res, axis=0)
    gtilde_n = np.sum(w_n * anti, axis=0)
    gtilde_n1 = np.sum(w_n1 * anti, axis=0)
    if t_arr.ndim == 0:
        return GammaFunctions(complex(gamma_n), complex(gamma_n1),
                              complex(gtilde_n), complex(gtilde_n1))
    return GammaFunctions(gamma_n, gamma_n1, gtilde_n, gtilde_n1)


def relaxation_coefficients(bath: BathModel, system_omega: float) -> RelaxationCoefficients:
    """Build the (mu, nu) pair for a bath paired with a system at system_omega.

    LinearMarkov maps to constants (gamma, gamma*nbar) -- Lamb-shift-like
    imaginary parts are dropped, consistent with a real decay rate.
    EarlyTime maps to (0, Gamma0*t).  DiscreteModes composes the gamma
    functions.  QuadraticMarkov is rejected: two-quantum relaxation is not
    Gaussian and lives in the Fock solver.
    """
    if system_omega <= 0:
        raise ValueError(f"system_omega must be > 0, got {system_omega}")
    if isinstance(bath, LinearMarkov):
        if bath.gamma >= system_omega:
            raise ValueError(
                f"underdamped regime requires gamma < omega "
                f"(gamma={bath.gamma}, omega={system_omega})")
        mu_c = complex(bath.gamma)
        nu_c = complex(bath.gamma * bath.nbar)
        return RelaxationCoefficients(mu=lambda t: mu_c, nu=lambda t: nu_c)
    if isinstance(bath, EarlyTime):
        g0 = bath.Gamma0
        return RelaxationCoefficients(mu=lambda t: 0j, nu=lambda t: complex(g0 * t))
    if isinstance(bath, DiscreteModes):
        def mu(t, _b=bath, _w=system_omega):
            g = gamma_functions(_b, _w, t)
            nu_val = np.conj(g.gamma_n) + g.gtilde_n1
            return g.gamma_n1 + np.conj(g.gtilde_n) - np.conj(nu_val)

        def nu(t, _b=bath, _w=system_omega):
            g = gamma_functions(_b, _w, t)
            return np.conj(g.gamma_n) + g.gtilde_n1

        return RelaxationCoefficients(mu=mu, nu=nu)
    if isinstance(bath, QuadraticMarkov):
        raise ValueError(
            "QuadraticMarkov has no Gaussian relaxation functions; "
            "use the Fock solver (quadratic dissipator)")
    raise TypeError(f"unknown bath model {bath!r}")


def flat_comb(center: float, width: float, n_modes: int,
              total_coupling_sq: float, occupation: float = 0.0) -> DiscreteModes:
    """Uniform mode comb over [center-width/2, center+width/2].

    total_coupling_sq is sum K^2 over the comb; equal couplings.  The
    density of states is n_modes/width, so the Markov-limit decay rate is
    pi * K^2 * g = pi * total_coupling_sq / width.
    """
    if n_modes < 2:
        raise ValueError("n_modes must be >= 2")
    if center - width / 2 <= 0:
        raise ValueError("comb extends to non-positive frequencies")
    oms = np.linspace(center - width / 2, center + width / 2, n_modes)
    k = math.sqrt(total_coupling_sq / n_modes)
    return DiscreteModes(tuple(Mode(float(w), k, occupation) for w in oms))
