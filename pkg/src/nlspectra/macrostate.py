"""Localised stationary states with V = 0 and their fate under a small pulse.

For f(zeta) = zeta (eps < 0, E < 0) and f(zeta) = ln zeta (eps < 0) the
cues I+(E) and I-(E) close into a loop through the origin, traced once by a
macrostate.  A pulse ``lambda * phi`` under the rising cue moves the orbit
off the loop: the free Hamiltonian after the pulse equals
``2 lambda * integral(phi q dq)``, so its sign decides whether the orbit
circulates outside (H0 > 0) or inside (H0 < 0) the loop.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, simpson
from scipy.optimize import brentq

from .classical import PhaseState, Trajectory, eta, free_hamiltonian, integrate, integrate_batch
from .model import Nonlinearity, NonlinearityKind, Potential, ZeroPotential
from .spectral import DomainError, turning_amplitude


class NoLoop(ValueError):
    """The cues I+(E) and I-(E) do not close into a loop."""


class PreconditionViolated(ValueError):
    """The pulse does not sit under the rising cue."""


class MacrostateKind(str, enum.Enum):
    SOLITON = "Soliton"
    GAUSSON = "Gausson"


class Verdict(str, enum.Enum):
    RETURNS_TO_ORIGIN = "ReturnsToOrigin"
    INNER = "InnerCirculation"
    OUTER = "OuterCirculation"


@dataclass(frozen=True)
class MacrostateProfile:
    kind: MacrostateKind
    E: float
    epsilon: float

    @property
    def nonlinearity(self) -> Nonlinearity:
        if self.kind is MacrostateKind.SOLITON:
            return Nonlinearity.zakharov(self.epsilon)
        return Nonlinearity.logarithmic(self.epsilon)

    @property
    def amplitude(self) -> float:
        return float(self(0.0))

    @property
    def norm(self) -> float:
        """Closed-form integral of psi^2 over the real line."""
        if self.kind is MacrostateKind.SOLITON:
            return 2.0 * self.E / self.epsilon * 2.0 / math.sqrt(-2.0 * self.E)
        return math.exp((self.E + self.epsilon) / self.epsilon) * math.sqrt(math.pi / (-2.0 * self.epsilon))

    def __call__(self, x):
        x = np.asarray(x)
        dtype = np.longdouble if x.dtype == np.longdouble else float
        x = x.astype(dtype)
        E, eps = dtype(self.E), dtype(self.epsilon)
        if self.kind is MacrostateKind.SOLITON:
            out = np.sqrt(2 * E / eps) / np.cosh(x * np.sqrt(-2 * E))
        else:
            out = np.exp((E + eps) / (2 * eps) + eps * x * x)
        return out if out.ndim else out[()]

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        psi = self(x)
        if self.kind is MacrostateKind.SOLITON:
            k2 = -2.0 * self.E
            return k2 * psi - 2.0 * k2 * psi**3 / (2.0 * self.E / self.epsilon)
        return (4.0 * self.epsilon**2 * x * x + 2.0 * self.epsilon) * psi


def soliton(E: float, epsilon: float) -> MacrostateProfile:
    if not (E < 0 and epsilon < 0):
        raise DomainError("the Zakharov macrostate needs E < 0 and eps < 0")
    return MacrostateProfile(MacrostateKind.SOLITON, float(E), float(epsilon))


def gausson(E: float, epsilon: float) -> MacrostateProfile:
    if not epsilon < 0:
        raise DomainError("the gausson needs eps < 0")
    if not math.isfinite(E):
        raise DomainError("E must be finite")
    return MacrostateProfile(MacrostateKind.GAUSSON, float(E), float(epsilon))


def stationary_residual(profile: MacrostateProfile, x, h: float = 1e-4) -> float:
    """Max of ``|-psi''/2 - E psi + eps f(psi^2) psi|`` with psi'' by central differences.

    Steps h and h/2 are combined by Richardson extrapolation, and the
    differences are taken in extended precision so that the h^-2
    cancellation error stays well below the truncation error.
    """
    xl = np.asarray(x, dtype=np.longdouble)
    psi = profile(xl)

    def central(hh):
        return (profile(xl + hh) - 2 * psi + profile(xl - hh)) / (hh * hh)

    hl = np.longdouble(h)
    d2 = (4 * central(hl / 2) - central(hl)) / 3
    eps = np.longdouble(profile.epsilon)
    if profile.kind is MacrostateKind.SOLITON:
        nonlin = eps * psi**3
    else:
        nonlin = eps * np.log(psi * psi) * psi
    res = -0.5 * d2 - np.longdouble(profile.E) * psi + nonlin
    return float(np.max(np.abs(res)))


# --------------------------------------------------------------------------
# the loop by integration


def _hermite(q0, p0, q1, p1, h, s):
    s2, s3 = s * s, s * s * s
    return ((2 * s3 - 3 * s2 + 1) * q0 + (s3 - 2 * s2 + s) * h * p0
            + (-2 * s3 + 3 * s2) * q1 + (s3 - s2) * h * p1)


def _accel(q, E, nl: Nonlinearity):
    return -2.0 * E * q + 2.0 * nl.epsilon * float(nl.f_times(np.array(q * q), np.array(q)))


def _tail_times(q_seed: float, E: float, nl: Nonlinearity, decades: float = 12.0, per_decade: int = 8):
    """t(q) - t(q_seed) for q below the seed, from ``dt = dq / eta(q)``."""
    qs = q_seed * np.logspace(-decades, 0.0, int(decades * per_decade) + 1)
    dts = [quad(lambda u: 1.0 / eta(u, E, nl), lo, hi, epsabs=0.0, epsrel=1e-12)[0]
           for lo, hi in zip(qs[:-1], qs[1:])]
    t = -np.concatenate([np.cumsum(dts[::-1])[::-1], [0.0]])
    return qs, t


def macrostate_by_shooting(E: float, nl: Nonlinearity, q_seed: float = 1e-6, dt: float = 1e-3,
                           t_max: float = 200.0) -> Trajectory:
    """Trace the loop from ``q_seed`` on I+(E) to the turning point and mirror it.

    The returned trajectory is centred on the turning point (t = 0 at
    q_max).  Below ``q_seed`` the cue is extended by quadrature of
    ``dq / eta``, so samples reach q = 1e-12 q_seed on both sides.
    """
    if not q_seed > 0:
        raise ValueError("q_seed must be positive")
    p_seed = eta(q_seed, E, nl)
    if math.isnan(p_seed) or p_seed <= 0:
        raise NoLoop(f"no expanding cue through q={q_seed} at E={E}")

    t, q, p = [0.0], [q_seed], [p_seed]
    chunk = 2000
    while True:
        res = integrate_batch(q[-1], p[-1], E, nl, ZeroPotential(), t[-1], t[-1] + chunk * dt, dt, record=True)
        Q, P = np.ravel(res.Q), np.ravel(res.P)
        if np.any(~np.isfinite(Q)):
            raise NoLoop(f"the cue escapes to infinity at E={E}")
        turn = np.nonzero(P[1:] <= 0)[0]
        if len(turn):
            i = int(turn[0]) + 1
            t += list(res.t[1:i]); q += list(Q[1:i]); p += list(P[1:i])
            h = res.t[i] - res.t[i - 1]
            a0, a1 = _accel(Q[i - 1], E, nl), _accel(Q[i], E, nl)
            s = brentq(lambda u: _hermite(P[i - 1], a0, P[i], a1, h, u), 0.0, 1.0, xtol=1e-15)
            t_turn = res.t[i - 1] + s * h
            q_turn = _hermite(Q[i - 1], P[i - 1], Q[i], P[i], h, s)
            break
        t += list(res.t[1:]); q += list(Q[1:]); p += list(P[1:])
        if t[-1] > t_max:
            raise NoLoop(f"no turning point before t={t_max}")

    qs_tail, t_tail = _tail_times(q_seed, E, nl)
    t_half = np.concatenate([t_tail[:-1], np.asarray(t)]) - t_turn
    q_half = np.concatenate([qs_tail[:-1], np.asarray(q)])
    p_half = np.concatenate([eta(qs_tail[:-1], E, nl), np.asarray(p)])
    tt = np.concatenate([t_half, [0.0], -t_half[::-1]])
    qq = np.concatenate([q_half, [q_turn], q_half[::-1]])
    pp = np.concatenate([p_half, [0.0], -p_half[::-1]])
    H0 = float(free_hamiltonian(qq[-1], pp[-1], E, nl))
    return Trajectory(t=tt, q=qq, p=pp, node_count=0, H0_final=H0)


def trajectory_profile(traj: Trajectory, x) -> np.ndarray:
    """Cubic Hermite interpolation of q(t) at the points x (0 outside the samples)."""
    x = np.asarray(x, dtype=float)
    t, q, p = traj.t, traj.q, traj.p
    i = np.clip(np.searchsorted(t, x) - 1, 0, len(t) - 2)
    h = t[i + 1] - t[i]
    s = (x - t[i]) / h
    out = _hermite(q[i], p[i], q[i + 1], p[i + 1], h, s)
    return np.where((x >= t[0]) & (x <= t[-1]), out, 0.0)


def loop_amplitude(E: float, nl: Nonlinearity) -> float:
    """q_max of the loop through the origin; NoLoop if the cue never turns."""
    qm = turning_amplitude(E, nl)
    if qm is None:
        raise NoLoop(f"the cue radicand does not re-zero at E={E}")
    return qm


# --------------------------------------------------------------------------
# perturbation by a pulse under the rising cue


@dataclass(frozen=True)
class PerturbationOutcome:
    verdict: Verdict
    H0_after: float


def _pulse_window(pulse: Potential) -> tuple[float, float]:
    lo, hi = pulse.support
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise PreconditionViolated("the pulse needs a finite support interval")
    return lo, hi


def _pulse_magnitude(pulse: Potential) -> float:
    if isinstance(pulse, ZeroPotential):
        return 0.0
    lo, hi = _pulse_window(pulse)
    return float(np.max(np.abs(pulse(np.linspace(lo, hi, 201)))))


def check_under_rising_cue(E: float, nl: Nonlinearity, pulse: Potential, start: PhaseState,
                           dt: float = 1e-4) -> Trajectory:
    """Dry run with V = 0: the free orbit must be on the rising cue over the pulse support."""
    if isinstance(pulse, ZeroPotential):
        return integrate(start, E, nl, ZeroPotential(), start.t, dt)
    alpha, beta = _pulse_window(pulse)
    if start.t > alpha:
        raise PreconditionViolated("the start lies after the pulse begins")
    q_max = loop_amplitude(E, nl)
    traj = integrate(start, E, nl, ZeroPotential(), beta, dt)
    if traj.blowup:
        raise PreconditionViolated("the free orbit escapes before the pulse ends")
    inside = traj.t >= alpha - 1e-12
    q, p = traj.q[inside], traj.p[inside]
    if not (np.all(q > 0) and np.all(q < q_max) and np.all(p > 0)):
        raise PreconditionViolated("the pulse is not under the rising cue")
    return traj


def classify_perturbation(E: float, nl: Nonlinearity, pulse: Potential, start: PhaseState,
                          dt: float = 1e-4) -> PerturbationOutcome:
    """Integrate through the pulse and read the side of the loop from H0 after it."""
    check_under_rising_cue(E, nl, pulse, start, dt)
    t_end = start.t if isinstance(pulse, ZeroPotential) else _pulse_window(pulse)[1]
    traj = integrate(start, E, nl, pulse, t_end, dt)
    H0 = traj.H0_final
    tol = 1e-10 * max(1.0, _pulse_magnitude(pulse))
    if abs(H0) < tol:
        verdict = Verdict.RETURNS_TO_ORIGIN
    elif H0 < 0:
        verdict = Verdict.INNER
    else:
        verdict = Verdict.OUTER
    return PerturbationOutcome(verdict, H0)


def hamiltonian_jump_estimate(E: float, nl: Nonlinearity, pulse: Potential, start: PhaseState,
                              dt: float = 1e-4) -> float:
    """First-order jump of H0 across the pulse: ``2 * integral(V q dq)`` along the free orbit."""
    if isinstance(pulse, ZeroPotential):
        return 0.0
    alpha, beta = _pulse_window(pulse)
    free = integrate(start, E, nl, ZeroPotential(), alpha, dt)
    seg = integrate(free.final, E, nl, ZeroPotential(), beta, dt)
    # q is monotone on the rising cue, so dq = p dt
    return 2.0 * float(simpson(pulse(seg.t) * seg.q * seg.p, x=seg.t))


def rising_cue_start(E: float, nl: Nonlinearity, q: float, t: float) -> PhaseState:
    """Point on I+(E) at amplitude q placed at time t."""
    e = eta(q, E, nl)
    if math.isnan(e) or e <= 0:
        raise NoLoop(f"no rising cue through q={q} at E={E}")
    return PhaseState(q, float(e), t)


def soliton_cue_start(E: float, epsilon: float, t: float) -> PhaseState:
    """Exact state of the soliton orbit (centred at 0) at time t < 0."""
    prof = soliton(E, epsilon)
    k = math.sqrt(-2.0 * E)
    q = float(prof(t))
    return PhaseState(q, -k * math.tanh(k * t) * q, t)


def is_loop_model(nl: Nonlinearity) -> bool:
    return nl.kind in (NonlinearityKind.ZAKHAROV, NonlinearityKind.LOGARITHMIC) and nl.epsilon < 0
