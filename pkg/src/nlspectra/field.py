"""Time evolution of ``i dPsi/dt = -Psi''/2 + V Psi + eps f(|Psi|^2) Psi``.

The field is stored as real and imaginary parts (Q, P), the canonical pair of

    H[Q, P] = 1/2 int [ -Q Q''/2 - P P''/2 + (Q^2 + P^2) V + eps F(Q^2 + P^2) ] dx

with ``dQ/dt = dH/dP`` and ``dP/dt = -dH/dQ``.  Space uses the 3-point
Laplacian with zero ghost values beyond the grid; time uses the implicit
midpoint rule, which is symplectic and conserves the norm exactly (up to the
fixed-point tolerance).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .model import Bump, DeltaNotSamplable, DeltaWell, Nonlinearity, Potential

log = logging.getLogger(__name__)


class FixedPointDiverged(RuntimeError):
    pass


class Inconclusive(RuntimeError):
    """The packet still sits on the barrier; no scattering verdict."""


@dataclass
class FieldState:
    Q: np.ndarray
    P: np.ndarray
    x0: float
    dx: float
    t: float = 0.0

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=float)
        self.P = np.asarray(self.P, dtype=float)
        if self.Q.shape != self.P.shape or self.Q.ndim != 1 or len(self.Q) < 3:
            raise ValueError("Q and P must be 1-D arrays of equal length >= 3")
        if not (np.isfinite(self.Q).all() and np.isfinite(self.P).all()):
            raise ValueError("field must be finite")

    @classmethod
    def from_psi(cls, psi, x, t: float = 0.0) -> "FieldState":
        x = np.asarray(x, dtype=float)
        psi = np.asarray(psi, dtype=complex)
        return cls(psi.real.copy(), psi.imag.copy(), float(x[0]), float(x[1] - x[0]), t)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(len(self.Q))

    @property
    def psi(self) -> np.ndarray:
        return self.Q + 1j * self.P


def grid(x_min: float = -16.0, x_max: float = 16.0, n: int = 801) -> np.ndarray:
    """Uniform grid; the default is [-16, 16] with 801 points (dx = 0.04)."""
    return np.linspace(x_min, x_max, n)


@dataclass
class Absorber:
    """Post-step mask ``1 - strength * ramp^4`` over the outer ``width`` of each edge."""

    width: float = 4.0
    strength: float = 2e-3

    def mask(self, x: np.ndarray) -> np.ndarray:
        d = np.minimum(x - x[0], x[-1] - x)
        ramp = np.clip((self.width - d) / self.width, 0.0, 1.0)
        return 1.0 - self.strength * ramp**4


@dataclass
class EvolutionConfig:
    t_end: float
    dt: float = 2e-4
    fixed_point_tol: float = 1e-12
    max_fp_iters: int = 50
    absorber: Absorber | None = None
    record_every: int = 100
    partial_intervals: tuple = ()
    snapshot_every: int | None = None

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass
class DiagnosticsSeries:
    times: list = field(default_factory=list)
    norm: list = field(default_factory=list)
    partial_norms: dict = field(default_factory=dict)
    H: list = field(default_factory=list)
    E_func: list = field(default_factory=list)
    centroid: list = field(default_factory=list)
    fp_iters: list = field(default_factory=list)

    def arrays(self) -> "DiagnosticsSeries":
        return DiagnosticsSeries(
            times=np.asarray(self.times), norm=np.asarray(self.norm),
            partial_norms={k: np.asarray(v) for k, v in self.partial_norms.items()},
            H=np.asarray(self.H), E_func=np.asarray(self.E_func), centroid=np.asarray(self.centroid),
            fp_iters=np.asarray(self.fp_iters))


# --------------------------------------------------------------------------
# discrete operators


def laplacian(u: np.ndarray, dx: float) -> np.ndarray:
    out = -2.0 * u
    out[1:] += u[:-1]
    out[:-1] += u[1:]
    return out / (dx * dx)


def _trap_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def _potential_on(V: Potential, x: np.ndarray) -> np.ndarray:
    if isinstance(V, DeltaWell):
        raise DeltaNotSamplable("delta wells cannot be put on a grid")
    return np.asarray(V(x), dtype=float)


def apply_hamiltonian(psi: np.ndarray, dx: float, Vx: np.ndarray, nl: Nonlinearity) -> np.ndarray:
    """``(-1/2 d^2/dx^2 + V + eps f(|psi|^2)) psi`` on the grid."""
    out = -0.5 * laplacian(psi, dx) + Vx * psi
    if not nl.is_linear:
        rho = psi.real**2 + psi.imag**2
        out += nl.epsilon * nl.f_times(rho, psi)
    return out


def discrete_hamiltonian(s: FieldState, nl: Nonlinearity, V: Potential) -> float:
    """Trapezoidal value of the field Hamiltonian with the 3-point Laplacian."""
    Vx = _potential_on(V, s.x)
    rho = s.Q**2 + s.P**2
    dens = -0.5 * (s.Q * laplacian(s.Q, s.dx) + s.P * laplacian(s.P, s.dx)) + rho * Vx
    if not nl.is_linear:
        dens = dens + nl.epsilon * nl.F(rho)
    return 0.5 * float(np.sum(_trap_weights(len(rho)) * dens) * s.dx)


def norm(s: FieldState) -> float:
    rho = s.Q**2 + s.P**2
    return float(np.sum(_trap_weights(len(rho)) * rho) * s.dx)


def partial_mass(s: FieldState, lo: float, hi: float) -> float:
    """Integral of |Psi|^2 over [lo, hi]: trapezoid with linear interpolation at the ends."""
    x = s.x
    lo, hi = max(lo, x[0]), min(hi, x[-1])
    if not hi > lo:
        return 0.0
    rho = s.Q**2 + s.P**2
    inner = (x > lo) & (x < hi)
    xs = np.concatenate(([lo], x[inner], [hi]))
    ys = np.concatenate(([np.interp(lo, x, rho)], rho[inner], [np.interp(hi, x, rho)]))
    return float(trapezoid(ys, xs))


def partial_norm(s: FieldState, lo: float, hi: float) -> float:
    N = norm(s)
    return partial_mass(s, lo, hi) / N if N > 0 else 0.0


def energy_functional(s: FieldState, nl: Nonlinearity, V: Potential) -> float:
    """Normalised expectation of the nonlinear Hamiltonian operator, E(t)."""
    N = norm(s)
    if N == 0:
        return 0.0
    psi = s.psi
    Hpsi = apply_hamiltonian(psi, s.dx, _potential_on(V, s.x), nl)
    return float(np.sum(_trap_weights(len(psi)) * (np.conj(psi) * Hpsi).real) * s.dx) / N


def centroid(s: FieldState) -> float:
    rho = s.Q**2 + s.P**2
    tot = rho.sum()
    return float((s.x * rho).sum() / tot) if tot > 0 else 0.0


# --------------------------------------------------------------------------
# time stepping


class _Stepper:
    """Implicit midpoint with a fixed-point solve for the midpoint value.

    The midpoint m solves ``m = psi - (i dt / 2) H(m) m``; the previous
    step's increment seeds the iteration.
    """

    def __init__(self, x, dx, nl: Nonlinearity, V: Potential, cfg: EvolutionConfig):
        self.dx = dx
        self.nl = nl
        self.Vx = _potential_on(V, x)
        self.cfg = cfg
        self.mask = cfg.absorber.mask(x) if cfg.absorber is not None else None
        self.last_delta: np.ndarray | None = None
        self.iters = 0

    def __call__(self, psi: np.ndarray) -> np.ndarray:
        cfg = self.cfg
        half = 0.5j * cfg.dt
        if self.last_delta is not None:
            m = psi + 0.5 * self.last_delta
        else:
            m = psi - half * apply_hamiltonian(psi, self.dx, self.Vx, self.nl)
        prev_inc = math.inf
        for it in range(1, cfg.max_fp_iters + 1):
            m_new = psi - half * apply_hamiltonian(m, self.dx, self.Vx, self.nl)
            inc = float(np.max(np.abs(m_new - m)))
            m = m_new
            if inc <= cfg.fixed_point_tol:
                break
            if it > 3 and inc > prev_inc:
                raise FixedPointDiverged(f"fixed-point increments grew ({prev_inc:.3e} -> {inc:.3e})")
            prev_inc = inc
        else:
            raise FixedPointDiverged(f"no convergence in {cfg.max_fp_iters} iterations (last increment {inc:.3e})")
        self.iters = it
        new = 2.0 * m - psi
        self.last_delta = new - psi
        if self.mask is not None:
            new = new * self.mask
        return new


def step(s: FieldState, nl: Nonlinearity, V: Potential, cfg: EvolutionConfig) -> FieldState:
    """One implicit-midpoint step (absorber applied afterwards, if configured)."""
    st = _Stepper(s.x, s.dx, nl, V, cfg)
    new = st(s.psi)
    return FieldState(new.real.copy(), new.imag.copy(), s.x0, s.dx, s.t + cfg.dt)


def _record(diag: DiagnosticsSeries, s: FieldState, nl, V, cfg, iters):
    diag.times.append(s.t)
    diag.norm.append(norm(s))
    for iv in cfg.partial_intervals:
        diag.partial_norms.setdefault(tuple(iv), []).append(partial_norm(s, *iv))
    diag.H.append(discrete_hamiltonian(s, nl, V))
    diag.E_func.append(energy_functional(s, nl, V))
    diag.centroid.append(centroid(s))
    diag.fp_iters.append(iters)


def evolve(psi0: FieldState, nl: Nonlinearity, V: Potential, cfg: EvolutionConfig, snapshots: list | None = None,
           progress=None) -> tuple[FieldState, DiagnosticsSeries]:
    """Repeated :func:`step` up to ``cfg.t_end`` with diagnostics every ``record_every`` steps.

    If ``snapshots`` is a list, copies of the state are appended to it every
    ``cfg.snapshot_every`` steps (and at t = 0).
    """
    stepper = _Stepper(psi0.x, psi0.dx, nl, V, cfg)
    diag = DiagnosticsSeries()
    for iv in cfg.partial_intervals:
        diag.partial_norms[tuple(iv)] = []
    psi = psi0.psi.copy()
    s = psi0
    _record(diag, s, nl, V, cfg, 0)
    if snapshots is not None:
        snapshots.append(s)
    n = cfg.n_steps
    for k in range(1, n + 1):
        psi = stepper(psi)
        if k % cfg.record_every == 0 or k == n or (cfg.snapshot_every and k % cfg.snapshot_every == 0):
            s = FieldState(psi.real.copy(), psi.imag.copy(), psi0.x0, psi0.dx, psi0.t + k * cfg.dt)
            if k % cfg.record_every == 0 or k == n:
                _record(diag, s, nl, V, cfg, stepper.iters)
            if snapshots is not None and cfg.snapshot_every and k % cfg.snapshot_every == 0:
                snapshots.append(s)
            if progress is not None:
                progress(k, n)
    s = FieldState(psi.real.copy(), psi.imag.copy(), psi0.x0, psi0.dx, psi0.t + n * cfg.dt)
    return s, diag.arrays()


# --------------------------------------------------------------------------
# scattering


def scattering_intervals(barrier: Bump) -> list[tuple[float, float]]:
    lo, hi = barrier.support
    return [(-math.inf, lo), (lo, hi), (hi, math.inf)]


@dataclass
class ScatteringReport:
    reflected: float
    trapped: float
    transmitted: float
    absorbed: float


def scattering_report(diag: DiagnosticsSeries, barrier: Bump, overlap_limit: float = 0.1) -> ScatteringReport:
    """Final mass fractions left of, on, and right of the barrier (relative to the initial norm).

    Needs the evolution to have recorded :func:`scattering_intervals`.
    Raises :class:`Inconclusive` if more than ``overlap_limit`` of the mass
    still sits on the barrier at the end.
    """
    ivs = scattering_intervals(barrier)
    try:
        left, mid, right = (np.asarray(diag.partial_norms[iv])[-1] for iv in ivs)
    except KeyError as exc:
        raise ValueError("evolution did not record the barrier intervals") from exc
    scale = diag.norm[-1] / diag.norm[0] if diag.norm[0] > 0 else 0.0
    rep = ScatteringReport(reflected=float(left * scale), trapped=float(mid * scale),
                           transmitted=float(right * scale), absorbed=float(1.0 - scale))
    if rep.trapped > overlap_limit:
        raise Inconclusive(f"{rep.trapped:.3f} of the packet still overlaps the barrier")
    return rep
