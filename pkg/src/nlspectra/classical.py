"""The stationary problem read as a classical particle: x plays time, psi the
position and psi' the momentum.

Only the real (zero angular momentum) system is integrated here::

    dq/dt = p,   dp/dt = 2 (V(t) - E) q + 2 eps f(q^2) q

with the free Hamiltonian ``H0 = p^2/2 + E q^2 - eps F(q^2)`` outside the
potential support.  The curves ``p = +eta(q, E)`` (expanding) and
``p = -eta(q, E)`` (shrinking) are its zero level set.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .model import DeltaNotSamplable, DeltaWell, Nonlinearity, Potential, ZeroPotential

BLOWUP = 1e12
_MIN_SEGMENT_STEPS = 64


@dataclass(frozen=True)
class PhaseState:
    q: float
    p: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.q) and math.isfinite(self.p) and math.isfinite(self.t)):
            raise ValueError("phase state must be finite")


@dataclass
class Trajectory:
    """Sampled orbit; ``blowup`` marks an escape beyond ``BLOWUP``."""

    t: np.ndarray
    q: np.ndarray
    p: np.ndarray
    node_count: int
    H0_final: float
    blowup: bool = False

    @property
    def samples(self) -> list[PhaseState]:
        return [PhaseState(float(q), float(p), float(t)) for t, q, p in zip(self.t, self.q, self.p)]

    @property
    def final(self) -> PhaseState:
        return PhaseState(float(self.q[-1]), float(self.p[-1]), float(self.t[-1]))


@dataclass
class BatchResult:
    """End-point data of many lanes integrated over the same window."""

    q: np.ndarray
    p: np.ndarray
    nodes: np.ndarray
    sq_integral: np.ndarray  # Simpson estimate of the integral of q^2 over the window
    blowup: np.ndarray
    escape_sign: np.ndarray | None = None  # sign of p at the escape (0 where none)
    t: np.ndarray | None = None
    Q: np.ndarray | None = None
    P: np.ndarray | None = None
    extra: dict = field(default_factory=dict)


def free_hamiltonian(q, p, E, nl: Nonlinearity):
    q = np.asarray(q, dtype=float)
    return 0.5 * np.asarray(p) ** 2 + E * q * q - nl.epsilon * nl.F(q * q)


def eta_radicand(q, E, nl: Nonlinearity):
    """``-E + eps F(q^2)/q^2`` (vectorised)."""
    z = np.asarray(q, dtype=float) ** 2
    if nl.is_linear:
        return -E + 0.0 * z
    with np.errstate(invalid="ignore"):
        return -E + nl.epsilon * nl.F_over_zeta(z)


def eta(q, E, nl: Nonlinearity):
    """Momentum of the expanding cue through q: ``q sqrt(2) sqrt(-E + eps F(q^2)/q^2)``.

    NaN marks points where the radicand is negative (no vanishing cue through
    q at this E).  At q = 0 the value is 0 whenever the radicand is not
    negative there, including the +inf radicand of the attractive log model.
    """
    qa = np.asarray(q, dtype=float)
    rad = np.asarray(eta_radicand(qa, E, nl), dtype=float)
    with np.errstate(invalid="ignore"):
        out = qa * math.sqrt(2.0) * np.sqrt(rad)
    out = np.where(rad < 0, np.nan, out)
    out = np.where((qa == 0) & ~(rad < 0), 0.0, out)
    return out if out.ndim else float(out)


def angular_momentum(q1: float, q2: float, p1: float, p2: float) -> float:
    return q1 * p2 - q2 * p1


def _breakpoints(V: Potential, t0: float, t1: float) -> list[float]:
    pts = [t0, t1]
    cand: Iterable[float] = ()
    if hasattr(V, "bumps"):
        cand = [x for b in V.bumps for x in b.support]
    elif not isinstance(V, ZeroPotential):
        cand = V.support
    lo, hi = min(t0, t1), max(t0, t1)
    pts += [c for c in cand if lo < c < hi]
    return sorted(set(pts), reverse=bool(t1 < t0))


def _hermite_dip(q0, p0, q1, p1, h):
    """Extremal value of the cubic Hermite interpolant on a step (for tangency checks)."""
    # q(s) on s in [0,1]: h00 q0 + h10 h p0 + h01 q1 + h11 h p1
    a = 2 * q0 + h * p0 - 2 * q1 + h * p1
    b = -3 * q0 - 2 * h * p0 + 3 * q1 - h * p1
    c = h * p0
    # derivative 3a s^2 + 2b s + c = 0
    disc = 4 * b * b - 12 * a * c
    out = np.full(np.shape(q0), np.inf)
    ok = disc >= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        sq = np.sqrt(np.where(ok, disc, 0.0))
        for sgn in (1.0, -1.0):
            s = np.where(a != 0, (-2 * b + sgn * sq) / (6 * a), -c / (2 * b))
            inside = ok & (s > 0) & (s < 1)
            val = ((a * s + b) * s + c) * s + q0
            out = np.where(inside & (np.abs(val) < np.abs(out)), val, out)
    return out


def integrate_batch(q0, p0, E, nl: Nonlinearity, V: Potential, t0: float, t1: float,
                    dt: float, *, record: bool = False) -> BatchResult:
    """Classical RK4 for many lanes at once (each lane may carry its own E).

    The window is split at the potential's breakpoints; every segment is
    stepped uniformly with an even number of steps not exceeding ``dt`` in
    size, so the Simpson rule applies per segment.
    """
    if isinstance(V, DeltaWell):
        raise DeltaNotSamplable("delta wells are handled by the closed forms")
    if dt <= 0:
        raise ValueError("dt must be positive")
    q = np.array(np.broadcast_to(np.asarray(q0, dtype=float), np.broadcast(q0, p0, E).shape))
    p = np.array(np.broadcast_to(np.asarray(p0, dtype=float), q.shape))
    Ev = np.broadcast_to(np.asarray(E, dtype=float), q.shape)
    eps2 = 2.0 * nl.epsilon
    linear = nl.is_linear

    nodes = np.zeros(q.shape, dtype=np.int64)
    last_sign = np.sign(q)
    blow = ~(np.isfinite(q) & np.isfinite(p))
    sq = np.zeros(q.shape)
    esc = np.zeros(q.shape)
    ts, Qs, Ps = ([t0], [q.copy()], [p.copy()]) if record else (None, None, None)

    def accel(qq, vt):
        a = 2.0 * (vt - Ev) * qq
        if not linear:
            a = a + eps2 * nl.f_times(qq * qq, qq)
        return a

    pts = _breakpoints(V, t0, t1)
    with np.errstate(over="ignore", invalid="ignore"):
        for sa, sb in zip(pts[:-1], pts[1:]):
            n = max(int(math.ceil(abs(sb - sa) / dt - 1e-9)), _MIN_SEGMENT_STEPS if not isinstance(V, ZeroPotential) else 2)
            n += n % 2
            h = (sb - sa) / n
            tt = sa + h * np.arange(n + 1)
            vk = np.asarray(V(tt), dtype=float)
            vm = np.asarray(V(tt[:-1] + 0.5 * h), dtype=float)
            seg = q * q
            for k in range(n):
                k1q = p
                k1p = accel(q, vk[k])
                k2q = p + 0.5 * h * k1p
                k2p = accel(q + 0.5 * h * k1q, vm[k])
                k3q = p + 0.5 * h * k2p
                k3p = accel(q + 0.5 * h * k2q, vm[k])
                k4q = p + h * k3p
                k4p = accel(q + h * k3q, vk[k + 1])
                qn = q + (h / 6.0) * (k1q + 2 * k2q + 2 * k3q + k4q)
                pn = p + (h / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p)

                bad = ~(np.abs(qn) <= BLOWUP) | ~(np.abs(pn) <= BLOWUP)
                if bad.any():
                    esc = np.where(bad & ~blow, np.sign(np.where(np.isfinite(pn), pn, p)), esc)
                    blow |= bad
                    qn = np.where(blow, np.nan, qn)
                    pn = np.where(blow, np.nan, pn)

                sn = np.sign(qn)
                crossed = (last_sign * sn) < 0
                # double zero inside one step without a sign change at the samples
                turn = (~crossed) & (p * pn < 0) & (q * qn > 0)
                if turn.any():
                    dip = _hermite_dip(q, p, qn, pn, h)
                    # inf: no interior extremum (p vanished at a sample), nothing to count
                    nodes += np.where(turn & np.isfinite(dip) & (np.sign(dip) * np.sign(q) < 0), 2, 0)
                nodes += crossed
                last_sign = np.where(sn != 0, sn, last_sign)

                seg = seg + (4.0 if k % 2 == 0 else 2.0) * qn * qn
                q, p = qn, pn
                if record:
                    ts.append(tt[k + 1])
                    Qs.append(q.copy())
                    Ps.append(p.copy())
            seg = seg - qn * qn  # last point carries weight 1
            sq = sq + seg * (h / 3.0)

    res = BatchResult(q=q, p=p, nodes=nodes, sq_integral=sq, blowup=blow, escape_sign=esc)
    if record:
        res.t = np.asarray(ts)
        res.Q = np.asarray(Qs)
        res.P = np.asarray(Ps)
    return res


def integrate(initial: PhaseState, E: float, nl: Nonlinearity, V: Potential, t_end: float,
              dt: float = 1e-4) -> Trajectory:
    """Fixed-step RK4 from ``initial.t`` to ``t_end`` sampling every step.

    Escapes beyond ``BLOWUP`` are reported through ``Trajectory.blowup``; the
    samples are truncated at the last finite state.
    """
    res = integrate_batch(initial.q, initial.p, E, nl, V, initial.t, t_end, dt, record=True)
    t = res.t
    q = np.asarray(res.Q).reshape(len(t))
    p = np.asarray(res.P).reshape(len(t))
    finite = np.isfinite(q) & np.isfinite(p)
    if not finite.all():
        stop = int(np.argmin(finite))
        t, q, p = t[:stop], q[:stop], p[:stop]
    H0 = float(free_hamiltonian(q[-1], p[-1], E, nl)) if len(t) else math.nan
    return Trajectory(t=t, q=q, p=p, node_count=int(res.nodes), H0_final=H0, blowup=bool(res.blowup))


def cue_state(q: float, E: float, nl: Nonlinearity, t: float, sign: int = +1) -> PhaseState:
    """Point on the expanding (sign=+1) or shrinking (sign=-1) cue through q."""
    e = eta(q, E, nl)
    if math.isnan(e):
        raise ValueError(f"no vanishing cue through q={q} at E={E}")
    return PhaseState(q, sign * e, t)


def write_trajectory_csv(traj: Trajectory, path, E: float, nl: Nonlinearity, V: Potential) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# E={E!r}\n")
        fh.write(f"# epsilon={nl.epsilon!r}\n")
        fh.write(f"# potential={json.dumps(V.to_json(), sort_keys=True)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "q", "p"])
        for t, q, p in zip(traj.t, traj.q, traj.p):
            w.writerow([repr(float(t)), repr(float(q)), repr(float(p))])
