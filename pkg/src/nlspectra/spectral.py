"""Bifurcation spectra by shooting from the expanding cue to the shrinking one.

For a potential supported on ``[a, b]`` a start point ``(q_a, +eta(q_a, E))``
is carried across the support by the classical flow; E is an eigenvalue
exactly when the end point lands on ``p = -eta(q, E)``.  All scans are
vectorised over (q_a, E) lanes, so a whole branch map is one RK4 sweep plus
a few multisection sweeps.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as _quad

from .classical import Trajectory, eta, eta_radicand, integrate_batch
from .model import DeltaWell, Nonlinearity, NonlinearityKind, Potential

log = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)


class SpectralError(ValueError):
    pass


class CueUndefined(SpectralError):
    """No expanding cue passes through the requested start amplitude."""


class DomainError(SpectralError):
    pass


class NoSolution(SpectralError):
    """The delta well cannot localise a norm-1 packet (nonlinearity too strong)."""


@dataclass
class ShootingConfig:
    dt: float = 1e-3
    n_scan: int = 2001
    E_tol: float = 1e-10
    N_tol: float = 1e-8
    sections: int = 16
    node_refinements: int = 3
    max_secant: int = 40


@dataclass(frozen=True)
class SpectralPoint:
    q_a: float
    E: float
    n: int
    pseudonorm: float
    norm_valid: bool


@dataclass
class BranchMap:
    q_a: np.ndarray
    points: list[list[SpectralPoint]] = field(default_factory=list)

    def branch(self, n: int) -> list[SpectralPoint]:
        """Points of branch n ordered by q_a (grid points where it was not found are skipped)."""
        return [pt for row in self.points for pt in row if pt.n == n]

    def branches(self) -> list[int]:
        return sorted({pt.n for row in self.points for pt in row})


def _window(V: Potential, a: float | None, b: float | None) -> tuple[float, float]:
    if isinstance(V, DeltaWell):
        raise SpectralError("delta wells have closed forms; use delta_well_E / delta_well_norm1")
    lo, hi = V.support
    a = lo if a is None else a
    b = hi if b is None else b
    if not b > a:
        raise SpectralError("empty shooting window; pass a and b explicitly for this potential")
    return a, b


# --------------------------------------------------------------------------
# cue tails


def zakharov_cue_norm(E: float, q_a: float, epsilon: float, long: bool = False) -> float:
    """Closed-form mass of a cubic-model cue tail ending at amplitude ``q_a``.

    Short cues (``long=False``) run monotonically from 0 to q_a; long cues,
    possible only for attractive coupling, first pass the turning point.
    """
    if not E < 0:
        raise DomainError("cue norms need E < 0")
    absE = -E
    rad = absE + epsilon * q_a * q_a / 2.0
    if rad < 0:
        raise DomainError("no cue through q_a at this E")
    if long:
        if not epsilon < 0:
            raise DomainError("long cues exist only for epsilon < 0")
        return (2.0 / (epsilon * SQRT2)) * (-math.sqrt(rad) - math.sqrt(absE))
    # (2/(eps sqrt2))(sqrt(rad) - sqrt|E|), rewritten to stay finite as eps -> 0
    return (q_a * q_a / SQRT2) / (math.sqrt(rad) + math.sqrt(absE))


def _zakharov_tail(q, E, eps):
    """Vectorised short-tail mass and validity for the cubic (and linear) model."""
    z = np.asarray(q, dtype=float) ** 2
    E = np.asarray(E, dtype=float)
    rad = -E + eps * z / 2.0
    valid = (rad >= 0) & (E < 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = (z / SQRT2) / (np.sqrt(rad) + np.sqrt(-E))
    val = np.where(z == 0, 0.0, val)
    return val, valid


def _tail_quadrature(zeta, E, nl: Nonlinearity) -> tuple[float, bool]:
    if zeta == 0:
        return 0.0, True
    R = lambda z: float(eta_radicand(math.sqrt(z), E, nl))  # noqa: E731
    probe = np.concatenate((np.geomspace(zeta * 1e-12, zeta, 200), np.linspace(0, zeta, 201)[1:]))
    if np.any(eta_radicand(np.sqrt(probe), E, nl) < 0):
        return math.nan, False
    val, _ = _quad.quad(lambda z: 1.0 / math.sqrt(R(z)), 0.0, zeta, limit=200, epsabs=1e-14, epsrel=1e-12)
    return val / (2.0 * SQRT2), True


def turning_amplitude(E: float, nl: Nonlinearity, q_hi: float = 1e6) -> float | None:
    """Smallest q > 0 where the cue radicand vanishes (the loop's turning point), or None."""
    from scipy.optimize import brentq

    qs = np.geomspace(1e-12, q_hi, 4000)
    rad = eta_radicand(qs, E, nl)
    if rad[0] < 0:
        return None
    neg = np.nonzero(rad < 0)[0]
    if len(neg) == 0:
        return None
    i = neg[0]
    return brentq(lambda x: float(eta_radicand(x, E, nl)), qs[i - 1], qs[i], xtol=1e-15, rtol=1e-15)


def cue_tail_quadrature(q: float, E: float, nl: Nonlinearity, long: bool = False) -> float:
    """Tail mass ``(1/(2 sqrt2)) * int_0^{q^2} dzeta / sqrt(-E + eps F(zeta)/zeta)`` by quadrature.

    This is independent of the closed forms and serves as their check.  A
    long tail adds the excursion from q^2 to the turning point and back.
    """
    zeta = q * q
    val, ok = _tail_quadrature(zeta, E, nl)
    if not ok:
        raise DomainError("cue radicand negative below q^2")
    if not long:
        return val
    qm = turning_amplitude(E, nl)
    if qm is None:
        raise DomainError("no turning point: long cues need a closed loop")
    zm = qm * qm

    def g(z):
        # 1/sqrt(R) = sqrt((zm - z)/R) * (zm - z)^(-1/2); the first factor is smooth
        r = float(eta_radicand(math.sqrt(z), E, nl))
        return math.sqrt(max(zm - z, 0.0) / r) if r > 0 else _edge_limit(z, zm, E, nl)

    full, _ = _quad.quad(g, 0.0, zm, weight="alg", wvar=(0.0, -0.5), epsabs=1e-14, epsrel=1e-12, limit=200)
    back, _ = _quad.quad(g, zeta, zm, weight="alg", wvar=(0.0, -0.5), epsabs=1e-14, epsrel=1e-12, limit=200)
    return (full + back) / (2.0 * SQRT2)


def _edge_limit(z, zm, E, nl):
    h = max(1e-9 * zm, 1e-14)
    r = float(eta_radicand(math.sqrt(max(zm - h, 0.0)), E, nl))
    return math.sqrt(h / r) if r > 0 else 0.0


def cue_tail_norm(q, E, nl: Nonlinearity):
    """Mass of the short vanishing cue through amplitude q (vectorised): ``(value, valid)``.

    ``valid`` is False where the radicand turns negative somewhere in
    ``(0, q^2]``, i.e. the pseudonorm is undetermined.
    """
    if nl.kind in (NonlinearityKind.LINEAR, NonlinearityKind.ZAKHAROV):
        return _zakharov_tail(q, E, nl.epsilon if nl.kind is NonlinearityKind.ZAKHAROV else 0.0)
    qs, Es = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(E, dtype=float))
    val = np.empty(qs.shape)
    ok = np.empty(qs.shape, dtype=bool)
    for idx in np.ndindex(qs.shape):
        if not (Es[idx] < 0 or nl.kind is NonlinearityKind.LOGARITHMIC):
            val[idx], ok[idx] = math.nan, False
            continue
        val[idx], ok[idx] = _tail_quadrature(float(qs[idx]) ** 2, float(Es[idx]), nl)
    return val, ok


# --------------------------------------------------------------------------
# shooting


@dataclass
class ShotBatch:
    E: np.ndarray
    q_a: np.ndarray
    r: np.ndarray
    n: np.ndarray
    N: np.ndarray
    valid: np.ndarray
    start_ok: np.ndarray
    q_b: np.ndarray
    p_b: np.ndarray


def shoot(E, q_a, nl: Nonlinearity, V: Potential, a: float | None = None, b: float | None = None,
          dt: float = 1e-3) -> ShotBatch:
    """Shoot every (E, q_a) lane across ``[a, b]`` (defaults: the potential support)."""
    a, b = _window(V, a, b)
    Eb, qb = np.broadcast_arrays(np.asarray(E, dtype=float), np.asarray(q_a, dtype=float))
    Eb, qb = Eb.ravel().copy(), qb.ravel().copy()
    p0 = np.asarray(eta(qb, Eb, nl), dtype=float).reshape(Eb.shape)
    start_ok = np.isfinite(p0)
    q0 = np.where(start_ok, qb, 0.0)
    p0 = np.where(start_ok, p0, 0.0)
    res = integrate_batch(q0, p0, Eb, nl, V, a, b, dt)

    eta_b = np.asarray(eta(res.q, Eb, nl), dtype=float).reshape(Eb.shape)
    r = res.p + eta_b
    undefined = ~np.isfinite(eta_b) & np.isfinite(res.p)
    with np.errstate(invalid="ignore"):
        r = np.where(undefined, np.copysign(np.inf, res.p), r)
    # an escape before b overshoots the shrinking cue: the residual takes the sign of p there
    r = np.where(res.blowup & (res.escape_sign != 0), np.copysign(np.inf, res.escape_sign), r)
    r = np.where(start_ok & (~res.blowup | (res.escape_sign != 0)), r, np.nan)

    t_plus, v_plus = cue_tail_norm(q0, Eb, nl)
    t_minus, v_minus = cue_tail_norm(np.where(np.isfinite(res.q), res.q, 0.0), Eb, nl)
    N = t_plus + res.sq_integral + t_minus
    valid = v_plus & v_minus & start_ok & ~res.blowup & np.isfinite(N)
    return ShotBatch(E=Eb, q_a=qb, r=r, n=res.nodes, N=N, valid=valid, start_ok=start_ok,
                     q_b=res.q, p_b=res.p)


def residual(E: float, q_a: float, nl: Nonlinearity, V: Potential, a=None, b=None,
             dt: float = 1e-3) -> tuple[float, int]:
    """Signed miss ``p(b) + eta(q(b), E)`` and the node count inside ``(a, b)``."""
    if not math.isfinite(float(eta(q_a, E, nl))):
        raise CueUndefined(f"eta({q_a}, {E}) undefined")
    s = shoot(E, q_a, nl, V, a, b, dt)
    return float(s.r[0]), int(s.n[0])


def pseudonorm(traj: Trajectory, E: float, nl: Nonlinearity, a: float, b: float) -> tuple[float, bool]:
    """Cue tails glued to a trajectory at ``a`` and ``b`` plus the Simpson mass in between."""
    t, q = np.asarray(traj.t), np.asarray(traj.q)
    if len(t) == 0 or t[0] > a + 1e-12 or t[-1] < b - 1e-12:
        raise SpectralError("trajectory does not span [a, b]")
    inside = (t >= a - 1e-12) & (t <= b + 1e-12)
    ti, qi = t[inside], q[inside]
    N0 = _simpson(ti, qi * qi)
    qa = float(np.interp(a, t, q))
    qb = float(np.interp(b, t, q))
    tp, vp = cue_tail_norm(qa, E, nl)
    tm, vm = cue_tail_norm(qb, E, nl)
    return float(tp + N0 + tm), bool(vp and vm)


def _simpson(t, y):
    if len(t) < 2:
        return 0.0
    from scipy.integrate import simpson

    return float(simpson(y, x=t))


# --------------------------------------------------------------------------
# eigenvalue search


@dataclass
class _Bracket:
    """Sign change of the residual along one axis: E at fixed q_a, or q_a at fixed E."""

    fixed: float
    n: int
    lo: float
    hi: float
    r_lo: float
    r_hi: float
    axis: str = "E"

    @property
    def q_a(self) -> float:
        return self.fixed if self.axis == "E" else 0.5 * (self.lo + self.hi)


def _brackets_in_row(fixed, var, r, n, n_max, axis):
    out = []
    for i in range(len(var) - 1):
        if n[i] != n[i + 1] or n[i] > n_max:
            continue
        if np.isnan(r[i]) or np.isnan(r[i + 1]):
            continue
        if r[i] == 0:
            out.append(_Bracket(fixed, int(n[i]), var[i], var[i], 0.0, 0.0, axis))
        elif np.sign(r[i]) != np.sign(r[i + 1]) and r[i + 1] != 0:
            out.append(_Bracket(fixed, int(n[i]), var[i], var[i + 1], r[i], r[i + 1], axis))
    return out


def _scan_rows(fixed_rows, var_rows, nl, V, a, b, dt, axis="E"):
    """Shoot a ragged set of rows (one fixed value, a grid on the other axis) in one batch."""
    lens = [len(v) for v in var_rows]
    var = np.concatenate(var_rows)
    fix = np.concatenate([np.full(len(v), f) for f, v in zip(fixed_rows, var_rows)])
    s = shoot(var, fix, nl, V, a, b, dt) if axis == "E" else shoot(fix, var, nl, V, a, b, dt)
    out, k = [], 0
    for m in lens:
        out.append((s.r[k:k + m], s.n[k:k + m]))
        k += m
    return out


def _find_brackets(fixed_list, grid, nl, V, a, b, cfg, n_max, axis="E"):
    """Coarse scan plus local refinement wherever the node count jumps."""
    rows = [np.asarray(grid, dtype=float)] * len(fixed_list)
    scans = _scan_rows(fixed_list, rows, nl, V, a, b, cfg.dt, axis)
    xs = [rows[i].copy() for i in range(len(fixed_list))]
    rs = [sc[0] for sc in scans]
    ns = [sc[1] for sc in scans]
    for _ in range(cfg.node_refinements):
        new_f, new_x, owner = [], [], []
        for i in range(len(fixed_list)):
            jumps = np.nonzero(ns[i][:-1] != ns[i][1:])[0]
            if len(jumps) == 0:
                continue
            pts = np.concatenate([np.linspace(xs[i][j], xs[i][j + 1], cfg.sections + 2)[1:-1] for j in jumps])
            new_f.append(fixed_list[i])
            new_x.append(pts)
            owner.append(i)
        if not owner:
            break
        extra = _scan_rows(new_f, new_x, nl, V, a, b, cfg.dt, axis)
        for i, pts, (r2, n2) in zip(owner, new_x, extra):
            x_cat = np.concatenate((xs[i], pts))
            order = np.argsort(x_cat, kind="stable")
            xs[i] = x_cat[order]
            rs[i] = np.concatenate((rs[i], r2))[order]
            ns[i] = np.concatenate((ns[i], n2))[order]
    brackets = []
    for i, f in enumerate(fixed_list):
        brackets += _brackets_in_row(f, xs[i], rs[i], ns[i], n_max, axis)
    return brackets


def _refine(brackets: list[_Bracket], nl, V, a, b, cfg, tol=None) -> list[_Bracket]:
    """Multisection of all brackets at once until every width is below ``tol``."""
    tol = cfg.E_tol if tol is None else tol
    live = [br for br in brackets if br.hi - br.lo > tol]
    M = cfg.sections
    while live:
        for axis in ("E", "q"):
            group = [br for br in live if br.axis == axis]
            if not group:
                continue
            rows = [np.linspace(br.lo, br.hi, M + 2)[1:-1] for br in group]
            scans = _scan_rows([br.fixed for br in group], rows, nl, V, a, b, cfg.dt, axis)
            for br, xin, (r, n) in zip(group, rows, scans):
                _narrow(br, xin, r, n)
        live = [br for br in live if br.hi - br.lo > tol]
    return [br for br in brackets if math.isfinite(br.lo)]


def _narrow(br, xin, r, n):
    xs = np.concatenate(([br.lo], xin, [br.hi]))
    rs = np.concatenate(([br.r_lo], r, [br.r_hi]))
    ns = np.concatenate(([br.n], n, [br.n]))
    for j in range(len(xs) - 1):
        if ns[j] != br.n or ns[j + 1] != br.n:
            continue
        if rs[j] == 0:
            br.lo = br.hi = xs[j]
            br.r_lo = br.r_hi = 0.0
            return
        if np.sign(rs[j]) != np.sign(rs[j + 1]):
            br.lo, br.hi, br.r_lo, br.r_hi = xs[j], xs[j + 1], rs[j], rs[j + 1]
            return
    br.lo = br.hi = math.nan  # lost: node count changed inside the bracket


def _is_root(br: _Bracket) -> bool:
    if not (math.isfinite(br.r_lo) and math.isfinite(br.r_hi)):
        return False
    # a genuine root leaves a residual of order |dr/dx| * tol; jumps do not shrink
    return abs(br.r_lo) + abs(br.r_hi) < 1e-4


def _root_x(br: _Bracket) -> float:
    if br.r_lo == br.r_hi:
        return 0.5 * (br.lo + br.hi)
    w = br.r_lo / (br.r_lo - br.r_hi)
    return br.lo + w * (br.hi - br.lo)


def _points_from_brackets(brackets, nl, V, a, b, cfg) -> list[SpectralPoint]:
    roots = [br for br in brackets if _is_root(br)]
    if not roots:
        return []
    x = np.array([_root_x(br) for br in roots])
    f = np.array([br.fixed for br in roots])
    E = np.array([xx if br.axis == "E" else ff for br, xx, ff in zip(roots, x, f)])
    q = np.array([ff if br.axis == "E" else xx for br, xx, ff in zip(roots, x, f)])
    s = shoot(E, q, nl, V, a, b, cfg.dt)
    pts = []
    for i, br in enumerate(roots):
        if s.n[i] != br.n:
            continue
        pts.append(SpectralPoint(q_a=float(q[i]), E=float(E[i]), n=br.n,
                                 pseudonorm=float(s.N[i]), norm_valid=bool(s.valid[i])))
    return pts


def _E_grid(E_range, cfg) -> np.ndarray:
    lo, hi = E_range
    if not (lo < hi and hi <= 0):
        raise SpectralError("E_range must be an increasing interval below 0")
    hi = min(hi, -1e-12)
    return np.linspace(lo, hi, cfg.n_scan)


def _dedupe(points: list[SpectralPoint], tol: float) -> list[SpectralPoint]:
    out: list[SpectralPoint] = []
    for pt in sorted(points, key=lambda p: (p.q_a, p.E)):
        if out and out[-1].q_a == pt.q_a and abs(out[-1].E - pt.E) < tol and out[-1].n == pt.n:
            continue
        out.append(pt)
    return out


def find_eigenvalues(q_a: float, nl: Nonlinearity, V: Potential, E_range=(-20.0, 0.0), n_max: int = 50,
                     cfg: ShootingConfig | None = None, a=None, b=None) -> list[SpectralPoint]:
    """All eigenvalues at start amplitude ``q_a`` in ``E_range`` with at most ``n_max`` nodes.

    Sorted by E; an empty list means nothing was found.
    """
    return branch_map([q_a], nl, V, E_range, n_max, cfg, a, b).points[0]


def branch_map(q_a_grid, nl: Nonlinearity, V: Potential, E_range=(-20.0, 0.0), n_max: int = 50,
               cfg: ShootingConfig | None = None, a=None, b=None) -> BranchMap:
    cfg = cfg or ShootingConfig()
    a, b = _window(V, a, b)
    qs = [float(q) for q in q_a_grid]
    E = _E_grid(E_range, cfg)
    brackets = _find_brackets(qs, E, nl, V, a, b, cfg, n_max)
    brackets = _refine(brackets, nl, V, a, b, cfg)
    pts = _points_from_brackets(brackets, nl, V, a, b, cfg)
    rows: list[list[SpectralPoint]] = [[] for _ in qs]
    for pt in pts:
        rows[qs.index(pt.q_a)].append(pt)
    rows = [sorted(_dedupe(r, 10 * cfg.E_tol), key=lambda p: p.E) for r in rows]
    return BranchMap(q_a=np.asarray(qs), points=rows)


def _branch_point_near(axis, value, n, guess, width, nl, V, a, b, cfg, E_max=-1e-12):
    """Branch-n point with E (axis="q") or q_a (axis="E") pinned to ``value``.

    The free coordinate is searched in a window around ``guess`` that widens
    until a root with the right node count turns up.
    """
    for _ in range(8):
        lo, hi = guess - width, guess + width
        if axis == "E":
            hi = min(hi, E_max)
        else:
            lo = max(lo, 0.0)
        grid = np.linspace(lo, hi, 33)
        br = [x for x in _find_brackets([value], grid, nl, V, a, b, cfg, n, axis) if x.n == n]
        if br:
            tol = cfg.E_tol if axis == "E" else cfg.E_tol * max(1.0, abs(guess))
            pts = _points_from_brackets(_refine(br, nl, V, a, b, cfg, tol), nl, V, a, b, cfg)
            pts = [p for p in pts if p.n == n]
            if pts:
                key = (lambda p: abs(p.E - guess)) if axis == "E" else (lambda p: abs(p.q_a - guess))
                return min(pts, key=key)
        width *= 2
    return None


def _branch_axis(pts: list[SpectralPoint]) -> str:
    """Parametrise a branch by q_a unless it folds back in q_a, then by E."""
    qs = [p.q_a for p in pts]
    return "q_a" if len(set(qs)) == len(qs) else "E"


def isonorm_eigenvalues(N_target: float, nl: Nonlinearity, V: Potential, q_a_grid, E_range=(-20.0, 0.0),
                        n_max: int = 50, cfg: ShootingConfig | None = None, a=None, b=None,
                        bmap: BranchMap | None = None) -> list[SpectralPoint]:
    """One eigenvalue per branch whose pseudonorm equals ``N_target``.

    Branches that do not reach ``N_target`` on the grid are skipped (logged);
    points with an undetermined pseudonorm take no part.
    """
    if not N_target > 0:
        raise SpectralError("N_target must be positive")
    cfg = cfg or ShootingConfig()
    a, b = _window(V, a, b)
    bmap = bmap or branch_map(q_a_grid, nl, V, E_range, n_max, cfg, a, b)
    out = []
    for n in bmap.branches():
        pts = [p for p in bmap.branch(n) if p.norm_valid]
        axis = _branch_axis(pts)
        pts.sort(key=(lambda p: p.q_a) if axis == "q_a" else (lambda p: p.E))
        crossing = None
        for p0, p1 in zip(pts[:-1], pts[1:]):
            if (p0.pseudonorm - N_target) * (p1.pseudonorm - N_target) <= 0:
                crossing = (p0, p1)
                break
        if crossing is None:
            log.info("branch %d does not reach N=%g on the q_a grid", n, N_target)
            continue
        pt = _secant_on_branch(N_target, n, *crossing, axis, nl, V, a, b, cfg)
        if pt is not None:
            out.append(pt)
    return sorted(out, key=lambda p: p.E)


def _secant_on_branch(N_target, n, p0, p1, axis, nl, V, a, b, cfg):
    """Illinois-safeguarded secant for pseudonorm = N_target along one branch."""
    par = (lambda p: p.q_a) if axis == "q_a" else (lambda p: p.E)
    oth = (lambda p: p.E) if axis == "q_a" else (lambda p: p.q_a)
    lo, hi = p0, p1
    flo, fhi = lo.pseudonorm - N_target, hi.pseudonorm - N_target
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    side = 0
    best = lo if abs(flo) < abs(fhi) else hi
    for _ in range(cfg.max_secant):
        x = par(hi) - fhi * (par(hi) - par(lo)) / (fhi - flo)
        if not (min(par(lo), par(hi)) < x < max(par(lo), par(hi))):
            x = 0.5 * (par(lo) + par(hi))
        guess = oth(lo) + (x - par(lo)) / (par(hi) - par(lo)) * (oth(hi) - oth(lo))
        width = abs(oth(hi) - oth(lo)) + (1e-6 if axis == "q_a" else 0.25) * max(1e-3, abs(guess))
        if axis == "q_a":
            pt = _branch_point_near("E", x, n, guess, width, nl, V, a, b, cfg)
        else:
            pt = _branch_point_near("q", x, n, guess, width, nl, V, a, b, cfg)
        if pt is None or not pt.norm_valid:
            log.warning("branch %d lost at %s=%g during isonorm search", n, axis, x)
            return None
        fn = pt.pseudonorm - N_target
        best = pt
        if abs(fn) < cfg.N_tol or abs(par(hi) - par(lo)) < 1e-14:
            return pt
        if fn * fhi < 0:
            lo, flo = hi, fhi
            hi, fhi = pt, fn
            side = 0
        else:
            hi, fhi = pt, fn
            if side == -1:
                flo *= 0.5
            side = -1
    return best


# --------------------------------------------------------------------------
# delta well closed forms


def delta_well_E(Omega: float, epsilon: float, q0: float, nl: Nonlinearity | None = None) -> float:
    """Eigenvalue ``-Omega^2/2 + eps F(q0^2)/q0^2`` of the delta well at peak amplitude q0.

    ``nl`` fixes the shape of F (cubic model by default); its own coupling is ignored.
    """
    if not q0 > 0:
        raise DomainError("q0 must be positive")
    shape = nl or Nonlinearity.zakharov(1.0)
    return -0.5 * Omega * Omega + epsilon * float(shape.F_over_zeta(q0 * q0))


def delta_well_norm1(Omega: float, epsilon: float) -> float:
    """Norm-1 eigenvalue of the cubic model in ``-Omega delta(x)``: ``-(Omega - eps/2)^2 / 2``.

    Raises NoSolution when the coupling is too strong to localise:
    ``eps > 2 Omega`` for a well, ``eps > 4 Omega`` for a barrier (long cues).
    """
    if Omega >= 0:
        if epsilon > 2 * Omega:
            raise NoSolution(f"no localization: epsilon={epsilon} > 2*Omega={2 * Omega}")
    elif epsilon > 4 * Omega:
        raise NoSolution(f"no localization: epsilon={epsilon} > 4*Omega={4 * Omega}")
    d = Omega - epsilon / 2.0
    return -0.5 * d * d


def delta_well_norm(Omega: float, epsilon: float, E: float, long: bool = False) -> float:
    """Norm of the cubic-model delta-well state at eigenvalue E (two cue tails)."""
    if epsilon == 0:
        raise DomainError("the linear delta well has no norm constraint")
    z0 = (2 * E + Omega * Omega) / epsilon
    if z0 < 0:
        raise DomainError("E inconsistent with Omega and epsilon")
    g = -1.0 if long else 1.0
    return (4.0 / (epsilon * SQRT2)) * (g * math.sqrt(-E + epsilon * z0 / 2.0) - math.sqrt(-E))
