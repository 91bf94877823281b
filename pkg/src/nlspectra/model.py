"""Nonlinearities and external potentials shared by every solver.

A model is the pair (Nonlinearity, PotentialSpec).  Both are immutable and
have a canonical JSON form, e.g.::

    {"kind": "zakharov", "epsilon": -1.0}
    {"kind": "rect_well", "V0": -10.0, "b": 1.6}
    {"kind": "bump", "V0": -0.75, "xv": 2.0, "sigma": 0.5}
    {"kind": "sum", "bumps": [{"kind": "bump", ...}, ...]}
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]


class ModelError(ValueError):
    """Invalid model parameters or JSON."""


class DeltaNotSamplable(ModelError):
    """A delta well has no pointwise values; use the closed-form routines."""


class _Divergent(enum.Enum):
    DIVERGENT = "divergent"

    def __repr__(self) -> str:
        return "DIVERGENT"


#: Returned by :func:`eval_F_over_zeta` when F(zeta)/zeta has no finite limit at 0.
DIVERGENT = _Divergent.DIVERGENT


class NonlinearityKind(str, enum.Enum):
    LINEAR = "linear"
    ZAKHAROV = "zakharov"
    LOGARITHMIC = "logarithmic"
    CUSTOM = "custom"


def _xlogx(z: np.ndarray) -> np.ndarray:
    out = np.zeros_like(z)
    pos = z > 0
    out[pos] = z[pos] * np.log(z[pos])
    return out


@dataclass(frozen=True)
class Nonlinearity:
    """The self-interaction ``epsilon * f(|psi|^2)`` with antiderivative F, F(0) = 0.

    Custom models must supply both ``f_custom`` and ``F_custom`` as vectorised
    callables; F is never obtained by numerical integration.
    """

    kind: NonlinearityKind
    epsilon: float = 0.0
    f_custom: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)
    F_custom: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", NonlinearityKind(self.kind))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        if self.kind is NonlinearityKind.CUSTOM and (self.f_custom is None or self.F_custom is None):
            raise ModelError("custom nonlinearity needs both f and F")

    @classmethod
    def linear(cls) -> "Nonlinearity":
        return cls(NonlinearityKind.LINEAR, 0.0)

    @classmethod
    def zakharov(cls, epsilon: float) -> "Nonlinearity":
        return cls(NonlinearityKind.ZAKHAROV, epsilon)

    @classmethod
    def logarithmic(cls, epsilon: float) -> "Nonlinearity":
        return cls(NonlinearityKind.LOGARITHMIC, epsilon)

    @classmethod
    def custom(cls, epsilon: float, f, F) -> "Nonlinearity":
        return cls(NonlinearityKind.CUSTOM, epsilon, f, F)

    @property
    def is_linear(self) -> bool:
        return self.kind is NonlinearityKind.LINEAR or self.epsilon == 0.0

    def f(self, zeta: ArrayLike) -> ArrayLike:
        z = np.asarray(zeta, dtype=float)
        if self.kind is NonlinearityKind.LINEAR:
            out = np.zeros_like(z)
        elif self.kind is NonlinearityKind.ZAKHAROV:
            out = z.copy()
        elif self.kind is NonlinearityKind.LOGARITHMIC:
            with np.errstate(divide="ignore"):
                out = np.log(z)
        else:
            out = np.asarray(self.f_custom(z), dtype=float)
        return out if out.ndim else float(out)

    def F(self, zeta: ArrayLike) -> ArrayLike:
        z = np.asarray(zeta, dtype=float)
        if self.kind is NonlinearityKind.LINEAR:
            out = np.zeros_like(z)
        elif self.kind is NonlinearityKind.ZAKHAROV:
            out = 0.5 * z * z
        elif self.kind is NonlinearityKind.LOGARITHMIC:
            z1 = np.atleast_1d(z)
            out = (_xlogx(z1) - z1).reshape(z.shape)
        else:
            out = np.asarray(self.F_custom(z), dtype=float)
        return out if out.ndim else float(out)

    def f_times(self, zeta: np.ndarray, u: np.ndarray) -> np.ndarray:
        """``f(zeta) * u`` with the convention ``f(0) * 0 = 0`` (log model)."""
        if self.kind is NonlinearityKind.LOGARITHMIC:
            with np.errstate(divide="ignore", invalid="ignore"):
                out = np.log(zeta) * u
            return np.where(zeta > 0, out, 0.0)
        return self.f(zeta) * u

    def F_over_zeta(self, zeta: ArrayLike) -> ArrayLike:
        """Vectorised F(zeta)/zeta; the zeta -> 0 limit is used at 0 (-inf for the log model)."""
        z = np.asarray(zeta, dtype=float)
        if self.kind is NonlinearityKind.LINEAR:
            out = np.zeros_like(z)
        elif self.kind is NonlinearityKind.ZAKHAROV:
            out = 0.5 * z
        elif self.kind is NonlinearityKind.LOGARITHMIC:
            with np.errstate(divide="ignore"):
                out = np.log(z) - 1.0
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                out = np.asarray(self.F_custom(z), dtype=float) / z
            if np.any(z == 0):
                # one-sided limit F(0)=0 => F'(0) = f(0)
                out = np.where(z == 0, self.f(np.zeros_like(z)), out)
        return out if out.ndim else float(out)

    def to_json(self) -> dict:
        if self.kind is NonlinearityKind.CUSTOM:
            raise ModelError("custom nonlinearities are not serialisable")
        return {"kind": self.kind.value, "epsilon": self.epsilon}

    @classmethod
    def from_json(cls, obj: dict) -> "Nonlinearity":
        try:
            kind = NonlinearityKind(obj["kind"])
        except (KeyError, ValueError) as exc:
            raise ModelError(f"bad nonlinearity: {obj!r}") from exc
        if kind is NonlinearityKind.CUSTOM:
            raise ModelError("custom nonlinearities cannot be read from JSON")
        if kind is NonlinearityKind.LINEAR:
            return cls.linear()
        return cls(kind, float(obj.get("epsilon", 0.0)))


def eval_F_over_zeta(nl: Nonlinearity, zeta: float):
    """F(zeta)/zeta for a scalar zeta >= 0.

    Returns :data:`DIVERGENT` when the zeta -> 0 limit is infinite, which
    happens for the logarithmic model (the limit is -inf).
    """
    if zeta < 0:
        raise ModelError("zeta must be non-negative")
    if zeta == 0 and nl.kind is NonlinearityKind.LOGARITHMIC:
        return DIVERGENT
    return float(nl.F_over_zeta(zeta))


# --------------------------------------------------------------------------
# potentials


class Potential:
    """Base class: a real potential V(x) vanishing outside ``support``."""

    kind: str = ""

    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    def _eval(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x: ArrayLike) -> ArrayLike:
        arr = np.asarray(x, dtype=float)
        out = self._eval(np.atleast_1d(arr)).reshape(arr.shape)
        return out if out.ndim else float(out)

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ZeroPotential(Potential):
    kind = "zero"

    @property
    def support(self):
        return (0.0, 0.0)

    def _eval(self, x):
        return np.zeros_like(x)

    def to_json(self):
        return {"kind": "zero"}


@dataclass(frozen=True)
class RectWell(Potential):
    """V = V0 on [-b, b], 0 elsewhere."""

    V0: float
    b: float
    kind = "rect_well"

    def __post_init__(self):
        if not self.V0 < 0:
            raise ModelError("rectangular well needs V0 < 0")
        if not self.b > 0:
            raise ModelError("rectangular well needs b > 0")

    @property
    def support(self):
        return (-self.b, self.b)

    def _eval(self, x):
        return np.where(np.abs(x) <= self.b, self.V0, 0.0)

    def to_json(self):
        return {"kind": self.kind, "V0": self.V0, "b": self.b}


@dataclass(frozen=True)
class DeltaWell(Potential):
    """V = -Omega * delta(x).  Handled only by closed forms."""

    Omega: float
    kind = "delta_well"

    @property
    def support(self):
        return (0.0, 0.0)

    def _eval(self, x):
        raise DeltaNotSamplable("delta well cannot be sampled pointwise")

    def to_json(self):
        return {"kind": self.kind, "Omega": self.Omega}


@dataclass(frozen=True)
class Bump(Potential):
    """V0 * (1 - (x - xv)^2 / sigma^2)^2 on |x - xv| <= sigma (C^1 at the edges)."""

    V0: float
    xv: float
    sigma: float
    kind = "bump"

    def __post_init__(self):
        if not self.sigma > 0:
            raise ModelError("bump width sigma must be positive")

    @property
    def support(self):
        return (self.xv - self.sigma, self.xv + self.sigma)

    @property
    def integral(self) -> float:
        return self.V0 * 16.0 * self.sigma / 15.0

    def _eval(self, x):
        s = (x - self.xv) / self.sigma
        return np.where(np.abs(s) <= 1.0, self.V0 * (1.0 - s * s) ** 2, 0.0)

    def to_json(self):
        return {"kind": self.kind, "V0": self.V0, "xv": self.xv, "sigma": self.sigma}


@dataclass(frozen=True)
class BumpSum(Potential):
    bumps: tuple[Bump, ...]
    kind = "sum"

    def __post_init__(self):
        object.__setattr__(self, "bumps", tuple(self.bumps))
        if not self.bumps:
            raise ModelError("sum of bumps needs at least one bump")

    @property
    def support(self):
        return (min(b.support[0] for b in self.bumps), max(b.support[1] for b in self.bumps))

    def _eval(self, x):
        out = np.zeros_like(x)
        for b in self.bumps:
            out = out + b._eval(x)
        return out

    def to_json(self):
        return {"kind": self.kind, "bumps": [b.to_json() for b in self.bumps]}


PotentialSpec = Union[ZeroPotential, RectWell, DeltaWell, Bump, BumpSum]


def regularized_delta(Omega: float, sigma: float, center: float = 0.0) -> Bump:
    """Bump of width sigma with the same integral, -Omega, as ``DeltaWell(Omega)``."""
    return Bump(V0=-Omega * 15.0 / (16.0 * sigma), xv=center, sigma=sigma)


def eval_potential(spec: Potential, x: ArrayLike) -> ArrayLike:
    if isinstance(spec, DeltaWell):
        raise DeltaNotSamplable("delta well cannot be sampled pointwise")
    return spec(x)


def potential_from_json(obj: dict) -> Potential:
    kind = obj.get("kind") if isinstance(obj, dict) else None
    try:
        if kind == "zero":
            return ZeroPotential()
        if kind == "rect_well":
            return RectWell(float(obj["V0"]), float(obj["b"]))
        if kind == "delta_well":
            return DeltaWell(float(obj["Omega"]))
        if kind == "bump":
            return Bump(float(obj["V0"]), float(obj["xv"]), float(obj["sigma"]))
        if kind == "sum":
            return BumpSum(tuple(potential_from_json(b) for b in obj["bumps"]))
    except (KeyError, TypeError) as exc:
        raise ModelError(f"bad potential: {obj!r}") from exc
    raise ModelError(f"unknown potential kind: {kind!r}")


def nonlinearity_from_json(obj: dict) -> Nonlinearity:
    return Nonlinearity.from_json(obj)


def bumps(*specs: Sequence[float]) -> BumpSum:
    """Shorthand: ``bumps((V0, xv, sigma), ...)``."""
    return BumpSum(tuple(Bump(*s) for s in specs))


def is_finite_support(spec: Potential) -> bool:
    lo, hi = spec.support
    return math.isfinite(lo) and math.isfinite(hi)
