"""Quasi-TEM microstrip model.

Closed-form Hammerstad expressions for a zero-thickness strip on a lossless,
dispersionless substrate. Widths are always normalized to the substrate
height (``wh = w / h``).

The narrow-strip branch is used strictly below ``wh = 1`` and the wide-strip
branch at and above it, so the map is single valued. The two branches differ
by about 0.4 % in impedance at the joint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .errors import InvalidArgumentError, OutOfRangeError, UnreachableImpedanceError

#: Normalized-width range over which :func:`characteristic_impedance` is trusted.
VALIDITY_WINDOW = (0.05, 20.0)

ETA0 = 120.0 * math.pi  # free-space wave impedance as used by the closed forms


@dataclass(frozen=True)
class Substrate:
    """Dielectric layer under the strip.

    Parameters
    ----------
    eps_r : float
        Relative permittivity, at least 1.
    h : float
        Thickness in meters.
    """

    eps_r: float
    h: float

    def __post_init__(self):
        if not self.eps_r >= 1.0:
            raise InvalidArgumentError(f"eps_r must be >= 1, got {self.eps_r!r}")
        if not self.h > 0.0:
            raise InvalidArgumentError(f"h must be > 0, got {self.h!r}")


@dataclass(frozen=True)
class LineSection:
    """Electrical state of one uniform piece of line."""

    z0: float
    eps_eff: float

    def __post_init__(self):
        if not self.z0 > 0.0:
            raise InvalidArgumentError(f"z0 must be > 0, got {self.z0!r}")
        if not self.eps_eff >= 1.0:
            raise InvalidArgumentError(f"eps_eff must be >= 1, got {self.eps_eff!r}")

    @classmethod
    def from_width(cls, wh: float, eps_r: float) -> "LineSection":
        return cls(
            z0=float(characteristic_impedance(wh, eps_r)),
            eps_eff=float(effective_permittivity(wh, eps_r)),
        )


def _scalar_or_array(x: np.ndarray, like):
    return float(x) if np.ndim(like) == 0 else x


def _check_eps_r(eps_r: float) -> None:
    if not eps_r >= 1.0:
        raise InvalidArgumentError(f"eps_r must be >= 1, got {eps_r!r}")


def effective_permittivity(wh, eps_r: float):
    """Effective permittivity of a microstrip of normalized width ``wh``.

    Accepts a scalar or an array of widths; returns the same shape.
    """
    _check_eps_r(eps_r)
    u = np.asarray(wh, dtype=float)
    if np.any(~(u > 0.0)):
        raise InvalidArgumentError("normalized width must be positive")
    base = 0.5 * (eps_r + 1.0) + 0.5 * (eps_r - 1.0) / np.sqrt(1.0 + 12.0 / u)
    narrow = base + 0.5 * (eps_r - 1.0) * 0.04 * (1.0 - u) ** 2
    eps = np.where(u < 1.0, narrow, base)
    return _scalar_or_array(eps, wh)


def characteristic_impedance(wh, eps_r: float, window: tuple[float, float] = VALIDITY_WINDOW):
    """Characteristic impedance in ohms of a microstrip of normalized width ``wh``.

    Raises :class:`OutOfRangeError` when any width lies outside ``window``.
    """
    _check_eps_r(eps_r)
    u = np.asarray(wh, dtype=float)
    lo, hi = window
    if np.any(~((u >= lo) & (u <= hi))):
        bad = u[~((u >= lo) & (u <= hi))] if u.ndim else u
        raise OutOfRangeError(
            f"normalized width {np.ravel(bad)[0]:.6g} outside validity window [{lo}, {hi}]"
        )
    eps = np.asarray(effective_permittivity(u, eps_r))
    narrow = 60.0 / np.sqrt(eps) * np.log(8.0 / u + 0.25 * u)
    wide = ETA0 / np.sqrt(eps) / (u + 1.393 + 0.667 * np.log(u + 1.444))
    z = np.where(u < 1.0, narrow, wide)
    return _scalar_or_array(z, wh)


def impedance_range(eps_r: float, window: tuple[float, float] = VALIDITY_WINDOW) -> tuple[float, float]:
    """Achievable ``(z_min, z_max)`` over the validity window."""
    lo, hi = window
    return (
        characteristic_impedance(hi, eps_r, window),
        characteristic_impedance(lo, eps_r, window),
    )


def width_for_impedance(
    z_target: float,
    eps_r: float,
    window: tuple[float, float] = VALIDITY_WINDOW,
    xtol: float = 1e-12,
) -> float:
    """Normalized width giving ``z_target`` ohms, found by bisection.

    Impedance decreases monotonically with width, so the root is unique. A
    target falling in the small gap between the two closed-form branches
    resolves to the branch point ``wh = 1``.
    """
    z_min, z_max = impedance_range(eps_r, window)
    if not (z_min <= z_target <= z_max):
        raise UnreachableImpedanceError(z_target, (z_min, z_max))
    lo, hi = window
    if z_target == z_max:
        return lo
    if z_target == z_min:
        return hi

    def residual(u: float) -> float:
        return characteristic_impedance(u, eps_r, window) - z_target

    return float(bisect(residual, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200))
