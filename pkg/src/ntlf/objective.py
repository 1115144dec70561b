"""Lowpass mask, RMS error function and constraint margins.

Band conventions: ``0 < f <= f_p`` is passband, ``f_p < f < f_s`` is the
transition band and ``f_s <= f <= f_max`` is stopband. The transmission
term of the error sums over everything above ``f_p``, transition band
included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import FourierWidthProfile, SParameterSweep
from .errors import InsufficientGridError, InvalidArgumentError
from .microstrip import Substrate, width_for_impedance

DEFAULT_Z_SAMPLES = 1001


@dataclass(frozen=True)
class FilterSpec:
    """Lowpass requirements and physical limits.

    Attributes
    ----------
    f_p, f_s, f_max : float
        Passband edge, stopband edge and top of band in Hz.
    alpha_p, alpha_s : float
        Maximum passband and minimum stopband attenuation in dB.
    wh_min, wh_max : float
        Bounds on the normalized strip width.
    d : float
        Line length in meters.
    z0 : float
        Port impedance in ohms.
    """

    f_p: float
    f_s: float
    f_max: float
    alpha_p: float
    alpha_s: float
    wh_min: float
    wh_max: float
    d: float
    z0: float = 50.0

    def __post_init__(self):
        if not 0 < self.f_p:
            raise InvalidArgumentError(f"0 < f_p violated: f_p={self.f_p!r}")
        if not self.f_p < self.f_s:
            raise InvalidArgumentError(f"f_p < f_s violated: f_p={self.f_p!r}, f_s={self.f_s!r}")
        if not self.f_s <= self.f_max:
            raise InvalidArgumentError(f"f_s <= f_max violated: f_s={self.f_s!r}, f_max={self.f_max!r}")
        if not 0 < self.alpha_p:
            raise InvalidArgumentError(f"0 < alpha_p violated: alpha_p={self.alpha_p!r}")
        if not self.alpha_p < self.alpha_s:
            raise InvalidArgumentError(
                f"alpha_p < alpha_s violated: alpha_p={self.alpha_p!r}, alpha_s={self.alpha_s!r}"
            )
        if not 0 < self.wh_min:
            raise InvalidArgumentError(f"0 < wh_min violated: wh_min={self.wh_min!r}")
        if not self.wh_min < self.wh_max:
            raise InvalidArgumentError(
                f"wh_min < wh_max violated: wh_min={self.wh_min!r}, wh_max={self.wh_max!r}"
            )
        if not self.d > 0:
            raise InvalidArgumentError(f"d > 0 violated: d={self.d!r}")
        if not self.z0 > 0:
            raise InvalidArgumentError(f"z0 > 0 violated: z0={self.z0!r}")

    def end_width(self, substrate: Substrate) -> float:
        """``w0/h`` matching ``z0``; must sit strictly inside the width bounds."""
        wh0 = width_for_impedance(self.z0, substrate.eps_r)
        if not self.wh_min < wh0 < self.wh_max:
            raise InvalidArgumentError(
                f"end width w0/h={wh0:.6g} for z0={self.z0:g} ohm is not inside "
                f"({self.wh_min:g}, {self.wh_max:g})"
            )
        return wh0


@dataclass(frozen=True)
class ConstraintReport:
    """Worst-case signed margins; positive means satisfied.

    dB margins come from the analysis grid; the width margin is in
    normalized-width units.
    """

    passband_margin_db: float
    stopband_margin_db: float
    transition_margin_db: float
    width_margin: float

    @property
    def passband_ok(self) -> bool:
        return self.passband_margin_db >= 0

    @property
    def stopband_ok(self) -> bool:
        return self.stopband_margin_db >= 0

    @property
    def transition_ok(self) -> bool:
        return self.transition_margin_db >= 0

    @property
    def width_ok(self) -> bool:
        return self.width_margin >= 0

    @property
    def passed(self) -> bool:
        return self.passband_ok and self.stopband_ok and self.transition_ok and self.width_ok

    def margins(self) -> dict[str, float]:
        return {
            "passband": self.passband_margin_db,
            "stopband": self.stopband_margin_db,
            "transition": self.transition_margin_db,
            "width": self.width_margin,
        }

    def failures(self) -> dict[str, float]:
        return {k: v for k, v in self.margins().items() if not v >= 0}


def band_masks(freqs: np.ndarray, spec: FilterSpec):
    """Boolean masks ``(passband, transition, stopband)`` over ``freqs``."""
    f = np.asarray(freqs)
    passband = (f > 0) & (f <= spec.f_p)
    transition = (f > spec.f_p) & (f < spec.f_s)
    stopband = (f >= spec.f_s) & (f <= spec.f_max)
    return passband, transition, stopband


def _check_grid(freqs: np.ndarray, spec: FilterSpec) -> None:
    if freqs.size == 0:
        raise InvalidArgumentError("sweep is empty")
    if freqs[0] <= 0 or freqs[-1] > spec.f_max:
        raise InvalidArgumentError(f"sweep must lie within (0, {spec.f_max:g}] Hz")


def error_function(sweep: SParameterSweep, spec: FilterSpec) -> float:
    """RMS of ``|S11|`` over the passband and ``|S21|`` above ``f_p``."""
    freqs = np.asarray(sweep.frequencies)
    _check_grid(freqs, spec)
    below = freqs <= spec.f_p
    total = np.sum(np.abs(sweep.s11[below]) ** 2) + np.sum(np.abs(sweep.s21[~below]) ** 2)
    return math.sqrt(total / freqs.size)


def transition_bound(f, spec: FilterSpec):
    """Linear dB ceiling between the passband and stopband edges (no range check)."""
    slope = (spec.alpha_s - spec.alpha_p) / (spec.f_s - spec.f_p)
    return -spec.alpha_p - slope * (np.asarray(f, dtype=float) - spec.f_p)


def transition_bound_db(f: float, spec: FilterSpec) -> float:
    """Transition-band ceiling on ``20 log10 |S21|`` at ``f_p < f < f_s``."""
    if not spec.f_p < f < spec.f_s:
        raise InvalidArgumentError(f"{f!r} Hz is not inside the transition band ({spec.f_p:g}, {spec.f_s:g})")
    return float(transition_bound(f, spec))


def width_margin(profile: FourierWidthProfile, spec: FilterSpec, z_samples: int = DEFAULT_Z_SAMPLES) -> float:
    if z_samples < 2:
        raise InvalidArgumentError("z_samples must be >= 2")
    return width_margin_of(profile.evaluate(np.linspace(0.0, profile.d, z_samples)), spec)


def width_margin_of(wh: np.ndarray, spec: FilterSpec) -> float:
    """Worst distance of sampled widths to the nearer width bound."""
    return float(min(np.min(wh - spec.wh_min), np.min(spec.wh_max - wh)))


def electrical_margins(freqs: np.ndarray, s21_db: np.ndarray, spec: FilterSpec):
    """``(passband, stopband, transition)`` margins in dB."""
    passband, transition, stopband = band_masks(freqs, spec)
    for name, mask in (("passband", passband), ("transition band", transition), ("stopband", stopband)):
        if not mask.any():
            raise InsufficientGridError(f"frequency grid has no point in the {name}")
    pass_margin = float(np.min(s21_db[passband] + spec.alpha_p))
    stop_margin = float(np.min(-spec.alpha_s - s21_db[stopband]))
    trans_margin = float(np.min(transition_bound(freqs[transition], spec) - s21_db[transition]))
    return pass_margin, stop_margin, trans_margin


def constraint_report(
    sweep: SParameterSweep,
    profile: FourierWidthProfile,
    spec: FilterSpec,
    z_samples: int = DEFAULT_Z_SAMPLES,
) -> ConstraintReport:
    """Mask and width margins of an analyzed design."""
    freqs = np.asarray(sweep.frequencies)
    _check_grid(freqs, spec)
    p, s, t = electrical_margins(freqs, sweep.s21_db(), spec)
    return ConstraintReport(p, s, t, width_margin(profile, spec, z_samples))


def enforce_end_width(
    free_coeffs,
    spec: FilterSpec,
    substrate: Substrate,
    wh0: float | None = None,
) -> FourierWidthProfile:
    """Build a profile from ``[C_1..C_N, S_1..S_N]`` with ``C_0`` solved for the port width.

    ``C_0 = ln(w0/h) - sum(C_1..C_N)`` makes ``w(0)/h = w(d)/h = w0/h``.
    ``wh0`` overrides the width derived from ``spec.z0``.
    """
    free = np.asarray(free_coeffs, dtype=float).ravel()
    if free.size % 2:
        raise InvalidArgumentError(f"expected 2N free coefficients, got {free.size}")
    n = free.size // 2
    if wh0 is None:
        wh0 = width_for_impedance(spec.z0, substrate.eps_r)
    c_free = free[:n]
    c0 = math.log(wh0) - math.fsum(c_free)
    return FourierWidthProfile(spec.d, (c0, *c_free), tuple(free[n:]))
