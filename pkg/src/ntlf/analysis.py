"""Nonuniform line analysis by cascading electrically short uniform sections.

The strip width follows a truncated Fourier series in ``ln(w/h)``. The line
is cut into ``M`` equal sections, each treated as a uniform lossless line
whose width is sampled at the section midpoint. Section ABCD matrices are
multiplied from the source end (``z = 0``) to the load end (``z = d``).

A lossless uniform section has real A, D and purely imaginary B, C, and the
product of such matrices stays in that class. The cascade therefore runs in
real arithmetic on ``(a, b, c, d)`` with ``B = j*b`` and ``C = j*c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, SingularNetworkError
from .microstrip import LineSection, Substrate, characteristic_impedance, effective_permittivity

SPEED_OF_LIGHT = 2.99792458e8

#: Sections per shortest in-medium wavelength used when no count is given.
DEFAULT_SECTIONS_PER_LAMBDA = 300


@dataclass(frozen=True)
class FourierWidthProfile:
    """Strip width profile ``ln(w/h) = sum C_n cos(2 pi n z/d) + sum S_n sin(2 pi n z/d)``.

    Parameters
    ----------
    d : float
        Line length in meters.
    c : sequence of float
        Cosine coefficients ``C_0 .. C_N``.
    s : sequence of float
        Sine coefficients ``S_1 .. S_N``.
    """

    d: float
    c: tuple[float, ...]
    s: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(x) for x in self.c))
        object.__setattr__(self, "s", tuple(float(x) for x in self.s))
        if not self.d > 0.0:
            raise InvalidArgumentError(f"line length must be > 0, got {self.d!r}")
        if len(self.c) < 1:
            raise InvalidArgumentError("at least C_0 is required")
        if len(self.s) != len(self.c) - 1:
            raise InvalidArgumentError(
                f"expected {len(self.c) - 1} sine coefficients for order "
                f"{len(self.c) - 1}, got {len(self.s)}"
            )

    @property
    def order(self) -> int:
        return len(self.s)

    @property
    def coefficients(self) -> np.ndarray:
        """``[C_0, ..., C_N, S_1, ..., S_N]`` as one vector."""
        return np.array(self.c + self.s)

    @property
    def end_width(self) -> float:
        """``w(0)/h == w(d)/h``; every sine term vanishes at both ends."""
        return math.exp(math.fsum(self.c))

    @classmethod
    def uniform(cls, d: float, wh: float, order: int = 0) -> "FourierWidthProfile":
        return cls(d, (math.log(wh),) + (0.0,) * order, (0.0,) * order)

    def mirrored(self) -> "FourierWidthProfile":
        """Profile reflected about ``z = d/2`` (flips every sine coefficient)."""
        return FourierWidthProfile(self.d, self.c, tuple(-x for x in self.s))

    def log_width(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return fourier_basis(z.ravel(), self.d, self.order) @ self.coefficients

    def evaluate(self, z):
        """Normalized width at position(s) ``z`` without range checking."""
        out = np.exp(self.log_width(z))
        return float(out[0]) if np.ndim(z) == 0 else out.reshape(np.shape(z))


def fourier_basis(z: np.ndarray, d: float, order: int) -> np.ndarray:
    """Design matrix whose product with ``[C_0..C_N, S_1..S_N]`` gives ``ln(w/h)``."""
    n = np.arange(order + 1)
    phase = (2.0 * np.pi / d) * np.outer(z, n)
    return np.hstack([np.cos(phase), np.sin(phase[:, 1:])])


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Strictly increasing, strictly positive analysis frequencies in Hz."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).ravel()
        if pts.size == 0:
            raise InvalidArgumentError("frequency grid is empty")
        if not pts[0] > 0.0:
            raise InvalidArgumentError("frequency grid must start above 0 Hz")
        if np.any(np.diff(pts) <= 0.0):
            raise InvalidArgumentError("frequency grid must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, f_max: float, n_points: int = 120) -> "FrequencyGrid":
        """``f_k = k * f_max / n_points`` for ``k = 1 .. n_points``."""
        if n_points < 1:
            raise InvalidArgumentError("n_points must be >= 1")
        return cls(np.arange(1, n_points + 1) * f_max / n_points)

    @property
    def f_max(self) -> float:
        return float(self.points[-1])

    def __len__(self) -> int:
        return self.points.size


@dataclass(frozen=True)
class AbcdMatrix:
    a: complex
    b: complex
    c: complex
    d: complex

    @property
    def determinant(self) -> complex:
        return self.a * self.d - self.b * self.c

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def __matmul__(self, other: "AbcdMatrix") -> "AbcdMatrix":
        return AbcdMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )


@dataclass(frozen=True, eq=False)
class SParameterSweep:
    """Two-port response over a frequency grid.

    ``s12`` equals ``s21`` for these reciprocal networks. ``s22`` is kept
    because a nonuniform line is generally asymmetric.
    """

    frequencies: np.ndarray
    s11: np.ndarray
    s21: np.ndarray
    s22: np.ndarray
    z_ref: float

    @property
    def s12(self) -> np.ndarray:
        return self.s21

    def __len__(self) -> int:
        return self.frequencies.size

    def s21_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 20.0 * np.log10(np.abs(self.s21))


def evaluate_profile(profile: FourierWidthProfile, z):
    """Normalized width ``w(z)/h``; ``z`` must lie in ``[0, d]``."""
    zz = np.asarray(z, dtype=float)
    if np.any(~((zz >= 0.0) & (zz <= profile.d))):
        raise InvalidArgumentError(f"position outside [0, {profile.d}]")
    return profile.evaluate(z)


def shortest_wavelength(f_max: float, eps_r: float) -> float:
    return SPEED_OF_LIGHT / (f_max * math.sqrt(eps_r))


def choose_num_sections(d: float, f_max: float, eps_r: float, safety: float = DEFAULT_SECTIONS_PER_LAMBDA) -> int:
    """Section count giving ``dz <= lambda_min / safety``."""
    if not (d > 0 and f_max > 0 and eps_r >= 1):
        raise InvalidArgumentError("d and f_max must be positive and eps_r >= 1")
    if not safety >= 10:
        raise InvalidArgumentError(f"safety divisor must be >= 10, got {safety!r}")
    ratio = d * safety / shortest_wavelength(f_max, eps_r)
    # absorb rounding so that d == lambda_min yields exactly `safety` sections
    return max(1, math.ceil(ratio * (1.0 - 1e-12)))


def section_abcd(section: LineSection, dz: float, f: float) -> AbcdMatrix:
    """ABCD matrix of a lossless uniform line of length ``dz`` at ``f`` Hz."""
    theta = 2.0 * math.pi * f * math.sqrt(section.eps_eff) * dz / SPEED_OF_LIGHT
    cs, sn = math.cos(theta), math.sin(theta)
    return AbcdMatrix(complex(cs), 1j * section.z0 * sn, 1j * sn / section.z0, complex(cs))


def section_midpoints(d: float, m: int) -> np.ndarray:
    return (np.arange(m) + 0.5) * (d / m)


def _chain(a, b, c, d):
    """Ordered product over axis 0 of ``[[a, jb], [jc, d]]`` matrices (pairwise tree)."""
    while a.shape[0] > 1:
        tail = None
        if a.shape[0] % 2:
            tail = (a[-1:], b[-1:], c[-1:], d[-1:])
            a, b, c, d = a[:-1], b[:-1], c[:-1], d[:-1]
        a0, b0, c0, d0 = a[0::2], b[0::2], c[0::2], d[0::2]
        a1, b1, c1, d1 = a[1::2], b[1::2], c[1::2], d[1::2]
        a, b, c, d = (
            a0 * a1 - b0 * c1,
            a0 * b1 + b0 * d1,
            c0 * a1 + d0 * c1,
            d0 * d1 - c0 * b1,
        )
        if tail is not None:
            a, b, c, d = (np.concatenate([x, t]) for x, t in zip((a, b, c, d), tail))
    return a[0], b[0], c[0], d[0]


def cascade_sections(z0: np.ndarray, eps_eff: np.ndarray, dz: float, freqs: np.ndarray):
    """Cascade uniform sections at every frequency.

    Returns real arrays ``(a, b, c, d)`` of shape ``freqs.shape`` with
    ``A = a``, ``B = j*b``, ``C = j*c``, ``D = d``.
    """
    theta = (2.0 * math.pi * dz / SPEED_OF_LIGHT) * np.outer(np.sqrt(eps_eff), freqs)
    cs, sn = np.cos(theta), np.sin(theta)
    zc = np.asarray(z0)[:, None]
    return _chain(cs, zc * sn, sn / zc, cs.copy())


def _profile_sections(profile: FourierWidthProfile, substrate: Substrate, m: int):
    if m < 1:
        raise InvalidArgumentError(f"section count must be >= 1, got {m!r}")
    wh = profile.evaluate(section_midpoints(profile.d, m))
    return characteristic_impedance(wh, substrate.eps_r), effective_permittivity(wh, substrate.eps_r)


def cascade_abcd(profile: FourierWidthProfile, substrate: Substrate, f: float, m: int) -> AbcdMatrix:
    """ABCD matrix of the whole line at one frequency using ``m`` sections."""
    z0, eps = _profile_sections(profile, substrate, m)
    a, b, c, d = cascade_sections(z0, eps, profile.d / m, np.array([float(f)]))
    return AbcdMatrix(complex(a[0]), 1j * b[0], 1j * c[0], complex(d[0]))


def _s_from_chain(a, b, c, d, z0: float):
    """S11, S21, S22 of ``[[a, jb], [jc, d]]`` referenced to ``z0``."""
    den = (a + d) * z0 + 1j * (b + c * z0 * z0)
    if np.any(den == 0):
        raise SingularNetworkError("S-parameter denominator is zero")
    s11 = ((a - d) * z0 + 1j * (b - c * z0 * z0)) / den
    s22 = ((d - a) * z0 + 1j * (b - c * z0 * z0)) / den
    s21 = 2.0 * z0 / den
    return s11, s21, s22


def s_parameters(abcd: AbcdMatrix, z0: float) -> tuple[complex, complex]:
    """Reflection and transmission of a two-port terminated in ``z0`` at both ports."""
    if not z0 > 0:
        raise InvalidArgumentError(f"reference impedance must be > 0, got {z0!r}")
    a, b, c, d = abcd.a, abcd.b, abcd.c, abcd.d
    den = a * z0 + b + c * z0 * z0 + d * z0
    if den == 0:
        raise SingularNetworkError("S-parameter denominator is zero")
    return (a * z0 + b - c * z0 * z0 - d * z0) / den, 2.0 * z0 / den


def analyze(
    profile: FourierWidthProfile,
    substrate: Substrate,
    grid: FrequencyGrid,
    z0: float,
    m: int | None = None,
    sections_per_lambda: float = DEFAULT_SECTIONS_PER_LAMBDA,
) -> SParameterSweep:
    """S-parameters of the nonuniform line over ``grid``.

    ``m`` defaults to :func:`choose_num_sections` at the top of the grid.
    """
    if not z0 > 0:
        raise InvalidArgumentError(f"reference impedance must be > 0, got {z0!r}")
    if m is None:
        m = choose_num_sections(profile.d, grid.f_max, substrate.eps_r, sections_per_lambda)
    zc, eps = _profile_sections(profile, substrate, m)
    a, b, c, d = cascade_sections(zc, eps, profile.d / m, grid.points)
    s11, s21, s22 = _s_from_chain(a, b, c, d, z0)
    return SParameterSweep(grid.points, s11, s21, s22, float(z0))
