"""Reference solver: RK4 integration of the lossless telegrapher equations.

    dV/dz = -j w L(z) I,    dI/dz = -j w C(z) V

with ``L = Z sqrt(eps_eff) / c`` and ``C = sqrt(eps_eff) / (Z c)`` taken from
the continuous width profile. Used to cross-check the section cascade; it
shares only the profile and the microstrip model with that path.
"""

from __future__ import annotations

import numpy as np

from .analysis import SPEED_OF_LIGHT, FourierWidthProfile
from .errors import InvalidArgumentError
from .microstrip import Substrate, characteristic_impedance, effective_permittivity


def line_constants(profile: FourierWidthProfile, substrate: Substrate, z: np.ndarray):
    """Per-unit-length inductance (H/m) and capacitance (F/m) at ``z``."""
    wh = profile.evaluate(z)
    zc = characteristic_impedance(wh, substrate.eps_r)
    root_eps = np.sqrt(effective_permittivity(wh, substrate.eps_r))
    return zc * root_eps / SPEED_OF_LIGHT, root_eps / (zc * SPEED_OF_LIGHT)


def rk4_abcd(profile: FourierWidthProfile, substrate: Substrate, freqs, steps: int) -> np.ndarray:
    """ABCD matrices, shape ``(len(freqs), 2, 2)``, from ``steps`` RK4 steps.

    Both columns start at the load end, ``(V, I) = (1, 0)`` and ``(0, 1)``,
    and are integrated back to ``z = 0``, where they are the columns of the
    chain matrix.
    """
    if steps < 1:
        raise InvalidArgumentError("steps must be >= 1")
    omega = 2.0 * np.pi * np.atleast_1d(np.asarray(freqs, dtype=float))
    # nodes and half-steps, ordered from the load end to the source end
    z = np.linspace(profile.d, 0.0, 2 * steps + 1)
    ind, cap = line_constants(profile, substrate, z)
    h = -profile.d / steps

    y = np.zeros((omega.size, 2, 2), dtype=complex)
    y[:, 0, 0] = 1.0
    y[:, 1, 1] = 1.0

    def deriv(k: int, y: np.ndarray) -> np.ndarray:
        out = np.empty_like(y)
        out[:, 0, :] = (-1j * omega * ind[k])[:, None] * y[:, 1, :]
        out[:, 1, :] = (-1j * omega * cap[k])[:, None] * y[:, 0, :]
        return out

    for i in range(steps):
        k = 2 * i
        k1 = deriv(k, y)
        k2 = deriv(k + 1, y + 0.5 * h * k1)
        k3 = deriv(k + 1, y + 0.5 * h * k2)
        k4 = deriv(k + 2, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y
