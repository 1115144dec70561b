"""Touchstone, CSV, SVG and JSON report files.

All writers are deterministic for fixed inputs. The only non-data line is a
single ``!`` comment in the Touchstone header carrying the tool version.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import FourierWidthProfile, SParameterSweep
from .errors import InvalidArgumentError
from .microstrip import Substrate, characteristic_impedance, effective_permittivity

_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}


def _num(x: float) -> str:
    # values below 1e-15 are rounding residue of exact zeros
    x = 0.0 if abs(x) < 1e-15 else float(x) + 0.0
    return f"{x:.12e}"


def write_touchstone(sweep: SParameterSweep, path) -> Path:
    """Write a Touchstone v1 ``.s2p`` file in real/imaginary format."""
    if len(sweep) == 0:
        raise InvalidArgumentError("cannot write an empty sweep")
    path = Path(path)
    lines = [
        f"! ntlf {__version__} lossless nonuniform microstrip line",
        f"# HZ S RI R {sweep.z_ref:g}",
    ]
    for k, f in enumerate(sweep.frequencies):
        cols = [f"{f:.12g}"]
        for s in (sweep.s11[k], sweep.s21[k], sweep.s12[k], sweep.s22[k]):
            cols += [_num(s.real), _num(s.imag)]
        lines.append(" ".join(cols))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_touchstone(path) -> SParameterSweep:
    """Read a two-port Touchstone v1 file (RI, MA or DB; any frequency unit)."""
    unit, fmt, z_ref = 1e9, "MA", 50.0
    values: list[float] = []
    seen_option = False
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            if seen_option:
                continue
            seen_option = True
            tokens = line[1:].upper().split()
            i = 0
            while i < len(tokens):
                tok = tokens[i]
                if tok in _UNITS:
                    unit = _UNITS[tok]
                elif tok in ("RI", "MA", "DB"):
                    fmt = tok
                elif tok == "R":
                    z_ref = float(tokens[i + 1])
                    i += 1
                elif tok != "S":
                    raise InvalidArgumentError(f"unsupported option '{tok}'")
                i += 1
            continue
        values.extend(float(v) for v in line.split())
    if len(values) % 9:
        raise InvalidArgumentError("two-port data must have 9 columns per frequency")
    data = np.array(values).reshape(-1, 9)
    pairs = data[:, 1:].reshape(-1, 4, 2)
    if fmt == "RI":
        s = pairs[..., 0] + 1j * pairs[..., 1]
    else:
        mag = pairs[..., 0] if fmt == "MA" else 10.0 ** (pairs[..., 0] / 20.0)
        s = mag * np.exp(1j * np.deg2rad(pairs[..., 1]))
    return SParameterSweep(data[:, 0] * unit, s[:, 0], s[:, 1], s[:, 3], z_ref)


def profile_table(profile: FourierWidthProfile, substrate: Substrate, samples: int):
    if samples < 2:
        raise InvalidArgumentError("samples must be >= 2")
    z = np.linspace(0.0, profile.d, samples)
    wh = profile.evaluate(z)
    return z, wh, characteristic_impedance(wh, substrate.eps_r), effective_permittivity(wh, substrate.eps_r)


def write_profile_csv(profile: FourierWidthProfile, substrate: Substrate, samples: int, path) -> Path:
    """Sampled width, impedance and effective permittivity along the line."""
    path = Path(path)
    z, wh, zc, eps = profile_table(profile, substrate, samples)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["z_m", "w_over_h", "z0_ohms", "eps_eff"])
        for row in zip(z, wh, zc, eps):
            writer.writerow([repr(float(v)) for v in row])
    return path


def _scale_bar_length(length_mm: float) -> float:
    """Largest 1/2/5 x 10^k millimeters not exceeding a quarter of the line."""
    target = length_mm / 4.0
    base = 10.0 ** math.floor(math.log10(target))
    for step in (5.0, 2.0, 1.0):
        if step * base <= target:
            return step * base
    return base


def write_geometry_svg(profile: FourierWidthProfile, substrate: Substrate, path, samples: int = 1001) -> Path:
    """Top view of the strip as an SVG polygon in millimeters, centered on the line axis."""
    if samples < 501:
        raise InvalidArgumentError("geometry needs at least 501 samples")
    path = Path(path)
    z = np.linspace(0.0, profile.d, samples)
    half = 0.5 * profile.evaluate(z) * substrate.h * 1e3
    x = z * 1e3
    length = profile.d * 1e3
    ymax = float(half.max())
    pad = 0.05 * length
    bar = _scale_bar_length(length)

    top = [f"{xi:.6f},{-hi:.6f}" for xi, hi in zip(x, half)]
    bottom = [f"{xi:.6f},{hi:.6f}" for xi, hi in zip(x[::-1], half[::-1])]
    vb_y = -ymax - pad
    vb_h = 2 * ymax + 3 * pad
    bar_y = ymax + 1.5 * pad
    font = 0.4 * pad

    svg = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{length + 2 * pad:.6f}mm" height="{vb_h:.6f}mm" '
        f'viewBox="{-pad:.6f} {vb_y:.6f} {length + 2 * pad:.6f} {vb_h:.6f}">',
        f'  <line x1="0" y1="0" x2="{length:.6f}" y2="0" stroke="#999999" '
        f'stroke-width="{0.002 * length:.6f}" stroke-dasharray="{0.01 * length:.6f}"/>',
        f'  <polygon id="strip" fill="#c87533" stroke="none" points="{" ".join(top + bottom)}"/>',
        f'  <line id="scale" x1="0" y1="{bar_y:.6f}" x2="{bar:.6f}" y2="{bar_y:.6f}" '
        f'stroke="#000000" stroke-width="{0.004 * length:.6f}"/>',
        f'  <text x="{bar + 0.2 * pad:.6f}" y="{bar_y + 0.35 * font:.6f}" font-size="{font:.6f}" '
        f'font-family="sans-serif">{bar:g} mm (line length {length:g} mm)</text>',
        "</svg>",
    ]
    path.write_text("\n".join(svg) + "\n", encoding="utf-8")
    return path


def write_report_json(report: dict, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
