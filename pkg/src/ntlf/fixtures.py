"""Shipped example jobs: the two lowpass designs with their published coefficients."""

from __future__ import annotations

from importlib import resources

from .config import JobConfig, parse_config

NAMES = ("lpf1.json", "lpf2.json", "lpf2_synthesize.json")


def fixture_text(name: str) -> str:
    return resources.files("ntlf").joinpath("data", name).read_text(encoding="utf-8")


def load_fixture(name: str) -> JobConfig:
    """Parse one of :data:`NAMES`."""
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {NAMES}")
    return parse_config(fixture_text(name))
