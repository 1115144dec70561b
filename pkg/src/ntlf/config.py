"""JSON job configuration.

Example document::

    {
      "mode": "verify",
      "spec": {"f_p_hz": 2e9, "f_s_hz": 3e9, "f_max_hz": 6e9,
               "alpha_p_db": 0.1, "alpha_s_db": 20, "wh_min": 0.13,
               "wh_max": 10, "d_m": 0.1, "z0_ohms": 50},
      "substrate": {"eps_r": 3.5, "h_m": 762e-6},
      "profile": {"d_m": 0.1, "c": [...], "s": [...]},
      "grid": {"n_points": 120},
      "optimizer": {"rng_seed": 7},
      "outputs": ["touchstone", "csv", "svg", "report"]
    }

``profile`` is required for ``analyze`` and ``verify`` and forbidden for
``synthesize``.
"""

from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass, field

from .analysis import DEFAULT_SECTIONS_PER_LAMBDA, FourierWidthProfile, FrequencyGrid
from .errors import ConfigParseError, ConfigValidationError, InvalidArgumentError
from .microstrip import Substrate
from .objective import DEFAULT_Z_SAMPLES, FilterSpec
from .optimizer import OptimizerOptions, PenaltyWeights

MODES = ("analyze", "synthesize", "verify")
OUTPUTS = ("touchstone", "csv", "svg", "report")

_SPEC_KEYS = {
    "f_p_hz": "f_p",
    "f_s_hz": "f_s",
    "f_max_hz": "f_max",
    "alpha_p_db": "alpha_p",
    "alpha_s_db": "alpha_s",
    "wh_min": "wh_min",
    "wh_max": "wh_max",
    "d_m": "d",
    "z0_ohms": "z0",
}


@dataclass(frozen=True)
class GridConfig:
    n_points: int = 120
    sections_per_lambda: float = DEFAULT_SECTIONS_PER_LAMBDA
    z_samples: int = DEFAULT_Z_SAMPLES

    def frequency_grid(self, f_max: float) -> FrequencyGrid:
        return FrequencyGrid.uniform(f_max, self.n_points)


@dataclass(frozen=True)
class JobConfig:
    mode: str
    spec: FilterSpec
    substrate: Substrate
    profile: FourierWidthProfile | None = None
    grid: GridConfig = field(default_factory=GridConfig)
    optimizer: OptimizerOptions = field(default_factory=OptimizerOptions)
    outputs: tuple[str, ...] = OUTPUTS

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode in ("analyze", "verify") and self.profile is None:
            raise ConfigValidationError(f"mode '{self.mode}' requires a profile")
        if self.mode == "synthesize" and self.profile is not None:
            raise ConfigValidationError("mode 'synthesize' does not accept a profile")

    def with_mode(self, mode: str) -> "JobConfig":
        return dataclasses.replace(self, mode=mode)


def _line_of(text: str, path: tuple[str, ...]) -> int | None:
    """1-based line of the last key in ``path``, following nesting order."""
    pos = 0
    for key in path:
        m = re.compile(r'"%s"\s*:' % re.escape(key)).search(text, pos)
        if m is None:
            return None
        pos = m.start()
    return text.count("\n", 0, pos) + 1


class _Reader:
    def __init__(self, text: str):
        self.text = text

    def fail(self, message: str, path: tuple[str, ...]):
        line = _line_of(self.text, path) if path else None
        raise ConfigParseError(message, field=".".join(path) or None, line=line)

    def table(self, obj, path, allowed) -> dict:
        if not isinstance(obj, dict):
            self.fail("expected an object", path)
        for key in obj:
            if key not in allowed:
                self.fail(f"unknown key '{key}'", path + (key,))
        return obj

    def number(self, obj: dict, key: str, path, default=None, integer=False):
        if key not in obj:
            if default is None:
                self.fail("missing required field", path + (key,))
            return default
        value = obj[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(f"expected a number, got {json.dumps(value)}", path + (key,))
        if integer:
            if isinstance(value, float) and not value.is_integer():
                self.fail(f"expected an integer, got {value!r}", path + (key,))
            return int(value)
        return float(value)

    def number_list(self, obj: dict, key: str, path) -> list[float]:
        if key not in obj:
            self.fail("missing required field", path + (key,))
        value = obj[key]
        if not isinstance(value, list) or any(
            isinstance(v, bool) or not isinstance(v, (int, float)) for v in value
        ):
            self.fail("expected a list of numbers", path + (key,))
        return [float(v) for v in value]


def _optimizer(reader: _Reader, raw, path) -> OptimizerOptions:
    fields = {f.name: f for f in dataclasses.fields(OptimizerOptions)}
    obj = reader.table(raw, path, fields)
    kwargs = {}
    for key, value in obj.items():
        here = path + (key,)
        if key == "penalty_weights":
            weight_names = [f.name for f in dataclasses.fields(PenaltyWeights)]
            weights = reader.table(value, here, weight_names)
            kwargs[key] = PenaltyWeights(**{k: reader.number(weights, k, here) for k in weights})
        elif key == "coeff_bounds":
            bounds = reader.number_list(obj, key, path)
            if len(bounds) != 2:
                reader.fail("expected [lo, hi]", here)
            kwargs[key] = (bounds[0], bounds[1])
        elif key == "local_refine":
            if not isinstance(value, bool):
                reader.fail("expected true or false", here)
            kwargs[key] = value
        else:
            integer = fields[key].type in ("int", int)
            kwargs[key] = reader.number(obj, key, path, integer=integer)
    try:
        return OptimizerOptions(**kwargs)
    except InvalidArgumentError as exc:
        raise ConfigValidationError(f"optimizer: {exc}") from None


def parse_config(text: str) -> JobConfig:
    """Parse and validate a JSON job document.

    Raises :class:`ConfigParseError` for malformed documents or schema
    violations and :class:`ConfigValidationError` for values that break a
    spec, substrate or mode invariant.
    """
    if not text.strip():
        raise ConfigParseError("empty document")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(exc.msg, line=exc.lineno) from None

    reader = _Reader(text)
    top = reader.table(
        raw, (), ("mode", "spec", "substrate", "profile", "grid", "optimizer", "outputs")
    )
    mode = top.get("mode")
    if mode not in MODES:
        reader.fail(f"expected one of {list(MODES)}, got {json.dumps(mode)}", ("mode",))

    for key in ("spec", "substrate"):
        if key not in top:
            reader.fail("missing required section", (key,))
    spec_raw = reader.table(top["spec"], ("spec",), _SPEC_KEYS)
    sub_raw = reader.table(top["substrate"], ("substrate",), ("eps_r", "h_m"))
    spec_values = {name: reader.number(spec_raw, key, ("spec",)) for key, name in _SPEC_KEYS.items()}
    sub_values = {
        "eps_r": reader.number(sub_raw, "eps_r", ("substrate",)),
        "h": reader.number(sub_raw, "h_m", ("substrate",)),
    }

    profile_values = None
    if "profile" in top:
        prof_raw = reader.table(top["profile"], ("profile",), ("d_m", "c", "s"))
        profile_values = (
            reader.number(prof_raw, "d_m", ("profile",)),
            reader.number_list(prof_raw, "c", ("profile",)),
            reader.number_list(prof_raw, "s", ("profile",)),
        )

    grid = GridConfig()
    if "grid" in top:
        g = reader.table(top["grid"], ("grid",), ("n_points", "sections_per_lambda", "z_samples"))
        grid = GridConfig(
            n_points=reader.number(g, "n_points", ("grid",), grid.n_points, integer=True),
            sections_per_lambda=reader.number(g, "sections_per_lambda", ("grid",), grid.sections_per_lambda),
            z_samples=reader.number(g, "z_samples", ("grid",), grid.z_samples, integer=True),
        )

    optimizer = _optimizer(reader, top.get("optimizer", {}), ("optimizer",))

    outputs = OUTPUTS
    if "outputs" in top:
        outputs = top["outputs"]
        if not isinstance(outputs, list) or any(o not in OUTPUTS for o in outputs):
            reader.fail(f"expected a list drawn from {list(OUTPUTS)}", ("outputs",))
        outputs = tuple(outputs)

    try:
        spec = FilterSpec(**spec_values)
        substrate = Substrate(**sub_values)
        spec.end_width(substrate)
        profile = None
        if profile_values is not None:
            profile = FourierWidthProfile(*profile_values)
            if abs(profile.d - spec.d) > 1e-12 * spec.d:
                raise ConfigValidationError(
                    f"profile.d_m={profile.d!r} differs from spec.d_m={spec.d!r}"
                )
        if grid.n_points < 1 or grid.z_samples < 2 or grid.sections_per_lambda < 10:
            raise ConfigValidationError(
                "grid requires n_points >= 1, z_samples >= 2 and sections_per_lambda >= 10"
            )
    except InvalidArgumentError as exc:
        raise ConfigValidationError(str(exc)) from None
    return JobConfig(mode, spec, substrate, profile, grid, optimizer, outputs)


def load_config(path) -> JobConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
