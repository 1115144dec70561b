import json

import pytest

from ntlf.config import GridConfig, JobConfig, load_config, parse_config
from ntlf.errors import ConfigParseError, ConfigValidationError
from ntlf.fixtures import NAMES, fixture_text, load_fixture

from conftest import C1, S1


def document(**overrides):
    doc = json.loads(fixture_text("lpf1.json"))
    for key, value in overrides.items():
        if value is None:
            doc.pop(key, None)
        else:
            doc[key] = value
    return doc


class TestFixtures:
    def test_first_design(self):
        job = load_fixture("lpf1.json")
        assert job.mode == "verify"
        assert job.profile.c == C1 and job.profile.s == S1
        assert job.spec.alpha_p == 0.1 and job.spec.wh_min == 0.13
        assert job.substrate.h == 762e-6

    def test_second_design(self):
        job = load_fixture("lpf2.json")
        assert job.spec.alpha_p == 0.3 and job.spec.wh_max == 7.0

    def test_synthesis_job(self):
        job = load_fixture("lpf2_synthesize.json")
        assert job.mode == "synthesize" and job.profile is None
        assert job.optimizer.rng_seed == 7

    def test_all_listed(self):
        for name in NAMES:
            load_fixture(name)
        with pytest.raises(KeyError):
            load_fixture("nope.json")


class TestParse:
    def test_empty(self):
        with pytest.raises(ConfigParseError):
            parse_config("")
        with pytest.raises(ConfigParseError):
            parse_config("   \n")

    def test_bad_json_reports_line(self):
        with pytest.raises(ConfigParseError) as info:
            parse_config('{\n  "mode": "verify",\n  oops\n}')
        assert info.value.line == 3

    def test_swapped_edges(self):
        doc = document()
        doc["spec"]["f_p_hz"], doc["spec"]["f_s_hz"] = 3e9, 2e9
        with pytest.raises(ConfigValidationError, match="f_p < f_s violated") as info:
            parse_config(json.dumps(doc))
        assert "f_p=3000000000.0" in str(info.value)
        assert "f_s=2000000000.0" in str(info.value)

    def test_wrong_type_names_field_and_line(self):
        doc = document()
        doc["spec"]["alpha_s_db"] = "twenty"
        text = json.dumps(doc, indent=2)
        with pytest.raises(ConfigParseError) as info:
            parse_config(text)
        assert info.value.field == "spec.alpha_s_db"
        expected = 1 + text.splitlines().index('    "alpha_s_db": "twenty",')
        assert info.value.line == expected
        assert "spec.alpha_s_db" in str(info.value)

    def test_unknown_key(self):
        doc = document()
        doc["spec"]["colour"] = 1
        with pytest.raises(ConfigParseError, match="unknown key"):
            parse_config(json.dumps(doc))

    def test_missing_field(self):
        doc = document()
        del doc["substrate"]["h_m"]
        with pytest.raises(ConfigParseError) as info:
            parse_config(json.dumps(doc))
        assert info.value.field == "substrate.h_m"

    def test_bad_mode(self):
        with pytest.raises(ConfigParseError):
            parse_config(json.dumps(document(mode="plot")))

    def test_verify_needs_profile(self):
        with pytest.raises(ConfigValidationError, match="requires a profile"):
            parse_config(json.dumps(document(profile=None)))

    def test_synthesize_forbids_profile(self):
        with pytest.raises(ConfigValidationError):
            parse_config(json.dumps(document(mode="synthesize")))

    def test_profile_length_mismatch(self):
        doc = document()
        doc["profile"]["d_m"] = 0.2
        with pytest.raises(ConfigValidationError, match="differs"):
            parse_config(json.dumps(doc))

    def test_bad_profile_shape(self):
        doc = document()
        doc["profile"]["s"] = [0.1]
        with pytest.raises(ConfigValidationError):
            parse_config(json.dumps(doc))

    def test_end_width_outside_bounds(self):
        doc = document()
        doc["spec"]["wh_max"] = 2.0
        with pytest.raises(ConfigValidationError, match="end width"):
            parse_config(json.dumps(doc))

    def test_optimizer_section(self):
        doc = document(mode="synthesize", profile=None)
        doc["optimizer"] = {
            "rng_seed": 42,
            "population": 12,
            "max_evals": 500,
            "coeff_bounds": [-1, 1],
            "local_refine": False,
            "penalty_weights": {"stopband": 3},
        }
        job = parse_config(json.dumps(doc))
        assert job.optimizer.rng_seed == 42
        assert job.optimizer.coeff_bounds == (-1.0, 1.0)
        assert job.optimizer.penalty_weights.stopband == 3.0
        assert job.optimizer.local_refine is False

    def test_optimizer_invalid(self):
        doc = document(mode="synthesize", profile=None)
        doc["optimizer"] = {"population": 4}
        with pytest.raises(ConfigValidationError):
            parse_config(json.dumps(doc))
        doc["optimizer"] = {"population": 12.5}
        with pytest.raises(ConfigParseError):
            parse_config(json.dumps(doc))

    def test_grid_and_outputs(self):
        doc = document()
        doc["grid"] = {"n_points": 60, "sections_per_lambda": 100}
        doc["outputs"] = ["csv"]
        job = parse_config(json.dumps(doc))
        assert job.grid == GridConfig(60, 100.0, 1001)
        assert len(job.grid.frequency_grid(6e9)) == 60
        assert job.outputs == ("csv",)
        doc["outputs"] = ["pdf"]
        with pytest.raises(ConfigParseError):
            parse_config(json.dumps(doc))

    def test_load_from_disk(self, tmp_path):
        path = tmp_path / "job.json"
        path.write_text(fixture_text("lpf2.json"))
        assert isinstance(load_config(path), JobConfig)

    def test_with_mode(self):
        job = load_fixture("lpf1.json").with_mode("analyze")
        assert job.mode == "analyze"
        with pytest.raises(ConfigValidationError):
            job.with_mode("synthesize")
