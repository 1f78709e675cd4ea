from pathlib import Path

import numpy as np
import pytest

from peakonlab.config import expand_sweep, load_config, parse_config
from peakonlab.errors import ConfigError


SCENARIOS = sorted((Path(__file__).resolve().parent.parent / "data" / "scenarios").glob("*.ini"))

PDE_TEXT = """
[scenario]
kind = pde-sim
name = bump

[model]
k1 = 1
k2 = 0.5
k3 = 0

[grid]
n = 128

[integrator]
t_end = 0.25

[initial]
profile = gaussian
"""


class TestParse:
    def test_valid_pde_config(self):
        cfg = parse_config(PDE_TEXT)
        assert cfg.name == "bump"
        assert cfg.params().as_tuple() == (1.0, 0.5, 0.0)
        assert cfg.grid_spec().n == 128
        assert cfg.integrator_options().method == "DOP853"
        assert cfg.initial.width == 0.1

    def test_default_name_from_kind(self):
        cfg = parse_config("[scenario]\nkind = reduce-check\n")
        assert cfg.name == "reduce_check"

    def test_float_lists(self):
        cfg = parse_config("""
[scenario]
kind = peakon-sim
[grid]
domain = line
[peakons]
amplitudes = 2.0, 1.0
positions = -5; 0
""")
        assert cfg.peakons.amplitudes == [2.0, 1.0]
        assert cfg.peakons.positions == [-5.0, 0.0]

    def test_missing_required_section(self):
        with pytest.raises(ConfigError, match=r"\[initial\]"):
            parse_config("[scenario]\nkind = pde-sim\n")

    def test_unknown_kind(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("[scenario]\nkind = wave-tank\n")
        assert exc.value.field == "scenario.kind"

    def test_domain_mismatch(self):
        text = "[scenario]\nkind = periodic-peakon-sim\n[grid]\ndomain = line\n[peakons]\namplitudes = 1\npositions = 0\n"
        with pytest.raises(ConfigError, match="circle"):
            parse_config(text)

    def test_grid_must_be_power_of_two(self):
        cfg = parse_config(PDE_TEXT.replace("n = 128", "n = 100"))
        with pytest.raises(ValueError):
            cfg.grid_spec()

    def test_negative_end_time(self):
        with pytest.raises(ConfigError, match="t_end"):
            parse_config(PDE_TEXT.replace("t_end = 0.25", "t_end = -1"))

    def test_rate_point_needs_norm(self):
        text = "[scenario]\nkind = breaking-check\n[breaking]\ntheorem = T1.8\npoint = 1, -2, 1\n"
        with pytest.raises(ConfigError, match="h1_norm"):
            parse_config(text)

    def test_malformed_text(self):
        with pytest.raises(ConfigError, match="malformed"):
            parse_config("kind = pde-sim\n")

    def test_output_cadence(self):
        cfg = parse_config(PDE_TEXT + "\n[output]\ncadence = 0.1\n")
        assert np.allclose(cfg.output_times(), [0.0, 0.1, 0.2, 0.25])

    def test_output_dir_env_override(self, monkeypatch):
        monkeypatch.delenv("PEAKONLAB_OUTPUT_DIR", raising=False)
        cfg = parse_config(PDE_TEXT)
        assert cfg.output_dir() == "runs"
        monkeypatch.setenv("PEAKONLAB_OUTPUT_DIR", "/tmp/elsewhere")
        assert cfg.output_dir() == "/tmp/elsewhere"


class TestSweep:
    def test_cartesian_product(self):
        cfg = parse_config(PDE_TEXT + "\n[sweep]\nmodel.k2 = 0, 1\ngrid.n = 64, 128, 256\n")
        variants = expand_sweep(cfg)
        assert len(variants) == 6
        names = {v.name for v in variants}
        assert "bump_n=64_k2=0" in names
        assert all(not v.sweep for v in variants)
        assert {v.model.k2 for v in variants} == {0.0, 1.0}

    def test_no_sweep_is_identity(self):
        cfg = parse_config(PDE_TEXT)
        assert expand_sweep(cfg) == [cfg]

    def test_sweep_into_missing_section(self):
        cfg = parse_config(PDE_TEXT + "\n[sweep]\nprobe.s = 3, 4\n")
        with pytest.raises(ConfigError):
            expand_sweep(cfg)

    def test_bad_sweep_key(self):
        with pytest.raises(ConfigError):
            parse_config(PDE_TEXT + "\n[sweep]\nk2 = 0, 1\n")


class TestPresets:
    def test_presets_exist(self):
        assert len(SCENARIOS) >= 8

    @pytest.mark.parametrize("path", SCENARIOS, ids=lambda p: p.stem)
    def test_preset_loads(self, path):
        cfg = load_config(path)
        assert expand_sweep(cfg)
