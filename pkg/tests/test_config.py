"""Config parsing, merging and model validation."""

from pathlib import Path

import pytest

from mebudget.config import (ConfigError, InputConfig, LayerConfig,
                             RunConfig, SweepConfig, SynthConfig,
                             assemble_run_config, merge_options,
                             parse_config_file, parse_layer_string,
                             parse_method_list, parse_scale_list)


class TestLayerString:
    def test_minimal(self):
        layer = parse_layer_string("noise:0,0,64,48")
        assert (layer.texture, layer.x, layer.y, layer.w, layer.h) \
            == ("noise", 0, 0, 64, 48)
        assert (layer.dx, layer.dy) == (0, 0)

    def test_motion_segment(self):
        layer = parse_layer_string("checker:4,20,48,32:1,0")
        assert (layer.dx, layer.dy) == (1, 0)

    def test_keyword_segment(self):
        layer = parse_layer_string(
            "checker:4,20,48,32:1,0:amplitude=60,cell=8,flicker=3")
        assert (layer.amplitude, layer.cell, layer.flicker) == (60, 8, 3)

    def test_empty_motion_segment_allowed(self):
        layer = parse_layer_string("flat:0,0,16,16::value=10")
        assert (layer.dx, layer.dy) == (0, 0) and layer.value == 10

    @pytest.mark.parametrize("text", [
        "noise",                          # no geometry
        "noise:1,2,3",                    # short geometry
        "noise:a,b,c,d",                  # non-numeric
        "noise:0,0,16,16:5",              # motion needs two parts
        "noise:0,0,16,16:0,0:amp=x",      # non-numeric keyword
        "noise:0,0,16,16:0,0:cell=4:extra",   # too many segments
        "plasma:0,0,16,16",               # unknown texture
        "noise:0,0,16,16:0,0:wobble=3",   # unknown keyword
    ])
    def test_rejects_malformed(self, text):
        with pytest.raises(ConfigError):
            parse_layer_string(text)


class TestConfigFile:
    def test_parse_flat_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# comment\n"
            "\n"
            "format = synth\n"
            "qp=33\n"
            "synth.layer = noise:0,0,64,48\n"
            "synth.layer = checker:0,0,16,16:1,0\n")
        out = parse_config_file(cfg)
        assert out["format"] == "synth"
        assert out["qp"] == "33"
        assert out["synth.layer"] == ["noise:0,0,64,48",
                                      "checker:0,0,16,16:1,0"]

    def test_line_without_equals_rejected(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("format synth\n")
        with pytest.raises(ConfigError, match="key = value"):
            parse_config_file(cfg)


class TestMergeOptions:
    def test_types_converted(self):
        merged = merge_options({"qp": "33", "scale": "60", "strict": "yes",
                                "method": "ccme"}, {})
        assert merged == {"qp": 33, "scale": 60.0, "strict": True,
                          "method": "ccme"}

    def test_flags_override_file(self):
        merged = merge_options({"qp": "33"}, {"qp": 20, "frames": None})
        assert merged["qp"] == 20
        assert "frames" not in merged

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown config key"):
            merge_options({"quality": "high"}, {})

    @pytest.mark.parametrize("options", [{"qp": "high"},
                                         {"scale": "fast"},
                                         {"strict": "maybe"}])
    def test_bad_values_rejected(self, options):
        with pytest.raises(ConfigError):
            merge_options(options, {})


class TestAssembleRunConfig:
    def synth_options(self, **extra):
        options = {"synth.width": 64, "synth.height": 48,
                   "synth.frames": 4, "synth.layer": ["noise:0,0,64,48"]}
        options.update(extra)
        return options

    def test_synth_format_inferred(self):
        config = assemble_run_config(self.synth_options())
        assert config.input.format == "synth"
        assert config.input.synth.width == 64
        assert len(config.input.synth.layers) == 1
        assert config.method == "ccme" and config.budget_scale == 100.0

    def test_flag_mapping(self):
        config = assemble_run_config(self.synth_options(
            qp=33, th1=800, th2=4000, pac_th=2, scale=60.0,
            class_eps=0.02, method="zero_sad", mb_log=True, seed=5))
        assert config.qp == 33
        assert (config.th1, config.th2) == (800, 4000)
        assert config.pac_threshold == 2
        assert config.budget_scale == 60.0
        assert config.class_eps == 0.02
        assert config.method == "zero_sad"
        assert config.include_mb_log and config.seed == 5

    def test_path_input_defaults_to_y4m(self):
        config = assemble_run_config({"input": "clip.y4m"})
        assert config.input.format == "y4m"
        assert config.input.path == "clip.y4m"

    def test_thresholds_cross_checked(self):
        with pytest.raises(ConfigError, match="th1"):
            assemble_run_config(self.synth_options(th1=6000))

    def test_synth_without_dimensions_rejected(self):
        with pytest.raises(ConfigError, match="synth"):
            assemble_run_config({"format": "synth"})

    def test_missing_path_rejected(self):
        with pytest.raises(ConfigError):
            assemble_run_config({"format": "y4m"})

    def test_yuv420_needs_dimensions(self):
        with pytest.raises(ConfigError):
            assemble_run_config({"format": "yuv420", "input": "x.yuv"})
        ok = assemble_run_config({"format": "yuv420", "input": "x.yuv",
                                  "width": 64, "height": 48})
        assert ok.input.width == 64

    def test_scale_bounds(self):
        with pytest.raises(ConfigError):
            assemble_run_config(self.synth_options(scale=0.0))
        with pytest.raises(ConfigError):
            assemble_run_config(self.synth_options(scale=500.0))


class TestListParsers:
    def test_scales(self):
        assert parse_scale_list("100, 60,40") == [100.0, 60.0, 40.0]
        with pytest.raises(ConfigError):
            parse_scale_list("100,slow")

    def test_methods(self):
        assert parse_method_list("ccme, zero_sad") == ["ccme", "zero_sad"]
        with pytest.raises(ConfigError, match="unknown method"):
            parse_method_list("ccme,exhaustive")
        with pytest.raises(ConfigError, match="unbudgeted"):
            parse_method_list("shs")


class TestSweepConfig:
    def run_config(self):
        synth = SynthConfig(width=64, height=48, frames=3,
                            layers=[LayerConfig(texture="noise", x=0, y=0,
                                                w=64, h=48)])
        return RunConfig(input=InputConfig(format="synth", synth=synth))

    def test_scales_sorted_descending_unique(self):
        cfg = SweepConfig(run=self.run_config(),
                          scales=[40.0, 100.0, 60.0, 100.0])
        assert cfg.scales == [100.0, 60.0, 40.0]

    def test_hundred_required(self):
        with pytest.raises(ValueError, match="include 100"):
            SweepConfig(run=self.run_config(), scales=[60.0, 40.0])

    def test_scale_range_checked(self):
        with pytest.raises(ValueError, match="outside"):
            SweepConfig(run=self.run_config(), scales=[100.0, 450.0])

    def test_methods_default_to_all_budgeted(self):
        cfg = SweepConfig(run=self.run_config(), scales=[100.0])
        assert cfg.methods == ["ccme", "cost_only", "zero_sad"]


class TestShippedConfigs:
    """The bundled config files must mirror the code presets exactly."""

    CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

    def from_file(self, name):
        options = parse_config_file(self.CONFIG_DIR / name)
        return assemble_run_config(merge_options(options, {}))

    def test_acceptance_config_matches_preset(self):
        from mebudget.presets import acceptance_preset

        config = self.from_file("acceptance.cfg")
        assert config.input.synth.to_spec(config.seed) \
            == acceptance_preset()

    def test_classification_config_matches_preset(self):
        from mebudget.presets import classification_preset

        config = self.from_file("classification.cfg")
        assert config.input.synth.to_spec(config.seed) \
            == classification_preset()


class TestLoadFrames:
    def test_synth_frames_capped_by_run_limit(self):
        synth = SynthConfig(width=64, height=48, frames=6)
        config = RunConfig(input=InputConfig(format="synth", synth=synth),
                           frames=3)
        assert len(config.load_frames()) == 3

    def test_too_few_frames_rejected(self):
        synth = SynthConfig(width=64, height=48, frames=1)
        config = RunConfig(input=InputConfig(format="synth", synth=synth))
        with pytest.raises(ConfigError, match="two frames"):
            config.load_frames()

    def test_seed_fallback_to_run_seed(self):
        synth = SynthConfig(width=64, height=48, frames=2)
        a = RunConfig(input=InputConfig(format="synth", synth=synth),
                      seed=3)
        b = RunConfig(input=InputConfig(format="synth", synth=synth),
                      seed=4)
        assert a.input.synth.to_spec(a.seed).seed == 3
        assert b.input.synth.to_spec(b.seed).seed == 4
