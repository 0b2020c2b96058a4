import pytest

from chids.config import (
    RunConfig,
    apply_setting,
    load_config,
    parse_config_text,
    render_config,
)
from chids.errors import ConfigError


class TestParsing:
    def test_round_trip_through_render(self):
        cfg = RunConfig(seed=42, select_method="igr", part_min_leaf=5)
        again = parse_config_text(render_config(cfg))
        assert again == cfg

    def test_comments_and_blanks_ignored(self):
        cfg = parse_config_text("# a comment\n\nseed = 9\n  # indented comment\n")
        assert cfg.seed == 9

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            parse_config_text("no.such.key = 1")

    def test_bad_value_type(self):
        with pytest.raises(ConfigError):
            parse_config_text("seed = banana")
        with pytest.raises(ConfigError):
            parse_config_text("part.prune = maybe")

    def test_missing_equals(self):
        with pytest.raises(ConfigError):
            parse_config_text("seed 9")

    def test_csv_values(self):
        cfg = parse_config_text("prune = land, urgent\nsplit.minority = u2r,r2l\n")
        assert cfg.prune == ("land", "urgent")
        assert cfg.split_minority == ("u2r", "r2l")

    def test_missing_file(self, tmp_path):
        from chids.errors import IoError

        with pytest.raises(IoError):
            load_config(tmp_path / "nope.conf")


class TestValidation:
    def test_bad_enums_rejected(self):
        for key, value in (
            ("select.method", "pca"),
            ("model.kind", "svm"),
            ("pipeline.policy", "ignore"),
            ("detect.mode", "psychic"),
        ):
            cfg = apply_setting(RunConfig(), key, value)
            with pytest.raises(ConfigError):
                cfg.validate()

    def test_threads_floor(self):
        cfg = apply_setting(RunConfig(), "threads", "0")
        with pytest.raises(ConfigError):
            cfg.validate()

    def test_builders_reflect_settings(self):
        cfg = RunConfig(seed=5, rules_repetition_limit=7, part_confidence=0.1)
        assert cfg.split_spec().seed == 5
        assert cfg.rule_config().repetition_limit == 7
        assert cfg.tree_params().confidence == 0.1
