"""Tests for configuration module."""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import pytest

from riq.config import Config, get_config, get_home_dir, reset_config
from riq.models.enums import Eps0Policy


class TestConfig:
    """Tests for Config class."""

    @pytest.fixture
    def config_dir(self, riq_home):
        """The RIQ_HOME directory set up by conftest."""
        return riq_home

    @pytest.fixture
    def config(self):
        """Create a Config instance with temporary directory."""
        return Config()

    def write_file(self, config_dir, text):
        config_dir.mkdir(parents=True, exist_ok=True)
        (config_dir / "config.toml").write_text(text)

    def test_home_dir_from_env(self, config, config_dir):
        """Test RIQ_HOME sets the config location."""
        assert get_home_dir() == config_dir
        assert config.config_path == config_dir / "config.toml"

    def test_defaults(self, config):
        """Test values with no file and no environment."""
        assert config.get_eps0() == 0.01
        assert config.get_eps0_policy() == Eps0Policy.CONSTANT
        assert config.get_stop_threshold() == 3.0
        assert config.get_precision() == 12
        assert config.resolve("calib.count") == 4

    def test_cli_takes_precedence(self, config, monkeypatch):
        """Test CLI values win over the environment."""
        monkeypatch.setenv("RIQ_EPS0", "0.05")
        assert config.get_eps0(0.02) == 0.02

    def test_env_precedence(self, config_dir, monkeypatch):
        """Test the environment wins over the file."""
        self.write_file(config_dir, "[search]\nstop_threshold = 4.0\n")
        monkeypatch.setenv("RIQ_STOP_THRESHOLD", "6")
        assert Config().get_stop_threshold() == 6.0

    def test_file_config(self, config_dir):
        """Test values read from config.toml."""
        self.write_file(config_dir, '[quant]\neps0 = 0.03\neps0_policy = "per_layer_fd"\n')
        config = Config()
        assert config.get_eps0() == 0.03
        assert config.get_eps0_policy() == Eps0Policy.PER_LAYER_FD
        assert config.get_value("quant.eps0") == 0.03
        assert config.get_value("quant.rbits") is None

    def test_invalid_env_fallback(self, config, monkeypatch):
        """Test an invalid environment value falls back to the default."""
        monkeypatch.setenv("RIQ_PRECISION", "99")
        assert config.get_precision() == 12

    def test_cli_invalid_fallback(self, config, monkeypatch):
        """Test an invalid CLI value falls back to the environment."""
        monkeypatch.setenv("RIQ_STOP_THRESHOLD", "5")
        assert config.get_stop_threshold(1.0) == 5.0

    def test_invalid_file_fallback(self, config_dir):
        """Test an invalid file value falls back to the default."""
        self.write_file(config_dir, "[quant]\neps0 = 1.5\n")
        assert Config().get_eps0() == 0.01

    def test_corrupt_file(self, config_dir):
        """Test an unparseable file is ignored."""
        self.write_file(config_dir, "[quant\neps0 = ")
        config = Config()
        assert config.get_all() == {}
        assert config.get_eps0() == 0.01

    def test_source_of_invalid_file_value(self, config_dir):
        """Test a file value that fails validation is reported as the default."""
        self.write_file(config_dir, "[quant]\neps0 = 1.5\n")
        assert Config().resolve_with_source("quant.eps0") == (0.01, "default")

    def test_source_of_env_equal_to_default(self, config, monkeypatch):
        """Test an env value equal to the default is still reported as env."""
        monkeypatch.setenv("RIQ_STOP_THRESHOLD", "3")
        assert config.resolve_with_source("search.stop_threshold") == (3.0, "env")

    def test_source_of_cli_and_file(self, config_dir):
        """Test CLI and file sources are named."""
        self.write_file(config_dir, "[search]\nstop_threshold = 4.0\n")
        config = Config()
        assert config.resolve_with_source("search.stop_threshold") == (4.0, "file")
        assert config.resolve_with_source("search.stop_threshold", 5.0) == (5.0, "cli")

    def test_set_and_save(self, config, config_dir):
        """Test set_value parses the value and save writes TOML."""
        config.set_value("search.stop_threshold", "4.5")
        config.set_value("quant.eps0_policy", "per_layer_rbit")
        config.save()

        data = tomllib.loads((config_dir / "config.toml").read_text())
        assert data["search"]["stop_threshold"] == 4.5
        assert data["quant"]["eps0_policy"] == "per_layer_rbit"
        assert Config().get_stop_threshold() == 4.5

    @pytest.mark.parametrize(
        ("key", "value"),
        [
            ("quant.eps0", "1.0"),
            ("quant.eps0_policy", "magic"),
            ("search.stop_threshold", "1"),
            ("coder.precision", "16"),
            ("calib.count", "0"),
            ("quant.eps0", "abc"),
        ],
    )
    def test_set_invalid_value(self, config, key, value):
        """Test values outside their allowed range."""
        with pytest.raises(ValueError):
            config.set_value(key, value)

    @pytest.mark.parametrize("key", ["eps0", "nope.eps0", "quant.nope", "a.b.c"])
    def test_invalid_key(self, config, key):
        """Test malformed and unknown keys."""
        with pytest.raises(ValueError):
            config.resolve(key)

    def test_defaults_table(self):
        """Test every key is listed with its default."""
        defaults = Config.defaults()
        assert defaults["quant.eps0"] == 0.01
        assert defaults["search.stop_threshold"] == 3.0
        assert defaults["analysis.grid_points"] == 16


class TestGetConfig:
    """Tests for the global config instance."""

    def test_cached(self):
        """Test get_config returns one instance until reset."""
        first = get_config()
        assert get_config() is first
        reset_config()
        assert get_config() is not first
