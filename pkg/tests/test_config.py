import json

import pytest
from pydantic import ValidationError

from src.config import CONFIG_ENV, LOG_LEVEL_ENV, ConfigError, NaqcSettings, load_settings


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    # set then delete, so teardown also removes values loaded from .env
    for name in (CONFIG_ENV, LOG_LEVEL_ENV):
        monkeypatch.setenv(name, "")
        monkeypatch.delenv(name)


class TestSettings:
    def test_defaults(self):
        settings = load_settings()
        assert (settings.grid_theta, settings.grid_phi) == (64, 32)
        assert settings.tolerance == 1e-9
        assert settings.seed == 0
        assert settings.log_level == "INFO"

    def test_config_file_from_environment(self, monkeypatch, tmp_path):
        path = tmp_path / "naqc.json"
        path.write_text(json.dumps({"grid_theta": 16, "seed": 5}))
        monkeypatch.setenv(CONFIG_ENV, str(path))
        settings = load_settings()
        assert settings.grid_theta == 16 and settings.seed == 5
        assert settings.grid_phi == 32

    def test_flags_take_precedence(self, monkeypatch, tmp_path):
        path = tmp_path / "naqc.json"
        path.write_text(json.dumps({"grid_theta": 16}))
        monkeypatch.setenv(CONFIG_ENV, str(path))
        settings = load_settings().merged({"grid_theta": 10, "seed": None})
        assert settings.grid_theta == 10 and settings.seed == 0

    def test_dotenv_file(self, tmp_path):
        (tmp_path / ".env").write_text(f"{LOG_LEVEL_ENV}=debug\n")
        assert load_settings().log_level == "DEBUG"

    def test_malformed_file(self, monkeypatch, tmp_path):
        path = tmp_path / "naqc.json"
        path.write_text('{"grid_theta": ')
        monkeypatch.setenv(CONFIG_ENV, str(path))
        with pytest.raises(ConfigError) as exc:
            load_settings()
        assert ":1:" in str(exc.value)

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValidationError):
            NaqcSettings(grid=3)

    def test_unknown_level_rejected(self):
        with pytest.raises(ValidationError):
            NaqcSettings(log_level="chatty")
