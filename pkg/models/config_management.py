from pathlib import Path
import toml
import logging
from typing import Any, Callable, Dict, Optional, Tuple
import os

from dotenv import load_dotenv
from pydantic import ValidationError as PydanticValidationError

from models.data_models import AppConfig
from models.core.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

# environment variable -> (section, key, parser)
ENV_OVERRIDES: Dict[str, Tuple[str, str, Callable[[str], Any]]] = {
    'HEARTPATH_LOG_LEVEL': ('logging', 'level', lambda v: v.upper()),
    'HEARTPATH_WORKERS': ('window', 'workers', int),
    'HEARTPATH_TOLERANCE_MS': ('metrics', 'tolerance_ms', float),
    'HEARTPATH_RATE_HZ': ('window', 'rate_hz', float),
}


class ConfigManager:
    """Manages decoder, metrics and corpus settings using Pydantic models"""

    DEFAULT_CONFIG = AppConfig()

    def __init__(self, project_root: Optional[Path] = None, config_file: Optional[Path] = None):
        """Initialize config manager

        Args:
            project_root: Optional project root directory. If None,
                          uses the current working directory
            config_file: Optional explicit config file; defaults to
                         <project_root>/config/config.toml
        """
        self.project_root = Path(project_root) if project_root is not None else Path.cwd()
        if config_file is not None:
            self.config_file = Path(config_file)
            self.config_dir = self.config_file.parent
        else:
            self.config_dir = self.project_root / 'config'
            self.config_file = self.config_dir / 'config.toml'

        self.config: AppConfig = AppConfig.model_validate(ConfigManager.DEFAULT_CONFIG.model_dump())

    def load(self, apply_env: bool = True) -> AppConfig:
        """Load the config file if present, else keep defaults, then apply env overrides

        Raises:
            ConfigurationError: Malformed TOML, a schema violation, or a bad
                environment override
        """
        if self.config_file.exists():
            try:
                with open(self.config_file) as f:
                    config_dict = toml.load(f)
            except toml.TomlDecodeError as e:
                logger.error(f"Invalid config file format: {e}")
                raise ConfigurationError("Invalid config file format", config_path=str(self.config_file),
                                         details=str(e), error_code="CONFIG_MALFORMED")
            except OSError as e:
                raise ConfigurationError("Cannot read config file", config_path=str(self.config_file),
                                         details=str(e), error_code="CONFIG_UNREADABLE")
            self.config = self._validate(config_dict)
            logger.debug(f"Loaded configuration from {self.config_file}")
        else:
            logger.debug(f"No config file at {self.config_file}; using defaults")

        if apply_env:
            self.apply_env_overrides()
        return self.config

    def _validate(self, config_dict: Dict[str, Any]) -> AppConfig:
        try:
            return AppConfig.model_validate(config_dict)
        except PydanticValidationError as e:
            raise ConfigurationError("Configuration does not match the expected schema",
                                     config_path=str(self.config_file), details=str(e),
                                     error_code="CONFIG_INVALID")

    def apply_env_overrides(self) -> None:
        """Apply HEARTPATH_* variables, after loading a .env file if one exists"""
        load_dotenv()
        config_dict = self.config.model_dump()
        changed = False
        for var, (section, key, parse) in ENV_OVERRIDES.items():
            raw = os.environ.get(var)
            if raw is None or raw == '':
                continue
            try:
                config_dict[section][key] = parse(raw)
            except ValueError as e:
                raise ConfigurationError(f"Invalid value for {var}: {raw!r}", details=str(e),
                                         error_code="ENV_OVERRIDE_INVALID")
            logger.debug(f"{var} overrides [{section}] {key}")
            changed = True
        if changed:
            self.config = self._validate(config_dict)

    def get(self, section: str, key: str, default: Any = None) -> Any:
        """Get configuration value

        For new code, prefer direct attribute access on self.config.
        """
        config_dict = self.config.model_dump()
        return config_dict.get(section, {}).get(key, default)

    def set(self, section: str, key: str, value: Any) -> None:
        """Set a configuration value and save

        Raises:
            ConfigurationError: The new value violates the schema
        """
        config_dict = self.config.model_dump()
        if section not in config_dict:
            config_dict[section] = {}
        config_dict[section][key] = value
        self.config = self._validate(config_dict)
        self.save()

    def save(self) -> Path:
        """Write the current configuration as TOML

        Raises:
            ConfigurationError: The file cannot be written
        """
        try:
            self.config_dir.mkdir(parents=True, exist_ok=True)
            with open(self.config_file, 'w') as f:
                toml.dump(self.config.model_dump(), f)
        except OSError as e:
            raise ConfigurationError("Cannot write config file", config_path=str(self.config_file),
                                     details=str(e), error_code="CONFIG_UNWRITABLE")
        logger.info(f"Configuration saved to {self.config_file}")
        return self.config_file
