#!/usr/bin/env python3
"""
Core configuration management for PPE Sizer
Holds pipeline, training and analysis defaults with optional YAML overrides
"""

import os
import json
try:
    import yaml
except ImportError:
    yaml = None
from typing import Dict, Any, Optional, List, Tuple
from pathlib import Path
import logging

from .errors import ConfigError

logger = logging.getLogger(__name__)


class Config:
    """Central configuration manager with YAML support and validation"""

    def __init__(self, config_dir: Optional[str] = None, config_file: Optional[str] = None):
        self.config_dir = Path(config_dir or os.path.expanduser("~/.ppe_sizer"))
        self.config_file = Path(config_file) if config_file else self.config_dir / "config.yaml"
        self._config: Dict[str, Any] = {}
        self.load_config()

    def get_default_config(self) -> Dict[str, Any]:
        """Get default configuration values"""
        return {
            'core': {
                'log_level': 'INFO',
                'log_file': None,
                'debug_mode': False,
            },
            'preprocess': {
                'target_points': 10000,
                'chin_margin': 0.04,
            },
            'synth': {
                'count': 8,
                'points': 30000,
                'noise_sigma': 0.001,
            },
            'assignment': {
                'eps_scale_divisor': 4.0,
                'train_eps_rel': 0.01,
                'eval_eps_rel': 1e-4,
                'parallel_bids': False,
            },
            'vae': {
                'latent_dim': 3,
                'n_points': 250,
                'width_mult': 1.0 / 16.0,
                'batch_size': 16,
                'lr': 1e-4,
                'max_epochs': 50,
                'patience': 10,
                'val_frac': 0.1,
                'uniform_bound': 1.0,
                'workers': 1,
            },
            'analysis': {
                'k': 3,
                'restarts': 10,
                'max_iter': 300,
                'percentiles': [5.0, 95.0],
            },
            'export': {
                'scatter_dims': [0, 1],
            },
        }

    def load_config(self):
        """Load configuration from file and merge with defaults"""
        loaded: Dict[str, Any] = {}
        if self.config_file.exists():
            try:
                with open(self.config_file, 'r') as f:
                    if yaml:
                        loaded = yaml.safe_load(f) or {}
                    else:
                        loaded = json.load(f) or {}
            except Exception as e:
                raise ConfigError(f"failed to load config {self.config_file}: {e}")
            logger.debug(f"Loaded config overrides from {self.config_file}")

        self._config = self._merge_configs(self.get_default_config(), loaded)

        ok, errors = self.validate_config()
        if not ok:
            raise ConfigError("; ".join(errors))

    def save_config(self) -> bool:
        """Save current configuration to the config file"""
        try:
            self.config_file.parent.mkdir(parents=True, exist_ok=True)
            with open(self.config_file, 'w') as f:
                if yaml:
                    yaml.safe_dump(self._config, f, default_flow_style=False, indent=2)
                else:
                    json.dump(self._config, f, indent=2)
        except Exception as e:
            logger.error(f"Failed to save config: {e}")
            return False
        return True

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value with dot notation support"""
        value = self._get_nested_value(self._config, key.split('.'))
        return value if value is not None else default

    def set(self, key: str, value: Any, save_immediately: bool = False) -> bool:
        """Set configuration value with dot notation support"""
        self._set_nested_value(self._config, key.split('.'), value)
        if save_immediately:
            return self.save_config()
        return True

    def section(self, name: str) -> Dict[str, Any]:
        return dict(self._config.get(name, {}))

    def _get_nested_value(self, config_dict: Dict[str, Any], keys: list) -> Any:
        current = config_dict
        for key in keys:
            if isinstance(current, dict) and key in current:
                current = current[key]
            else:
                return None
        return current

    def _set_nested_value(self, config_dict: Dict[str, Any], keys: list, value: Any):
        current = config_dict
        for key in keys[:-1]:
            if key not in current or not isinstance(current[key], dict):
                current[key] = {}
            current = current[key]
        current[keys[-1]] = value

    def _merge_configs(self, default: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
        """Recursively merge configuration dictionaries"""
        merged = default.copy()

        for key, value in override.items():
            if key in merged and isinstance(merged[key], dict) and isinstance(value, dict):
                merged[key] = self._merge_configs(merged[key], value)
            else:
                merged[key] = value

        return merged

    def validate_config(self) -> Tuple[bool, List[str]]:
        """Validate current configuration"""
        errors = []

        log_level = self.get('core.log_level', 'INFO')
        if log_level not in ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']:
            errors.append(f"Invalid log level: {log_level}")

        if int(self.get('preprocess.target_points', 1)) < 1:
            errors.append("preprocess.target_points must be >= 1")
        if float(self.get('preprocess.chin_margin', 0.0)) < 0:
            errors.append("preprocess.chin_margin must be >= 0")

        if float(self.get('assignment.eps_scale_divisor', 4.0)) <= 1.0:
            errors.append("assignment.eps_scale_divisor must be > 1")

        n_points = int(self.get('vae.n_points', 10))
        if n_points < 10 or n_points % 10 != 0:
            errors.append("vae.n_points must be a positive multiple of 10")
        width_mult = float(self.get('vae.width_mult', 1.0))
        if not 0.0 < width_mult <= 1.0:
            errors.append("vae.width_mult must be in (0, 1]")
        if int(self.get('vae.latent_dim', 3)) < 1:
            errors.append("vae.latent_dim must be >= 1")
        val_frac = float(self.get('vae.val_frac', 0.1))
        if not 0.0 < val_frac < 1.0:
            errors.append("vae.val_frac must be in (0, 1)")

        if int(self.get('analysis.k', 3)) < 1:
            errors.append("analysis.k must be >= 1")
        for pct in self.get('analysis.percentiles', []):
            if not 0.0 <= float(pct) <= 100.0:
                errors.append(f"Invalid percentile {pct}: must be between 0 and 100")

        return len(errors) == 0, errors

    def get_config_summary(self) -> Dict[str, Any]:
        """Get a flat summary of the resolved configuration"""
        summary: Dict[str, Any] = {'config_file': str(self.config_file)}
        for section, values in self._config.items():
            for key, value in values.items():
                summary[f"{section}.{key}"] = value
        return summary


# Global configuration instance
config = Config()
