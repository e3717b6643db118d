import copy
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

import jsonschema
import yaml

from tensorbridge.core.logger import get_logger, log_phase

logger = get_logger(__name__)

_PACKAGE_CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"

# variable -> (section, clé, conversion)
ENV_OVERRIDES: Dict[str, Tuple[str, str, Callable[[str], Any]]] = {
    "TB_SEED": ("generator", "seed", int),
    "TB_MAX_RANK": ("generator", "max_rank", int),
    "TB_MAX_EXTENT": ("generator", "max_extent", int),
    "TB_FD_STEP": ("gradient", "fd_step", float),
}


@dataclass
class GeneratorConfig:
    seed: int
    max_rank: int
    max_extent: int
    cases_per_rank: int


@dataclass
class ToleranceConfig:
    f64: float
    f32: float

    def for_dtype(self, dtype: Any) -> float:
        return self.f32 if getattr(dtype, "value", dtype) == "f32" else self.f64


@dataclass
class GradientConfig:
    fd_step: float
    rel_tol: float
    ad_agreement_f64: float
    ad_agreement_f32: float


@dataclass
class RunnerConfig:
    workers: int


@dataclass
class LoggingConfig:
    level: str
    format: str
    console_enabled: bool
    file_enabled: bool
    file_name: Optional[str]


@dataclass
class HarnessConfig:
    generator: GeneratorConfig
    tolerance: ToleranceConfig
    gradient: GradientConfig
    runner: RunnerConfig
    logging: LoggingConfig


class ConfigError(Exception):
    """Erreur de configuration invalide ou introuvable."""


class ConfigLoader:
    """
    Charge, valide et normalise la configuration du harnais de conformité.

    Responsabilités :
      - Lire les défauts YAML embarqués dans le package.
      - Fusionner un fichier d'overrides optionnel (clés inconnues refusées).
      - Appliquer des overrides via variables d'environnement.
      - Valider le résultat via un schéma JSON (defaults.schema.json).
    """

    DEFAULT_DEFAULTS_PATH = _PACKAGE_CONFIG_DIR / "defaults.yaml"
    DEFAULT_SCHEMA_PATH = _PACKAGE_CONFIG_DIR / "defaults.schema.json"

    def __init__(
        self,
        config_path: Optional[Path] = None,
        defaults_path: Optional[Path] = None,
        schema_path: Optional[Path] = None,
    ) -> None:
        self.config_path = config_path
        self.defaults_path = defaults_path or self.DEFAULT_DEFAULTS_PATH
        self.schema_path = schema_path or self.DEFAULT_SCHEMA_PATH

    def load(self) -> HarnessConfig:
        """Défauts embarqués + overrides fichier + overrides env, validés par le schéma."""
        log_phase(logger, "config.load", f"Chargement defaults={self.defaults_path}, overrides={self.config_path}")

        raw = self._read(self.defaults_path, yaml.safe_load, "configuration")
        if self.config_path is not None:
            overrides = self._read(Path(self.config_path), yaml.safe_load, "configuration")
            self._check_known_keys(raw, overrides)
            raw = self._deep_merge(raw, overrides)
        raw = self._apply_env_overrides(raw)

        schema = self._read(self.schema_path, json.loads, "schéma")
        try:
            jsonschema.validate(instance=raw, schema=schema)
        except jsonschema.ValidationError as exc:
            where = ".".join(str(p) for p in exc.absolute_path) or "<racine>"
            raise ConfigError(f"Configuration invalide en {where} : {exc.message}") from exc

        logging_section = {"file_name": None, **raw["logging"]}
        return HarnessConfig(
            generator=GeneratorConfig(**raw["generator"]),
            tolerance=ToleranceConfig(**raw["tolerance"]),
            gradient=GradientConfig(**raw["gradient"]),
            runner=RunnerConfig(**raw["runner"]),
            logging=LoggingConfig(**logging_section),
        )

    @staticmethod
    def _read(path: Path, parse: Callable[[str], Any], label: str) -> Dict[str, Any]:
        try:
            data = parse(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"Fichier de {label} introuvable : {path}") from None
        except (OSError, ValueError, yaml.YAMLError) as exc:
            raise ConfigError(f"Fichier de {label} illisible ({path}) : {exc}") from exc
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ConfigError(f"{path} : un objet racine est attendu")
        return data

    # ---- Overrides env ----

    def _apply_env_overrides(self, config: Dict[str, Any]) -> Dict[str, Any]:
        """TB_SEED, TB_MAX_RANK, TB_MAX_EXTENT (int) et TB_FD_STEP (float) ; valeur illisible ignorée."""
        log_phase(logger, "config.override", "Application des overrides via variables d'environnement")
        for env_var, (section, key, caster) in ENV_OVERRIDES.items():
            value = os.getenv(env_var, "").strip()
            if not value:
                continue
            try:
                config.setdefault(section, {})[key] = caster(value)
            except ValueError:
                logger.warning("Variable d'environnement %s invalide (%s attendu), ignorée.", env_var, caster.__name__)
        return config

    @staticmethod
    def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
        merged = copy.deepcopy(base)
        for key, value in override.items():
            if isinstance(merged.get(key), dict) and isinstance(value, dict):
                merged[key] = ConfigLoader._deep_merge(merged[key], value)
            else:
                merged[key] = value
        return merged

    @staticmethod
    def _check_known_keys(defaults: Dict[str, Any], overrides: Dict[str, Any], prefix: str = "") -> None:
        for key, value in overrides.items():
            if key not in defaults:
                raise ConfigError(f"Clé inconnue dans la configuration : {prefix}{key}")
            if isinstance(value, dict) and isinstance(defaults[key], dict):
                ConfigLoader._check_known_keys(defaults[key], value, f"{prefix}{key}.")
