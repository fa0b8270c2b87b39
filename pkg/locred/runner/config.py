"""Experiment configuration: pydantic models, file loaders and the key=value dialect.

Sources are merged lowest to highest: model defaults, the shipped
``locred/config.yaml``, ``LOCRED_OUTPUT_DIR``, a user file, CLI flags.
The environment variable is only a fallback for the output directory.
"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from locred.base.exceptions import ConfigError
from locred.decomposition.constants import DEFAULT_C_F
from locred.decomposition.subdomains import check_pu_geometry
from locred.enrichment.state import Algorithm, StoppingRule
from locred.runner.field_generators import FieldSpec, Rect, check_field_spec

logger = logging.getLogger(__name__)

SHIPPED_CONFIG = Path(__file__).resolve().parent.parent / "config.yaml"
OUTPUT_DIR_ENV = "LOCRED_OUTPUT_DIR"
RESULT_PREFIX = "result."
RECT_KEYS = {"kappa_rect": "kappa", "f_rect": "f"}
BACKGROUND_KEYS = {"kappa_background": "kappa", "f_background": "f"}
# settings that change how a run executes but not what it computes
EXECUTION_KEYS = ("output_dir", "threads")

DEFAULT_KAPPA = FieldSpec(background=1.0, rects=[
    Rect(x0=0.06, y0=0.24, x1=0.94, y1=0.28, value=1e5),
    Rect(x0=0.06, y0=0.48, x1=0.94, y1=0.52, value=1e5),
    Rect(x0=0.06, y0=0.72, x1=0.94, y1=0.76, value=1e5),
])
DEFAULT_F = FieldSpec(background=0.0, rects=[
    Rect(x0=0.10, y0=0.10, x1=0.20, y1=0.20, value=1e5),
    Rect(x0=0.70, y0=0.70, x1=0.80, y1=0.80, value=-1e5),
])


class ExperimentConfig(BaseModel):
    model_config = {"frozen": True}

    n_squares: int = Field(default=50, ge=1)
    subdomain_size: float = 0.2
    subdomain_step: float = 0.1
    algorithm: Literal["residual_based", "globally_coupled", "both"] = "both"
    kappa: FieldSpec = DEFAULT_KAPPA
    f: FieldSpec = DEFAULT_F
    tol_abs: float = Field(default=0.0, ge=0.0)
    tol_rel: Optional[float] = Field(default=1e-6, ge=0.0)
    max_iter: int = Field(default=600, ge=0)
    output_dir: str = "output"
    c_f: float = Field(default=DEFAULT_C_F, gt=0.0)
    threads: int = Field(default=1, ge=1)
    cpu_samples: int = Field(default=8, ge=0)
    coupled_dual_norms: bool = True

    @field_validator("tol_rel", mode="before")
    @classmethod
    def _none_token(cls, value):
        if isinstance(value, str) and value.strip().lower() in ("", "none"):
            return None
        return value

    @model_validator(mode="after")
    def _check_geometry(self):
        check_pu_geometry(self.n_squares, self.subdomain_size, self.subdomain_step)
        check_field_spec(self.kappa, self.n_squares, "kappa")
        check_field_spec(self.f, self.n_squares, "f")
        if self.kappa.background <= 0 or any(r.value <= 0 for r in self.kappa.rects):
            raise ConfigError("kappa values must be strictly positive")
        return self

    @property
    def stopping(self) -> StoppingRule:
        return StoppingRule(tol_abs=self.tol_abs, tol_rel=self.tol_rel, max_iter=self.max_iter)

    @property
    def algorithms(self) -> List[Algorithm]:
        if self.algorithm == "both":
            return [Algorithm.RESIDUAL_BASED, Algorithm.GLOBALLY_COUPLED]
        return [Algorithm(self.algorithm)]

    def to_flat(self, execution: bool = True) -> List[Tuple[str, str]]:
        """Ordered key=value pairs; reading them back gives an equal config."""
        pairs = []
        for name in type(self).model_fields:
            if name in ("kappa", "f"):
                spec: FieldSpec = getattr(self, name)
                pairs.append((f"{name}_background", _format(spec.background)))
                pairs += [(f"{name}_rect", r.to_text()) for r in spec.rects] or [(f"{name}_rect", "none")]
            elif execution or name not in EXECUTION_KEYS:
                pairs.append((name, _format(getattr(self, name))))
        return pairs

    def to_dict(self) -> Dict[str, str]:
        flat: Dict[str, str] = {}
        for key, value in self.to_flat():
            flat[key] = f"{flat[key]}; {value}" if key in flat else value
        return flat


def _format(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_key_values(text: str, source: str = "<config>") -> Dict[str, Any]:
    """Flat ``key=value`` lines; rectangle keys repeat, ``#`` starts a comment, ``result.*`` is skipped."""
    values: Dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key.startswith(RESULT_PREFIX):
            continue
        if key in RECT_KEYS:
            values.setdefault(key, []).append(value)
        elif key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key}")
        else:
            values[key] = value
    return values


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    if path.suffix in (".yaml", ".yml"):
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"invalid YAML in {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{path} must hold a mapping of config keys")
        for key in RECT_KEYS:
            if key in data and not isinstance(data[key], list):
                data[key] = [data[key]]
        return {k: v for k, v in data.items() if not str(k).startswith(RESULT_PREFIX)}
    return parse_key_values(text, str(path))


def _parse_rects(entries: List[Any]) -> List[Rect]:
    rects: List[Rect] = []
    for entry in entries:
        if entry is None or (isinstance(entry, str) and entry.strip().lower() == "none"):
            rects = []
            continue
        rects.append(Rect.parse(entry))
    return rects


def config_from_flat(flat: Mapping[str, Any]) -> ExperimentConfig:
    known = set(ExperimentConfig.model_fields) - {"kappa", "f"} | set(RECT_KEYS) | set(BACKGROUND_KEYS)
    unknown = sorted(set(flat) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")

    data: Dict[str, Any] = {k: v for k, v in flat.items() if k not in RECT_KEYS and k not in BACKGROUND_KEYS}
    try:
        for field_name, default in (("kappa", DEFAULT_KAPPA), ("f", DEFAULT_F)):
            background = flat.get(f"{field_name}_background", default.background)
            entries = flat.get(f"{field_name}_rect")
            rects = default.rects if entries is None else _parse_rects(entries)
            data[field_name] = FieldSpec(background=background, rects=rects)
        return ExperimentConfig(**data)
    except ValidationError as e:
        raise ConfigError(_validation_message(e)) from e


def _validation_message(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(p) for p in item["loc"])
        parts.append(f"{location}: {item['msg']}" if location else item["msg"])
    return "; ".join(parts)


def load_config(path: Optional[Union[str, Path]] = None, overrides: Optional[Mapping[str, Any]] = None,
                env: Optional[Mapping[str, str]] = None, shipped: Optional[Path] = SHIPPED_CONFIG) -> ExperimentConfig:
    """Resolve the configuration of one run; raises ConfigError before any compute."""
    merged: Dict[str, Any] = {}
    if shipped is not None and Path(shipped).exists():
        merged.update(read_config_file(shipped))
    if env and env.get(OUTPUT_DIR_ENV):
        merged["output_dir"] = env[OUTPUT_DIR_ENV]
    if path is not None:
        merged.update(read_config_file(path))
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    config = config_from_flat(merged)
    logger.debug(f"resolved config: {config.to_dict()}")
    return config


def dump_key_values(pairs: List[Tuple[str, str]]) -> str:
    return "".join(f"{key}={value}\n" for key, value in pairs)
