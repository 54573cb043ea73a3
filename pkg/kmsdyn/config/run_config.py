"""
Run configuration shared by every command.
"""

import hashlib
import json
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import asdict, dataclass, field, fields, replace
from functools import cached_property
from importlib import resources
from typing import Any

from ..errors import ConfigError
from ..orbits.records import Assumptions, RegionTag
from ..sphere.metric import MetricSpec, parse_metric
from ..sphere.parser import compile_weight, parse_map
from ..sphere.rational import RationalMap
from ..utils.logging import get_logger

logger = get_logger("kmsdyn_config")

FORMATS = ("json", "csv", "png", "bin")

# Fields that do not change what is computed
_PRESENTATION = ("out", "format", "preset")


@dataclass
class RunConfig:
    map_spec: str
    params: dict[str, str] = field(default_factory=dict)
    metric: str = "auto"
    region: str = RegionTag.JULIA.value
    depth: int | None = None
    horizon: int | None = None
    tol: float | None = None
    assume_ce: bool = False
    assume_preperiodic_critical: bool = False
    seed: int = 0
    out: str | None = None
    format: str | None = None
    preset: str | None = None

    def __post_init__(self):
        if not self.map_spec or not self.map_spec.strip():
            raise ConfigError("a map specification is required (--map or --preset)")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError(f"tolerance must be positive, got {self.tol}")
        for name in ("depth", "horizon"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ConfigError(f"{name} must be non-negative, got {value}")
        if self.format is not None and self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}; expected one of {', '.join(FORMATS)}")
        try:
            RegionTag(self.region)
        except ValueError:
            raise ConfigError(f"unknown region {self.region!r}; expected julia or sphere") from None
        self.params = {str(k): str(v) for k, v in self.params.items()}

    # ------------------------------------------------------------------
    # Identity
    # ------------------------------------------------------------------

    def canonical(self) -> dict[str, Any]:
        """The fields that determine the computation, ready for JSON."""
        data = asdict(self)
        for name in _PRESENTATION:
            data.pop(name)
        data["params"] = dict(sorted(self.params.items()))
        return data

    @property
    def config_hash(self) -> str:
        text = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_preset(cls, name: str, **overrides) -> "RunConfig":
        presets = load_presets()
        if name not in presets:
            raise ConfigError(f"unknown preset {name!r}; available: {', '.join(sorted(presets))}")
        entry = dict(presets[name])
        values = {
            "map_spec": entry.pop("map", ""),
            "params": entry.pop("params", {}),
            "preset": name,
        }
        known = {f.name for f in fields(cls)}
        for key, value in entry.items():
            if key not in known:
                raise ConfigError(f"preset {name!r} has unknown key {key!r}")
            values[key] = value
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @classmethod
    def from_namespace(cls, args) -> "RunConfig":
        """Builds the configuration from parsed command-line flags.

        Flags given explicitly override the preset's values; ``--param``
        bindings are merged into the preset's.
        """
        params = parse_params(getattr(args, "param", None) or [])
        overrides = {
            "metric": args.metric,
            "region": args.region,
            "depth": args.depth,
            "horizon": args.horizon,
            "tol": args.tol,
            "seed": args.seed,
            "out": args.out,
            "format": args.format,
            "assume_ce": True if args.assume_ce else None,
            "assume_preperiodic_critical": True if args.assume_preperiodic_critical else None,
        }
        if args.preset:
            config = cls.from_preset(args.preset, **overrides)
            if args.map:
                config = replace(config, map_spec=args.map)
            return replace(config, params={**config.params, **params})
        return cls(map_spec=args.map or "", params=params, **{k: v for k, v in overrides.items() if v is not None})

    # ------------------------------------------------------------------
    # Derived objects
    # ------------------------------------------------------------------

    @cached_property
    def rational_map(self) -> RationalMap:
        return parse_map(self.map_spec, self.params)

    def build_metric(self) -> MetricSpec | None:
        return parse_metric(self.metric, lambda body: compile_weight(body, self.params))

    @property
    def region_tag(self) -> RegionTag:
        return RegionTag(self.region)

    @property
    def assumptions(self) -> Assumptions:
        return Assumptions(self.assume_ce, self.assume_preperiodic_critical)


def parse_params(items: list[str]) -> dict[str, str]:
    """``["c=i", "lam=0.3+0.9i"]`` to a binding dict."""
    params = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or not name.strip() or not value.strip():
            raise ConfigError(f"parameter binding {item!r} is not of the form name=value")
        params[name.strip()] = value.strip()
    return params


def load_presets() -> dict[str, dict[str, Any]]:
    text = resources.files("kmsdyn.config").joinpath("presets.toml").read_text(encoding="utf-8")
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        logger.error("Invalid presets file", exc_info=True)
        raise ConfigError(f"invalid presets file: {e}") from e
