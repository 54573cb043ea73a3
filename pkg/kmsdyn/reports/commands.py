"""
The six subcommands. Each returns a CommandResult; writing it out is left to
:func:`emit` so that commands stay testable without touching the disk.
"""

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from ..config.options import JULIA
from ..config.run_config import RunConfig
from ..errors import ConfigError, InconclusiveError, OutputError, UnsupportedClassification
from ..kms.census import KMSCensus, kms_census
from ..kms.cocycle import CocycleSpec, Conformal, Gauge, Generalized
from ..kms.conformality import Notion, conformality_residual
from ..kms.isotropy import isotropy_class, orbit_consistent
from ..orbits.forward import analyze_orbit, classify_cycle, julia_membership, val_infinity
from ..sphere.parser import compile_weight, parse_point, parse_real
from ..thermo.eigenmeasure import conformal_eigenmeasure
from ..thermo.lyubich import lyubich_measure
from ..thermo.pressure import BowenEstimate, PressureSampler, bowen_dimension
from ..utils.file_operations import csv_text, dumps_json, write_bytes
from ..utils.logging import get_logger
from . import render, serialize

logger = get_logger("kmsdyn_commands")

EXIT_OK = 0
EXIT_INCONCLUSIVE = InconclusiveError.exit_code
EXIT_UNSUPPORTED = UnsupportedClassification.exit_code


@dataclass
class CommandResult:
    """Output of a command.

    ``payload`` is a JSON document (dict), CSV text or PNG/binary bytes.
    ``attachments`` maps a file suffix to extra bytes written beside ``--out``.
    """

    kind: str
    format: str
    payload: dict[str, Any] | str | bytes
    exit_code: int = EXIT_OK
    attachments: dict[str, bytes] = field(default_factory=dict)

    def encoded(self) -> bytes:
        if isinstance(self.payload, dict):
            try:
                return dumps_json(self.payload).encode("utf-8")
            except (TypeError, ValueError) as e:
                raise OutputError(f"{self.kind} report is not JSON-serializable: {e}") from e
        if isinstance(self.payload, str):
            return self.payload.encode("utf-8")
        return self.payload


def _format(config: RunConfig, default: str, allowed: Sequence[str]) -> str:
    fmt = config.format or default
    if fmt not in allowed:
        raise ConfigError(f"this command writes {', '.join(allowed)}, not {fmt}")
    return fmt


def parse_action(text: str, config: RunConfig) -> CocycleSpec:
    """``gauge`` | ``conformal`` | ``potential:<expr>``."""
    lowered = text.strip().lower()
    if lowered == "gauge":
        return Gauge()
    if lowered == "conformal":
        return Conformal(metric=config.build_metric())
    if lowered.startswith("potential:"):
        body = text.split(":", 1)[1].strip()
        return Generalized(compile_weight(body, config.params), label=body)
    raise ConfigError(f"unknown action {text!r}; expected gauge, conformal or potential:<expr>")


def parse_betas(items: Sequence[str]) -> list[float]:
    betas = [parse_real(item) for item in items]
    if not betas:
        raise ConfigError("at least one beta is required")
    if any(beta == 0 for beta in betas):
        raise ConfigError("beta must be non-zero")
    return betas


# ----------------------------------------------------------------------
# classify
# ----------------------------------------------------------------------


def cmd_classify(config: RunConfig, point_text: str) -> CommandResult:
    """Orbit verdict, cycle class, isotropy, consistency and VAL_inf at one point."""
    _format(config, "json", ("json",))
    map = config.rational_map
    x = parse_point(point_text, config.params)
    record = analyze_orbit(map, x, config.horizon, config.tol)
    iso = isotropy_class(map, x, config.horizon)
    inconclusive = record.ambiguous or iso.inconclusive

    try:
        consistent = orbit_consistent(map, x, config.horizon, Conformal(metric=config.build_metric()))
    except InconclusiveError as error:
        logger.warning(f"Consistency at {x} undecided: {error}")
        consistent, inconclusive = None, True

    val_inf = None
    if not record.is_pre_periodic:
        try:
            val_inf = val_infinity(map, x, config.horizon)
        except InconclusiveError as error:
            logger.warning(f"VAL_inf at {x} undecided: {error}")
            inconclusive = True

    document = {
        **serialize.header(config, "classify"),
        "point": serialize.point(x),
        "orbit": serialize.orbit_document(record),
        "preperiod": record.verdict.preperiod if record.is_pre_periodic else None,
        "period": record.verdict.period if record.is_pre_periodic else None,
        "cycle": classify_cycle(record).value if record.is_pre_periodic else None,
        "isotropy": iso.label,
        "isotropy_detail": serialize.isotropy_document(iso),
        "consistent": consistent,
        "VAL_inf": val_inf,
        "julia": serialize.julia_document(julia_membership(map, x, config.horizon)),
        "inconclusive": inconclusive,
    }
    return CommandResult("classify", "json", document, EXIT_INCONCLUSIVE if inconclusive else EXIT_OK)


# ----------------------------------------------------------------------
# census and phase diagram
# ----------------------------------------------------------------------


def _census_series(config: RunConfig, betas: Sequence[float], spec: CocycleSpec):
    """One census per beta, sharing the dimension estimate between them."""
    map = config.rational_map
    hd: BowenEstimate | None = None
    results: list[KMSCensus | UnsupportedClassification] = []
    for beta in betas:
        try:
            census = kms_census(
                map,
                config.region_tag,
                beta,
                spec,
                config.assumptions,
                horizon=config.horizon,
                depth=config.depth,
                hd=hd,
                seed=config.seed,
            )
        except UnsupportedClassification as error:
            results.append(error)
            continue
        hd = census.hd or hd
        results.append(census)
    return results, hd


def cmd_census(config: RunConfig, beta_texts: Sequence[str], action: str = "gauge") -> CommandResult:
    _format(config, "json", ("json",))
    betas = parse_betas(beta_texts)
    spec = parse_action(action, config)
    results, hd = _census_series(config, betas, spec)

    entries, unsupported = [], False
    for beta, result in zip(betas, results):
        if isinstance(result, UnsupportedClassification):
            unsupported = True
            entries.append(serialize.unsupported_document(beta, result))
        else:
            entries.append(serialize.census_document(result))
    document = {
        **serialize.header(config, "census"),
        "action": action,
        "hd": serialize.bowen_document(hd),
        "censuses": entries,
        "totals": [entry.get("total") for entry in entries],
    }
    return CommandResult("census", "json", document, EXIT_UNSUPPORTED if unsupported else EXIT_OK)


def phase_grid(lo: float, hi: float, steps: int) -> np.ndarray:
    if steps < 1:
        raise ConfigError("steps must be at least 1")
    if steps > 1 and not hi > lo:
        raise ConfigError("the beta range needs lo < hi")
    return np.linspace(lo, hi, steps)


def cmd_phase_diagram(config: RunConfig, lo: float, hi: float, steps: int) -> CommandResult:
    """Conformal census counts over a beta grid with the dimension band."""
    fmt = _format(config, "csv", ("csv", "png"))
    betas = [float(b) for b in phase_grid(lo, hi, steps)]
    if any(b == 0 for b in betas):
        raise ConfigError("the beta grid must avoid 0")
    results, hd = _census_series(config, betas, Conformal(metric=config.build_metric()))
    failures = [r for r in results if isinstance(r, UnsupportedClassification)]
    if failures:
        raise failures[0]

    rows = [
        (b, c.total, c.atomic_count, c.nonatomic_count, hd.value, hd.error)
        for b, c in zip(betas, results)
    ]
    plot = render.plot_phase_diagram(betas, [c.total for c in results], hd, f"{config.map_spec} {config.params}")
    if fmt == "png":
        return CommandResult("phase-diagram", "png", plot)
    text = csv_text(
        ("beta", "extremal_count", "atomic_count", "nonatomic_count", "hd", "hd_error"),
        rows,
        serialize.preamble(config, "phase-diagram", rigorous=int(hd.rigorous)),
    )
    return CommandResult("phase-diagram", "csv", text, attachments={".png": plot})


# ----------------------------------------------------------------------
# julia, pressure, measure
# ----------------------------------------------------------------------


def cmd_julia(config: RunConfig, resolution: int | None = None) -> CommandResult:
    _format(config, "png", ("png",))
    resolution = JULIA.resolution if resolution is None else resolution
    image = render.render_julia(config.rational_map, resolution, rng=np.random.default_rng(config.seed))
    return CommandResult("julia", "png", image)


def cmd_pressure(config: RunConfig, delta_texts: Sequence[str], estimator: str | None = None) -> CommandResult:
    """Pressure samples and the Bowen root.

    Non-monotone samples are flagged and give exit code 3, as does a root
    that cannot be bracketed.
    """
    fmt = _format(config, "csv", ("csv", "png"))
    deltas = [parse_real(t) for t in delta_texts]
    if not deltas:
        raise ConfigError("at least one delta is required")
    map = config.rational_map
    metric = config.build_metric()
    sampler = PressureSampler(map, config.depth, metric, rng=np.random.default_rng(config.seed))
    curve = sampler.curve(deltas, estimator)

    exit_code = EXIT_OK if curve.monotone else EXIT_INCONCLUSIVE
    root = None
    if curve.monotone:
        try:
            root = bowen_dimension(map, depth=config.depth, metric=metric, rng=np.random.default_rng(config.seed))
        except InconclusiveError as error:
            logger.warning(f"No Bowen root: {error}")
            exit_code = EXIT_INCONCLUSIVE

    violations = set(curve.violations)
    rows = [
        (s.delta, s.value, s.error, s.depth, int(i in violations or s.low_confidence))
        for i, s in enumerate(curve.samples)
    ]
    extra = {"estimator": curve.samples[0].estimator, "monotone": int(curve.monotone)}
    if root is not None:
        extra.update(root=repr(root.value), root_error=repr(root.error), rigorous=int(root.rigorous))
    else:
        extra["root"] = "none"
    plot = render.plot_pressure(curve, root, config.map_spec)
    if fmt == "png":
        return CommandResult("pressure", "png", plot, exit_code)
    text = csv_text(
        ("delta", "pressure", "error", "depth", "flag"), rows, serialize.preamble(config, "pressure", **extra)
    )
    return CommandResult("pressure", "csv", text, exit_code, attachments={".png": plot})


def cmd_measure(config: RunConfig, kind: str = "lyubich", delta_text: str | None = None) -> CommandResult:
    """A Lyubich or eigenmeasure cloud as CSV or the binary cloud format.

    The CSV preamble carries the ordinary (eigenmeasure) or Jacobian
    (Lyubich, ``e^beta`` with ``beta = log d``) conformality residual.
    """
    fmt = _format(config, "csv", ("csv", "bin"))
    map = config.rational_map
    rng = np.random.default_rng(config.seed)
    metric = config.build_metric()
    if kind == "lyubich":
        measure = lyubich_measure(map, config.depth, rng=rng)
        report = conformality_residual(measure, map, float(np.log(map.degree)), Notion.JACOBIAN)
    elif kind == "eigenmeasure":
        if delta_text is None:
            raise ConfigError("the eigenmeasure needs --delta")
        delta = parse_real(delta_text)
        measure = conformal_eigenmeasure(map, delta, config.depth, rng=rng, metric=metric)
        report = conformality_residual(measure, map, delta, Notion.ORDINARY, metric=metric)
    else:
        raise ConfigError(f"unknown measure {kind!r}; expected lyubich or eigenmeasure")

    exit_code = EXIT_OK if measure.converged else EXIT_INCONCLUSIVE
    if fmt == "bin":
        return CommandResult("measure", "bin", measure.to_binary(), exit_code)
    lines = serialize.cloud_preamble(config, measure)
    lines += [f"max_residual={report.max_residual!r}", f"residual_notion={report.notion.value}"]
    return CommandResult("measure", "csv", measure.to_csv(lines), exit_code)


# ----------------------------------------------------------------------
# output
# ----------------------------------------------------------------------


def emit(result: CommandResult, config: RunConfig) -> Path | None:
    """Writes the result to ``--out`` (plus attachments) or to standard output."""
    if config.out is None:
        if isinstance(result.payload, bytes):
            raise ConfigError(f"{result.format} output needs --out")
        sys.stdout.write(result.encoded().decode("utf-8"))
        return None
    path = write_bytes(result.encoded(), config.out)
    for suffix, payload in result.attachments.items():
        write_bytes(payload, path.with_suffix(suffix))
    return path


__all__ = [
    "CommandResult",
    "cmd_census",
    "cmd_classify",
    "cmd_julia",
    "cmd_measure",
    "cmd_phase_diagram",
    "cmd_pressure",
    "emit",
    "parse_action",
    "parse_betas",
    "phase_grid",
]
