"""End-to-end run: simulate, estimate, map, score and identify."""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import scipy
from pydantic import Field
from scipy.constants import c as SPEED_OF_LIGHT

import thzmap
from thzmap.channel import (
    AntennaPattern,
    ChannelResponse,
    GaussianPattern,
    GroundTruthPath,
    PathKind,
    SimNoiseConfig,
    TabulatedPattern,
    enumerate_paths,
    noise_for_snr,
    normalized_gain,
    save_response,
    synthesize_response,
)
from thzmap.config import Method, PipelineConfig
from thzmap.estimation import (
    MpcEstimate,
    SageTrace,
    compute_padp,
    delay_domain_floor,
    estimate_noise_floor,
    max_search_baseline,
    peak_noise_floor,
    sage_estimate,
    save_estimates_csv,
    save_padp_csv,
    to_cir,
)
from thzmap.mapping import (
    ArcModel,
    MapCloud,
    RangingReport,
    arcs_for_scene,
    detect_spurious_arcs,
    mpcs_to_points,
    ranging_error,
    remove_spurious,
    render_cloud_svg,
    save_cloud_csv,
)
from thzmap.materials import (
    MatchResult,
    MaterialDb,
    db_load,
    extract_reflection_loss,
    identify_material,
    seed_database,
)
from thzmap.models.base import DomainModel
from thzmap.scene import Scene, load_scene, nearest_wall_indices, scene_hash
from thzmap.scene.geometry import nearest_surface_distances

logger = logging.getLogger(__name__)


class NumericalFailure(RuntimeError):
    """Raised when a run produces nothing that can be mapped or scored."""


class Provenance(DomainModel):
    config_hash: str
    scene_hash: str
    seed: int
    versions: dict[str, str]


class SurfaceIdentification(DomainModel):
    wall_id: str
    tag: str
    rl_db: float
    match: MatchResult


class RunReport(DomainModel):
    ranging: dict[str, RangingReport]
    identifications: tuple[SurfaceIdentification, ...] = ()
    path_counts: dict[str, int] = Field(default_factory=dict)
    provenance: Provenance


@dataclass(frozen=True)
class Simulation:
    response: ChannelResponse
    paths: tuple[GroundTruthPath, ...]
    noise: SimNoiseConfig


@dataclass(frozen=True)
class MethodResult:
    method: Method
    estimates: tuple[MpcEstimate, ...]
    cloud: MapCloud
    arcs: tuple[ArcModel, ...]
    ranging: RangingReport


def config_hash(config: PipelineConfig) -> str:
    """Hash of the settings that shape results; the output location is excluded."""
    payload = json.dumps(config.model_dump(mode="json", exclude={"output_dir"}), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def versions() -> dict[str, str]:
    return {"thzmap": thzmap.__version__, "numpy": np.__version__, "scipy": scipy.__version__}


def load_pattern(config: PipelineConfig, scene: Scene) -> AntennaPattern:
    if config.pattern_path is not None:
        return TabulatedPattern.from_csv(config.pattern_path)
    return GaussianPattern(scene.trx)


def load_materials(config: PipelineConfig) -> MaterialDb:
    return db_load(config.db_path) if config.db_path is not None else seed_database()


def simulate(scene: Scene, config: PipelineConfig, db: MaterialDb, pattern: AntennaPattern) -> Simulation:
    paths = tuple(
        enumerate_paths(
            scene,
            db,
            spacing_m=config.simulation.scatter_spacing_m,
            falloff_exponent=config.simulation.falloff_exponent,
        )
    )
    if config.noise.floor_db is not None:
        noise = SimNoiseConfig(noise_floor_dbm_per_point=config.noise.floor_db, seed=config.noise_seed)
    elif config.noise.snr_db is not None:
        noise = noise_for_snr(paths, config.noise.snr_db, config.noise_seed)
    else:
        noise = SimNoiseConfig(seed=config.noise_seed)
    response = synthesize_response(paths, scene.grid, scene.trx, noise, pattern)
    return Simulation(response=response, paths=paths, noise=noise)


def path_counts(paths: tuple[GroundTruthPath, ...]) -> dict[str, int]:
    return {kind.value: sum(1 for path in paths if path.kind is kind) for kind in PathKind}


def noise_floor(response: ChannelResponse) -> float:
    """Per-sample floor estimated from the rectangular-window PADP."""
    return estimate_noise_floor(compute_padp(to_cir(response)))


def sage_cutoff(response: ChannelResponse, config: PipelineConfig, floor_db: float) -> float:
    return delay_domain_floor(floor_db, 1.0 / response.n_freq) + config.mapping.power_margin_db


def estimate(
    response: ChannelResponse,
    scene: Scene,
    config: PipelineConfig,
    method: Method,
    pattern: AntennaPattern,
) -> tuple[list[MpcEstimate], float]:
    """Estimates for ``method`` and the power cutoff (dB) used to map them."""
    floor_db = noise_floor(response)
    if method is Method.MAX_SEARCH:
        padp = compute_padp(to_cir(response, config.window))
        # each scan keeps its strongest bin, so noise alone already sits above the bin mean
        peak_db = peak_noise_floor(floor_db, padp.noise_gain, padp.p_db.shape[0])
        cutoff_db = peak_db + config.mapping.power_margin_db
        return max_search_baseline(padp, scene.trx), cutoff_db
    trace = SageTrace()
    estimates = sage_estimate(response, scene.trx, config.sage, pattern, noise_floor_db=floor_db, trace=trace)
    logger.info(
        "%s: %d paths after %d EM iterations (%s)", method.value, len(estimates), trace.em_iterations, trace.stop_reason
    )
    return estimates, sage_cutoff(response, config, floor_db)


def build_map(
    estimates: list[MpcEstimate],
    scene: Scene,
    config: PipelineConfig,
    method: Method,
    cutoff_db: float,
) -> tuple[MapCloud, tuple[ArcModel, ...]]:
    cloud = mpcs_to_points(estimates, scene.trx, power_cutoff_db=cutoff_db)
    if len(cloud) == 0:
        raise NumericalFailure(f"{method.value}: no paths above the {cutoff_db:.1f} dB threshold")
    if method is not Method.SAGE_PLUS_REMOVAL:
        return cloud, ()
    mapping = config.mapping
    if mapping.arc_mode == "known":
        arcs = arcs_for_scene(scene, mapping.corner_half_span_deg)
    else:
        arcs = detect_spurious_arcs(cloud, mapping.min_span_deg, mapping.radial_bin_cm, scene.trx.hpbw_deg)
    cleaned = remove_spurious(cloud, arcs, mapping.tolerance_cm, scene.trx.hpbw_deg)
    return cleaned, tuple(arcs)


def run_method(
    response: ChannelResponse,
    scene: Scene,
    config: PipelineConfig,
    method: Method,
    pattern: AntennaPattern,
    sage_estimates: list[MpcEstimate] | None = None,
) -> MethodResult:
    """Run one method; SAGE estimates already computed for the response are reused."""
    if method is not Method.MAX_SEARCH and sage_estimates is not None:
        estimates = sage_estimates
        cutoff_db = sage_cutoff(response, config, noise_floor(response))
    else:
        estimates, cutoff_db = estimate(response, scene, config, method, pattern)
    cloud, arcs = build_map(estimates, scene, config, method, cutoff_db)
    report = ranging_error(cloud, scene)
    logger.info(
        "%s: MDE %.2f cm, RMSE %.2f cm over %d points", method.value, report.mde_cm, report.rmse_cm, report.n_points
    )
    return MethodResult(method=method, estimates=tuple(estimates), cloud=cloud, arcs=arcs, ranging=report)


def identify_surfaces(
    response: ChannelResponse,
    estimates: list[MpcEstimate],
    scene: Scene,
    config: PipelineConfig,
    db: MaterialDb,
    pattern: AntennaPattern,
) -> tuple[SurfaceIdentification, ...]:
    """Match each tagged wall's strongest associated echo against the database."""
    settings = config.identification
    tagged = scene.tagged_walls()
    if not settings.enabled or not tagged or not estimates:
        return ()
    cloud = mpcs_to_points(estimates, scene.trx)
    positions = cloud.positions()
    nearest = nearest_wall_indices(positions, scene)
    distances = nearest_surface_distances(positions, scene)
    wall_index = {wall.id: index for index, wall in enumerate(scene.walls)}

    results = []
    for wall in tagged:
        members = np.flatnonzero((nearest == wall_index[wall.id]) & (distances <= settings.association_cm / 100.0))
        if members.size == 0:
            logger.warning("no echo associated with tagged wall %s", wall.id)
            continue
        strongest = max((cloud.points[index].source for index in members), key=lambda item: item.power_db)
        refined = refine_peak(response, strongest, scene, settings.peak_oversampling, pattern)
        rl_db = extract_reflection_loss(refined, scene.trx, scene.grid.center)
        match = identify_material(rl_db, db, settings.f_query_hz)
        logger.info("wall %s (%s): RL %.2f dB, best match %s", wall.id, wall.tag, rl_db, match.best.name)
        results.append(SurfaceIdentification(wall_id=wall.id, tag=wall.tag or "", rl_db=rl_db, match=match))
    return tuple(results)


def refine_peak(
    response: ChannelResponse,
    estimate: MpcEstimate,
    scene: Scene,
    oversampling: int,
    pattern: AntennaPattern,
) -> MpcEstimate:
    """Amplitude and delay of an echo from the oversampled CIR of its closest scan."""
    scans = response.scan_angles_rad
    offsets = np.angle(np.exp(1j * (estimate.theta - scans)))
    scan = int(np.argmin(np.abs(offsets)))
    radius = scene.trx.uca_radius
    array_delay = 2.0 * radius * math.cos(offsets[scan]) / SPEED_OF_LIGHT
    centre = estimate.tau - array_delay
    step = response.grid.delay_bin / oversampling
    delays = centre + step * np.arange(-oversampling, oversampling + 1)
    steering = np.exp(2j * math.pi * np.outer(delays, response.frequencies()))
    magnitudes = np.abs(steering @ response.h[:, scan]) / response.n_freq
    best = int(np.argmax(magnitudes))
    gain = float(normalized_gain(pattern, offsets[scan]))
    return MpcEstimate.of(magnitudes[best] / gain, delays[best] + array_delay, estimate.theta)


def run_pipeline(config: PipelineConfig, output_dir: str | Path | None = None) -> RunReport:
    out = Path(output_dir or config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    scene = load_scene(config.scene_path)
    db = load_materials(config)
    pattern = load_pattern(config, scene)

    simulation = simulate(scene, config, db, pattern)
    response = simulation.response
    provenance = Provenance(
        config_hash=config_hash(config),
        scene_hash=scene_hash(scene),
        seed=config.seed,
        versions=versions(),
    )
    sidecar = {"seed": simulation.noise.seed, "scene_hash": provenance.scene_hash}
    save_response(response, out / "response.bin", sidecar)
    save_padp_csv(compute_padp(to_cir(response, config.window)), out / "padp.csv")

    results: dict[Method, MethodResult] = {}
    sage_estimates: list[MpcEstimate] | None = None
    for method in config.methods:
        result = run_method(response, scene, config, method, pattern, sage_estimates)
        if method is not Method.MAX_SEARCH:
            sage_estimates = list(result.estimates)
        results[method] = result
        save_estimates_csv(result.estimates, out / f"estimates_{method.value}.csv")
        save_cloud_csv(result.cloud, out / f"map_{method.value}.csv")
        render_cloud_svg(result.cloud, scene, out / f"map_{method.value}.svg", title=method.value)

    if sage_estimates is None and config.identification.enabled and scene.tagged_walls():
        sage_estimates = sage_estimate(response, scene.trx, config.sage, pattern, noise_floor_db=noise_floor(response))
    identifications = identify_surfaces(response, sage_estimates or [], scene, config, db, pattern)

    report = RunReport(
        ranging={method.value: result.ranging for method, result in results.items()},
        identifications=identifications,
        path_counts=path_counts(simulation.paths),
        provenance=provenance,
    )
    write_json(out / "ranging.json", {key: value.model_dump(mode="json") for key, value in report.ranging.items()})
    write_json(out / "identification.json", [identification_payload(item) for item in identifications])
    write_json(out / "report.json", report.model_dump(mode="json"))
    logger.info("run artifacts written to %s", out)
    return report


def identification_payload(item: SurfaceIdentification) -> dict[str, Any]:
    match = item.match
    return {
        "wall_id": item.wall_id,
        "tag": item.tag,
        "query_rl_db": match.query_rl_db,
        "f_hz": match.f_hz,
        "ranked": [{"name": entry.name, "delta_db": entry.delta_db} for entry in match.ranked],
        "confidence_margin_db": match.confidence_margin_db,
    }


def write_json(path: Path, payload: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
