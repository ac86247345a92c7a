"""Command-line entrypoint: simulate, estimate, map, identify, full pipeline and database tools."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from pydantic import ValidationError

from thzmap.channel import ChannelError, load_response, save_response
from thzmap.config import ConfigLoadError, Method, PipelineConfig, load_config
from thzmap.estimation import (
    EstimationError,
    compute_padp,
    load_estimates_csv,
    save_estimates_csv,
    save_padp_csv,
    to_cir,
)
from thzmap.mapping import MappingError, ranging_error, render_cloud_svg, save_cloud_csv
from thzmap.materials import (
    MaterialCategory,
    MaterialDb,
    MaterialError,
    db_load,
    db_save,
    identify_material,
    load_tds_trace,
    record_from_tds,
    seed_database,
)
from thzmap.pipeline import (
    NumericalFailure,
    build_map,
    estimate,
    identification_payload,
    identify_surfaces,
    load_materials,
    load_pattern,
    path_counts,
    run_pipeline,
    simulate,
    write_json,
)
from thzmap.scene import SceneError, load_scene, scene_hash

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
INPUT_ERRORS = (ConfigLoadError, SceneError, MaterialError, ValidationError)
NUMERICAL_ERRORS = (NumericalFailure, EstimationError, ChannelError, MappingError)


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except INPUT_ERRORS as exc:
        print(f"error: {_describe(exc)}", file=sys.stderr)
        return EXIT_INPUT
    except NUMERICAL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thzmap", description="300 GHz monostatic sensing toolkit.")
    parser.add_argument("--log-level", default="WARNING", choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    commands = parser.add_subparsers(dest="command", required=True)

    simulate_parser = commands.add_parser("simulate", help="Synthesize the channel response of a scene")
    _add_run_options(simulate_parser)
    simulate_parser.set_defaults(handler=cmd_simulate)

    estimate_parser = commands.add_parser("estimate", help="Estimate paths from a response file")
    _add_run_options(estimate_parser)
    estimate_parser.add_argument("--response", required=True, help="Channel response .bin file")
    estimate_parser.set_defaults(handler=cmd_estimate)

    map_parser = commands.add_parser("map", help="Build and score a map from an estimates file")
    _add_run_options(map_parser)
    map_parser.add_argument("--estimates", required=True, help="Estimates CSV")
    map_parser.add_argument("--cutoff-db", type=float, help="Drop estimates weaker than this power")
    map_parser.set_defaults(handler=cmd_map)

    identify_parser = commands.add_parser("identify", help="Identify materials of tagged walls")
    _add_run_options(identify_parser)
    identify_parser.add_argument("--response", required=True, help="Channel response .bin file")
    identify_parser.add_argument("--estimates", required=True, help="SAGE estimates CSV")
    identify_parser.set_defaults(handler=cmd_identify)

    pipeline_parser = commands.add_parser("pipeline", help="Run the full simulate-estimate-map-identify flow")
    _add_run_options(pipeline_parser)
    pipeline_parser.set_defaults(handler=cmd_pipeline)

    db_parser = commands.add_parser("db", help="Material database tools")
    db_commands = db_parser.add_subparsers(dest="db_command", required=True)

    db_import = db_commands.add_parser("import", help="Merge a CSV database into the target database")
    db_import.add_argument("source", help="CSV file to import")
    db_import.add_argument("--db", required=True, help="Target database CSV (created when missing)")
    db_import.set_defaults(handler=cmd_db_import)

    db_tds = db_commands.add_parser("import-tds", help="Add a record measured from TDS traces")
    db_tds.add_argument("--name", required=True)
    db_tds.add_argument("--category", required=True, choices=[category.value for category in MaterialCategory])
    db_tds.add_argument("--sample", required=True, help="Sample trace CSV (t_s,e_field)")
    db_tds.add_argument("--reference", required=True, help="Mirror reference trace CSV (t_s,e_field)")
    db_tds.add_argument("--f", dest="frequencies", type=float, nargs="+", default=[300e9], help="Frequencies in Hz")
    db_tds.add_argument("--db", required=True, help="Target database CSV (created when missing)")
    db_tds.set_defaults(handler=cmd_db_import_tds)

    db_query = db_commands.add_parser("query", help="Rank materials by reflection loss")
    db_query.add_argument("--rl", type=float, required=True, help="Reflection loss in dB")
    db_query.add_argument("--f", dest="frequency", type=float, default=300e9, help="Query frequency in Hz")
    db_query.add_argument("--db", help="Database CSV (bundled values when omitted)")
    db_query.set_defaults(handler=cmd_db_query)

    db_list = db_commands.add_parser("list", help="List database records")
    db_list.add_argument("--db", help="Database CSV (bundled values when omitted)")
    db_list.set_defaults(handler=cmd_db_list)
    return parser


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default="config/default.yaml", help="Pipeline config path")
    parser.add_argument("--env-file", default=".env", help="Optional env file for ${VAR} tokens")
    parser.add_argument("--seed", type=int, help="Override the run seed")
    parser.add_argument(
        "--method",
        action="append",
        choices=[method.value for method in Method],
        help="Method to run (repeatable; overrides the config)",
    )
    parser.add_argument("--output", help="Output directory (overrides the config)")


def _resolve_config(args: argparse.Namespace) -> PipelineConfig:
    config = load_config(args.config, args.env_file)
    updates: dict[str, object] = {}
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigLoadError("--seed must be >= 0")
        updates["seed"] = args.seed
    if args.method:
        updates["methods"] = tuple(dict.fromkeys(Method(value) for value in args.method))
    if args.output:
        updates["output_dir"] = args.output
    return config.model_copy(update=updates) if updates else config


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    scene = load_scene(config.scene_path)
    simulation = simulate(scene, config, load_materials(config), load_pattern(config, scene))
    out = Path(config.output_dir)
    target = save_response(
        simulation.response,
        out / "response.bin",
        {"seed": simulation.noise.seed, "scene_hash": scene_hash(scene)},
    )
    counts = path_counts(simulation.paths)
    print(f"wrote {target} ({simulation.response.n_freq} x {simulation.response.n_scan})")
    for kind, count in counts.items():
        print(f"{kind}: {count}")
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    scene = load_scene(config.scene_path)
    response, _ = load_response(args.response)
    pattern = load_pattern(config, scene)
    out = Path(config.output_dir)
    save_padp_csv(compute_padp(to_cir(response, config.window)), out / "padp.csv")
    for method in _estimation_methods(config):
        estimates, cutoff_db = estimate(response, scene, config, method, pattern)
        target = save_estimates_csv(estimates, out / f"estimates_{method.value}.csv")
        print(f"{method.value}: {len(estimates)} estimates (map cutoff {cutoff_db:.1f} dB) -> {target}")
    return EXIT_OK


def cmd_map(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    scene = load_scene(config.scene_path)
    estimates = load_estimates_csv(args.estimates)
    cutoff_db = args.cutoff_db if args.cutoff_db is not None else float("-inf")
    out = Path(config.output_dir)
    ranging = {}
    for method in config.methods:
        cloud, arcs = build_map(estimates, scene, config, method, cutoff_db)
        report = ranging_error(cloud, scene)
        ranging[method.value] = report.model_dump(mode="json")
        save_cloud_csv(cloud, out / f"map_{method.value}.csv")
        render_cloud_svg(cloud, scene, out / f"map_{method.value}.svg", title=method.value)
        print(f"{method.value}: MDE {report.mde_cm:.2f} cm, RMSE {report.rmse_cm:.2f} cm, arcs {len(arcs)}")
    write_json(out / "ranging.json", ranging)
    return EXIT_OK


def cmd_identify(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    scene = load_scene(config.scene_path)
    response, _ = load_response(args.response)
    estimates = load_estimates_csv(args.estimates)
    results = identify_surfaces(
        response, estimates, scene, config, load_materials(config), load_pattern(config, scene)
    )
    payload = [identification_payload(item) for item in results]
    write_json(Path(config.output_dir) / "identification.json", payload)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_pipeline(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    out = Path(config.output_dir)
    started = datetime.now(timezone.utc)
    report = run_pipeline(config, out)
    write_json(
        out / "run_meta.json",
        {"started_at": started.isoformat(), "finished_at": datetime.now(timezone.utc).isoformat()},
    )
    for method, ranging in report.ranging.items():
        print(
            f"{method}: MDE {ranging.mde_cm:.2f} cm, RMSE {ranging.rmse_cm:.2f} cm, "
            f"points {ranging.n_points}, removed {ranging.n_removed}"
        )
    for item in report.identifications:
        print(f"{item.wall_id} ({item.tag}): RL {item.rl_db:.2f} dB -> {item.match.best.name}")
    return EXIT_OK


def cmd_db_import(args: argparse.Namespace) -> int:
    incoming = db_load(args.source)
    target = Path(args.db)
    merged = _load_or_empty(target).merged(incoming)
    db_save(merged, target)
    print(f"imported {len(incoming)} materials into {target} ({len(merged)} total)")
    return EXIT_OK


def cmd_db_import_tds(args: argparse.Namespace) -> int:
    record = record_from_tds(
        args.name,
        args.category,
        load_tds_trace(args.sample),
        load_tds_trace(args.reference),
        args.frequencies,
    )
    target = Path(args.db)
    merged = _load_or_empty(target).merged(MaterialDb(records=(record,)))
    db_save(merged, target)
    print(json.dumps(record.model_dump(mode="json"), sort_keys=True))
    return EXIT_OK


def cmd_db_query(args: argparse.Namespace) -> int:
    db = db_load(args.db) if args.db else seed_database()
    result = identify_material(args.rl, db, args.frequency)
    print(json.dumps(result.model_dump(mode="json"), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_db_list(args: argparse.Namespace) -> int:
    db = db_load(args.db) if args.db else seed_database()
    for record in db.records:
        samples = ", ".join(f"{frequency / 1e9:g} GHz: {loss:g} dB" for frequency, loss in record.rl_db_at)
        print(f"{record.name} [{record.category.value}] {samples}")
    return EXIT_OK


def _estimation_methods(config: PipelineConfig) -> tuple[Method, ...]:
    methods = []
    for method in config.methods:
        base = Method.SAGE if method is Method.SAGE_PLUS_REMOVAL else method
        if base not in methods:
            methods.append(base)
    return tuple(methods)


def _load_or_empty(path: Path) -> MaterialDb:
    return db_load(path) if path.exists() else MaterialDb()


def _describe(exc: Exception) -> str:
    if isinstance(exc, ValidationError):
        return f"validation failed: {exc.errors()[0]['msg']}"
    cause = exc.__cause__
    if isinstance(exc, ConfigLoadError) and isinstance(cause, ValidationError):
        first = cause.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        return f"{exc}: {location}: {first['msg']}"
    return str(exc)


if __name__ == "__main__":
    raise SystemExit(main())
