#!/usr/bin/env python3
"""
PPE Sizer command line
Synthetic data, face extraction, autoencoder training, latent exploration,
clustering into size groups and sizing of new scans.
"""

from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence
import argparse
import json
import logging
import sys

import numpy as np

try:
    from rich.console import Console
    from rich.table import Table
    RICH_AVAILABLE = True
except ImportError:
    RICH_AVAILABLE = False

from core import __version__
from core.config import Config, config as default_config
from core.errors import (
    ConfigError,
    DatasetError,
    MetadataError,
    PPESizerError,
    ShapeError,
    single_line,
)
from formats import (
    LatentTable,
    ensure_dir,
    list_scan_ids,
    load_dataset,
    read_checkpoint,
    read_latents,
    read_metadata,
    read_pcf,
    read_report,
    read_scan,
    write_checkpoint,
    write_distance_csv,
    write_latents,
    write_pcf,
    write_report,
    write_scan,
    write_scatter_csv,
    write_training_log,
)
from pipeline import PreprocessConfig, preprocess_directory, synth_dataset
from assignment import AuctionParams, point_cost
from nn import set_debug_checks
from vae import (
    PointCloudVAE,
    VaeConfig,
    decode,
    emd_details,
    encode,
    encode_many,
    factor_correlations,
    train,
)
from analysis import (
    assign_size,
    distance_to_mean_face,
    explore,
    find_report,
    scatter_svg,
    stratified_exemplars_detailed,
)
from .manifest import RunManifest, manifest_path_for, read_manifest, write_manifest

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
GROUP_BY_CHOICES = ('gender,race',)
# namespace keys that are not command parameters
_RUNTIME_KEYS = ('func', 'command', 'config_command')


def setup_logging(log_level: str = "INFO", log_file: Optional[str] = None):
    """Setup logging configuration"""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        Path(log_file).expanduser().parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, str(log_level).upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


def _console():
    return Console() if RICH_AVAILABLE else None


def _print_table(title: str, columns: Sequence[str], rows: Sequence[Sequence[Any]]):
    console = _console()
    if console is None:
        print(title)
        for row in rows:
            print("  " + "  ".join(str(v) for v in row))
        return
    table = Table(title=title)
    for column in columns:
        table.add_column(column)
    for row in rows:
        table.add_row(*[str(v) for v in row])
    console.print(table)


def _resolve(args: argparse.Namespace, name: str, settings: Config, key: str):
    """Flag value, or the config default; the resolved value is written back for the manifest"""
    value = getattr(args, name, None)
    if value is None:
        value = settings.get(key)
        setattr(args, name, value)
    return value


def _parse_floats(text: str, flag: str) -> List[float]:
    try:
        return [float(part) for part in str(text).split(',') if part.strip()]
    except ValueError:
        raise ConfigError(f"{flag} expects comma-separated numbers, got {text!r}")


def _parse_dims(text: str) -> tuple:
    dims = [int(v) for v in _parse_floats(text, "--dims")]
    if len(dims) != 2 or min(dims) < 0:
        raise ConfigError(f"--dims expects two non-negative indices, got {text!r}")
    return tuple(dims)


def _record(args: argparse.Namespace, output: Optional[Path], inputs: Sequence[str], outputs: Sequence[str],
            manifest_file: Optional[Path] = None):
    parameters = {
        key: (str(value) if isinstance(value, Path) else value)
        for key, value in sorted(vars(args).items())
        if key not in _RUNTIME_KEYS
    }
    manifest = RunManifest(
        command=args.command,
        parameters=parameters,
        seed=int(getattr(args, 'seed', 0) or 0),
        inputs=[str(p) for p in inputs],
        outputs=sorted(str(p) for p in outputs),
    )
    path = write_manifest(manifest, manifest_file or manifest_path_for(output))
    logger.info(f"Wrote manifest {path}")


def _records_shape(records) -> int:
    sizes = {r.cloud.shape[0] for r in records}
    if len(sizes) != 1:
        raise DatasetError(f"clouds have different point counts: {sorted(sizes)}")
    return sizes.pop()


def cmd_synth(args, settings: Config) -> int:
    count = int(_resolve(args, 'count', settings, 'synth.count'))
    points = int(_resolve(args, 'points', settings, 'synth.points'))
    noise = float(_resolve(args, 'noise', settings, 'synth.noise_sigma'))
    out = ensure_dir(args.out)

    records = synth_dataset(count, seed=args.seed, noise_sigma=noise, n_points=points, workers=args.workers)
    outputs = []
    for record in records:
        write_scan(record, out)
        outputs += [f"{record.id}.pcf", f"{record.id}.json"]

    _record(args, out, [], outputs)
    print(f"scans={len(records)} out={out}")
    return 0


def cmd_preprocess(args, settings: Config) -> int:
    points = int(_resolve(args, 'points', settings, 'preprocess.target_points'))
    margin = float(_resolve(args, 'chin_margin', settings, 'preprocess.chin_margin'))
    cfg = PreprocessConfig(target_points=points, chin_margin=margin, seed=args.seed)

    summary = preprocess_directory(args.input, args.out, cfg)
    out = Path(args.out)
    if summary.skipped:
        (out / "skipped.log").write_text("".join(f"{scan_id} {line}\n" for scan_id, line in summary.skipped))
    outputs = [f"{i}.pcf" for i in summary.processed] + [f"{i}.json" for i in summary.processed]
    if summary.skipped:
        outputs.append("skipped.log")

    _record(args, out, [args.input], outputs)
    print(f"processed={len(summary.processed)} skipped={len(summary.skipped)}")
    if summary.skipped:
        _print_table("Skipped scans", ["id", "reason"], summary.skipped)
    return 0


def _training_config(args, settings: Config, n_points: int) -> VaeConfig:
    return VaeConfig.from_settings(
        settings,
        n_points=n_points,
        latent_dim=_resolve(args, 'latent', settings, 'vae.latent_dim'),
        width_mult=_resolve(args, 'width_mult', settings, 'vae.width_mult'),
        batch_size=_resolve(args, 'batch', settings, 'vae.batch_size'),
        lr=_resolve(args, 'lr', settings, 'vae.lr'),
        max_epochs=_resolve(args, 'max_epochs', settings, 'vae.max_epochs'),
        patience=_resolve(args, 'patience', settings, 'vae.patience'),
        val_frac=_resolve(args, 'val_frac', settings, 'vae.val_frac'),
        workers=_resolve(args, 'workers', settings, 'vae.workers'),
        seed=args.seed,
    )


def cmd_train(args, settings: Config) -> int:
    ids = list_scan_ids(args.data)
    if not ids:
        raise DatasetError(f"no scans found in {args.data}")
    records = load_dataset(args.data, ids)
    cfg = _training_config(args, settings, _records_shape(records))

    result = train([r.cloud for r in records], cfg, progress=sys.stderr.isatty())
    out = Path(args.out)
    if out.parent and not out.parent.exists():
        ensure_dir(out.parent)
    write_checkpoint(result.checkpoint, out)
    log_path = out.with_name(out.stem + "_log.csv")
    write_training_log(result.log, log_path)

    best = result.log.rows[[row['epoch'] for row in result.log.rows].index(result.best_epoch)]
    print(f"best_epoch={result.best_epoch} val_Lr={best['val_Lr']:.17g} val_Ll={best['val_Ll']:.17g}")

    if all(r.factors for r in records):
        latents = encode_many(PointCloudVAE(result.checkpoint), [r.cloud for r in records])
        names = sorted(records[0].factors)
        matches = factor_correlations(latents, {n: [r.factors[n] for r in records] for n in names})
        _print_table("Latent factors", ["factor", "dim", "spearman"],
                     [(m.factor, m.dim, f"{m.rho:.3f}") for m in matches.values()])

    _record(args, out, [args.data], [out.name, log_path.name])
    return 0


def _load_model(path) -> PointCloudVAE:
    return PointCloudVAE(read_checkpoint(path))


def cmd_encode(args, settings: Config) -> int:
    model = _load_model(args.model)
    ids = list_scan_ids(args.data)
    if not ids:
        raise DatasetError(f"no scans found in {args.data}")
    records = load_dataset(args.data, ids)
    for record in records:
        if record.cloud.shape[0] != model.n_points:
            raise ShapeError(f"scan {record.id} has {record.cloud.shape[0]} points, "
                             f"model expects {model.n_points}")

    table = LatentTable(
        ids=[r.id for r in records],
        z=encode_many(model, [r.cloud for r in records]),
        gender=[r.gender.value for r in records],
        race=[r.race.value for r in records],
    )
    out = Path(args.out)
    write_latents(table, out)
    _record(args, out, [args.model, args.data], [out.name])
    print(f"rows={len(table)} dim={table.dim}")
    return 0


def cmd_explore(args, settings: Config) -> int:
    if args.percentiles is None:
        args.percentiles = ",".join(f"{float(p):g}" for p in settings.get('analysis.percentiles'))
    percentiles = _parse_floats(args.percentiles, "--percentiles")
    table = read_latents(args.latents)
    available = set(list_scan_ids(args.data))
    missing = [scan_id for scan_id in table.ids if scan_id not in available]
    if missing:
        raise DatasetError(f"{len(missing)} latent ids have no scan in {args.data}: {missing[:5]}")

    result = explore(table, percentiles)
    out = ensure_dir(args.out)
    mean_cloud = read_scan(args.data, result.mean_id).cloud
    write_pcf(mean_cloud, out / "mean_face.pcf")
    outputs = ["mean_face.pcf", "probes.json"]

    model = _load_model(args.model) if args.model else None
    if model is not None:
        write_pcf(decode(model, result.mean_z), out / "mean_face_decoded.pcf")
        outputs.append("mean_face_decoded.pcf")

    rows = [("mean", "-", "-", result.mean_id)]
    for probe in result.probes:
        cloud = read_scan(args.data, probe.nearest_id).cloud
        write_pcf(cloud, out / f"{probe.label}.pcf")
        write_distance_csv(probe.nearest_id, cloud, distance_to_mean_face(cloud, mean_cloud),
                           out / f"{probe.label}_distances.csv")
        outputs += [f"{probe.label}.pcf", f"{probe.label}_distances.csv"]
        if model is not None:
            write_pcf(decode(model, probe.point), out / f"{probe.label}_decoded.pcf")
            outputs.append(f"{probe.label}_decoded.pcf")
        rows.append((probe.label, probe.dim, f"{probe.pct:g}", probe.nearest_id))

    summary = {
        'mean_id': result.mean_id,
        'mean_z': [float(v) for v in result.mean_z],
        'probes': [
            {'dim': p.dim, 'pct': p.pct, 'point': [float(v) for v in p.point], 'nearest_id': p.nearest_id}
            for p in result.probes
        ],
    }
    (out / "probes.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")

    _record(args, out, [args.latents, args.data] + ([args.model] if args.model else []), outputs)
    print(f"mean_face={result.mean_id} probes={len(result.probes)}")
    _print_table("Latent probes", ["probe", "dim", "pct", "nearest scan"], rows)
    return 0


def cmd_cluster(args, settings: Config) -> int:
    k = int(_resolve(args, 'k', settings, 'analysis.k'))
    restarts = int(settings.get('analysis.restarts', 10))
    max_iter = int(settings.get('analysis.max_iter', 300))
    if args.group_by not in GROUP_BY_CHOICES:
        raise ConfigError(f"--group-by supports {GROUP_BY_CHOICES}, got {args.group_by!r}")
    if args.dims is None:
        args.dims = ",".join(str(d) for d in settings.get('export.scatter_dims', [0, 1]))
    dims = _parse_dims(args.dims)

    table = read_latents(args.latents)
    detailed = stratified_exemplars_detailed(table, k, seed=args.seed, restarts=restarts, max_iter=max_iter)
    reports = [report for report, _, _ in detailed]
    out = Path(args.out)
    write_report(reports, out, k=k, seed=args.seed, extra={'group_by': args.group_by})
    outputs = [out.name]

    plottable = max(dims) < table.dim
    if not plottable:
        logger.warning(f"Latent dimension {table.dim} too small for scatter dims {dims}; no plots written")
    rows = []
    for report, result, index in detailed:
        if report.is_skipped:
            rows.append((f"{report.gender}/{report.race}", report.rows, "skipped", report.skipped))
            continue
        exemplars = ", ".join(entry.exemplar_id for entry in report.clusters)
        rows.append((f"{report.gender}/{report.race}", report.rows, f"{report.inertia:.6g}", exemplars))
        if plottable:
            stem = f"{out.stem}_{report.gender}_{report.race}"
            sub = table.subset(index)
            scatter_svg(sub.z, result.labels, out.with_name(stem + ".svg"), dims,
                        title=f"{report.gender} / {report.race}", centroids=report.centroids(),
                        exemplars=np.array([entry.exemplar_z for entry in report.clusters]))
            write_scatter_csv(sub.ids, sub.z[:, list(dims)], result.labels, dims, out.with_name(stem + ".csv"))
            outputs += [stem + ".svg", stem + ".csv"]

    if plottable and len(table):
        group_index = {group: i for i, group in enumerate(sorted(set(table.groups())))}
        scatter_svg(table.z, [group_index[g] for g in table.groups()], out.with_name(f"{out.stem}_all.svg"),
                    dims, title="all groups")
        outputs.append(f"{out.stem}_all.svg")

    _record(args, out, [args.latents], outputs)
    skipped = sum(1 for r in reports if r.is_skipped)
    print(f"groups={len(reports)} skipped={skipped} k={k}")
    _print_table("Size groups", ["group", "rows", "inertia", "exemplars"], rows)
    return 0


def cmd_size(args, settings: Config) -> int:
    model = _load_model(args.model)
    scan = Path(args.scan)
    meta_path = Path(args.meta) if args.meta else scan.with_suffix('.json')
    if not meta_path.exists():
        raise MetadataError(f"no metadata sidecar for {scan} (looked for {meta_path})")
    meta = read_metadata(meta_path)
    cloud = read_pcf(scan)
    z = encode(model, cloud)

    report = find_report(read_report(args.report), meta.gender.value, meta.race.value)
    cluster = assign_size(z, report)
    distances = np.linalg.norm(report.centroids() - z, axis=1)
    chosen = [i for i, entry in enumerate(report.clusters) if entry.cluster == cluster][0]

    print(f"cluster={cluster} group={meta.gender.value}/{meta.race.value} distance={distances[chosen]:.17g}")
    _print_table("Distance to size centroids", ["cluster", "distance", "exemplar"],
                 [(entry.cluster, f"{distances[i]:.6g}", entry.exemplar_id)
                  for i, entry in enumerate(report.clusters)])
    if args.manifest:
        _record(args, None, [args.model, args.scan, args.report], [], manifest_file=Path(args.manifest))
    return 0


def cmd_emd(args, settings: Config) -> int:
    a = read_pcf(args.a)
    b = read_pcf(args.b)
    params = None
    if args.eps_final is not None:
        costs = point_cost(a, b)
        params = AuctionParams(eps_start=max(costs.max_cost() / 2.0, args.eps_final),
                               eps_final=args.eps_final, parallel=args.parallel,
                               eps_scale_divisor=settings.get('assignment.eps_scale_divisor', 4.0))
    tolerance = float(settings.get('assignment.eval_eps_rel', 1e-4))
    kwargs = {} if params is not None else {
        'parallel': args.parallel,
        'eps_scale_divisor': settings.get('assignment.eps_scale_divisor', 4.0),
    }
    loss, _, result = emd_details(a, b, tolerance, params, **kwargs)

    print(f"emd={loss:.17g} n={a.shape[0]}")
    stats = [("points", a.shape[0]),
             ("phases", result.phases if result else 0),
             ("bids", result.iterations if result else 0),
             ("matched cost", f"{result.total_cost:.6g}" if result else "0")]
    _print_table("Assignment", ["statistic", "value"], stats)
    if args.manifest:
        _record(args, None, [args.a, args.b], [], manifest_file=Path(args.manifest))
    return 0


def cmd_config_show(args, settings: Config) -> int:
    summary = settings.get_config_summary()
    print(f"config_file={summary['config_file']}")
    _print_table("Configuration", ["key", "value"],
                 [(key, value) for key, value in summary.items() if key != 'config_file'])
    return 0


def cmd_replay(args, settings: Config) -> int:
    manifest = read_manifest(args.manifest)
    settings = _settings(manifest.parameters.get('config'))
    if manifest.command not in COMMANDS or manifest.command == 'replay':
        raise ConfigError(f"cannot replay command {manifest.command!r}")
    replayed = argparse.Namespace(**manifest.parameters)
    replayed.command = manifest.command
    logger.info(f"Replaying {manifest.command} (recorded with version {manifest.tool_version})")
    return COMMANDS[manifest.command](replayed, settings)


COMMANDS: Dict[str, Callable[[argparse.Namespace, Config], int]] = {
    'synth': cmd_synth,
    'preprocess': cmd_preprocess,
    'train': cmd_train,
    'encode': cmd_encode,
    'explore': cmd_explore,
    'cluster': cmd_cluster,
    'size': cmd_size,
    'emd': cmd_emd,
    'replay': cmd_replay,
}


class CliParser(argparse.ArgumentParser):
    """Usage errors surface as ConfigError instead of argparse's usage text"""

    def error(self, message: str):
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog="ppe-sizer", description="PPE sizing from 3-D face scans")
    parser.add_argument("--log-level", default="INFO", help="Logging level")
    parser.add_argument("--log-file", help="Also write the log to this file")
    parser.add_argument("--config", help="YAML configuration file")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="Generate synthetic head scans")
    p.add_argument("--count", type=int)
    p.add_argument("--points", type=int)
    p.add_argument("--noise", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("preprocess", help="Extract fixed-size faces from head scans")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--points", type=int)
    p.add_argument("--chin-margin", type=float)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("train", help="Train the point cloud autoencoder")
    p.add_argument("--data", required=True)
    p.add_argument("--latent", type=int)
    p.add_argument("--width-mult", type=float)
    p.add_argument("--batch", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--max-epochs", type=int)
    p.add_argument("--patience", type=int)
    p.add_argument("--val-frac", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("encode", help="Encode processed scans into a latent table")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("explore", help="Mean face and percentile probes")
    p.add_argument("--latents", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--percentiles")
    p.add_argument("--model")
    p.add_argument("--out", required=True)

    p = sub.add_parser("cluster", help="Stratified k-means size groups and exemplars")
    p.add_argument("--latents", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--group-by", default="gender,race")
    p.add_argument("--dims")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("size", help="Assign a scan to a size group")
    p.add_argument("--model", required=True)
    p.add_argument("--scan", required=True)
    p.add_argument("--meta")
    p.add_argument("--report", required=True)
    p.add_argument("--manifest")

    p = sub.add_parser("emd", help="Earth mover distance between two clouds")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--eps-final", type=float)
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--manifest")

    p = sub.add_parser("replay", help="Re-run a command from its manifest")
    p.add_argument("manifest")

    p = sub.add_parser("config", help="Configuration")
    config_sub = p.add_subparsers(dest="config_command", required=True)
    config_sub.add_parser("show", help="Print the resolved configuration")
    return parser


def _settings(path: Optional[str]) -> Config:
    if not path:
        return default_config
    if not Path(path).exists():
        raise ConfigError(f"config file {path} does not exist")
    return Config(config_dir=str(Path(path).parent), config_file=path)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main application entry point"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as e:
        print(e.cli_line(), file=sys.stderr)
        return 1
    setup_logging(args.log_level, args.log_file)
    for key in ('log_level', 'log_file'):
        delattr(args, key)

    try:
        settings = _settings(args.config)
        set_debug_checks(bool(settings.get('core.debug_mode', False)))
        if args.command == 'config':
            return cmd_config_show(args, settings)
        return int(COMMANDS[args.command](args, settings) or 0)
    except PPESizerError as e:
        print(e.cli_line(), file=sys.stderr)
        return 1
    except Exception as e:
        logger.debug("Unexpected failure", exc_info=True)
        print(f"error:internal:{single_line(e)}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
