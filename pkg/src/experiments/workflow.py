"""
The experiment stages behind the management commands. Each stage checks the
stamps of what it consumes, refuses to overwrite outputs of another
configuration unless forced, and stamps its own output directory.
"""

import hashlib
import logging
import shutil
from pathlib import Path
from typing import Dict, List, Optional

from acoustics.cache import RepresentationCache
from acoustics.models import FeatureSchema
from acoustics.native import NATIVE_FEATURES
from acoustics.services import extract_corpus
from acoustics.tables import ingest_feature_table, merge_feature_tables, write_feature_table
from analysis.report import write_attribution_reports, write_correlation_reports
from analysis.services import attribute_tasks, correlate_tasks, project_tasks
from core.exceptions import AcceptanceFailure
from core.files import read_json, write_json
from corpus.exceptions import ManifestError
from corpus.models import CorpusManifest, slugify_task
from corpus.services import load_manifest, save_manifest
from corpus.splits import make_splits, validate_manifest
from corpus.synthesis import generate_synthetic_corpus, marker_fidelity, write_corpus
from metrics.models import EvalReport
from metrics.report import REPORT_JSON, render_comparison, render_report
from metrics.services import CheckpointScorer, evaluate
from networks import checkpoints
from networks.models import ModelKind, NetworkSpec
from pipeline.services import BatchAssembler
from training.services import run_dir_name, train, train_baselines
from .acceptance import Check, failures, render_summary, run_checks
from .config import LoadedConfig, RunConfig
from .layout import OutputLayout, check_stage, read_stamp, require, stamp_stage, verify_stage

logger = logging.getLogger(__name__)

TRAINING_SECTIONS = ('synth', 'split', 'dsp', 'model', 'train', 'augment')


def synth_fingerprint(cfg: RunConfig) -> str:
    return cfg.stage_fingerprint('synth')


def extract_fingerprint(cfg: RunConfig, ingest_digest: str = '') -> str:
    return cfg.stage_fingerprint('synth', 'dsp', ingest=ingest_digest)


def split_fingerprint(cfg: RunConfig) -> str:
    return cfg.stage_fingerprint('synth', 'split')


def train_fingerprint(cfg: RunConfig, kind: str) -> str:
    return cfg.stage_fingerprint(*TRAINING_SECTIONS, kind=kind)


def eval_fingerprint(cfg: RunConfig, kind: str) -> str:
    return cfg.stage_fingerprint(*TRAINING_SECTIONS, 'eval', kind=kind)


def write_config_echo(loaded: LoadedConfig, layout: OutputLayout) -> None:
    write_json(layout.config_echo, loaded.validated.document())
    write_json(layout.overrides, {'overrides': loaded.overrides, 'fingerprint': loaded.fingerprint})


def synthesize(loaded: LoadedConfig, layout: OutputLayout, force: bool = False) -> CorpusManifest:
    cfg = loaded.config
    fingerprint = synth_fingerprint(cfg)
    check_stage(layout.corpus_dir, 'synth', fingerprint, force)
    manifest, store = generate_synthetic_corpus(cfg.synth)
    shutil.rmtree(layout.wav_dir, ignore_errors=True)
    write_corpus(layout.corpus_dir, manifest, store, loaded.fingerprint)
    stamp_stage(layout.corpus_dir, 'synth', fingerprint, loaded.fingerprint)
    return manifest


def _ingest_digest(ingest) -> str:
    return hashlib.sha256(Path(ingest).read_bytes()).hexdigest()[:16] if ingest else ''


def extract(loaded: LoadedConfig, layout: OutputLayout, force: bool = False, ingest=None):
    """Representation cache plus the native feature table, optionally merged with an external table."""
    cfg = loaded.config
    verify_stage(layout.corpus_dir, 'synth', synth_fingerprint(cfg))
    manifest = load_manifest(layout.corpus_manifest)
    digest = _ingest_digest(ingest)
    fingerprint = extract_fingerprint(cfg, digest)
    check_stage(layout.features_dir, 'extract', fingerprint, force)

    features = extract_corpus(
        [recording.recording_id for recording in manifest.recordings],
        layout.wav_dir, layout.cache_dir, cfg.dsp, force=force,
    )
    if ingest:
        features = merge_feature_tables(features, ingest_feature_table(ingest, FeatureSchema()))
    write_feature_table(layout.feature_table, features)
    stamp_stage(layout.features_dir, 'extract', fingerprint, loaded.fingerprint, ingest_digest=digest)
    return features


def split(loaded: LoadedConfig, layout: OutputLayout, force: bool = False) -> CorpusManifest:
    cfg = loaded.config
    verify_stage(layout.corpus_dir, 'synth', synth_fingerprint(cfg))
    fingerprint = split_fingerprint(cfg)
    check_stage(layout.splits_dir, 'split', fingerprint, force)
    manifest = make_splits(load_manifest(layout.corpus_manifest), cfg.split)
    violations = validate_manifest(manifest)
    if violations:
        logger.error(f'Split manifest violates {len(violations)} invariant(s): {violations[:3]}')
        raise ManifestError('Split manifest is invalid: ' + '; '.join(violations), violations=len(violations))
    save_manifest(layout.split_manifest, manifest, loaded.fingerprint)
    stamp_stage(layout.splits_dir, 'split', fingerprint, loaded.fingerprint)
    return manifest


def load_split(cfg: RunConfig, layout: OutputLayout) -> CorpusManifest:
    verify_stage(layout.splits_dir, 'split', split_fingerprint(cfg))
    return load_manifest(layout.split_manifest)


def load_features(layout: OutputLayout):
    require(layout.feature_table, 'extract')
    return ingest_feature_table(layout.feature_table, FeatureSchema(names=NATIVE_FEATURES))


def make_assembler(cfg: RunConfig, layout: OutputLayout) -> BatchAssembler:
    return BatchAssembler(RepresentationCache(layout.cache_dir, cfg.dsp), cfg.augment, cfg.seed)


def network_spec(cfg: RunConfig, kind: str, tasks, feature_names=()) -> NetworkSpec:
    kind = ModelKind(kind)
    return NetworkSpec(
        kind=kind,
        config=cfg.model,
        tasks=tuple(tasks),
        n_mfcc=cfg.dsp.n_mfcc,
        mel_bins=cfg.dsp.mel_bins,
        feature_names=tuple(feature_names) if kind is ModelKind.MLP else (),
        dsp_fingerprint=cfg.dsp.fingerprint(),
    )


def _feature_names(features) -> tuple:
    return next(iter(features.values())).names if features else NATIVE_FEATURES


def train_model(loaded: LoadedConfig, layout: OutputLayout, kind: str, force: bool = False):
    cfg = loaded.config
    kind = ModelKind(kind).value
    manifest = load_split(cfg, layout)
    verify_stage(layout.features_dir, 'extract', consumed_extract_fingerprint(cfg, layout))
    fingerprint = train_fingerprint(cfg, kind)
    out_dir = layout.runs_dir(kind)
    check_stage(out_dir, 'train', fingerprint, force)

    if kind == ModelKind.MARVEL.value:
        spec = network_spec(cfg, kind, manifest.task_names)
        logs = train(spec, manifest, cfg.train, make_assembler(cfg, layout), out_dir, loaded.fingerprint)
    elif kind == ModelKind.MLP.value:
        features = load_features(layout)
        spec = network_spec(cfg, kind, manifest.task_names, _feature_names(features))
        logs = train_baselines(kind, spec, manifest, cfg.train, out_dir, features=features,
                               run_fingerprint=loaded.fingerprint)
    else:
        spec = network_spec(cfg, kind, manifest.task_names)
        logs = train_baselines(kind, spec, manifest, cfg.train, out_dir, assembler=make_assembler(cfg, layout),
                               run_fingerprint=loaded.fingerprint)
    stamp_stage(out_dir, 'train', fingerprint, loaded.fingerprint)
    return logs


def consumed_extract_fingerprint(cfg: RunConfig, layout: OutputLayout) -> str:
    """Extract fingerprint under the current config, including any ingested table recorded in the stamp."""
    return extract_fingerprint(cfg, read_stamp(layout.features_dir).get('ingest_digest', ''))


def selected_checkpoint(run_dir: Path) -> Path:
    run_json = require(Path(run_dir) / 'run.json', 'train')
    return Path(run_dir) / Path(read_json(run_json)['checkpoint']).name


def run_checkpoints(cfg: RunConfig, layout: OutputLayout, kind: str, tasks) -> List[Dict[str, Path]]:
    runs_dir = layout.runs_dir(kind)
    if kind == ModelKind.MARVEL.value:
        return [
            dict.fromkeys(tasks, selected_checkpoint(runs_dir / run_dir_name(run)))
            for run in range(cfg.train.runs)
        ]
    return [
        {task: selected_checkpoint(runs_dir / slugify_task(task) / run_dir_name(run)) for task in tasks}
        for run in range(cfg.train.runs)
    ]


def evaluate_model(loaded: LoadedConfig, layout: OutputLayout, kind: str, force: bool = False) -> EvalReport:
    cfg = loaded.config
    kind = ModelKind(kind).value
    manifest = load_split(cfg, layout)
    verify_stage(layout.runs_dir(kind), 'train', train_fingerprint(cfg, kind))
    fingerprint = eval_fingerprint(cfg, kind)
    out_dir = layout.eval_dir(kind)
    check_stage(out_dir, 'eval', fingerprint, force)

    tasks = manifest.task_names
    features = load_features(layout) if kind == ModelKind.MLP.value else None
    if kind == ModelKind.MARVEL.value:
        expected = dict.fromkeys(tasks, network_spec(cfg, kind, tasks))
    else:
        names = _feature_names(features) if features is not None else ()
        expected = {task: network_spec(cfg, kind, [task], names) for task in tasks}
    scorer = CheckpointScorer(
        manifest, cfg.eval,
        assembler=make_assembler(cfg, layout) if features is None else None,
        features=features,
        expected=expected,
    )
    report = evaluate(kind, run_checkpoints(cfg, layout, kind, tasks), scorer)
    render_report(report, out_dir, loaded.fingerprint)
    stamp_stage(out_dir, 'eval', fingerprint, loaded.fingerprint)
    return report


def evaluate_models(loaded: LoadedConfig, layout: OutputLayout, kinds, force: bool = False) -> List[EvalReport]:
    reports = [evaluate_model(loaded, layout, kind, force) for kind in kinds]
    if len(reports) > 1:
        render_comparison(reports, layout.comparison_dir, loaded.fingerprint)
    return reports


def designated_run(layout: OutputLayout) -> int:
    report_path = layout.eval_dir(ModelKind.MARVEL.value) / REPORT_JSON
    if report_path.exists():
        return int(read_json(report_path).get('designated_run') or 0)
    return 0


def analyze(loaded: LoadedConfig, layout: OutputLayout, force: bool = False, checkpoint=None) -> dict:
    """Correlation and t-SNE on a multi-task checkpoint; attribution when MLP baselines were trained."""
    cfg = loaded.config
    manifest = load_split(cfg, layout)
    features = load_features(layout)
    marvel = ModelKind.MARVEL.value
    fingerprint = cfg.stage_fingerprint(*TRAINING_SECTIONS, 'analysis', checkpoint=str(checkpoint or ''))
    check_stage(layout.analysis_dir, 'analyze', fingerprint, force)

    run = designated_run(layout)
    if checkpoint is None:
        verify_stage(layout.runs_dir(marvel), 'train', train_fingerprint(cfg, marvel))
        checkpoint = selected_checkpoint(layout.runs_dir(marvel) / run_dir_name(run))
    model, _ = checkpoints.load(checkpoint, expected=network_spec(cfg, marvel, manifest.task_names))

    assembler = make_assembler(cfg, layout)
    correlations = correlate_tasks(model, manifest, assembler, features, cfg.analysis)
    write_correlation_reports(correlations, layout.analysis_dir, cfg.analysis.top_k, loaded.fingerprint)
    project_tasks(model, manifest, assembler, cfg.analysis, layout.analysis_dir, loaded.fingerprint)

    attributions: Optional[dict] = None
    mlp = ModelKind.MLP.value
    if (layout.runs_dir(mlp) / 'stage.json').exists():
        verify_stage(layout.runs_dir(mlp), 'train', train_fingerprint(cfg, mlp))
        mlp_run = min(run, cfg.train.runs - 1)
        paths = {
            task: selected_checkpoint(layout.runs_dir(mlp) / slugify_task(task) / run_dir_name(mlp_run))
            for task in manifest.task_names
        }
        attributions, recurrence = attribute_tasks(paths, manifest, features, cfg.analysis)
        write_attribution_reports(attributions, recurrence, layout.analysis_dir, cfg.analysis.top_k, loaded.fingerprint)
    else:
        logger.warning('No MLP baseline runs found; Shapley attribution skipped (train --model mlp first)')

    stamp_stage(layout.analysis_dir, 'analyze', fingerprint, loaded.fingerprint)
    return {'correlations': correlations, 'attributions': attributions}


def reproduce(loaded: LoadedConfig, layout: OutputLayout, force: bool = False) -> List[Check]:
    """Every stage in order, then the acceptance summary; raises AcceptanceFailure after writing it."""
    cfg = loaded.config
    synthesize(loaded, layout, force)
    features = extract(loaded, layout, force)
    manifest = split(loaded, layout, force)
    kinds = list(cfg.eval.models)
    if ModelKind.MARVEL.value not in kinds:
        kinds.insert(0, ModelKind.MARVEL.value)
    for kind in kinds:
        train_model(loaded, layout, kind, force)
    reports = {report.model: report for report in evaluate_models(loaded, layout, kinds, force)}
    analysis = analyze(loaded, layout, force)

    checks = run_checks(
        corpus=load_manifest(layout.corpus_manifest),
        split_manifest=manifest,
        config=cfg,
        reports=reports,
        correlations=analysis['correlations'],
        fidelity_results=marker_fidelity(manifest, features, cfg.synth),
    )
    render_summary(checks, reports, loaded.fingerprint, layout.summary)
    failed = failures(checks)
    if failed:
        names = ', '.join(check.name for check in failed)
        logger.error(f'Acceptance failed: {names}')
        raise AcceptanceFailure(f'Acceptance check(s) failed: {names}; see {layout.summary}', failed=len(failed))
    return checks
