"""
Command-line entry point for the bearing fault detector.

    gsabfd synth|convert|graph|train|score|eval|bench|sweep [options]

Every run-config key can be given as a flag of the same name
(``--sampling-ratio 0.3``); flags override the config file, which overrides
the built-in defaults. Failures print one ``error[<category>]: <message>``
line on stderr.
"""
import os
import time
import sys
import argparse
import logging
from dataclasses import fields
from typing import Dict, List, Optional

import pandas as pd

from diagnose.pipeline import run_gsabfd, score_nodes
from diagnose.report import evaluate
from features.emd import EemdParams
from features.extractor import (
    FeatureMatrix, NormStats, extract_matrix, standardize, apply_stats, unstandardize,
    read_feature_csv, write_feature_csv,
)
from graph.attributed import AttributedGraph, build_graph, read_edges_csv
from harness import create_detection_harness, DEFAULT_GRIDS, EXECUTION_ORDER
from ingest.loaders import load_signal, save_csv
from ingest.synth import synth_signals
from ingest.windows import pool_windows, assemble_dataset
from nnmath.checkpoint import load_checkpoint, save_checkpoint
from sage.model import SageHyper, SageModel
from sage.train import train, write_training_log
from utils.config import RunConfig, load_run_config
from utils.errors import GsabfdError, InputError
from utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

EVAL_COLUMNS = ['method', 'dataset', 'auc', 'acc', 'dr', 'runtime_seconds']


def _ensure_parent(path: str) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    return path


def _require_files(paths: List[str]) -> None:
    missing = [p for p in paths if not os.path.isfile(p)]
    if missing:
        raise InputError(f"input not found: {', '.join(missing)}")


def _dataset_name(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


class DetectorCli:
    """Runs one pipeline stage per invocation, staged through files."""

    def __init__(self, args: argparse.Namespace):
        """Resolve the run config from defaults, the config file and flags."""
        self.args = args
        overrides = {f.name: getattr(args, f.name, None) for f in fields(RunConfig)}
        self.config: RunConfig = load_run_config(args.config, overrides)

    def out(self, default: str) -> str:
        return _ensure_parent(self.args.out or default)

    def load_features(self, path: str, stats: Optional[NormStats] = None) -> FeatureMatrix:
        """Read a feature CSV in the scale of ``stats`` when given, else its own.

        A matrix already standardized with other stats is first mapped back to
        raw features through its sidecar.
        """
        matrix = read_feature_csv(path)
        if stats is None:
            return matrix if matrix.norm_stats is not None else standardize(matrix)
        if matrix.norm_stats is not None:
            matrix = unstandardize(matrix)
        return apply_stats(matrix, stats)

    def load_graph(self, matrix: FeatureMatrix, k: int) -> AttributedGraph:
        if self.args.edges:
            return read_edges_csv(self.args.edges, matrix)
        return build_graph(matrix, k)

    def cmd_synth(self) -> int:
        c = self.config
        normal, fault = synth_signals(
            c.n_normal, self.args.fault_windows or c.n_fault, c.window_width,
            c.seed, self.args.impulse_ratio, c.fault_label,
        )
        directory = self.args.out or '.'
        os.makedirs(directory, exist_ok=True)
        save_csv(normal, os.path.join(directory, 'normal.csv'))
        save_csv(fault, os.path.join(directory, f"{c.fault_label}.csv"))
        print(f"wrote {directory}/normal.csv and {directory}/{c.fault_label}.csv")
        return 0

    def cmd_convert(self) -> int:
        c = self.config
        _require_files(self.args.normal + self.args.fault)
        normals = [load_signal(p, c.var_filter, c.sample_rate, 'normal') for p in self.args.normal]
        faults = [load_signal(p, c.var_filter, c.sample_rate, c.fault_label) for p in self.args.fault]

        dataset = assemble_dataset(
            pool_windows(normals, c.window_width), pool_windows(faults, c.window_width),
            c.n_normal, c.n_fault, c.seed,
        )
        matrix = extract_matrix(dataset.windows, EemdParams(**c.eemd_kwargs()), c.seed, c.workers)
        if not self.args.raw:
            matrix = standardize(matrix)
        path = self.out('features.csv')
        write_feature_csv(matrix, path)
        print(f"wrote {matrix.m}x{matrix.rows.shape[1]} features to {path} {dataset.counts}")
        return 0

    def cmd_graph(self) -> int:
        matrix = self.load_features(self.args.features)
        graph = build_graph(matrix, self.config.k)
        path = self.out('edges.csv')
        graph.write_edges_csv(path)
        if self.args.dense:
            graph.write_dense_csv(_ensure_parent(self.args.dense))
        print(f"wrote {graph.m * graph.k} edges to {path}")
        return 0

    def cmd_train(self) -> int:
        matrix = self.load_features(self.args.features)
        hyper = SageHyper(**self.config.sage_kwargs())
        graph = self.load_graph(matrix, hyper.k)
        model, loss_curve = train(graph, matrix, hyper)
        path = self.out('checkpoint.json')
        save_checkpoint(model.to_checkpoint(), path)
        if self.args.training_log:
            write_training_log(loss_curve, _ensure_parent(self.args.training_log))
        print(f"trained {hyper.epochs} epochs, loss {loss_curve[0]:.6f} -> {loss_curve[-1]:.6f}; wrote {path}")
        return 0

    def _score(self, matrix: FeatureMatrix, model: SageModel):
        graph = self.load_graph(matrix, model.hyper.k)
        started = time.perf_counter()
        scores = score_nodes(model, graph, matrix)
        elapsed = time.perf_counter() - started if self.config.timing else 0.0
        return evaluate(scores, matrix.labels, self.config.contamination, elapsed)

    def _write_report(self, report, path: str) -> None:
        report.write_json(path)
        report.write_csv(os.path.splitext(path)[0] + '.csv')

    def cmd_score(self) -> int:
        model = SageModel.from_checkpoint(load_checkpoint(self.args.checkpoint))
        matrix = self.load_features(self.args.features, model.norm_stats)
        report = self._score(matrix, model)
        path = self.out('report.json')
        self._write_report(report, path)
        print(f"scored {len(report.scores)} nodes, {report.flagged} flagged; wrote {path}")
        return 0

    def cmd_eval(self) -> int:
        if self.args.checkpoint:
            model = SageModel.from_checkpoint(load_checkpoint(self.args.checkpoint))
            matrix = self.load_features(self.args.features, model.norm_stats)
            report = self._score(matrix, model)
        else:
            matrix = self.load_features(self.args.features)
            hyper = SageHyper(**self.config.sage_kwargs())
            report = run_gsabfd(matrix, hyper, self.config.contamination,
                                timing=self.config.timing).report

        if self.args.report:
            self._write_report(report, _ensure_parent(self.args.report))
        if report.metrics:
            row = {'method': 'gsabfd', 'dataset': _dataset_name(self.args.features), **report.metrics}
            pd.DataFrame([row], columns=EVAL_COLUMNS).to_csv(
                self.out('metrics.csv'), index=False, lineterminator='\n')
        print(report.summary_line())
        return 0

    def cmd_bench(self) -> int:
        _require_files(self.args.features)
        datasets: Dict[str, FeatureMatrix] = {
            _dataset_name(p): self.load_features(p) for p in self.args.features
        }
        methods = self.args.methods.split(',') if self.args.methods else EXECUTION_ORDER
        harness = create_detection_harness(self.config)

        def progress(current: int, total: int, message: str):
            logger.info(f"[{current}/{total}] {message}")

        table = harness.bench(datasets, methods, progress_callback=progress)
        path = self.out('bench.csv')
        table.to_csv(path, index=False, lineterminator='\n')
        failed = table[table['error'] != '']
        for _, row in failed.iterrows():
            print(f"warning: {row['method']} on {row['dataset']} failed: {row['error']}", file=sys.stderr)
        for entry in harness.failure_logs:
            print(f"log: {entry['level']} {entry['message']}", file=sys.stderr)
        print(f"wrote {len(table)} bench rows ({len(failed)} failed) to {path}")
        return 0

    def cmd_sweep(self) -> int:
        matrix = self.load_features(self.args.features)
        grid = None
        if self.args.grid:
            try:
                grid = [float(v) for v in self.args.grid.split(',')]
            except ValueError:
                raise InputError(f"grid must be a comma-separated list of numbers, got {self.args.grid!r}")
        harness = create_detection_harness(self.config)
        table = harness.sweep(self.args.param, matrix, grid)
        path = self.out(f"sweep_{self.args.param}.csv")
        table.to_csv(path, index=False, lineterminator='\n')
        print(f"wrote {len(table)} sweep rows to {path}")
        return 0

    def run(self) -> int:
        """Run the selected command."""
        handler = getattr(self, f"cmd_{self.args.command}")
        logger.info(f"Running {self.args.command} (seed {self.config.seed})")
        return handler()


def _config_flag(name: str) -> str:
    return '--' + name.replace('_', '-')


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='KEY=value settings file (default: config/settings.env if present)')
    common.add_argument('--out', help='output path (directory for synth)')
    common.add_argument('--log-file', help='also write the log to this file')
    settings = common.add_argument_group('run settings')
    for f in fields(RunConfig):
        settings.add_argument(_config_flag(f.name), dest=f.name, default=None, metavar=f.name.upper())

    parser = argparse.ArgumentParser(prog='gsabfd', description='Graph-based bearing fault detection')
    sub = parser.add_subparsers(dest='command', required=True)

    synth = sub.add_parser('synth', parents=[common], help='generate synthetic normal/fault records')
    synth.add_argument('--impulse-ratio', type=float, default=5.0)
    synth.add_argument('--fault-windows', type=int, default=None)

    convert = sub.add_parser('convert', parents=[common], help='raw records -> feature CSV')
    convert.add_argument('--normal', action='append', required=True, help='normal record (repeatable)')
    convert.add_argument('--fault', action='append', required=True, help='fault record (repeatable)')
    convert.add_argument('--raw', action='store_true', help='write unstandardized features')

    graph = sub.add_parser('graph', parents=[common], help='feature CSV -> edge list')
    graph.add_argument('--features', required=True)
    graph.add_argument('--dense', help='also export the dense M matrix (<= 1000 nodes)')

    train_cmd = sub.add_parser('train', parents=[common], help='train the graph autoencoder')
    train_cmd.add_argument('--features', required=True)
    train_cmd.add_argument('--edges')
    train_cmd.add_argument('--training-log', help='epoch,loss CSV')

    score = sub.add_parser('score', parents=[common], help='score nodes with a checkpoint')
    score.add_argument('--features', required=True)
    score.add_argument('--checkpoint', required=True)
    score.add_argument('--edges')

    eval_cmd = sub.add_parser('eval', parents=[common], help='score and report metrics')
    eval_cmd.add_argument('--features', required=True)
    eval_cmd.add_argument('--checkpoint', help='trained model (trained on the fly when omitted)')
    eval_cmd.add_argument('--edges')
    eval_cmd.add_argument('--report', help='also write the FaultReport JSON here')

    bench = sub.add_parser('bench', parents=[common], help='compare all detectors')
    bench.add_argument('--features', action='append', required=True, help='feature CSV (repeatable)')
    bench.add_argument('--methods', help=f"comma list from {','.join(EXECUTION_ORDER)}")

    sweep = sub.add_parser('sweep', parents=[common], help='AUC over a parameter grid')
    sweep.add_argument('param', choices=sorted(DEFAULT_GRIDS))
    sweep.add_argument('--features', required=True)
    sweep.add_argument('--grid', help='comma-separated values (default: the full legal range)')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    try:
        app = DetectorCli(args)
        setup_logging(level=app.config.log_level, log_file=args.log_file)
        return app.run()
    except GsabfdError as e:
        logger.debug("Command failed", exc_info=True)
        print(f"error[{e.category}]: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        logger.exception(f"Unexpected failure: {e}")
        print(f"error[internal]: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
