"""Command line front end: stats, rank, sir and grid."""
import argparse
import json
import logging
import sys
from dataclasses import dataclass, fields
from typing import List, Optional

import pandas as pd

from . import __version__
from .data.edge_list import load_edge_list
from .data.util import RESULT_PRECISION, atomic_write, resolve_workers
from .experiment.tournament import ExperimentPlan, run_plan
from .graph.centrality import rank_to_frame
from .graph.core import DirectedGraph, topology_stats
from .model.helper import summarize_input
from .model.model_caller import METHODS, get_selector
from .model.voterank import VoteRankSelector, spreader_count_from_fraction
from .simulation.sir import SirParams, run_many

logger = logging.getLogger(__name__)

PROG = 'influence-toolbox'
EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
FLOAT_FORMAT = f'%.{RESULT_PRECISION}f'


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad arguments; here 2 is kept for data errors"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f'{self.prog}: error: {message}\n')


@dataclass
class CliConfig:
    command: str
    graph: Optional[str] = None
    reverse_arcs: bool = False
    delimiter: Optional[str] = None
    out: Optional[str] = None
    method: Optional[str] = None
    count: Optional[int] = None
    fraction: Optional[float] = None
    degree_mode: str = 'out'
    closeness_direction: str = 'out'
    horizon: Optional[int] = None
    undirected: bool = False
    mu: Optional[float] = None
    beta: Optional[float] = None
    runs: int = 1000
    seed: int = 0
    max_turns: Optional[int] = None
    spreaders_file: Optional[str] = None
    curve_out: Optional[str] = None
    plan: Optional[str] = None
    workers: Optional[int] = None
    verbosity: int = 0

    @classmethod
    def from_namespace(cls, namespace: argparse.Namespace) -> 'CliConfig':
        values = dict(vars(namespace))
        # -v counts before and after the subcommand name add up
        values['verbosity'] = values.get('verbosity', 0) + values.pop('command_verbosity', 0)
        return cls(**{item.name: values[item.name] for item in fields(cls) if item.name in values})


def _add_verbosity_option(parser: argparse.ArgumentParser, dest: str) -> None:
    parser.add_argument('-v', '--verbose', dest=dest, action='count', default=0,
                        help='-v for progress and info logs, -vv for debug logs')


def _add_graph_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--graph', required=True, help='edge list, one "source target" arc per line')
    parser.add_argument('--reverse-arcs', action='store_true',
                        help='the file lists citing -> cited; flip arcs into influence direction')
    parser.add_argument('--delimiter', default=None, help='token separator (default: whitespace or comma)')


def _add_selection_options(parser: argparse.ArgumentParser, required: bool) -> None:
    size = parser.add_mutually_exclusive_group(required=required)
    size.add_argument('--count', type=int, help='number of spreaders')
    size.add_argument('--fraction', type=float, help='spreaders as a fraction p of the nodes')
    parser.add_argument('--degree-mode', choices=['total', 'in', 'out'], default='out')
    parser.add_argument('--closeness-direction', choices=['out', 'undirected'], default='out')
    parser.add_argument('--horizon', type=int, default=None, help='suppression horizon of the voterank variants')
    parser.add_argument('--undirected', action='store_true', help='ignore arc direction')


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description='Influential spreaders on citation networks.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    _add_verbosity_option(parser, 'verbosity')
    subcommands = parser.add_subparsers(dest='command', required=True)

    stats = subcommands.add_parser('stats', help='topology statistics as json')
    _add_graph_options(stats)
    stats.add_argument('--out', default=None)
    _add_verbosity_option(stats, 'command_verbosity')

    rank = subcommands.add_parser('rank', help='rank nodes and write the top spreaders as csv')
    _add_graph_options(rank)
    rank.add_argument('--method', choices=METHODS, required=True)
    _add_selection_options(rank, required=False)
    rank.add_argument('--out', default=None)
    _add_verbosity_option(rank, 'command_verbosity')

    sir = subcommands.add_parser('sir', help='evaluate a spreader set with SIR simulations')
    _add_graph_options(sir)
    source = sir.add_mutually_exclusive_group(required=True)
    source.add_argument('--spreaders-file', help='one node label per line')
    source.add_argument('--method', choices=METHODS)
    _add_selection_options(sir, required=False)
    sir.add_argument('--mu', type=float, required=True, help='infection probability per contact and turn')
    sir.add_argument('--beta', type=float, required=True, help='recovery probability per turn')
    sir.add_argument('--runs', type=int, default=1000)
    sir.add_argument('--seed', type=int, default=0)
    sir.add_argument('--max-turns', type=int, default=None)
    sir.add_argument('--curve-out', default=None, help='write the mean R(t) per turn to this csv')
    sir.add_argument('--workers', type=int, default=None)
    sir.add_argument('--out', default=None)
    _add_verbosity_option(sir, 'command_verbosity')

    grid = subcommands.add_parser('grid', help='run a full tournament from a json plan')
    grid.add_argument('--plan', required=True)
    grid.add_argument('--out', required=True, help='output folder')
    grid.add_argument('--workers', type=int, default=None)
    _add_verbosity_option(grid, 'command_verbosity')
    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == '-':
        sys.stdout.write(text)
    else:
        with atomic_write(out) as handle:
            handle.write(text)


def _load_graph(config: CliConfig) -> DirectedGraph:
    graph = load_edge_list(config.graph, delimiter=config.delimiter, reverse=config.reverse_arcs)
    summarize_input(graph, method=config.method)
    return graph


def _spreader_count(config: CliConfig, graph: DirectedGraph) -> int:
    if config.fraction is not None:
        return spreader_count_from_fraction(graph.n, config.fraction)
    if config.count is not None:
        return config.count
    return graph.n


def _selector(config: CliConfig):
    return get_selector(config.method,
                        degree_mode=config.degree_mode,
                        closeness_direction=config.closeness_direction,
                        directed=not config.undirected,
                        horizon=config.horizon)


def run_stats(config: CliConfig) -> None:
    stats = topology_stats(_load_graph(config))
    _emit(json.dumps(stats.as_dict(precision=RESULT_PRECISION), sort_keys=True, indent=2) + '\n', config.out)


def run_rank(config: CliConfig) -> None:
    graph = _load_graph(config)
    count = _spreader_count(config, graph)
    selector = _selector(config).fit(graph)
    ranking = selector.select(count)

    if isinstance(selector, VoteRankSelector):
        frame = pd.DataFrame({'rank': list(range(1, len(ranking) + 1)),
                              'node_label': [graph.label_of(node) for node in ranking],
                              'election_round_score': selector.election_scores[:len(ranking)]})
    else:
        frame = rank_to_frame(selector.scores, graph.labels, k=count)
    _emit(frame.to_csv(index=False, float_format=FLOAT_FORMAT), config.out)


def _read_spreaders(path: str, graph: DirectedGraph) -> List[int]:
    spreaders = []
    with open(path, encoding='utf-8') as handle:
        for line in handle:
            label = line.strip()
            if label and not label.startswith('#'):
                spreaders.append(graph.id_of(label))
    if not spreaders:
        raise ValueError(f'the spreaders file {path} does not list any node')
    return spreaders


def run_sir_command(config: CliConfig) -> None:
    graph = _load_graph(config)
    if config.spreaders_file is not None:
        spreaders = _read_spreaders(config.spreaders_file, graph)
    else:
        spreaders = _selector(config).fit(graph).select(_spreader_count(config, graph))

    params = SirParams(mu=config.mu, beta=config.beta, max_turns=config.max_turns,
                       seed=config.seed, directed=not config.undirected)
    summary = run_many(graph, spreaders, params, config.runs, workers=resolve_workers(config.workers))

    report = summary.as_dict(precision=RESULT_PRECISION)
    report.update({'nodes': graph.n,
                   'spreaders': len(set(spreaders)),
                   'mu': params.mu,
                   'beta': params.beta,
                   'lambda': round(params.lam, RESULT_PRECISION),
                   'seed': params.seed})
    if config.curve_out is not None:
        curve = pd.DataFrame({'turn': range(1, summary.mean_trajectory.size + 1),
                              'mean_R': summary.mean_trajectory})
        with atomic_write(config.curve_out) as handle:
            curve.to_csv(handle, index=False, float_format=FLOAT_FORMAT)
    _emit(json.dumps(report, sort_keys=True, indent=2) + '\n', config.out)


def run_grid(config: CliConfig) -> None:
    plan = ExperimentPlan.from_json(config.plan)
    results = run_plan(plan, workers=resolve_workers(config.workers), progress=config.verbosity > 0)
    for path in results.save(config.out):
        logger.info(f'wrote {path}')


HANDLERS = {'stats': run_stats, 'rank': run_rank, 'sir': run_sir_command, 'grid': run_grid}


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')


def dispatch(argv: Optional[List[str]] = None) -> int:
    """parse argv, run the subcommand and return the exit code"""
    parser = build_parser()
    try:
        namespace = parser.parse_args(argv)
    except SystemExit as stop:
        return stop.code if isinstance(stop.code, int) else EXIT_USAGE

    config = CliConfig.from_namespace(namespace)
    _configure_logging(config.verbosity)
    try:
        HANDLERS[config.command](config)
    except (ValueError, KeyError, TypeError, OSError) as error:
        message = error.args[0] if isinstance(error, KeyError) and error.args else error
        print(f'{PROG}: error: {message}', file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def main() -> None:
    sys.exit(dispatch())
