import json
import logging
import os
from dataclasses import asdict, dataclass, field
from multiprocessing import Pool
from numbers import Real
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..data.edge_list import load_edge_list
from ..data.util import RESULT_PRECISION, atomic_write, derive_seed, round_result, staged_directory
from ..graph.core import DirectedGraph
from ..model.helper import summarize_plan
from ..model.model_caller import METHODS, select_for_fractions
from ..simulation.sir import SirParams, SirSummary, run_many

logger = logging.getLogger(__name__)

DEFAULT_METHODS = list(METHODS)
DEFAULT_P_VALUES = [0.0001, 0.0005, 0.0008, 0.001, 0.002, 0.003, 0.005, 0.008,
                    0.01, 0.015, 0.02, 0.025, 0.03, 0.035, 0.04]
DEFAULT_MU_VALUES = [round(0.05 * step, 2) for step in range(1, 12)]  # 0.05 .. 0.55
DEFAULT_BETA_VALUES = [round(0.1 * step, 1) for step in range(1, 7)]  # 0.1 .. 0.6
DEFAULT_RUNS = 1000

# operating points of the three reference figures
DEFAULT_FIGURES = {'rt_curve': {'p': 0.02, 'mu': 0.3, 'beta': 0.2},
                   'p_sweep': {'mu': 0.4, 'beta': 0.2},
                   'beta_sweep': {'p': 0.01, 'mu': 0.5,
                                  'beta_values': [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]}}

PLAN_KEYS = ['graph_path', 'methods', 'p_values', 'mu_values', 'beta_values', 'runs', 'seed',
             'paired_seeds', 'reverse_arcs', 'figures']

VICTORY_COLUMNS = ['p', 'method', 'wins', 'ties']
# recovered_total is the exact sum of recovered counts over the runs of a cell; winners are picked on it
RAW_COLUMNS = ['p', 'mu', 'beta', 'method', 'mean_final_spread', 'stddev', 'runs', 'recovered_total']

# allowed range of every grid parameter, shared by the grid and the figure settings
PARAMETER_RANGES = {'p': ('(0, 1]', lambda value: 0 < value <= 1),
                    'mu': ('[0, 1]', lambda value: 0 <= value <= 1),
                    'beta': ('(0, 1]', lambda value: 0 < value <= 1)}
# settings each figure accepts on top of its defaults
FIGURE_KEYS = {'rt_curve': ['p', 'mu', 'beta'],
               'p_sweep': ['mu', 'beta', 'p_values'],
               'beta_sweep': ['p', 'mu', 'beta_values']}


class PlanError(ValueError):
    """the experiment plan cannot be run"""


def _check_value(parameter: str, value, where: str) -> None:
    bounds, accept = PARAMETER_RANGES[parameter]
    if isinstance(value, bool) or not isinstance(value, Real) or not accept(value):
        raise PlanError(f'{where}: every {parameter} must be a number in {bounds}, got {value!r}')


def _check_values(parameter: str, values, where: str) -> None:
    if not isinstance(values, (list, tuple)) or not values:
        raise PlanError(f'{where}: {parameter}_values must be a non-empty list')
    for value in values:
        _check_value(parameter, value, where)
    if len(set(values)) != len(values):
        raise PlanError(f'{where}: {parameter}_values must not repeat, got {list(values)}')


@dataclass
class ExperimentPlan:
    """
    Everything a tournament needs. paired_seeds=True gives every method of a cell the same random
    streams (the method index is left out of the seed), so identical spreader sets score identically.
    figures switches on the figure-ready sweeps; values missing from it fall back to DEFAULT_FIGURES.
    """
    graph_path: Optional[str] = None
    methods: List[str] = field(default_factory=lambda: list(DEFAULT_METHODS))
    p_values: List[float] = field(default_factory=lambda: list(DEFAULT_P_VALUES))
    mu_values: List[float] = field(default_factory=lambda: list(DEFAULT_MU_VALUES))
    beta_values: List[float] = field(default_factory=lambda: list(DEFAULT_BETA_VALUES))
    runs: int = DEFAULT_RUNS
    seed: int = 0
    paired_seeds: bool = True
    reverse_arcs: bool = False
    figures: Optional[dict] = None

    def __post_init__(self):
        self.validate()

    @classmethod
    def from_dict(cls, config: dict) -> 'ExperimentPlan':
        if not isinstance(config, dict):
            raise PlanError('the plan must be a json object')
        unknown = sorted(set(config) - set(PLAN_KEYS))
        if unknown:
            raise PlanError(f'unknown plan key(s) {unknown}; only support {PLAN_KEYS}')
        return cls(**config)

    @classmethod
    def from_json(cls, path: Union[str, os.PathLike]) -> 'ExperimentPlan':
        with open(path, encoding='utf-8') as handle:
            try:
                config = json.load(handle)
            except json.JSONDecodeError as error:
                raise PlanError(f'the plan file {path} is not valid json: {error}') from error
        plan = cls.from_dict(config)
        if plan.graph_path is not None and not os.path.isabs(plan.graph_path):
            # relative graph paths are read from the plan's folder
            plan.graph_path = os.path.join(os.path.dirname(os.path.abspath(path)), plan.graph_path)
        return plan

    def validate(self) -> None:
        if not self.methods:
            raise PlanError('the plan needs at least one method')
        for method in self.methods:
            if method not in METHODS:
                raise PlanError(f'method {method} is not supported; only support {METHODS}')
        if len(set(self.methods)) != len(self.methods):
            raise PlanError('methods must not repeat')
        _check_values('p', self.p_values, 'plan')
        _check_values('mu', self.mu_values, 'plan')
        _check_values('beta', self.beta_values, 'plan')
        if not isinstance(self.runs, int) or isinstance(self.runs, bool) or self.runs < 1:
            raise PlanError('runs must be a positive integer')
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise PlanError('seed must be a non-negative integer')
        if self.figures is not None:
            self._validate_figures()

    def _validate_figures(self) -> None:
        if not isinstance(self.figures, dict):
            raise PlanError('figures must be a json object')
        unknown = sorted(set(self.figures) - set(DEFAULT_FIGURES))
        if unknown:
            raise PlanError(f'unknown figure(s) {unknown}; only support {list(DEFAULT_FIGURES)}')
        for name, settings in self.figures.items():
            where = f'figure {name}'
            if not isinstance(settings, dict):
                raise PlanError(f'{where}: settings must be a json object')
            unknown = sorted(set(settings) - set(FIGURE_KEYS[name]))
            if unknown:
                raise PlanError(f'{where}: unknown setting(s) {unknown}; only support {FIGURE_KEYS[name]}')
            for key, value in settings.items():
                if key.endswith('_values'):
                    _check_values(key[:-len('_values')], value, where)
                else:
                    _check_value(key, value, where)

    @property
    def cells_per_row(self) -> int:
        return len(self.mu_values) * len(self.beta_values)

    @property
    def total_simulations(self) -> int:
        return len(self.p_values) * self.cells_per_row * len(self.methods) * self.runs

    def figure_settings(self, name: str) -> dict:
        settings = dict(DEFAULT_FIGURES[name])
        settings.update((self.figures or {}).get(name, {}))
        return settings

    def cell_seed(self, p_index: int, mu_index: int, beta_index: int, method_index: int) -> int:
        keys = [p_index, mu_index, beta_index]
        if not self.paired_seeds:
            keys.append(method_index)
        return derive_seed(self.seed, *keys)

    def to_dict(self) -> dict:
        return asdict(self)


class VictoryTable:
    """
    Per p, how many (mu, beta) cells each method won outright. A cell whose best mean is shared
    by several methods goes to nobody and is counted in `ties`, so wins + ties equals the cell count.
    """

    def __init__(self, frame: pd.DataFrame, methods: Sequence[str], cells_per_row: int):
        self.frame = frame[VICTORY_COLUMNS].reset_index(drop=True)
        self.methods = list(methods)
        self.cells_per_row = cells_per_row

    @classmethod
    def from_results(cls, raw: pd.DataFrame, methods: Sequence[str]) -> 'VictoryTable':
        rows = []
        cells_per_row = 0
        for p, per_p in raw.groupby('p', sort=False):
            wins = dict.fromkeys(methods, 0)
            ties = 0
            cells = per_p.groupby(['mu', 'beta'], sort=False)
            cells_per_row = len(cells)
            for _, cell in cells:
                best = cell['recovered_total'].max()
                leaders = cell.loc[cell['recovered_total'] == best, 'method'].tolist()
                if len(leaders) == 1:
                    wins[leaders[0]] += 1
                else:
                    ties += 1
            for method in methods:
                rows.append({'p': float(p), 'method': method, 'wins': wins[method], 'ties': ties})
        frame = pd.DataFrame(rows, columns=VICTORY_COLUMNS).astype({'p': float, 'wins': np.int64, 'ties': np.int64})
        return cls(frame, methods, cells_per_row)

    def wide(self) -> pd.DataFrame:
        """p x method win counts with the tie count as last column"""
        wins = self.frame.pivot(index='p', columns='method', values='wins')[self.methods]
        ties = self.frame.groupby('p', sort=False)['ties'].first()
        wins['ties'] = ties
        return wins.loc[self.frame['p'].drop_duplicates().tolist()]

    def totals(self) -> pd.Series:
        """wins per method over every p"""
        return self.frame.groupby('method', sort=False)['wins'].sum()[self.methods]

    def row_sums(self) -> pd.Series:
        table = self.wide()
        return table.sum(axis=1)

    def to_csv(self, path) -> None:
        with atomic_write(path) as handle:
            self.frame.to_csv(handle, index=False, float_format=f'%.{RESULT_PRECISION}f')

    @classmethod
    def read_csv(cls, path) -> 'VictoryTable':
        frame = pd.read_csv(path).astype({'p': float, 'wins': np.int64, 'ties': np.int64})
        methods = frame['method'].drop_duplicates().tolist()
        first_row = frame[frame['p'] == frame['p'].iloc[0]]
        cells = int(first_row['wins'].sum() + first_row['ties'].iloc[0])
        return cls(frame, methods, cells)

    def __eq__(self, other):
        if not isinstance(other, VictoryTable):
            return NotImplemented
        return self.methods == other.methods and self.frame.equals(other.frame)

    __hash__ = None

    def __repr__(self):
        return f'VictoryTable(rows={self.frame["p"].nunique()}, methods={self.methods})'


@dataclass
class ExperimentResults:
    raw: pd.DataFrame
    victory_table: VictoryTable
    spreaders: Dict[str, Dict[float, List[int]]] = field(default_factory=dict)
    figures: Dict[str, pd.DataFrame] = field(default_factory=dict)

    def save(self, out_dir: Union[str, os.PathLike]) -> List[str]:
        """write every table at once; nothing lands in out_dir unless all files were written"""
        written = []
        with staged_directory(out_dir) as scratch:
            self.victory_table.to_csv(os.path.join(scratch, 'victory_table.csv'))
            write_frame(self.raw, os.path.join(scratch, 'raw_results.csv'))
            written.extend(['victory_table.csv', 'raw_results.csv'])
            for name, frame in sorted(self.figures.items()):
                write_frame(frame, os.path.join(scratch, f'{name}.csv'))
                written.append(f'{name}.csv')
        return [os.path.join(out_dir, name) for name in written]

    @classmethod
    def load(cls, out_dir: Union[str, os.PathLike], methods: Optional[Sequence[str]] = None) -> 'ExperimentResults':
        raw = pd.read_csv(os.path.join(out_dir, 'raw_results.csv'))
        raw = raw.astype({'p': float, 'mu': float, 'beta': float, 'mean_final_spread': float,
                          'stddev': float, 'runs': np.int64, 'recovered_total': np.int64})
        if methods is None:
            methods = raw['method'].drop_duplicates().tolist()
        return cls(raw=raw, victory_table=VictoryTable.from_results(raw, methods))


def write_frame(frame: pd.DataFrame, path) -> None:
    with atomic_write(path) as handle:
        frame.to_csv(handle, index=False, float_format=f'%.{RESULT_PRECISION}f')


# the graph is shipped once per worker process instead of once per cell
_WORKER_GRAPH: Optional[DirectedGraph] = None


def _init_worker(graph: DirectedGraph) -> None:
    global _WORKER_GRAPH
    _WORKER_GRAPH = graph


def _evaluate_cell(task: Tuple) -> Tuple[Tuple, SirSummary]:
    key, spreaders, params, runs = task
    return key, run_many(_WORKER_GRAPH, spreaders, params, runs)


def _evaluate_cells(graph: DirectedGraph, tasks: List[Tuple], workers: int, progress: bool) -> List[Tuple]:
    """results come back in task order whatever the number of workers"""
    bar = tqdm(total=len(tasks), disable=not progress, desc='cells')
    results = []
    if workers > 1:
        with Pool(workers, initializer=_init_worker, initargs=(graph,)) as pool:
            for result in pool.imap(_evaluate_cell, tasks, chunksize=max(1, len(tasks) // (workers * 16))):
                results.append(result)
                bar.update()
    else:
        _init_worker(graph)
        for task in tasks:
            results.append(_evaluate_cell(task))
            bar.update()
    bar.close()
    return results


def _select_all(graph: DirectedGraph,
                methods: Sequence[str],
                p_values: Sequence[float]) -> Dict[str, Dict[float, List[int]]]:
    spreaders = {}
    for method in methods:
        try:
            spreaders[method] = select_for_fractions(graph, method, p_values)
        except (ValueError, KeyError, TypeError) as error:
            raise PlanError(f'method {method} cannot select spreaders on this graph: {error}') from error
    return spreaders


def run_plan(plan: ExperimentPlan,
             graph: Optional[DirectedGraph] = None,
             workers: int = 1,
             progress: bool = False) -> ExperimentResults:
    """
    The tournament: every method picks its spreaders once per p (the choice does not depend on mu
    or beta), each (p, mu, beta) cell simulates every method's set `runs` times, and the method with
    the strictly highest mean final spread wins the cell. Every method of a cell shares n and runs, so
    the winner is picked on the integer recovered_total; raw_results.csv keeps it, and reloading the
    file rebuilds exactly the same table whatever the rounding of the printed means.
    """
    if graph is None:
        if plan.graph_path is None:
            raise PlanError('the plan has no graph_path and no graph was given')
        graph = load_edge_list(plan.graph_path, reverse=plan.reverse_arcs)
    summarize_plan(plan, graph)

    spreaders = _select_all(graph, plan.methods, plan.p_values)

    tasks = []
    for p_index, p in enumerate(plan.p_values):
        for mu_index, mu in enumerate(plan.mu_values):
            for beta_index, beta in enumerate(plan.beta_values):
                for method_index, method in enumerate(plan.methods):
                    params = SirParams(mu=mu, beta=beta,
                                       seed=plan.cell_seed(p_index, mu_index, beta_index, method_index))
                    tasks.append(((p, mu, beta, method), spreaders[method][p], params, plan.runs))

    logger.info(f'running {len(tasks)} cells with {workers} worker(s)')
    records = []
    for (p, mu, beta, method), summary in _evaluate_cells(graph, tasks, workers, progress):
        records.append({'p': p, 'mu': mu, 'beta': beta, 'method': method,
                        'mean_final_spread': round_result(summary.mean_final_spread),
                        'stddev': round_result(summary.stddev_final_spread),
                        'runs': plan.runs,
                        'recovered_total': summary.recovered_total})
    raw = pd.DataFrame(records, columns=RAW_COLUMNS).astype({'runs': np.int64, 'recovered_total': np.int64})
    results = ExperimentResults(raw=raw,
                                victory_table=VictoryTable.from_results(raw, plan.methods),
                                spreaders=spreaders)

    if plan.figures is not None:
        results.figures = run_figures(plan, graph, workers=workers)
    return results


def rt_curve(graph: DirectedGraph,
             method: str,
             p: float,
             mu: float,
             beta: float,
             runs: int = DEFAULT_RUNS,
             seed: int = 0,
             workers: int = 1) -> pd.Series:
    """mean R(t) over runs, indexed by turn starting at 1"""
    spreaders = select_for_fractions(graph, method, [p])[p]
    summary = run_many(graph, spreaders, SirParams(mu=mu, beta=beta, seed=derive_seed(seed, 0)), runs, workers=workers)
    index = pd.RangeIndex(1, summary.mean_trajectory.size + 1, name='turn')
    return pd.Series(summary.mean_trajectory, index=index, name='mean_R')


def p_sweep(graph: DirectedGraph,
            methods: Sequence[str],
            p_values: Sequence[float],
            mu: float,
            beta: float,
            runs: int = DEFAULT_RUNS,
            seed: int = 0,
            workers: int = 1) -> pd.DataFrame:
    """mean final spread for every p (rows) and method (columns)"""
    spreaders = _select_all(graph, methods, p_values)
    table = pd.DataFrame(index=pd.Index(list(p_values), name='p'), columns=list(methods), dtype=float)
    for p_index, p in enumerate(p_values):
        params = SirParams(mu=mu, beta=beta, seed=derive_seed(seed, p_index))
        for method in methods:
            summary = run_many(graph, spreaders[method][p], params, runs, workers=workers)
            table.loc[p, method] = summary.mean_final_spread
    return table


def beta_sweep(graph: DirectedGraph,
               methods: Sequence[str],
               p: float,
               mu: float,
               beta_values: Sequence[float],
               runs: int = DEFAULT_RUNS,
               seed: int = 0,
               workers: int = 1) -> pd.DataFrame:
    """mean final spread for every beta (rows) and method (columns); larger beta means smaller mu / beta"""
    spreaders = _select_all(graph, methods, [p])
    table = pd.DataFrame(index=pd.Index(list(beta_values), name='beta'), columns=list(methods), dtype=float)
    for beta_index, beta in enumerate(beta_values):
        params = SirParams(mu=mu, beta=beta, seed=derive_seed(seed, beta_index))
        for method in methods:
            summary = run_many(graph, spreaders[method][p], params, runs, workers=workers)
            table.loc[beta, method] = summary.mean_final_spread
    return table


def run_figures(plan: ExperimentPlan, graph: DirectedGraph, workers: int = 1) -> Dict[str, pd.DataFrame]:
    """long-format, figure-ready tables for the R(t) curve, the p sweep and the beta sweep"""
    figures = {}

    settings = plan.figure_settings('rt_curve')
    curves = []
    for method in plan.methods:
        curve = rt_curve(graph, method, settings['p'], settings['mu'], settings['beta'],
                         runs=plan.runs, seed=plan.seed, workers=workers)
        curves.append(pd.DataFrame({'turn': curve.index, 'method': method, 'mean_R': curve.values}))
    figures['rt_curve'] = pd.concat(curves, ignore_index=True)

    settings = plan.figure_settings('p_sweep')
    sweep = p_sweep(graph, plan.methods, settings.get('p_values', plan.p_values), settings['mu'], settings['beta'],
                    runs=plan.runs, seed=plan.seed, workers=workers)
    figures['p_sweep'] = (sweep.reset_index()
                          .melt(id_vars='p', var_name='method', value_name='mean_final_spread'))

    settings = plan.figure_settings('beta_sweep')
    sweep = beta_sweep(graph, plan.methods, settings['p'], settings['mu'], settings['beta_values'],
                       runs=plan.runs, seed=plan.seed, workers=workers)
    long = sweep.reset_index().melt(id_vars='beta', var_name='method', value_name='mean_final_spread')
    long.insert(1, 'lambda', settings['mu'] / long['beta'])
    figures['beta_sweep'] = long
    return figures
