import logging
import math
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Iterable, List, Optional, Sequence

import numpy as np

from ..graph.core import DirectedGraph

logger = logging.getLogger(__name__)

SUSCEPTIBLE, INFECTED, RECOVERED = 0, 1, 2
MAX_SEED = 2 ** 64


@dataclass(frozen=True)
class SirParams:
    """
    mu: probability that an infected node infects one susceptible out-neighbour in a turn
    beta: probability that an infected node recovers in a turn
    max_turns: safety cap on the number of turns; 10 * n when left empty
    seed: key of the random streams
    directed: spread along out-arcs only; False lets every arc carry the infection both ways
    """
    mu: float
    beta: float
    max_turns: Optional[int] = None
    seed: int = 0
    directed: bool = True

    def __post_init__(self):
        if not 0 <= self.mu <= 1:
            raise ValueError(f'mu must lie in [0, 1], got {self.mu}')
        if not 0 < self.beta <= 1:
            raise ValueError(f'beta must lie in (0, 1], got {self.beta}')
        if self.max_turns is not None and self.max_turns < 1:
            raise ValueError('max_turns must be at least 1')
        if not 0 <= self.seed < MAX_SEED:
            raise ValueError('the seed must be a non-negative 64-bit integer')

    @property
    def lam(self) -> float:
        """the spreading ratio mu / beta"""
        return self.mu / self.beta


@dataclass
class SirOutcome:
    """
    One simulation. trajectory[t - 1] is R(t), the recovered fraction after turn t.
    state_counts[t] holds the (S, I, R) counts after turn t, row 0 being the initial state.
    infection_turn / recovery_turn give the turn in which each node changed state
    (0 for the seeds, -1 when it never happened).
    """
    n: int
    trajectory: np.ndarray
    state_counts: np.ndarray
    infection_turn: np.ndarray
    recovery_turn: np.ndarray
    truncated: bool = False

    @property
    def turns(self) -> int:
        return len(self.trajectory)

    @property
    def recovered(self) -> int:
        return int(self.state_counts[-1, 2])

    @property
    def final_spread(self) -> float:
        return self.recovered / self.n


def make_generator(seed: int, run_index: int = 0) -> np.random.Generator:
    """
    counter-based stream for one run: Philox keyed by (seed, run_index), counter at zero.
    Streams for different runs are independent and can be produced in any order.
    """
    return np.random.Generator(np.random.Philox(key=np.array([seed, run_index], dtype=np.uint64)))


def _as_seeds(graph: DirectedGraph, spreaders: Iterable[int]) -> np.ndarray:
    seeds = np.unique(np.array(list(spreaders), dtype=np.int64))
    if seeds.size == 0:
        raise ValueError('the spreader set is empty')
    if seeds[0] < 0 or seeds[-1] >= graph.n:
        raise ValueError(f'spreaders must be node ids between 0 and {graph.n - 1}')
    return seeds


def run_sir(graph: DirectedGraph,
            spreaders: Iterable[int],
            params: SirParams,
            rng: Optional[np.random.Generator] = None) -> SirOutcome:
    """
    Synchronous SIR from the given spreaders. Each turn:
      1. every node infected at the start of the turn tries each susceptible out-neighbour once,
         succeeding with probability mu (a node with several infected in-neighbours gets several tries);
      2. every node infected at the start of the turn recovers with probability beta.
    Nodes infected during a turn only start spreading on the next one. The run stops when no
    infected node is left, or at max_turns, in which case the outcome is flagged as truncated.
    """
    seeds = _as_seeds(graph, spreaders)
    if rng is None:
        rng = make_generator(params.seed)
    n = graph.n
    indptr, indices = graph.csr('out' if params.directed else 'undirected')
    max_turns = params.max_turns if params.max_turns is not None else 10 * n

    state = np.full(n, SUSCEPTIBLE, dtype=np.int8)
    state[seeds] = INFECTED
    infection_turn = np.full(n, -1, dtype=np.int64)
    infection_turn[seeds] = 0
    recovery_turn = np.full(n, -1, dtype=np.int64)

    infected = seeds
    susceptible_count, recovered_count = n - seeds.size, 0
    counts = [(susceptible_count, seeds.size, 0)]
    trajectory = []
    turn = 0

    while infected.size and turn < max_turns:
        turn += 1

        starts = indptr[infected]
        degrees = indptr[infected + 1] - starts
        total = int(degrees.sum())
        newly_infected = infected[:0]
        if total:
            # positions of every arc leaving an infected node, in CSR order
            offsets = np.repeat(starts - (np.cumsum(degrees) - degrees), degrees)
            targets = indices[offsets + np.arange(total)]
            targets = targets[state[targets] == SUSCEPTIBLE]
            if targets.size:
                hits = rng.random(targets.size) < params.mu
                newly_infected = np.unique(targets[hits])

        recovering = rng.random(infected.size) < params.beta
        recovered_now = infected[recovering]

        state[newly_infected] = INFECTED
        infection_turn[newly_infected] = turn
        state[recovered_now] = RECOVERED
        recovery_turn[recovered_now] = turn

        infected = np.concatenate([infected[~recovering], newly_infected])
        susceptible_count -= newly_infected.size
        recovered_count += recovered_now.size
        counts.append((susceptible_count, infected.size, recovered_count))
        trajectory.append(recovered_count / n)

    truncated = bool(infected.size)
    if truncated:
        logger.warning(f'simulation stopped at the turn cap ({max_turns}) with {infected.size} node(s) still infected')

    return SirOutcome(n=n,
                      trajectory=np.array(trajectory, dtype=float),
                      state_counts=np.array(counts, dtype=np.int64),
                      infection_turn=infection_turn,
                      recovery_turn=recovery_turn,
                      truncated=truncated)


@dataclass
class SirSummary:
    """
    Aggregate of several runs. Means and deviations are computed from the integer recovered
    counts, so they are exact rationals rounded once and do not depend on the order of runs.
    recovered_total is the number of recovered nodes summed over runs; comparing it between sets
    simulated with the same n and runs is exact.
    mean_trajectory pads shorter runs with their terminal value.
    """
    n: int
    runs: int
    recovered_total: int
    mean_final_spread: float
    stddev_final_spread: float
    mean_turns: float
    truncated_runs: int
    mean_trajectory: np.ndarray = field(repr=False)
    final_spreads: np.ndarray = field(repr=False)

    @classmethod
    def from_outcomes(cls, outcomes: Sequence[SirOutcome]) -> 'SirSummary':
        if not outcomes:
            raise ValueError('cannot summarize zero runs')
        n = outcomes[0].n
        runs = len(outcomes)
        recovered = [outcome.recovered for outcome in outcomes]

        total = sum(recovered)
        # runs^2 * variance of the counts, kept in integers
        scaled_variance = runs * sum(count * count for count in recovered) - total * total
        mean_final_spread = total / (runs * n)
        stddev_final_spread = math.sqrt(scaled_variance) / (runs * n)

        horizon = max(outcome.turns for outcome in outcomes)
        padded = np.zeros((runs, horizon), dtype=np.int64)
        for row, outcome in enumerate(outcomes):
            per_turn = outcome.state_counts[1:, 2]
            padded[row, :per_turn.size] = per_turn
            padded[row, per_turn.size:] = outcome.recovered
        mean_trajectory = padded.sum(axis=0) / (runs * n)

        return cls(n=n,
                   runs=runs,
                   recovered_total=int(total),
                   mean_final_spread=mean_final_spread,
                   stddev_final_spread=stddev_final_spread,
                   mean_turns=sum(outcome.turns for outcome in outcomes) / runs,
                   truncated_runs=sum(outcome.truncated for outcome in outcomes),
                   mean_trajectory=mean_trajectory,
                   final_spreads=np.array(recovered, dtype=float) / n)

    def as_dict(self, precision: Optional[int] = None) -> dict:
        values = {'runs': self.runs,
                  'mean_final_spread': self.mean_final_spread,
                  'stddev_final_spread': self.stddev_final_spread,
                  'mean_turns': self.mean_turns,
                  'truncated_runs': self.truncated_runs}
        if precision is not None:
            values = {key: round(value, precision) if isinstance(value, float) else value
                      for key, value in values.items()}
        return values


def _run_range(graph: DirectedGraph, seeds: List[int], params: SirParams, start: int, stop: int) -> List[SirOutcome]:
    return [run_sir(graph, seeds, params, rng=make_generator(params.seed, run_index))
            for run_index in range(start, stop)]


def run_many(graph: DirectedGraph,
             spreaders: Iterable[int],
             params: SirParams,
             runs: int,
             workers: int = 1) -> SirSummary:
    """
    `runs` independent simulations; run i draws from make_generator(params.seed, i), so the summary
    is the same whether the runs are split over workers or not.
    """
    if not isinstance(runs, (int, np.integer)) or runs < 1:
        raise ValueError('the number of runs must be a positive integer')
    seeds = _as_seeds(graph, spreaders).tolist()

    if workers > 1 and runs > 1:
        bounds = np.linspace(0, runs, min(workers, runs) + 1).astype(int)
        chunks = [(graph, seeds, params, int(start), int(stop)) for start, stop in zip(bounds[:-1], bounds[1:])]
        with Pool(len(chunks)) as pool:
            outcomes = [outcome for chunk in pool.starmap(_run_range, chunks) for outcome in chunk]
    else:
        outcomes = _run_range(graph, seeds, params, 0, runs)

    summary = SirSummary.from_outcomes(outcomes)
    if summary.truncated_runs:
        logger.warning(f'{summary.truncated_runs} of {runs} runs hit the turn cap')
    return summary
