import logging

logger = logging.getLogger(__name__)


def summarize_input(graph, method=None, count=None):
    logger.info('-' * 40)
    logger.info('BASIC INFO FROM INPUT NETWORK')
    logger.info('-' * 40)
    logger.info(f'NODES: {graph.n}')
    logger.info(f'ARCS: {graph.m}')
    if method is not None:
        logger.info(f'METHOD: {method}')
    if count is not None:
        logger.info(f'SPREADERS: {count}')


def summarize_plan(plan, graph):
    logger.info('-' * 40)
    logger.info('BASIC INFO FROM EXPERIMENT PLAN')
    logger.info('-' * 40)
    logger.info(f'NODES: {graph.n}, ARCS: {graph.m}')
    logger.info(f'METHODS: {plan.methods}')
    logger.info(f'P VALUES: {plan.p_values}')
    logger.info(f'CELLS PER ROW: {plan.cells_per_row} ({len(plan.mu_values)} mu x {len(plan.beta_values)} beta)')
    logger.info(f'RUNS PER CELL: {plan.runs}')
    logger.info(f'TOTAL SIMULATIONS: {plan.total_simulations}')
