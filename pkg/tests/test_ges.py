import numpy as np
import pytest

from npnsearch import (
    CovarianceSummary,
    GesConfig,
    PcConfig,
    ScoreConfig,
    apply_meek_rules,
    covariance,
    dag_to_cpdag,
    ges_search,
    parameterize,
    pc_adjacencies,
    pc_ges_search,
    pdag_to_dag,
    random_dag,
    simulate,
)
from npnsearch.ges import _SearchState, _select_delete, _select_insert

from oracles import all_dags, best_cpdag_by_exhaustion, total_score

BIC = ScoreConfig("BIC", 1.0)

COLLIDER_COV = CovarianceSummary(
    np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [1.0, 1.0, 3.0]]), 10_000)


def sample_cov(nodes, edges, cases, seed, disturbance="G", connection="L"):
    rng = np.random.default_rng(seed)
    dag = random_dag(nodes, edges, seed=int(rng.integers(2**32)))
    model = parameterize(dag, disturbance, connection, seed=int(rng.integers(2**32)))
    data = simulate(model, cases, seed=int(rng.integers(2**32)))
    return dag, covariance(data)


# -- trivial cases ------------------------------------------------------------

def test_ges_diagonal_covariance_gives_empty_pattern():
    cov = CovarianceSummary(np.eye(5), 1000)
    pattern = ges_search(cov, GesConfig(score=BIC))
    assert pattern.adjacencies() == set()


def test_ges_empty_restriction_always_empty():
    _, cov = sample_cov(6, 8, 400, seed=0)
    pattern = ges_search(cov, GesConfig(score=BIC, allowed_adjacencies=frozenset()))
    assert pattern.adjacencies() == set()


def test_ges_recovers_collider():
    pattern = ges_search(COLLIDER_COV, GesConfig(score=BIC))
    assert pattern.is_directed(0, 2) and pattern.is_directed(1, 2)
    assert not pattern.adjacent(0, 1)
    # agrees with exhaustive total-score maximization over all 3-node DAGs
    assert pattern == best_cpdag_by_exhaustion(COLLIDER_COV, BIC)


# -- optimality against brute force ------------------------------------------------

def test_ges_matches_exhaustive_search_on_4_node_models():
    dags = all_dags(4)
    hits = 0
    for trial in range(20):
        _, cov = sample_cov(4, 4, 10_000, seed=100 + trial)
        got = ges_search(cov, GesConfig(score=BIC))
        if got == best_cpdag_by_exhaustion(cov, BIC, dags=dags):
            hits += 1
    assert hits >= 18


def test_ges_aic_also_runs():
    _, cov = sample_cov(6, 6, 2000, seed=5)
    pattern = ges_search(cov, GesConfig(score=ScoreConfig("AIC", 1.0)))
    bic = ges_search(cov, GesConfig(score=BIC))
    # AIC penalizes less, so it never finds fewer adjacencies here
    assert len(pattern.adjacencies()) >= len(bic.adjacencies())


# -- per-step properties -------------------------------------------------------------


def _step_through_ges(cov, config):
    """Replay the two phases, recording the total score after every move."""
    state = _SearchState(cov, config)
    state.init_deltas()
    totals = [total_score(cov, pdag_to_dag(state.pg), config.score)]
    deltas = []
    while True:
        move = _select_insert(state)
        if move is None:
            break
        x, y, t, _na = move
        before = dict(state.pg._marks)
        deltas.append(state.deltas[x, y])
        state.pg.add_directed(x, y)
        for v in t:
            state.pg.orient(v, y)
        state.rebuild(before)
        totals.append(total_score(cov, pdag_to_dag(state.pg), config.score))
    forward_steps = len(deltas)
    while True:
        move = _select_delete(state)
        if move is None:
            break
        delta, x, y, h = move
        deltas.append(delta)
        pg = state.pg
        pg.remove_edge(x, y)
        for v in h:
            if pg.is_undirected(y, v):
                pg.orient(y, v)
            if pg.adjacent(x, v) and pg.is_undirected(x, v):
                pg.orient(x, v)
        from npnsearch.graph import _dag_to_cpdag_state

        state.pg = _dag_to_cpdag_state(pdag_to_dag(pg))
        totals.append(total_score(cov, pdag_to_dag(state.pg), config.score))
    return state.pg.freeze(), totals, deltas, forward_steps


def test_ges_score_is_monotone_and_deltas_are_exact():
    for seed in (11, 12, 13):
        _, cov = sample_cov(8, 9, 600, seed=seed)
        config = GesConfig(score=BIC)
        final, totals, deltas, _ = _step_through_ges(cov, config)
        for a, b in zip(totals, totals[1:]):
            assert b > a - 1e-9
        # each move's claimed delta equals the realized total-score change
        for (a, b), d in zip(zip(totals, totals[1:]), deltas):
            assert b - a == pytest.approx(d, abs=1e-6)
        assert final == ges_search(cov, config)


def test_ges_output_is_a_valid_cpdag():
    for seed in (21, 22, 23, 24):
        _, cov = sample_cov(10, 12, 400, seed=seed)
        pattern = ges_search(cov, GesConfig(score=BIC))
        assert pattern.bidirected_edges() == set()
        assert apply_meek_rules(pattern) == pattern
        # directed part extends to a DAG whose pattern is the output itself
        assert dag_to_cpdag(pdag_to_dag(pattern)) == pattern


# -- restricted search and the hybrid ---------------------------------------------------

def test_restricted_search_stays_inside_allowed_set():
    for seed in (31, 32):
        _, cov = sample_cov(8, 10, 500, seed=seed)
        unrestricted = ges_search(cov, GesConfig(score=BIC))
        found = sorted(unrestricted.adjacencies())
        allowed = frozenset(found[: len(found) // 2])
        restricted = ges_search(cov, GesConfig(score=BIC, allowed_adjacencies=allowed))
        assert restricted.adjacencies() <= set(allowed)


def test_pc_ges_trivial_and_collider():
    diag = CovarianceSummary(np.eye(4), 1000)
    assert pc_ges_search(diag, PcConfig(), BIC).adjacencies() == set()
    pattern = pc_ges_search(COLLIDER_COV, PcConfig(), BIC)
    assert pattern.is_directed(0, 2) and pattern.is_directed(1, 2)
    assert pattern == ges_search(COLLIDER_COV, GesConfig(score=BIC))


def test_pc_ges_never_returns_an_adjacency_pc_dropped():
    dag, cov = sample_cov(10, 12, 300, seed=40, disturbance="NG1", connection="NL1")
    allowed = pc_adjacencies(cov, PcConfig())
    pattern = pc_ges_search(cov, PcConfig(), BIC)
    assert pattern.adjacencies() <= allowed
    truth = dag_to_cpdag(dag).adjacencies()
    dropped = truth - allowed
    if dropped:  # PC usually drops something at this sample size
        assert dropped & pattern.adjacencies() == set()


def test_ges_config_normalizes_pair_order():
    config = GesConfig(score=BIC, allowed_adjacencies=frozenset({(2, 0), (1, 3)}))
    assert config.allowed_adjacencies == frozenset({(0, 2), (1, 3)})
