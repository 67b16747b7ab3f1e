"""Full-scale 500-variable benchmark reproduction (opt in: ``pytest -m slow``)."""

import pytest

from npnsearch import render_table, run_condition, table_spec

pytestmark = pytest.mark.slow


def test_table_14_direction_at_full_scale():
    # 500 variables, 250 cases, 10 runs, penalty discount 2, six algorithms
    result = run_condition(table_spec(14, master_seed=7))
    print()
    print(render_table(result.table, "markdown"))
    assert not result.aborted_cells
    table = result.table
    assert table["GES-BIC-L"].adj_fpr < table["GES-BIC-S"].adj_fpr
    assert table["GES-BIC-L"].adj_rr > table["GES-BIC-S"].adj_rr
    assert table["PC-L"].adj_fpr <= table["PC-S"].adj_fpr
    assert table["PC-GES-L"].adj_fpr <= 0.10
