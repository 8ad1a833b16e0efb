import pytest

from irsopt.complexity import (
    CostQuery,
    admm_apg_per_iteration,
    cc_admm_apg,
    cc_ao,
    cc_ladmm,
    cc_pgm,
    cc_spgm,
    cost_table,
    pgm_per_iteration,
)


REFERENCE = CostQuery(mt=16, mr=4, mi=100, ms=4, iterations=10,
                      inner_ladmm=20, inner_spgm=20, inner_ao=10,
                      realizations_ao=100)


def test_reference_per_iteration_count():
    assert admm_apg_per_iteration(REFERENCE) == 23440


def test_reference_totals_exact():
    assert cc_admm_apg(REFERENCE) == 234400
    assert cc_ladmm(REFERENCE) == 366656
    assert cc_ao(REFERENCE) == 1774720
    assert cc_pgm(REFERENCE) == 237400
    assert cc_spgm(REFERENCE) == 20166656


def test_reference_ratios():
    assert round(100 * cc_admm_apg(REFERENCE) / cc_ladmm(REFERENCE), 2) == 63.93
    assert round(100 * cc_admm_apg(REFERENCE) / cc_pgm(REFERENCE), 2) == 98.74


def test_large_array_counts():
    q = CostQuery(mt=64, mr=8, mi=600, ms=4)
    assert admm_apg_per_iteration(q) == 834784
    assert pgm_per_iteration(q) == 1124808
    assert admm_apg_per_iteration(q) < pgm_per_iteration(q)


def test_cost_table_rows_and_order():
    rows = cost_table(REFERENCE)
    assert [r[0] for r in rows] == ["admm_apg", "ladmm", "ao", "pgm", "spgm"]
    table = {name: (per, total) for name, per, total in rows}
    assert table["admm_apg"] == (23440, 234400)
    assert table["ladmm"] == (None, 366656)
    assert table["ao"] == (None, 1774720)
    assert table["pgm"] == (23740, 237400)
    assert table["spgm"] == (None, 20166656)


def test_totals_scale_linearly_with_iterations():
    q1 = CostQuery(mt=16, mr=4, mi=100, ms=4, iterations=1)
    q7 = CostQuery(mt=16, mr=4, mi=100, ms=4, iterations=7)
    assert cc_admm_apg(q7) == 7 * cc_admm_apg(q1)
    assert cc_pgm(q7) == 7 * cc_pgm(q1)


def test_surface_scaling_orders():
    """Leading orders in the surface size: linear for the implemented method
    and the projected-gradient peer, quadratic for the linearized peer, cubic
    for the stochastic peer."""
    def at(mi):
        return CostQuery(mt=16, mr=4, mi=mi, ms=4, iterations=1,
                         inner_ladmm=20, inner_spgm=20)

    big, bigger = at(1000), at(2000)
    assert 1.9 < admm_apg_per_iteration(bigger) / admm_apg_per_iteration(big) < 2.1
    assert 3.5 < cc_ladmm(bigger) / cc_ladmm(big) < 4.1
    assert 7.5 < cc_spgm(bigger) / cc_spgm(big) < 8.1


def test_missing_inner_counts_raise():
    q = CostQuery(mt=16, mr=4, mi=100, ms=4)
    with pytest.raises(ValueError):
        cc_ladmm(q)
    with pytest.raises(ValueError):
        cc_spgm(q)
    with pytest.raises(ValueError):
        cc_ao(q)


def test_query_validation():
    with pytest.raises(ValueError):
        CostQuery(mt=0, mr=4, mi=100, ms=4)
    with pytest.raises(ValueError):
        CostQuery(mt=16, mr=4, mi=100, ms=4, iterations=0)
    with pytest.raises(ValueError):
        CostQuery(mt=16, mr=4, mi=100, ms=4, inner_ladmm=0)


def test_half_integer_terms_round_to_nearest():
    # odd receive count makes the mr^3 / 2 term half-integral
    q = CostQuery(mt=3, mr=3, mi=2, ms=1, iterations=1)
    total = (2 * 3 * 3 * 2 + 3 * 3 * 3 + 9 * 2 + 3 * 2 + 3 * 2 + 2
             + 1.5 * 9 + 9 + 0.5 * 27)
    assert admm_apg_per_iteration(q) == round(total)


def test_solver_reports_matching_cost():
    import numpy as np

    from irsopt.channel import generate_channel_set
    from irsopt.config import SystemConfig
    from irsopt.solver import solve

    cfg = SystemConfig(mt=16, mr=4, mi=100, ms=4, k_max=10, seed=0)
    ch = generate_channel_set(cfg, np.random.default_rng(0))
    res = solve(cfg, ch)
    assert res.cm_count == cc_admm_apg(REFERENCE)
