import numpy as np
import pytest

import utsp


def test_square_oracle_and_baseline():
    square = utsp.Instance(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]), "square")
    order, length = utsp.held_karp_exact(square)
    assert length == pytest.approx(4.0)
    assert sorted(order) == [0, 1, 2, 3]
    _, base = utsp.nn_two_opt_baseline(square, 7)
    assert base == pytest.approx(4.0)


def test_heatmap_of_permutation_is_cycle():
    q = [2, 0, 3, 1, 4]
    t = np.zeros((5, 5))
    for pos, city in enumerate(q):
        t[city, pos] = 1.0
    h = utsp.indicator_to_heatmap(t)
    for pos, city in enumerate(q):
        assert h[city, q[(pos + 1) % 5]] == 1.0
    assert h.sum() == 5.0


def test_softmax_columns_sum_to_one():
    s = np.random.default_rng(0).normal(size=(6, 6))
    t = utsp.column_softmax(s)
    assert np.allclose(t.sum(axis=0), 1.0)


def test_pipeline_matches_oracle_on_small_instance():
    inst = utsp.generate_random(9, 4)
    params = utsp.search_preset("tsp20")
    params.max_rounds = 10
    cfg = utsp.TrainConfig.defaults_for(inst.n)
    res = utsp.solve_pipeline(inst, cfg, params, 1)
    _, best = utsp.held_karp_exact(inst)
    assert res["length"] == pytest.approx(best, abs=1e-9)


def test_optimize_then_search():
    inst = utsp.generate_random(15, 2)
    trained = utsp.optimize_heatmap(inst, utsp.TrainConfig.defaults_for(inst.n))
    assert trained["final_loss"]["total"] <= trained["losses"][0]
    hp = utsp.top_m_filter(trained["heat"], 5)
    assert np.allclose(hp, hp.T)
    params = utsp.search_preset("tsp20")
    params.max_rounds = 3
    order, length = utsp.run_search(inst, hp, params, 0)
    assert sorted(order) == list(range(15))
    assert length == pytest.approx(utsp.tour_length(inst, order))


def test_invalid_arguments_raise():
    with pytest.raises(ValueError):
        utsp.held_karp_exact(utsp.generate_random(19, 0))
    with pytest.raises(ValueError):
        utsp.search_preset("tsp30")
    with pytest.raises(ValueError):
        utsp.Instance(np.zeros((4, 3)))
