import math

import numpy as np
import pytest

from weaklab.pointer import readout_std, wrong_port_probability
from weaklab.scenarios import (SCENARIOS, Coupling, ScenarioReport, end_only_trajectory, fixed,
                               return_probability, run_cyclic, run_michelson_weak, run_multiport,
                               run_spin_sequence, run_transmission_delayed_choice, run_well, scaled)
from weaklab.scenarios.cyclic import _binomial_weights
from weaklab.scenarios.well import cell_probabilities, error_budget, ground_density
from weaklab.statkit import Estimate

T5 = 0.556789


def test_coupling_modes():
    assert fixed(0.1).epsilon(10_000) == 0.1
    assert scaled(3).epsilon(10_000) == pytest.approx(0.03)
    assert "lambda" in scaled(3).label() and "epsilon" in fixed(0.1).label()
    with pytest.raises(ValueError):
        Coupling("other", 1.0)
    with pytest.raises(ValueError):
        Coupling("fixed", -1.0)


def test_report_counts_must_add_up():
    with pytest.raises(ValueError):
        ScenarioReport("x", {}, counts={"a": 1, "b": 2}, launched=4)
    with pytest.raises(TypeError):
        ScenarioReport("x", {}, estimates={"a": 1.0})


def test_registry_names():
    assert set(SCENARIOS) == {"run_michelson_weak", "run_transmission_delayed_choice",
                              "run_spin_sequence", "run_cyclic", "run_multiport", "run_well"}


# Michelson ------------------------------------------------------------------

def test_michelson_conserves_photons():
    for choice in ("keep_bs", "remove_bs"):
        rep = run_michelson_weak(0.3, 20_000, fixed(0.2), delayed_choice=choice, rng=1)
        assert sum(rep.counts.values()) == rep.launched == 20_000


def test_michelson_zero_coupling_all_return():
    rep = run_michelson_weak(0.3, 5_000, fixed(0.0), rng=2)
    assert rep.counts == {"source": 5_000, "dark": 0}
    assert rep.diagnostics["source_return_fraction"] == 1.0
    assert rep.warnings and not rep.ledgers


def test_michelson_dark_port_rate():
    rep = run_michelson_weak(0.5, 200_000, fixed(1.0), rng=3)
    p = wrong_port_probability(1.0, 1.0, 0.5)
    assert rep.diagnostics["dark_port_probability"] == p
    assert abs(rep.diagnostics["dark_port_z"]) < 4


def test_michelson_strong_limit_half_escape():
    rep = run_michelson_weak(0.5, 100_000, fixed(1.0), sigma=1e-3, rng=4)
    assert rep.counts["dark"] / 100_000 == pytest.approx(0.5, abs=0.006)


def test_michelson_remove_bs_agreement():
    n = 100_000
    keep = run_michelson_weak(T5, n, fixed(0.3), delayed_choice="keep_bs", rng=5)
    rem = run_michelson_weak(T5, n, fixed(0.3), delayed_choice="remove_bs", rng=5)
    assert abs(rem.diagnostics["which_path_z"]) < 3
    # same seed, same readout stream: identical weak readings
    assert np.array_equal(keep.ledgers["mirror_R"].value, rem.ledgers["mirror_R"].value)
    assert keep.estimates["transmission"] == rem.estimates["transmission"]
    # readings conditioned on the strong outcome centre on 1 and 0
    for key in ("weak_given_R", "weak_given_L"):
        e = rem.estimates[key]
        assert abs(e.value - rem.truth[key]) < 4 * e.std_error


def test_michelson_record_false_matches_record_true():
    a = run_michelson_weak(0.3, 30_000, fixed(0.2), rng=6, record=True, chunk=7_000)
    b = run_michelson_weak(0.3, 30_000, fixed(0.2), rng=6, record=False, chunk=7_000)
    assert not b.ledgers and a.counts == b.counts
    assert a.estimates["transmission"].value == pytest.approx(b.estimates["transmission"].value, rel=1e-10)
    assert a.estimates["transmission"].std_error == pytest.approx(b.estimates["transmission"].std_error, rel=1e-8)


def test_michelson_chunking_invariance():
    a = run_michelson_weak(0.3, 10_000, fixed(0.2), rng=7, chunk=10_000)
    b = run_michelson_weak(0.3, 10_000, fixed(0.2), rng=7, chunk=10_000)
    assert a.ledgers["mirror_R"].to_csv_text() == b.ledgers["mirror_R"].to_csv_text()


@pytest.mark.parametrize("args", [(0.0, 10, fixed(0.1)), (0.5, 0, fixed(0.1)), (0.5, 10, 0.1)])
def test_michelson_validation(args):
    with pytest.raises(ValueError):
        run_michelson_weak(*args)
    with pytest.raises(ValueError):
        run_michelson_weak(0.5, 10, fixed(0.1), delayed_choice="maybe")


def test_delayed_choice_subsets_agree():
    rep = run_transmission_delayed_choice(T5, 200_000, fixed(0.3), rng=8)
    assert sum(rep.counts.values()) == 200_000
    assert abs(rep.diagnostics["keep_remove_z"]) < 4
    assert abs(rep.diagnostics["which_path_z"]) < 4
    assert abs(rep.diagnostics["dark_port_z"]) < 4
    assert len(rep.ledgers["mirror_R_keep"]) + len(rep.ledgers["mirror_R_remove"]) == 200_000


def test_delayed_choice_deterministic_keep_matches_michelson():
    a = run_transmission_delayed_choice(0.4, 20_000, scaled(3), rng=9, keep_probability=1.0)
    b = run_michelson_weak(0.4, 20_000, scaled(3), rng=9, delayed_choice="keep_bs")
    assert a.counts == b.counts
    assert a.ledgers["mirror_R"].to_csv_text() == b.ledgers["mirror_R"].to_csv_text()


# spin -------------------------------------------------------------------------

def test_spin_sequence_weak_values():
    rep = run_spin_sequence(0.4, 1.3, 100_000, 10.0, rng=10)
    assert sum(rep.counts.values()) == 100_000
    assert len(rep.estimates) == 16
    for k, e in rep.estimates.items():
        assert abs(e.value - rep.truth[k]) < 5 * e.std_error, k


def test_spin_truth_weak_values_closed_form():
    # alpha weak value between alpha-eigenstate and anything is its eigenvalue
    rep = run_spin_sequence(0.4, 1.3, 1_000, 10.0, rng=11)
    for k, v in rep.truth.items():
        if k.startswith("alpha_1"):
            assert v == pytest.approx(1.0 if "[+" in k else -1.0, abs=1e-12)
        if k.startswith("beta_1"):
            assert v == pytest.approx(1.0 if k.endswith("+]") else -1.0, abs=1e-12)


def test_spin_validation():
    with pytest.raises(ValueError):
        run_spin_sequence(0.4, 0.4 + math.pi, 100, 1.0)
    with pytest.raises(ValueError):
        run_spin_sequence(0.4, 1.0, 1, 1.0)


# cyclic ------------------------------------------------------------------------

GRID = np.linspace(-12.0, 16.0, 56_001)  # spacing 5e-4


def brute_force_trajectory(t, n, shift, sigma):
    """Pointer wave function on a grid: each pass maps psi -> (1-T) psi + T psi(x - eps),
    with eps a whole number ``shift`` of grid steps."""
    x = GRID
    dx = x[1] - x[0]
    psi = (np.pi * sigma**2) ** -0.25 * np.exp(-x**2 / (2 * sigma**2))
    surv, q = [1.0], [0.0]
    for _ in range(n):
        psi = (1 - t) * psi + t * np.concatenate([np.zeros(shift), psi[:-shift]])
        p = np.sum(psi**2) * dx
        surv.append(p)
        q.append(np.sum(x * psi**2) * dx / p)
    return np.array(surv), np.array(q)


def test_end_only_trajectory_matches_grid_oracle():
    n, shift = 6, 600
    eps = shift * (GRID[1] - GRID[0])
    surv, q = end_only_trajectory(0.3, n, eps, 1.0)
    s2, q2 = brute_force_trajectory(0.3, n, shift, 1.0)
    assert np.allclose(surv, s2, atol=1e-9)
    assert np.allclose(q, q2, atol=1e-9)


def test_end_only_half_transmission_linear():
    n = 400
    surv, q = end_only_trajectory(0.5, n, 1.0 / n, 1.0)
    m = np.arange(n + 1)
    assert np.max(np.abs(q - m / (2 * n))) < 1e-12
    assert q[-1] == pytest.approx(0.5, abs=1e-12)
    assert np.all(np.diff(surv) <= 1e-15) and surv[-1] > 0.999


def test_binomial_weights():
    w = _binomial_weights(0.3, 5)
    from scipy import stats
    assert np.allclose(w, stats.binom.pmf(np.arange(6), 5, 0.3), atol=1e-15)


def test_run_cyclic_end_only():
    rep = run_cyclic(0.5, 300, rng=12, n_runs=5_000)
    assert rep.counts["survived"] + rep.counts["escaped"] == 5_000
    assert rep.diagnostics["final_q_branch_algebra"] == pytest.approx(0.5, abs=1e-12)
    e = rep.estimates["transmission"]
    assert abs(e.value - rep.truth["final_q"]) < 4 * e.std_error


def test_per_cycle_engine_estimates():
    rep = run_cyclic(0.3, 20_000, readout_policy="per_cycle", epsilon=0.5, rng=13)
    e = rep.estimates["transmission"]
    assert abs(e.value - 0.3) < 4 * e.std_error
    assert abs(rep.diagnostics["escape_z"]) < 4
    assert rep.counts["source"] == 20_000
    assert sum(rep.counts.values()) == rep.launched


def test_return_probability_two_port():
    t, eps = 0.3, 0.4
    expect = 1 - 2 * t * (1 - t) * (1 - math.exp(-eps**2 / 4))
    assert return_probability((t, 1 - t), [0], eps, 1.0) == pytest.approx(expect, abs=1e-15)
    assert return_probability((t, 1 - t), [0], eps, 1.0) == pytest.approx(
        1 - wrong_port_probability(eps, 1.0, t), abs=1e-15)


def test_multiport_two_ports_is_cyclic():
    a = run_multiport((0.3, 0.7), 2_000, epsilon=0.3, rng=14)
    b = run_cyclic(0.3, 2_000, readout_policy="per_cycle", epsilon=0.3, rng=14)
    assert a.ledgers["port_0"].to_csv_text() == b.ledgers["port_0"].to_csv_text()
    assert a.counts == b.counts


def test_multiport_consistency():
    rep = run_multiport((0.5, 0.3, 0.2), 40_000, epsilon=0.3, rng=15)
    for k, e in rep.estimates.items():
        assert abs(e.value - rep.truth[k]) < 4 * e.std_error, k
    total = sum(rep.estimates[k].value for k in ("port_0", "port_1", "port_2"))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_multiport_detect_all_warns():
    rep = run_multiport((0.5, 0.3, 0.2), 5_000, epsilon=0.3, rng=16, detect_all=True)
    assert rep.warnings and "sum" in rep.estimates
    e = rep.estimates["sum"]
    assert abs(e.value - 1.0) < 4 * e.std_error


@pytest.mark.parametrize("c", [(0.5, 0.6), (1.2, -0.2), (1.0,)])
def test_multiport_validation(c):
    with pytest.raises(ValueError):
        run_multiport(c, 10)


# well ---------------------------------------------------------------------------

def test_cell_probabilities():
    p, dx = cell_probabilities(99)
    assert p.size == 101 and dx == pytest.approx(0.01)
    assert p.sum() == pytest.approx(1.0)
    assert p[0] == 0 and p[-1] == pytest.approx(0, abs=1e-30)
    # Riemann sum of 2 sin^2 at spacing 0.01 is exact: the raw weights sum to 1
    raw = ground_density(np.arange(101) * dx) * dx
    assert raw.sum() == pytest.approx(1.0, abs=1e-12)


def test_error_budget_closed_form():
    b = error_budget(99, 1000, 0.02, 1.0)
    mid = b[49]
    p = 2 * 0.01
    assert mid == pytest.approx(math.sqrt((0.5 + 0.02**2 * p * (1 - p)) / 0.02**2 / 1000) / 0.01, rel=1e-3)


def test_well_small_run_reports():
    rep = run_well(bins=9, readings_per_detector=200, epsilon=0.05, rng=17)
    assert len(rep.ledgers) == 9 and rep.headline == "x05"
    tr = rep.trajectory
    assert tr["fidelity"][0] == 1.0 and np.all(tr["fidelity"] <= 1 + 1e-12)
    assert 0 <= rep.diagnostics["max_infidelity"] <= 1
    assert rep.collapsed_count == rep.diagnostics["edge_restarts"]


def test_well_unbiased_in_weak_limit():
    rep = run_well(bins=9, readings_per_detector=4_000, epsilon=0.02, rng=18)
    d = rep.diagnostics
    assert abs(d["mean_signed_error"]) < 4 * d["mean_signed_error_se"]
    assert d["rmse"] < d["rmse_budget_95"] * 1.2


def test_well_validation():
    with pytest.raises(ValueError):
        run_well(bins=0)
    with pytest.raises(ValueError):
        run_well(epsilon=0.0)


def test_spin_z_then_x_up_up_group():
    rep = run_spin_sequence(0.0, math.pi / 2, 50_000, 10.0, rng=19)
    for key in ("alpha_1[+,+]", "beta_1[+,+]"):
        assert rep.truth[key] == pytest.approx(1.0, abs=1e-12)
        e = rep.estimates[key]
        assert abs(e.value - 1.0) < 5 * e.std_error


def test_cyclic_wide_pointer_survival():
    rep = run_cyclic(0.5, 1000, sigma=10.0, rng=20, n_runs=100_000)
    s = rep.diagnostics["survival_probability"]
    # overlap oracle: total branch separation 1 against sigma = 10
    assert s >= 1 - 2 * 0.25 * (1 - math.exp(-1 / (4 * 100)))
    assert abs(rep.diagnostics["survival_z"]) < 3


def test_multiport_all_light_on_first_port():
    rep = run_multiport((1.0, 0.0, 0.0), 3_000, epsilon=0.3, rng=21)
    e0, e1 = rep.estimates["port_0"], rep.estimates["port_1"]
    assert abs(e0.value - 1) < 4 * e0.std_error and abs(e1.value) < 4 * e1.std_error
    assert rep.counts["escaped"] == 0


def test_well_midpoint_and_edges():
    rep = run_well(99, 1000, epsilon=0.02, rng=22)
    e = rep.estimates["x50"]
    assert rep.truth["x50"] == pytest.approx(2.0)
    assert abs(e.value - 2.0) < 3 * e.std_error
    assert rep.truth["x01"] == pytest.approx(2 * math.sin(0.01 * math.pi) ** 2)
    assert rep.truth["x01"] == pytest.approx(1.97e-3, rel=1e-2)
    # the strong edge cells at x = 0 and x = 1 carry no probability, so the interior sums to 1
    d = rep.diagnostics
    p, _ = cell_probabilities(99)
    expected = 1.0 - p[0] - p[-1]
    assert abs(d["sum_probability"] - expected) < 3 * d["sum_probability_se"]
