"""Smoke tests for the python extension built from the C++ core."""

import numpy as np
import pytest

try:
    import teamdec as td
except ImportError:
    import _teamdec as td


def test_example41_oracle():
    inst = td.example41()
    assert inst.assumption2_holds
    assert td.strong_convexity_alpha(inst) == pytest.approx(2.0)

    opt = td.optimal_policy_expected(inst)
    blocks = opt.blocks
    assert blocks[0][0, 0] == pytest.approx(-0.2, abs=1e-9)
    assert blocks[1][0, 0] == pytest.approx(-0.2, abs=1e-9)
    assert td.expected_loss(inst, opt) == pytest.approx(0.6, abs=1e-9)


def test_instance_construction_and_bounds():
    inst = td.ProblemInstance(
        H=np.eye(1), D=np.eye(1), C=np.eye(1), Vxx=np.eye(1), Vvv=np.eye(1),
        output_dims=[1], measurement_dims=[1])
    mb = td.moment_bounds(inst, 1.0, 1.0)
    assert mb["b_l"] == pytest.approx(5.0)
    assert mb["kappa_z"] == pytest.approx(567.0)
    assert mb["b_G_sq"] == pytest.approx(1152.0)
    assert mb["bandit_b_G_sq"] == pytest.approx(5000.0)
    assert td.gaussian_fourth_moment(np.eye(2)) == pytest.approx(8.0)


def test_learners_run_and_are_deterministic():
    inst = td.example41()
    a = td.run_gradient_feedback(inst, horizon=300, b_K=2.0, seed=3)
    b = td.run_gradient_feedback(inst, horizon=300, b_K=2.0, seed=3)
    assert a["losses"] == b["losses"]
    assert len(a["losses"]) == 300
    assert min(a["losses"]) >= 0.0

    c = td.run_bandit_feedback(inst, horizon=300, b_K=2.0, seed=3)
    assert len(c["losses"]) == 300


def test_projection_and_policy():
    pol = td.Policy(output_dims=[1], measurement_dims=[1], blocks=[np.array([[3.0]])])
    clipped = td.project_policy(pol, 1.0, "sv_clip")
    assert clipped.blocks[0][0, 0] == pytest.approx(1.0)
    literal = td.project_policy(pol, 1.0, "paper_literal")
    assert literal.blocks[0][0, 0] == pytest.approx(3.0)


def test_experiment_aggregation():
    inst = td.example41()
    stats = td.run_experiment(inst, replications=4, horizon=50, seed=9, feedback="both")
    assert stats["horizon"] == 50
    assert len(stats["avg_gradient"]) == 50
    assert len(stats["avg_bandit"]) == 50
    again = td.run_experiment(inst, replications=4, horizon=50, seed=9, feedback="both")
    assert stats["avg_gradient"] == again["avg_gradient"]


def test_robust_saddle():
    r = td.RobustInstance(H=np.eye(1), D=np.eye(1), C=np.eye(1),
                          output_dims=[1], measurement_dims=[1])
    assert td.gamma_trivial_upper(r) == pytest.approx(1.0)
    assert td.robust_policy_budget(r) == [pytest.approx(2.0)]
    out = td.saddle_solve(r, tol=1e-8, max_iter=200000)
    assert out["converged"]
    assert out["gamma"] <= 1e-6
    assert out["K"].blocks[0][0, 0] == pytest.approx(-1.0, abs=1e-3)

    relaxed = td.relaxed_instance(r, out["X"])
    assert relaxed.Vxx[0, 0] == pytest.approx(1.0)


def test_error_mapping():
    with pytest.raises(td.TeamdecError):
        td.ProblemInstance(H=np.eye(1), D=np.zeros((1, 1)), C=np.eye(1),
                           Vxx=np.eye(1), Vvv=np.eye(1),
                           output_dims=[1], measurement_dims=[1])
