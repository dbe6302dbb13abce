import math

import numpy as np
import pytest

from densint import bounds
from densint.chains import run_chain
from densint.errors import InvalidArgument, NeedsReference
from densint.estimators import (
    Metropolis,
    SimpleMC,
    batch_means_se,
    delta_star,
    estimate_mh,
    estimate_simple,
    measure_rmse,
    prior_averaged_rmse,
    worst_case_over_family,
)
from densint.geometry import ConvexBody, packing_on_ball
from densint.instances import (
    IntegrandOracle,
    ProblemInstance,
    WeightOracle,
    fad_family,
    make_fc_instance,
    make_smooth_instance,
    sample_fc_prior,
    tilted_interval_instance,
)
from densint.rng import ChainBudget, RngStream, derive_seed, streams


def with_rho(inst, c):
    return ProblemInstance(inst.body, inst.f, inst.rho.scaled(c), inst.truth, inst.family_id)


def test_delta_star_examples():
    assert delta_star(3, 2.0) == 0.5
    assert delta_star(3, 0.0) == 0.5
    assert delta_star(99, 1.0) == pytest.approx(0.1)
    assert delta_star(2, 6.0) == pytest.approx(1 / 6)


@pytest.mark.parametrize("c", [0.3, -0.7, 1.0])
def test_constant_integrand_is_exact(c):
    inst = make_smooth_instance("gaussian-like")
    inst = ProblemInstance(inst.body, IntegrandOracle(lambda X: np.full(len(X), c)), inst.rho, c)
    assert estimate_simple(inst, 100, RngStream(1)) == pytest.approx(c, rel=1e-15)
    assert estimate_mh(inst, 100, 0.3, RngStream(1)) == pytest.approx(c, rel=1e-15)


def test_simple_linear_clt():
    inst = make_smooth_instance("linear-f")
    assert abs(estimate_simple(inst, 10**6, RngStream(2)) - 0.5) <= 3 * (1 / math.sqrt(12)) / 1e3


def test_simple_budget():
    inst = make_smooth_instance("gaussian-like")
    _, budgets = SimpleMC().run(inst, 64, [RngStream(0)])
    assert budgets[0].f_evals == 64 and budgets[0].rho_evals == 64


@pytest.mark.parametrize("seed", range(5))
def test_simple_is_a_convex_combination(seed):
    body = ConvexBody.ball(2)
    f = IntegrandOracle(lambda X: np.sin(7 * X[:, 0]) * np.cos(3 * X[:, 1]))
    inst = ProblemInstance(body, f, WeightOracle(lambda X: np.exp(-3 * np.linalg.norm(X, axis=1)), "log-concave-lipschitz", alpha=3.0))
    X = body.sample(RngStream(seed), 50)
    v = estimate_simple(inst, 50, RngStream(seed))
    fx = f(X)
    assert fx.min() - 1e-15 <= v <= fx.max() + 1e-15
    assert abs(v) <= 1


def test_scale_invariance():
    inst = tilted_interval_instance(2.0)
    for c in (0.25, 8.0, 1024.0):
        scaled = with_rho(inst, c)
        assert estimate_simple(scaled, 500, RngStream(3)) == estimate_simple(inst, 500, RngStream(3))
        assert estimate_mh(scaled, 500, 0.5, RngStream(3)) == estimate_mh(inst, 500, 0.5, RngStream(3))
    scaled = with_rho(inst, 3.7)
    assert estimate_simple(scaled, 500, RngStream(3)) == pytest.approx(estimate_simple(inst, 500, RngStream(3)), rel=1e-13)
    assert estimate_mh(scaled, 500, 0.5, RngStream(3)) == estimate_mh(inst, 500, 0.5, RngStream(3))


def test_mh_odd_integrand_flat_disk():
    # 10^7 steps in total, split into 100 independent chains of 10^5 steps
    body = ConvexBody.ball(2)
    inst = ProblemInstance(body, IntegrandOracle(lambda X: X[:, 0]), WeightOracle(lambda X: np.ones(len(X)), "log-concave-lipschitz", alpha=0.0), 0.0)
    values, _ = Metropolis(1 / math.sqrt(3)).run(inst, 10**5, streams(40, 100))
    se = values.std(ddof=1) / 10
    assert abs(values.mean()) <= 3 * se


def test_mh_tilted_interval():
    inst = tilted_interval_instance(2.0)
    delta = delta_star(1, 2.0)
    assert delta == 0.5
    values, _ = Metropolis(delta).run(inst, 10**5, streams(41, 100))
    se = values.std(ddof=1) / 10
    assert abs(values.mean() - inst.truth) <= 3 * se


def test_mh_single_chain_batch_means():
    inst = tilted_interval_instance(2.0)
    run = run_chain(None, 2 * 10**5, body=inst.body, delta=0.5, rho=inst.rho.evaluate, rng=RngStream(42))
    x = run.trajectory[:, 0]
    se = batch_means_se(x)
    assert abs(x.mean() - inst.truth) <= 3 * se
    # correlated chain: batch means exceed the naive i.i.d. error
    assert se > x.std() / math.sqrt(len(x))


def test_batch_means_on_iid():
    x = RngStream(5).normal(10**5)
    assert batch_means_se(x) == pytest.approx(1 / math.sqrt(10**5), rel=0.15)
    with pytest.raises(InvalidArgument):
        batch_means_se(np.ones(3), batch_size=3)


class Perfect:
    """An estimator that always returns the truth."""

    estimator_id = "perfect"
    delta = None

    def run(self, instance, n, rngs):
        return np.full(len(rngs), instance.truth), [ChainBudget() for _ in rngs]


def test_measure_rmse_trivial_cases():
    assert measure_rmse(make_smooth_instance("gaussian-like"), Perfect(), 10, 5, 1).rmse == 0
    zero = make_smooth_instance("constant-density", value=0.0)
    assert measure_rmse(zero, SimpleMC(), 10, 5, 1).rmse == 0


def test_measure_rmse_report():
    inst = tilted_interval_instance(2.0)
    rep = measure_rmse(inst, SimpleMC(), 64, 20, 7)
    assert len(rep.values) == 20
    assert rep.rmse**2 == pytest.approx(np.mean((rep.values - inst.truth) ** 2), rel=1e-12)
    assert rep.budget_totals.f_evals == 64 * 20
    assert rep.as_dict()["estimator_id"] == "simple"
    assert len(rep.as_dict(with_values=True)["values"]) == 20
    again = measure_rmse(inst, SimpleMC(), 64, 20, 7)
    np.testing.assert_array_equal(rep.values, again.values)
    # replication r uses stream (seed, r)
    assert rep.values[3] == estimate_simple(inst, 64, RngStream(7, 3))


def test_measure_rmse_errors():
    inst = ProblemInstance(ConvexBody.interval(), IntegrandOracle(lambda X: X[:, 0]), WeightOracle(lambda X: np.ones(len(X)), "ratio-bounded", C=1.0))
    with pytest.raises(NeedsReference):
        measure_rmse(inst, SimpleMC(), 10, 5, 0)
    with pytest.raises(InvalidArgument):
        measure_rmse(tilted_interval_instance(), SimpleMC(), 10, 1, 0)


def test_simple_rmse_below_classical_bound():
    # rho constant, f = +-1 on halves: variance 1
    body = ConvexBody.interval()
    inst = ProblemInstance(body, IntegrandOracle(lambda X: np.where(X[:, 0] < 0.5, 1.0, -1.0)), WeightOracle(lambda X: np.ones(len(X)), "ratio-bounded", C=1.0), 0.0)
    n, reps = 100, 4000
    rep = measure_rmse(inst, SimpleMC(), n, reps, 3)
    # sd of the squared error is sqrt(2) / n for a normal mean; allow 3 sigma on rmse^2
    assert rep.rmse**2 <= 1 / n + 3 * math.sqrt(2) / n / math.sqrt(reps)


def test_worst_case_definitions():
    inst = tilted_interval_instance(2.0)
    w, reports = worst_case_over_family([inst], SimpleMC(), 32, 10, 5)
    assert w == measure_rmse(inst, SimpleMC(), 32, 10, derive_seed(5, 0)).rmse
    fam = fad_family(2, 3.0, packing_on_ball(4, 2))
    w, reports = worst_case_over_family(fam, SimpleMC(), 32, 10, 5)
    assert len(reports) == 8
    assert w == max(r.rmse for r in reports)
    with pytest.raises(InvalidArgument):
        worst_case_over_family([], SimpleMC(), 32, 10, 5)


def test_reports_carry_reference_bounds():
    fam = fad_family(2, 6.0, packing_on_ball(8, 2))
    rep = measure_rmse(fam[0], Metropolis(1 / 6), 64, 4, 1)
    assert rep.delta_used == pytest.approx(1 / 6)
    assert rep.bounds["lower_bound_nonadaptive"] == pytest.approx(bounds.lower_bound_nonadaptive(64, 2, 6.0))
    fc = make_fc_instance(2, 5.0, [1], [1])
    assert measure_rmse(fc, SimpleMC(), 2, 4, 1).bounds["upper_bound_simple"] == 2.0


def test_fc_prior_sandwich_n512():
    n, C = 512, 8.0
    res = prior_averaged_rmse(lambda rng: sample_fc_prior(n, C, rng), SimpleMC(), n, 200, 50, 2026)
    assert bounds.lower_bound_fc(n, C) <= res.rmse <= bounds.upper_bound_simple(n, C)
    assert res.per_draw_mse.shape == (200,)
    assert res.budget_totals.f_evals == 200 * 50 * n
