"""Simple Monte Carlo and Metropolis estimators, step-size rule, RMSE harness."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from . import bounds
from .chains import run_chains
from .errors import InvalidArgument, NeedsReference
from .instances import FcHardInstance, ProblemInstance
from .rng import ChainBudget, RngStream, derive_seed, streams


def delta_star(d: int, alpha: float) -> float:
    """Step size ``min(1/sqrt(d+1), 1/alpha)``; ``alpha = 0`` leaves only the first term."""
    first = 1.0 / math.sqrt(d + 1.0)
    return first if alpha <= 0 else min(first, 1.0 / alpha)


class SimpleMC:
    """Quotient of the sample means of ``f * rho`` and ``rho`` over i.i.d. uniform points."""

    estimator_id = "simple"
    delta = None

    def run(self, instance: ProblemInstance, n: int, rngs: list[RngStream]):
        if n < 1:
            raise InvalidArgument("n must be at least 1")
        body = instance.body
        values = np.empty(len(rngs))
        budgets = []
        for r, rng in enumerate(rngs):
            budget = ChainBudget()
            X = body.sample(rng, n)
            budget.rng_draws += n * body.draws_per_sample()
            w = budget.eval_rho(instance.rho.evaluate, X)
            fx = budget.eval_f(instance.f.evaluate, X)
            values[r] = np.dot(fx, w) / w.sum()
            budgets.append(budget)
        return values, budgets


@dataclass
class Metropolis:
    """Time average of ``f`` along the Metropolis ball walk started at the body's center."""

    delta: float
    start: Optional[np.ndarray] = None

    @property
    def estimator_id(self) -> str:
        return "metropolis"

    def run(self, instance: ProblemInstance, n: int, rngs: list[RngStream]):
        if n < 1:
            raise InvalidArgument("n must be at least 1")
        body = instance.body
        start = body.center if self.start is None else np.asarray(self.start, dtype=float)
        batch = run_chains(
            np.repeat(start[None, :], len(rngs), axis=0), n, body=body, delta=self.delta,
            rho=instance.rho.evaluate, rngs=rngs, f=instance.f.evaluate, keep_trajectory=False,
        )
        return batch.f_sum / n, batch.budgets


def estimate_simple(instance: ProblemInstance, n: int, rng: RngStream) -> float:
    values, _ = SimpleMC().run(instance, n, [rng])
    return float(values[0])


def estimate_mh(instance: ProblemInstance, n: int, delta: float, rng: RngStream) -> float:
    values, _ = Metropolis(delta).run(instance, n, [rng])
    return float(values[0])


def batch_means_se(x, batch_size: Optional[int] = None) -> float:
    """Standard error of the mean of a correlated series by non-overlapping batch means.

    The default batch size is ``floor(sqrt(len(x)))``.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    b = int(math.isqrt(n)) if batch_size is None else int(batch_size)
    a = n // b
    if a < 2:
        raise InvalidArgument("series too short for batch means")
    means = x[: a * b].reshape(a, b).mean(axis=1)
    var = b * np.sum((means - means.mean()) ** 2) / (a - 1)
    return math.sqrt(var / (a * b))


@dataclass
class EstimateReport:
    estimator_id: str
    n: int
    replications: int
    values: np.ndarray
    rmse: float
    truth: float
    budget_totals: ChainBudget
    delta_used: Optional[float] = None
    bounds: dict = field(default_factory=dict)

    def as_dict(self, with_values: bool = False) -> dict:
        out = {
            "estimator_id": self.estimator_id,
            "n": self.n,
            "replications": self.replications,
            "rmse": self.rmse,
            "truth": self.truth,
            "budget_totals": self.budget_totals.as_dict(),
            "delta_used": self.delta_used,
            "bounds": dict(self.bounds),
        }
        if with_values:
            out["values"] = [float(v) for v in self.values]
        return out


def _reference_bounds(instance: ProblemInstance, estimator, n: int) -> dict:
    out = {}
    if isinstance(instance, FcHardInstance):
        out["lower_bound_fc"] = bounds.lower_bound_fc(n, instance.C)
        out["upper_bound_simple"] = bounds.upper_bound_simple(n, instance.C)
    alpha = instance.rho.alpha
    if alpha is not None and instance.body.kind == "unit-ball":
        d = instance.body.dim
        out["lower_bound_nonadaptive"] = bounds.lower_bound_nonadaptive(n, d, alpha)
        if estimator.delta is not None:
            out["metropolis_rmse_ceiling"] = math.sqrt(bounds.error_const_metropolis(d, estimator.delta, alpha) / n)
    return out


def measure_rmse(instance: ProblemInstance, estimator, n: int, replications: int, seed: int) -> EstimateReport:
    """Run ``estimator`` on streams ``(seed, 0..replications-1)`` and compare with the truth."""
    if instance.truth is None:
        raise NeedsReference("instance has no reference value")
    if replications < 2:
        raise InvalidArgument("need at least two replications")
    values, budgets = estimator.run(instance, n, streams(seed, replications))
    err = values - instance.truth
    rmse = math.sqrt(float(np.mean(err * err)))
    return EstimateReport(
        estimator_id=estimator.estimator_id,
        n=n,
        replications=replications,
        values=values,
        rmse=rmse,
        truth=float(instance.truth),
        budget_totals=ChainBudget.merge(budgets),
        delta_used=estimator.delta,
        bounds=_reference_bounds(instance, estimator, n),
    )


def worst_case_over_family(family: Iterable[ProblemInstance], estimator, n: int, replications: int,
                           seed: int) -> tuple[float, list[EstimateReport]]:
    """Maximum RMSE over a finite family; instance ``i`` uses seed ``derive_seed(seed, i)``."""
    reports = [measure_rmse(inst, estimator, n, replications, derive_seed(seed, i))
               for i, inst in enumerate(family)]
    if not reports:
        raise InvalidArgument("empty family")
    return max(r.rmse for r in reports), reports


@dataclass
class PriorRMSE:
    rmse: float
    draws: int
    replications: int
    per_draw_mse: np.ndarray
    budget_totals: ChainBudget


def prior_averaged_rmse(sample_instance, estimator, n: int, draws: int, replications: int,
                        seed: int) -> PriorRMSE:
    """RMSE averaged jointly over instance draws and estimator randomness.

    ``sample_instance(rng)`` draws one instance; draw ``j`` uses stream
    ``(seed, j)`` for the instance and seed ``derive_seed(seed, j)`` for its
    replications.
    """
    mse = np.empty(draws)
    total = ChainBudget()
    for j in range(draws):
        inst = sample_instance(RngStream(seed, j))
        rep = measure_rmse(inst, estimator, n, replications, derive_seed(seed, j))
        mse[j] = rep.rmse**2
        total += rep.budget_totals
    return PriorRMSE(rmse=math.sqrt(float(mse.mean())), draws=draws, replications=replications,
                     per_draw_mse=mse, budget_totals=total)
