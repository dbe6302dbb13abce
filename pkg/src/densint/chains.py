"""Ball walk and Metropolis kernels, and trajectory generation.

Two entry points:

* ``ball_walk_step`` / ``metropolis_step`` advance one point (or a batch of
  points sharing a single stream) and consume draws literally: ``d + 1``
  per proposal, plus one uniform only when ``rho(y) < rho(x)``.
* ``run_chains`` advances many independent chains in lockstep, each with its
  own ``RngStream``. Draws are pre-generated per chain in fixed-size blocks
  and addressed by step index, so a chain's path does not depend on how many
  other chains share the batch, and an unused acceptance uniform does not
  shift later draws. ``rng_draws`` still counts only draws actually used.

The first trajectory entry is always one plain ball-walk step from the start.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidArgument, InvalidDensity, InvalidState
from .geometry import ConvexBody, uniform_in_balls
from .rng import ChainBudget, RngStream

BLOCK = 512


def _check_inside(body: ConvexBody, X: np.ndarray):
    if not np.all(body.contains(X)):
        raise InvalidState("current position is outside the body")


def _propose(X: np.ndarray, delta: float, rng: RngStream) -> np.ndarray:
    k, d = X.shape
    return uniform_in_balls(X, delta, rng.normal((k, d)), rng.random(k))


def ball_walk_step(x, delta: float, body: ConvexBody, rng: RngStream, budget: Optional[ChainBudget] = None):
    """One ball-walk step: propose uniformly in ``B(x, delta)``, hold if outside.

    ``x`` may be a point ``(d,)`` or a batch ``(k, d)``; the result has the
    same shape. Exactly one membership call per point.
    """
    if not delta > 0:
        raise InvalidArgument("delta must be positive")
    x = np.asarray(x, dtype=float)
    X = np.atleast_2d(x)
    _check_inside(body, X)
    budget = budget if budget is not None else ChainBudget()
    Y = _propose(X, delta, rng)
    budget.rng_draws += len(X) * (body.dim + 1)
    inside = budget.member(body, Y)
    out = np.where(inside[:, None], Y, X)
    return out.reshape(x.shape)


def metropolis_step(x, delta: float, body: ConvexBody, rho, rng: RngStream,
                    budget: Optional[ChainBudget] = None, rho_x=None):
    """One ball walk step with Metropolis filter ``min(1, rho(y) / rho(x))``.

    Returns ``(new_position, rho_at_new_position)``. ``rho_x`` is the cached
    weight at ``x``; it is evaluated (and charged) only when not supplied.
    A proposal outside the body is rejected without evaluating ``rho``.
    """
    if not delta > 0:
        raise InvalidArgument("delta must be positive")
    x = np.asarray(x, dtype=float)
    X = np.atleast_2d(x)
    _check_inside(body, X)
    budget = budget if budget is not None else ChainBudget()
    if rho_x is None:
        rho_x = budget.eval_rho(rho, X)
    rho_x = np.atleast_1d(np.asarray(rho_x, dtype=float)).copy()

    Y = _propose(X, delta, rng)
    budget.rng_draws += len(X) * (body.dim + 1)
    inside = budget.member(body, Y)
    idx = np.flatnonzero(inside)
    accept = np.zeros(len(X), dtype=bool)
    if len(idx):
        ry = budget.eval_rho(rho, Y[idx])
        rx = rho_x[idx]
        uphill = ry >= rx
        need = np.flatnonzero(~uphill)
        ok = uphill.copy()
        if len(need):
            u = rng.random(len(need))
            budget.rng_draws += len(need)
            ok[need] = ry[need] >= u * rx[need]
        accept[idx] = ok
        rho_x[idx[ok]] = ry[ok]
    out = np.where(accept[:, None], Y, X)
    if x.ndim == 1:
        return out[0], float(rho_x[0])
    return out, rho_x


@dataclass
class ChainBatch:
    """Result of ``run_chains``."""

    trajectory: Optional[np.ndarray]  # (k, n, d)
    moved: np.ndarray                 # (k, n); entry j is True if X_j differs from X_{j-1} (X_0 = start)
    f_sum: Optional[np.ndarray]       # (k,) sum of f over the trajectory
    budgets: list
    final: np.ndarray

    @property
    def budget(self) -> ChainBudget:
        return ChainBudget.merge(self.budgets)


@dataclass
class ChainRun:
    trajectory: np.ndarray
    budget: ChainBudget
    moved: np.ndarray


def run_chains(starts, steps: int, *, body: ConvexBody, delta: float, rho=None, rngs,
               f=None, keep_trajectory: bool = True) -> ChainBatch:
    """Run ``k`` independent chains for ``steps`` steps each.

    ``rho=None`` gives the plain ball walk, otherwise the Metropolis walk.
    With ``f`` given, ``f`` is evaluated once per arrival at a new point and
    its running sum is returned in ``f_sum``.
    """
    if steps < 1:
        raise InvalidArgument("steps must be at least 1")
    if not delta > 0:
        raise InvalidArgument("delta must be positive")
    X = np.array(np.atleast_2d(starts), dtype=float)
    k, d = X.shape
    if d != body.dim:
        raise InvalidArgument("start dimension does not match the body")
    if isinstance(rngs, RngStream):
        rngs = [rngs]
    if len(rngs) != k:
        raise InvalidArgument(f"need one stream per chain ({k}), got {len(rngs)}")
    _check_inside(body, X)
    metropolis = rho is not None

    n_f = np.zeros(k, dtype=np.int64)
    n_rho = np.zeros(k, dtype=np.int64)
    n_draw = np.zeros(k, dtype=np.int64)
    traj = np.empty((k, steps, d)) if keep_trajectory else None
    moved = np.zeros((k, steps), dtype=bool)
    f_sum = np.zeros(k) if f is not None else None
    f_cur = None
    rho_cur = None

    G = U = A = None
    for j in range(steps):
        b = j % BLOCK
        if b == 0:
            G = np.stack([r.normal((BLOCK, d)) for r in rngs])
            U = np.stack([r.random(BLOCK) for r in rngs])
            A = np.stack([r.random(BLOCK) for r in rngs])
        Y = uniform_in_balls(X, delta, G[:, b], U[:, b])
        n_draw += d + 1
        inside = body.contains(Y)

        if j == 0 or not metropolis:
            accept = inside
        else:
            idx = np.flatnonzero(inside)
            accept = np.zeros(k, dtype=bool)
            if len(idx):
                ry = np.asarray(rho(Y[idx]), dtype=float)
                if np.any(~(ry > 0)):
                    raise InvalidDensity("weight oracle returned a non-positive value")
                n_rho[idx] += 1
                rx = rho_cur[idx]
                uphill = ry >= rx
                n_draw[idx[~uphill]] += 1
                ok = uphill | (ry >= A[idx, b] * rx)
                accept[idx] = ok
                rho_cur[idx[ok]] = ry[ok]
        X = np.where(accept[:, None], Y, X)
        moved[:, j] = accept

        if j == 0:
            if metropolis:
                rho_cur = np.asarray(rho(X), dtype=float)
                if np.any(~(rho_cur > 0)):
                    raise InvalidDensity("weight oracle returned a non-positive value")
                n_rho += 1
            if f is not None:
                f_cur = np.asarray(f(X), dtype=float)
                n_f += 1
        elif f is not None:
            acc = np.flatnonzero(accept)
            if len(acc):
                f_cur[acc] = f(X[acc])
                n_f[acc] += 1
        if f is not None:
            f_sum += f_cur
        if keep_trajectory:
            traj[:, j] = X

    budgets = [
        ChainBudget(f_evals=int(n_f[c]), rho_evals=int(n_rho[c]), membership_calls=steps, rng_draws=int(n_draw[c]))
        for c in range(k)
    ]
    return ChainBatch(trajectory=traj, moved=moved, f_sum=f_sum, budgets=budgets, final=X)


def run_chain(start, steps: int, stepper: str = "metropolis", *, body: ConvexBody, delta: float,
              rho=None, rng: RngStream) -> ChainRun:
    """Single chain ``X_1, ..., X_n``; ``stepper`` is ``"ball"`` or ``"metropolis"``."""
    if stepper not in ("ball", "metropolis"):
        raise InvalidArgument(f"unknown stepper {stepper!r}")
    if stepper == "metropolis" and rho is None:
        raise InvalidArgument("the Metropolis stepper needs a weight oracle")
    start = body.center if start is None else np.asarray(start, dtype=float)
    batch = run_chains(start[None, :], steps, body=body, delta=delta,
                       rho=rho if stepper == "metropolis" else None, rngs=[rng])
    return ChainRun(trajectory=batch.trajectory[0], budget=batch.budgets[0], moved=batch.moved[0])
