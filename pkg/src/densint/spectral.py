"""Finite-state analogues of the ball walk and Metropolis chains.

Discretized chains are small enough for exact eigen-decomposition and
exhaustive conductance, so Cheeger's inequality, conductance bounds and the
``(1 + beta) / (1 - beta)`` error law can be checked directly. These are
heuristic validations of continuous-space statements, not instances of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import bounds
from .errors import DiscretizationError, InvalidArgument, NumericFailure, PropertyViolation, SizeLimit
from .geometry import ConvexBody, uniform_in_balls
from .rng import RngStream

EXHAUSTIVE_MAX = 20


@dataclass(frozen=True)
class DiscreteChain:
    kernel: np.ndarray
    pi: np.ndarray

    @property
    def states(self) -> int:
        return len(self.pi)

    def check(self, tol: float = 1e-12):
        K, pi = self.kernel, self.pi
        if K.shape != (len(pi), len(pi)):
            raise InvalidArgument("kernel and invariant distribution sizes differ")
        if np.any(pi <= 0) or abs(pi.sum() - 1.0) > tol:
            raise InvalidArgument("pi must be positive and sum to one")
        if np.max(np.abs(K.sum(axis=1) - 1.0)) > tol:
            raise InvalidArgument("kernel rows must sum to one")
        if reversibility_defect(self) > tol:
            raise InvalidArgument("kernel is not reversible with respect to pi")


def reversibility_defect(chain: DiscreteChain) -> float:
    """``max |pi_i K_ij - pi_j K_ji|``."""
    F = chain.pi[:, None] * chain.kernel
    return float(np.max(np.abs(F - F.T)))


def two_state(p: float, q: Optional[float] = None) -> DiscreteChain:
    """``[[1-p, p], [q, 1-q]]`` with its invariant distribution (``q = p`` by default)."""
    q = p if q is None else q
    K = np.array([[1.0 - p, p], [q, 1.0 - q]])
    return DiscreteChain(K, np.array([q, p]) / (p + q))


def rank_one(pi) -> DiscreteChain:
    """Every row equal to ``pi``: one step reaches stationarity."""
    pi = np.asarray(pi, dtype=float)
    pi = pi / pi.sum()
    return DiscreteChain(np.tile(pi, (len(pi), 1)), pi)


def _overlap_mass(h: float, gap: np.ndarray, delta: float) -> np.ndarray:
    """``int_{cell_i} int_{cell_j} 1{|x - y| <= delta} dy dx`` for cells of width ``h``
    whose centers are ``gap`` apart.

    The difference ``y - x`` has the triangular density ``(h - |t - gap|)_+``.
    """
    def tri_cdf(s):
        s = np.asarray(s, dtype=float)
        return np.where(
            s <= -h, 0.0,
            np.where(s <= 0, 0.5 * (s + h) ** 2, np.where(s <= h, h * h - 0.5 * (h - s) ** 2, h * h)),
        )

    return tri_cdf(delta - gap) - tri_cdf(-delta - gap)


def discretize_1d(rho, delta: float, N: int, lo: float = -1.0, hi: float = 1.0) -> DiscreteChain:
    """Cell-averaged Metropolis ball walk on ``[lo, hi]`` with ``N`` equal cells.

    For ``i != j``, ``K_ij`` is the probability that a point uniform in cell
    ``i`` proposes into cell ``j`` (step uniform on ``[-delta, delta]``),
    times ``min(1, rho_j / rho_i)`` with midpoint weights. Proposals leaving
    the interval and rejected moves stay on the diagonal.
    """
    if N < 2:
        raise InvalidArgument("need at least two cells")
    if not delta > 0:
        raise InvalidArgument("delta must be positive")
    h = (hi - lo) / N
    mids = lo + h * (np.arange(N) + 0.5)
    w = np.asarray(rho(mids[:, None]), dtype=float)
    if np.any(w <= 0):
        raise InvalidArgument("weights must be positive")
    gap = (np.arange(N)[None, :] - np.arange(N)[:, None]) * h
    Q = _overlap_mass(h, gap, delta) / (h * 2.0 * delta)
    acc = np.minimum(1.0, w[None, :] / w[:, None])
    K = Q * acc
    np.fill_diagonal(K, 0.0)
    K[np.diag_indices(N)] = 1.0 - K.sum(axis=1)
    pi = w / w.sum()
    chain = DiscreteChain(K, pi)
    if reversibility_defect(chain) > 1e-9:
        raise DiscretizationError("discretized kernel is not reversible")
    return chain


def ball_walk_reference(N: int, delta: float, lo: float = -1.0, hi: float = 1.0) -> DiscreteChain:
    """The constant-weight discretization (plain ball walk)."""
    return discretize_1d(lambda X: np.ones(len(X)), delta, N, lo, hi)


def _symmetrized(chain: DiscreteChain) -> np.ndarray:
    s = np.sqrt(chain.pi)
    A = s[:, None] * chain.kernel / s[None, :]
    return 0.5 * (A + A.T)


def spectrum(chain: DiscreteChain) -> np.ndarray:
    """Eigenvalues in decreasing order."""
    try:
        ev = np.linalg.eigvalsh(_symmetrized(chain))
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(str(exc)) from exc
    return ev[::-1]


def second_eigenvalue(chain: DiscreteChain) -> float:
    """Largest eigenvalue after removing the stationary eigenvalue 1."""
    return float(spectrum(chain)[1])


def second_eigenvector(chain: DiscreteChain) -> np.ndarray:
    """Right eigenvector of ``K`` for ``beta``, normalized so ``sum pi f = 0`` and ``sum pi f^2 = 1``."""
    A = _symmetrized(chain)
    vals, vecs = np.linalg.eigh(A)
    v = vecs[:, -2] / np.sqrt(chain.pi)
    v = v - np.dot(chain.pi, v)
    v = v / math.sqrt(np.dot(chain.pi, v * v))
    # Fix the sign so the output is deterministic.
    k = int(np.argmax(np.abs(v)))
    return v if v[k] > 0 else -v


def _subset_masks(N: int, start: int, stop: int) -> np.ndarray:
    codes = np.arange(start, stop, dtype=np.int64)
    return ((codes[:, None] >> np.arange(N)) & 1).astype(float)


def conductance_exact(chain: DiscreteChain, mode: str = "exhaustive") -> float:
    """``min_A  sum_{i in A, j not in A} pi_i K_ij / min(pi(A), pi(A^c))``.

    ``mode="exhaustive"`` enumerates all proper subsets (``N <= 20``);
    ``mode="contiguous"`` only index intervals and their complements, which
    can only overestimate the true value.
    """
    N = chain.states
    F = chain.pi[:, None] * chain.kernel
    pi = chain.pi
    if mode == "contiguous":
        best = np.inf
        for a in range(N):
            for b in range(a + 1, N + 1):
                if b - a == N:
                    continue
                mask = np.zeros(N)
                mask[a:b] = 1.0
                flow = mask @ F @ (1.0 - mask)
                pa = float(mask @ pi)
                best = min(best, flow / min(pa, 1.0 - pa))
        return float(best)
    if mode != "exhaustive":
        raise InvalidArgument(f"unknown mode {mode!r}")
    if N > EXHAUSTIVE_MAX:
        raise SizeLimit(f"exhaustive conductance needs N <= {EXHAUSTIVE_MAX}, got {N}")
    best = np.inf
    # Fixing state N-1 outside A covers every cut once (A and A^c give the same ratio).
    total = 1 << (N - 1)
    chunk = 1 << 16
    for start in range(1, total, chunk):
        M = _subset_masks(N, start, min(total, start + chunk))
        flow = np.einsum("si,si->s", M @ F, 1.0 - M)
        pa = M @ pi
        ratio = flow / np.minimum(pa, 1.0 - pa)
        best = min(best, float(ratio.min()))
    return best


def local_conductance_exact_1d(chain: DiscreteChain) -> float:
    """``min_i (1 - K_ii)`` of a discrete chain."""
    return float(np.min(1.0 - np.diag(chain.kernel)))


@dataclass(frozen=True)
class LocalConductance:
    estimate: float
    stderr: float
    samples: int

    @property
    def ci(self) -> tuple[float, float]:
        return self.estimate - 3 * self.stderr, self.estimate + 3 * self.stderr


def local_conductance_mc(body: ConvexBody, x, delta: float, samples: int, rng: RngStream,
                         chunk: int = 1 << 18) -> LocalConductance:
    """Fraction of uniform proposals in ``B(x, delta)`` that land in the body."""
    x = np.asarray(x, dtype=float)
    if not body.contains(x[None, :])[0]:
        raise InvalidArgument("x must lie in the body")
    hits = 0
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        Y = uniform_in_balls(np.broadcast_to(x, (k, body.dim)), delta, rng.normal((k, body.dim)), rng.random(k))
        hits += int(body.contains(Y).sum())
        done += k
    p = hits / samples
    return LocalConductance(estimate=p, stderr=math.sqrt(max(p * (1 - p), 0.0) / samples), samples=samples)


@dataclass(frozen=True)
class SpectralReport:
    beta: float
    lam: float
    conductance: float
    cheeger_ok: bool
    reversibility_defect: float = 0.0
    reference_bound: Optional[float] = None
    label: str = ""

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "beta": self.beta,
            "lambda": self.lam,
            "conductance": self.conductance,
            "cheeger_ok": self.cheeger_ok,
            "cheeger_rhs": bounds.cheeger_gap_lb(self.conductance),
            "reversibility_defect": self.reversibility_defect,
            "reference_bound": self.reference_bound,
            "reference_kind": "discrete analogue (heuristic)",
        }


def spectral_report(chain: DiscreteChain, label: str = "", reference_bound=None) -> SpectralReport:
    beta = second_eigenvalue(chain)
    phi = conductance_exact(chain)
    lam = 1.0 - beta
    return SpectralReport(beta=beta, lam=lam, conductance=phi, cheeger_ok=lam >= bounds.cheeger_gap_lb(phi) - 1e-12,
                          reversibility_defect=reversibility_defect(chain), reference_bound=reference_bound,
                          label=label)


def check_cheeger(chain: DiscreteChain, label: str = "", reference_bound=None) -> SpectralReport:
    """Report for ``chain``; raises ``PropertyViolation`` if ``1 - beta < phi^2 / 2``."""
    rep = spectral_report(chain, label, reference_bound)
    if not rep.cheeger_ok:
        raise PropertyViolation(f"Cheeger fails: lambda={rep.lam} < phi^2/2={rep.conductance**2 / 2}")
    return rep


def simulate(chain: DiscreteChain, f, steps: int, replications: int, rng: RngStream,
             start: Optional[int] = 0, record_at: Sequence[int] = ()) -> dict:
    """Time averages of ``f`` over ``replications`` chains run in lockstep.

    Each chain begins at ``start`` (or at a ``pi``-distributed state when
    ``start`` is None) and ``X_1`` is one kernel step from there. Returns a
    map ``n -> array of running averages`` for each ``n`` in ``record_at``
    (plus ``steps``).
    """
    f = np.asarray(f, dtype=float)
    cum = np.cumsum(chain.kernel, axis=1)
    cum[:, -1] = np.inf
    N = chain.states
    if start is None:
        state = np.searchsorted(np.cumsum(chain.pi), rng.random(replications), side="right")
        state = np.minimum(state, N - 1)
    else:
        state = np.full(replications, int(start))
    marks = sorted(set(int(n) for n in record_at) | {steps})
    acc = np.zeros(replications)
    out = {}
    block = 1024
    u = None
    mi = 0
    for j in range(steps):
        b = j % block
        if b == 0:
            u = rng.random((min(block, steps - j), replications))
        if N == 2:
            state = (u[b] >= cum[state, 0]).astype(np.int64)
        else:
            state = (u[b][:, None] >= cum[state]).sum(axis=1)
        acc += f[state]
        if j + 1 == marks[mi]:
            out[j + 1] = acc / (j + 1)
            mi += 1
    return out


def asymptotic_error_law(chain: DiscreteChain, f=None, schedule: Sequence[int] = (10**3, 10**4, 10**5),
                         replications: int = 10**4, rng: Optional[RngStream] = None, start: Optional[int] = 0):
    """Empirical ``n * e^2`` of the time average at each ``n`` in ``schedule``.

    ``f`` defaults to the ``beta``-eigenvector normalized in ``L2(pi)``, for
    which the limit is ``(1 + beta) / (1 - beta)``. Returns a list of rows
    ``{"n", "e2n", "stderr", "limit"}``.
    """
    rng = rng if rng is not None else RngStream(0)
    if f is None:
        f = second_eigenvector(chain)
    f = np.asarray(f, dtype=float)
    mean = float(np.dot(chain.pi, f))
    limit = bounds.asymptotic_variance_factor(second_eigenvalue(chain))
    runs = simulate(chain, f, max(schedule), replications, rng, start=start, record_at=schedule)
    rows = []
    for n in schedule:
        sq = (runs[n] - mean) ** 2 * n
        rows.append({"n": int(n), "e2n": float(sq.mean()), "stderr": float(sq.std(ddof=1) / math.sqrt(len(sq))),
                     "limit": limit})
    return rows
