"""Problem instances ``(f, rho)`` with reference values of ``S(f, rho)``.

Oracles are vectorized: they take an array of points of shape ``(k, d)``
and return ``k`` values. ``S(f, rho)`` is the ratio of the integrals of
``f * rho`` and ``rho`` against the uniform measure on the body.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special

from .errors import InvalidArgument, InvalidClass, InvalidPacking, InvalidPrior, NotFound
from .geometry import ConvexBody, Packing, vol_unit_ball


@dataclass(frozen=True)
class WeightOracle:
    """A positive weight ``rho``.

    ``class_tag`` is ``"ratio-bounded"`` (with ``C``) or
    ``"log-concave-lipschitz"`` (with ``alpha``).
    """

    evaluate: Callable[[np.ndarray], np.ndarray]
    class_tag: str
    C: Optional[float] = None
    alpha: Optional[float] = None

    def __call__(self, X):
        return self.evaluate(np.atleast_2d(np.asarray(X, dtype=float)))

    def scaled(self, c: float) -> WeightOracle:
        ev = self.evaluate
        return WeightOracle(lambda X: c * ev(X), self.class_tag, self.C, self.alpha)


@dataclass(frozen=True)
class IntegrandOracle:
    """An integrand ``f``; ``norm_tag`` is ``"sup-bounded-1"`` or ``"l2rho-bounded-1"``."""

    evaluate: Callable[[np.ndarray], np.ndarray]
    norm_tag: str = "sup-bounded-1"

    def __call__(self, X):
        return self.evaluate(np.atleast_2d(np.asarray(X, dtype=float)))

    def negated(self) -> IntegrandOracle:
        ev = self.evaluate
        return IntegrandOracle(lambda X: -ev(X), self.norm_tag)


@dataclass(frozen=True)
class ProblemInstance:
    body: ConvexBody
    f: IntegrandOracle
    rho: WeightOracle
    truth: Optional[float] = None
    family_id: str = "custom"
    truth_ci: Optional[float] = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.truth is not None and self.f.norm_tag == "sup-bounded-1" and abs(self.truth) > 1 + 1e-12:
            raise InvalidArgument(f"sup-bounded instance has truth {self.truth} outside [-1, 1]")

    def to_json(self) -> str:
        from ._io import dumps

        record = {
            "family_id": self.family_id,
            "d": self.body.dim,
            "truth": self.truth,
            "truth_ci": self.truth_ci,
        }
        record.update(self.meta)
        return dumps(record)


# ---------------------------------------------------------------------------
# F_C hard family on [0, 1]


def fc_l(m: int, C: float) -> int:
    """Size of the index set in the F_C prior.

    ``ceil(m / (C - 1))`` exceeds ``m`` when ``C < 2``; it is capped at ``m``.
    """
    if C <= 1:
        raise InvalidClass("the F_C hard family needs C > 1")
    if m >= C - 1:
        return min(math.ceil(m / (C - 1)), m)
    return 1


def fc_cml(m: int, l: int, C: float) -> float:
    """Integral of the two-level density: ``(l C + m - l) / m``."""
    return (l * C + (m - l)) / m


@dataclass(frozen=True)
class FcHardInstance(ProblemInstance):
    m: int = 0
    l: int = 0
    C: float = 1.0
    I: tuple = ()
    eps: tuple = ()
    c_ml: float = 1.0


def _cell_index(X: np.ndarray, m: int) -> np.ndarray:
    return np.minimum((np.asarray(X)[:, 0] * m).astype(np.int64), m - 1).clip(0)


def make_fc_instance(n: int, C: float, I, eps) -> FcHardInstance:
    """The two-level instance on ``[0, 1]`` split into ``m = 2n`` equal cells.

    ``I`` holds 0-based cell indices; ``rho = C`` on those cells and 1
    elsewhere, ``f = eps_j`` on cell ``I[j]`` and 0 elsewhere.
    """
    if C <= 1:
        raise InvalidClass(f"F_C hard instances need C > 1, got {C}")
    m = 2 * n
    l = fc_l(m, C)
    I = tuple(int(i) for i in I)
    eps = tuple(int(e) for e in eps)
    if len(I) != l or len(set(I)) != l:
        raise InvalidPrior(f"index set must have {l} distinct cells, got {len(set(I))}")
    if len(eps) != l or any(e not in (-1, 1) for e in eps):
        raise InvalidPrior("need one sign in {-1, +1} per index")
    if min(I) < 0 or max(I) >= m:
        raise InvalidPrior(f"cell indices must lie in 0..{m - 1}")

    rho_cells = np.ones(m)
    rho_cells[list(I)] = C
    f_cells = np.zeros(m)
    f_cells[list(I)] = eps
    c_ml = fc_cml(m, l, C)
    truth = C / (m * c_ml) * sum(eps)

    def rho(X):
        return rho_cells[_cell_index(X, m)]

    def f(X):
        return f_cells[_cell_index(X, m)]

    return FcHardInstance(
        body=ConvexBody.interval(),
        f=IntegrandOracle(f, "sup-bounded-1"),
        rho=WeightOracle(rho, "ratio-bounded", C=float(C)),
        truth=truth,
        family_id="fc-hard",
        meta={"n": n, "C": float(C), "I": list(I), "eps": list(eps)},
        m=m,
        l=l,
        C=float(C),
        I=I,
        eps=eps,
        c_ml=c_ml,
    )


def sample_fc_prior(n: int, C: float, rng) -> FcHardInstance:
    """Draw ``I`` uniformly among ``l``-subsets of the ``2n`` cells and i.i.d. fair signs."""
    m = 2 * n
    l = fc_l(m, C)
    I = np.sort(rng.choice(m, size=l, replace=False))
    eps = np.where(rng.random(l) < 0.5, -1, 1)
    return make_fc_instance(n, C, I, eps)


# ---------------------------------------------------------------------------
# F^{alpha,d} family on the unit ball


def sphere_fraction_inside(d: int, s: float, t) -> np.ndarray:
    """Fraction of the sphere ``|y - c| = t`` (with ``|c| = s``) lying in ``B^d``.

    A point ``c + t u`` is inside iff ``cos(angle(u, c)) <= (1 - s^2 - t^2) / (2 s t)``;
    for uniform ``u`` on the sphere, ``(1 + cos) / 2`` is Beta((d-1)/2, (d-1)/2).
    """
    t = np.asarray(t, dtype=float)
    if d == 1:
        return 0.5 * ((np.abs(s + t) <= 1.0).astype(float) + (np.abs(s - t) <= 1.0))
    if s == 0:
        cos_max = np.where(t <= 1.0, 1.0, -1.0)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            cos_max = np.where(t > 0, (1.0 - s * s - t * t) / (2.0 * s * np.where(t > 0, t, 1.0)), 1.0)
    cos_max = np.clip(cos_max, -1.0, 1.0)
    a = 0.5 * (d - 1)
    return special.betainc(a, a, 0.5 * (1.0 + cos_max))


def radial_mass_in_ball(d: int, alpha: float, radius: float) -> float:
    """``int_{B(0, radius)} exp(-alpha |y|) dy`` in closed form."""
    if alpha == 0:
        return radius**d * vol_unit_ball(d)
    # d vol(B^d) int_0^r t^(d-1) e^(-alpha t) dt = d vol(B^d) Gamma(d) P(d, alpha r) / alpha^d
    return d * vol_unit_ball(d) * math.gamma(d) * special.gammainc(d, alpha * radius) / alpha**d


def tilted_mass_on_ball(d: int, alpha: float, center) -> float:
    """``int_{B^d} exp(-alpha |y - center|) dy`` by radial quadrature around ``center``.

    The integrand in the radius ``t`` is ``exp(-alpha t)`` times the area of
    the sphere ``S(center, t)`` inside the unit ball, which has the closed
    form ``d vol(B^d) t^(d-1)`` times a regularized incomplete beta function.
    """
    s = float(np.linalg.norm(center))
    if s > 1.0:
        raise InvalidArgument("center must lie in the unit ball")
    area = d * vol_unit_ball(d)
    if d == 1:
        # Direct: [-1, 1] with kink at the center.
        c = float(np.ravel(center)[0])
        if alpha == 0:
            return 2.0
        return (2.0 - math.exp(-alpha * (1 + c)) - math.exp(-alpha * (1 - c))) / alpha

    def integrand(t):
        return math.exp(-alpha * t) * area * t ** (d - 1) * float(sphere_fraction_inside(d, s, t))

    inner = 1.0 - s
    val_inner = radial_mass_in_ball(d, alpha, inner) if inner > 0 else 0.0
    val_outer, _ = integrate.quad(integrand, inner, 1.0 + s, epsabs=1e-14, epsrel=1e-12, limit=200)
    return val_inner + val_outer


def make_fad_instance(d: int, alpha: float, packing: Packing, i: int, sign: int = 1) -> ProblemInstance:
    """Instance ``(sign * f_i, rho_i)`` from the packing construction on ``B^d``.

    ``rho_i(y) = exp(-alpha |y - y_i|) / Z_i`` with ``Z_i`` the Lebesgue
    integral over the ball, and ``f_i = chi_{B(y_i, r)} / S_i`` where
    ``S_i^2`` is the ``mu_rho`` mass of the small ball, so that
    ``||f_i||_{2, rho} = 1`` and ``S(f_i, rho_i) = S_i``.
    """
    if packing.dim != d:
        raise InvalidPacking(f"packing dimension {packing.dim} != {d}")
    if not packing.is_valid():
        raise InvalidPacking("packing balls do not fit disjointly inside the unit ball")
    if not 0 <= i < packing.m:
        raise InvalidArgument(f"index {i} outside 0..{packing.m - 1}")
    if alpha < 0:
        raise InvalidClass("alpha must be non-negative")
    if sign not in (-1, 1):
        raise InvalidArgument("sign must be +1 or -1")

    y = np.array(packing.centers[i], dtype=float)
    r = float(packing.radius)
    Z = tilted_mass_on_ball(d, alpha, y)
    mass_small = radial_mass_in_ball(d, alpha, r)
    S = math.sqrt(mass_small / Z)
    height = sign / S

    def rho(X):
        return np.exp(-alpha * np.linalg.norm(X - y, axis=-1)) / Z

    def f(X):
        return np.where(np.linalg.norm(X - y, axis=-1) <= r, height, 0.0)

    return ProblemInstance(
        body=ConvexBody.ball(d),
        f=IntegrandOracle(f, "l2rho-bounded-1"),
        rho=WeightOracle(rho, "log-concave-lipschitz", alpha=float(alpha)),
        truth=sign * S,
        family_id="fad-packing",
        meta={
            "alpha": float(alpha),
            "packing_centers": packing.centers.tolist(),
            "packing_radius": r,
            "index": int(i),
            "sign": int(sign),
        },
    )


def fad_family(d: int, alpha: float, packing: Packing) -> list[ProblemInstance]:
    """All ``2m`` signed instances, ordered ``(0,+), (0,-), (1,+), ...``."""
    return [make_fad_instance(d, alpha, packing, i, s) for i in range(packing.m) for s in (1, -1)]


# ---------------------------------------------------------------------------
# Benign instances


def quadrature_truth(body: ConvexBody, f, rho) -> float:
    """``S(f, rho)`` by adaptive quadrature; supports intervals and the disk."""
    def pt(*coords):
        return np.array([coords], dtype=float)

    opts = dict(epsabs=1e-13, epsrel=1e-11, limit=200)
    if body.dim == 1:
        lo, hi = (-1.0, 1.0) if body.kind == "unit-ball" else (0.0, 1.0)
        num, _ = integrate.quad(lambda x: float(f(pt(x))[0] * rho(pt(x))[0]), lo, hi, **opts)
        den, _ = integrate.quad(lambda x: float(rho(pt(x))[0]), lo, hi, **opts)
        return num / den
    if body.dim == 2 and body.kind == "unit-ball":
        def polar(g):
            return integrate.dblquad(
                lambda r, th: r * g(pt(r * math.cos(th), r * math.sin(th))), 0.0, 2 * math.pi, 0.0, 1.0,
                epsabs=1e-12, epsrel=1e-10,
            )[0]

        num = polar(lambda X: float(f(X)[0] * rho(X)[0]))
        den = polar(lambda X: float(rho(X)[0]))
        return num / den
    if body.dim == 2 and body.kind == "axis-cube":
        num = integrate.dblquad(lambda y, x: float(f(pt(x, y))[0] * rho(pt(x, y))[0]), 0, 1, 0, 1)[0]
        den = integrate.dblquad(lambda y, x: float(rho(pt(x, y))[0]), 0, 1, 0, 1)[0]
        return num / den
    raise InvalidArgument("quadrature truth is only available for d <= 2")


SMOOTH_NAMES = ("constant-density", "gaussian-like", "linear-f")


def make_instance(body: ConvexBody, f: IntegrandOracle, rho: WeightOracle, family_id="custom", truth=None) -> ProblemInstance:
    """Wrap oracles into an instance, computing the truth by quadrature when ``d <= 2``."""
    if truth is None:
        truth = quadrature_truth(body, f, rho)
    return ProblemInstance(body=body, f=f, rho=rho, truth=truth, family_id=family_id)


def make_smooth_instance(name: str, *, value: float = 0.3, alpha: float = 2.0, d: int = 2) -> ProblemInstance:
    """Benign instances used to sanity-check the estimators.

    * ``constant-density``: ``rho = 1`` and ``f = value`` on ``[0, 1]``.
    * ``linear-f``: ``rho = 1`` and ``f(x) = x_1`` on ``[0, 1]``.
    * ``gaussian-like``: ``rho = exp(-alpha |x|)`` and ``f(x) = x_1`` on ``B^d``.
    """
    if name == "constant-density":
        body = ConvexBody.interval()
        f = IntegrandOracle(lambda X: np.full(len(X), float(value)))
        rho = WeightOracle(lambda X: np.ones(len(X)), "ratio-bounded", C=1.0)
    elif name == "linear-f":
        body = ConvexBody.interval()
        f = IntegrandOracle(lambda X: X[:, 0])
        rho = WeightOracle(lambda X: np.ones(len(X)), "log-concave-lipschitz", C=1.0, alpha=0.0)
    elif name == "gaussian-like":
        body = ConvexBody.ball(d)
        f = IntegrandOracle(lambda X: X[:, 0])
        rho = WeightOracle(
            lambda X: np.exp(-alpha * np.linalg.norm(X, axis=-1)),
            "log-concave-lipschitz", C=math.exp(alpha * body.diameter), alpha=float(alpha),
        )
    else:
        raise NotFound(f"unknown smooth instance {name!r}; choose from {SMOOTH_NAMES}")
    truth = quadrature_truth(body, f, rho) if d <= 2 else 0.0
    return ProblemInstance(body=body, f=f, rho=rho, truth=truth, family_id=name)


def tilted_interval_instance(alpha: float = 2.0) -> ProblemInstance:
    """``rho(x) = exp(-alpha x)`` and ``f(x) = x`` on ``[-1, 1]``, with closed-form truth."""
    body = ConvexBody.ball(1)
    f = IntegrandOracle(lambda X: X[:, 0], "sup-bounded-1")
    rho = WeightOracle(lambda X: np.exp(-alpha * X[:, 0]), "log-concave-lipschitz", alpha=float(alpha))
    if alpha == 0:
        truth = 0.0
    else:
        # E[x] under density proportional to exp(-alpha x) on [-1, 1].
        truth = 1.0 / alpha - 1.0 / math.tanh(alpha)
    return ProblemInstance(body=body, f=f, rho=rho, truth=truth, family_id="tilted-interval",
                           meta={"alpha": float(alpha)})


# ---------------------------------------------------------------------------
# Serialization


def instance_record(inst: ProblemInstance) -> dict:
    return json.loads(inst.to_json())


def instance_from_json(text: str) -> ProblemInstance:
    """Rebuild an ``fc-hard`` or ``fad-packing`` instance from its JSON record."""
    rec = json.loads(text)
    fam = rec.get("family_id")
    if fam == "fc-hard":
        return make_fc_instance(rec["n"], rec["C"], rec["I"], rec["eps"])
    if fam == "fad-packing":
        packing = Packing(np.array(rec["packing_centers"], dtype=float), rec["packing_radius"])
        return make_fad_instance(rec["d"], rec["alpha"], packing, rec["index"], rec["sign"])
    raise NotFound(f"cannot rebuild instances of family {fam!r}")
