"""Closed-form error and conductance bounds.

Each function returns a float. ``evaluate`` wraps any of them into a
``BoundSet`` that also records which branch of a case split applied.
"""

from __future__ import annotations

import inspect
import math
from dataclasses import dataclass, field

from .errors import NotFound

SQRT2_6 = math.sqrt(2.0) / 6.0
# 8 * 1600^2 / (81 pi): asymptotic constant in the Metropolis error bound.
METROPOLIS_CONST = 8.0 * 1600.0**2 / (81.0 * math.pi)
TRACT_CONST = 594700.0


@dataclass(frozen=True)
class BoundSet:
    name: str
    value: float
    regime: str
    inputs: dict = field(default_factory=dict)


def lower_bound_fc(n: int, C: float) -> float:
    """Lower bound on the error of any method using ``n`` values on ``F_C``."""
    if 2 * n >= C - 1:
        return SQRT2_6 * math.sqrt(C / (2.0 * n))
    return SQRT2_6 * 3.0 * C / (C + 2.0 * n - 1.0)


def _regime_fc(n, C):
    return "2n>=C-1" if 2 * n >= C - 1 else "2n<C-1"


def upper_bound_simple(n: int, C: float) -> float:
    """Worst-case error bound for the simple Monte Carlo ratio on ``F_C``."""
    return 2.0 * min(1.0, math.sqrt(2.0 * C / n))


def _regime_simple(n, C):
    return "trivial" if 2.0 * C / n >= 1.0 else "sqrt(2C/n)"


def lower_bound_nonadaptive(n: int, d: int, alpha: float, vol_ratio: float = 1.0) -> float:
    """Lower bound for non-adaptive methods on the log-concave class.

    ``vol_ratio`` is ``vol(Omega) / vol(B^d)``. Check ``nonadaptive_bound_valid``
    for whether ``n`` is large enough for the bound to apply.
    """
    return (
        2.0 ** (-d / 2.0 - 1.5) * math.sqrt(vol_ratio) * alpha ** (d / 2.0)
        / math.sqrt(math.factorial(d)) / math.sqrt(n)
    )


def nonadaptive_bound_valid(n: int, d: int, alpha: float, vol_ratio: float = 1.0) -> bool:
    """Second validity condition ``2n >= (alpha / log 4)^d * vol_ratio``.

    The packing threshold of the first condition is not computable and is
    treated as satisfied.
    """
    return 2 * n >= (alpha / math.log(4.0)) ** d * vol_ratio


def _regime_nonadaptive(n, d, alpha, vol_ratio=1.0):
    return "valid" if nonadaptive_bound_valid(n, d, alpha, vol_ratio) else "n-too-small"


def conductance_lb_metropolis(l: float, delta: float, D: float, d: int, alpha: float = 0.0) -> float:
    """Conductance lower bound for the Metropolis ball walk with local conductance ``l``."""
    inner = math.sqrt(math.pi / 2.0) * l * delta / (D * math.sqrt(d + 1.0))
    return l * math.exp(-alpha * delta) / 8.0 * min(inner, 1.0)


def _regime_cond(l, delta, D, d, alpha=0.0):
    inner = math.sqrt(math.pi / 2.0) * l * delta / (D * math.sqrt(d + 1.0))
    return "local" if inner < 1.0 else "clamped"


def conductance_lb_ball(l: float, delta: float, D: float, d: int) -> float:
    """Conductance bound for the plain ball walk: ``sqrt(pi/2) l^2 delta / (8 D sqrt(d+1))``."""
    return math.sqrt(math.pi / 2.0) * l * l * delta / (8.0 * D * math.sqrt(d + 1.0))


def conductance_lb_unit_ball(d: int, alpha: float, delta: float) -> float:
    """Specialization on ``B^d`` (valid for ``delta <= 1/sqrt(d+1)``), 9/1600 coefficient."""
    return math.sqrt(math.pi / 2.0) * 9.0 * delta / (1600.0 * math.sqrt(d + 1.0)) * math.exp(-alpha * delta)


def error_const_metropolis(d: int, delta: float, alpha: float) -> float:
    """Asymptotic ceiling of ``n * e^2`` for the Metropolis estimator on ``B^d``."""
    return METROPOLIS_CONST * (d + 1.0) * math.exp(2.0 * alpha * delta) / delta**2


def tract_ceiling(d: int, alpha: float) -> float:
    """``594700 (d+1) max(d+1, alpha^2)``: the ceiling at the tuned step size."""
    return TRACT_CONST * (d + 1.0) * max(d + 1.0, alpha * alpha)


def classic_f1_error(n: int) -> float:
    """Optimal Monte Carlo error ``1 / (1 + sqrt n)`` for bounded integrands, constant density."""
    return 1.0 / (1.0 + math.sqrt(n))


def cheeger_gap_lb(phi: float) -> float:
    """Spectral gap lower bound ``phi^2 / 2``."""
    return 0.5 * phi * phi


def asymptotic_variance_factor(beta: float) -> float:
    """``(1 + beta) / (1 - beta)``."""
    return (1.0 + beta) / (1.0 - beta)


_REGISTRY = {
    "lower_bound_fc": (lower_bound_fc, _regime_fc),
    "upper_bound_simple": (upper_bound_simple, _regime_simple),
    "lower_bound_nonadaptive": (lower_bound_nonadaptive, _regime_nonadaptive),
    "conductance_lb_metropolis": (conductance_lb_metropolis, _regime_cond),
    "conductance_lb_ball": (conductance_lb_ball, None),
    "conductance_lb_unit_ball": (conductance_lb_unit_ball, None),
    "error_const_metropolis": (error_const_metropolis, None),
    "tract_ceiling": (tract_ceiling, None),
    "classic_f1_error": (classic_f1_error, None),
    "cheeger_gap_lb": (cheeger_gap_lb, None),
    "asymptotic_variance_factor": (asymptotic_variance_factor, None),
}

NAMES = tuple(_REGISTRY)


def parameters(name: str) -> list[str]:
    if name not in _REGISTRY:
        raise NotFound(f"unknown bound {name!r}")
    return list(inspect.signature(_REGISTRY[name][0]).parameters)


def evaluate(name: str, **inputs) -> BoundSet:
    """Evaluate a bound by name, tagging the branch that applied."""
    if name not in _REGISTRY:
        raise NotFound(f"unknown bound {name!r}; known: {', '.join(NAMES)}")
    fn, regime_fn = _REGISTRY[name]
    value = fn(**inputs)
    regime = regime_fn(**inputs) if regime_fn else "single"
    return BoundSet(name=name, value=float(value), regime=regime, inputs=dict(inputs))
