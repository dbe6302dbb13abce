"""Counter-based random streams and oracle cost accounting.

Every stream is a Philox generator keyed by ``(seed, stream_id)``, so a
replication can be replayed in isolation and distinct stream ids never
overlap.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministically derive a 64-bit seed from ``seed`` and integer keys."""
    ss = np.random.SeedSequence([seed & _MASK64, *[k & _MASK64 for k in keys]])
    return int(ss.generate_state(1, np.uint64)[0])


class RngStream:
    """A replayable random stream identified by ``(seed, stream_id)``."""

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        self._bitgen = np.random.Philox(key=self.seed | (self.stream_id << 64))
        self.generator = np.random.Generator(self._bitgen)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}, counter={self.counter})"

    @property
    def counter(self) -> int:
        """The 256-bit Philox block counter, as an integer."""
        words = self._bitgen.state["state"]["counter"]
        return sum(int(w) << (64 * i) for i, w in enumerate(words))

    def random(self, size=None):
        return self.generator.random(size)

    def normal(self, size=None):
        return self.generator.standard_normal(size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size)

    def choice(self, a, size=None, replace=True):
        return self.generator.choice(a, size=size, replace=replace)

    def spawn(self, count: int) -> list[RngStream]:
        """Independent child streams keyed off this stream's identity."""
        base = derive_seed(self.seed, self.stream_id)
        return [RngStream(base, i) for i in range(count)]


def streams(seed: int, count: int) -> list[RngStream]:
    """Streams ``(seed, 0), ..., (seed, count - 1)``."""
    return [RngStream(seed, i) for i in range(count)]


@dataclass
class ChainBudget:
    """Oracle and randomness counters for one run."""

    f_evals: int = 0
    rho_evals: int = 0
    membership_calls: int = 0
    rng_draws: int = 0

    def __add__(self, other: ChainBudget) -> ChainBudget:
        return ChainBudget(*(getattr(self, fl.name) + getattr(other, fl.name) for fl in fields(self)))

    def __iadd__(self, other: ChainBudget) -> ChainBudget:
        for fl in fields(self):
            setattr(self, fl.name, getattr(self, fl.name) + getattr(other, fl.name))
        return self

    @classmethod
    def merge(cls, budgets) -> ChainBudget:
        total = cls()
        for b in budgets:
            total += b
        return total

    def as_dict(self) -> dict:
        return {fl.name: getattr(self, fl.name) for fl in fields(self)}

    # Oracle routing: every counted evaluation goes through one of these.

    def eval_f(self, f, X):
        X = np.asarray(X, dtype=float)
        self.f_evals += len(X)
        return np.asarray(f(X), dtype=float)

    def eval_rho(self, rho, X):
        from .errors import InvalidDensity

        X = np.asarray(X, dtype=float)
        self.rho_evals += len(X)
        values = np.asarray(rho(X), dtype=float)
        if np.any(~(values > 0)):
            raise InvalidDensity("weight oracle returned a non-positive value")
        return values

    def member(self, body, X):
        X = np.asarray(X, dtype=float)
        self.membership_calls += len(X)
        return body.contains(X)
