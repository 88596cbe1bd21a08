"""Adversarial multi-armed bandit learners with loss feedback.

``InfLearner`` is the Implicitly Normalized Forecaster with the polynomial
potential ``psi(x) = (eta / -x) ** 2`` and no forced exploration: the arm
distribution is ``p_i = (eta / (L_i - C)) ** 2`` where ``L_i`` is the
importance-weighted cumulative loss estimate of arm ``i`` and ``C < min L``
is the unique normalizer making ``p`` sum to one.  With horizon ``Upsilon``
known in advance, ``eta = sqrt(2 * Upsilon)`` gives expected regret at most
``2 * sqrt(2 * Upsilon * M)`` against oblivious losses in ``[0, 1]``.

``Exp3Learner`` (exponential weights on the same estimates) sits behind the
same interface as a fallback and a differential-testing partner.
"""
from __future__ import annotations

import math

import numpy as np

from . import rng as _rng
from .core import ContractViolation, ValidationError


class _Learner:
    name = "base"

    def __init__(self, arms: int, horizon: int, seed: int = 0, component: str = "learner"):
        if arms < 1 or horizon < 1:
            raise ValidationError("need at least one arm and one round")
        self.arms = arms
        self.horizon = horizon
        self.seed = seed
        self.round = 0
        # plain floats: arm counts are small and numpy overhead dominates
        self._L = [0.0] * arms
        self._p = [1.0 / arms] * arms
        self.pulls = [0] * arms
        self._gen = _rng.stream(seed, component)
        self._pending = None

    @property
    def loss_estimates(self) -> np.ndarray:
        return np.array(self._L)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array(self._p)

    def choose(self) -> int:
        """Sample an arm (1-based) from the current distribution."""
        if self._pending is not None:
            raise ContractViolation("previous choice has not been updated yet")
        if self.round >= self.horizon:
            raise ContractViolation(f"horizon of {self.horizon} rounds exhausted")
        self.round += 1
        p = self._p
        u = self._gen.random() * math.fsum(p)
        arm = self.arms - 1
        acc = 0.0
        for i, q in enumerate(p):
            acc += q
            if u < acc:
                arm = i
                break
        # round-off fallback: last arm with positive mass
        while p[arm] <= 0.0:
            arm -= 1
        self._pending = arm
        self.pulls[arm] += 1
        return arm + 1

    def update(self, arm: int, loss: float):
        if not 0.0 <= loss <= 1.0:
            raise ValidationError(f"loss {loss} outside [0, 1]")
        if self._pending is None or arm != self._pending + 1:
            raise ContractViolation(f"update for arm {arm} does not match the last choice")
        i = self._pending
        self._pending = None
        if loss:
            self._L[i] += loss / self._p[i]
            self._p = self._distribution()

    def _distribution(self) -> list:
        raise NotImplementedError


class InfLearner(_Learner):
    name = "inf"

    def __init__(self, arms: int, horizon: int, seed: int = 0, component: str = "learner",
                 eta: float | None = None):
        super().__init__(arms, horizon, seed, component)
        self.eta = math.sqrt(2.0 * horizon) if eta is None else float(eta)
        self._C = None

    def _newton(self, C):
        """One Newton step on f(C) = sum (eta / (L - C))^2 - 1; returns (f, next C)."""
        eta = self.eta
        f = -1.0
        df = 0.0
        for x in self._L:
            r = eta / (x - C)
            f += r * r
            df += r * r / (x - C)
        return f, C - f / (2.0 * df)

    def _distribution(self) -> list:
        L = self._L
        eta = self.eta
        lo = min(L)
        # f is increasing and convex on C < min L, so Newton started right of the
        # root (f >= 0) decreases monotonically to it.  Losses only grow, so the
        # previous normalizer lies left of the new root and one Newton step from
        # it lands right of the root unless it passes min L.
        C = lo - eta
        if self._C is not None and self._C < lo:
            _, guess = self._newton(self._C)
            if guess < lo:
                C = min(C, guess)
        for _ in range(200):
            f, nxt = self._newton(C)
            if f <= 1e-13:
                break
            C = nxt
        self._C = C
        p = [(eta / (x - C)) ** 2 for x in L]
        s = math.fsum(p)
        return [q / s for q in p]


class Exp3Learner(_Learner):
    name = "exp3"

    def __init__(self, arms: int, horizon: int, seed: int = 0, component: str = "learner",
                 rate: float | None = None):
        super().__init__(arms, horizon, seed, component)
        if rate is None:
            rate = math.sqrt(2.0 * math.log(arms) / (arms * horizon)) if arms > 1 else 0.0
        self.rate = rate

    def _distribution(self) -> list:
        lo = min(self._L)
        w = [math.exp(-self.rate * (x - lo)) for x in self._L]
        s = math.fsum(w)
        return [q / s for q in w]


LEARNERS = {"inf": InfLearner, "exp3": Exp3Learner}


def make_learner(kind: str, arms: int, horizon: int, seed: int = 0, component: str = "learner"):
    try:
        cls = LEARNERS[kind]
    except KeyError:
        raise ValidationError(f"unknown learner {kind!r}") from None
    return cls(arms, horizon, seed, component)


def learner_choose(state: _Learner) -> int:
    return state.choose()


def learner_update(state: _Learner, arm: int, loss: float) -> _Learner:
    state.update(arm, loss)
    return state
