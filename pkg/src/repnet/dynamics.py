"""Transition kernel and belief-state estimation.

The combined kernel dispatches on action kind: directed actions read the
directed transition tensor at the actor's reputation bin, undirected actions
read the plain transition tensor. Beliefs are updated with the objective
estimator for the agent's own state and the subjective, action-marginalised
estimator for every other agent.

``reference_se`` and ``reference_v_star`` are textbook single-agent POMDP
routines kept as independent reference points.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from repnet.domain import DomainSpec, AgentView, rep_bin
from repnet.errors import ImpossibleObservation, RangeError
from repnet.reputation import rep_of


@dataclass(frozen=True)
class StepContext:
    estimator: int
    actor: int
    reputation_of_actor: float

    def __post_init__(self):
        if not -1.0 <= self.reputation_of_actor <= 1.0:
            raise RangeError(f"reputation {self.reputation_of_actor} outside [-1, 1]")


def t_du(spec: DomainSpec, g: int, s: int, a: int, s2: int, actor: int, rep_of_actor: float) -> float:
    """Probability that ``actor`` doing ``a`` in ``s`` reaches ``s2``, in g's model."""
    b = rep_bin(rep_of_actor, spec.hyper.reputation_bins)
    return float(spec.kernel[g, s, a, b, s2])


def kernel_at(spec: DomainSpec, g: int, rep: float) -> np.ndarray:
    """g's transition matrices ``K[s, a, s2]`` with directed rows at reputation ``rep``."""
    return spec.kernel[g, :, :, rep_bin(rep, spec.hyper.reputation_bins), :]


def _predict(spec: DomainSpec, g: int, a: int, b: np.ndarray, rep: float) -> np.ndarray:
    return b @ kernel_at(spec, g, rep)[:, a, :]


def obs_prob(spec: DomainSpec, g: int, a: int, b: np.ndarray, rep_self: float = 0.0) -> np.ndarray:
    """``P(o | a, b)`` for every observation o, with g as the actor."""
    return spec.O[g, a] @ _predict(spec, g, a, b, rep_self)


def ose(spec: DomainSpec, g: int, a: int, o: int, b_cur: np.ndarray, rep_self: float) -> np.ndarray:
    """g's own belief after executing ``a`` and perceiving ``o``."""
    unnorm = spec.O[g, a, o] * _predict(spec, g, a, b_cur, rep_self)
    z = unnorm.sum()
    if not z > 0.0:
        raise ImpossibleObservation(
            f"observation {spec.observations[o]!r} impossible after action "
            f"{spec.actions[a].name!r} for agent {spec.agents[g]!r}", agent=g)
    return unnorm / z


def sse_unnormalized(spec: DomainSpec, g: int, h: int, o: int, b_cur: np.ndarray,
                     ad_g: np.ndarray, rep_of_h: float) -> np.ndarray:
    K = kernel_at(spec, g, rep_of_h)            # (S, A, S)
    weight = b_cur[:, None] * ad_g[h]           # (S, A): b(s) AD(h,s)(a)
    pred = np.einsum("sa,sat->at", weight, K)   # (A, S2)
    return np.einsum("at,at->t", spec.O[g, :, o, :], pred)


def sse(spec: DomainSpec, g: int, h: int, o: int, b_cur: np.ndarray,
        ad_g: np.ndarray, rep_of_h: float) -> np.ndarray:
    """g's belief about ``h`` after g perceives ``o``, marginalising h's action."""
    unnorm = sse_unnormalized(spec, g, h, o, b_cur, ad_g, rep_of_h)
    z = unnorm.sum()
    if not z > 0.0:
        raise ImpossibleObservation(
            f"observation {spec.observations[o]!r} impossible for {spec.agents[h]!r} "
            f"under the action model of {spec.agents[g]!r}", agent=h)
    return unnorm / z


def bse(spec: DomainSpec, g: int, a: int, o: int, view: AgentView,
        keep_impossible: bool = False, impossible: list | None = None) -> np.ndarray:
    """Update every belief in g's map after g did ``a`` and saw ``o``.

    Reputations fed to the kernel are computed from ``view.img``. With
    ``keep_impossible`` a neighbour whose update has zero normaliser keeps
    its prior belief (its index is appended to ``impossible``); g's own
    update always raises.
    """
    B = view.beliefs
    out = np.empty_like(B, dtype=float)
    out[g] = ose(spec, g, a, o, B[g], rep_of(g, g, view.img))
    for h in range(spec.n_agents):
        if h == g:
            continue
        try:
            out[h] = sse(spec, g, h, o, B[h], view.ad, rep_of(g, h, view.img))
        except ImpossibleObservation:
            if not keep_impossible:
                raise
            out[h] = B[h]
            if impossible is not None:
                impossible.append(h)
    return out


# -- single-agent reference -----------------------------------------------------

@dataclass(frozen=True)
class SingleAgentPOMDP:
    """Plain POMDP with ``T[s, a, s2]``, ``O[a, o, s2]`` and ``R[a, s]``."""

    T: np.ndarray
    O: np.ndarray
    R: np.ndarray | None = None
    gamma: float = 1.0

    @classmethod
    def from_spec(cls, spec: DomainSpec, g: int, R=None, gamma=None) -> SingleAgentPOMDP:
        """View agent g of an undirected-only domain as a single-agent POMDP."""
        if spec.directed:
            raise ValueError("domain has directed actions")
        return cls(np.asarray(spec.T[g]), np.asarray(spec.O[g]), R,
                   spec.hyper.gamma if gamma is None else gamma)


def reference_se(pomdp: SingleAgentPOMDP, a: int, o: int, b) -> list[float]:
    """Bayes filter step by explicit summation."""
    S = len(b)
    unnorm = []
    for s2 in range(S):
        acc = 0.0
        for s in range(S):
            acc += float(pomdp.T[s, a, s2]) * float(b[s])
        unnorm.append(float(pomdp.O[a, o, s2]) * acc)
    z = sum(unnorm)
    if not z > 0.0:
        raise ImpossibleObservation("zero-probability observation")
    return [p / z for p in unnorm]


def _ref_obs_prob(pomdp, a, o, b):
    S = len(b)
    return sum(float(pomdp.O[a, o, s2]) * sum(float(pomdp.T[s, a, s2]) * b[s] for s in range(S))
               for s2 in range(S))


def reference_v_star(pomdp: SingleAgentPOMDP, b, k: int) -> float:
    """Exact finite-horizon optimal value by full (action, observation) recursion."""
    if k < 1:
        raise ValueError("horizon must be >= 1")
    R = pomdp.R
    n_a, n_o = R.shape[0], pomdp.O.shape[1]
    b = [float(x) for x in b]
    best = -np.inf
    for a in range(n_a):
        q = sum(float(R[a, s]) * b[s] for s in range(len(b)))
        if k > 1 and pomdp.gamma != 0.0:
            for o in range(n_o):
                p = _ref_obs_prob(pomdp, a, o, b)
                if p > 0.0:
                    q += pomdp.gamma * p * reference_v_star(pomdp, reference_se(pomdp, a, o, b), k - 1)
        best = max(best, q)
    return float(best)

