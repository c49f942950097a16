"""Expected impacts and exact finite-horizon optimal-impact planning.

The planner is an expectimax over (action, observation) branches. Each child
node carries the agent's updated action model, image profile and beliefs, so
the tree is exponential in the horizon: with all observations possible it has
``1 + sum_{l=1}^{k-1} (|A| |Omega|)^l`` nodes (see ``expected_node_count``).
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from repnet.domain import AgentView, DomainSpec
from repnet.dynamics import bse, obs_prob
from repnet.learning import ade
from repnet.reputation import image_expectation, rep_of

COUNTER_MAX = 2**63 - 1


@dataclass(frozen=True)
class PlanConfig:
    agent: int
    horizon: int = 1
    gamma: float | None = None
    count_nodes: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.gamma is not None and not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma out of [0,1]: {self.gamma}")


@dataclass
class PlanResult:
    best_action: int
    value: float
    q_values: np.ndarray
    nodes_expanded: int = 0
    nodes_by_depth: list[int] = field(default_factory=list)

    def to_dict(self, spec: DomainSpec) -> dict:
        return {
            "best_action": spec.actions[self.best_action].name,
            "value": self.value,
            "q_values": {a.name: float(q) for a, q in zip(spec.actions, self.q_values)},
            "nodes_expanded": self.nodes_expanded,
        }

    def to_json(self, spec: DomainSpec) -> str:
        return json.dumps(self.to_dict(spec))


def expected_instant_impact(spec: DomainSpec, g: int, sg: int, h: int, sh: int, ad: np.ndarray) -> float:
    return float(ad[h, sh] @ spec.impact[g, sg, h, sh])


def _pin_vector(spec: DomainSpec, g: int, ad: np.ndarray, beliefs: np.ndarray) -> np.ndarray:
    # pin[sg] = sum_{h != g} sum_sh B[h,sh] sum_a AD[h,sh,a] I[g,sg,h,sh,a]
    per = np.einsum("hy,hya,xhya->xh", beliefs, ad, spec.impact[g])
    return per.sum(axis=1) - per[:, g]


def pin(spec: DomainSpec, g: int, sg: int, ad: np.ndarray, beliefs: np.ndarray) -> float:
    """Expected impact of the other agents on g while g is in ``sg``."""
    return float(_pin_vector(spec, g, ad, beliefs)[sg])


def pi_tot_all(spec: DomainSpec, g: int, ad: np.ndarray, beliefs: np.ndarray) -> np.ndarray:
    """Total perceived impact on g for every action of g."""
    self_impact = spec.impact[g, np.arange(spec.n_states), g, np.arange(spec.n_states), :]  # (S, A)
    bg = beliefs[g]
    return (bg @ _pin_vector(spec, g, ad, beliefs) + bg @ self_impact) / spec.n_agents


def pi_tot(spec: DomainSpec, g: int, a: int, ad: np.ndarray, beliefs: np.ndarray) -> float:
    return float(pi_tot_all(spec, g, ad, beliefs)[a])


def expected_node_count(n_actions: int, n_obs: int, k: int) -> int:
    """Planner invocations in the unpruned tree of horizon ``k``."""
    if min(n_actions, n_obs, k) < 1:
        raise ValueError("all arguments must be >= 1")
    b = n_actions * n_obs
    total = 1 + sum(b**l for l in range(1, k))
    if total > COUNTER_MAX:
        raise OverflowError(f"node count {total} exceeds 64-bit counter")
    return total


class _Search:
    def __init__(self, spec: DomainSpec, g: int, gamma: float, horizon: int):
        self.spec = spec
        self.g = g
        self.gamma = gamma
        self.by_depth = [0] * horizon

    def q_values(self, view: AgentView, k: int, depth: int, actions=None) -> np.ndarray:
        spec, g = self.spec, self.g
        self.by_depth[depth] += 1
        q = pi_tot_all(spec, g, view.ad, view.beliefs)
        if k == 1:
            return q
        if actions is None:
            actions = range(spec.n_actions)
        img_next = image_expectation(spec, g, view.img, None, view.beliefs, view.ad)
        ad_next: dict[int, np.ndarray] = {}
        rep_self = rep_of(g, g, view.img)
        for a in actions:
            p_obs = obs_prob(spec, g, a, view.beliefs[g], rep_self)
            future = 0.0
            for o in range(spec.n_obs):
                p = p_obs[o]
                if p <= 0.0:
                    continue
                if o not in ad_next:
                    ad_next[o] = ade(spec, g, o, view.ad, view.img)
                child = AgentView(g, ad_next[o], img_next,
                                  bse(spec, g, a, o, view, keep_impossible=True))
                future += p * self.q_values(child, k - 1, depth + 1).max()
            q[a] = q[a] + self.gamma * future
        return q


def _workers(cfg: PlanConfig) -> int:
    n = max(1, cfg.workers)
    cap = os.environ.get("REPNET_THREADS", "")
    if cap.isdigit():
        n = min(n, max(1, int(cap)))
    return n


def oi(spec: DomainSpec, view: AgentView, cfg: PlanConfig) -> PlanResult:
    """Optimal-impact value and root action of agent ``cfg.agent`` over ``cfg.horizon`` steps.

    Zero-probability observation branches are pruned. Ties between actions
    go to the lowest action index.
    """
    gamma = spec.hyper.gamma if cfg.gamma is None else cfg.gamma
    g, k = cfg.agent, cfg.horizon
    workers = _workers(cfg)
    if workers > 1 and k > 1 and spec.n_actions > 1:
        searches = [_Search(spec, g, gamma, k) for _ in range(spec.n_actions)]

        def branch(a):
            return searches[a].q_values(view, k, 0, actions=[a])[a]

        with ThreadPoolExecutor(max_workers=workers) as pool:
            branch_q = list(pool.map(branch, range(spec.n_actions)))
        q = np.array(branch_q)
        by_depth = [1] + [sum(s.by_depth[d] for s in searches) for d in range(1, k)]
    else:
        search = _Search(spec, g, gamma, k)
        q = search.q_values(view, k, 0)
        by_depth = search.by_depth
    best = int(np.argmax(q))  # first maximiser = lowest index
    nodes = sum(by_depth) if cfg.count_nodes else 0
    return PlanResult(best, float(q[best]), q, nodes, list(by_depth) if cfg.count_nodes else [])
