"""Seeded random domains and a few hand-built micro-domains."""
from __future__ import annotations

import numpy as np

from repnet.domain import (
    DIRECTED, UNDIRECTED, Action, DomainSpec, HyperParams, UpdateRule, check,
)


def _simplex(rng: np.random.Generator, shape, positive: bool = True) -> np.ndarray:
    x = rng.dirichlet(np.ones(shape[-1]), size=shape[:-1]) if shape[-1] else np.zeros(shape)
    if positive and shape[-1]:
        # keep every entry bounded away from zero
        x = 0.5 * x + 0.5 / shape[-1]
        x /= x.sum(axis=-1, keepdims=True)
    return x


def random_spec(rng: np.random.Generator | int, n_agents: int = 2, n_states: int = 2,
                n_actions: int = 2, n_obs: int = 2, n_directed: int | None = None,
                bins: int = 2, variant: str = "difference", alpha: float | None = None,
                delta: float | None = None, gamma: float | None = None,
                positive: bool = True) -> DomainSpec:
    """A valid domain with random dense models.

    ``positive`` keeps every transition, observation, action and belief
    probability strictly positive, so no observation branch is ever pruned.
    """
    rng = np.random.default_rng(rng)
    G, S, A, W = n_agents, n_states, n_actions, n_obs
    if n_directed is None:
        n_directed = int(rng.integers(0, A + 1))
    kinds = [DIRECTED] * n_directed + [UNDIRECTED] * (A - n_directed)
    rng.shuffle(kinds)
    actions = []
    for k, kind in enumerate(kinds):
        target = int(rng.integers(G)) if kind == DIRECTED else None
        actions.append(Action(f"a{k}", kind, target))
    n_u = A - n_directed
    spec = DomainSpec(
        agents=[f"g{k}" for k in range(G)],
        states=[f"s{k}" for k in range(S)],
        actions=actions,
        observations=[f"o{k}" for k in range(W)],
        impact=rng.uniform(-1, 1, size=(G, S, G, S, A)),
        update_rule=UpdateRule(variant, float(rng.uniform(0.1, 0.9)) if alpha is None else alpha),
        hyper=HyperParams(
            float(rng.uniform()) if delta is None else delta,
            float(rng.uniform(0.5, 1.0)) if gamma is None else gamma,
            bins,
        ),
        T=_simplex(rng, (G, S, n_u, S), positive),
        DT=_simplex(rng, (G, S, n_directed, bins, S), positive),
        O=np.swapaxes(_simplex(rng, (G, A, S, W), positive), 2, 3),
        AD0=_simplex(rng, (G, G, S, A), positive),
        Img0=rng.uniform(-1, 1, size=(G, G, G)),
        B0=_simplex(rng, (G, G, S), positive),
        name="random",
    )
    return check(spec)


def _impact_array(G, S, A, entries):
    I = np.zeros((G, S, G, S, A))
    for key, val in entries.items():
        I[key] = val
    return I


def trade_domain(success_high: float = 0.9, success_low: float = 0.1,
                 sensor: float = 0.9, gamma: float = 0.9) -> DomainSpec:
    """Two traders whose trades succeed mostly when the trader's reputation is high.

    States are ``ready`` and ``gain``; an agent in ``gain`` receives +1 self
    impact whatever it does. ``trade_A`` / ``trade_B`` are directed at the
    named agent, ``idle`` always returns to ``ready``. Each agent observes
    its own successor state through a symmetric sensor.
    """
    agents = ["A", "B"]
    states = ["ready", "gain"]
    actions = [Action("idle"), Action("trade_A", DIRECTED, 0), Action("trade_B", DIRECTED, 1)]
    G, S, A = 2, 2, 3
    T = np.zeros((G, S, 1, S))
    T[:, :, 0, 0] = 1.0
    DT = np.zeros((G, S, 2, 2, S))
    for g in range(G):
        for j in range(2):
            self_directed = j == g
            hi = success_low if self_directed else success_high
            DT[g, :, j, 0, :] = [1 - success_low, success_low]
            DT[g, :, j, 1, :] = [1 - hi, hi]
    O = np.zeros((G, A, 2, S))
    O[:, :, 0, 0] = O[:, :, 1, 1] = sensor
    O[:, :, 1, 0] = O[:, :, 0, 1] = 1 - sensor
    impact = {}
    for g in range(G):
        for a in range(A):
            impact[(g, 1, g, 1, a)] = 1.0
    return check(DomainSpec(
        agents=agents, states=states, actions=actions, observations=["see_ready", "see_gain"],
        impact=_impact_array(G, S, A, impact),
        update_rule=UpdateRule("difference", 0.3),
        hyper=HyperParams(0.5, gamma, 2),
        T=T, DT=DT, O=O,
        AD0=np.full((G, G, S, A), 1.0 / A),
        Img0=np.full((G, G, G), 0.5),
        B0=np.tile([1.0, 0.0], (G, G, 1)),
        name="trade",
    ))


def identifying_sensor_domain(n_states: int = 2, n_actions: int = 3,
                              accuracy: float = 1.0) -> DomainSpec:
    """Two agents whose observation names the action just performed.

    Transitions are uniform and identical for every action. Observation
    ``o == a`` is seen with probability ``accuracy`` and the other labels
    share the rest, so with ``accuracy=1`` observing ``o`` identifies
    action ``o``.
    """
    G, S, A = 2, n_states, n_actions
    actions = [Action(f"act{k}") for k in range(A)]
    O = np.full((G, A, A, S), (1.0 - accuracy) / (A - 1) if A > 1 else 0.0)
    for a in range(A):
        O[:, a, a, :] = accuracy
    return check(DomainSpec(
        agents=["me", "other"], states=[f"s{k}" for k in range(S)], actions=actions,
        observations=[f"saw{k}" for k in range(A)],
        impact=np.zeros((G, S, G, S, A)),
        update_rule=UpdateRule("difference", 0.5),
        hyper=HyperParams(0.5, 0.9, 1),
        T=np.full((G, S, A, S), 1.0 / S), DT=np.zeros((G, S, 0, 1, S)),
        O=O,
        AD0=np.full((G, G, S, A), 1.0 / A),
        Img0=np.zeros((G, G, G)),
        B0=np.full((G, G, S), 1.0 / S),
        name="identifying_sensor",
    ))


def noisy_sensor_domain(accuracy: float = 0.8, stay: float = 0.7) -> DomainSpec:
    """Two agents, two states, a sticky ``wait`` and a directed ``help``.

    Each agent reads its own successor state correctly with probability
    ``accuracy``. ``help`` moves the actor to ``good`` with a probability
    that rises with the actor's reputation.
    """
    G, S, A = 2, 2, 3
    actions = [Action("wait"), Action("help_x", DIRECTED, 0), Action("help_y", DIRECTED, 1)]
    T = np.zeros((G, S, 1, S))
    T[:, 0, 0] = [stay, 1 - stay]
    T[:, 1, 0] = [1 - stay, stay]
    DT = np.zeros((G, S, 2, 2, S))
    DT[:, :, :, 0, :] = [0.6, 0.4]
    DT[:, :, :, 1, :] = [0.2, 0.8]
    O = np.zeros((G, A, 2, S))
    O[:, :, 0, 0] = O[:, :, 1, 1] = accuracy
    O[:, :, 1, 0] = O[:, :, 0, 1] = 1 - accuracy
    impact = {}
    for g in range(G):
        h = 1 - g
        impact[(g, 1, g, 1, 0)] = 0.2
        impact[(g, 0, h, 1, 1 + g)] = 0.6   # h helps g
        impact[(g, 1, h, 1, 1 + g)] = 0.4
        impact[(h, 0, g, 0, 0)] = -0.3      # g idles while both struggle
    AD0 = np.tile([0.5, 0.25, 0.25], (G, G, S, 1))
    return check(DomainSpec(
        agents=["x", "y"], states=["bad", "good"], actions=actions,
        observations=["looks_bad", "looks_good"],
        impact=_impact_array(G, S, A, impact),
        update_rule=UpdateRule("difference", 0.5),
        hyper=HyperParams(0.5, 0.9, 2),
        T=T, DT=DT, O=O, AD0=AD0,
        Img0=np.full((G, G, G), 0.2),
        B0=np.full((G, G, S), 0.5),
        name="noisy_sensor",
    ))
