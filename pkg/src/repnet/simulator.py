"""Synchronous ground-truth simulation.

Every step, all agents pick an action from their pre-step views, true
successor states and observations are sampled, and each agent then updates
its beliefs, images and action distributions. Random draws come from
generators keyed by ``(seed, step, agent, purpose)`` so one agent's sampling
never shifts another agent's stream.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from repnet.domain import AgentView, DomainSpec, validate_view
from repnet.dynamics import bse, kernel_at
from repnet.errors import RepNetError, SimulationFault, ValidationError
from repnet.learning import ade
from repnet.planner import PlanConfig, oi
from repnet.reputation import image_expectation, rep_of, rep_vector

TRACE_VERSION = 1

# draw purposes
_INIT, _ACT, _TRANS, _OBS = 0, 1, 2, 3


def stream(seed: int, step: int, agent: int, purpose: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), step, agent, purpose]))


# -- policies -------------------------------------------------------------------

class Policy:
    def select(self, spec: DomainSpec, g: int, view: AgentView, true_state: int,
               step: int, rng: np.random.Generator) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class Plan(Policy):
    """Re-plan every step with the optimal-impact search."""

    horizon: int = 1

    def select(self, spec, g, view, true_state, step, rng):
        return oi(spec, view, PlanConfig(g, self.horizon)).best_action


@dataclass(frozen=True)
class Fixed(Policy):
    script: tuple[int, ...] = ()

    def select(self, spec, g, view, true_state, step, rng):
        return self.script[step]


@dataclass(frozen=True)
class Random(Policy):
    def select(self, spec, g, view, true_state, step, rng):
        return int(rng.integers(spec.n_actions))


@dataclass(frozen=True)
class Stationary(Policy):
    """Scripted behaviour ``dist[s, a]`` driven by the agent's true state."""

    dist: np.ndarray = field(default_factory=lambda: np.ones((1, 1)))

    def select(self, spec, g, view, true_state, step, rng):
        return int(rng.choice(spec.n_actions, p=np.asarray(self.dist)[true_state]))


# -- state and records ----------------------------------------------------------

@dataclass
class GroundTruth:
    true_state: np.ndarray
    rng_seed: int
    step_index: int = 0


@dataclass
class StepRecord:
    step_index: int
    actions: list[int]
    states: list[int]          # true successor states
    observations: list[int]
    impacts: list[float]       # realised impact received, per agent
    reputations: list[list[float]]  # reputations[g][h] = post-step rep_of(g, h)
    events: list[dict] = field(default_factory=list)

    def to_json(self, spec: DomainSpec) -> str:
        return json.dumps({
            "v": TRACE_VERSION,
            "step": self.step_index,
            "agents": [
                {
                    "agent": spec.agents[g],
                    "action": spec.actions[self.actions[g]].name,
                    "state": spec.states[self.states[g]],
                    "observation": spec.observations[self.observations[g]],
                    "impact": self.impacts[g],
                    "reputation": dict(zip(spec.agents, self.reputations[g])),
                }
                for g in range(spec.n_agents)
            ],
            "events": self.events,
        }, separators=(",", ":"))


def initial_truth(spec: DomainSpec, seed: int) -> GroundTruth:
    """Sample each agent's starting state from its own initial self-belief."""
    states = [int(stream(seed, 0, g, _INIT).choice(spec.n_states, p=spec.B0[g, g]))
              for g in range(spec.n_agents)]
    return GroundTruth(np.array(states), seed, 0)


def _update(spec, g, a, o, view, events):
    impossible: list[int] = []
    zero_rows: list[tuple[int, int]] = []
    beliefs = bse(spec, g, a, o, view, keep_impossible=True, impossible=impossible)
    img = image_expectation(spec, g, view.img, None, view.beliefs, view.ad)
    ad = ade(spec, g, o, view.ad, view.img, zero_rows=zero_rows)
    for h in impossible:
        events.append({"type": "impossible_observation", "agent": spec.agents[g],
                       "subject": spec.agents[h]})
    for h, s in zero_rows:
        events.append({"type": "zero_likelihood", "agent": spec.agents[g],
                       "subject": spec.agents[h], "state": spec.states[s]})
    return AgentView(g, ad, img, beliefs)


def step(spec: DomainSpec, gt: GroundTruth, views: list[AgentView], policies,
         check_views: bool = False):
    """Advance every agent by one synchronous step.

    Returns the new ground truth, the new views and the step's record. The
    inputs are not modified.
    """
    n, t, seed = spec.n_agents, gt.step_index, gt.rng_seed
    s_now = gt.true_state
    actions = []
    for g in range(n):
        try:
            actions.append(int(policies[g].select(spec, g, views[g], int(s_now[g]), t,
                                                  stream(seed, t, g, _ACT))))
        except RepNetError as exc:
            raise SimulationFault(t, g, exc) from exc

    successors, observations = [], []
    for g in range(n):
        a = actions[g]
        act = spec.actions[a]
        # ground truth: the target's own view of the actor's reputation
        rep = rep_of(act.target, g, views[act.target].img) if act.directed else 0.0
        row = kernel_at(spec, g, rep)[s_now[g], a]
        s2 = int(stream(seed, t, g, _TRANS).choice(spec.n_states, p=row))
        o = int(stream(seed, t, g, _OBS).choice(spec.n_obs, p=spec.O[g, a, :, s2]))
        successors.append(s2)
        observations.append(o)

    impacts = [
        float(sum(spec.impact[g, s_now[g], h, s_now[h], actions[h]] for h in range(n)))
        for g in range(n)
    ]

    events: list[dict] = []
    new_views = []
    for g in range(n):
        try:
            view = _update(spec, g, actions[g], observations[g], views[g], events)
            if check_views:
                problems = validate_view(spec, view)
                if problems:
                    raise ValidationError(problems)
        except RepNetError as exc:
            raise SimulationFault(t, g, exc) from exc
        new_views.append(view)

    record = StepRecord(
        step_index=t, actions=actions, states=successors, observations=observations,
        impacts=impacts,
        reputations=[rep_vector(g, new_views[g].img).tolist() for g in range(n)],
        events=events,
    )
    return GroundTruth(np.array(successors), seed, t + 1), new_views, record


def iterate(spec: DomainSpec, policies, seed: int, gt: GroundTruth | None = None,
            views: list[AgentView] | None = None):
    """Yield ``(ground_truth, views, record)`` after every step, forever."""
    gt = initial_truth(spec, seed) if gt is None else gt
    views = [spec.initial_view(g) for g in range(spec.n_agents)] if views is None else views
    while True:
        gt, views, rec = step(spec, gt, views, policies)
        yield gt, views, rec


def run(spec: DomainSpec, policies, steps: int, seed: int, gt: GroundTruth | None = None,
        views: list[AgentView] | None = None) -> list[StepRecord]:
    if steps < 1:
        raise ValueError("steps must be >= 1")
    for g, pol in enumerate(policies):
        if isinstance(pol, Fixed) and len(pol.script) < steps:
            raise ValueError(f"script for agent {spec.agents[g]} shorter than {steps} steps")
    sim = iterate(spec, policies, seed, gt, views)
    return [next(sim)[2] for _ in range(steps)]


def cumulative_impact(records: list[StepRecord]) -> np.ndarray:
    return np.sum([r.impacts for r in records], axis=0)


def write_trace(spec: DomainSpec, records: list[StepRecord], path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json(spec) + "\n")
