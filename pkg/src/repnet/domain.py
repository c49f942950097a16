"""Domain structure: agents, states, actions, models, and the JSON file format.

A domain bundles the shared system part (agents, states, actions,
observations, impact function, image update rule) with every agent's private
models (transition, directed transition, observation) and its initial
epistemic state (action distributions, image profile, beliefs).

Array layout, all ``float64``::

    impact  (G, S, G, S, A)        impact[g, s, h, s2, a]
    T       (G, S, Au, S)          undirected actions, in declaration order
    DT      (G, S, Ad, bins, S)    directed actions, in declaration order
    O       (G, A, Omega, S)       O[g, a, o, s2]
    AD0     (G, G, S, A)           AD0[g][h, s, a]
    Img0    (G, G, G)              Img0[g][h, i]
    B0      (G, G, S)              B0[g][h, s]
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from repnet.errors import ParseError, RangeError, SchemaError, ValidationError

DIRECTED = "directed"
UNDIRECTED = "undirected"
DIFFERENCE = "difference"
SATURATION = "saturation"

PROB_TOL = 1e-9
# slack for reputations computed in floating point (|rep| <= 1 holds exactly in reals)
REP_SLACK = 1e-12

TOP_LEVEL_KEYS = (
    "agents", "states", "actions", "observations", "impact",
    "update_rule", "hyper", "T", "DT", "O", "AD0", "Img0", "B0",
)
IMPACT_KEYS = ("agent", "state", "actor", "actor_state", "action", "value")


@dataclass(frozen=True)
class Action:
    name: str
    kind: str = UNDIRECTED
    target: int | None = None  # agent index, directed actions only

    @property
    def directed(self) -> bool:
        return self.kind == DIRECTED


@dataclass(frozen=True)
class UpdateRule:
    variant: str = DIFFERENCE
    alpha: float = 0.5


@dataclass(frozen=True)
class HyperParams:
    delta: float = 0.5
    gamma: float = 0.9
    reputation_bins: int = 1


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


@dataclass
class AgentView:
    """The three mutable models one agent keeps about the network."""

    owner: int
    ad: np.ndarray       # (G, S, A)
    img: np.ndarray      # (G, G)
    beliefs: np.ndarray  # (G, S)

    def copy(self) -> AgentView:
        return AgentView(self.owner, self.ad.copy(), self.img.copy(), self.beliefs.copy())


def _frozen(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DomainSpec:
    agents: tuple[str, ...]
    states: tuple[str, ...]
    actions: tuple[Action, ...]
    observations: tuple[str, ...]
    impact: np.ndarray
    update_rule: UpdateRule
    hyper: HyperParams
    T: np.ndarray
    DT: np.ndarray
    O: np.ndarray
    AD0: np.ndarray
    Img0: np.ndarray
    B0: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        for key in ("impact", "T", "DT", "O", "AD0", "Img0", "B0"):
            object.__setattr__(self, key, _frozen(getattr(self, key)))
        for key in ("agents", "states", "actions", "observations"):
            object.__setattr__(self, key, tuple(getattr(self, key)))

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def n_obs(self) -> int:
        return len(self.observations)

    @cached_property
    def undirected(self) -> tuple[int, ...]:
        return tuple(k for k, a in enumerate(self.actions) if not a.directed)

    @cached_property
    def directed(self) -> tuple[int, ...]:
        return tuple(k for k, a in enumerate(self.actions) if a.directed)

    @cached_property
    def kernel(self) -> np.ndarray:
        """Combined transition tensor ``K[g, s, a, bin, s2]`` over all actions.

        Undirected rows are repeated across reputation bins.
        """
        G, S, A = self.n_agents, self.n_states, self.n_actions
        bins = self.hyper.reputation_bins
        K = np.zeros((G, S, A, bins, S))
        for j, a in enumerate(self.undirected):
            K[:, :, a, :, :] = self.T[:, :, j, None, :]
        for j, a in enumerate(self.directed):
            K[:, :, a, :, :] = self.DT[:, :, j, :, :]
        K.setflags(write=False)
        return K

    def initial_view(self, g: int) -> AgentView:
        return AgentView(g, self.AD0[g].copy(), self.Img0[g].copy(), self.B0[g].copy())

    def agent_index(self, name: str) -> int:
        return _lookup(self.agents, name, "agent")

    def state_index(self, name: str) -> int:
        return _lookup(self.states, name, "state")

    def action_index(self, name: str) -> int:
        return _lookup([a.name for a in self.actions], name, "action")

    def obs_index(self, name: str) -> int:
        return _lookup(self.observations, name, "observation")


def _lookup(names, name, what) -> int:
    try:
        return list(names).index(name)
    except ValueError:
        raise KeyError(f"unknown {what} {name!r}") from None


def rep_bin(r: float, bins: int) -> int:
    """Index of the uniform reputation interval of [-1, 1] containing ``r``.

    >>> rep_bin(-1, 4), rep_bin(0.1, 4), rep_bin(1, 4)
    (0, 2, 3)
    """
    if bins < 1:
        raise RangeError(f"bins must be >= 1, got {bins}")
    if not (-1 - REP_SLACK <= r <= 1 + REP_SLACK):
        raise RangeError(f"reputation {r} outside [-1, 1]")
    idx = math.floor((r + 1) / 2 * bins)
    return min(max(idx, 0), bins - 1)


# -- validation ---------------------------------------------------------------

def _expected_shapes(spec: DomainSpec) -> dict[str, tuple[int, ...]]:
    G, S, A, W = spec.n_agents, spec.n_states, spec.n_actions, spec.n_obs
    bins = spec.hyper.reputation_bins
    return {
        "impact": (G, S, G, S, A),
        "T": (G, S, len(spec.undirected), S),
        "DT": (G, S, len(spec.directed), bins, S),
        "O": (G, A, W, S),
        "AD0": (G, G, S, A),
        "Img0": (G, G, G),
        "B0": (G, G, S),
    }


def _check_simplex(out, arr, axis_names, path, what):
    """Append a violation for every row of ``arr`` (last axis summed) off the simplex."""
    arr = np.asarray(arr)
    if arr.size == 0:
        return
    neg = arr < 0
    sums = arr.sum(axis=-1)
    bad = np.abs(sums - 1.0) > PROB_TOL
    for idx in zip(*np.nonzero(bad)):
        where = ", ".join(f"{n}={v}" for n, v in zip(axis_names, idx))
        out.append(Violation(f"{path}[{where}]", f"{what} sums to {float(sums[idx]):.12g}, expected 1"))
    for idx in zip(*np.nonzero(neg.any(axis=-1))):
        where = ", ".join(f"{n}={v}" for n, v in zip(axis_names, idx))
        out.append(Violation(f"{path}[{where}]", f"{what} has a negative entry"))


def _check_range(out, arr, axis_names, path, what):
    arr = np.asarray(arr)
    bad = ~((arr >= -1.0) & (arr <= 1.0))
    for idx in zip(*np.nonzero(bad)):
        where = ", ".join(f"{n}={v}" for n, v in zip(axis_names, idx))
        out.append(Violation(f"{path}[{where}]", f"{what} out of [-1,1]: {float(arr[idx]):.12g}"))


def _named(spec: DomainSpec):
    """Label lookups for readable violation paths."""
    acts = [a.name for a in spec.actions]
    return {
        "agent": spec.agents, "g": spec.agents, "h": spec.agents, "i": spec.agents,
        "s": spec.states, "s2": spec.states,
        "a": acts, "au": [acts[k] for k in spec.undirected], "ad": [acts[k] for k in spec.directed],
        "o": spec.observations,
    }


def _relabel(violations, spec):
    names = _named(spec)
    out = []
    for v in violations:
        path = v.path
        if "[" in path:
            head, body = path.split("[", 1)
            parts = []
            for item in body.rstrip("]").split(", "):
                key, _, val = item.partition("=")
                labels = names.get(key)
                if labels is not None and val.isdigit() and int(val) < len(labels):
                    val = labels[int(val)]
                parts.append(f"{key}={val}")
            path = f"{head}[{', '.join(parts)}]"
        out.append(Violation(path, v.message))
    return out


def validate(spec: DomainSpec) -> list[Violation]:
    """Return one entry per broken invariant; empty iff the domain is usable."""
    out: list[Violation] = []
    for what, names in (("agents", spec.agents), ("states", spec.states),
                        ("actions", [a.name for a in spec.actions]),
                        ("observations", spec.observations)):
        if len(names) == 0:
            out.append(Violation(what, "must be non-empty"))
        seen = set()
        for n in names:
            if not isinstance(n, str) or not n:
                out.append(Violation(what, f"invalid name {n!r}"))
            elif n in seen:
                out.append(Violation(what, f"duplicate name {n!r}"))
            seen.add(n)
    for a in spec.actions:
        if a.kind not in (DIRECTED, UNDIRECTED):
            out.append(Violation(f"actions[{a.name}]", f"unknown kind {a.kind!r}"))
        elif a.directed and (a.target is None or not 0 <= a.target < spec.n_agents):
            out.append(Violation(f"actions[{a.name}]", "directed action needs a valid target"))
        elif not a.directed and a.target is not None:
            out.append(Violation(f"actions[{a.name}]", "undirected action cannot have a target"))

    rule, hyper = spec.update_rule, spec.hyper
    if rule.variant not in (DIFFERENCE, SATURATION):
        out.append(Violation("update_rule.variant", f"unknown variant {rule.variant!r}"))
    if not 0.0 <= rule.alpha <= 1.0:
        out.append(Violation("update_rule.alpha", f"alpha out of [0,1]: {rule.alpha!r}"))
    if not 0.0 <= hyper.delta <= 1.0:
        out.append(Violation("hyper.delta", f"delta out of [0,1]: {hyper.delta!r}"))
    if not 0.0 <= hyper.gamma <= 1.0:
        out.append(Violation("hyper.gamma", f"gamma out of [0,1]: {hyper.gamma!r}"))
    if not isinstance(hyper.reputation_bins, int) or hyper.reputation_bins < 1:
        out.append(Violation("hyper.reputation_bins", "must be a positive integer"))
        return out
    if out and any(v.path in ("agents", "states", "actions", "observations") for v in out):
        return out

    shapes_ok = True
    for key, shape in _expected_shapes(spec).items():
        arr = getattr(spec, key)
        if arr.shape != shape:
            out.append(Violation(key, f"shape {arr.shape} != expected {shape}"))
            shapes_ok = False
        elif not np.all(np.isfinite(arr)):
            out.append(Violation(key, "non-finite entry"))
            shapes_ok = False
    if not shapes_ok:
        return out

    raw: list[Violation] = []
    _check_range(raw, spec.impact, ("g", "s", "h", "s2", "a"), "impact", "impact")
    _check_simplex(raw, spec.T, ("agent", "s", "au"), "T", "transition row")
    _check_simplex(raw, spec.DT, ("agent", "s", "ad", "bin"), "DT", "directed transition row")
    _check_simplex(raw, np.swapaxes(spec.O, 2, 3), ("agent", "a", "s2"), "O", "observation column")
    _check_simplex(raw, spec.AD0, ("agent", "h", "s"), "AD0", "action distribution")
    _check_range(raw, spec.Img0, ("agent", "h", "i"), "Img0", "image")
    _check_simplex(raw, spec.B0, ("agent", "h"), "B0", "belief")
    return out + _relabel(raw, spec)


def validate_view(spec: DomainSpec, view: AgentView) -> list[Violation]:
    """Invariants of a single agent's mutable models."""
    raw: list[Violation] = []
    _check_simplex(raw, view.ad, ("h", "s"), "ad", "action distribution")
    _check_range(raw, view.img, ("h", "i"), "img", "image")
    _check_simplex(raw, view.beliefs, ("h",), "beliefs", "belief")
    return _relabel(raw, spec)


def check(spec: DomainSpec) -> DomainSpec:
    problems = validate(spec)
    if problems:
        raise ValidationError(problems)
    return spec


# -- file format --------------------------------------------------------------

def _require_list_of_names(data, key):
    val = data[key]
    if not isinstance(val, list) or not all(isinstance(x, str) for x in val):
        raise SchemaError(key, "expected a list of names")
    return val


def _array(data, key, shape):
    try:
        arr = np.array(data[key], dtype=float)
    except (ValueError, TypeError) as exc:
        raise SchemaError(key, f"not a rectangular numeric array ({exc})") from None
    if arr.size == 0 and 0 in shape:
        return np.zeros(shape)
    if arr.shape != shape:
        raise SchemaError(key, f"shape {arr.shape} != expected {shape}")
    return arr


def _check_keys(obj, required, optional, path):
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    missing = [k for k in required if k not in obj]
    if missing:
        raise SchemaError(path, f"missing key(s) {missing}")
    unknown = [k for k in obj if k not in required and k not in optional]
    if unknown:
        raise SchemaError(path, f"unknown key(s) {unknown}")


def spec_from_dict(data: dict, name: str = "") -> DomainSpec:
    """Build a domain from its JSON object. Raises on schema or invariant failure."""
    _check_keys(data, TOP_LEVEL_KEYS, ("name", "description"), "<root>")
    agents = _require_list_of_names(data, "agents")
    states = _require_list_of_names(data, "states")
    observations = _require_list_of_names(data, "observations")
    if not isinstance(data["actions"], list):
        raise SchemaError("actions", "expected a list")

    problems: list[Violation] = []
    actions = []
    for k, rec in enumerate(data["actions"]):
        _check_keys(rec, ("name", "kind"), ("target",), f"actions[{k}]")
        target = rec.get("target")
        if target is not None:
            if target in agents:
                target = agents.index(target)
            else:
                problems.append(Violation(f"actions[{rec['name']}]", f"unknown target {target!r}"))
                target = -1
        actions.append(Action(rec["name"], rec["kind"], target))

    rule = data["update_rule"]
    _check_keys(rule, ("variant", "alpha"), (), "update_rule")
    hyper = data["hyper"]
    _check_keys(hyper, ("delta", "gamma", "reputation_bins"), (), "hyper")
    bins = hyper["reputation_bins"]
    if isinstance(bins, float) and bins.is_integer():
        bins = int(bins)
    if not isinstance(bins, int) or isinstance(bins, bool) or bins < 1:
        raise ValidationError([Violation("hyper.reputation_bins", "must be a positive integer")])

    G, S, A, W = len(agents), len(states), len(actions), len(observations)
    n_u = sum(1 for a in actions if a.kind != DIRECTED)
    n_d = A - n_u

    if not isinstance(data["impact"], list):
        raise SchemaError("impact", "expected a list of records")
    impact = np.zeros((G, S, G, S, A))
    lookups = {"agent": agents, "actor": agents, "state": states,
               "actor_state": states, "action": [a.name for a in actions]}
    for k, rec in enumerate(data["impact"]):
        _check_keys(rec, IMPACT_KEYS, (), f"impact[{k}]")
        idx = []
        for key in IMPACT_KEYS[:-1]:
            names = lookups[key]
            if rec[key] not in names:
                problems.append(Violation(f"impact[{k}].{key}", f"unknown name {rec[key]!r}"))
                break
            idx.append(names.index(rec[key]))
        else:
            value = rec["value"]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise SchemaError(f"impact[{k}].value", "expected a number")
            if not -1.0 <= value <= 1.0:
                problems.append(Violation(f"impact[{k}]", f"impact out of [-1,1]: {value!r}"))
            impact[tuple(idx)] = value

    spec = DomainSpec(
        agents=agents, states=states, actions=actions, observations=observations,
        impact=impact,
        update_rule=UpdateRule(rule["variant"], float(rule["alpha"])),
        hyper=HyperParams(float(hyper["delta"]), float(hyper["gamma"]), bins),
        T=_array(data, "T", (G, S, n_u, S)),
        DT=_array(data, "DT", (G, S, n_d, bins, S)),
        O=_array(data, "O", (G, A, W, S)),
        AD0=_array(data, "AD0", (G, G, S, A)),
        Img0=_array(data, "Img0", (G, G, G)),
        B0=_array(data, "B0", (G, G, S)),
        name=data.get("name", name),
    )
    problems += validate(spec)
    if problems:
        raise ValidationError(problems)
    return spec


def spec_to_dict(spec: DomainSpec) -> dict:
    acts = []
    for a in spec.actions:
        rec = {"name": a.name, "kind": a.kind}
        if a.target is not None:
            rec["target"] = spec.agents[a.target]
        acts.append(rec)
    impact = []
    for g, s, h, s2, a in zip(*np.nonzero(spec.impact)):
        impact.append({
            "agent": spec.agents[g], "state": spec.states[s],
            "actor": spec.agents[h], "actor_state": spec.states[s2],
            "action": spec.actions[a].name, "value": float(spec.impact[g, s, h, s2, a]),
        })
    out = {"name": spec.name} if spec.name else {}
    out.update({
        "agents": list(spec.agents),
        "states": list(spec.states),
        "actions": acts,
        "observations": list(spec.observations),
        "impact": impact,
        "update_rule": {"variant": spec.update_rule.variant, "alpha": spec.update_rule.alpha},
        "hyper": {"delta": spec.hyper.delta, "gamma": spec.hyper.gamma,
                  "reputation_bins": spec.hyper.reputation_bins},
    })
    for key in ("T", "DT", "O", "AD0", "Img0", "B0"):
        out[key] = getattr(spec, key).tolist()
    return out


def load_spec(path) -> DomainSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return spec_from_dict(data, name=path.stem)


def save_spec(spec: DomainSpec, path) -> None:
    Path(path).write_text(json.dumps(spec_to_dict(spec), indent=1) + "\n", encoding="utf-8")
