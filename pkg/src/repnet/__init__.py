"""Reputation-network POMDPs: specification, belief and image updates,
action-model learning, exact optimal-impact planning, and simulation."""
from repnet.domain import (
    Action, AgentView, DomainSpec, HyperParams, UpdateRule, Violation,
    load_spec, save_spec, rep_bin, validate,
)
from repnet.dynamics import bse, obs_prob, ose, sse, t_du
from repnet.errors import (
    ImpossibleObservation, ParseError, RangeError, SchemaError, SimulationFault, ValidationError,
    ZeroLikelihood,
)
from repnet.learning import ade
from repnet.planner import PlanConfig, PlanResult, expected_node_count, oi, pi_tot, pin
from repnet.reputation import image_expectation, perceived_image, rep_of, update_u

__version__ = "0.1.0"
