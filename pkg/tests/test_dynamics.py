import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from repnet import oracle
from repnet.domain import Action, AgentView, HyperParams
from repnet.dynamics import (
    SingleAgentPOMDP, StepContext, bse, obs_prob, ose, reference_se, reference_v_star, sse, t_du,
)
from repnet.errors import ImpossibleObservation, RangeError
from repnet.generate import random_spec
from repnet.reputation import rep_of

from conftest import with_arrays


# -- kernel -------------------------------------------------------------------

def test_t_du_undirected_ignores_reputation(noisy):
    for rep in (-1, -0.3, 0.0, 0.7, 1):
        assert t_du(noisy, 0, 0, 0, 1, 0, rep) == noisy.T[0, 0, 0, 1]


def test_t_du_single_bin_collapse():
    spec = random_spec(3, 2, 2, 3, 2, n_directed=2, bins=1)
    a = spec.directed[0]
    vals = {t_du(spec, 1, 0, a, 1, 1, r) for r in np.linspace(-1, 1, 9)}
    assert vals == {spec.DT[1, 0, 0, 0, 1]}


def test_t_du_trade_narrative(trade):
    # trade_B for agent A: success 0.1 at reputation -0.6, 0.9 at 0.6
    a = trade.action_index("trade_B")
    gain = trade.state_index("gain")
    assert t_du(trade, 0, 0, a, gain, 0, -0.6) == 0.1
    assert t_du(trade, 0, 0, a, gain, 0, 0.6) == 0.9


def test_t_du_rejects_bad_reputation(noisy):
    with pytest.raises(RangeError):
        t_du(noisy, 0, 0, 1, 0, 0, 1.5)
    with pytest.raises(RangeError):
        StepContext(0, 1, -1.01)


# -- objective estimation -----------------------------------------------------

def test_ose_frozen_values(noisy):
    # sticky wait (0.7), sensor accuracy 0.8, hand-evaluated Bayes rule
    np.testing.assert_allclose(ose(noisy, 0, 0, 1, np.array([0.5, 0.5]), 0.0), [0.2, 0.8], atol=1e-15)
    np.testing.assert_allclose(ose(noisy, 0, 0, 1, np.array([0.9, 0.1]), 0.0),
                               [33 / 101, 68 / 101], atol=1e-15)
    # directed help_y: success 0.8 at high reputation, 0.4 at low
    np.testing.assert_allclose(ose(noisy, 0, 2, 1, np.array([1.0, 0.0]), 0.5), [1 / 17, 16 / 17], atol=1e-15)
    np.testing.assert_allclose(ose(noisy, 0, 2, 1, np.array([1.0, 0.0]), -0.5), [3 / 11, 8 / 11], atol=1e-15)


def test_ose_deterministic_point_mass():
    spec = random_spec(0, 1, 3, 1, 3, n_directed=0)
    T = np.zeros((1, 3, 1, 3))
    T[0, 0, 0, 2] = T[0, 1, 0, 0] = T[0, 2, 0, 1] = 1.0
    O = np.zeros((1, 1, 3, 3))
    for s in range(3):
        O[0, 0, s, s] = 1.0
    spec = with_arrays(spec, T=T, O=O)
    np.testing.assert_array_equal(ose(spec, 0, 0, 2, np.array([1.0, 0, 0]), 0.0), [0, 0, 1])


@pytest.mark.parametrize("seed", range(5))
def test_ose_matches_summation_oracle(seed):
    spec = random_spec(seed, 2, 3, 3, 2, bins=3)
    m = oracle.Model(spec)
    rng = np.random.default_rng(seed)
    for _ in range(10):
        b = rng.dirichlet(np.ones(3))
        a, o = int(rng.integers(3)), int(rng.integers(2))
        rep = float(rng.uniform(-1, 1))
        np.testing.assert_allclose(ose(spec, 1, a, o, b, rep), oracle.ose(m, 1, a, o, list(b), rep), atol=1e-14)


def test_ose_impossible_observation(noisy):
    O = noisy.O.copy()
    O[0, 0, 1, :] = 0.0
    O[0, 0, 0, :] = 1.0
    spec = with_arrays(noisy, O=O)
    with pytest.raises(ImpossibleObservation):
        ose(spec, 0, 0, 1, np.array([0.5, 0.5]), 0.0)


def test_one_bin_invariance():
    spec = random_spec(5, 2, 3, 3, 2, n_directed=3, bins=1)
    b = np.array([0.2, 0.3, 0.5])
    ref = ose(spec, 0, 1, 0, b, -1.0)
    for rep in (-0.5, 0.0, 0.99, 1.0):
        np.testing.assert_array_equal(ose(spec, 0, 1, 0, b, rep), ref)


# -- observation probability ---------------------------------------------------

def test_obs_prob_uniform_sensor(noisy):
    O = np.full_like(noisy.O, 0.5)
    spec = with_arrays(noisy, O=O)
    for b in ([1.0, 0.0], [0.3, 0.7]):
        np.testing.assert_allclose(obs_prob(spec, 1, 1, np.array(b), 0.2), [0.5, 0.5], atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_obs_prob_matches_double_sum(seed):
    spec = random_spec(seed, 2, 3, 2, 3, bins=2)
    m = oracle.Model(spec)
    b = np.random.default_rng(seed).dirichlet(np.ones(3))
    for a, rep in itertools.product(range(2), (-0.5, 0.5)):
        p = obs_prob(spec, 0, a, b, rep)
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(p, [oracle.obs_prob(m, 0, a, o, list(b), rep) for o in range(3)], atol=1e-14)


# -- subjective estimation -----------------------------------------------------

def test_sse_frozen_value(noisy):
    # hand-evaluated triple sum; see comments in the noisy-sensor builder
    got = sse(noisy, 0, 1, 1, np.array([0.5, 0.5]), noisy.AD0[0], 0.12)
    np.testing.assert_allclose(got, [7 / 59, 52 / 59], atol=1e-15)


def test_sse_point_mass_action_equals_ose(noisy):
    ad = np.zeros_like(noisy.AD0[0])
    ad[:, :, 0] = 1.0
    b = np.array([0.35, 0.65])
    np.testing.assert_allclose(sse(noisy, 0, 1, 0, b, ad, 0.3), ose(noisy, 0, 0, 0, b, 0.3), atol=1e-15)


def test_sse_uniform_everything():
    spec = random_spec(1, 2, 3, 2, 2)
    G, S, A, W = 2, 3, 2, 2
    spec = with_arrays(
        spec, T=np.full(spec.T.shape, 1 / S), DT=np.full(spec.DT.shape, 1 / S),
        O=np.full((G, A, W, S), 1 / W))
    out = sse(spec, 0, 1, 1, np.array([0.7, 0.2, 0.1]), np.full((G, S, A), 1 / A), 0.0)
    np.testing.assert_allclose(out, np.full(S, 1 / S), atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_sse_matches_triple_sum(seed):
    spec = random_spec(seed, 2, 3, 3, 2, bins=2)
    m = oracle.Model(spec)
    rng = np.random.default_rng(100 + seed)
    ad = spec.AD0[0]
    for _ in range(10):
        b = rng.dirichlet(np.ones(3))
        o, rep = int(rng.integers(2)), float(rng.uniform(-1, 1))
        np.testing.assert_allclose(sse(spec, 0, 1, o, b, ad, rep),
                                   oracle.sse(m, 0, 1, o, list(b), ad.tolist(), rep), atol=1e-14)


def test_sse_impossible(identifying):
    ad = np.zeros_like(identifying.AD0[0])
    ad[:, :, 0] = 1.0
    with pytest.raises(ImpossibleObservation) as err:
        sse(identifying, 0, 1, 2, np.array([0.5, 0.5]), ad, 0.0)
    assert err.value.agent == 1


# -- full belief map -----------------------------------------------------------

def test_bse_single_agent():
    spec = random_spec(2, 1, 3, 2, 2)
    v = spec.initial_view(0)
    out = bse(spec, 0, 1, 0, v)
    np.testing.assert_array_equal(out[0], ose(spec, 0, 1, 0, v.beliefs[0], rep_of(0, 0, v.img)))


@pytest.mark.parametrize("seed", range(4))
def test_bse_undirected_matches_references(seed):
    spec = random_spec(seed, 2, 3, 3, 2, n_directed=0)
    v = spec.initial_view(0)
    pomdp = SingleAgentPOMDP.from_spec(spec, 0)
    for a, o in itertools.product(range(3), range(2)):
        out = bse(spec, 0, a, o, v)
        np.testing.assert_allclose(out[0], reference_se(pomdp, a, o, v.beliefs[0]), atol=1e-14)
        m = oracle.Model(spec)
        np.testing.assert_allclose(
            out[1], oracle.sse(m, 0, 1, o, v.beliefs[1].tolist(), v.ad.tolist(), 0.0), atol=1e-14)


@pytest.mark.parametrize("seed", range(4))
def test_bse_uses_reputations_from_images(seed):
    spec = random_spec(seed, 3, 2, 3, 2, n_directed=3, bins=4)
    v = spec.initial_view(2)
    m = oracle.Model(spec)
    for a, o in itertools.product(range(3), range(2)):
        ref = oracle.bse(m, 2, a, o, v.ad.tolist(), v.img.tolist(), v.beliefs.tolist())
        np.testing.assert_allclose(bse(spec, 2, a, o, v), ref, atol=1e-14)


def test_bse_deterministic_point_masses():
    spec = random_spec(9, 2, 2, 1, 2, n_directed=0)
    T = np.zeros((2, 2, 1, 2))
    T[:, 0, 0, 1] = T[:, 1, 0, 0] = 1.0
    O = np.zeros((2, 1, 2, 2))
    O[:, 0, 0, 0] = O[:, 0, 1, 1] = 1.0
    spec = with_arrays(spec, T=T, O=O)
    v = AgentView(0, spec.AD0[0], spec.Img0[0], np.array([[1.0, 0.0], [1.0, 0.0]]))
    np.testing.assert_array_equal(bse(spec, 0, 0, 1, v), [[0, 1], [0, 1]])


def test_bse_tags_failing_agent(identifying):
    v = identifying.initial_view(0)
    ad = v.ad.copy()
    ad[1, :, :] = [1.0, 0.0, 0.0]
    v = AgentView(0, ad, v.img, v.beliefs)
    with pytest.raises(ImpossibleObservation) as err:
        bse(identifying, 0, 2, 2, v)
    assert err.value.agent == 1
    seen = []
    out = bse(identifying, 0, 2, 2, v, keep_impossible=True, impossible=seen)
    assert seen == [1]
    np.testing.assert_array_equal(out[1], v.beliefs[1])


# -- single-agent references ---------------------------------------------------

def tiger():
    # states: tiger-left, tiger-right; actions: listen, open-left; obs: hear-left, hear-right
    T = np.zeros((2, 2, 2))
    T[:, 0, :] = np.eye(2)
    T[:, 1, :] = 0.5
    O = np.zeros((2, 2, 2))
    O[0] = [[0.85, 0.15], [0.15, 0.85]]
    O[1] = 0.5
    R = np.array([[-1.0, -1.0], [-100.0, 10.0]])
    return SingleAgentPOMDP(T, O, R, 0.95)


def test_reference_se_tiger():
    p = tiger()
    # one listen from uniform, hear-left: 0.85*0.5 / (0.85*0.5 + 0.15*0.5)
    np.testing.assert_allclose(reference_se(p, 0, 0, [0.5, 0.5]), [0.85, 0.15], atol=1e-15)
    # second hear-left: 0.85*0.85 / (0.85^2 + 0.15^2)
    post = reference_se(p, 0, 0, [0.85, 0.15])
    assert post[0] == pytest.approx(0.7225 / 0.745, abs=1e-15)
    assert sum(post) == pytest.approx(1.0, abs=1e-15)


def test_reference_se_point_mass():
    T = np.zeros((3, 1, 3))
    T[0, 0, 1] = T[1, 0, 2] = T[2, 0, 0] = 1
    O = np.zeros((1, 3, 3))
    O[0] = np.eye(3)
    assert reference_se(SingleAgentPOMDP(T, O), 0, 1, [1, 0, 0]) == [0, 1, 0]


def test_v_star_constant_reward():
    p = tiger()
    p = SingleAgentPOMDP(p.T, p.O, np.full((2, 2), 3.5), 0.9)
    assert reference_v_star(p, [0.4, 0.6], 1) == 3.5


def test_v_star_zero_discount():
    p = tiger()
    p0 = SingleAgentPOMDP(p.T, p.O, p.R, 0.0)
    for k in (1, 2, 4):
        assert reference_v_star(p0, [0.3, 0.7], k) == reference_v_star(p0, [0.3, 0.7], 1)


def policy_trees(n_a, n_o, k):
    if k == 1:
        yield from ((a, None) for a in range(n_a))
        return
    subs = list(policy_trees(n_a, n_o, k - 1))
    for a in range(n_a):
        for choice in itertools.product(subs, repeat=n_o):
            yield (a, choice)


def tree_value(p, tree, b):
    a, subs = tree
    v = sum(p.R[a, s] * b[s] for s in range(len(b)))
    if subs is None:
        return v
    for o, sub in enumerate(subs):
        po = sum(p.O[a, o, t] * sum(p.T[s, a, t] * b[s] for s in range(len(b))) for t in range(len(b)))
        if po > 0:
            v += p.gamma * po * tree_value(p, sub, reference_se(p, a, o, b))
    return v


@pytest.mark.parametrize("b", [[0.5, 0.5], [0.8, 0.2], [0.05, 0.95]])
def test_v_star_matches_policy_tree_enumeration(b):
    p = tiger()
    trees = list(policy_trees(2, 2, 3))
    assert len(trees) == 128
    best = max(tree_value(p, t, b) for t in trees)
    assert reference_v_star(p, b, 3) == pytest.approx(best, abs=1e-9)


def test_reference_se_impossible():
    p = tiger()
    O = p.O.copy()
    O[0, 0, :] = 0.0
    O[0, 1, :] = 1.0
    with pytest.raises(ImpossibleObservation):
        reference_se(SingleAgentPOMDP(p.T, O), 0, 0, [0.5, 0.5])


# -- properties ----------------------------------------------------------------

@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), G=st.integers(1, 3), S=st.integers(1, 4),
       A=st.integers(1, 3), W=st.integers(1, 3))
def test_estimates_are_distributions(seed, G, S, A, W):
    spec = random_spec(seed, G, S, A, W, bins=3)
    rng = np.random.default_rng(seed)
    g = int(rng.integers(G))
    v = spec.initial_view(g)
    a, o = int(rng.integers(A)), int(rng.integers(W))
    out = bse(spec, g, a, o, v)
    assert np.all(out >= 0)
    np.testing.assert_allclose(out.sum(axis=1), 1.0, atol=1e-9)


def test_undirected_reduction_exact():
    spec = random_spec(11, 1, 4, 3, 3, n_directed=0)
    pomdp = SingleAgentPOMDP.from_spec(spec, 0)
    with pytest.raises(ValueError):
        SingleAgentPOMDP.from_spec(random_spec(11, 1, 2, 2, 2, n_directed=1), 0)
    b = np.array([0.1, 0.2, 0.3, 0.4])
    for a, o in itertools.product(range(3), range(3)):
        np.testing.assert_allclose(ose(spec, 0, a, o, b, 0.0), reference_se(pomdp, a, o, b), atol=1e-12)
