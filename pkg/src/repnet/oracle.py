"""Brute-force reference implementations.

Every quantity here is computed by literal nested summation over plain
Python floats, straight from the defining formulas, without touching the
vectorised code paths. They are slow and only meant for cross-checking on
small domains (tests, ``repnet plan --oracle``).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from repnet.domain import DIFFERENCE, DomainSpec


class ZeroNormalizer(ArithmeticError):
    pass


class Model:
    """Plain nested-list copy of a domain."""

    def __init__(self, spec: DomainSpec):
        self.G, self.S = spec.n_agents, spec.n_states
        self.A, self.W = spec.n_actions, spec.n_obs
        self.bins = spec.hyper.reputation_bins
        self.delta, self.gamma = spec.hyper.delta, spec.hyper.gamma
        self.alpha, self.variant = spec.update_rule.alpha, spec.update_rule.variant
        self.directed = [a.directed for a in spec.actions]
        # position of each action inside its own kind's tensor
        self.slot = []
        nu = nd = 0
        for a in spec.actions:
            if a.directed:
                self.slot.append(nd)
                nd += 1
            else:
                self.slot.append(nu)
                nu += 1
        self.I = spec.impact.tolist()
        self.T = spec.T.tolist()
        self.DT = spec.DT.tolist()
        self.O = spec.O.tolist()

    def bin(self, r):
        b = int(math.floor((r + 1.0) / 2.0 * self.bins))
        return min(max(b, 0), self.bins - 1)

    def tdu(self, g, s, a, s2, rep):
        if self.directed[a]:
            return self.DT[g][s][self.slot[a]][self.bin(rep)][s2]
        return self.T[g][s][self.slot[a]][s2]


def rep_of(g, h, img):
    n = len(img)
    total = img[h][g]
    for i in range(n):
        if i != g:
            total += img[h][i] * img[i][g]
    return total / n


def obs_prob(m: Model, g, a, o, b, rep):
    total = 0.0
    for s2 in range(m.S):
        inner = 0.0
        for s in range(m.S):
            inner += m.tdu(g, s, a, s2, rep) * b[s]
        total += m.O[g][a][o][s2] * inner
    return total


def ose(m: Model, g, a, o, b, rep):
    p = []
    for s2 in range(m.S):
        inner = 0.0
        for s in range(m.S):
            inner += m.tdu(g, s, a, s2, rep) * b[s]
        p.append(m.O[g][a][o][s2] * inner)
    z = sum(p)
    if z <= 0.0:
        raise ZeroNormalizer
    return [x / z for x in p]


def sse(m: Model, g, h, o, b, ad, rep):
    p = []
    for s2 in range(m.S):
        total = 0.0
        for a in range(m.A):
            for s in range(m.S):
                total += m.O[g][a][o][s2] * m.tdu(g, s, a, s2, rep) * b[s] * ad[h][s][a]
        p.append(total)
    z = sum(p)
    if z <= 0.0:
        raise ZeroNormalizer
    return [x / z for x in p]


def bse(m: Model, g, a, o, ad, img, B):
    out = []
    for h in range(m.G):
        if h == g:
            out.append(ose(m, g, a, o, B[g], rep_of(g, g, img)))
        else:
            try:
                out.append(sse(m, g, h, o, B[h], ad, rep_of(g, h, img)))
            except ZeroNormalizer:
                out.append(list(B[h]))
    return out


def ade(m: Model, g, o, ad, img):
    out = []
    for h in range(m.G):
        rep = rep_of(g, h, img)
        rows = []
        for s in range(m.S):
            like = []
            for a in range(m.A):
                acc = 0.0
                for s2 in range(m.S):
                    acc += m.tdu(g, s, a, s2, rep) * m.O[g][a][o][s2]
                like.append(acc * ad[h][s][a])
            z = sum(like)
            rows.append([x / z for x in like] if z > 0.0 else list(ad[h][s]))
        out.append(rows)
    return out


def perceived_image(m: Model, h, i, B, ad):
    total = 0.0
    for sh in range(m.S):
        for si in range(m.S):
            for a in range(m.A):
                total += B[h][sh] * B[i][si] * (
                    m.delta * ad[i][si][a] * m.I[h][sh][i][si][a]
                    + (1.0 - m.delta) * ad[h][sh][a] * m.I[i][si][h][sh][a])
    return total


def update_u(variant, alpha, r, i):
    if variant == DIFFERENCE:
        if i >= 0:
            return r + alpha * (1.0 - r) * i
        return r + alpha * (r + 1.0) * i
    x = r + alpha * i
    if x > 1.0:
        return 1.0
    if x < -1.0:
        return -1.0
    return x


def ie(m: Model, img, B, ad):
    return [[update_u(m.variant, m.alpha, img[h][i],
                      max(-1.0, min(1.0, perceived_image(m, h, i, B, ad))))
             for i in range(m.G)] for h in range(m.G)]


def pin(m: Model, g, sg, ad, B):
    total = 0.0
    for h in range(m.G):
        if h == g:
            continue
        for sh in range(m.S):
            for a in range(m.A):
                total += B[h][sh] * m.I[g][sg][h][sh][a] * ad[h][sh][a]
    return total


def pi_tot(m: Model, g, a, ad, B):
    total = 0.0
    for sg in range(m.S):
        total += B[g][sg] * (pin(m, g, sg, ad, B) + m.I[g][sg][g][sg][a])
    return total / m.G


@dataclass
class OracleResult:
    best_action: int
    value: float
    q_values: list[float]
    histories: int


def enumerate_plan(spec: DomainSpec, view, horizon: int, gamma: float | None = None) -> OracleResult:
    """Optimal impact by materialising every (action, observation) history.

    Each history's models are replayed from the root, then values are
    backed up from the deepest histories to the root.
    """
    m = Model(spec)
    g = view.owner
    if gamma is None:
        gamma = m.gamma
    root = (view.ad.tolist(), view.img.tolist(), view.beliefs.tolist())

    def replay(history):
        ad, img, B = root
        for a, o in zip(history[::2], history[1::2]):
            ad, img, B = ade(m, g, o, ad, img), ie(m, img, B, ad), bse(m, g, a, o, ad, img, B)
        return ad, img, B

    # all histories of length < horizon reachable with nonzero probability
    levels = [[()]]
    for _ in range(horizon - 1):
        nxt = []
        for hist in levels[-1]:
            ad, img, B = replay(hist)
            for a, o in itertools.product(range(m.A), range(m.W)):
                if obs_prob(m, g, a, o, B[g], rep_of(g, g, img)) > 0.0:
                    nxt.append(hist + (a, o))
        levels.append(nxt)

    value = {}
    root_q = None
    for depth in range(horizon - 1, -1, -1):
        for hist in levels[depth]:
            ad, img, B = replay(hist)
            q = []
            for a in range(m.A):
                v = pi_tot(m, g, a, ad, B)
                if depth < horizon - 1:
                    future = 0.0
                    for o in range(m.W):
                        p = obs_prob(m, g, a, o, B[g], rep_of(g, g, img))
                        if p > 0.0:
                            future += p * value[hist + (a, o)]
                    v += gamma * future
                q.append(v)
            value[hist] = max(q)
            if depth == 0:
                root_q = q
    best = max(range(m.A), key=lambda a: (root_q[a], -a))
    return OracleResult(best, value[()], root_q, sum(len(lv) for lv in levels))
