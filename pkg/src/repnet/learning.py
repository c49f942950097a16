"""Bayesian learning of other agents' action distributions."""
from __future__ import annotations

import numpy as np

from repnet.domain import DomainSpec
from repnet.dynamics import kernel_at
from repnet.errors import ZeroLikelihood
from repnet.reputation import rep_of


def action_likelihood(spec: DomainSpec, g: int, h: int, o: int, img: np.ndarray) -> np.ndarray:
    """``L[s, a]`` approximating P(o | h did a in s) as sum_s2 T(s,a,s2) O(a,o,s2)."""
    K = kernel_at(spec, g, rep_of(g, h, img))
    return np.einsum("sat,at->sa", K, spec.O[g, :, o, :])


def ade(spec: DomainSpec, g: int, o: int, ad: np.ndarray, img: np.ndarray,
        zero_rows: list | None = None, strict: bool = False) -> np.ndarray:
    """Condition every row ``ad[h, s]`` on g's observation ``o``.

    A row whose total posterior mass is zero keeps its prior; its ``(h, s)``
    pair is appended to ``zero_rows`` when a list is supplied. With
    ``strict`` such rows raise ZeroLikelihood instead.
    """
    missed = []
    out = np.empty_like(ad, dtype=float)
    for h in range(spec.n_agents):
        post = action_likelihood(spec, g, h, o, img) * ad[h]
        z = post.sum(axis=1)
        ok = z > 0.0
        out[h] = ad[h]
        out[h, ok] = post[ok] / z[ok, None]
        missed.extend((h, int(s)) for s in np.nonzero(~ok)[0])
    if missed and strict:
        raise ZeroLikelihood(missed)
    if zero_rows is not None:
        zero_rows.extend(missed)
    return out
