"""Perceived images, the image update rule, image expectation and reputation."""
from __future__ import annotations

import numpy as np

from repnet.domain import DIFFERENCE, REP_SLACK, SATURATION, DomainSpec, UpdateRule
from repnet.errors import RangeError


def _image_terms(spec: DomainSpec, beliefs: np.ndarray, ad: np.ndarray) -> np.ndarray:
    """``M[h, i]``: belief-weighted expected impact on h caused by i's actions."""
    # M[h,i] = sum_{x,y,a} b[h,x] b[i,y] ad[i,y,a] I[h,x,i,y,a]
    return np.einsum("hx,iy,iya,hxiya->hi", beliefs, beliefs, ad, spec.impact, optimize=True)


def perceived_image(spec: DomainSpec, g: int, h: int, i: int, beliefs: np.ndarray,
                    ad_g: np.ndarray, delta: float | None = None) -> float:
    """Image of ``h`` held by ``i`` as perceived by ``g`` under g's beliefs.

    ``delta`` weighs impacts received by h (delta -> 1) against impacts h
    causes on i. The result does not depend on g's own state; ``g`` only
    identifies whose beliefs and action model are passed in.
    """
    if delta is None:
        delta = spec.hyper.delta
    I = spec.impact
    bh, bi = beliefs[h], beliefs[i]
    on_h = np.einsum("x,y,ya,xya->", bh, bi, ad_g[i], I[h, :, i, :, :])
    by_h = np.einsum("x,y,xa,yxa->", bh, bi, ad_g[h], I[i, :, h, :, :])
    return float(delta * on_h + (1.0 - delta) * by_h)


def _check_unit(x, what):
    x = np.asarray(x, dtype=float)
    if np.any(~((x >= -1.0 - REP_SLACK) & (x <= 1.0 + REP_SLACK))):
        raise RangeError(f"{what} outside [-1, 1]")


def update_u(rule: UpdateRule, r, i):
    """New image level from current level ``r`` and impact ``i``.

    Works elementwise on arrays. The difference variant moves r a fraction
    ``alpha * |i|`` of the way to +1 (i >= 0) or -1 (i < 0); the saturation
    variant adds ``alpha * i`` and clamps to [-1, 1].
    """
    _check_unit(r, "image level")
    _check_unit(i, "impact")
    r = np.clip(r, -1.0, 1.0)
    i = np.clip(i, -1.0, 1.0)
    alpha = rule.alpha
    if rule.variant == DIFFERENCE:
        out = np.where(i >= 0, r + alpha * (1.0 - r) * i, r + alpha * (r + 1.0) * i)
    elif rule.variant == SATURATION:
        out = np.clip(r + alpha * i, -1.0, 1.0)
    else:
        raise ValueError(f"unknown update variant {rule.variant!r}")
    out = np.clip(out, -1.0, 1.0)
    return float(out) if out.ndim == 0 else out


def perceived_images(spec: DomainSpec, beliefs: np.ndarray, ad: np.ndarray,
                     delta: float | None = None) -> np.ndarray:
    """All pairwise perceived images at once; entry ``[h, i]``."""
    if delta is None:
        delta = spec.hyper.delta
    M = _image_terms(spec, beliefs, ad)
    return delta * M + (1.0 - delta) * M.T


def image_expectation(spec: DomainSpec, g: int, img: np.ndarray, alpha: float | None,
                      beliefs: np.ndarray, ad_g: np.ndarray) -> np.ndarray:
    """Apply the update rule to every image pair; returns a new profile."""
    rule = spec.update_rule
    if alpha is not None and alpha != rule.alpha:
        rule = UpdateRule(rule.variant, alpha)
    target = np.clip(perceived_images(spec, beliefs, ad_g), -1.0, 1.0)
    return np.asarray(update_u(rule, img, target), dtype=float)


def rep_of(g: int, h: int, img: np.ndarray, n_agents: int | None = None) -> float:
    """Reputation of ``h`` according to ``g``.

    Average over the network of each rater's image, where every rater other
    than g is weighted by g's image of that rater (a negative weight flips
    the rater's opinion). g's own term carries weight 1.
    """
    img = np.asarray(img)
    if n_agents is None:
        n_agents = img.shape[0]
    weighted = img[h, :] * img[:, g]
    total = img[h, g] + weighted.sum() - weighted[g]
    return float(total / n_agents)


def rep_vector(g: int, img: np.ndarray) -> np.ndarray:
    """``rep_of(g, h, img)`` for every h."""
    img = np.asarray(img)
    n = img.shape[0]
    w = img[:, g].copy()
    w[g] = 0.0
    return (img[:, g] + img @ w) / n
