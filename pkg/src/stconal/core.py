"""Dense numerical primitives on probability and weight vectors.

Every function accepts a single vector or a 2-D array of row vectors and
operates along the last axis. Logarithms are natural throughout.
"""

import numpy as np

from .exceptions import InvalidInputError

KL_EPS = 1e-12
_SUM_TOL = 1e-9


def _as_float_array(a, name):
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim not in (1, 2) or arr.shape[-1] == 0:
        raise InvalidInputError(f"{name} must be a non-empty 1-D or 2-D array")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return arr


def check_proba(p, name="p"):
    """Validate ``p`` as probability vector(s) and return it as float64."""
    arr = _as_float_array(p, name)
    if np.any(arr < 0):
        raise InvalidInputError(f"{name} has negative entries")
    if np.any(np.abs(arr.sum(axis=-1) - 1.0) > _SUM_TOL):
        raise InvalidInputError(f"{name} does not sum to 1")
    return arr


def softmax(z):
    """Numerically stable softmax of logits ``z``."""
    z = _as_float_array(z, "z")
    if z.shape[-1] < 2:
        raise InvalidInputError("softmax needs at least two classes")
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def entropy(p):
    """Shannon entropy in nats, with 0 log 0 = 0."""
    p = check_proba(p)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log(np.where(p > 0, p, 1.0)), 0.0)
    return -terms.sum(axis=-1)


def kl_divergence(p, q, eps=KL_EPS):
    """KL(p || q) in nats.

    Entries of ``q`` are floored at ``eps`` before the log; entries of ``p``
    equal to zero contribute nothing.
    """
    p = check_proba(p, "p")
    q = check_proba(q, "q")
    if p.shape[-1] != q.shape[-1]:
        raise InvalidInputError(
            f"dimension mismatch: {p.shape[-1]} vs {q.shape[-1]} classes")
    q = np.maximum(q, eps)
    safe_p = np.where(p > 0, p, 1.0)
    terms = np.where(p > 0, p * (np.log(safe_p) - np.log(q)), 0.0)
    return terms.sum(axis=-1)


def sharpen(p, temperature):
    """Raise probabilities to ``1 / temperature`` and renormalize.

    Computed in log space so small temperatures do not underflow the
    dominant class.
    """
    if not temperature > 0:
        raise InvalidInputError(f"temperature must be > 0, got {temperature}")
    p = check_proba(p)
    if temperature == 1.0:
        return p.copy()
    with np.errstate(divide="ignore"):
        logp = np.log(p) / temperature
    logp = logp - logp.max(axis=-1, keepdims=True)
    e = np.exp(logp)
    return e / e.sum(axis=-1, keepdims=True)


def weight_average(weights):
    """Elementwise arithmetic mean of equal-length weight vectors."""
    ws = [np.asarray(w, dtype=np.float64) for w in weights]
    if not ws:
        raise InvalidInputError("cannot average an empty list of weights")
    n = ws[0].shape
    if any(w.ndim != 1 or w.shape != n for w in ws):
        raise InvalidInputError("weight vectors must be 1-D with equal length")
    if len(ws) == 1:
        return ws[0].copy()
    # sorting each coordinate first makes the sum independent of input order
    return np.sort(np.stack(ws), axis=0).sum(axis=0) / len(ws)


def ema_update(prev, new, alpha):
    """Return ``alpha * prev + (1 - alpha) * new``."""
    if not 0.0 <= alpha <= 1.0:
        raise InvalidInputError(f"alpha must lie in [0, 1], got {alpha}")
    prev = np.asarray(prev, dtype=np.float64)
    new = np.asarray(new, dtype=np.float64)
    if prev.shape != new.shape:
        raise InvalidInputError("weight vectors must have equal length")
    if alpha == 0.0:
        return new.copy()
    if alpha == 1.0:
        return prev.copy()
    return alpha * prev + (1.0 - alpha) * new
