"""Proximal operators for the three convex terms of the objective."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Measurements


@dataclass(frozen=True, eq=False)
class SvtReport:
    singular_values: np.ndarray
    threshold: float
    rank: int


def prox_nuclear(v: np.ndarray, tau: float) -> tuple[np.ndarray, SvtReport]:
    """Singular value thresholding: argmin_w tau*||w||_* + 0.5*||w - v||_F^2."""
    v = np.asarray(v)
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if not np.all(np.isfinite(v)):
        raise np.linalg.LinAlgError("SVD of non-finite matrix")
    if min(v.shape) == 1:
        # a vector has the single singular value ||v||; shrink it directly
        s = np.array([np.linalg.norm(v)])
        w = _shrink(v, s[0], tau)
        return w, SvtReport(s, float(tau), int(s[0] > tau))
    u, s, vh = np.linalg.svd(v, full_matrices=False)
    shrunk = np.maximum(s - tau, 0.0)
    rank = int(np.count_nonzero(shrunk))
    w = (u[:, :rank] * shrunk[:rank]) @ vh[:rank]
    return w.astype(v.dtype if np.iscomplexobj(v) else np.float64), SvtReport(s, float(tau), rank)


def prox_l21(v: np.ndarray, tau: float) -> np.ndarray:
    """Row-wise group soft-thresholding, the prox of tau*||.||_{2,1}."""
    v = np.asarray(v)
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if tau == 0:
        return v.copy()
    return _shrink(v, np.linalg.norm(v, axis=1, keepdims=True), tau)


def _shrink(v, norms, tau):
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(norms > 0, np.maximum(1.0 - tau / norms, 0.0), 0.0)
    return v * scale


def prox_data(v: np.ndarray, b: Measurements, gamma: float, mu: float) -> np.ndarray:
    """argmin_w ||v - w||^2/(2 gamma) + ||B - P_omega(w)||^2/(2 mu).

    Unobserved entries pass through; observed ones become the weighted mean
    (mu*v + gamma*B)/(mu + gamma), with the real-valued B as the target for
    the complex entry.
    """
    v = np.asarray(v)
    if v.shape != b.pattern.shape:
        raise ValueError(f"shape {v.shape} does not match pattern {b.pattern.shape}")
    if gamma <= 0 or mu <= 0:
        raise ValueError("gamma and mu must be > 0")
    w = np.array(v, dtype=np.result_type(v, np.float64), copy=True)
    flat = w.reshape(-1)
    idx = b.pattern.flat
    flat[idx] = (mu * flat[idx] + gamma * b.values) / (mu + gamma)
    return w
