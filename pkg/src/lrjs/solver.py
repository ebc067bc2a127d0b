"""SDMM solver for nuclear + l2,1 regularized recovery of spectral coefficients.

Minimizes over the k x N coefficient matrix D::

    nuclear_weight*||D||_* + alpha*||D||_{2,1} + ||B - P_omega(Y D)||_F^2 / (2 mu)

by splitting it into three terms coupled through w1 = w2 = D and w3 = Y D.
Each iteration solves the quadratic D-update in closed form, applies the
three proximal maps, then takes a dual ascent step.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import (
    Measurements,
    RfFrame,
    SolverConfig,
    SolverTrace,
    SpectralCoefficients,
    Termination,
    TraceRecord,
)
from .operators import PartialFourierOp, embed, n_threads, project, synthesize
from .prox import prox_data, prox_l21, prox_nuclear

log = logging.getLogger(__name__)

RANK_RTOL = 1e-6


class SolverDiverged(RuntimeError):
    """A non-finite iterate appeared. ``trace`` holds the records so far."""

    def __init__(self, msg: str, trace: SolverTrace, iteration: int):
        super().__init__(msg)
        self.trace = trace
        self.iteration = iteration


@dataclass
class SdmmState:
    d: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    w3: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    b3: np.ndarray
    s: int = 0

    @classmethod
    def from_d(cls, d: np.ndarray, op: PartialFourierOp) -> "SdmmState":
        d = np.asarray(d, dtype=np.complex128)
        zk = np.zeros_like(d)
        yd = op.synthesize_array(d)
        return cls(d=d.copy(), w1=d.copy(), w2=d.copy(), w3=yd,
                   b1=zk, b2=zk.copy(), b3=np.zeros_like(yd))

    def residuals(self, op: PartialFourierOp) -> tuple[float, float, float]:
        """Feasibility gaps ||D - w1||, ||D - w2||, ||Y D - w3||."""
        yd = op.synthesize_array(self.d)
        return (
            float(np.linalg.norm(self.d - self.w1)),
            float(np.linalg.norm(self.d - self.w2)),
            float(np.linalg.norm(yd - self.w3)),
        )


def nuclear_norm(d: np.ndarray) -> float:
    return float(np.linalg.svd(d, compute_uv=False).sum())


def l21_norm(d: np.ndarray) -> float:
    return float(np.linalg.norm(d, axis=1).sum())


def numerical_rank(d: np.ndarray, rtol: float = RANK_RTOL) -> int:
    s = np.linalg.svd(d, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def objective(d, b: Measurements, cfg: SolverConfig, op: PartialFourierOp) -> float:
    dd = d.data if isinstance(d, SpectralCoefficients) else np.asarray(d)
    if dd.shape[0] != op.k or (op.m, dd.shape[1]) != b.pattern.shape:
        raise ValueError(f"coefficient shape {dd.shape} inconsistent with operator/measurements")
    fit = b.values - project(b.pattern, op.synthesize_array(dd).real)
    val = float(np.dot(fit, fit)) / (2.0 * cfg.mu)
    if cfg.alpha:
        val += cfg.alpha * l21_norm(dd)
    if cfg.nuclear_weight:
        val += cfg.nuclear_weight * nuclear_norm(dd)
    return val


def initial_d(b: Measurements, op: PartialFourierOp) -> np.ndarray:
    """Adjoint back-projection Yt(embed(B))."""
    return op.analyze_array(embed(b.pattern, b.values))


def step1_update_d(state: SdmmState, op: PartialFourierOp) -> np.ndarray:
    # exact minimizer of the stacked least squares since Yt Y = I
    with np.errstate(invalid="ignore", over="ignore"):
        return ((state.w1 - state.b1) + (state.w2 - state.b2)
                + op.analyze_array(state.w3 - state.b3)) / 3.0


def step2_update_w(state: SdmmState, cfg: SolverConfig, b: Measurements,
                   op: PartialFourierOp, pool: ThreadPoolExecutor | None = None):
    d = state.d
    yd = op.synthesize_array(d)
    tasks = (
        lambda: prox_nuclear(state.b1 + d, cfg.gamma * cfg.nuclear_weight)[0],
        lambda: prox_l21(state.b2 + d, cfg.gamma * cfg.alpha),
        lambda: prox_data(state.b3 + yd, b, cfg.gamma, cfg.mu),
    )
    if pool is None:
        return tuple(t() for t in tasks)
    futures = [pool.submit(t) for t in tasks]
    return tuple(f.result() for f in futures)


def step3_update_b(state: SdmmState, op: PartialFourierOp):
    yd = op.synthesize_array(state.d)
    return (
        state.b1 + (state.d - state.w1),
        state.b2 + (state.d - state.w2),
        state.b3 + (yd - state.w3),
    )


def converged(state: SdmmState, op: PartialFourierOp, rel_change: float, tol: float) -> bool:
    """Relative change of D and all three feasibility gaps below tolerance."""
    if rel_change > tol:
        return False
    bound = tol * (1.0 + float(np.linalg.norm(state.d)))
    return all(r <= bound for r in state.residuals(op))


def solve(b: Measurements, op: PartialFourierOp, cfg: SolverConfig = SolverConfig(),
          init: SpectralCoefficients | None = None, callback=None):
    """Run SDMM until convergence or ``cfg.max_iters``.

    Returns the final coefficients and the iteration trace. Raises
    ``SolverDiverged`` (carrying the partial trace) on a non-finite iterate.
    """
    if b.pattern.shape[0] != op.m:
        raise ValueError(f"measurements are on {b.pattern.shape}, operator has M={op.m}")
    op.check_orthonormal()
    if init is None:
        d0 = initial_d(b, op)
    else:
        if init.support != op.support or init.n != b.pattern.n:
            raise ValueError("initial coefficients do not match operator/measurements")
        d0 = np.array(init.data)
    state = SdmmState.from_d(d0, op)
    trace = SolverTrace()
    threads = n_threads()
    pool = ThreadPoolExecutor(max_workers=3) if threads > 1 else None
    try:
        for s in range(1, cfg.max_iters + 1):
            d_prev = state.d
            state.d = step1_update_d(state, op)
            if not np.all(np.isfinite(state.d)):
                raise SolverDiverged(f"non-finite iterate at s={s}", trace, s)
            state.w1, state.w2, state.w3 = step2_update_w(state, cfg, b, op, pool)
            state.b1, state.b2, state.b3 = step3_update_b(state, op)
            state.s = s

            if not all(np.all(np.isfinite(a)) for a in (state.d, state.w1, state.w2, state.w3)):
                raise SolverDiverged(f"non-finite iterate at s={s}", trace, s)
            r1, r2, r3 = state.residuals(op)
            prev_norm = float(np.linalg.norm(d_prev))
            rel = float(np.linalg.norm(state.d - d_prev)) / (prev_norm if prev_norm > 0 else 1.0)
            rec = TraceRecord(
                iteration=s,
                objective=objective(state.d, b, cfg, op),
                residual=float(np.sqrt(r1 * r1 + r2 * r2 + r3 * r3)),
                rel_change=rel,
                rank_estimate=numerical_rank(state.d),
            )
            if not (np.isfinite(rec.objective) and np.isfinite(rec.residual) and np.isfinite(rel)):
                raise SolverDiverged(f"non-finite diagnostics at s={s}", trace, s)
            trace.append(rec)
            trace.final_residuals = (r1, r2, r3)
            if callback is not None:
                callback(state, rec)
            if converged(state, op, rel, cfg.tol):
                trace.terminated_by = Termination.TOL
                break
        else:
            trace.terminated_by = Termination.MAX_ITERS
    finally:
        if pool is not None:
            pool.shutdown()
    log.debug("sdmm stopped after %d iterations (%s)", len(trace), trace.terminated_by)
    return SpectralCoefficients(state.d, op.support), trace


def reconstruct(d: SpectralCoefficients, op: PartialFourierOp) -> tuple[RfFrame, float]:
    """Real part of Y D as an RF frame, plus the Frobenius norm of the discarded imaginary part."""
    x = synthesize(op, d)
    frame = RfFrame(x.real.copy(), fs=op.support.fs, fc=op.support.fc)
    return frame, float(np.linalg.norm(x.imag))
