"""Linear operators of the measurement model.

``PartialFourierOp`` maps k x N in-band coefficients to an M x N signal
(``synthesize``) and back (``analyze``). Both use the orthonormal DFT, so the
analysis operator is at once the adjoint and a left inverse of synthesis.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.fft

from .model import Measurements, RfFrame, SamplingPattern, SpectralCoefficients, FourierSupport


def n_threads() -> int:
    """Intra-solve thread cap from ``LRJS_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("LRJS_THREADS", "1")))
    except ValueError:
        return 1


class PartialFourierOp:
    def __init__(self, support: FourierSupport):
        self.support = support

    @property
    def m(self) -> int:
        return self.support.m

    @property
    def k(self) -> int:
        return self.support.k

    def synthesize_array(self, d: np.ndarray) -> np.ndarray:
        d = np.asarray(d)
        if d.ndim != 2 or d.shape[0] != self.k:
            raise ValueError(f"expected {self.k} coefficient rows, got shape {d.shape}")
        full = np.zeros((self.m, d.shape[1]), dtype=np.complex128)
        full[self.support.bins] = d
        return scipy.fft.ifft(full, axis=0, norm="ortho", workers=n_threads())

    def analyze_array(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        if x.ndim != 2 or x.shape[0] != self.m:
            raise ValueError(f"expected {self.m} rows, got shape {x.shape}")
        spec = scipy.fft.fft(x, axis=0, norm="ortho", workers=n_threads())
        return spec[self.support.bins]

    def dense(self) -> np.ndarray:
        """Explicit M x k synthesis matrix. Only meant for small test problems."""
        t = np.arange(self.m)[:, None]
        return np.exp(2j * np.pi * t * self.support.bins[None, :] / self.m) / np.sqrt(self.m)

    def check_orthonormal(self, n_probe: int = 2, seed: int = 0, rtol: float = 1e-10) -> None:
        """Raise if ``analyze(synthesize(D)) != D`` on random probes."""
        rng = np.random.default_rng(seed)
        d = rng.standard_normal((self.k, n_probe)) + 1j * rng.standard_normal((self.k, n_probe))
        back = self.analyze_array(self.synthesize_array(d))
        err = np.linalg.norm(back - d) / np.linalg.norm(d)
        if not err <= rtol:
            raise AssertionError(f"partial Fourier operator is not orthonormal (err={err:.3e})")


def synthesize(op: PartialFourierOp, d: SpectralCoefficients) -> np.ndarray:
    """Complex M x N signal whose in-band spectrum is ``d``."""
    if d.support != op.support:
        raise ValueError("coefficient support does not match operator support")
    return op.synthesize_array(d.data)


def analyze(op: PartialFourierOp, x) -> SpectralCoefficients:
    if isinstance(x, RfFrame):
        x = x.data
    return SpectralCoefficients(op.analyze_array(x), op.support)


def _check_shape(pattern: SamplingPattern, shape) -> None:
    if tuple(shape) != pattern.shape:
        raise ValueError(f"matrix shape {tuple(shape)} does not match pattern {pattern.shape}")


def project(pattern: SamplingPattern, x: np.ndarray) -> np.ndarray:
    """Entries of ``x`` at the observed locations, in row-major order."""
    x = np.asarray(x)
    _check_shape(pattern, x.shape)
    return x.reshape(-1)[pattern.flat]


def embed(pattern: SamplingPattern, v: np.ndarray) -> np.ndarray:
    """Zero-filled M x N matrix carrying ``v`` at the observed locations."""
    v = np.asarray(v).ravel()
    if v.size != pattern.size:
        raise ValueError(f"got {v.size} values for {pattern.size} locations")
    out = np.zeros(pattern.m * pattern.n, dtype=v.dtype if np.iscomplexobj(v) else np.float64)
    out[pattern.flat] = v
    return out.reshape(pattern.shape)


def measure(x: RfFrame, pattern: SamplingPattern, sigma: float = 0.0, seed: int = 0) -> Measurements:
    """Sample ``x`` on ``pattern`` and add white Gaussian noise of std ``sigma``."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    values = project(pattern, x.data).astype(np.float64)
    if sigma > 0:
        rng = np.random.default_rng(seed)
        values = values + rng.normal(0.0, sigma, size=values.shape)
    return Measurements(values=values, pattern=pattern, noise_sigma=float(sigma))
