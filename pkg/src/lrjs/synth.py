"""Synthetic data: low-rank joint-sparse spectra, scatterer phantoms, sampling masks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import FourierSupport, RfFrame, SamplingPattern, Scheme, SpectralCoefficients
from .operators import PartialFourierOp

# the solver's penalty gamma=1 is in absolute units, so frames are generated at
# a fixed RMS amplitude; 0.1 keeps the standard instance well inside 1000 iterations
DEFAULT_RMS = 0.1

# M=128 with fc/fs = 3.5/37.5 puts exactly 24 bins inside [fc/2, 3fc/2]
STANDARD_SYNTH = dict(m=128, n=64, fc=3.5e6, fs=37.5e6, rank=3, row_sparsity=8)


def gen_lowrank_jointsparse(m: int, n: int, support: FourierSupport, rank: int,
                            row_sparsity: int, seed: int = 0, rms: float = DEFAULT_RMS):
    """Random rank-``rank`` coefficients on ``row_sparsity`` rows of ``support``.

    The active rows come in conjugate pairs and the right factor is real, so
    the synthesized signal is exactly real and band-limited. The frame is
    scaled to RMS amplitude ``rms``. Returns ``(RfFrame, SpectralCoefficients)``.
    """
    if support.m != m:
        raise ValueError(f"support is for length {support.m}, not {m}")
    k = support.k
    if row_sparsity > k:
        raise ValueError(f"row sparsity {row_sparsity} exceeds support size {k}")
    if rank > row_sparsity or rank > n:
        raise ValueError(f"infeasible: rank {rank} > min(row sparsity {row_sparsity}, n {n})")
    if rank < 0 or row_sparsity < 0:
        raise ValueError("rank and row sparsity must be >= 0")
    op = PartialFourierOp(support)
    d0 = np.zeros((k, n), dtype=np.complex128)
    if rank == 0:
        return RfFrame(np.zeros((m, n)), fs=support.fs, fc=support.fc), SpectralCoefficients(d0, support)

    rng = np.random.default_rng(seed)
    mirror = support.mirror_index()
    idx = np.arange(k)
    self_paired = idx[mirror == idx]
    lower = idx[mirror > idx]
    # fill with conjugate pairs first, a self-paired bin only for odd counts
    n_pairs = min(row_sparsity // 2, lower.size)
    n_single = row_sparsity - 2 * n_pairs
    if n_single > self_paired.size:
        raise ValueError(f"cannot place {row_sparsity} conjugate-symmetric rows on this support")
    pairs = np.sort(rng.choice(lower, size=n_pairs, replace=False))
    singles = np.sort(rng.choice(self_paired, size=n_single, replace=False)) if n_single else []

    left = np.zeros((k, rank), dtype=np.complex128)
    g = rng.standard_normal((n_pairs, rank)) + 1j * rng.standard_normal((n_pairs, rank))
    left[pairs] = g
    left[mirror[pairs]] = g.conj()
    for j in singles:
        left[j] = rng.standard_normal(rank)
    right = rng.standard_normal((rank, n))
    d0 = left @ right

    x = op.synthesize_array(d0).real
    g = rms / np.sqrt(np.mean(x * x))
    x, d0 = x * g, d0 * g
    return RfFrame(x, fs=support.fs, fc=support.fc), SpectralCoefficients(d0, support)


def standard_instance(seed: int = 1, **overrides):
    """The M=128, N=64, k=24, rank 3, 8-row benchmark instance."""
    p = {**STANDARD_SYNTH, **overrides}
    support = FourierSupport.from_band(p["m"], p["fc"], p["fs"])
    return gen_lowrank_jointsparse(p["m"], p["n"], support, p["rank"], p["row_sparsity"], seed)


def gen_pattern(m: int, n: int, sr: float, scheme=Scheme.UNIFORM_PER_CHANNEL, seed: int = 0) -> SamplingPattern:
    """Uniform random sampling mask at rate ``sr``.

    ``uniform-global`` draws round(sr*m*n) entries over the whole grid;
    ``uniform-per-channel`` draws round(sr*m) entries in every column.
    """
    scheme = Scheme(scheme)
    if not 0 < sr <= 1:
        raise ValueError(f"sampling rate must be in (0, 1], got {sr}")
    rng = np.random.default_rng(seed)
    if scheme is Scheme.UNIFORM_GLOBAL:
        count = int(round(sr * m * n))
        if count < 1:
            raise ValueError("sampling rate too low for a single sample")
        flat = rng.choice(m * n, size=count, replace=False)
    else:
        per_col = int(round(sr * m))
        if per_col < 1:
            raise ValueError("sampling rate too low for a single sample per channel")
        rows = np.concatenate([rng.choice(m, size=per_col, replace=False) for _ in range(n)])
        cols = np.repeat(np.arange(n), per_col)
        flat = rows * n + cols
    return SamplingPattern(flat=flat, m=m, n=n, seed=seed, scheme=scheme)


@dataclass(frozen=True)
class Cyst:
    x: float  # mm, lateral
    z: float  # mm, depth
    radius: float  # mm
    multiplier: float = 0.0


@dataclass(frozen=True)
class PhantomSpec:
    """Point-scatterer phantom seen by a linear array under plane-wave transmit.

    Lengths are in mm, the scatterer field spans ``x_extent`` laterally
    (centered on the array) and ``z_extent`` in depth. Background scatterers
    are drawn at ``background_density`` per mm^2 with N(0, 1) reflectivity;
    explicit ``scatterers`` are added on top.
    """

    x_extent: tuple[float, float] = (-6.0, 6.0)
    z_extent: tuple[float, float] = (5.0, 25.0)
    scatterers: tuple[tuple[float, float, float], ...] = ()
    background_density: float = 10.0
    cysts: tuple[Cyst, ...] = ()
    speed_of_sound: float = 1540.0
    n_elements: int = 64
    element_pitch: float = 0.3
    fc: float = 3.5e6
    bandwidth: float = 0.6
    cycles: float = 3.0
    seed: int = 0

    def __post_init__(self):
        (x0, x1), (z0, z1) = self.x_extent, self.z_extent
        if not (x1 > x0 and z1 > z0 and z0 >= 0):
            raise ValueError("scatterer field extents must be positive intervals (z >= 0)")
        for name in ("speed_of_sound", "element_pitch", "fc", "bandwidth", "cycles"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.background_density < 0 or self.n_elements < 1:
            raise ValueError("background_density must be >= 0 and n_elements >= 1")
        for c in self.cysts:
            if c.radius <= 0 or c.multiplier < 0:
                raise ValueError("cyst radius must be > 0 and multiplier >= 0")

    def element_positions(self) -> np.ndarray:
        return (np.arange(self.n_elements) - (self.n_elements - 1) / 2.0) * self.element_pitch

    def draw_scatterers(self) -> np.ndarray:
        """All scatterers as rows (x, z, reflectivity) with cyst multipliers applied."""
        rng = np.random.default_rng(self.seed)
        (x0, x1), (z0, z1) = self.x_extent, self.z_extent
        count = rng.poisson(self.background_density * (x1 - x0) * (z1 - z0))
        pts = np.column_stack([
            rng.uniform(x0, x1, count),
            rng.uniform(z0, z1, count),
            rng.standard_normal(count),
        ])
        if self.scatterers:
            pts = np.vstack([pts, np.asarray(self.scatterers, dtype=float).reshape(-1, 3)])
        for c in self.cysts:
            inside = (pts[:, 0] - c.x) ** 2 + (pts[:, 1] - c.z) ** 2 <= c.radius ** 2
            pts[inside, 2] *= c.multiplier
        return pts[pts[:, 2] != 0]


def gaussian_pulse(t: np.ndarray, fc: float, bandwidth: float, cycles: float) -> np.ndarray:
    """Gaussian-modulated cosine with -6 dB fractional ``bandwidth``, cut at +-cycles/(2 fc)."""
    sigma_f = bandwidth * fc / (2.0 * np.sqrt(2.0 * np.log(2.0)))
    sigma_t = 1.0 / (2.0 * np.pi * sigma_f)
    p = np.exp(-0.5 * (t / sigma_t) ** 2) * np.cos(2 * np.pi * fc * t)
    return np.where(np.abs(t) <= cycles / (2.0 * fc), p, 0.0)


def round_trip_delay(spec: PhantomSpec, x: float, z: float) -> np.ndarray:
    """Per-element arrival time (s) of an echo from (x, z) mm."""
    xe = spec.element_positions()
    path = z + np.sqrt((x - xe) ** 2 + z ** 2)
    return path * 1e-3 / spec.speed_of_sound


def gen_phantom_rf(spec: PhantomSpec, fs: float, m: int, rms: float | None = None) -> RfFrame:
    """Pre-beamformed channel data of ``spec`` sampled at ``fs`` for ``m`` samples.

    Each channel is the sum over scatterers of reflectivity * pulse(t - tau)
    with tau the plane-wave round trip to that element. With ``rms`` given
    the frame is rescaled to that RMS amplitude.
    """
    if 3.0 * spec.fc > fs:
        raise ValueError(f"Nyquist violation: 3*fc/2={1.5 * spec.fc:g} Hz > fs/2={fs / 2:g} Hz")
    pts = spec.draw_scatterers()
    n = spec.n_elements
    out = np.zeros((m, n))
    half = spec.cycles / (2.0 * spec.fc)
    width = int(np.ceil(2 * half * fs)) + 2
    offs = np.arange(width)
    cols = np.arange(n)
    # summation order is fixed by scatterer index
    for x, z, refl in pts:
        tau = round_trip_delay(spec, x, z)
        start = np.floor((tau - half) * fs).astype(np.int64)
        rows = start[None, :] + offs[:, None]
        ok = (rows >= 0) & (rows < m)
        if not ok.any():
            continue
        p = refl * gaussian_pulse(rows / fs - tau[None, :], spec.fc, spec.bandwidth, spec.cycles)
        r, c = np.nonzero(ok)
        out[rows[r, c], cols[c]] += p[r, c]
    if rms is not None:
        cur = np.sqrt(np.mean(out * out))
        if cur > 0:
            out *= rms / cur
    return RfFrame(out, fs=fs, fc=spec.fc)


def cyst_regions(spec: PhantomSpec, fs: float, m: int, cyst: int = 0):
    """Target/background rectangles (row0, col0, rows, cols) in channel-data coordinates.

    The target spans the echo times of the central half of the cyst, seen by
    the middle half of the array; the background is the same window moved
    1.75 radii shallower.
    """
    from .imaging import RegionSpec

    c = spec.cysts[cyst]
    to_row = lambda z: int(round(2.0 * z * 1e-3 / spec.speed_of_sound * fs))
    half = 0.5 * c.radius
    n = spec.n_elements
    col0, cols = n // 4, n // 2
    t0 = to_row(c.z - half)
    rows = to_row(c.z + half) - t0
    b0 = to_row(c.z - 1.75 * c.radius - half)
    if b0 < 0 or t0 + rows > m:
        raise ValueError("cyst regions fall outside the frame")
    return RegionSpec((t0, col0, rows, cols), (b0, col0, rows, cols))
