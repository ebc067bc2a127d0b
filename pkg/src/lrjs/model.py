"""Domain types shared across the package.

All types are frozen dataclasses holding numpy arrays. They validate their
invariants on construction and are treated as immutable afterwards.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class Scheme(str, enum.Enum):
    UNIFORM_GLOBAL = "uniform-global"
    UNIFORM_PER_CHANNEL = "uniform-per-channel"


class Termination(str, enum.Enum):
    TOL = "tol"
    MAX_ITERS = "max_iters"


def signed_bins(m: int) -> np.ndarray:
    """DFT bin indices 0..m-1 mapped to the signed range (-m/2, m/2]."""
    j = np.arange(m)
    return np.where(j <= m // 2, j, j - m)


def _check_band(fc: float, fs: float) -> None:
    if not (fc > 0 and fs > 0):
        raise ValueError(f"fc and fs must be positive, got fc={fc}, fs={fs}")
    if 3.0 * fc > fs:
        raise ValueError(
            f"band [fc/2, 3fc/2] exceeds Nyquist: 3*fc/2={1.5 * fc:g} > fs/2={fs / 2:g}"
        )


@dataclass(frozen=True, eq=False)
class RfFrame:
    """Pre-beamformed RF samples, fast time along rows, channels along columns."""

    data: np.ndarray
    fs: float
    fc: float

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ValueError(f"RF frame must be 2-D, got shape {data.shape}")
        if data.shape[0] < 2 or data.shape[1] < 1:
            raise ValueError(f"RF frame needs M >= 2 and N >= 1, got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("RF frame contains non-finite entries")
        _check_band(self.fc, self.fs)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def m(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True, eq=False)
class FourierSupport:
    """In-band DFT bins of a length-``m`` signal.

    Use :meth:`from_band` to build the support from the transducer band; the
    constructor only validates an explicit bin list.
    """

    m: int
    bins: np.ndarray
    fc: float
    fs: float

    def __post_init__(self):
        bins = np.asarray(self.bins, dtype=np.int64).ravel()
        m = int(self.m)
        if m < 2:
            raise ValueError(f"signal length must be >= 2, got {m}")
        _check_band(self.fc, self.fs)
        if bins.size == 0:
            raise ValueError("empty Fourier support")
        if np.any(bins < 0) or np.any(bins >= m):
            raise ValueError("support bins out of range [0, m-1]")
        if np.any(np.diff(bins) <= 0):
            raise ValueError("support bins must be strictly increasing")
        freq = np.abs(signed_bins(m)[bins]) * self.fs
        # fc/2 <= |f| <= 3fc/2 with |f| = fs*|j|/m, cross-multiplied
        lo, hi = 0.5 * self.fc * m, 1.5 * self.fc * m
        if np.any(freq < lo) or np.any(freq > hi):
            raise ValueError("support contains bins outside [fc/2, 3fc/2]")
        mirror = np.sort((m - bins) % m)
        if not np.array_equal(mirror, bins):
            raise ValueError("support is not conjugate-symmetric")
        bins.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "bins", bins)

    @classmethod
    def from_band(cls, m: int, fc: float, fs: float) -> "FourierSupport":
        """All bins whose signed frequency satisfies fc/2 <= |f| <= 3fc/2."""
        _check_band(fc, fs)
        freq = np.abs(signed_bins(m)) * fs
        keep = (freq >= 0.5 * fc * m) & (freq <= 1.5 * fc * m)
        return cls(m=m, bins=np.flatnonzero(keep), fc=fc, fs=fs)

    @property
    def k(self) -> int:
        return int(self.bins.size)

    def mirror_index(self) -> np.ndarray:
        """Row index (into ``bins``) of each bin's conjugate partner."""
        partner = (self.m - self.bins) % self.m
        return np.searchsorted(self.bins, partner)

    def __eq__(self, other):
        if not isinstance(other, FourierSupport):
            return NotImplemented
        return (
            self.m == other.m
            and np.array_equal(self.bins, other.bins)
            and self.fc == other.fc
            and self.fs == other.fs
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SpectralCoefficients:
    """Band-limited Fourier coefficients, one row per support bin."""

    data: np.ndarray
    support: FourierSupport

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.complex128)
        if data.ndim != 2 or data.shape[0] != self.support.k:
            raise ValueError(
                f"coefficient matrix shape {data.shape} does not match k={self.support.k}"
            )
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def n(self) -> int:
        return self.data.shape[1]

    def row_sparsity(self, rtol: float = 0.0) -> int:
        """Number of rows with nonzero l2 norm (above ``rtol`` times the largest)."""
        norms = np.linalg.norm(self.data, axis=1)
        if norms.size == 0 or norms.max() == 0:
            return 0
        return int(np.count_nonzero(norms > rtol * norms.max()))

    def conjugate_asymmetry(self) -> float:
        """Relative deviation from the conjugate-row symmetry of a real signal."""
        d = self.data
        scale = np.linalg.norm(d)
        if scale == 0:
            return 0.0
        return float(np.linalg.norm(d - d[self.support.mirror_index()].conj()) / scale)


@dataclass(frozen=True, eq=False)
class SamplingPattern:
    """Observed locations on an ``m`` x ``n`` grid.

    Locations are stored as sorted flat (row-major) indices, which is the
    canonical ordering used for measurement vectors.
    """

    flat: np.ndarray
    m: int
    n: int
    seed: int | None = None
    scheme: Scheme = Scheme.UNIFORM_GLOBAL

    def __post_init__(self):
        flat = np.asarray(self.flat, dtype=np.int64).ravel()
        if flat.size < 1:
            raise ValueError("sampling pattern must contain at least one location")
        if np.any(flat < 0) or np.any(flat >= self.m * self.n):
            raise ValueError("sampling locations out of bounds")
        flat = np.sort(flat)
        if np.any(np.diff(flat) == 0):
            raise ValueError("duplicate sampling locations")
        flat.setflags(write=False)
        object.__setattr__(self, "flat", flat)
        object.__setattr__(self, "scheme", Scheme(self.scheme))

    @classmethod
    def from_pairs(cls, rows, cols, m: int, n: int, **kw) -> "SamplingPattern":
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        if np.any(rows < 0) or np.any(rows >= m) or np.any(cols < 0) or np.any(cols >= n):
            raise ValueError("sampling locations out of bounds")
        return cls(flat=rows * n + cols, m=m, n=n, **kw)

    @classmethod
    def from_mask(cls, mask: np.ndarray, **kw) -> "SamplingPattern":
        mask = np.asarray(mask)
        return cls(flat=np.flatnonzero(mask.ravel() != 0), m=mask.shape[0], n=mask.shape[1], **kw)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m, self.n)

    @property
    def rows(self) -> np.ndarray:
        return self.flat // self.n

    @property
    def cols(self) -> np.ndarray:
        return self.flat % self.n

    @property
    def size(self) -> int:
        return int(self.flat.size)

    @property
    def rate(self) -> float:
        return self.size / (self.m * self.n)

    def mask(self) -> np.ndarray:
        out = np.zeros(self.m * self.n, dtype=bool)
        out[self.flat] = True
        return out.reshape(self.m, self.n)


@dataclass(frozen=True, eq=False)
class Measurements:
    values: np.ndarray
    pattern: SamplingPattern
    noise_sigma: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64).ravel()
        if values.size != self.pattern.size:
            raise ValueError(
                f"{values.size} measurement values for {self.pattern.size} locations"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("measurements contain non-finite values")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class SolverConfig:
    """Penalty, weights and stopping rule of the SDMM solver.

    Defaults are the cross-validated triple gamma=1, alpha=0.01, mu=1e-6.
    """

    gamma: float = 1.0
    alpha: float = 0.01
    mu: float = 1e-6
    max_iters: int = 1000
    tol: float = 1e-6
    nuclear_weight: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be > 0")
        if not self.mu > 0:
            raise ValueError("mu must be > 0")
        if not self.alpha >= 0:
            raise ValueError("alpha must be >= 0")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError("max_iters must be a positive integer")
        if self.nuclear_weight not in (0, 1):
            raise ValueError("nuclear_weight must be 0 or 1")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    objective: float
    residual: float
    rel_change: float
    rank_estimate: int


@dataclass
class SolverTrace:
    records: list[TraceRecord] = field(default_factory=list)
    terminated_by: Termination | None = None
    # ||D - w1||, ||D - w2||, ||Y D - w3|| after the last iteration
    final_residuals: tuple[float, float, float] | None = None

    def __len__(self):
        return len(self.records)

    @property
    def iterations(self) -> int:
        return len(self.records)

    def append(self, rec: TraceRecord) -> None:
        expected = len(self.records) + 1
        if rec.iteration != expected:
            raise ValueError(f"trace record {rec.iteration} out of order (expected {expected})")
        self.records.append(rec)

    def to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iter", "objective", "residual", "rel_change", "rank_estimate"])
            for r in self.records:
                w.writerow([r.iteration, repr(r.objective), repr(r.residual),
                            repr(r.rel_change), r.rank_estimate])
