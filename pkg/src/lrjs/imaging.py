"""B-mode formation and image-quality metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.signal

from .model import RfFrame

DEFAULT_DYNAMIC_RANGE_DB = 50.0


class CnrUndefinedError(ValueError):
    """Contrast-to-noise ratio has a zero numerator or denominator."""


@dataclass(frozen=True, eq=False)
class BmodeImage:
    pixels: np.ndarray
    dynamic_range_db: float
    normalization_max: float

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.dtype != np.uint8:
            raise ValueError("B-mode pixels must be uint8")
        if not self.dynamic_range_db > 0:
            raise ValueError("dynamic range must be > 0 dB")

    @property
    def shape(self):
        return self.pixels.shape


Rect = tuple[int, int, int, int]


@dataclass(frozen=True)
class RegionSpec:
    """Target and background rectangles as (row0, col0, rows, cols)."""

    target: Rect
    background: Rect

    def __post_init__(self):
        for name, (r0, c0, h, w) in (("target", self.target), ("background", self.background)):
            if r0 < 0 or c0 < 0 or h < 1 or w < 1:
                raise ValueError(f"{name} region has negative origin or empty size")
            if h * w < 16:
                raise ValueError(f"{name} region has {h * w} pixels, need at least 16")
        (r0, c0, h0, w0), (r1, c1, h1, w1) = self.target, self.background
        if r0 < r1 + h1 and r1 < r0 + h0 and c0 < c1 + w1 and c1 < c0 + w0:
            raise ValueError("target and background regions overlap")

    @classmethod
    def parse(cls, text: str) -> "RegionSpec":
        """From ``"r0,c0,rows,cols;r0,c0,rows,cols"`` (target first)."""
        parts = [p for p in text.replace(" ", "").split(";") if p]
        if len(parts) != 2:
            raise ValueError("regions need two rectangles separated by ';'")
        rects = [tuple(int(v) for v in p.split(",")) for p in parts]
        if any(len(r) != 4 for r in rects):
            raise ValueError("each rectangle is row0,col0,rows,cols")
        return cls(rects[0], rects[1])

    def format(self) -> str:
        return ";".join(",".join(str(v) for v in r) for r in (self.target, self.background))

    def check_bounds(self, shape) -> None:
        for name, (r0, c0, h, w) in (("target", self.target), ("background", self.background)):
            if r0 + h > shape[0] or c0 + w > shape[1]:
                raise ValueError(f"{name} region exceeds image of shape {tuple(shape)}")


def envelope(frame) -> np.ndarray:
    """Per-channel magnitude of the analytic signal."""
    x = frame.data if isinstance(frame, RfFrame) else np.asarray(frame, dtype=float)
    if x.shape[0] < 4:
        raise ValueError("envelope detection needs at least 4 samples per channel")
    return np.abs(scipy.signal.hilbert(x, axis=0))


def bmode(env: np.ndarray, dynamic_range_db: float = DEFAULT_DYNAMIC_RANGE_DB) -> BmodeImage:
    """Log-compress ``env`` into 8 bits over ``dynamic_range_db`` below its maximum."""
    env = np.asarray(env, dtype=float)
    if not dynamic_range_db > 0:
        raise ValueError("dynamic range must be > 0 dB")
    if np.any(env < 0) or not np.all(np.isfinite(env)):
        raise ValueError("envelope must be finite and non-negative")
    peak = float(env.max()) if env.size else 0.0
    if peak <= 0:
        raise ValueError("all-zero envelope has no B-mode image")
    with np.errstate(divide="ignore"):
        level = 1.0 + 20.0 * np.log10(env / peak) / dynamic_range_db
    level = np.clip(level, 0.0, 1.0)
    # snap values sitting on a half step within rounding noise before rounding half up
    pixels = np.floor(np.round(255.0 * level, 9) + 0.5).astype(np.uint8)
    return BmodeImage(pixels, float(dynamic_range_db), peak)


def region_stats(img: BmodeImage, rect: Rect) -> tuple[float, float]:
    r0, c0, h, w = rect
    px = img.pixels[r0:r0 + h, c0:c0 + w].astype(float)
    return float(px.mean()), float(px.std())


def cnr(img: BmodeImage, regions: RegionSpec) -> float:
    """CNR in dB: 20 log10(|mu_t - mu_b| / sqrt(sd_t^2 + sd_b^2))."""
    regions.check_bounds(img.shape)
    mt, st = region_stats(img, regions.target)
    mb, sb = region_stats(img, regions.background)
    den = np.hypot(st, sb)
    if den == 0:
        raise CnrUndefinedError("both regions are constant")
    if mt == mb:
        raise CnrUndefinedError("target and background have equal means")
    return float(20.0 * np.log10(abs(mt - mb) / den))


def relative_error(xhat, xref) -> float:
    a = xhat.data if isinstance(xhat, RfFrame) else np.asarray(xhat)
    b = xref.data if isinstance(xref, RfFrame) else np.asarray(xref)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    ref = np.linalg.norm(b)
    if ref == 0:
        raise ValueError("reference frame is all zero")
    return float(np.linalg.norm(a - b) / ref)


def write_pgm(path, img: BmodeImage) -> None:
    """Binary PGM (P5, maxval 255)."""
    h, w = img.pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img.pixels).tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    fields, pos = [], 0
    while len(fields) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        fields.append(data[pos:end])
        pos = end
    if fields[0] != b"P5" or int(fields[3]) != 255:
        raise ValueError("not an 8-bit binary PGM")
    w, h = int(fields[1]), int(fields[2])
    pix = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=pos + 1)
    return pix.reshape(h, w)
