"""Flat ``key = value`` configuration files and the experiment/phantom configs built from them."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .imaging import DEFAULT_DYNAMIC_RANGE_DB, RegionSpec
from .model import Scheme, SolverConfig
from .synth import Cyst, PhantomSpec


def read_kv(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment, blank lines are skipped."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def write_kv(path, items: dict) -> None:
    with open(path, "w") as fh:
        for k, v in items.items():
            fh.write(f"{k} = {v}\n")


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",")]


def _groups(text: str, size: int) -> list[tuple[float, ...]]:
    groups = []
    for part in (p.strip() for p in text.split(";")):
        if part:
            vals = _floats(part)
            if len(vals) != size:
                raise ValueError(f"expected {size} comma-separated values, got {part!r}")
            groups.append(tuple(vals))
    return groups


def phantom_from_kv(kv: dict[str, str]) -> PhantomSpec:
    """Build a PhantomSpec; unknown keys are ignored so frame metadata can share the file.

    Keys: x_min, x_max, z_min, z_max (mm), background_density (1/mm^2),
    cysts ("x,z,radius,multiplier; ..."), scatterers ("x,z,reflectivity; ..."),
    speed_of_sound, n_elements, element_pitch, fc, bandwidth, cycles, seed.
    """
    d = PhantomSpec()
    get = lambda k, conv, default: conv(kv[k]) if k in kv else default
    return PhantomSpec(
        x_extent=(get("x_min", float, d.x_extent[0]), get("x_max", float, d.x_extent[1])),
        z_extent=(get("z_min", float, d.z_extent[0]), get("z_max", float, d.z_extent[1])),
        scatterers=tuple(_groups(kv.get("scatterers", ""), 3)),
        background_density=get("background_density", float, d.background_density),
        cysts=tuple(Cyst(*g) for g in _groups(kv.get("cysts", ""), 4)),
        speed_of_sound=get("speed_of_sound", float, d.speed_of_sound),
        n_elements=get("n_elements", int, d.n_elements),
        element_pitch=get("element_pitch", float, d.element_pitch),
        fc=get("fc", float, d.fc),
        bandwidth=get("bandwidth", float, d.bandwidth),
        cycles=get("cycles", float, d.cycles),
        seed=get("seed", int, d.seed),
    )


def phantom_to_kv(spec: PhantomSpec) -> dict[str, str]:
    return {
        "x_min": spec.x_extent[0], "x_max": spec.x_extent[1],
        "z_min": spec.z_extent[0], "z_max": spec.z_extent[1],
        "background_density": spec.background_density,
        "cysts": "; ".join(f"{c.x},{c.z},{c.radius},{c.multiplier}" for c in spec.cysts),
        "scatterers": "; ".join(",".join(str(v) for v in s) for s in spec.scatterers),
        "speed_of_sound": spec.speed_of_sound,
        "n_elements": spec.n_elements,
        "element_pitch": spec.element_pitch,
        "fc": spec.fc,
        "bandwidth": spec.bandwidth,
        "cycles": spec.cycles,
        "seed": spec.seed,
    }


# dense-array phantom for the CNR experiment: sub-wavelength pitch keeps the
# channel data strongly correlated, and a pulse contained in the transducer
# band keeps full-sampling recovery exact
STANDARD_PHANTOM = dict(
    x_extent=(-4.0, 4.0),
    z_extent=(5.0, 25.0),
    background_density=10.0,
    cysts=(Cyst(0.0, 15.0, 5.0, 0.0),),
    element_pitch=0.1,
    n_elements=64,
    fc=3.5e6,
    bandwidth=0.45,
    cycles=6.0,
)
STANDARD_PHANTOM_FS = 25e6
STANDARD_PHANTOM_M = 1024


def standard_phantom(seed: int = 0) -> PhantomSpec:
    return PhantomSpec(**STANDARD_PHANTOM, seed=seed)


@dataclass
class ExperimentConfig:
    """Inputs of a recover/evaluate/sweep run."""

    frame: Path | None = None
    pattern: Path | None = None
    out: Path = Path("out")
    solver: SolverConfig = field(default_factory=SolverConfig)
    sr_list: tuple[float, ...] = (0.05, 0.1, 0.2, 0.3)
    scheme: Scheme = Scheme.UNIFORM_PER_CHANNEL
    seed: int = 0
    sigma: float = 0.0
    dynamic_range_db: float = DEFAULT_DYNAMIC_RANGE_DB
    regions: RegionSpec | None = None

    def __post_init__(self):
        if any(not 0 < sr <= 1 for sr in self.sr_list):
            raise ValueError("sampling rates must lie in (0, 1]")
        self.scheme = Scheme(self.scheme)
