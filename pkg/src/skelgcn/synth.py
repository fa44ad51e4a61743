"""Seeded synthetic micrograph-like images and labeled corpora.

Wall material is rendered dark and open space bright, so the default
blur -> binarize -> invert preprocessing maps walls to foreground.

``ripples``: an oriented sinusoid at ``angle_deg`` (stripes run at that
angle, counter-clockwise from the image x axis), wavelength proportional to
``coarseness``, phase-warped and broken by a smooth seeded defect field whose
correlation length also scales with ``coarseness``.

``holes``: a seeded random packing of bright elliptical pores on a dark wall
background, radius proportional to ``coarseness``, elongated along
``angle_deg`` by ``1 / cos(angle)``.
"""
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from .errors import ParameterError
from .imaging import save_pgm
from .manifest import ManifestEntry, manifest_to_csv

BASE_WAVELENGTH = 7.0
BASE_RADIUS = 4.0
DEFAULT_FLUENCE_LEVELS = (1.0, 1.4, 2.0)
DEFAULT_ANGLE_LEVELS = (0.0, 30.0, 45.0)


@dataclass(frozen=True)
class SynthSpec:
    kind: str = "ripples"
    angle_deg: float = 0.0
    coarseness: float = 1.0
    noise_sigma: float = 6.0
    seed: int = 0
    dims: tuple = (128, 128)
    defect_strength: float = 0.5

    def validate(self):
        if self.kind not in ("ripples", "holes"):
            raise ParameterError(f"kind must be ripples or holes, got {self.kind!r}")
        if not self.coarseness > 0:
            raise ParameterError(f"coarseness must be positive, got {self.coarseness}")
        if self.noise_sigma < 0:
            raise ParameterError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        h, w = self.dims
        if h < 64 or w < 64:
            raise ParameterError(f"dims must be at least 64x64, got {self.dims}")


def _smooth_field(rng, shape, corr):
    field = gaussian_filter(rng.standard_normal(shape), corr, mode="wrap")
    return field / (field.std() or 1.0)


def _ripples(spec, rng):
    h, w = spec.dims
    theta = np.deg2rad(spec.angle_deg)
    rows, cols = np.mgrid[0:h, 0:w].astype(np.float64)
    wavelength = BASE_WAVELENGTH * spec.coarseness
    u = cols * np.sin(theta) + rows * np.cos(theta)
    warp = _smooth_field(rng, (h, w), 1.5 * wavelength)
    defects = _smooth_field(rng, (h, w), 0.75 * wavelength)
    phase = 2 * np.pi * u / wavelength + 0.8 * warp
    return np.sin(phase) + spec.defect_strength * defects


def _holes(spec, rng):
    h, w = spec.dims
    theta = np.deg2rad(spec.angle_deg)
    stretch = 1.0 / np.cos(theta)
    radius = BASE_RADIUS * spec.coarseness
    rows, cols = np.mgrid[0:h, 0:w].astype(np.float64)
    field = np.full((h, w), -1.0)
    # rejection sampling keeps a wall between neighbouring pores
    centres = np.zeros((0, 3))
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    for _ in range(int(6 * h * w / (radius * radius))):
        r0, c0 = rng.uniform(0, h), rng.uniform(0, w)
        rad = radius * rng.uniform(0.8, 1.2)
        dr, dc = r0 - centres[:, 0], c0 - centres[:, 1]
        along = (dc * cos_t - dr * sin_t) / stretch
        across = dc * sin_t + dr * cos_t
        if (np.hypot(along, across) < 1.25 * (rad + centres[:, 2])).any():
            continue
        centres = np.vstack([centres, (r0, c0, rad)])
    for r0, c0, rad in centres:
        dr, dc = rows - r0, cols - c0
        along = dc * np.cos(theta) - dr * np.sin(theta)
        across = dc * np.sin(theta) + dr * np.cos(theta)
        inside = 1.0 - np.hypot(along / (stretch * rad), across / rad)
        field = np.maximum(field, inside)
    return field + 0.3 * spec.defect_strength * _smooth_field(rng, (h, w), radius)


def generate(spec):
    """Render ``spec`` as a ``uint8`` gray image, deterministic in ``spec.seed``."""
    spec.validate()
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    field = _ripples(spec, rng) if spec.kind == "ripples" else _holes(spec, rng)
    gray = 128.0 + 100.0 * np.tanh(2.0 * field)
    if spec.noise_sigma > 0:
        gray = gray + rng.normal(0.0, spec.noise_sigma, size=gray.shape)
    return np.clip(np.floor(gray + 0.5), 0, 255).astype(np.uint8)


def entry_seed(base_seed, fluence_idx, angle_idx, replicate):
    return int(np.random.SeedSequence([base_seed, fluence_idx, angle_idx, replicate])
               .generate_state(1, dtype=np.uint64)[0])


def corpus_specs(fluence_levels=DEFAULT_FLUENCE_LEVELS, angle_levels=DEFAULT_ANGLE_LEVELS,
                 replicates=5, seed=0, kind="ripples", dims=(128, 128), noise_sigma=6.0):
    """Yield ``(image_id, fluence_class, angle_class, SynthSpec)`` over the condition grid."""
    for fi, coarse in enumerate(fluence_levels):
        for ai, angle in enumerate(angle_levels):
            for rep in range(replicates):
                spec = SynthSpec(kind, float(angle), float(coarse), noise_sigma,
                                 entry_seed(seed, fi, ai, rep), tuple(dims))
                yield f"f{fi + 1}a{ai + 1}r{rep:02d}", fi + 1, ai + 1, spec


def generate_corpus(out_dir, fluence_levels=DEFAULT_FLUENCE_LEVELS,
                    angle_levels=DEFAULT_ANGLE_LEVELS, replicates=5, seed=0,
                    kind="ripples", dims=(128, 128), noise_sigma=6.0):
    """Write one PGM per grid cell and replicate plus ``manifest.csv``; return the entries.

    Fluence classes follow the coarseness levels and angle classes the angle
    levels, both numbered from 1. An empty grid writes nothing.
    """
    out_dir = Path(out_dir)
    structure = "wall" if kind == "ripples" else "hole"
    entries = []
    for image_id, fc, ac, spec in corpus_specs(fluence_levels, angle_levels, replicates,
                                               seed, kind, dims, noise_sigma):
        rel = f"images/{image_id}.pgm"
        save_pgm(out_dir / rel, generate(spec))
        entries.append(ManifestEntry(image_id, rel, fc, ac, structure))
    if entries:
        (out_dir / "manifest.csv").write_text(manifest_to_csv(entries))
    return entries
