"""Iterative particle image generation: seed, advect, cull, replenish, render.

The generator carries an ensemble of sub-pixel tracer particles across
frames. Each cycle renders the current ensemble (image 1), displaces every
particle by the locally sampled flow, drops the ones that left the canvas,
renders again (image 2), and tops the ensemble back up to the target count
for the next cycle.

Operations are value-semantic: they never mutate their input ensemble, and
operations that consume randomness advance a copied generator, so calling
an operation twice on the same ensemble gives identical results.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .flowfield import VelocityField

# Per-particle draw ranges. Diameters bracket typical experimental particle
# images; peak intensities stay near full scale so sparse images keep
# usable contrast.
DIAMETER_RANGE = (1.5, 3.5)
INTENSITY_RANGE = (0.75, 1.0)

# Spots are evaluated within +-TRUNCATION_FACTOR * diameter of the center;
# at that radius the profile has decayed to exp(-18), below 8-bit
# quantization.
TRUNCATION_FACTOR = 1.5


@dataclass(frozen=True)
class Particle:
    x: float
    y: float
    diameter: float
    peak_intensity: float

    def __post_init__(self):
        if self.diameter <= 0:
            raise ValueError("diameter must be positive")
        if not (0.0 < self.peak_intensity <= 1.0):
            raise ValueError("peak_intensity must be in (0, 1]")


@dataclass(frozen=True)
class ParticleImage:
    """Gray intensity grid with values clamped to [0, 1]."""

    intensity: np.ndarray

    def __post_init__(self):
        arr = np.array(self.intensity, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("intensity must be 2-D")
        if not np.isfinite(arr).all():
            raise ValueError("intensity contains non-finite values")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("intensity values must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "intensity", arr)

    @property
    def width(self) -> int:
        return self.intensity.shape[1]

    @property
    def height(self) -> int:
        return self.intensity.shape[0]


@dataclass(frozen=True)
class ParticleEnsemble:
    xs: np.ndarray
    ys: np.ndarray
    diameters: np.ndarray
    intensities: np.ndarray
    canvas_width: int
    canvas_height: int
    target_density: float
    rng: np.random.Generator

    def __post_init__(self):
        for name in ("xs", "ys", "diameters", "intensities"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.xs.shape[0]
        if not all(a.shape == (n,) for a in (self.ys, self.diameters, self.intensities)):
            raise ValueError("particle attribute arrays must have equal length")

    def __len__(self) -> int:
        return self.xs.shape[0]

    @property
    def target_count(self) -> int:
        return int(round(self.target_density * self.canvas_width * self.canvas_height))

    def particles(self) -> list[Particle]:
        """Materialize per-particle records (test/debug convenience)."""
        return [
            Particle(x=float(x), y=float(y), diameter=float(d), peak_intensity=float(a))
            for x, y, d, a in zip(self.xs, self.ys, self.diameters, self.intensities)
        ]


def _draw_particles(rng: np.random.Generator, n: int, width: int, height: int):
    xs = rng.uniform(0.0, width, n)
    ys = rng.uniform(0.0, height, n)
    ds = rng.uniform(*DIAMETER_RANGE, n)
    amps = rng.uniform(*INTENSITY_RANGE, n)
    return xs, ys, ds, amps


def seed(width: int, height: int, density: float, rng_seed: int) -> ParticleEnsemble:
    """Place round(density * width * height) particles uniformly at random."""
    if density <= 0:
        raise ValueError("density must be positive")
    n = int(round(density * width * height))
    if n < 1:
        raise ValueError(
            f"density {density} on a {width}x{height} canvas rounds to zero particles"
        )
    rng = np.random.default_rng(rng_seed)
    xs, ys, ds, amps = _draw_particles(rng, n, width, height)
    return ParticleEnsemble(
        xs=xs, ys=ys, diameters=ds, intensities=amps,
        canvas_width=width, canvas_height=height,
        target_density=density, rng=rng,
    )


def advect(ensemble: ParticleEnsemble, field: VelocityField) -> ParticleEnsemble:
    """Displace each particle by the flow sampled at its current position.

    Single forward-Euler step: new = old + (u, v) at old. Sampling clamps to
    the bilinear domain [0, w-1] x [0, h-1], so particles in the open strip
    up to the canvas edge use the nearest grid column/row. Results may land
    outside the canvas; cull() removes them.
    """
    if (field.width, field.height) != (ensemble.canvas_width, ensemble.canvas_height):
        raise ValueError(
            f"field {field.width}x{field.height} does not match canvas "
            f"{ensemble.canvas_width}x{ensemble.canvas_height}"
        )
    du, dv = _kernels.bilinear_many(field.u, field.v, ensemble.xs, ensemble.ys)
    return ParticleEnsemble(
        xs=ensemble.xs + du, ys=ensemble.ys + dv,
        diameters=ensemble.diameters, intensities=ensemble.intensities,
        canvas_width=ensemble.canvas_width, canvas_height=ensemble.canvas_height,
        target_density=ensemble.target_density, rng=ensemble.rng,
    )


def cull(ensemble: ParticleEnsemble) -> tuple[ParticleEnsemble, int]:
    """Drop particles outside [0, W) x [0, H); survivors keep their order."""
    keep = (
        (ensemble.xs >= 0.0) & (ensemble.xs < ensemble.canvas_width)
        & (ensemble.ys >= 0.0) & (ensemble.ys < ensemble.canvas_height)
    )
    removed = int((~keep).sum())
    if removed == 0:
        return ensemble, 0
    return (
        ParticleEnsemble(
            xs=ensemble.xs[keep], ys=ensemble.ys[keep],
            diameters=ensemble.diameters[keep], intensities=ensemble.intensities[keep],
            canvas_width=ensemble.canvas_width, canvas_height=ensemble.canvas_height,
            target_density=ensemble.target_density, rng=ensemble.rng,
        ),
        removed,
    )


def replenish(ensemble: ParticleEnsemble) -> ParticleEnsemble:
    """Top the ensemble back up to the target count with fresh uniform draws."""
    deficit = ensemble.target_count - len(ensemble)
    if deficit <= 0:
        return ensemble
    rng = copy.deepcopy(ensemble.rng)
    xs, ys, ds, amps = _draw_particles(
        rng, deficit, ensemble.canvas_width, ensemble.canvas_height
    )
    return ParticleEnsemble(
        xs=np.concatenate([ensemble.xs, xs]),
        ys=np.concatenate([ensemble.ys, ys]),
        diameters=np.concatenate([ensemble.diameters, ds]),
        intensities=np.concatenate([ensemble.intensities, amps]),
        canvas_width=ensemble.canvas_width, canvas_height=ensemble.canvas_height,
        target_density=ensemble.target_density, rng=rng,
    )


def render(
    ensemble: ParticleEnsemble, width: int | None = None, height: int | None = None
) -> ParticleImage:
    """Sum each particle's Gaussian profile on pixel centers, clamp to [0, 1].

    Per-particle contribution at pixel (x, y):
    ``I0 * exp((-(x - x0)^2 - (y - y0)^2) / (d_p^2 / 8))``, evaluated inside
    the truncation window. Particles accumulate in list order, so renders
    are bitwise reproducible.
    """
    w = ensemble.canvas_width if width is None else width
    h = ensemble.canvas_height if height is None else height
    img = np.zeros((h, w))
    _kernels.render_spots(
        img, ensemble.xs, ensemble.ys, ensemble.diameters, ensemble.intensities,
        TRUNCATION_FACTOR,
    )
    np.clip(img, 0.0, 1.0, out=img)
    return ParticleImage(intensity=img)


def generate_pair(
    ensemble: ParticleEnsemble, field: VelocityField
) -> tuple[ParticleImage, ParticleImage, ParticleEnsemble]:
    """One generator cycle: (image 1, image 2, ensemble for the next cycle).

    Image 1 shows the input ensemble; particles are then advected, culled at
    the canvas edge, and rendered as image 2; replenishment restores the
    target count afterwards, so image 2 never shows the replacement
    particles but the next cycle's image 1 does. The pair's ground truth is
    the full dense field, including particle-free background.
    """
    image1 = render(ensemble)
    moved = advect(ensemble, field)
    survivors, _ = cull(moved)
    image2 = render(survivors)
    next_ensemble = replenish(survivors)
    return image1, image2, next_ensemble
