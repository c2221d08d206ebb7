"""Flow-field scaling: sub-region crop, Lagrange upsampling, velocity gain.

A factor-k scaling extracts a 1/k-size sub-region, interpolates it back to
the source dimensions (linear stencil for 4x, five-point fourth-order
stencil for 8x), then multiplies the velocities by k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .flowfield import VelocityField

# Maximum fraction of the local stencil range by which a fourth-order
# Lagrange interpolant can exceed the stencil min/max (max negative-weight
# mass of the 5-point equispaced stencil over its full span; the true value
# is 0.60391...). Order 1 never overshoots.
LAGRANGE4_OVERSHOOT = 0.604

_FACTOR_TABLE = {
    1: (1.0, 0),
    4: (0.25, 1),
    8: (0.125, 4),
}


@dataclass(frozen=True)
class ScalingSpec:
    """One velocity-scaling configuration (factor, crop, interpolation order)."""

    factor: int
    region_fraction: float
    interp_order: int
    region_origin: tuple[int, int] | None = None  # None = centered crop

    def __post_init__(self):
        if self.factor not in _FACTOR_TABLE:
            raise ValueError(f"factor must be one of {sorted(_FACTOR_TABLE)}, got {self.factor}")
        fraction, order = _FACTOR_TABLE[self.factor]
        if self.region_fraction != fraction or self.interp_order != order:
            raise ValueError(
                f"factor {self.factor} requires region_fraction={fraction} and "
                f"interp_order={order}, got ({self.region_fraction}, {self.interp_order})"
            )

    @classmethod
    def for_factor(cls, factor: int, region_origin: tuple[int, int] | None = None) -> "ScalingSpec":
        fraction, order = _FACTOR_TABLE[factor]
        return cls(factor=factor, region_fraction=fraction, interp_order=order,
                   region_origin=region_origin)

    def resolve_origin(self, width: int, height: int) -> tuple[int, int]:
        """Concrete top-left corner of the crop for a given field size."""
        sub_w = int(round(width * self.region_fraction))
        sub_h = int(round(height * self.region_fraction))
        if self.region_origin is not None:
            return self.region_origin
        return ((width - sub_w) // 2, (height - sub_h) // 2)


def extract_subregion(field: VelocityField, spec: ScalingSpec) -> VelocityField:
    """Crop the spec's sub-region; velocities are copied unmodified."""
    sub_w = int(round(field.width * spec.region_fraction))
    sub_h = int(round(field.height * spec.region_fraction))
    x0, y0 = spec.resolve_origin(field.width, field.height)
    if x0 < 0 or y0 < 0 or x0 + sub_w > field.width or y0 + sub_h > field.height:
        raise ValueError(
            f"sub-region {sub_w}x{sub_h} at ({x0}, {y0}) exceeds "
            f"{field.width}x{field.height} field"
        )
    return VelocityField(
        u=field.u[y0 : y0 + sub_h, x0 : x0 + sub_w],
        v=field.v[y0 : y0 + sub_h, x0 : x0 + sub_w],
        time_index=field.time_index,
    )


def _lagrange_matrix(n_src: int, n_dst: int, order: int) -> np.ndarray:
    """Dense (n_dst, n_src) interpolation weights along one axis.

    Output coordinates map corners-to-corners onto the source grid. Order 1
    uses the bracketing 2-point stencil; order 4 a 5-point stencil clamped
    to the nearest valid window at the edges.
    """
    if n_src < order + 1:
        raise ValueError(f"order-{order} stencil needs at least {order + 1} source nodes")
    weights = np.zeros((n_dst, n_src))
    if n_dst == 1:
        weights[0, 0] = 1.0
        return weights
    s = np.arange(n_dst) * ((n_src - 1) / (n_dst - 1))
    if order == 1:
        k0 = np.minimum(s.astype(np.int64), n_src - 2)
        t = s - k0
        weights[np.arange(n_dst), k0] = 1.0 - t
        weights[np.arange(n_dst), k0 + 1] = t
        return weights
    # order 4: stencil start so the evaluation point falls in the central
    # interval for interior points
    k0 = np.clip(s.astype(np.int64) - 2, 0, n_src - 5)
    for row in range(n_dst):
        base = int(k0[row])
        nodes = np.arange(base, base + 5, dtype=np.float64)
        for a in range(5):
            w = 1.0
            for b in range(5):
                if a != b:
                    w *= (s[row] - nodes[b]) / (nodes[a] - nodes[b])
            weights[row, base + a] = w
    return weights


def lagrange_upsample(
    field: VelocityField, target_width: int, target_height: int, order: int
) -> VelocityField:
    """Separable per-axis Lagrange interpolation of both velocity components."""
    if order not in (1, 4):
        raise ValueError(f"interpolation order must be 1 or 4, got {order}")
    if target_width < field.width or target_height < field.height:
        raise ValueError("target dimensions must not shrink the field")
    wx = _lagrange_matrix(field.width, target_width, order)
    wy = _lagrange_matrix(field.height, target_height, order)
    return VelocityField(
        u=wy @ field.u @ wx.T,
        v=wy @ field.v @ wx.T,
        time_index=field.time_index,
    )


def apply_scaling(field: VelocityField, spec: ScalingSpec) -> VelocityField:
    """Crop, upsample back to the source size, and amplify by the factor."""
    if spec.factor == 1:
        return field
    sub = extract_subregion(field, spec)
    up = lagrange_upsample(sub, field.width, field.height, spec.interp_order)
    return VelocityField(
        u=spec.factor * up.u,
        v=spec.factor * up.v,
        time_index=field.time_index,
    )
