"""Velocity-field container, analytic generators, and sub-pixel sampling.

Fields live on a pixel grid: ``u[j, i]`` is the x-displacement (px/frame) at
column ``i``, row ``j``; ``v`` is the y-displacement. Arrays are float64 and
frozen after construction, so field values can be shared freely across
threads and worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import maybe_njit


class SolverError(RuntimeError):
    """Raised when an iterative solver fails to converge."""


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class VelocityField:
    """Dense 2-D (u, v) velocity grid in px/frame."""

    u: np.ndarray
    v: np.ndarray
    time_index: int = 0

    def __post_init__(self):
        u = _frozen_array(self.u)
        v = _frozen_array(self.v)
        if u.ndim != 2 or u.shape != v.shape:
            raise ValueError(f"u/v must be 2-D with equal shapes, got {u.shape} vs {v.shape}")
        if u.shape[0] < 2 or u.shape[1] < 2:
            raise ValueError(f"field must be at least 2x2, got {u.shape}")
        if not (np.isfinite(u).all() and np.isfinite(v).all()):
            raise ValueError("field contains non-finite values")
        if self.time_index < 0:
            raise ValueError("time_index must be >= 0")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def width(self) -> int:
        return self.u.shape[1]

    @property
    def height(self) -> int:
        return self.u.shape[0]

    def speed(self) -> np.ndarray:
        """Per-pixel speed magnitude."""
        return np.hypot(self.u, self.v)

    def mean_speed(self) -> float:
        return float(self.speed().mean())


def sample_bilinear(field: VelocityField, x: float, y: float) -> tuple[float, float]:
    """Bilinearly interpolate (u, v) at a sub-pixel coordinate.

    The valid domain is ``0 <= x <= width-1`` and ``0 <= y <= height-1``;
    coordinates outside it raise ``ValueError``. Queries at integer
    coordinates reproduce the grid values exactly.
    """
    w, h = field.width, field.height
    if not (0.0 <= x <= w - 1 and 0.0 <= y <= h - 1):
        raise ValueError(f"sample point ({x}, {y}) outside grid domain "
                         f"[0, {w - 1}] x [0, {h - 1}]")
    i0 = min(int(x), w - 2)
    j0 = min(int(y), h - 2)
    fx = x - i0
    fy = y - j0
    w00 = (1.0 - fx) * (1.0 - fy)
    w10 = fx * (1.0 - fy)
    w01 = (1.0 - fx) * fy
    w11 = fx * fy
    u = (w00 * field.u[j0, i0] + w10 * field.u[j0, i0 + 1]
         + w01 * field.u[j0 + 1, i0] + w11 * field.u[j0 + 1, i0 + 1])
    v = (w00 * field.v[j0, i0] + w10 * field.v[j0, i0 + 1]
         + w01 * field.v[j0 + 1, i0] + w11 * field.v[j0 + 1, i0 + 1])
    return float(u), float(v)


def make_uniform(width: int, height: int, u0: float, v0: float) -> VelocityField:
    """Constant (u0, v0) everywhere."""
    return VelocityField(
        u=np.full((height, width), float(u0)),
        v=np.full((height, width), float(v0)),
    )


def make_lamb_oseen(
    width: int,
    height: int,
    circulation: float,
    core_radius: float,
    center: tuple[float, float],
) -> VelocityField:
    """Lamb-Oseen vortex: smooth rotational test fixture.

    Tangential speed ``V(r) = circulation/(2 pi r) * (1 - exp(-r^2/rc^2))``;
    the removable singularity at the center is defined as zero velocity.
    """
    if core_radius <= 0:
        raise ValueError("core_radius must be positive")
    cx, cy = center
    xx = np.arange(width, dtype=np.float64)[None, :] - cx
    yy = np.arange(height, dtype=np.float64)[:, None] - cy
    r2 = xx**2 + yy**2
    r = np.sqrt(r2)
    with np.errstate(divide="ignore", invalid="ignore"):
        vt_over_r = circulation / (2.0 * np.pi * r2) * (1.0 - np.exp(-r2 / core_radius**2))
    vt_over_r = np.where(r > 0.0, vt_over_r, 0.0)
    # counterclockwise rotation for positive circulation
    u = -vt_over_r * yy
    v = vt_over_r * xx
    return VelocityField(u=u, v=v)


# ---------------------------------------------------------------------------
# Laminar flat-plate boundary layer (similarity solution)

@dataclass(frozen=True)
class BlasiusProfile:
    """Similarity profile f(eta) with f''' + f f''/2 = 0, f(0)=f'(0)=0, f'(inf)=1."""

    eta_grid: np.ndarray
    f: np.ndarray
    f_prime: np.ndarray
    f_double_prime: np.ndarray

    def __post_init__(self):
        for name in ("eta_grid", "f", "f_prime", "f_double_prime"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name)))

    @property
    def wall_shear(self) -> float:
        """f''(0), the shooting parameter."""
        return float(self.f_double_prime[0])


def _integrate_profile(fpp0, eta_max, step):
    # RK4 on y = (f, f', f''), y' = (f', f'', -f f''/2); returns full arrays.
    n = int(round(eta_max / step))
    f = np.zeros(n + 1)
    fp = np.zeros(n + 1)
    fpp = np.zeros(n + 1)
    fpp[0] = fpp0
    a, b, c = 0.0, 0.0, fpp0
    for k in range(n):
        k1a, k1b, k1c = b, c, -0.5 * a * c
        a2 = a + 0.5 * step * k1a
        b2 = b + 0.5 * step * k1b
        c2 = c + 0.5 * step * k1c
        k2a, k2b, k2c = b2, c2, -0.5 * a2 * c2
        a3 = a + 0.5 * step * k2a
        b3 = b + 0.5 * step * k2b
        c3 = c + 0.5 * step * k2c
        k3a, k3b, k3c = b3, c3, -0.5 * a3 * c3
        a4 = a + step * k3a
        b4 = b + step * k3b
        c4 = c + step * k3c
        k4a, k4b, k4c = b4, c4, -0.5 * a4 * c4
        a = a + (step / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        b = b + (step / 6.0) * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        c = c + (step / 6.0) * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
        f[k + 1] = a
        fp[k + 1] = b
        fpp[k + 1] = c
    return f, fp, fpp


_integrate_profile = maybe_njit(_integrate_profile)


def solve_blasius(
    eta_max: float = 10.0,
    step: float = 1e-3,
    shoot_tol: float = 1e-8,
    max_iter: int = 100,
) -> BlasiusProfile:
    """Solve the flat-plate similarity ODE by shooting on f''(0).

    RK4 at fixed ``step`` plus secant iteration (bisection fallback when a
    secant step would leave the sign-change bracket) on the terminal
    condition f'(eta_max) = 1.
    """
    if eta_max < 8.0:
        raise ValueError("eta_max must be >= 8 to reach the free stream")
    if step <= 0 or shoot_tol <= 0:
        raise ValueError("step and shoot_tol must be positive")

    def terminal(s):
        _, fp, _ = _integrate_profile(s, eta_max, step)
        return fp[-1] - 1.0

    lo, hi = 0.1, 1.0
    g_lo, g_hi = terminal(lo), terminal(hi)
    if g_lo * g_hi > 0:
        raise SolverError("shooting bracket [0.1, 1.0] does not straddle the solution")
    s0, g0 = lo, g_lo
    s1, g1 = hi, g_hi
    s_best = None
    for _ in range(max_iter):
        if g1 == g0:
            s2 = 0.5 * (lo + hi)
        else:
            s2 = s1 - g1 * (s1 - s0) / (g1 - g0)
            if not (lo < s2 < hi):
                s2 = 0.5 * (lo + hi)
        g2 = terminal(s2)
        if abs(g2) < shoot_tol:
            s_best = s2
            break
        if g_lo * g2 < 0:
            hi = s2
        else:
            lo, g_lo = s2, g2
        s0, g0 = s1, g1
        s1, g1 = s2, g2
    if s_best is None:
        raise SolverError(f"shooting did not converge within {max_iter} iterations")

    f, fp, fpp = _integrate_profile(s_best, eta_max, step)
    n = f.shape[0]
    eta = np.arange(n) * step
    return BlasiusProfile(eta_grid=eta, f=f, f_prime=fp, f_double_prime=fpp)


def make_blasius_field(
    profile: BlasiusProfile,
    width: int,
    height: int,
    u_inf: float,
    x_offset: float,
    viscosity_scale: float,
    amplification: float = 1.0,
) -> VelocityField:
    """Boundary-layer velocity field on a pixel canvas.

    The wall lies along row 0 and the plate runs in +x. At column ``i`` and
    row ``j`` the similarity coordinate is ``eta = j * sqrt(u_inf /
    (viscosity_scale * (x_offset + i)))``, with
    ``u = amplification * u_inf * f'(eta)`` and
    ``v = amplification/2 * sqrt(viscosity_scale*u_inf/(x_offset+i)) *
    (eta f'(eta) - f(eta))``. Beyond the solved range the profile is
    extended linearly (f' held at its terminal value).
    """
    if u_inf <= 0:
        raise ValueError("u_inf must be positive")
    if x_offset <= 0:
        raise ValueError("x_offset must be positive (leading edge is singular)")
    x = x_offset + np.arange(width, dtype=np.float64)
    inv_scale = np.sqrt(u_inf / (viscosity_scale * x))
    eta = np.arange(height, dtype=np.float64)[:, None] * inv_scale[None, :]
    eta_end = profile.eta_grid[-1]
    fp = np.interp(eta, profile.eta_grid, profile.f_prime)
    f_tail = profile.f[-1] + (eta - eta_end) * profile.f_prime[-1]
    f = np.where(eta <= eta_end, np.interp(eta, profile.eta_grid, profile.f), f_tail)
    u = amplification * u_inf * fp
    v = (
        amplification
        * 0.5
        * np.sqrt(viscosity_scale * u_inf / x)[None, :]
        * (eta * fp - f)
    )
    return VelocityField(u=u, v=v)
