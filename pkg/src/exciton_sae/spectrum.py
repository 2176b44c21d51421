"""Bound-state spectrum of a self-adjoint extension.

Roots of  L(alpha) = RHS(Sigma)  are isolated on the intervals between the
poles alpha = 1/2+m+n of f and refined by bisection.  The two closed-form
cases RHS = 0 and RHS = infinity bypass the root finder.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from . import sae, specfun
from .errors import ConvergenceError, DegenerateIndexError, DomainError, QuadratureError
from .model import PhysicalParams, energy_from_alpha

ALPHA_MIN = 1e-8
GUARD = 1e-6
# closest relative approach to a pole while bracketing; roots for a very large
# |RHS| lie well inside GUARD, so the bracketing grid must go further in
EDGE = 1e-14
MAX_BISECTIONS = 200


class SpectrumWarning(UserWarning):
    """A branch interval held a number of roots other than the expected one."""


@dataclass(frozen=True)
class BranchInterval:
    lower: float
    upper: float
    index: int = 0

    def __post_init__(self):
        if not self.lower < self.upper:
            raise DomainError(f"empty interval ({self.lower}, {self.upper})")

    def contains(self, alpha: float) -> bool:
        return self.lower < alpha < self.upper


@dataclass(frozen=True)
class BoundState:
    branch: int
    alpha: float
    energy: float
    norm_constant: Optional[float] = None


def pole_positions(m: float, alpha_max: float) -> List[float]:
    """Poles alpha = 1/2+m+n of f up to alpha_max."""
    out, n = [], 0
    while 0.5 + m + n <= alpha_max:
        out.append(0.5 + m + n)
        n += 1
    return out


def zero_positions(m: float, alpha_max: float) -> List[float]:
    """Positive zeros alpha = 1/2-m+n of f up to alpha_max."""
    out = []
    n = math.floor(m - 0.5) + 1
    while 0.5 - m + n <= alpha_max:
        out.append(0.5 - m + n)
        n += 1
    return out


def branch_intervals(m: float, n_max: int) -> List[BranchInterval]:
    """(0, 1/2+m) followed by (1/2+m+n, 1/2+m+n+1) for n < n_max."""
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    p0 = 0.5 + m
    out = [BranchInterval(0.0, p0, 0)]
    out += [BranchInterval(p0 + n, p0 + n + 1, n + 1) for n in range(n_max)]
    return out


def _interval_index(alpha: float, m: float) -> int:
    p0 = 0.5 + m
    if alpha < p0:
        return 0
    return int(math.floor(alpha - p0)) + 1


def _sample_grid(lo: float, hi: float, dense: int) -> np.ndarray:
    """Grid on [lo, hi] refined geometrically towards both ends."""
    half = 0.5 * (hi - lo)
    offsets = np.geomspace(EDGE * max(1.0, hi), half, 90)
    pts = np.concatenate([lo + offsets, hi - offsets, np.linspace(lo, hi, dense), [lo, hi]])
    pts = pts[(pts >= lo) & (pts <= hi)]
    return np.unique(pts)


def _closed_form(params: PhysicalParams, n_max: int, rhs: float) -> List[BoundState]:
    m = params.m
    states = []
    if rhs == 0.0:
        k = 0
        while len(states) < n_max:
            alpha = 0.5 - m + k
            k += 1
            if alpha <= ALPHA_MIN:
                continue
            states.append(BoundState(_interval_index(alpha, m), alpha, energy_from_alpha(alpha, params.kappa)))
    else:
        for n in range(n_max):
            alpha = 0.5 + m + n
            states.append(BoundState(n, alpha, energy_from_alpha(alpha, params.kappa)))
    return states


def solve_spectrum(
    params: PhysicalParams,
    sigma: Union[sae.ExtensionAngle, float],
    n_max: int,
    tol: float = 1e-13,
    mode: str = "paper",
) -> List[BoundState]:
    """Lowest ``n_max`` bound states (ascending energy) of the extension Sigma.

    ``tol`` is the relative width of the final bisection bracket in alpha.
    Integer 2m is accepted only for the closed-form extensions, where the
    roots are the continuous limit of the non-degenerate ones.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    if not isinstance(sigma, sae.ExtensionAngle):
        sigma = sae.ExtensionAngle(sigma)
    data = sae.deficiency_data(params, mode, strict=False)
    rhs = sae.boundary_rhs(data, sigma)
    if rhs == 0.0 or math.isinf(rhs):
        return _closed_form(params, n_max, rhs)
    m = params.m
    if specfun.is_degenerate_index(m):
        raise DegenerateIndexError(f"2m = {2 * m!r} is (nearly) an integer; only RHS = 0 or infinity is supported")
    num, den = sae.boundary_pair(data, sigma)

    def residual(alpha):
        lhs = sae.f_values(alpha, m) * sae.spectral_scale(alpha, params.kappa, m, mode)
        return den * lhs - num

    states: List[BoundState] = []
    interval = 0
    p0 = 0.5 + m
    while len(states) < n_max:
        if interval == 0:
            lo, hi = ALPHA_MIN, p0 * (1.0 - EDGE)
            grid = _sample_grid(lo, hi, 400 + int(200 * m))
        else:
            edge = EDGE * (p0 + interval)
            lo, hi = p0 + interval - 1 + edge, p0 + interval - edge
            grid = _sample_grid(lo, hi, 200)
        values = residual(grid)
        roots = []
        for i in range(len(grid) - 1):
            g0, g1 = values[i], values[i + 1]
            if g0 == 0.0:
                roots.append(float(grid[i]))
            elif g0 * g1 < 0:
                roots.append(_bisect(residual, float(grid[i]), float(grid[i + 1]), tol, interval))
        if values[-1] == 0.0:
            roots.append(float(grid[-1]))
        if interval > 0 and len(roots) != 1:
            warnings.warn(
                f"branch interval {interval} holds {len(roots)} roots instead of one",
                SpectrumWarning, stacklevel=2,
            )
        for alpha in roots:
            states.append(BoundState(interval, alpha, energy_from_alpha(alpha, params.kappa)))
        interval += 1
    return states[:n_max]


def _bisect(func, lo: float, hi: float, tol: float, branch: int) -> float:
    g_lo = func(lo)
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol * mid:
            return mid
        g_mid = func(mid)
        if g_mid == 0.0:
            return mid
        if (g_mid < 0) == (g_lo < 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
        if mid in (lo, hi) and hi - lo <= 4 * np.spacing(mid):
            return mid
    raise ConvergenceError(f"bisection on branch {branch} did not reach tol={tol} in {MAX_BISECTIONS} steps")


def eigenfunction(params: PhysicalParams, state: BoundState, z, normalized: bool = False):
    """chi(z) = W_{alpha,m}((a+z)/(kappa alpha)), optionally divided by N."""
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z_arr < 0):
        raise DomainError("z must be >= 0")
    scale = params.kappa * state.alpha
    out = np.empty_like(z_arr)
    for i, zi in enumerate(z_arr):
        val = specfun.whittaker_w(state.alpha, params.m, (params.a + zi) / scale)
        if abs(val.imag) > 1e-10 * abs(val) + 1e-300:
            raise ConvergenceError(f"eigenfunction has imaginary part {val.imag!r} at z={zi}")
        out[i] = val.real
    if normalized:
        if state.norm_constant is None:
            raise DomainError("state carries no normalization constant")
        out /= state.norm_constant
    return out if np.ndim(z) else float(out[0])


def normalization_cutoff(params: PhysicalParams, state: BoundState, quad_tol: float) -> float:
    """z beyond which the x^alpha e^{-x/2} envelope is below quad_tol/100 of its peak."""
    alpha = state.alpha
    level = math.log(quad_tol * 1e-2)

    def log_env(x):
        return alpha * math.log(x) - 0.5 * x

    x_peak = 2.0 * alpha
    peak = log_env(x_peak)
    x = max(x_peak, params.a / (params.kappa * alpha)) + 1.0
    while log_env(x) - peak > level:
        x *= 1.25
    return max(x * params.kappa * alpha - params.a, 1.0)


def normalize(
    params: PhysicalParams,
    state: BoundState,
    quad_tol: float = 1e-10,
    cutoff_factor: float = 1.0,
) -> float:
    """N = sqrt(int_0^inf chi^2 dz) by adaptive quadrature plus an analytic tail.

    Past the cutoff chi^2 ~ C x^{2 alpha} e^{-x}, whose integral is bounded by
    chi(Zc)^2 kappa alpha / (1 - 2 alpha / x_c).
    """
    if not quad_tol > 0:
        raise DomainError("quad_tol must be positive")
    zc = normalization_cutoff(params, state, quad_tol) * cutoff_factor
    ka = params.kappa * state.alpha

    def integrand(z):
        return eigenfunction(params, state, z) ** 2

    # split at the envelope peak so the adaptive rule sees the bulk early
    z_peak = min(max(2.0 * state.alpha * ka - params.a, 0.0), zc)
    pieces = (0.0, z_peak, zc)
    total, err = 0.0, 0.0
    for lo, hi in zip(pieces[:-1], pieces[1:]):
        if hi <= lo:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, e = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=quad_tol * 0.1, limit=400)
        total += val
        err += e
    xc = (params.a + zc) / ka
    tail = integrand(zc) * ka / max(1.0 - 2.0 * state.alpha / xc, 0.5)
    total += tail
    if not total > 0 or err > quad_tol * total:
        raise QuadratureError(f"normalization error {err:.3g} exceeds quad_tol*N^2 = {quad_tol * total:.3g}")
    return math.sqrt(total)


def with_norm(params: PhysicalParams, state: BoundState, quad_tol: float = 1e-10) -> BoundState:
    return replace(state, norm_constant=normalize(params, state, quad_tol))


def fplot_samples(
    m: float,
    alpha_range: Tuple[float, float],
    count: int,
    guard: float = GUARD,
) -> List[Tuple[float, float]]:
    """(alpha, f) rows on an even grid, with points inside the guard band of a pole pushed out of it."""
    lo, hi = map(float, alpha_range)
    if count < 2:
        raise DomainError("count must be >= 2")
    if not 0 < lo < hi:
        raise DomainError(f"need 0 < alpha_min < alpha_max, got {alpha_range}")
    grid = np.linspace(lo, hi, count)
    p0 = 0.5 + m
    n = np.round(grid - p0)
    pole = p0 + n
    close = (n >= 0) & (np.abs(grid - pole) < guard)
    grid[close] = np.where(grid[close] < pole[close], pole[close] - guard, pole[close] + guard)
    values = sae.f_values(grid, m)
    return [(float(a), float(f)) for a, f in zip(grid, values)]


def energies(states: Sequence[BoundState]) -> np.ndarray:
    return np.array([s.energy for s in states])
