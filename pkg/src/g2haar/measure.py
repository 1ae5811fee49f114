"""
Haar measure on G2 in Euler coordinates: densities, volumes, exact sampling
and Monte Carlo integration.

The density factorizes over the 14 coordinates, so each coordinate is drawn
independently by inverting its one-dimensional CDF. Random streams are keyed
by (seed, coordinate, block of sample indices), which makes every sample a
function of its index alone; results do not depend on how blocks are spread
over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from g2haar.algebra import Backend, get_backend
from g2haar.parametrization import (
    EulerCoordinatesG2,
    SQRT3,
    _as_coords,
    g2_element,
    range_arrays,
)

BLOCK_SIZE = 8192
G2_PREFACTOR = 27.0 / 32.0

# Shape of each coordinate's (unnormalized) density factor, alphas then gammas.
CHANNEL_KINDS = (
    "uniform", "sin2x", "uniform", "uniform", "sin3cos", "sin5",
    "uniform", "sin2x", "uniform", "sin3cos", "uniform", "uniform", "sin2x", "uniform",
)


def su3_density(gamma) -> np.ndarray:
    """sqrt3 sin(2 g2) sin^3(g4) cos(g4) sin(2 g7); vectorized over leading axes."""
    g = np.asarray(gamma, dtype=float)
    return SQRT3 * np.sin(2 * g[..., 1]) * np.sin(g[..., 3]) ** 3 * np.cos(g[..., 3]) * np.sin(2 * g[..., 6])


def g2_density(c) -> np.ndarray:
    """(27/32) sin^5(a6) cos(a5) sin^3(a5) sin(2 a2) times the SU(3) density."""
    x = _as_coords(c)
    a = x[..., :6]
    return (G2_PREFACTOR * np.sin(a[..., 5]) ** 5 * np.cos(a[..., 4]) * np.sin(a[..., 4]) ** 3
            * np.sin(2 * a[..., 1]) * su3_density(x[..., 6:]))


# ---------------------------------------------------------------------------
# one-dimensional factors
# ---------------------------------------------------------------------------

_FACTORS = {
    "uniform": lambda x: np.ones_like(x),
    "sin2x": lambda x: np.sin(2 * x),
    "sin3cos": lambda x: np.sin(x) ** 3 * np.cos(x),
    "sin5": lambda x: np.sin(x) ** 5,
}


def sin5_cdf(x):
    """Normalized CDF of sin^5 on [0, pi]."""
    c = np.cos(x)
    return (15.0 / 16.0) * (8.0 / 15.0 - c + (2.0 / 3.0) * c**3 - 0.2 * c**5)


def channel_cdf(kind: str, x, lo: float, hi: float):
    x = np.asarray(x, dtype=float)
    if kind == "uniform":
        return (x - lo) / (hi - lo)
    if kind == "sin2x":
        return np.sin(x) ** 2
    if kind == "sin3cos":
        return np.sin(x) ** 4
    if kind == "sin5":
        return sin5_cdf(x)
    raise ValueError(kind)


def inverse_sin5_cdf(u, tol: float = 1e-12, bisect_tol: float = 1e-6) -> np.ndarray:
    """Solve sin5_cdf(x) = u on [0, pi]: bisection, then Newton."""
    u = np.asarray(u, dtype=float)
    lo = np.zeros_like(u)
    hi = np.full_like(u, np.pi)
    while np.max(hi - lo, initial=0.0) > bisect_tol:
        mid = 0.5 * (lo + hi)
        below = sin5_cdf(mid) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    x = 0.5 * (lo + hi)
    for _ in range(50):
        slope = (15.0 / 16.0) * np.sin(x) ** 5
        safe = slope > 0
        step = np.where(safe, (sin5_cdf(x) - u) / np.where(safe, slope, 1.0), 0.0)
        x = np.clip(x - step, lo, hi)
        if np.max(np.abs(step), initial=0.0) <= tol:
            break
    return x


def inverse_channel_cdf(kind: str, u, lo: float, hi: float) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if kind == "uniform":
        return lo + u * (hi - lo)
    if kind == "sin2x":
        return np.arcsin(np.sqrt(u))
    if kind == "sin3cos":
        return np.arcsin(u**0.25)
    if kind == "sin5":
        return inverse_sin5_cdf(u)
    raise ValueError(kind)


# ---------------------------------------------------------------------------
# volumes
# ---------------------------------------------------------------------------

def _quad_factors() -> np.ndarray:
    lo, hi = range_arrays()
    out = np.empty(14)
    for k, kind in enumerate(CHANNEL_KINDS):
        val, _ = integrate.quad(_FACTORS[kind], lo[k], hi[k], epsabs=0.0, epsrel=1e-13, limit=200)
        out[k] = val
    return out


def analytic_volume() -> dict[str, float]:
    """Unnormalized volumes of SU(3) and G2 as products of 1-d integrals."""
    f = _quad_factors()
    v_su3 = SQRT3 * float(np.prod(f[6:]))
    v_g2 = G2_PREFACTOR * float(np.prod(f[:6])) * v_su3
    return {"V_SU3": v_su3, "V_G2": v_g2, "ratio": v_g2 / v_su3}


def numeric_volume(density=g2_density, nodes: int = 64, base=None, coords=slice(0, 14)) -> float:
    """Tensor-product Gauss-Legendre integral of a separable density over its box.

    The density is used as a black box: along each axis it is sampled with the
    other coordinates frozen at ``base``, and the 14-d integral is
    density(base) * prod_k (integral along k) / density(base).
    """
    lo, hi = range_arrays()
    lo, hi = lo[coords], hi[coords]
    if base is None:
        base = 0.5 * (lo + hi) + 0.1 * (hi - lo)
    base = np.asarray(base, dtype=float)
    ref = float(density(base))
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    total = ref
    for k in range(len(base)):
        x = 0.5 * (hi[k] - lo[k]) * xg + 0.5 * (hi[k] + lo[k])
        pts = np.repeat(base[None, :], nodes, axis=0)
        pts[:, k] = x
        total *= 0.5 * (hi[k] - lo[k]) * float(wg @ density(pts)) / ref
    return total


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def _uniform_block(seed: int, channel: int, block: int) -> np.ndarray:
    ss = np.random.SeedSequence(seed, spawn_key=(channel, block))
    return np.random.Generator(np.random.Philox(ss)).random(BLOCK_SIZE)


def haar_block(seed: int, block: int) -> np.ndarray:
    """Coordinates (BLOCK_SIZE, 14) for sample indices [block*B, (block+1)*B)."""
    lo, hi = range_arrays()
    out = np.empty((BLOCK_SIZE, 14))
    for k, kind in enumerate(CHANNEL_KINDS):
        out[:, k] = inverse_channel_cdf(kind, _uniform_block(seed, k, block), lo[k], hi[k])
    return out


def haar_coordinates(n: int, seed: int, start: int = 0) -> np.ndarray:
    """Haar-distributed coordinates for sample indices start..start+n-1, shape (n, 14)."""
    if n <= 0:
        return np.empty((0, 14))
    first, last = start // BLOCK_SIZE, (start + n - 1) // BLOCK_SIZE
    chunk = np.concatenate([haar_block(seed, b) for b in range(first, last + 1)])
    off = start - first * BLOCK_SIZE
    return chunk[off:off + n]


@dataclass(frozen=True)
class HaarSample:
    coords: EulerCoordinatesG2
    density: float


def sample_haar(n: int, seed: int, start: int = 0) -> list[HaarSample]:
    x = haar_coordinates(n, seed, start)
    dens = g2_density(x)
    return [HaarSample(EulerCoordinatesG2.from_array(row), float(d)) for row, d in zip(x, dens)]


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

class NonFiniteIntegrandError(ValueError):
    def __init__(self, coords):
        self.coords = np.asarray(coords)
        super().__init__(f"integrand is not finite at coordinates {self.coords.tolist()}")


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    n: int
    seed: int
    extra: dict = field(default_factory=dict, compare=False)

    def z(self, expected: float = 0.0) -> float:
        diff = self.mean - expected
        if self.stderr == 0.0:
            return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
        return diff / self.stderr

    def as_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "n": self.n, "seed": self.seed}


def _block_stats(f, seed, block, n, backend):
    x = haar_block(seed, block)
    count = min(BLOCK_SIZE, n - block * BLOCK_SIZE)
    x = x[:count]
    vals = np.asarray(f(g2_element(x, backend)), dtype=float)
    bad = ~np.isfinite(vals)
    if bad.any():
        raise NonFiniteIntegrandError(x[np.argmax(bad.reshape(count, -1).any(axis=1))])
    mean = vals.mean(axis=0)
    return count, mean, ((vals - mean) ** 2).sum(axis=0)


def _mc_moments(f, n, seed, backend, workers):
    if n < 2:
        raise ValueError("need n >= 2")
    b = get_backend(backend)
    blocks = range((n + BLOCK_SIZE - 1) // BLOCK_SIZE)

    def run(k):
        return _block_stats(f, seed, k, n, b)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(run, blocks))
    else:
        stats = [run(k) for k in blocks]

    count, mean, m2 = 0, 0.0, 0.0
    for c, m, s in stats:
        # Chan et al. pairwise merge, always in block order
        delta = m - mean
        tot = count + c
        mean = mean + delta * c / tot
        m2 = m2 + s + delta * delta * count * c / tot
        count = tot
    stderr = np.sqrt(m2 / (count - 1)) / math.sqrt(count)
    return count, mean, stderr


def mc_integrate(f, n: int, seed: int, backend: Backend | str | None = None,
                 workers: int = 1) -> MCEstimate:
    """Haar average of ``f`` over ``n`` exact samples.

    ``f`` receives a stack of group matrices (m, dim, dim) and returns m values.
    Per-block statistics are merged in block order, so the estimate is
    bit-identical for any ``workers``.
    """
    count, mean, stderr = _mc_moments(f, n, seed, backend, workers)
    return MCEstimate(float(mean), float(stderr), count, seed)


def mc_integrate_many(f, n: int, seed: int, backend: Backend | str | None = None,
                      workers: int = 1) -> list[MCEstimate]:
    """Like :func:`mc_integrate` for an ``f`` returning (m, k) values; one estimate per column."""
    count, mean, stderr = _mc_moments(f, n, seed, backend, workers)
    return [MCEstimate(float(m), float(e), count, seed) for m, e in zip(mean, stderr)]


# ---------------------------------------------------------------------------
# test functions and statistical suites
# ---------------------------------------------------------------------------

def trace(g):
    return np.trace(g, axis1=-2, axis2=-1)


def trace_squared(g):
    return trace(g) ** 2


def trace_of_square(g):
    return trace(g @ g)


def entry_squared(g):
    return g[..., 0, 0] ** 2


def diagonal_squares(g):
    return np.sum(np.diagonal(g, axis1=-2, axis2=-1) ** 2, axis=-1)


TEST_FUNCTIONS = {
    "one": lambda g: np.ones(g.shape[0]),
    "trace": trace,
    "trace_squared": trace_squared,
    "trace_of_square": trace_of_square,
    "entry_squared": entry_squared,
    "diagonal_squares": diagonal_squares,
}

INVARIANCE_PANEL = ("trace", "trace_of_square", "trace_squared", "entry_squared", "diagonal_squares")

# Fixed translation elements (alpha_1..alpha_6, gamma_1..gamma_8).
TRANSLATION_COORDS = (
    (0.37, 1.10, 2.50, 4.00, 0.90, 1.30, 5.10, 0.40, 2.20, 0.70, 3.30, 1.90, 1.20, 0.60),
    (2.80, 0.20, 5.90, 1.40, 0.30, 2.70, 0.80, 1.30, 0.50, 1.10, 6.00, 0.30, 0.90, 2.90),
    (1.57, 0.78, 3.14, 3.14, 0.78, 1.57, 3.14, 0.78, 1.57, 0.78, 3.14, 1.57, 0.78, 1.57),
)


def moments(n: int, seed: int, backend: Backend | str | None = None, workers: int = 1,
            sigmas: float = 3.0) -> dict:
    """E[trace g] against 0 and E[(trace g)^2] against 1."""
    first, second = mc_integrate_many(
        lambda g: np.stack([trace(g), trace_squared(g)], axis=-1), n, seed, backend, workers)
    z1, z2 = first.z(0.0), second.z(1.0)
    return {
        "trace": first, "trace_squared": second,
        "z_trace": z1, "z_trace_squared": z2,
        "pass": abs(z1) <= sigmas and abs(z2) <= sigmas,
    }


def invariance_suite(k: int = len(TRANSLATION_COORDS), n: int = 100_000, seed: int = 0,
                     backend: Backend | str | None = None, workers: int = 1,
                     translations=None, z_max: float = 4.0) -> dict:
    """Paired z-scores of f(h g) - f(g) and f(g h) - f(g) under Haar g.

    All (h, f, side) combinations share one sample stream. ``translations``
    overrides the fixed elements (a list of matrices).
    """
    b = get_backend(backend)
    if translations is None:
        translations = [g2_element(np.array(c), b) for c in TRANSLATION_COORDS[:k]]
    labels = [(idx, name, side) for idx in range(len(translations))
              for name in INVARIANCE_PANEL for side in ("left", "right")]

    def diffs(g):
        cols = []
        for idx, h in enumerate(translations):
            left, right = h @ g, g @ h
            for name in INVARIANCE_PANEL:
                fn = TEST_FUNCTIONS[name]
                base = fn(g)
                cols += [fn(left) - base, fn(right) - base]
        return np.stack(cols, axis=-1)

    estimates = mc_integrate_many(diffs, n, seed, b, workers)
    rows = [{"h": idx, "function": name, "side": side,
             "mean_diff": est.mean, "stderr": est.stderr, "z": est.z()}
            for (idx, name, side), est in zip(labels, estimates)]
    worst = max((abs(r["z"]) for r in rows), default=0.0)
    return {"rows": rows, "max_abs_z": worst, "pass": worst <= z_max}


def density_vs_metric(points: int = 50, seed: int = 0, h: float = 1e-6,
                      backend: Backend | str | None = None, spread_tol: float = 1e-4) -> dict:
    """Ratio sqrt(det metric) / g2_density at random interior points.

    The pass condition is a constant ratio (relative spread within
    ``spread_tol``); the fitted constant is reported alongside.
    """
    from g2haar.geometry import metric_at

    lo, hi = range_arrays()
    rng = np.random.default_rng(seed)
    x = lo + (hi - lo) * rng.uniform(0.1, 0.9, size=(points, 14))
    ratios = np.array([metric_at(p, h, backend).volume_density() / float(g2_density(p)) for p in x])
    mean = float(ratios.mean())
    spread = float(np.abs(ratios / mean - 1.0).max())
    return {
        "ratio_mean": mean,
        "ratio_spread": spread,
        "points": points,
        "constant_is_one": abs(mean - 1.0) <= spread_tol,
        "pass": spread <= spread_tol,
    }
