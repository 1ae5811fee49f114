"""
Left-invariant currents, the bi-invariant metric and the round S^6 base.

Currents are expressed in the orthonormal frame (coefficients along C_I), so
the metric is the plain Gram matrix J^T J of the current columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from g2haar.algebra import Backend, get_backend, project
from g2haar.parametrization import (
    SQRT3,
    _as_coords,
    exp_generator,
    g2_element,
    sigma,
)

DEFAULT_STEP = 1e-6
FLAG_RESIDUAL = 1e-4


@dataclass(frozen=True)
class CurrentFrame:
    """Columns ``J[:, p]`` = coordinates of g^-1 dg/dtheta_p along C_1..C_14."""

    J: np.ndarray
    residuals: np.ndarray | None = None

    @property
    def flagged(self) -> list[int]:
        """Columns whose matrix fell outside the algebra (0-based)."""
        if self.residuals is None:
            return []
        return [int(p) for p in np.flatnonzero(self.residuals > FLAG_RESIDUAL)]

    def metric(self) -> "MetricTensor":
        return MetricTensor(self.J.T @ self.J)


@dataclass(frozen=True)
class MetricTensor:
    M: np.ndarray

    def symmetry_residual(self) -> float:
        return float(np.abs(self.M - self.M.T).max())

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.M + self.M.T)).min())

    def volume_density(self) -> float:
        """sqrt(det M)."""
        return float(np.sqrt(max(np.linalg.det(self.M), 0.0)))


def _fd_current(fn, x: np.ndarray, h: float, backend: Backend) -> CurrentFrame:
    p = len(x)
    steps = h * np.eye(p)
    g = fn(x, backend)
    plus = fn(x + steps, backend)
    minus = fn(x - steps, backend)
    deriv = g.T @ (plus - minus) / (2 * h)
    cols = np.empty((14, p))
    res = np.empty(p)
    for k in range(p):
        cols[:, k], res[k] = project(deriv[k], backend)
    return CurrentFrame(cols, res)


def numeric_current(c, h: float = DEFAULT_STEP, backend: Backend | str | None = None) -> CurrentFrame:
    """Central-difference Maurer-Cartan current of the full 14-coordinate map."""
    if not 1e-7 <= h <= 1e-4:
        raise ValueError(f"step {h} outside [1e-7, 1e-4]")
    return _fd_current(g2_element, _as_coords(c), h, get_backend(backend))


def numeric_sigma_current(alpha, h: float = DEFAULT_STEP, backend: Backend | str | None = None) -> CurrentFrame:
    """Central-difference current of the coset factor alone (14 x 6)."""
    if not 1e-7 <= h <= 1e-4:
        raise ValueError(f"step {h} outside [1e-7, 1e-4]")
    return _fd_current(sigma, np.asarray(alpha, dtype=float), h, get_backend(backend))


def _s_forms(alpha):
    """The 1-forms s1, s2, s3 as coefficient rows over (da1..da6)."""
    a1, a2, a3 = alpha[:3]
    s1 = np.array([-np.sin(2 * a2) * np.cos(2 * a3), np.sin(2 * a3), 0, 0, 0, 0])
    s2 = np.array([np.sin(2 * a2) * np.sin(2 * a3), np.cos(2 * a3), 0, 0, 0, 0])
    s3 = np.array([np.cos(2 * a2), 0, 1, 0, 0, 0])
    return s1, s2, s3


def analytic_sigma_current(alpha) -> CurrentFrame:
    """Closed-form Sigma^-1 dSigma as a 14 x 6 frame."""
    alpha = np.asarray(alpha, dtype=float)
    a5, a6 = alpha[4], alpha[5]
    s1, s2, s3 = _s_forms(alpha)
    d = np.eye(6)
    da4, da5, da6 = d[3], d[4], d[5]

    c5, s5 = np.cos(a5), np.sin(a5)
    sin2a5 = np.sin(2 * a5)
    ch, sh = np.cos(a6 / 2), np.sin(a6 / 2)
    shifted = s3 + 1.5 * da4
    mixed = 0.25 * (1 + 3 * np.cos(2 * a5)) * da4 - s5**2 * s3

    J = np.array([
        c5 * s1,
        c5 * s2,
        0.25 * (3 + np.cos(2 * a5)) * s3 - 0.75 * s5**2 * da4,
        -0.5 * sin2a5 * ch**3 * shifted + s5 * sh**3 * s2,
        -s5 * sh**3 * s1 + ch**3 * da5,
        s5 * ch**3 * s1 + sh**3 * da5,
        0.5 * sin2a5 * sh**3 * shifted + s5 * ch**3 * s2,
        SQRT3 / 2 * np.cos(a6) * mixed,
        SQRT3 / 2 * da6,
        SQRT3 / 2 * np.sin(a6) * mixed,
        -SQRT3 / 2 * sin2a5 * ch * sh**2 * shifted + SQRT3 * s5 * sh * ch**2 * s2,
        -SQRT3 * s5 * sh * ch**2 * s1 + SQRT3 * ch * sh**2 * da5,
        SQRT3 * s5 * ch * sh**2 * s1 + SQRT3 * sh * ch**2 * da5,
        SQRT3 / 2 * sin2a5 * sh * ch**2 * shifted + SQRT3 * s5 * ch * sh**2 * s2,
    ])
    return CurrentFrame(J)


def _c(k):
    e = np.zeros(14)
    e[k - 1] = 1.0
    return e


def _conjugation_table():
    """(name, generator, exponent scale, conjugated generator, rhs(x) -> coords)."""
    cos, sin = np.cos, np.sin
    s3 = SQRT3
    return [
        ("C3:C2", 3, 1.0, 2, lambda x: cos(2 * x) * _c(2) + sin(2 * x) * _c(1)),
        ("C3:C1", 3, 1.0, 1, lambda x: cos(2 * x) * _c(1) - sin(2 * x) * _c(2)),
        ("C2:C3", 2, 1.0, 3, lambda x: cos(2 * x) * _c(3) - sin(2 * x) * _c(1)),
        ("C5:C1", 5, 1.0, 1, lambda x: cos(x) * _c(1) + sin(x) * _c(6)),
        ("C5:C2", 5, 1.0, 2, lambda x: cos(x) * _c(2) + sin(x) * _c(7)),
        ("C5:C3", 5, 1.0, 3, lambda x: 0.25 * (3 + cos(2 * x)) * _c(3) - 0.5 * sin(2 * x) * _c(4)
         - s3 / 2 * sin(x) ** 2 * _c(8)),
        ("C5:C8", 5, 1.0, 8, lambda x: 0.25 * (1 + 3 * cos(2 * x)) * _c(8) - s3 / 2 * sin(2 * x) * _c(4)
         - s3 / 2 * sin(x) ** 2 * _c(3)),
        ("C9:C4", 9, s3, 4, lambda x: cos(x) ** 3 * _c(4) - sin(x) ** 3 * _c(7)
         + s3 * cos(x) * sin(x) ** 2 * _c(11) - s3 * sin(x) * cos(x) ** 2 * _c(14)),
        ("C9:C5", 9, s3, 5, lambda x: cos(x) ** 3 * _c(5) + sin(x) ** 3 * _c(6)
         + s3 * cos(x) * sin(x) ** 2 * _c(12) + s3 * sin(x) * cos(x) ** 2 * _c(13)),
        ("C9:C6", 9, s3, 6, lambda x: cos(x) ** 3 * _c(6) - sin(x) ** 3 * _c(5)
         + s3 * cos(x) * sin(x) ** 2 * _c(13) - s3 * sin(x) * cos(x) ** 2 * _c(12)),
        ("C9:C7", 9, s3, 7, lambda x: cos(x) ** 3 * _c(7) + sin(x) ** 3 * _c(4)
         + s3 * cos(x) * sin(x) ** 2 * _c(14) + s3 * sin(x) * cos(x) ** 2 * _c(11)),
        ("C9:C8", 9, s3, 8, lambda x: cos(2 * x) * _c(8) + sin(2 * x) * _c(10)),
    ]


CONJUGATION_IDENTITIES = tuple(row[0] for row in _conjugation_table()) + ("C9:C1,C2,C3",)


def conjugation_residuals(grid=None, backend: Backend | str | None = None) -> dict[str, float]:
    """Max-norm error of each closed-form conjugation exp(-xC) C' exp(xC) on ``grid``.

    The thirteenth entry checks that exp(sqrt3 x C9) fixes C1, C2 and C3.
    """
    b = get_backend(backend)
    x = np.arange(20) * np.pi / 20 if grid is None else np.asarray(grid, dtype=float)
    out = {}
    for name, gen, scale, target, rhs in _conjugation_table():
        g = exp_generator(gen, scale * x, b)
        conj = np.swapaxes(g, -1, -2) @ b.generators[target - 1] @ g
        coords, res = project(conj, b)
        expected = np.array([rhs(xi) for xi in x])
        out[name] = max(float(np.abs(coords - expected).max()), res)
    g = exp_generator(9, SQRT3 * x, b)
    worst = 0.0
    for k in (1, 2, 3):
        conj = np.swapaxes(g, -1, -2) @ b.generators[k - 1] @ g
        worst = max(worst, float(np.abs(conj - b.generators[k - 1]).max()))
    out["C9:C1,C2,C3"] = worst
    return out


def metric_at(c, h: float = DEFAULT_STEP, backend: Backend | str | None = None) -> MetricTensor:
    """Bi-invariant metric in Euler coordinates (14 x 14)."""
    return numeric_current(c, h, backend).metric()


def base_metric_at(alpha) -> MetricTensor:
    """Induced metric on the base: Gram matrix of the C_9..C_14 current rows."""
    j = analytic_sigma_current(alpha).J[8:]
    return MetricTensor(j.T @ j)


def round_s6_metric_at(alpha) -> MetricTensor:
    """(3/4) [da6^2 + sin^2 a6 (da5^2 + cos^2 a5 da4^2 + sin^2 a5 (s1^2 + s2^2 + (s3 + da4/2)^2))]."""
    alpha = np.asarray(alpha, dtype=float)
    a5, a6 = alpha[4], alpha[5]
    s1, s2, s3 = _s_forms(alpha)
    d = np.eye(6)
    sq = np.outer
    s3h = s3 + 0.5 * d[3]
    brace = (sq(d[4], d[4]) + np.cos(a5) ** 2 * sq(d[3], d[3])
             + np.sin(a5) ** 2 * (sq(s1, s1) + sq(s2, s2) + sq(s3h, s3h)))
    return MetricTensor(0.75 * (sq(d[5], d[5]) + np.sin(a6) ** 2 * brace))


def s5_embed(alpha) -> np.ndarray:
    """Point (z1, z2, z3) of the unit five-sphere in C^3 from (alpha_1..alpha_5)."""
    a1, a2, a3, a4, a5 = np.asarray(alpha, dtype=float)[..., :5].T
    return np.stack([
        np.cos(a5) * np.exp(1j * a4),
        np.sin(a5) * np.cos(a2) * np.exp(1j * (a1 + a3 + a4 / 2)),
        np.sin(a5) * np.sin(a2) * np.exp(1j * (a1 - a3 - a4 / 2)),
    ], axis=-1)


def s5_pullback_metric(alpha, h: float = DEFAULT_STEP) -> np.ndarray:
    """|dz1|^2 + |dz2|^2 + |dz3|^2 pulled back to (alpha_1..alpha_5) by central differences."""
    a = np.asarray(alpha, dtype=float)[:5]
    steps = h * np.eye(5)
    jac = (s5_embed(a + steps) - s5_embed(a - steps)) / (2 * h)  # (5, 3)
    return np.real(jac.conj() @ jac.T)


def s5_brace_metric(alpha) -> np.ndarray:
    """The S^5 part of the round S^6 metric, restricted to (alpha_1..alpha_5)."""
    m = round_s6_metric_at(np.concatenate([np.asarray(alpha, dtype=float)[:5], [np.pi / 2]])).M
    return (4.0 / 3.0) * m[:5, :5]
