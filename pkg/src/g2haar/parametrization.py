"""
Euler-type coordinates on G2 viewed as an SU(3) bundle over S^6.

A group element is the ordered product

    g = Sigma(alpha_1..alpha_6) . SU3(gamma_1..gamma_8)

of one-parameter subgroups exp(t C_I). All maps accept a leading batch axis
on the coordinates and return stacks of matrices, which is what the Monte
Carlo integrator relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from g2haar.algebra import Backend, get_backend, project

SQRT3 = np.sqrt(3.0)
PI = np.pi

ALPHA_RANGES = ((0.0, PI), (0.0, PI / 2), (0.0, 2 * PI), (0.0, 2 * PI), (0.0, PI / 2), (0.0, PI))
GAMMA_RANGES = ((0.0, 2 * PI), (0.0, PI / 2), (0.0, PI), (0.0, PI / 2),
                (0.0, 2 * PI), (0.0, PI), (0.0, PI / 2), (0.0, PI))

COORDINATE_NAMES = tuple(f"alpha{i}" for i in range(1, 7)) + tuple(f"gamma{i}" for i in range(1, 9))

# (generator index, coefficient) per factor, in product order.
SIGMA_FACTORS = ((3, 1.0), (2, 1.0), (3, 1.0), (8, SQRT3 / 2), (5, 1.0), (9, SQRT3 / 2))
SU3_FACTORS = ((3, 1.0), (2, 1.0), (3, 1.0), (5, 1.0), (8, SQRT3), (3, 1.0), (2, 1.0), (3, 1.0))
G2_FACTORS = SIGMA_FACTORS + SU3_FACTORS


def parameter_ranges() -> dict[str, tuple[float, float]]:
    """The closed interval covered by each of the 14 coordinates."""
    return dict(zip(COORDINATE_NAMES, ALPHA_RANGES + GAMMA_RANGES))


def range_arrays() -> tuple[np.ndarray, np.ndarray]:
    lo, hi = np.array(ALPHA_RANGES + GAMMA_RANGES).T
    return lo, hi


@dataclass(frozen=True)
class EulerCoordinatesG2:
    """Coordinates (alpha_1..alpha_6; gamma_1..gamma_8), in radians."""

    alpha: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=float)
        g = np.asarray(self.gamma, dtype=float)
        if a.shape != (6,) or g.shape != (8,):
            raise ValueError(f"expected 6 alphas and 8 gammas, got {a.shape} and {g.shape}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "gamma", g)

    @classmethod
    def from_array(cls, x) -> "EulerCoordinatesG2":
        x = np.asarray(x, dtype=float)
        return cls(x[:6], x[6:])

    @classmethod
    def zeros(cls) -> "EulerCoordinatesG2":
        return cls(np.zeros(6), np.zeros(8))

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.alpha, self.gamma])

    def in_range(self) -> bool:
        return bool(in_range(self.as_array()))


def in_range(x) -> np.ndarray:
    """Elementwise over a batch of (..., 14) coordinate rows."""
    lo, hi = range_arrays()
    x = np.asarray(x, dtype=float)
    return np.all((x >= lo) & (x <= hi), axis=-1)


def _as_coords(c) -> np.ndarray:
    if isinstance(c, EulerCoordinatesG2):
        return c.as_array()
    return np.asarray(c, dtype=float)


def exp_generator(i: int, t, backend: Backend | str | None = None) -> np.ndarray:
    """exp(t C_i) for scalar or array ``t``; output shape ``t.shape + (dim, dim)``.

    Uses the spectral decomposition of the antisymmetric generator, so the
    result is orthogonal to round-off for any ``t``.
    """
    b = get_backend(backend)
    data = b.exp_data(i)
    t = np.asarray(t, dtype=float)
    wt = np.multiply.outer(t, data.freqs)
    return (data.p0
            + np.tensordot(np.cos(wt), data.cos_parts, axes=([-1], [0]))
            + np.tensordot(np.sin(wt), data.sin_parts, axes=([-1], [0])))


def _product(factors, x: np.ndarray, backend) -> np.ndarray:
    b = get_backend(backend)
    out = None
    for k, (gen, coef) in enumerate(factors):
        e = exp_generator(gen, coef * x[..., k], b)
        out = e if out is None else out @ e
    return out


def sigma(alpha, backend: Backend | str | None = None) -> np.ndarray:
    """Coset representative exp(a1 C3) exp(a2 C2) exp(a3 C3) exp(sqrt3/2 a4 C8) exp(a5 C5) exp(sqrt3/2 a6 C9)."""
    return _product(SIGMA_FACTORS, np.asarray(alpha, dtype=float), backend)


def su3_element(gamma, backend: Backend | str | None = None) -> np.ndarray:
    """SU(3) Euler product, with the sqrt(3) weight on the gamma_5 (C_8) factor."""
    return _product(SU3_FACTORS, np.asarray(gamma, dtype=float), backend)


def g2_element(c, backend: Backend | str | None = None) -> np.ndarray:
    """sigma(alpha) @ su3_element(gamma). Accepts EulerCoordinatesG2 or (..., 14) arrays."""
    return _product(G2_FACTORS, _as_coords(c), backend)


def group_element_residuals(m: np.ndarray, backend: Backend | str | None = None) -> dict[str, float]:
    """Orthogonality, determinant and algebra-normalization residuals of ``m``."""
    b = get_backend(backend)
    m = np.asarray(m, dtype=float)
    eye = np.eye(b.dim)
    conj = np.einsum("...ij,ajk,...lk->...ail", m, b.generators, m)
    _, closure = project(conj, b)
    return {
        "orthogonality": float(np.abs(np.swapaxes(m, -1, -2) @ m - eye).max()),
        "determinant": float(np.abs(np.linalg.det(m) - 1.0).max()),
        "algebra": closure,
    }
