"""
g2 structure constants and matrix backends.

The algebra is fixed by its commutator table [C_I, C_J] = sum_K f[I,J,K] C_K
in an orthonormal basis C_1..C_14 whose first eight elements span su(3).
Indices in the public API are 1-based (C_1..C_14) to match the usual labels;
arrays are 0-based internally.

Two matrix realizations are provided:

- ``adjoint``: (ad C_I)_{K,J} = f[I,J,K]. Always available, 14x14.
- ``octonion7``: derivations of the octonions acting on the imaginary
  units, aligned to the table basis (see :mod:`g2haar.octonions`).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

DIM = 14
SU3_DIM = 8

_S3 = np.sqrt(3.0)
_T = 2.0 / _S3
_U = 1.0 / _S3

# Upper triangle of the commutator table, keyed by (I, J) with I < J
# (1-based). Missing pairs commute.
# [C_10, C_14] carries -C_5: with +C_5 the table fails the Jacobi identity
# (e.g. on C_1, C_10, C_11) and ad C_10 is no longer antisymmetric.
_TABLE = {
    (1, 2): {3: 2.0}, (1, 3): {2: -2.0}, (1, 4): {7: 1.0}, (1, 5): {6: 1.0},
    (1, 6): {5: -1.0}, (1, 7): {4: -1.0}, (1, 11): {14: 1.0}, (1, 12): {13: 1.0},
    (1, 13): {12: -1.0}, (1, 14): {11: -1.0},

    (2, 3): {1: 2.0}, (2, 4): {6: -1.0}, (2, 5): {7: 1.0}, (2, 6): {4: 1.0},
    (2, 7): {5: -1.0}, (2, 11): {13: -1.0}, (2, 12): {14: 1.0}, (2, 13): {11: 1.0},
    (2, 14): {12: -1.0},

    (3, 4): {5: 1.0}, (3, 5): {4: -1.0}, (3, 6): {7: 1.0}, (3, 7): {6: -1.0},
    (3, 11): {12: 1.0}, (3, 12): {11: -1.0}, (3, 13): {14: 1.0}, (3, 14): {13: -1.0},

    (4, 5): {3: 1.0, 8: _S3}, (4, 6): {2: -1.0}, (4, 7): {1: 1.0}, (4, 8): {5: -_S3},
    (4, 9): {14: -1.0}, (4, 10): {13: -1.0}, (4, 13): {10: 1.0}, (4, 14): {9: 1.0},

    (5, 6): {1: 1.0}, (5, 7): {2: 1.0}, (5, 8): {4: _S3}, (5, 9): {13: 1.0},
    (5, 10): {14: -1.0}, (5, 13): {9: -1.0}, (5, 14): {10: 1.0},

    (6, 7): {3: 1.0, 8: -_S3}, (6, 8): {7: _S3}, (6, 9): {12: -1.0}, (6, 10): {11: 1.0},
    (6, 11): {10: -1.0}, (6, 12): {9: 1.0},

    (7, 8): {6: -_S3}, (7, 9): {11: 1.0}, (7, 10): {12: 1.0}, (7, 11): {9: -1.0},
    (7, 12): {10: -1.0},

    (8, 9): {10: _T}, (8, 10): {9: -_T}, (8, 11): {12: -_U}, (8, 12): {11: _U},
    (8, 13): {14: _U}, (8, 14): {13: -_U},

    (9, 10): {8: _T}, (9, 11): {7: 1.0, 14: -_T}, (9, 12): {6: -1.0, 13: _T},
    (9, 13): {5: 1.0, 12: -_T}, (9, 14): {4: -1.0, 11: _T},

    (10, 11): {6: 1.0, 13: _T}, (10, 12): {7: 1.0, 14: _T},
    (10, 13): {4: -1.0, 11: -_T}, (10, 14): {5: -1.0, 12: -_T},

    (11, 12): {3: 1.0, 8: -_U}, (11, 13): {2: -1.0, 10: _T},
    (11, 14): {1: 1.0, 9: -_T},

    (12, 13): {1: 1.0, 9: _T}, (12, 14): {2: 1.0, 10: _T},

    (13, 14): {3: 1.0, 8: _U},
}

JACOBI_TOL = 1e-12
BACKEND_TOL = 1e-10


class StructureConstantsError(RuntimeError):
    """The commutator table failed its construction-time self-check."""


class BackendError(RuntimeError):
    """A matrix backend does not reproduce the commutator table."""


@dataclass(frozen=True)
class StructureConstants:
    """Dense table ``f[I, J, K]`` (0-based) with ``[C_I, C_J] = sum_K f[I,J,K] C_K``."""

    f: np.ndarray

    def entry(self, i: int, j: int, k: int) -> float:
        """1-based lookup of f_{ij}^k."""
        return float(self.f[i - 1, j - 1, k - 1])

    def jacobi_residual(self) -> float:
        return jacobi_residual(self.f)

    def antisymmetry_residual(self) -> float:
        return float(np.abs(self.f + self.f.transpose(1, 0, 2)).max())


def jacobi_residual(f: np.ndarray) -> float:
    """Max over (I,J,K,L) of the cyclic sum f_IJ^M f_MK^L + f_JK^M f_MI^L + f_KI^M f_MJ^L."""
    t = np.einsum("ijm,mkl->ijkl", f, f)
    cyc = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
    return float(np.abs(cyc).max())


def table_from_upper(upper: dict) -> np.ndarray:
    f = np.zeros((DIM, DIM, DIM))
    for (i, j), row in upper.items():
        for k, v in row.items():
            f[i - 1, j - 1, k - 1] = v
            f[j - 1, i - 1, k - 1] = -v
    return f


@functools.lru_cache(maxsize=None)
def build_structure_constants() -> StructureConstants:
    """Return the g2 structure constants, after checking the Jacobi identity."""
    f = table_from_upper(_TABLE)
    f.setflags(write=False)
    res = jacobi_residual(f)
    if res > JACOBI_TOL:
        raise StructureConstantsError(f"Jacobi residual {res:.3e} exceeds {JACOBI_TOL:g}")
    return StructureConstants(f)


@dataclass(frozen=True)
class ExpData:
    """Closed form of exp(t C) for an antisymmetric C.

    exp(tC) = P0 + sum_w cos(w t) A_w + sin(w t) B_w over the distinct positive
    frequencies w of C.
    """

    p0: np.ndarray
    freqs: np.ndarray
    cos_parts: np.ndarray
    sin_parts: np.ndarray


def spectral_exp_data(c: np.ndarray, tol: float = 1e-9) -> ExpData:
    # iC is Hermitian: iC = V diag(lam) V^H, so exp(tC) = sum_j exp(-i lam_j t) v_j v_j^H.
    lam, v = np.linalg.eigh(1j * c)
    n = c.shape[0]
    p0 = np.zeros((n, n))
    freqs, cos_parts, sin_parts = [], [], []
    used = np.zeros(len(lam), dtype=bool)
    for idx in np.argsort(lam):
        if used[idx]:
            continue
        group = np.abs(lam - lam[idx]) < tol
        used |= group
        proj = v[:, group] @ v[:, group].conj().T
        w = float(lam[group].mean())
        if abs(w) < tol:
            p0 += proj.real
        elif w > 0:
            # Pair with the conjugate projector at -w: 2 Re(exp(-i w t) P).
            freqs.append(w)
            cos_parts.append(2.0 * proj.real)
            sin_parts.append(2.0 * proj.imag)
    return ExpData(
        p0=p0,
        freqs=np.array(freqs),
        cos_parts=np.array(cos_parts).reshape(len(freqs), n, n),
        sin_parts=np.array(sin_parts).reshape(len(freqs), n, n),
    )


@dataclass(frozen=True)
class Backend:
    """A faithful real matrix realization of g2.

    Attributes:
        kind: ``"adjoint"`` or ``"octonion7"``.
        dim: matrix size (14 or 7).
        generators: array (14, dim, dim) of antisymmetric matrices C_I.
        kappa: trace normalization, ``-trace(C_I C_J) / kappa = delta_IJ``.
    """

    kind: str
    dim: int
    generators: np.ndarray
    kappa: float
    _exp: tuple = field(default=(), repr=False, compare=False)

    def exp_data(self, i: int) -> ExpData:
        return self._exp[i - 1]

    def matrix(self, coords) -> np.ndarray:
        """sum_I coords_I C_I; ``coords`` may carry leading batch axes."""
        return np.tensordot(np.asarray(coords, dtype=float), self.generators, axes=([-1], [0]))

    def gram(self) -> np.ndarray:
        return -np.einsum("aij,bji->ab", self.generators, self.generators) / self.kappa

    def commutator_residual(self, f: np.ndarray | None = None) -> tuple[float, tuple[int, int]]:
        """Max-norm residual of [C_I, C_J] - sum_K f_IJ^K C_K and the worst 1-based (I, J)."""
        if f is None:
            f = build_structure_constants().f
        g = self.generators
        com = np.einsum("aij,bjk->abik", g, g) - np.einsum("bij,ajk->abik", g, g)
        rhs = np.einsum("abk,kij->abij", f, g)
        err = np.abs(com - rhs).max(axis=(2, 3))
        a, b = np.unravel_index(int(np.argmax(err)), err.shape)
        return float(err[a, b]), (int(a) + 1, int(b) + 1)


def _make_backend(kind: str, generators: np.ndarray, kappa: float, tol: float) -> Backend:
    generators = np.ascontiguousarray(generators, dtype=float)
    asym = float(np.abs(generators + generators.transpose(0, 2, 1)).max())
    if asym > tol:
        raise BackendError(f"{kind}: generators not antisymmetric (residual {asym:.3e})")
    exp = tuple(spectral_exp_data(c) for c in generators)
    backend = Backend(kind, generators.shape[1], generators, kappa, exp)
    res, pair = backend.commutator_residual()
    if res > tol:
        raise BackendError(f"{kind}: commutator residual {res:.3e} at (I, J) = {pair}")
    gram_res = float(np.abs(backend.gram() - np.eye(DIM)).max())
    if gram_res > tol:
        raise BackendError(f"{kind}: Gram matrix deviates from identity by {gram_res:.3e}")
    generators.setflags(write=False)
    return backend


def adjoint_kappa(f: np.ndarray) -> float:
    """Measured -trace(ad C_1 ad C_1) (the Gram matrix is checked to be proportional to 1)."""
    ad = f.transpose(0, 2, 1)
    return float(-np.einsum("ij,ji->", ad[0], ad[0]))


@functools.lru_cache(maxsize=None)
def build_backend(kind: str = "adjoint") -> Backend:
    """Build (and cache) the matrix backend ``kind``.

    Raises:
        ValueError: unknown kind.
        BackendError: the constructed matrices miss a backend invariant.
    """
    f = build_structure_constants().f
    if kind == "adjoint":
        # (ad_I)_{K,J} = f_IJ^K
        gens = f.transpose(0, 2, 1)
        return _make_backend(kind, gens, adjoint_kappa(f), BACKEND_TOL)
    if kind == "octonion7":
        from g2haar.octonions import aligned_derivation_generators

        return _make_backend(kind, aligned_derivation_generators(f), 4.0, BACKEND_TOL)
    raise ValueError(f"unknown backend {kind!r}; expected 'adjoint' or 'octonion7'")


BACKENDS = ("adjoint", "octonion7")


def get_backend(backend: Backend | str | None = None) -> Backend:
    if isinstance(backend, Backend):
        return backend
    return build_backend(backend or "adjoint")


@dataclass(frozen=True)
class AlgebraElement:
    """A g2 vector given by its 14 coordinates along C_1..C_14."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.shape != (DIM,):
            raise ValueError(f"expected 14 coordinates, got shape {c.shape}")
        object.__setattr__(self, "coords", c)

    @classmethod
    def basis(cls, i: int) -> "AlgebraElement":
        """Unit vector e_i (1-based)."""
        c = np.zeros(DIM)
        c[i - 1] = 1.0
        return cls(c)

    def matrix(self, backend: Backend | str | None = None) -> np.ndarray:
        return get_backend(backend).matrix(self.coords)

    def __add__(self, other):
        return AlgebraElement(self.coords + other.coords)

    def __sub__(self, other):
        return AlgebraElement(self.coords - other.coords)

    def __mul__(self, scalar):
        return AlgebraElement(self.coords * scalar)

    __rmul__ = __mul__


def _coords(x) -> np.ndarray:
    return x.coords if isinstance(x, AlgebraElement) else np.asarray(x, dtype=float)


def bracket(x, y) -> AlgebraElement:
    """Lie bracket computed from the table: coords_K = sum_IJ x_I y_J f_IJ^K."""
    f = build_structure_constants().f
    return AlgebraElement(np.einsum("i,j,ijk->k", _coords(x), _coords(y), f))


def project(m: np.ndarray, backend: Backend | str | None = None) -> tuple[np.ndarray, float]:
    """Coordinates of a matrix along the orthonormal generators.

    Returns ``(coords, residual)`` where ``residual`` is the max-norm of
    ``m - sum_I coords_I C_I``; a residual above round-off means ``m`` has a
    component outside the algebra. ``m`` may carry leading batch axes, in
    which case the residual is the max over the batch.
    """
    b = get_backend(backend)
    m = np.asarray(m, dtype=float)
    coords = -np.einsum("akj,...jk->...a", b.generators, m) / b.kappa
    residual = float(np.abs(m - b.matrix(coords)).max()) if m.size else 0.0
    return coords, residual
