"""
Octonion multiplication and the 7-dimensional g2 backend.

The derivation algebra of the octonions is computed as the null space of the
Leibniz constraints inside so(7). Its basis is then rotated onto the
commutator-table basis by matching Cartan subalgebras and root planes, and
solving the leftover plane rotations by least squares.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import least_squares

# Fano-plane triples (i, j, k): e_i e_j = e_k, cyclically.
FANO_TRIPLES = ((1, 2, 3), (1, 4, 5), (1, 7, 6), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 6, 5))

ALIGN_TOL = 1e-10
_ALIGN_STARTS = 16


def multiplication_table() -> np.ndarray:
    """Structure tensor ``m[i, j, k]`` of the octonions; index 0 is the real unit."""
    m = np.zeros((8, 8, 8))
    m[0, 0, 0] = 1.0
    for i in range(1, 8):
        m[0, i, i] = m[i, 0, i] = 1.0
        m[i, i, 0] = -1.0
    for a, b, c in FANO_TRIPLES:
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            m[x, y, z] = 1.0
            m[y, x, z] = -1.0
    return m


def multiply(x, y) -> np.ndarray:
    """Product of two octonions given as length-8 real vectors."""
    return np.einsum("i,j,ijk->k", x, y, multiplication_table())


def _so7_basis() -> list[np.ndarray]:
    basis = []
    for i in range(7):
        for j in range(i + 1, 7):
            a = np.zeros((7, 7))
            a[i, j], a[j, i] = -1.0, 1.0
            basis.append(a)
    return basis


def derivation_basis() -> np.ndarray:
    """Orthonormal basis (14, 7, 7) of Der(O) on Im(O), with -trace(D_a D_b)/4 = delta_ab."""
    m = multiplication_table()
    so7 = _so7_basis()
    rows = []
    for a in so7:
        d = np.zeros((8, 8))
        d[1:, 1:] = a
        # D(xy) - D(x) y - x D(y) on basis pairs
        t = (np.einsum("kl,ijl->ijk", d, m)
             - np.einsum("li,ljk->ijk", d, m)
             - np.einsum("lj,ilk->ijk", d, m))
        rows.append(t.ravel())
    ns = null_space(np.array(rows).T)
    if ns.shape[1] != 14:
        raise RuntimeError(f"derivation algebra has dimension {ns.shape[1]}, expected 14")
    gens = np.einsum("ak,aij->kij", ns, np.array(so7))
    gram = -np.einsum("aij,bji->ab", gens, gens) / 4.0
    w, v = np.linalg.eigh(gram)
    return np.einsum("ab,bij->aij", (v / np.sqrt(w)).T, gens)


def structure_constants_of(gens: np.ndarray, kappa: float) -> np.ndarray:
    com = np.einsum("aij,bjk->abik", gens, gens) - np.einsum("bij,ajk->abik", gens, gens)
    return -np.einsum("abik,cki->abc", com, gens) / kappa


def _ad(f, h):
    # (ad h)_{K,J} = sum_I h_I f_IJ^K
    return np.einsum("i,ijk->kj", h, f)


def _root_planes(f, h0):
    """Orthonormal (u, v) per root plane with ad(h0) v = lam u, lam > 0."""
    w, vecs = np.linalg.eig(_ad(f, h0))
    planes = []
    for idx in np.argsort(-w.imag)[:6]:
        z = vecs[:, idx]
        u, v = z.real, z.imag
        planes.append((u / np.linalg.norm(u), v / np.linalg.norm(v)))
    return planes


def _roots(f, cartan, planes):
    """Root functionals alpha_k on the Cartan basis: ad(h) v_k = alpha_k(h) u_k."""
    return np.array([[u @ _ad(f, cartan[:, c]) @ v for c in range(cartan.shape[1])]
                     for u, v in planes])


def _match_cartans(rt, rd):
    """Orthogonal map S (Cartan coords -> Cartan coords) carrying roots rd onto +-rt."""
    long_root = rt[np.argmax(np.linalg.norm(rt, axis=1))]
    n = long_root / np.linalg.norm(long_root)
    flip = 2.0 * np.outer(n, n) - np.eye(2)
    for cand in np.concatenate([rd, -rd]):
        if abs(np.linalg.norm(cand) - np.linalg.norm(long_root)) > 1e-8:
            continue
        ang = np.arctan2(long_root[1], long_root[0]) - np.arctan2(cand[1], cand[0])
        rot = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
        for st in (rot, flip @ rot):
            mapped = rd @ st.T
            perm, signs = [], []
            for r in rt:
                plus = np.linalg.norm(mapped - r, axis=1)
                minus = np.linalg.norm(mapped + r, axis=1)
                if plus.min() < 1e-8:
                    perm.append(int(plus.argmin()))
                    signs.append(1.0)
                elif minus.min() < 1e-8:
                    perm.append(int(minus.argmin()))
                    signs.append(-1.0)
                else:
                    break
            else:
                return st.T, perm, signs
    raise RuntimeError("root systems could not be matched")


def _iso_residual(t, f, g):
    iu = np.triu_indices(14, 1)
    lhs = np.einsum("kc,abc->abk", t, f)
    rhs = np.einsum("ia,jb,ijk->abk", t, t, g)
    gram = t.T @ t - np.eye(14)
    return np.concatenate([(lhs - rhs)[iu].ravel(), gram[iu], np.diag(gram)])


def align_to_table(f: np.ndarray, g: np.ndarray, seed: int = 0) -> np.ndarray:
    """Orthogonal T with T[x, y]_f = [Tx, Ty]_g, i.e. a Lie algebra isomorphism.

    Cartan subalgebras and root planes are matched first; the remaining
    unknowns are one rotation angle per root plane.
    """
    cart_f = np.zeros((14, 2))
    cart_f[2, 0] = cart_f[7, 1] = 1.0  # span(C_3, C_8)
    h0 = cart_f @ np.array([1.0, 0.3718])
    planes_f = _root_planes(f, h0)
    roots_f = _roots(f, cart_f, planes_f)

    generic = np.random.default_rng(seed).normal(size=14)
    cart_g = null_space(_ad(g, generic))
    planes_g = _root_planes(g, cart_g @ np.array([1.0, 0.3718]))
    roots_g = _roots(g, cart_g, planes_g)

    s, perm, signs = _match_cartans(roots_f, roots_g)
    src = np.column_stack([cart_f] + [np.column_stack(p) for p in planes_f])
    src_inv = np.linalg.inv(src)

    def build(angles):
        cols = [cart_g @ s[:, 0], cart_g @ s[:, 1]]
        for k, th in enumerate(angles):
            u2, v2 = planes_g[perm[k]]
            c, sn = np.cos(th), np.sin(th)
            cols += [c * u2 + sn * v2, signs[k] * (c * v2 - sn * u2)]
        return np.column_stack(cols) @ src_inv

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(_ALIGN_STARTS):
        sol = least_squares(lambda a: _iso_residual(build(a), f, g),
                            rng.uniform(0.0, 2 * np.pi, 6), method="lm")
        t = build(sol.x)
        polished = least_squares(lambda x: _iso_residual(x.reshape(14, 14), f, g),
                                 t.ravel(), method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
        t = polished.x.reshape(14, 14)
        err = np.abs(_iso_residual(t, f, g)).max()
        if best is None or err < best[0]:
            best = (err, t)
        if err <= ALIGN_TOL * 1e-2:
            break
    return best[1]


def aligned_derivation_generators(f: np.ndarray) -> np.ndarray:
    """7x7 generators C_I satisfying the commutator table ``f`` with -trace(C_I C_J) = 4 delta_IJ."""
    d = derivation_basis()
    g = structure_constants_of(d, 4.0)
    t = align_to_table(f, g)
    # image of C_I is sum_a T[a, I] D_a
    return np.einsum("ai,ajk->ijk", t, d)
