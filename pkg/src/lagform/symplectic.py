"""Symplectic linear algebra: Sp action on forms, polar decomposition,
compatible complex structures, (p, q)-types and the Siegel dictionary.

Linear maps are plain (2n, 2n) real arrays acting on column vectors in the
x_1..x_n, y_1..y_n coordinates.  Forms are pulled back, so the action is a
right action: group_act(g @ h, a) == group_act(h, group_act(g, a)).
"""

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np
from scipy.linalg import expm
from scipy.stats import unitary_group

from lagform.exterior import (
    ExteriorForm,
    basis,
    basis_index,
    basis_rows,
    eval_on_frames,
    one_form,
    top_coefficient,
    wedge,
    wedge_all,
)


def omega_matrix(n):
    """Gram matrix of omega: omega(u, v) = u^T W v."""
    z = np.zeros((n, n))
    i = np.eye(n)
    return np.block([[z, i], [-i, z]])


def standard_j(n):
    """The standard complex structure: d/dx_i -> d/dy_i."""
    z = np.zeros((n, n))
    i = np.eye(n)
    return np.block([[z, -i], [i, z]])


def half_dim(mat):
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] % 2:
        raise ValueError(f"expected an even square matrix, got shape {mat.shape}")
    return mat.shape[0] // 2


@dataclass(frozen=True)
class ComplexStructureData:
    """A linear complex structure J on R^{2n} (J^2 = -I)."""

    J: np.ndarray
    tol: float = 1e-8

    def __post_init__(self):
        J = np.array(self.J, dtype=float)
        half_dim(J)
        res = np.abs(J @ J + np.eye(J.shape[0])).max()
        if res > self.tol * max(1.0, np.abs(J).max() ** 2):
            raise ValueError(f"J^2 + I residual {res:.3g} too large")
        J.setflags(write=False)
        object.__setattr__(self, "J", J)

    @property
    def n(self):
        return self.J.shape[0] // 2

    def metric(self):
        """g(v, w) = omega(v, J w) as a matrix (symmetric iff J preserves omega)."""
        return omega_matrix(self.n) @ self.J

    def invariance_residual(self):
        W = omega_matrix(self.n)
        return float(np.abs(self.J.T @ W @ self.J - W).max())

    def compatibility_margin(self):
        """Smallest eigenvalue of the symmetrised omega(., J .)."""
        g = self.metric()
        return float(np.linalg.eigvalsh(0.5 * (g + g.T))[0])

    def is_compatible(self, tol=1e-10):
        scale = max(1.0, np.abs(self.J).max() ** 2)
        return self.invariance_residual() < 1e-8 * scale and self.compatibility_margin() > tol


@dataclass(frozen=True)
class SiegelPoint:
    """Z = X + iY with X, Y real symmetric and Y positive definite."""

    X: np.ndarray
    Y: np.ndarray
    tol: float = 1e-10

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        Y = np.array(self.Y, dtype=float)
        if X.shape != Y.shape or X.ndim != 2 or X.shape[0] != X.shape[1]:
            raise ValueError("X and Y must be square matrices of the same size")
        if np.abs(X - X.T).max() > self.tol or np.abs(Y - Y.T).max() > self.tol:
            raise ValueError("X and Y must be symmetric")
        if np.linalg.eigvalsh(Y)[0] <= 0:
            raise ValueError("Y must be positive definite")
        for arr in (X, Y):
            arr.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @classmethod
    def from_complex(cls, Z):
        Z = np.asarray(Z, dtype=complex)
        return cls(Z.real, Z.imag)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def Z(self):
        return self.X + 1j * self.Y


# ---------------------------------------------------------------------------
# group action


def group_act(g, a):
    """Pullback g^* a: (g^* a)(v_1, ..) = a(g v_1, ..)."""
    g = np.asarray(g, dtype=float)
    n = half_dim(g)
    if n != a.n:
        raise ValueError(f"map acts on R^{2 * n}, form lives on R^{2 * a.n}")
    if abs(np.linalg.det(g)) < 1e-300 or np.linalg.cond(g) > 1e14:
        raise ValueError("group_act needs an invertible map")
    if a.k == 0:
        return a
    rows = basis_rows(n, a.k)
    frames = np.ascontiguousarray(np.transpose(g[:, rows], (1, 0, 2)))
    return ExteriorForm(n, a.k, eval_on_frames(a, frames))


def is_symplectic(g, tol=1e-10):
    """(verdict, residual) for g^T W g == W."""
    g = np.asarray(g, dtype=float)
    W = omega_matrix(half_dim(g))
    res = float(np.abs(g.T @ W @ g - W).max())
    return res < tol * max(1.0, np.abs(g).max() ** 2), res


def unitary_to_real(u):
    """Real 2n x 2n image [[A, -B], [B, A]] of a complex unitary A + iB."""
    a, b = u.real, u.imag
    return np.block([[a, -b], [b, a]])


def real_to_unitary(m):
    n = half_dim(m)
    return m[:n, :n] + 1j * m[n:, :n]


@lru_cache(maxsize=None)
def p_basis(n):
    """Orthonormal basis of symmetric matrices in sp(2n): [[P, Q], [Q, -P]]."""
    mats = []
    for i in range(n):
        for j in range(i, n):
            s = np.zeros((n, n))
            s[i, j] = s[j, i] = 1.0
            z = np.zeros((n, n))
            for blk in (np.block([[s, z], [z, -s]]), np.block([[z, s], [s, z]])):
                mats.append(blk / np.linalg.norm(blk))
    out = np.array(mats)
    out.setflags(write=False)
    return out


def random_unitary_real(n, rng):
    return unitary_to_real(unitary_group.rvs(n, random_state=rng) if n > 1 else
                           np.array([[np.exp(2j * np.pi * rng.random())]]))


def random_p(n, rng, scale=0.5):
    coeffs = rng.normal(size=len(p_basis(n))) * scale
    return np.tensordot(coeffs, p_basis(n), axes=1)


def random_symplectic(n, rng, scale=0.5):
    """u @ expm(X): Haar-random unitary part, Gaussian symmetric part."""
    return random_unitary_real(n, rng) @ expm(random_p(n, rng, scale))


def polar_cartan_decompose(g, require_symplectic=True, tol=1e-8):
    """g = u @ expm(X) with u orthogonal (unitary if g is symplectic), X symmetric."""
    g = np.asarray(g, dtype=float)
    if require_symplectic:
        ok, res = is_symplectic(g, tol)
        if not ok:
            raise ValueError(f"polar_cartan_decompose: not symplectic (residual {res:.3g})")
    w, v = np.linalg.eigh(g.T @ g)
    if w[0] <= 0:
        raise ValueError("polar_cartan_decompose: singular input")
    X = 0.5 * (v * np.log(w)) @ v.T
    X = 0.5 * (X + X.T)
    u = g @ ((v / np.sqrt(w)) @ v.T)
    return u, X


# ---------------------------------------------------------------------------
# complex structures and types


def as_complex_structure(J):
    if isinstance(J, ComplexStructureData):
        return J
    return ComplexStructureData(np.asarray(J, dtype=float))


def rotation(J, theta):
    """exp(theta J) = cos(theta) I + sin(theta) J."""
    J = as_complex_structure(J).J
    return np.cos(theta) * np.eye(J.shape[0]) + np.sin(theta) * J


def type_decompose(a, J=None):
    """Split a k-form into (p, q) components for a compatible J.

    Returns {(p, q): form} ordered from (k, 0) to (0, k).  The pullback by
    exp(theta J) multiplies the (p, q) part by exp(i (p - q) theta); sampling
    k + 1 angles and inverting the discrete Fourier transform isolates them.
    """
    cs = as_complex_structure(standard_j(a.n) if J is None else J)
    if cs.n != a.n:
        raise ValueError("complex structure and form dimensions differ")
    if not cs.is_compatible():
        raise ValueError("type_decompose needs a compatible complex structure")
    k = a.k
    m = k + 1
    thetas = np.pi * np.arange(m) / m
    samples = np.array([group_act(rotation(cs, t), a).vec * np.exp(1j * k * t) for t in thetas])
    parts = {}
    for p in range(k, -1, -1):
        zeta = np.exp(-2j * np.pi * p * np.arange(m) / m)
        parts[(p, k - p)] = ExteriorForm(a.n, k, zeta @ samples / m)
    return parts


def type_component(a, p, J=None):
    return type_decompose(a, J)[(p, a.k - p)]


# ---------------------------------------------------------------------------
# Siegel space


def siegel_complex_structure(Z):
    """J' = [[-X Y^-1, -Y - X Y^-1 X], [Y^-1, Y^-1 X]] for Z = X + iY."""
    if not isinstance(Z, SiegelPoint):
        Z = SiegelPoint.from_complex(Z)
    X, Y = Z.X, Z.Y
    Yi = np.linalg.inv(Y)
    J = np.block([[-X @ Yi, -Y - X @ Yi @ X], [Yi, Yi @ X]])
    return ComplexStructureData(J)


def siegel_form(Z):
    """wedge_j (dx_j + sum_k Z_jk dy_k); of type (n, 0) for siegel_complex_structure(Z).

    On an integer frame (M over N) it evaluates to det(M + Z N).
    """
    if not isinstance(Z, SiegelPoint):
        Z = SiegelPoint.from_complex(Z)
    n = Z.n
    rows = []
    for j in range(n):
        row = np.zeros(2 * n, dtype=complex)
        row[j] = 1.0
        row[n:] = Z.Z[j]
        rows.append(one_form(n, row))
    return wedge_all(rows)


def random_siegel_point(n, rng, spread=0.5):
    """X with entries in [-1/2, 1/2], Y = expm(symmetric Gaussian * spread)."""
    A = rng.uniform(-0.5, 0.5, size=(n, n))
    X = 0.5 * (A + A.T)
    B = rng.normal(size=(n, n)) * spread
    Y = expm(0.5 * (B + B.T))
    return SiegelPoint(X, 0.5 * (Y + Y.T))


# ---------------------------------------------------------------------------
# pairings


def hermitian_pairing(a, b):
    """<a, b> = top_coefficient(conj(a) ^ b).

    Sesquilinear; <b, a> = (-1)^n conj(<a, b>), so the value <a, a> is real
    for even n and imaginary for odd n.
    """
    if a.n != b.n or a.k != a.n or b.k != b.n:
        raise ValueError("hermitian_pairing needs two middle-degree forms on the same space")
    return top_coefficient(wedge(a.conj(), b))


# ---------------------------------------------------------------------------
# derivations


@lru_cache(maxsize=None)
def _derivation_table(n, k):
    # e^i ^ iota_{e_j} on degree k: replace index j by i in a basis tuple
    idx = basis_index(n, k)
    src, dst, jj, ii, sg = [], [], [], [], []
    for a, tup in enumerate(basis(n, k)):
        for pos, j in enumerate(tup):
            rest = tup[:pos] + tup[pos + 1:]
            for i in range(2 * n):
                if i in rest:
                    continue
                new = tuple(sorted(rest + (i,)))
                # moving i into slot pos then sorting
                lst = list(tup)
                lst[pos] = i
                inv = sum(1 for x in range(k) for y in range(x + 1, k) if lst[x] > lst[y])
                src.append(a)
                dst.append(idx[new])
                jj.append(j)
                ii.append(i)
                sg.append(-1.0 if inv % 2 else 1.0)
    return tuple(np.array(x) for x in (src, dst, jj, ii, sg))


def derivation(X, a):
    """d/dt (expm(t X))^* a at t = 0."""
    X = np.asarray(X, dtype=float)
    n, k = a.n, a.k
    src, dst, jj, ii, sg = _derivation_table(n, k)
    out = np.zeros(comb(2 * n, k), dtype=complex)
    np.add.at(out, dst, sg * X[jj, ii] * a.vec[src])
    return ExteriorForm(n, k, out)
