"""Exterior algebra on R^{2n} with complex coefficients.

Coordinates are ordered x_1..x_n, y_1..y_n; public index tuples are 1-based,
so index i <= n means dx_i and index n + i means dy_i.  Basis k-tuples are
kept in lexicographic order.  The standard symplectic form is
omega = sum_i dx_i ^ dy_i.
"""

from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from lagform import kernels


@lru_cache(maxsize=None)
def basis(n, k):
    """Sorted 0-based index tuples spanning degree k on R^{2n}."""
    return tuple(combinations(range(2 * n), k))


@lru_cache(maxsize=None)
def basis_rows(n, k):
    rows = np.array(basis(n, k), dtype=np.int64).reshape(-1, k)
    rows.setflags(write=False)
    return rows


@lru_cache(maxsize=None)
def basis_index(n, k):
    return {t: i for i, t in enumerate(basis(n, k))}


def _merge_sign(first, second):
    """Sign of the shuffle sorting first + second (both sorted, disjoint)."""
    inv = 0
    for a in first:
        for b in second:
            if a > b:
                inv += 1
    return -1.0 if inv % 2 else 1.0


class _Graded:
    """Shared storage for forms and multivectors: a dense coefficient vector."""

    __slots__ = ("n", "k", "vec")

    def __init__(self, n, k, coeffs=None):
        n = int(n)
        k = int(k)
        if n < 1:
            raise ValueError(f"half dimension must be positive, got {n}")
        if not 0 <= k <= 2 * n:
            raise ValueError(f"degree {k} outside 0..{2 * n}")
        size = comb(2 * n, k)
        if coeffs is None:
            vec = np.zeros(size, dtype=complex)
        elif isinstance(coeffs, np.ndarray):
            vec = np.array(coeffs, dtype=complex).reshape(-1)
            if vec.shape[0] != size:
                raise ValueError(f"expected {size} coefficients, got {vec.shape[0]}")
        else:
            vec = np.zeros(size, dtype=complex)
            index = basis_index(n, k)
            for key, val in dict(coeffs).items():
                key = tuple(int(i) for i in key)
                if len(key) != k:
                    raise ValueError(f"index tuple {key} does not have length {k}")
                if any(b <= a for a, b in zip(key, key[1:])):
                    raise ValueError(f"index tuple {key} is not strictly increasing")
                if key and (key[0] < 1 or key[-1] > 2 * n):
                    raise ValueError(f"index tuple {key} outside 1..{2 * n}")
                vec[index[tuple(i - 1 for i in key)]] = complex(val)
        vec.setflags(write=False)
        self.n = n
        self.k = k
        self.vec = vec

    @property
    def coeffs(self):
        """Mapping from 1-based index tuples to nonzero coefficients."""
        return {
            tuple(i + 1 for i in t): complex(c)
            for t, c in zip(basis(self.n, self.k), self.vec)
            if c != 0
        }

    def _new(self, vec):
        return type(self)(self.n, self.k, vec)

    def _check_same(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.n != self.n or other.k != self.k:
            raise ValueError("half dimension or degree mismatch")

    def __add__(self, other):
        self._check_same(other)
        return self._new(self.vec + other.vec)

    def __sub__(self, other):
        self._check_same(other)
        return self._new(self.vec - other.vec)

    def __neg__(self):
        return self._new(-self.vec)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return self._new(self.vec * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self._new(self.vec / scalar)

    def conj(self):
        return self._new(self.vec.conj())

    @property
    def real(self):
        return self._new(self.vec.real)

    @property
    def imag(self):
        return self._new(self.vec.imag)

    def norm(self):
        """Euclidean norm of the coefficient vector (the U(n)-invariant norm)."""
        return float(np.linalg.norm(self.vec))

    def is_zero(self, tol=0.0):
        return self.norm() <= tol

    def is_real(self, tol=1e-12):
        return float(np.max(np.abs(self.vec.imag), initial=0.0)) <= tol

    def allclose(self, other, atol=1e-12):
        self._check_same(other)
        return bool(np.max(np.abs(self.vec - other.vec), initial=0.0) <= atol)

    def __repr__(self):
        names = _names(self.n, type(self) is Multivector)
        terms = [
            f"({c:.6g})" + ("^".join(names[i] for i in t) or "1")
            for t, c in zip(basis(self.n, self.k), self.vec)
            if c != 0
        ]
        body = " + ".join(terms) if terms else "0"
        return f"{type(self).__name__}(n={self.n}, k={self.k}: {body})"


def _names(n, vector):
    x, y = ("Dx", "Dy") if vector else ("dx", "dy")
    return [f"{x}{i}" for i in range(1, n + 1)] + [f"{y}{i}" for i in range(1, n + 1)]


class ExteriorForm(_Graded):
    """Complex alternating k-form on R^{2n}; immutable."""

    __slots__ = ()


class Multivector(_Graded):
    """Element of Lambda^k(R^{2n}) (complexified); immutable."""

    __slots__ = ()


# ---------------------------------------------------------------------------
# constructors


def one(n):
    return ExteriorForm(n, 0, {(): 1.0})


def dx(n, i):
    return ExteriorForm(n, 1, {(i,): 1.0})


def dy(n, i):
    return ExteriorForm(n, 1, {(n + i,): 1.0})


def dz(n, i):
    return ExteriorForm(n, 1, {(i,): 1.0, (n + i,): 1j})


def dzbar(n, i):
    return ExteriorForm(n, 1, {(i,): 1.0, (n + i,): -1j})


def one_form(n, row):
    """1-form sum_j row[j] e^j for a length-2n coefficient row."""
    return ExteriorForm(n, 1, np.asarray(row, dtype=complex))


def wedge_all(forms):
    out = None
    for f in forms:
        out = f if out is None else wedge(out, f)
    return out


def dZ(n):
    """dz_1 ^ ... ^ dz_n."""
    return wedge_all(dz(n, i) for i in range(1, n + 1))


def dZbar(n):
    return wedge_all(dzbar(n, i) for i in range(1, n + 1))


def omega(n):
    return ExteriorForm(n, 2, {(i, n + i): 1.0 for i in range(1, n + 1)})


def omega_power(n, j):
    out = one(n)
    w = omega(n)
    for _ in range(j):
        out = wedge(out, w)
    return out


def volume_form(n):
    """omega^n / n! as a top-degree form."""
    return ExteriorForm(n, 2 * n, {tuple(range(1, 2 * n + 1)): _volume_sign(n)})


def _volume_sign(n):
    # dx1^dy1^...^dxn^dyn reordered to dx1..dxn^dy1..dyn
    return -1.0 if (n * (n - 1) // 2) % 2 else 1.0


def basis_vector(n, i):
    """The coordinate vector e_i (1-based) as a degree-1 multivector."""
    return Multivector(n, 1, {(i,): 1.0})


def multivector_from_frame(frame):
    """v_1 ^ ... ^ v_k for the columns of a real 2n x k matrix."""
    frame = np.asarray(frame, dtype=float)
    dim, k = frame.shape
    n = dim // 2
    d = kernels.minors(basis_rows(n, k), frame[None, :, :])[0]
    return Multivector(n, k, d.astype(complex))


# ---------------------------------------------------------------------------
# products and contractions


@lru_cache(maxsize=None)
def _wedge_table(n, j, k):
    idx = basis_index(n, j + k)
    ia, ib, io, sg = [], [], [], []
    for a, s in enumerate(basis(n, j)):
        sset = set(s)
        for b, t in enumerate(basis(n, k)):
            if sset.intersection(t):
                continue
            ia.append(a)
            ib.append(b)
            io.append(idx[tuple(sorted(s + t))])
            sg.append(_merge_sign(s, t))
    order = np.lexsort((np.array(ib), np.array(ia), np.array(io))) if io else np.array([], int)
    table = tuple(
        np.ascontiguousarray(np.array(x, dtype=dt)[order])
        for x, dt in ((ia, np.int64), (ib, np.int64), (io, np.int64), (sg, np.float64))
    )
    for arr in table:
        arr.setflags(write=False)
    return table


def _table_apply(table, avec, bvec, nout):
    ia, ib, io, sg = table
    re, im = kernels.table_product(
        ia, ib, io, sg,
        np.ascontiguousarray(avec.real), np.ascontiguousarray(avec.imag),
        np.ascontiguousarray(bvec.real), np.ascontiguousarray(bvec.imag),
        nout,
    )
    return re + 1j * im


def wedge(a, b):
    """Alternating product a ^ b."""
    if not isinstance(a, ExteriorForm) or not isinstance(b, ExteriorForm):
        raise TypeError("wedge expects two ExteriorForm arguments")
    if a.n != b.n:
        raise ValueError(f"half dimension mismatch: {a.n} vs {b.n}")
    if a.k + b.k > 2 * a.n:
        raise ValueError(f"degree {a.k + b.k} exceeds {2 * a.n}")
    n, k = a.n, a.k + b.k
    vec = _table_apply(_wedge_table(n, a.k, b.k), a.vec, b.vec, comb(2 * n, k))
    return ExteriorForm(n, k, vec)


@lru_cache(maxsize=None)
def _contract_table(n, j, k):
    # iota_{e_J} e^I = sign(J, I\J) e^{I\J} when J is a subset of I
    idx = basis_index(n, k - j)
    iv, ia, io, sg = [], [], [], []
    for a, s in enumerate(basis(n, k)):
        for v, t in enumerate(basis(n, j)):
            if not set(t).issubset(s):
                continue
            rest = tuple(i for i in s if i not in t)
            iv.append(v)
            ia.append(a)
            io.append(idx[rest])
            sg.append(_merge_sign(t, rest))
    order = np.lexsort((np.array(iv), np.array(ia), np.array(io))) if io else np.array([], int)
    table = tuple(
        np.ascontiguousarray(np.array(x, dtype=dt)[order])
        for x, dt in ((iv, np.int64), (ia, np.int64), (io, np.int64), (sg, np.float64))
    )
    for arr in table:
        arr.setflags(write=False)
    return table


def interior_contract(v, a):
    """Contraction v -| a, with v filling the first slots: (v -| a)(u) = a(v ^ u)."""
    if not isinstance(v, Multivector) or not isinstance(a, ExteriorForm):
        raise TypeError("interior_contract expects (Multivector, ExteriorForm)")
    if v.n != a.n:
        raise ValueError(f"half dimension mismatch: {v.n} vs {a.n}")
    if v.k > a.k:
        raise ValueError(f"cannot contract degree {v.k} into degree {a.k}")
    n, k = a.n, a.k - v.k
    vec = _table_apply(_contract_table(n, v.k, a.k), v.vec, a.vec, comb(2 * n, k))
    return ExteriorForm(n, k, vec)


def evaluate(a, w):
    """Full pairing a(w) of a k-form with a k-vector (bilinear)."""
    if not isinstance(a, ExteriorForm) or not isinstance(w, Multivector):
        raise TypeError("evaluate expects (ExteriorForm, Multivector)")
    if a.n != w.n or a.k != w.k:
        raise ValueError("degree or half dimension mismatch")
    return complex(np.sum(a.vec * w.vec))


def eval_on_frame(a, frame):
    """a(v_1, ..., v_k) for the columns of a real 2n x k frame."""
    frame = np.asarray(frame, dtype=float)
    return complex(eval_on_frames(a, frame[None, :, :])[0])


def eval_on_frames(a, frames):
    """Vectorised a(frame_b) for a stack of real frames, shape (B, 2n, k)."""
    frames = np.ascontiguousarray(frames, dtype=float)
    nz = np.flatnonzero(a.vec)
    rows = np.ascontiguousarray(basis_rows(a.n, a.k)[nz])
    c = a.vec[nz]
    re, im = kernels.eval_on_frames(
        rows, np.ascontiguousarray(c.real), np.ascontiguousarray(c.imag), frames
    )
    return re + 1j * im


def top_coefficient(a):
    """The scalar c with a = c * omega^n / n!."""
    if not isinstance(a, ExteriorForm):
        raise TypeError("top_coefficient expects an ExteriorForm")
    if a.k != 2 * a.n:
        raise ValueError(f"top_coefficient needs degree {2 * a.n}, got {a.k}")
    return complex(a.vec[0] * _volume_sign(a.n))


# ---------------------------------------------------------------------------
# Lefschetz sl(2)


@lru_cache(maxsize=None)
def lefschetz_matrix(n, k):
    """Real matrix of L = omega ^ (.) from degree k to degree k + 2."""
    ia, ib, io, sg = _wedge_table(n, 2, k)
    w = omega(n).vec.real
    m = np.zeros((comb(2 * n, k + 2), comb(2 * n, k)))
    np.add.at(m, (io, ib), sg * w[ia])
    m.setflags(write=False)
    return m


def lefschetz(a, times=1):
    """omega^times ^ a."""
    if a.k + 2 * times > 2 * a.n:
        raise ValueError(f"omega^{times} ^ (degree {a.k}) exceeds top degree")
    out = a
    for _ in range(times):
        out = ExteriorForm(out.n, out.k + 2, lefschetz_matrix(out.n, out.k) @ out.vec)
    return out


def dual_lefschetz(a):
    """Adjoint of L for the coefficient inner product; lowers degree by 2."""
    if a.k < 2:
        raise ValueError("dual Lefschetz needs degree at least 2")
    return ExteriorForm(a.n, a.k - 2, lefschetz_matrix(a.n, a.k - 2).T @ a.vec)


def primitive_dim(n, k):
    """Dimension of primitive k-forms on R^{2n}: C(2n,k) - C(2n,k-2)."""
    if not 0 <= k <= n:
        raise ValueError(f"primitive degree must satisfy 0 <= k <= n, got k={k}, n={n}")
    return comb(2 * n, k) - (comb(2 * n, k - 2) if k >= 2 else 0)


def catalan(m):
    return comb(2 * m, m) // (m + 1)


def primitivity_residual(a):
    """Norm of omega^{n-k+1} ^ a (zero exactly for primitive a, k <= n)."""
    if a.k > a.n:
        return a.norm()
    vec = a.vec
    k = a.k
    for _ in range(a.n - a.k + 1):
        if k + 2 > 2 * a.n:
            return 0.0
        vec = lefschetz_matrix(a.n, k) @ vec
        k += 2
    return float(np.linalg.norm(vec))


def is_primitive(a, tol=1e-10):
    return primitivity_residual(a) <= tol * max(1.0, a.norm())


def _lambda_power_coeff(n, d, i, j):
    # Lambda^j L^i alpha = C * L^{i-j} alpha for primitive alpha of degree d
    c = 1.0
    for t in range(j):
        ii = i - t
        c *= ii * (n - d - ii + 1)
    return c


def primitive_decompose(a):
    """Components (alpha_k, alpha_{k-2}, ...) with a = sum_j omega^j ^ alpha_{k-2j}.

    Each alpha is primitive.  Components forced to vanish by degree are
    returned as zero forms.  Solved top-down through powers of the dual
    Lefschetz operator, whose action on L^i(primitive) is an explicit scalar.
    """
    n, k = a.n, a.k
    jmax = k // 2
    jmin = max(0, k - n)
    lam_pows = [a.vec]
    for j in range(1, jmax + 1):
        lam_pows.append(lefschetz_matrix(n, k - 2 * j).T @ lam_pows[-1])
    alphas = {}
    for j in range(jmax, -1, -1):
        d = k - 2 * j
        if j < jmin:
            alphas[j] = np.zeros(comb(2 * n, d), dtype=complex)
            continue
        rhs = lam_pows[j].copy()
        for i in range(j + 1, jmax + 1):
            c = _lambda_power_coeff(n, k - 2 * i, i, j)
            if c == 0.0:
                continue
            v = alphas[i]
            deg = k - 2 * i
            for _ in range(i - j):
                v = lefschetz_matrix(n, deg) @ v
                deg += 2
            rhs = rhs - c * v
        alphas[j] = rhs / _lambda_power_coeff(n, d, j, j)
    return [ExteriorForm(n, k - 2 * j, alphas[j]) for j in range(jmax + 1)]


def primitive_part(a):
    return primitive_decompose(a)[0]


def lefschetz_reconstruct(parts):
    """Inverse of primitive_decompose: sum_j omega^j ^ parts[j]."""
    n = parts[0].n
    k = parts[0].k
    total = parts[0].vec.copy()
    for j, p in enumerate(parts[1:], start=1):
        v = p.vec
        deg = p.k
        for _ in range(j):
            v = lefschetz_matrix(n, deg) @ v
            deg += 2
        total = total + v
    return ExteriorForm(n, k, total)


def primitive_basis_count(n, k, tol=1e-9):
    """Dimension of ker(L^{n-k+1}) on k-forms by singular values."""
    m = np.eye(comb(2 * n, k))
    deg = k
    for _ in range(n - k + 1):
        m = lefschetz_matrix(n, deg) @ m
        deg += 2
    s = np.linalg.svd(m, compute_uv=False)
    rank = int(np.sum(s > tol * max(1.0, s[0] if s.size else 1.0)))
    return comb(2 * n, k) - rank


# ---------------------------------------------------------------------------
# dense tensor helpers (small degree only)


def to_tensor(a):
    """Fully antisymmetric (2n)^k array of a."""
    from itertools import permutations

    dim = 2 * a.n
    t = np.zeros((dim,) * a.k, dtype=complex)
    perms = list(permutations(range(a.k)))
    signs = [_perm_sign(p) for p in perms]
    for tup, c in zip(basis(a.n, a.k), a.vec):
        if c == 0:
            continue
        for p, s in zip(perms, signs):
            t[tuple(tup[i] for i in p)] = s * c
    return t


def from_tensor(t, n):
    """Form whose coefficient on each sorted tuple is the tensor entry there."""
    k = t.ndim
    vec = np.array([t[tup] for tup in basis(n, k)], dtype=complex)
    return ExteriorForm(n, k, vec)


def _perm_sign(p):
    p = list(p)
    s = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s

