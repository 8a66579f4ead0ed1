"""Rational symplectic tori R^{2n} / (Z^n + d_1 Z + ... + d_n Z): lattice
Lagrangian classes, central charges, certified systoles and volumes.

Integer data lives in lattice coordinates: a lattice vector z has real
coordinates D z with D = diag(1, .., 1, d_1, .., d_n).  All class
arithmetic (HNF, kernels, Pluecker vectors, gcds) is exact.
"""

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import gcd

import numpy as np

from lagform import kernels
from lagform.exterior import basis_rows, eval_on_frame, eval_on_frames
from lagform.lagrangian import min_abs_on_lgr
from lagform.symplectic import random_siegel_point, siegel_form
from lagform.uspace import MEMBER_THRESHOLD, vol_ratio

# Hermite constants gamma_n (gamma_n^n exact for n <= 5)
HERMITE = {1: 1.0, 2: 2.0 / np.sqrt(3.0), 3: 2.0 ** (1.0 / 3.0), 4: np.sqrt(2.0), 5: 8.0 ** (1.0 / 5.0)}


@dataclass(frozen=True)
class RationalTorus:
    n: int
    divisors: tuple = None
    omega_scale: Fraction = Fraction(1)

    def __post_init__(self):
        d = tuple(int(x) for x in (self.divisors or (1,) * self.n))
        if len(d) != self.n:
            raise ValueError(f"expected {self.n} elementary divisors, got {len(d)}")
        if d[0] != 1 or any(x < 1 for x in d):
            raise ValueError("divisors must be positive with d_1 = 1")
        if any(b % a for a, b in zip(d, d[1:])):
            raise ValueError("divisors must form a chain d_k | d_{k+1}")
        object.__setattr__(self, "divisors", d)
        object.__setattr__(self, "omega_scale", Fraction(self.omega_scale))

    @property
    def scales(self):
        return np.array((1,) * self.n + self.divisors, dtype=np.int64)

    def omega_lattice(self):
        """Integer Gram matrix of the standard omega in lattice coordinates."""
        n = self.n
        W = np.zeros((2 * n, 2 * n), dtype=np.int64)
        for k, d in enumerate(self.divisors):
            W[k, n + k] = d
            W[n + k, k] = -d
        return W

    def covolume(self):
        return int(np.prod(self.divisors))


@dataclass(frozen=True)
class LatticeLagrangianClass:
    """Primitive isotropic rank-n sublattice, saturated in the torus lattice."""

    plucker: tuple  # integer minors over basis_rows(n, n), first nonzero positive
    frame: np.ndarray  # 2n x n integer HNF basis in lattice coordinates

    @property
    def n(self):
        return self.frame.shape[1]

    def real_frame(self, torus):
        return torus.scales[:, None] * self.frame

    def real_plucker(self, torus):
        return kernels.minors(basis_rows(self.n, self.n), self.real_frame(torus)[None].astype(float))[0]

    def norm(self, torus):
        return float(np.linalg.norm(self.real_plucker(torus)))

    def label(self):
        cols = ["(" + ",".join(str(int(x)) for x in self.frame[:, j]) + ")" for j in range(self.n)]
        return " ".join(cols)


# ---------------------------------------------------------------------------
# exact integer linear algebra


def hnf_rows(A, reduce_cols=None):
    """Row Hermite normal form by unimodular row operations (exact, Python ints).

    Reduces the first reduce_cols columns (all by default) to echelon form
    with positive pivots and entries above each pivot in [0, pivot).  Returns
    (H, rank) where H keeps every row; rows past `rank` vanish on the reduced
    columns.
    """
    H = [[int(x) for x in row] for row in A]
    m = len(H)
    ncols = len(H[0]) if m else 0
    limit = ncols if reduce_cols is None else reduce_cols
    r = 0
    for c in range(limit):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(H[i][c]))
            H[r], H[piv] = H[piv], H[r]
            done = True
            for i in range(r + 1, m):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    if H[i][c]:
                        done = False
            if done:
                break
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-a for a in H[r]]
        for i in range(r):
            q = H[i][c] // H[r][c]
            if q:
                H[i] = [a - q * b for a, b in zip(H[i], H[r])]
        r += 1
    return H, r


def hnf(A):
    """Canonical row HNF of the row lattice of A (nonzero rows only)."""
    H, r = hnf_rows(A)
    return [row for row in H[:r]]


def integer_kernel(M):
    """Z-basis (as rows) of {x in Z^N : M x = 0} for an integer m x N matrix."""
    M = [[int(x) for x in row] for row in M]
    m = len(M)
    N = len(M[0])
    aug = [[M[i][j] for i in range(m)] + [1 if k == j else 0 for k in range(N)] for j in range(N)]
    H, r = hnf_rows(aug, reduce_cols=m)
    return [row[m:] for row in H[r:]]


def saturation(F):
    """Basis (2n x k integer matrix) of the saturation of the column lattice of F."""
    F = np.asarray(F, dtype=np.int64)
    K = integer_kernel(F.T.tolist())
    if not K:
        return np.eye(F.shape[0], dtype=np.int64)
    S = integer_kernel(K)
    return np.array(hnf(S), dtype=np.int64).T


def int_minors(frames):
    """Exact integer n x n minors of small integer frames, shape (B, m)."""
    frames = np.asarray(frames)
    n = frames.shape[2]
    vals = kernels.minors(basis_rows(n, n), np.ascontiguousarray(frames, dtype=float))
    out = np.rint(vals)
    if np.abs(vals - out).max(initial=0.0) > 1e-6:
        raise ArithmeticError("integer minors lost exactness")
    return out.astype(np.int64)


def _canon_sign(vec):
    nz = np.flatnonzero(vec)
    if nz.size and vec[nz[0]] < 0:
        return -vec
    return vec


def _gcd_all(vec):
    return int(np.gcd.reduce(np.abs(np.asarray(vec, dtype=np.int64))))


def make_class(F):
    """Class of the saturation of the integer column lattice of F (lattice coordinates)."""
    S = saturation(F)
    if S.shape[1] != np.asarray(F).shape[1]:
        raise ValueError("frame is rank deficient")
    pl = _canon_sign(int_minors(S[None])[0])
    frame = np.array(S, dtype=np.int64)
    frame.setflags(write=False)
    return LatticeLagrangianClass(tuple(int(x) for x in pl), frame)


# ---------------------------------------------------------------------------
# enumeration by HNF height


def _echelon_candidates(n, height):
    """All n x 2n row echelon integer matrices with positive pivots <= height,
    entries above pivots in [0, pivot) and free entries in [-height, height]."""
    N = 2 * n
    for pcols in combinations(range(N), n):
        for pivots in product(range(1, height + 1), repeat=n):
            slots = []  # (row, col, choices)
            for i, c in enumerate(pcols):
                for col in range(c + 1, N):
                    if col in pcols:
                        j = pcols.index(col)
                        slots.append((i, col, range(0, pivots[j])))
                    else:
                        slots.append((i, col, range(-height, height + 1)))
            base = np.zeros((n, N), dtype=np.int64)
            for i, c in enumerate(pcols):
                base[i, c] = pivots[i]
            if not slots:
                yield base[None]
                continue
            grids = np.array(list(product(*[s[2] for s in slots])), dtype=np.int64)
            out = np.repeat(base[None], len(grids), axis=0)
            for k, (i, col, _) in enumerate(slots):
                out[:, i, col] = grids[:, k]
            yield out


def enumerate_lagrangian_classes(torus, height):
    """Classes whose HNF basis (lattice coordinates) has entries bounded by height."""
    if height < 1:
        raise ValueError("height must be at least 1")
    n = torus.n
    W = torus.omega_lattice()
    out = []
    for batch in _echelon_candidates(n, height):
        iso = np.einsum("bia,ac,bjc->bij", batch, W, batch)
        keep = ~np.any(iso.reshape(len(batch), -1), axis=1)
        batch = batch[keep]
        if not len(batch):
            continue
        frames = np.transpose(batch, (0, 2, 1))
        pl = int_minors(frames)
        g = np.gcd.reduce(np.abs(pl), axis=1)
        for A, p in zip(batch[g == 1], pl[g == 1]):
            frame = A.T.copy()
            frame.setflags(write=False)
            out.append(LatticeLagrangianClass(tuple(int(x) for x in _canon_sign(p)), frame))
    return out


def is_valid_class(cls, torus):
    F = cls.frame
    W = torus.omega_lattice()
    iso = F.T @ W @ F
    pl = int_minors(F[None])[0]
    return bool(not iso.any() and _gcd_all(pl) == 1 and tuple(_canon_sign(pl)) == cls.plucker)


# ---------------------------------------------------------------------------
# central charge, systole, volume


def central_charge(form, cls, torus=None):
    """Z(gamma) = Omega evaluated on a lattice basis of the class."""
    torus = RationalTorus(cls.n) if torus is None else torus
    if form.n != cls.n or form.k != cls.n:
        raise ValueError("form and class dimensions differ")
    return eval_on_frame(form, cls.real_frame(torus).astype(float))


def torus_volume(form, torus):
    """Integral of (-1)^{n(n-1)/2} (i/2)^n Omega ^ conj(Omega) over the torus."""
    if form.n != torus.n:
        raise ValueError("form and torus dimensions differ")
    return vol_ratio(form) * torus.covolume()


def _ball_vectors(torus, radius):
    """Primitive lattice vectors (one per +- pair) with real norm <= radius, sorted by norm."""
    n = torus.n
    sc = torus.scales
    bounds = [int(np.floor(radius / s + 1e-12)) for s in sc]
    axes = [np.arange(-b, b + 1, dtype=np.int64) for b in bounds]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 2 * n)
    real = grid * sc[None]
    nrm2 = np.einsum("ij,ij->i", real, real).astype(float)
    keep = (nrm2 > 0) & (nrm2 <= radius * radius * (1 + 1e-12))
    grid, nrm2 = grid[keep], nrm2[keep]
    keep = np.gcd.reduce(np.abs(grid), axis=1) == 1
    grid, nrm2 = grid[keep], nrm2[keep]
    first = grid[np.arange(len(grid)), np.argmax(grid != 0, axis=1)]
    keep = first > 0
    grid, nrm2 = grid[keep], nrm2[keep]
    order = np.lexsort(tuple(grid.T[::-1]) + (nrm2,))
    return grid[order], np.sqrt(nrm2[order])


def _tuples(vecs, norms, W, n, bound):
    """Index tuples i_1 < .. < i_n of pairwise omega-orthogonal vectors with
    norm(i_1)^... product <= bound, where the later norms are at least the earlier."""
    out = []
    ow = vecs @ W  # ow[i] . v = omega(v_i, v)
    tol = 1 + 1e-12

    def rec(chosen, prod, cand):
        depth = len(chosen)
        if depth == n:
            out.append(tuple(chosen))
            return
        rest = n - depth
        for pos, j in enumerate(cand):
            if prod * norms[j] ** rest > bound * tol:
                break
            nxt = cand[pos + 1:]
            if depth + 1 < n and nxt.size:
                nxt = nxt[ow[j] @ vecs[nxt].T == 0]
            rec(chosen + [j], prod * norms[j], nxt)

    rec([], 1.0, np.arange(len(vecs)))
    return out


@dataclass(frozen=True)
class SystoleResult:
    sys: float
    witness: LatticeLagrangianClass
    certified: bool
    radius: float
    m: float
    classes: int
    support_ratio: float  # min |Z| / |gamma| over the classes found


def default_radius_cap(n):
    # keeps the lattice box below about 2e6 points
    return {1: 512.0, 2: 16.0, 3: 5.0}.get(n, 3.0)


def _classes_within(form, torus, bound):
    """Classes reachable from tuples with norm product <= bound.

    Returns {plucker: (|Z|, |gamma|, tuple frame)}.
    """
    n = torus.n
    vecs, norms = _ball_vectors(torus, bound)
    W = torus.omega_lattice()
    idx = _tuples(vecs, norms, W, n, bound)
    if not idx:
        return {}
    frames = np.transpose(vecs[np.array(idx)], (0, 2, 1))
    pl = int_minors(frames)
    g = np.gcd.reduce(np.abs(pl), axis=1)
    ok = g > 0
    frames, pl, g = frames[ok], pl[ok], g[ok]
    real = torus.scales[None, :, None] * frames
    Z = np.abs(eval_on_frames(form, real.astype(float))) / g
    rn = np.linalg.norm(kernels.minors(basis_rows(n, n), np.ascontiguousarray(real, dtype=float)), axis=1) / g
    found = {}
    for p, gg, z, r, F in zip(pl, g, Z, rn, frames):
        key = tuple(int(x) for x in _canon_sign(p // gg))
        if key not in found:
            found[key] = (float(z), float(r), F)
    return found


def systole(form, torus=None, seed=0, restarts=64, radius_cap=None):
    """Smallest |Z(gamma)| over lattice Lagrangian classes, with a coverage certificate.

    The LGr minimum m gives |gamma| <= |Z(gamma)| / m, so classes beating the
    current best lie within covolume B = best / m.  A class of covolume c has
    independent lattice vectors with norm product <= gamma_n^{n/2} c
    (Minkowski's second theorem), so enumerating such tuples covers the ball.
    """
    torus = RationalTorus(form.n) if torus is None else torus
    n = torus.n
    if form.k != n or form.n != n:
        raise ValueError("form and torus dimensions differ")
    cap = default_radius_cap(n) if radius_cap is None else float(radius_cap)
    m, _ = min_abs_on_lgr(form, restarts, seed)
    herm = HERMITE[n] ** (n / 2.0)
    usable = m > MEMBER_THRESHOLD * form.norm()
    bound = min(1.0, cap)
    while True:
        found = _classes_within(form, torus, bound)
        certified = False
        if found:
            best = min(v[0] for v in found.values())
            need = herm * best / m if usable else np.inf
            if need <= bound * (1 + 1e-12):
                certified = True
                break
        else:
            need = np.inf
        if bound >= cap:
            break
        bound = min(cap, max(2 * bound, need if np.isfinite(need) else 2 * bound))
    if not found:
        raise RuntimeError("no lattice Lagrangian found within the radius cap")
    key = min(found, key=lambda k: (round(found[k][0], 12), found[k][1], tuple(-x for x in k)))
    z, r, F = found[key]
    witness = make_class(F)
    support = min(v[0] / v[1] for v in found.values())
    return SystoleResult(z, witness, certified, bound, m, len(found), support)


# ---------------------------------------------------------------------------
# experiments


def systolic_experiment(n, samples, seed, eps_max=0.9, spread=0.3, restarts=32):
    """Certified systole / volume ratios for random geometric forms and their
    almost geometric partners Omega + eps conj(Omega).

    Rows are dicts with keys sample_id, kind, n, sys, vol, ratio, certified, seed.
    """
    if n > 3:
        raise ValueError("systolic_experiment supports n <= 3")
    torus = RationalTorus(n)
    rows = []
    for i in range(samples):
        rng = np.random.default_rng([seed, i])
        Z = random_siegel_point(n, rng, spread)
        geo = siegel_form(Z)
        eps = eps_max * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        ag = geo + eps * geo.conj()
        for kind, form in (("geometric", geo), ("ag", ag)):
            res = systole(form, torus, seed=seed, restarts=restarts)
            vol = torus_volume(form, torus)
            rows.append(
                {
                    "sample_id": f"{kind}-{i:04d}",
                    "kind": kind,
                    "n": n,
                    "sys": res.sys,
                    "vol": vol,
                    "ratio": res.sys ** 2 / vol,
                    "certified": res.certified,
                    "seed": seed,
                }
            )
    return rows


CSV_COLUMNS = ("sample_id", "n", "sys", "vol", "ratio", "certified", "seed")


def experiment_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(
            [
                r["sample_id"],
                r["n"],
                f"{r['sys']:.12g}",
                f"{r['vol']:.12g}",
                f"{r['ratio']:.12g}",
                "true" if r["certified"] else "false",
                r["seed"],
            ]
        )
    return buf.getvalue()
