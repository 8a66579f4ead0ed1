"""The Lagrangian Grassmannian: frames, decomposable n-vectors, sampling,
the phase loop and its winding, and global minimisation of |Omega| over LGr.
"""

from dataclasses import dataclass

import numpy as np

from lagform.exterior import (
    ExteriorForm,
    eval_on_frames,
    is_primitive,
    multivector_from_frame,
)
from lagform.symplectic import omega_matrix, random_unitary_real, standard_j


class WindingError(ValueError):
    """The phase loop could not be unwrapped reliably."""

    def __init__(self, message, theta=None, modulus=None):
        super().__init__(message)
        self.theta = theta
        self.modulus = modulus


@dataclass(frozen=True)
class LagrangianFrame:
    """A 2n x n real matrix whose columns span a Lagrangian subspace."""

    F: np.ndarray
    tol: float = 1e-10

    def __post_init__(self):
        F = np.array(self.F, dtype=float)
        if F.ndim != 2 or F.shape[0] != 2 * F.shape[1] or F.shape[1] < 1:
            raise ValueError(f"a Lagrangian frame is 2n x n, got shape {F.shape}")
        sv = np.linalg.svd(F, compute_uv=False)
        if sv[-1] <= self.tol * max(1.0, sv[0]):
            raise ValueError(f"frame is rank deficient (smallest singular value {sv[-1]:.3g})")
        iso = np.abs(F.T @ omega_matrix(F.shape[1]) @ F).max()
        if iso > self.tol * max(1.0, sv[0] ** 2):
            raise ValueError(f"frame is not isotropic (residual {iso:.3g})")
        F.setflags(write=False)
        object.__setattr__(self, "F", F)

    @property
    def n(self):
        return self.F.shape[1]

    def orthonormal(self):
        """Same subspace, orthonormal columns (a unitary frame)."""
        q, _ = np.linalg.qr(self.F)
        return LagrangianFrame(q, self.tol)


@dataclass(frozen=True)
class PhaseSample:
    theta: float
    value: complex

    @property
    def phase(self):
        """arg of the value, taken in R / pi Z."""
        return float(np.mod(np.angle(self.value), np.pi))


def as_frame(F):
    return F if isinstance(F, LagrangianFrame) else LagrangianFrame(F)


def standard_frame(n):
    return LagrangianFrame(np.vstack([np.eye(n), np.zeros((n, n))]))


def decomposable_from_frame(F):
    """v_1 ^ ... ^ v_n for the columns of a Lagrangian frame."""
    return multivector_from_frame(as_frame(F).F)


def sample_lagrangian(n, seed):
    """Haar-random unitary image of the standard frame; orthonormal columns."""
    rng = np.random.default_rng(seed)
    u = random_unitary_real(n, rng)
    return LagrangianFrame(u[:, :n])


def _check_middle(omega_form):
    if not isinstance(omega_form, ExteriorForm) or omega_form.k != omega_form.n:
        raise ValueError("expected a middle-degree form")
    if not is_primitive(omega_form):
        raise ValueError("form is not primitive")


def rotated_frames(F, thetas, J=None):
    """Stack of exp(theta J) F for each theta."""
    F = as_frame(F).F
    J = standard_j(F.shape[1]) if J is None else np.asarray(J, dtype=float)
    JF = J @ F
    c = np.cos(thetas)[:, None, None]
    s = np.sin(thetas)[:, None, None]
    return c * F[None] + s * JF[None]


def phase_samples(omega_form, F, samples=64):
    thetas = 2 * np.pi * np.arange(samples) / samples
    vals = eval_on_frames(omega_form, rotated_frames(F, thetas))
    return [PhaseSample(float(t), complex(v)) for t, v in zip(thetas, vals)]


def loop_winding(omega_form, F=None, samples=256, max_depth=20, rel_tol=1e-10):
    """Winding number of theta -> Omega(exp(theta J) w) over [0, 2 pi].

    Phases are unwrapped between consecutive samples; any step whose phase
    jump exceeds pi/2 is bisected (up to max_depth levels).
    """
    _check_middle(omega_form)
    F = standard_frame(omega_form.n) if F is None else as_frame(F)
    floor = rel_tol * max(omega_form.norm(), 1e-300)

    def values(thetas):
        v = eval_on_frames(omega_form, rotated_frames(F, thetas))
        bad = np.flatnonzero(np.abs(v) <= floor)
        if bad.size:
            i = bad[0]
            raise WindingError(
                f"form nearly vanishes on the loop at theta={thetas[i]:.6g} (|value|={abs(v[i]):.3g})",
                theta=float(thetas[i]),
                modulus=float(abs(v[i])),
            )
        return v

    thetas = np.linspace(0.0, 2 * np.pi, samples + 1)
    vals = values(thetas)

    def segment(t0, t1, v0, v1, depth):
        jump = np.angle(v1 / v0)
        if abs(jump) <= np.pi / 2:
            return jump
        if depth >= max_depth:
            raise WindingError(
                f"phase unwrapping inconclusive near theta={t0:.6g}", theta=float(t0), modulus=float(abs(v0))
            )
        tm = 0.5 * (t0 + t1)
        vm = values(np.array([tm]))[0]
        return segment(t0, tm, v0, vm, depth + 1) + segment(tm, t1, vm, v1, depth + 1)

    total = 0.0
    for i in range(samples):
        total += segment(thetas[i], thetas[i + 1], vals[i], vals[i + 1], 0)
    w = total / (2 * np.pi)
    k = int(round(w))
    if abs(w - k) > 1e-6:
        raise WindingError(f"non-integral winding {w:.9g}")
    return k


def coefficient_orientation_diagnostic(omega_form):
    """Re(conj(c1) c2) for c1 = Omega(dx frame), c2 = Omega at the J-rotated
    frame by pi / (2n).  Exposed for inspection only; orientation is decided
    by loop_winding.
    """
    n = omega_form.n
    F = standard_frame(n)
    vals = eval_on_frames(omega_form, rotated_frames(F, np.array([0.0, np.pi / (2 * n)])))
    return float((np.conj(vals[0]) * vals[1]).real)


# ---------------------------------------------------------------------------
# minimisation of |Omega| over LGr


def _sym_basis(n):
    mats = []
    for a in range(n):
        for b in range(a, n):
            m = np.zeros((n, n))
            m[a, b] = m[b, a] = 1.0
            mats.append(m)
    return np.array(mats)


def _replace_frames(Q, JQ, pairs):
    """Frames of Q with some columns replaced by columns of JQ.

    Q, JQ have shape (R, 2n, n); pairs is a list of tuples of (col, jcol).
    Returns shape (R, len(pairs), 2n, n).
    """
    R = Q.shape[0]
    out = np.repeat(Q[:, None], len(pairs), axis=1)
    for p, repl in enumerate(pairs):
        for col, jcol in repl:
            out[:, p, :, col] = JQ[:, :, jcol]
    return out


class _LocalModel:
    """Quadratic model of f(S) = Omega(Q + JQ S) / sqrt(det(I + S^2)) at S = 0."""

    def __init__(self, n):
        self.n = n
        self.B = _sym_basis(n)
        pairs = [()]
        pairs += [((b, a),) for a in range(n) for b in range(n)]
        self.second = []
        for b in range(n):
            for b2 in range(b + 1, n):
                for a in range(n):
                    for a2 in range(n):
                        self.second.append((a, b, a2, b2))
                        pairs.append(((b, a), (b2, a2)))
        self.pairs = pairs
        # tr(S^2) = s^T G s
        self.G = np.einsum("kab,lab->kl", self.B, self.B)

    def evaluate(self, omega_form, Q, J):
        R, dim, n = Q.shape
        JQ = np.einsum("ij,rjk->rik", J, Q)
        frames = _replace_frames(Q, JQ, self.pairs)
        vals = eval_on_frames(omega_form, frames.reshape(-1, dim, n)).reshape(R, len(self.pairs))
        P0 = vals[:, 0]
        D = vals[:, 1:1 + n * n].reshape(R, n, n)  # D[b, a]: column b -> (JQ)_a
        g = np.einsum("kab,rba->rk", self.B, D)
        T = np.zeros((R, n, n, n, n), dtype=complex)
        for idx, (a, b, a2, b2) in enumerate(self.second):
            T[:, a, b, a2, b2] = vals[:, 1 + n * n + idx]
        M = np.einsum("kab,lcd,rabcd->rkl", self.B, self.B, T)
        A = M + np.transpose(M, (0, 2, 1)) - P0[:, None, None] * self.G[None]
        return P0, g, A


def _unitarize(Q):
    """Nearest orthonormal Lagrangian frame: polar part of the complex matrix A + iB."""
    n = Q.shape[2]
    u = Q[:, :n, :] + 1j * Q[:, n:, :]
    w, _, vh = np.linalg.svd(u)
    u = w @ vh
    return np.concatenate([u.real, u.imag], axis=1)


def min_abs_on_lgr(omega_form, restarts=64, seed=0, max_iter=200, return_all=False):
    """Global minimum of |Omega(w)| over unit decomposable Lagrangian w.

    Multi-start damped Newton in the affine chart S -> Q + JQ S around the
    current orthonormal frame Q (S symmetric), re-centred after every step.
    Restart r starts from sample_lagrangian(n, seed ^ r).  Returns (m, frame).
    """
    _check_middle(omega_form)
    n = omega_form.n
    J = standard_j(n)
    model = _LocalModel(n)
    d = len(model.B)
    Q = np.array([sample_lagrangian(n, seed ^ r).F for r in range(restarts)])
    mu = np.full(restarts, 1e-3)
    active = np.ones(restarts, dtype=bool)
    scale = max(omega_form.norm(), 1e-300)
    P0, g, A = model.evaluate(omega_form, Q, J)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        p, gg, AA = P0[idx], g[idx], A[idx]
        grad = 2 * (np.conj(p)[:, None] * gg).real
        H = 2 * (np.conj(gg)[:, :, None] * gg[:, None, :]).real + 2 * (np.conj(p)[:, None, None] * AA).real
        H = 0.5 * (H + np.transpose(H, (0, 2, 1)))
        # shift to positive definite, then damp
        lam_min = np.linalg.eigvalsh(H)[:, 0]
        hscale = np.abs(H).max(axis=(1, 2)) + scale ** 2 * 1e-30
        shift = np.maximum(0.0, -lam_min) + mu[idx] * hscale
        s = -np.linalg.solve(H + shift[:, None, None] * np.eye(d)[None], grad[:, :, None])[:, :, 0]
        S = np.einsum("rk,kab->rab", s, model.B)
        trial = Q[idx] + np.einsum("ij,rjk,rkl->ril", J, Q[idx], S)
        trial = _unitarize(trial)
        tP0, tg, tA = model.evaluate(omega_form, trial, J)
        better = np.abs(tP0) < np.abs(p)
        acc = idx[better]
        Q[acc], P0[acc], g[acc], A[acc] = trial[better], tP0[better], tg[better], tA[better]
        mu[acc] = np.maximum(mu[acc] / 4, 1e-12)
        rej = idx[~better]
        mu[rej] *= 8
        step = np.linalg.norm(s, axis=1)
        done = (np.abs(P0[idx]) <= 1e-15 * scale) | (better & (step < 1e-13)) | (mu[idx] > 1e8)
        active[idx[done]] = False
    vals = np.abs(P0)
    best = int(np.argmin(vals))
    m = float(vals[best])
    frame = LagrangianFrame(Q[best])
    if return_all:
        return m, frame, vals
    return m, frame
