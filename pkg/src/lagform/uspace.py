"""Membership in the domains U(V), their low-dimensional invariants, the
GIT-type minimisation over compatible complex structures, normal forms,
reduction and products.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from lagform.exterior import (
    ExteriorForm,
    Multivector,
    basis_rows,
    basis_vector,
    dZ,
    dZbar,
    eval_on_frame,
    eval_on_frames,
    from_tensor,
    interior_contract,
    is_primitive,
    multivector_from_frame,
    omega,
    one_form,
    primitivity_residual,
    to_tensor,
    top_coefficient,
    wedge,
    wedge_all,
)
from lagform.lagrangian import (
    LagrangianFrame,
    WindingError,
    as_frame,
    loop_winding,
    min_abs_on_lgr,
    sample_lagrangian,
    standard_frame,
)
from lagform.symplectic import (
    ComplexStructureData,
    _derivation_table,
    as_complex_structure,
    group_act,
    omega_matrix,
    p_basis,
    random_symplectic,
    standard_j,
    type_decompose,
)

MEMBER_THRESHOLD = 1e-6


class DomainError(ValueError):
    """A precondition on the input form failed; `tag` is machine readable."""

    def __init__(self, tag, message):
        super().__init__(message)
        self.tag = tag


def _require_middle(form, n=None):
    if not isinstance(form, ExteriorForm) or form.k != form.n:
        raise DomainError("degree", "expected a middle-degree form")
    if n is not None and form.n != n:
        raise DomainError("dimension", f"expected a form on R^{2 * n}, got R^{2 * form.n}")
    if not is_primitive(form):
        raise DomainError("not_primitive", f"form is not primitive (residual {primitivity_residual(form):.3g})")


# ---------------------------------------------------------------------------
# result types


@dataclass(frozen=True)
class MembershipReport:
    verdict: str  # member | non_member | inconclusive
    sign: int | None
    margin: float
    certificate: str  # exact_n1 | exact_n2 | necessary_n3_plus_numeric | numeric_only
    geometricity: str = "unknown"
    residuals: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict == "member" and not self.margin > 0:
            raise ValueError("a member must carry a positive margin")
        if (self.sign is not None) != (self.verdict == "member"):
            raise ValueError("sign is present exactly for members")

    @property
    def is_member(self):
        return self.verdict == "member"


@dataclass(frozen=True)
class SMatrix:
    S: np.ndarray
    r: float | None = None
    c_abs: float | None = None

    @property
    def min_eig(self):
        return float(np.linalg.eigvalsh(self.S)[0])

    def is_positive_definite(self, tol=0.0):
        return self.min_eig > tol


@dataclass(frozen=True)
class QInvariants:
    q: np.ndarray
    K: np.ndarray
    d: float

    def is_positive_definite(self, tol=0.0):
        return float(np.linalg.eigvalsh(self.q)[0]) > tol * max(1.0, np.abs(self.q).max())


@dataclass(frozen=True)
class LoopPolynomial:
    coeffs: np.ndarray  # a_0..a_n, p(z) = sum a_k z^k
    roots: np.ndarray
    verdict: bool


@dataclass(frozen=True)
class GitResult:
    J: ComplexStructureData
    g: np.ndarray
    form: ExteriorForm  # g^* Omega, close to a standard-type form
    norm: float  # |g^* Omega|^2
    gradient: float
    iterations: int
    history: tuple
    converged: bool
    suspected_non_member: bool


@dataclass(frozen=True)
class Geometricity:
    kind: str  # geometric | almost_geometric | plain
    residual_geometric: float
    residual_almost: float
    git: GitResult


@dataclass(frozen=True)
class NormalForm:
    c1: complex
    c2: complex
    lambdas: tuple
    g: np.ndarray
    residual: float
    status: str  # ok | inconclusive


# ---------------------------------------------------------------------------
# pairings and invariants


def real_pairing(a, b):
    """<a, b> with a ^ b = <a, b> omega^n / n! (real middle-degree forms)."""
    return top_coefficient(wedge(a, b))


def s_matrix(form):
    """S = [[<a,a>, <a,b>], [<a,b>, <b,b>]] for form = a + i b on R^4.

    For members the canonical parameters of r dz1^dz2 + c dzbar1^dzbar2 are
    recovered from the eigenvalues 2 (r +- |c|)^2.
    """
    if form.n != 2 or form.k != 2:
        raise DomainError("dimension", "s_matrix needs a 2-form on R^4")
    a, b = form.real, form.imag
    aa = real_pairing(a, a).real
    ab = real_pairing(a, b).real
    bb = real_pairing(b, b).real
    S = np.array([[aa, ab], [ab, bb]])
    ev = np.linalg.eigvalsh(S)
    r = c = None
    if ev[0] > 0:
        hi, lo = np.sqrt(ev[1] / 2), np.sqrt(ev[0] / 2)
        r, c = 0.5 * (hi + lo), 0.5 * (hi - lo)
    S.setflags(write=False)
    return SMatrix(S, r, c)


def q_invariants(alpha):
    """q(X, Y) omega^3/3! = (X -| alpha) ^ (Y -| alpha) ^ omega, K = W q, d = det K."""
    if alpha.n != 3 or alpha.k != 3:
        raise DomainError("dimension", "q_invariants needs a 3-form on R^6")
    if not alpha.is_real():
        raise DomainError("complex", "q_invariants needs a real 3-form")
    alpha = alpha.real
    w = omega(3)
    contr = [interior_contract(basis_vector(3, i), alpha) for i in range(1, 7)]
    q = np.zeros((6, 6))
    for i in range(6):
        cw = wedge(contr[i], w)
        for j in range(i, 6):
            q[i, j] = q[j, i] = top_coefficient(wedge(cw, contr[j])).real
    K = omega_matrix(3) @ q
    return QInvariants(q, K, float(np.linalg.det(K)))


def vol_ratio(form, with_residual=False):
    """Top coefficient of (-1)^{n(n-1)/2} (i/2)^n Omega ^ conj(Omega)."""
    n = form.n
    sign = -1.0 if (n * (n - 1) // 2) % 2 else 1.0
    val = sign * (0.5j) ** n * top_coefficient(wedge(form, form.conj()))
    if with_residual:
        return float(val.real), float(abs(val.imag))
    return float(val.real)


# ---------------------------------------------------------------------------
# membership


def _numeric_band(m, scale, threshold):
    if m > threshold * scale:
        return "member"
    if m >= threshold * scale / 10:
        return "inconclusive"
    return "non_member"


def _sign_by_winding(form, frame=None):
    try:
        w = loop_winding(form, frame)
    except WindingError:
        return None
    if abs(w) != form.n:
        return None
    return 1 if w > 0 else -1


def is_member(form, restarts=64, seed=0, threshold=MEMBER_THRESHOLD, geometricity=False):
    """Membership report; exact for n <= 2, graded for n >= 3."""
    _require_middle(form)
    n = form.n
    scale = form.norm()
    if scale == 0:
        return MembershipReport("non_member", None, 0.0, "exact_n1" if n == 1 else "numeric_only")
    res = {}
    if n == 1:
        a, b = form.vec
        M = np.array([[a.real, b.real], [a.imag, b.imag]])
        det = float(np.linalg.det(M))
        margin = float(np.linalg.svd(M, compute_uv=False)[-1])
        res["det"] = det
        if abs(det) <= 1e-12 * scale ** 2:
            return MembershipReport("non_member", None, margin, "exact_n1", residuals=res)
        rep = MembershipReport("member", 1 if det > 0 else -1, margin, "exact_n1", residuals=res)
    elif n == 2:
        S = s_matrix(form)
        margin = S.min_eig
        res["S"] = S.S.tolist()
        if margin <= 1e-12 * scale ** 2:
            return MembershipReport("non_member", None, margin, "exact_n2", residuals=res)
        sign = _sign_by_winding(form)
        if sign is None:
            return MembershipReport("inconclusive", None, margin, "exact_n2", residuals=res)
        rep = MembershipReport("member", sign, margin, "exact_n2", residuals=res)
    else:
        cert = "numeric_only"
        if n == 3:
            cert = "necessary_n3_plus_numeric"
            qa = q_invariants(form.real)
            qb = q_invariants(form.imag)
            res["q_re_min_eig"] = float(np.linalg.eigvalsh(qa.q)[0])
            res["q_im_min_eig"] = float(np.linalg.eigvalsh(qb.q)[0])
            if not (qa.is_positive_definite(1e-12) and qb.is_positive_definite(1e-12)):
                m, _ = min_abs_on_lgr(form, restarts, seed)
                return MembershipReport("non_member", None, m, cert, residuals=res)
        m, frame = min_abs_on_lgr(form, restarts, seed)
        verdict = _numeric_band(m, scale, threshold)
        if verdict != "member":
            return MembershipReport(verdict, None, m, cert, residuals=res)
        sign = _sign_by_winding(form)
        if sign is None:
            return MembershipReport("inconclusive", None, m, cert, residuals=res)
        rep = MembershipReport("member", sign, m, cert, residuals=res)
    if geometricity:
        return classify_report(form, rep)
    return rep


def classify_report(form, rep, tol=1e-6):
    """Attach geometricity to a member report (unknown for the U^- component)."""
    if not rep.is_member or rep.sign != 1:
        return rep
    geo = classify_geometricity(form, tol)
    res = dict(rep.residuals)
    res["geometric_residual"] = geo.residual_geometric
    res["almost_geometric_residual"] = geo.residual_almost
    return MembershipReport(rep.verdict, rep.sign, rep.margin, rep.certificate, geo.kind, res)


# ---------------------------------------------------------------------------
# loop polynomial and retraction


def loop_polynomial(form, J=None, F=None, tol=1e-12):
    """p(z) = sum_k a_k z^k with a_k = Omega^{k, n-k}(w), so that
    Omega(exp(theta J) w) = exp(-i n theta) p(exp(2 i theta)).
    """
    _require_middle(form)
    n = form.n
    cs = as_complex_structure(standard_j(n) if J is None else J)
    F = standard_frame(n) if F is None else as_frame(F)
    parts = type_decompose(form, cs)
    a = np.array([eval_on_frame(parts[(k, n - k)], F.F) for k in range(n + 1)])
    top = np.abs(a).max()
    if top <= tol * max(form.norm(), 1e-300):
        raise DomainError("degenerate", "form vanishes along the whole loop")
    a = np.where(np.abs(a) <= tol * top, 0.0, a)  # round-off of the type projection
    if a[n] == 0:
        return LoopPolynomial(a, np.array([]), False)
    roots = np.roots(a[::-1])
    return LoopPolynomial(a, roots, bool(np.all(np.abs(roots) < 1)))


def retraction_path(form, J=None, t=1.0, check=True):
    """sum_q t^q Omega^{n-q, q}; t = 1 gives Omega, t = 0 its (n, 0) part."""
    n = form.n
    if check:
        rep = is_member(form)
        if not rep.is_member or rep.sign != 1:
            raise DomainError("not_u_plus", "retraction_path needs a member of U^+")
    cs = as_complex_structure(standard_j(n) if J is None else J)
    parts = type_decompose(form, cs)
    out = parts[(n, 0)]
    for q in range(1, n + 1):
        out = out + (t ** q) * parts[(n - q, q)]
    return out


# ---------------------------------------------------------------------------
# minimisation over compatible complex structures


@lru_cache(maxsize=None)
def _derivation_mats(n):
    """Dense matrices of the derivation action of each p_basis element on n-forms."""
    src, dst, jj, ii, sg = _derivation_table(n, n)
    size = len(basis_rows(n, n))
    mats = []
    for P in p_basis(n):
        M = np.zeros((size, size))
        np.add.at(M, (dst, src), sg * P[jj, ii])
        mats.append(M)
    out = np.array(mats)
    out.setflags(write=False)
    return out


def git_gradient(form):
    """Gradient of |g^* Omega|^2 at g = identity in the p_basis coordinates."""
    v = form.vec
    Dv = np.einsum("kij,j->ki", _derivation_mats(form.n), v)
    return 2 * (np.conj(v)[None, :] * Dv).sum(axis=1).real


def git_minimize(form, max_iter=2000, tol=1e-10):
    """Descend |g^* Omega|^2 over g = exp(X_1) exp(X_2) ..., X_i symmetric in sp.

    Gradient steps with Armijo backtracking (initial step 1, factor 1/2,
    c = 1e-4) on the objective normalised by its starting value.  Returns
    the minimising structure J* = g J0 g^{-1}, for which Omega has the types
    that g^* Omega has for the standard J0.
    """
    _require_middle(form)
    n = form.n
    mats = _derivation_mats(n)
    basis = p_basis(n)
    g = np.eye(2 * n)
    cur = form
    N0 = cur.norm() ** 2
    if N0 == 0:
        raise DomainError("zero", "git_minimize needs a nonzero form")
    val = 1.0
    history = [N0]
    converged = False
    suspect = False
    gnorm = np.inf
    it = 0
    for it in range(max_iter + 1):
        v = cur.vec
        grad = 2 * (np.conj(v)[None, :] * np.einsum("kij,j->ki", mats, v)).sum(axis=1).real / N0
        gnorm = float(np.linalg.norm(grad))
        if gnorm < tol * val:
            converged = True
            break
        if it == max_iter:
            break
        step = 1.0
        while True:
            X = -step * np.tensordot(grad, basis, axes=1)
            E = expm(X)
            trial = group_act(E, cur)
            tval = trial.norm() ** 2 / N0
            if tval <= val - 1e-4 * step * gnorm ** 2:
                break
            step *= 0.5
            if step < 1e-20:
                break
        if step < 1e-20:
            converged = gnorm < 1e3 * tol * val
            break
        g = g @ E
        cur = trial
        val = tval
        history.append(val * N0)
        if val < 1e-12:
            suspect = True
            break
    J = ComplexStructureData(g @ standard_j(n) @ np.linalg.inv(g))
    return GitResult(J, g, cur, val * N0, gnorm, it, tuple(history), converged, suspect)


def classify_geometricity(form, tol=1e-6):
    """geometric: only (n,0) survives at the minimiser; almost_geometric: (n,0) and (0,n)."""
    git = git_minimize(form)
    if git.suspected_non_member:
        raise DomainError("non_member", "norm escapes to zero; form is not a member")
    n = form.n
    parts = type_decompose(git.form)
    scale = git.form.norm()
    rest = [parts[(p, n - p)].norm() for p in range(n)]
    res_geom = float(np.sqrt(sum(r ** 2 for r in rest))) / scale
    res_ag = float(np.sqrt(sum(r ** 2 for r in rest[1:]))) / scale
    if res_geom < tol:
        kind = "geometric"
    elif res_ag < tol:
        kind = "almost_geometric"
    else:
        kind = "plain"
    return Geometricity(kind, res_geom, res_ag, git)


# ---------------------------------------------------------------------------
# six dimensions: Hitchin partner and normal form


def hitchin_partner(alpha, tol=1e-8):
    """(J, Omega) with Omega of type (3,0) for J and Re(Omega) = alpha."""
    if alpha.n != 3 or alpha.k != 3:
        raise DomainError("dimension", "hitchin_partner needs a 3-form on R^6")
    if not alpha.is_real():
        raise DomainError("complex", "hitchin_partner needs a real 3-form")
    alpha = alpha.real
    qi = q_invariants(alpha)
    if not qi.is_positive_definite(1e-12):
        raise DomainError("q_indefinite", "q is not positive definite")
    J = qi.K / qi.d ** (1.0 / 6.0)
    if np.linalg.eigvalsh(0.5 * (omega_matrix(3) @ J + (omega_matrix(3) @ J).T))[0] <= 0:
        J = -J
    cs = ComplexStructureData(J, tol=1e-6)
    T = to_tensor(alpha).real
    hat = from_tensor(np.einsum("dbc,da->abc", T, cs.J), 3).real
    best = None
    for s in (1, -1):
        cand = alpha + (-1j * s) * hat
        parts = type_decompose(cand, cs)
        res = sum(parts[(p, 3 - p)].norm() for p in range(3)) / cand.norm()
        if best is None or res < best[0]:
            best = (res, cand)
    res, out = best
    if res > tol:
        raise DomainError("hitchin_failed", f"type (3,0) residual {res:.3g}")
    return cs, ExteriorForm(3, 3, alpha.vec + 1j * out.vec.imag)


def _sqrt_inv_spd(G):
    w, v = np.linalg.eigh(0.5 * (G + G.T))
    return (v / np.sqrt(w)) @ v.T


def lambda_form(lambdas):
    """wedge_k (lambda_k dx_k + i dy_k)."""
    n = len(lambdas)
    rows = []
    for k, lam in enumerate(lambdas):
        row = np.zeros(2 * n, dtype=complex)
        row[k] = lam
        row[n + k] = 1j
        rows.append(one_form(n, row))
    return wedge_all(rows)


def normal_form_build(c1, c2, lambdas):
    """Re(c1 dZ) + i Im(c2 wedge_k (lambda_k dx_k + i dy_k))."""
    a = (c1 * dZ(len(lambdas))).real
    b = (c2 * lambda_form(lambdas)).imag
    return ExteriorForm(a.n, a.k, a.vec + 1j * b.vec)


def _unitary_frame_for(G, J0, n):
    """Orthonormal v_1..v_n with G v = lambda v (lambda <= 1), completed by J0 v."""
    w, v = np.linalg.eigh(0.5 * (G + G.T))
    chosen = []
    lams = []
    for idx in range(2 * n):
        x = v[:, idx].copy()
        for c in chosen:
            x -= c * (c @ x) + (J0 @ c) * ((J0 @ c) @ x)
        nrm = np.linalg.norm(x)
        if nrm < 0.5:
            continue
        x /= nrm
        chosen.append(x)
        lams.append(w[idx])
        if len(chosen) == n:
            break
    V = np.array(chosen).T
    return np.hstack([V, J0 @ V]), np.array(lams)


def normal_form_u3(form, check=True, tol=1e-6):
    """Coordinates in which Omega = Re(c1 dZ) + i Im(c2 wedge(lambda_k dx_k + i dy_k)).

    Returns NormalForm(c1, c2, lambdas ascending in (0, 1], g) with
    g^* Omega equal to the normal form.  Status is "inconclusive" when the
    reconstruction residual exceeds tol * |Omega|.
    """
    _require_middle(form, 3)
    if check:
        rep = is_member(form)
        if not rep.is_member:
            raise DomainError("non_member", "normal_form_u3 needs a member")
    J0 = standard_j(3)
    W = omega_matrix(3)
    J1, _ = hitchin_partner(form.real)
    h = _sqrt_inv_spd(W @ J1.J)
    if np.abs(h @ J0 @ np.linalg.inv(h) - J1.J).max() > 1e-6:
        h = np.linalg.inv(h)
    mid = group_act(h, form)
    J2, _ = hitchin_partner(mid.imag)
    u, lams = _unitary_frame_for(W @ J2.J, J0, 3)
    g = h @ u
    lams = np.clip(lams, None, 1.0)
    out = group_act(g, form)
    basis_re = [dZ(3).real, -dZ(3).imag]
    lf = lambda_form(lams)
    basis_im = [lf.imag, lf.real]
    A = np.array([basis_re[0].vec.real, basis_re[1].vec.real, np.zeros(20), np.zeros(20)]).T
    A2 = np.array([np.zeros(20), np.zeros(20), basis_im[0].vec.real, basis_im[1].vec.real]).T
    M = np.vstack([A, A2])
    rhs = np.concatenate([out.vec.real, out.vec.imag])
    coef, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    c1 = complex(coef[0], coef[1])
    c2 = complex(coef[2], coef[3])
    if not 0 <= np.angle(c1) < np.pi:
        g = -g
        c1, c2 = -c1, -c2
    rec = normal_form_build(c1, c2, lams)
    res = float(np.linalg.norm(group_act(g, form).vec - rec.vec))
    status = "ok" if res < tol * form.norm() else "inconclusive"
    return NormalForm(c1, c2, tuple(float(x) for x in lams), g, res, status)


# ---------------------------------------------------------------------------
# reduction and products


def symplectic_complement(W):
    """Basis of {v : omega(w, v) = 0 for all w in span W}."""
    W = np.asarray(W, dtype=float)
    M = W.T @ omega_matrix(W.shape[0] // 2)
    _, s, vh = np.linalg.svd(M)
    rank = int(np.sum(s > 1e-10 * max(1.0, s[0] if s.size else 1.0)))
    return vh[rank:].T


def _symplectic_basis(P, n_out):
    """Greedy symplectic Gram-Schmidt on the columns of P (projected coordinate vectors)."""
    Wm = omega_matrix(P.shape[0] // 2)
    cands = [P[:, i].copy() for i in range(P.shape[1])]
    es, fs = [], []
    while len(es) < n_out:
        pick = next((i for i, c in enumerate(cands) if np.linalg.norm(c) > 0.5), None)
        if pick is None:
            raise DomainError("degenerate", "quotient is not symplectic")
        e = cands.pop(pick)
        om = [abs(e @ Wm @ c) for c in cands]
        j = int(np.argmax(om))
        f = cands.pop(j)
        f = f / (e @ Wm @ f)
        es.append(e)
        fs.append(f)
        cands = [c - (c @ Wm @ f) * e + (c @ Wm @ e) * f for c in cands]
    return np.array(es + fs).T


def reduce(form, W, nu):
    """The form nu -| Omega restricted to W, written in a symplectic basis of W / W^perp."""
    _require_middle(form)
    n = form.n
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != 2 * n:
        raise DomainError("shape", "W must be a 2n x m frame")
    perp = symplectic_complement(W)
    j = perp.shape[1]
    if W.shape[1] != 2 * n - j or np.linalg.matrix_rank(np.hstack([W, perp]), tol=1e-9) != W.shape[1]:
        raise DomainError("not_coisotropic", "W is not coisotropic")
    if not isinstance(nu, Multivector) or nu.k != j or nu.n != n:
        raise DomainError("shape", f"nu must be a degree-{j} multivector")
    if j == 0:
        return form * complex(nu.vec[0])
    ref = multivector_from_frame(perp)
    ratio = complex(np.vdot(ref.vec, nu.vec)) / np.vdot(ref.vec, ref.vec)
    if nu.norm() == 0 or np.linalg.norm(nu.vec - ratio * ref.vec) > 1e-9 * nu.norm():
        raise DomainError("bad_nu", "nu does not span Det(W^perp)")
    if j == n:
        raise DomainError("shape", "W is Lagrangian; the quotient is zero-dimensional")
    Q, _ = np.linalg.qr(W)
    Q = Q[:, : W.shape[1]]
    Pp, _ = np.linalg.qr(perp)
    C = Q - Pp @ (Pp.T @ Q)  # complement of W^perp inside W
    U, s, _ = np.linalg.svd(C, full_matrices=False)
    Cb = U[:, : 2 * (n - j)]
    proj = Cb @ Cb.T
    B = _symplectic_basis(proj, n - j)
    contracted = interior_contract(nu, form)
    m = n - j
    rows = basis_rows(m, m)
    frames = np.ascontiguousarray(np.transpose(B[:, rows], (1, 0, 2)))
    return ExteriorForm(m, m, eval_on_frames(contracted, frames))


def standard_coisotropic(n, k):
    """W = span of all coordinate vectors except d/dy_1..d/dy_k, nu = d/dx_1 ^ .. ^ d/dx_k."""
    keep = [i for i in range(2 * n) if not n <= i < n + k]
    W = np.eye(2 * n)[:, keep]
    nu = multivector_from_frame(np.eye(2 * n)[:, :k])
    return W, nu


def product(form1, form2):
    """p1^* Omega1 ^ p2^* Omega2 on R^{2(n1 + n2)}."""
    _require_middle(form1)
    _require_middle(form2)
    n1, n2 = form1.n, form2.n
    N = n1 + n2

    def embed(form, offset):
        n = form.n

        def mp(i):
            return offset + i if i <= n else N + offset + (i - n)

        return ExteriorForm(N, form.k, {tuple(mp(i) for i in key): c for key, c in form.coeffs.items()})

    return wedge(embed(form1, 0), embed(form2, n1))


# ---------------------------------------------------------------------------
# constructions


def ag_form(c1, c2, n):
    """c1 dZ + c2 dZbar."""
    return c1 * dZ(n) + c2 * dZbar(n)


def ag_margin(c1, c2):
    """Exact min of |c1 dZ(w) + c2 dZbar(w)| over unit Lagrangian w."""
    return abs(abs(c1) - abs(c2))


def random_ag_member(n, rng, transport=True):
    """g^*(c1 dZ + c2 dZbar) with |c2| < |c1|: almost geometric, in U^+."""
    c1 = np.exp(2j * np.pi * rng.random()) * rng.uniform(0.5, 2.0)
    c2 = c1 * rng.uniform(0.0, 0.8) * np.exp(2j * np.pi * rng.random())
    form = ag_form(c1, c2, n)
    if transport:
        form = group_act(random_symplectic(n, rng), form)
    return form


def random_u3_member(rng, transport=True, max_tries=1000):
    """Member of U^+(3) of normal form type, certified by a perturbation bound.

    With c1, c2 chosen so that Re(c1 dZ) + i Im(c2 dZ) is almost geometric
    with margin m0, the lambda-deformation E changes |Omega(w)| by at most
    |E| on unit w, so |E| < m0 certifies membership.
    """
    for _ in range(max_tries):
        c1 = np.exp(2j * np.pi * rng.random()) * rng.uniform(0.5, 2.0)
        c2 = c1 * rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(-np.pi / 3, np.pi / 3))
        lams = np.sort(rng.uniform(0.7, 1.0, size=3))
        base = normal_form_build(c1, c2, (1.0, 1.0, 1.0))
        form = normal_form_build(c1, c2, lams)
        m0 = 0.5 * (abs(c1 + c2) - abs(c1 - c2))
        if np.linalg.norm(form.vec - base.vec) < 0.9 * m0:
            if transport:
                form = group_act(random_symplectic(3, rng), form)
            return form, (c1, c2, tuple(lams))
    raise RuntimeError("random_u3_member: rejection budget exhausted")


def random_primitive(n, rng):
    """Gaussian complex middle-degree form projected to its primitive part."""
    from lagform.exterior import primitive_part

    size = len(basis_rows(n, n))
    vec = rng.normal(size=size) + 1j * rng.normal(size=size)
    return primitive_part(ExteriorForm(n, n, vec))
