"""The GL+(2, R) action on (Re Omega, Im Omega), the unit-volume slice, the
invariant f = log|d_{Re Omega}| and its exact shift under diag(2, 1/2).
"""

import csv
import io
from dataclasses import dataclass

import numpy as np

from lagform.exterior import ExteriorForm
from lagform.symplectic import group_act, random_siegel_point, random_symplectic, siegel_form
from lagform.uspace import (
    DomainError,
    classify_geometricity,
    is_member,
    q_invariants,
    random_primitive,
    vol_ratio,
)

T_MATRIX = np.array([[2.0, 0.0], [0.0, 0.5]])
SHIFT = 12 * np.log(2.0)


@dataclass(frozen=True)
class PlaneAction:
    A: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.shape != (2, 2) or not np.all(np.isfinite(A)):
            raise ValueError("a plane action is a finite 2 x 2 matrix")
        if np.linalg.det(A) <= 0:
            raise ValueError("plane action needs positive determinant")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)


@dataclass(frozen=True)
class FlowSample:
    form: ExteriorForm
    f: float
    normalized: bool
    seed: int
    strategy: str = "geometric"
    delta_f: float = float("nan")
    geometricity: str = "unknown"
    accepted: bool = True


def gl2_act(A, form):
    """(Re, Im) -> A (Re, Im)."""
    A = A.A if isinstance(A, PlaneAction) else PlaneAction(A).A
    re, im = form.vec.real, form.vec.imag
    new_re = A[0, 0] * re + A[0, 1] * im
    new_im = A[1, 0] * re + A[1, 1] * im
    return ExteriorForm(form.n, form.k, new_re + 1j * new_im)


def normalize_unit_volume(form):
    v = vol_ratio(form)
    if not v > 0:
        raise DomainError("nonpositive_volume", f"vol_ratio {v:.6g} is not positive")
    return form * (1.0 / np.sqrt(v))


def f_invariant(form):
    """log |det K_{Re Omega}| on R^6; needs q_{Re Omega} positive definite."""
    if form.n != 3 or form.k != 3:
        raise DomainError("dimension", "f_invariant needs a 3-form on R^6")
    qi = q_invariants(form.real)
    if not qi.is_positive_definite(1e-12):
        raise DomainError("q_indefinite", "q of the real part is not positive definite")
    return float(np.log(abs(qi.d)))


def shift_check(form, power=1):
    """f(T^power Omega) - f(Omega) for T = diag(2, 1/2); equals power * 12 log 2."""
    A = np.diag([2.0 ** power, 2.0 ** (-power)])
    return f_invariant(gl2_act(A, form)) - f_invariant(form)


def flow(form, t):
    """The diagonal flow diag(e^t, e^-t)."""
    return gl2_act(np.diag([np.exp(t), np.exp(-t)]), form)


def random_sl2(rng, spread=0.5):
    """Random element of SL(2, R): rotation times positive diagonal times rotation."""

    def rot(a):
        return np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])

    s = np.exp(rng.normal() * spread)
    return rot(2 * np.pi * rng.random()) @ np.diag([s, 1 / s]) @ rot(2 * np.pi * rng.random())


def _geometric(rng):
    form = siegel_form(random_siegel_point(3, rng))
    return form * np.exp(2j * np.pi * rng.random())


def sample_members(count, seed, strategy="geometric", eps=0.5, scale=0.05, budget=20, restarts=32):
    """Non-uniform samples of the unit-volume slice in six dimensions.

    geometric: random Siegel point times a random phase; ag: geometric plus
    eps conj(Omega); perturbed: ag plus a random primitive perturbation of
    relative size `scale`.  Non-geometric strategies are filtered by
    is_member.  Geometricity is recorded where the construction fixes it.
    Returns (samples, acceptance rate).
    """
    if strategy not in ("geometric", "ag", "perturbed"):
        raise ValueError(f"unknown strategy {strategy!r}")
    out = []
    tried = 0
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        for _ in range(budget):
            tried += 1
            form = _geometric(rng)
            if strategy != "geometric":
                form = form + eps * np.exp(2j * np.pi * rng.random()) * form.conj()
            if strategy == "perturbed":
                pert = random_primitive(3, rng)
                form = form + (scale * form.norm() / pert.norm()) * pert
                rep = is_member(form, restarts=restarts, seed=seed)
                if not (rep.is_member and rep.sign == 1):
                    continue
            form = normalize_unit_volume(form)
            known = {"geometric": "geometric", "ag": "almost_geometric"}.get(strategy, "unknown")
            out.append(FlowSample(form, f_invariant(form), True, seed, strategy, shift_check(form), known))
            break
        else:
            raise RuntimeError(f"rejection budget exhausted: acceptance {len(out)}/{tried}")
    return out, len(out) / tried


def sample_csv(samples, with_geometricity=False):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("sample_id", "strategy", "f", "delta_f_after_T", "geometricity", "accepted", "seed"))
    for i, s in enumerate(samples):
        geo = classify_geometricity(s.form).kind if with_geometricity else s.geometricity
        w.writerow(
            [f"{s.strategy}-{i:04d}", s.strategy, f"{s.f:.12g}", f"{s.delta_f:.12g}", geo, "true" if s.accepted else "false", s.seed]
        )
    return buf.getvalue()


def transported(form, rng):
    return group_act(random_symplectic(form.n, rng), form)
