import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lagform.exterior import (
    ExteriorForm,
    Multivector,
    dx,
    dy,
    dZ,
    dZbar,
    eval_on_frames,
    primitivity_residual,
    wedge,
)
from lagform.lagrangian import (
    LagrangianFrame,
    PhaseSample,
    WindingError,
    decomposable_from_frame,
    loop_winding,
    min_abs_on_lgr,
    phase_samples,
    rotated_frames,
    sample_lagrangian,
    standard_frame,
)
from lagform.symplectic import group_act, omega_matrix, random_symplectic, random_unitary_real
from lagform.uspace import ag_form, s_matrix

seeds = st.integers(0, 2**32 - 1)


def dense_winding(form, F, points=100_000):
    """Oracle: plain unwrap over a very fine uniform grid."""
    thetas = np.linspace(0, 2 * np.pi, points + 1)
    vals = np.concatenate(
        [eval_on_frames(form, rotated_frames(F, chunk)) for chunk in np.array_split(thetas, 20)]
    )
    ph = np.unwrap(np.angle(vals))
    return (ph[-1] - ph[0]) / (2 * np.pi)


def test_frame_examples():
    for n in (1, 2, 3):
        w = decomposable_from_frame(standard_frame(n))
        assert w.coeffs == {tuple(range(1, n + 1)): 1.0}
    t = 0.4
    F = np.zeros((4, 2))
    F[0, 0], F[2, 0] = np.cos(t), np.sin(t)
    F[1, 1] = 1.0
    w = decomposable_from_frame(F)
    # cos t Dx1^Dx2 + sin t Dy1^Dx2 = cos t Dx1^Dx2 - sin t Dx2^Dy1
    expected = Multivector(2, 2, {(1, 2): np.cos(t), (2, 3): -np.sin(t)})
    assert w.allclose(expected, 1e-15)


def test_frame_errors():
    A = np.eye(2)
    B = np.array([[0.0, 1.0], [0.0, 0.0]])  # A^T B not symmetric
    with pytest.raises(ValueError):
        LagrangianFrame(np.vstack([A, B]))
    with pytest.raises(ValueError):
        LagrangianFrame(np.zeros((4, 2)))
    with pytest.raises(ValueError):
        LagrangianFrame(np.zeros((3, 2)))


@given(seeds, st.integers(1, 4))
def test_decomposables_are_primitive(seed, n):
    w = decomposable_from_frame(sample_lagrangian(n, seed))
    assert w.norm() > 0
    assert primitivity_residual(ExteriorForm(n, n, w.vec)) < 1e-10


@given(seeds, st.integers(1, 4))
def test_sampling(seed, n):
    a = sample_lagrangian(n, seed)
    b = sample_lagrangian(n, seed)
    assert np.array_equal(a.F, b.F)
    assert np.abs(a.F.T @ omega_matrix(n) @ a.F).max() < 1e-10
    assert np.abs(a.F.T @ a.F - np.eye(n)).max() < 1e-10


def test_dz_modulus_is_constant():
    frames = np.array([sample_lagrangian(2, s).F for s in range(1000)])
    vals = np.abs(eval_on_frames(dZ(2), frames))
    assert abs(vals.mean() - 1) < 1e-9
    assert np.abs(vals - 1).max() < 1e-9


def test_phase_samples():
    samples = phase_samples(dZ(2), standard_frame(2), samples=8)
    assert all(isinstance(s, PhaseSample) and abs(abs(s.value) - 1) < 1e-14 for s in samples)
    assert all(0 <= s.phase < np.pi for s in samples)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_winding_examples(n):
    assert loop_winding(dZ(n)) == n
    assert loop_winding(dZbar(n)) == -n
    assert loop_winding(dZ(n) + 2 * dZbar(n)) == -n
    assert loop_winding(dZ(n) + 0.5 * dZbar(n)) == n


def test_winding_matches_dense_oracle():
    F = standard_frame(3)
    for form in (dZ(3), dZ(3) + 2 * dZbar(3), dZ(3) + 0.9 * dZbar(3)):
        dense = dense_winding(form, F.F)
        assert abs(dense - round(dense)) < 1e-9
        assert loop_winding(form) == round(dense)


@given(seeds)
def test_winding_frame_independent(seed):
    form = dZ(2) + 0.3 * dZbar(2)
    assert loop_winding(form, sample_lagrangian(2, seed)) == 2


def test_winding_vanishing_loop():
    form = ExteriorForm(2, 2, dZ(2).vec.real)  # real: vanishes somewhere
    with pytest.raises(WindingError) as info:
        loop_winding(form)
    assert info.value.theta is not None


def test_min_abs_examples():
    m, frame = min_abs_on_lgr(dZ(3))
    assert abs(m - 1) < 1e-9
    alt = wedge(dx(2, 1), dx(2, 2)) - wedge(dy(2, 1), dy(2, 2)) + 1j * (
        wedge(dx(2, 1), dy(2, 2)) + wedge(dy(2, 1), dx(2, 2))
    )
    assert alt.allclose(dZ(2), 1e-15)
    assert abs(min_abs_on_lgr(alt)[0] - 1) < 1e-9
    m, frame = min_abs_on_lgr(dZ(2).real)
    assert m < 1e-8
    assert isinstance(frame, LagrangianFrame)


def test_min_abs_near_boundary():
    for n in (1, 2, 3):
        m, _ = min_abs_on_lgr(dZ(n) + 0.999 * dZbar(n))
        assert abs(m - 0.001) < 1e-8


@pytest.mark.parametrize("seed", range(5))
def test_min_abs_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    form = ag_form(1.0, 0.4 * np.exp(1j * rng.random()), 2)
    form = group_act(random_symplectic(2, rng, 0.3), form)
    u = random_unitary_real(2, rng)
    a, _ = min_abs_on_lgr(form)
    b, _ = min_abs_on_lgr(group_act(u, form))
    assert abs(a - b) < 1e-6


def test_min_abs_s_certified_members():
    rng = np.random.default_rng(11)
    count = 0
    while count < 200:
        c = rng.normal(size=5) + 1j * rng.normal(size=5)
        form = _primitive2(c)
        S = s_matrix(form)
        if S.min_eig < 1e-3 * form.norm() ** 2:
            continue
        count += 1
        assert min_abs_on_lgr(form, restarts=16, seed=count)[0] > 1e-6


def test_min_abs_boundary_instances():
    rng = np.random.default_rng(12)
    for _ in range(20):
        r = rng.uniform(0.5, 2)
        form = ag_form(r, r * np.exp(2j * np.pi * rng.random()), 2)
        assert min_abs_on_lgr(form, restarts=16)[0] < 1e-3


def _primitive2(c):
    # basis of primitive 2-forms on R^4: dx1^dx2, dy1^dy2, dx1^dy2, dx2^dy1, dx1^dy1 - dx2^dy2
    b = [
        wedge(dx(2, 1), dx(2, 2)),
        wedge(dy(2, 1), dy(2, 2)),
        wedge(dx(2, 1), dy(2, 2)),
        wedge(dx(2, 2), dy(2, 1)),
        wedge(dx(2, 1), dy(2, 1)) - wedge(dx(2, 2), dy(2, 2)),
    ]
    out = b[0] * c[0]
    for ci, bi in zip(c[1:], b[1:]):
        out = out + bi * ci
    return out
