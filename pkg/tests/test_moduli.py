import numpy as np
import pytest

from lagform.exterior import dZ, dZbar
from lagform.moduli import (
    SHIFT,
    PlaneAction,
    f_invariant,
    flow,
    gl2_act,
    normalize_unit_volume,
    random_sl2,
    sample_csv,
    sample_members,
    shift_check,
)
from lagform.symplectic import group_act, random_symplectic
from lagform.uspace import DomainError, classify_geometricity, is_member, random_u3_member, vol_ratio


def rot(t):
    return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])


@pytest.fixture(scope="module")
def members():
    rng = np.random.default_rng(21)
    return [random_u3_member(rng)[0] for _ in range(10)]


def test_shift_constant():
    assert SHIFT == pytest.approx(8.317766166719, abs=1e-12)


def test_gl2_examples():
    f = dZ(3) + 0.3j * dZbar(3)
    assert gl2_act(np.eye(2), f).allclose(f, 0)
    for t in (0.3, 2.0, -1.1):
        assert gl2_act(rot(t), f).allclose(f * np.exp(1j * t), 1e-14)
    assert vol_ratio(gl2_act(np.diag([2.0, 0.5]), f)) == pytest.approx(vol_ratio(f), abs=1e-10)
    with pytest.raises(ValueError):
        PlaneAction(np.diag([1.0, -1.0]))


def test_gl2_commutes_with_sp():
    rng = np.random.default_rng(22)
    f = dZ(2) + 0.4 * dZbar(2)
    A = rng.normal(size=(2, 2))
    A[0] *= np.sign(np.linalg.det(A))
    g = random_symplectic(2, rng)
    assert gl2_act(A, group_act(g, f)).allclose(group_act(g, gl2_act(A, f)), 1e-12)


def test_sl2_volume_invariance(members):
    rng = np.random.default_rng(23)
    f = members[0]
    for _ in range(20):
        A = random_sl2(rng)
        assert abs(vol_ratio(gl2_act(A, f)) - vol_ratio(f)) < 1e-10 * max(1.0, vol_ratio(f))


def test_membership_stable_under_plane_actions(members):
    rng = np.random.default_rng(24)
    for f in members[:3]:
        for _ in range(10):
            A = random_sl2(rng) * np.exp(rng.normal())
            rep = is_member(gl2_act(A, f), restarts=16)
            assert rep.is_member and rep.sign == 1


def test_normalize_examples(members):
    assert normalize_unit_volume(dZ(3)).allclose(dZ(3), 1e-15)
    assert normalize_unit_volume(2 * dZ(3)).allclose(dZ(3), 1e-15)
    for f in members:
        u = normalize_unit_volume(f)
        assert abs(vol_ratio(u) - 1) < 1e-10
        assert normalize_unit_volume(u).allclose(u, 1e-12)
    with pytest.raises(DomainError):
        normalize_unit_volume(dZbar(3))


def test_f_examples():
    # q(Re dZ) = 2 I and K = W q, so d = det(2 W) = 64
    assert f_invariant(dZ(3)) == pytest.approx(np.log(64.0), abs=1e-12)
    assert f_invariant(2 * dZ(3)) - f_invariant(dZ(3)) == pytest.approx(SHIFT, abs=1e-12)
    rng = np.random.default_rng(25)
    f = group_act(random_symplectic(3, rng), dZ(3) + 0.4 * dZbar(3))
    for _ in range(20):
        g = random_symplectic(3, rng)
        assert abs(f_invariant(group_act(g, f)) - f_invariant(f)) < 1e-9
    with pytest.raises(DomainError):
        f_invariant(dZ(2))


def test_shift_examples(members):
    for f in members:
        assert abs(shift_check(f) - SHIFT) < 1e-9
        assert abs(shift_check(f, -1) + SHIFT) < 1e-9
        for k in (2, 5, 10):
            assert abs(shift_check(f, k) - k * SHIFT) < 1e-8


def test_flow_drift(members):
    f = members[1]
    f0 = f_invariant(f)
    for k in range(1, 11):
        assert abs(f_invariant(flow(f, k * np.log(2))) - f0 - k * SHIFT) < 1e-8


def test_sample_geometric():
    samples, rate = sample_members(4, seed=1, strategy="geometric")
    assert rate == 1.0
    for s in samples:
        assert abs(vol_ratio(s.form) - 1) < 1e-10 and s.normalized
        assert abs(s.delta_f - SHIFT) < 1e-9
        assert classify_geometricity(s.form).kind == "geometric"
    again, _ = sample_members(4, seed=1, strategy="geometric")
    assert all(a.form.allclose(b.form, 0) for a, b in zip(samples, again))


def test_sample_ag_and_perturbed():
    samples, _ = sample_members(3, seed=2, strategy="ag")
    assert all(classify_geometricity(s.form).kind == "almost_geometric" for s in samples)
    samples, rate = sample_members(3, seed=3, strategy="perturbed", restarts=16)
    assert rate > 0 and len(samples) == 3
    with pytest.raises(ValueError):
        sample_members(1, seed=0, strategy="uniform")


def test_sample_csv():
    samples, _ = sample_members(2, seed=4)
    lines = sample_csv(samples, with_geometricity=True).splitlines()
    assert lines[0] == "sample_id,strategy,f,delta_f_after_T,geometricity,accepted,seed"
    assert lines[1].split(",")[4] == "geometric"
    assert len(lines) == 3
