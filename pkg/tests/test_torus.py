from fractions import Fraction
from itertools import combinations, product
from math import gcd

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lagform.exterior import ExteriorForm, dZ, dz
from lagform.lagrangian import min_abs_on_lgr
from lagform.symplectic import random_siegel_point, siegel_form
from lagform.torus import (
    CSV_COLUMNS,
    RationalTorus,
    central_charge,
    enumerate_lagrangian_classes,
    experiment_csv,
    hnf,
    integer_kernel,
    is_valid_class,
    make_class,
    saturation,
    systole,
    systolic_experiment,
    torus_volume,
)
from lagform.uspace import ag_form

HEX = np.exp(1j * np.pi / 3)


def plucker(F):
    n = F.shape[1]
    return [int(round(np.linalg.det(F[list(r)]))) for r in combinations(range(2 * n), n)]


def canon(p):
    p = list(p)
    first = next(x for x in p if x)
    return tuple(-x for x in p) if first < 0 else tuple(p)


def rref(rows):
    """Reduced row echelon form over Q."""
    M = [[Fraction(x) for x in row] for row in rows]
    r = 0
    for c in range(len(M[0])):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        M[r] = [x / M[r][c] for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                M[i] = [a - M[i][c] * b for a, b in zip(M[i], M[r])]
        r += 1
    return M


def line_form(tau):
    """dx + tau dy on R^2."""
    return ExteriorForm(1, 1, np.array([1.0, tau]))


# -- exact arithmetic --------------------------------------------------------


def test_hnf_and_kernel():
    assert hnf([[2, 4], [1, 3]]) == [[1, 1], [0, 2]]
    K = integer_kernel([[1, 2, 3]])
    assert len(K) == 2
    assert all(np.dot([1, 2, 3], k) == 0 for k in K)
    S = saturation(np.array([[2], [0]]))
    assert S.ravel().tolist() == [1, 0]
    S = saturation(np.array([[2, 0], [0, 2], [2, 2], [0, 0]]))
    assert gcd(*[abs(x) for x in plucker(S)]) == 1


@given(st.lists(st.integers(-5, 5), min_size=6, max_size=6))
def test_integer_kernel_property(entries):
    M = np.array(entries).reshape(2, 3)
    K = integer_kernel(M.tolist())
    rank = np.linalg.matrix_rank(M)
    assert len(K) == 3 - rank
    for k in K:
        assert not (M @ np.array(k)).any()
    if K:
        # saturated: gcd of the maximal minors of the kernel basis is 1
        Kt = np.array(K, dtype=float).T
        minors = [round(np.linalg.det(Kt[list(r)])) for r in combinations(range(3), len(K))]
        assert gcd(*[int(abs(x)) for x in minors]) == 1


def test_make_class_saturates():
    c = make_class(np.array([[2], [4]]))
    assert c.plucker == (1, 2)
    assert c.label() == "(1,2)"


# -- enumeration -------------------------------------------------------------


def test_n1_height1():
    classes = enumerate_lagrangian_classes(RationalTorus(1), 1)
    got = sorted(c.plucker for c in classes)
    brute = sorted({canon((p, q)) for p in (-1, 0, 1) for q in (-1, 0, 1) if gcd(p, q) == 1})
    assert got == brute == sorted([(1, 0), (0, 1), (1, 1), (1, -1)])


def test_n2_height1_matches_bruteforce():
    torus = RationalTorus(2)
    W = torus.omega_lattice()
    got = {c.plucker for c in enumerate_lagrangian_classes(torus, 1)}
    brute = {}
    for e in product((-1, 0, 1), repeat=8):
        F = np.array(e).reshape(4, 2)
        if (F.T @ W @ F).any():
            continue
        p = plucker(F)
        if gcd(*[abs(x) for x in p]) != 1:
            continue
        brute.setdefault(canon(p), F)
    # a saturated class has HNF height 1 exactly when its rational RREF has entries in {-1, 0, 1}
    height1 = {p for p, F in brute.items() if all(x in (-1, 0, 1) for row in rref(F.T.tolist()) for x in row)}
    assert got == height1
    assert len(got) == len(enumerate_lagrangian_classes(torus, 1))


@pytest.mark.parametrize("divisors", [(1, 1), (1, 2), (1, 3)])
def test_enumeration_invariants(divisors):
    torus = RationalTorus(2, divisors)
    classes = enumerate_lagrangian_classes(torus, 2)
    assert len({c.plucker for c in classes}) == len(classes)
    W = torus.omega_lattice()
    for c in classes:
        F = c.frame
        assert not (F.T @ W @ F).any()
        assert gcd(*[abs(x) for x in c.plucker]) == 1
        assert is_valid_class(c, torus)
        real = c.real_frame(torus)
        M, N = real[:2], real[2:]
        assert np.array_equal(M.T @ N, N.T @ M)


def test_torus_validation():
    with pytest.raises(ValueError):
        RationalTorus(2, (1, 3, 6))
    with pytest.raises(ValueError):
        RationalTorus(2, (2, 4))
    with pytest.raises(ValueError):
        RationalTorus(3, (1, 2, 3))
    assert RationalTorus(3, (1, 2, 4)).covolume() == 8


# -- central charge ------------------------------------------------------------


def test_central_charge_examples():
    (c10,) = [c for c in enumerate_lagrangian_classes(RationalTorus(1), 1) if c.plucker == (1, 0)]
    (c11,) = [c for c in enumerate_lagrangian_classes(RationalTorus(1), 1) if c.plucker == (1, 1)]
    assert central_charge(dz(1, 1), c10) == 1
    assert central_charge(dz(1, 1), c11) == 1 + 1j
    with pytest.raises(ValueError):
        central_charge(dZ(2), c10)


def test_siegel_consistency():
    rng = np.random.default_rng(0)
    classes = enumerate_lagrangian_classes(RationalTorus(2), 2)
    for _ in range(100):
        Z = random_siegel_point(2, rng)
        c = classes[rng.integers(len(classes))]
        M, N = c.frame[:2].astype(float), c.frame[2:].astype(float)
        assert abs(abs(central_charge(siegel_form(Z), c)) - abs(np.linalg.det(M + Z.Z @ N))) < 1e-9


# -- systole -----------------------------------------------------------------


def brute_sys1(tau, r=3):
    return min(abs(p + tau * q) for p in range(-r, r + 1) for q in range(-r, r + 1) if gcd(p, q) == 1)


def test_square_torus():
    res = systole(dz(1, 1))
    assert res.sys == 1 and res.certified
    assert res.witness.label() == "(1,0)"


def test_hexagonal_torus():
    form = line_form(HEX)
    res = systole(form)
    assert res.certified
    assert res.sys == pytest.approx(brute_sys1(HEX), abs=1e-12)
    assert res.sys == pytest.approx(1.0, abs=1e-12)
    vol = torus_volume(form, RationalTorus(1))
    assert vol == pytest.approx(np.sqrt(3) / 2, abs=1e-12)
    assert res.sys ** 2 / vol == pytest.approx(2 / np.sqrt(3), abs=1e-9)


@given(st.floats(-0.5, 0.5), st.floats(0.3, 3.0))
def test_n1_systole_matches_bruteforce(x, y):
    tau = complex(x, y)
    res = systole(line_form(tau), restarts=8)
    assert res.certified
    assert res.sys == pytest.approx(brute_sys1(tau, 8), abs=1e-12)


def test_scaling():
    rng = np.random.default_rng(1)
    form = siegel_form(random_siegel_point(2, rng))
    a = systole(form)
    for lam in (0.5, 3.0):
        b = systole(form * lam)
        assert b.sys == pytest.approx(lam * a.sys, rel=1e-14)
        assert b.witness.plucker == a.witness.plucker


def test_doubled_cap_stability_and_support():
    rng = np.random.default_rng(2)
    for i in range(6):
        Z = random_siegel_point(2, rng, 0.3)
        form = siegel_form(Z)
        if i % 2:
            form = form + 0.5 * np.exp(1j * i) * form.conj()
        res = systole(form)
        assert res.certified
        again = systole(form, radius_cap=32.0)
        assert again.sys == res.sys and again.witness.plucker == res.witness.plucker
        assert res.support_ratio >= res.m * (1 - 1e-6)


def test_support_over_enumerated_classes():
    form = line_form(0.3 + 1.1j)
    m, _ = min_abs_on_lgr(form)
    torus = RationalTorus(1)
    for c in enumerate_lagrangian_classes(torus, 6):
        assert abs(central_charge(form, c)) >= m * c.norm(torus) * (1 - 1e-6)


def test_non_member_is_uncertified():
    res = systole(dZ(2).real, radius_cap=2.0, restarts=8)
    assert not res.certified


# -- volume and experiments ---------------------------------------------------------


def test_volume_examples():
    assert torus_volume(dZ(3), RationalTorus(3)) == pytest.approx(1.0, abs=1e-12)
    assert torus_volume(2 * dZ(3), RationalTorus(3)) == pytest.approx(4.0, abs=1e-12)
    tau = 0.2 + 1.7j
    assert torus_volume(line_form(tau), RationalTorus(1)) == pytest.approx(tau.imag, abs=1e-12)
    assert torus_volume(dZ(2), RationalTorus(2, (1, 3))) == pytest.approx(3.0)


def test_n1_fundamental_domain_grid():
    ratios = []
    torus = RationalTorus(1)
    for x in np.linspace(-0.5, 0.5, 5):
        for y in np.linspace(0.0, 1.2, 5):
            tau = complex(x, np.sqrt(1 - x * x) + y)
            form = line_form(tau)
            res = systole(form, restarts=8)
            assert res.certified
            ratios.append(res.sys ** 2 / torus_volume(form, torus))
    assert max(ratios) == pytest.approx(2 / np.sqrt(3), abs=1e-9)


def test_ratio_scale_invariant():
    form = ag_form(1.0, 0.3, 2)
    torus = RationalTorus(2)
    a = systole(form).sys ** 2 / torus_volume(form, torus)
    b = systole(form * 2.5).sys ** 2 / torus_volume(form * 2.5, torus)
    assert a == pytest.approx(b, rel=1e-12)


def test_experiment_rows_and_csv():
    rows = systolic_experiment(1, 3, seed=4)
    assert [r["sample_id"] for r in rows] == [
        "geometric-0000", "ag-0000", "geometric-0001", "ag-0001", "geometric-0002", "ag-0002"
    ]
    assert all(r["certified"] and r["ratio"] <= 2 / np.sqrt(3) * 4 + 1e-9 for r in rows)
    text = experiment_csv(rows)
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 7
    assert lines[1].split(",")[5] == "true"
    assert rows == systolic_experiment(1, 3, seed=4)
