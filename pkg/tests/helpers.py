"""Independent oracles shared by the tests."""

from itertools import permutations

import numpy as np

from lagform.exterior import ExteriorForm, basis, eval_on_frame


def perm_sign(p):
    p = list(p)
    s = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def brute_eval(form, vectors):
    """form(v_1, .., v_k) from the Leibniz formula on each basis term."""
    total = 0j
    for tup, c in zip(basis(form.n, form.k), form.vec):
        if c == 0:
            continue
        acc = 0.0
        for p in permutations(range(form.k)):
            prod = float(perm_sign(p))
            for slot, j in enumerate(p):
                prod *= vectors[j][tup[slot]]
            acc += prod
        total += c * acc
    return total


def brute_wedge_eval(a, b, vectors):
    """(a ^ b)(v_1..v_{k+l}) = 1/(k! l!) sum_sigma sgn(sigma) a(..) b(..)."""
    from math import factorial

    k, l = a.k, b.k
    total = 0j
    for p in permutations(range(k + l)):
        va = [vectors[i] for i in p[:k]]
        vb = [vectors[i] for i in p[k:]]
        fa = eval_on_frame(a, np.array(va).T) if k else complex(a.vec[0])
        fb = eval_on_frame(b, np.array(vb).T) if l else complex(b.vec[0])
        total += perm_sign(p) * fa * fb
    return total / (factorial(k) * factorial(l))


def random_form(n, k, rng, real=False):
    size = len(basis(n, k))
    vec = rng.normal(size=size)
    if not real:
        vec = vec + 1j * rng.normal(size=size)
    return ExteriorForm(n, k, vec)
