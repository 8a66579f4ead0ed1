"""NumPy twin of ``_ckernels``.

Same arithmetic, same operation order, vectorised over the batch axis.  Used
when the compiled extension is unavailable or ``LAGFORM_PURE_PYTHON`` is set.
"""

import numpy as np


def _dets(sub):
    # sub: (..., k, k), modified in place.  Partial pivoting, first maximum wins.
    k = sub.shape[-1]
    lead = sub.shape[:-2]
    det = np.ones(lead)
    dead = np.zeros(lead, dtype=bool)
    if k == 0:
        return det
    idx = np.indices(lead)
    for j in range(k):
        col = np.abs(sub[..., j:, j])
        p = j + np.argmax(col, axis=-1)
        best = np.take_along_axis(col, (p - j)[..., None], axis=-1)[..., 0]
        dead |= best == 0.0
        swap = p != j
        if swap.any():
            rows_j = sub[..., j, :].copy()
            rows_p = sub[(*idx, p)].copy()
            sub[..., j, :] = np.where(swap[..., None], rows_p, rows_j)
            sub[(*idx, p)] = np.where(swap[..., None], rows_j, rows_p)
            det = np.where(swap, -det, det)
        piv = sub[..., j, j]
        det = det * piv
        safe = np.where(piv == 0.0, 1.0, piv)
        for r in range(j + 1, k):
            f = sub[..., r, j] / safe
            for c in range(j + 1, k):
                sub[..., r, c] = sub[..., r, c] - f * sub[..., j, c]
    return np.where(dead, 0.0, det)


def minors(rows, frames):
    """All selected k x k minors of a batch of frames, shape (batch, m)."""
    rows = np.asarray(rows, dtype=np.int64)
    frames = np.asarray(frames, dtype=np.float64)
    sub = frames[:, rows, :].copy()
    return _dets(sub)


def eval_on_frames(rows, cre, cim, frames):
    """Sum_i c_i det(frame[rows_i, :]) for every frame in the batch."""
    d = minors(rows, frames)
    nb = d.shape[0]
    re = np.zeros(nb)
    im = np.zeros(nb)
    for i in range(d.shape[1]):
        re = re + cre[i] * d[:, i]
        im = im + cim[i] * d[:, i]
    return re, im


def table_product(ia, ib, iout, sign, are, aim, bre, bim, nout):
    """out[iout[t]] += sign[t] * a[ia[t]] * b[ib[t]] in table order."""
    pre = are[ia] * bre[ib] - aim[ia] * bim[ib]
    pim = are[ia] * bim[ib] + aim[ia] * bre[ib]
    ore = np.zeros(nout)
    oim = np.zeros(nout)
    np.add.at(ore, iout, sign * pre)
    np.add.at(oim, iout, sign * pim)
    return ore, oim
