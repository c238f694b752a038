"""Pure numpy versions of the hot kernels (used when the compiled core is absent)."""

import numpy as np

from .prob import entropy_of_mass, marginal_mass

_CHUNK_CELLS = 1 << 22


def typical_mask(codes, maps, offsets, targets, thr, first_only=False):
    """Strong-typicality verdict for each row of ``codes``.

    codes   : (K, n) int array of joint-cell indices, one row per candidate
    maps    : (n_subsets, n_cells) int array; ``maps[s, c]`` is the cell of
              subset ``s`` that joint cell ``c`` projects to
    offsets : (n_subsets + 1,) start of each subset's block in ``targets``
    targets : concatenated subset marginals
    thr     : strict bound on ``|N/n - P|``

    With ``first_only`` evaluation stops at the first typical row and every
    later row is reported as 0.
    """
    codes = np.asarray(codes, dtype=np.int64)
    maps = np.asarray(maps, dtype=np.int64)
    offsets = np.asarray(offsets, dtype=np.int64)
    targets = np.asarray(targets, dtype=float)
    K, n = codes.shape
    n_cells = maps.shape[1]
    out = np.zeros(K, dtype=np.uint8)
    if K == 0:
        return out
    projectors = []
    for s in range(maps.shape[0]):
        size = offsets[s + 1] - offsets[s]
        proj = np.zeros((n_cells, size))
        proj[np.arange(n_cells), maps[s]] = 1.0
        projectors.append((proj, targets[offsets[s]:offsets[s + 1]]))
    step = max(1, _CHUNK_CELLS // max(n_cells, n))
    for lo in range(0, K, step):
        hi = min(K, lo + step)
        k = hi - lo
        flat = (np.arange(k)[:, None] * n_cells + codes[lo:hi]).ravel()
        counts = np.bincount(flat, minlength=k * n_cells).reshape(k, n_cells).astype(float)
        ok = np.ones(k, dtype=bool)
        for proj, p in projectors:
            freq = counts @ proj / n
            ok &= (np.abs(freq - p) < thr).all(axis=1)
        out[lo:hi] = ok
        if first_only and ok.any():
            first = lo + int(np.argmax(ok))
            out[first + 1:] = 0
            break
    return out


def pentagon_terms(joint):
    """(H(X1|V), I(U;Y|V,X1), I(U;S|V), I(V,U,X1;Y)) for a (V,S,U,X1,X2,Y) table."""
    m = np.asarray(joint, dtype=float).sum(axis=4)  # -> (V, S, U, X1, Y)
    V, S, U, X1, Y = 0, 1, 2, 3, 4

    def h(*axes):
        return entropy_of_mass(marginal_mass(m, axes))

    h_v = h(V)
    h_vx1 = h(V, X1)
    h_vx1u = h(V, X1, U)
    return (
        h_vx1 - h_v,
        h_vx1u + h(V, X1, Y) - h(V, X1, U, Y) - h_vx1,
        h(V, U) + h(V, S) - h(V, U, S) - h_v,
        h_vx1u + h(Y) - h(V, X1, U, Y),
    )
