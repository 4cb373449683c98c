"""Pure-Python block Thomas elimination for 2x2 blocks (fallback kernel)."""

import math

import numpy as np

from .errors import SingularSystem


def block_thomas(lower, diag, upper, rhs, cond_cap=1e12):
    """Solve the acyclic block-tridiagonal system ``L_j x_{j-1} + D_j x_j + U_j x_{j+1} = b_j``.

    ``lower[0]`` and ``upper[-1]`` are ignored. ``rhs`` has shape ``(N, 2, k)``.
    Each pivot block is inverted explicitly and rejected when its Frobenius
    condition number exceeds ``cond_cap``.
    """
    lower = np.asarray(lower, dtype=float).tolist()
    diag = np.asarray(diag, dtype=float).tolist()
    upper = np.asarray(upper, dtype=float).tolist()
    B = np.asarray(rhs, dtype=float)
    n, _, k = B.shape
    b = B.tolist()

    inv = [None] * n  # inverses of the modified pivots
    cu = [None] * n  # D'^{-1} U
    y = [None] * n  # D'^{-1} b'

    for j in range(n):
        (d00, d01), (d10, d11) = diag[j]
        b0, b1 = list(b[j][0]), list(b[j][1])
        if j:
            (l00, l01), (l10, l11) = lower[j]
            (c00, c01), (c10, c11) = cu[j - 1]
            d00 -= l00 * c00 + l01 * c10
            d01 -= l00 * c01 + l01 * c11
            d10 -= l10 * c00 + l11 * c10
            d11 -= l10 * c01 + l11 * c11
            yp0, yp1 = y[j - 1]
            for c in range(k):
                b0[c] -= l00 * yp0[c] + l01 * yp1[c]
                b1[c] -= l10 * yp0[c] + l11 * yp1[c]
        det = d00 * d11 - d01 * d10
        fro2 = d00 * d00 + d01 * d01 + d10 * d10 + d11 * d11
        # ||D||_F ||D^-1||_F = ||D||_F^2 / |det| for 2x2 blocks
        if det == 0.0 or not math.isfinite(det) or fro2 / abs(det) > cond_cap:
            raise SingularSystem(f"pivot block {j} is singular or ill-conditioned (det={det:.3e})")
        i00, i01, i10, i11 = d11 / det, -d01 / det, -d10 / det, d00 / det
        inv[j] = (i00, i01, i10, i11)
        if j < n - 1:
            (u00, u01), (u10, u11) = upper[j]
            cu[j] = ((i00 * u00 + i01 * u10, i00 * u01 + i01 * u11),
                     (i10 * u00 + i11 * u10, i10 * u01 + i11 * u11))
        y[j] = ([i00 * b0[c] + i01 * b1[c] for c in range(k)],
                [i10 * b0[c] + i11 * b1[c] for c in range(k)])

    x = np.empty((n, 2, k))
    x0, x1 = y[n - 1]
    x[n - 1, 0], x[n - 1, 1] = x0, x1
    for j in range(n - 2, -1, -1):
        (c00, c01), (c10, c11) = cu[j]
        y0, y1 = y[j]
        x0, x1 = ([y0[c] - (c00 * x0[c] + c01 * x1[c]) for c in range(k)],
                  [y1[c] - (c10 * x0[c] + c11 * x1[c]) for c in range(k)])
        x[j, 0], x[j, 1] = x0, x1
    return x
