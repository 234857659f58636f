# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-pixel kernel for the weighted multi-matrix correction.

Mirrors ncolor._kernel_numpy.ncb_apply; kept in lockstep by the backend
equivalence tests. Releases the GIL over the pixel loop so row bands
can run on a thread pool.
"""

from libc.math cimport sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()


def ncb_apply(double[:, ::1] pixels, double[:, ::1] targets,
              double[:, :, ::1] matrices, double y_eps):
    cdef Py_ssize_t npix = pixels.shape[0]
    cdef Py_ssize_t n = targets.shape[0]
    if pixels.shape[1] != 3 or targets.shape[1] != 3:
        raise ValueError("pixels and targets must have shape (*, 3)")
    if matrices.shape[0] != n or matrices.shape[1] != 3 or matrices.shape[2] != 3:
        raise ValueError("matrices must have shape (n, 3, 3)")
    if n == 0:
        raise ValueError("at least one target is required")

    out_arr = np.empty((npix, 3), dtype=np.float64)
    work = np.empty((3, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] tx = work[0]
    cdef double[::1] tz = work[1]
    cdef double[::1] d = work[2]

    cdef Py_ssize_t i, m, zero_at
    cdef double x, y, z, yp, px, pz, dx, dz, dsum, dpsum, w
    cdef double b00, b01, b02, b10, b11, b12, b20, b21, b22

    for m in range(n):
        yp = targets[m, 1]
        if yp < y_eps:
            yp = y_eps
        tx[m] = targets[m, 0] / yp
        tz[m] = targets[m, 2] / yp

    with nogil:
        for i in range(npix):
            x = pixels[i, 0]
            y = pixels[i, 1]
            z = pixels[i, 2]
            yp = y
            if yp < y_eps:
                yp = y_eps
            px = x / yp
            pz = z / yp

            zero_at = -1
            dsum = 0.0
            for m in range(n):
                dx = px - tx[m]
                dz = pz - tz[m]
                d[m] = sqrt(dx * dx + dz * dz)
                dsum += d[m]
                if d[m] == 0.0 and zero_at < 0:
                    zero_at = m

            if zero_at >= 0:
                b00 = matrices[zero_at, 0, 0]
                b01 = matrices[zero_at, 0, 1]
                b02 = matrices[zero_at, 0, 2]
                b10 = matrices[zero_at, 1, 0]
                b11 = matrices[zero_at, 1, 1]
                b12 = matrices[zero_at, 1, 2]
                b20 = matrices[zero_at, 2, 0]
                b21 = matrices[zero_at, 2, 1]
                b22 = matrices[zero_at, 2, 2]
            else:
                dpsum = 0.0
                for m in range(n):
                    dpsum += dsum / d[m]
                b00 = b01 = b02 = b10 = b11 = b12 = b20 = b21 = b22 = 0.0
                for m in range(n):
                    w = (dsum / d[m]) / dpsum
                    b00 += w * matrices[m, 0, 0]
                    b01 += w * matrices[m, 0, 1]
                    b02 += w * matrices[m, 0, 2]
                    b10 += w * matrices[m, 1, 0]
                    b11 += w * matrices[m, 1, 1]
                    b12 += w * matrices[m, 1, 2]
                    b20 += w * matrices[m, 2, 0]
                    b21 += w * matrices[m, 2, 1]
                    b22 += w * matrices[m, 2, 2]

            out[i, 0] = b00 * x + b01 * y + b02 * z
            out[i, 1] = b10 * x + b11 * y + b12 * z
            out[i, 2] = b20 * x + b21 * y + b22 * z

    return out_arr
