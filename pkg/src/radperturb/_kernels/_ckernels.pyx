# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot kernels; see ``_pykernels`` for the contracts."""

import numpy as np

from libc.math cimport sqrt

from .directions import DIRECTIONS, NEIGHBOURS

cdef int[:, ::1] _DIRS = np.array(DIRECTIONS, dtype=np.int32)
cdef int[:, ::1] _NBRS = np.array(NEIGHBOURS, dtype=np.int32)


def glcm_matrices(levels, int ng):
    cdef const int[:, :, ::1] lv = np.ascontiguousarray(levels, dtype=np.int32)
    out_arr = np.zeros((13, ng, ng), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t nx = lv.shape[0], ny = lv.shape[1], nz = lv.shape[2]
    cdef Py_ssize_t x, y, z, x2, y2, z2
    cdef int k, a, b, dx, dy, dz
    with nogil:
        for k in range(13):
            dx = _DIRS[k, 0]
            dy = _DIRS[k, 1]
            dz = _DIRS[k, 2]
            for x in range(nx):
                x2 = x + dx
                if x2 < 0 or x2 >= nx:
                    continue
                for y in range(ny):
                    y2 = y + dy
                    if y2 < 0 or y2 >= ny:
                        continue
                    for z in range(nz):
                        z2 = z + dz
                        if z2 < 0 or z2 >= nz:
                            continue
                        a = lv[x, y, z]
                        b = lv[x2, y2, z2]
                        if a > 0 and b > 0:
                            out[k, a - 1, b - 1] += 1.0
                            out[k, b - 1, a - 1] += 1.0
    return out_arr


def glrlm_matrices(levels, int ng):
    cdef const int[:, :, ::1] lv = np.ascontiguousarray(levels, dtype=np.int32)
    cdef Py_ssize_t nx = lv.shape[0], ny = lv.shape[1], nz = lv.shape[2]
    cdef Py_ssize_t max_run = max(nx, ny, nz)
    out_arr = np.zeros((13, ng, max_run), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t x, y, z, px, py, pz, qx, qy, qz, length
    cdef int k, a, dx, dy, dz
    with nogil:
        for k in range(13):
            dx = _DIRS[k, 0]
            dy = _DIRS[k, 1]
            dz = _DIRS[k, 2]
            for x in range(nx):
                for y in range(ny):
                    for z in range(nz):
                        a = lv[x, y, z]
                        if a <= 0:
                            continue
                        px = x - dx
                        py = y - dy
                        pz = z - dz
                        if 0 <= px < nx and 0 <= py < ny and 0 <= pz < nz:
                            if lv[px, py, pz] == a:
                                continue
                        length = 1
                        qx = x + dx
                        qy = y + dy
                        qz = z + dz
                        while 0 <= qx < nx and 0 <= qy < ny and 0 <= qz < nz and lv[qx, qy, qz] == a:
                            length += 1
                            qx += dx
                            qy += dy
                            qz += dz
                        out[k, a - 1, length - 1] += 1.0
    return out_arr


def neighbourhood_stats(levels):
    cdef const int[:, :, ::1] lv = np.ascontiguousarray(levels, dtype=np.int32)
    cdef Py_ssize_t nx = lv.shape[0], ny = lv.shape[1], nz = lv.shape[2]
    cdef const int[:, :, ::1] pad = np.pad(np.asarray(lv), 1)
    level_sum_arr = np.zeros((nx, ny, nz), dtype=np.float64)
    n_valid_arr = np.zeros((nx, ny, nz), dtype=np.int32)
    n_equal_arr = np.zeros((nx, ny, nz), dtype=np.int32)
    cdef double[:, :, ::1] level_sum = level_sum_arr
    cdef int[:, :, ::1] n_valid = n_valid_arr
    cdef int[:, :, ::1] n_equal = n_equal_arr
    cdef Py_ssize_t x, y, z
    cdef int k, a, b, nv, ne
    cdef double total
    with nogil:
        for x in range(nx):
            for y in range(ny):
                for z in range(nz):
                    a = lv[x, y, z]
                    if a <= 0:
                        continue
                    total = 0.0
                    nv = 0
                    ne = 0
                    for k in range(26):
                        b = pad[x + 1 + _NBRS[k, 0], y + 1 + _NBRS[k, 1], z + 1 + _NBRS[k, 2]]
                        if b > 0:
                            total += b
                            nv += 1
                            if b == a:
                                ne += 1
                    level_sum[x, y, z] = total
                    n_valid[x, y, z] = nv
                    n_equal[x, y, z] = ne
    return level_sum_arr, n_valid_arr, n_equal_arr


def slic_assign(image, centres, int half_window, double spatial_weight, labels, distance):
    cdef const double[:, :, ::1] img = image
    cdef const double[:, ::1] cen = np.ascontiguousarray(centres, dtype=np.float64)
    cdef long long[:, :, ::1] lab = labels
    cdef double[:, :, ::1] dist = distance
    cdef Py_ssize_t nx = img.shape[0], ny = img.shape[1], nz = img.shape[2]
    cdef Py_ssize_t k, x, y, z, x0, x1, y0, y1, z0, z1
    cdef double c, cx, cy, cz, fx, fy, fz, diff, ds, d
    with nogil:
        for k in range(cen.shape[0]):
            c = cen[k, 0]
            cx = cen[k, 1]
            cy = cen[k, 2]
            cz = cen[k, 3]
            x0 = max(<Py_ssize_t>cx - half_window, 0)
            x1 = min(<Py_ssize_t>cx + half_window + 1, nx)
            y0 = max(<Py_ssize_t>cy - half_window, 0)
            y1 = min(<Py_ssize_t>cy + half_window + 1, ny)
            z0 = max(<Py_ssize_t>cz - half_window, 0)
            z1 = min(<Py_ssize_t>cz + half_window + 1, nz)
            for x in range(x0, x1):
                fx = <double>x - cx
                for y in range(y0, y1):
                    fy = <double>y - cy
                    for z in range(z0, z1):
                        fz = <double>z - cz
                        diff = img[x, y, z] - c
                        ds = fx * fx + fy * fy + fz * fz
                        d = diff * diff + ds * spatial_weight
                        if d < dist[x, y, z]:
                            dist[x, y, z] = d
                            lab[x, y, z] = k


def moran_geary(values, coords):
    cdef const double[::1] xv = np.ascontiguousarray(values, dtype=np.float64)
    cdef const double[:, ::1] p = np.ascontiguousarray(coords, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], i, j
    cdef double mean = 0.0, den = 0.0, wsum = 0.0, msum = 0.0, gsum = 0.0
    cdef double ax, ay, az, w, dv
    for i in range(n):
        mean += xv[i]
    mean /= n
    for i in range(n):
        den += (xv[i] - mean) * (xv[i] - mean)
    with nogil:
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                ax = p[i, 0] - p[j, 0]
                ay = p[i, 1] - p[j, 1]
                az = p[i, 2] - p[j, 2]
                w = 1.0 / sqrt(ax * ax + ay * ay + az * az)
                wsum += w
                msum += w * (xv[i] - mean) * (xv[j] - mean)
                dv = xv[i] - xv[j]
                gsum += w * dv * dv
    return float(n / wsum * msum / den), float((n - 1) / (2.0 * wsum) * gsum / den)


cdef inline Py_ssize_t _find(Py_ssize_t[::1] parent, Py_ssize_t p) noexcept nogil:
    cdef Py_ssize_t root = p, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[p] != root:
        nxt = parent[p]
        parent[p] = root
        p = nxt
    return root


def zone_labels(levels):
    cdef const int[:, :, ::1] lv = np.ascontiguousarray(levels, dtype=np.int32)
    cdef Py_ssize_t nx = lv.shape[0], ny = lv.shape[1], nz = lv.shape[2]
    cdef Py_ssize_t n = nx * ny * nz
    parent_arr = np.arange(n, dtype=np.intp)
    cdef Py_ssize_t[::1] parent = parent_arr
    out_arr = np.zeros((nx, ny, nz), dtype=np.int32)
    cdef int[:, :, ::1] out = out_arr
    root_label_arr = np.zeros(n, dtype=np.int32)
    cdef int[::1] root_label = root_label_arr
    cdef Py_ssize_t x, y, z, qx, qy, qz, p, q, rp, rq
    cdef int k, a, next_label = 0
    with nogil:
        for x in range(nx):
            for y in range(ny):
                for z in range(nz):
                    a = lv[x, y, z]
                    if a <= 0:
                        continue
                    p = (x * ny + y) * nz + z
                    for k in range(13):
                        qx = x + _DIRS[k, 0]
                        qy = y + _DIRS[k, 1]
                        qz = z + _DIRS[k, 2]
                        if qx < 0 or qx >= nx or qy < 0 or qy >= ny or qz < 0 or qz >= nz:
                            continue
                        if lv[qx, qy, qz] != a:
                            continue
                        q = (qx * ny + qy) * nz + qz
                        rp = _find(parent, p)
                        rq = _find(parent, q)
                        if rp != rq:
                            if rp < rq:
                                parent[rq] = rp
                            else:
                                parent[rp] = rq
        for x in range(nx):
            for y in range(ny):
                for z in range(nz):
                    if lv[x, y, z] <= 0:
                        continue
                    p = (x * ny + y) * nz + z
                    rp = _find(parent, p)
                    if root_label[rp] == 0:
                        next_label += 1
                        root_label[rp] = next_label
                    out[x, y, z] = root_label[rp]
    return out_arr, next_label
