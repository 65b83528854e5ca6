"""Compiled inner loops.

Everything here works in *grid units* horizontally: ``X = (x - origin_x) / cell_size``
and ``Y = (y - origin_y) / cell_size`` so that cell ``(i, j)`` sits at ``(X, Y) = (j, i)``.
Heights stay in meters. Kernels are ``nogil`` so the renderer can fan rows out over
threads; each call writes only its own row range.
"""

import math

import numpy as np
from numba import njit

MISS = 0
HIT = 1
NODATA_HIT = 2


@njit(cache=True, nogil=True)
def _lerp(a, b, f):
    # anchored at the nearer end: exact at f = 0, f = 1 and when a == b
    if f < 0.5:
        return a + f * (b - a)
    return b - (1.0 - f) * (b - a)


@njit(cache=True, nogil=True)
def bilinear(z, X, Y):
    """Bilinear sample at grid coordinates; caller guarantees bounds."""
    rows, cols = z.shape
    j = int(math.floor(X))
    i = int(math.floor(Y))
    if j > cols - 2:
        j = cols - 2
    if i > rows - 2:
        i = rows - 2
    if j < 0:
        j = 0
    if i < 0:
        i = 0
    s = X - j
    r = Y - i
    lower = _lerp(z[i, j], z[i, j + 1], s)
    upper = _lerp(z[i + 1, j], z[i + 1, j + 1], s)
    return _lerp(lower, upper, r)


@njit(cache=True, nogil=True)
def horizon_rows(z, cell_size, n_az, step, row_lo, row_hi, out):
    rows, cols = z.shape
    xmax = cols - 1.0
    ymax = rows - 1.0
    for i in range(row_lo, row_hi):
        for j in range(cols):
            z0 = z[i, j]
            for k in range(n_az):
                if math.isnan(z0):
                    out[k, i, j] = np.nan
                    continue
                az = 2.0 * math.pi * k / n_az
                dx = math.sin(az) * step
                dy = math.cos(az) * step
                best = 0.0
                n = 1
                while True:
                    X = j + n * dx
                    Y = i + n * dy
                    # tolerance keeps samples that land on the boundary up to rounding
                    if X < -1e-9 or X > xmax + 1e-9 or Y < -1e-9 or Y > ymax + 1e-9:
                        break
                    X = min(max(X, 0.0), xmax)
                    Y = min(max(Y, 0.0), ymax)
                    h = bilinear(z, X, Y)
                    if math.isnan(h):
                        best = np.nan
                        break
                    ang = math.atan2(h - z0, n * step * cell_size)
                    if ang > best:
                        best = ang
                    n += 1
                out[k, i, j] = math.degrees(best)


@njit(cache=True, nogil=True)
def _smallest_root(A, B, C, L, tol):
    """Smallest root of A*t^2 + B*t + C on [-tol, L + tol], or -1."""
    if A == 0.0 or abs(A) * L * L <= 1e-13 * (abs(B) * L + abs(C)):
        if B != 0.0:
            t = -C / B
            if -tol <= t <= L + tol:
                return t
        elif C == 0.0:
            return 0.0
        return -1.0
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        return -1.0
    q = -0.5 * (B + math.copysign(math.sqrt(disc), B))
    found = False
    best = 0.0
    r1 = q / A
    if -tol <= r1 <= L + tol:
        found = True
        best = r1
    if q != 0.0:
        r2 = C / q
        if -tol <= r2 <= L + tol and (not found or r2 < best):
            found = True
            best = r2
    if not found:
        return -1.0
    return best


@njit(cache=True, nogil=True)
def _slab(o, d, lo, hi, tmin, tmax):
    if d == 0.0:
        if o < lo or o > hi:
            return 1.0, 0.0
        return tmin, tmax
    t1 = (lo - o) / d
    t2 = (hi - o) / d
    if t1 > t2:
        t1, t2 = t2, t1
    return max(tmin, t1), min(tmax, t2)


@njit(cache=True, nogil=True)
def intersect(z, zmin, zmax, cell_size, OX, OY, oz, dx, dy, dz, max_range):
    """First intersection of a ray with the bilinear heightfield.

    ``(OX, OY)`` are the ray origin in grid units, ``(dx, dy, dz)`` the unit world
    direction. Returns ``(t, i, j, status)`` with ``t`` in meters and ``(i, j)`` the
    patch whose lower-left corner is cell ``(i, j)``.
    """
    rows, cols = z.shape
    dX = dx / cell_size
    dY = dy / cell_size
    tmin, tmax = 0.0, max_range
    tmin, tmax = _slab(OX, dX, 0.0, cols - 1.0, tmin, tmax)
    tmin, tmax = _slab(OY, dY, 0.0, rows - 1.0, tmin, tmax)
    tmin, tmax = _slab(oz, dz, zmin, zmax, tmin, tmax)
    if tmin > tmax:
        return -1.0, -1, -1, MISS

    PX = OX + dX * tmin
    PY = OY + dY * tmin
    j = min(max(int(math.floor(PX)), 0), cols - 2)
    i = min(max(int(math.floor(PY)), 0), rows - 2)

    inf = np.inf
    if dX > 0.0:
        step_j = 1
        tnx = tmin + (j + 1 - PX) / dX
        ddx = 1.0 / dX
    elif dX < 0.0:
        step_j = -1
        tnx = tmin + (j - PX) / dX
        ddx = -1.0 / dX
    else:
        step_j = 0
        tnx = inf
        ddx = inf
    if dY > 0.0:
        step_i = 1
        tny = tmin + (i + 1 - PY) / dY
        ddy = 1.0 / dY
    elif dY < 0.0:
        step_i = -1
        tny = tmin + (i - PY) / dY
        ddy = -1.0 / dY
    else:
        step_i = 0
        tny = inf
        ddy = inf

    t0 = tmin
    while True:
        t1 = min(tnx, tny, tmax)
        if t1 < t0:
            t1 = t0
        z00 = z[i, j]
        z10 = z[i, j + 1]
        z01 = z[i + 1, j]
        z11 = z[i + 1, j + 1]
        if math.isnan(z00) or math.isnan(z10) or math.isnan(z01) or math.isnan(z11):
            return t0, i, j, NODATA_HIT
        s0 = OX + dX * t0 - j
        r0 = OY + dY * t0 - i
        pz0 = oz + dz * t0
        b = z10 - z00
        c = z01 - z00
        e = z00 - z10 - z01 + z11
        f0 = z00 + b * s0 + c * r0 + e * s0 * r0
        f1 = b * dX + c * dY + e * (s0 * dY + r0 * dX)
        A = -e * dX * dY
        B = dz - f1
        C = pz0 - f0
        L = t1 - t0
        tol = 1e-10 * (1.0 + t1)
        tau = _smallest_root(A, B, C, L, tol)
        if tau != -1.0:
            t = t0 + min(max(tau, 0.0), L)
            return t, i, j, HIT
        if t1 >= tmax:
            break
        if tnx < tny:
            j += step_j
            t0 = tnx
            tnx += ddx
        else:
            i += step_i
            t0 = tny
            tny += ddy
        if j < 0 or j > cols - 2 or i < 0 or i > rows - 2:
            break
    return -1.0, -1, -1, MISS


@njit(cache=True, nogil=True)
def cast_rows(z, zmin, zmax, origin_x, origin_y, cell_size, rot, focal, pitch,
              width, height, v_sign, pos, max_range, row_lo, row_hi,
              t_out, status_out, dir_out):
    """Cast the primary ray of every pixel in ``[row_lo, row_hi)``."""
    cx = width / 2.0
    cy = height / 2.0
    OX = (pos[0] - origin_x) / cell_size
    OY = (pos[1] - origin_y) / cell_size
    for v in range(row_lo, row_hi):
        for u in range(width):
            a = (u + 0.5 - cx) * pitch
            b = v_sign * (v + 0.5 - cy) * pitch
            c = -focal
            n = math.sqrt(a * a + b * b + c * c)
            a /= n
            b /= n
            c /= n
            dx = rot[0, 0] * a + rot[0, 1] * b + rot[0, 2] * c
            dy = rot[1, 0] * a + rot[1, 1] * b + rot[1, 2] * c
            dz = rot[2, 0] * a + rot[2, 1] * b + rot[2, 2] * c
            dn = math.sqrt(dx * dx + dy * dy + dz * dz)
            dx /= dn
            dy /= dn
            dz /= dn
            dir_out[v, u, 0] = dx
            dir_out[v, u, 1] = dy
            dir_out[v, u, 2] = dz
            t, _, _, st = intersect(z, zmin, zmax, cell_size, OX, OY, pos[2],
                                    dx, dy, dz, max_range)
            t_out[v, u] = t
            status_out[v, u] = st


@njit(cache=True, nogil=True)
def march_shadow(z, zmax, origin_x, origin_y, cell_size, px, py, pz, sx, sy, sz, step):
    """True when terrain rises above the sun ray leaving ``(px, py, pz)``."""
    rows, cols = z.shape
    xmax = cols - 1.0
    ymax = rows - 1.0
    X0 = (px - origin_x) / cell_size
    Y0 = (py - origin_y) / cell_size
    dX = sx * step / cell_size
    dY = sy * step / cell_size
    dZ = sz * step
    n = 1
    while True:
        X = X0 + n * dX
        Y = Y0 + n * dY
        Z = pz + n * dZ
        # written so that a NaN coordinate also ends the march
        if not (0.0 <= X <= xmax and 0.0 <= Y <= ymax and Z <= zmax):
            return False
        h = bilinear(z, X, Y)
        if h > Z:
            return True
        n += 1


@njit(cache=True, nogil=True)
def shadow_rows(z, zmax, origin_x, origin_y, cell_size, pts, normals, mask,
                sun, step, lift, row_lo, row_hi, out):
    for v in range(row_lo, row_hi):
        for u in range(pts.shape[1]):
            if not mask[v, u]:
                continue
            nx = normals[v, u, 0]
            ny = normals[v, u, 1]
            nz = normals[v, u, 2]
            if not (math.isfinite(nx) and math.isfinite(ny) and math.isfinite(nz)):
                # nodata-adjacent normal: lift straight up
                nx, ny, nz = 0.0, 0.0, 1.0
            px = pts[v, u, 0] + lift * nx
            py = pts[v, u, 1] + lift * ny
            pz = pts[v, u, 2] + lift * nz
            out[v, u] = march_shadow(z, zmax, origin_x, origin_y, cell_size,
                                     px, py, pz, sun[0], sun[1], sun[2], step)
