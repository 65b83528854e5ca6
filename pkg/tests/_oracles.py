"""Brute-force reference implementations used as independent test oracles.

None of these import lunarsim internals; they work on plain arrays.
"""

import math

import numpy as np


def naive_bilinear(z, x, y, cell_size=1.0, origin_x=0.0, origin_y=0.0):
    """Lerp along x on the two bracketing rows, then along y."""
    rows, cols = len(z), len(z[0])
    fx = (x - origin_x) / cell_size
    fy = (y - origin_y) / cell_size
    j = min(int(math.floor(fx)), cols - 2)
    i = min(int(math.floor(fy)), rows - 2)
    s, r = fx - j, fy - i
    lower = z[i][j] + s * (z[i][j + 1] - z[i][j])
    upper = z[i + 1][j] + s * (z[i + 1][j + 1] - z[i + 1][j])
    return lower + r * (upper - lower)


def naive_normals(z, cell_size):
    rows, cols = len(z), len(z[0])
    out = np.zeros((rows, cols, 3))
    for i in range(rows):
        for j in range(cols):
            if j == 0:
                gx = (z[i][1] - z[i][0]) / cell_size
            elif j == cols - 1:
                gx = (z[i][j] - z[i][j - 1]) / cell_size
            else:
                gx = (z[i][j + 1] - z[i][j - 1]) / (2 * cell_size)
            if i == 0:
                gy = (z[1][j] - z[0][j]) / cell_size
            elif i == rows - 1:
                gy = (z[i][j] - z[i - 1][j]) / cell_size
            else:
                gy = (z[i + 1][j] - z[i - 1][j]) / (2 * cell_size)
            n = math.sqrt(gx * gx + gy * gy + 1.0)
            out[i, j] = (-gx / n, -gy / n, 1.0 / n)
    return out


def brute_horizon(z, cell_size, i, j, azimuth_deg, step):
    """Max elevation angle (deg, floored at 0) looking along ``azimuth_deg`` from cell (i, j)."""
    z = np.asarray(z, dtype=float)
    rows, cols = z.shape
    az = math.radians(azimuth_deg)
    dx, dy = math.sin(az), math.cos(az)
    x0, y0 = j * cell_size, i * cell_size
    xmax, ymax = (cols - 1) * cell_size, (rows - 1) * cell_size
    best = 0.0
    d = step
    while True:
        x, y = x0 + d * dx, y0 + d * dy
        if x < -1e-9 or y < -1e-9 or x > xmax + 1e-9 or y > ymax + 1e-9:
            break
        x = min(max(x, 0.0), xmax)
        y = min(max(y, 0.0), ymax)
        h = naive_bilinear(z, x, y, cell_size)
        best = max(best, math.atan2(h - z[i, j], d))
        d += step
    return math.degrees(best)


def _bilinear_vec(z, X, Y):
    rows, cols = z.shape
    j = np.clip(np.floor(X).astype(int), 0, cols - 2)
    i = np.clip(np.floor(Y).astype(int), 0, rows - 2)
    s, r = X - j, Y - i
    lower = z[i, j] + s * (z[i, j + 1] - z[i, j])
    upper = z[i + 1, j] + s * (z[i + 1, j + 1] - z[i + 1, j])
    return lower + r * (upper - lower)


def march_intersect(z, cell_size, origin, direction, max_range=np.inf, step_frac=1 / 50):
    """First surface crossing by fixed-step marching plus bisection, or None.

    Grid origin is (0, 0). The ray is sampled every ``cell_size * step_frac`` meters
    while its horizontal position stays inside the cell-center lattice and its height
    inside the elevation range.
    """
    z = np.asarray(z, dtype=float)
    rows, cols = z.shape
    o = np.asarray(origin, dtype=float)
    d = np.asarray(direction, dtype=float)
    lo, hi = 0.0, max_range
    for k, ext in ((0, (cols - 1) * cell_size), (1, (rows - 1) * cell_size)):
        if d[k] == 0:
            if not 0 <= o[k] <= ext:
                return None
            continue
        a, b = (0 - o[k]) / d[k], (ext - o[k]) / d[k]
        lo, hi = max(lo, min(a, b)), min(hi, max(a, b))
    # no crossing is possible while the ray is above the highest or below the lowest cell
    zlo, zhi = z.min(), z.max()
    if d[2] != 0:
        a, b = (zlo - o[2]) / d[2], (zhi - o[2]) / d[2]
        lo, hi = max(lo, min(a, b) - cell_size * step_frac), min(hi, max(a, b) + cell_size * step_frac)
    elif not zlo <= o[2] <= zhi:
        return None
    if lo > hi:
        return None
    h = cell_size * step_frac
    ts = np.arange(lo, hi, h)
    ts = np.append(ts, hi)

    def gap(t):
        p = o[None, :] + np.atleast_1d(t)[:, None] * d[None, :]
        return p[:, 2] - _bilinear_vec(z, p[:, 0] / cell_size, p[:, 1] / cell_size)

    g = gap(ts)
    sign = g > 0
    change = np.nonzero(sign[:-1] != sign[1:])[0]
    if g[0] == 0:
        return float(ts[0])
    if change.size == 0:
        return None
    k = change[0]
    a, b = ts[k], ts[k + 1]
    ga = g[k]
    for _ in range(80):
        m = 0.5 * (a + b)
        gm = gap(m)[0]
        if (gm > 0) == (ga > 0):
            a, ga = m, gm
        else:
            b = m
    return float(0.5 * (a + b))


def shadow_length(height, elevation_deg):
    """Length of the shadow cast on flat ground by a vertical step of ``height``."""
    return height / math.tan(math.radians(elevation_deg))


def random_hills(rng, n, cell_size=1.0, n_hills=8, amplitude=6.0):
    """Smooth random terrain: a sum of Gaussian hills and pits."""
    yy, xx = np.mgrid[0:n, 0:n] * cell_size
    z = np.zeros((n, n))
    ext = n * cell_size
    for _ in range(n_hills):
        cx, cy = rng.uniform(0, ext, 2)
        sigma = rng.uniform(0.06, 0.18) * ext
        amp = rng.uniform(-amplitude, amplitude)
        z += amp * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * sigma ** 2))
    return z
