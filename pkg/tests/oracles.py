"""Slow loop-based reference implementations used as test oracles.

They deliberately share no code with the package: voxels are visited one by
one with plain Python containers.
"""

import itertools
import math
from collections import Counter, deque

NB26 = [d for d in itertools.product((-1, 0, 1), repeat=3) if d != (0, 0, 0)]
DIRS13 = [d for d in NB26 if [c for c in d if c][0] > 0]


def voxels(grid):
    nx, ny, nz = grid.shape
    return {(x, y, z): int(grid[x, y, z]) for x in range(nx) for y in range(ny) for z in range(nz) if grid[x, y, z] > 0}


def percentile(xs, q):
    s = sorted(xs)
    pos = (len(s) - 1) * q / 100.0
    lo = math.floor(pos)
    hi = min(lo + 1, len(s) - 1)
    return s[lo] + (s[hi] - s[lo]) * (pos - lo)


def stats(xs):
    n = len(xs)
    mu = sum(xs) / n
    var = sum((x - mu) ** 2 for x in xs) / n
    if var == 0:
        skew = kurt = 0.0
    else:
        skew = sum((x - mu) ** 3 for x in xs) / n / var**1.5
        kurt = sum((x - mu) ** 4 for x in xs) / n / var**2 - 3
    p10, p25, p50, p75, p90 = (percentile(xs, q) for q in (10, 25, 50, 75, 90))
    inner = [x for x in xs if p10 <= x <= p90]
    mi = sum(inner) / len(inner) if inner else 0.0
    out = {
        "mean": mu, "variance": var, "skewness": skew, "kurtosis": kurt, "median": p50,
        "minimum": min(xs), "p10": p10, "p90": p90, "maximum": max(xs), "iqr": p75 - p25,
        "range": max(xs) - min(xs), "mad": sum(abs(x - mu) for x in xs) / n,
        "rmad": sum(abs(x - mi) for x in inner) / len(inner) if inner else math.nan,
        "medad": sum(abs(x - p50) for x in xs) / n,
        "cov": math.sqrt(var) / mu if mu else math.nan,
        "qcod": (p75 - p25) / (p75 + p25) if p75 + p25 else math.nan,
        "energy": sum(x * x for x in xs),
    }  # fmt: skip
    out["rms"] = math.sqrt(out["energy"] / n)
    return out


def histogram(levels):
    n = len(levels)
    base = stats(levels)
    c = Counter(levels)
    top = max(c.values())
    return {
        "mean": base["mean"], "variance": base["variance"], "skewness": base["skewness"],
        "kurtosis": base["kurtosis"], "median": base["median"],
        "mode": min(k for k, v in c.items() if v == top),
        "entropy": -sum(v / n * math.log2(v / n) for v in c.values()),
        "uniformity": sum((v / n) ** 2 for v in c.values()),
    }  # fmt: skip


def ivh(xs, pcts=(10, 25, 50, 75, 90)):
    n = len(xs)
    lo, hi = min(xs), max(xs)
    levels = [lo + k for k in range(int(math.ceil(hi - lo)) + 2)]

    def frac(level):
        return sum(1 for x in xs if x >= level) / n

    out = {}
    for p in pcts:
        if hi == lo:
            out[f"v{p}"] = 1.0
        else:
            first = next(lv for lv in levels if (lv - lo) / (hi - lo) >= p / 100 - 1e-12)
            out[f"v{p}"] = frac(first)
    for p in pcts:
        out[f"i{p}"] = next(lv for lv in levels if frac(lv) <= p / 100 + 1e-12)
    out["v10_v90"] = out["v10"] - out["v90"]
    out["i10_i90"] = out["i10"] - out["i90"]
    return out


def glcm(grid, ng):
    vox = voxels(grid)
    per_dir = []
    for d in DIRS13:
        m = Counter()
        for (x, y, z), a in vox.items():
            b = vox.get((x + d[0], y + d[1], z + d[2]))
            if b is not None:
                m[(a, b)] += 1
                m[(b, a)] += 1
        total = sum(m.values())
        if total == 0:
            continue
        p = {k: v / total for k, v in m.items()}
        f = {
            "joint_max": max(p.values()),
            "joint_entropy": -sum(v * math.log2(v) for v in p.values()),
            "asm": sum(v * v for v in p.values()),
            "contrast": sum((i - j) ** 2 * v for (i, j), v in p.items()),
            "dissimilarity": sum(abs(i - j) * v for (i, j), v in p.items()),
            "inv_diff": sum(v / (1 + abs(i - j)) for (i, j), v in p.items()),
            "inv_diff_moment": sum(v / (1 + (i - j) ** 2) for (i, j), v in p.items()),
        }
        mu = sum(i * v for (i, j), v in p.items())
        var = sum((i - mu) ** 2 * v for (i, j), v in p.items())
        f["correlation"] = sum((i - mu) * (j - mu) * v for (i, j), v in p.items()) / var if var > 0 else None
        per_dir.append(f)
    out = {}
    for k in ("joint_max", "joint_entropy", "asm", "contrast", "dissimilarity", "inv_diff", "inv_diff_moment"):
        out[k] = sum(f[k] for f in per_dir) / len(per_dir)
    corr = [f["correlation"] for f in per_dir if f["correlation"] is not None]
    out["correlation"] = sum(corr) / len(corr) if corr else math.nan
    return out


def glrlm(grid, ng):
    vox = voxels(grid)
    n_vox = len(vox)
    rows = []
    for d in DIRS13:
        runs = []
        for (x, y, z), a in vox.items():
            if vox.get((x - d[0], y - d[1], z - d[2])) == a:
                continue  # not the start of a run
            length = 1
            while vox.get((x + length * d[0], y + length * d[1], z + length * d[2])) == a:
                length += 1
            runs.append((a, length))
        ns = len(runs)
        gl = Counter(a for a, _ in runs)
        rl = Counter(r for _, r in runs)
        rows.append(
            [
                sum(1 / r**2 for _, r in runs) / ns,
                sum(r**2 for _, r in runs) / ns,
                sum(1 / a**2 for a, _ in runs) / ns,
                sum(a**2 for a, _ in runs) / ns,
                sum(v * v for v in gl.values()) / ns,
                sum(v * v for v in rl.values()) / ns,
                ns / n_vox,
            ]
        )
    names = ("sre", "lre", "lgre", "hgre", "glnu", "rlnu", "rp")
    return {k: sum(r[i] for r in rows) / len(rows) for i, k in enumerate(names)}


def zones(grid):
    vox = voxels(grid)
    seen = set()
    out = []  # (level, [voxels])
    for v in sorted(vox):
        if v in seen:
            continue
        level = vox[v]
        members = [v]
        seen.add(v)
        queue = deque([v])
        while queue:
            x, y, z = queue.popleft()
            for d in NB26:
                w = (x + d[0], y + d[1], z + d[2])
                if w not in seen and vox.get(w) == level:
                    seen.add(w)
                    members.append(w)
                    queue.append(w)
        out.append((level, members))
    return out


def glszm(grid):
    zs = zones(grid)
    n = len(zs)
    sizes = [len(m) for _, m in zs]
    gl = Counter(lv for lv, _ in zs)
    sc = Counter(sizes)
    return {
        "sze": sum(1 / s**2 for s in sizes) / n,
        "lze": sum(s**2 for s in sizes) / n,
        "glnu": sum(v * v for v in gl.values()) / n,
        "zsnu": sum(v * v for v in sc.values()) / n,
        "zp": n / len(voxels(grid)),
    }


def border_distances(morph):
    """Taxicab distance from each mask voxel to the nearest non-mask voxel,
    the space outside the grid counting as non-mask (multi-source BFS)."""
    nx, ny, nz = morph.shape
    inside = {(x, y, z) for x in range(nx) for y in range(ny) for z in range(nz) if morph[x, y, z]}
    dist = {}
    queue = deque()
    faces = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    for v in inside:
        if any((v[0] + d[0], v[1] + d[1], v[2] + d[2]) not in inside for d in faces):
            dist[v] = 1
            queue.append(v)
    while queue:
        v = queue.popleft()
        for d in faces:
            w = (v[0] + d[0], v[1] + d[1], v[2] + d[2])
            if w in inside and w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def gldzm(grid, morph):
    zs = zones(grid)
    dist = border_distances(morph)
    n = len(zs)
    zd = [min(dist[v] for v in m) for _, m in zs]
    gl = Counter(lv for lv, _ in zs)
    dc = Counter(zd)
    return {
        "sde": sum(1 / d**2 for d in zd) / n,
        "lde": sum(d**2 for d in zd) / n,
        "glnu": sum(v * v for v in gl.values()) / n,
        "zdnu": sum(v * v for v in dc.values()) / n,
    }


def ngtdm(grid):
    vox = voxels(grid)
    s, cnt = Counter(), Counter()
    for (x, y, z), a in vox.items():
        nb = [vox[w] for d in NB26 if (w := (x + d[0], y + d[1], z + d[2])) in vox]
        if not nb:
            continue
        s[a] += abs(a - sum(nb) / len(nb))
        cnt[a] += 1
    nvc = sum(cnt.values())
    if nvc == 0:
        return None
    levels = sorted(cnt)
    p = {i: cnt[i] / nvc for i in levels}
    ngp = len(levels)
    ps = sum(p[i] * s[i] for i in levels)
    st = sum(s[i] for i in levels)
    coarse = 1e6 if ps == 0 else min(1 / ps, 1e6)
    pairs = [(i, j) for i in levels for j in levels]
    contrast = (
        sum(p[i] * p[j] * (i - j) ** 2 for i, j in pairs) / (ngp * (ngp - 1)) * st / nvc if ngp > 1 else 0.0
    )
    bden = sum(abs(i * p[i] - j * p[j]) for i, j in pairs)
    busy = ps / bden if bden else 0.0
    compl = sum(abs(i - j) * (p[i] * s[i] + p[j] * s[j]) / (p[i] + p[j]) for i, j in pairs) / nvc
    strength = sum((p[i] + p[j]) * (i - j) ** 2 for i, j in pairs) / st if st else 0.0
    return {"coarseness": coarse, "contrast": contrast, "busyness": busy, "complexity": compl, "strength": strength}


def ngldm(grid):
    vox = voxels(grid)
    deps = []
    for (x, y, z), a in vox.items():
        k = sum(1 for d in NB26 if vox.get((x + d[0], y + d[1], z + d[2])) == a)
        deps.append((a, k + 1))
    n = len(deps)
    dc = Counter(k for _, k in deps)
    joint = Counter(deps)
    return {
        "lde": sum(1 / k**2 for _, k in deps) / n,
        "hde": sum(k**2 for _, k in deps) / n,
        "dcnu": sum(v * v for v in dc.values()) / n,
        "dce": -sum(v / n * math.log2(v / n) for v in joint.values()),
    }


def moran_geary(values, positions):
    n = len(values)
    mu = sum(values) / n
    num_m = num_g = wsum = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            w = 1.0 / math.dist(positions[i], positions[j])
            wsum += w
            num_m += w * (values[i] - mu) * (values[j] - mu)
            num_g += w * (values[i] - values[j]) ** 2
    den = sum((v - mu) ** 2 for v in values)
    return n / wsum * num_m / den, (n - 1) / (2 * wsum) * num_g / den
