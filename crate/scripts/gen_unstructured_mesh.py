"""Generate the first-level unstructured mesh of the unit square.

513 vertices, 80 of them on the boundary (20 segments per side). Interior
points start from a seeded random sample and are relaxed by Laplacian
smoothing over the Delaunay graph. Output is Triangle .node/.ele (1-based).
"""
import sys
import numpy as np
from scipy.spatial import Delaunay

N_SIDE = 20
N_TOTAL = 513
SEED = 20181020


def boundary_points():
    t = np.arange(N_SIDE) / N_SIDE
    pts = []
    pts += [(s, 0.0) for s in t]
    pts += [(1.0, s) for s in t]
    pts += [(1.0 - s, 1.0) for s in t]
    pts += [(0.0, 1.0 - s) for s in t]
    return np.array(pts)


def min_angle(p, tri):
    a = p[tri[:, 0]]; b = p[tri[:, 1]]; c = p[tri[:, 2]]
    def ang(u, v, w):
        x = v - u; y = w - u
        cosv = (x * y).sum(1) / np.linalg.norm(x, axis=1) / np.linalg.norm(y, axis=1)
        return np.degrees(np.arccos(np.clip(cosv, -1, 1)))
    return np.minimum(np.minimum(ang(a, b, c), ang(b, c, a)), ang(c, a, b)).min()


def main(out_base):
    rng = np.random.default_rng(SEED)
    bnd = boundary_points()
    nb = len(bnd)
    interior = rng.uniform(0.03, 0.97, size=(N_TOTAL - nb, 2))
    for _ in range(300):
        p = np.vstack([bnd, interior])
        tri = Delaunay(p).simplices
        acc = np.zeros_like(p); cnt = np.zeros(len(p))
        for a, b in ((0, 1), (1, 2), (2, 0)):
            np.add.at(acc, tri[:, a], p[tri[:, b]]); np.add.at(cnt, tri[:, a], 1)
            np.add.at(acc, tri[:, b], p[tri[:, a]]); np.add.at(cnt, tri[:, b], 1)
        target = acc[nb:] / cnt[nb:, None]
        interior = np.clip(0.5 * interior + 0.5 * target, 0.01, 0.99)
    p = np.vstack([bnd, interior])
    tri = Delaunay(p).simplices
    # counter-clockwise orientation
    a = p[tri[:, 0]]; b = p[tri[:, 1]]; c = p[tri[:, 2]]
    area = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    flip = area < 0
    tri[flip] = tri[flip][:, [0, 2, 1]]
    print(f"vertices={len(p)} triangles={len(tri)} min_angle={min_angle(p, tri):.1f}", file=sys.stderr)
    with open(out_base + ".node", "w") as f:
        f.write(f"{len(p)} 2 0 1\n")
        for i, (x, y) in enumerate(p):
            marker = 1 if i < nb else 0
            f.write(f"{i + 1} {x:.17g} {y:.17g} {marker}\n")
    with open(out_base + ".ele", "w") as f:
        f.write(f"{len(tri)} 3 0\n")
        for i, t in enumerate(tri):
            f.write(f"{i + 1} {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "square_l1")
