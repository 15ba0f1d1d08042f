"""The solution variety F(K, L, M) = 0 as a curve configuration in RP^2.

Tracing works on the unit sphere (the double cover of RP^2). The sphere is gridded as
a warped cube sphere whose face centres are exactly the coordinate points
[1:0:0], [0:1:0], [0:0:1] and their antipodes. The warp ``a = t|t|`` refines the grid
towards those points, where the variety is singular (one smooth arc crossing a cusp).
Zero crossings are located by bracketing along grid edges, chained by marching squares,
cut out of small discs around the coordinate points, then continued into each point by
a predictor-corrector walk. Branches related by p -> -p are identified.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import geometry
from .errors import DegenerateInput, WKError, ZeroK, ZeroPoint
from .geometry import ModelParams
from .numerics import DEFAULT_TOLERANCES, CubicCoeffs, real_roots_cubic
from .wk_core import sextic, sextic_grad, variety_F, wk_number

CORNER_LABELS = ("[1:0:0]", "[0:1:0]", "[0:0:1]")
OPEN = "open"
SQRT5 = math.sqrt(5.0)


# ---------------------------------------------------------------- point-wise tools


def l_cubic(K: float, M: float) -> CubicCoeffs:
    """F(K, L, M) written as a cubic in L."""
    return CubicCoeffs(
        (K - M) ** 2 * (K + M),
        2 * K**2 * M**2 + K * M**3 + K**3 * M,
        -(K**2) * M**3 - K**3 * M**2,
        -(K**3) * M**3,
    )


def solve_for_L(K: float, M: float) -> list[float]:
    """Real roots L of F(K, L, M) = 0, ascending, with multiplicity."""
    if K == 0.0 and M == 0.0:
        raise DegenerateInput("F(0, L, 0) vanishes identically")
    c = l_cubic(K, M)
    roots = real_roots_cubic(c)
    out = []
    for r in roots:
        # polish on F itself, which is better conditioned than the expanded cubic
        for _ in range(4):
            f = variety_F((K, r, M))
            d = float(sextic_grad(K, r, M)[1])
            if f == 0.0 or d == 0.0:
                break
            nr = r - f / d
            if abs(variety_F((K, nr, M))) >= abs(f):
                break
            r = nr
        out.append(r)
    return sorted(out)


def km_locus(K: float) -> tuple[float, float]:
    """The two solutions on K = M: L = K(1 - sqrt5)/4 and L = K(1 + sqrt5)/4."""
    if K == 0.0:
        raise ZeroK("K must be nonzero")
    return (K * (1.0 - SQRT5) / 4.0, K * (1.0 + SQRT5) / 4.0)


@dataclass(frozen=True)
class ProjectivePoint:
    K: float
    L: float
    M: float

    def as_array(self) -> np.ndarray:
        return np.array([self.K, self.L, self.M])

    def params(self) -> ModelParams:
        return ModelParams(self.K, self.L, self.M)


def normalize_homothety(p) -> ProjectivePoint:
    """Unit-norm representative with the first nonzero coordinate positive."""
    v = ModelParams.coerce(p).as_array()
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ZeroPoint("zero parameter triple")
    v = v / n
    first = next(x for x in v if x != 0.0)
    if first < 0:
        v = -v
    return ProjectivePoint(*(float(x) for x in v))


class PointClass(enum.Enum):
    OFF_VARIETY = "OffVariety"
    FLAT_CORNER = "FlatCorner"
    KM_LOCUS = "KMLocus"
    GENERIC = "Generic"


def classify_point(p, tol: float = 1e-9) -> PointClass:
    q = normalize_homothety(p).as_array()
    if sum(abs(x) < tol for x in q) >= 2:
        return PointClass.FLAT_CORNER
    if abs(sextic(*q)) >= tol:
        return PointClass.OFF_VARIETY
    if abs(q[0] - q[2]) < tol:
        return PointClass.KM_LOCUS
    return PointClass.GENERIC


# ---------------------------------------------------------------- tracing


@dataclass
class ModuliBranch:
    id: int
    chart: str
    points: np.ndarray  # (N, 3) unit vectors, consecutive along the curve
    endpoints: tuple[str, str]


@dataclass
class Trace:
    resolution: int
    branches: list[ModuliBranch]
    ambiguous_cells: int = 0
    unpaired_paths: int = 0
    closed_loops: int = 0
    pole_points: int = 0
    max_residual: float = 0.0
    max_arc_step: float = 0.0
    corner_incidence: dict = field(default_factory=dict)

    @property
    def junctions(self) -> int:
        return sum(1 for v in self.corner_incidence.values() if v > 0)

    def summary(self) -> str:
        return f"{len(self.branches)} branches, {self.junctions} junctions"


def _warp(t):
    return t * np.abs(t)


_CORNERS = np.vstack([np.eye(3), -np.eye(3)])


def _face_nodes(axis: int, sign: int, n: int):
    """Integer node coordinates and cube positions of one face, shape (2n+1, 2n+1, 3)."""
    others = [a for a in range(3) if a != axis]
    ii, jj = np.meshgrid(np.arange(-n, n + 1), np.arange(-n, n + 1), indexing="ij")
    keys = np.zeros(ii.shape + (3,), dtype=np.int64)
    keys[..., axis] = sign * n
    keys[..., others[0]] = ii
    keys[..., others[1]] = jj
    pos = _warp(keys / n)
    return keys, pos


def _unit(x):
    return x / np.linalg.norm(x)


def _tangent_grad(x):
    g = np.array(sextic_grad(*x))
    return g - (g @ x) * x


def _polish(x, iters=8):
    """Newton along the sphere-projected gradient while it keeps improving |F|."""
    best, fbest = x, abs(sextic(*x))
    for _ in range(iters):
        if fbest == 0.0:
            break
        g = _tangent_grad(best)
        gg = g @ g
        if gg == 0.0:
            break
        y = _unit(best - sextic(*best) * g / gg)
        fy = abs(sextic(*y))
        if fy >= fbest:
            break
        best, fbest = y, fy
    return best


class _EdgeRoots:
    def __init__(self, n: int):
        self.n = n
        self.cache: dict = {}

    def __call__(self, ka, kb):
        key = (ka, kb) if ka < kb else (kb, ka)
        hit = self.cache.get(key)
        if hit is not None:
            return key
        pa = _warp(np.array(key[0]) / self.n)
        pb = _warp(np.array(key[1]) / self.n)
        d = pb - pa
        g = lambda s: sextic(*(pa + s * d))
        ga, gb = g(0.0), g(1.0)
        if ga == 0.0:
            s = 0.0
        elif gb == 0.0:
            s = 1.0
        else:
            s = brentq(g, 0.0, 1.0, xtol=1e-15, rtol=8.9e-16, maxiter=200)
        self.cache[key] = _polish(_unit(pa + s * d))
        return key


# corner pairs of the four cell edges: (c0,c1), (c1,c2), (c2,c3), (c3,c0)
_CELL_EDGES = ((0, 1), (1, 2), (2, 3), (3, 0))


def _march_face(axis, sign, n, edge_roots, adj, saddles):
    keys, pos = _face_nodes(axis, sign, n)
    vals = sextic(pos[..., 0], pos[..., 1], pos[..., 2])
    pos_sign = vals >= 0.0
    c = [pos_sign[:-1, :-1], pos_sign[1:, :-1], pos_sign[1:, 1:], pos_sign[:-1, 1:]]
    code = c[0] * 1 + c[1] * 2 + c[2] * 4 + c[3] * 8
    cells = np.argwhere((code != 0) & (code != 15))
    for i, j in cells:
        ck = [tuple(keys[i, j]), tuple(keys[i + 1, j]), tuple(keys[i + 1, j + 1]), tuple(keys[i, j + 1])]
        cs = [pos_sign[i, j], pos_sign[i + 1, j], pos_sign[i + 1, j + 1], pos_sign[i, j + 1]]
        crossing = [e for e, (a, b) in enumerate(_CELL_EDGES) if cs[a] != cs[b]]
        verts = {e: edge_roots(ck[_CELL_EDGES[e][0]], ck[_CELL_EDGES[e][1]]) for e in crossing}
        if len(crossing) == 2:
            pairs = [(crossing[0], crossing[1])]
        else:
            mid = _warp((keys[i, j] + keys[i + 1, j + 1]) / (2.0 * n))
            centre_sign = sextic(*mid) >= 0.0
            saddles.append(_unit(mid))
            if centre_sign == cs[0]:
                pairs = [(0, 1), (2, 3)]
            else:
                pairs = [(3, 0), (1, 2)]
        for a, b in pairs:
            va, vb = verts[a], verts[b]
            adj.setdefault(va, []).append(vb)
            adj.setdefault(vb, []).append(va)


def _near_corner(x, radius):
    d = np.linalg.norm(_CORNERS - x, axis=1)
    k = int(np.argmin(d))
    return (k, d[k]) if d[k] < radius else (None, d[k])


def _continue_to_corner(x, corner, stop_r, max_step, tol, max_iter=400):
    """Walk along F = 0 from x into ``corner``; returns the appended points."""
    out = []
    d = np.linalg.norm(x - corner)
    for _ in range(max_iter):
        if d <= stop_r:
            return out, True
        g = np.array(sextic_grad(*x))
        t = np.cross(x, g)
        tn = np.linalg.norm(t)
        if tn == 0.0:
            break
        t /= tn
        if t @ (corner - x) < 0:
            t = -t
        h = min(0.25 * d, max_step)
        for _ in range(20):
            pred = _unit(x + h * t)
            y = _polish(pred, iters=12)
            dy = np.linalg.norm(y - corner)
            if abs(sextic(*y)) <= max(tol, 1e-300) and np.linalg.norm(y - pred) < 0.25 * h and dy < d:
                break
            h *= 0.5
        else:
            break
        out.append(y)
        x, d = y, dy
    return out, d <= stop_r


def _walk_components(adj):
    seen = set()
    paths, loops = [], []
    for start in sorted(adj):
        if start in seen or len(adj[start]) != 1:
            continue
        path = [start]
        seen.add(start)
        prev, cur = None, start
        while True:
            nxt = [v for v in adj[cur] if v != prev and v not in seen]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            seen.add(cur)
            path.append(cur)
        paths.append(path)
    for start in sorted(adj):
        if start in seen:
            continue
        loop = [start]
        seen.add(start)
        prev, cur = None, start
        while True:
            nxt = [v for v in adj[cur] if v != prev and v not in seen]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            seen.add(cur)
            loop.append(cur)
        loops.append(loop)
    return paths, loops


def _neg_key(key):
    a, b = (tuple(-x for x in key[0]), tuple(-x for x in key[1]))
    return (a, b) if a < b else (b, a)


def _label(x, radius):
    k, _ = _near_corner(x, radius)
    return OPEN if k is None else CORNER_LABELS[k % 3]


_LABEL_ORDER = {lab: i for i, lab in enumerate(CORNER_LABELS + (OPEN,))}


def trace(resolution: int = 512, tol=DEFAULT_TOLERANCES) -> Trace:
    """Trace the variety; see the module docstring for the method."""
    if resolution < 64 or resolution % 2:
        raise ValueError("resolution must be an even integer >= 64")
    n = resolution // 2
    h = 2.0 / resolution
    march_r = 12.0 * h  # outside this the cusp arms are resolved by the warped grid
    stop_r = 0.5 * h
    label_r = h
    edge_roots = _EdgeRoots(n)
    adj: dict = {}
    saddles: list = []
    for axis in range(3):
        for sign in (1, -1):
            _march_face(axis, sign, n, edge_roots, adj, saddles)
    pts = edge_roots.cache

    for key in [k for k in adj if _near_corner(pts[k], march_r)[0] is not None]:
        for other in adj.pop(key):
            if other in adj:
                adj[other].remove(key)
    paths, loops = _walk_components(adj)
    ambiguous = sum(1 for s in saddles if _near_corner(s, march_r)[0] is None)

    index = {frozenset(p): i for i, p in enumerate(paths)}
    chosen, unpaired, done = [], 0, set()
    for i, path in enumerate(paths):
        if i in done:
            continue
        j = index.get(frozenset(_neg_key(k) for k in path))
        if j is None:
            unpaired += 1
            chosen.append(path)
            done.add(i)
            continue
        done.update((i, j))
        a, b = path, paths[j]
        wa = sum(pts[k].sum() for k in a)
        wb = sum(pts[k].sum() for k in b)
        chosen.append(a if (wa, sorted(a)) >= (wb, sorted(b)) else b)

    built = []
    max_step = 2.0 * h
    for path in chosen:
        body = [pts[k] for k in path]
        ends = []
        for end, inner in ((body[-1], body[-2] if len(body) > 1 else body[-1]),
                           (body[0], body[1] if len(body) > 1 else body[0])):
            k, _ = _near_corner(end, march_r + 4 * h)
            if k is None:
                ends.append([])
                continue
            extra, _ok = _continue_to_corner(end, _CORNERS[k], stop_r, max_step, tol.trace_polish_tol)
            ends.append(extra)
        full = list(reversed(ends[1])) + body + ends[0]
        arr = np.array(full)
        labels = (_label(arr[0], label_r), _label(arr[-1], label_r))
        if _LABEL_ORDER[labels[1]] < _LABEL_ORDER[labels[0]] or (
                labels[0] == labels[1] and tuple(arr[-1]) < tuple(arr[0])):
            arr, labels = arr[::-1].copy(), labels[::-1]
        built.append((labels, tuple(np.round(arr[len(arr) // 2], 12)), arr))
    built.sort(key=lambda t: (_LABEL_ORDER[t[0][0]], _LABEL_ORDER[t[0][1]], t[1]))
    branches = [ModuliBranch(i, "sphere", arr, labels) for i, (labels, _, arr) in enumerate(built)]

    res = Trace(resolution, branches, ambiguous_cells=ambiguous, unpaired_paths=unpaired,
                closed_loops=len(loops))
    incidence = {lab: 0 for lab in CORNER_LABELS}
    for br in branches:
        for lab in br.endpoints:
            if lab in incidence:
                incidence[lab] += 1
        F = np.abs(sextic(br.points[:, 0], br.points[:, 1], br.points[:, 2]))
        res.max_residual = max(res.max_residual, float(F.max()))
        if len(br.points) > 1:
            res.max_arc_step = max(res.max_arc_step,
                                   float(np.linalg.norm(np.diff(br.points, axis=0), axis=1).max()))
        for x in br.points:
            cd = geometry.curvature(x)
            if abs(cd.S**2 - cd.ricci_norm_sq) < 1e-8 and abs(cd.S) > 1e-6:
                res.pole_points += 1
    res.corner_incidence = incidence
    return res


def trace_variety(resolution: int = 512, tol=DEFAULT_TOLERANCES) -> list[ModuliBranch]:
    return trace(resolution, tol).branches


# ---------------------------------------------------------------- export


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def branch_rows(branches):
    """CSV rows: branch_id, point_index, K, L, M, F_residual, S, lambda."""
    for br in branches:
        for i, x in enumerate(br.points):
            p = ModelParams(*(float(v) for v in x))
            S = geometry.curvature(p).S
            try:
                lam = _fmt(wk_number(p).value)
            except WKError:
                lam = ""
            yield [str(br.id), str(i), _fmt(p.K), _fmt(p.L), _fmt(p.M),
                   _fmt(variety_F(p)), _fmt(S), lam]


CSV_HEADER = ["branch_id", "point_index", "K", "L", "M", "F_residual", "S", "lambda"]


def write_csv(branches, path) -> int:
    import csv

    count = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in branch_rows(branches):
            w.writerow(row)
            count += 1
    return count


VIEW_AXIS = np.ones(3) / math.sqrt(3.0)
_U = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)
_W = np.array([-1.0, -1.0, 2.0]) / math.sqrt(6.0)


def project_hemisphere(points: np.ndarray) -> list[np.ndarray]:
    """Orthographic projection of the hemisphere around (1,1,1)/sqrt3.

    Points are moved to that hemisphere by p -> -p; the polyline is split where this
    flip makes it jump across the rim. Returns a list of (m, 2) arrays in [-1, 1]^2.
    """
    pts = np.asarray(points, dtype=float).copy()
    flip = pts @ VIEW_AXIS < 0
    pts[flip] *= -1
    xy = np.column_stack([pts @ _U, pts @ _W])
    cuts = np.nonzero(flip[1:] != flip[:-1])[0] + 1
    return [seg for seg in np.split(xy, cuts) if len(seg) > 1]


def svg_string(branches) -> str:
    size, r = 1000, 450
    to = lambda xy: (500 + r * xy[0], 500 - r * xy[1])
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}" '
        f'width="{size}" height="{size}">',
        '<rect x="0" y="0" width="1000" height="1000" fill="white"/>',
        f'<circle cx="500" cy="500" r="{r}" fill="none" stroke="#999999" stroke-width="1"/>',
    ]
    palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
               "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]
    for br in branches:
        colour = palette[br.id % len(palette)]
        for seg in project_hemisphere(br.points):
            coords = " ".join("%.3f,%.3f" % to(xy) for xy in seg)
            out.append(f'<polyline id="branch-{br.id}" fill="none" stroke="{colour}" '
                       f'stroke-width="2" points="{coords}"/>')
    for k, lab in enumerate(CORNER_LABELS):
        x, y = to((np.eye(3)[k] @ _U, np.eye(3)[k] @ _W))
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="6" fill="black"/>')
        out.append(f'<text x="{x + 10:.3f}" y="{y - 10:.3f}" font-family="sans-serif" '
                   f'font-size="20">{lab}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(branches, path) -> None:
    with open(path, "w") as fh:
        fh.write(svg_string(branches))
