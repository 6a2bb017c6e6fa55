"""Height-periodic initial data, the origin observable, and the arctic curve.

With values (a, b, c) on three consecutive height layers, the recurrence
solution depends only on height and has a closed form in R = ac/b^2 and
S = bd/c^2, the two of them tied by R^2 S^2 - 6RS - 4R - 4S - 3 = 0.  The
origin observable rho (a logarithmic derivative of the partition function in
the origin variable) then satisfies two alternating linear recurrences whose
generating function has an explicit denominator, and the limit shape is the
dual of a symmetric plane cubic."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .stepped import height, slab_solid, surface_graph, vadd
from .kashaev import cube_from_bottom, kashaev_relation_residual, solve_origin
from .taut import build_taut_window, enumerate_taut, taut_weight
from .loopmodel import LOCAL_CONFIGS


class LimitShapeError(Exception):
    pass


class IntrinsicViolated(LimitShapeError):
    pass


def intrinsic_residual(R, S):
    return R * R * S * S - 6 * R * S - 4 * R - 4 * S - 3


def s_from_r(R):
    """Greatest root of the intrinsic relation in S."""
    A = R * R
    B = -(6 * R + 4)
    C = -(4 * R + 3)
    return (-B + math.sqrt(B * B - 4 * A * C)) / (2 * A)


def rs_from_abc(a, b, c):
    """R, S and the first new layer d from three initial layers."""
    if min(a, b, c) <= 0:
        raise LimitShapeError("layers must be positive")
    d = (2 * b ** 3 + 3 * a * b * c + 2 * (a * c + b * b) ** 1.5) / a ** 2
    R = a * c / (b * b)
    S = b * d / (c * c)
    res = intrinsic_residual(R, S)
    if abs(res) > 1e-9 * (1 + (R * S) ** 2):
        raise IntrinsicViolated(f"residual {res}")
    return R, S, d


def y_closed_form(N, a, b, c):
    """(Y_N, X_N) for the height-only solution."""
    if N < 0:
        raise LimitShapeError("N must be nonnegative")
    R, S, _d = rs_from_abc(a, b, c)

    def y(k):
        if k % 2 == 0:
            n = k // 2
            return a ** (1 - 2 * n) * b ** (2 * n) * R ** (n * n) \
                * S ** (n * n - n)
        n = (k - 1) // 2
        return a ** (-2 * n) * b ** (2 * n + 1) * R ** (n * n + n) \
            * S ** (n * n)

    if N % 2 == 0:
        x = math.sqrt(1 + R) * y(N + 1)
    else:
        x = math.sqrt(1 + S) * y(N + 1)
    return y(N), x


def rho_coeffs(R, S=None):
    """Coefficients of the two linear relations on the observable."""
    if S is None:
        S = s_from_r(R)
    if abs(intrinsic_residual(R, S)) > 1e-6 * (1 + (R * S) ** 2):
        raise IntrinsicViolated("R, S do not satisfy the intrinsic relation")
    sr = math.sqrt(1 + R)
    ss = math.sqrt(1 + S)
    alpha = (3 + 3 * sr - 2 * R * S) / (R * S)
    beta = (2 + 2 * sr + R) / (R * R * S)
    gamma = (1 + sr) / (R * S)
    alpha_p = (3 + 3 * ss - 2 * R * S) / (R * S)
    # the primed middle coefficient mirrors beta with R and S exchanged;
    # this is forced both by the two-form denominator identity (it needs
    # beta * beta_p = gamma * gamma_p) and by finite-difference derivatives
    # of the numeric recurrence
    beta_p = (2 + 2 * ss + S) / (R * S * S)
    gamma_p = (1 + ss) / (R * S)
    return alpha, beta, gamma, alpha_p, beta_p, gamma_p


@dataclass
class RhoField:
    N: int
    R: float
    S: float
    values: dict        # (i, j, k) with i, j, k >= 0, i+j+k <= N


def rho_field(N, R, S=None):
    """Fill the observable on the nonnegative cone up to height N.

    Heights 0..2 carry the delta at the origin (the partition function of
    the uncarved slab is just the corner variable); the alternating linear
    relations then fill upward."""
    if N < 3:
        raise LimitShapeError("N must be at least 3")
    if S is None:
        S = s_from_r(R)
    alpha, beta, gamma, alpha_p, beta_p, gamma_p = rho_coeffs(R, S)
    vals = {(0, 0, 0): 1.0}

    def get(p):
        return vals.get(p, 0.0)

    for h in range(3, N + 1):
        for i in range(h + 1):
            for j in range(h + 1 - i):
                k = h - i - j
                y = (i, j, k)
                x = (i - 1, j - 1, k - 1)
                if height(x) % 2 == 0:
                    ca, cb, cg = alpha, beta, gamma
                else:
                    ca, cb, cg = alpha_p, beta_p, gamma_p
                val = ca * get(x)
                val += cb * (get(vadd(x, (1, 0, 0))) + get(vadd(x, (0, 1, 0)))
                             + get(vadd(x, (0, 0, 1))))
                val += cg * (get(vadd(x, (1, 1, 0))) + get(vadd(x, (1, 0, 1)))
                             + get(vadd(x, (0, 1, 1))))
                if val != 0.0:
                    vals[y] = val
    return RhoField(N, R, S, vals)


def _slab_init(N, a, b, c, vertices):
    layer = {0: a, 1: b, 2: c}
    return {v: layer.get(height(v) + N, 1.0) for v in vertices}


def rho_oracle(x, a, b, c):
    """The observable at x from the symbolic solution: the logarithmic
    derivative of the origin value in the single vertex variable sitting at
    -x, with the face-root chain rule, evaluated at the layered point."""
    N = height(x)
    if N < 0 or min(x) < 0:
        raise LimitShapeError("x must lie in the nonnegative cone")
    if N <= 2:
        return 1.0 if x == (0, 0, 0) else 0.0
    U = slab_solid(N)
    win_r = None
    sg = surface_graph(U)
    poly = solve_origin(U, mode="symbolic", window_radius=sg.window_radius)
    target = tuple(-t for t in x)
    vname = sg.vertex_var_name(target)
    point = _slab_init(N, a, b, c, sg.vertices)
    assign = {sg.vertex_var_name(v): point[v] for v in sg.vertices}
    reg = poly.registry
    # numeric values of the root squares and the target's diagonal partner
    root_info = {}
    for key in sg.faces:
        rn = sg.face_root_name(key)
        if rn not in reg.root_vars:
            continue
        from .stepped import face_diagonals
        (p1, p2), (q1, q2) = face_diagonals(*key)
        qval = point[p1] * point[p2] + point[q1] * point[q2]
        partner = None
        if target == p1:
            partner = point[p2]
        elif target == p2:
            partner = point[p1]
        elif target == q1:
            partner = point[q2]
        elif target == q2:
            partner = point[q1]
        root_info[rn] = (qval, partner)
    num = 0.0
    den = 0.0
    tval = point[target]
    for mono, coeff in poly.terms.items():
        val = float(coeff)
        logderiv = 0.0
        for name, e in mono:
            if reg.is_root(name):
                qval, partner = root_info[name]
                val *= math.sqrt(qval) ** e
                if partner is not None:
                    logderiv += e * tval * partner / (2 * qval)
            else:
                val *= assign[name] ** e
                if name == vname:
                    logderiv += e
        num += val * logderiv
        den += val
    return num / den


def rho_observable_expectation(x, a, b, c):
    """The probabilistic form: expectation of (origin exponent plus a
    multiple of the bichromatic-face count at the deep corner) under the
    weighted taut measure.  Stated for deep corners on the lowest layer; its
    published prefactor is reproduced verbatim here and the report carries
    both values so mismatches are visible rather than fatal."""
    N = height(x)
    U = slab_solid(N)
    win = build_taut_window(U)
    target = tuple(-t for t in x)
    R = a * c / (b * b)
    point = _slab_init(N, a, b, c, win.sg.vertices)
    comp = win.comp
    corner_faces = [key for key in comp.face_ids()
                    if target in comp.corner_ids[key]]
    num = 0.0
    den = 0.0
    vname = win.vnames[target]
    for cfg in enumerate_taut(U, win):
        w = taut_weight(win, cfg, symbolic=False, g_init=point)
        sym = taut_weight(win, cfg, symbolic=True)
        (mono, _c), = sym.terms.items()
        n0 = dict(mono).get(vname, 0)
        eps = sum(1 for key in corner_faces
                  if key in cfg.assignment
                  and LOCAL_CONFIGS[cfg.assignment[key]][0] in (3, 4))
        num += w * (n0 + eps / (2 * (1 + R)))
        den += w
    return num / den


# ---------------------------------------------------------------------------
# generating-function denominator and the dual curve
# ---------------------------------------------------------------------------

def h_denominator(R, x, y, z, S=None):
    """The two expressions for the denominator: the product form from the
    pair of linear relations and the theta-factored form."""
    if S is None:
        S = s_from_r(R)
    alpha, beta, gamma, alpha_p, beta_p, gamma_p = rho_coeffs(R, S)
    theta = gamma * gamma_p
    e = x + y + z
    q = x * y + x * z + y * z
    form1 = (alpha * x * y * z + gamma * e) \
        * (alpha_p * x * y * z + gamma_p * e) \
        - (1 - beta * q) * (1 - beta_p * q)
    form2 = theta * (x * x - 1) * (y * y - 1) * (z * z - 1) \
        + (1 - theta) * (x * y - 1) * (x * z - 1) * (y * z - 1)
    return form1, form2


def h_identity_check(n_r=10, n_points=1000, seed=0, tol=1e-9):
    import random as _random
    rng = _random.Random(seed)
    for _ in range(n_r):
        R = math.exp(rng.uniform(-2.0, 2.0))
        for _ in range(n_points):
            pt = [rng.uniform(-2, 2) for _ in range(3)]
            f1, f2 = h_denominator(R, *pt)
            if abs(f1 - f2) > tol * (1 + abs(f1) + abs(f2)):
                return False
    return True


def lambda_param(R, S=None):
    if S is None:
        S = s_from_r(R)
    _a, _b, gamma, _ap, _bp, gamma_p = rho_coeffs(R, S)
    theta = gamma * gamma_p
    lam = 2 * (1 + 3 * theta) / (1 - theta)
    if not 2 < lam <= 3 + 1e-12:
        raise LimitShapeError(f"lambda {lam} outside (2, 3]")
    return min(lam, 3.0)


@dataclass
class DualCurve:
    lam: float
    outer: list          # ordered 3D points on x+y+z = -1
    inner: list


def _cubic_gradient(lam, X, Y, Z):
    gx = 2 * X * Y + Y * Y + 2 * X * Z + Z * Z + lam * Y * Z
    gy = X * X + 2 * X * Y + 2 * Y * Z + Z * Z + lam * X * Z
    gz = X * X + 2 * X * Z + Y * Y + 2 * Y * Z + lam * X * Y
    return gx, gy, gz


def _cubic_points(lam, n_samples):
    """Real points of the symmetric cubic, from the chart Z = 1 (quadratic
    in Y) plus the three coordinate points."""
    pts = []
    ts = [math.tan(math.pi * (k + 0.5) / n_samples - math.pi / 2)
          for k in range(n_samples)]
    for X in ts:
        A = X + 1
        B = X * X + lam * X + 1
        C = X * X + X
        if abs(A) < 1e-12:
            if abs(B) > 1e-12:
                pts.append((X, -C / B, 1.0))
            continue
        disc = B * B - 4 * A * C
        if disc < 0:
            continue
        rt = math.sqrt(disc)
        for sgn in (1, -1):
            Yv = (-B + sgn * rt) / (2 * A)
            pts.append((X, Yv, 1.0))
    pts.extend([(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)])
    # symmetry completion: the cubic is invariant under permutations
    full = []
    for (X, Y, Z) in pts:
        full.extend([(X, Y, Z), (Z, X, Y), (Y, Z, X)])
    return full


def dual_curve(lam, n_points=360):
    """Tangent-plane dual of the cubic, rendered in the plane x+y+z = -1."""
    if not 2 < lam <= 3:
        raise LimitShapeError("lambda must lie in (2, 3]")
    raw = []
    for (X, Y, Z) in _cubic_points(lam, n_points):
        g = _cubic_gradient(lam, X, Y, Z)
        norm = math.sqrt(sum(t * t for t in g))
        if norm < 1e-10:
            continue
        s = g[0] + g[1] + g[2]
        if abs(s) < 1e-9 * norm:
            continue
        raw.append(tuple(-t / s for t in g))
    center = (-1 / 3, -1 / 3, -1 / 3)
    u1 = (1 / math.sqrt(2), -1 / math.sqrt(2), 0.0)
    u2 = (1 / math.sqrt(6), 1 / math.sqrt(6), -2 / math.sqrt(6))

    def plane_coords(p):
        d = (p[0] - center[0], p[1] - center[1], p[2] - center[2])
        return (sum(a * b for a, b in zip(d, u1)),
                sum(a * b for a, b in zip(d, u2)))

    deco = {}
    for p in raw:
        px, py = plane_coords(p)
        key = (round(px, 9), round(py, 9))
        deco[key] = (math.atan2(py, px), (px, py), p)
    pts = sorted(deco.values())
    # the outer boundary is convex (it is the dual of the oval component),
    # while the facet boundary sits strictly inside it: classify by distance
    # to the convex hull of the whole cloud
    hull = _convex_hull([xy for _a, xy, _p in pts])
    tol = 1e-6 * max(max(abs(x), abs(y)) for x, y in hull)
    outer, inner = [], []
    for a, xy, p in pts:
        d = _dist_to_polygon(xy, hull)
        (outer if d <= tol else inner).append((a, p))
    return DualCurve(lam, [p for _a, p in sorted(outer)],
                     [p for _a, p in sorted(inner)])


def _convex_hull(points):
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _dist_to_polygon(q, hull):
    best = float("inf")
    n = len(hull)
    for i in range(n):
        a, b = hull[i], hull[(i + 1) % n]
        ax, ay = b[0] - a[0], b[1] - a[1]
        t = ((q[0] - a[0]) * ax + (q[1] - a[1]) * ay) / (ax * ax + ay * ay
                                                         or 1.0)
        t = min(1.0, max(0.0, t))
        px, py = a[0] + t * ax, a[1] + t * ay
        best = min(best, math.hypot(q[0] - px, q[1] - py))
    return best


# ---------------------------------------------------------------------------
# exporters
# ---------------------------------------------------------------------------

def export_heatmap(field, path):
    lines = ["i,j,k,rho"]
    for p in sorted(field.values):
        lines.append(f"{p[0]},{p[1]},{p[2]},{field.values[p]:.12g}")
    data = "\n".join(lines) + "\n"
    with open(path, "w") as fh:
        fh.write(data)
    return path


def export_curve(curve, path, size=600):
    """SVG with the bounding triangle and the curve polylines."""
    corners3 = [(-1, 0, 0), (0, -1, 0), (0, 0, -1)]
    center = (-1 / 3, -1 / 3, -1 / 3)
    u1 = (1 / math.sqrt(2), -1 / math.sqrt(2), 0.0)
    u2 = (1 / math.sqrt(6), 1 / math.sqrt(6), -2 / math.sqrt(6))

    def xy(p):
        d = (p[0] - center[0], p[1] - center[1], p[2] - center[2])
        px = sum(a * b for a, b in zip(d, u1))
        py = sum(a * b for a, b in zip(d, u2))
        return (size / 2 + px * size / 2.2, size / 2 - py * size / 2.2)

    def fmt(points, close=True):
        s = " ".join(f"{x:.6f},{y:.6f}" for x, y in map(xy, points))
        return s

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
             f'height="{size}" viewBox="0 0 {size} {size}">']
    parts.append(f'<polygon points="{fmt(corners3)}" fill="none" '
                 'stroke="black" stroke-width="1"/>')
    if curve.outer:
        parts.append(f'<polygon points="{fmt(curve.outer)}" fill="none" '
                     'stroke="blue" stroke-width="1.5"/>')
    if len(curve.inner) > 2:
        parts.append(f'<polygon points="{fmt(curve.inner)}" fill="none" '
                     'stroke="red" stroke-width="1.5"/>')
    elif curve.inner:
        x, y = xy(curve.inner[0])
        parts.append(f'<circle cx="{x:.6f}" cy="{y:.6f}" r="2" '
                     'fill="red"/>')
    parts.append("</svg>")
    data = "\n".join(parts) + "\n"
    with open(path, "w") as fh:
        fh.write(data)
    return path
