"""Free-fermion regime: decorated dimer graphs, Kasteleyn machinery, and the
torus free energy.

Each face of a quadrangulation becomes a four-vertex city; its corners sit
on the face's sides, roads (weight 1) join cities across shared sides, and
the city edge cutting off a white corner of the face carries a_f while the
one cutting off a black corner carries b_f, where (lambda, a, b) is the
unique decomposition of the face weights with a^2 + b^2 = 1.

Exact arithmetic: weights may be Fractions or quadratic-field values, and
every partition-function identity in the tests is checked with equality, not
tolerances, whenever the inputs are exact.

The torus machinery evaluates det of the magnetically modified white-by-black
adjacency matrix on a fundamental domain; the free energy integrates its log
modulus over the unit torus on half-shifted uniform grids (with one step of
Richardson extrapolation, since the plain grid sum converges like 1/grid^2,
slower than the verification tolerance).
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .loopmodel import (
    BoundarySpec,
    FaceComplex,
    _as_complex,
    blue_data,
    enumerate_configs,
    partition_function,
    weight as loop_weight,
)
from .quadfield import QuadVal
from .quadgraph import FaceWeights, NotFreeFermionic


class FFDimersError(Exception):
    pass


class OddVertexCount(FFDimersError):
    pass


class NotARoad(FFDimersError):
    pass


class NotFound(FFDimersError):
    pass


class UnrealizablePaths(FFDimersError):
    pass


def _exactish(x):
    return isinstance(x, (int, Fraction, QuadVal))


@dataclass
class FFParams:
    lam: object
    a: object
    b: object


def ff_check(w):
    """w1 w4 = w3 w5, w2 w3 = w4 w5, w5 (w1 + w2) = w3 w4."""
    w1, w2, w3, w4, w5 = w.as_tuple()
    lhs = (w1 * w4, w2 * w3, w5 * (w1 + w2))
    rhs = (w3 * w5, w4 * w5, w3 * w4)
    if all(_exactish(x) for x in w.as_tuple()):
        return all(a == b for a, b in zip(lhs, rhs))
    return all(abs(float(a) - float(b)) <= 1e-12 * (abs(float(a)) + 1)
               for a, b in zip(lhs, rhs))


def ff_decompose(w):
    """lambda = w1 + w2, a = w3/lambda, b = w4/lambda."""
    if not ff_check(w):
        raise NotFreeFermionic(f"weights {w.as_tuple()} fail the relations")
    lam = w.w1 + w.w2
    return FFParams(lam, w.w3 / lam, w.w4 / lam)


# ---------------------------------------------------------------------------
# decorated graph
# ---------------------------------------------------------------------------

@dataclass
class DecoratedDimerGraph:
    vertices: list                 # (fid, slot) city corners
    edges: list                    # (u, v, weight, kind) kind: "road"/"city"
    cities: dict                   # fid -> [corners]
    road_of: dict                  # glue key -> edge index

    def edge_index(self):
        return {(min(e[0], e[1], key=str), max(e[0], e[1], key=str)): i
                for i, e in enumerate(self.edges)}

    def incident(self):
        inc = {v: [] for v in self.vertices}
        for i, (u, v, _w, _k) in enumerate(self.edges):
            inc[u].append(i)
            inc[v].append(i)
        return inc


def build_gq(graph, params):
    """The decorated graph: one city per face, roads across glued sides."""
    comp = _as_complex(graph)
    vertices = []
    cities = {}
    edges = []
    road_of = {}
    for fid in comp.face_ids():
        corners = [(fid, s) for s in range(4)]
        cities[fid] = corners
        vertices.extend(corners)
        p = params[fid]
        for s in range(4):
            w = p.a if s % 2 == 0 else p.b
            edges.append(((fid, s), (fid, (s + 1) % 4), w, "city"))
    seen = set()
    for fid in comp.face_ids():
        for s in range(4):
            other = comp.gluing.get((fid, s))
            if other is None or (fid, s) in seen:
                continue
            seen.add(other)
            key = comp.glue_key(fid, s)
            road_of[key] = len(edges)
            edges.append(((fid, s), other, 1, "road"))
    return DecoratedDimerGraph(vertices, edges, cities, road_of)


def enumerate_matchings(gq):
    """All perfect matchings as (tuple of edge indices, weight)."""
    verts = sorted(gq.vertices, key=str)
    if len(verts) % 2:
        raise OddVertexCount(f"{len(verts)} vertices")
    vpos = {v: i for i, v in enumerate(verts)}
    inc = [[] for _ in verts]
    for i, (u, v, w, _k) in enumerate(gq.edges):
        inc[vpos[u]].append((i, vpos[v], w))
        inc[vpos[v]].append((i, vpos[u], w))
    out = []
    covered = [False] * len(verts)
    chosen = []

    def rec(weight):
        try:
            x = covered.index(False)
        except ValueError:
            out.append((tuple(chosen), weight))
            return
        covered[x] = True
        for (i, y, w) in inc[x]:
            if not covered[y]:
                covered[y] = True
                chosen.append(i)
                rec(weight * w)
                chosen.pop()
                covered[y] = False
        covered[x] = False

    rec(Fraction(1))
    return out


def dimer_partition_bruteforce(gq):
    total = 0
    for _m, w in enumerate_matchings(gq):
        total = w + total
    return total


def gauge_transform(gq, gauge):
    """Multiply every edge weight by the gauge values of its endpoints."""
    edges = [(u, v, gauge[u] * gauge[v] * w, k) for (u, v, w, k) in gq.edges]
    return DecoratedDimerGraph(gq.vertices, edges, gq.cities, gq.road_of)


def road_probability(gq, road):
    """Probability that a road is covered in the single dimer model."""
    if isinstance(road, int):
        idx = road
    else:
        idx = gq.road_of.get(road)
        if idx is None:
            raise NotARoad(f"{road} is not a road")
    if gq.edges[idx][3] != "road":
        raise NotARoad(f"edge {idx} is a city edge")
    num = 0
    den = 0
    for m, w in enumerate_matchings(gq):
        den = w + den
        if idx in m:
            num = w + num
    return num / den


# ---------------------------------------------------------------------------
# correspondence checks
# ---------------------------------------------------------------------------

def verify_correspondence(graph, W):
    """Z_loop against prod(lambda) * Z_dim^2, exactly."""
    comp = _as_complex(graph)
    if not comp.is_closed():
        raise FFDimersError("correspondence fixture must be a closed surface")
    params = {fid: ff_decompose(W[fid]) for fid in comp.face_ids()}
    z_loop = partition_function(comp, W, BoundarySpec.closed())
    gq = build_gq(comp, params)
    z_dim = dimer_partition_bruteforce(gq)
    lam = 1
    for fid in comp.face_ids():
        lam = params[fid].lam * lam
    rhs = lam * z_dim * z_dim
    return {"z_loop": z_loop, "z_dim": z_dim, "lambda_product": lam,
            "rhs": rhs, "equal": z_loop == rhs}


def _city_connection(comp, gq, fid, used_city_edges):
    """Pairing of the four sides induced by two opposite city edges."""
    slots = sorted(s for (f, s) in used_city_edges if f == fid)
    if slots == [0, 2]:
        return ((0, 1), (2, 3))
    if slots == [1, 3]:
        return ((3, 0), (1, 2))
    return None


def verify_blue_marginal(graph, W, blue_edges, blue_pairings):
    """Loop mass at fixed blue paths against the constrained double-dimer
    mass.

    blue_edges: set of glue keys that the blue paths occupy;
    blue_pairings: {fid: pairing} for every face whose four sides are blue.
    """
    comp = _as_complex(graph)
    blue_edges = set(blue_edges)
    blue_pairings = {f: tuple(tuple(p) for p in pr)
                     for f, pr in blue_pairings.items()}
    params = {fid: ff_decompose(W[fid]) for fid in comp.face_ids()}

    lhs = 0
    found = False
    for cfg in enumerate_configs(comp, BoundarySpec.closed()):
        edges, pairings = blue_data(comp, cfg)
        if edges != blue_edges or pairings != blue_pairings:
            continue
        found = True
        lhs = loop_weight(comp, cfg, W) + lhs
    if not found:
        raise UnrealizablePaths("no loop configuration has these blue paths")

    gq = build_gq(comp, params)
    matchings = enumerate_matchings(gq)
    road_keys = sorted(gq.road_of, key=str)
    road_idx = {gq.road_of[k]: k for k in road_keys}
    prepared = []
    for m, w in matchings:
        roads = frozenset(road_idx[i] for i in m if i in road_idx)
        city_edges = [gq.edges[i][0] for i in m if i not in road_idx]
        prepared.append((roads, m, w, city_edges))
    lam = 1
    for fid in comp.face_ids():
        lam = params[fid].lam * lam
    rhs = 0
    for ra, ma, wa, ca in prepared:
        for rb, mb, wb, cb in prepared:
            if (ra ^ rb) != blue_edges:
                continue
            ok = True
            for fid, want in blue_pairings.items():
                got = _city_connection(comp, gq, fid, ca + cb)
                if got != want:
                    ok = False
                    break
            if ok:
                rhs = wa * wb + rhs
    rhs = lam * rhs
    return {"lhs": lhs, "rhs": rhs, "equal": lhs == rhs}


# ---------------------------------------------------------------------------
# Kasteleyn orientations
# ---------------------------------------------------------------------------

def _gq_colors(gq):
    """2-coloring of the decorated graph (exists on our even complexes)."""
    inc = gq.incident()
    color = {}
    for start in sorted(gq.vertices, key=str):
        if start in color:
            continue
        color[start] = 0
        queue = [start]
        while queue:
            v = queue.pop()
            for i in inc[v]:
                a, b = gq.edges[i][0], gq.edges[i][1]
                w_ = b if a == v else a
                if w_ not in color:
                    color[w_] = 1 - color[v]
                    queue.append(w_)
                elif color[w_] == color[v]:
                    raise FFDimersError("decorated graph is not bipartite")
    return color


def gq_faces(comp, gq):
    """Face cycles of the decorated graph on the surface: the city 4-cycles
    plus the closed links around primal vertices.  Each cycle is a list of
    (edge index, traversed u->v flag)."""
    eidx = {}
    for i, (u, v, _w, _k) in enumerate(gq.edges):
        eidx[(u, v)] = (i, True)
        eidx[(v, u)] = (i, False)
    faces = []
    for fid in comp.face_ids():
        cyc = []
        for s in range(4):
            cyc.append(eidx[((fid, s), (fid, (s + 1) % 4))])
        faces.append(("city", fid, cyc))
    # links: walk around each primal corner occurrence
    visited = set()
    for fid in comp.face_ids():
        for c in range(4):
            if (fid, c) in visited:
                continue
            # corner c of face fid sits between slots c-1 and c
            walk = []
            cur = (fid, c)
            cycle = []
            closed = True
            while cur not in visited:
                visited.add(cur)
                f, cc = cur
                s_in, s_out = (cc - 1) % 4, cc
                cycle.append(eidx[((f, s_in), (f, s_out))])
                partner = comp.gluing.get((f, s_out))
                if partner is None:
                    closed = False
                    break
                cycle.append(eidx[((f, s_out), partner)])
                f2, s2 = partner
                # the primal corner shared by slot s2 as "entry": next corner
                # index is s2 + 1 (slots s2 and s2+1 surround corner s2+1)
                cur = (f2, (s2 + 1) % 4)
            if closed and cycle:
                faces.append(("link", (fid, c), cycle))
            elif not closed:
                # unwind: mark the rest of the open walk as visited
                f, cc = cur
                while (f, cc) not in visited:
                    visited.add((f, cc))
                    partner = comp.gluing.get((f, cc))
                    if partner is None:
                        break
                    f, s2 = partner
                    cc = (s2 + 1) % 4
    return faces


def _solve_parity(n_edges, constraints):
    """GF(2) solve: find bits with, per constraint (idxs, rhs),
    xor(bits[idxs]) == rhs.  Deterministic; None when infeasible."""
    rows = []
    for idxs, rhs in constraints:
        mask = 0
        for i in idxs:
            mask ^= 1 << i
        rows.append((mask, rhs))
    pivots = {}
    for mask, rhs in rows:
        m, r = mask, rhs
        while m:
            p = m.bit_length() - 1
            if p in pivots:
                pm, pr = pivots[p]
                m ^= pm
                r ^= pr
            else:
                pivots[p] = (m, r)
                break
        else:
            if r:
                return None
    bits = [0] * n_edges
    # a pivot row's non-pivot entries all sit at lower positions, so filling
    # in ascending order resolves every dependency
    for p in sorted(pivots):
        mask, rhs = pivots[p]
        val = rhs
        m = mask ^ (1 << p)
        while m:
            q = m.bit_length() - 1
            val ^= bits[q]
            m ^= 1 << q
        bits[p] = val
    return bits


def kasteleyn_orientation(gq, comp=None, skip_one_face=True):
    """Edge orientation with an odd number of clockwise edges around every
    constrained face (all cities and closed vertex links; on a closed sphere
    one face is left unconstrained, as in the planar picture where the outer
    face is free).  Returns {"bits": ..., "faces": ...}; bit 0 means the edge
    points from its white endpoint to its black endpoint."""
    if comp is None:
        raise FFDimersError("kasteleyn_orientation needs the face complex")
    color = _gq_colors(gq)
    faces = gq_faces(comp, gq)
    if skip_one_face and comp.is_closed():
        constrained = faces[:-1]
    else:
        constrained = faces
    cons = []
    for _kind, _key, cycle in constrained:
        idxs = []
        rhs = 1
        for (i, forward) in cycle:
            u = gq.edges[i][0]
            u_white = color[u] == 1
            # orientation agrees with traversal iff
            #   (bit == 0) == (u_white == forward)
            # i.e. disagreement = bit xor [u_white != forward]
            idxs.append(i)
            if u_white != forward:
                rhs ^= 1
        cons.append((idxs, rhs))
    bits = _solve_parity(len(gq.edges), cons)
    if bits is None:
        raise NotFound("no odd orientation exists for this input")
    return {"bits": bits, "faces": faces, "color": color}


def kasteleyn_valid(gq, data, comp, skip_one_face=True):
    """Independent checker for the odd-clockwise property."""
    color = data["color"]
    faces = gq_faces(comp, gq)
    if skip_one_face and comp.is_closed():
        faces = faces[:-1]
    for _kind, _key, cycle in faces:
        clockwise = 0
        for (i, forward) in cycle:
            u = gq.edges[i][0]
            u_white = color[u] == 1
            oriented_uv = (data["bits"][i] == 0) if u_white \
                else (data["bits"][i] == 1)
            if oriented_uv != forward:
                clockwise += 1
        if clockwise % 2 == 0:
            return False
    return True


def kasteleyn_determinant(gq, data):
    """|det K| for the signed white-by-black matrix (planar/sphere check)."""
    color = data["color"]
    whites = sorted((v for v in gq.vertices if color[v] == 1), key=str)
    blacks = sorted((v for v in gq.vertices if color[v] == 0), key=str)
    wi = {v: i for i, v in enumerate(whites)}
    bi = {v: i for i, v in enumerate(blacks)}
    K = np.zeros((len(whites), len(blacks)))
    for i, (u, v, w, _k) in enumerate(gq.edges):
        if color[u] == 1:
            wv, bv = u, v
        else:
            wv, bv = v, u
        u_white = color[u] == 1
        oriented_uv = (data["bits"][i] == 0) if u_white \
            else (data["bits"][i] == 1)
        white_to_black = oriented_uv == (u == wv)
        K[wi[wv], bi[bv]] += float(w) if white_to_black else -float(w)
    return abs(np.linalg.det(K))


# ---------------------------------------------------------------------------
# torus domains and the free energy
# ---------------------------------------------------------------------------

class TorusDimerGraph:
    """Bipartite weighted graph on the torus: canonical-cell vertices plus
    edges with cell offsets (m, n) in the period lattice."""

    def __init__(self, colors, positions, periods, edges):
        self.colors = dict(colors)            # id -> "white"/"black"
        self.positions = dict(positions)
        self.periods = periods                # ((px, py), (qx, qy))
        self.edges = list(edges)              # (u, v, weight, (m, n))
        self.signs = None

    def pos(self, v, cell=(0, 0)):
        x, y = self.positions[v]
        (px, py), (qx, qy) = self.periods
        return (x + cell[0] * px + cell[1] * qx,
                y + cell[0] * py + cell[1] * qy)

    def faces(self):
        """Face cycles from the rotation system of the periodic embedding."""
        at = {v: [] for v in self.colors}
        for i, (u, v, _w, off) in enumerate(self.edges):
            pu, pv = self.pos(u), self.pos(v, off)
            at[u].append((math.atan2(pv[1] - pu[1], pv[0] - pu[0]), (i, 0)))
            pu2 = self.pos(u, (-off[0], -off[1]))
            pv2 = self.pos(v)
            at[v].append((math.atan2(pu2[1] - pv2[1], pu2[0] - pv2[0]),
                          (i, 1)))
        rot = {}
        for v, lst in at.items():
            lst.sort()
            for k, (_a, d) in enumerate(lst):
                rot[d] = lst[(k + 1) % len(lst)][1]
        faces, seen = [], set()
        for d0 in sorted(rot):
            if d0 in seen:
                continue
            cyc, d = [], d0
            while d not in seen:
                seen.add(d)
                cyc.append(d)
                d = rot[(d[0], 1 - d[1])]
            faces.append(cyc)
        return faces

    def solve_kasteleyn(self):
        """All faces odd; then normalize the twist sector so that the
        spectral determinant vanishes at (1, 1) when possible."""
        cons = []
        for cyc in self.faces():
            idxs, rhs = [], 1
            for (i, direc) in cyc:
                u = self.edges[i][0]
                u_white = self.colors[u] == "white"
                if u_white != (direc == 0):
                    rhs ^= 1
                idxs.append(i)
            cons.append((idxs, rhs))
        bits = _solve_parity(len(self.edges), cons)
        if bits is None:
            raise NotFound("no odd orientation exists on this torus")
        best = None
        for tz, tw in itertools.product((0, 1), repeat=2):
            signs = []
            for i, (_u, _v, _w, (m, n)) in enumerate(self.edges):
                s = -1.0 if bits[i] else 1.0
                if tz and m % 2:
                    s = -s
                if tw and n % 2:
                    s = -s
                signs.append(s)
            self.signs = signs
            val = abs(self.char_poly(1.0, 1.0))
            key = (round(val, 9), tz, tw)
            if best is None or key < best[0]:
                best = (key, signs)
        self.signs = best[1]
        return self.signs

    def char_poly(self, z, w):
        if self.signs is None:
            self.solve_kasteleyn()
        whites = sorted(v for v in self.colors if self.colors[v] == "white")
        blacks = sorted(v for v in self.colors if self.colors[v] == "black")
        wi = {v: i for i, v in enumerate(whites)}
        bi = {v: i for i, v in enumerate(blacks)}
        K = np.zeros((len(whites), len(blacks)), dtype=complex)
        for i, (u, v, wt, (m, n)) in enumerate(self.edges):
            if self.colors[u] == "white":
                wv, bv, mm, nn = u, v, m, n
            else:
                wv, bv, mm, nn = v, u, -m, -n
            K[wi[wv], bi[bv]] += self.signs[i] * float(wt) \
                * (z ** mm) * (w ** nn)
        return complex(np.linalg.det(K))

    def char_poly_grid(self, grid):
        """log|P| summed over the half-shifted grid, vectorized over w."""
        if self.signs is None:
            self.solve_kasteleyn()
        whites = sorted(v for v in self.colors if self.colors[v] == "white")
        blacks = sorted(v for v in self.colors if self.colors[v] == "black")
        wi = {v: i for i, v in enumerate(whites)}
        bi = {v: i for i, v in enumerate(blacks)}
        nv = len(whites)
        ws = np.exp(1j * (2 * np.arange(grid) + 1) * math.pi / grid)
        total = 0.0
        for k in range(grid):
            z = cmath.exp(1j * (2 * k + 1) * math.pi / grid)
            K = np.zeros((grid, nv, nv), dtype=complex)
            for i, (u, v, wt, (m, n)) in enumerate(self.edges):
                if self.colors[u] == "white":
                    wv, bv, mm, nn = u, v, m, n
                else:
                    wv, bv, mm, nn = v, u, -m, -n
                K[:, wi[wv], bi[bv]] += self.signs[i] * float(wt) \
                    * (z ** mm) * (ws ** nn)
            dets = np.linalg.det(K)
            total += float(np.log(np.abs(dets)).sum())
        return total


@dataclass
class TorusDomain:
    lambdas: list
    dimer_graph: TorusDimerGraph


def char_poly_eval(domain, z, w):
    return domain.dimer_graph.char_poly(z, w)


def free_energy(domain, grid=512):
    """Free energy per fundamental domain.

    One Richardson step over the half-shifted grids at sizes grid and grid/2
    removes the leading 1/grid^2 quadrature error of the plain sum.
    """
    if grid < 64 or grid % 2:
        raise FFDimersError("grid must be even and at least 64")
    g = domain.dimer_graph
    s_full = g.char_poly_grid(grid) / grid ** 2
    s_half = g.char_poly_grid(grid // 2) / (grid // 2) ** 2
    mean = (4 * s_full - s_half) / 3
    total = sum(math.log(float(l)) for l in domain.lambdas)
    # the complex measure dz/z dw/w equals -dphi dpsi on the unit torus, so
    # the integral enters with a plus sign against the plain real measure
    return total + 2 * mean


def fig_octa_domain(theta):
    """Fundamental domain of the integrable-weight model: the renewed square
    lattice with horizontal weight sin(theta) and vertical weight cos(theta),
    four vertices per cell, periods (2,0) and (0,2)."""
    a, b = math.sin(theta), math.cos(theta)
    colors = {(0, 0): "black", (1, 1): "black",
              (1, 0): "white", (0, 1): "white"}
    positions = {v: v for v in colors}
    edges = [
        ((0, 0), (1, 0), a, (0, 0)), ((1, 0), (0, 0), a, (1, 0)),
        ((0, 1), (1, 1), a, (0, 0)), ((1, 1), (0, 1), a, (1, 0)),
        ((0, 0), (0, 1), b, (0, 0)), ((0, 1), (0, 0), b, (0, 1)),
        ((1, 0), (1, 1), b, (0, 0)), ((1, 1), (1, 0), b, (0, 1)),
    ]
    g = TorusDimerGraph(colors, positions, ((2, 0), (0, 2)), edges)
    g.solve_kasteleyn()
    return TorusDomain([1.0, 1.0], g)


def gq_torus_domain(theta):
    """The decorated-graph fundamental domain of the same model (two cities,
    twelve edges); its spectral curve differs from the renewed one pointwise
    but has the same log-modulus average."""
    a, b = math.sin(theta), math.cos(theta)
    colors = {}
    positions = {}
    off = {"S": (0, -0.3), "E": (0.3, 0), "N": (0, 0.3), "W": (-0.3, 0)}
    centers = {0: (0.5, 0.5), 1: (1.5, 0.5)}
    parity = {(0, "S"): "white", (0, "N"): "white", (1, "W"): "white",
              (1, "E"): "white"}
    for f in (0, 1):
        for c in "SENW":
            colors[(f, c)] = parity.get((f, c), "black")
            positions[(f, c)] = (centers[f][0] + off[c][0],
                                 centers[f][1] + off[c][1])
    edges = []
    for f, wts in ((0, {"SE": a, "EN": b, "NW": a, "WS": b}),
                   (1, {"SE": b, "EN": a, "NW": b, "WS": a})):
        for pair, w in wts.items():
            edges.append(((f, pair[0]), (f, pair[1]), w, (0, 0)))
    edges.append(((0, "S"), (1, "N"), 1.0, (-1, 0)))
    edges.append(((0, "E"), (1, "W"), 1.0, (0, 0)))
    edges.append(((0, "N"), (1, "S"), 1.0, (0, -1)))
    edges.append(((0, "W"), (1, "E"), 1.0, (-1, -1)))
    g = TorusDimerGraph(colors, positions, ((1, 1), (1, -1)), edges)
    g.solve_kasteleyn()
    return TorusDomain([1.0, 1.0], g)


# ---------------------------------------------------------------------------
# Lobachevsky closed form
# ---------------------------------------------------------------------------

def lobachevsky(theta, tol=1e-12):
    """Milnor's function -int_0^theta log|2 sin t| dt.

    The endpoint log singularity is integrated in closed form; the smooth
    remainder log(sin t / t) goes through adaptive Simpson quadrature.
    """
    if theta == 0:
        return 0.0
    if theta < 0 or theta > math.pi:
        raise ValueError("argument out of range")

    def smooth(t):
        if t < 1e-8:
            return -t * t / 6.0
        return math.log(math.sin(t) / t)

    def simpson(f, a, b, fa, fm, fb, whole, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6 * (fa + 4 * flm + fm)
        right = (b - m) / 6 * (fm + 4 * frm + fb)
        if depth <= 0 or abs(left + right - whole) < 15 * tol:
            return left + right + (left + right - whole) / 15
        return (simpson(f, a, m, fa, flm, fm, left, depth - 1)
                + simpson(f, m, b, fm, frm, fb, right, depth - 1))

    fa, fb = smooth(0.0), smooth(theta)
    fm = smooth(theta / 2)
    whole = theta / 6 * (fa + 4 * fm + fb)
    smooth_part = simpson(smooth, 0.0, theta, fa, fm, fb, whole, 40)
    singular_part = theta * (math.log(2 * theta) - 1)
    return -(singular_part + smooth_part)


def lobachevsky_free_energy(theta):
    """Closed form of the integrable free energy per fundamental domain."""
    if not 0 < theta < math.pi / 2:
        raise ValueError("theta must lie in (0, pi/2)")
    return ((8 / math.pi) * (lobachevsky(theta)
                             + lobachevsky(math.pi / 2 - theta))
            + (8 * theta / math.pi) * math.log(math.tan(theta))
            + 4 * math.log(math.cos(theta)))
