"""The dense two-color loop model: local pictures, gluing, loops, weights.

Every face of a bipartite quadrangulation carries one of ten local pictures.
With the face corners written (x, u, y, v) clockwise, x black, the four dual
half-edges are the sides s0={x,u}, s1={u,y}, s2={y,v}, s3={v,x}, and the
pictures pair them as

  rows 1, 3:  {s0,s1} and {s2,s3}   (paths turning around u and around v)
  rows 2, 4:  {s3,s0} and {s1,s2}   (paths turning around x and around y)
  row  5:     {s0,s2} and {s1,s3}   (two crossing straight paths)

Rows 1-2 are monochromatic (variant a red, b blue); rows 3-5 have one path
of each color, the variant choosing which.  Gluing requires equal colors on
shared dual edges.

Configurations are enumerated on a FaceComplex: faces with four side slots
and an explicit gluing involution.  This supports closed surfaces (sphere,
torus fundamental domains, where a face may see the same vertex twice) as
well as planar windows with boundary half-edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


class LoopModelError(Exception):
    pass


class UnrealizablePaths(LoopModelError):
    pass


# name -> (row, pairs, colors-of-pairs)
LOCAL_CONFIGS = {
    "1a": (1, ((0, 1), (2, 3)), ("R", "R")),
    "1b": (1, ((0, 1), (2, 3)), ("B", "B")),
    "2a": (2, ((3, 0), (1, 2)), ("R", "R")),
    "2b": (2, ((3, 0), (1, 2)), ("B", "B")),
    "3a": (3, ((0, 1), (2, 3)), ("R", "B")),
    "3b": (3, ((0, 1), (2, 3)), ("B", "R")),
    "4a": (4, ((3, 0), (1, 2)), ("R", "B")),
    "4b": (4, ((3, 0), (1, 2)), ("B", "R")),
    "5a": (5, ((0, 2), (1, 3)), ("R", "B")),
    "5b": (5, ((0, 2), (1, 3)), ("B", "R")),
}
CONFIG_ORDER = ("1a", "1b", "2a", "2b", "3a", "3b", "4a", "4b", "5a", "5b")


def side_colors(name):
    """Color of each of the four sides for a local picture."""
    _row, pairs, cols = LOCAL_CONFIGS[name]
    out = [None] * 4
    for (p, c) in zip(pairs, cols):
        out[p[0]] = c
        out[p[1]] = c
    return tuple(out)


@dataclass
class FaceComplex:
    """Faces with slot gluing.  corner_ids may repeat on small tori."""

    corner_ids: dict            # fid -> 4-tuple, corner 0 black
    gluing: dict = field(default_factory=dict)   # (fid, s) <-> (fid', s')

    def face_ids(self):
        return sorted(self.corner_ids, key=str)

    def half_edges(self):
        out = []
        for fid in self.face_ids():
            for s in range(4):
                if (fid, s) not in self.gluing:
                    out.append((fid, s))
        return out

    def glue_key(self, fid, s):
        other = self.gluing.get((fid, s))
        if other is None:
            return ("half", fid, s)
        return ("glued",) + min((fid, s), other, key=str)

    def is_closed(self):
        return not self.half_edges()


def complex_from_quadgraph(graph):
    """Slot-glued view of a QuadGraph; edges must bound at most two faces."""
    corner_ids = {}
    for fid in sorted(graph.faces, key=str):
        corner_ids[fid] = graph.corner_labels(fid)
    incid = {}
    for fid in sorted(graph.faces, key=str):
        cyc = corner_ids[fid]
        for s in range(4):
            e = frozenset((cyc[s], cyc[(s + 1) % 4]))
            incid.setdefault(e, []).append((fid, s))
    gluing = {}
    for e, slots in incid.items():
        if len(slots) > 2:
            raise LoopModelError(f"edge {sorted(e)} bounds {len(slots)} faces")
        if len(slots) == 2:
            gluing[slots[0]] = slots[1]
            gluing[slots[1]] = slots[0]
    return FaceComplex(corner_ids, gluing)


def _as_complex(graph):
    return graph if isinstance(graph, FaceComplex) \
        else complex_from_quadgraph(graph)


@dataclass
class BoundarySpec:
    mode: str = "free"          # free | closed_surface | fixed_colors |
    colors: dict = None         # fixed_connections
    connections: list = None    # [((he1, he2), color), ...]

    @staticmethod
    def free():
        return BoundarySpec("free")

    @staticmethod
    def closed():
        return BoundarySpec("closed_surface")

    @staticmethod
    def fixed_colors(colors):
        return BoundarySpec("fixed_colors", colors=dict(colors))

    @staticmethod
    def fixed_connections(connections):
        conn = [((tuple(a), tuple(b)), c) for (a, b), c in connections]
        seen = [he for (a, b), _ in conn for he in (a, b)]
        if len(seen) != len(set(seen)):
            raise LoopModelError("connection pairing is not a matching")
        return BoundarySpec("fixed_connections", connections=conn)


@dataclass
class LoopConfig:
    assignment: dict            # fid -> local picture name
    boundary: BoundarySpec = None

    def to_json(self):
        return {"faces": {str(f): t for f, t in sorted(
            self.assignment.items(), key=lambda t: str(t[0]))}}


def enumerate_configs(graph, boundary=None):
    """All gluing-consistent assignments, deterministic order."""
    comp = _as_complex(graph)
    boundary = boundary or BoundarySpec.free()
    if boundary.mode == "closed_surface" and not comp.is_closed():
        raise LoopModelError("complex has boundary half-edges")
    fids = comp.face_ids()
    fixed = {}
    if boundary.mode == "fixed_colors":
        fixed = {tuple(k): v for k, v in boundary.colors.items()}
    if boundary.mode == "fixed_connections":
        for (a, b), c in boundary.connections:
            fixed[a] = c
            fixed[b] = c
    edge_color = {}
    assign = {}
    out = []

    def rec(k):
        if k == len(fids):
            cfg = LoopConfig(dict(assign), boundary)
            if boundary.mode == "fixed_connections" and \
                    not _connections_match(comp, cfg, boundary.connections):
                return
            out.append(cfg)
            return
        fid = fids[k]
        for name in CONFIG_ORDER:
            cols = side_colors(name)
            keys = [comp.glue_key(fid, s) for s in range(4)]
            ok = True
            for s in range(4):
                want = cols[s]
                if edge_color.get(keys[s], want) != want:
                    ok = False
                    break
                if (fid, s) in fixed and fixed[(fid, s)] != want:
                    ok = False
                    break
            if not ok:
                continue
            added = []
            for s in range(4):
                if keys[s] not in edge_color:
                    edge_color[keys[s]] = cols[s]
                    added.append(keys[s])
            assign[fid] = name
            rec(k + 1)
            del assign[fid]
            for key in added:
                del edge_color[key]

    rec(0)
    return out


def _trace(comp, config):
    """Walk the pairing structure.

    Returns (cycles, paths): cycles as lists of (fid, pair_idx) with their
    color and row-5 traversal count; paths as (endpoints, color, nodes).
    """
    nodes = {}
    for fid, name in config.assignment.items():
        _row, pairs, cols = LOCAL_CONFIGS[name]
        for pi, (p, c) in enumerate(zip(pairs, cols)):
            nodes[(fid, pi)] = (p, c)
    # slot -> node carrying it
    slot_node = {}
    for (fid, pi), (p, _c) in nodes.items():
        for s in p:
            slot_node[(fid, s)] = (fid, pi)
    cycles, paths = [], []
    seen = set()
    for start in sorted(nodes, key=str):
        if start in seen:
            continue
        seen.add(start)
        chain = [start]
        end_slots = []
        closed = False
        for d in (0, 1):
            if closed:
                break
            slot = (start[0], nodes[start][0][d])
            while True:
                partner = comp.gluing.get(slot)
                if partner is None:
                    end_slots.append(slot)
                    break
                nxt = slot_node[partner]
                if nxt == start:
                    closed = True
                    break
                seen.add(nxt)
                if d == 0:
                    chain.append(nxt)
                else:
                    chain.insert(0, nxt)
                p2 = nodes[nxt][0]
                other = p2[1] if partner[1] == p2[0] else p2[0]
                slot = (nxt[0], other)
        color = nodes[start][1]
        if closed:
            crossings = sum(
                1 for (fid, _pi) in chain
                if LOCAL_CONFIGS[config.assignment[fid]][0] == 5)
            cycles.append((chain, color, crossings))
        else:
            paths.append((tuple(end_slots), color, chain))
    return cycles, paths


def count_loops(graph, config):
    """Number of finite closed monochromatic loops (paths to the boundary
    are not counted)."""
    comp = _as_complex(graph)
    cycles, _paths = _trace(comp, config)
    return len(cycles)


def crossing_parity_check(graph, config):
    """Every closed loop crosses opposite-colored paths an even number of
    times (each row-5 face traversal is one crossing)."""
    comp = _as_complex(graph)
    cycles, _paths = _trace(comp, config)
    return all(crossings % 2 == 0 for _chain, _color, crossings in cycles)


def weight(graph, config, W, fugacity_exp=True):
    """2^loops * prod of local weights (or the marked version without the
    loop factor)."""
    comp = _as_complex(graph)
    total = Fraction(1)
    for fid, name in config.assignment.items():
        row = LOCAL_CONFIGS[name][0]
        total = total * W[fid].as_tuple()[row - 1]
    if fugacity_exp:
        n = count_loops(comp, config)
        total = total * Fraction(2) ** n
    return total


def partition_function(graph, W, boundary=None, fugacity_exp=True):
    comp = _as_complex(graph)
    total = 0
    for cfg in enumerate_configs(comp, boundary):
        total = weight(comp, cfg, W, fugacity_exp) + total
    return total


def blue_data(graph, config):
    """The blue part of a configuration: its blue glued-edge set plus the
    pairing choice at faces whose four sides are all blue."""
    comp = _as_complex(graph)
    blue_edges = set()
    pairings = {}
    for fid, name in config.assignment.items():
        _row, pairs, cols = LOCAL_CONFIGS[name]
        scol = side_colors(name)
        for s in range(4):
            if scol[s] == "B":
                blue_edges.add(comp.glue_key(fid, s))
        if all(c == "B" for c in scol):
            pairings[fid] = pairs
    return blue_edges, pairings


def _connections_match(comp, config, connections):
    _cycles, paths = _trace(comp, config)
    got = {}
    for ends, color, _chain in paths:
        got[frozenset(ends)] = color
    want = {frozenset((a, b)): c for (a, b), c in connections}
    return got == want
