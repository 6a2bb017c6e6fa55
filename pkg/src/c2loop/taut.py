"""Taut loop configurations on stepped surfaces.

The reference configuration on the flat corner is all blue: every face pairs
its sides so the two paths turn around the face's mid-height corners.  The
resulting blue paths climb one wall sector diagonally, cross a fold and
descend the neighbouring sector, so all of them are infinite and nested; the
weight telescope makes the reference weight equal to the origin variable.

A taut configuration on a carved solid agrees with the reference picture
outside a ball around the origin and reconnects the frozen strands exactly
as the reference does.  Enumeration works on a finite zone of faces around
the carve: colors propagate through shared sides, strands are maintained as
chains between interface plugs, and any chain that closes interface-to-
interface with the wrong partner kills the branch immediately.  Processing
faces from the deepest wall level upward makes that check fire as early as
possible.

Weights are assembled per vertex: each face type contributes exponent 1 to
its non-hugged diagonal (rows 1-2), exponent 1/2 plus the face root variable
to a diagonal (rows 3-4), or exponent 1/2 to every corner (row 5); the
renormalization subtracts 2 at every vertex, and everything outside the zone
cancels against the reference pattern except on a bounded collar.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .kashaev import build_registry, solve_origin
from .laurent import lp_eval
from .loopmodel import FaceComplex, LOCAL_CONFIGS, side_colors
from .stepped import (
    SteppedSolid,
    face_diagonals,
    height,
    is_regular,
    norm2,
    surface_graph,
)


class TautError(Exception):
    pass


class Stuck(TautError):
    pass


class NotAMonomial(TautError):
    pass


ROW_TYPES = {1: ("1a", "1b"), 2: ("2a", "2b"), 3: ("3a", "3b"),
             4: ("4a", "4b"), 5: ("5a", "5b")}


def _rotate_black_first(cyc):
    """Rotate a face cycle so the lex-least even-height corner leads."""
    blacks = [i for i, c in enumerate(cyc) if height(c) % 2 == 0]
    i = min(blacks, key=lambda k: cyc[k])
    return tuple(cyc[(i + j) % 4] for j in range(4))


def window_complex(sg):
    """FaceComplex of a surface window; face keys are the (axis, base)
    pairs, corner cycles rotated to start at the lex-least black corner."""
    corner_ids = {}
    for key, cyc in sg.faces.items():
        corner_ids[key] = _rotate_black_first(cyc)
    incid = {}
    for key in sorted(corner_ids):
        cyc = corner_ids[key]
        for s in range(4):
            e = frozenset((cyc[s], cyc[(s + 1) % 4]))
            incid.setdefault(e, []).append((key, s))
    gluing = {}
    for e, slots in incid.items():
        if len(slots) == 2:
            gluing[slots[0]] = slots[1]
            gluing[slots[1]] = slots[0]
        elif len(slots) > 2:
            raise TautError(f"edge {sorted(e)} bounds {len(slots)} faces")
    return FaceComplex(corner_ids, gluing)


def sigma0_type(cyc):
    """Local picture of the reference configuration: hug the two mid-height
    corners in blue."""
    h = [height(c) for c in cyc]
    if h[1] == h[3]:
        return "1b"     # mids at the odd slots (the white corners)
    if h[0] == h[2]:
        return "2b"
    raise TautError(f"face heights {h} are not a surface pattern")


def sigma0(sg):
    """Reference assignment for every face of a window."""
    return {key: sigma0_type(_rotate_black_first(cyc))
            for key, cyc in sg.faces.items()}


# type -> per-slot vertex exponent contribution (slot = corner position)
_CORNER_EXP = {}
for _row, _names in ROW_TYPES.items():
    for _name in _names:
        if _row == 1:
            exps = (Fraction(1), Fraction(0), Fraction(1), Fraction(0))
        elif _row == 2:
            exps = (Fraction(0), Fraction(1), Fraction(0), Fraction(1))
        elif _row == 3:
            exps = (Fraction(1, 2), Fraction(0), Fraction(1, 2), Fraction(0))
        elif _row == 4:
            exps = (Fraction(0), Fraction(1, 2), Fraction(0), Fraction(1, 2))
        else:
            exps = (Fraction(1, 2),) * 4
        _CORNER_EXP[_name] = exps


@dataclass
class TautWindow:
    """Shared context: carved window, flat window, zone and interface."""

    solid: SteppedSolid
    sg: object
    comp: FaceComplex
    flat_sg: object
    flat_comp: FaceComplex
    zone: list                    # carved zone face keys, processing order
    frozen: set
    interface_edges: set          # primal-edge keys on the zone boundary
    target_pairing: dict          # interface edge -> partner edge
    registry: object
    vnames: dict


def _zone_faces(comp, r2):
    out = []
    for key in comp.face_ids():
        cyc = comp.corner_ids[key]
        if min(norm2(c) for c in cyc) <= r2:
            out.append(key)
    return out


def _face_level(comp, key):
    return min(height(c) for c in comp.corner_ids[key])


def build_taut_window(U, extra_collar=4.0):
    reg_info = is_regular(U)
    if not reg_info["regular"]:
        raise TautError("taut enumeration requires a regular solid")
    r_u = reg_info["R_U"]
    radius = r_u + extra_collar
    sg = surface_graph(U, radius)
    flat_sg = surface_graph(SteppedSolid(), radius)
    comp = window_complex(sg)
    flat_comp = window_complex(flat_sg)
    r2 = r_u * r_u
    zone = _zone_faces(comp, r2)
    flat_zone = _zone_faces(flat_comp, r2)
    frozen = set(comp.face_ids()) - set(zone)
    flat_frozen = set(flat_comp.face_ids()) - set(flat_zone)
    if frozen != flat_frozen:
        raise TautError("carved region leaks outside the zone ball")
    # interface edges: sides between a zone face and a frozen face
    def interface(c, zone_set):
        out = set()
        for key in zone_set:
            cyc = c.corner_ids[key]
            for s in range(4):
                partner = c.gluing.get((key, s))
                if partner is None:
                    raise TautError("zone touches the window boundary; "
                                    "enlarge the collar")
                if partner[0] not in zone_set:
                    out.add(frozenset((cyc[s], cyc[(s + 1) % 4])))
        return out

    iface = interface(comp, set(zone))
    flat_iface = interface(flat_comp, set(flat_zone))
    if iface != flat_iface:
        raise TautError("interface mismatch between carved and flat windows")
    target = _sigma0_pairing(flat_comp, set(flat_zone), iface)
    zone.sort(key=lambda k: (_face_level(comp, k), str(k)))
    registry, vnames = build_registry(sg)
    return TautWindow(U, sg, comp, flat_sg, flat_comp, zone, frozen, iface,
                      target, registry, vnames)


def _sigma0_pairing(flat_comp, flat_zone, iface):
    """Pair the interface edges by tracing the reference picture through the
    flat zone."""
    assign = {key: sigma0_type(flat_comp.corner_ids[key])
              for key in flat_zone}

    def edge_of(key, s):
        cyc = flat_comp.corner_ids[key]
        return frozenset((cyc[s], cyc[(s + 1) % 4]))

    target = {}
    for start_key in sorted(iface, key=sorted):
        if start_key in target:
            continue
        # find the zone-side slot of this interface edge
        slot = None
        for key in flat_zone:
            for s in range(4):
                if edge_of(key, s) == start_key:
                    slot = (key, s)
        cur = slot
        while True:
            key, s = cur
            pairs = LOCAL_CONFIGS[assign[key]][1]
            other = None
            for p in pairs:
                if s in p:
                    other = p[0] if p[1] == s else p[1]
            e = edge_of(key, other)
            if e in iface:
                target[start_key] = e
                target[e] = start_key
                break
            nxt = flat_comp.gluing[(key, other)]
            if nxt[0] not in flat_zone:
                raise TautError("reference strand left the zone unexpectedly")
            cur = nxt
    return target


@dataclass
class TautConfig:
    assignment: dict              # zone face -> local picture name
    n_loops: int
    window: TautWindow

    def full_assignment(self):
        out = {key: sigma0_type(self.window.comp.corner_ids[key])
               for key in self.window.frozen}
        out.update(self.assignment)
        return out

    def to_json(self):
        return {"faces": {str(k): v for k, v in
                          sorted(self.assignment.items(), key=str)},
                "n_loops": self.n_loops,
                "window_radius": self.window.sg.window_radius}


def enumerate_taut(U, window=None):
    """All taut configurations, deterministic order."""
    win = window or build_taut_window(U)
    comp = win.comp
    zone = win.zone
    zone_set = set(zone)

    def edge_of(key, s):
        cyc = comp.corner_ids[key]
        return frozenset((cyc[s], cyc[(s + 1) % 4]))

    # plugs: (edge, face) for zone faces; interface edges have a terminal
    # plug (edge, "IF").  ends maps an open chain end to its other end.
    ends = {}
    for key in zone:
        for s in range(4):
            e = edge_of(key, s)
            if e in win.interface_edges:
                a, b = (e, key), (e, "IF")
            else:
                partner = comp.gluing[(key, s)]
                if partner[0] not in zone_set:
                    raise TautError("zone face glued to frozen non-interface")
                a, b = (e, key), (e, partner[0])
            if a not in ends:
                ends[a] = b
                ends[b] = a
    edge_color = {e: "B" for e in win.interface_edges}

    order = list(zone)
    results = []
    assign = {}
    n_loops = [0]

    def join(p1, p2, log):
        """Connect two plugs; returns False when a completed chain violates
        the reference pairing."""
        a, b = ends.pop(p1), ends.pop(p2)
        log.append((p1, a, p2, b))
        if a == p2:
            n_loops[0] += 1
            log.append("loop")
            return True
        ends[a] = b
        ends[b] = a
        if a[1] == "IF" and b[1] == "IF":
            if win.target_pairing[a[0]] != b[0]:
                return False
        return True

    def undo(log):
        for item in reversed(log):
            if item == "loop":
                n_loops[0] -= 1
                continue
            p1, a, p2, b = item
            if a != p2:
                ends[a] = p1
                ends[b] = p2
            ends[p1] = a
            ends[p2] = b

    def rec(k):
        if k == len(order):
            results.append(TautConfig(dict(assign), n_loops[0], win))
            return
        key = order[k]
        sides = [edge_of(key, s) for s in range(4)]
        for name in ("1a", "1b", "2a", "2b", "3a", "3b", "4a", "4b",
                     "5a", "5b"):
            cols = side_colors(name)
            if any(edge_color.get(sides[s], cols[s]) != cols[s]
                   for s in range(4)):
                continue
            added = []
            for s in range(4):
                if sides[s] not in edge_color:
                    edge_color[sides[s]] = cols[s]
                    added.append(sides[s])
            pairs = LOCAL_CONFIGS[name][1]
            log = []
            ok = True
            for (s1, s2) in pairs:
                if not join((sides[s1], key), (sides[s2], key), log):
                    ok = False
                    break
            if ok:
                assign[key] = name
                rec(k + 1)
                del assign[key]
            undo(log)
            for e in added:
                del edge_color[e]

    rec(0)
    return results


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

def _vertex_contributions(win, assignment):
    """Total per-vertex exponent (before the -2 renormalization applies) and
    the set of face roots used, over the zone plus the frozen collar."""
    comp = win.comp
    exps = {}
    roots = []
    zone_set = set(win.zone)
    touched = set()
    for key, name in assignment.items():
        cyc = comp.corner_ids[key]
        contrib = _CORNER_EXP[name]
        for s in range(4):
            exps[cyc[s]] = exps.get(cyc[s], Fraction(0)) + contrib[s]
            touched.add(cyc[s])
        if LOCAL_CONFIGS[name][0] in (3, 4):
            roots.append(key)
    # frozen faces incident to any touched vertex contribute their reference
    # exponents; vertices strictly inside the frozen flat region cancel
    for key in win.frozen:
        cyc = comp.corner_ids[key]
        if not (set(cyc) & touched):
            continue
        contrib = _CORNER_EXP[sigma0_type(cyc)]
        for s in range(4):
            if cyc[s] in touched:
                exps[cyc[s]] = exps.get(cyc[s], Fraction(0)) + contrib[s]
    out = {}
    for v, e in exps.items():
        total = e - 2
        if total != 0:
            out[v] = total
    return out, roots


def _check_vertex_completeness(win, verts):
    """Every vertex with a residual exponent must have all its faces inside
    the window, i.e. sit well inside the window ball."""
    lim = (win.sg.window_radius - 2.1) ** 2
    for v in verts:
        if norm2(v) > lim:
            raise TautError(f"vertex {v} too close to the window boundary; "
                            "enlarge the collar")


def taut_weight(win, config, symbolic=True, g_init=None):
    """Weight 2^loops * prod w^f * prod g^-2 of one taut configuration."""
    exps, roots = _vertex_contributions(win, config.assignment)
    _check_vertex_completeness(win, exps)
    reg = win.registry
    if symbolic:
        mono = {}
        for v, e in exps.items():
            if e.denominator != 1:
                raise TautError(f"half-integer exponent survived at {v}")
            mono[win.vnames[v]] = int(e)
        for key in roots:
            mono[win.sg.face_root_name(key)] = 1
        return reg.monomial(mono, Fraction(2) ** config.n_loops)
    val = float(2 ** config.n_loops)
    for v, e in exps.items():
        val *= float(g_init[v]) ** float(e)
    for key in roots:
        axis, base = key
        (a, c), (b, d) = face_diagonals(axis, base)
        val *= math.sqrt(float(g_init[a]) * float(g_init[c])
                         + float(g_init[b]) * float(g_init[d]))
    return val


def y_taut(U, g_init=None, symbolic=True, window=None):
    """Renormalized partition function over all taut configurations."""
    win = window or build_taut_window(U)
    configs = enumerate_taut(U, win)
    if symbolic:
        total = win.registry.zero()
        for cfg in configs:
            total = total + taut_weight(win, cfg, symbolic=True)
        return total
    return sum(taut_weight(win, cfg, symbolic=False, g_init=g_init)
               for cfg in configs)


def verify_partition_identity(U, mode="symbolic", g_init=None, window=None, tol=1e-9):
    """Partition function against the recurrence solution at the origin."""
    win = window or build_taut_window(U)
    if mode == "symbolic":
        lhs = y_taut(U, symbolic=True, window=win)
        rhs = solve_origin(U, mode="symbolic",
                           window_radius=win.sg.window_radius)
        return lhs == rhs
    lhs = y_taut(U, g_init=g_init, symbolic=False, window=win)
    rhs = solve_origin(U, g_init=g_init, mode="numeric",
                       window_radius=win.sg.window_radius)
    return abs(lhs - rhs) <= tol * (abs(rhs) + 1)


def verify_monomial_bijection(U, window=None):
    """Monomial <-> configuration checks on the symbolic solution."""
    win = window or build_taut_window(U)
    configs = enumerate_taut(U, win)
    poly = solve_origin(U, mode="symbolic",
                        window_radius=win.sg.window_radius)
    report = {"n_configs": len(configs), "n_monomials": poly.num_terms()}
    report["counts_match"] = report["n_configs"] == report["n_monomials"]
    seen = {}
    injective = True
    coeffs_ok = True
    for cfg in configs:
        w = taut_weight(win, cfg, symbolic=True)
        (mono, coeff), = w.terms.items()
        if mono in seen:
            injective = False
        seen[mono] = cfg
        if coeff != Fraction(2) ** cfg.n_loops:
            coeffs_ok = False
        if mono not in poly.terms or poly.terms[mono] != coeff:
            coeffs_ok = False
    report["injective"] = injective
    report["coefficients_are_loop_powers"] = coeffs_ok
    vert_ok, root_ok = True, True
    reg = win.registry
    for mono, _c in poly.terms.items():
        for name, e in mono:
            if reg.is_root(name):
                root_ok &= e in (0, 1)
            else:
                vert_ok &= -2 <= e <= 4
    report["vertex_exponents_in_range"] = vert_ok
    report["root_exponents_in_range"] = root_ok
    report["all"] = all((report["counts_match"], injective, coeffs_ok,
                         vert_ok, root_ok))
    return report


# ---------------------------------------------------------------------------
# reconstruction
# ---------------------------------------------------------------------------

def reconstruct_from_monomial(U, monomial, window=None):
    """Rebuild the unique configuration whose weight is the given monomial.

    monomial: {var name: exponent} over the window's variables.  Repeatedly
    finds a vertex with one unknown face, reads the row off the face-root
    presence and the residual half-integer exponent, and the variant off a
    known incident edge color.
    """
    win = window or build_taut_window(U)
    comp = win.comp
    zone_set = set(win.zone)
    name_to_vertex = {name: v for v, name in win.vnames.items()}
    root_faces = set()
    residual = {}
    for name, e in monomial.items():
        if win.registry.is_root(name):
            if e not in (0, 1):
                raise NotAMonomial(f"root exponent {e}")
            if e:
                key = next(k for k in comp.face_ids()
                           if win.sg.face_root_name(k) == name)
                root_faces.add(key)
        else:
            residual[name_to_vertex[name]] = Fraction(e)

    assign = {}
    # start from the reference values: residual tracks the exponent not yet
    # explained by known faces; frozen faces and the +2 renormalization are
    # folded in up front
    known = {key: sigma0_type(comp.corner_ids[key]) for key in win.frozen}
    res = {}
    faces_at = {}
    for key in comp.face_ids():
        for c in comp.corner_ids[key]:
            faces_at.setdefault(c, []).append(key)
    touched = set()
    for key in zone_set:
        touched.update(comp.corner_ids[key])
    for v in touched:
        res[v] = residual.get(v, Fraction(0)) + 2
        for key in faces_at[v]:
            if key in known:
                slot = comp.corner_ids[key].index(v)
                res[v] -= _CORNER_EXP[known[key]][slot]
    edge_color = {e: "B" for e in win.interface_edges}

    def edge_of(key, s):
        cyc = comp.corner_ids[key]
        return frozenset((cyc[s], cyc[(s + 1) % 4]))

    unknown = set(zone_set)
    while unknown:
        pick = None
        for v in sorted(touched):
            unk = [k for k in faces_at[v] if k in unknown]
            if len(unk) == 1:
                pick = (v, unk[0])
                break
        if pick is None:
            raise Stuck("no vertex with a single unknown face")
        v, key = pick
        cyc = comp.corner_ids[key]
        slot = cyc.index(v)
        on_black_diag = slot % 2 == 0
        r = res[v]
        if key in root_faces:
            if r == Fraction(1, 2):
                row = 3 if on_black_diag else 4
            elif r == 0:
                row = 4 if on_black_diag else 3
            else:
                raise NotAMonomial(f"residual {r} at {v} with face root")
        else:
            if r == 1:
                row = 1 if on_black_diag else 2
            elif r == 0:
                row = 2 if on_black_diag else 1
            elif r == Fraction(1, 2):
                row = 5
            else:
                raise NotAMonomial(f"residual {r} at {v}")
        # variant from any known incident edge color
        name = None
        for cand in ROW_TYPES[row]:
            cols = side_colors(cand)
            ok = True
            for s in range(4):
                e = edge_of(key, s)
                if e in edge_color and edge_color[e] != cols[s]:
                    ok = False
                    break
            if ok and name is not None:
                raise Stuck(f"variant ambiguous at {key}")
            if ok:
                name = cand
        if name is None:
            raise NotAMonomial(f"no variant of row {row} fits at {key}")
        assign[key] = name
        unknown.discard(key)
        cols = side_colors(name)
        contrib = _CORNER_EXP[name]
        for s in range(4):
            e = edge_of(key, s)
            if e not in edge_color:
                edge_color[e] = cols[s]
            res[cyc[s]] -= contrib[s]
    if any(r != 0 for r in res.values()):
        raise NotAMonomial("unexplained exponents remain")
    cfg = TautConfig(assign, _count_zone_loops(win, assign), win)
    w = taut_weight(win, cfg, symbolic=True)
    (m2, _c2), = w.terms.items()
    want = tuple(sorted(((n, e) for n, e in monomial.items() if e != 0),
                        key=lambda t: win.registry.index(t[0])))
    if m2 != want:
        raise NotAMonomial("reconstructed weight does not match the input")
    return cfg


def _count_zone_loops(win, assignment):
    """Closed loops of a zone assignment, by independent tracing."""
    from .loopmodel import FaceComplex, LoopConfig, count_loops
    zone = set(win.zone)
    corner_ids = {k: win.comp.corner_ids[k] for k in zone}
    gluing = {(k, s): p for (k, s), p in win.comp.gluing.items()
              if k in zone and p[0] in zone}
    comp = FaceComplex(corner_ids, gluing)
    return count_loops(comp, LoopConfig(dict(assignment)))


def sample_taut(U, g_init, seed=0, n=1, window=None):
    """Exact sampling proportional to the numeric weight; deterministic for
    a given seed.  Returns one configuration, or a list when n > 1."""
    win = window or build_taut_window(U)
    configs = enumerate_taut(U, win)
    weights = [taut_weight(win, c, symbolic=False, g_init=g_init)
               for c in configs]
    total = sum(weights)
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        x = rng.random() * total
        acc = 0.0
        pick = configs[-1]
        for c, w in zip(configs, weights):
            acc += w
            if x <= acc:
                pick = c
                break
        out.append(pick)
    return out[0] if n == 1 else out
