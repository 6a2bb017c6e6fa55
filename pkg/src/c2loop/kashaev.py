"""The degree-2 cube relation, its explicit recurrence, and symbolic solving.

The eight corners of a unit cube carry values g, g1, g2, g3, g12, g13, g23,
g123 and the six faces carry X, Y, Z (bottom) and X1, Y2, Z3 (top), where
X^2 = g*g23 + g2*g3 etc.  Completing the cube takes the greatest root of the
corner relation:

    g123 = (2 g1 g2 g3 + g (g1 g23 + g2 g13 + g3 g12) + 2 X Y Z) / g^2
    X1 = (g1 X + Y Z) / g,   Y2 = (g2 Y + X Z) / g,   Z3 = (g3 Z + X Y) / g.

In symbolic mode every division goes through exact Laurent division; a
failed division is a hard error rather than a fallback, because the result
is guaranteed to be a Laurent polynomial.

`solve_origin` iterates the completion over a regular stepped solid: cubes
are added back in a fill order, each step consuming the three pit faces at
the cube and producing the three new ones, until the value at the origin is
known.  Face values of the original surface are first-class root variables;
propagated faces carry the polynomials from the items above, so no new root
symbols ever appear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .laurent import LaurentPoly, VarRegistry, lp_div_exact
from .stepped import (
    UNITS,
    SteppedSolid,
    face_diagonals,
    fill_order,
    is_regular,
    surface_graph,
    vadd,
)


class KashaevError(Exception):
    pass


class NonPositive(KashaevError):
    pass


@dataclass
class CubeData:
    g: object = None
    g1: object = None
    g2: object = None
    g3: object = None
    g12: object = None
    g13: object = None
    g23: object = None
    g123: object = None
    X: object = None
    Y: object = None
    Z: object = None
    X1: object = None
    Y2: object = None
    Z3: object = None


def kashaev_relation_residual(c):
    """Left side of the corner relation; zero iff the relation holds."""
    g, g1, g2, g3 = c.g, c.g1, c.g2, c.g3
    g12, g13, g23, g123 = c.g12, c.g13, c.g23, c.g123
    return (g * g * g123 * g123 + g1 * g1 * g23 * g23
            + g2 * g2 * g13 * g13 + g3 * g3 * g12 * g12
            - 2 * g2 * g3 * g13 * g12 - 2 * g1 * g3 * g23 * g12
            - 2 * g1 * g2 * g23 * g13
            - 2 * g * g123 * (g1 * g23 + g2 * g13 + g3 * g12)
            - 4 * g * g12 * g23 * g13 - 4 * g123 * g1 * g2 * g3)


def _is_poly(x):
    return isinstance(x, LaurentPoly)


def kashaev_step(c):
    """Complete the cube from its bottom data, in place; returns c.

    Numeric mode requires positive inputs and keeps the outputs positive
    (the greatest root); symbolic mode divides exactly.
    """
    g, g1, g2, g3 = c.g, c.g1, c.g2, c.g3
    g12, g13, g23 = c.g12, c.g13, c.g23
    X, Y, Z = c.X, c.Y, c.Z
    num = (2 * g1 * g2 * g3 + g * (g1 * g23 + g2 * g13 + g3 * g12)
           + 2 * X * Y * Z)
    if _is_poly(num):
        gsq = g * g
        c.g123 = lp_div_exact(num, gsq)
        c.X1 = lp_div_exact(g1 * X + Y * Z, g)
        c.Y2 = lp_div_exact(g2 * Y + X * Z, g)
        c.Z3 = lp_div_exact(g3 * Z + X * Y, g)
        return c
    for name in ("g", "g1", "g2", "g3", "g12", "g13", "g23"):
        if getattr(c, name) <= 0:
            raise NonPositive(f"{name} <= 0 in numeric mode")
    c.g123 = num / (g * g)
    c.X1 = (g1 * X + Y * Z) / g
    c.Y2 = (g2 * Y + X * Z) / g
    c.Z3 = (g3 * Z + X * Y) / g
    if c.g123 <= 0:
        raise NonPositive("completed corner is not positive")
    return c


def cube_from_bottom(g, g1, g2, g3, g12, g13, g23, X=None, Y=None, Z=None):
    c = CubeData(g=g, g1=g1, g2=g2, g3=g3, g12=g12, g13=g13, g23=g23)
    c.X = math.sqrt(g * g23 + g2 * g3) if X is None else X
    c.Y = math.sqrt(g * g13 + g1 * g3) if Y is None else Y
    c.Z = math.sqrt(g * g12 + g1 * g2) if Z is None else Z
    return c


def alternative_root(c):
    """The other root of the corner relation in g123 (numeric)."""
    g, g1, g2, g3 = c.g, c.g1, c.g2, c.g3
    g12, g13, g23 = c.g12, c.g13, c.g23
    ssum = (2 * g * (g1 * g23 + g2 * g13 + g3 * g12)
            + 4 * g1 * g2 * g3) / (g * g)
    return ssum - c.g123


def duality_check(c, tol=1e-9):
    """Central flip (g <-> g123, g_i <-> g_jk) followed by a completion must
    return the original corner and swap the face values."""
    flipped = CubeData(g=c.g123, g1=c.g23, g2=c.g13, g3=c.g12,
                       g12=c.g3, g13=c.g2, g23=c.g1,
                       X=c.X1, Y=c.Y2, Z=c.Z3)
    if _is_poly(c.g):
        # Cleared-denominator comparison: g * g123^2 == flip numerator.
        num = (2 * flipped.g1 * flipped.g2 * flipped.g3
               + flipped.g * (flipped.g1 * flipped.g23
                              + flipped.g2 * flipped.g13
                              + flipped.g3 * flipped.g12)
               + 2 * flipped.X * flipped.Y * flipped.Z)
        return num == c.g * c.g123 * c.g123
    kashaev_step(flipped)
    scale = abs(c.g) + abs(flipped.g123)
    ok = abs(flipped.g123 - c.g) <= tol * scale
    ok = ok and abs(flipped.X1 - c.X) <= tol * (abs(c.X) + 1)
    ok = ok and abs(flipped.Y2 - c.Y) <= tol * (abs(c.Y) + 1)
    ok = ok and abs(flipped.Z3 - c.Z) <= tol * (abs(c.Z) + 1)
    return ok


class HexState:
    """Evolving vertex and face data while a solid is filled back in."""

    def __init__(self, surface, g_values, face_values, registry=None):
        self.surface = surface
        self.g_values = g_values
        self.face_values = face_values
        self.registry = registry

    def check_face_invariant(self, rng_point=None):
        """Every face value squared equals the sum of its two diagonal
        g-products.  Symbolic values are checked by evaluation at a random
        rational point when one is supplied."""
        for key, val in self.face_values.items():
            axis, base = key
            (a, c), (b, d) = face_diagonals(axis, base)
            want = (self.g_values[a] * self.g_values[c]
                    + self.g_values[b] * self.g_values[d])
            got = val * val
            if _is_poly(val):
                if got != want:
                    return False
            elif abs(got - want) > 1e-9 * (abs(want) + 1):
                return False
        return True


def build_registry(surface):
    """Registry with one vertex variable per window vertex and one root
    variable per window face, squares given by the diagonal products."""
    vnames = {v: surface.vertex_var_name(v) for v in sorted(surface.vertices)}
    squares = {}
    for key in sorted(surface.faces):
        axis, base = key
        (a, c), (b, d) = face_diagonals(axis, base)
        squares[surface.face_root_name(key)] = [
            ({vnames[a]: 1, vnames[c]: 1}, 1),
            ({vnames[b]: 1, vnames[d]: 1}, 1),
        ]
    reg = VarRegistry(list(vnames.values()), squares)
    return reg, vnames


def initial_state(U, g_init=None, mode="symbolic", window_radius=None):
    sg = surface_graph(U, window_radius)
    if mode == "symbolic":
        reg, vnames = build_registry(sg)
        g_values = {}
        for v in sg.vertices:
            if g_init is not None and v in g_init:
                val = g_init[v]
                g_values[v] = val if _is_poly(val) else reg.const(val)
            else:
                g_values[v] = reg.var(vnames[v])
        face_values = {key: reg.var(sg.face_root_name(key))
                       for key in sg.faces}
        return HexState(sg, g_values, face_values, reg)
    if g_init is None:
        raise KashaevError("numeric mode requires initial values")
    g_values = {}
    for v in sg.vertices:
        val = float(g_init[v])
        if val <= 0:
            raise NonPositive(f"initial value at {v} is not positive")
        g_values[v] = val
    face_values = {}
    for key in sg.faces:
        axis, base = key
        (a, c), (b, d) = face_diagonals(axis, base)
        face_values[key] = math.sqrt(g_values[a] * g_values[c]
                                     + g_values[b] * g_values[d])
    return HexState(sg, g_values, face_values, None)


def solve_state(U, g_init=None, mode="symbolic", order=None,
                window_radius=None, check_residuals=False):
    """Fill the solid back to the flat corner, returning the final state."""
    state = initial_state(U, g_init, mode, window_radius)
    if order is None:
        order = fill_order(U)
    else:
        order = list(order)
        if sorted(order) != sorted(U.removed):
            raise KashaevError("order must enumerate the removed cubes")
    for p in order:
        gv, fv = state.g_values, state.face_values
        top = vadd(p, (1, 1, 1))
        c = CubeData(
            g=gv[p],
            g1=gv[vadd(p, UNITS[0])],
            g2=gv[vadd(p, UNITS[1])],
            g3=gv[vadd(p, UNITS[2])],
            g12=gv[vadd(p, (1, 1, 0))],
            g13=gv[vadd(p, (1, 0, 1))],
            g23=gv[vadd(p, (0, 1, 1))],
            X=fv.pop((0, p)),
            Y=fv.pop((1, p)),
            Z=fv.pop((2, p)),
        )
        kashaev_step(c)
        if check_residuals:
            res = kashaev_relation_residual(c)
            if _is_poly(res):
                if res.terms:
                    raise KashaevError(f"symbolic residual nonzero at {p}")
            else:
                scale = abs(c.g * c.g123) + 1
                if abs(res) > 1e-9 * scale:
                    raise KashaevError(f"residual {res} too large at {p}")
        gv[top] = c.g123
        fv[(0, vadd(p, UNITS[0]))] = c.X1
        fv[(1, vadd(p, UNITS[1]))] = c.Y2
        fv[(2, vadd(p, UNITS[2]))] = c.Z3
    return state


def solve_origin(U, g_init=None, mode="symbolic", order=None,
                 window_radius=None, check_residuals=False):
    """Value of the recurrence at the origin for initial data on V(U)."""
    if not is_regular(U)["regular"]:
        raise KashaevError("solve_origin requires a regular solid")
    if not U.removed:
        state = initial_state(U, g_init, mode, window_radius)
        return state.g_values[(0, 0, 0)]
    state = solve_state(U, g_init, mode, order, window_radius,
                        check_residuals)
    return state.g_values[(0, 0, 0)]


# ---------------------------------------------------------------------------
# Row identities behind the cube-flip invariance.
#
# Each row equates a weighted sum of local pictures before and after the
# flip.  With the common (possibly half-integer) monomial prefactor of both
# sides stripped, the identities below are polynomial in the seven corner
# variables, the bottom face roots X, Y, Z, and the completed quantities
# G123, X1, Y2, Z3.  Verification substitutes the completed quantities by
# their explicit forms and compares canonical Laurent polynomials, clearing
# G123 denominators by cross-multiplication.
# ---------------------------------------------------------------------------

BASE_VARS = ("g", "g1", "g2", "g3", "g12", "g13", "g23")
ROOT_VARS = ("X", "Y", "Z")
AUX_VARS = ("G123", "X1", "Y2", "Z3")

# term = (coeff, {var: exp}); var may be any base, root or aux name.
_ROW_TABLE = {
    1: (
        [(2, {"g1": 2, "g2": 2, "g3": 2, "g": -2}),
         (2, {"g1": 1, "g2": 1, "g3": 1, "X": 1, "Y": 1, "Z": 1, "g": -2}),
         (1, {"g1": 1, "g2": 2, "g3": 1, "g13": 1, "g": -1}),
         (1, {"g1": 1, "g2": 1, "g3": 2, "g12": 1, "g": -1}),
         (1, {"g1": 2, "g2": 1, "g3": 1, "g23": 1, "g": -1})],
        [(1, {"g1": 1, "g2": 1, "g3": 1, "G123": 1})],
    ),
    2: (
        [(1, {"g1": 1, "g3": 1, "g12": 1, "g23": 1})],
        [(1, {"g1": 1, "g3": 1, "g12": 1, "g23": 1})],
    ),
    3: (
        [(1, {"g1": 1, "g3": 1, "X": 1, "Z": 1, "g": -1}),
         (1, {"g1": 1, "g2": 1, "g3": 1, "Y": 1, "g": -1})],
        [(1, {"g1": 1, "g3": 1, "Y2": 1})],
    ),
    4: (
        [(1, {"g2": 1, "Y": 1, "Z": 1, "g": -1}),
         (1, {"g1": 1, "g2": 1, "X": 1, "g": -1})],
        [(1, {"g2": 1, "X1": 1})],
    ),
    5: (
        [(2, {"g1": 1, "g2": 2, "g3": 1, "Y": 1, "g": -2}),
         (2, {"g1": 1, "g2": 1, "g3": 1, "X": 1, "Z": 1, "g": -2}),
         (1, {"g2": 1, "g13": 1, "X": 1, "Z": 1, "g": -1}),
         (1, {"g1": 1, "g2": 1, "g23": 1, "Y": 1, "g": -1}),
         (1, {"g2": 1, "g3": 1, "g12": 1, "Y": 1, "g": -1})],
        [(1, {"g2": 1, "X1": 1, "Z3": 1})],
    ),
    6: (
        [(1, {"g2": 1, "g13": 1})],
        [(1, {"g2": 1, "g13": 1})],
    ),
    7: (
        [(1, {"X": 1, "Y": 1, "Z": 1, "g": -1}),
         (1, {"g1": 1, "g2": 1, "g3": 1, "g": -1})],
        [(1, {"X1": 1, "Y2": 1, "Z3": 1, "G123": -1}),
         (1, {"g12": 1, "g13": 1, "g23": 1, "G123": -1})],
    ),
}

_DUAL_MAP = {
    "g": "G123", "G123": "g",
    "g1": "g23", "g23": "g1",
    "g2": "g13", "g13": "g2",
    "g3": "g12", "g12": "g3",
    "X": "X1", "X1": "X",
    "Y": "Y2", "Y2": "Y",
    "Z": "Z3", "Z3": "Z",
}


def _yb_registry():
    squares = {
        "X": [({"g": 1, "g23": 1}, 1), ({"g2": 1, "g3": 1}, 1)],
        "Y": [({"g": 1, "g13": 1}, 1), ({"g1": 1, "g3": 1}, 1)],
        "Z": [({"g": 1, "g12": 1}, 1), ({"g1": 1, "g2": 1}, 1)],
    }
    return VarRegistry(list(BASE_VARS), squares)


def _dualize(terms):
    return [(c, {_DUAL_MAP.get(n, n): e for n, e in exps.items()})
            for c, exps in terms]


def _normalize_side(terms):
    """Split off negative G123 powers: side = expr / G123^k with k >= 0."""
    k = max((-exps.get("G123", 0) for _c, exps in terms), default=0)
    k = max(k, 0)
    out = []
    for c, exps in terms:
        e = dict(exps)
        e["G123"] = e.get("G123", 0) + k
        if e["G123"] == 0:
            del e["G123"]
        out.append((c, e))
    return out, k


def _expand(terms, reg):
    """Substitute the completed quantities and return a LaurentPoly."""
    v = {n: reg.var(n) for n in BASE_VARS + ROOT_VARS}
    num123 = (2 * v["g1"] * v["g2"] * v["g3"]
              + v["g"] * (v["g1"] * v["g23"] + v["g2"] * v["g13"]
                          + v["g3"] * v["g12"])
              + 2 * v["X"] * v["Y"] * v["Z"])
    ginv = reg.monomial({"g": -1})
    subs = {
        "G123": num123 * reg.monomial({"g": -2}),
        "X1": (v["g1"] * v["X"] + v["Y"] * v["Z"]) * ginv,
        "Y2": (v["g2"] * v["Y"] + v["X"] * v["Z"]) * ginv,
        "Z3": (v["g3"] * v["Z"] + v["X"] * v["Y"]) * ginv,
    }
    total = reg.zero()
    for coeff, exps in terms:
        part = reg.const(coeff)
        base = {n: e for n, e in exps.items() if n not in AUX_VARS}
        part = part * reg.monomial(base)
        for name in AUX_VARS:
            e = exps.get(name, 0)
            if e < 0:
                raise KashaevError("negative aux power after normalization")
            for _ in range(e):
                part = part * subs[name]
        total = total + part
    return total


def yang_baxter_row_check(row, side_swap=False):
    """Verify one row identity symbolically in the root-reduced ring.

    With side_swap the dual row (central flip of every picture) is checked
    instead; rows 2, 6 and 7 are self-dual.
    """
    lhs, rhs = _ROW_TABLE[row]
    if side_swap:
        lhs, rhs = _dualize(lhs), _dualize(rhs)
    lhs, k_l = _normalize_side(lhs)
    rhs, k_r = _normalize_side(rhs)
    # Cross-multiply the G123 denominators before substitution.
    lhs = [(c, _mul_exp(e, "G123", k_r)) for c, e in lhs]
    rhs = [(c, _mul_exp(e, "G123", k_l)) for c, e in rhs]
    reg = _yb_registry()
    return _expand(lhs, reg) == _expand(rhs, reg)


def _mul_exp(exps, name, k):
    if k == 0:
        return exps
    e = dict(exps)
    e[name] = e.get(name, 0) + k
    if e[name] == 0:
        del e[name]
    return e
