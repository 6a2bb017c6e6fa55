"""Exact multivariate Laurent polynomial arithmetic over the rationals.

A polynomial lives in a ring with two kinds of generators:

  * vertex variables, which may carry any integer exponent (Laurent), and
  * root variables s, each equipped with a defining quadratic polynomial q
    (a polynomial in vertex variables only) subject to the rewrite rule
    s^2 -> q.

After every operation a polynomial is kept in canonical form: no zero
coefficients, and every root variable appears with exponent 0 or 1.  A root
variable is never allowed to acquire a negative exponent; an operation that
would need s^-1 raises NotDivisible, since in the intended computations all
divisions are by vertex monomials.

Representation:

  Monomial  = tuple of (name, exponent) pairs, sorted by registry position,
              with zero exponents omitted.
  terms     = dict {Monomial: Fraction}, zero coefficients never stored.

Coefficients are fractions.Fraction throughout; floats never enter the
symbolic path.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction


class LaurentError(Exception):
    pass


class RegistryMismatch(LaurentError):
    pass


class NotDivisible(LaurentError):
    pass


class DivZero(LaurentError):
    pass


class MissingAssignment(LaurentError):
    pass


class NegativeUnderRoot(LaurentError):
    pass


class VarRegistry:
    """Immutable registry of vertex variables and root variables.

    Root variables are declared with their defining square, a LaurentPoly in
    vertex variables only.  The registry fixes the global variable order used
    by the graded-lexicographic term order.
    """

    def __init__(self, vertex_vars, root_squares=None):
        self.vertex_vars = tuple(vertex_vars)
        root_squares = root_squares or {}
        self.root_vars = tuple(root_squares.keys())
        names = self.vertex_vars + self.root_vars
        if len(set(names)) != len(names):
            raise LaurentError("variable names must be unique")
        self._index = {n: i for i, n in enumerate(names)}
        self._squares = {}
        for name, sq in root_squares.items():
            poly = sq if isinstance(sq, LaurentPoly) else self.poly(sq)
            for mono, _ in poly.terms.items():
                for var, _e in mono:
                    if var in root_squares:
                        raise LaurentError(
                            "root definitions must use vertex variables only")
            self._squares[name] = poly
        self._frozen = True

    def __setattr__(self, key, value):
        if getattr(self, "_frozen", False):
            raise LaurentError("registry is immutable")
        super().__setattr__(key, value)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, VarRegistry):
            return NotImplemented
        if (self.vertex_vars, self.root_vars) != (other.vertex_vars,
                                                  other.root_vars):
            return False
        return all(self._squares[n].terms == other._squares[n].terms
                   for n in self.root_vars)

    def __hash__(self):
        return hash((self.vertex_vars, self.root_vars))

    def index(self, name):
        return self._index[name]

    def is_root(self, name):
        return name in self._squares

    def root_square(self, name):
        return self._squares[name]

    # -- constructors ----------------------------------------------------

    def zero(self):
        return LaurentPoly({}, self)

    def const(self, c):
        c = Fraction(c)
        if c == 0:
            return self.zero()
        return LaurentPoly({(): c}, self)

    def var(self, name, exp=1, coeff=1):
        if name not in self._index:
            raise LaurentError(f"unknown variable {name!r}")
        if self.is_root(name) and exp < 0:
            raise NotDivisible(f"negative exponent on root variable {name!r}")
        return LaurentPoly({((name, exp),): Fraction(coeff)}, self) \
            ._reduce_roots()

    def monomial(self, exps, coeff=1):
        """Build coeff * prod(var**e) from a {name: exponent} mapping."""
        mono = tuple(sorted(((n, e) for n, e in exps.items() if e != 0),
                            key=lambda t: self._index[t[0]]))
        return LaurentPoly({mono: Fraction(coeff)}, self)._reduce_roots()

    def poly(self, terms):
        """Build a polynomial from an iterable of (exps_dict, coeff)."""
        out = self.zero()
        for exps, coeff in terms:
            out = out + self.monomial(exps, coeff)
        return out


class LaurentPoly:
    """Sparse Laurent polynomial in canonical (root-reduced) form."""

    __slots__ = ("terms", "registry")

    def __init__(self, terms, registry):
        self.terms = terms
        self.registry = registry

    # -- canonical form ---------------------------------------------------

    def _reduce_roots(self):
        reg = self.registry
        pending = dict(self.terms)
        out = {}
        while pending:
            mono, coeff = pending.popitem()
            if coeff == 0:
                continue
            hot = None
            for name, e in mono:
                if reg.is_root(name):
                    if e < 0:
                        raise NotDivisible(
                            f"negative exponent on root variable {name!r}")
                    if e >= 2:
                        hot = (name, e)
                        break
            if hot is None:
                out[mono] = out.get(mono, Fraction(0)) + coeff
                continue
            name, e = hot
            rest = {n: x for n, x in mono if n != name}
            if e % 2:
                rest[name] = 1
            base = tuple(sorted(rest.items(), key=lambda t: reg.index(t[0])))
            square = reg.root_square(name)
            expanded = _mono_poly_power_mul(base, coeff, square, e // 2, reg)
            for m2, c2 in expanded.items():
                pending[m2] = pending.get(m2, Fraction(0)) + c2
        out = {m: c for m, c in out.items() if c != 0}
        return LaurentPoly(out, self.registry)

    # -- ring operations --------------------------------------------------

    def _check(self, other):
        if not isinstance(other, LaurentPoly):
            other = self.registry.const(other)
        if other.registry is not self.registry and \
                other.registry != self.registry:
            raise RegistryMismatch("operands use different registries")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, Fraction(0)) + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
        return LaurentPoly(out, self.registry)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({m: -c for m, c in self.terms.items()},
                           self.registry)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + self.registry.const(other)

    def __mul__(self, other):
        other = self._check(other)
        reg = self.registry
        out = {}
        for m1, c1 in self.terms.items():
            d1 = dict(m1)
            for m2, c2 in other.terms.items():
                d = dict(d1)
                for n, e in m2:
                    e2 = d.get(n, 0) + e
                    if e2 == 0:
                        d.pop(n, None)
                    else:
                        d[n] = e2
                mono = tuple(sorted(d.items(), key=lambda t: reg.index(t[0])))
                out[mono] = out.get(mono, Fraction(0)) + c1 * c2
        return LaurentPoly(out, reg)._reduce_roots()

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.registry.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if self.registry is not other.registry and \
                self.registry != other.registry:
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash((id(self.registry), frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "<poly 0>"
        bits = []
        for mono, coeff in sorted(self.terms.items(),
                                  key=lambda t: self._order_key(t[0])):
            factors = "".join(
                f"*{n}" if e == 1 else f"*{n}^{e}" for n, e in mono)
            bits.append(f"{coeff}{factors}")
        return "<poly " + " + ".join(bits) + ">"

    def _order_key(self, mono):
        """Graded lexicographic key over the registry's variable order."""
        reg = self.registry
        exps = dict(mono)
        vec = tuple(-exps.get(n, 0)
                    for n in reg.vertex_vars + reg.root_vars)
        total = -sum(exps.values())
        return (total, vec)

    def leading(self):
        """Leading (mono, coeff) in graded lex order, None for zero."""
        if not self.terms:
            return None
        mono = min(self.terms, key=self._order_key)
        return mono, self.terms[mono]

    def is_monomial(self):
        return len(self.terms) == 1

    def num_terms(self):
        return len(self.terms)

    def has_roots(self):
        reg = self.registry
        return any(reg.is_root(n) for m in self.terms for n, _ in m)

    def vertex_exponent_range(self, name):
        """(min, max) exponent of a vertex variable over all terms."""
        exps = [dict(m).get(name, 0) for m in self.terms]
        return (min(exps), max(exps)) if exps else (0, 0)


def _mono_poly_power_mul(base_mono, coeff, poly, power, reg):
    """Terms of coeff * base_mono * poly**power, as a raw dict."""
    acc = {base_mono: coeff}
    for _ in range(power):
        nxt = {}
        for m1, c1 in acc.items():
            d1 = dict(m1)
            for m2, c2 in poly.terms.items():
                d = dict(d1)
                for n, e in m2:
                    e2 = d.get(n, 0) + e
                    if e2 == 0:
                        d.pop(n, None)
                    else:
                        d[n] = e2
                mono = tuple(sorted(d.items(), key=lambda t: reg.index(t[0])))
                nxt[mono] = nxt.get(mono, Fraction(0)) + c1 * c2
        acc = nxt
    return acc


# -- spec-level operation names -------------------------------------------

def lp_add(p, q):
    return p + q


def lp_mul(p, q):
    return p * q


def lp_div_exact(p, q):
    """Exact division p / q.

    q must be a single monomial (possibly with roots), or a general
    polynomial free of root variables.  Raises NotDivisible when the division
    leaves a remainder, which in the recurrence context signals a breach of
    the Laurent property and is a hard failure.
    """
    if not isinstance(q, LaurentPoly):
        q = p.registry.const(q)
    if q.registry is not p.registry and q.registry != p.registry:
        raise RegistryMismatch("operands use different registries")
    if not q.terms:
        raise DivZero("division by zero polynomial")
    reg = p.registry
    if q.is_monomial():
        (qmono, qcoeff), = q.terms.items()
        qd = dict(qmono)
        out = {}
        for m, c in p.terms.items():
            d = dict(m)
            for n, e in qd.items():
                e2 = d.get(n, 0) - e
                if e2 == 0:
                    d.pop(n, None)
                else:
                    d[n] = e2
            mono = tuple(sorted(d.items(), key=lambda t: reg.index(t[0])))
            out[mono] = c / qcoeff
        return LaurentPoly(out, reg)._reduce_roots()
    if q.has_roots():
        raise NotDivisible("general divisor must be free of root variables")
    # Split the dividend into sectors by square-free root monomial; each
    # sector is a vertex-only polynomial that must be divisible on its own.
    sectors = {}
    for m, c in p.terms.items():
        rootpart = tuple((n, e) for n, e in m if reg.is_root(n))
        vertpart = tuple((n, e) for n, e in m if not reg.is_root(n))
        sectors.setdefault(rootpart, {})[vertpart] = c
    result = {}
    for rootpart, terms in sectors.items():
        quo = _divide_vertex_exact(terms, q, reg)
        for m, c in quo.items():
            full = tuple(sorted(m + rootpart, key=lambda t: reg.index(t[0])))
            result[full] = c
    return LaurentPoly(result, reg)._reduce_roots()


def _divide_vertex_exact(p_terms, q, reg):
    """Exact division of vertex-only term dicts; raises NotDivisible."""
    if not p_terms:
        return {}
    # Shift both operands into ordinary (non-negative) polynomials so the
    # classical division algorithm terminates, then shift the quotient back.
    names = reg.vertex_vars
    p_min = {n: 0 for n in names}
    q_min = {n: 0 for n in names}
    for m in p_terms:
        d = dict(m)
        for n in names:
            p_min[n] = min(p_min[n], d.get(n, 0))
    for m in q.terms:
        d = dict(m)
        for n in names:
            q_min[n] = min(q_min[n], d.get(n, 0))

    def shift(terms, mins):
        out = {}
        for m, c in terms.items():
            d = dict(m)
            out[tuple(d.get(n, 0) - mins[n] for n in names)] = c
        return out

    pw = shift(p_terms, p_min)
    qw = shift({m: c for m, c in q.terms.items()}, q_min)

    def key(v):
        return (-sum(v), tuple(-x for x in v))

    q_lead = min(qw, key=key)
    q_lc = qw[q_lead]
    quo = {}
    guard = 0
    limit = 10 * (len(pw) + 1) * (len(qw) + 1) + 10000
    while pw:
        guard += 1
        if guard > limit:
            raise NotDivisible("division does not terminate; not divisible")
        p_lead = min(pw, key=key)
        t = tuple(a - b for a, b in zip(p_lead, q_lead))
        if any(x < 0 for x in t):
            raise NotDivisible("remainder in exact division")
        c = pw[p_lead] / q_lc
        quo[t] = quo.get(t, Fraction(0)) + c
        for m, cc in qw.items():
            m2 = tuple(a + b for a, b in zip(t, m))
            s = pw.get(m2, Fraction(0)) - c * cc
            if s == 0:
                pw.pop(m2, None)
            else:
                pw[m2] = s
    out = {}
    for v, c in quo.items():
        mono = tuple(
            (n, e) for n, e in
            ((names[i], v[i] + p_min[names[i]] - q_min[names[i]])
             for i in range(len(names)))
            if e != 0)
        out[mono] = c
    return out


def lp_eval(p, assign, exact=False):
    """Evaluate at a point.  Vertex variables must all be assigned positive
    values; a root variable takes the nonnegative square root of its defining
    polynomial's value.

    With exact=True the result is a Fraction; this requires that no root
    variable actually occurs in the polynomial.
    """
    reg = p.registry
    root_vals = {}

    def root_val(name):
        if name not in root_vals:
            sq = lp_eval(reg.root_square(name), assign, exact=False)
            if sq < 0:
                raise NegativeUnderRoot(
                    f"defining square of {name!r} is negative at this point")
            root_vals[name] = math.sqrt(sq)
        return root_vals[name]

    if exact:
        total = Fraction(0)
        for m, c in p.terms.items():
            val = Fraction(c)
            for n, e in m:
                if reg.is_root(n):
                    raise LaurentError(
                        "exact evaluation requires a root-free polynomial")
                if n not in assign:
                    raise MissingAssignment(n)
                val *= Fraction(assign[n]) ** e
            total += val
        return total
    total = 0.0
    for m, c in p.terms.items():
        val = float(c)
        for n, e in m:
            if reg.is_root(n):
                val *= root_val(n) ** e
            else:
                if n not in assign:
                    raise MissingAssignment(n)
                val *= float(assign[n]) ** e
        total += val
    return total


def lp_eval_roots_formal(p, assign):
    """Evaluate vertex variables, keeping root variables formal.

    Returns {root_monomial: Fraction} where root_monomial is a sorted tuple
    of root names (each present to the first power).  Useful for exact
    identity checks in rings like Q[X,Y,Z]/(X^2-q1, ...).
    """
    reg = p.registry
    out = {}
    for m, c in p.terms.items():
        val = Fraction(c)
        roots = []
        for n, e in m:
            if reg.is_root(n):
                roots.append(n)
            else:
                if n not in assign:
                    raise MissingAssignment(n)
                val *= Fraction(assign[n]) ** e
        key = tuple(sorted(roots))
        s = out.get(key, Fraction(0)) + val
        if s == 0:
            out.pop(key, None)
        else:
            out[key] = s
    return out


# -- canonical serialization ------------------------------------------------

def poly_to_json(p):
    """Canonical JSON dict for a polynomial, bit-exact across runs."""
    reg = p.registry

    def term_list(poly):
        items = sorted(poly.terms.items(), key=lambda t: poly._order_key(t[0]))
        return [{"coeff": f"{c.numerator}/{c.denominator}",
                 "exps": {n: e for n, e in m}} for m, c in items]

    return {
        "vars": list(reg.vertex_vars),
        "roots": [{"name": n, "square": term_list(reg.root_square(n))}
                  for n in reg.root_vars],
        "terms": term_list(p),
    }


def poly_to_json_str(p):
    return json.dumps(poly_to_json(p), sort_keys=True, separators=(",", ":"))


def poly_from_json(data):
    reg = VarRegistry(data["vars"])
    # Roots require a two-phase build: squares reference vertex vars only.
    squares = {}
    for r in data["roots"]:
        squares[r["name"]] = [(t["exps"], Fraction(t["coeff"]))
                              for t in r["square"]]
    if squares:
        reg0 = VarRegistry(data["vars"])
        squares = {n: reg0.poly(ts) for n, ts in squares.items()}
        # Rebuild squares against the final registry.
        reg = VarRegistry(data["vars"],
                          {n: [(dict(m), c) for m, c in _as_pairs(sq)]
                           for n, sq in squares.items()})
    p = reg.zero()
    for t in data["terms"]:
        p = p + reg.monomial(t["exps"], Fraction(t["coeff"]))
    return p


def _as_pairs(poly):
    return [(dict(m), c) for m, c in poly.terms.items()]
