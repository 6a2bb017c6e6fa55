"""Validation, train tracks, census identities, parametrization solver."""

import random
from fractions import Fraction

import pytest

from c2loop.fixtures import hexagon_y, rational_ff_weights
from c2loop.quadgraph import (
    FaceWeights,
    LoopTrackPresent,
    NotFreeFermionic,
    QuadGraph,
    degree2_boundary,
    grid_quadgraph,
    phi,
    single_quad,
    solve_parametrization,
    track_census,
    train_tracks,
    validate,
)
from c2loop.stepped import SteppedSolid, enumerate_solids, surface_graph


def quadgraph_from_surface(sg):
    colors = {v: "black" if sum(v) % 2 == 0 else "white"
              for v in sg.vertices}
    return QuadGraph(colors, dict(sg.faces), dict(sg.positions))


def test_validate_grid():
    g = grid_quadgraph(2, 2)
    rep = validate(g)
    assert rep["valid"]
    assert len(g.colors) - len(g.edges()) + len(g.faces) == 1


def test_validate_single_quad():
    assert validate(single_quad())["valid"]


def test_validate_bad_face():
    g = grid_quadgraph(1, 1)
    g.faces["bad"] = ((0, 0), (1, 1), (0, 1), (1, 0))  # non-alternating
    rep = validate(g)
    assert not rep["valid"]
    kinds = {v["kind"] for v in rep["violations"]}
    assert kinds & {"CornerColors", "Bipartite", "FaceDegree", "Euler"}


def test_tracks_grid():
    tracks = train_tracks(grid_quadgraph(2, 2))
    assert len(tracks) == 4
    assert not any(t.is_loop for t in tracks)


def test_tracks_single_quad():
    tracks = train_tracks(single_quad())
    assert len(tracks) == 2
    assert all(len(t.dual_edge_path) == 2 for t in tracks)


def test_tracks_hexagon_fixture():
    g = hexagon_y()
    assert validate(g)["valid"]
    tracks = train_tracks(g)
    assert len(tracks) == 3
    # the two highlighted tracks are distinct objects crossing one common face
    t1, t2 = tracks[0], tracks[1]
    assert t1.dual_edge_path != t2.dual_edge_path


def test_census():
    c = track_census(grid_quadgraph(2, 2))
    assert c["T"] == 4 and c["E_ext"] == 8
    assert all(c["checks"].values())
    c = track_census(grid_quadgraph(3, 3))
    assert c["T"] == 6 and c["E_ext"] == 12
    assert all(c["checks"].values())
    c = track_census(single_quad())
    assert c["T"] == 2 and c["E_ext"] == 4
    assert all(c["checks"].values())


def test_census_stepped_windows():
    rng = random.Random(17)
    solids = [U for U in enumerate_solids(3)]
    for U in solids:
        g = quadgraph_from_surface(surface_graph(U))
        assert validate(g)["valid"]
        assert all(track_census(g)["checks"].values())


def test_phi_basics():
    g = grid_quadgraph(2, 2)
    zero = {v: Fraction(0) for v in g.vertices()}
    assert all(v == 0 for v in phi(g, zero).values())
    const = {v: Fraction(7) for v in g.vertices()}
    assert all(v == 0 for v in phi(g, const).values())
    one_black = {v: Fraction(1 if v == (1, 1) else 0) for v in g.vertices()}
    vals = phi(g, one_black)
    touched = [f for f, val in vals.items() if val != 0]
    assert len(touched) == 4 and all(vals[f] == 1 for f in touched)


def test_phi_linear():
    g = grid_quadgraph(3, 2)
    rng = random.Random(5)
    for _ in range(20):
        h1 = {v: Fraction(rng.randint(-5, 5)) for v in g.vertices()}
        h2 = {v: Fraction(rng.randint(-5, 5)) for v in g.vertices()}
        s = {v: h1[v] + h2[v] for v in g.vertices()}
        p1, p2, ps = phi(g, h1), phi(g, h2), phi(g, s)
        assert all(ps[f] == p1[f] + p2[f] for f in g.faces)


def test_degree2_boundary():
    assert len(degree2_boundary(single_quad())) == 4
    g = grid_quadgraph(2, 2)
    assert set(degree2_boundary(g)) == {(0, 0), (0, 2), (2, 0), (2, 2)}
    # staircase strip of 3 quads
    U = SteppedSolid.from_removed([(-1, -1, -1)])
    sg = surface_graph(U, 4)
    g = quadgraph_from_surface(sg)
    assert len(degree2_boundary(g)) >= 3


def test_parametrization_single_quad():
    g = single_quad()
    # w1/w5 = 2, so the face ratio must come out 4 exactly
    lam, a, b = Fraction(5), Fraction(4, 5), Fraction(3, 5)
    w = FaceWeights(lam * a * a, lam * b * b, lam * a, lam * b, lam * a * b)
    res = solve_parametrization(g, {(0, 0): w})
    x, u, y, v = g.corner_labels((0, 0))
    ratio = (res["g_formal"][x] * res["g_formal"][y]) / \
        (res["g_formal"][u] * res["g_formal"][v])
    assert ratio.exps == {(0, 0): Fraction(1)}


def test_parametrization_roundtrip_exact():
    rng = random.Random(99)
    for graph in (grid_quadgraph(2, 2), grid_quadgraph(3, 2), hexagon_y()):
        W = {fid: rational_ff_weights(rng) for fid in graph.faces}
        res = solve_parametrization(graph, W)
        for fid in graph.faces:
            x, u, y, v = graph.corner_labels(fid)
            gf = res["g_formal"]
            ratio = (gf[x] * gf[y]) / (gf[u] * gf[v])
            assert ratio.exps == {fid: Fraction(1)}, (fid, ratio.exps)
        # numeric weights reproduce the input up to the per-face scale
        for fid in graph.faces:
            x, u, y, v = graph.corner_labels(fid)
            gn = res["g"]
            gx, gu, gy, gv = gn[x], gn[u], gn[y], gn[v]
            w1 = gx * gy
            w5 = (gx * gy * gu * gv) ** 0.5
            s = res["scales"][fid]
            assert w1 == pytest.approx(float(W[fid].w1) * s, rel=1e-9)
            assert w5 == pytest.approx(float(W[fid].w5) * s, rel=1e-9)


def test_parametrization_rejects_non_ff():
    g = single_quad()
    with pytest.raises(NotFreeFermionic):
        solve_parametrization(g, {(0, 0): FaceWeights(1, 1, 1, 1, 1)})


def test_parametrization_symmetric_case():
    g = grid_quadgraph(2, 2)
    lam = Fraction(2)
    # a = b = 1/sqrt2 is irrational; use the rational same-ratio point
    # R_f = 1 via w1 = w2, w5 = w1: weights (1,1,?,?,1) are not rational FF;
    # instead check that R_f = 1 forces a constant-ratio solution.
    rng = random.Random(3)
    w = rational_ff_weights(rng)
    W = {fid: w for fid in g.faces}
    res = solve_parametrization(g, W)
    vals = res["ratios"]
    assert all(v == vals[(0, 0)] for v in vals.values())


def test_validate_degree3_face():
    g = grid_quadgraph(1, 1)
    g.faces["tri"] = ((0, 0), (0, 1), (1, 1), (1, 1))
    rep = validate(g)
    assert not rep["valid"]
    assert any(v["kind"] == "FaceDegree" for v in rep["violations"])
