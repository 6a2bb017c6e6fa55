"""Free-fermion checks: decomposition, correspondence, Kasteleyn, free energy."""

import math
import random
from fractions import Fraction

import pytest

from c2loop.fixtures import (
    cube_sphere,
    ff_fixture_weights,
    integrable_weights,
    rational_ff_weights,
)
from c2loop.ffdimers import (
    DecoratedDimerGraph,
    NotARoad,
    TorusDomain,
    build_gq,
    char_poly_eval,
    dimer_partition_bruteforce,
    enumerate_matchings,
    ff_check,
    ff_decompose,
    fig_octa_domain,
    free_energy,
    gauge_transform,
    gq_faces,
    gq_torus_domain,
    kasteleyn_determinant,
    kasteleyn_orientation,
    kasteleyn_valid,
    lobachevsky,
    lobachevsky_free_energy,
    road_probability,
    verify_blue_marginal,
    verify_correspondence,
)
from c2loop.loopmodel import BoundarySpec, complex_from_quadgraph, \
    enumerate_configs, blue_data
from c2loop.quadfield import QuadVal
from c2loop.quadgraph import FaceWeights, NotFreeFermionic

CATALAN = 0.915965594177219015


def test_ff_check_cases():
    assert ff_check(ff_fixture_weights())
    assert ff_check(integrable_weights(math.pi / 3))
    assert not ff_check(FaceWeights(1, 1, 1, 1, 1))


def test_ff_decompose():
    p = ff_decompose(ff_fixture_weights())
    assert p.lam == 1
    assert p.a == QuadVal(0, Fraction(1, 2), 2)
    assert p.a * p.a + p.b * p.b == 1
    q = ff_decompose(integrable_weights(math.pi / 3))
    assert q.lam == pytest.approx(1.0)
    assert q.a == pytest.approx(math.sin(math.pi / 3))
    # the vertex parametrization at the all-ones point: lambda 2, a = b
    w = FaceWeights(1, 1, QuadVal.sqrt(2), QuadVal.sqrt(2), 1)
    r = ff_decompose(w)
    assert r.lam == 2 and r.a == r.b


def test_ff_decompose_rejects():
    with pytest.raises(NotFreeFermionic):
        ff_decompose(FaceWeights(1, 1, 1, 1, 1))


def test_build_gq_counts():
    comp = complex_from_quadgraph(cube_sphere())
    params = {f: ff_decompose(ff_fixture_weights()) for f in comp.face_ids()}
    gq = build_gq(comp, params)
    assert len(gq.cities) == 6
    assert sum(1 for e in gq.edges if e[3] == "road") == 12
    assert len(gq.edges) == 36
    assert len(gq.vertices) == 24


def test_single_city_partition():
    # an isolated 4-cycle: two matchings, a^2 + b^2
    a, b = Fraction(3, 5), Fraction(4, 5)
    verts = [("f", s) for s in range(4)]
    edges = [(("f", s), ("f", (s + 1) % 4), a if s % 2 == 0 else b, "city")
             for s in range(4)]
    gq = DecoratedDimerGraph(verts, edges, {"f": verts}, {})
    assert dimer_partition_bruteforce(gq) == a * a + b * b


def test_two_cities_one_road_parity():
    # the road can never be used (it would leave three corners of a city to
    # pair among themselves), so the cities match internally
    verts = [("f", s) for s in range(4)] + [("g", s) for s in range(4)]
    edges = []
    for fid in ("f", "g"):
        edges += [((fid, s), (fid, (s + 1) % 4), Fraction(1), "city")
                  for s in range(4)]
    edges.append((("f", 0), ("g", 0), Fraction(1), "road"))
    gq = DecoratedDimerGraph(verts, edges, {}, {})
    matchings = enumerate_matchings(gq)
    assert all(len(m) == 4 for m, _w in matchings)
    assert dimer_partition_bruteforce(gq) == 4
    # odd pieces are flagged outright
    from c2loop.ffdimers import OddVertexCount
    odd = DecoratedDimerGraph(verts[:-1], edges[:6], {}, {})
    with pytest.raises(OddVertexCount):
        dimer_partition_bruteforce(odd)


def test_correspondence_sqrt2_fixture():
    comp = complex_from_quadgraph(cube_sphere())
    W = {f: ff_fixture_weights() for f in comp.face_ids()}
    rep = verify_correspondence(comp, W)
    assert rep["equal"]
    # equivalently, the dimer sum is the square root of the loop mass
    assert rep["z_loop"] == rep["z_dim"] * rep["z_dim"]


def test_correspondence_random_rational():
    rng = random.Random(42)
    comp = complex_from_quadgraph(cube_sphere())
    for _ in range(3):
        W = {f: rational_ff_weights(rng) for f in comp.face_ids()}
        assert verify_correspondence(comp, W)["equal"]


def test_correspondence_rejects_non_ff():
    comp = complex_from_quadgraph(cube_sphere())
    W = {f: rational_ff_weights(random.Random(1)) for f in comp.face_ids()}
    W[comp.face_ids()[0]] = FaceWeights(1, 1, 1, 1, 1)
    with pytest.raises(NotFreeFermionic):
        verify_correspondence(comp, W)


def test_blue_marginal_all_red():
    comp = complex_from_quadgraph(cube_sphere())
    W = {f: ff_fixture_weights() for f in comp.face_ids()}
    rep = verify_blue_marginal(comp, W, set(), {})
    assert rep["equal"]


def test_blue_marginal_single_loop_and_full_blue():
    comp = complex_from_quadgraph(cube_sphere())
    W = {f: ff_fixture_weights() for f in comp.face_ids()}
    # harvest realizable blue path data from enumerated configurations
    samples = {}
    for cfg in enumerate_configs(comp, BoundarySpec.closed()):
        edges, pairings = blue_data(comp, cfg)
        samples[(frozenset(edges), tuple(sorted(pairings)))] = (edges,
                                                                pairings)
    sizes = sorted(samples, key=lambda k: len(k[0]))
    # one small nonempty blue set and the full-blue configuration
    small = next(v for k, v in sorted(samples.items(),
                                      key=lambda t: len(t[0][0]))
                 if 0 < len(v[0]) < 12)
    full = samples[max(samples, key=lambda k: len(k[0]))]
    for edges, pairings in (small, full):
        rep = verify_blue_marginal(comp, W, edges, pairings)
        assert rep["equal"], (len(edges), rep)


def test_road_probability_half():
    comp = complex_from_quadgraph(cube_sphere())
    params = {f: ff_decompose(ff_fixture_weights()) for f in comp.face_ids()}
    gq = build_gq(comp, params)
    half = Fraction(1, 2)
    for key in sorted(gq.road_of, key=str):
        assert road_probability(gq, key) == half


def test_road_probability_sqrt3_weights():
    # a = sin(pi/3) = sqrt(3)/2, b = 1/2, exactly in Q(sqrt 3)
    from c2loop.ffdimers import FFParams
    comp = complex_from_quadgraph(cube_sphere())
    a = QuadVal(0, Fraction(1, 2), 3)
    b = QuadVal(Fraction(1, 2))
    params = {f: FFParams(1, a, b) for f in comp.face_ids()}
    gq = build_gq(comp, params)
    key = sorted(gq.road_of, key=str)[0]
    assert road_probability(gq, key) == Fraction(1, 2)


def test_road_probability_rejects_city_edge():
    comp = complex_from_quadgraph(cube_sphere())
    params = {f: ff_decompose(ff_fixture_weights()) for f in comp.face_ids()}
    gq = build_gq(comp, params)
    with pytest.raises(NotARoad):
        road_probability(gq, 0)  # edge 0 is a city edge


def test_gauge_transform():
    rng = random.Random(5)
    comp = complex_from_quadgraph(cube_sphere())
    params = {f: ff_decompose(rational_ff_weights(rng))
              for f in comp.face_ids()}
    gq = build_gq(comp, params)
    gauge = {v: Fraction(rng.randint(1, 5), rng.randint(1, 3))
             for v in gq.vertices}
    z0 = dimer_partition_bruteforce(gq)
    z1 = dimer_partition_bruteforce(gauge_transform(gq, gauge))
    prod = Fraction(1)
    for v in gq.vertices:
        prod *= gauge[v]
    assert z1 == z0 * prod
    ident = gauge_transform(gq, {v: Fraction(1) for v in gq.vertices})
    assert ident.edges == gq.edges


def test_kasteleyn_cube_gq():
    comp = complex_from_quadgraph(cube_sphere())
    rng = random.Random(9)
    params = {f: ff_decompose(rational_ff_weights(rng))
              for f in comp.face_ids()}
    gq = build_gq(comp, params)
    data = kasteleyn_orientation(gq, comp)
    assert kasteleyn_valid(gq, data, comp)
    # determinant reproduces the brute-force matching sum
    z = dimer_partition_bruteforce(gq)
    assert kasteleyn_determinant(gq, data) == pytest.approx(float(z),
                                                            rel=1e-9)


def test_kasteleyn_single_city():
    # one 4-cycle: one or three clockwise edges
    comp = complex_from_quadgraph(cube_sphere())
    params = {f: ff_decompose(ff_fixture_weights()) for f in comp.face_ids()}
    gq = build_gq(comp, params)
    faces = gq_faces(comp, gq)
    assert sum(1 for kind, _k, _c in faces if kind == "city") == 6
    assert sum(1 for kind, _k, _c in faces if kind == "link") == 8


def test_char_poly_fig_octa_values():
    dom = fig_octa_domain(math.pi / 4)
    assert abs(char_poly_eval(dom, 1.0, 1.0)) == pytest.approx(0.0, abs=1e-9)
    assert abs(char_poly_eval(dom, -1.0, -1.0)) == pytest.approx(4.0,
                                                                 rel=1e-12)


def test_char_poly_conjugation():
    dom = fig_octa_domain(math.pi / 6)
    rng = random.Random(3)
    import cmath
    for _ in range(10):
        z = cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        w = cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        p1 = char_poly_eval(dom, z.conjugate(), w.conjugate())
        p2 = char_poly_eval(dom, z, w).conjugate()
        assert p1 == pytest.approx(p2, rel=1e-9)


def test_free_energy_matches_closed_form():
    for theta in (math.pi / 6, math.pi / 4, math.pi / 3):
        dom = fig_octa_domain(theta)
        fe = free_energy(dom, grid=512)
        assert fe == pytest.approx(lobachevsky_free_energy(theta), abs=1e-6)


def test_free_energy_gq_domain_agrees():
    theta = math.pi / 4
    f1 = free_energy(fig_octa_domain(theta), grid=256)
    f2 = free_energy(gq_torus_domain(theta), grid=256)
    assert f1 == pytest.approx(f2, abs=1e-5)


def test_free_energy_cauchy():
    dom = fig_octa_domain(math.pi / 4)
    target = lobachevsky_free_energy(math.pi / 4)
    errs = [abs(free_energy(dom, grid=g) - target) for g in (64, 128, 256)]
    assert errs[0] > errs[1] > errs[2]


def test_lobachevsky_values():
    assert lobachevsky(0) == 0
    assert lobachevsky(math.pi / 4) == pytest.approx(CATALAN / 2, abs=1e-12)
    f = lobachevsky_free_energy(math.pi / 4)
    assert f == pytest.approx((8 / math.pi) * CATALAN - 2 * math.log(2),
                              abs=1e-10)


def test_free_energy_small_theta_monotone_grid():
    dom = fig_octa_domain(0.15)
    vals = [free_energy(dom, grid=g) for g in (64, 128, 256)]
    diffs = [abs(vals[i + 1] - vals[i]) for i in range(2)]
    assert diffs[1] < diffs[0]


def test_gauge_to_inverse_weights():
    # vertex-parametrized city weights, gauged by the reciprocal square
    # root of the two primal endpoints of each corner's road, become pure
    # inverse products: roads 1/(g_x g_u), city edges 1/(g_u X) style
    from fractions import Fraction as F
    from c2loop.ffdimers import FFParams
    from c2loop.loopmodel import complex_from_quadgraph
    from c2loop.quadgraph import grid_quadgraph
    import math as m

    g = grid_quadgraph(2, 1)
    comp = complex_from_quadgraph(g)
    gv = {v: 0.5 + 0.25 * (i + 1) for i, v in enumerate(sorted(g.colors))}
    params = {}
    face_x = {}
    for fid in comp.face_ids():
        x, u, y, v = g.corner_labels(fid)
        lam = gv[x] * gv[y] + gv[u] * gv[v]
        a = m.sqrt(gv[x] * gv[y] / lam)
        b = m.sqrt(gv[u] * gv[v] / lam)
        params[fid] = FFParams(lam, a, b)
        face_x[fid] = m.sqrt(lam)
    gq = build_gq(comp, params)
    gauge = {}
    for fid in comp.face_ids():
        cyc = comp.corner_ids[fid]
        for s in range(4):
            e1, e2 = cyc[s], cyc[(s + 1) % 4]
            gauge[(fid, s)] = 1.0 / m.sqrt(gv[e1] * gv[e2])
    gauged = gauge_transform(gq, gauge)
    for (u, v, w, kind) in gauged.edges:
        if kind == "road":
            fid, s = u
            cyc = comp.corner_ids[fid]
            e1, e2 = cyc[s], cyc[(s + 1) % 4]
            assert w == pytest.approx(1.0 / (gv[e1] * gv[e2]), rel=1e-12)
        else:
            fid, s = u
            cyc = comp.corner_ids[fid]
            shared = cyc[(s + 1) % 4]
            assert w == pytest.approx(1.0 / (gv[shared] * face_x[fid]),
                                      rel=1e-12)
