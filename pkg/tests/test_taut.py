"""Taut configurations: reference picture, enumeration, weights, theorems."""

import math
import random
from fractions import Fraction

import pytest

from c2loop.kashaev import cube_from_bottom, kashaev_step, solve_origin
from c2loop.laurent import lp_eval
from c2loop.loopmodel import FaceComplex, LoopConfig, count_loops, \
    crossing_parity_check
from c2loop.stepped import (
    SteppedSolid,
    enumerate_solids,
    height,
    surface_graph,
    vadd,
)
from c2loop.taut import (
    NotAMonomial,
    build_taut_window,
    enumerate_taut,
    reconstruct_from_monomial,
    sample_taut,
    sigma0,
    sigma0_type,
    taut_weight,
    verify_partition_identity,
    verify_monomial_bijection,
    window_complex,
    y_taut,
)

U0 = SteppedSolid()
ONE = SteppedSolid.from_removed([(-1, -1, -1)])


def zone_complex(win):
    zone = set(win.zone)
    corner_ids = {k: win.comp.corner_ids[k] for k in zone}
    gluing = {}
    for (k, s), (k2, s2) in win.comp.gluing.items():
        if k in zone and k2 in zone:
            gluing[(k, s)] = (k2, s2)
    return FaceComplex(corner_ids, gluing)


def test_sigma0_all_blue_turns():
    sg = surface_graph(U0, 5)
    s0 = sigma0(sg)
    assert set(s0.values()) <= {"1b", "2b"}
    # deep in a flat sector both variants occur (checkerboard by parity)
    assert {"1b", "2b"} == set(s0.values())


def test_sigma0_unique_on_flat():
    cfgs = enumerate_taut(U0)
    assert len(cfgs) == 1
    assert cfgs[0].n_loops == 0
    assert cfgs[0].assignment == {
        k: sigma0_type(cfgs[0].window.comp.corner_ids[k])
        for k in cfgs[0].assignment}


def test_sigma0_weight_is_origin_variable():
    win = build_taut_window(U0)
    cfg = enumerate_taut(U0, win)[0]
    w = taut_weight(win, cfg, symbolic=True)
    assert w == win.registry.var(win.vnames[(0, 0, 0)])


def test_one_cube_five_configs():
    win = build_taut_window(ONE)
    cfgs = enumerate_taut(ONE, win)
    assert len(cfgs) == 5
    assert sorted(c.n_loops for c in cfgs) == [0, 0, 0, 1, 1]


def test_one_cube_weights_match_monomials():
    win = build_taut_window(ONE)
    cfgs = enumerate_taut(ONE, win)
    poly = solve_origin(ONE, mode="symbolic",
                        window_radius=win.sg.window_radius)
    got = win.registry.zero()
    for c in cfgs:
        got = got + taut_weight(win, c, symbolic=True)
    assert got == poly
    # the two coefficient-2 monomials: all-red triple loop and the triple
    # crossing with the three face roots
    with_roots = [c for c in cfgs
                  if taut_weight(win, c, symbolic=True).has_roots()]
    assert len(with_roots) == 1
    assert with_roots[0].n_loops == 1


def test_enumerated_configs_pass_independent_checks():
    for U in (ONE, SteppedSolid.from_removed([(-1, -1, -1), (-2, -1, -1)])):
        win = build_taut_window(U)
        comp = zone_complex(win)
        for cfg in enumerate_taut(U, win):
            lc = LoopConfig(dict(cfg.assignment))
            assert count_loops(comp, lc) == cfg.n_loops
            assert crossing_parity_check(comp, lc)


def test_partition_identity_small_solids_symbolic():
    for U in enumerate_solids(3):
        assert verify_partition_identity(U), sorted(U.removed)


def test_partition_identity_numeric_random():
    rng = random.Random(2024)
    two_cube = [U for U in enumerate_solids(2) if len(U.removed) == 2]
    for U in two_cube:
        win = build_taut_window(U)
        for _ in range(5):
            init = {v: rng.randint(1, 9) / rng.randint(1, 3)
                    for v in win.sg.vertices}
            assert verify_partition_identity(U, mode="numeric", g_init=init, window=win)


def test_cube_flip_invariance():
    # adding a cube and extending g by the completed corner keeps Y fixed
    rng = random.Random(7)
    U = SteppedSolid.from_removed([(-1, -1, -1), (-1, -2, -1)])
    win = build_taut_window(U)
    init = {v: Fraction(rng.randint(1, 5), rng.randint(1, 3))
            for v in win.sg.vertices}
    initf = {v: float(x) for v, x in init.items()}
    y_before = y_taut(U, g_init=initf, symbolic=False, window=win)
    p = (-1, -2, -1)
    cube = cube_from_bottom(
        initf[p], initf[vadd(p, (1, 0, 0))], initf[vadd(p, (0, 1, 0))],
        initf[vadd(p, (0, 0, 1))], initf[vadd(p, (1, 1, 0))],
        initf[vadd(p, (1, 0, 1))], initf[vadd(p, (0, 1, 1))])
    kashaev_step(cube)
    u2 = SteppedSolid.from_removed([(-1, -1, -1)])
    win2 = build_taut_window(u2)
    init2 = dict(initf)
    init2[vadd(p, (1, 1, 1))] = cube.g123
    for v in win2.sg.vertices:
        init2.setdefault(v, 1.0)
    y_after = y_taut(u2, g_init=init2, symbolic=False, window=win2)
    assert y_after == pytest.approx(y_before, rel=1e-12)


def test_monomial_bijection_all_small_solids():
    for U in enumerate_solids(3):
        rep = verify_monomial_bijection(U)
        assert rep["all"], (sorted(U.removed), rep)


def test_monomial_bijection_one_cube_details():
    rep = verify_monomial_bijection(ONE)
    assert rep["n_monomials"] == 5 and rep["n_configs"] == 5
    assert rep["injective"] and rep["coefficients_are_loop_powers"]


def test_reconstruct_roundtrip_one_and_three():
    for U in (ONE, SteppedSolid.from_removed(
            [(-1, -1, -1), (-2, -1, -1), (-1, -2, -1)])):
        win = build_taut_window(U)
        poly = solve_origin(U, mode="symbolic",
                            window_radius=win.sg.window_radius)
        for mono, coeff in poly.terms.items():
            cfg = reconstruct_from_monomial(U, dict(mono), window=win)
            w = taut_weight(win, cfg, symbolic=True)
            (m2, c2), = w.terms.items()
            assert m2 == mono and c2 == coeff


def test_reconstruct_rejects_corrupted():
    win = build_taut_window(ONE)
    poly = solve_origin(ONE, mode="symbolic",
                        window_radius=win.sg.window_radius)
    mono = dict(max(poly.terms))
    name = win.vnames[(-1, -1, -1)]
    bad = dict(mono)
    bad[name] = bad.get(name, 0) + 1
    with pytest.raises((NotAMonomial,)):
        reconstruct_from_monomial(ONE, bad, window=win)


def test_sample_u0_deterministic():
    cfg = sample_taut(U0, {v: 1.0 for v in build_taut_window(U0).sg.vertices},
                      seed=5)
    assert cfg.n_loops == 0


def test_sample_frequencies_three_sigma():
    win = build_taut_window(ONE)
    init = {v: 1.0 for v in win.sg.vertices}
    n = 100_000
    samples = sample_taut(ONE, init, seed=11, n=n, window=win)
    crossing = sum(1 for c in samples
                   if taut_weight(win, c, symbolic=True).has_roots())
    p = 4 * math.sqrt(2) / (5 + 4 * math.sqrt(2))
    sigma = math.sqrt(n * p * (1 - p))
    assert abs(crossing - n * p) < 3 * sigma


def test_loop_free_configs_have_no_red():
    from c2loop.loopmodel import side_colors
    win = build_taut_window(ONE)
    for cfg in enumerate_taut(ONE, win):
        if cfg.n_loops == 0:
            for name in cfg.assignment.values():
                assert set(side_colors(name)) == {"B"}


def test_frozen_traced_fixture():
    from c2loop.fixtures import taut_example
    from c2loop.loopmodel import side_colors
    solid, deviations, traced_loops = taut_example()
    win = build_taut_window(solid)
    assignment = {k: sigma0_type(win.comp.corner_ids[k])
                  for k in win.comp.face_ids()}
    assignment.update(deviations)
    comp = zone_complex(win)
    zone_assign = {k: assignment[k] for k in win.zone}
    lc = LoopConfig(zone_assign)
    assert count_loops(comp, lc) == traced_loops
    assert crossing_parity_check(comp, lc)
    # the red loop lives on the deviating faces only
    red_faces = [k for k, v in zone_assign.items()
                 if "R" in side_colors(v)]
    assert sorted(red_faces, key=str) == sorted(deviations, key=str)
