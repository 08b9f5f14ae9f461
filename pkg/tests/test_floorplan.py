"""Floorplan geometry: placement legality, estimator fidelity, export."""

import random

import pytest

from smemsynth.baplus import TechParams, default_library
from smemsynth.explorer import MemoryConfig, UserSpec, enumerate_configs
from smemsynth.floorplan import (Floorplan, Rect, bounding_box, check,
                                 estimate_dimensions, export_text, realize)


def random_configs(seed, count):
    rng = random.Random(seed)
    lib = default_library(TechParams())
    out = []
    while len(out) < count:
        spec = UserSpec(1 << rng.randint(5, 12), 1 << rng.randint(3, 6))
        cfgs = enumerate_configs(spec, lib)
        if cfgs:
            out.append(rng.choice(cfgs))
    return lib, out


def overlap_naive(a, b):
    return a.x < b.x2 and b.x < a.x2 and a.y < b.y2 and b.y < a.y2


def test_estimate_equals_realized_bbox():
    lib, cfgs = random_configs(3, 20)
    for cfg in cfgs:
        fp = realize(cfg, lib)
        assert (fp.die_w, fp.die_h) == estimate_dimensions(cfg, lib)
        assert bounding_box(fp) == (fp.die_w, fp.die_h)


def test_placements_legal():
    lib, cfgs = random_configs(4, 20)
    for cfg in cfgs:
        fp = realize(cfg, lib)
        assert check(fp) == []
        solids = [r for r in fp.placements if r.kind in ("macro", "periph_region")]
        # containment, integer coordinates, and pairwise non-overlap
        for r in fp.placements:
            assert all(isinstance(v, int) for v in (r.x, r.y, r.w, r.h))
            assert 0 <= r.x and 0 <= r.y
            assert r.x2 <= fp.die_w and r.y2 <= fp.die_h
        for i, a in enumerate(solids):
            for b in solids[i + 1:]:
                assert not overlap_naive(a, b), (cfg, a, b)


def test_macro_count_and_kinds():
    lib, _ = random_configs(0, 1)
    cfg = MemoryConfig("ba_32x8", 2, 2, 2, 2)
    fp = realize(cfg, lib)
    kinds = {}
    for r in fp.placements:
        kinds[r.kind] = kinds.get(r.kind, 0) + 1
    assert kinds["macro"] == 8
    assert kinds["periph_region"] >= 2          # decode strip + io strip
    assert kinds.get("pin", 0) >= 1
    # power rails run the full die width on a fixed track pitch
    rails = [r for r in fp.placements if r.kind == "power_rail"]
    pitch_nm, rail_h = 20 * 64, 32
    assert rails and all(r.w == fp.die_w for r in rails)
    assert all(r.y % pitch_nm == 0 for r in rails)
    assert len(rails) == (fp.die_h - rail_h) // pitch_nm + 1


def test_pins_on_left_edge():
    lib, cfgs = random_configs(5, 5)
    for cfg in cfgs:
        fp = realize(cfg, lib)
        pins = [r for r in fp.placements if r.kind == "pin"]
        assert pins and all(p.x == 0 for p in pins)


def test_logic_area_grows_io_strip():
    lib, _ = random_configs(0, 1)
    cfg = MemoryConfig("ba_32x8", 1, 2, 2, 2)
    base = realize(cfg, lib)
    grown = realize(cfg, lib, logic_area_um2=10.0)
    assert grown.die_w == base.die_w
    assert grown.die_h > base.die_h
    # the added height is exactly ceil(area / utilization / die width)
    extra_nm2 = round(10.0 * 1e6 / 0.7)
    want = -(-extra_nm2 // base.die_w)
    assert grown.die_h - base.die_h == want
    assert check(grown) == []


def test_transpose_swaps_die():
    lib, _ = random_configs(0, 1)
    cfg = MemoryConfig("ba_32x8", 2, 1, 2, 1)
    a = realize(cfg, lib)
    b = realize(cfg, lib, transpose=True)
    assert (b.die_w, b.die_h) == (a.die_h, a.die_w)
    assert check(b) == []


def test_ar_miss_flag():
    lib, _ = random_configs(0, 1)
    cfg = MemoryConfig("ba_32x8", 1, 1, 1, 1)
    fp = realize(cfg, lib, ar_target=2.0, ar_tol=0.5)
    miss = realize(cfg, lib, ar_target=10.0, ar_tol=0.01)
    assert not fp.ar_miss
    assert miss.ar_miss          # flagged, not raised


def test_checker_catches_problems():
    bad = Floorplan(100, 100, [
        Rect("a", "macro", 0, 0, 60, 60),
        Rect("b", "macro", 50, 50, 40, 40),      # overlaps a
        Rect("c", "macro", 90, 90, 20, 20),      # leaves the die
    ], ar_miss=False)
    problems = check(bad)
    assert any("overlap" in p for p in problems)
    assert any("outside" in p or "die" in p for p in problems)


def test_export_text(tmp_path):
    lib, _ = random_configs(0, 1)
    cfg = MemoryConfig("ba_32x8", 1, 2, 1, 2)
    fp = realize(cfg, lib)
    path = tmp_path / "plan.fp"
    export_text(fp, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith(f"die {fp.die_w} {fp.die_h} ar ")
    assert len(lines) == 1 + len(fp.placements)
    assert all(ln.split()[0] == "rect" for ln in lines[1:])
