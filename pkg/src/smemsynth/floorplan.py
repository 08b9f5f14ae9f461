"""Parameterized floorplan for composed SRAMs.

Die organization: a decode strip runs up the left edge, a global mux/IO strip
runs along the bottom, and the R x C bank grid sits above/right of those.
Each bank stacks its K macros vertically with a local control row on top.
Synthesized periphery logic is folded into the bottom strip, inflated by the
target utilization.  All geometry is integer nanometers so the quick estimate
and the realized bounding box agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .baplus import Library, TechParams


@dataclass(frozen=True)
class Rect:
    name: str
    kind: str  # macro | periph_region | power_rail | pin
    x: int
    y: int
    w: int
    h: int

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h


@dataclass
class Floorplan:
    die_w: int
    die_h: int
    placements: list = field(default_factory=list)
    ar_miss: bool = False

    @property
    def aspect_ratio(self) -> float:
        return self.die_h / self.die_w

    def by_kind(self, kind: str):
        return [r for r in self.placements if r.kind == kind]


def _grid_dims(cfg, lib: Library, tech: TechParams):
    """Common integer geometry pieces for a memory config."""
    m = lib[cfg.variant]
    macro_w = m.width_nm(tech)
    macro_h = m.height_nm(tech)
    gutter = round(tech.gutter_pitches * tech.poly_pitch_nm)
    periph_w = round(tech.periph_w_pitches * tech.poly_pitch_nm)
    bank_ph = round(tech.bank_periph_h_tracks * tech.track_pitch_nm)
    global_ph = round(tech.global_periph_h_tracks * tech.track_pitch_nm)
    return macro_w, macro_h, gutter, periph_w, bank_ph, global_ph


def estimate_dimensions(cfg, lib: Library, tech: TechParams | None = None):
    """Die (width_nm, height_nm) for a config, before periphery logic."""
    tech = tech or lib.tech
    macro_w, macro_h, gutter, periph_w, bank_ph, global_ph = _grid_dims(cfg, lib, tech)
    w = cfg.C * (macro_w + gutter) + periph_w
    h = cfg.R * (cfg.K * macro_h + bank_ph) + global_ph
    return w, h


def realize(cfg, lib: Library, tech: TechParams | None = None,
            logic_area_um2: float = 0.0, *, ar_target: float | None = None,
            ar_tol: float = 0.0, transpose: bool = False) -> Floorplan:
    """Place macros, periphery strips, power rails and edge pins.

    logic_area_um2 is synthesized periphery (decoders/muxes) folded into the
    bottom strip at the configured utilization.  With logic_area_um2 == 0 the
    bounding box equals estimate_dimensions(cfg) exactly.  If an aspect-ratio
    target is given and the realized die misses it, the plan is returned with
    ar_miss set rather than raising.
    """
    tech = tech or lib.tech
    if logic_area_um2 < 0:
        raise ValueError("logic_area_um2 must be >= 0")
    macro_w, macro_h, gutter, periph_w, bank_ph, global_ph = _grid_dims(cfg, lib, tech)

    die_w = cfg.C * (macro_w + gutter) + periph_w
    extra_h = 0
    if logic_area_um2 > 0:
        # inflate by utilization, spread across the die width
        extra_h = -(-round(logic_area_um2 * 1e6 / tech.utilization) // die_w)
    bottom_h = global_ph + extra_h
    die_h = cfg.R * (cfg.K * macro_h + bank_ph) + bottom_h

    rects = [
        Rect("decode_strip", "periph_region", 0, 0, periph_w, die_h),
        Rect("io_strip", "periph_region", periph_w, 0, die_w - periph_w, bottom_h),
    ]
    bank_pitch_h = cfg.K * macro_h + bank_ph
    for r in range(cfg.R):
        y0 = bottom_h + r * bank_pitch_h
        for c in range(cfg.C):
            x0 = periph_w + c * (macro_w + gutter)
            for k in range(cfg.K):
                rects.append(Rect(f"bank_{r}_{c}/ba_{k}", "macro",
                                  x0, y0 + k * macro_h, macro_w, macro_h))
            rects.append(Rect(f"bank_{r}_{c}/ctrl", "periph_region",
                              x0, y0 + cfg.K * macro_h, macro_w, bank_ph))

    rail_pitch = round(tech.rail_pitch_tracks * tech.track_pitch_nm)
    rail_h = max(1, round(tech.track_pitch_nm) // 2)
    # every rail-pitch multiple whose full height still fits on the die
    n_rails = (die_h - rail_h) // rail_pitch + 1
    for i in range(n_rails):
        rects.append(Rect(f"rail_{i}", "power_rail", 0, i * rail_pitch,
                          die_w, rail_h))

    # address/data pins hug the decode-strip edge (x = 0)
    m = lib[cfg.variant]
    words = cfg.R * cfg.K * m.B * cfg.M
    bits = cfg.C * m.W // cfg.M
    abits = max(1, words.bit_length() - 1)
    pin_names = ([f"raddr[{i}]" for i in range(abits)]
                 + [f"waddr[{i}]" for i in range(abits)]
                 + ["clk", "re", "we"]
                 + [f"wdata[{i}]" for i in range(bits)]
                 + [f"rdata[{i}]" for i in range(bits)])
    pin_w = round(tech.poly_pitch_nm)
    pin_h = round(tech.track_pitch_nm)
    step = die_h / (len(pin_names) + 1)
    for i, pn in enumerate(pin_names):
        y = min(die_h - pin_h, max(0, round((i + 1) * step) - pin_h // 2))
        rects.append(Rect(f"pin/{pn}", "pin", 0, y, pin_w, pin_h))

    if transpose:
        rects = [Rect(r.name, r.kind, r.y, r.x, r.h, r.w) for r in rects]
        die_w, die_h = die_h, die_w

    fp = Floorplan(die_w, die_h, rects)
    if ar_target is not None:
        fp.ar_miss = abs(fp.aspect_ratio - ar_target) > ar_tol * ar_target
    return fp


def bounding_box(fp: Floorplan):
    if not fp.placements:
        return 0, 0
    return max(r.x2 for r in fp.placements), max(r.y2 for r in fp.placements)


def check(fp: Floorplan) -> list[str]:
    """Overlap among macro/periph rectangles, containment for everything."""
    violations = []
    for r in fp.placements:
        if r.w <= 0 or r.h <= 0:
            violations.append(f"{r.name}: non-positive extent")
        if r.x < 0 or r.y < 0 or r.x2 > fp.die_w or r.y2 > fp.die_h:
            violations.append(f"{r.name}: outside die")
    solid = [r for r in fp.placements if r.kind in ("macro", "periph_region")]
    solid.sort(key=lambda r: (r.x, r.y))
    for i, a in enumerate(solid):
        for b in solid[i + 1:]:
            if b.x >= a.x2:
                break
            if a.x < b.x2 and b.x < a.x2 and a.y < b.y2 and b.y < a.y2:
                violations.append(f"overlap: {a.name} / {b.name}")
    return violations


def export_text(fp: Floorplan, path) -> None:
    """Line-oriented export: one `rect` per placement, die line first."""
    with open(path, "w") as fh:
        fh.write(f"die {fp.die_w} {fp.die_h} ar {fp.aspect_ratio:.6f}"
                 f"{' AR-MISS' if fp.ar_miss else ''}\n")
        for r in fp.placements:
            fh.write(f"rect {r.name} {r.kind} {r.x} {r.y} {r.w} {r.h}\n")
