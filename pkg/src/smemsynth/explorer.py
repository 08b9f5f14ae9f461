"""Design-space exploration over composed BA+ memories.

A memory config places R x C banks of K macros each, with an M-way column
mux.  Capacity constraints tie the organization to the requested word/bit
shape; the analytic PPA composition turns each legal config into area, cycle
time, access energy and leakage, and a Pareto filter plus constrained
selection pick the config to realize.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from . import floorplan
from .baplus import Library, TechParams, ilog2, is_pow2


class ConfigError(ValueError):
    """Inconsistent memory config or user spec."""


@dataclass(frozen=True)
class UserSpec:
    words: int
    bits: int
    aspect_ratio_target: float | None = None
    aspect_ratio_tol: float = 0.15
    t_max_ps: float | None = None
    e_max_fj: float | None = None

    def validate(self) -> None:
        if self.words < 1 or self.bits < 1:
            raise ConfigError("words and bits must be >= 1")
        if not 0.0 <= self.aspect_ratio_tol < 1.0:
            raise ConfigError("aspect_ratio_tol must be in [0, 1)")
        if self.aspect_ratio_target is not None and self.aspect_ratio_target <= 0:
            raise ConfigError("aspect_ratio_target must be positive")
        for lim in (self.t_max_ps, self.e_max_fj):
            if lim is not None and lim <= 0:
                raise ConfigError("constraint limits must be positive")


@dataclass(frozen=True)
class MemoryConfig:
    """Bank organization: R x C banks, K macros per bank, M-way column mux."""

    variant: str
    R: int
    C: int
    K: int
    M: int

    def validate(self, lib: Library) -> None:
        if self.variant not in lib:
            raise ConfigError(f"unknown macro variant {self.variant!r}")
        m = lib[self.variant]
        for label, v in (("R", self.R), ("C", self.C), ("K", self.K), ("M", self.M)):
            if not is_pow2(v):
                raise ConfigError(f"{label}={v} must be a power of two >= 1")
        if (self.C * m.W) % self.M:
            raise ConfigError(f"M={self.M} does not divide C*W={self.C * m.W}")

    def dims(self, lib: Library) -> tuple[int, int]:
        """(words, bits) this organization realizes."""
        m = lib[self.variant]
        return self.R * self.K * m.B * self.M, self.C * m.W // self.M

    def key(self):
        return (self.variant, self.R, self.C, self.K, self.M)


@dataclass(frozen=True)
class PPAEstimate:
    area_um2: float
    t_cycle_ps: float
    e_op_fj: float
    p_leak_nw: float
    gops_per_watt: float

    def triple(self):
        return (self.area_um2, self.t_cycle_ps, self.e_op_fj)


def gops_per_watt(e_op_fj: float, p_leak_nw: float, t_cycle_ps: float) -> float:
    """Throughput efficiency at one op per cycle."""
    joules = e_op_fj * 1e-15 + p_leak_nw * 1e-9 * t_cycle_ps * 1e-12
    return 1e-9 / joules


def _pow2s_upto(limit: int):
    v = 1
    while v <= limit:
        yield v
        v *= 2


def enumerate_configs(spec: UserSpec, lib: Library,
                      bounds: dict | None = None) -> list[MemoryConfig]:
    """All legal configs for a spec, sorted by (variant, R, C, K, M).

    Constraints: R*K*B*M == words, C*W/M == bits with M | C*W, all of
    R, C, K, M powers of two, and (when an aspect-ratio target is set) the
    estimated die AR within tolerance.  `bounds` optionally caps the four
    organization factors, e.g. {"R": 8, "M": 4}.
    """
    spec.validate()
    bounds = bounds or {}
    cap = {d: bounds.get(d, spec.words) for d in ("R", "C", "K", "M")}
    out = []
    for macro in lib:
        if spec.words % macro.B:
            continue
        for m_mux in _pow2s_upto(min(cap["M"], spec.words)):
            if (spec.bits * m_mux) % macro.W:
                continue
            c = spec.bits * m_mux // macro.W
            if not is_pow2(c) or c > cap["C"]:
                continue
            rk, rem = divmod(spec.words, macro.B * m_mux)
            if rem or not is_pow2(rk):
                continue
            for r in _pow2s_upto(min(cap["R"], rk)):
                k = rk // r
                if r * k != rk or k > cap["K"]:
                    continue
                cfg = MemoryConfig(macro.name, r, c, k, m_mux)
                if spec.aspect_ratio_target is not None:
                    w, h = floorplan.estimate_dimensions(cfg, lib, lib.tech)
                    ar = h / w
                    if abs(ar - spec.aspect_ratio_target) > \
                            spec.aspect_ratio_tol * spec.aspect_ratio_target:
                        continue
                out.append(cfg)
    out.sort(key=MemoryConfig.key)
    return out


def evaluate_ppa(cfg: MemoryConfig, lib: Library,
                 tech: TechParams | None = None) -> PPAEstimate:
    """Analytic PPA for one config.

    Cycle time stacks global decode, macro access, the shared global read
    bitline (present once more than one macro hangs on it) and the column
    mux (absent for M=1).  Read energy activates all C bank columns; the mux
    discards the un-selected slices.  Leakage sums every placed macro plus a
    flat periphery term.
    """
    tech = tech or lib.tech
    cfg.validate(lib)
    macro = lib[cfg.variant]
    words, _bits = cfg.dims(lib)
    abits = ilog2(words) if words > 1 else 0

    t = tech.d0_ps + tech.d1_ps * abits + macro.t_access_ps
    if cfg.R * cfg.K > 1:
        t += tech.g0_ps + tech.g1_ps * cfg.K
    if cfg.M > 1:
        t += tech.m0_ps + tech.m1_ps * ilog2(cfg.M)

    w_nm, h_nm = floorplan.estimate_dimensions(cfg, lib, tech)
    area = w_nm * h_nm / 1e6
    semiperim_um = (w_nm + h_nm) / 1e3

    e_op = (tech.e_dec0_fj + tech.e_dec1_fj * abits
            + cfg.C * macro.e_read_fj
            + tech.e_wire_per_um_fj * semiperim_um)
    p_leak = cfg.R * cfg.C * cfg.K * macro.p_leak_nw + tech.p_leak_periph_nw
    return PPAEstimate(area, t, e_op, p_leak, gops_per_watt(e_op, p_leak, t))


def _dominates(a, b) -> bool:
    """a dominates b when a is <= everywhere and < somewhere (minimization)."""
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def pareto_front(points):
    """Non-dominated subset of [(config, estimate), ...], input order kept.

    Minimizes (area, t_cycle, e_op).  Sorting by the triple means only
    already-kept points can dominate a candidate, so one staircase sweep
    suffices.
    """
    order = sorted(range(len(points)), key=lambda i: points[i][1].triple())
    kept: list[int] = []
    for i in order:
        ti = points[i][1].triple()
        if any(_dominates(points[j][1].triple(), ti) for j in kept):
            continue
        kept.append(i)
    keep = set(kept)
    return [points[i] for i in range(len(points)) if i in keep]


@dataclass
class SelectResult:
    config: MemoryConfig
    estimate: PPAEstimate
    feasible: bool
    violation: float = 0.0


def select_best(points, spec: UserSpec) -> SelectResult | None:
    """Smallest-area point meeting t/e limits; ties by t_cycle then config.

    With nothing feasible, returns the least-violating point flagged
    infeasible; violation is max over set constraints of value/limit - 1.
    """
    if not points:
        return None

    def violation(est: PPAEstimate) -> float:
        v = 0.0
        if spec.t_max_ps is not None:
            v = max(v, est.t_cycle_ps / spec.t_max_ps - 1.0)
        if spec.e_max_fj is not None:
            v = max(v, est.e_op_fj / spec.e_max_fj - 1.0)
        return v

    feasible = [(c, e) for c, e in points if violation(e) <= 0.0]
    if feasible:
        c, e = min(feasible, key=lambda p: (p[1].area_um2, p[1].t_cycle_ps, p[0].key()))
        return SelectResult(c, e, True)
    c, e = min(points, key=lambda p: (violation(p[1]), p[1].area_um2,
                                      p[1].t_cycle_ps, p[0].key()))
    return SelectResult(c, e, False, violation(e))


def traditional_baseline_ppa(spec: UserSpec, lib: Library,
                             tech: TechParams | None = None):
    """Fixed-architecture reference point for the same capacity.

    Models a conventional compiler output: the largest available leaf array
    stacked in a single bank column with no column mux, padded with the
    configured pessimism factors (oversized static periphery is slower and
    spends more energy per access than right-sized synthesized periphery).
    """
    tech = tech or lib.tech
    spec.validate()
    best = None
    for macro in sorted(lib, key=lambda m: (-m.B * m.W, -m.B)):
        if spec.bits % macro.W or spec.words % macro.B:
            continue
        c = spec.bits // macro.W
        k = spec.words // macro.B
        if not (is_pow2(c) and is_pow2(k)):
            continue
        cfg = MemoryConfig(macro.name, 1, c, k, 1)
        best = cfg
        break
    if best is None:
        raise ConfigError("no library variant fits a single-column baseline")
    est = evaluate_ppa(best, lib, tech)
    t = est.t_cycle_ps * tech.trad_t_factor
    e = est.e_op_fj * tech.trad_e_factor
    padded = PPAEstimate(est.area_um2, t, e, est.p_leak_nw,
                         gops_per_watt(e, est.p_leak_nw, t))
    return best, padded


REPORT_HEADER = ("variant", "R", "C", "K", "M", "area_um2", "t_cycle_ps",
                 "e_op_fj", "p_leak_nw", "gops_per_watt", "pareto")


def write_report_csv(path, points, front) -> None:
    """One row per evaluated config; `pareto` marks front membership."""
    front_keys = {c.key() for c, _ in front}
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(REPORT_HEADER)
        for cfg, est in points:
            wr.writerow([cfg.variant, cfg.R, cfg.C, cfg.K, cfg.M,
                         f"{est.area_um2:.4f}", f"{est.t_cycle_ps:.2f}",
                         f"{est.e_op_fj:.3f}", f"{est.p_leak_nw:.3f}",
                         f"{est.gops_per_watt:.2f}",
                         1 if cfg.key() in front_keys else 0])
