"""Structural netlist IR, the 1R-1W SRAM generator, and emitters.

Cells carry a kind plus integer/string params; nets record driver and sink
endpoints as (cell, pin) pairs.  Hierarchy is expressed with '/' in cell and
net names plus an explicit parent/child scope tree.  Select buses are one-hot
(width = line count); address ports are binary.

Address layout, MSB to LSB: [bank_row | macro_in_bank | row_in_macro | mux_sel].
A stored word is striped across all C bank columns; within a column's W-bit
row, mux slot s holds bits for the word whose low address bits equal s.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import explorer, floorplan
from .baplus import Library, ilog2

CELL_KINDS = frozenset({
    "baplus_instance", "decoder", "wordline_gate", "tristate_driver",
    "column_mux", "output_reg", "pa_increment", "pa_align",
    "and", "or", "inv",
})

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(/[A-Za-z_][A-Za-z0-9_]*)*$")


class NetlistError(ValueError):
    pass


@dataclass
class Cell:
    name: str
    kind: str
    params: dict = field(default_factory=dict)

    @property
    def scope(self) -> str:
        return self.name.rsplit("/", 1)[0] if "/" in self.name else ""


@dataclass
class Net:
    name: str
    width: int
    drivers: list = field(default_factory=list)  # (cell_name, pin)
    sinks: list = field(default_factory=list)


class NetlistIR:
    def __init__(self, name: str, meta: dict | None = None):
        self.name = name
        self.meta = dict(meta or {})
        self.ports: list[tuple[str, str, int]] = []
        self.cells: dict[str, Cell] = {}
        self.nets: dict[str, Net] = {}
        self.scopes: dict[str, list[str]] = {"": []}

    # -- construction -----------------------------------------------------
    def _register_scope(self, name: str) -> None:
        parts = name.split("/")[:-1]
        path = ""
        for p in parts:
            child = f"{path}/{p}" if path else p
            if child not in self.scopes:
                self.scopes[child] = []
                self.scopes[path].append(child)
            path = child

    def add_port(self, name: str, direction: str, width: int) -> Net:
        if direction not in ("in", "out"):
            raise NetlistError(f"port {name}: bad direction {direction}")
        self.ports.append((name, direction, width))
        return self.add_net(name, width)

    def add_net(self, name: str, width: int) -> Net:
        if not _NAME_RE.match(name):
            raise NetlistError(f"bad net name {name!r}")
        if name in self.nets:
            raise NetlistError(f"duplicate net {name!r}")
        if width < 1:
            raise NetlistError(f"net {name}: width must be >= 1")
        n = Net(name, width)
        self.nets[name] = n
        return n

    def add_cell(self, name: str, kind: str, **params) -> Cell:
        if not _NAME_RE.match(name):
            raise NetlistError(f"bad cell name {name!r}")
        if kind not in CELL_KINDS:
            raise NetlistError(f"cell {name}: unknown kind {kind!r}")
        if name in self.cells:
            raise NetlistError(f"duplicate cell {name!r}")
        c = Cell(name, kind, params)
        self.cells[name] = c
        self._register_scope(name)
        return c

    def connect(self, net: str, cell: str, pin: str, role: str = "sink") -> None:
        if net not in self.nets:
            raise NetlistError(f"unknown net {net!r}")
        if cell not in self.cells:
            raise NetlistError(f"unknown cell {cell!r}")
        ep = (cell, pin)
        if role == "drive":
            self.nets[net].drivers.append(ep)
        elif role == "sink":
            self.nets[net].sinks.append(ep)
        else:
            raise NetlistError(f"bad role {role!r}")

    def port_dir(self, name: str) -> str | None:
        for n, d, _w in self.ports:
            if n == name:
                return d
        return None

    def cells_of_kind(self, kind: str) -> list[Cell]:
        return [c for c in self.cells.values() if c.kind == kind]


def check_wellformed(ir: NetlistIR) -> list[str]:
    """Violation strings for the structural invariants; empty when clean."""
    v = []
    port_names = {p[0] for p in ir.ports}
    for name, _d, width in ((p[0], p[1], p[2]) for p in ir.ports):
        net = ir.nets.get(name)
        if net is None:
            v.append(f"port {name}: no matching net")
        elif net.width != width:
            v.append(f"port {name}: width {width} != net width {net.width}")
    for net in ir.nets.values():
        pdir = ir.port_dir(net.name)
        if pdir is None:
            if not net.drivers:
                v.append(f"net {net.name}: no driver")
            if not net.sinks:
                v.append(f"net {net.name}: no sink")
        elif pdir == "in":
            if net.drivers:
                v.append(f"net {net.name}: input port must not have internal drivers")
            if not net.sinks:
                v.append(f"net {net.name}: dangling input port")
        else:
            if not net.drivers:
                v.append(f"net {net.name}: undriven output port")
        if len(net.drivers) > 1:
            for cell, _pin in net.drivers:
                if ir.cells[cell].kind != "tristate_driver":
                    v.append(f"net {net.name}: multiple drivers include "
                             f"non-tristate {cell}")
        for cell, _pin in net.drivers + net.sinks:
            if cell not in ir.cells:
                v.append(f"net {net.name}: endpoint on unknown cell {cell}")
    for cell in ir.cells.values():
        if cell.kind not in CELL_KINDS:
            v.append(f"cell {cell.name}: unknown kind {cell.kind}")
        if cell.scope and cell.scope not in ir.scopes:
            v.append(f"cell {cell.name}: unregistered scope {cell.scope}")
    # scope tree must be acyclic with a single root
    seen = set()
    stack = [""]
    while stack:
        s = stack.pop()
        if s in seen:
            v.append(f"scope {s!r}: hierarchy cycle")
            break
        seen.add(s)
        stack.extend(ir.scopes.get(s, ()))
    for s in ir.scopes:
        if s and s not in seen:
            v.append(f"scope {s!r}: unreachable from root")
    if len(set(ir.nets) | set(ir.cells)) != len(ir.nets) + len(ir.cells):
        for n in set(ir.nets) & set(ir.cells):
            v.append(f"name {n!r} used for both a cell and a net")
    return v


# -- address helpers ------------------------------------------------------

def address_fields(cfg: explorer.MemoryConfig, lib: Library):
    """(lR, lK, lB, lM) bit widths of the address partition."""
    m = lib[cfg.variant]
    return ilog2(cfg.R), ilog2(cfg.K), ilog2(m.B), ilog2(cfg.M)


def split_address(addr: int, lR: int, lK: int, lB: int, lM: int):
    """addr -> (bank_row, macro, row, mux_slot); MSB-first partition."""
    s = addr & ((1 << lM) - 1)
    row = (addr >> lM) & ((1 << lB) - 1)
    k = (addr >> (lM + lB)) & ((1 << lK) - 1)
    r = addr >> (lM + lB + lK)
    if r >> lR:
        raise ValueError(f"address {addr} out of range")
    return r, k, row, s


def join_address(r: int, k: int, row: int, s: int, lR: int, lK: int, lB: int, lM: int) -> int:
    return (((r << lK | k) << lB | row) << lM) | s


# -- 1R-1W SRAM generator --------------------------------------------------

def generate_sram(cfg: explorer.MemoryConfig, lib: Library) -> NetlistIR:
    """Structural netlist for a 1R-1W memory config.

    One dual-port global decode tree drives one-hot bank-row/macro/row
    selects; per-macro wordline_gate cells clock-gate the row bundle; each
    bank column's macros share one tri-state global read bitline; an M-way
    column mux (with a one-cycle select pipeline register) produces rdata.
    """
    cfg.validate(lib)
    macro = lib[cfg.variant]
    tech = lib.tech
    words, bits = cfg.dims(lib)
    lR, lK, lB, lM = address_fields(cfg, lib)
    A = lR + lK + lB + lM
    est = explorer.evaluate_ppa(cfg, lib, tech)
    w_nm, h_nm = floorplan.estimate_dimensions(cfg, lib, tech)

    ir = NetlistIR(
        f"sram_{cfg.variant}_r{cfg.R}c{cfg.C}k{cfg.K}m{cfg.M}",
        meta={
            "design": "sram_1r1w", "variant": cfg.variant,
            "R": cfg.R, "C": cfg.C, "K": cfg.K, "M": cfg.M,
            "B": macro.B, "W": macro.W, "words": words, "bits": bits,
            "t_cycle_ps": est.t_cycle_ps, "p_leak_nw": est.p_leak_nw,
            "e_wire_op_fj": round(
                lib.tech.e_wire_per_um_fj * (w_nm + h_nm) / 1e3, 6),
        },
    )
    ir.add_port("clk", "in", 1)
    ir.add_port("raddr", "in", max(A, 1))
    ir.add_port("waddr", "in", max(A, 1))
    ir.add_port("re", "in", 1)
    ir.add_port("we", "in", 1)
    ir.add_port("wdata", "in", bits)
    ir.add_port("rdata", "out", bits)

    e_dec = tech.e_dec0_fj + tech.e_dec1_fj * A
    dec = ir.add_cell("dec", "decoder", in_bits=A, stages=lR + lK + lB,
                      mux_bits=lM, ports="rw", e_event_fj=round(e_dec, 6))
    for p in ("raddr", "waddr", "re", "we"):
        ir.connect(p, "dec", p)

    def dec_out(name: str, width: int) -> str:
        ir.add_net(name, width)
        ir.connect(name, "dec", name, "drive")
        return name

    sel_nets = []
    for prefix in ("r", "w"):
        if lR:
            sel_nets.append(dec_out(f"{prefix}_bank", cfg.R))
        if lK:
            sel_nets.append(dec_out(f"{prefix}_ba", cfg.K))
        sel_nets.append(dec_out(f"{prefix}_row", macro.B))
    if lM:
        dec_out("r_msel", cfg.M)
        dec_out("w_msel", cfg.M)
        ir.add_net("r_msel_q", cfg.M)
        reg = ir.add_cell("sel_reg", "output_reg", role="mux_sel_pipeline")
        ir.connect("clk", "sel_reg", "clk")
        ir.connect("r_msel", "sel_reg", "d")
        ir.connect("r_msel_q", "sel_reg", "q", "drive")

    if cfg.M > 1:
        for c in range(cfg.C):
            ir.add_net(f"col_bl_{c}", macro.W)
        mux = ir.add_cell("mux", "column_mux", C=cfg.C, W=macro.W, M=cfg.M,
                          e_event_fj=0.0)
        for c in range(cfg.C):
            ir.connect(f"col_bl_{c}", "mux", f"in_{c}")
        ir.connect("r_msel_q", "mux", "sel")
        ir.connect("rdata", "mux", "out", "drive")

    for r in range(cfg.R):
        for c in range(cfg.C):
            bank = f"bank_{r}_{c}"
            for k in range(cfg.K):
                wlg = ir.add_cell(f"{bank}/wlg_{k}", "wordline_gate",
                                  bank_row=r, ba=k)
                ir.connect("re", wlg.name, "re")
                ir.connect("we", wlg.name, "we")
                for prefix in ("r", "w"):
                    if lR:
                        ir.connect(f"{prefix}_bank", wlg.name, f"{prefix}_bank")
                    if lK:
                        ir.connect(f"{prefix}_ba", wlg.name, f"{prefix}_ba")
                    ir.connect(f"{prefix}_row", wlg.name, f"{prefix}_row")
                ir.add_net(f"{bank}/rwl_{k}", macro.B)
                ir.add_net(f"{bank}/wwl_{k}", macro.B)
                ir.connect(f"{bank}/rwl_{k}", wlg.name, "rwl", "drive")
                ir.connect(f"{bank}/wwl_{k}", wlg.name, "wwl", "drive")

                ba = ir.add_cell(f"{bank}/ba_{k}", "baplus_instance",
                                 variant=macro.name, B=macro.B, W=macro.W,
                                 col=c, e_read_fj=macro.e_read_fj,
                                 e_write_fj=macro.e_write_fj,
                                 p_leak_nw=macro.p_leak_nw,
                                 t_access_ps=macro.t_access_ps)
                ir.connect("clk", ba.name, "clk")
                ir.connect(f"{bank}/rwl_{k}", ba.name, "rwl")
                ir.connect(f"{bank}/wwl_{k}", ba.name, "wwl")
                ir.connect("wdata", ba.name, "din")
                if lM:
                    ir.connect("w_msel", ba.name, "wsel")
                ir.add_net(f"{bank}/q_{k}", macro.W)
                ir.connect(f"{bank}/q_{k}", ba.name, "qout", "drive")

                tri = ir.add_cell(f"{bank}/tri_{k}", "tristate_driver",
                                  col=c, registered_enable=1)
                ir.connect("clk", tri.name, "clk")
                ir.connect(f"{bank}/q_{k}", tri.name, "in")
                ir.connect(f"{bank}/rwl_{k}", tri.name, "en")
                out_net = f"col_bl_{c}" if cfg.M > 1 else "rdata"
                ir.connect(out_net, tri.name, "out", "drive")
    return ir


# -- native text format ----------------------------------------------------

def _fmt_param(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_netlist(ir: NetlistIR, path) -> None:
    """Line-oriented netlist text; see parse_netlist for the grammar."""
    lines = [f"# smemsynth netlist {ir.name}"]
    if ir.meta:
        kv = " ".join(f"{k}={_fmt_param(v)}" for k, v in ir.meta.items())
        lines.append(f"# meta {kv}")
    for name, d, w in ir.ports:
        lines.append(f"port {name} {d} {w}")
    for c in ir.cells.values():
        kv = " ".join(f"{k}={_fmt_param(v)}" for k, v in c.params.items())
        lines.append(f"cell {c.name} {c.kind}{' ' + kv if kv else ''}")
    for n in ir.nets.values():
        if ir.port_dir(n.name) is None:
            lines.append(f"net {n.name} {n.width}")
    for n in ir.nets.values():
        for cell, pin in n.drivers:
            lines.append(f"conn {n.name} {cell}.{pin} drive")
        for cell, pin in n.sinks:
            lines.append(f"conn {n.name} {cell}.{pin} sink")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_value(tok: str):
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        return float(tok)
    except ValueError:
        return tok


def parse_netlist(path) -> NetlistIR:
    ir = NetlistIR("netlist")
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("smemsynth netlist "):
                    ir.name = body.split()[-1]
                elif body.startswith("meta "):
                    for tok in body[5:].split():
                        k, _, v = tok.partition("=")
                        ir.meta[k] = _parse_value(v)
                continue
            toks = line.split()
            try:
                if toks[0] == "port":
                    ir.add_port(toks[1], toks[2], int(toks[3]))
                elif toks[0] == "cell":
                    params = {}
                    for tok in toks[3:]:
                        k, _, v = tok.partition("=")
                        params[k] = _parse_value(v)
                    ir.add_cell(toks[1], toks[2], **params)
                elif toks[0] == "net":
                    ir.add_net(toks[1], int(toks[2]))
                elif toks[0] == "conn":
                    cell, _, pin = toks[2].rpartition(".")
                    ir.connect(toks[1], cell, pin, toks[3])
                else:
                    raise NetlistError(f"unknown directive {toks[0]!r}")
            except (IndexError, ValueError) as e:
                raise NetlistError(f"{path}:{lineno}: {e}") from None
    return ir


# -- Verilog-2001 emission -------------------------------------------------

def _vbits(width: int, value: int) -> str:
    return f"{width}'d{value}"


def _onehot_shift(width: int, idx_expr: str) -> str:
    one = f"{{{{{width - 1}{{1'b0}}}}, 1'b1}}" if width > 1 else "1'b1"
    return f"({one} << {idx_expr})"


def _ba_module_text(B: int, W: int, name: str) -> list[str]:
    """Behavioral macro leaf: one-hot wordlines, registered read, read-first."""
    out = [
        f"module {name} (clk, rwl, wwl, wmask, din, qout);",
        "  input clk;",
        f"  input [{B - 1}:0] rwl, wwl;",
        f"  input [{W - 1}:0] wmask, din;",
        f"  output reg [{W - 1}:0] qout;",
        f"  reg [{W - 1}:0] mem [0:{B - 1}];",
        "  integer i;",
        "  always @(posedge clk) begin",
        f"    for (i = 0; i < {B}; i = i + 1) begin",
        "      if (rwl[i]) qout <= mem[i];",
        "      if (wwl[i]) mem[i] <= (mem[i] & ~wmask) | (din & wmask);",
        "    end",
        "  end",
        "endmodule",
    ]
    return out


def _emit_hdl_sram(ir: NetlistIR) -> str:
    m = ir.meta
    R, C, K, M = m["R"], m["C"], m["K"], m["M"]
    B, W, bits = m["B"], m["W"], m["bits"]
    lR, lK, lB, lM = (ilog2(R), ilog2(K), ilog2(B), ilog2(M))
    A = lR + lK + lB + lM
    WM = W // M
    ba_mod = f"ba_{B}x{W}"
    L = [f"// generated 1R-1W memory: {ir.name}",
         f"module {ir.name} (clk, raddr, waddr, re, we, wdata, rdata);",
         "  input clk, re, we;",
         f"  input [{A - 1}:0] raddr, waddr;",
         f"  input [{bits - 1}:0] wdata;",
         f"  output [{bits - 1}:0] rdata;", ""]

    def slices(addr: str):
        bank = f"{addr}[{A - 1}:{A - lR}]" if lR else "1'b0"
        ba = f"{addr}[{lM + lB + lK - 1}:{lM + lB}]" if lK else "1'b0"
        row = f"{addr}[{lM + lB - 1}:{lM}]"
        mux = f"{addr}[{lM - 1}:0]" if lM else "1'b0"
        return bank, ba, row, mux

    rb, rk, rr, rm = slices("raddr")
    wb, wk, wr, wm = slices("waddr")
    L.append(f"  wire [{R - 1}:0] r_bank = " +
             (_onehot_shift(R, rb) if lR else "1'b1") + ";")
    L.append(f"  wire [{K - 1}:0] r_ba = " +
             (_onehot_shift(K, rk) if lK else "1'b1") + ";")
    L.append(f"  wire [{B - 1}:0] r_row = {_onehot_shift(B, rr)};")
    L.append(f"  wire [{R - 1}:0] w_bank = " +
             (_onehot_shift(R, wb) if lR else "1'b1") + ";")
    L.append(f"  wire [{K - 1}:0] w_ba = " +
             (_onehot_shift(K, wk) if lK else "1'b1") + ";")
    L.append(f"  wire [{B - 1}:0] w_row = {_onehot_shift(B, wr)};")
    if lM:
        L.append(f"  wire [{lM - 1}:0] w_msel = {wm};")
        L.append(f"  reg [{lM - 1}:0] r_msel_q;")
        L.append(f"  always @(posedge clk) r_msel_q <= {rm};")
        L.append(f"  wire [{W - 1}:0] wmask = {{{WM}{{1'b1}}}} << (w_msel * {WM});")
    else:
        L.append(f"  wire [{W - 1}:0] wmask = {{{W}{{1'b1}}}};")
    L.append("")
    for c in range(C):
        L.append(f"  wire [{W - 1}:0] col_bl_{c};")
        if M > 1:
            lo = c * WM
            L.append(f"  wire [{W - 1}:0] wslice_{c} = "
                     f"wdata[{lo + WM - 1}:{lo}] << (w_msel * {WM});")
            L.append(f"  assign rdata[{lo + WM - 1}:{lo}] = "
                     f"col_bl_{c} >> (r_msel_q * {WM});")
        else:
            lo = c * W
            L.append(f"  wire [{W - 1}:0] wslice_{c} = wdata[{lo + W - 1}:{lo}];")
            L.append(f"  assign rdata[{lo + W - 1}:{lo}] = col_bl_{c};")
    L.append("")
    for r in range(R):
        for c in range(C):
            L.append(f"  {ir.name}_bank u_bank_{r}_{c} (.clk(clk),"
                     f" .re_sel(re & r_bank[{r}]), .we_sel(we & w_bank[{r}]),"
                     " .r_ba(r_ba), .w_ba(w_ba), .r_row(r_row), .w_row(w_row),"
                     f" .wmask(wmask), .din(wslice_{c}), .colbl(col_bl_{c}));")
    L += ["endmodule", ""]

    # one module per hierarchy level: the bank, then the behavioral macro leaf
    L += [f"module {ir.name}_bank (clk, re_sel, we_sel, r_ba, w_ba, r_row, w_row,"
          " wmask, din, colbl);",
          "  input clk, re_sel, we_sel;",
          f"  input [{K - 1}:0] r_ba, w_ba;",
          f"  input [{B - 1}:0] r_row, w_row;",
          f"  input [{W - 1}:0] wmask, din;",
          f"  output [{W - 1}:0] colbl;"]
    for k in range(K):
        L.append(f"  wire rsel_{k} = re_sel & r_ba[{k}];")
        L.append(f"  wire [{B - 1}:0] rwl_{k} = rsel_{k} ? r_row : {_vbits(B, 0)};")
        L.append(f"  wire [{B - 1}:0] wwl_{k} = (we_sel & w_ba[{k}]) ? w_row : {_vbits(B, 0)};")
        L.append(f"  wire [{W - 1}:0] q_{k};")
        L.append(f"  reg drv_{k};")
        L.append(f"  always @(posedge clk) drv_{k} <= rsel_{k};")
        L.append(f"  {ba_mod} u_ba_{k} (.clk(clk), .rwl(rwl_{k}), .wwl(wwl_{k}),"
                 f" .wmask(wmask), .din(din), .qout(q_{k}));")
        L.append(f"  assign colbl = drv_{k} ? q_{k} : {{{W}{{1'bz}}}};")
    L += ["endmodule", ""]
    L += _ba_module_text(B, W, ba_mod)
    return "\n".join(L) + "\n"


def emit_hdl(ir: NetlistIR, path) -> None:
    """Write the design as self-contained Verilog-2001 (fully elaborated)."""
    design = ir.meta.get("design")
    if design == "sram_1r1w":
        text = _emit_hdl_sram(ir)
    elif design in ("pa_sm", "pa_tm"):
        from . import pa
        text = pa.emit_hdl_pa(ir)
    else:
        raise NetlistError(f"no HDL emitter for design {design!r}")
    with open(path, "w") as fh:
        fh.write(text)
