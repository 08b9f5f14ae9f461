"""Command-line driver: exit codes, file outputs, fixture walkthroughs."""

import json
from pathlib import Path

import pytest

from smemsynth.cli import main

FIXTURES = Path(__file__).parent.parent / "src" / "smemsynth" / "fixtures"
SPEC = str(FIXTURES / "spec_256x8.json")
LIB = str(FIXTURES / "lib_32x8.json")


def test_genlib(tmp_path):
    out = tmp_path / "g"
    assert main(["genlib", "--out", str(out)]) == 0
    doc = json.loads((out / "library.json").read_text())
    assert len(doc["macros"]) == 16
    assert "tech" in doc


def test_genlib_custom_grid(tmp_path):
    out = tmp_path / "g"
    assert main(["genlib", "--out", str(out),
                 "--b-values", "8,16", "--w-values", "8"]) == 0
    doc = json.loads((out / "library.json").read_text())
    assert [m["name"] for m in doc["macros"]] == ["ba_8x8", "ba_16x8"]


def test_explore_fixture_has_ten_rows(tmp_path):
    out = tmp_path / "e"
    assert main(["explore", "--spec", SPEC, "--lib", LIB,
                 "--out", str(out)]) == 0
    rows = (out / "report.csv").read_text().splitlines()
    assert len(rows) - 1 == 10                     # header + data rows
    chosen = json.loads((out / "chosen.json").read_text())
    assert chosen["feasible"] is True
    assert chosen["config"]["variant"] == "ba_32x8"
    assert (out / "front.dat").read_text().startswith("# area_um2")


def test_explore_inline_spec_and_bounds(tmp_path):
    out = tmp_path / "e2"
    assert main(["explore", "--spec", "256x8", "--lib", LIB,
                 "--bounds", "8,8,8,1", "--out", str(out)]) == 0
    rows = (out / "report.csv").read_text().splitlines()[1:]
    assert len(rows) == 4
    assert all(r.split(",")[4] == "1" for r in rows)   # M capped at 1


def test_explore_infeasible_exit_code(tmp_path):
    out = tmp_path / "e3"
    rc = main(["explore", "--spec", SPEC, "--lib", LIB,
               "--t-max-ps", "1", "--out", str(out)])
    assert rc == 1
    chosen = json.loads((out / "chosen.json").read_text())
    assert chosen["feasible"] is False and chosen["violation"] > 0


def test_synth_outputs(tmp_path):
    out = tmp_path / "s"
    assert main(["synth", "--config", "ba_32x8,2,2,2,2", "--lib", LIB,
                 "--out", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    stem = "sram_ba_32x8_r2c2k2m2"
    assert names == [f"{stem}.fp", f"{stem}.nl", f"{stem}.v"]
    assert (out / f"{stem}.fp").read_text().startswith("die ")


def test_synth_accepts_chosen_json(tmp_path):
    e, s = tmp_path / "e", tmp_path / "s"
    main(["explore", "--spec", SPEC, "--lib", LIB, "--out", str(e)])
    assert main(["synth", "--config", str(e / "chosen.json"), "--lib", LIB,
                 "--out", str(s)]) == 0
    assert list(s.glob("*.nl"))


def test_pa_reports(tmp_path, capsys):
    out = tmp_path / "p"
    assert main(["pa", "--spec", "4,4,1,1", "--out", str(out)]) == 0
    verify = (out / "pa_verify.txt").read_text()
    assert "mismatches=0 conflicts=0" in verify
    assert verify.count("origins=256") == 2        # both designs swept
    rows = (out / "pa_compare.csv").read_text().splitlines()
    assert rows[0] == "design,area_um2,t_cycle_ps,e_op_fj,gops_per_watt"
    assert rows[1].startswith("sm,") and rows[2].startswith("tm,")
    assert (out / "pa_sm.nl").exists() and (out / "pa_tm.nl").exists()


def test_sim_roundtrip(tmp_path):
    s = tmp_path / "s"
    main(["synth", "--config", "ba_32x8,1,1,2,1", "--lib", LIB,
          "--out", str(s)])
    nl = next(s.glob("*.nl"))
    tr = tmp_path / "ops.tr"
    tr.write_text("W 5 c3\nIDLE\nR 5\n")
    out = tmp_path / "m"
    assert main(["sim", str(nl), str(tr), "--out", str(out)]) == 0
    lines = (out / "result.txt").read_text().splitlines()
    assert "OUT 3 c3" in lines
    assert any(ln.startswith("# e_total_fj ") for ln in lines)


def test_sim_empty_trace_leakage_only(tmp_path):
    s = tmp_path / "s"
    main(["synth", "--config", "ba_32x8,1,1,1,1", "--lib", LIB,
          "--out", str(s)])
    tr = tmp_path / "empty.tr"
    tr.write_text("")
    out = tmp_path / "m"
    assert main(["sim", str(next(s.glob("*.nl"))), str(tr),
                 "--out", str(out)]) == 0
    lines = (out / "result.txt").read_text().splitlines()
    assert not [ln for ln in lines if ln.startswith("OUT")]
    assert "# e_total_fj 0.000" in lines


def test_leafcell_default_fixtures(tmp_path):
    out = tmp_path / "l"
    assert main(["leafcell", "--out", str(out)]) == 0
    rows = (out / "leafcell_report.csv").read_text().splitlines()
    assert rows[0].startswith("name,tracks,")
    assert len(rows) == 6                          # five shipped fixtures
    nand = next(r for r in rows if r.startswith("nand2_x1,"))
    assert ",0.5000,0.2000,0" in nand


def test_leafcell_constructs_column(tmp_path):
    out = tmp_path / "l2"
    assert main(["leafcell", str(FIXTURES / "uniform_grating.cell"),
                 "--out", str(out), "--target-layer", "via0",
                 "--window", "2", "--relevant", "poly,via0"]) == 0
    rows = (out / "leafcell_report.csv").read_text().splitlines()
    assert rows[0].endswith(",constructs")
    assert rows[1].endswith(",1")


def test_usage_errors(tmp_path):
    assert main(["explore", "--spec", "banana", "--out", str(tmp_path)]) == 2
    assert main(["explore", "--spec", "256x8", "--lib", "/no/such/lib.json",
                 "--out", str(tmp_path)]) == 2
    assert main(["explore", "--spec", "256x8", "--lib", LIB,
                 "--bounds", "1,2", "--out", str(tmp_path)]) == 2
    assert main(["synth", "--config", "ba_32x8,3,1,1,1", "--lib", LIB,
                 "--out", str(tmp_path)]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_thread_env_guard(tmp_path, monkeypatch):
    monkeypatch.setenv("SMEMSYNTH_THREADS", "zero")
    assert main(["genlib", "--out", str(tmp_path)]) == 2
    monkeypatch.setenv("SMEMSYNTH_THREADS", "2")
    assert main(["explore", "--spec", SPEC, "--lib", LIB,
                 "--out", str(tmp_path)]) == 0


def test_outputs_deterministic(tmp_path):
    # spot check here; the acceptance suite runs every command twice
    outs = []
    for tag in ("x", "y"):
        d = tmp_path / tag
        main(["explore", "--spec", SPEC, "--lib", LIB, "--out", str(d)])
        outs.append((d / "report.csv").read_bytes()
                    + (d / "chosen.json").read_bytes())
    assert outs[0] == outs[1]
