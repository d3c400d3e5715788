import csv
import io
import json
from pathlib import Path

import pytest

from kerrfpi import cli

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    lines = text.splitlines()
    assert lines[0].startswith("# kerrfpi ")
    meta = json.loads(lines[0][len("# kerrfpi "):])
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    return meta, rows


def test_roots_single_point(capsys):
    code, out, _ = run(["roots", "--config", str(CONFIGS / "coexisting_states.ini")], capsys)
    assert code == 0
    meta, rows = table(out)
    assert meta["resolved_params"]["main"]["mode"] == "quantum"
    stable = [float(r["n"]) for r in rows if r["stability"] == "hypothesized-stable"]
    assert stable == pytest.approx([0.4248026140, 1.2840804163], abs=1e-9)


def test_roots_six_curves(tmp_path, capsys):
    out = tmp_path / "curves.csv"
    assert cli.main(["roots", "--config", str(CONFIGS / "photon_number_vs_detuning.ini"), "--out", str(out)]) == 0
    meta, rows = table(out.read_text())
    assert len({r["curve"] for r in rows}) == 6
    assert {r["mode"] for r in rows} == {"quantum", "semiclassical"}
    assert len(meta["resolved_params"]) == 6


def test_output_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert cli.main(["sweep", "--config", str(CONFIGS / "sweep.ini"), "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_empty_grid_is_config_error(capsys):
    code, _, err = run(["roots", "--set", "grid.num=0"], capsys)
    assert code == 2 and "grid is empty" in err


@pytest.mark.parametrize(
    "args",
    [
        ["roots", "--config", "/nonexistent.ini"],
        ["roots", "--set", "params.kappa_in=0"],
        ["roots", "--set", "params.delta0=abc"],
        ["roots", "--set", "grid.control=kappa_s"],
        ["roots", "--set", "params.p_in=1"],
        ["roots", "--set", "broken"],
        ["sweep", "--set", "sweep.direction=sideways"],
        ["boundary", "--set", "boundary.modes=classical"],
        ["frobnicate"],
    ],
)
def test_config_errors(args, capsys):
    assert run(args, capsys)[0] == 2


def test_monochromatic_spectra_is_config_error(capsys):
    code, _, err = run(["spectra", "--mode", "semiclassical"], capsys)
    assert code == 2 and "kappa_s" in err


def test_boundary_both_modes(capsys):
    code, out, _ = run(["boundary", "--set", "grid.values=1,4.4"], capsys)
    assert code == 0
    _, rows = table(out)
    by = {(r["mode"], float(r["delta0"])): r for r in rows}
    assert by[("quantum", 1.0)]["exists"] == "0"
    q, s = by[("quantum", 4.4)], by[("semiclassical", 4.4)]
    assert q["exists"] == "1" and s["exists"] == "1"
    # the quantum window is narrower and opens at a larger detuning
    width = lambda r: float(r["p_plus"]) - float(r["p_minus"])  # noqa: E731
    assert width(q) < width(s)
    assert float(q["delta_min"]) > float(s["delta_min"])


def test_spectra_integral_columns(capsys):
    args = ["spectra", "--config", str(CONFIGS / "coexisting_states.ini"), "--set", "spectra.num=3"]
    code, out, _ = run(args, capsys)
    assert code == 0
    _, rows = table(out)
    assert len(rows) == 6
    for r in rows:
        n = float(r["n"])
        assert float(r["int_cavity"]) == pytest.approx(n, rel=1e-6)
        assert float(r["int_commutator"]) == pytest.approx(1.0, rel=1e-9)
        assert float(r["int_photon_fluct"]) == pytest.approx(n * (n + 1), rel=1e-6)


def test_spectra_without_output_mirror(capsys):
    args = ["spectra", "--set", "params.kappa_out=0", "--set", "params.kappa_in=1",
            "--set", "spectra.num=5", "--set", "spectra.fluct=false"]
    code, out, _ = run(args, capsys)
    assert code == 0
    _, rows = table(out)
    assert all(float(r["output"]) == 0.0 for r in rows)


def test_sweep_records_one_jump_each_way(capsys):
    code, out, _ = run(["sweep", "--config", str(CONFIGS / "sweep.ini")], capsys)
    assert code == 0
    meta, rows = table(out)
    assert len(meta["jumps"]["up"]) == 1 and len(meta["jumps"]["down"]) == 1
    assert sum(r["jump"] == "1" for r in rows) == 2


def test_feasibility_report(capsys):
    code, out, _ = run(["feasibility", "--set", "medium.Q=1000"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["min_tilde_n2_cm2_per_kW"] == pytest.approx(5.839e-6, rel=1e-3)
    assert rep["feasible"] is False
    code, out, _ = run(["feasibility", "--config", str(CONFIGS / "feasibility.ini")], capsys)
    assert json.loads(out)["feasible"] is True


def test_precedence_defaults_file_env_flags(tmp_path, monkeypatch):
    ini = tmp_path / "c.ini"
    ini.write_text("[params]\ndelta0 = 1.0\nmode = semiclassical\n")
    ns = cli.build_parser().parse_args(["roots", "--config", str(ini)])
    assert cli.load_config(ns, environ={}).sections["params"]["delta0"] == "1.0"
    env = {"KERRFPI__PARAMS__DELTA0": "2.0", "KERRFPI__PARAMS__MODE": "quantum"}
    cfg = cli.load_config(ns, environ=env)
    assert cfg.sections["params"]["delta0"] == "2.0"
    assert cfg.sections["params"]["mode"] == "quantum"
    ns = cli.build_parser().parse_args(["roots", "--config", str(ini), "--set", "params.delta0=3.0",
                                        "--mode", "semiclassical"])
    cfg = cli.load_config(ns, environ=env)
    assert cfg.sections["params"]["delta0"] == "3.0"
    assert cfg.sections["params"]["mode"] == "semiclassical"


def test_bad_env_override(capsys, monkeypatch):
    monkeypatch.setenv("KERRFPI__PARAMS", "1")
    assert run(["roots"], capsys)[0] == 2


def test_physical_units_match_normalized(capsys):
    # the same cavity written with kappa_cav = 2
    base = ["roots", "--set", "grid.values=4.4"]
    _, a, _ = run(base, capsys)
    phys = ["roots", "--units", "physical", "--set", "grid.values=8.8", "--set", "params.delta1=3.6",
            "--set", "params.kappa_in=1", "--set", "params.kappa_out=1", "--set", "params.kappa_s=2",
            "--set", "params.p_eff=2.6"]
    _, b, _ = run(phys, capsys)
    na = [float(r["n"]) for r in table(a)[1]]
    nb = [float(r["n"]) for r in table(b)[1]]
    assert na == pytest.approx(nb, rel=1e-12)


def test_selfcheck_passes(capsys):
    code, out, _ = run(["selfcheck", "--seed", "3", "--set", "selfcheck.draws=200"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and rep["seed"] == 3
    assert all(r["passed"] for r in rep["reports"])


def test_selfcheck_failure_exit_code(capsys, monkeypatch):
    from kerrfpi import selfcheck

    monkeypatch.setitem(selfcheck.TOLERANCES, "closure_identity", 0.0)
    code, out, _ = run(["selfcheck", "--set", "selfcheck.draws=50"], capsys)
    assert code == 4 and json.loads(out)["passed"] is False


def test_numerical_failure_exit_code(capsys, monkeypatch):
    from kerrfpi.errors import SolverError

    def boom(*a, **k):
        raise SolverError("forced")

    monkeypatch.setattr(cli, "stationary_photon_numbers", boom)
    assert run(["roots"], capsys)[0] == 3
