import json
import math

import pytest

from kposim.cli import main, parse_expr, parse_range


def read_rows(path, columns):
    header = {}
    rows = []
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            continue
        rows.append(line.split(","))
    assert rows[0] == columns
    return rows[1:]


def test_parse_expr_forms():
    assert parse_expr("-30/sqrt(2)") == pytest.approx(-30.0 / math.sqrt(2.0))
    assert parse_expr("2*pi") == pytest.approx(2 * math.pi)
    assert parse_expr("1.5e-3") == 1.5e-3
    with pytest.raises(Exception):
        parse_expr("__import__('os')")
    with pytest.raises(Exception):
        parse_expr("xi2")


def test_parse_range():
    grid = parse_range("-20:20:81")
    assert len(grid) == 81 and grid[0] == -20.0 and grid[-1] == 20.0
    geo = parse_range("0.5:4:8", geometric=True)
    assert geo[0] == pytest.approx(0.5) and geo[-1] == pytest.approx(4.0)
    with pytest.raises(Exception):
        parse_range("1:2")
    with pytest.raises(Exception):
        parse_range("1:2:0")


def test_spectrum_pure_kerr_ladder(tmp_path):
    out = tmp_path / "kerr.csv"
    rc = main(["spectrum", "--xi2", "0", "--xi1", "0", "--levels", "5", "--out", str(out)])
    assert rc == 0
    rows = read_rows(out, ["axis_value", "level_index", "energy", "energy_per_ne"])
    energies = [float(r[2]) for r in rows]
    assert energies == pytest.approx([0, 0, 2, 6, 12], abs=1e-12)


def test_spectrum_malformed_range_no_file(tmp_path):
    out = tmp_path / "never.csv"
    rc = main(["spectrum", "--xi2-range", "nonsense", "--out", str(out)])
    assert rc == 2
    assert not out.exists()


def test_spectrum_sweep_both_normalizations(tmp_path):
    out = tmp_path / "sweep.csv"
    rc = main(["spectrum", "--ne-range", "1:2:2", "--xi2", "-3", "--levels", "2", "--out", str(out)])
    assert rc == 0
    rows = read_rows(out, ["axis_value", "level_index", "energy", "energy_per_ne"])
    for r in rows:
        assert float(r[3]) == pytest.approx(float(r[2]) / float(r[0]), rel=1e-15)


def test_deterministic_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["expect", "--xi2", "20", "--localize", "--out"]
    assert main(argv + [str(a)]) == 0
    assert main(argv + [str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_header_carries_version_and_config(tmp_path):
    out = tmp_path / "hdr.csv"
    main(["extrema", "--xi2", "-20", "--xi1", "-30/sqrt(2)", "--out", str(out)])
    lines = out.read_text().splitlines()
    from kposim import __version__

    assert lines[0] == f"# kposim {__version__}"
    cfg = json.loads(lines[1].removeprefix("# config: "))
    assert cfg["xi1"] == "-30/sqrt(2)"
    assert cfg["command"] == "extrema"


def test_expect_without_localize_zero_momentum(tmp_path):
    out = tmp_path / "exp.csv"
    rc = main(["expect", "--xi2", "7", "--xi1", "2", "--states", "0,1,2", "--out", str(out)])
    assert rc == 0
    rows = read_rows(out, ["axis_value", "state_index", "energy", "q_mean", "p_mean"])
    assert len(rows) == 3
    assert all(float(r[4]) == 0.0 for r in rows)


def test_expect_localized_momentum_branches(tmp_path):
    out = tmp_path / "loc.csv"
    rc = main(["expect", "--xi2", "-20", "--localize", "--out", str(out)])
    assert rc == 0
    rows = read_rows(out, ["axis_value", "state_index", "energy", "q_mean", "p_mean"])
    p_means = sorted(float(r[4]) for r in rows)
    assert p_means[0] == pytest.approx(-math.sqrt(40.0), rel=1e-3)
    assert p_means[1] == pytest.approx(math.sqrt(40.0), rel=1e-3)


def test_gaps_doublet_structure(tmp_path):
    out = tmp_path / "gaps.csv"
    rc = main(["gaps", "--xi2", "40", "--xi1", "-30/sqrt(2)", "--ne", "1", "--levels", "8", "--out", str(out)])
    assert rc == 0
    rows = read_rows(out, ["j", "energy", "gap"])
    assert len(rows) == 7
    assert all(float(r[2]) >= 0 for r in rows)


def test_density_emits_peak_metadata(tmp_path):
    out = tmp_path / "rho.csv"
    rc = main(["density", "--xi2", "-20", "--emax", "300", "--out", str(out)])
    assert rc == 0
    header = [l for l in out.read_text().splitlines() if l.startswith("# {")][0]
    meta = json.loads(header[2:])
    assert "peak_energy" in meta


def test_contours_json_structure(tmp_path):
    out = tmp_path / "cont.json"
    rc = main(
        ["contours", "--xi2", "-20", "--xi1", "0", "--energies", "-300,-100,0,200",
         "--resolution", "128", "--format", "json", "--out", str(out)]
    )
    assert rc == 0
    doc = json.loads(out.read_text())
    assert [s["energy"] for s in doc["sets"]] == [-300.0, -100.0, 0.0, 200.0]
    low = doc["sets"][0]
    closed = [c for c in low["curves"] if c["closed"]]
    assert len(closed) == 2
    for c in closed:
        assert len(c["encloses"]) == 1
        assert all(len(pt) == 2 for pt in c["points"])


def test_extrema_values(tmp_path):
    out = tmp_path / "ext.csv"
    rc = main(["extrema", "--xi2", "-20", "--xi1", "-30/sqrt(2)", "--out", str(out)])
    assert rc == 0
    rows = read_rows(out, ["kind", "q", "p", "energy", "hess_low", "hess_high", "degenerate"])
    minima = [r for r in rows if r[0] == "minimum"]
    assert len(minima) == 2
    assert all(float(r[3]) == pytest.approx(-405.625, abs=1e-10) for r in minima)


def test_scaling_fit_json(tmp_path):
    out = tmp_path / "scal.csv"
    rc = main(["scaling", "--xi2", "-3", "--xi1", "0", "--ne", "1:4:4", "--out", str(out)])
    assert rc == 0
    fit_doc = json.loads((tmp_path / "scal.csv.fit.json").read_text())
    fit = fit_doc["fit"]
    assert fit["delta_app"] == 6.0
    assert 0.5 * 6.0 < fit["delta"] < 6.0
    assert fit["r_squared"] > 0.98
    rows = read_rows(out, ["n_e", "gap", "converged", "precision_bits", "dim", "gap_index"])
    assert len(rows) == 4
    assert all(r[2] == "1" for r in rows)


def test_scaling_workers_match_sequential(tmp_path):
    seq, par = tmp_path / "seq.csv", tmp_path / "par.csv"
    base = ["scaling", "--xi2", "-3", "--xi1", "0", "--ne", "1:2:3"]
    assert main(base + ["--out", str(seq)]) == 0
    assert main(base + ["--workers", "2", "--out", str(par)]) == 0
    strip = lambda p: [l for l in p.read_text().splitlines() if not l.startswith("#")]
    assert strip(seq) == strip(par)


def test_scaling_unconverged_exit_code(tmp_path):
    # gap index 0 of a parity-symmetric system is exactly degenerate: the
    # escalation cannot stabilize it and must report non-convergence
    out = tmp_path / "bad.csv"
    rc = main(
        ["scaling", "--xi2", "-3", "--xi1", "0", "--ne", "1", "--gap-index", "0",
         "--initial-bits", "64", "--max-bits", "128", "--out", str(out)]
    )
    assert rc == 3
    assert out.exists()  # partial output retained
    rows = read_rows(out, ["n_e", "gap", "converged", "precision_bits", "dim", "gap_index"])
    assert rows[0][2] == "0"


def test_overlap_command(tmp_path):
    out = tmp_path / "ov.csv"
    rc = main(["overlap", "--xi2", "-2", "--ne", "1", "--out", str(out)])
    assert rc == 0
    rows = read_rows(out, ["xi2", "n_e", "dim", "numeric", "analytic", "abs_error"])
    assert float(rows[0][4]) == pytest.approx(math.exp(-4.0), rel=1e-12)
    assert float(rows[0][5]) < 1e-12


def test_config_file_roundtrip(tmp_path):
    # a file of defaults reproduces the flag-driven run byte for byte
    direct = tmp_path / "direct.csv"
    main(["extrema", "--xi2", "-20", "--xi1", "-30/sqrt(2)", "--out", str(direct)])
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"xi2": "-20", "xi1": "-30/sqrt(2)"}))
    via_cfg = tmp_path / "viacfg.csv"
    rc = main(["extrema", "--config", str(cfg), "--out", str(via_cfg)])
    assert rc == 0
    strip = lambda p: [l for l in p.read_text().splitlines() if not l.startswith("# config")]
    assert strip(direct) == strip(via_cfg)


def test_config_file_flag_overrides(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"xi2": "-20", "levels": 3}))
    out = tmp_path / "o.csv"
    rc = main(["spectrum", "--config", str(cfg), "--xi2", "0", "--out", str(out)])
    assert rc == 0
    rows = read_rows(out, ["axis_value", "level_index", "energy", "energy_per_ne"])
    # xi2 overridden to pure Kerr on the command line, levels from config
    assert len(rows) == 3
    assert [float(r[2]) for r in rows] == pytest.approx([0, 0, 2], abs=1e-12)


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus_key": 1}))
    rc = main(["spectrum", "--config", str(cfg)])
    assert rc == 2


def test_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "--frobnicate"])
    assert exc.value.code == 2


def test_json_format_meta(tmp_path):
    out = tmp_path / "o.json"
    rc = main(["gaps", "--xi2", "-2", "--format", "json", "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["meta"]["tool"] == "kposim"
    assert doc["columns"] == ["j", "energy", "gap"]
    assert len(doc["rows"]) > 10
