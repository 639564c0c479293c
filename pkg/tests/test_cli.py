"""End-to-end CLI behavior: exit codes, CSV schemas, manifests, atomicity."""

import json
import os
from pathlib import Path

import pytest

from tpass.cli import (
    EXIT_CONFIG,
    EXIT_INFEASIBLE,
    EXIT_IO,
    EXIT_OK,
    _csv_text,
    _format_cell,
    _parse_protocols,
    _version_string,
    _write_atomic,
    main,
)
from tpass.errors import ConfigError


def _write_small_config(tmp_path, extra=""):
    cfg = tmp_path / "small.cfg"
    cfg.write_text("N = 2\nK = 2\n" + extra)
    return str(cfg)


# --- helpers -----------------------------------------------------------------


def test_format_cell():
    assert _format_cell(None) == ""
    assert _format_cell(float("nan")) == ""
    assert _format_cell(0.123456789123) == "0.123456789"
    assert _format_cell(42) == "42"
    assert _format_cell("FRFP") == "FRFP"


def test_csv_text_layout():
    text = _csv_text(["a", "b"], [{"a": 1.0, "b": None}, {"a": float("nan"), "b": 2}])
    assert text == "a,b\n1,\n,2\n"


def test_parse_protocols():
    assert len(_parse_protocols(None)) == 4
    kinds = _parse_protocols("frfp, ARAP")
    assert [k.value for k in kinds] == ["FRFP", "ARAP"]
    with pytest.raises(ConfigError):
        _parse_protocols("FRXP")


def test_version_string_has_base_version():
    assert _version_string().startswith("0.1.0")


def test_write_atomic_cleans_up_on_failure(tmp_path, monkeypatch):
    target = tmp_path / "out.csv"

    def boom(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        _write_atomic(target, "data")
    assert not target.exists()
    assert list(tmp_path.iterdir()) == []  # no stray temp files


# --- experiment runs ----------------------------------------------------------


def test_fig4_end_to_end(tmp_path):
    out = tmp_path / "out"
    code = main(["--experiment", "fig4", "--out", str(out)])
    assert code == EXIT_OK

    csv_path = out / "fig4.csv"
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "delta,D_x,ratio_best,ratio_avg"
    assert len(lines) > 100

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["experiment"] == "fig4"
    assert manifest["outputs"] == ["fig4.csv"]
    assert len(manifest["config_hash"]) == 12
    assert manifest["config"]["N"] == 8
    assert set(manifest["derived_constants"]) == {"lam", "lam_g", "alpha", "eta", "k0"}
    assert manifest["version"].startswith("0.1.0")
    assert manifest["runtime_seconds"] >= 0.0
    # no temp files left behind by the atomic writes
    assert not [p for p in out.iterdir() if p.name.startswith(".")]


def test_fig4_rerun_bit_identical(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["--experiment", "fig4", "--out", str(out_a)]) == EXIT_OK
    assert main(["--experiment", "fig4", "--out", str(out_b)]) == EXIT_OK
    assert (out_a / "fig4.csv").read_bytes() == (out_b / "fig4.csv").read_bytes()


def test_fig5_small_run(tmp_path):
    cfg = _write_small_config(tmp_path)
    out = tmp_path / "out"
    code = main(
        [
            "--experiment", "fig5",
            "--config", cfg,
            "--trials", "2",
            "--q-grid", "48",
            "--protocols", "FRFP",
            "--out", str(out),
        ]
    )
    assert code == EXIT_OK
    lines = (out / "fig5.csv").read_text().splitlines()
    assert lines[0] == "iteration,protocol,wsr"
    body = [ln.split(",") for ln in lines[1:]]
    assert {row[1] for row in body} == {"FRFP"}
    assert [row[0] for row in body][0] == "0"


def test_custom_sweep_two_user(tmp_path):
    out = tmp_path / "out"
    code = main(
        [
            "--experiment", "custom-sweep",
            "--mode", "two-user",
            "--sweep-param", "D_x",
            "--sweep-values", "40,80",
            "--trials", "2",
            "--out", str(out),
        ]
    )
    assert code == EXIT_OK
    lines = (out / "custom-sweep.csv").read_text().splitlines()
    assert lines[0].startswith("D_x,")
    assert len(lines) == 1 + 2 * 4  # two sweep values x four schemes


def test_solve_once_json(tmp_path, capsys):
    code = main(["--experiment", "solve-once", "--ue", "50,0"])
    assert code == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["ue"] == [50.0, 0.0]
    assert payload["sic_order"] == "wired-strong"
    for field in ("psi", "delta", "beta", "rate_wired", "rate_wireless", "sum_rate"):
        assert isinstance(payload[field], float)


def test_solve_once_pinned_delta(capsys):
    code = main(["--experiment", "solve-once", "--ue", "50,0", "--delta", "0.7"])
    assert code == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["delta"] == 0.7


# --- failure paths -------------------------------------------------------------


def test_missing_config_is_io_error(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(
        [
            "--experiment", "fig4",
            "--config", str(tmp_path / "absent.cfg"),
            "--out", str(out),
        ]
    )
    assert code == EXIT_IO
    assert not out.exists()  # no partial outputs
    assert "io error" in capsys.readouterr().err


def test_bad_config_value_is_config_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("D_x = fifty\n")
    code = main(["--experiment", "fig4", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_unknown_config_key_is_config_error(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("frequency = 1e9\n")
    assert (
        main(["--experiment", "fig4", "--config", str(cfg), "--out", str(tmp_path / "o")])
        == EXIT_CONFIG
    )


def test_bad_protocol_is_config_error(tmp_path):
    cfg = _write_small_config(tmp_path)
    code = main(
        [
            "--experiment", "fig5",
            "--config", cfg,
            "--trials", "1",
            "--protocols", "FRXP",
            "--out", str(tmp_path / "o"),
        ]
    )
    assert code == EXIT_CONFIG


def test_custom_sweep_needs_param_and_values(tmp_path):
    code = main(
        ["--experiment", "custom-sweep", "--mode", "two-user", "--out", str(tmp_path / "o")]
    )
    assert code == EXIT_CONFIG


def test_solve_once_needs_ue():
    assert main(["--experiment", "solve-once"]) == EXIT_CONFIG


def test_solve_once_infeasible_delta(capsys):
    code = main(
        ["--experiment", "solve-once", "--ue", "50,0", "--delta", "0.99999999"]
    )
    assert code == EXIT_INFEASIBLE
    assert "infeasible" in capsys.readouterr().err


def test_all_points_infeasible_still_writes_csv(tmp_path, capsys):
    cfg = _write_small_config(tmp_path, "R1_min = 40\n")
    out = tmp_path / "out"
    code = main(
        [
            "--experiment", "custom-sweep",
            "--sweep-param", "D_x",
            "--sweep-values", "60",
            "--config", cfg,
            "--trials", "1",
            "--q-grid", "48",
            "--protocols", "FRFP",
            "--out", str(out),
        ]
    )
    assert code == EXIT_INFEASIBLE
    assert (out / "custom-sweep.csv").exists()
    lines = (out / "custom-sweep.csv").read_text().splitlines()
    header = lines[0].split(",")
    frac_col = header.index("feasible_fraction")
    assert all(ln.split(",")[frac_col] == "0" for ln in lines[1:])
    assert "infeasible" in capsys.readouterr().err
