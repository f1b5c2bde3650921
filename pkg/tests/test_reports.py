"""Report layer tests: config handling, emission round-trips, CLI behavior,
reproducibility, and figure rendering."""

import json

import numpy as np
import pytest

from croftonlab import cli
from croftonlab.crofton import latitude_polyline, write_polyline
from croftonlab.errors import ConfigError
from croftonlab.intersections import HomogeneousCurve, write_curve
from croftonlab.reports import (
    RunConfig,
    RunReport,
    emit,
    load_config_file,
    parse_report,
    run,
)


def test_emit_parse_csv_round_trip():
    report = run(RunConfig("cd-scan", seed=3, samples=2_000, tau_grid=4))
    data = emit(report, "csv")
    back = parse_report(data, "csv")
    assert [r.name for r in back.rows] == [r.name for r in report.rows]
    for a, b in zip(report.rows, back.rows):
        assert a.value == b.value  # bitwise float round-trip through %.17g
        assert a.stderr == b.stderr
        assert a.samples == b.samples
        assert a.flag == b.flag


def test_emit_parse_json_round_trip():
    report = run(RunConfig("sun-example", n=4))
    data = emit(report, "json")
    back = parse_report(data, "json")
    assert back.config == report.config
    assert back.rows == report.rows
    assert back.wall_time == report.wall_time


def test_emit_header_only_for_empty_rows():
    report = RunReport({"command": "cd-scan"}, [], {}, 0.0)
    lines = emit(report, "csv").decode().strip().splitlines()
    assert lines[-1] == "name,value,stderr,samples,flag"
    assert all(line.startswith("#") for line in lines[:-1])


def test_config_echo_completeness():
    report = run(RunConfig("sun-example", n=2, seed=9))
    header = emit(report, "csv").decode()
    for field in RunConfig("sun-example").as_dict():
        assert f"# config.{field}=" in header


def test_cd_scan_rows_and_argmax():
    report = run(RunConfig("cd-scan", seed=4, samples=50_000))
    assert len(report.rows) == 9
    values = [row.value for row in report.rows]
    assert values[0] == max(values)
    assert report.diagnostics["argmax_tau"] == 0.0


def test_reproducibility_bitwise():
    cfg = dict(seed=11, samples=20_000)
    a = run(RunConfig("cd-scan", **cfg))
    b = run(RunConfig("cd-scan", **cfg))
    assert a.result_fields() == b.result_fields()
    # emitted bytes agree apart from the wall-time line
    strip = lambda data: [  # noqa: E731
        line for line in data.decode().splitlines() if not line.startswith("# wall_time=")
    ]
    assert strip(emit(a, "csv")) == strip(emit(b, "csv"))


def test_parallel_plan_reproducible():
    a = run(RunConfig("cd-scan", seed=12, samples=20_000, threads=3))
    b = run(RunConfig("cd-scan", seed=12, samples=20_000, threads=3))
    assert a.result_fields() == b.result_fields()


def test_validation_errors():
    with pytest.raises(ConfigError):
        run(RunConfig("cd-scan", samples=10))  # below minimum
    with pytest.raises(ConfigError):
        run(RunConfig("no-such-command"))
    with pytest.raises(ConfigError):
        run(RunConfig("cd-scan", format="xml"))
    with pytest.raises(ConfigError):
        run(RunConfig("crofton-sphere"))  # missing input
    with pytest.raises(ConfigError):
        run(RunConfig("crofton-sphere", input_path="/nonexistent/file.txt"))


def test_transversality_command():
    report = run(RunConfig("transversality", seed=13, samples=300, k=2, l=3, m=2))
    assert report.row("degenerate_count").value == 0.0
    assert report.row("containment_failures").value == 0.0
    assert report.row("min_degeneracy_volume").value > 1e-6
    assert report.row("swap_degeneracy_volume").value <= 1e-9
    assert report.row("swap_degeneracy_volume").flag == "degenerate"


def test_equidistribution_command_with_curve_file(tmp_path):
    path = tmp_path / "conic.txt"
    write_curve(HomogeneousCurve.fermat(2), path)
    report = run(
        RunConfig("equidistribution", seed=14, samples=200, input_path=str(path))
    )
    assert report.row("hist_2").value == 200.0
    assert report.row("exceptional_fraction").value == 0.0


def test_crofton_commands_with_files(tmp_path):
    poly = tmp_path / "lat.txt"
    write_polyline(latitude_polyline(np.pi / 3, 360), poly)
    report = run(RunConfig("crofton-sphere", seed=15, samples=5_000, input_path=str(poly)))
    est = report.row("crofton_length")
    truth = report.row("polyline_length")
    assert abs(est.value - truth.value) <= 3 * est.stderr

    report = run(RunConfig("calibrate", seed=16, samples=5_000, input_path=str(poly)))
    zeta = report.row("zeta_hat")
    assert abs(zeta.value - np.pi) <= 3 * zeta.stderr

    curve = tmp_path / "cubic.txt"
    write_curve(HomogeneousCurve.fermat(3), curve)
    report = run(RunConfig("crofton-cp", seed=17, samples=300, input_path=str(curve)))
    assert report.row("area_units").value == 3.0


def test_prop34_scan_command():
    report = run(
        RunConfig("prop34-scan", seed=18, samples=2_000, restarts=2, m=2, p=1, q=2)
    )
    names = [row.name for row in report.rows]
    assert "best_value" in names and "restart_00" in names and "restart_01" in names
    assert report.row("product_form").value + report.row("i_prime_complex").value >= 1.0
    assert report.diagnostics["nonconverged_restarts"] == 0


def test_tasaki_check_command():
    report = run(RunConfig("tasaki-check", seed=19, samples=20_000, q=2, random_planes=3))
    product = report.row("product_value")
    twisted = report.row("tasaki_value")
    assert abs(product.value - twisted.value) <= 3 * np.hypot(product.stderr, twisted.stderr)
    assert report.diagnostics["tasaki_i_prime_complex"] is True
    assert report.diagnostics["tasaki_product_form"] is False


def test_cli_end_to_end(tmp_path):
    poly = tmp_path / "lat.txt"
    write_polyline(latitude_polyline(np.pi / 3, 360), poly)
    out = tmp_path / "report.csv"
    code = cli.main(
        [
            "crofton-sphere",
            "--input", str(poly),
            "--samples", "2000",
            "--seed", "21",
            "--out", str(out),
            "--plot",
        ]
    )
    assert code == 0
    assert out.exists()
    figures = list(tmp_path.glob("*.png"))
    assert figures, "expected a rendered figure next to the report"
    parsed = parse_report(out.read_bytes(), "csv")
    assert parsed.config["seed"] == "21"


def test_cli_json_stdout(capsys):
    code = cli.main(["sun-example", "--n", "3", "--format", "json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["config"]["command"] == "sun-example"
    assert any(row["name"] == "points" and row["value"] == 3.0 for row in payload["rows"])


def test_cli_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "scan.cfg"
    cfg.write_text("seed=5\nsamples=20000\ntau-grid=4\nformat=json\n# comment\n")
    code = cli.main(["cd-scan", "--config", str(cfg), "--samples", "30000"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["config"]["samples"] == 30000  # flag wins
    assert payload["config"]["seed"] == 5
    assert payload["config"]["tau_grid"] == 4


def test_cli_error_exit_codes(tmp_path, capsys):
    assert cli.main(["cd-scan", "--samples", "5"]) == 2
    capsys.readouterr()
    assert cli.main(["crofton-sphere"]) == 2
    capsys.readouterr()
    bad = tmp_path / "bad.cfg"
    bad.write_text("samples=notanumber\n")
    assert cli.main(["cd-scan", "--config", str(bad)]) == 2


def test_config_file_parsing(tmp_path):
    cfg = tmp_path / "a.cfg"
    cfg.write_text("seed = 7\nkind = wirtinger  # choose family\n\n")
    values = load_config_file(cfg)
    assert values == {"seed": "7", "kind": "wirtinger"}
    bad = tmp_path / "b.cfg"
    bad.write_text("just a line\n")
    with pytest.raises(ConfigError):
        load_config_file(bad)


def test_figures_for_scan_and_histogram(tmp_path):
    from croftonlab import figures

    report = run(RunConfig("equidistribution", seed=22, samples=150, n=2))
    paths = figures.render_report(report, tmp_path)
    assert all(p.exists() and p.suffix == ".png" for p in paths)

    report = run(RunConfig("cd-scan", seed=23, samples=2_000, tau_grid=3))
    paths = figures.render_report(report, tmp_path)
    assert all(p.exists() for p in paths)

    report = run(RunConfig("sun-example", n=2))
    paths = figures.render_report(report, tmp_path)
    assert all(p.exists() for p in paths)
