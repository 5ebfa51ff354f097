import os

import numpy as np
import pytest

from paratorus import Grid, make_partition, renorm_constant
from paratorus.errors import ConfigurationError
from paratorus.harness import (RunConfig, build_nonlinearity, build_symbol,
                               build_initial_condition, make_config,
                               manifest_hash, parse_config_file, parse_ladder,
                               solver_config_from)
from paratorus.presets import preset_catalog


def run_cli(args):
    from paratorus.cli import main
    return main(args)


def read_lines(path):
    with open(path) as fh:
        return fh.read().splitlines()


def test_parse_ladder_forms():
    assert parse_ladder("2^-2..2^-4") == (0.25, 0.125, 0.0625)
    assert parse_ladder("0.5,0.25") == (0.5, 0.25)
    assert parse_ladder("2^-3") == (0.125,)
    # reversed ranges normalize to decreasing order
    assert parse_ladder("2^-4..2^-2") == (0.25, 0.125, 0.0625)


def test_parse_config_file_and_override(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("""
# a comment
grid = 32
samples = 5
eps-ladder = 2^-2..2^-3
""")
    keys = parse_config_file(cfg_file)
    cfg = make_config(keys, {"subcommand": "renorm-constant", "samples": "9"})
    assert cfg.grid == 32
    assert cfg.samples == 9            # flag wins
    assert cfg.eps_ladder == "2^-2..2^-3"


def test_unknown_key_rejected():
    with pytest.raises(ConfigurationError):
        make_config({}, {"subcommand": "solve", "wibble": "3"})


def test_bad_value_rejected():
    with pytest.raises(ConfigurationError):
        make_config({}, {"subcommand": "solve", "grid": "sixty-four"})


def test_every_preset_validates():
    catalog = preset_catalog()
    assert set(catalog) == {"linear-benchmark", "quasilinear-demo",
                            "convolution-renorm", "modulated-renorm"}
    for name in catalog:
        cfg = make_config(flag_keys={"preset": name, "subcommand": "presets"})
        cfg.validate()
        grid = Grid(cfg.grid)
        build_symbol(cfg.symbol, grid, alpha=cfg.alpha, mu=cfg.mu)
        build_nonlinearity(cfg.f)
        build_nonlinearity(cfg.g)


def test_solver_presets_build_full_configs():
    for name in ("linear-benchmark", "quasilinear-demo"):
        cfg = make_config(flag_keys={"preset": name, "subcommand": "solve"})
        solver_config_from(cfg)        # validates symbols + positivity


def test_builders_reject_unknown_specs(grid16):
    with pytest.raises(ConfigurationError):
        build_symbol("wavelet", grid16)
    with pytest.raises(ConfigurationError):
        build_nonlinearity("cubic")
    with pytest.raises(ConfigurationError):
        build_initial_condition("vortex", grid16)


def test_renorm_constant_cli_passthrough(tmp_path):
    out = tmp_path / "rc"
    status = run_cli(["renorm-constant", "--grid", "32", "--symbol",
                      "identity", "--eps-ladder", "2^-2..2^-3", "--out",
                      str(out)])
    assert status == 0
    lines = read_lines(out / "renorm_constant.csv")
    assert lines[0].split(",")[:4] == ["epsilon", "c_mean", "c_min", "c_max"]
    grid = Grid(32)
    part = make_partition(grid)
    from paratorus.symbols import identity_symbol
    sym = identity_symbol(grid)
    for row, eps in zip(lines[1:], (0.25, 0.125)):
        cells = row.split(",")
        expected = float(np.real(renorm_constant(sym, eps, part).mean()))
        assert cells[1] == "%.17g" % expected      # bit-exact passthrough


def test_cli_determinism_byte_identical(tmp_path):
    args = ["renorm-study", "--grid", "32", "--samples", "4", "--eps-ladder",
            "2^-2..2^-3", "--seed", "11"]
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run_cli(args + ["--out", str(out1)]) == 0
    assert run_cli(args + ["--out", str(out2)]) == 0
    for name in os.listdir(out1):
        with open(out1 / name, "rb") as fa, open(out2 / name, "rb") as fb:
            assert fa.read() == fb.read(), name


def test_manifest_hash_stamps_outputs(tmp_path):
    out = tmp_path / "rc"
    assert run_cli(["renorm-constant", "--grid", "32", "--out",
                    str(out), "--eps-ladder", "2^-2"]) == 0
    manifest = (out / "manifest.txt").read_text()
    digest = manifest_hash(manifest)
    for line in read_lines(out / "renorm_constant.csv")[1:]:
        assert line.endswith(digest)
    assert "profile_chi" in manifest and "version" in manifest


def test_pool_size_invariance(tmp_path, monkeypatch):
    args = ["renorm-study", "--grid", "32", "--samples", "4", "--eps-ladder",
            "2^-2..2^-3", "--seed", "5"]
    monkeypatch.setenv("PARATORUS_THREADS", "1")
    out1 = tmp_path / "serial"
    assert run_cli(args + ["--out", str(out1)]) == 0
    monkeypatch.setenv("PARATORUS_THREADS", "3")
    out2 = tmp_path / "pooled"
    assert run_cli(args + ["--out", str(out2)]) == 0
    for name in os.listdir(out1):
        with open(out1 / name, "rb") as fa, open(out2 / name, "rb") as fb:
            assert fa.read() == fb.read(), name


def test_bad_config_exit_code(tmp_path):
    status = run_cli(["solve", "--grid", "13", "--out", str(tmp_path / "x")])
    assert status == 2


def test_numerical_failure_exit_code(tmp_path):
    # an ill-posed run must exit 3 and leave a machine-readable record
    out = tmp_path / "fail"
    status = run_cli(["solve", "--grid", "64", "--f", "tanhshift:1.001",
                      "--g", "const:1", "--u0", "const:-5", "--dt", "1e-3",
                      "--t-final", "0.01", "--eps-ladder", "2^-3",
                      "--floor", "2e-3", "--out", str(out)])
    assert status == 3
    record = (out / "failure.txt").read_text()
    assert "category = ellipticity" in record


def test_check_estimates_writes_one_csv_per_estimate(tmp_path):
    out = tmp_path / "est"
    status = run_cli(["check-estimates", "--grid", "32", "--samples", "3",
                      "--estimate-grids", "32", "--out", str(out)])
    assert status == 0
    from paratorus.estimates import ESTIMATE_NAMES
    for name in ESTIMATE_NAMES:
        assert (out / ("estimate_%s.csv" % name)).exists()


def test_sample_noise_writes_field_and_report(tmp_path):
    out = tmp_path / "noise"
    status = run_cli(["sample-noise", "--grid", "32", "--samples", "2",
                      "--eps-ladder", "2^-2,2^-3", "--gammas=-1.2,0",
                      "--seed", "3", "--out", str(out)])
    assert status == 0
    from paratorus import read_field
    field = read_field(out / "noise_seed3.field")
    assert field.grid.n == 32
    assert (out / "noise_regularity.csv").exists()


def test_linear_benchmark_preset_reports_oracle_error(tmp_path):
    out = tmp_path / "lb"
    status = run_cli(["solve", "--preset", "linear-benchmark", "--seed", "3",
                      "--t-final", "0.02", "--out", str(out)])
    assert status == 0
    summary = (out / "summary.txt").read_text()
    key, value = summary.strip().split(" = ")
    assert key == "exact_oracle_sup_error"
    assert 0.0 < float(value) < 0.1


def test_modulated_preset_has_nonconstant_counterterm():
    cfg = make_config(flag_keys={"preset": "modulated-renorm",
                                 "subcommand": "renorm-constant"}).validate()
    grid = Grid(cfg.grid)
    sym = build_symbol(cfg.symbol, grid, alpha=cfg.alpha, mu=cfg.mu)
    c = renorm_constant(sym, cfg.eps_values()[0], make_partition(grid))
    phys = np.real(c.physical)
    assert phys.max() - phys.min() > 1e-3


def test_gnuplot_helper(tmp_path):
    out = tmp_path / "plots"
    status = run_cli(["renorm-constant", "--grid", "32", "--eps-ladder",
                      "2^-2", "--emit-gnuplot", "--out", str(out)])
    assert status == 0
    script = (out / "plots.gp").read_text()
    assert "renorm_constant.csv" in script


def test_run_config_defaults_consistent():
    RunConfig(subcommand="presets").validate()
