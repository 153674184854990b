import math
import subprocess
import sys

import pytest

from ibrownian import cli
from ibrownian import kernels as K
from ibrownian.acceptance import CHECKS


def run_cli(args):
    return cli.main(list(args))


class TestSampleCommand:
    def test_ginibre_block_csv_identical_on_rerun(self, tmp_path):
        argv = ["sample", "--model", "ginibre", "--n", "100", "--n-samples", "50", "--seed", "7"]
        assert run_cli(argv + ["--out", str(tmp_path / "a")]) == 0
        assert run_cli(argv + ["--out", str(tmp_path / "b")]) == 0
        a = (tmp_path / "a" / "samples.csv").read_text()
        b = (tmp_path / "b" / "samples.csv").read_text()
        assert a == b
        assert a.count("\n\n") == 49   # 50 blocks
        assert a.splitlines()[0] == "x,y"

    def test_seed_changes_output(self, tmp_path):
        base = ["sample", "--model", "airy", "--n", "6", "--n-samples", "3"]
        run_cli(base + ["--seed", "1", "--out", str(tmp_path / "a")])
        run_cli(base + ["--seed", "2", "--out", str(tmp_path / "b")])
        assert (tmp_path / "a" / "samples.csv").read_text() != (tmp_path / "b" / "samples.csv").read_text()

    def test_family_without_sampler_is_config_error(self, tmp_path, capsys):
        rc = run_cli(["sample", "--model", "square-bessel", "--out", str(tmp_path)])
        assert rc == 2
        assert "model.family" in capsys.readouterr().err

    def test_unknown_family_names_key(self, tmp_path, capsys):
        rc = run_cli(["sample", "--model", "nope", "--out", str(tmp_path)])
        assert rc == 2
        assert "model.family" in capsys.readouterr().err


class TestConfigResolution:
    def test_echoed_config_reproduces_run(self, tmp_path):
        first = tmp_path / "a"
        run_cli(["sample", "--model", "ginibre", "--n", "20", "--n-samples", "5",
                 "--seed", "3", "--out", str(first)])
        again = tmp_path / "b"
        assert run_cli(["sample", "--config", str(first / "config.ini"), "--out", str(again)]) == 0
        assert (first / "samples.csv").read_text() == (again / "samples.csv").read_text()

    def test_flags_override_file(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text("[run]\nseed = 1\n\n[model]\nfamily = airy\nn = 5\n")
        out = tmp_path / "out"
        run_cli(["sample", "--config", str(ini), "--seed", "9", "--n-samples", "2", "--out", str(out)])
        echoed = (out / "config.ini").read_text()
        assert "seed = 9" in echoed
        assert "family = airy" in echoed

    def test_unknown_key_in_file(self, tmp_path, capsys):
        ini = tmp_path / "run.ini"
        ini.write_text("[model]\nwhatever = 3\n")
        rc = run_cli(["sample", "--config", str(ini), "--out", str(tmp_path / "o")])
        assert rc == 2
        assert "model.whatever" in capsys.readouterr().err

    def test_bad_value_type_names_key(self, tmp_path, capsys):
        ini = tmp_path / "run.ini"
        ini.write_text("[model]\nn = lots\n")
        rc = run_cli(["sample", "--config", str(ini), "--out", str(tmp_path / "o")])
        assert rc == 2
        assert "model.n" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        rc = run_cli(["sample", "--config", str(tmp_path / "absent.ini"), "--out", str(tmp_path / "o")])
        assert rc == 2


class TestKernelCommand:
    def test_airy_diagonal_grid(self, tmp_path):
        out = tmp_path / "k"
        assert run_cli(["kernel", "--kernel", "airy2", "--grid", "-4:2:0.05", "--out", str(out)]) == 0
        lines = (out / "kernel.csv").read_text().splitlines()
        assert lines[0] == "x,value"
        assert len(lines) == 122   # 121 grid points
        x0, v0 = (float(t) for t in lines[1].split(","))
        assert x0 == -4.0
        assert v0 == pytest.approx(K.airy_kernel(-4.0, -4.0), rel=1e-12)

    def test_bessel_diagonal_uses_alpha(self, tmp_path):
        out = tmp_path / "k"
        assert run_cli(["kernel", "--kernel", "bessel", "--alpha", "2", "--grid", "1:3:1", "--out", str(out)]) == 0
        rows = (out / "kernel.csv").read_text().splitlines()[1:]
        want = K.bessel_kernel(2.0, 2.0, 2.0)
        assert float(rows[1].split(",")[1]) == pytest.approx(want, rel=1e-12)

    def test_grid_parse_errors(self, tmp_path, capsys):
        assert run_cli(["kernel", "--grid", "oops", "--out", str(tmp_path)]) == 2
        assert "diagnostics.grid" in capsys.readouterr().err
        assert run_cli(["kernel", "--grid", "2:1:0.5", "--out", str(tmp_path)]) == 2

    def test_out_of_domain_grid_is_config_error(self, tmp_path, capsys):
        rc = run_cli(["kernel", "--kernel", "bessel", "--grid", "-1:1:0.5", "--out", str(tmp_path)])
        assert rc == 2


class TestSimulateCommand:
    def test_trajectory_format(self, tmp_path):
        out = tmp_path / "s"
        rc = run_cli(["simulate", "--model", "airy", "--n", "3", "--paths", "2", "--dt", "1e-3",
                      "--t-final", "0.004", "--dt-record", "2e-3", "--seed", "5", "--out", str(out)])
        assert rc == 0
        lines = (out / "trajectory.csv").read_text().splitlines()
        assert lines[0] == "t,path_id,particle_id,x"
        # 2 paths x 3 recorded times x 3 particles
        assert len(lines) == 1 + 2 * 3 * 3
        first = lines[1].split(",")
        assert float(first[0]) == 0.0 and first[1] == "0" and first[2] == "0"

    def test_planar_trajectory_has_two_coordinates(self, tmp_path):
        out = tmp_path / "s"
        rc = run_cli(["simulate", "--model", "ginibre", "--n", "4", "--paths", "2", "--dt", "1e-3",
                      "--t-final", "0.002", "--dt-record", "2e-3", "--seed", "5", "--out", str(out)])
        assert rc == 0
        assert (out / "trajectory.csv").read_text().splitlines()[0] == "t,path_id,particle_id,x,y"

    def test_spaced_initial_for_unsampled_family(self, tmp_path):
        out = tmp_path / "s"
        rc = run_cli(["simulate", "--model", "square-bessel", "--n", "3", "--alpha", "1", "--paths", "2",
                      "--dt", "1e-3", "--t-final", "0.002", "--dt-record", "2e-3", "--out", str(out)])
        assert rc == 0

    def test_numerical_failure_exit_code_names_path(self, tmp_path, capsys):
        # depth 0 with a coarse step cannot satisfy the drift cap
        rc = run_cli(["simulate", "--model", "airy", "--n", "5", "--initial", "spaced",
                      "--dt", "0.5", "--t-final", "0.5", "--max-substep-depth", "0",
                      "--out", str(tmp_path / "s")])
        assert rc == 3
        err = capsys.readouterr().err
        assert "numerical failure" in err and "path 0" in err

    def test_workers_env_must_be_positive_int(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("IBROWNIAN_WORKERS", "zero")
        rc = run_cli(["simulate", "--model", "airy", "--n", "3", "--paths", "1", "--dt", "1e-3",
                      "--t-final", "0.002", "--dt-record", "2e-3", "--out", str(tmp_path / "s")])
        assert rc == 2
        assert "IBROWNIAN_WORKERS" in capsys.readouterr().err

    def test_workers_do_not_change_output(self, tmp_path, monkeypatch):
        argv = ["simulate", "--model", "airy", "--n", "3", "--paths", "4", "--dt", "1e-3",
                "--t-final", "0.004", "--dt-record", "2e-3", "--seed", "8"]
        run_cli(argv + ["--out", str(tmp_path / "one")])
        monkeypatch.setenv("IBROWNIAN_WORKERS", "2")
        run_cli(argv + ["--out", str(tmp_path / "two")])
        assert (tmp_path / "one" / "trajectory.csv").read_text() == (
            tmp_path / "two" / "trajectory.csv"
        ).read_text()


class TestDiagnosticsCommands:
    def test_correlate_order_one(self, tmp_path):
        out = tmp_path / "c"
        rc = run_cli(["correlate", "--model", "airy", "--n", "10", "--n-samples", "40",
                      "--bins", "-6,-4,-2,0,2", "--seed", "2", "--out", str(out)])
        assert rc == 0
        lines = (out / "correlation.csv").read_text().splitlines()
        assert lines[0] == "x_lo,x_hi,density,stderr"
        assert len(lines) == 5

    def test_correlate_planar_pair_needs_window(self, tmp_path, capsys):
        rc = run_cli(["correlate", "--model", "ginibre", "--n", "20", "--n-samples", "5",
                      "--order", "2", "--out", str(out := tmp_path / "c")])
        assert rc == 2
        assert "diagnostics.window" in capsys.readouterr().err
        assert not (out / "correlation.csv").exists()

    def test_drift_diag_artifacts(self, tmp_path):
        out = tmp_path / "d"
        rc = run_cli(["drift-diag", "--model", "airy", "--n", "20", "--n-samples", "100",
                      "--x", "-1", "--r-list", "3,6", "--s", "1.5", "--seed", "6", "--out", str(out)])
        assert rc == 0
        scan = (out / "drift_scan.csv").read_text().splitlines()
        assert scan[0] == "r,mean_x,stderr_x"
        assert len(scan) == 3
        dec = (out / "decomposition.csv").read_text().splitlines()
        assert dec[0] == "sample_id,free_x,near_x,far_x"
        assert len(dec) == 101

    def test_drift_diag_needs_enough_environments(self, tmp_path, capsys):
        rc = run_cli(["drift-diag", "--model", "airy", "--n", "10", "--n-samples", "20",
                      "--x", "-1", "--out", str(tmp_path / "d")])
        assert rc == 2
        assert "sampler.n_samples" in capsys.readouterr().err

    def test_tightness_values_decrease(self, tmp_path):
        out = tmp_path / "t"
        rc = run_cli(["tightness", "--model", "airy", "--n", "40", "--n-samples", "60",
                      "--L-list", "0,10,20,30", "--seed", "4", "--out", str(out)])
        assert rc == 0
        rows = (out / "tightness.csv").read_text().splitlines()[1:]
        vals = [float(r.split(",")[1]) for r in rows]
        assert vals == sorted(vals, reverse=True)

    def test_moments_slope_near_two(self, tmp_path, capsys):
        out = tmp_path / "m"
        rc = run_cli(["moments", "--model", "airy", "--n", "4", "--paths", "60", "--dt", "5e-4",
                      "--t-final", "0.032", "--dt-record", "2e-3",
                      "--lags", "0.002,0.004,0.008", "--seed", "11", "--out", str(out)])
        assert rc == 0
        text = capsys.readouterr().out
        slope = float(text.rsplit("slope", 1)[1])
        assert 1.7 <= slope <= 2.3
        rows = (out / "moments.csv").read_text().splitlines()
        assert rows[0] == "lag,moment4"
        assert len(rows) == 4

    def test_off_grid_lag_is_config_error(self, tmp_path, capsys):
        rc = run_cli(["moments", "--model", "airy", "--n", "3", "--paths", "2", "--dt", "1e-3",
                      "--t-final", "0.004", "--dt-record", "2e-3", "--lags", "0.003",
                      "--out", str(tmp_path / "m")])
        assert rc == 2
        assert "diagnostics.lags" in capsys.readouterr().err


class TestVerifyCommand:
    def test_named_checks_run_and_report(self, tmp_path, capsys):
        out = tmp_path / "v"
        rc = run_cli(["verify", "--checks", "tail-sum-decay", "--out", str(out)])
        assert rc == 0
        text = capsys.readouterr().out
        assert "PASS tail-sum-decay" in text
        rows = (out / "verify.csv").read_text().splitlines()
        assert rows[0] == "name,passed,value,threshold,wall_time"
        assert rows[1].startswith("tail-sum-decay,1,")

    def test_unknown_check_is_config_error(self, tmp_path, capsys):
        assert run_cli(["verify", "--checks", "bogus", "--out", str(tmp_path)]) == 2
        assert "run.checks" in capsys.readouterr().err

    def test_unknown_suite_is_config_error(self, tmp_path, capsys):
        assert run_cli(["verify", "--suite", "medium", "--out", str(tmp_path)]) == 2
        assert "run.suite" in capsys.readouterr().err

    def test_quick_suite_is_full_minus_slow(self):
        assert set(cli._SLOW_CHECKS) < set(CHECKS)
        quick = [c for c in CHECKS if c not in cli._SLOW_CHECKS]
        assert len(quick) == len(CHECKS) - len(cli._SLOW_CHECKS)


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        res = subprocess.run(
            [sys.executable, "-m", "ibrownian.cli", "kernel", "--kernel", "airy2",
             "--grid", "0:1:0.5", "--out", str(tmp_path)],
            capture_output=True,
            text=True,
        )
        assert res.returncode == 0
        assert (tmp_path / "kernel.csv").exists()
        assert (tmp_path / "config.ini").exists()

    def test_ginibre_kernel_diagonal_is_flat(self, tmp_path):
        run_cli(["kernel", "--kernel", "ginibre", "--grid", "0:2:1", "--out", str(tmp_path)])
        rows = (tmp_path / "kernel.csv").read_text().splitlines()[1:]
        for row in rows:
            assert float(row.split(",")[1]) == pytest.approx(1.0 / math.pi, rel=1e-12)
