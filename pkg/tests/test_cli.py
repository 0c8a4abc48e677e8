"""Command-line interface: config plumbing, CSV layout, exit codes."""

import numpy as np
import pytest

from xxzquench import __version__, cli


def _read_csv(path):
    """Split an output file into (header, columns, rows, summary)."""
    header: dict[str, str] = {}
    summary: dict[str, str] = {}
    columns = None
    rows = []
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            key, sep, value = body.partition("=")
            if sep:
                (header if columns is None else summary)[key.strip()] = value
        elif columns is None:
            columns = line.split(",")
        else:
            rows.append(line.split(","))
    return header, columns, rows, summary


class TestConfigResolution:
    def test_defaults(self):
        _, config = cli._resolve_config("ground", None, [])
        assert config["n"] == 512
        assert config["delta"] == 1.0
        assert config["h"] == 0.0
        assert config["threads"] == 1

    def test_file_then_override(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# comment line\n\ndelta = 0.7\nn = 128\n")
        _, config = cli._resolve_config("ground", str(path), ["delta=0.9"])
        assert config["n"] == 128
        assert config["delta"] == 0.9  # command line wins

    def test_unknown_key_lists_known_ones(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("bogus = 1\n")
        with pytest.raises(cli.ConfigError, match="known keys"):
            cli._resolve_config("ground", str(path), [])

    def test_file_syntax_error_carries_line_number(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("delta = 0.7\nnot a pair\n")
        with pytest.raises(cli.ConfigError, match=r"run\.cfg:2"):
            cli._resolve_config("ground", str(path), [])

    def test_missing_file(self, tmp_path):
        with pytest.raises(cli.ConfigError, match="cannot read"):
            cli._resolve_config("ground", str(tmp_path / "absent.cfg"), [])

    def test_value_parsers(self):
        _, config = cli._resolve_config(
            "scaling", None, ["n_list=10,20,30", "t_max_factor=1.5"]
        )
        assert config["n_list"] == (10, 20, 30)
        assert config["t_max_factor"] == 1.5
        _, config = cli._resolve_config("quench", None, ["t_max=auto"])
        assert config["t_max"] is None
        _, config = cli._resolve_config("quench", None, ["t_max=12.5"])
        assert config["t_max"] == 12.5

    def test_non_finite_float_rejected(self):
        with pytest.raises(cli.ConfigError, match="bad value"):
            cli._resolve_config("ground", None, ["delta=nan"])


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv",
        [
            ["ground", "bogus=1"],
            ["ground", "delta"],  # missing '='
            ["ground", "n=7"],  # odd chain
            ["ground", "n=abc"],
            ["quench", "dt=-0.1"],
            ["scaling", "n_list=100,100"],  # duplicate sizes
            ["sweep", "mode=banana"],
            ["oracle-compare", "n=16"],  # beyond dense-solver reach
        ],
    )
    def test_configuration_errors(self, argv, tmp_path, capsys):
        out = tmp_path / "out.csv"
        assert cli.main(argv + [f"output={out}"]) == 2
        assert "configuration error" in capsys.readouterr().err

    def test_failed_cusp_detection(self, tmp_path, capsys):
        # a window shorter than the first revival cannot contain a
        # suppression event; partial results must still be written
        out = tmp_path / "scaling.csv"
        code = cli.main(
            [
                "scaling",
                "n_list=60,80",
                "t_max_factor=0.5",
                "dt=0.05",
                f"output={out}",
            ]
        )
        assert code == 4
        header, columns, rows, summary = _read_csv(out)
        assert len(rows) == 2  # one per chain size, despite the failure
        assert "slope" not in summary


class TestGroundCommand:
    def test_half_filling_column(self, tmp_path):
        out = tmp_path / "ground.csv"
        assert cli.main(["ground", "delta=0.5", "h=0.0", "n=256", f"output={out}"]) == 0
        header, columns, rows, _ = _read_csv(out)
        assert columns[:6] == ["row_type", "q", "a", "b", "eps", "theta"]
        summary_row = rows[0]
        assert summary_row[0] == "summary"
        u1 = float(summary_row[columns.index("u1")])
        assert abs(u1 - 0.5) <= 1e-9
        mode_rows = [row for row in rows if row[0] == "mode"]
        assert len(mode_rows) == 128

    def test_header_carries_resolved_config(self, tmp_path):
        out = tmp_path / "ground.csv"
        cli.main(["ground", "delta=0.5", "n=64", f"output={out}"])
        text = out.read_text()
        assert text.startswith(f"# xxzquench {__version__}\n# command=ground\n")
        header, _, _, _ = _read_csv(out)
        assert header["delta"] == "0.5"
        assert header["n"] == "64"
        assert "threads" not in header
        assert "output" not in header

    def test_repeated_runs_are_byte_identical(self, tmp_path):
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        for out in (first, second):
            assert cli.main(["ground", "delta=1.0", "n=128", f"output={out}"]) == 0
        assert first.read_bytes() == second.read_bytes()


class TestQuenchCommand:
    def test_output_layout(self, tmp_path):
        out = tmp_path / "quench.csv"
        code = cli.main(
            ["quench", "n=64", "t_max=3.0", "dt=0.5", "m_list=1,2", f"output={out}"]
        )
        assert code == 0
        header, columns, rows, summary = _read_csv(out)
        assert columns == [
            "t",
            "q_m1", "c_m1", "t_m1", "p_m1_re", "p_m1_im",
            "q_m2", "c_m2", "t_m2", "p_m2_re", "p_m2_im",
        ]
        assert len(rows) == 7
        times = [float(row[0]) for row in rows]
        assert times == pytest.approx(np.arange(7) * 0.5)
        # every cell must round-trip through repr
        for row in rows:
            for cell in row:
                assert repr(float(cell)) == cell
        for key in ("v_g", "predicted_t_s", "t_s_m1", "n_events_m1", "events_m1"):
            assert key in summary
        for flag in ("rises_to_maximum", "drops_after_peak", "late_saturation"):
            assert summary[f"{flag}_q_m1"] in ("true", "false")
            assert summary[f"{flag}_c_m2"] in ("true", "false")

    def test_auto_window_resolved_into_header(self, tmp_path):
        out = tmp_path / "quench.csv"
        assert cli.main(["quench", "n=32", "dt=0.5", f"output={out}"]) == 0
        header, _, rows, _ = _read_csv(out)
        t_max = float(header["t_max"])
        min_separation = float(header["min_separation"])
        assert t_max > 0.0 and min_separation > 0.0
        assert float(rows[-1][0]) <= t_max


class TestSweepCommand:
    def test_delta_axis_layout(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = cli.main(
            [
                "sweep",
                "mode=delta",
                "n=32",
                "t_max=2.0",
                "dt=0.5",
                "sweep_start=0.5",
                "sweep_stop=0.7",
                "sweep_step=0.1",
                f"output={out}",
            ]
        )
        assert code == 0
        header, columns, rows, summary = _read_csv(out)
        assert columns == ["delta_final", "t", "q_m1", "c_m1"]
        assert len(rows) == 3 * 5
        axis = sorted({float(row[0]) for row in rows})
        assert axis == pytest.approx([0.5, 0.6, 0.7])
        assert "ridge_q_m1_late_median" in summary
        assert "ridge_c_m1_late_median" in summary

    def test_field_axis_defaults(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = cli.main(
            [
                "sweep",
                "mode=field",
                "n=32",
                "t_max=1.0",
                "dt=0.5",
                "sweep_stop=0.6",
                f"output={out}",
            ]
        )
        assert code == 0
        header, columns, rows, _ = _read_csv(out)
        assert columns[0] == "h_initial"
        assert header["sweep_start"] == "0.2"  # default written back
        axis = sorted({float(row[0]) for row in rows})
        assert axis == pytest.approx([0.2, 0.4, 0.6])


class TestOracleCompareCommand:
    def test_layout_and_agreement_summary(self, tmp_path):
        out = tmp_path / "oracle.csv"
        code = cli.main(
            ["oracle-compare", "n=8", "t_max=4.0", "dt=1.0", f"output={out}"]
        )
        assert code == 0
        header, columns, rows, summary = _read_csv(out)
        assert columns == [
            "t", "q_meanfield", "q_ed", "c_meanfield", "c_ed", "q_xagree", "x_leakage",
        ]
        assert len(rows) == 5
        # the X-state reduction must agree with the generic route on
        # the exactly-X states produced at zero field
        assert float(summary["max_xstate_agreement_gap"]) < 1e-6
        assert float(summary["max_x_leakage"]) < 1e-10
        assert "max_abs_discord_deviation" in summary
        assert "pearson_discord" in summary


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ["quench", "n=64", "t_max=3.0", "dt=0.5"],
            [
                "sweep", "mode=delta", "n=32", "t_max=1.0", "dt=0.5",
                "sweep_start=0.5", "sweep_stop=0.6", "sweep_step=0.1",
            ],
        ],
    )
    def test_thread_count_does_not_change_bytes(self, argv, tmp_path):
        single = tmp_path / "single.csv"
        pooled = tmp_path / "pooled.csv"
        assert cli.main(argv + ["threads=1", f"output={single}"]) == 0
        assert cli.main(argv + ["threads=8", f"output={pooled}"]) == 0
        assert single.read_bytes() == pooled.read_bytes()


class TestParser:
    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["--version"])
        assert excinfo.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_subcommand_required(self):
        with pytest.raises(SystemExit) as excinfo:
            cli.main([])
        assert excinfo.value.code == 2
