import math

import pytest

from staballoc.logio import (CSV_COLUMNS, RunLog, emit_csv, emit_svg_plots,
                             parse_csv)


def make_log(n=20):
    log = RunLog(scenario="demo", controller="proposed", dt=0.001)
    for k in range(n):
        t = k * 0.001
        row = {c: 0.0 for c in CSV_COLUMNS}
        row.update({"t": t, "Vx": 13.0 + 0.1 * k, "X": 1.3 * k,
                    "Y": math.sin(0.2 * k), "beta": 1e-3 * k,
                    "N_fl": 3507.075, "resid": 0.5 / (k + 1)})
        log.append(row, [0.0] * 12, 0.0)
    return log


class TestCsv:
    def test_schema_header(self, tmp_path):
        path = emit_csv(make_log(), tmp_path / "demo.csv")
        header = path.read_text().splitlines()[0]
        assert header == ",".join(CSV_COLUMNS)
        assert header.startswith("t,Vx,Vy,r,beta,z,phi,theta,X,Y,psi,d_fl")
        assert header.endswith("v1,v2,v3,v4,v5,resid")

    def test_round_trip_is_bit_exact(self, tmp_path):
        log = make_log(50)
        path = emit_csv(log, tmp_path / "demo.csv")
        data = parse_csv(path)
        for c in CSV_COLUMNS:
            assert data[c] == log.cols[c]

    def test_repeated_emission_is_byte_identical(self, tmp_path):
        log = make_log(50)
        p1 = emit_csv(log, tmp_path / "a.csv")
        p2 = emit_csv(log, tmp_path / "b.csv")
        assert p1.read_bytes() == p2.read_bytes()

    def test_io_error_has_path_context(self, tmp_path):
        with pytest.raises(OSError, match="no/such/dir"):
            emit_csv(make_log(), tmp_path / "no" / "such" / "dir" / "x.csv")


class TestSvg:
    def test_files_written_with_obstacle_line(self, tmp_path):
        paths = emit_svg_plots(make_log(), tmp_path, "demo")
        names = {p.name for p in paths}
        assert names == {"demo_timeseries.svg", "demo_trajectory.svg"}
        traj = (tmp_path / "demo_trajectory.svg").read_text()
        assert "stroke-dasharray" in traj       # obstacle line style
        assert "obstacle line" in traj
        ts = (tmp_path / "demo_timeseries.svg").read_text()
        for name in ("beta", "Vx", "phi"):
            assert name in ts

    def test_deterministic_bytes(self, tmp_path):
        (tmp_path / "a").mkdir()
        (tmp_path / "b").mkdir()
        p1 = emit_svg_plots(make_log(), tmp_path / "a", "demo")
        p2 = emit_svg_plots(make_log(), tmp_path / "b", "demo")
        for a, b in zip(p1, p2):
            assert a.read_bytes() == b.read_bytes()

    def test_empty_log_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_svg_plots(RunLog(), tmp_path, "demo")
