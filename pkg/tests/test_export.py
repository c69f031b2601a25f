import csv
import math

import numpy as np
import pytest

from quadcpg.cpg import TAU, wrap_phase
from quadcpg.errors import CommandError
from quadcpg.export import export_gait_from_library, export_trajectory, write_trajectory_csv
from quadcpg.gaits import default_library
from quadcpg.kinematics import LegGeometry, workspace_contains


@pytest.fixture(scope="module")
def library():
    return default_library()


def test_row_count_matches_resolution(library):
    header, rows = export_trajectory(library["trot"], cycles=1, resolution=4)
    assert len(rows) == 4
    header, rows = export_trajectory(library["trot"], cycles=3, resolution=16)
    assert len(rows) == 48


def test_header_names_all_legs(library):
    header, _ = export_trajectory(library["trot"], 1, 4)
    assert header[0] == "phase"
    assert "fl_x" in header and "hr_pwm_knee" in header
    assert len(header) == 1 + 4 * 8


def test_exported_points_inside_workspace(library):
    geom = LegGeometry()
    for name in ("trot", "walk", "gallop"):
        header, rows = export_trajectory(library[name], 1, 256)
        for row in rows:
            for leg in range(4):
                x, y = row[1 + leg * 8], row[2 + leg * 8]
                assert workspace_contains(x, y, geom)


def test_derivative_columns_match_finite_differences(library):
    gait = library["trot"]
    resolution = 512
    header, rows = export_trajectory(gait, 1, resolution)
    h = TAU / resolution
    data = np.array(rows)
    for leg in range(4):
        offset = float(gait.target_offsets[leg])
        x = data[:, 1 + leg * 8]
        dx = data[:, 3 + leg * 8]
        y = data[:, 2 + leg * 8]
        dy = data[:, 4 + leg * 8]
        for k in range(1, resolution - 1):
            # skip stencils straddling the phase wrap of this leg: the
            # polynomial basis is deliberately non-periodic there
            phis = [wrap_phase(data[j, 0] - offset) for j in (k - 1, k, k + 1)]
            if not (phis[0] < phis[1] < phis[2]):
                continue
            fd_x = (x[k + 1] - x[k - 1]) / (2 * h)
            fd_y = (y[k + 1] - y[k - 1]) / (2 * h)
            assert abs(fd_x - dx[k]) < 1e-4 * (1 + abs(dx[k]))
            assert abs(fd_y - dy[k]) < 1e-4 * (1 + abs(dy[k]))


def test_csv_file_round_trip(tmp_path, library):
    target = tmp_path / "trot.csv"
    count = write_trajectory_csv(target, library["trot"], 2, 8)
    assert count == 16
    with open(target) as handle:
        reader = csv.reader(handle)
        header = next(reader)
        rows = list(reader)
    assert len(rows) == 16
    assert len(header) == 33
    first = [float(v) for v in rows[0]]
    assert first[0] == 0.0


def test_unknown_gait_rejected(library):
    with pytest.raises(CommandError):
        export_gait_from_library(library, "prance", 1, 4)


def test_pwm_columns_saturate_inside_range(library):
    _, rows = export_trajectory(library["modified_trot_2"], 1, 128)
    data = np.array(rows)
    for leg in range(4):
        pwm_hip = data[:, 7 + leg * 8]
        pwm_knee = data[:, 8 + leg * 8]
        assert np.all(pwm_hip >= 500.0) and np.all(pwm_hip <= 2500.0)
        assert np.all(pwm_knee >= 500.0) and np.all(pwm_knee <= 2500.0)
