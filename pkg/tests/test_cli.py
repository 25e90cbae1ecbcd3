import math

import numpy as np
import pytest

from gravgas.cli import main
from gravgas.io import read_snapshot
from gravgas.spherical import homogeneous_state

RHO0 = 3.0 / (8.0 * math.pi)
GAMMA_SLAB = 1.0 / (2.0 * math.pi)


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def summary(tmp_path, out="out"):
    lines = (tmp_path / out / "summary.txt").read_text().splitlines()
    return dict(line.split(": ", 1) for line in lines)


SPHERE = f"""\
geometry = spherical
gamma = 1
initial_density = constant
initial_density.value = {RHO0!r}
times = 0, 0.5, 1.5
grid.n_points = 8
grid.range = 0, 1
output.dir = out
"""

SLAB = f"""\
geometry = slab
gamma = {GAMMA_SLAB!r}
initial_density = uniform-slab
initial_density.b = 1
initial_density.a = 1
grid.n_points = 9
grid.range = -1.5, 1.5
output.dir = out
"""


def test_homogeneous_sphere_three_snapshots(tmp_path):
    assert main(["run", str(write(tmp_path, SPHERE))]) == 0
    for i in range(3):
        s = read_snapshot(tmp_path / "out" / f"snapshot_{i}.csv")
        assert len(s) == 8
        np.testing.assert_allclose(s.density, s.density[0], rtol=1e-14)
    assert summary(tmp_path)["status"] == "ok"
    assert summary(tmp_path)["snapshots_written"] == "3"


def test_slab_collapse_before_requested_time(tmp_path):
    cfg = write(tmp_path, SLAB + "times = 0, 0.5, 2.0\n")
    assert main(["run", str(cfg)]) == 2
    info = summary(tmp_path)
    assert info["status"] == "collapse"
    assert float(info["event_time"]) == 1.0
    assert float(info["requested_time"]) == 2.0
    assert (tmp_path / "out" / "snapshot_1.csv").exists()
    assert not (tmp_path / "out" / "snapshot_2.csv").exists()


def test_slab_half_time_density(tmp_path):
    assert main(["run", str(write(tmp_path, SLAB + "times = 0.5\n"))]) == 0
    s = read_snapshot(tmp_path / "out" / "snapshot_0.csv", geometry="planar")
    inside = np.abs(s.coord) <= 0.75
    assert np.all(s.density[inside] == 4.0 / 3.0)
    assert np.all(s.density[~inside] == 0.0)


def test_reruns_are_byte_identical(tmp_path):
    cfg = write(tmp_path, SPHERE)
    main(["run", str(cfg)])
    first = [(tmp_path / "out" / f"snapshot_{i}.csv").read_bytes() for i in range(3)]
    main(["run", str(cfg)])
    assert first == [(tmp_path / "out" / f"snapshot_{i}.csv").read_bytes() for i in range(3)]


def test_config_error_exit(tmp_path, capsys):
    cfg = write(tmp_path, SPHERE + "grid.n_points = 3\n")
    assert main(["run", str(cfg)]) == 1
    err = capsys.readouterr().err
    assert "line 9" in err and "grid.n_points" in err


def test_missing_config_exit(tmp_path):
    assert main(["run", str(tmp_path / "absent.cfg")]) == 1


def test_compare_uniform_slab(tmp_path):
    cfg = write(tmp_path, SLAB + "times = 0.5\nrun_mode = compare\noracle.n = 1000\n")
    assert main(["run", str(cfg)]) == 0
    info = summary(tmp_path)
    assert info["comparison_pass"] == "true"
    assert float(info["analytic_collapse_time"]) == 1.0
    rows = (tmp_path / "out" / "report.csv").read_text().splitlines()
    assert rows[0] == "t,field,max_rel_dev,l2_rel_dev,tolerance,pass"
    density = next(r.split(",") for r in rows[1:] if ",density," in r)
    assert float(density[2]) < 0.02 and density[5] == "true"


def test_oracle_sphere(tmp_path):
    text = SPHERE.replace("0, 0.5, 1.5", "0, 1.0") + "run_mode = oracle\noracle.n = 32\n"
    assert main(["run", str(write(tmp_path, text))]) == 0
    s = read_snapshot(tmp_path / "out" / "snapshot_1.csv")
    assert len(s) == 32
    exact = homogeneous_state(RHO0, 1.0, 1.0, s.coord).density
    np.testing.assert_allclose(s.density[1:-1], exact[1:-1], rtol=1e-9)
    assert np.isnan(s.density[0]) and np.isnan(s.density[-1])


def test_collapse_time_command(tmp_path):
    assert main(["collapse-time", str(write(tmp_path, SPHERE))]) == 0
    assert float(summary(tmp_path)["collapse_time"]) == pytest.approx(math.pi / 2, rel=1e-14)


def test_perturbation_command(tmp_path):
    text = SPHERE + f"perturbation.rho0 = {1 / (4 * math.pi)!r}\n"
    assert main(["perturbation", str(write(tmp_path, text))]) == 0
    info = summary(tmp_path)
    assert float(info["fitted_exponent"]) == pytest.approx(1.0, rel=0.01)
    assert (tmp_path / "out" / "perturbation.csv").exists()


def test_sound_perturbation_command(tmp_path):
    text = SPHERE + "perturbation.mode = sound\nperturbation.wavenumber = 3\n"
    assert main(["perturbation", str(write(tmp_path, text))]) == 0
    assert abs(float(summary(tmp_path)["fitted_exponent"])) < 1e-3


def test_series_check_in_summary(tmp_path):
    cfg = write(tmp_path, SLAB + "times = 0.5\nsolver.series_order = 40\n")
    assert main(["run", str(cfg)]) == 0
    line = summary(tmp_path)["series_t=0.5"]
    assert "converged" in line
