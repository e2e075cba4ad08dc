import re

import numpy as np
import pytest

from presstopo.driver import PROGRESS_FORMAT, RunConfig, run
from presstopo.mesh import build_mesh
from presstopo.problems import preset

TINY = dict(nelx=3, nely=3, nelz=3, volfrac=0.3, rmin=1.5)


class TestRunConfig:
    def test_flagship_configuration_valid(self):
        cfg = RunConfig(
            nelx=48, nely=24, nelz=24, volfrac=0.25, penal=3, rmin=np.sqrt(3),
            etaf=0.2, betaf=10, lst=1, maxit=100,
        )
        assert cfg.preset == "lid"
        assert cfg.flow_model().ds == pytest.approx((np.log(0.1) / 2) ** 2 * 1e-7)
        assert cfg.elastic_model().emin == pytest.approx(1e-5)

    @pytest.mark.parametrize("field,value", [
        ("volfrac", 0.0), ("volfrac", 1.5), ("penal", 0.5), ("maxit", 0),
        ("preset", "arch"), ("lst", 2), ("rmin", 0.0), ("nelx", 0),
    ])
    def test_validation(self, field, value):
        kwargs = dict(TINY)
        kwargs[field] = value
        kwargs.setdefault("volfrac", 0.3)
        with pytest.raises(ValueError, match=field):
            RunConfig(**{**dict(nelx=2, nely=2, nelz=2, volfrac=0.3), **kwargs})


class TestRun:
    def test_single_iteration(self):
        res = run(RunConfig(maxit=1, **TINY))
        assert len(res.history) == 1
        assert res.history.iteration == [1]
        assert res.history.compliance_normalized[0] == pytest.approx(1000.0)

    def test_change_tolerance_terminates(self):
        res = run(RunConfig(maxit=50, change_tol=0.15, **TINY))
        assert len(res.history) == 1  # first change <= move limit < tol

    def test_full_volume_fixed_point(self):
        # at x = 1 with a frozen load the compliance gradient is negative
        # everywhere, so MMA presses against the upper bound and the zero-slack
        # volume constraint pins the design (with load sensitivities the
        # gradient near the pressurized face turns positive and x = 1 is not
        # stationary)
        cfg = RunConfig(nelx=2, nely=2, nelz=2, volfrac=1.0, rmin=1.2, maxit=2,
                        lst=0)
        res = run(cfg)
        assert np.abs(res.xphys - 1.0).max() < 1e-9
        assert np.abs(res.design - 1.0).max() < 1e-9

    def test_determinism(self):
        cfg = RunConfig(maxit=4, **TINY)
        r1 = run(cfg)
        r2 = run(cfg)
        assert r1.history.compliance == r2.history.compliance
        assert r1.history.change == r2.history.change
        assert np.array_equal(r1.xphys, r2.xphys)

    def test_history_columns_and_bounds(self):
        res = run(RunConfig(maxit=5, **TINY))
        h = res.history
        assert len(h) == 5
        assert all(0.0 <= v <= 1.0 for v in h.volfrac)
        assert all(c >= 0 for c in h.change)
        assert all(s >= 0 for s in h.seconds)
        assert all(np.isfinite(c) for c in h.compliance)

    def test_physical_bounds_every_iteration(self):
        # bounds of the physical field hold at the end of each iteration;
        # probe by running increasing iteration counts
        for maxit in (1, 2, 3):
            res = run(RunConfig(maxit=maxit, **TINY))
            assert res.xphys.min() >= 0.0
            assert res.xphys.max() <= 1.0 + 1e-12

    def test_progress_line_format(self):
        lines = []
        run(RunConfig(maxit=2, **TINY), log=lines.append)
        assert len(lines) == 2
        pattern = r"^ It\.:\s*\d+ Obj\.:\s*-?[\d.]+ Vol\.:\s*[\d.]+ ch\.:\s*[\d.]+$"
        for line in lines:
            assert re.match(pattern, line), line
        assert lines[0] == PROGRESS_FORMAT.format(it=1, obj=1000.0,
                                                  vol=res_vol(lines[0]), ch=0.1)

    def test_history_file_streams(self, tmp_path):
        path = tmp_path / "hist.csv"
        run(RunConfig(maxit=3, history_path=str(path), **TINY))
        lines = path.read_text().splitlines()
        assert lines[0] == "iter,compliance,compliance_normalized,volfrac,change,seconds"
        assert len(lines) == 4

    def test_passive_void_enforced(self):
        cfg = RunConfig(nelx=9, nely=9, nelz=9, volfrac=0.2, preset="hull",
                        rmin=1.5, maxit=2)
        res = run(cfg)
        mesh = build_mesh(9, 9, 9)
        pr = preset("hull", mesh)
        assert np.all(res.xphys[pr.passive_void] == 0.0)
        void_nodes = np.unique(mesh.elem_pressure_dofs[pr.passive_void])
        assert np.all(res.pressure[void_nodes] == 0.0)

    def test_splu_backend_agrees(self):
        cfg_a = RunConfig(maxit=3, backend="cholmod", **TINY)
        cfg_b = RunConfig(maxit=3, backend="splu", **TINY)
        ra, rb = run(cfg_a), run(cfg_b)
        np.testing.assert_allclose(ra.xphys, rb.xphys, atol=1e-9)

    def test_normalization_scale_does_not_steer_the_design(self):
        # the optimizer sees obj*normf; the minimizer is unaffected by the
        # scale up to the tiny mmasub regularization terms
        ra = run(RunConfig(maxit=6, normalization_target=1000.0, **TINY))
        rb = run(RunConfig(maxit=6, normalization_target=250.0, **TINY))
        assert np.abs(ra.xphys - rb.xphys).max() < 1e-4


def res_vol(line):
    return float(re.search(r"Vol\.:\s*([\d.]+)", line).group(1))
