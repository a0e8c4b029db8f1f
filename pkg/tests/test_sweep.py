"""Grid driver, CSV/SVG emitters, peak correlation and the Rydberg scan."""

import math
import re
from dataclasses import replace

import numpy as np
import pytest

from kondoqet.errors import StructuralError
from kondoqet.model import ModelParams
from kondoqet.qet import run_protocol
from kondoqet.sweep import (
    CSV_COLUMNS,
    NAN_COLOR,
    RAMP_HI,
    RAMP_LO,
    Axis,
    SweepConfig,
    SweepRow,
    correlate_peaks,
    emit_csv,
    emit_heatmap,
    evaluate_point,
    run_grid,
    rydberg_config,
    rydberg_scan,
)

SMALL = ModelParams(N=6, n_A=3, n_B=5)


def small_config(**kw):
    cfg = SweepConfig(base=SMALL, axis1=Axis("Delta", -1.0, 1.0, 2), axis2=Axis("B", 0.1, 0.5, 2))
    return replace(cfg, **kw)


def fixture_rows(a, b):
    """Rows over a (Delta, B) grid with prescribed s_lr and e_teleported tables."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    rows = []
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            rows.append(SweepRow(delta=float(i), b=float(j), jk=0.2, d=1, s_lr=a[i, j], e_teleported=b[i, j]))
    return rows


def hex_rgb(color):
    return "#{:02x}{:02x}{:02x}".format(*color)


class TestAxis:
    def test_endpoints_exact(self):
        ax = Axis("B", 0.0, 1.5, 41)
        vals = ax.values()
        assert vals[0] == 0.0 and vals[-1] == 1.5
        assert len(vals) == 41
        np.testing.assert_allclose(vals, np.linspace(0, 1.5, 41), atol=1e-15)
        assert Axis("Delta", -0.3, 0.7, 7).values()[-1] == 0.7

    @pytest.mark.parametrize("args", [("Q", 0, 1, 3), ("B", 1, 0, 3), ("B", 0, 1, 1), ("B", 0, math.inf, 3)])
    def test_invalid(self, args):
        with pytest.raises(StructuralError):
            Axis(*args)

    def test_distinct_names(self):
        with pytest.raises(StructuralError):
            SweepConfig(axis1=Axis("B", 0, 1, 2), axis2=Axis("B", 0, 1, 2))

    def test_unknown_observable(self):
        with pytest.raises(StructuralError):
            SweepConfig(outputs=("bogus",))


class TestRunGrid:
    def test_row_major_order(self):
        rows = run_grid(small_config())
        assert [(r.delta, r.b) for r in rows] == [(-1.0, 0.1), (-1.0, 0.5), (1.0, 0.1), (1.0, 0.5)]
        for r in rows:
            assert r.error is None
            assert r.e_teleported == -r.e_b_closed
            assert r.d == 1

    def test_point_matches_protocol(self):
        p = SMALL.replace(Delta=0.4, B=0.3)
        row = evaluate_point(p)
        res = run_protocol(p)
        assert row.e_b_closed == res.e_b_closed
        assert row.theta == res.theta

    def test_jk_zero_endpoint_is_impurity_free(self):
        cfg = SweepConfig(base=SMALL, axis1=Axis("Jk", 0.0, 0.5, 2), axis2=None)
        row = run_grid(cfg)[0]
        ref = evaluate_point(SMALL.replace(Jk=0.0, coupled_site=4))
        for col in ("e0", "gap", "e_b_closed", "s_lr"):
            assert row.get(col) == pytest.approx(ref.get(col), abs=1e-10)

    def test_failure_isolated_as_nan_row(self):
        rows = run_grid(SweepConfig(base=SMALL.replace(n_B=4), axis1=Axis("B", 0.0, 1.0, 2), axis2=None))
        assert len(rows) == 2
        for r in rows:
            assert r.error and "StructuralError" in r.error
            assert math.isnan(r.e0) and math.isnan(r.e_teleported)

    def test_workers_do_not_change_rows(self):
        cfg = small_config(axis1=Axis("Delta", -1.0, 1.0, 3), axis2=Axis("B", 0.1, 0.5, 3))
        assert emit_csv(run_grid(cfg, workers=1)) == emit_csv(run_grid(cfg, workers=2))

    def test_invariants_on_small_grid(self):
        cfg = small_config(axis1=Axis("Delta", -2.0, 2.0, 5), axis2=Axis("B", 0.0, 1.5, 5))
        for r in run_grid(cfg):
            if r.degenerate:
                continue
            assert r.e_b_closed <= 1e-12
            assert abs(r.e_b_closed - r.e_b_direct) <= 1e-9 * max(1.0, abs(r.e_b_closed))
            assert r.bound_margin >= -1e-10


class TestRydberg:
    def test_defaults(self):
        cfg = rydberg_config()
        assert (cfg.base.N, cfg.base.n_A, cfg.base.n_B, cfg.base.J, cfg.base.Jk) == (8, 5, 8, 0.5, 0.2)
        assert cfg.axis1.name == "B" and cfg.axis2 is None

    def test_two_passes(self):
        cfg = rydberg_config(axis1=Axis("B", 0.0, 1.0, 3))
        rows = rydberg_scan(cfg)
        assert [r.d for r in rows] == [1, 1, 1, 2, 2, 2]
        assert [r.jk for r in rows[3:]] == [0.2 / 64] * 3
        assert rows[3].jk == pytest.approx(0.003125)
        assert rows[0].b == 0.0 and rows[3].b == 0.0

    def test_needs_b_axis(self):
        with pytest.raises(StructuralError):
            rydberg_scan(rydberg_config(axis1=Axis("Delta", 0.0, 1.0, 2)))


class TestCsv:
    def test_header_and_shape(self):
        text = emit_csv([SweepRow(delta=0.5, b=0.1, jk=0.2, d=1)])
        lines = text.split("\n")
        assert lines[0] == (
            "delta,b,jk,d,e0,gap,m,s_lr,xi,eta,theta,e_b_closed,e_b_direct,e_teleported,s_a_comp,bound_margin,degenerate"
        )
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert lines[2] == "" and len(lines) == 3
        assert "\r" not in text
        assert lines[1].startswith("0.5,0.1,0.2,1,nan,")
        assert lines[1].endswith(",false")

    def test_round_trip_floats(self):
        rows = run_grid(small_config())
        text = emit_csv(rows)
        for line, row in zip(text.splitlines()[1:], rows):
            fields = line.split(",")
            assert float(fields[CSV_COLUMNS.index("e_b_closed")]) == row.e_b_closed
            assert float(fields[CSV_COLUMNS.index("xi")]) == row.xi

    def test_repeatable(self):
        assert emit_csv(run_grid(small_config())) == emit_csv(run_grid(small_config()))

    def test_empty(self):
        with pytest.raises(StructuralError):
            emit_csv([])


class TestHeatmap:
    def test_two_by_two(self):
        svg = emit_heatmap(fixture_rows([[0, 1], [2, 3]], [[0, 0], [0, 0]]), "s_lr")
        rects = re.findall(r'<rect x="\d+" y="\d+" width="12"', svg)
        assert len(rects) == 4
        assert hex_rgb(RAMP_LO) in svg and hex_rgb(RAMP_HI) in svg
        assert "href" not in svg
        assert "Delta" in svg and ">B<" in svg
        assert "max 3" in svg and "min 0" in svg

    def test_constant_observable(self):
        svg = emit_heatmap(fixture_rows([[0, 1], [2, 3]], [[5, 5], [5, 5]]), "e_teleported")
        fills = re.findall(r'width="12" height="12" fill="(#[0-9a-f]{6})"', svg)
        assert len(fills) == 4 and len(set(fills)) == 1

    def test_nan_cells(self):
        svg = emit_heatmap(fixture_rows([[0, math.nan], [2, 3]], [[0, 0], [0, 0]]), "s_lr")
        assert NAN_COLOR in svg

    def test_deterministic(self):
        rows = fixture_rows([[0, 1], [2, 3]], [[0, 0], [0, 0]])
        assert emit_heatmap(rows, "s_lr") == emit_heatmap(rows, "s_lr")

    def test_one_axis_rejected(self):
        rows = [SweepRow(delta=0.0, b=float(j), jk=0.2, d=1, s_lr=j) for j in range(3)]
        with pytest.raises(StructuralError):
            emit_heatmap(rows, "s_lr")


class TestCorrelatePeaks:
    def test_identical(self):
        a = np.random.default_rng(0).random((5, 6))
        assert correlate_peaks(fixture_rows(a, a), "s_lr", "e_teleported").fraction == 1.0

    def test_monotone_vs_antimonotone(self):
        up = np.tile(np.arange(6.0), (4, 1))
        assert correlate_peaks(fixture_rows(up, -up), "s_lr", "e_teleported").fraction == 0.0

    def test_window(self):
        a = np.zeros((2, 5))
        b = np.zeros((2, 5))
        a[0, 2] = a[1, 2] = 1
        b[0, 3] = 1
        b[1, 4] = 1
        rep = correlate_peaks(fixture_rows(a, b), "s_lr", "e_teleported")
        assert rep.fraction == 0.5
        assert rep.peaks == ((0.0, 2, 3), (1.0, 2, 4))
