import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pointer_tof import InfeasibleError, InvalidParameterError, NoCrossingError, gradient_d, reference_setup, width_ratio
from pointer_tof.sweep import (
    SweepAxis,
    SweepSpec,
    find_critical_width,
    golden_section,
    gradient_surface_spec,
    optimize_width_ratio,
    run_sweep,
    width_ratio_surface_spec,
)

REF = reference_setup(dP0=150.0, dp=30.0)


class TestSweeps:
    def test_gradient_decreases_with_initial_width(self):
        grid = run_sweep(gradient_surface_spec(num_dp=12, num_dP0=25)).grid()
        assert grid.shape == (12, 25)
        assert np.all(np.diff(grid, axis=1) < 0.0)
        assert np.all(grid[:, -1] < grid[:, 0])

    def test_width_ratio_decreases_with_initial_width(self):
        result = run_sweep(width_ratio_surface_spec(num_dp=12, num_dP0=25))
        grid = result.grid()
        assert np.all(np.diff(grid, axis=1) < 0.0)
        assert np.all(np.isfinite(result.rows))
        assert result.rows.shape == (12 * 25, 3)

    def test_single_point_matches_direct_call(self):
        spec = SweepSpec(REF, SweepAxis("dp", (30.0,)), SweepAxis("dP0", (150.0,)), "width_ratio")
        rows = run_sweep(spec).rows
        assert rows.shape == (1, 3)
        assert rows[0, 2] == width_ratio(REF)

    @pytest.mark.parametrize("quantity, fn", [("gradient_d", gradient_d), ("width_ratio", width_ratio)])
    def test_cells_match_direct_calls(self, quantity, fn):
        spec = SweepSpec(REF, SweepAxis.linspace("kappa", 0.3, 2.0, 4), SweepAxis.linspace("T", 2.0, 5.0, 3), quantity)
        result = run_sweep(spec, workers=3)
        for (k, T, value) in result.rows:
            assert abs(value - fn(REF.replace(kappa=k, T=T))) <= 1e-12 * max(1.0, abs(value))

    def test_row_major_order_independent_of_workers(self):
        spec = gradient_surface_spec(num_dp=4, num_dP0=5)
        serial, threaded = run_sweep(spec).rows, run_sweep(spec, workers=4).rows
        np.testing.assert_array_equal(serial, threaded)
        np.testing.assert_array_equal(serial[:5, 0], np.full(5, 1.0))

    def test_invalid_grid_point_reports_coordinates(self):
        spec = SweepSpec(REF, SweepAxis("t2", (1.0, 0.2)), SweepAxis("dP0", (150.0,)))
        with pytest.raises(InvalidParameterError, match="t2=0.2"):
            run_sweep(spec)

    def test_bad_axes(self):
        with pytest.raises(InvalidParameterError):
            SweepAxis("dp", ())
        with pytest.raises(InvalidParameterError):
            SweepAxis("bogus", (1.0,))
        with pytest.raises(InvalidParameterError):
            SweepSpec(REF, SweepAxis("dp", (1.0,)), SweepAxis("dP0", (1.0,)), "entropy")


class TestCriticalWidth:
    @pytest.mark.parametrize("dp", [10.0, 30.0, 60.0])
    def test_crossing_is_a_sign_change(self, dp):
        w = find_critical_width(REF, dp=dp)
        assert np.isfinite(w)
        setup = REF.replace(dp=dp)
        assert width_ratio(setup.replace(dP0=w * (1 - 1e-4))) > 1.0 > width_ratio(setup.replace(dP0=w * (1 + 1e-4)))

    def test_reference_width_already_narrows(self):
        assert find_critical_width(REF, dp=30.0) < 150.0

    def test_grows_with_pointer_momentum_width(self):
        widths = [find_critical_width(REF, dp=dp) for dp in (0.1, 0.3, 1.0, 10.0, 30.0, 60.0)]
        assert all(a < b for a, b in zip(widths, widths[1:]))
        # narrow pointers leave a finite floor near dP0 = 1 rather than zero
        assert 1.0 < widths[0] < 1.01

    def test_no_crossing(self):
        with pytest.raises(NoCrossingError):
            find_critical_width(REF, dp=30.0, bracket=(200.0, 1e6))

    def test_bad_bracket(self):
        with pytest.raises(InvalidParameterError):
            find_critical_width(REF, bracket=(10.0, 1.0))


@settings(max_examples=25)
@given(st.floats(-3.0, 3.0), st.floats(0.1, 4.0))
def test_golden_section_on_parabola(center, curvature):
    x, fx = golden_section(lambda v: curvature * (v - center) ** 2, -5.0, 5.0)
    assert x == pytest.approx(center, abs=1e-6)
    assert fx <= 1e-10


class TestOptimizer:
    def test_no_free_parameters(self):
        result = optimize_width_ratio(REF, {})
        assert result.setup == REF
        assert result.ratio == width_ratio(REF)

    def test_coupling_only_improves(self):
        result = optimize_width_ratio(REF, {"kappa": (0.1, 5.0)})
        assert result.ratio <= width_ratio(REF)
        assert result.ratio == pytest.approx(width_ratio(result.setup), rel=1e-15)

    def test_returned_ratio_beats_every_grid_point(self):
        result = optimize_width_ratio(REF, {"kappa": (0.2, 3.0), "dp": (5.0, 60.0)})
        assert len(result.trace) == 64
        assert all(result.ratio <= ratio for _, ratio in result.trace)

    def test_deterministic(self):
        free = {"kappa": (0.2, 3.0), "T": (2.0, 6.0)}
        a, b = optimize_width_ratio(REF, free), optimize_width_ratio(REF, free)
        assert a.ratio == b.ratio and a.setup == b.setup and a.evaluations == b.evaluations

    def test_infeasible_ordering(self):
        with pytest.raises(InfeasibleError):
            optimize_width_ratio(REF, {"t2": (0.1, 0.4)})

    def test_rejected_inputs(self):
        with pytest.raises(InvalidParameterError):
            optimize_width_ratio(REF, {"dP0": (1.0, 10.0)})
        with pytest.raises(InvalidParameterError):
            optimize_width_ratio(REF, {"kappa": (2.0, 1.0)})
        with pytest.raises(InvalidParameterError):
            optimize_width_ratio(REF, {"kappa": (0.1, 2.0)}, grid_points=4)
