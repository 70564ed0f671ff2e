"""
Assembler tests: slab sweeps, gluing, interface traces, the decay envelope
and multi-slab advance up to the shock time.
"""

import numpy as np
import pytest

from src.core.assembler import (
    advance,
    check_envelope,
    envelope_bound,
    solve_slab,
    sweep_order,
)
from src.core.errors import InterfaceDataError
from src.core.grid import TraceFn
from src.core.initial_data import PSI_SLOPE_MAX, sample_bottom
from src.models.domain import InitialData, SampledCell, SolverConfig, TileSpec

from .helpers import bump_data

CHECKS = dict(trace_tol=1e-8, slope_tol=2e-2, ut_tol=1e-6)


def bottom_data(phi: InitialData, cells, n: int = 65):
    return {
        j: sample_bottom(phi, TileSpec(slab_k=0, cell_j=j, nt=n, nx=n))
        for j in range(cells[0], cells[1] + 1)
    }


def envelope_family(scale: float):
    return bump_data(*[(j, scale * 2.0 ** -(abs(j) + 1)) for j in range(-3, 4)])


class TestSweep:

    def test_center_outward_order(self):
        assert sweep_order((-2, 2)) == [0, 1, -1, 2, -2]
        assert sweep_order((1, 3)) == [1, 2, 3]

    def test_order_must_cover_the_window(self):
        with pytest.raises(ValueError):
            solve_slab(0, {}, (-1, 1), order=[0, 1])


class TestSolveSlab:

    def test_zero_data(self):
        slab = solve_slab(0, bottom_data(InitialData(), (-2, 2)), (-2, 2))
        assert sorted(slab.tiles) == [-2, -1, 0, 1, 2]
        for sol in slab.tiles.values():
            assert np.all(sol.u.values == 0.0)
        assert max(slab.glued_residuals.values()) == 0.0
        report = slab.report()
        assert report.interfaces.passed(**CHECKS)
        assert report.envelope.passed

    def test_single_bump_interfaces(self):
        phi = bump_data((0, 0.15))
        slab = solve_slab(0, bottom_data(phi, (-2, 2)), (-2, 2))
        interfaces = slab.interfaces
        assert [m.x for m in interfaces.interfaces] == [-1, 0, 1, 2]
        assert interfaces.max_value <= 1e-8
        assert interfaces.max_ut_mismatch <= 1e-6
        assert interfaces.max_slope <= 2e-2
        assert interfaces.passed(**CHECKS)
        for j in (-2, -1, 1, 2):
            assert np.all(slab.tiles[j].u.values == 0.0)
        center = next(c for c in slab.envelope.cells if c.cell == 0)
        assert center.margin_u == pytest.approx(0.5 - 0.15, abs=5e-4)

    def test_glued_residual_matches_tile_residual(self):
        slab = solve_slab(0, bottom_data(bump_data((0, 0.15)), (-1, 1)), (-1, 1))
        for j, sol in slab.tiles.items():
            assert slab.glued_residuals[j] == pytest.approx(sol.residual_sup, abs=1e-15)

    def test_tiles_are_decoupled(self):
        """Dropping the bump on cell -1 leaves cells 0 and 1 bit for bit unchanged."""
        cells = (-1, 1)
        phi = bump_data((-1, 0.075), (0, 0.15), (1, 0.075))
        together = solve_slab(0, bottom_data(phi, cells), cells)
        without = solve_slab(0, bottom_data(phi.without_cell(-1), cells), cells)
        assert np.all(without.tiles[-1].u.values == 0.0)
        for j in (0, 1):
            np.testing.assert_array_equal(together.tiles[j].u.values, without.tiles[j].u.values)

    def test_sweep_order_does_not_matter(self):
        cells = (-2, 2)
        data = bottom_data(bump_data((-1, 0.05), (0, 0.1), (2, 0.03)), cells)
        default = solve_slab(0, data, cells)
        reversed_ = solve_slab(0, data, cells, order=[2, 1, 0, -1, -2])
        threaded = solve_slab(0, data, cells, workers=3)
        for j in default.cell_range:
            np.testing.assert_array_equal(default.tiles[j].u.values, reversed_.tiles[j].u.values)
            np.testing.assert_array_equal(default.tiles[j].u.values, threaded.tiles[j].u.values)

    def test_data_must_vanish_at_endpoints(self):
        data = {0: TraceFn(values=np.full(65, 0.1), origin=0)}
        with pytest.raises(InterfaceDataError) as info:
            solve_slab(0, data, (0, 0))
        assert info.value.cell_j == 0


class TestEnvelope:

    @pytest.mark.parametrize(
        "slab_k, cell_j, expected",
        [(0, 0, 0.5), (0, 2, 0.125), (0, -2, 0.125), (1, 0, 0.5**0.5), (2, 1, 0.25**0.25)],
    )
    def test_bound(self, slab_k, cell_j, expected):
        assert envelope_bound(slab_k, cell_j) == pytest.approx(expected)

    def test_decaying_family_stays_inside(self):
        solution = advance(envelope_family(0.15), 2, (-3, 3))
        assert solution.completed
        for slab in solution.slabs:
            assert slab.envelope.passed, slab.envelope
        assert not any(c.extrapolated for s in solution.slabs for c in s.envelope.cells)

    def test_steep_family_violates_slope_margin(self):
        solution = advance(envelope_family(0.3), 1, (-3, 3))
        envelope = solution.slabs[0].envelope
        assert not envelope.passed
        center = next(c for c in envelope.cells if c.cell == 0)
        assert center.margin_ux < 0
        assert center.sup_ux >= 0.15 * PSI_SLOPE_MAX - 1e-3

    def test_tolerance_is_recorded(self):
        slab = solve_slab(0, bottom_data(InitialData(), (0, 0)), (0, 0))
        assert check_envelope(slab, tolerance=1e-3).tolerance == 1e-3


class TestAdvance:

    def test_slabs_share_traces(self):
        solution = advance(bump_data((0, 0.08)), 2, (-1, 1))
        assert solution.completed
        assert [s.slab_k for s in solution.slabs] == [0, 1]
        for j in (-1, 0, 1):
            np.testing.assert_array_equal(
                solution.slabs[1].tiles[j].u.values[0],
                solution.slabs[0].tiles[j].u.top_row,
            )

    def test_second_slab_time_nodes(self):
        solution = advance(bump_data((0, 0.08)), 2, (0, 0))
        tile = solution.slabs[1].tiles[0].tile
        assert tile.t_nodes[0] == 1.0 and tile.t_nodes[-1] == 2.0

    def test_steep_bump_stops_before_shock(self):
        solution = advance(bump_data((0, 0.25)), 2, (-1, 1))
        assert not solution.completed
        assert solution.t_shock == pytest.approx(1 / (0.25 * PSI_SLOPE_MAX))
        assert solution.failure.t_shock == pytest.approx(1.299, abs=1e-3)
        assert len(solution.slabs) <= 1

    def test_no_shock_for_zero_data(self):
        solution = advance(InitialData(), 3, (-1, 1), nx=17, nt=17)
        assert solution.completed
        assert solution.t_shock == float("inf")
        assert len(solution.slabs) == 3

    def test_bad_data_becomes_a_failure(self):
        phi = InitialData(samples=[SampledCell(cell=0, values=[0.1] * 65)])
        solution = advance(phi, 1, (0, 0))
        assert solution.failure.kind == "interface_data"
        assert solution.failure.cell_j == 0
        assert solution.slabs == []

    def test_iteration_cap_becomes_a_failure(self):
        solution = advance(bump_data((0, 0.15)), 1, (-1, 1), SolverConfig(max_iter=2))
        assert solution.failure.kind == "non_convergence"
        assert (solution.failure.slab_k, solution.failure.cell_j) == (0, 0)

    def test_slab_count_must_be_positive(self):
        with pytest.raises(ValueError):
            advance(InitialData(), 0, (0, 0))
