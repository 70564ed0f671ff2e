"""
Tile solver tests: Picard convergence, residuals, conservation and
refinement behaviour on single tiles.
"""

import numpy as np
import pytest

from src.core.errors import NonConvergenceError, ResidualTooLargeError
from src.core.grid import GridFn, c1_norm
from src.core.operators import apply_S, apply_T
from src.core.tile_solver import (
    cell_energy_history,
    cell_mass_history,
    solve_tile,
    verify_solution,
)
from src.models.domain import SolverConfig, TileSpec

from .helpers import bump_params, trace_params


@pytest.fixture
def bump_solution(tile):
    p = bump_params(tile, 0.15)
    return solve_tile(p, SolverConfig()), p


class TestSolveTile:

    def test_zero_data_converges_in_one_step(self, tile):
        sol = solve_tile(trace_params(tile, np.zeros(tile.nx)))
        assert sol.iterations == 1
        assert np.all(sol.u.values == 0.0)

    def test_linear_data_similarity_solution(self, tile):
        a = 0.3
        p = trace_params(tile, a * tile.x_nodes)
        sol = solve_tile(p)
        t, x = np.meshgrid(tile.t_nodes, tile.x_nodes, indexing="ij")
        exact = a * x / (1 + a * t)
        assert np.max(np.abs(sol.u.values - exact)) <= 5e-4

    def test_bump_converges_quickly(self, bump_solution):
        sol, _ = bump_solution
        assert sol.iterations <= 50
        assert sol.final_update < 1e-10
        assert sol.volterra_residual_sup <= 1e-8
        assert sol.residual_sup <= 1e-3

    def test_bottom_row_is_data(self, bump_solution):
        sol, p = bump_solution
        np.testing.assert_array_equal(sol.u.values[0], p.g.values)

    def test_edge_columns_stay_zero(self, bump_solution):
        sol, _ = bump_solution
        assert np.all(sol.u.values[:, 0] == 0.0)
        assert np.all(sol.u.values[:, -1] == 0.0)

    def test_sup_preserved(self, bump_solution):
        sol, _ = bump_solution
        row_max = np.max(np.abs(sol.u.values), axis=1)
        assert np.max(np.abs(row_max - 0.15)) <= 1e-4

    def test_monotone_convergence_tail(self, tile):
        sol = solve_tile(bump_params(tile, 0.1))
        tail = sol.updates[3:]
        assert all(b < a for a, b in zip(tail, tail[1:])), sol.updates

    def test_discrete_fixed_point_of_operator_sum(self, bump_solution):
        sol, p = bump_solution
        cfg = SolverConfig()
        lhs = apply_T(sol.u, p).values + apply_S(sol.u, p).values - sol.u.values
        bound = p.epsilon * cfg.residual_tol * (1 + (p.tile.nx - 1) * p.tile.hx)
        assert c1_norm(sol.u.with_values(lhs)) <= bound


class TestSolverFaults:

    def test_iteration_cap(self, tile):
        with pytest.raises(NonConvergenceError) as info:
            solve_tile(bump_params(tile, 0.15), SolverConfig(max_iter=2))
        assert info.value.iterations == 2
        assert (info.value.slab_k, info.value.cell_j) == (0, 0)

    def test_blowup_threshold(self, tile):
        with pytest.raises(NonConvergenceError):
            solve_tile(bump_params(tile, 0.15), SolverConfig(blowup=1e-9))

    def test_residual_too_large_keeps_solution(self, tile):
        with pytest.raises(ResidualTooLargeError) as info:
            solve_tile(bump_params(tile, 0.15), SolverConfig(residual_tol=1e-12))
        assert info.value.solution is not None
        assert info.value.residual_sup > 1e-12


class TestVerifySolution:

    def test_zero_solution(self, tile):
        p = trace_params(tile, np.zeros(tile.nx))
        v = verify_solution(solve_tile(p), p)
        assert v.model_dump() == {
            "residual_sup": 0.0,
            "volterra_residual_sup": 0.0,
            "pde_residual_sup": 0.0,
            "bottom_mismatch": 0.0,
            "left_trace_sup": 0.0,
            "right_trace_sup": 0.0,
        }

    def test_linear_data_bottom_mismatch(self, tile):
        p = trace_params(tile, 0.3 * tile.x_nodes)
        assert verify_solution(solve_tile(p), p).bottom_mismatch == 0.0

    def test_matches_solver_diagnostics(self, bump_solution):
        sol, p = bump_solution
        v = verify_solution(sol, p)
        assert v.residual_sup == pytest.approx(sol.residual_sup)
        assert v.pde_residual_sup == pytest.approx(sol.pde_residual_sup)

    def test_pde_residual_second_order(self):
        residuals = []
        for n in (65, 129):
            tile = TileSpec(slab_k=0, cell_j=0, nt=n, nx=n)
            p = bump_params(tile, 0.15)
            residuals.append(verify_solution(solve_tile(p), p).pde_residual_sup)
        ratio = residuals[0] / residuals[1]
        assert 3.2 <= ratio <= 4.8, f"ratio {ratio:.3f}"


class TestConservation:

    def test_mass(self, bump_solution):
        sol, _ = bump_solution
        mass = cell_mass_history(sol)
        assert np.max(np.abs(mass - mass[0])) <= 1e-6

    def test_energy(self, bump_solution):
        sol, _ = bump_solution
        energy = cell_energy_history(sol)
        assert np.max(np.abs(energy - energy[0])) <= 1e-5

    def test_zero_mass(self, tile):
        sol = solve_tile(trace_params(tile, np.zeros(tile.nx)))
        assert np.all(cell_mass_history(sol) == 0.0)
        assert isinstance(sol.u, GridFn)
