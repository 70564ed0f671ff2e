"""
Characteristics oracle tests: shock time, the implicit foot-point solve and
error reports against numerical slabs.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.assembler import advance, solve_slab
from src.core.characteristics import (
    compare,
    eval_exact,
    eval_profile,
    refinement_ratio,
    shock_time,
)
from src.core.errors import PastShockError
from src.core.initial_data import PSI_SLOPE_MAX, evaluate, sample_bottom
from src.models.domain import InitialData, OracleConfig, TileSpec

from .helpers import bump_data


class TestShockTime:

    def test_zero_data_never_shocks(self):
        assert shock_time(InitialData()) == math.inf

    def test_single_bump(self):
        assert shock_time(bump_data((0, 0.15))) == pytest.approx(1 / (0.15 * PSI_SLOPE_MAX))

    def test_steepest_bump_decides(self):
        phi = bump_data((0, 0.1), (3, 0.25), (-2, 0.2))
        assert shock_time(phi) == pytest.approx(1 / (0.25 * PSI_SLOPE_MAX))

    def test_threshold_amplitude(self):
        assert shock_time(bump_data((0, 0.25))) == pytest.approx(1.299, abs=1e-3)


class TestEvalProfile:

    def test_constant_profile_translates(self):
        x = np.linspace(0.0, 1.0, 11)
        values, x0, _ = eval_profile(lambda y: np.full_like(y, 0.2), 0.5, x, -1.0, 2.0)
        np.testing.assert_allclose(values, 0.2)
        np.testing.assert_allclose(x0, x - 0.1, atol=1e-14)

    def test_linear_profile(self):
        a, t = 0.3, 0.7
        x = np.linspace(0.0, 1.0, 11)
        values, _, _ = eval_profile(lambda y: a * y, t, x, -1.0, 2.0)
        np.testing.assert_allclose(values, a * x / (1 + a * t), atol=1e-14)

    def test_residual_below_root_tolerance(self):
        phi = bump_data((0, 0.2))
        t, x = np.meshgrid(np.linspace(0, 1, 9), np.linspace(0, 1, 33), indexing="ij")
        _, _, residual = eval_profile(lambda y: evaluate(phi, y), t, x, 0.0, 1.0)
        assert np.max(np.abs(residual)) <= OracleConfig().root_tol


class TestEvalExact:

    def test_initial_time_is_identity(self):
        phi = bump_data((0, 0.15), (1, 0.05))
        x = np.linspace(0.0, 2.0, 41)
        np.testing.assert_allclose(eval_exact(phi, 0.0, x), evaluate(phi, x), atol=1e-14)

    def test_values_stay_in_data_range(self):
        phi = bump_data((0, 0.15))
        u = eval_exact(phi, 1.2, np.linspace(-1.0, 2.0, 301))
        assert np.min(u) >= 0.0
        assert np.max(u) <= 0.15 + 1e-15

    @given(x=st.floats(0.0, 1.0))
    @settings(max_examples=50, deadline=None)
    def test_semigroup(self, x):
        """Evolving 0.4 then 0.4 agrees with evolving 0.8 directly."""
        phi = bump_data((0, 0.15))
        direct = eval_exact(phi, 0.8, np.array([x]))[0]

        def half_way(y):
            return eval_exact(phi, 0.4, np.asarray(y))

        stepped, _, _ = eval_profile(half_way, 0.4, np.array([x]), 0.0, 1.0)
        assert stepped[0] == pytest.approx(direct, abs=1e-12)

    def test_past_shock_rejected(self):
        phi = bump_data((0, 0.25))
        with pytest.raises(PastShockError) as info:
            eval_exact(phi, 1.5, np.array([0.5]))
        assert info.value.t_shock == pytest.approx(1.299, abs=1e-3)


class TestCompare:

    def test_zero_data(self):
        report = compare(advance(InitialData(), 1, (-1, 1)), InitialData())
        assert report.sup_err == 0.0 and report.l2_err == 0.0
        assert report.t_shock is None
        assert report.passed

    def test_single_slab_error(self):
        phi = bump_data((0, 0.15))
        tile = TileSpec(slab_k=0, cell_j=0, nt=65, nx=65)
        slab = solve_slab(0, {0: sample_bottom(phi, tile)}, (-1, 1))
        report = compare(slab, phi, bound=5e-3)
        assert report.sup_err <= 5e-3
        assert report.l2_err <= report.sup_err
        assert report.passed

    def test_second_order_refinement(self):
        phi = bump_data((0, 0.15))
        coarse = advance(phi, 1, (0, 0), nx=65, nt=65)
        fine = advance(phi, 1, (0, 0), nx=129, nt=129)
        report, fine_report = refinement_ratio(coarse, fine, phi)
        assert fine_report.sup_err < report.sup_err
        assert 3.2 <= report.ratio <= 4.8, f"ratio {report.ratio:.3f}"

    def test_two_slabs(self):
        phi = bump_data((0, 0.08))
        solution = advance(phi, 2, (-1, 1))
        report = compare(solution, phi, bound=1e-2)
        assert report.passed, report.sup_err

    def test_two_slabs_close_to_shock(self):
        """bump(0, 0.15) over [0, 2] with T* ~ 2.165: the 1e-2 bound needs 129 nodes per side."""
        phi = bump_data((0, 0.15))
        coarse = advance(phi, 2, (-1, 1), nx=65, nt=65)
        fine = advance(phi, 2, (-1, 1), nx=129, nt=129)
        assert coarse.completed and fine.completed
        report, fine_report = refinement_ratio(coarse, fine, phi, bound=1e-2)
        assert fine_report.sup_err <= 1e-2
        assert 1e-2 < report.sup_err <= 1.5e-2
        assert 1.4 <= report.ratio <= 2.2, f"ratio {report.ratio:.3f}"

    def test_failing_bound(self):
        phi = bump_data((0, 0.15))
        report = compare(advance(phi, 1, (0, 0)), phi, bound=1e-12)
        assert not report.passed

    def test_slab_past_shock_rejected(self):
        phi = bump_data((0, 0.25))
        zero = advance(InitialData(), 2, (0, 0), nx=17, nt=17)
        with pytest.raises(PastShockError):
            compare(zero, phi)
