"""
Operators

The residual functional of the tile equation and the expansive/compact operator
pair built from it.

On a tile [k, k+1] x [j, j+1] with bottom data g(x) and left-edge trace b(t):

    F(u)(t, x) = int_j^x u(t, z) dz - int_j^x g(z) dz + 1/2 int_k^t (u(s, x)^2 - b(s)^2) ds

    T u = (1 + eps) u
    S u = -eps u + eps F(u)

so that (T + S) u - u = eps F(u) and fixed points of T + S are exactly the
solutions of F(u) = 0. The ``check_*`` functions measure the operator estimates
over seeded random samples; they report numbers and never raise on a violated
bound.
"""

from typing import Tuple

import numpy as np
from loguru import logger
from numpy.polynomial import polynomial as P
from pydantic import BaseModel, ConfigDict, Field

from ..config.settings import settings
from ..models.domain import OperatorReport, SBoundReport, TileSpec
from .errors import GridShapeError
from .grid import GridFn, TraceFn, c1_norm, c1_values, cum_t, cum_x, d_t, d_x

# Estimates for sup|S u|, sup|d_t S u|, sup|d_x S u| divided by eps, for c1_norm(u) <= 1/2
S_BOUNDS = (13.0 / 8.0, 9.0 / 8.0, 7.0 / 4.0)
X_BALL_RADIUS = 0.5
LIPSCHITZ_FACTOR = 4.0
IDENTITY_TOL = 1e-12

_EPS_FLOOR = 1e-12
_MAX_DOUBLINGS = 8


def epsilon_for_cell(cell_j: int) -> float:
    """
    Default eps for diagnostics on cell j: half of the cell's upper bound.

    Gives 0.05, 0.005, 5e-5 on |j| = 0, 1, 2; the exponent keeps doubling and
    is floored at 1e-12.
    """
    exponent = 2 ** min(abs(cell_j), _MAX_DOUBLINGS)
    return max(0.5 * 10.0 ** -exponent, _EPS_FLOOR)


def epsilon_upper_bound(cell_j: int) -> float:
    """Open upper end of the admissible eps interval: 1/10, 1/10^2, 1/10^4, then unrestricted."""
    if abs(cell_j) <= 2:
        return 10.0 ** -(2 ** abs(cell_j))
    return 1.0


class OperatorParams(BaseModel):
    """Everything the operators need besides u."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    epsilon: float = Field(gt=0.0, lt=1.0)
    tile: TileSpec
    g: TraceFn = Field(description="Bottom data, nx samples")
    b: TraceFn = Field(description="Left-neighbour edge trace in t, nt samples")

    @classmethod
    def for_tile(
        cls, tile: TileSpec, g: TraceFn, b: TraceFn | None = None, epsilon: float | None = None
    ) -> "OperatorParams":
        params = cls(
            epsilon=settings.operator.epsilon if epsilon is None else epsilon,
            tile=tile,
            g=g,
            b=b if b is not None else TraceFn.zeros(tile.nt, origin=tile.slab_k),
        )
        params.check_resolution()
        return params

    @property
    def in_cell_interval(self) -> bool:
        return self.epsilon < epsilon_upper_bound(self.tile.cell_j)

    def check_resolution(self, u: GridFn | None = None) -> None:
        if self.g.n != self.tile.nx:
            raise GridShapeError(f"bottom data has {self.g.n} samples, tile has nx={self.tile.nx}")
        if self.b.n != self.tile.nt:
            raise GridShapeError(f"edge trace has {self.b.n} samples, tile has nt={self.tile.nt}")
        if u is not None and u.tile.shape != self.tile.shape:
            raise GridShapeError(
                f"grid function shape {u.tile.shape} != tile shape {self.tile.shape}"
            )


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------

def residual_values(
    u: np.ndarray, g: np.ndarray, b: np.ndarray, ht: float, hx: float
) -> np.ndarray:
    """Array form of F; ``u`` is (nt, nx), ``g`` (nx,), ``b`` (nt,)."""
    return (
        cum_x(u, hx)
        - cum_x(g, hx)[np.newaxis, :]
        + 0.5 * cum_t(u**2 - (b**2)[:, np.newaxis], ht)
    )


def residual_F(u: GridFn, p: OperatorParams) -> GridFn:
    p.check_resolution(u)
    return u.with_values(residual_values(u.values, p.g.values, p.b.values, p.tile.ht, p.tile.hx))


def apply_T(u: GridFn, p: OperatorParams) -> GridFn:
    return u.with_values((1.0 + p.epsilon) * u.values)


def apply_S(u: GridFn, p: OperatorParams) -> GridFn:
    F = residual_F(u, p)
    return u.with_values(-p.epsilon * u.values + p.epsilon * F.values)


def onto_witness(v: GridFn, p: OperatorParams) -> Tuple[GridFn, float]:
    """Preimage v / (1 + eps) of v under T and sup|T(preimage) - v|."""
    u = v.with_values(v.values / (1.0 + p.epsilon))
    return u, float(np.max(np.abs(apply_T(u, p).values - v.values)))


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def random_admissible(
    tile: TileSpec, rng: np.random.Generator, radius: float = X_BALL_RADIUS, degree: int = 3
) -> GridFn:
    """
    Random smooth grid function with c1_norm exactly ``radius``.

    A sum of separable monomials s^m r^n in tile-local coordinates with uniform
    coefficients, rescaled.
    """
    coef = rng.uniform(-1.0, 1.0, size=(degree + 1, degree + 1))
    s_t = np.linspace(0.0, 1.0, tile.nt)
    s_x = np.linspace(0.0, 1.0, tile.nx)
    values = P.polygrid2d(s_t, s_x, coef)
    norm = c1_values(values, tile.ht, tile.hx)
    if norm == 0.0:
        return GridFn.zeros(tile)
    return GridFn(tile=tile, values=values * (radius / norm))


def _sample_rng(seed: int, offset: int) -> np.random.Generator:
    return np.random.default_rng([seed, offset])


def s_ratios(u: GridFn, p: OperatorParams) -> Tuple[float, float, float]:
    """(sup|S u|, sup|d_t S u|, sup|d_x S u|) divided by eps."""
    su = apply_S(u, p).values
    return (
        float(np.max(np.abs(su))) / p.epsilon,
        float(np.max(np.abs(d_t(su, p.tile.ht)))) / p.epsilon,
        float(np.max(np.abs(d_x(su, p.tile.hx)))) / p.epsilon,
    )


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

def check_expansive(p: OperatorParams, n_samples: int, seed: int | None = None) -> float:
    """
    Smallest c1_norm(Tu - Tv) / c1_norm(u - v) over random pairs.

    Equals 1 + eps up to rounding. Pairs with u == v are skipped; if every pair
    coincides a ValueError is raised.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    seed = settings.operator.seed if seed is None else seed
    h_min = np.inf
    for i in range(n_samples):
        rng = _sample_rng(seed, i)
        u = random_admissible(p.tile, rng)
        v = random_admissible(p.tile, rng)
        gap = c1_norm(u.with_values(u.values - v.values))
        if gap == 0.0:
            continue
        Tu, Tv = apply_T(u, p), apply_T(v, p)
        h_min = min(h_min, c1_norm(Tu.with_values(Tu.values - Tv.values)) / gap)
    if not np.isfinite(h_min):
        raise ValueError(f"all {n_samples} sampled pairs coincide; expansion ratio not measured")
    return float(h_min)


def check_S_bounds(
    p: OperatorParams, n_samples: int, seed: int | None = None, slack: float | None = None
) -> SBoundReport:
    """Largest sampled S-ratios over u with c1_norm(u) = 1/2; offsets of violating samples."""
    seed = settings.operator.seed if seed is None else seed
    slack = settings.operator.bound_slack if slack is None else slack
    worst = [0.0, 0.0, 0.0]
    max_c1 = 0.0
    violations = []
    for i in range(n_samples):
        u = random_admissible(p.tile, _sample_rng(seed, i))
        ratios = s_ratios(u, p)
        worst = [max(w, r) for w, r in zip(worst, ratios)]
        max_c1 = max(max_c1, c1_norm(apply_S(u, p)))
        if any(r > bound + slack for r, bound in zip(ratios, S_BOUNDS)):
            violations.append(i)
    if violations:
        logger.warning(f"S-bound violated by samples {violations} (seed {seed})")
    return SBoundReport(
        ratio_s=worst[0],
        ratio_st=worst[1],
        ratio_sx=worst[2],
        max_c1_su=max_c1,
        n_samples=n_samples,
        seed=seed,
        violations=violations,
    )


def check_fixed_point_identity(p: OperatorParams, n_samples: int, seed: int | None = None) -> float:
    """max over samples and nodes of |(T + S)u - u - eps F(u)|."""
    seed = settings.operator.seed if seed is None else seed
    worst = 0.0
    for i in range(n_samples):
        u = random_admissible(p.tile, _sample_rng(seed, i), radius=1.0)
        lhs = apply_T(u, p).values + apply_S(u, p).values - u.values
        worst = max(worst, float(np.max(np.abs(lhs - p.epsilon * residual_F(u, p).values))))
    return worst


def check_S_lipschitz(p: OperatorParams, n_samples: int, seed: int | None = None) -> float:
    """Largest sampled c1_norm(Su - Sv) / c1_norm(u - v) over pairs in the X-ball."""
    seed = settings.operator.seed if seed is None else seed
    worst = 0.0
    for i in range(n_samples):
        rng = _sample_rng(seed, i)
        u = random_admissible(p.tile, rng)
        v = random_admissible(p.tile, rng)
        gap = c1_norm(u.with_values(u.values - v.values))
        if gap == 0.0:
            continue
        Su, Sv = apply_S(u, p), apply_S(v, p)
        worst = max(worst, c1_norm(Su.with_values(Su.values - Sv.values)) / gap)
    return worst


def run_diagnostics(
    p: OperatorParams, n_samples: int, seed: int | None = None, slack: float | None = None
) -> OperatorReport:
    """All operator checks on one tile, with an overall verdict."""
    seed = settings.operator.seed if seed is None else seed
    if not p.in_cell_interval:
        logger.warning(
            f"eps={p.epsilon} is outside (0, {epsilon_upper_bound(p.tile.cell_j)}) "
            f"for cell {p.tile.cell_j}"
        )
    h_min = check_expansive(p, n_samples, seed)
    v = random_admissible(p.tile, _sample_rng(seed, n_samples))
    _, onto_residual = onto_witness(v, p)
    identity = check_fixed_point_identity(p, n_samples, seed)
    lipschitz = check_S_lipschitz(p, n_samples, seed)
    bounds = check_S_bounds(p, n_samples, seed, slack)

    passed = (
        abs(h_min - (1.0 + p.epsilon)) <= IDENTITY_TOL
        and onto_residual <= IDENTITY_TOL
        and identity <= IDENTITY_TOL
        and lipschitz <= LIPSCHITZ_FACTOR * p.epsilon
        and bounds.passed
    )
    logger.info(
        f"operator diagnostics eps={p.epsilon}: h_min={h_min:.15f} "
        f"S-ratios=({bounds.ratio_s:.4f}, {bounds.ratio_st:.4f}, {bounds.ratio_sx:.4f}) "
        f"passed={passed}"
    )
    return OperatorReport(
        epsilon=p.epsilon,
        h_min=h_min,
        onto_residual=onto_residual,
        identity_max=identity,
        lipschitz_max=lipschitz,
        bounds=bounds,
        seed=seed,
        passed=passed,
    )

