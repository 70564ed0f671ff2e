# Core Package
from .assembler import GlobalSolution, SlabSolution, advance, solve_slab
from .pipeline import TilesPipeline
from .tile_solver import TileSolution, solve_tile

__all__ = [
    "GlobalSolution",
    "SlabSolution",
    "TileSolution",
    "TilesPipeline",
    "advance",
    "solve_slab",
    "solve_tile",
]
