"""Dyadic Hausdorff content and Choquet integration on finite dyadic grids."""

from .content import (ContentResult, ball_content_bounds, brute_force_content,
                      content_value, dyadic_content)
from .cubes import DyadicCube, GridFunction, GridSet, cell_of_point, grid_points
from .errors import (ChoqError, ConfigError, GeometryError, InstanceTooLargeError,
                     SchemaError)
from .integral import (StepFunction, chebyshev_bound, check_fatou,
                       check_monotone_convergence, check_sublinearity,
                       choquet_integral, distribution, lebesgue_comparability,
                       midpoint_layer_cake, nl1_norm)
from .lebesgue import (LebesguePointReport, average_limsup, fstar,
                       fstar_bounds_check, lebesgue_scan, quasicontinuity_defect,
                       tail_averages, translation_invariance_check)
from .maximal import (RadialProfile, ball_average, geometric_radii, maximal,
                      pointwise_domination, radial_profile, weak_type_cross,
                      weak_type_ratio)
from .shapes import (boundary_cells, fill_polygon, koch_dimension, koch_polygon,
                     koch_region, polygon_area, random_function, random_set,
                     rasterize_ball, staircase_function)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
