"""Simulation-based statistical power for cluster analysis."""

from .datagen import (
    CovarianceSpec,
    Dataset,
    PopulationSpec,
    SubgroupSpec,
    build_covariance,
    expected_separation,
    make_equidistant_population,
    make_grid_population,
    nearest_psd,
    sample,
)
from .power import Condition, PipelineSpec, PowerReport, estimate_power, model_select, run_iteration, sweep
from .reduce import Projection, mds, projected_separation

__version__ = "0.1.0"
