"""Rate regions for two-user Gaussian interference channels with transmitter conferencing."""

from .gaussian_core import (
    LinearGaussianModel,
    build_covariance,
    conditional_mutual_information,
    mutual_information,
)
from .icc_model import (
    ChannelParams,
    DpcCoeffs,
    PowerSplit,
    SweepConfig,
    UserSplit,
    achievable_polygon,
    bound_system,
    build_signal_model,
    ideal_conferencing_region,
    sweep,
    sweep_region,
)
from .polytope_fme import (
    LinearInequality,
    LinearSystem,
    UnboundedRegionError,
    eliminate_variable,
    polygon_from_system,
    project,
    remove_redundant,
)
from .region_geom import (
    Polygon2D,
    Region2D,
    axis_intercepts,
    contains,
    convex_hull,
    facet_slopes,
    hausdorff,
    hull_union,
)

__all__ = [name for name in dir() if not name.startswith("_")]
