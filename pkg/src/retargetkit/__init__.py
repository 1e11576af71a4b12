"""Content-aware image retargeting toolkit.

Backgrounds are inpainted and seam-carved to the target size; the foreground
is super-resolved, cut out as an RGBA sprite, and placed by a particle swarm
maximizing a composition fitness.
"""

from .errors import (
    CorruptDataError,
    DimensionMismatchError,
    EmptyImageError,
    EnlargementTooLargeError,
    ExternalToolError,
    FootprintOutOfBoundsError,
    NoForegroundError,
    RetargetKitError,
    SeamOutOfBoundsError,
    SpriteTooLargeError,
    UnparsableScoreError,
    UnsupportedFormatError,
)
from .foreground import (
    ForegroundSprite,
    extract_sprite,
    feather_alpha,
    super_resolve,
    super_resolve_external,
    upscale_mask,
)
from .inpaint import inpaint_diffusion, inpaint_external
from .pipeline import (
    PipelineConfig,
    Placement,
    decode_placement,
    default_dilation_radius,
    merge,
    placement_bounds,
    placement_footprint,
    retarget,
)
from .pso import OptimizationTrace, PsoConfig, SearchBounds, pso_maximize
from .raster import (
    BinaryMask,
    RasterImage,
    TargetSize,
    dilate,
    load_image,
    load_mask,
    resample,
    round_half_up,
    save_image,
)
from .scoring import (
    DEFAULT_WEIGHTS,
    CompositionContext,
    FitnessReport,
    score_external,
    score_rule_based,
)
from .seams import (
    EnergyMap,
    Seam,
    energy_map,
    find_horizontal_seam,
    find_vertical_seam,
    insert_seams,
    remove_seam,
    retarget_background,
)

__version__ = "0.1.0"
