"""Python bindings for the sonotrack spatial audio core."""

from ._core import (
    Error,
    assemble_condition,
    cartesian_to_spherical,
    coarse_positions,
    derive_clip_seed,
    estimate_ild,
    estimate_itd,
    load_hrir_set,
    mae_azimuth,
    mae_elevation,
    map_to_sound_field,
    mapping_factor,
    quantize_to_grid,
    random_trajectory,
    render_moving_source,
    resample_for_distance,
    select_direction,
    smooth_trajectory,
    spherical_to_cartesian,
    synth_spherical_head,
    HrirSet,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
