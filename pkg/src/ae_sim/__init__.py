"""Deterministic autoexposure simulation: synthetic 4D exposure-stack scenes,
four pluggable AE controllers, closed-loop evaluation, CLI and HTTP service."""

from .algorithms import ALGORITHMS, AEConfig, AEDecision, AEState, entropy_ae, exposure_scale
from .algorithms import global_ae, saliency_ae, semantic_ae, smooth_index, step
from .dataset import DatasetManifest, DiskSequence, load_dataset, save_dataset
from .errors import AESimError
from .exposure import (
    ExposureLadder,
    ExposureStack,
    build_ladder,
    ev_relative,
    ev_span,
    expand_stack,
    interpolate_exposure,
    nearest_index,
)
from .histogram import WeightedHistogram, build_histogram, clip_saturated, entropy, weighted_mean
from .image import BoundingBox, RawImage, full_frame_box, subsample
from .isp import IspProfile, calibrate_gamma, linear_to_srgb, raw_to_srgb
from .saliency import SaliencyConfig, mbd_saliency, raster_mbd, threshold_map, weights_from_saliency
from .scene import (
    LightSchedule,
    MovingObject,
    NoiseProfile,
    Region,
    SceneScript,
    SceneSequence,
    apply_sensor_noise,
    generate_radiance,
    render_exposure,
    synthesize_scene,
)
from .scenes import bundled_scene_scripts, bundled_suite, default_ladder, static_scene
from .simulate import (
    ScaleComparison,
    SimulationTrace,
    compare_scales,
    config_hash,
    export_frames,
    export_trace,
    load_trace,
    run,
)

__version__ = "0.1.0"
